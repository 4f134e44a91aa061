// Contract tests against response bodies recorded from the real service
// (frontend/scripts/record_fixtures.py). Every number the views render must
// equal the corresponding API field after the two-decimal display rule; the
// dashboard adds no arithmetic of its own.

import { readFileSync } from 'node:fs';

import { describe, expect, it } from 'vitest';

import { percent, twoDecimals } from '../src/format';
import {
  FeedbackDoc,
  ProjectionDoc,
  StatementDoc,
} from '../src/types';
import {
  renderErrorBanner,
  renderFeedback,
  renderRoster,
  renderStatement,
  renderWhatifPanel,
} from '../src/views';

function fixture<T>(name: string): T {
  const url = new URL(`../fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, 'utf-8')) as T;
}

const feedback = fixture<FeedbackDoc>('feedback_s1.json');
const statementS1 = fixture<StatementDoc>('statement_s1.json');
const statementS2 = fixture<StatementDoc>('statement_s2.json');
const statementS3 = fixture<StatementDoc>('statement_s3.json');
const whatifPlusOne = fixture<ProjectionDoc>('whatif_plus_one.json');
const whatifGated = fixture<ProjectionDoc>('whatif_gated.json');

describe('feedback screen', () => {
  const html = renderFeedback(feedback);

  it('gauge shows the API productivity fraction as a percentage', () => {
    expect(feedback.productivity_percentage).toBe('0.4000');
    expect(html).toContain('>40%<');
  });

  it('every stat equals the API field after the two-decimal rule', () => {
    expect(html).toContain(twoDecimals(feedback.month_to_date_vpu)); // 40.00
    expect(html).toContain(twoDecimals(feedback.target)); // 100.00
    expect(html).toContain(percent(feedback.pace));
  });

  it('renders only numbers derived from API fields', () => {
    const allowed = new Set(
      [
        twoDecimals(feedback.month_to_date_vpu),
        twoDecimals(feedback.target),
        percent(feedback.pace).replace('%', ''),
        percent(feedback.productivity_percentage).replace('%', ''),
      ].concat([feedback.as_of, feedback.productivity_percentage]),
    );
    const text = html.replace(/<[^>]*>/g, ' ');
    const rendered = text.match(/\d[\d.-]*/g) ?? [];
    for (const num of rendered) {
      expect(allowed.has(num), `unexpected number ${num}`).toBe(true);
    }
  });

  it('no-clinical-target flag switches to the empty-target state', () => {
    const zeroTarget = { ...feedback, flags: ['no clinical target'] };
    expect(renderFeedback(zeroTarget)).toContain('No clinical target');
  });
});

describe('statement screen', () => {
  const html = renderStatement(statementS1);

  it('each line value equals its API field after the two-decimal rule', () => {
    for (const line of statementS1.lines) {
      expect(html).toContain(twoDecimals(line.vpu_base));
      expect(html).toContain(twoDecimals(line.vpu_final));
    }
    expect(html).toContain(twoDecimals(statementS1.vpu_final_total));
    expect(html).toContain(percent(statementS1.productivity_percentage));
  });

  it('zeroed lines stay visible with their reasons', () => {
    const gatedHtml = renderStatement(statementS3);
    expect(gatedHtml).toContain('data-service="V7"');
    expect(gatedHtml).toContain('class="zeroed"');
    expect(gatedHtml).toContain('treatment_plan_gate');
  });
});

describe('what-if panel', () => {
  it('round-trip with a one-unit proposal shows the projected 41%', () => {
    expect(whatifPlusOne.statement.productivity_percentage).toBe('0.4100');
    const html = renderWhatifPanel(statementS1, whatifPlusOne);
    expect(html).toContain('Projected: 41%');
    expect(html).toContain('Current: 40%');
  });

  it('empty draft shows no projection pane arithmetic', () => {
    const html = renderWhatifPanel(statementS1, null);
    expect(html).toContain('Add proposed services');
    expect(html).not.toContain('Projected:');
  });

  it('a row failing the licensure gate shows inline, contributing 0', () => {
    const html = renderWhatifPanel(statementS1, whatifGated);
    expect(html).toContain('claim invalid: licensure');
    const proposed = whatifGated.statement.lines.find(
      (l) => l.service_id === 'proposed-1',
    )!;
    expect(twoDecimals(proposed.vpu_final)).toBe('0.00');
    expect(html).toContain('data-service="proposed-1"');
  });
});

describe('roster screen', () => {
  it('orders staff by productivity percentage, descending', () => {
    const html = renderRoster([statementS1, statementS3, statementS2]);
    const order = [...html.matchAll(/data-staff="(S\d)"/g)].map((m) => m[1]);
    expect(order).toEqual(['S2', 'S3', 'S1']);
    expect(html.indexOf('110%')).toBeLessThan(html.indexOf('90%'));
  });

  it('staff with zeroed flagged services get a badge count', () => {
    const html = renderRoster([statementS3]);
    expect(html).toContain('<span class="badge">1</span>');
  });

  it('empty roster renders the empty state', () => {
    expect(renderRoster([])).toContain('No statements');
  });
});

describe('error banner', () => {
  it('offers retry and escapes the message', () => {
    const html = renderErrorBanner('unknown staff <S9>');
    expect(html).toContain('data-action="retry"');
    expect(html).toContain('&lt;S9&gt;');
  });
});
