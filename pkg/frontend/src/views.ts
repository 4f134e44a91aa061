import { percent, twoDecimals } from './format.js';
import { FeedbackDoc, LineDoc, ProjectionDoc, StatementDoc } from './types.js';

const NO_CLINICAL_TARGET = 'no clinical target';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;');
}

export function renderErrorBanner(message: string): string {
  return `
    <div class="banner error" role="alert">
      <span>${escapeHtml(message)}</span>
      <button data-action="retry">Retry</button>
    </div>
  `;
}

function flagList(flags: string[]): string {
  if (flags.length === 0) return '';
  const items = flags
    .map((f) => `<li class="flag">${escapeHtml(f)}</li>`)
    .join('');
  return `<ul class="flags">${items}</ul>`;
}

export function renderFeedback(view: FeedbackDoc): string {
  if (view.flags.includes(NO_CLINICAL_TARGET)) {
    return `
      <section class="feedback" data-staff="${escapeHtml(view.staff_id)}">
        <div class="empty-state">No clinical target is set for this staff
        member, so productivity cannot be computed.</div>
        ${flagList(view.flags)}
      </section>
    `;
  }
  return `
    <section class="feedback" data-staff="${escapeHtml(view.staff_id)}">
      <h2>Daily feedback &mdash; ${escapeHtml(view.as_of)}</h2>
      <div class="gauge" data-value="${escapeHtml(view.productivity_percentage)}">
        <span class="gauge-pct">${percent(view.productivity_percentage)}</span>
      </div>
      <dl class="stats">
        <dt>Month to date</dt><dd>${twoDecimals(view.month_to_date_vpu)}</dd>
        <dt>Target</dt><dd>${twoDecimals(view.target)}</dd>
        <dt>Pace</dt><dd>${percent(view.pace)}</dd>
      </dl>
      ${flagList(view.flags)}
    </section>
  `;
}

function renderLine(line: LineDoc): string {
  const reasons = line.trace
    .map((t) => `${escapeHtml(t.rule_id)}: ${escapeHtml(t.reason)}`)
    .concat(line.flags.map(escapeHtml));
  const zeroed = line.vpu_final === '0.0000';
  return `
    <tr class="${zeroed ? 'zeroed' : ''}" data-service="${escapeHtml(line.service_id)}">
      <td>${escapeHtml(line.service_id)}</td>
      <td class="num">${twoDecimals(line.vpu_base)}</td>
      <td class="num">${twoDecimals(line.modifier_factor)}</td>
      <td class="num">${line.slicer === null ? '&mdash;' : twoDecimals(line.slicer)}</td>
      <td class="num">${twoDecimals(line.vpu_final)}</td>
      <td class="reasons">${reasons.join('<br>')}</td>
    </tr>
  `;
}

export function renderStatement(statement: StatementDoc): string {
  return `
    <section class="statement" data-month="${escapeHtml(statement.month)}">
      <h2>${escapeHtml(statement.staff_id)} &mdash; ${escapeHtml(statement.month)}</h2>
      <table>
        <thead>
          <tr><th>Service</th><th>Base</th><th>Modifier</th><th>Outcome</th>
              <th>Final</th><th>Notes</th></tr>
        </thead>
        <tbody>${statement.lines.map(renderLine).join('')}</tbody>
        <tfoot>
          <tr>
            <td>Total</td>
            <td class="num">${twoDecimals(statement.vpu_base_total)}</td>
            <td></td><td></td>
            <td class="num">${twoDecimals(statement.vpu_final_total)}</td>
            <td>of ${twoDecimals(statement.target)} &rarr;
                ${percent(statement.productivity_percentage)}</td>
          </tr>
        </tfoot>
      </table>
      ${flagList(statement.flags)}
    </section>
  `;
}

/** Current month and the projected statement side by side. */
export function renderWhatifPanel(
  current: StatementDoc,
  projection: ProjectionDoc | null,
): string {
  const projected = projection
    ? `
      <div class="pane projected">
        <h3>Projected: ${percent(projection.statement.productivity_percentage)}</h3>
        ${renderStatement(projection.statement)}
        ${flagList(projection.warnings)}
      </div>
    `
    : '<div class="pane projected empty-state">Add proposed services to see a projection.</div>';
  return `
    <section class="whatif">
      <div class="pane current">
        <h3>Current: ${percent(current.productivity_percentage)}</h3>
        ${renderStatement(current)}
      </div>
      ${projected}
    </section>
  `;
}

function flagCount(statement: StatementDoc): number {
  const flaggedLines = statement.lines.filter(
    (line) =>
      line.flags.length > 0 ||
      (line.vpu_final === '0.0000' && line.trace.length > 0),
  );
  return statement.flags.length + flaggedLines.length;
}

/** Manager roster: one row per staff member, highest productivity first. */
export function renderRoster(statements: StatementDoc[]): string {
  if (statements.length === 0) {
    return '<section class="roster"><div class="empty-state">No statements for this month.</div></section>';
  }
  const ordered = [...statements].sort(
    (a, b) =>
      parseFloat(b.productivity_percentage) -
      parseFloat(a.productivity_percentage),
  );
  const rows = ordered
    .map((s) => {
      const badge =
        flagCount(s) > 0
          ? `<span class="badge">${flagCount(s)}</span>`
          : '';
      return `
        <tr data-staff="${escapeHtml(s.staff_id)}">
          <td><a href="#feedback/${escapeHtml(s.staff_id)}">${escapeHtml(s.staff_id)}</a></td>
          <td class="num">${percent(s.productivity_percentage)}</td>
          <td class="num">${twoDecimals(s.vpu_final_total)}</td>
          <td>${badge}</td>
        </tr>
      `;
    })
    .join('');
  return `
    <section class="roster">
      <table>
        <thead>
          <tr><th>Staff</th><th>Productivity</th><th>VPU</th><th>Flags</th></tr>
        </thead>
        <tbody>${rows}</tbody>
      </table>
    </section>
  `;
}
