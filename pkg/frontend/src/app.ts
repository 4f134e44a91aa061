import { ApiClient } from './client.js';
import { ProposedRow, WhatIfDraft } from './types.js';
import {
  renderErrorBanner,
  renderFeedback,
  renderRoster,
  renderStatement,
  renderWhatifPanel,
} from './views.js';

// Hash routes:
//   #feedback/S1            daily feedback for one staff member
//   #statement/S1/2009-03   monthly statement
//   #whatif/S1/2009-03      what-if composer
//   #roster/2009-03?staff=S1,S2,S3

const client = new ApiClient();
const root = () => document.getElementById('app')!;

let draft: WhatIfDraft | null = null;

function today(): string {
  return new Date().toISOString().slice(0, 10);
}

async function show(render: () => Promise<string>): Promise<void> {
  try {
    root().innerHTML = await render();
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    root().innerHTML = renderErrorBanner(message);
    const retry = root().querySelector('[data-action="retry"]');
    retry?.addEventListener('click', () => route());
  }
}

function readDraftRows(): ProposedRow[] {
  const rows: ProposedRow[] = [];
  root()
    .querySelectorAll('tr[data-draft-row]')
    .forEach((tr) => {
      const value = (name: string) =>
        (tr.querySelector(`[name="${name}"]`) as HTMLInputElement).value;
      rows.push({
        service_type: value('service_type'),
        payer_id: value('payer_id'),
        duration_hours: Number(value('duration_hours')),
        expected_revenue: Number(value('expected_revenue')),
      });
    });
  return rows;
}

function draftEditor(rows: ProposedRow[]): string {
  const body = rows
    .map(
      (row) => `
        <tr data-draft-row>
          <td><input name="service_type" value="${row.service_type}"></td>
          <td><input name="payer_id" value="${row.payer_id}"></td>
          <td><input name="duration_hours" type="number" min="0" step="0.25"
                     value="${row.duration_hours}"></td>
          <td><input name="expected_revenue" type="number" min="0" step="0.01"
                     value="${row.expected_revenue}"></td>
        </tr>
      `,
    )
    .join('');
  return `
    <table class="draft">
      <thead><tr><th>Type</th><th>Payer</th><th>Hours</th><th>Revenue</th></tr></thead>
      <tbody>${body}</tbody>
    </table>
    <button data-action="add-row">Add service</button>
    <button data-action="project">Project</button>
  `;
}

async function whatifScreen(staffId: string, month: string): Promise<string> {
  if (!draft || draft.staff_id !== staffId || draft.month !== month) {
    draft = { staff_id: staffId, month, proposed: [] };
  }
  const current = await client.statement(staffId, month);
  return (
    draftEditor(draft.proposed) +
    renderWhatifPanel(current, draft.last_projection ?? null)
  );
}

function wireWhatif(staffId: string, month: string): void {
  root()
    .querySelector('[data-action="add-row"]')
    ?.addEventListener('click', () => {
      draft!.proposed = readDraftRows();
      draft!.proposed.push({
        service_type: 'IT',
        payer_id: '',
        duration_hours: 1.0,
        expected_revenue: 0,
      });
      void show(() => whatifScreen(staffId, month)).then(() =>
        wireWhatif(staffId, month),
      );
    });
  root()
    .querySelector('[data-action="project"]')
    ?.addEventListener('click', async () => {
      draft!.proposed = readDraftRows();
      draft!.last_projection = await client.whatif(
        staffId,
        month,
        draft!.proposed,
      );
      await show(() => whatifScreen(staffId, month));
      wireWhatif(staffId, month);
    });
}

export async function route(): Promise<void> {
  const [screen, a, b] = window.location.hash.replace(/^#/, '').split('/');
  switch (screen) {
    case 'statement':
      await show(async () => renderStatement(await client.statement(a, b)));
      break;
    case 'whatif':
      await show(() => whatifScreen(a, b));
      wireWhatif(a, b);
      break;
    case 'roster': {
      const params = new URLSearchParams(window.location.search);
      const staff = (params.get('staff') ?? '').split(',').filter(Boolean);
      await show(async () =>
        renderRoster(
          await Promise.all(staff.map((id) => client.statement(id, a))),
        ),
      );
      break;
    }
    case 'feedback':
    default:
      await show(async () =>
        renderFeedback(await client.feedback(a || 'S1', b || today())),
      );
  }
}

window.addEventListener('hashchange', () => void route());
window.addEventListener('DOMContentLoaded', () => void route());
