import {
  FeedbackDoc,
  HealthDoc,
  ProjectionDoc,
  ProposedRow,
  StatementDoc,
} from './types.js';

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseError(response: Response): Promise<never> {
  let code = 'unknown';
  let message = `request failed (${response.status})`;
  try {
    const doc = await response.json();
    if (doc && doc.error) {
      code = doc.error.code;
      message = doc.error.message;
    }
  } catch {
    // non-JSON error body; keep the generic message
  }
  throw new ApiError(response.status, code, message);
}

/**
 * Thin read-only client for the productivity service. The dashboard's only
 * POST is /whatif, which the server never persists; there is deliberately no
 * ingest method here.
 */
export class ApiClient {
  constructor(
    private readonly base: string = '',
    private readonly fetchFn: typeof fetch = fetch,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.base + path);
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  health(): Promise<HealthDoc> {
    return this.get('/health');
  }

  feedback(staffId: string, date: string): Promise<FeedbackDoc> {
    return this.get(
      `/staff/${encodeURIComponent(staffId)}/feedback?date=${date}`,
    );
  }

  statement(staffId: string, month: string): Promise<StatementDoc> {
    return this.get(
      `/staff/${encodeURIComponent(staffId)}/statement?month=${month}`,
    );
  }

  async whatif(
    staffId: string,
    month: string,
    proposed: ProposedRow[],
  ): Promise<ProjectionDoc> {
    const response = await this.fetchFn(this.base + '/whatif', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify({ staff_id: staffId, month, proposed }),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as ProjectionDoc;
  }
}
