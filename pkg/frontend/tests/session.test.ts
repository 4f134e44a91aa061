// A scripted browsing session against a mock transport serving the recorded
// fixtures. The mock counts every request that could mutate server state;
// the dashboard must make none.

import { readFileSync } from 'node:fs';

import { describe, expect, it } from 'vitest';

import { ApiClient, ApiError } from '../src/client';
import { HealthDoc } from '../src/types';

function fixtureText(name: string): string {
  return readFileSync(new URL(`../fixtures/${name}`, import.meta.url), 'utf-8');
}

interface MockLog {
  requests: Array<{ method: string; path: string }>;
  mutations: number;
}

function mockTransport(): { fetchFn: typeof fetch; log: MockLog } {
  const log: MockLog = { requests: [], mutations: 0 };
  const routes: Record<string, string> = {
    'GET /health': fixtureText('health.json'),
    'GET /staff/S1/feedback': fixtureText('feedback_s1.json'),
    'GET /staff/S1/statement': fixtureText('statement_s1.json'),
    'GET /staff/S2/statement': fixtureText('statement_s2.json'),
    'GET /staff/S3/statement': fixtureText('statement_s3.json'),
    'POST /whatif': fixtureText('whatif_plus_one.json'),
  };
  const fetchFn = (async (input: RequestInfo | URL, init?: RequestInit) => {
    const url = typeof input === 'string' ? input : input.toString();
    const path = url.split('?')[0];
    const method = (init?.method ?? 'GET').toUpperCase();
    log.requests.push({ method, path });
    // /whatif is a read in POST clothing (the server never persists it);
    // everything else non-GET would be a real mutation.
    if (method !== 'GET' && path !== '/whatif') {
      log.mutations += 1;
    }
    const body = routes[`${method} ${path}`];
    if (body === undefined) {
      return new Response(
        JSON.stringify({ error: { code: 'not_found', message: 'unknown' } }),
        { status: 404 },
      );
    }
    if (path === '/whatif' && init?.body) {
      const draft = JSON.parse(String(init.body));
      if (draft.proposed.length === 0) {
        return new Response(fixtureText('whatif_empty.json'), { status: 200 });
      }
    }
    return new Response(body, { status: 200 });
  }) as typeof fetch;
  return { fetchFn, log };
}

describe('scripted session', () => {
  it('makes zero server mutations and leaves record counts unchanged', async () => {
    const { fetchFn, log } = mockTransport();
    const client = new ApiClient('', fetchFn);

    const countsBefore = (await client.health()).counts;
    await client.feedback('S1', '2009-03-31');
    const current = await client.statement('S1', '2009-03');
    const emptyDraft = await client.whatif('S1', '2009-03', []);
    expect(emptyDraft.statement).toEqual(current);
    const projection = await client.whatif('S1', '2009-03', [
      {
        service_type: 'IT',
        payer_id: 'ffs',
        duration_hours: 1.0,
        expected_revenue: 90.0,
      },
    ]);
    expect(projection.statement.productivity_percentage).toBe('0.4100');
    await Promise.all(
      ['S1', 'S2', 'S3'].map((id) => client.statement(id, '2009-03')),
    );
    const countsAfter = (await client.health()).counts;

    expect(log.mutations).toBe(0);
    expect(countsAfter).toEqual(countsBefore);
    expect(log.requests.length).toBeGreaterThanOrEqual(9);
  });

  it('what-if responses come from POST /whatif only', async () => {
    const { fetchFn, log } = mockTransport();
    const client = new ApiClient('', fetchFn);
    await client.whatif('S1', '2009-03', []);
    const posts = log.requests.filter((r) => r.method === 'POST');
    expect(posts).toEqual([{ method: 'POST', path: '/whatif' }]);
  });

  it('surfaces API errors with their server-sent code', async () => {
    const { fetchFn } = mockTransport();
    const client = new ApiClient('', fetchFn);
    await expect(client.statement('S9', '2009-03')).rejects.toMatchObject({
      status: 404,
      code: 'not_found',
    });
    await expect(client.statement('S9', '2009-03')).rejects.toBeInstanceOf(
      ApiError,
    );
  });

  it('health fixture matches the store the fixtures were recorded from', () => {
    const health = JSON.parse(fixtureText('health.json')) as HealthDoc;
    expect(health.status).toBe('ok');
    expect(health.counts.staff).toBe(3);
    expect(health.counts.services).toBe(7);
  });
});
