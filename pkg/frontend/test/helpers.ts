import type { JobRecord, ResultSetJson } from '../src/api'

export function mockResult(): ResultSetJson {
  return {
    dataset_id: 'ds01',
    config_hash: 'abcd1234',
    measure: { kind: 'mean_shift', a: 1.0, direction: 'high' },
    search: { strategy: 'beam', max_depth: 3 },
    wall_time: 0.123,
    nodes_explored: 4242,
    subgroups: [
      {
        selectors: ['tables ∋ "orders"'],
        selector_json: [{ attr: 'tables', op: 'contains', value: 'orders' }],
        size: 963,
        quality: 69.80421337,
        oe: 123.456789,
        stats: { mean: 500.2, n: 963 },
      },
      {
        selectors: ['predicate_signatures ∋ "orders.status ="', 'has_or is false'],
        selector_json: [
          { attr: 'predicate_signatures', op: 'contains', value: 'orders.status =' },
          { attr: 'has_or', op: 'is', value: false },
        ],
        size: 911,
        quality: 65.4321,
        oe: null,
        stats: {},
      },
      {
        selectors: ['num_joins in [1, +inf)'],
        selector_json: [{ attr: 'num_joins', op: 'interval', lo: 1, hi: null }],
        size: 402,
        quality: 12.000005,
        oe: 40.0,
        stats: {},
      },
      {
        selectors: ['server_id = "s3"'],
        selector_json: [{ attr: 'server_id', op: 'equals', value: 's3' }],
        size: 1288,
        quality: 0.5,
        oe: 3.25,
        stats: {},
      },
      {
        selectors: ['has_group_by is true'],
        selector_json: [{ attr: 'has_group_by', op: 'is', value: true }],
        size: 77,
        quality: -1.25,
        oe: 0.0,
        stats: {},
      },
    ],
  }
}

export function mockJob(overrides: Partial<JobRecord> = {}): JobRecord {
  return {
    job_id: 'job01',
    spec: {
      dataset_id: 'ds01',
      mode: 'discover',
      target_attr: 'exec_time_ms',
      measure: { kind: 'mean_shift', a: 1.0, direction: 'high' },
      search: { strategy: 'beam' },
      exclusions: [],
      prediction_attr: null,
      k: 3,
      restrict_to: null,
    },
    state: 'done',
    result: mockResult(),
    error: null,
    ...overrides,
  }
}

export interface RecordedCall {
  url: string
  method: string
  body: unknown
}

export function recordingFetch(responses: unknown[], calls: RecordedCall[]) {
  let cursor = 0
  return async (url: string, init?: RequestInit) => {
    calls.push({
      url,
      method: init?.method ?? 'GET',
      body: init?.body ? JSON.parse(String(init.body)) : null,
    })
    const payload = responses[Math.min(cursor, responses.length - 1)]
    cursor += 1
    return new Response(JSON.stringify(payload), {
      status: 200,
      headers: { 'Content-Type': 'application/json' },
    })
  }
}
