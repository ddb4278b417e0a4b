// Rendered-markup checks: the HTML carries the payload's numbers verbatim.

import { describe, expect, it } from 'vitest'

import { renderBreadcrumbs, renderDistribution, renderMembers, renderSubgroupTable } from '../src/render'
import { distributionPanel, memberRows, subgroupTableView } from '../src/views'
import { mockJob } from './helpers'

const none = new Set<number>()

describe('renderSubgroupTable', () => {
  it('shows every size and 4-digit quality from the payload', () => {
    const job = mockJob()
    const html = renderSubgroupTable(subgroupTableView(job, none, none, null))
    for (const g of job.result!.subgroups) {
      expect(html).toContain(`<td class="size">${g.size}</td>`)
      expect(html).toContain(`<td class="quality">${Number(g.quality).toPrecision(4)}</td>`)
      for (const chip of g.selectors) {
        expect(html).toContain(
          chip.replaceAll('&', '&amp;').replaceAll('<', '&lt;').replaceAll('>', '&gt;').replaceAll('"', '&quot;'),
        )
      }
    }
  })

  it('escapes markup in API-provided strings', () => {
    const job = mockJob()
    job.result!.subgroups[0].selectors = ['note = "<script>alert(1)</script>"']
    const html = renderSubgroupTable(subgroupTableView(job, none, none, null))
    expect(html).not.toContain('<script>')
    expect(html).toContain('&lt;script&gt;')
  })

  it('renders the failure panel with the API error text', () => {
    const job = mockJob({ state: 'failed', result: null, error: 'dataset vanished' })
    const html = renderSubgroupTable(subgroupTableView(job, none, none, null))
    expect(html).toContain('job failed: dataset vanished')
  })
})

describe('renderDistribution', () => {
  it('emits one bar per bin with the exact payload count', () => {
    const model = distributionPanel({
      attr: 'exec_time_ms',
      kind: 'numeric',
      edges: [0, 10, 20],
      counts: { subgroup: [4, 9], rest: [12, 0] },
    })
    const html = renderDistribution(model)
    expect(html).toContain('data-count="4"')
    expect(html).toContain('data-count="9"')
    expect(html).toContain('data-count="12"')
    expect((html.match(/data-count=/g) ?? []).length).toBe(4)
    expect(html).toContain('data-series="subgroup"')
    expect(html).toContain('data-series="rest"')
  })
})

describe('renderMembers', () => {
  it('highlights matched fragments in raw sql', () => {
    const rows = memberRows(
      [{ query_id: 'q7', raw_sql: 'SELECT * FROM orders' }],
      [{ attr: 'tables', op: 'contains', value: 'orders' }],
    )
    const html = renderMembers(rows, 1)
    expect(html).toContain('<mark>orders</mark>')
    expect(html).toContain('q7')
    expect(html).toContain('data-total="1"')
  })
})

describe('renderBreadcrumbs', () => {
  it('links parents and marks the current job', () => {
    const html = renderBreadcrumbs(
      [
        { jobId: 'a', label: 'a' },
        { jobId: 'b', label: 'b' },
      ],
      'c',
    )
    expect(html).toContain('data-job="a"')
    expect(html).toContain('data-job="b"')
    expect(html).toContain('<span class="current">c</span>')
  })
})
