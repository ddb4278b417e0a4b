// Pure view models. Every number shown in the UI is copied from an API
// payload: these builders format and arrange, they never recompute quality,
// extents or histogram counts.

import type { HistogramResponse, JobRecord, SubgroupJson } from './api.js'

export function formatQuality(quality: number): string {
  return Number(quality).toPrecision(4)
}

export interface SubgroupRow {
  index: number
  chips: string[]
  size: number
  quality: string
  oe: string
  pinned: boolean
  selected: boolean
}

export interface SubgroupTableModel {
  kind: 'table' | 'empty' | 'error' | 'pending'
  rows: SubgroupRow[]
  message?: string
}

export function subgroupTableView(
  job: JobRecord | null,
  hidden: Set<number>,
  pinned: Set<number>,
  selected: number | null,
): SubgroupTableModel {
  if (job === null) return { kind: 'pending', rows: [], message: 'no job loaded' }
  if (job.state === 'failed') {
    return { kind: 'error', rows: [], message: job.error ?? 'job failed' }
  }
  if (job.state !== 'done' || job.result === null) {
    return { kind: 'pending', rows: [], message: `job is ${job.state}` }
  }
  const subgroups = job.result.subgroups
  if (subgroups.length === 0) {
    return {
      kind: 'empty',
      rows: [],
      message: 'no subgroups found; consider relaxing min_support',
    }
  }
  // Rows keep the API order exactly; hiding filters, it never re-ranks.
  const rows = subgroups
    .map((g: SubgroupJson, index: number) => ({
      index,
      chips: [...g.selectors],
      size: g.size,
      quality: formatQuality(g.quality),
      oe: g.oe === null ? '—' : formatQuality(g.oe),
      pinned: pinned.has(index),
      selected: selected === index,
    }))
    .filter((row) => !hidden.has(row.index))
  return { kind: 'table', rows }
}

export interface DistributionSeries {
  label: string
  counts: number[]
}

export interface DistributionModel {
  kind: 'overlay' | 'bars' | 'error' | 'empty'
  attr: string
  binLabels: string[]
  series: DistributionSeries[]
  notice?: string
}

function numericBinLabels(edges: number[]): string[] {
  const labels: string[] = []
  for (let i = 0; i + 1 < edges.length; i++) {
    labels.push(`[${Number(edges[i]).toPrecision(4)}, ${Number(edges[i + 1]).toPrecision(4)})`)
  }
  return labels
}

export function distributionPanel(histogram: HistogramResponse): DistributionModel {
  const binLabels =
    histogram.kind === 'numeric'
      ? numericBinLabels(histogram.edges ?? [])
      : [...(histogram.categories ?? [])]
  const series: DistributionSeries[] = Object.entries(histogram.counts).map(
    ([label, counts]) => ({ label, counts: [...counts] }),
  )
  const model: DistributionModel = {
    // Numeric targets overlay two histograms over shared bin edges; nominal
    // and boolean targets render side-by-side class-frequency bars.
    kind: histogram.kind === 'numeric' ? 'overlay' : 'bars',
    attr: histogram.attr,
    binLabels,
    series,
  }
  const rest = series.find((s) => s.label === 'rest')
  if (rest && rest.counts.every((c) => c === 0)) {
    model.notice = 'subgroup covers all rows; nothing left for the "rest" series'
  }
  return model
}

export function distributionError(message: string, attr: string): DistributionModel {
  return { kind: 'error', attr, binLabels: [], series: [], notice: message }
}

export interface MemberRowModel {
  queryId: string
  rawSql: string
  highlights: string[]  // substrings of the raw SQL to emphasize
  rest: Record<string, unknown>
}

// Fragments worth highlighting in raw SQL: table names from membership
// selectors and the column part of predicate-signature selectors.
export function highlightFragments(selectors: { attr: string; op: string; value?: unknown }[]): string[] {
  const fragments: string[] = []
  for (const s of selectors) {
    if (s.op === 'contains' && typeof s.value === 'string') {
      const value = s.value
      if (s.attr === 'predicate_signatures') {
        const column = value.split(' ')[0]?.split('.')[1]
        if (column) fragments.push(column)
      } else if (s.attr === 'tables' || s.attr === 'fields') {
        const tail = value.includes('.') ? value.split('.')[1] : value
        if (tail) fragments.push(tail)
      }
    }
  }
  return fragments
}

export function memberRows(
  rows: Record<string, unknown>[],
  selectors: { attr: string; op: string; value?: unknown }[],
): MemberRowModel[] {
  const highlights = highlightFragments(selectors)
  return rows.map((row) => {
    const { query_id, raw_sql, ...rest } = row
    return {
      queryId: String(query_id ?? ''),
      rawSql: String(raw_sql ?? ''),
      highlights: highlights.filter((fragment) => String(raw_sql ?? '').includes(fragment)),
      rest,
    }
  })
}
