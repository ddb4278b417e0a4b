// HTML renderers over the pure view models. Kept string-based so tests can
// assert on the exact markup without a DOM.

import type { DistributionModel, MemberRowModel, SubgroupTableModel } from './views.js'

export function escapeHtml(text: string): string {
  return text
    .replaceAll('&', '&amp;')
    .replaceAll('<', '&lt;')
    .replaceAll('>', '&gt;')
    .replaceAll('"', '&quot;')
}

export function renderSubgroupTable(model: SubgroupTableModel): string {
  if (model.kind === 'error') {
    return `<div class="panel error">job failed: ${escapeHtml(model.message ?? '')}</div>`
  }
  if (model.kind === 'pending') {
    return `<div class="panel pending">${escapeHtml(model.message ?? 'loading')}</div>`
  }
  if (model.kind === 'empty') {
    return `<div class="panel empty">${escapeHtml(model.message ?? 'no results')}</div>`
  }
  const body = model.rows
    .map((row) => {
      const chips = row.chips
        .map((c) => `<span class="chip" data-chip="${escapeHtml(c)}">${escapeHtml(c)}</span>`)
        .join('')
      const classes = ['subgroup-row']
      if (row.pinned) classes.push('pinned')
      if (row.selected) classes.push('selected')
      return (
        `<tr class="${classes.join(' ')}" data-index="${row.index}">` +
        `<td class="chips">${chips || '<span class="chip root">all rows</span>'}</td>` +
        `<td class="size">${row.size}</td>` +
        `<td class="quality">${row.quality}</td>` +
        `<td class="oe">${row.oe}</td>` +
        `<td class="actions">` +
        `<button data-action="pin" data-index="${row.index}">pin</button>` +
        `<button data-action="hide" data-index="${row.index}">hide</button>` +
        `<button data-action="zoom" data-index="${row.index}">zoom</button>` +
        `</td></tr>`
      )
    })
    .join('')
  return (
    '<table class="subgroups"><thead><tr>' +
    '<th>description</th><th>size</th><th>quality</th><th>bound</th><th></th>' +
    `</tr></thead><tbody>${body}</tbody></table>`
  )
}

export function renderDistribution(model: DistributionModel): string {
  if (model.kind === 'error') {
    return `<div class="panel error">${escapeHtml(model.notice ?? 'histogram unavailable')}</div>`
  }
  const peak = Math.max(1, ...model.series.flatMap((s) => s.counts))
  const seriesHtml = model.series
    .map((series) => {
      const bars = series.counts
        .map((count, i) => {
          const height = Math.round((count / peak) * 100)
          const label = escapeHtml(model.binLabels[i] ?? String(i))
          return (
            `<div class="bar series-${escapeHtml(series.label)}" ` +
            `style="height:${height}%" title="${label}: ${count}" data-count="${count}"></div>`
          )
        })
        .join('')
      return (
        `<div class="series" data-series="${escapeHtml(series.label)}">` +
        `<span class="legend">${escapeHtml(series.label)}</span>` +
        `<div class="bars ${model.kind}">${bars}</div></div>`
      )
    })
    .join('')
  const notice = model.notice ? `<div class="notice">${escapeHtml(model.notice)}</div>` : ''
  return `<div class="distribution" data-attr="${escapeHtml(model.attr)}">${seriesHtml}${notice}</div>`
}

export function renderMembers(rows: MemberRowModel[], total: number): string {
  const items = rows
    .map((row) => {
      let sql = escapeHtml(row.rawSql)
      for (const fragment of row.highlights) {
        sql = sql.replaceAll(escapeHtml(fragment), `<mark>${escapeHtml(fragment)}</mark>`)
      }
      return `<li><code class="qid">${escapeHtml(row.queryId)}</code><pre class="sql">${sql}</pre></li>`
    })
    .join('')
  return `<div class="members" data-total="${total}"><ol>${items}</ol></div>`
}

export function renderBreadcrumbs(crumbs: { jobId: string; label: string }[], current: string | null): string {
  const parts = crumbs.map(
    (c) => `<a href="#" data-job="${escapeHtml(c.jobId)}">${escapeHtml(c.label)}</a>`,
  )
  if (current !== null) parts.push(`<span class="current">${escapeHtml(current)}</span>`)
  return `<nav class="crumbs">${parts.join(' › ')}</nav>`
}

export function renderDraftProblems(problems: { field: string; message: string }[]): string {
  if (problems.length === 0) return ''
  const items = problems
    .map((p) => `<li data-field="${escapeHtml(p.field)}">${escapeHtml(p.field)}: ${escapeHtml(p.message)}</li>`)
    .join('')
  return `<ul class="draft-problems">${items}</ul>`
}
