// DOM wiring: connect to a service, open a job, poll it, and route clicks
// into state changes and refine submissions. All analytics come from the
// service; this file only moves payloads to the screen.

import { ApiClient, ApiFailure, type JobRecord } from './api.js'
import { refineBody, validateDraft, ViewState } from './state.js'
import {
  renderBreadcrumbs,
  renderDistribution,
  renderDraftProblems,
  renderMembers,
  renderSubgroupTable,
} from './render.js'
import { distributionError, distributionPanel, memberRows, subgroupTableView } from './views.js'

const POLL_MS = 800

function el(id: string): HTMLElement {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node
}

export class ExplorerApp {
  private state = new ViewState()
  private client: ApiClient | null = null
  private job: JobRecord | null = null
  private timer: number | null = null

  start(): void {
    el('connect').addEventListener('click', () => {
      const base = (el('base-url') as HTMLInputElement).value.replace(/\/$/, '')
      const jobId = (el('job-id') as HTMLInputElement).value.trim()
      this.client = new ApiClient(base)
      this.state.breadcrumbs = []
      void this.openJob(jobId)
    })
    el('subgroup-table').addEventListener('click', (event) => {
      const target = event.target as HTMLElement
      const action = target.dataset.action
      const indexText = target.closest('[data-index]') instanceof HTMLElement
        ? (target.closest('[data-index]') as HTMLElement).dataset.index
        : undefined
      if (indexText === undefined) return
      const index = Number(indexText)
      if (action === 'pin') this.state.pin(index)
      else if (action === 'hide') this.state.hide(index)
      else if (action === 'zoom') {
        this.state.draft.restrictTo = index
        void this.submitRefine()
        return
      } else this.state.selectedSubgroup = index
      this.redraw()
      void this.loadPanels()
    })
    el('run-refine').addEventListener('click', () => void this.submitRefine())
    el('add-exclusion').addEventListener('click', () => {
      const name = (el('exclusion-input') as HTMLInputElement).value.trim()
      if (name && !this.state.draft.exclusions.includes(name)) {
        this.state.draft.exclusions.push(name)
      }
      this.redraw()
    })
  }

  private async openJob(jobId: string): Promise<void> {
    if (!this.client) return
    this.state.resetForJob(jobId)
    if (this.timer !== null) window.clearInterval(this.timer)
    this.timer = window.setInterval(() => void this.poll(), POLL_MS)
    await this.poll()
  }

  private async poll(): Promise<void> {
    if (!this.client || this.state.jobId === null) return
    try {
      this.job = await this.client.getJob(this.state.jobId)
    } catch (error) {
      this.showError(error)
      return
    }
    if (this.job.state === 'done' || this.job.state === 'failed') {
      if (this.timer !== null) window.clearInterval(this.timer)
      this.timer = null
      if (this.state.datasetId !== this.job.spec.dataset_id) {
        this.state.datasetId = this.job.spec.dataset_id
        this.state.schema = await this.client.getSchema(this.job.spec.dataset_id)
      }
      void this.loadPanels()
    }
    this.redraw()
  }

  private redraw(): void {
    const model = subgroupTableView(
      this.job,
      this.state.hidden,
      this.state.pinned,
      this.state.selectedSubgroup,
    )
    el('subgroup-table').innerHTML = renderSubgroupTable(model)
    el('crumbs').innerHTML = renderBreadcrumbs(this.state.breadcrumbs, this.state.jobId)
    const problems = this.draftProblems()
    el('draft-problems').innerHTML = renderDraftProblems(problems)
    el('draft-summary').textContent = JSON.stringify(refineBody(this.state.draft))
  }

  private draftProblems(): { field: string; message: string }[] {
    if (!this.state.schema || !this.job) return []
    return validateDraft(
      this.state.draft,
      this.state.schema,
      this.job.spec.target_attr,
      this.job.result?.subgroups.length ?? 0,
    )
  }

  private async loadPanels(): Promise<void> {
    if (!this.client || !this.job || this.job.state !== 'done' || !this.job.result) return
    const datasetId = this.job.spec.dataset_id
    const attr = this.job.spec.target_attr ?? 'exec_time_ms'
    const index = this.state.selectedSubgroup
    try {
      const histogram =
        index === null
          ? await this.client.getHistogram(datasetId, attr, { bins: 20 })
          : await this.client.getHistogram(datasetId, attr, {
              bins: 20,
              job: this.job.job_id,
              subgroup: index,
            })
      el('distribution').innerHTML = renderDistribution(distributionPanel(histogram))
    } catch (error) {
      const message = error instanceof ApiFailure ? error.body.message : String(error)
      el('distribution').innerHTML = renderDistribution(distributionError(message, attr))
    }
    if (index !== null) {
      try {
        const members = await this.client.getMembers(this.job.job_id, index, 25)
        const selectors = this.job.result.subgroups[index]?.selector_json ?? []
        el('members').innerHTML = renderMembers(memberRows(members.rows, selectors), members.total)
      } catch (error) {
        this.showError(error)
      }
    }
  }

  private async submitRefine(): Promise<void> {
    if (!this.client || this.state.jobId === null || !this.job) return
    const problems = this.draftProblems()
    if (problems.length > 0) {
      el('draft-problems').innerHTML = renderDraftProblems(problems)
      return
    }
    try {
      const { job_id } = await this.client.refineJob(this.state.jobId, refineBody(this.state.draft))
      const label = this.state.jobId
      this.state.enterChildJob(job_id, label)
      this.job = null
      if (this.timer !== null) window.clearInterval(this.timer)
      this.timer = window.setInterval(() => void this.poll(), POLL_MS)
      await this.poll()
    } catch (error) {
      if (error instanceof ApiFailure && error.body.errors) {
        el('draft-problems').innerHTML = renderDraftProblems(error.body.errors)
      } else {
        this.showError(error)
      }
    }
  }

  private showError(error: unknown): void {
    const message = error instanceof ApiFailure ? `${error.body.code}: ${error.body.message}` : String(error)
    el('errors').textContent = message
  }
}

if (typeof document !== 'undefined' && document.getElementById('connect')) {
  new ExplorerApp().start()
}
