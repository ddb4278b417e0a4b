// Session view state: current dataset/job, pin/hide sets, and the pending
// refinement draft. Pinned and hidden are mutually exclusive; the draft is
// validated against the dataset schema before it may be submitted.

import type { AttributeDecl, DatasetSchema, MeasureSpec, RefineBody } from './api.js'

export interface RefinementDraft {
  exclusions: string[]
  restrictTo: number | null
  measure: MeasureSpec | null
}

export interface Crumb {
  jobId: string
  label: string
}

export class ViewState {
  datasetId: string | null = null
  schema: DatasetSchema | null = null
  jobId: string | null = null
  selectedSubgroup: number | null = null
  pinned = new Set<number>()
  hidden = new Set<number>()
  draft: RefinementDraft = { exclusions: [], restrictTo: null, measure: null }
  breadcrumbs: Crumb[] = []

  pin(index: number): void {
    this.hidden.delete(index)
    this.pinned.add(index)
  }

  hide(index: number): void {
    this.pinned.delete(index)
    this.hidden.add(index)
    if (this.selectedSubgroup === index) this.selectedSubgroup = null
  }

  unhide(index: number): void {
    this.hidden.delete(index)
  }

  resetForJob(jobId: string): void {
    this.jobId = jobId
    this.selectedSubgroup = null
    this.pinned.clear()
    this.hidden.clear()
    this.draft = { exclusions: [], restrictTo: null, measure: null }
  }

  enterChildJob(childJobId: string, parentLabel: string): void {
    if (this.jobId !== null) {
      this.breadcrumbs.push({ jobId: this.jobId, label: parentLabel })
    }
    this.resetForJob(childJobId)
  }
}

function attrByName(schema: DatasetSchema, name: string): AttributeDecl | undefined {
  return schema.attributes.find((a) => a.name === name)
}

const MEASURE_TARGET_KINDS: Record<string, string[]> = {
  wracc: ['boolean', 'nominal'],
  mean_shift: ['numeric'],
  ks_deviation: ['numeric'],
  tv_emm: ['nominal'],
}

export interface DraftProblem {
  field: string
  message: string
}

// Client-side validation mirrors the service's 422 rules so obviously bad
// drafts never leave the browser; the server remains the authority.
export function validateDraft(
  draft: RefinementDraft,
  schema: DatasetSchema,
  targetAttr: string | null,
  subgroupCount: number,
): DraftProblem[] {
  const problems: DraftProblem[] = []
  for (const name of draft.exclusions) {
    const attr = attrByName(schema, name)
    if (!attr) {
      problems.push({ field: 'exclusions', message: `unknown attribute ${name}` })
    } else if (attr.role !== 'descriptive') {
      problems.push({ field: 'exclusions', message: `${name} is not descriptive` })
    }
  }
  if (draft.restrictTo !== null && (draft.restrictTo < 0 || draft.restrictTo >= subgroupCount)) {
    problems.push({ field: 'restrict_to', message: `no subgroup ${draft.restrictTo}` })
  }
  if (draft.measure) {
    const kinds = MEASURE_TARGET_KINDS[draft.measure.kind]
    if (!kinds) {
      problems.push({ field: 'measure', message: `unknown measure kind ${draft.measure.kind}` })
    } else if (targetAttr) {
      const target = attrByName(schema, targetAttr)
      if (target && !kinds.includes(target.kind)) {
        problems.push({
          field: 'measure',
          message: `${draft.measure.kind} needs a ${kinds.join(' or ')} target, ${targetAttr} is ${target.kind}`,
        })
      }
    }
  }
  return problems
}

// The exact request body documented for POST /jobs/{id}/refine: only the
// fields the user actually drafted, nothing invented client-side.
export function refineBody(draft: RefinementDraft): RefineBody {
  const body: RefineBody = {}
  if (draft.exclusions.length > 0) body.exclusions = [...draft.exclusions]
  if (draft.restrictTo !== null) body.restrict_to = draft.restrictTo
  if (draft.measure !== null) body.measure = { ...draft.measure }
  return body
}
