// Typed client over the sqlscope HTTP API. The fetch function is injectable
// so tests can assert exact request shapes without a server.

export interface AttributeDecl {
  name: string
  kind: 'nominal' | 'numeric' | 'boolean' | 'itemset'
  role: 'descriptive' | 'target' | 'meta'
}

export interface DatasetSchema {
  attributes: AttributeDecl[]
  row_count: number
}

export interface SelectorJson {
  attr: string
  op: string
  value?: unknown
  lo?: number | null
  hi?: number | null
}

export interface SubgroupJson {
  selectors: string[]
  selector_json: SelectorJson[]
  size: number
  quality: number
  oe: number | null
  stats: Record<string, unknown>
}

export interface ResultSetJson {
  dataset_id: string
  config_hash: string
  measure: MeasureSpec
  search: Record<string, unknown>
  wall_time: number
  nodes_explored: number
  subgroups: SubgroupJson[]
}

export interface MeasureSpec {
  kind: string
  a?: number
  direction?: string
  positive_class?: string | null
}

export interface JobSpecBody {
  dataset_id: string
  mode: 'discover' | 'summarize'
  target_attr?: string | null
  measure?: MeasureSpec
  search?: Record<string, unknown>
  exclusions?: string[]
  prediction_attr?: string | null
  k?: number
}

export interface JobRecord {
  job_id: string
  spec: {
    dataset_id: string
    mode: string
    target_attr: string | null
    measure: MeasureSpec
    search: Record<string, unknown>
    exclusions: string[]
    prediction_attr: string | null
    k: number
    restrict_to: { job_id: string; subgroup: number } | null
  }
  state: 'queued' | 'running' | 'done' | 'failed'
  result: ResultSetJson | null
  error: string | null
}

export interface HistogramResponse {
  attr: string
  kind: 'numeric' | 'nominal' | 'boolean'
  edges?: number[]
  categories?: string[]
  counts: Record<string, number[]>
}

export interface RefineBody {
  exclusions?: string[]
  restrict_to?: number
  measure?: MeasureSpec
}

export interface MembersResponse {
  total: number
  rows: Record<string, unknown>[]
}

export interface ApiError {
  code: string
  message: string
  errors?: { field: string; message: string }[]
}

export class ApiFailure extends Error {
  constructor(public status: number, public body: ApiError) {
    super(body.message)
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>

export class ApiClient {
  constructor(private baseUrl: string, private fetchFn: FetchLike = fetch) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, init)
    const body = await response.json()
    if (!response.ok) {
      throw new ApiFailure(response.status, body as ApiError)
    }
    return body as T
  }

  getSchema(datasetId: string): Promise<DatasetSchema> {
    return this.request(`/datasets/${datasetId}/schema`)
  }

  getJob(jobId: string): Promise<JobRecord> {
    return this.request(`/jobs/${jobId}`)
  }

  submitJob(spec: JobSpecBody): Promise<{ job_id: string }> {
    return this.request('/jobs', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(spec),
    })
  }

  refineJob(jobId: string, body: RefineBody): Promise<{ job_id: string }> {
    return this.request(`/jobs/${jobId}/refine`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    })
  }

  getHistogram(
    datasetId: string,
    attr: string,
    options: { bins?: number; job?: string; subgroup?: number } = {},
  ): Promise<HistogramResponse> {
    const params = new URLSearchParams({ attr })
    if (options.bins !== undefined) params.set('bins', String(options.bins))
    if (options.job !== undefined) params.set('job', options.job)
    if (options.subgroup !== undefined) params.set('subgroup', String(options.subgroup))
    return this.request(`/datasets/${datasetId}/histogram?${params.toString()}`)
  }

  getMembers(jobId: string, subgroup: number, limit = 50): Promise<MembersResponse> {
    return this.request(`/jobs/${jobId}/subgroups/${subgroup}/members?limit=${limit}`)
  }
}
