/** Typed client for the search service's documented endpoints. */

export interface FieldError {
  field: string;
  message: string;
}

export interface JournalCandidate {
  title: string;
  issns: string[];
}

export interface ResultRow {
  doi: string;
  title: string;
  authors: string;
  year: number | null;
  journal: string;
}

export type JobState = "queued" | "running" | "succeeded" | "failed" | "partial";

export interface JobDocument {
  job_id: string;
  kind: "handsearch" | "snowball";
  state: JobState;
  query: Record<string, unknown>;
  progress: Record<string, { fetched: number; declared: number }>;
  result_ref: string | null;
  results: ResultRow[] | null;
  report: Record<string, unknown> | null;
  error: string | null;
}

export interface HandsearchBody {
  journals: string[];
  from: string;
  until: string;
  keywords?: string[];
}

export interface SnowballBody {
  seeds: string[];
  direction: "forward" | "backward";
  hydrate?: boolean;
}

export type SubmitResult =
  | { ok: true; jobId: string }
  | { ok: false; errors: FieldError[] };

export type Fetcher = (input: string, init?: RequestInit) => Promise<Response>;

export class ServiceError extends Error {
  constructor(message: string, public status: number) {
    super(message);
  }
}

export class ServiceClient {
  constructor(
    private baseUrl: string = "",
    private fetcher: Fetcher = (input, init) => fetch(input, init),
  ) {}

  private url(path: string): string {
    return `${this.baseUrl}${path}`;
  }

  private async submit(path: string, body: unknown): Promise<SubmitResult> {
    const response = await this.fetcher(this.url(path), {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    if (response.status === 202) {
      const document = await response.json();
      return { ok: true, jobId: document.job_id };
    }
    if (response.status === 400) {
      const document = await response.json();
      return { ok: false, errors: document.errors ?? [] };
    }
    throw new ServiceError(`unexpected status ${response.status}`, response.status);
  }

  submitHandsearch(body: HandsearchBody): Promise<SubmitResult> {
    return this.submit("/api/handsearch", body);
  }

  submitSnowball(body: SnowballBody): Promise<SubmitResult> {
    return this.submit("/api/snowball", body);
  }

  async getJob(jobId: string): Promise<JobDocument> {
    const response = await this.fetcher(this.url(`/api/jobs/${jobId}`));
    if (!response.ok) {
      throw new ServiceError(`job ${jobId}: status ${response.status}`, response.status);
    }
    return response.json();
  }

  async journalSearch(query: string): Promise<JournalCandidate[]> {
    const response = await this.fetcher(
      this.url(`/api/journals?q=${encodeURIComponent(query)}`));
    if (!response.ok) {
      throw new ServiceError(`journal search: status ${response.status}`, response.status);
    }
    const document = await response.json();
    return document.candidates ?? [];
  }

  /** Download URLs; the browser streams these directly, bytes untouched. */
  exportUrl(jobId: string, format: "doi" | "ris"): string {
    return this.url(`/api/jobs/${jobId}/export?format=${format}`);
  }

  reportUrl(jobId: string): string {
    return this.url(`/api/jobs/${jobId}/report`);
  }
}
