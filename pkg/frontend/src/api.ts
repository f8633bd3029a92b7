/** Thin fetch client for the /v1 API. Every failure surfaces as ApiError. */

import type {
  CorrelationWarning,
  DatasetSummary,
  EditRequest,
  JobRecord,
  NetworkDocument,
  NetworkListEntry,
  NetworkRecord,
  ReportDocument,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
    readonly errorCode?: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

async function parseError(response: Response): Promise<never> {
  let detail = response.statusText;
  let code: string | undefined;
  try {
    const body = await response.json();
    if (typeof body.detail === "string") detail = body.detail;
    if (typeof body.error === "string") {
      code = body.error;
      if (typeof body.detail === "string") detail = `${body.error}: ${body.detail}`;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(response.status, detail, code);
}

export class Api {
  constructor(
    readonly base: string = "/v1",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: string): Promise<T> {
    const response = await this.fetchFn(this.base + path, { method, body });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  listDatasets(): Promise<{ datasets: { id: string; summary: DatasetSummary }[] }> {
    return this.request("GET", "/datasets");
  }

  uploadDataset(
    csv: string,
    classColumn: string,
    missingToken = "?",
  ): Promise<{ id: string; summary: DatasetSummary }> {
    const params = new URLSearchParams({
      class_column: classColumn,
      missing_token: missingToken,
    });
    return this.request("POST", `/datasets?${params}`, csv);
  }

  listNetworks(): Promise<{ networks: NetworkListEntry[] }> {
    return this.request("GET", "/networks");
  }

  getNetwork(id: string): Promise<NetworkRecord> {
    return this.request("GET", `/networks/${id}`);
  }

  uploadNetwork(doc: NetworkDocument | string): Promise<{ id: string }> {
    const body = typeof doc === "string" ? doc : JSON.stringify(doc);
    return this.request("POST", "/networks", body);
  }

  /** The server is the acyclicity authority; 409s come back as ApiError. */
  proposeEdit(networkId: string, edit: EditRequest): Promise<{ id: string; parent: string }> {
    return this.request("POST", `/networks/${networkId}/edits`, JSON.stringify(edit));
  }

  screen(
    networkId: string,
    datasetId: string,
    threshold: number,
  ): Promise<{ threshold: number; warnings: CorrelationWarning[] }> {
    const params = new URLSearchParams({
      dataset: datasetId,
      threshold: String(threshold),
    });
    return this.request("GET", `/networks/${networkId}/screen?${params}`);
  }

  submitJob(request: Record<string, unknown>): Promise<{ id: string }> {
    return this.request("POST", "/jobs", JSON.stringify(request));
  }

  getJob(id: string): Promise<JobRecord> {
    return this.request("GET", `/jobs/${id}`);
  }

  listJobs(): Promise<{ jobs: JobRecord[] }> {
    return this.request("GET", "/jobs");
  }

  getResult(id: string): Promise<ReportDocument> {
    return this.request("GET", `/jobs/${id}/result`);
  }
}
