// Thin typed client for the seqbox service. One method per endpoint; the
// fetch implementation is injectable so tests can count and stub calls.

import type {
  DatasetSummary,
  EventBoxDetail,
  OverviewDocument,
  SessionPatch,
  SessionState,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
    public field?: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function toApiError(response: Response): Promise<ApiError> {
  let code = "HttpError";
  let message = `${response.status} ${response.statusText}`;
  let field: string | undefined;
  try {
    const body = await response.json();
    if (body && typeof body.code === "string") {
      code = body.code;
      message = body.message ?? message;
      field = body.field;
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  return new ApiError(response.status, code, message, field);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: string,
    contentType?: string,
  ): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.body = body;
      init.headers = { "Content-Type": contentType ?? "application/json" };
    }
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    if (!response.ok) {
      throw await toApiError(response);
    }
    if (response.status === 204) {
      return undefined as T;
    }
    return (await response.json()) as T;
  }

  createDataset(csv: string): Promise<DatasetSummary> {
    return this.request("POST", "/datasets", csv, "text/csv");
  }

  datasetSummary(datasetId: string): Promise<DatasetSummary> {
    return this.request("GET", `/datasets/${datasetId}/summary`);
  }

  createSession(datasetId: string): Promise<SessionState> {
    return this.request("POST", `/datasets/${datasetId}/sessions`);
  }

  getOverview(sessionId: string): Promise<OverviewDocument> {
    return this.request("GET", `/sessions/${sessionId}/overview`);
  }

  patchSession(sessionId: string, patch: SessionPatch): Promise<SessionState> {
    return this.request("PATCH", `/sessions/${sessionId}`, JSON.stringify(patch));
  }

  eventBoxDetail(sessionId: string, row: number, column: number): Promise<EventBoxDetail> {
    return this.request("GET", `/sessions/${sessionId}/eventbox/${row}/${column}`);
  }

  deleteSession(sessionId: string): Promise<void> {
    return this.request("DELETE", `/sessions/${sessionId}`);
  }
}
