import type {
  DisplayResponse,
  HealthResponse,
  Manual,
  ManualSummary,
  ReviewItem,
  SimplifyResponse,
  TrainRequest,
  TrainResponse,
  CalibrationModel,
  Verdict,
  VerdictResponse,
} from "./types.js";

export type ApiOptions = {
  baseUrl: string;
  token?: string;
};

export class ApiError extends Error {
  status: number;
  detail: unknown;

  constructor(status: number, detail: unknown) {
    super(`HTTP ${status}: ${typeof detail === "string" ? detail : JSON.stringify(detail)}`);
    this.status = status;
    this.detail = detail;
  }
}

export class ApiClient {
  private baseUrl: string;
  private token?: string;

  constructor(options: ApiOptions) {
    this.baseUrl = options.baseUrl.replace(/\/+$/, "");
    this.token = options.token;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (this.token) headers["X-API-Token"] = this.token;
    const response = await fetch(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    let payload: unknown = null;
    const text = await response.text();
    if (text.length > 0) {
      try {
        payload = JSON.parse(text);
      } catch {
        payload = text;
      }
    }
    if (!response.ok) {
      const detail =
        payload !== null && typeof payload === "object" && "detail" in payload
          ? (payload as { detail: unknown }).detail
          : payload;
      throw new ApiError(response.status, detail);
    }
    return payload as T;
  }

  health(): Promise<HealthResponse> {
    return this.request("GET", "/health");
  }

  listManuals(query = "", tags: string[] = []): Promise<{ manuals: ManualSummary[] }> {
    const params = new URLSearchParams();
    if (query) params.set("query", query);
    for (const tag of tags) params.append("tag", tag);
    const suffix = params.size > 0 ? `?${params.toString()}` : "";
    return this.request("GET", `/manuals${suffix}`);
  }

  getManual(manualId: string, version?: number): Promise<Manual> {
    const suffix = version === undefined ? "" : `?version=${version}`;
    return this.request("GET", `/manuals/${manualId}${suffix}`);
  }

  listVersions(manualId: string): Promise<{ manual_id: string; versions: number[]; latest: number }> {
    return this.request("GET", `/manuals/${manualId}/versions`);
  }

  createManual(payload: { title: string; steps: string[]; tags?: string[] }): Promise<Manual> {
    return this.request("POST", "/manuals", payload);
  }

  simplify(manualId: string): Promise<SimplifyResponse> {
    return this.request("POST", `/manuals/${manualId}/simplify`);
  }

  reviewQueue(): Promise<{ items: ReviewItem[] }> {
    return this.request("GET", "/review/queue");
  }

  submitVerdict(manualId: string, stepId: number, verdict: Verdict): Promise<VerdictResponse> {
    return this.request("POST", `/review/${manualId}/${stepId}/verdict`, verdict);
  }

  display(manualId: string, stepId: number): Promise<DisplayResponse> {
    return this.request("GET", `/manuals/${manualId}/steps/${stepId}/display`);
  }

  train(overrides: TrainRequest = {}): Promise<TrainResponse> {
    return this.request("POST", "/calibration/train", overrides);
  }

  model(): Promise<{ model: CalibrationModel }> {
    return this.request("GET", "/calibration/model");
  }
}
