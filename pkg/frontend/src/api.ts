// Typed client for the discovery service. The console is a pure client:
// every number it renders came out of one of these calls.

import type {
  AssistantResponse,
  PoolInfo,
  ProcessRequestWire,
  ScoredTableWire,
  SearchRequestWire,
  SearchResponse,
  TablePreview,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public errorClass: string,
    detail: string,
  ) {
    super(detail);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    public baseUrl: string,
    private fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await resp.json().catch(() => ({}));
    if (!resp.ok) {
      const err = payload as { error?: string; detail?: string };
      throw new ApiError(resp.status, err.error ?? "HttpError", err.detail ?? resp.statusText);
    }
    return payload as T;
  }

  health(): Promise<{ status: string; provider_dim: number }> {
    return this.request("GET", "/health");
  }

  listPools(): Promise<{ pools: PoolInfo[] }> {
    return this.request("GET", "/pools");
  }

  createPoolFromDir(poolId: string, dir: string): Promise<{ pool_id: string; num_tables: number }> {
    return this.request("POST", "/pools", { pool_id: poolId, dir });
  }

  buildIndex(poolId: string): Promise<{ status: string; num_entries: number }> {
    return this.request("POST", `/pools/${encodeURIComponent(poolId)}/index`, {});
  }

  tablePreview(poolId: string, tableId: string): Promise<TablePreview> {
    return this.request(
      "GET",
      `/pools/${encodeURIComponent(poolId)}/tables/${encodeURIComponent(tableId)}`,
    );
  }

  search(poolId: string, req: SearchRequestWire): Promise<SearchResponse> {
    return this.request("POST", `/pools/${encodeURIComponent(poolId)}/search`, req);
  }

  explain(poolId: string, tableId: string, req: SearchRequestWire): Promise<ScoredTableWire> {
    return this.request(
      "POST",
      `/pools/${encodeURIComponent(poolId)}/explain/${encodeURIComponent(tableId)}`,
      req,
    );
  }

  assistant(text: string): Promise<AssistantResponse> {
    return this.request("POST", "/assistant/message", { text });
  }

  process(req: ProcessRequestWire): Promise<TablePreview> {
    return this.request("POST", "/process", req);
  }
}
