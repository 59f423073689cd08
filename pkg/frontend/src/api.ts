import type {
  BudgetReport,
  CancellerAck,
  KnobPatch,
  SessionState,
  TuneAck,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

async function detailOf(res: Response): Promise<string> {
  try {
    const body = await res.json();
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body.detail ?? body);
  } catch {
    return res.statusText || `HTTP ${res.status}`;
  }
}

export class Api {
  constructor(
    private base = "",
    private fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: { "content-type": "application/json" } };
    if (body !== undefined) init.body = JSON.stringify(body);
    const res = await this.fetchFn(this.base + path, init);
    if (!res.ok) throw new ApiError(res.status, await detailOf(res));
    if (res.status === 204) return undefined as T;
    return (await res.json()) as T;
  }

  createSession(config: Record<string, unknown> = {}): Promise<SessionState> {
    return this.request("POST", "/sessions", config);
  }

  getSession(id: string): Promise<SessionState> {
    return this.request("GET", `/sessions/${id}`);
  }

  patchCanceller(id: string, patch: KnobPatch): Promise<CancellerAck> {
    return this.request("PATCH", `/sessions/${id}/canceller`, patch);
  }

  tune(id: string, strategy = "exhaustive"): Promise<TuneAck> {
    return this.request("POST", `/sessions/${id}/tune`, { strategy });
  }

  digitalSic(id: string): Promise<BudgetReport> {
    return this.request("POST", `/sessions/${id}/digital-sic`);
  }

  deleteSession(id: string): Promise<void> {
    return this.request("DELETE", `/sessions/${id}`);
  }

  streamUrl(id: string): string {
    const root = this.base || `${location.protocol}//${location.host}`;
    return `${root.replace(/^http/, "ws")}/sessions/${id}/stream`;
  }
}
