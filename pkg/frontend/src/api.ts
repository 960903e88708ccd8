import type {
  ActionDoc,
  AuctionStepPayload,
  CommitPayload,
  EffectReportPayload,
  MatrixPayload,
  ScenarioInfo,
  SessionPayload,
  SolutionSetPayload,
  SystemDoc,
} from './types.js';

export interface ApiResponse<T> {
  status: number;
  body: T;
  // exact text the server sent; panels read number tokens out of this
  raw: string;
}

export class ServiceError extends Error {
  constructor(readonly status: number, message: string) {
    super(message);
    this.name = 'ServiceError';
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    public baseUrl: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<ApiResponse<T>> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.body = JSON.stringify(body);
      init.headers = { 'Content-Type': 'application/json' };
    }
    const res = await this.fetchImpl(this.baseUrl + path, init);
    const raw = await res.text();
    if (!res.ok) {
      let message = raw;
      try {
        message = (JSON.parse(raw) as { error?: string }).error ?? raw;
      } catch {
        // non-JSON error body, keep the text
      }
      throw new ServiceError(res.status, message);
    }
    return { status: res.status, body: JSON.parse(raw) as T, raw };
  }

  listScenarios(): Promise<ApiResponse<{ scenarios: ScenarioInfo[] }>> {
    return this.request('GET', '/scenarios');
  }

  openScenario(name: string, params: Record<string, unknown> = {}): Promise<ApiResponse<SessionPayload>> {
    return this.request('POST', `/scenarios/${encodeURIComponent(name)}`, { params });
  }

  openSystem(doc: SystemDoc): Promise<ApiResponse<SessionPayload>> {
    return this.request('POST', '/systems', doc);
  }

  getSession(id: string): Promise<ApiResponse<SessionPayload>> {
    return this.request('GET', `/systems/${id}`);
  }

  getSolutions(id: string, all = true): Promise<ApiResponse<SolutionSetPayload & { all: boolean }>> {
    return this.request('GET', `/systems/${id}/solutions?all=${all}`);
  }

  preview(
    id: string,
    action: ActionDoc | Record<string, unknown>,
    acting?: string,
    signal?: AbortSignal,
  ): Promise<ApiResponse<EffectReportPayload>> {
    return this.request('POST', `/systems/${id}/actions/preview`, { action, acting }, signal);
  }

  commit(id: string, action: ActionDoc | Record<string, unknown>): Promise<ApiResponse<CommitPayload>> {
    return this.request('POST', `/systems/${id}/actions/commit`, { action });
  }

  undo(id: string): Promise<ApiResponse<CommitPayload>> {
    return this.request('POST', `/systems/${id}/undo`, {});
  }

  getMatrix(name: string, params: Record<string, string> = {}): Promise<ApiResponse<MatrixPayload>> {
    const query = new URLSearchParams(params).toString();
    return this.request('GET', `/games/${encodeURIComponent(name)}/matrix${query ? '?' + query : ''}`);
  }

  auctionStep(id: string, player: string): Promise<ApiResponse<AuctionStepPayload>> {
    return this.request('POST', `/auction/${id}/step`, { player });
  }
}
