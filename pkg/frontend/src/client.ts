import type {
  ArchiveRecord,
  PendingCard,
  RunState,
  SubmitAck,
  SubmitRejection,
  SurrogateDiagnostics,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service responded ${status}`);
  }
}

export class SubmitRejectedError extends ApiError {
  constructor(readonly rejection: SubmitRejection) {
    super(400, rejection);
  }
}

type FetchLike = typeof fetch;

/** Thin typed wrapper over the run service.  Mutations carry
 *  client-generated idempotency keys so a retried or double-clicked
 *  request cannot create a second record. */
export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private url(path: string): string {
    return `${this.base.replace(/\/$/, "")}/api/v1${path}`;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await this.fetchImpl(this.url(path), init);
    const body = await res.json().catch(() => null);
    if (!res.ok) {
      const detail = (body as { detail?: unknown } | null)?.detail;
      if (res.status === 400 && detail && typeof detail === "object" && "expected_shape" in detail) {
        throw new SubmitRejectedError(detail as SubmitRejection);
      }
      throw new ApiError(res.status, detail ?? body);
    }
    return body as T;
  }

  getRun(runId: string): Promise<RunState> {
    return this.request(`/runs/${runId}`);
  }

  async getPending(runId: string): Promise<PendingCard[]> {
    const body = await this.request<{ pending: PendingCard[] }>(`/runs/${runId}/pending`);
    return body.pending;
  }

  async getArchive(runId: string, position?: number): Promise<ArchiveRecord[]> {
    const query = position === undefined ? "" : `?position=${position}`;
    const body = await this.request<{ records: ArchiveRecord[] }>(
      `/runs/${runId}/archive${query}`,
    );
    return body.records;
  }

  getSurrogate(runId: string, position: number): Promise<SurrogateDiagnostics> {
    return this.request(`/runs/${runId}/surrogate/${position}`);
  }

  submitResult(
    runId: string,
    pendingId: string,
    readings: number[][],
    idempotencyKey: string,
  ): Promise<SubmitAck> {
    return this.request(`/runs/${runId}/results`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        pending_id: pendingId,
        readings,
        idempotency_key: idempotencyKey,
      }),
    });
  }
}

export function newIdempotencyKey(): string {
  if (typeof crypto !== "undefined" && crypto.randomUUID) return crypto.randomUUID();
  return `k-${Date.now()}-${Math.random().toString(36).slice(2)}`;
}
