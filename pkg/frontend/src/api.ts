/** Thin typed client over the control-plane HTTP API.
 *
 * fetch is injectable so tests can run against an in-memory backend; the
 * browser build passes the real one. All mutations go through postAction
 * with a caller-supplied idempotency token.
 */

import type {
  ActionResult,
  ClusterReportView,
  ConversationDetail,
  ConversationSummary,
  EscalationItem,
  EventNotice,
  InfraReport,
  OperatorActionKind,
  RevenueReport,
  SankeyData,
  CdfSeries,
} from "./types.js";

export interface HttpResponse {
  status: number;
  json(): Promise<unknown>;
  text(): Promise<string>;
}

export type FetchLike = (url: string, init?: {
  method?: string;
  headers?: Record<string, string>;
  body?: string;
}) => Promise<HttpResponse>;

export class ApiError extends Error {
  constructor(public status: number, public detail: string) {
    super(`api ${status}: ${detail}`);
  }
}

export interface ActionRequest {
  action_id: string;
  kind: OperatorActionKind;
  actor?: string;
  body?: string | null;
}

let tokenCounter = 0;

/** Client-side idempotency token; stable per logical submit. */
export function newActionToken(): string {
  const cryptoObj = (globalThis as { crypto?: { randomUUID?: () => string } }).crypto;
  if (cryptoObj?.randomUUID) {
    return cryptoObj.randomUUID();
  }
  tokenCounter += 1;
  return `tok-${Date.now().toString(36)}-${tokenCounter}-${Math.random().toString(36).slice(2, 10)}`;
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike,
    private token: string | null = null,
  ) {}

  private headers(json = false): Record<string, string> {
    const headers: Record<string, string> = {};
    if (json) headers["Content-Type"] = "application/json";
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, { headers: this.headers() });
    if (response.status !== 200) {
      throw new ApiError(response.status, await response.text());
    }
    return (await response.json()) as T;
  }

  listConversations(params: { stage?: string; platform?: string } = {}):
      Promise<ConversationSummary[]> {
    const query = new URLSearchParams();
    if (params.stage) query.set("stage", params.stage);
    if (params.platform) query.set("platform", params.platform);
    const suffix = query.toString() ? `?${query.toString()}` : "";
    return this.get(`/conversations${suffix}`);
  }

  getConversation(id: string): Promise<ConversationDetail> {
    return this.get(`/conversations/${encodeURIComponent(id)}`);
  }

  listEscalations(openOnly = true): Promise<EscalationItem[]> {
    return this.get(`/escalations?open=${openOnly}`);
  }

  async postAction(conversationId: string, request: ActionRequest): Promise<ActionResult> {
    const response = await this.fetchImpl(
      `${this.baseUrl}/conversations/${encodeURIComponent(conversationId)}/actions`,
      {
        method: "POST",
        headers: this.headers(true),
        body: JSON.stringify(request),
      },
    );
    if (response.status !== 200) {
      let detail = "";
      try {
        const doc = (await response.json()) as { detail?: string };
        detail = doc.detail ?? "";
      } catch {
        detail = await response.text();
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as ActionResult;
  }

  reportAttrition(): Promise<SankeyData> {
    return this.get("/reports/attrition");
  }

  reportPersistence(): Promise<CdfSeries> {
    return this.get("/reports/persistence");
  }

  reportFinance(): Promise<RevenueReport> {
    return this.get("/reports/finance");
  }

  reportInfra(): Promise<InfraReport> {
    return this.get("/reports/infra");
  }

  reportClusters(): Promise<ClusterReportView> {
    return this.get("/reports/clusters");
  }

  reportTrajectories(): Promise<Record<string, number>> {
    return this.get("/reports/trajectories");
  }

  /** Polling read of the event feed (SSE handled by the browser shell). */
  eventsSince(fromSeq: number): Promise<EventNotice[]> {
    return this.get(`/events?from_seq=${fromSeq}&stream=false`);
  }

  csvUrl(report: string): string {
    return `${this.baseUrl}/reports/${report}?format=csv`;
  }
}
