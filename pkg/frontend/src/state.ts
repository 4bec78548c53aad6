/** Dashboard state: escalation queue, open thread, reports, live updates.
 *
 * Double submits are suppressed client-side by reusing one idempotency
 * token per (ticket, kind); the server's replay semantics make the second
 * POST a no-op even if it races the first.
 */

import { ApiClient, ApiError, newActionToken } from "./api.js";
import type {
  ConversationDetail,
  EscalationItem,
  OperatorActionKind,
} from "./types.js";

export interface SubmitOutcome {
  ok: boolean;
  replayed: boolean;
  error: string | null;
}

export class DashboardStore {
  queue: EscalationItem[] = [];
  activeConversation: ConversationDetail | null = null;
  offline = false;
  lastSeq = 0;
  actor = "operator";

  private actionTokens = new Map<string, string>();
  private listeners: (() => void)[] = [];

  constructor(private api: ApiClient) {}

  onChange(listener: () => void): void {
    this.listeners.push(listener);
  }

  private notify(): void {
    for (const listener of this.listeners) listener();
  }

  /** Oldest open escalation first; keeps the cached list on API failure. */
  async refreshQueue(): Promise<void> {
    try {
      const items = await this.api.listEscalations(true);
      items.sort((a, b) =>
        a.opened_at < b.opened_at ? -1 : a.opened_at > b.opened_at ? 1
          : a.ticket_id < b.ticket_id ? -1 : 1);
      this.queue = items;
      this.offline = false;
    } catch {
      this.offline = true;
    }
    this.notify();
  }

  async openConversation(conversationId: string): Promise<void> {
    try {
      this.activeConversation = await this.api.getConversation(conversationId);
      this.offline = false;
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        this.activeConversation = null;
      } else {
        this.offline = true;
      }
    }
    this.notify();
  }

  private tokenFor(ticketId: string, kind: OperatorActionKind): string {
    const key = `${ticketId}|${kind}`;
    let token = this.actionTokens.get(key);
    if (!token) {
      token = newActionToken();
      this.actionTokens.set(key, token);
    }
    return token;
  }

  async submitAction(
    item: Pick<EscalationItem, "ticket_id" | "conversation_id">,
    kind: OperatorActionKind,
    body?: string,
  ): Promise<SubmitOutcome> {
    if (kind === "edit_and_send" && !(body ?? "").trim()) {
      return { ok: false, replayed: false, error: "edited reply must not be empty" };
    }
    const token = this.tokenFor(item.ticket_id, kind);
    try {
      const result = await this.api.postAction(item.conversation_id, {
        action_id: token,
        kind,
        actor: this.actor,
        body: body ?? null,
      });
      await this.refreshQueue();
      if (this.activeConversation?.conversation_id === item.conversation_id) {
        await this.openConversation(item.conversation_id);
      }
      return { ok: true, replayed: result.replayed, error: null };
    } catch (error) {
      if (error instanceof ApiError) {
        // surfaced verbatim per contract (NoOpenEscalation / DuplicateAction)
        return { ok: false, replayed: false, error: error.detail };
      }
      this.offline = true;
      this.notify();
      return { ok: false, replayed: false, error: "network unreachable" };
    }
  }

  /** Consume event notifications; refetch affected resources. */
  async onEvents(events: { seq: number; kind: string }[]): Promise<void> {
    let touched = false;
    for (const event of events) {
      if (event.seq <= this.lastSeq) continue;
      this.lastSeq = event.seq;
      if (["escalation_opened", "escalation_resolved", "message_recorded",
           "stage_changed", "conversation_opened"].includes(event.kind)) {
        touched = true;
      }
    }
    if (touched) {
      await this.refreshQueue();
      if (this.activeConversation) {
        await this.openConversation(this.activeConversation.conversation_id);
      }
    }
  }

  async pollEvents(): Promise<void> {
    try {
      const events = await this.api.eventsSince(this.lastSeq);
      await this.onEvents(events);
    } catch {
      this.offline = true;
      this.notify();
    }
  }
}
