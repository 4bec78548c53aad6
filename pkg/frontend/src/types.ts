/** Mirrors of the control-plane API resources. Rendered values come only
 * from these; the client never derives money values beyond formatting. */

export interface ConversationSummary {
  conversation_id: string;
  scammer_phone: string;
  stage: string;
  platform_route: string[];
  message_count: number;
  open_escalations: number;
  indicator_count: number;
  outcome: string;
  opened_at: string | null;
  scam_type_label: string;
}

export interface MessageView {
  index: number;
  direction: "inbound" | "outbound";
  platform: string;
  text: string;
  sent_at: string;
  responder: string | null;
  delivery_state: string;
}

export interface EscalationItem {
  ticket_id: string;
  reason: string;
  draft: string | null;
  opened_at: string;
  resolved: boolean;
  resolution: string | null;
  conversation_id: string;
  scammer_phone: string;
  stage: string;
}

export interface PersonaView {
  persona_id: string;
  name: string;
  age: number;
  city: string;
  state: string;
  occupation: string;
  backstory: [string, string][];
}

export interface IndicatorView {
  kind: string;
  value: string;
  message_index: number;
}

export interface ConversationDetail extends ConversationSummary {
  messages: MessageView[];
  escalations: Omit<EscalationItem, "conversation_id" | "scammer_phone" | "stage">[];
  indicators: IndicatorView[];
  persona: PersonaView | null;
  annotations: { note: string; actor: string; at: string }[];
}

export interface SankeyNode {
  name: string;
  count: number;
}

export interface SankeyLink {
  source: number;
  target: number;
  value: number;
}

export interface SankeyData {
  nodes: SankeyNode[];
  links: SankeyLink[];
}

export interface CdfSeries {
  points: { days: number; fraction: number }[];
  excluded: number;
}

export interface RevenueRow {
  wallet: string;
  asset: string;
  domains: string[];
  gross_usd: string;
  refunds_usd: string;
  internal_usd: string;
  net_usd: string;
  tx_count: number;
}

export interface RevenueReport {
  rows: RevenueRow[];
  stats: Record<string, Record<string, number | string>>;
  total_usd: string;
}

export interface TldRow {
  tld: string;
  count: number;
  share_percent: number;
  baseline_percent: number | null;
  over_representation: number | null;
}

export interface InfraReport {
  domains: string[];
  tld_distribution: TldRow[];
  blocklist_coverage: Record<string, number>;
  hosting: {
    clusters: { ip: string; provider: string | null; size: number; domains: string[] }[];
    failures: Record<string, string>;
    largest_by_provider: Record<string, number>;
  } | null;
}

export interface ClusterReportView {
  templates: { cluster_id: number; size: number; exemplar: string; members: string[] }[];
  ioc_components: { cluster_id: number; size: number; members: string[]; weak: boolean }[];
}

export interface ActionResult {
  action_id: string;
  conversation_id: string;
  replayed: boolean;
  seqs: number[];
}

export type OperatorActionKind =
  | "approve_draft"
  | "edit_and_send"
  | "reject_draft"
  | "close_conversation"
  | "annotate";

export interface EventNotice {
  seq: number;
  kind: string;
  at: string;
}
