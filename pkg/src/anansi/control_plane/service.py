"""Pipeline service: the single mutation path over the event store.

Every CLI subcommand and API endpoint funnels writes through this class,
which only ever mutates state via EventLog.append. Reads come from
immutable snapshots.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from fractions import Fraction
from pathlib import Path

from anansi import analytics, cluster, finance, infra
from anansi.control_plane.config import AppConfig
from anansi.engagement import (
    EngagementEngine,
    ScriptStalled,
    run_scripted_scammer,
    load_scenarios,
)
from anansi.engagement.model import Conversation, ResponderKind, Stage
from anansi.extract import IndicatorKind, url_host
from anansi.ingest import dedupe_reports, message_hash, parse_reports
from anansi.store import EventKind, EventLog, Snapshot, export_dataset, persist_conversation


class ControlPlaneError(Exception):
    pass


class UnknownConversation(ControlPlaneError):
    pass


class NoOpenEscalation(ControlPlaneError):
    pass


class DuplicateAction(ControlPlaneError):
    pass


class InvalidAction(ControlPlaneError):
    pass


OPERATOR_ACTION_KINDS = ("approve_draft", "edit_and_send", "reject_draft",
                         "close_conversation", "annotate")


@dataclass(frozen=True)
class OperatorAction:
    action_id: str
    kind: str
    conversation_id: str
    actor: str
    body: str | None = None
    at: datetime | None = None

    def payload_hash(self) -> str:
        doc = json.dumps({
            "kind": self.kind,
            "conversation_id": self.conversation_id,
            "body": self.body,
        }, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(doc.encode("utf-8")).hexdigest()[:16]


class PipelineService:
    def __init__(self, config: AppConfig | None = None):
        self.config = config or AppConfig()
        self.log = EventLog(self.config.store_path)
        self.engine = EngagementEngine()

    # -- ingest -----------------------------------------------------------

    def ingest_file(self, path: str | Path, fmt: str,
                    default_region: str = "US") -> dict:
        raw = Path(path).read_bytes()
        result = parse_reports(raw, fmt, default_region)
        snapshot = self.log.snapshot()
        existing = {
            (doc["phone"], message_hash(doc["message_text"]))
            for doc in snapshot.reports_ingested
        }
        fresh = []
        for report in dedupe_reports(result.reports):
            key = (report.phone, message_hash(report.message_text))
            if key in existing:
                continue
            existing.add(key)
            fresh.append(report)
            self.log.append(EventKind.REPORT_INGESTED, {
                "report_id": report.report_id,
                "source": report.source.value,
                "phone": report.phone,
                "message_text": report.message_text,
                "platform_hint": report.platform_hint.value,
                "reported_at": report.reported_at.isoformat(),
                "scam_type_label": report.scam_type_label,
            }, at=report.reported_at)
        return {
            "parsed": len(result.reports),
            "rejected": len(result.rejects),
            "ingested": len(fresh),
            "duplicates": len(result.reports) - len(fresh),
            "rejects": [{"index": r.index, "reason": r.reason} for r in result.rejects],
        }

    # -- simulation ---------------------------------------------------------

    def simulate(self, scenario_dir: str | Path | None = None,
                 count: int | None = None,
                 auto_resolve_escalations: bool = False) -> dict:
        directory = scenario_dir or self.config.scenario_dir
        if directory is None:
            raise ControlPlaneError("no scenario directory configured")
        scripts = load_scenarios(directory)
        if count is not None:
            scripts = scripts[:count]
        snapshot = self.log.snapshot()
        known_phones = {c.scammer_phone for c in snapshot.conversations.values()}
        summary = {"requested": len(scripts), "completed": 0, "skipped": 0,
                   "escalated": 0, "stalled": 0, "wallets_captured": 0,
                   "stage_trace_failures": 0}
        for script in scripts:
            if script.phone in known_phones:
                summary["skipped"] += 1
                continue
            try:
                run = run_scripted_scammer(
                    script, engine=self.engine,
                    auto_resolve_escalations=auto_resolve_escalations)
            except ScriptStalled:
                summary["stalled"] += 1
                continue
            persist_conversation(self.log, run.conversation,
                                 persona_seed=run.conversation.persona.seed)
            known_phones.add(script.phone)
            summary["completed"] += 1
            if run.escalated:
                summary["escalated"] += 1
            if not run.stage_trace_ok():
                summary["stage_trace_failures"] += 1
            summary["wallets_captured"] += len(run.captured_wallets())
        return summary

    # -- operator actions -----------------------------------------------------

    def handle_operator_action(self, action: OperatorAction) -> dict:
        if action.kind not in OPERATOR_ACTION_KINDS:
            raise InvalidAction(f"unknown kind {action.kind!r}")
        if action.kind in ("edit_and_send", "annotate") and not (action.body or "").strip():
            raise InvalidAction(f"{action.kind} requires a non-empty body")

        snapshot = self.log.snapshot()
        payload_hash = action.payload_hash()
        seen = snapshot.actions.get(action.action_id)
        if seen is not None:
            if seen["payload_hash"] != payload_hash:
                raise DuplicateAction(
                    f"action {action.action_id} replayed with a different payload")
            return {
                "action_id": action.action_id,
                "conversation_id": seen["conversation_id"],
                "replayed": True,
                "seqs": seen["seqs"],
            }

        conversation = snapshot.conversations.get(action.conversation_id)
        if conversation is None:
            raise UnknownConversation(action.conversation_id)

        now = action.at or datetime.now(timezone.utc)
        if conversation.messages:
            floor = conversation.messages[-1].sent_at + timedelta(seconds=1)
            now = max(now, floor)
        marks = {"action_id": action.action_id,
                 "action_payload_hash": payload_hash, "actor": action.actor}
        seqs: list[int] = []

        if action.kind in ("approve_draft", "edit_and_send", "reject_draft"):
            ticket = conversation.open_escalation()
            if ticket is None:
                raise NoOpenEscalation(action.conversation_id)
            if action.kind in ("approve_draft", "edit_and_send"):
                text = action.body if action.kind == "edit_and_send" else ticket.draft
                if not (text or "").strip():
                    raise InvalidAction("no draft text to send")
                seqs.append(self.log.append(EventKind.MESSAGE_RECORDED, {
                    "conversation_id": action.conversation_id,
                    "direction": "outbound",
                    "platform": conversation.platform_route[-1].value,
                    "text": text,
                    "sent_at": now.isoformat(),
                    "delivery_state": "delivered",
                    "responder": ResponderKind.OPERATOR.value,
                    **marks,
                }, at=now))
                resolution = "approved" if action.kind == "approve_draft" else "edited"
            else:
                resolution = "rejected"
            seqs.append(self.log.append(EventKind.ESCALATION_RESOLVED, {
                "conversation_id": action.conversation_id,
                "ticket_id": ticket.ticket_id,
                "resolution": resolution,
                "at": now.isoformat(),
                **marks,
            }, at=now))
        elif action.kind == "close_conversation":
            if conversation.is_terminal:
                raise InvalidAction("conversation already terminal")
            seqs.append(self.log.append(EventKind.STAGE_CHANGED, {
                "conversation_id": action.conversation_id,
                "stage": Stage.CLOSED.value,
                "at": now.isoformat(),
                **marks,
            }, at=now))
        elif action.kind == "annotate":
            seqs.append(self.log.append(EventKind.CONVERSATION_ANNOTATED, {
                "conversation_id": action.conversation_id,
                "note": action.body,
                **marks,
            }, at=now))

        return {
            "action_id": action.action_id,
            "conversation_id": action.conversation_id,
            "replayed": False,
            "seqs": seqs,
        }

    # -- reports ---------------------------------------------------------------

    def report_attrition(self, snapshot: Snapshot | None = None) -> dict:
        snap = snapshot or self.log.snapshot()
        flow = analytics.attrition_flow(snap.conversations.values())
        return json.loads(flow.to_sankey_json())

    def report_persistence(self, snapshot: Snapshot | None = None) -> dict:
        snap = snapshot or self.log.snapshot()
        cdf = analytics.persistence_cdf(snap.conversations.values())
        return json.loads(cdf.to_json())

    def report_trajectories(self, snapshot: Snapshot | None = None) -> dict:
        snap = snapshot or self.log.snapshot()
        return analytics.platform_trajectories(snap.conversations.values())

    def report_clusters(self, snapshot: Snapshot | None = None) -> dict:
        snap = snapshot or self.log.snapshot()
        inbound: list[tuple[str, str]] = []
        graph = cluster.IocGraph()
        for conv in sorted(snap.conversations.values(), key=lambda c: c.conversation_id):
            graph.add_conversation(conv.conversation_id)
            for index, message in enumerate(conv.messages):
                if message.direction.value == "inbound":
                    inbound.append((f"{conv.conversation_id}:{index:03d}", message.text))
            for ind in conv.indicators:
                graph.add(conv.conversation_id, ind.value, ind.kind)
        out: dict = {"templates": [], "ioc_components": []}
        if inbound:
            report = cluster.cluster_templates(
                inbound, jaccard_threshold=self.config.jaccard_threshold)
            out["templates"] = [
                {"cluster_id": c.cluster_id, "size": c.size, "exemplar": c.exemplar,
                 "members": list(c.members)}
                for c in report.clusters
            ]
        # link only on infrastructure indicators; a shared payment-app or
        # brand mention ties unrelated operations together
        components = cluster.ioc_components(graph, kinds={
            IndicatorKind.PHONE, IndicatorKind.TELEGRAM_HANDLE, IndicatorKind.URL,
            IndicatorKind.BTC_ADDRESS, IndicatorKind.ETH_ADDRESS,
        })
        out["ioc_components"] = [
            {"cluster_id": c.cluster_id, "size": c.size, "members": list(c.members),
             "weak": c.weak}
            for c in components.clusters
        ]
        return out

    def report_infra(self, snapshot: Snapshot | None = None) -> dict:
        snap = snapshot or self.log.snapshot()
        hosts = sorted({
            url_host(ind.value)
            for ind in snap.indicators
            if ind.kind == IndicatorKind.URL
        })
        out: dict = {"domains": hosts, "tld_distribution": [], "blocklist_coverage": {},
                     "hosting": None}
        if hosts:
            baseline = (infra.load_baseline(self.config.baseline_path)
                        if self.config.baseline_path else _bundled_baseline())
            dist = infra.tld_distribution(hosts, baseline)
            out["tld_distribution"] = [
                {"tld": r.tld, "count": r.count, "share_percent": round(r.share_percent, 4),
                 "baseline_percent": r.baseline_percent,
                 "over_representation": (None if r.over_representation == infra.BASELINE_ABSENT
                                         else round(r.over_representation, 4))}
                for r in dist.rows
            ]
        if hosts and self.config.blocklists_dir and Path(self.config.blocklists_dir).exists():
            blocklists = {
                p.stem: infra.load_blocklist(p)
                for p in sorted(Path(self.config.blocklists_dir).glob("*.txt"))
            }
            out["blocklist_coverage"] = {
                name: round(pct, 2)
                for name, pct in infra.blocklist_coverage(hosts, blocklists).items()
            }
        if hosts and self.config.resolutions_path and Path(self.config.resolutions_path).exists():
            table = json.loads(Path(self.config.resolutions_path).read_text("utf-8"))
            resolver = infra.FixtureResolver(table)
            asn = (infra.AsnTable.from_csv(self.config.asn_table_path)
                   if self.config.asn_table_path else infra.AsnTable([]))
            report = infra.attribute_hosting(hosts, resolver, asn)
            out["hosting"] = {
                "clusters": [
                    {"ip": c.ip, "provider": c.provider, "size": c.size,
                     "domains": list(c.domains)}
                    for c in report.clusters
                ],
                "failures": report.failures,
                "largest_by_provider": report.largest_by_provider,
            }
        return out

    def report_finance(self, snapshot: Snapshot | None = None) -> dict:
        snap = snapshot or self.log.snapshot()
        if not snap.ledgers or not self.config.rates_path:
            return {"rows": [], "total_usd": "0.00", "stats": {}}
        rates = finance.RateTable.from_csv(self.config.rates_path)
        dataset = set(snap.ledgers) | set(self.config.dataset_wallets)
        records = []
        for wallet in sorted(snap.ledgers):
            txs = [finance.ChainTx.from_dict(doc) for doc in snap.ledgers[wallet]]
            by_asset: dict[finance.Asset, list[finance.ChainTx]] = {}
            for tx in txs:
                by_asset.setdefault(tx.asset, []).append(tx)
            for asset_txs in by_asset.values():
                records.append(finance.build_revenue_record(
                    wallet, asset_txs, dataset, rates,
                    refund_tolerance=Fraction(self.config.refund_tolerance).limit_denominator(10**6),
                    domains=self.config.wallet_domains.get(wallet, ()),
                ))
        report = finance.revenue_report(records)
        return _finance_to_dict(report)

    def generate_reports(self, out_dir: str | Path) -> dict[str, Path]:
        """Compute every report, persist each as a report_generated event,
        and write files under out_dir."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        snap = self.log.snapshot()
        produced: dict[str, Path] = {}
        reports = {
            "attrition": self.report_attrition(snap),
            "persistence": self.report_persistence(snap),
            "trajectories": self.report_trajectories(snap),
            "clusters": self.report_clusters(snap),
            "infra": self.report_infra(snap),
            "finance": self.report_finance(snap),
        }
        for name, payload in reports.items():
            self.log.append(EventKind.REPORT_GENERATED,
                            {"name": name, "payload": payload})
            path = out / f"{name}.json"
            path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")
            produced[name] = path
        # clusters additionally as JSON-lines, one cluster per line
        lines = []
        for method, key in (("jaccard_template", "templates"),
                            ("ioc_components", "ioc_components")):
            for doc in reports["clusters"][key]:
                lines.append(json.dumps({"method": method, **doc},
                                        sort_keys=True, separators=(",", ":")))
        jsonl = out / "clusters.jsonl"
        jsonl.write_text("\n".join(lines) + ("\n" if lines else ""), "utf-8")
        produced["clusters_jsonl"] = jsonl
        return produced

    # -- finance over fixture providers -------------------------------------------

    def trace(self, ledgers_path: str | Path | None = None,
              rates_path: str | Path | None = None,
              out_dir: str | Path = "trace-out",
              wallets: list[str] | None = None) -> dict:
        ledgers = ledgers_path or self.config.ledgers_path
        rates_file = rates_path or self.config.rates_path
        if ledgers is None or rates_file is None:
            raise ControlPlaneError("trace requires ledger fixtures and a rate table")
        provider = finance.FixtureLedgerProvider(ledgers)
        targets = wallets or provider.wallets()
        rates = finance.RateTable.from_csv(rates_file)
        dataset = set(provider.wallets()) | set(self.config.dataset_wallets)
        records = []
        for wallet in targets:
            txs = finance.fetch_ledger(wallet, provider)
            self.log.append(EventKind.LEDGER_FETCHED, {
                "wallet": wallet,
                "txs": [tx.to_dict() for tx in txs],
            })
            by_asset: dict[finance.Asset, list[finance.ChainTx]] = {}
            for tx in txs:
                by_asset.setdefault(tx.asset, []).append(tx)
            for asset_txs in by_asset.values():
                records.append(finance.build_revenue_record(
                    wallet, asset_txs, dataset, rates,
                    refund_tolerance=Fraction(self.config.refund_tolerance).limit_denominator(10**6),
                    domains=self.config.wallet_domains.get(wallet, ()),
                ))
        report = finance.revenue_report(records)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "revenue.csv").write_text(report.to_csv(), "utf-8")
        payload = _finance_to_dict(report)
        (out / "revenue.json").write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")
        self.log.append(EventKind.REPORT_GENERATED,
                        {"name": "finance", "payload": payload})
        return payload

    # -- export ---------------------------------------------------------------

    def export(self, out_dir: str | Path, redact: bool = False) -> Path:
        return export_dataset(self.log.snapshot(), out_dir, redact=redact)

    # -- views for the API ------------------------------------------------------

    def conversation_summaries(self, stage: str | None = None,
                               platform: str | None = None) -> list[dict]:
        snap = self.log.snapshot()
        out = []
        for conv in sorted(snap.conversations.values(), key=lambda c: c.conversation_id):
            if stage and conv.stage.value != stage:
                continue
            if platform and all(p.value != platform for p in conv.platform_route):
                continue
            out.append(_summary(conv, snap))
        return out

    def conversation_detail(self, conversation_id: str) -> dict:
        snap = self.log.snapshot()
        conv = snap.conversations.get(conversation_id)
        if conv is None:
            raise UnknownConversation(conversation_id)
        doc = _summary(conv, snap)
        doc["messages"] = [
            {"index": i, "direction": m.direction.value, "platform": m.platform.value,
             "text": m.text, "sent_at": m.sent_at.isoformat(),
             "responder": m.responder.value if m.responder else None,
             "delivery_state": m.delivery_status.state}
            for i, m in enumerate(conv.messages)
        ]
        doc["escalations"] = [_ticket_doc(t) for t in conv.escalations]
        doc["indicators"] = [
            {"kind": ind.kind.value, "value": ind.value,
             "message_index": ind.source.message_index}
            for ind in conv.indicators
        ]
        doc["persona"] = ({
            "persona_id": conv.persona.persona_id,
            "name": conv.persona.name,
            "age": conv.persona.age,
            "city": conv.persona.city,
            "state": conv.persona.state,
            "occupation": conv.persona.occupation,
            "backstory": [list(fact) for fact in conv.persona.backstory_facts],
        } if conv.persona else None)
        doc["annotations"] = snap.annotations.get(conversation_id, [])
        return doc

    def escalation_queue(self, open_only: bool = True) -> list[dict]:
        snap = self.log.snapshot()
        rows = []
        for conv in snap.conversations.values():
            for ticket in conv.escalations:
                if open_only and ticket.resolved:
                    continue
                doc = _ticket_doc(ticket)
                doc["conversation_id"] = conv.conversation_id
                doc["scammer_phone"] = conv.scammer_phone
                doc["stage"] = conv.stage.value
                rows.append(doc)
        rows.sort(key=lambda d: (d["opened_at"], d["ticket_id"]))
        return rows


def _summary(conv: Conversation, snap: Snapshot) -> dict:
    return {
        "conversation_id": conv.conversation_id,
        "scammer_phone": conv.scammer_phone,
        "stage": conv.stage.value,
        "platform_route": [p.value for p in conv.platform_route],
        "message_count": len(conv.messages),
        "open_escalations": sum(1 for t in conv.escalations if not t.resolved),
        "indicator_count": len(conv.indicators),
        "outcome": conv.outcome(),
        "opened_at": conv.opened_at.isoformat() if conv.opened_at else None,
        "scam_type_label": conv.scam_type_label,
    }


def _ticket_doc(ticket) -> dict:
    return {
        "ticket_id": ticket.ticket_id,
        "reason": ticket.reason,
        "draft": ticket.draft,
        "opened_at": ticket.opened_at.isoformat(),
        "resolved": ticket.resolved,
        "resolution": ticket.resolution,
    }


def _finance_to_dict(report: finance.RevenueReport) -> dict:
    return {
        "rows": [
            {"wallet": r.wallet, "asset": r.asset.value,
             "domains": list(r.associated_domains),
             "gross_usd": str(r.gross_inbound_usd), "refunds_usd": str(r.refunds_usd),
             "internal_usd": str(r.internal_usd), "net_usd": str(r.net_usd),
             "tx_count": r.tx_count}
            for r in report.rows
        ],
        "stats": {
            asset.value: {
                "median_tx_count": stats.median_tx_count,
                "mean_tx_count": stats.mean_tx_count,
                "min_tx_count": stats.min_tx_count,
                "max_tx_count": stats.max_tx_count,
                "median_net_usd": str(stats.median_net_usd),
                "mean_net_usd": str(stats.mean_net_usd),
                "min_net_usd": str(stats.min_net_usd),
                "max_net_usd": str(stats.max_net_usd),
            }
            for asset, stats in report.stats.items()
        },
        "total_usd": str(report.total_usd),
    }


def _bundled_baseline() -> dict[str, float]:
    from importlib import resources
    text = resources.files("anansi").joinpath("data", "tld_baseline.csv").read_text("utf-8")
    table: dict[str, float] = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("tld,"):
            continue
        tld, share = line.split(",", 1)
        table[tld] = float(share)
    return table
