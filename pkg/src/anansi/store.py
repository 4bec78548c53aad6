"""Durable append-only event log with immutable snapshot reads.

One JSON-lines file holds everything: a header line with the schema
version, then one event per line with a strictly increasing seq. Views
(conversations, indicators, ledgers, reports) are materialized by pure
replay, so truncating the file at any event boundary still loads to a
consistent state. Export writes the materialized views to a canonical
archive; import synthesizes an equivalent event log, and
export -> import -> export is byte-identical.
"""

from __future__ import annotations

import csv
import enum
import errno
import io
import json
import os
import threading
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from anansi.engagement.model import (
    Conversation,
    DeliveryStatus,
    EscalationTicket,
    FailureCode,
    MessageDirection,
    MessageRecord,
    ResponderKind,
    Stage,
)
from anansi.extract import Indicator, IndicatorKind, IndicatorSource
from anansi.ingest import Platform
from anansi.persona import generate_persona

SCHEMA_VERSION = 1


class StoreError(Exception):
    pass


class InvalidPayload(StoreError):
    pass


class StorageFull(StoreError):
    pass


class SchemaVersionMismatch(StoreError):
    pass


class CorruptLog(StoreError):
    pass


class EventKind(str, enum.Enum):
    REPORT_INGESTED = "report_ingested"
    CONVERSATION_OPENED = "conversation_opened"
    MESSAGE_RECORDED = "message_recorded"
    STAGE_CHANGED = "stage_changed"
    ESCALATION_OPENED = "escalation_opened"
    ESCALATION_RESOLVED = "escalation_resolved"
    INDICATOR_FOUND = "indicator_found"
    LEDGER_FETCHED = "ledger_fetched"
    REPORT_GENERATED = "report_generated"
    # not in the original nine: the operator "annotate" action needs a
    # durable representation too
    CONVERSATION_ANNOTATED = "conversation_annotated"


REQUIRED_FIELDS: dict[EventKind, tuple[str, ...]] = {
    EventKind.REPORT_INGESTED: ("report_id", "phone", "message_text", "scam_type_label"),
    EventKind.CONVERSATION_OPENED: ("conversation_id", "phone", "platform",
                                    "persona_seed", "opened_at"),
    EventKind.MESSAGE_RECORDED: ("conversation_id", "direction", "platform",
                                 "text", "sent_at"),
    EventKind.STAGE_CHANGED: ("conversation_id", "stage", "at"),
    EventKind.ESCALATION_OPENED: ("conversation_id", "ticket_id", "reason", "at"),
    EventKind.ESCALATION_RESOLVED: ("conversation_id", "ticket_id", "resolution", "at"),
    EventKind.INDICATOR_FOUND: ("conversation_id", "kind", "value", "message_index",
                                "span", "first_seen"),
    EventKind.LEDGER_FETCHED: ("wallet", "txs"),
    EventKind.REPORT_GENERATED: ("name", "payload"),
    EventKind.CONVERSATION_ANNOTATED: ("conversation_id", "note"),
}


@dataclass(frozen=True)
class Event:
    seq: int
    kind: EventKind
    at: datetime
    payload: dict

    def to_line(self) -> str:
        return json.dumps({
            "seq": self.seq,
            "kind": self.kind.value,
            "at": self.at.astimezone(timezone.utc).isoformat(),
            "payload": self.payload,
        }, sort_keys=True, separators=(",", ":"))


def _parse_when(token: str) -> datetime:
    value = datetime.fromisoformat(token.replace("Z", "+00:00"))
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


class EventLog:
    """Single-writer append-only log; many concurrent snapshot readers."""

    def __init__(self, path: str | Path, create: bool = True):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._change = threading.Condition(self._lock)
        self._events: list[Event] = []
        if self.path.exists():
            self._load()
        elif create:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            header = json.dumps({"schema_version": SCHEMA_VERSION},
                                sort_keys=True, separators=(",", ":"))
            self.path.write_text(header + "\n", encoding="utf-8")
        else:
            raise FileNotFoundError(self.path)

    def _load(self) -> None:
        lines = self.path.read_text("utf-8").splitlines()
        if not lines:
            raise CorruptLog("missing header line")
        try:
            header = json.loads(lines[0])
        except json.JSONDecodeError as exc:
            raise CorruptLog(f"bad header: {exc}") from exc
        version = header.get("schema_version")
        if version != SCHEMA_VERSION:
            raise SchemaVersionMismatch(f"log schema {version!r}")
        events: list[Event] = []
        for line_no, line in enumerate(lines[1:], start=2):
            try:
                doc = json.loads(line)
                event = Event(
                    seq=doc["seq"],
                    kind=EventKind(doc["kind"]),
                    at=_parse_when(doc["at"]),
                    payload=doc["payload"],
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                if line_no == len(lines):
                    break  # torn tail write: recover to the last full event
                raise CorruptLog(f"line {line_no}: {exc}") from exc
            expected = events[-1].seq + 1 if events else 1
            if event.seq != expected:
                raise CorruptLog(f"line {line_no}: seq {event.seq}, expected {expected}")
            events.append(event)
        self._events = events

    # -- writing -----------------------------------------------------------

    def append(self, kind: EventKind | str, payload: dict,
               at: datetime | None = None) -> int:
        kind = EventKind(kind)
        missing = [f for f in REQUIRED_FIELDS[kind] if f not in payload]
        if missing:
            raise InvalidPayload(f"{kind.value}: missing {', '.join(missing)}")
        at = at or datetime.now(timezone.utc)
        with self._change:
            event = Event(
                seq=self._events[-1].seq + 1 if self._events else 1,
                kind=kind,
                at=at,
                payload=payload,
            )
            line = event.to_line() + "\n"
            try:
                with open(self.path, "a", encoding="utf-8") as handle:
                    handle.write(line)
                    handle.flush()
                    os.fsync(handle.fileno())
            except OSError as exc:
                if exc.errno == errno.ENOSPC:
                    raise StorageFull(str(exc)) from exc
                raise
            self._events.append(event)
            self._change.notify_all()
            return event.seq

    # -- reading -----------------------------------------------------------

    @property
    def watermark(self) -> int:
        with self._lock:
            return self._events[-1].seq if self._events else 0

    def events(self, from_seq: int = 0) -> list[Event]:
        with self._lock:
            return [e for e in self._events if e.seq > from_seq]

    def wait_for(self, after_seq: int, timeout: float | None = None) -> list[Event]:
        """Block until an event with seq > after_seq exists (or timeout)."""
        with self._change:
            self._change.wait_for(
                lambda: self._events and self._events[-1].seq > after_seq,
                timeout=timeout,
            )
            return [e for e in self._events if e.seq > after_seq]

    def snapshot(self) -> "Snapshot":
        return materialize(self.events())


# --- materialization ---------------------------------------------------------


@dataclass
class Snapshot:
    watermark: int
    conversations: dict[str, Conversation] = field(default_factory=dict)
    reports_ingested: list[dict] = field(default_factory=list)
    indicators: list[Indicator] = field(default_factory=list)
    ledgers: dict[str, list[dict]] = field(default_factory=dict)
    reports: dict[str, dict] = field(default_factory=dict)
    annotations: dict[str, list[dict]] = field(default_factory=dict)
    actions: dict[str, dict] = field(default_factory=dict)

    def open_escalations(self) -> list[tuple[str, EscalationTicket]]:
        out = []
        for conv in sorted(self.conversations.values(),
                           key=lambda c: c.conversation_id):
            for ticket in conv.escalations:
                if not ticket.resolved:
                    out.append((conv.conversation_id, ticket))
        return out


def materialize(events: list[Event]) -> Snapshot:
    """Pure replay of the log into the view model."""
    snap = Snapshot(watermark=events[-1].seq if events else 0)
    for event in events:
        payload = event.payload
        kind = event.kind
        if kind == EventKind.REPORT_INGESTED:
            snap.reports_ingested.append(dict(payload))
        elif kind == EventKind.CONVERSATION_OPENED:
            persona = generate_persona(int(payload["persona_seed"]))
            conv = Conversation(
                conversation_id=payload["conversation_id"],
                scammer_phone=payload["phone"],
                platform_route=[],
                stage=Stage.UNOPENED,
                opened_at=_parse_when(payload["opened_at"]),
                scam_type_label=payload.get("scam_type_label", "Employment"),
            )
            conv.persona = persona
            snap.conversations[conv.conversation_id] = conv
        elif kind == EventKind.MESSAGE_RECORDED:
            conv = snap.conversations[payload["conversation_id"]]
            status_state = payload.get("delivery_state", "delivered")
            if status_state == "failed":
                status = DeliveryStatus(
                    "failed",
                    FailureCode(payload.get("failure_code", "other")),
                    payload.get("raw_code"),
                )
            else:
                status = DeliveryStatus(status_state)
            responder = payload.get("responder")
            conv.record_message(MessageRecord(
                direction=MessageDirection(payload["direction"]),
                platform=Platform(payload["platform"]),
                text=payload["text"],
                sent_at=_parse_when(payload["sent_at"]),
                responder=ResponderKind(responder) if responder else None,
                delivery_status=status,
            ))
            if payload.get("action_id"):
                snap.actions.setdefault(payload["action_id"], {
                    "payload_hash": payload.get("action_payload_hash", ""),
                    "conversation_id": payload["conversation_id"],
                    "seqs": [],
                })["seqs"].append(event.seq)
        elif kind == EventKind.STAGE_CHANGED:
            conv = snap.conversations[payload["conversation_id"]]
            stage = Stage(payload["stage"])
            at = _parse_when(payload["at"])
            conv.set_stage(stage, at)
            if stage == Stage.GHOSTED and (
                    conv.last_scammer_msg_at is not None
                    and conv.last_user_msg_at is not None
                    and conv.last_scammer_msg_at >= conv.last_user_msg_at):
                delta = conv.last_scammer_msg_at - conv.last_user_msg_at
                conv.persistence_days = delta.total_seconds() / 86_400.0
            if payload.get("action_id"):
                snap.actions.setdefault(payload["action_id"], {
                    "payload_hash": payload.get("action_payload_hash", ""),
                    "conversation_id": payload["conversation_id"],
                    "seqs": [],
                })["seqs"].append(event.seq)
        elif kind == EventKind.ESCALATION_OPENED:
            conv = snap.conversations[payload["conversation_id"]]
            conv.escalations.append(EscalationTicket(
                ticket_id=payload["ticket_id"],
                reason=payload["reason"],
                draft=payload.get("draft"),
                opened_at=_parse_when(payload["at"]),
            ))
        elif kind == EventKind.ESCALATION_RESOLVED:
            conv = snap.conversations[payload["conversation_id"]]
            for ticket in conv.escalations:
                if ticket.ticket_id == payload["ticket_id"]:
                    ticket.resolved = True
                    ticket.resolution = payload["resolution"]
                    ticket.resolved_at = _parse_when(payload["at"])
            if payload.get("action_id"):
                snap.actions.setdefault(payload["action_id"], {
                    "payload_hash": payload.get("action_payload_hash", ""),
                    "conversation_id": payload["conversation_id"],
                    "seqs": [],
                })["seqs"].append(event.seq)
        elif kind == EventKind.INDICATOR_FOUND:
            indicator = Indicator(
                kind=IndicatorKind(payload["kind"]),
                value=payload["value"],
                raw=payload.get("raw", payload["value"]),
                source=IndicatorSource(
                    conversation_id=payload["conversation_id"],
                    message_index=int(payload["message_index"]),
                    span=tuple(payload["span"]),
                ),
                first_seen=_parse_when(payload["first_seen"]),
            )
            snap.indicators.append(indicator)
            conv = snap.conversations.get(payload["conversation_id"])
            if conv is not None:
                conv.add_indicators([indicator])
        elif kind == EventKind.LEDGER_FETCHED:
            snap.ledgers[payload["wallet"]] = list(payload["txs"])
        elif kind == EventKind.REPORT_GENERATED:
            snap.reports[payload["name"]] = payload["payload"]
        elif kind == EventKind.CONVERSATION_ANNOTATED:
            note = {
                "note": payload["note"],
                "actor": payload.get("actor", ""),
                "at": event.at.astimezone(timezone.utc).isoformat(),
            }
            snap.annotations.setdefault(payload["conversation_id"], []).append(note)
            if payload.get("action_id"):
                snap.actions.setdefault(payload["action_id"], {
                    "payload_hash": payload.get("action_payload_hash", ""),
                    "conversation_id": payload["conversation_id"],
                    "seqs": [],
                })["seqs"].append(event.seq)
    return snap


# --- conversation persistence helper -------------------------------------------


def persist_conversation(log: EventLog, conversation: Conversation,
                         persona_seed: int) -> None:
    """Serialize a completed in-memory conversation into events.

    The platform route is message-driven on replay, so only the opener
    platform is recorded explicitly.
    """
    opened_at = conversation.opened_at or datetime.now(timezone.utc)
    log.append(EventKind.CONVERSATION_OPENED, {
        "conversation_id": conversation.conversation_id,
        "phone": conversation.scammer_phone,
        "platform": conversation.platform_route[0].value,
        "persona_seed": persona_seed,
        "persona_id": conversation.persona.persona_id if conversation.persona else "",
        "opened_at": opened_at.isoformat(),
        "scam_type_label": conversation.scam_type_label,
    }, at=opened_at)
    for message in conversation.messages:
        payload = {
            "conversation_id": conversation.conversation_id,
            "direction": message.direction.value,
            "platform": message.platform.value,
            "text": message.text,
            "sent_at": message.sent_at.isoformat(),
            "delivery_state": message.delivery_status.state,
        }
        if message.responder is not None:
            payload["responder"] = message.responder.value
        if message.delivery_status.failure_code is not None:
            payload["failure_code"] = message.delivery_status.failure_code.value
            payload["raw_code"] = message.delivery_status.raw_code
        log.append(EventKind.MESSAGE_RECORDED, payload, at=message.sent_at)
    for stage, at in conversation.stage_history:
        log.append(EventKind.STAGE_CHANGED, {
            "conversation_id": conversation.conversation_id,
            "stage": stage.value,
            "at": at.isoformat(),
        }, at=at)
    for ticket in conversation.escalations:
        log.append(EventKind.ESCALATION_OPENED, {
            "conversation_id": conversation.conversation_id,
            "ticket_id": ticket.ticket_id,
            "reason": ticket.reason,
            "draft": ticket.draft,
            "at": ticket.opened_at.isoformat(),
        }, at=ticket.opened_at)
        if ticket.resolved:
            log.append(EventKind.ESCALATION_RESOLVED, {
                "conversation_id": conversation.conversation_id,
                "ticket_id": ticket.ticket_id,
                "resolution": ticket.resolution or "resolved",
                "at": (ticket.resolved_at or ticket.opened_at).isoformat(),
            }, at=ticket.resolved_at or ticket.opened_at)
    for indicator in conversation.indicators:
        log.append(EventKind.INDICATOR_FOUND, {
            "conversation_id": conversation.conversation_id,
            "kind": indicator.kind.value,
            "value": indicator.value,
            "raw": indicator.raw,
            "message_index": indicator.source.message_index,
            "span": list(indicator.source.span),
            "first_seen": indicator.first_seen.isoformat(),
        }, at=indicator.first_seen)


# --- export / import ----------------------------------------------------------


def _redact_phone(phone: str) -> str:
    if len(phone) <= 6:
        return phone
    return phone[:2] + "*" * (len(phone) - 6) + phone[-4:]


def _redact_wallet(value: str) -> str:
    if len(value) <= 12:
        return value
    return value[:6] + "..." + value[-4:]


_WALLET_KIND_VALUES = {IndicatorKind.BTC_ADDRESS.value, IndicatorKind.ETH_ADDRESS.value}


def export_dataset(snapshot: Snapshot, out_dir: str | Path,
                   redact: bool = False) -> Path:
    """Write the canonical archive (manifest, CSVs, JSON-lines, reports/)."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "reports").mkdir(exist_ok=True)

    manifest = {"schema_version": SCHEMA_VERSION, "redacted": redact}
    (out / "manifest.json").write_text(
        json.dumps(manifest, sort_keys=True, separators=(",", ":")) + "\n", "utf-8")

    phone = (lambda p: _redact_phone(p)) if redact else (lambda p: p)
    wallet = (lambda w: _redact_wallet(w)) if redact else (lambda w: w)

    conv_buf = io.StringIO()
    writer = csv.writer(conv_buf, lineterminator="\n")
    writer.writerow([
        "conversation_id", "phone", "scam_type_label", "opened_at", "stage",
        "persona_seed", "stage_history", "escalations", "annotations",
    ])
    convs = sorted(snapshot.conversations.values(), key=lambda c: c.conversation_id)
    for conv in convs:
        writer.writerow([
            conv.conversation_id,
            phone(conv.scammer_phone),
            conv.scam_type_label,
            conv.opened_at.isoformat() if conv.opened_at else "",
            conv.stage.value,
            conv.persona.seed if conv.persona else 0,
            json.dumps([[s.value, at.isoformat()] for s, at in conv.stage_history],
                       sort_keys=True, separators=(",", ":")),
            json.dumps([
                {"ticket_id": t.ticket_id, "reason": t.reason, "draft": t.draft,
                 "opened_at": t.opened_at.isoformat(), "resolved": t.resolved,
                 "resolution": t.resolution,
                 "resolved_at": t.resolved_at.isoformat() if t.resolved_at else None}
                for t in conv.escalations
            ], sort_keys=True, separators=(",", ":")),
            json.dumps(snapshot.annotations.get(conv.conversation_id, []),
                       sort_keys=True, separators=(",", ":")),
        ])
    (out / "conversations.csv").write_text(conv_buf.getvalue(), "utf-8")

    msg_lines = []
    for conv in convs:
        for index, message in enumerate(conv.messages):
            doc = {
                "conversation_id": conv.conversation_id,
                "index": index,
                "direction": message.direction.value,
                "platform": message.platform.value,
                "text": message.text,
                "sent_at": message.sent_at.isoformat(),
                "responder": message.responder.value if message.responder else None,
                "delivery_state": message.delivery_status.state,
                "failure_code": (message.delivery_status.failure_code.value
                                 if message.delivery_status.failure_code else None),
                "raw_code": message.delivery_status.raw_code,
            }
            msg_lines.append(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    (out / "messages.jsonl").write_text(
        "\n".join(msg_lines) + ("\n" if msg_lines else ""), "utf-8")

    ind_buf = io.StringIO()
    writer = csv.writer(ind_buf, lineterminator="\n")
    writer.writerow(["conversation_id", "message_index", "kind", "value", "raw",
                     "span_start", "span_end", "first_seen"])
    indicators = sorted(
        snapshot.indicators,
        key=lambda i: (i.source.conversation_id, i.source.message_index,
                       i.source.span, i.kind.value, i.value),
    )
    for ind in indicators:
        value = wallet(ind.value) if ind.kind.value in _WALLET_KIND_VALUES else ind.value
        raw = wallet(ind.raw) if ind.kind.value in _WALLET_KIND_VALUES else ind.raw
        writer.writerow([
            ind.source.conversation_id, ind.source.message_index, ind.kind.value,
            value, raw, ind.source.span[0], ind.source.span[1],
            ind.first_seen.isoformat(),
        ])
    (out / "indicators.csv").write_text(ind_buf.getvalue(), "utf-8")

    ledger_lines = []
    for wallet_addr in sorted(snapshot.ledgers):
        for tx in sorted(snapshot.ledgers[wallet_addr],
                         key=lambda t: (t.get("timestamp", ""), t.get("txid", ""))):
            doc = dict(tx)
            doc["wallet"] = wallet(wallet_addr)
            ledger_lines.append(json.dumps(doc, sort_keys=True, separators=(",", ":")))
    (out / "ledgers.jsonl").write_text(
        "\n".join(ledger_lines) + ("\n" if ledger_lines else ""), "utf-8")

    for name in sorted(snapshot.reports):
        (out / "reports" / f"{name}.json").write_text(
            json.dumps(snapshot.reports[name], sort_keys=True,
                       separators=(",", ":")) + "\n", "utf-8")
    return out


def import_dataset(archive_dir: str | Path, log_path: str | Path) -> EventLog:
    """Rebuild an event log from an export archive."""
    archive = Path(archive_dir)
    manifest = json.loads((archive / "manifest.json").read_text("utf-8"))
    version = manifest.get("schema_version")
    if not isinstance(version, int) or version > SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"archive schema {version!r}")

    log = EventLog(log_path, create=True)

    conversations: dict[str, dict] = {}
    with open(archive / "conversations.csv", newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            conversations[row["conversation_id"]] = row

    messages: dict[str, list[dict]] = {}
    msg_path = archive / "messages.jsonl"
    if msg_path.exists():
        for line in msg_path.read_text("utf-8").splitlines():
            doc = json.loads(line)
            messages.setdefault(doc["conversation_id"], []).append(doc)

    indicators: dict[str, list[dict]] = {}
    ind_path = archive / "indicators.csv"
    if ind_path.exists():
        with open(ind_path, newline="", encoding="utf-8") as handle:
            for row in csv.DictReader(handle):
                indicators.setdefault(row["conversation_id"], []).append(row)

    for cid in sorted(conversations):
        row = conversations[cid]
        opened_at = _parse_when(row["opened_at"])
        conv_messages = sorted(messages.get(cid, []), key=lambda m: m["index"])
        opener_platform = conv_messages[0]["platform"] if conv_messages else "sms"
        log.append(EventKind.CONVERSATION_OPENED, {
            "conversation_id": cid,
            "phone": row["phone"],
            "platform": opener_platform,
            "persona_seed": int(row["persona_seed"]),
            "opened_at": row["opened_at"],
            "scam_type_label": row["scam_type_label"],
        }, at=opened_at)
        for doc in conv_messages:
            payload = {
                "conversation_id": cid,
                "direction": doc["direction"],
                "platform": doc["platform"],
                "text": doc["text"],
                "sent_at": doc["sent_at"],
                "delivery_state": doc["delivery_state"],
            }
            if doc.get("responder"):
                payload["responder"] = doc["responder"]
            if doc.get("failure_code"):
                payload["failure_code"] = doc["failure_code"]
                payload["raw_code"] = doc.get("raw_code")
            log.append(EventKind.MESSAGE_RECORDED, payload, at=_parse_when(doc["sent_at"]))
        for stage_value, at_iso in json.loads(row["stage_history"]):
            log.append(EventKind.STAGE_CHANGED, {
                "conversation_id": cid,
                "stage": stage_value,
                "at": at_iso,
            }, at=_parse_when(at_iso))
        for ticket in json.loads(row["escalations"]):
            log.append(EventKind.ESCALATION_OPENED, {
                "conversation_id": cid,
                "ticket_id": ticket["ticket_id"],
                "reason": ticket["reason"],
                "draft": ticket.get("draft"),
                "at": ticket["opened_at"],
            }, at=_parse_when(ticket["opened_at"]))
            if ticket.get("resolved"):
                resolved_at = ticket.get("resolved_at") or ticket["opened_at"]
                log.append(EventKind.ESCALATION_RESOLVED, {
                    "conversation_id": cid,
                    "ticket_id": ticket["ticket_id"],
                    "resolution": ticket.get("resolution") or "resolved",
                    "at": resolved_at,
                }, at=_parse_when(resolved_at))
        for note in json.loads(row["annotations"]):
            log.append(EventKind.CONVERSATION_ANNOTATED, {
                "conversation_id": cid,
                "note": note["note"],
                "actor": note.get("actor", ""),
            }, at=_parse_when(note["at"]))
        for ind in indicators.get(cid, []):
            log.append(EventKind.INDICATOR_FOUND, {
                "conversation_id": cid,
                "kind": ind["kind"],
                "value": ind["value"],
                "raw": ind["raw"],
                "message_index": int(ind["message_index"]),
                "span": [int(ind["span_start"]), int(ind["span_end"])],
                "first_seen": ind["first_seen"],
            }, at=_parse_when(ind["first_seen"]))

    ledger_path = archive / "ledgers.jsonl"
    if ledger_path.exists():
        by_wallet: dict[str, list[dict]] = {}
        for line in ledger_path.read_text("utf-8").splitlines():
            doc = json.loads(line)
            by_wallet.setdefault(doc["wallet"], []).append(doc)
        for wallet_addr in sorted(by_wallet):
            log.append(EventKind.LEDGER_FETCHED, {
                "wallet": wallet_addr,
                "txs": by_wallet[wallet_addr],
            })

    reports_dir = archive / "reports"
    if reports_dir.exists():
        for report_file in sorted(reports_dir.glob("*.json")):
            log.append(EventKind.REPORT_GENERATED, {
                "name": report_file.stem,
                "payload": json.loads(report_file.read_text("utf-8")),
            })
    return log
