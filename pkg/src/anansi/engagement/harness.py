"""Closed-loop simulation against scripted scammers.

A ScammerScript is an ordered list of (trigger, reply) turns: the next
turn fires when its trigger matches our latest outbound message. This
stands in for a live scammer so the whole pipeline can run end to end,
deterministically, with known embedded payloads.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from anansi.engagement.engine import (
    EngagementEngine,
    FailingTransport,
    execute_handoff,
)
from anansi.engagement.model import (
    Conversation,
    MessageDirection,
    MessageRecord,
    ResponderKind,
    ScriptStalled,
    Stage,
    Workaround,
)
from anansi.extract import WALLET_KINDS
from anansi.ingest import Platform, ReportSource, ScamReport


@dataclass(frozen=True)
class ScriptTurn:
    trigger: str                    # regex against our last outbound, or "*"
    reply: str
    stage: Stage | None = None      # expected stage after this turn
    platform: Platform | None = None

    def matches(self, outbound_text: str) -> bool:
        if self.trigger == "*":
            return True
        return re.search(self.trigger, outbound_text, re.IGNORECASE) is not None


@dataclass
class ScammerScript:
    scenario_id: str
    phone: str
    bait_text: str
    turns: list[ScriptTurn] = field(default_factory=list)
    payloads: dict[str, list[str]] = field(default_factory=dict)
    opener_template_id: str = "default"
    behavior: str = "scripted"       # scripted | no_response | delivery_failure
    failure_code: str | None = None
    scam_type: str = "Employment"
    platform: Platform = Platform.SMS

    def wallet_payloads(self) -> list[str]:
        return list(self.payloads.get("wallets", []))

    def scripted_stages(self) -> list[Stage]:
        return [t.stage for t in self.turns if t.stage is not None]

    def payment_turns_carry_wallets(self) -> bool:
        """Fixture invariant: a script that reaches payment extraction must
        embed at least one wallet payload, and the final payment-labeled
        turn must actually emit one of them."""
        payment_turns = [t for t in self.turns if t.stage == Stage.PAYMENT_EXTRACTION]
        if not payment_turns:
            return True
        wallets = self.wallet_payloads()
        if not wallets:
            return False
        final = payment_turns[-1]
        return any(w.lower() in final.reply.lower() for w in wallets)


def load_scenario(path: str | Path) -> ScammerScript:
    doc = json.loads(Path(path).read_text("utf-8"))
    return script_from_dict(doc)


def script_from_dict(doc: dict) -> ScammerScript:
    turns = [
        ScriptTurn(
            trigger=t["trigger"],
            reply=t["reply"],
            stage=Stage(t["stage"]) if t.get("stage") else None,
            platform=Platform(t["platform"]) if t.get("platform") else None,
        )
        for t in doc.get("turns", [])
    ]
    return ScammerScript(
        scenario_id=doc["scenario_id"],
        phone=doc["phone"],
        bait_text=doc.get("bait_text", ""),
        turns=turns,
        payloads=doc.get("payloads", {}),
        opener_template_id=doc.get("opener_template_id", "default"),
        behavior=doc.get("behavior", "scripted"),
        failure_code=doc.get("failure_code"),
        scam_type=doc.get("scam_type", "Employment"),
        platform=Platform(doc.get("platform", "sms")),
    )


def load_scenarios(directory: str | Path) -> list[ScammerScript]:
    return [load_scenario(p) for p in sorted(Path(directory).glob("*.json"))]


@dataclass
class SimulationRun:
    script: ScammerScript
    conversation: Conversation
    stage_trace: list[tuple[Stage, Stage]]      # (scripted label, actual)
    escalated: bool = False

    def stage_trace_ok(self) -> bool:
        return all(expected == actual for expected, actual in self.stage_trace)

    def captured_wallets(self) -> set[str]:
        return {
            ind.value for ind in self.conversation.indicators
            if ind.kind in WALLET_KINDS
        }

    def wallets_complete(self) -> bool:
        return set(self.script.wallet_payloads()) <= self.captured_wallets()


def _script_report(script: ScammerScript, base_time: datetime) -> ScamReport:
    return ScamReport(
        report_id="sr-" + hashlib.sha256(script.scenario_id.encode()).hexdigest()[:12],
        source=ReportSource.PORTAL,
        phone=script.phone,
        message_text=script.bait_text or "(no bait text)",
        platform_hint=script.platform,
        reported_at=base_time - timedelta(hours=1),
        scam_type_label=script.scam_type,
    )


def scenario_base_time(scenario_id: str) -> datetime:
    offset = int.from_bytes(hashlib.sha256(scenario_id.encode()).digest()[:4], "big")
    return datetime(2025, 7, 1, tzinfo=timezone.utc) + timedelta(
        minutes=offset % (60 * 24 * 120))


def run_scripted_scammer(
    script: ScammerScript,
    engine: EngagementEngine | None = None,
    persona_seed: int | None = None,
    base_time: datetime | None = None,
    auto_resolve_escalations: bool = False,
    step: timedelta = timedelta(minutes=5),
) -> SimulationRun:
    """Drive one scripted scammer through the engine until its turns run out.

    Every outbound draft is auto-approved unless escalated; an escalation
    (with auto_resolve off) halts the run and leaves the ticket open.
    Raises ScriptStalled when the next turn's trigger cannot match our
    latest outbound message.
    """
    if script.behavior == "scripted" and not script.turns:
        raise ScriptStalled(f"{script.scenario_id}: empty script")

    engine = engine or EngagementEngine()
    clock = base_time or scenario_base_time(script.scenario_id)
    if persona_seed is None:
        persona_seed = int.from_bytes(
            hashlib.sha256(script.scenario_id.encode()).digest()[8:16], "big")

    if script.behavior == "delivery_failure":
        failing = EngagementEngine(
            responder=engine.responder,
            transport=FailingTransport(script.failure_code or "0"),
            config=engine.config,
            templates=engine.templates,
        )
        conversation = failing.open_conversation(
            _script_report(script, clock), script.opener_template_id,
            persona_seed, now=clock)
        return SimulationRun(script, conversation, [])

    conversation = engine.open_conversation(
        _script_report(script, clock), script.opener_template_id,
        persona_seed, now=clock)

    if script.behavior == "no_response":
        return SimulationRun(script, conversation, [])

    trace: list[tuple[Stage, Stage]] = []
    escalated = False
    for turn_no, turn in enumerate(script.turns):
        last_out = next(
            (m.text for m in reversed(conversation.messages)
             if m.direction == MessageDirection.OUTBOUND),
            "",
        )
        if not turn.matches(last_out):
            raise ScriptStalled(
                f"{script.scenario_id}: turn {turn_no} trigger {turn.trigger!r} "
                f"does not match {last_out!r}")
        clock += step
        inbound = MessageRecord(
            direction=MessageDirection.INBOUND,
            platform=turn.platform or conversation.platform_route[-1],
            text=turn.reply,
            sent_at=clock,
        )
        action = engine.advance(conversation, inbound, now=clock)
        if (action.handoff_plan is not None
                and action.handoff_plan.workaround == Workaround.NONE):
            # no negotiation needed: migrate right away. WhatsApp handoffs
            # extend the route only when the trainer's first message arrives.
            execute_handoff(conversation, action.handoff_plan, clock)
        if turn.stage is not None:
            trace.append((turn.stage, conversation.stage))
        if action.escalation:
            if auto_resolve_escalations:
                ticket = conversation.open_escalation()
                if ticket is not None:
                    ticket.resolved = True
                    ticket.resolution = "approved"
                    ticket.resolved_at = clock
                    if ticket.draft:
                        clock += step
                        engine.send_reply(conversation, _operator_reply(ticket.draft), clock)
            else:
                escalated = True
                break

    if not escalated:
        clock += step
        conversation.set_stage(Stage.CLOSED, clock)
        engine.release(conversation)
    return SimulationRun(script, conversation, trace, escalated=escalated)


def _operator_reply(text: str):
    from anansi.engagement.responders import DraftReply
    return DraftReply(text, 1.0, ResponderKind.OPERATOR)
