"""Conversation engine: opening, advancing, handoffs, ghosting.

One engine instance owns the open-conversation registry and the persona
binding table. Each advance is deterministic given (conversation state,
inbound text, persona, responder config); all randomness lives in the
persona seed.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from importlib import resources
from typing import Protocol

from anansi.engagement.model import (
    Conversation,
    ConversationClosed,
    DeliveryStatus,
    DuplicateConversation,
    EngagementAction,
    EscalationTicket,
    HandoffPlan,
    InvalidMessage,
    MessageDirection,
    MessageRecord,
    ResponderKind,
    Stage,
    UnsupportedPlatform,
    Workaround,
    stage_index,
)
from anansi.engagement.responders import (
    DraftReply,
    ReplyContext,
    Responder,
    RuleEngineResponder,
)
from anansi.engagement.rules import (
    HANDOFF_PLATFORM_RE,
    SuspicionRule,
    question_keys,
    stage_cues,
    suspicion_hits,
)
from anansi.extract import (
    WALLET_KINDS,
    Indicator,
    IndicatorKind,
    Lexicons,
    extract_indicators,
)
from anansi.ingest import Platform, ScamReport
from anansi.persona import PersonaBindings, generate_persona

MAX_MESSAGE_CHARS = 10_000

GHOSTING_THRESHOLD = timedelta(days=30)


def load_opener_templates() -> dict[str, str]:
    text = resources.files("anansi").joinpath("data", "openers.json").read_text("utf-8")
    return json.loads(text)


class Transport(Protocol):
    def send(self, address: str, platform: Platform, text: str) -> DeliveryStatus: ...


class InMemoryTransport:
    """Always delivers; keeps a log so tests can assert on traffic, and
    fans inbound messages out to registered receive callbacks."""

    def __init__(self) -> None:
        self.sent: list[tuple[str, Platform, str]] = []
        self._receivers: list = []

    def send(self, address: str, platform: Platform, text: str) -> DeliveryStatus:
        self.sent.append((address, platform, text))
        return DeliveryStatus.delivered()

    def on_receive(self, callback) -> None:
        self._receivers.append(callback)

    def deliver_inbound(self, message: MessageRecord) -> None:
        for callback in self._receivers:
            callback(message)


class FailingTransport:
    """Fails every send with a fixed carrier error code."""

    def __init__(self, raw_code: str):
        self.raw_code = raw_code

    def send(self, address: str, platform: Platform, text: str) -> DeliveryStatus:
        return DeliveryStatus.failed(self.raw_code)


@dataclass
class EngineConfig:
    confidence_threshold: float = 0.5
    suspicion_rules: list[SuspicionRule] | None = None
    ghosting_threshold: timedelta = GHOSTING_THRESHOLD
    lexicons: Lexicons | None = None


class EngagementEngine:
    def __init__(
        self,
        responder: Responder | None = None,
        transport: Transport | None = None,
        config: EngineConfig | None = None,
        templates: dict[str, str] | None = None,
        bindings: PersonaBindings | None = None,
    ):
        self.responder = responder or RuleEngineResponder()
        self.transport = transport or InMemoryTransport()
        self.config = config or EngineConfig()
        self.templates = templates or load_opener_templates()
        self.bindings = bindings or PersonaBindings()
        self._open_phones: dict[str, str] = {}

    # -- opening ---------------------------------------------------------

    def open_conversation(
        self,
        report: ScamReport,
        opener_template_id: str = "default",
        persona_seed: int | None = None,
        now: datetime | None = None,
    ) -> Conversation:
        if report.phone in self._open_phones:
            raise DuplicateConversation(report.phone)
        template = self.templates.get(opener_template_id)
        if template is None:
            raise KeyError(f"unknown opener template {opener_template_id!r}")
        now = now or datetime.now(timezone.utc)
        if persona_seed is None:
            persona_seed = int.from_bytes(
                hashlib.sha256(report.phone.encode()).digest()[:8], "big")
        persona = generate_persona(persona_seed)

        conversation_id = "c-" + hashlib.sha256(
            f"{report.phone}|{report.report_id}".encode()).hexdigest()[:12]
        platform = (report.platform_hint if report.platform_hint != Platform.UNKNOWN
                    else Platform.SMS)
        brand = self._first_brand(report.message_text) or "your company"
        opener = template.replace("{name}", persona.name).replace("{brand}", brand)

        conversation = Conversation(
            conversation_id=conversation_id,
            scammer_phone=report.phone,
            platform_route=[platform],
            stage=Stage.UNOPENED,
            opened_at=now,
            scam_type_label=report.scam_type_label,
        )
        conversation.persona = persona
        conversation.persona_binding = self.bindings.bind(
            conversation_id, persona.persona_id, at=now)
        status = self.transport.send(report.phone, platform, opener)
        conversation.record_message(MessageRecord(
            direction=MessageDirection.OUTBOUND,
            platform=platform,
            text=opener,
            sent_at=now,
            responder=ResponderKind.TEMPLATE,
            delivery_status=status,
        ))
        self._open_phones[report.phone] = conversation_id
        return conversation

    def _first_brand(self, text: str) -> str | None:
        found = extract_indicators(text, self.config.lexicons)
        for ind in found:
            if ind.kind == IndicatorKind.BRAND:
                return ind.value
        return None

    def release(self, conversation: Conversation) -> None:
        """Drop the phone from the open registry (terminal conversations)."""
        self._open_phones.pop(conversation.scammer_phone, None)

    # -- advancing ---------------------------------------------------------

    def advance(
        self,
        conversation: Conversation,
        inbound: MessageRecord,
        now: datetime | None = None,
    ) -> EngagementAction:
        if conversation.is_terminal:
            raise ConversationClosed(conversation.conversation_id)
        if inbound.direction != MessageDirection.INBOUND:
            raise InvalidMessage("advance consumes inbound messages")
        if not inbound.text.strip():
            raise InvalidMessage("empty message")
        if len(inbound.text) > MAX_MESSAGE_CHARS:
            raise InvalidMessage("oversized message")
        now = now or inbound.sent_at

        index = conversation.record_message(inbound)
        found = extract_indicators(
            inbound.text,
            self.config.lexicons,
            conversation_id=conversation.conversation_id,
            message_index=index,
            first_seen=inbound.sent_at,
        )
        fresh = conversation.add_indicators(found)

        stage_before = conversation.stage
        cues = stage_cues(inbound.text)
        if question_keys(inbound.text):
            # probing the victim's background is what trust building is
            cues.add(Stage.TRUST_BUILDING)
        if any(ind.kind in WALLET_KINDS for ind in found):
            cues.add(Stage.PAYMENT_EXTRACTION)
        if Stage.PAYMENT_EXTRACTION in cues:
            candidate = Stage.PAYMENT_EXTRACTION
        elif (Stage.PLATFORM_HANDOFF in cues
              and stage_index(stage_before) < stage_index(Stage.PLATFORM_HANDOFF)):
            # a message can bundle the handoff with registration details;
            # migration is the immediate ask, tasks come after
            candidate = Stage.PLATFORM_HANDOFF
        elif cues:
            candidate = max(cues, key=stage_index)
        else:
            candidate = Stage.INITIAL_CONTACT
        if stage_index(candidate) < stage_index(stage_before):
            candidate = stage_before
        next_stage = candidate

        handoff = None
        if Stage.PLATFORM_HANDOFF in cues:
            handoff = self._handoff_from_text(conversation, inbound.text, found)

        conversation.set_stage(next_stage, now)
        if handoff is not None:
            conversation.pending_handoff = handoff

        ctx = ReplyContext(
            conversation=conversation,
            inbound_text=inbound.text,
            stage_before=stage_before,
            stage_after=next_stage,
            handoff_plan=handoff,
            new_indicators=fresh,
        )
        reply = self.responder.draft(ctx)

        reasons = suspicion_hits(inbound.text, next_stage, self.config.suspicion_rules)
        if reply.confidence < self.config.confidence_threshold:
            reasons.append("low_confidence")

        if conversation.open_escalation() is not None:
            # gate: nothing auto-sends while an operator decision is pending
            return EngagementAction(
                response_draft=None,
                next_stage=next_stage,
                escalation="pending_escalation",
                handoff_plan=handoff,
                indicators_found=fresh,
            )

        if reasons:
            reason = ";".join(reasons)
            ticket = EscalationTicket(
                ticket_id=f"e-{conversation.conversation_id}-{len(conversation.escalations)}",
                reason=reason,
                draft=reply.text,
                opened_at=now,
            )
            conversation.escalations.append(ticket)
            return EngagementAction(
                response_draft=reply.text,
                next_stage=next_stage,
                escalation=reason,
                handoff_plan=handoff,
                indicators_found=fresh,
            )

        self.send_reply(conversation, reply, now)
        return EngagementAction(
            response_draft=reply.text,
            next_stage=next_stage,
            handoff_plan=handoff,
            indicators_found=fresh,
            auto_sent=True,
        )

    def send_reply(self, conversation: Conversation, reply: DraftReply,
                   at: datetime) -> MessageRecord:
        platform = conversation.platform_route[-1]
        status = self.transport.send(conversation.scammer_phone, platform, reply.text)
        record = MessageRecord(
            direction=MessageDirection.OUTBOUND,
            platform=platform,
            text=reply.text,
            sent_at=at,
            responder=reply.responder,
            delivery_status=status,
        )
        conversation.record_message(record)
        return record

    def _handoff_from_text(
        self,
        conversation: Conversation,
        text: str,
        found: list[Indicator],
    ) -> HandoffPlan | None:
        match = HANDOFF_PLATFORM_RE.search(text)
        if not match:
            return None
        platform = Platform(match.group(1).lower())
        handle = ""
        for ind in found:
            if ind.kind == IndicatorKind.TELEGRAM_HANDLE:
                handle = ind.value
                break
        else:
            for ind in found:
                if ind.kind == IndicatorKind.PHONE and ind.value != conversation.scammer_phone:
                    handle = ind.value
                    break
        return plan_handoff(conversation, platform, handle)


def plan_handoff(conversation: Conversation, target_platform: Platform | str,
                 target_handle: str) -> HandoffPlan:
    """Build the migration plan; WhatsApp targets always get a workaround
    because a business number cannot message a stranger first."""
    if isinstance(target_platform, str):
        try:
            target_platform = Platform(target_platform.lower())
        except ValueError:
            raise UnsupportedPlatform(target_platform) from None
    if target_platform == Platform.TELEGRAM:
        return HandoffPlan(Platform.TELEGRAM, target_handle, Workaround.NONE)
    if target_platform == Platform.WHATSAPP:
        return HandoffPlan(Platform.WHATSAPP, target_handle,
                           Workaround.REQUEST_TRAINER_INITIATES)
    raise UnsupportedPlatform(str(target_platform))


def execute_handoff(conversation: Conversation, plan: HandoffPlan,
                    at: datetime) -> None:
    """Extend the platform route once the migration actually happens."""
    if not conversation.platform_route or conversation.platform_route[-1] != plan.target_platform:
        conversation.platform_route.append(plan.target_platform)
    conversation.pending_handoff = None


def detect_ghosting(
    conversation: Conversation,
    now: datetime,
    threshold: timedelta = GHOSTING_THRESHOLD,
) -> Stage | None:
    """Transition to ghosted when the scammer has been silent past the
    threshold; idempotent on already-terminal conversations."""
    if conversation.is_terminal:
        return None
    if conversation.last_scammer_msg_at is None:
        return None
    if now - conversation.last_scammer_msg_at <= threshold:
        return None
    conversation.set_stage(Stage.GHOSTED, now)
    if (conversation.last_user_msg_at is not None
            and conversation.last_scammer_msg_at >= conversation.last_user_msg_at):
        delta = conversation.last_scammer_msg_at - conversation.last_user_msg_at
        conversation.persistence_days = delta.total_seconds() / 86_400.0
    return Stage.GHOSTED
