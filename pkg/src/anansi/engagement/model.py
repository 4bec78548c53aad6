"""Conversation state for staged scammer engagements."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from datetime import datetime

from anansi.extract import Indicator
from anansi.ingest import Platform
from anansi.persona import PersonaBinding, VictimPersona


class EngagementError(Exception):
    pass


class DuplicateConversation(EngagementError):
    pass


class InvalidMessage(EngagementError):
    pass


class ConversationClosed(EngagementError):
    pass


class UnsupportedPlatform(EngagementError):
    pass


class ScriptStalled(EngagementError):
    pass


class Stage(str, enum.Enum):
    UNOPENED = "unopened"
    INITIAL_CONTACT = "initial_contact"
    TRUST_BUILDING = "trust_building"
    PLATFORM_HANDOFF = "platform_handoff"
    REGISTRATION_TASKS = "registration_tasks"
    PAYMENT_EXTRACTION = "payment_extraction"
    GHOSTED = "ghosted"
    CLOSED = "closed"


_ORDER = {
    Stage.UNOPENED: 0,
    Stage.INITIAL_CONTACT: 1,
    Stage.TRUST_BUILDING: 2,
    Stage.PLATFORM_HANDOFF: 3,
    Stage.REGISTRATION_TASKS: 4,
    Stage.PAYMENT_EXTRACTION: 5,
}

ACTIVE_STAGES = (
    Stage.INITIAL_CONTACT, Stage.TRUST_BUILDING, Stage.PLATFORM_HANDOFF,
    Stage.REGISTRATION_TASKS, Stage.PAYMENT_EXTRACTION,
)

TERMINAL_STAGES = (Stage.GHOSTED, Stage.CLOSED)


def stage_index(stage: Stage) -> int:
    return _ORDER.get(stage, 99)


def can_transition(current: Stage, target: Stage) -> bool:
    """Forward-only among active stages; terminals reachable from any
    non-terminal stage; terminals never leave."""
    if current in TERMINAL_STAGES:
        return False
    if target in TERMINAL_STAGES:
        return True
    return stage_index(target) >= stage_index(current)


class MessageDirection(str, enum.Enum):
    INBOUND = "inbound"
    OUTBOUND = "outbound"


class ResponderKind(str, enum.Enum):
    TEMPLATE = "template"
    RULE_ENGINE = "rule_engine"
    LLM = "llm"
    OPERATOR = "operator"


class FailureCode(str, enum.Enum):
    POWERED_OFF = "powered_off"
    LANDLINE = "landline"
    WHATSAPP_RESTRICTION = "whatsapp_restriction"
    OTHER = "other"


# Carrier/platform error-code buckets; extend via config, unknown codes
# fall into OTHER.
DEFAULT_FAILURE_TAXONOMY = {
    "30003": FailureCode.POWERED_OFF,
    "30005": FailureCode.LANDLINE,
    "30006": FailureCode.LANDLINE,
    "63016": FailureCode.WHATSAPP_RESTRICTION,
    "63024": FailureCode.WHATSAPP_RESTRICTION,
    "63049": FailureCode.WHATSAPP_RESTRICTION,
}


def map_failure_code(code: str | None,
                     taxonomy: dict[str, FailureCode] | None = None) -> FailureCode:
    table = taxonomy or DEFAULT_FAILURE_TAXONOMY
    if code is None:
        return FailureCode.OTHER
    return table.get(str(code), FailureCode.OTHER)


@dataclass(frozen=True)
class DeliveryStatus:
    state: str                       # delivered | failed | pending
    failure_code: FailureCode | None = None
    raw_code: str | None = None

    def __post_init__(self):
        if self.state == "failed" and self.failure_code is None:
            raise ValueError("failed delivery requires a failure code")

    @classmethod
    def delivered(cls) -> "DeliveryStatus":
        return cls("delivered")

    @classmethod
    def pending(cls) -> "DeliveryStatus":
        return cls("pending")

    @classmethod
    def failed(cls, raw_code: str,
               taxonomy: dict[str, FailureCode] | None = None) -> "DeliveryStatus":
        return cls("failed", map_failure_code(raw_code, taxonomy), str(raw_code))


@dataclass
class MessageRecord:
    direction: MessageDirection
    platform: Platform
    text: str
    sent_at: datetime
    responder: ResponderKind | None = None        # None for inbound
    delivery_status: DeliveryStatus = field(default_factory=DeliveryStatus.delivered)


class Workaround(str, enum.Enum):
    NONE = "none"
    REQUEST_TRAINER_INITIATES = "request_trainer_initiates"
    REQUEST_TELEGRAM_ALTERNATIVE = "request_telegram_alternative"


@dataclass(frozen=True)
class HandoffPlan:
    target_platform: Platform
    target_handle: str
    workaround: Workaround

    def __post_init__(self):
        if self.target_platform == Platform.WHATSAPP and self.workaround == Workaround.NONE:
            raise ValueError("whatsapp handoffs require a workaround")


@dataclass
class EscalationTicket:
    ticket_id: str
    reason: str
    draft: str | None
    opened_at: datetime
    resolved: bool = False
    resolution: str | None = None
    resolved_at: datetime | None = None


@dataclass
class EngagementAction:
    response_draft: str | None
    next_stage: Stage
    escalation: str | None = None
    handoff_plan: HandoffPlan | None = None
    indicators_found: list[Indicator] = field(default_factory=list)
    auto_sent: bool = False

    def __post_init__(self):
        if self.escalation is not None and self.auto_sent:
            raise ValueError("escalated drafts are withheld from auto-send")


@dataclass
class Conversation:
    conversation_id: str
    scammer_phone: str
    platform_route: list[Platform]
    stage: Stage
    messages: list[MessageRecord] = field(default_factory=list)
    persona: VictimPersona | None = None
    persona_binding: PersonaBinding | None = None
    escalations: list[EscalationTicket] = field(default_factory=list)
    indicators: list[Indicator] = field(default_factory=list)
    stage_history: list[tuple[Stage, datetime]] = field(default_factory=list)
    opened_at: datetime | None = None
    last_user_msg_at: datetime | None = None
    last_scammer_msg_at: datetime | None = None
    persistence_days: float | None = None
    pending_handoff: HandoffPlan | None = None
    scam_type_label: str = "Employment"

    @property
    def is_terminal(self) -> bool:
        return self.stage in TERMINAL_STAGES

    def open_escalation(self) -> EscalationTicket | None:
        for ticket in self.escalations:
            if not ticket.resolved:
                return ticket
        return None

    def record_message(self, message: MessageRecord) -> int:
        if self.messages and message.sent_at < self.messages[-1].sent_at:
            raise InvalidMessage("messages must be appended in timestamp order")
        self.messages.append(message)
        index = len(self.messages) - 1
        if message.direction == MessageDirection.OUTBOUND:
            self.last_user_msg_at = message.sent_at
        else:
            self.last_scammer_msg_at = message.sent_at
        if message.platform != Platform.UNKNOWN and (
                not self.platform_route or self.platform_route[-1] != message.platform):
            self.platform_route.append(message.platform)
        return index

    def set_stage(self, target: Stage, at: datetime) -> bool:
        if target == self.stage:
            return False
        if not can_transition(self.stage, target):
            raise ConversationClosed(
                f"cannot move {self.stage.value} -> {target.value}")
        self.stage = target
        self.stage_history.append((target, at))
        return True

    def add_indicators(self, found: list[Indicator]) -> list[Indicator]:
        known = {(i.kind, i.value) for i in self.indicators}
        fresh = [i for i in found if (i.kind, i.value) not in known]
        self.indicators.extend(fresh)
        return fresh

    def max_stage_reached(self) -> Stage:
        reached = Stage.UNOPENED
        for stage, _ in self.stage_history:
            if stage in _ORDER and stage_index(stage) > stage_index(reached):
                reached = stage
        return reached

    def delivery_failure(self) -> FailureCode | None:
        """Failure bucket of the opener, when it never went through."""
        for message in self.messages:
            if message.direction == MessageDirection.OUTBOUND:
                if message.delivery_status.state == "failed":
                    return message.delivery_status.failure_code
                return None
        return None

    def has_scammer_reply(self) -> bool:
        return any(m.direction == MessageDirection.INBOUND for m in self.messages)

    def outcome(self) -> str:
        failure = self.delivery_failure()
        if failure is not None:
            return f"no_delivery:{failure.value}"
        if not self.has_scammer_reply():
            return "no_response"
        if self.stage == Stage.GHOSTED:
            return "ghosted"
        if self.stage == Stage.CLOSED:
            return "completed"
        return "in_progress"
