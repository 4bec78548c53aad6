"""Staged scammer engagement: state machine, responders, simulation harness."""

from anansi.engagement.engine import (
    EngagementEngine,
    EngineConfig,
    FailingTransport,
    GHOSTING_THRESHOLD,
    InMemoryTransport,
    detect_ghosting,
    execute_handoff,
    load_opener_templates,
    plan_handoff,
)
from anansi.engagement.harness import (
    ScammerScript,
    ScriptTurn,
    SimulationRun,
    load_scenario,
    load_scenarios,
    run_scripted_scammer,
    scenario_base_time,
    script_from_dict,
)
from anansi.engagement.model import (
    ACTIVE_STAGES,
    Conversation,
    ConversationClosed,
    DeliveryStatus,
    DuplicateConversation,
    EngagementAction,
    EngagementError,
    EscalationTicket,
    FailureCode,
    HandoffPlan,
    InvalidMessage,
    MessageDirection,
    MessageRecord,
    ResponderKind,
    ScriptStalled,
    Stage,
    TERMINAL_STAGES,
    UnsupportedPlatform,
    Workaround,
    can_transition,
    map_failure_code,
    stage_index,
)
from anansi.engagement.responders import (
    DraftReply,
    ExternalModelResponder,
    ReplyContext,
    Responder,
    RuleEngineResponder,
    TemplateResponder,
)
from anansi.engagement.rules import classify_task

__all__ = [
    "ACTIVE_STAGES", "Conversation", "ConversationClosed", "DeliveryStatus",
    "DraftReply", "DuplicateConversation", "EngagementAction", "EngagementEngine",
    "EngagementError", "EngineConfig", "EscalationTicket", "ExternalModelResponder",
    "FailingTransport", "FailureCode", "GHOSTING_THRESHOLD", "HandoffPlan",
    "InMemoryTransport", "InvalidMessage", "MessageDirection", "MessageRecord",
    "ReplyContext", "Responder", "ResponderKind", "RuleEngineResponder",
    "ScammerScript", "ScriptStalled", "ScriptTurn", "SimulationRun", "Stage",
    "TERMINAL_STAGES", "TemplateResponder", "UnsupportedPlatform", "Workaround",
    "can_transition", "classify_task", "detect_ghosting", "execute_handoff",
    "load_opener_templates", "load_scenario", "load_scenarios", "map_failure_code",
    "plan_handoff", "run_scripted_scammer", "scenario_base_time", "script_from_dict",
    "stage_index",
]
