"""Reply generation behind a small responder interface.

Three implementations: a static template dictionary, the deterministic
rule engine (default: offline, reproducible), and an adapter for an
external text-generation service. The engine only ever consumes
(draft, confidence) pairs, so implementations are interchangeable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol

from anansi.engagement.model import (
    Conversation,
    HandoffPlan,
    ResponderKind,
    Stage,
    Workaround,
)
from anansi.engagement.rules import CONTINUE_VOCAB_RE, question_keys
from anansi.extract import WALLET_KINDS, Indicator
from anansi.persona import persona_answer


@dataclass(frozen=True)
class DraftReply:
    text: str
    confidence: float
    responder: ResponderKind


@dataclass(frozen=True)
class ReplyContext:
    conversation: Conversation
    inbound_text: str
    stage_before: Stage
    stage_after: Stage
    handoff_plan: HandoffPlan | None
    new_indicators: list[Indicator]


class Responder(Protocol):
    def draft(self, ctx: ReplyContext) -> DraftReply: ...


class TemplateResponder:
    """Fixed text per stage; the simplest thing that keeps a scammer typing."""

    def __init__(self, by_stage: dict[Stage, str]):
        self.by_stage = by_stage

    def draft(self, ctx: ReplyContext) -> DraftReply:
        text = self.by_stage.get(ctx.stage_after)
        if text is None:
            return DraftReply("Okay.", 0.4, ResponderKind.TEMPLATE)
        return DraftReply(text, 0.9, ResponderKind.TEMPLATE)


class RuleEngineResponder:
    """Deterministic drafts from conversation state and inbound cues."""

    def draft(self, ctx: ReplyContext) -> DraftReply:
        persona = ctx.conversation.persona
        kind = ResponderKind.RULE_ENGINE

        keys = question_keys(ctx.inbound_text)
        if keys and persona is not None:
            answer = " ".join(persona_answer(persona, key) for key in keys)
            return DraftReply(answer, 0.95, kind)

        if ctx.handoff_plan is not None:
            plan = ctx.handoff_plan
            if plan.workaround == Workaround.REQUEST_TRAINER_INITIATES:
                text = ("I tried, but my WhatsApp can't start chats with new numbers. "
                        "Could your trainer message me first, or is there a Telegram "
                        "alternative?")
            elif plan.workaround == Workaround.REQUEST_TELEGRAM_ALTERNATIVE:
                text = ("My WhatsApp is restricted right now - do you have a Telegram "
                        "I could use instead?")
            else:
                text = (f"Okay, I've added your trainer {plan.target_handle} on "
                        f"{plan.target_platform.value.title()}. Looking forward to the training.")
            return DraftReply(text, 0.95, kind)

        if any(ind.kind in WALLET_KINDS for ind in ctx.new_indicators):
            return DraftReply("Got it, thank you. I'll send the deposit shortly.", 0.95, kind)

        if ctx.stage_after == Stage.PAYMENT_EXTRACTION:
            return DraftReply(
                "Okay. What wallet address should I send the deposit to?", 0.9, kind)

        if ctx.stage_after == Stage.REGISTRATION_TASKS:
            return DraftReply(
                "I've registered my working account with the invitation code. What's next?",
                0.9, kind)

        if ctx.stage_before == Stage.UNOPENED:
            return DraftReply(
                "Hi! Yes, I'm interested. Could you tell me more about the role?", 0.9, kind)

        if ctx.stage_after == Stage.TRUST_BUILDING:
            return DraftReply(
                "That sounds good to me. What would the next step be?", 0.85, kind)

        if CONTINUE_VOCAB_RE.search(ctx.inbound_text):
            return DraftReply("Okay, that works for me. What should I do next?", 0.8, kind)

        return DraftReply("Sorry, could you explain that again?", 0.3, kind)


class ExternalModelResponder:
    """Adapter for an external text-generation endpoint.

    The client callable owns transport and prompting; nothing in the test
    suite exercises this (it is not deterministic or offline).
    """

    def __init__(self, client: Callable[[str], str], confidence: float = 0.6):
        if client is None:
            raise ValueError("client callable required")
        self._client = client
        self._confidence = confidence

    def draft(self, ctx: ReplyContext) -> DraftReply:
        prompt = (
            f"stage={ctx.stage_after.value}\n"
            f"persona={ctx.conversation.persona.name if ctx.conversation.persona else '?'}\n"
            f"scammer: {ctx.inbound_text}\n"
        )
        return DraftReply(self._client(prompt), self._confidence, ResponderKind.LLM)
