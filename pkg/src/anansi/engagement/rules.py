"""Deterministic cue tables driving the rule-engine responder.

Everything here is regex + stage guards: stage transition cues, question
detection (mapped to persona answer keys), suspicion rules that trigger
operator escalation, and the task-type classifier.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from anansi.engagement.model import Stage

# Scanned highest stage first; the first hit is the stage cue.
STAGE_CUES: list[tuple[Stage, re.Pattern]] = [
    (Stage.PAYMENT_EXTRACTION, re.compile(
        r"\b(?:deposit|withdraw(?:al)?|minimum balance|prepay|pre-pay|recharge|top ?up"
        r"|send (?:btc|eth|usdt|crypto|bitcoin|ethereum)|wallet address|payment address"
        r"|upgrade your account)\b", re.IGNORECASE)),
    (Stage.REGISTRATION_TASKS, re.compile(
        r"\b(?:register|registration|sign ?up|create (?:an |your )?account|workbench"
        r"|working account|invitation code|referral code|training code)\b", re.IGNORECASE)),
    (Stage.PLATFORM_HANDOFF, re.compile(
        r"\b(?:add (?:our|the|my) trainer|contact (?:our|the) trainer"
        r"|trainer on (?:whatsapp|telegram)|add (?:me|us) on (?:whatsapp|telegram)"
        r"|continue on (?:whatsapp|telegram)|(?:whatsapp|telegram) (?:number|handle|account))\b",
        re.IGNORECASE)),
    (Stage.TRUST_BUILDING, re.compile(
        r"\b(?:business license|salary structure|about yourself|your (?:background|resume)"
        r"|may i ask|tell me (?:a (?:bit|little) )?about you)\b", re.IGNORECASE)),
]

HANDOFF_PLATFORM_RE = re.compile(r"\b(whatsapp|telegram)\b", re.IGNORECASE)

# Free-text question -> persona answer key.
QUESTION_PATTERNS: list[tuple[str, re.Pattern]] = [
    ("name", re.compile(
        r"\b(?:your name|name and age|provide your name|who am i (?:speaking|talking) (?:to|with)"
        r"|what(?:'s| is) your name)\b", re.IGNORECASE)),
    ("age", re.compile(
        r"\b(?:your age|how old|name and age|age and name)\b", re.IGNORECASE)),
    ("location", re.compile(
        r"\b(?:where (?:are you|do you) (?:located|live|based)|your (?:location|city)"
        r"|which (?:city|state))\b", re.IGNORECASE)),
    ("occupation", re.compile(
        r"\b(?:what do you do for work|your (?:occupation|job|profession)"
        r"|current (?:job|employment)|do you (?:work|have a job))\b", re.IGNORECASE)),
    ("experience", re.compile(
        r"\b(?:experience with (?:crypto|cryptocurrency|bitcoin)|crypto experience"
        r"|(?:have you|do you) (?:ever )?(?:used?|traded?) (?:crypto|bitcoin)"
        r"|investment experience)\b", re.IGNORECASE)),
    ("availability", re.compile(
        r"\b(?:how (?:much time|many hours)|hours (?:a|per) day|your availability"
        r"|available hours|free time)\b", re.IGNORECASE)),
    ("payment_app", re.compile(
        r"\b(?:how (?:would|do) you (?:like to |want to )?(?:get paid|receive payments?)"
        r"|payment (?:app|method|platform) do you (?:use|prefer)"
        r"|which (?:app|platform) do you use for payments?)\b", re.IGNORECASE)),
]


@dataclass(frozen=True)
class SuspicionRule:
    name: str
    pattern: re.Pattern
    stages: tuple[Stage, ...] | None = None   # None = any stage


DEFAULT_SUSPICION_RULES: list[SuspicionRule] = [
    SuspicionRule("government_id_request", re.compile(
        r"\b(?:driver'?s licen[cs]e|passport|government[- ]?id|national id"
        r"|social security|ssn)\b", re.IGNORECASE)),
    SuspicionRule("voice_call_demand", re.compile(
        r"\b(?:voice call|video call|phone call|call (?:me|you) (?:now|today)"
        r"|speak on the phone|get on a call)\b", re.IGNORECASE)),
    SuspicionRule("bank_credential_request", re.compile(
        r"\b(?:bank (?:login|password)|online banking password|card number and cvv"
        r"|account and routing)\b", re.IGNORECASE)),
]

# Generic job-scam vocabulary: enough signal for a confident "keep going" reply.
CONTINUE_VOCAB_RE = re.compile(
    r"\b(?:job|work|task|pay|salary|bonus|earn|commission|training|trainer|position"
    r"|role|opportunity|remote|part-?time|merchants?|orders?|reviews?|recruit)\b",
    re.IGNORECASE)


TASK_RULES: list[tuple[str, re.Pattern]] = [
    ("product_review", re.compile(
        r"\b(?:rate and review|review the products?|product (?:review|rating)s?"
        r"|rate (?:the )?products?|submit (?:a )?review|rating tasks?)\b", re.IGNORECASE)),
    ("youtube_engagement", re.compile(
        r"\b(?:youtube|like (?:the|this) video|subscribe to (?:the|this)? ?channel"
        r"|liking videos?|subscribing to channels?)\b", re.IGNORECASE)),
    ("app_store", re.compile(
        r"\b(?:app ?store|play store|app listing|screenshot of the app"
        r"|download (?:the|this) app)\b", re.IGNORECASE)),
    ("prepay", re.compile(
        r"\b(?:prepay|pre-pay|advance payment|deposit first|send (?:crypto|funds?|money) first"
        r"|optimi[sz]\w* crypto)\b", re.IGNORECASE)),
]


def classify_task(text: str) -> str:
    """Keyword-rule task classification; 'unknown' when nothing fires."""
    for label, pattern in TASK_RULES:
        if pattern.search(text):
            return label
    return "unknown"


def stage_cues(text: str) -> set[Stage]:
    """Every stage whose cue pattern fires on `text`."""
    return {stage for stage, pattern in STAGE_CUES if pattern.search(text)}


def question_keys(text: str) -> list[str]:
    """Persona answer keys asked for in `text`, in canonical key order."""
    hits = []
    for key, pattern in QUESTION_PATTERNS:
        if pattern.search(text) and key not in hits:
            hits.append(key)
    return hits


def suspicion_hits(text: str, stage: Stage,
                   rules: list[SuspicionRule] | None = None) -> list[str]:
    out = []
    for rule in rules if rules is not None else DEFAULT_SUSPICION_RULES:
        if rule.stages is not None and stage not in rule.stages:
            continue
        if rule.pattern.search(text):
            out.append(rule.name)
    return out
