"""Pipeline-level reports: attrition flow, persistence CDF, platform
trajectories, and frequency rankings.

All functions are read-only over conversation snapshots, so they can run
concurrently with live engagement writes.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from anansi.cluster import canonicalize_template, load_stopwords
from anansi.engagement.model import (
    ACTIVE_STAGES,
    Conversation,
    FailureCode,
    Stage,
    stage_index,
)
from anansi.engagement.rules import classify_task
from anansi.extract import IndicatorKind, Lexicons, default_lexicons, extract_indicators
from anansi.ingest import Platform


class EmptyCorpus(ValueError):
    pass


# --- attrition flow ---------------------------------------------------------

@dataclass
class AttritionFlow:
    nodes: list[tuple[str, int]]
    edges: list[tuple[str, str, int]]

    def node_count(self, label: str) -> int:
        for name, count in self.nodes:
            if name == label:
                return count
        return 0

    def conserved(self) -> bool:
        """Outflow equals node count at every node that has outflow."""
        outflow: dict[str, int] = {}
        for src, _, value in self.edges:
            outflow[src] = outflow.get(src, 0) + value
        return all(
            outflow[name] == count for name, count in self.nodes if name in outflow
        )

    def to_sankey_json(self) -> str:
        index = {name: i for i, (name, _) in enumerate(self.nodes)}
        return json.dumps({
            "nodes": [{"name": name, "count": count} for name, count in self.nodes],
            "links": [
                {"source": index[a], "target": index[b], "value": v}
                for a, b, v in self.edges
            ],
        }, sort_keys=True)


_FAILURE_ORDER = (
    FailureCode.POWERED_OFF, FailureCode.LANDLINE,
    FailureCode.WHATSAPP_RESTRICTION, FailureCode.OTHER,
)


def attrition_flow(
    conversations: Iterable[Conversation] = (),
    delivery_failures: Iterable[FailureCode] = (),
) -> AttritionFlow:
    """Flow-conserving Sankey data over contact outcomes.

    Failures can come from opener delivery statuses on conversations or as
    bare failure codes (fixture reconstructions without full records).
    """
    failures = Counter(delivery_failures)
    responded: list[Conversation] = []
    no_response = 0
    for conv in conversations:
        failure = conv.delivery_failure()
        if failure is not None:
            failures[failure] += 1
        elif not conv.has_scammer_reply():
            no_response += 1
        else:
            responded.append(conv)

    failed_total = sum(failures.values())
    delivered = len(responded) + no_response
    contacted = failed_total + delivered

    nodes: list[tuple[str, int]] = []
    edges: list[tuple[str, str, int]] = []

    def add_node(name: str, count: int) -> None:
        if count > 0:
            nodes.append((name, count))

    add_node("contacted", contacted)
    add_node("failed", failed_total)
    add_node("delivered", delivered)
    if failed_total:
        edges.append(("contacted", "failed", failed_total))
    if delivered:
        edges.append(("contacted", "delivered", delivered))
    for code in _FAILURE_ORDER:
        if failures[code]:
            add_node(code.value, failures[code])
            edges.append(("failed", code.value, failures[code]))
    add_node("responded", len(responded))
    add_node("no_response", no_response)
    if responded:
        edges.append(("delivered", "responded", len(responded)))
    if no_response:
        edges.append(("delivered", "no_response", no_response))

    # stage ladder: each responded conversation flows to the deepest active
    # stage it reached, dropping into its terminal outcome there
    reached: dict[Stage, int] = {stage: 0 for stage in ACTIVE_STAGES}
    outcome_at: dict[tuple[Stage, str], int] = {}
    for conv in responded:
        deepest = conv.max_stage_reached()
        if stage_index(deepest) < stage_index(Stage.INITIAL_CONTACT):
            deepest = Stage.INITIAL_CONTACT
        for stage in ACTIVE_STAGES:
            if stage_index(stage) <= stage_index(deepest):
                reached[stage] += 1
        outcome = conv.outcome()
        key = (deepest, outcome)
        outcome_at[key] = outcome_at.get(key, 0) + 1

    previous = "responded"
    for stage in ACTIVE_STAGES:
        count = reached[stage]
        if count == 0:
            break
        add_node(stage.value, count)
        edges.append((previous, stage.value, count))
        for (at_stage, outcome), num in sorted(
                outcome_at.items(), key=lambda kv: kv[0][1]):
            if at_stage == stage:
                edges.append((stage.value, outcome, num))
        previous = stage.value

    # terminal outcome nodes carry their total inflow across stages
    terminal_totals = Counter()
    for _, dst, value in edges:
        if dst in ("ghosted", "completed", "in_progress"):
            terminal_totals[dst] += value
    for name in ("ghosted", "completed", "in_progress"):
        if terminal_totals[name]:
            nodes.append((name, terminal_totals[name]))
    return AttritionFlow(nodes, edges)


# --- persistence CDF -----------------------------------------------------------

@dataclass
class PersistenceCdf:
    points: list[tuple[float, float]]          # (days, cumulative fraction)
    excluded: list[tuple[str, str]] = field(default_factory=list)

    def fraction_at(self, days: float) -> float:
        value = 0.0
        for d, frac in self.points:
            if d <= days:
                value = frac
            else:
                break
        return value

    def to_json(self) -> str:
        return json.dumps({
            "points": [{"days": d, "fraction": f} for d, f in self.points],
            "excluded": len(self.excluded),
        }, sort_keys=True)


def persistence_durations(
    conversations: Iterable[Conversation],
) -> tuple[list[float], list[tuple[str, str]]]:
    durations: list[float] = []
    excluded: list[tuple[str, str]] = []
    for conv in conversations:
        if conv.persistence_days is not None:
            durations.append(conv.persistence_days)
            continue
        if conv.last_scammer_msg_at is None or conv.last_user_msg_at is None:
            excluded.append((conv.conversation_id, "no message pair"))
            continue
        delta = (conv.last_scammer_msg_at - conv.last_user_msg_at).total_seconds()
        if delta < 0:
            excluded.append((conv.conversation_id, "scammer stopped first"))
            continue
        durations.append(delta / 86_400.0)
    return durations, excluded


def persistence_cdf(
    conversations: Iterable[Conversation] = (),
    durations: Iterable[float] | None = None,
) -> PersistenceCdf:
    """Step CDF of scammer persistence after our last message."""
    excluded: list[tuple[str, str]] = []
    if durations is None:
        values, excluded = persistence_durations(conversations)
    else:
        values = list(durations)
    if not values:
        return PersistenceCdf([], excluded)
    values.sort()
    n = len(values)
    points: list[tuple[float, float]] = []
    seen = 0
    for i, value in enumerate(values):
        seen += 1
        if i + 1 < n and values[i + 1] == value:
            continue
        points.append((value, seen / n))
    return PersistenceCdf(points, excluded)


# --- platform trajectories --------------------------------------------------------

PLATFORM_LABELS = {
    Platform.SMS: "Text",
    Platform.WHATSAPP: "WhatsApp",
    Platform.TELEGRAM: "Telegram",
}


def trajectory_label(route: list[Platform]) -> str:
    deduped: list[Platform] = []
    for platform in route:
        if platform == Platform.UNKNOWN:
            continue
        if not deduped or deduped[-1] != platform:
            deduped.append(platform)
    if not deduped:
        return "Unknown"
    if len(deduped) == 1:
        return f"{PLATFORM_LABELS[deduped[0]]} Only"
    return "→".join(PLATFORM_LABELS[p] for p in deduped)


def platform_trajectories(conversations: Iterable[Conversation]) -> dict[str, int]:
    counts: Counter = Counter()
    for conv in conversations:
        counts[trajectory_label(conv.platform_route)] += 1
    return dict(counts)


# --- frequency reports ---------------------------------------------------------------

FREQUENCY_KINDS = ("word", "brand", "person_name", "template", "payment_app",
                   "task_category")


def _tokenize_words(text: str) -> list[str]:
    import re
    return re.findall(r"[a-z'][a-z0-9']*", text.lower())


def frequency_report(
    kind: str,
    corpus: Iterable[str],
    lexicons: Lexicons | None = None,
    stopwords: frozenset[str] | None = None,
    top_k: int | None = None,
) -> list[tuple[str, int]]:
    """Ranked (value, count) list over message texts.

    Counts are descending with ties broken by value, so rankings are
    deterministic for any corpus ordering.
    """
    texts = list(corpus)
    if not texts:
        raise EmptyCorpus(kind)
    if kind not in FREQUENCY_KINDS:
        raise ValueError(f"unknown frequency kind {kind!r}")
    lex = lexicons or default_lexicons()
    counts: Counter = Counter()

    if kind == "word":
        stops = stopwords if stopwords is not None else load_stopwords()
        for text in texts:
            for token in _tokenize_words(text):
                if token not in stops:
                    counts[token] += 1
    elif kind in ("brand", "person_name", "payment_app"):
        target = {
            "brand": IndicatorKind.BRAND,
            "person_name": IndicatorKind.PERSON_NAME,
            "payment_app": IndicatorKind.PAYMENT_APP,
        }[kind]
        for text in texts:
            for ind in extract_indicators(text, lex):
                if ind.kind == target:
                    counts[ind.value] += 1
    elif kind == "template":
        for text in texts:
            counts[canonicalize_template(text, lex, stopwords).canonical_text] += 1
    elif kind == "task_category":
        for text in texts:
            label = classify_task(text)
            if label != "unknown":
                counts[label] += 1

    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return ranked[:top_k] if top_k is not None else ranked
