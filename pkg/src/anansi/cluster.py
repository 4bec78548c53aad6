"""Clustering of messages, conversations, and scam pages.

Three mechanisms: canonical-template clustering of message text (names,
brands, amounts, URLs, and codes become placeholders so campaign variants
fold together), connected components over shared indicators, and a
structural hash for web pages that ignores copy edits.
"""

from __future__ import annotations

import hashlib
import json
import re
import unicodedata
from dataclasses import dataclass, field
from html.parser import HTMLParser
from importlib import resources
from pathlib import Path

from anansi.extract import (
    AMOUNT_RE,
    BARE_DOMAIN_RE,
    REFERRAL_CUE_RE,
    SCHEME_URL_RE,
    WALLET_KINDS,
    IndicatorKind,
    Lexicons,
    default_lexicons,
    plausible_referral_code,
)


class EmptyInput(ValueError):
    pass


PLACEHOLDERS = ("{NAME}", "{BRAND}", "{AMOUNT}", "{URL}", "{CODE}")

_TOKEN_RE = re.compile(r"\{[A-Z]+\}|[a-z0-9']+")


def load_stopwords(path: str | Path | None = None) -> frozenset[str]:
    if path is not None:
        text = Path(path).read_text("utf-8")
    else:
        text = resources.files("anansi").joinpath("data", "stopwords.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in text.splitlines() if w.strip())


_STOPWORDS: frozenset[str] | None = None


def _stopwords() -> frozenset[str]:
    global _STOPWORDS
    if _STOPWORDS is None:
        _STOPWORDS = load_stopwords()
    return _STOPWORDS


@dataclass(frozen=True)
class CanonicalTemplate:
    canonical_text: str
    shingle_set: frozenset[tuple[str, ...]]


def _phrase_sub(text: str, phrases: list[str], placeholder: str) -> str:
    # Shortest alternative first: overlapping gazetteer entries like a brand
    # plus its org-suffix variant ("X" / "X Recruiting") must not swallow
    # template words, or identical templates canonicalize differently
    # depending on which brand was substituted in. Leftover suffix words
    # ("Recruiting", "US") stay in the template or drop as stopwords.
    if not phrases:
        return text
    pattern = re.compile(
        r"(?<![A-Za-z0-9])(?:" + "|".join(
            re.escape(p) for p in sorted(phrases, key=len)
        ) + r")(?![A-Za-z0-9])",
        re.IGNORECASE,
    )
    return pattern.sub(placeholder, text)


def shingles(tokens: list[str], k: int = 3) -> frozenset[tuple[str, ...]]:
    if len(tokens) <= k:
        return frozenset({tuple(tokens)}) if tokens else frozenset()
    return frozenset(tuple(tokens[i:i + k]) for i in range(len(tokens) - k + 1))


def _canonicalize_once(text: str, lex: Lexicons, stops: frozenset[str]) -> list[str]:
    work = unicodedata.normalize("NFC", text)
    work = REFERRAL_CUE_RE.sub(
        lambda m: (m.group()[:m.start(1) - m.start()] + "{CODE}"
                   if plausible_referral_code(m.group(1)) else m.group()),
        work,
    )
    work = SCHEME_URL_RE.sub("{URL}", work)
    work = BARE_DOMAIN_RE.sub(
        lambda m: "{URL}" if lex.suffixes.split(m.group().partition("/")[0]) else m.group(),
        work,
    )
    work = AMOUNT_RE.sub("{AMOUNT}", work)
    work = _phrase_sub(work, lex.person_names, "{NAME}")
    work = _phrase_sub(work, lex.brands, "{BRAND}")

    # lowercase everything except placeholder tokens, then tokenize
    parts = re.split(r"(\{[A-Z]+\})", work)
    lowered = "".join(p if p.startswith("{") else p.lower() for p in parts)
    return [t for t in _TOKEN_RE.findall(lowered)
            if t.startswith("{") or t not in stops]


def canonicalize_template(
    text: str,
    lexicons: Lexicons | None = None,
    stopwords: frozenset[str] | None = None,
) -> CanonicalTemplate:
    """Lowercased, placeholder-substituted, stopword-free template form.

    Runs the substitution pipeline to a fixpoint: dropping stopwords can
    make previously separated lexicon words adjacent, so a single pass is
    not guaranteed stable. Termination is bounded because passes only ever
    collapse tokens into opaque placeholders or drop them.
    """
    lex = lexicons or default_lexicons()
    stops = stopwords if stopwords is not None else _stopwords()

    tokens = _canonicalize_once(text, lex, stops)
    canonical = " ".join(tokens)
    while True:
        tokens_next = _canonicalize_once(canonical, lex, stops)
        canonical_next = " ".join(tokens_next)
        if canonical_next == canonical:
            break
        tokens, canonical = tokens_next, canonical_next
    return CanonicalTemplate(canonical, shingles(tokens))


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


@dataclass(frozen=True)
class Cluster:
    cluster_id: int
    members: tuple[str, ...]       # sorted item ids
    exemplar: str                  # smallest member id
    size: int
    weak: bool = False             # wallet-only linkage (IOC clustering)


@dataclass
class ClusterReport:
    method: str
    clusters: list[Cluster]
    item_ids: tuple[str, ...] = field(default_factory=tuple)

    def is_partition(self) -> bool:
        seen: set[str] = set()
        for cluster in self.clusters:
            for member in cluster.members:
                if member in seen:
                    return False
                seen.add(member)
        return seen == set(self.item_ids)

    def to_jsonl(self) -> str:
        lines = []
        for cluster in self.clusters:
            lines.append(json.dumps({
                "cluster_id": cluster.cluster_id,
                "method": self.method,
                "size": cluster.size,
                "exemplar": cluster.exemplar,
                "members": list(cluster.members),
                "weak": cluster.weak,
            }, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")


class _UnionFind:
    def __init__(self, items):
        self.parent = {item: item for item in items}

    def find(self, item):
        root = item
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[item] != root:
            self.parent[item], item = root, self.parent[item]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # deterministic: smaller id becomes the root
            lo, hi = sorted((ra, rb))
            self.parent[hi] = lo


def _report_from_groups(groups: dict, method: str, all_ids: list[str],
                        weak_ids: set | None = None) -> ClusterReport:
    clusters = []
    for idx, key in enumerate(sorted(groups, key=lambda k: min(groups[k]))):
        members = tuple(sorted(groups[key]))
        clusters.append(Cluster(
            cluster_id=idx,
            members=members,
            exemplar=min(members),
            size=len(members),
            weak=bool(weak_ids and key in weak_ids),
        ))
    return ClusterReport(method=method, clusters=clusters, item_ids=tuple(sorted(all_ids)))


def cluster_templates(
    messages: list[tuple[str, str]],
    jaccard_threshold: float | None = 0.8,
    lexicons: Lexicons | None = None,
    stopwords: frozenset[str] | None = None,
) -> ClusterReport:
    """Cluster (item_id, text) pairs by canonical template.

    Exact canonical matches union first; then clusters whose exemplar
    shingle sets reach the Jaccard threshold merge single-link. A None
    threshold skips the near-duplicate phase entirely (exact_template).
    Output is deterministic for any input permutation (ties break on
    smallest id).
    """
    if not messages:
        raise EmptyInput("no messages to cluster")
    if jaccard_threshold is not None and not 0 < jaccard_threshold <= 1:
        raise ValueError("jaccard_threshold must be in (0, 1] or None")

    canon = {item_id: canonicalize_template(text, lexicons, stopwords)
             for item_id, text in messages}
    ids = sorted(canon)

    exact: dict[str, list[str]] = {}
    for item_id in ids:
        exact.setdefault(canon[item_id].canonical_text, []).append(item_id)

    uf = _UnionFind(ids)
    for members in exact.values():
        for other in members[1:]:
            uf.union(members[0], other)

    if jaccard_threshold is not None:
        exemplars = sorted(min(members) for members in exact.values())
        for i, a in enumerate(exemplars):
            for b in exemplars[i + 1:]:
                if jaccard(canon[a].shingle_set, canon[b].shingle_set) >= jaccard_threshold:
                    uf.union(a, b)

    groups: dict[str, list[str]] = {}
    for item_id in ids:
        groups.setdefault(uf.find(item_id), []).append(item_id)
    method = "exact_template" if jaccard_threshold is None else "jaccard_template"
    return _report_from_groups(groups, method, ids)


@dataclass
class IocGraph:
    """Bipartite conversation <-> indicator occurrence graph."""
    edges: list[tuple[str, str, IndicatorKind]] = field(default_factory=list)
    conversations: set[str] = field(default_factory=set)

    def add(self, conversation_id: str, indicator_value: str, kind: IndicatorKind) -> None:
        self.conversations.add(conversation_id)
        self.edges.append((conversation_id, indicator_value, kind))

    def add_conversation(self, conversation_id: str) -> None:
        self.conversations.add(conversation_id)


def ioc_components(
    graph: IocGraph,
    kinds: set[IndicatorKind] | None = None,
) -> ClusterReport:
    """Connected components of conversations linked through shared indicators.

    Components whose only links are wallet addresses are flagged weak:
    scammers rotate payment addresses quickly, so wallet-only linkage is
    unreliable for tying operations together.
    """
    convs = sorted(graph.conversations)
    uf = _UnionFind(convs)
    by_indicator: dict[tuple[str, IndicatorKind], list[str]] = {}
    for conv, value, kind in graph.edges:
        if kinds is not None and kind not in kinds:
            continue
        by_indicator.setdefault((value, kind), []).append(conv)
    for (_, kind), members in sorted(by_indicator.items()):
        for other in members[1:]:
            uf.union(members[0], other)

    groups: dict[str, list[str]] = {}
    for conv in convs:
        groups.setdefault(uf.find(conv), []).append(conv)

    # a component is weak if every indicator linking >= 2 of its members is a wallet
    link_kinds: dict[str, set[IndicatorKind]] = {}
    for (_, kind), members in by_indicator.items():
        if len(set(members)) >= 2:
            root = uf.find(members[0])
            link_kinds.setdefault(root, set()).add(kind)
    weak_roots = {
        root for root, ks in link_kinds.items()
        if ks and ks <= WALLET_KINDS
    }
    return _report_from_groups(groups, "ioc_components", convs, weak_roots)


class _StructureParser(HTMLParser):
    """Collects (tag, sorted class names) for start tags; text is ignored."""

    def __init__(self) -> None:
        super().__init__(convert_charrefs=True)
        self.sequence: list[tuple[str, tuple[str, ...]]] = []

    def _record(self, tag: str, attrs) -> None:
        classes: tuple[str, ...] = ()
        for key, value in attrs:
            if key.lower() == "class" and value:
                classes = tuple(sorted(value.split()))
                break
        self.sequence.append((tag.lower(), classes))

    def handle_starttag(self, tag, attrs):
        self._record(tag, attrs)

    def handle_startendtag(self, tag, attrs):
        self._record(tag, attrs)


EMPTY_PAGE_FINGERPRINT = hashlib.sha256(b"").hexdigest()


def fingerprint_page(html: bytes) -> str:
    """Structural hash over the (tag, class-set) stream.

    Stable across text edits, attribute churn (other than class), and
    image swaps; malformed regions are skipped rather than fatal.
    """
    text = html.decode("utf-8", errors="replace")
    parser = _StructureParser()
    try:
        parser.feed(text)
        parser.close()
    except Exception:
        pass  # tolerate malformed markup; hash whatever parsed
    if not parser.sequence:
        return EMPTY_PAGE_FINGERPRINT
    payload = "|".join(
        tag + (":" + ",".join(classes) if classes else "")
        for tag, classes in parser.sequence
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def cluster_pages(pages: list[tuple[str, bytes]]) -> ClusterReport:
    """Group page ids by identical structural fingerprint."""
    if not pages:
        raise EmptyInput("no pages to cluster")
    groups: dict[str, list[str]] = {}
    for page_id, html in sorted(pages):
        groups.setdefault(fingerprint_page(html), []).append(page_id)
    return _report_from_groups(groups, "page_fingerprint", [p for p, _ in pages])
