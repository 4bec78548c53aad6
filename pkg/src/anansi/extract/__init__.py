"""Typed indicator extraction from scam message text.

Pulls phones, URLs, Telegram handles, wallet addresses, payment apps,
brands, person names, and referral codes out of message text. Wallet
candidates are checksum-validated before they become indicators; entity
recognition is gazetteer-based (deterministic, no model weights).
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path

from anansi.domains import PublicSuffixes, bundled_suffixes
from anansi.extract.wallets import (
    WalletScheme,
    WalletValidity,
    validate_wallet_address,
)
from anansi.ingest import UnparsablePhone, normalize_phone


class LexiconMissing(Exception):
    pass


class IndicatorKind(str, enum.Enum):
    PHONE = "phone"
    URL = "url"
    TELEGRAM_HANDLE = "telegram_handle"
    BTC_ADDRESS = "btc_address"
    ETH_ADDRESS = "eth_address"
    PAYMENT_APP = "payment_app"
    BRAND = "brand"
    PERSON_NAME = "person_name"
    REFERRAL_CODE = "referral_code"


WALLET_KINDS = frozenset({IndicatorKind.BTC_ADDRESS, IndicatorKind.ETH_ADDRESS})


@dataclass(frozen=True)
class IndicatorSource:
    conversation_id: str
    message_index: int
    span: tuple[int, int]


@dataclass(frozen=True)
class Indicator:
    kind: IndicatorKind
    value: str            # canonicalized per kind
    raw: str              # exactly text[span[0]:span[1]]
    source: IndicatorSource
    first_seen: datetime


def _read_lines(name: str, override: str | Path | None) -> list[str]:
    if override is not None:
        path = Path(override)
        if not path.exists():
            raise LexiconMissing(str(path))
        text = path.read_text("utf-8")
    else:
        try:
            text = resources.files("anansi").joinpath("data", name).read_text("utf-8")
        except FileNotFoundError as exc:
            raise LexiconMissing(name) from exc
    return [line.strip() for line in text.splitlines() if line.strip()]


@dataclass
class Lexicons:
    brands: list[str]
    person_names: list[str]
    payment_apps: list[str]
    suffixes: PublicSuffixes = field(default_factory=bundled_suffixes)

    @classmethod
    def bundled(
        cls,
        brands_path: str | Path | None = None,
        person_names_path: str | Path | None = None,
        payment_apps_path: str | Path | None = None,
    ) -> "Lexicons":
        return cls(
            brands=_read_lines("brands.txt", brands_path),
            person_names=_read_lines("person_names.txt", person_names_path),
            payment_apps=_read_lines("payment_apps.txt", payment_apps_path),
        )


_DEFAULT_LEXICONS: Lexicons | None = None


def default_lexicons() -> Lexicons:
    global _DEFAULT_LEXICONS
    if _DEFAULT_LEXICONS is None:
        _DEFAULT_LEXICONS = Lexicons.bundled()
    return _DEFAULT_LEXICONS


# --- patterns ----------------------------------------------------------------

PHONE_RE = re.compile(r"\+?\d[\d\s().\-]{5,18}\d")
# no alnum/._- before the @ (emails), no ".tld" right after (domains)
HANDLE_RE = re.compile(r"(?<![A-Za-z0-9._\-])@[A-Za-z][A-Za-z0-9_]{3,31}(?!\.[A-Za-z])")
ETH_RE = re.compile(r"0x[0-9a-fA-F]{40}\b")
# bech32 is valid all-lower or all-upper; mixed case fails validation later
BTC_RE = re.compile(
    r"\b(?:[bB][cC]1[02-9AC-HJ-NP-Zac-hj-np-z]{8,87}|[13][1-9A-HJ-NP-Za-km-z]{24,34})\b"
)
SCHEME_URL_RE = re.compile(r"(?:https?://|www\.)[^\s<>\"')\]}]+", re.IGNORECASE)
BARE_DOMAIN_RE = re.compile(
    r"\b(?:[a-z0-9](?:[a-z0-9-]{0,61}[a-z0-9])?\.){1,4}[a-z]{2,12}\b(?:/[^\s<>\"')\]}]*)?",
    re.IGNORECASE,
)
AMOUNT_RE = re.compile(r"\$\s?\d[\d,]*(?:\.\d+)?[kK]?")
REFERRAL_CUE_RE = re.compile(
    r"\b(?:invitation|invite|referral|training|registration)\s+code\b[:\s]*(?:is\s+)?"
    r"([A-Za-z0-9][A-Za-z0-9\-]{2,19})",
    re.IGNORECASE,
)


def plausible_referral_code(token: str) -> bool:
    """Filter prose words after a code cue ("training code has been...");
    real codes carry a digit or are shouted in caps."""
    return any(c.isdigit() for c in token) or (token.isupper() and len(token) >= 3)


def _canonical_url(raw: str, suffixes: PublicSuffixes) -> str | None:
    """Lowercase the host, keep the path; gate bare domains on the PSL."""
    text = raw.rstrip(".,;:!?")
    if text.lower().startswith(("http://", "https://")):
        scheme, rest = text.split("://", 1)
        host, slash, path = rest.partition("/")
        return f"{scheme.lower()}://{host.lower()}{slash}{path}"
    if text.lower().startswith("www."):
        host, slash, path = text.partition("/")
        return f"{host.lower()}{slash}{path}"
    host, slash, path = text.partition("/")
    if suffixes.split(host) is None:
        return None
    return f"{host.lower()}{slash}{path}"


def url_host(url: str) -> str:
    """Host portion of a canonical URL indicator value."""
    rest = url.split("://", 1)[1] if "://" in url else url
    return rest.split("/", 1)[0]


def _phrase_pattern(phrases: list[str]) -> re.Pattern | None:
    if not phrases:
        return None
    ordered = sorted(phrases, key=len, reverse=True)
    return re.compile(
        r"(?<![A-Za-z0-9])(?:" + "|".join(re.escape(p) for p in ordered) + r")(?![A-Za-z0-9])",
        re.IGNORECASE,
    )


@dataclass(frozen=True)
class _Match:
    kind: IndicatorKind
    start: int
    end: int
    raw: str
    value: str


def _overlaps(a: _Match, taken: list[_Match]) -> bool:
    return any(a.start < t.end and t.start < a.end for t in taken)


def extract_indicators(
    text: str,
    lexicons: Lexicons | None = None,
    conversation_id: str = "",
    message_index: int = 0,
    first_seen: datetime | None = None,
    default_region: str = "US",
) -> list[Indicator]:
    """All non-overlapping maximal indicator matches in `text`.

    Wallet candidates that fail checksum validation are dropped. Duplicate
    (kind, value) pairs within one text collapse to the first occurrence.
    Higher-priority kinds claim overlapping spans (a brand inside a URL is
    not reported separately).
    """
    lex = lexicons or default_lexicons()
    when = first_seen or datetime.now(timezone.utc)
    candidates: list[_Match] = []

    # Priority order: wallets, payment apps, URLs, handles, referral codes,
    # phones, brands, person names.
    for m in ETH_RE.finditer(text):
        verdict = validate_wallet_address(m.group())
        if verdict.valid:
            candidates.append(_Match(IndicatorKind.ETH_ADDRESS, m.start(), m.end(),
                                     m.group(), m.group()))
    for m in BTC_RE.finditer(text):
        raw = m.group()
        verdict = validate_wallet_address(raw)
        if verdict.valid:
            value = raw.lower() if verdict.scheme == WalletScheme.BTC_BECH32 else raw
            candidates.append(_Match(IndicatorKind.BTC_ADDRESS, m.start(), m.end(), raw, value))

    app_re = _phrase_pattern(lex.payment_apps)
    if app_re:
        canon_app = {p.lower(): p for p in lex.payment_apps}
        for m in app_re.finditer(text):
            candidates.append(_Match(IndicatorKind.PAYMENT_APP, m.start(), m.end(),
                                     m.group(), canon_app[m.group().lower()]))

    seen_url_spans: list[tuple[int, int]] = []
    for m in SCHEME_URL_RE.finditer(text):
        value = _canonical_url(m.group(), lex.suffixes)
        if value:
            end = m.start() + len(m.group().rstrip(".,;:!?"))
            candidates.append(_Match(IndicatorKind.URL, m.start(), end,
                                     text[m.start():end], value))
            seen_url_spans.append((m.start(), end))
    for m in BARE_DOMAIN_RE.finditer(text):
        if any(m.start() >= s and m.end() <= e for s, e in seen_url_spans):
            continue
        value = _canonical_url(m.group(), lex.suffixes)
        if value:
            end = m.start() + len(m.group().rstrip(".,;:!?"))
            candidates.append(_Match(IndicatorKind.URL, m.start(), end,
                                     text[m.start():end], value))

    for m in HANDLE_RE.finditer(text):
        candidates.append(_Match(IndicatorKind.TELEGRAM_HANDLE, m.start(), m.end(),
                                 m.group(), m.group()))

    for m in REFERRAL_CUE_RE.finditer(text):
        if plausible_referral_code(m.group(1)):
            candidates.append(_Match(IndicatorKind.REFERRAL_CODE, m.start(1), m.end(1),
                                     m.group(1), m.group(1)))

    for m in PHONE_RE.finditer(text):
        raw = m.group()
        digits = sum(c.isdigit() for c in raw)
        # without an explicit "+", only national-shaped runs count as phones
        # (dates and id numbers produce 8-9 digit runs)
        if not raw.lstrip().startswith("+") and digits not in (10, 11):
            continue
        try:
            value = normalize_phone(raw, default_region)
        except UnparsablePhone:
            continue
        candidates.append(_Match(IndicatorKind.PHONE, m.start(), m.end(), raw, value))

    brand_re = _phrase_pattern(lex.brands)
    if brand_re:
        canon_brand = {p.lower(): p for p in lex.brands}
        for m in brand_re.finditer(text):
            candidates.append(_Match(IndicatorKind.BRAND, m.start(), m.end(),
                                     m.group(), canon_brand[m.group().lower()]))
    name_re = _phrase_pattern(lex.person_names)
    if name_re:
        canon_name = {p.lower(): p for p in lex.person_names}
        for m in name_re.finditer(text):
            candidates.append(_Match(IndicatorKind.PERSON_NAME, m.start(), m.end(),
                                     m.group(), canon_name[m.group().lower()]))

    # Resolve cross-kind overlaps by priority (candidates are already grouped
    # in priority order), then by position for stable output.
    taken: list[_Match] = []
    for cand in candidates:
        if not _overlaps(cand, taken):
            taken.append(cand)
    taken.sort(key=lambda c: (c.start, c.end))

    out: list[Indicator] = []
    seen_values: set[tuple[IndicatorKind, str]] = set()
    for cand in taken:
        key = (cand.kind, cand.value)
        if key in seen_values:
            continue
        seen_values.add(key)
        out.append(Indicator(
            kind=cand.kind,
            value=cand.value,
            raw=cand.raw,
            source=IndicatorSource(conversation_id, message_index, (cand.start, cand.end)),
            first_seen=when,
        ))
    return out


def extract_entities(
    text: str,
    brand_lexicon: list[str] | None = None,
    name_lexicon: list[str] | None = None,
) -> tuple[Counter, Counter]:
    """Case-insensitive longest-match gazetteer counts of brands and names."""
    if brand_lexicon is None or name_lexicon is None:
        lex = default_lexicons()
        brand_lexicon = brand_lexicon if brand_lexicon is not None else lex.brands
        name_lexicon = name_lexicon if name_lexicon is not None else lex.person_names
    if not brand_lexicon and not name_lexicon:
        raise LexiconMissing("both lexicons empty")
    brands: Counter = Counter()
    names: Counter = Counter()
    brand_re = _phrase_pattern(brand_lexicon)
    if brand_re:
        canon = {p.lower(): p for p in brand_lexicon}
        for m in brand_re.finditer(text):
            brands[canon[m.group().lower()]] += 1
    name_re = _phrase_pattern(name_lexicon)
    if name_re:
        canon = {p.lower(): p for p in name_lexicon}
        for m in name_re.finditer(text):
            names[canon[m.group().lower()]] += 1
    return brands, names


__all__ = [
    "LexiconMissing", "IndicatorKind", "WALLET_KINDS", "IndicatorSource",
    "Indicator", "Lexicons", "default_lexicons", "extract_indicators",
    "extract_entities", "url_host", "WalletScheme", "WalletValidity",
    "validate_wallet_address", "AMOUNT_RE", "SCHEME_URL_RE", "BARE_DOMAIN_RE",
    "REFERRAL_CUE_RE", "PHONE_RE", "HANDLE_RE",
]
