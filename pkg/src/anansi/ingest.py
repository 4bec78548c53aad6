"""Normalize heterogeneous scam reports into deduplicated ScamReport records.

Two input shapes are supported: portal CSV exports (header
``phone,message,scam_type,date``) and plain-text transcripts of forwarded
screenshots (blocks separated by blank lines, each starting with a
``From:`` line). OCR itself happens upstream; this module only consumes
its text output.
"""

from __future__ import annotations

import csv
import enum
import hashlib
import io
import re
import unicodedata
from dataclasses import dataclass
from datetime import datetime, timezone


class IngestError(Exception):
    pass


class UndecodableInput(IngestError):
    """Raw bytes are not valid UTF-8."""


class MissingHeader(IngestError):
    """portal_csv input lacks the required header columns."""


class UnparsablePhone(IngestError):
    """Too few or too many digits to form an E.164 number."""


class ReportSource(str, enum.Enum):
    PORTAL = "portal"
    SUBMISSION = "submission"


class Platform(str, enum.Enum):
    SMS = "sms"
    WHATSAPP = "whatsapp"
    TELEGRAM = "telegram"
    UNKNOWN = "unknown"


E164_RE = re.compile(r"^\+[1-9][0-9]{7,14}$")

# Country calling codes for the regions the pipeline operates in.
REGION_CODES = {
    "US": "1",
    "CA": "1",
    "GB": "44",
    "AU": "61",
    "DE": "49",
    "FR": "33",
    "IN": "91",
}

REQUIRED_COLUMNS = ("phone", "message", "scam_type", "date")


@dataclass(frozen=True)
class ScamReport:
    report_id: str
    source: ReportSource
    phone: str                 # canonical E.164
    message_text: str
    platform_hint: Platform
    reported_at: datetime      # UTC
    scam_type_label: str


@dataclass(frozen=True)
class RejectedRow:
    index: int
    reason: str


@dataclass(frozen=True)
class ParseResult:
    reports: list[ScamReport]
    rejects: list[RejectedRow]


def normalize_phone(raw: str, default_region: str = "US") -> str:
    """Canonicalize a free-form phone string to E.164.

    Numbers without an explicit "+" get the default region's country code
    prepended (after dropping a single national trunk '0'), unless the
    digits already start with that code and are long enough to carry it.
    """
    has_plus = raw.lstrip().startswith("+")
    digits = re.sub(r"[^0-9]", "", raw)
    if len(digits) < 7:
        raise UnparsablePhone(f"only {len(digits)} digits in {raw!r}")
    if has_plus:
        candidate = digits
    else:
        code = REGION_CODES.get(default_region.upper())
        if code is None:
            raise UnparsablePhone(f"unknown region {default_region!r}")
        if digits.startswith(code) and len(digits) >= 10 + len(code):
            candidate = digits
        else:
            national = digits[1:] if digits.startswith("0") else digits
            candidate = code + national
    canonical = "+" + candidate
    if not E164_RE.match(canonical):
        raise UnparsablePhone(f"{canonical!r} is not a valid E.164 number")
    return canonical


def message_hash(text: str) -> str:
    """Dedup key half: hash of NFC-normalized, whitespace-collapsed, lowercased text."""
    folded = unicodedata.normalize("NFC", text)
    folded = re.sub(r"\s+", " ", folded).strip().lower()
    return hashlib.sha256(folded.encode("utf-8")).hexdigest()


def _report_id(source: ReportSource, phone: str, text: str, label: str, when: datetime) -> str:
    seed = f"{source.value}|{phone}|{message_hash(text)}|{label}|{when.isoformat()}"
    return hashlib.sha256(seed.encode("utf-8")).hexdigest()[:16]


def _parse_when(token: str) -> datetime:
    value = datetime.fromisoformat(token.strip().replace("Z", "+00:00"))
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)


def parse_reports(
    raw: bytes,
    fmt: str,
    default_region: str = "US",
    now: datetime | None = None,
) -> ParseResult:
    """Parse portal_csv or transcript_text bytes into ScamReports.

    Malformed rows/blocks are returned in rejects with their index and
    reason rather than silently dropped.
    """
    if now is None:
        now = datetime.now(timezone.utc)
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise UndecodableInput(str(exc)) from exc

    if fmt == "portal_csv":
        return _parse_portal_csv(text, default_region, now)
    if fmt == "transcript_text":
        return _parse_transcripts(text, default_region, now)
    raise ValueError(f"unknown format {fmt!r}")


def _parse_portal_csv(text: str, default_region: str, now: datetime) -> ParseResult:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MissingHeader("empty input") from None
    columns = [h.strip().lower() for h in header]
    missing = [c for c in REQUIRED_COLUMNS if c not in columns]
    if missing:
        raise MissingHeader(f"missing columns: {', '.join(missing)}")
    idx = {c: columns.index(c) for c in REQUIRED_COLUMNS}

    reports: list[ScamReport] = []
    rejects: list[RejectedRow] = []
    for row_no, row in enumerate(reader):
        if not row or all(not cell.strip() for cell in row):
            rejects.append(RejectedRow(row_no, "blank row"))
            continue
        if len(row) < len(columns):
            short = [c for c in REQUIRED_COLUMNS if idx[c] >= len(row)]
            rejects.append(RejectedRow(row_no, f"missing field: {short[0] if short else 'unknown'}"))
            continue
        fields = {c: row[idx[c]] for c in REQUIRED_COLUMNS}
        empty = [c for c in REQUIRED_COLUMNS if not fields[c].strip()]
        if empty:
            rejects.append(RejectedRow(row_no, f"missing field: {empty[0]}"))
            continue
        try:
            phone = normalize_phone(fields["phone"], default_region)
        except UnparsablePhone as exc:
            rejects.append(RejectedRow(row_no, f"bad phone: {exc}"))
            continue
        try:
            when = _parse_when(fields["date"])
        except ValueError:
            rejects.append(RejectedRow(row_no, f"bad date: {fields['date']!r}"))
            continue
        if when > now:
            rejects.append(RejectedRow(row_no, "reported_at in the future"))
            continue
        message = fields["message"]
        if not message.strip():
            rejects.append(RejectedRow(row_no, "missing field: message"))
            continue
        label = fields["scam_type"].strip()
        reports.append(ScamReport(
            report_id=_report_id(ReportSource.PORTAL, phone, message, label, when),
            source=ReportSource.PORTAL,
            phone=phone,
            message_text=message,
            platform_hint=Platform.UNKNOWN,
            reported_at=when,
            scam_type_label=label,
        ))
    return ParseResult(reports, rejects)


_FROM_RE = re.compile(r"^from:\s*(.+)$", re.IGNORECASE)
_DATE_RE = re.compile(r"^date:\s*(.+)$", re.IGNORECASE)
_PLATFORM_RE = re.compile(r"^platform:\s*(.+)$", re.IGNORECASE)
_TYPE_RE = re.compile(r"^type:\s*(.+)$", re.IGNORECASE)


def _parse_transcripts(text: str, default_region: str, now: datetime) -> ParseResult:
    blocks = [b for b in re.split(r"\n\s*\n", text) if b.strip()]
    reports: list[ScamReport] = []
    rejects: list[RejectedRow] = []
    for block_no, block in enumerate(blocks):
        sender: str | None = None
        when = now
        platform = Platform.UNKNOWN
        label = "Unknown"
        body_lines: list[str] = []
        for line in block.splitlines():
            if (m := _FROM_RE.match(line.strip())):
                sender = m.group(1)
            elif (m := _DATE_RE.match(line.strip())):
                try:
                    when = _parse_when(m.group(1))
                except ValueError:
                    rejects.append(RejectedRow(block_no, f"bad date: {m.group(1)!r}"))
                    sender = None
                    break
            elif (m := _PLATFORM_RE.match(line.strip())):
                try:
                    platform = Platform(m.group(1).strip().lower())
                except ValueError:
                    platform = Platform.UNKNOWN
            elif (m := _TYPE_RE.match(line.strip())):
                label = m.group(1).strip()
            else:
                body_lines.append(line)
        if sender is None:
            if not any(r.index == block_no for r in rejects):
                rejects.append(RejectedRow(block_no, "missing From: line"))
            continue
        body = "\n".join(body_lines).strip()
        if not body:
            rejects.append(RejectedRow(block_no, "empty body"))
            continue
        if when > now:
            rejects.append(RejectedRow(block_no, "reported_at in the future"))
            continue
        try:
            phone = normalize_phone(sender, default_region)
        except UnparsablePhone as exc:
            rejects.append(RejectedRow(block_no, f"bad phone: {exc}"))
            continue
        reports.append(ScamReport(
            report_id=_report_id(ReportSource.SUBMISSION, phone, body, label, when),
            source=ReportSource.SUBMISSION,
            phone=phone,
            message_text=body,
            platform_hint=platform,
            reported_at=when,
            scam_type_label=label,
        ))
    return ParseResult(reports, rejects)


def serialize_reports(reports: list[ScamReport]) -> bytes:
    """Render reports back to the portal_csv wire format."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(REQUIRED_COLUMNS)
    for rep in reports:
        writer.writerow([
            rep.phone,
            rep.message_text,
            rep.scam_type_label,
            rep.reported_at.isoformat(),
        ])
    return out.getvalue().encode("utf-8")


def dedupe_reports(reports: list[ScamReport]) -> list[ScamReport]:
    """Keep the first report per (phone, message hash); order preserved."""
    seen: set[tuple[str, str]] = set()
    kept: list[ScamReport] = []
    for rep in reports:
        key = (rep.phone, message_hash(rep.message_text))
        if key in seen:
            continue
        seen.add(key)
        kept.append(rep)
    return kept


def is_engagement_candidate(report: ScamReport) -> bool:
    """Only the employment category is auto-enqueued for engagement."""
    return report.scam_type_label.strip().lower() == "employment"


def redact_phone(phone: str) -> str:
    """Mask all but the last four digits (export redaction)."""
    if len(phone) <= 5:
        return phone
    return phone[:2] + "*" * (len(phone) - 6) + phone[-4:]


__all__ = [
    "IngestError", "UndecodableInput", "MissingHeader", "UnparsablePhone",
    "ReportSource", "Platform", "ScamReport", "RejectedRow", "ParseResult",
    "normalize_phone", "message_hash", "parse_reports", "serialize_reports",
    "dedupe_reports", "is_engagement_candidate", "redact_phone", "E164_RE",
]
