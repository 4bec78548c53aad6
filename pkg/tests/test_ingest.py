import csv
import io
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anansi.ingest import (
    MissingHeader,
    Platform,
    ReportSource,
    UndecodableInput,
    UnparsablePhone,
    dedupe_reports,
    is_engagement_candidate,
    normalize_phone,
    parse_reports,
    serialize_reports,
)

NOW = datetime(2026, 1, 31, tzinfo=timezone.utc)


def make_csv(rows: list[list[str]]) -> bytes:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["phone", "message", "scam_type", "date"])
    writer.writerows(rows)
    return out.getvalue().encode("utf-8")


def test_parse_basic_row():
    raw = make_csv([["+15551234567", "Hello! My name is Judy from Target.", "Employment", "2025-04-14"]])
    result = parse_reports(raw, "portal_csv", now=NOW)
    assert not result.rejects
    (rep,) = result.reports
    assert rep.phone == "+15551234567"
    assert rep.scam_type_label == "Employment"
    assert rep.source == ReportSource.PORTAL
    assert rep.reported_at == datetime(2025, 4, 14, tzinfo=timezone.utc)


def test_transcript_block():
    raw = (
        "From: (555) 123-4567\n"
        "Date: 2025-05-01\n"
        "Hello! We found your resume on Indeed.\n"
        "Reply YES to start earning $500 daily.\n"
        "\n"
        "From: +1 631 555 0142\n"
        "Second block body.\n"
    ).encode()
    result = parse_reports(raw, "transcript_text", now=NOW)
    assert not result.rejects
    first, second = result.reports
    assert first.phone == "+15551234567"
    assert first.source == ReportSource.SUBMISSION
    assert "resume on Indeed" in first.message_text
    assert second.phone == "+16315550142"


def test_row_missing_message_goes_to_rejects():
    raw = make_csv([
        ["+15551234567", "", "Employment", "2025-04-14"],
        ["+15557654321", "real message", "Employment", "2025-04-14"],
    ])
    result = parse_reports(raw, "portal_csv", now=NOW)
    assert len(result.reports) == 1
    assert result.rejects[0].reason == "missing field: message"
    assert result.rejects[0].index == 0


def test_counts_partition_rows():
    rows = [
        ["+15551230001", "msg a", "Employment", "2025-04-14"],
        ["not-a-phone", "msg b", "Employment", "2025-04-14"],
        ["+15551230002", "msg c", "Other", "bad-date"],
        ["+15551230003", "msg d", "Employment", "2030-01-01"],  # future
        ["+15551230004", "msg e", "Employment", "2025-06-01"],
    ]
    result = parse_reports(make_csv(rows), "portal_csv", now=NOW)
    assert len(result.reports) + len(result.rejects) == len(rows)
    assert len(result.reports) == 2


def test_missing_header():
    with pytest.raises(MissingHeader):
        parse_reports(b"a,b,c\n1,2,3\n", "portal_csv", now=NOW)


def test_undecodable_input():
    with pytest.raises(UndecodableInput):
        parse_reports(b"\xff\xfe\x00bad", "portal_csv", now=NOW)


def test_normalize_phone_us():
    assert normalize_phone("(631) 555-0142", "US") == "+16315550142"
    assert normalize_phone("1 631 555 0142", "US") == "+16315550142"


def test_normalize_phone_explicit_cc_wins():
    assert normalize_phone("+44 20 7946 0958", "US") == "+442079460958"


def test_normalize_phone_too_short():
    with pytest.raises(UnparsablePhone):
        normalize_phone("555", "US")


def test_normalize_phone_too_long():
    with pytest.raises(UnparsablePhone):
        normalize_phone("+123456789012345678", "US")


@settings(max_examples=50)
@given(st.text(alphabet="0123456789()-. +", min_size=7, max_size=20))
def test_normalize_phone_idempotent(raw):
    try:
        once = normalize_phone(raw, "US")
    except UnparsablePhone:
        return
    assert normalize_phone(once, "US") == once


def test_dedupe_rules():
    raw = make_csv([
        ["+15551234567", "same text", "Employment", "2025-04-14"],
        ["+15551234567", "same   TEXT", "Employment", "2025-04-14"],  # ws/case-collapsed dup
        ["+15551234567", "different text", "Employment", "2025-04-14"],
        ["+15559999999", "same text", "Employment", "2025-04-14"],
    ])
    reports = parse_reports(raw, "portal_csv", now=NOW).reports
    deduped = dedupe_reports(reports)
    assert len(deduped) == 3
    assert dedupe_reports(deduped) == deduped  # idempotent


def test_engagement_candidate_label():
    raw = make_csv([
        ["+15551230001", "a", "Employment", "2025-04-14"],
        ["+15551230002", "b", "employment", "2025-04-14"],
        ["+15551230003", "c", "Romance", "2025-04-14"],
    ])
    reports = parse_reports(raw, "portal_csv", now=NOW).reports
    assert [is_engagement_candidate(r) for r in reports] == [True, True, False]
    assert reports[2].scam_type_label == "Romance"  # retained verbatim


_messages = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",), blacklist_characters="\r\x00"),
    min_size=1, max_size=120,
).filter(lambda s: s.strip())
_phones = st.integers(min_value=2_000_000_00, max_value=9_999_999_999).map(
    lambda n: f"+1{n:010d}" if n >= 2_000_000_000 else f"+1555{n % 10_000_000:07d}"
)
_labels = st.sampled_from(["Employment", "Romance", "Delivery", "Tax", "Crypto Investment"])
_dates = st.datetimes(
    min_value=datetime(2025, 4, 14), max_value=datetime(2026, 1, 31)
).map(lambda d: d.replace(tzinfo=timezone.utc))


@settings(max_examples=25)
@given(st.lists(st.tuples(_phones, _messages, _labels, _dates), min_size=5, max_size=8))
def test_roundtrip_portal_csv(rows):
    raw = make_csv([[p, m, lab, d.isoformat()] for p, m, lab, d in rows])
    first = parse_reports(raw, "portal_csv", now=NOW)
    again = parse_reports(serialize_reports(first.reports), "portal_csv", now=NOW)
    assert again.reports == first.reports
    assert not again.rejects


def test_roundtrip_bulk_100_rows():
    rows = [
        [f"+1555{i:07d}", f"message body {i} with, comma and \"quotes\"", "Employment",
         (NOW - timedelta(days=i % 200)).isoformat()]
        for i in range(120)
    ]
    first = parse_reports(make_csv(rows), "portal_csv", now=NOW)
    assert len(first.reports) == 120
    again = parse_reports(serialize_reports(first.reports), "portal_csv", now=NOW)
    assert again.reports == first.reports


def test_platform_hint_from_transcript():
    raw = (
        "From: +15550001111\n"
        "Platform: telegram\n"
        "Join our task group now.\n"
    ).encode()
    (rep,) = parse_reports(raw, "transcript_text", now=NOW).reports
    assert rep.platform_hint == Platform.TELEGRAM
