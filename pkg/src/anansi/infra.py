"""Scam web infrastructure fingerprinting.

IP/provider attribution over an injected resolver, shared-IP clustering,
TLD mix vs a popularity baseline, redirect-rotation (fronting) probing,
and blocklist coverage. Nothing here touches the network directly: DNS
and HTTP are interfaces, and a deterministic in-process rotator ships for
tests and demos.
"""

from __future__ import annotations

import ipaddress
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from anansi.domains import PublicSuffixes, bundled_suffixes


class EmptyInput(ValueError):
    pass


class Unreachable(Exception):
    """Every probe visit failed."""


class ResolutionError(Exception):
    pass


# --- hosting attribution ------------------------------------------------------

class Resolver(Protocol):
    def resolve(self, domain: str) -> list[str]: ...


class FixtureResolver:
    """Resolver backed by a domain -> [ip] mapping; raises on misses."""

    def __init__(self, table: dict[str, list[str]]):
        self._table = {k.lower(): v for k, v in table.items()}

    def resolve(self, domain: str) -> list[str]:
        try:
            return list(self._table[domain.lower()])
        except KeyError:
            raise ResolutionError(f"NXDOMAIN {domain}") from None


class AsnTable:
    """Longest-prefix CIDR -> (asn, provider) lookup."""

    def __init__(self, rows: list[tuple[str, str, str]]):
        self._nets = sorted(
            ((ipaddress.ip_network(cidr), asn, provider) for cidr, asn, provider in rows),
            key=lambda item: item[0].prefixlen,
            reverse=True,
        )

    @classmethod
    def from_csv(cls, path: str | Path) -> "AsnTable":
        rows = []
        for line in Path(path).read_text("utf-8").splitlines():
            line = line.strip()
            if not line or line.startswith("cidr,"):
                continue
            cidr, asn, provider = (part.strip() for part in line.split(",", 2))
            rows.append((cidr, asn, provider))
        return cls(rows)

    def lookup(self, ip: str) -> tuple[str, str] | None:
        addr = ipaddress.ip_address(ip)
        for net, asn, provider in self._nets:
            if addr in net:
                return asn, provider
        return None


@dataclass(frozen=True)
class DomainProfile:
    domain: str
    sld: str
    tld: str
    resolved_ips: frozenset[str]
    provider: str | None
    keywords: tuple[str, ...]

    @property
    def registrable(self) -> str:
        return f"{self.sld}.{self.tld}"


@dataclass(frozen=True)
class SharedIpCluster:
    ip: str
    provider: str | None
    domains: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.domains)


@dataclass
class HostingReport:
    profiles: list[DomainProfile]
    clusters: list[SharedIpCluster]          # size >= 2 only
    failures: dict[str, str]                 # domain -> reason
    largest_by_provider: dict[str, int]


def _keywords(sld: str) -> tuple[str, ...]:
    return tuple(tok for tok in sld.replace("-", " ").split() if tok)


def attribute_hosting(
    domains: list[str],
    resolver: Resolver,
    asn_table: AsnTable,
    suffixes: PublicSuffixes | None = None,
) -> HostingReport:
    """Resolve domains, attribute providers, and report shared-IP clusters.

    Per-domain resolution failures are recorded, not fatal.
    """
    psl = suffixes or bundled_suffixes()
    profiles: list[DomainProfile] = []
    failures: dict[str, str] = {}
    by_ip: dict[str, list[str]] = {}
    ip_provider: dict[str, str | None] = {}

    for domain in domains:
        split = psl.split(domain)
        sld = split.sld if split else domain.split(".")[0]
        tld = split.suffix if split else domain.split(".")[-1]
        try:
            ips = resolver.resolve(domain)
        except ResolutionError as exc:
            failures[domain] = str(exc)
            profiles.append(DomainProfile(domain.lower(), sld, tld, frozenset(), None,
                                          _keywords(sld)))
            continue
        provider = None
        for ip in ips:
            hit = asn_table.lookup(ip)
            if hit and provider is None:
                provider = hit[1]
            ip_provider.setdefault(ip, hit[1] if hit else None)
            by_ip.setdefault(ip, []).append(domain.lower())
        profiles.append(DomainProfile(domain.lower(), sld, tld, frozenset(ips), provider,
                                      _keywords(sld)))

    clusters = [
        SharedIpCluster(ip=ip, provider=ip_provider.get(ip), domains=tuple(sorted(set(members))))
        for ip, members in sorted(by_ip.items())
        if len(set(members)) >= 2
    ]
    largest: dict[str, int] = {}
    for cluster in clusters:
        name = cluster.provider or "unknown"
        largest[name] = max(largest.get(name, 0), cluster.size)
    return HostingReport(profiles, clusters, failures, largest)


# --- TLD distribution -----------------------------------------------------------

BASELINE_ABSENT = math.inf


@dataclass(frozen=True)
class TldRow:
    tld: str
    count: int
    share_percent: float
    baseline_percent: float | None
    over_representation: float      # BASELINE_ABSENT sentinel when baseline is 0/missing


@dataclass
class TldDistribution:
    rows: list[TldRow]
    total: int


def load_baseline(path: str | Path) -> dict[str, float]:
    table: dict[str, float] = {}
    for line in Path(path).read_text("utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("tld,"):
            continue
        tld, share = line.split(",", 1)
        table[tld.strip().lower()] = float(share)
    return table


def tld_distribution(
    domains: list[str],
    baseline_table: dict[str, float],
    suffixes: PublicSuffixes | None = None,
) -> TldDistribution:
    """Public-suffix TLD counts joined against the baseline share table."""
    if not domains:
        raise EmptyInput("no domains")
    psl = suffixes or bundled_suffixes()
    counts: dict[str, int] = {}
    for domain in domains:
        split = psl.split(domain)
        tld = split.suffix if split else domain.rsplit(".", 1)[-1].lower()
        counts[tld] = counts.get(tld, 0) + 1
    total = sum(counts.values())
    rows = []
    for tld in sorted(counts, key=lambda t: (-counts[t], t)):
        share = counts[tld] / total * 100.0
        base = baseline_table.get(tld)
        if base:
            ratio = share / base
        else:
            ratio = BASELINE_ABSENT
        rows.append(TldRow(tld, counts[tld], share, base, ratio))
    return TldDistribution(rows, total)


# --- fronting probe ---------------------------------------------------------------

@dataclass(frozen=True)
class Visit:
    attempt: int
    final_url: str                  # "" when the visit failed
    redirect_chain: tuple[str, ...]
    error: str | None = None

    @property
    def ok(self) -> bool:
        return bool(self.final_url)


class Fetcher(Protocol):
    def fetch(self, url: str) -> tuple[str, list[str]]:
        """Returns (final_url, redirect_chain); raises on network failure."""


@dataclass
class FrontingReport:
    probe_url: str
    visits: list[Visit]
    distinct_destinations: int
    sld_clusters: dict[str, int]
    common_path: str | None
    verdict: str                    # fronting_suspected | stable | unreachable

    def to_json(self) -> str:
        return json.dumps({
            "probe_url": self.probe_url,
            "visits": [
                {"attempt": v.attempt, "final_url": v.final_url,
                 "redirect_chain": list(v.redirect_chain), "error": v.error}
                for v in self.visits
            ],
            "distinct_destinations": self.distinct_destinations,
            "sld_clusters": self.sld_clusters,
            "common_path": self.common_path,
            "verdict": self.verdict,
        }, sort_keys=True)


def _url_parts(url: str) -> tuple[str, str]:
    rest = url.split("://", 1)[1] if "://" in url else url
    host, slash, path = rest.partition("/")
    return host.lower(), (slash + path if slash else "/")


def _common_path(paths: list[str], min_support: float = 0.8) -> str | None:
    """Longest segment-prefix path shared by >= min_support of destinations."""
    if not paths:
        return None
    candidates: dict[str, int] = {}
    for path in paths:
        segments = path.split("/")
        for depth in range(1, len(segments) + 1):
            prefix = "/".join(segments[:depth]) or "/"
            candidates[prefix] = candidates.get(prefix, 0) + 1
    best: str | None = None
    for prefix, support in sorted(candidates.items()):
        if support / len(paths) >= min_support and prefix != "/":
            if best is None or len(prefix) > len(best):
                best = prefix
    return best


def report_from_visits(
    probe_url: str,
    visits: list[Visit],
    suffixes: PublicSuffixes | None = None,
    min_half: bool = True,
) -> FrontingReport:
    """Deterministic report over a recorded visit transcript.

    Verdict is fronting_suspected iff distinct final destinations reach
    half the visit count (rounded up) and at least two destinations share
    a common path.
    """
    psl = suffixes or bundled_suffixes()
    ok_visits = [v for v in visits if v.ok]
    destinations = sorted({v.final_url for v in ok_visits})
    sld_counts: dict[str, int] = {}
    paths = []
    for dest in destinations:
        host, path = _url_parts(dest)
        split = psl.split(host)
        sld = split.registrable if split else host
        sld_counts[sld] = sld_counts.get(sld, 0) + 1
        paths.append(path)
    common = _common_path(paths)
    shared_by_two = common is not None and len(destinations) >= 2

    if not ok_visits:
        verdict = "unreachable"
    elif len(destinations) >= math.ceil(len(visits) / 2) and shared_by_two:
        verdict = "fronting_suspected"
    else:
        verdict = "stable"
    return FrontingReport(
        probe_url=probe_url,
        visits=visits,
        distinct_destinations=len(destinations),
        sld_clusters=sld_counts,
        common_path=common,
        verdict=verdict,
    )


def probe_fronting(
    url: str,
    n_visits: int,
    fetcher: Fetcher,
    suffixes: PublicSuffixes | None = None,
) -> FrontingReport:
    """Fetch `url` n_visits times sequentially and assess rotation.

    Raises Unreachable when no visit succeeds.
    """
    if n_visits < 2:
        raise ValueError("n_visits must be >= 2")
    visits: list[Visit] = []
    for attempt in range(n_visits):
        try:
            final_url, chain = fetcher.fetch(url)
            visits.append(Visit(attempt, final_url, tuple(chain)))
        except Exception as exc:
            visits.append(Visit(attempt, "", (url,), error=str(exc)))
    if not any(v.ok for v in visits):
        raise Unreachable(url)
    return report_from_visits(url, visits, suffixes)


class SimulatedRotator:
    """In-process stand-in for a fronting domain: each visit lands on the
    next destination in a fixed rotation, always on the same landing path."""

    def __init__(
        self,
        front_host: str,
        destinations: list[str],
        landing_path: str = "/index/user/login.html",
        interstitial: str | None = None,
    ):
        self.front_host = front_host.lower()
        self.destinations = list(destinations)
        self.landing_path = landing_path
        self.interstitial = interstitial
        self._visit = 0

    def fetch(self, url: str) -> tuple[str, list[str]]:
        host, _ = _url_parts(url)
        if host != self.front_host:
            raise ConnectionError(f"unknown host {host}")
        dest = self.destinations[self._visit % len(self.destinations)]
        self._visit += 1
        final = f"https://{dest}{self.landing_path}"
        chain = [url]
        if self.interstitial:
            chain.append(self.interstitial)
        chain.append(final)
        return final, chain


class StaticSite:
    """Fetcher that always lands on one URL (no rotation)."""

    def __init__(self, final_url: str):
        self.final_url = final_url

    def fetch(self, url: str) -> tuple[str, list[str]]:
        return self.final_url, [url, self.final_url]


class DeadHost:
    def fetch(self, url: str) -> tuple[str, list[str]]:
        raise ConnectionError("connection refused")


# --- blocklist coverage ------------------------------------------------------------

def load_blocklist(path: str | Path) -> set[str]:
    return {
        line.strip().lower()
        for line in Path(path).read_text("utf-8").splitlines()
        if line.strip() and not line.startswith("#")
    }


def blocklist_coverage(
    domains: list[str],
    blocklists: dict[str, set[str]],
    suffixes: PublicSuffixes | None = None,
) -> dict[str, float]:
    """Per-list percentage of input domains present, matched on the
    registrable domain."""
    psl = suffixes or bundled_suffixes()
    if not domains:
        return {name: 0.0 for name in blocklists}
    registrables = []
    for domain in domains:
        split = psl.split(domain)
        registrables.append(split.registrable if split else domain.lower())
    out: dict[str, float] = {}
    for name, listed in blocklists.items():
        hits = sum(1 for reg in registrables if reg in listed)
        out[name] = hits / len(registrables) * 100.0
    return out
