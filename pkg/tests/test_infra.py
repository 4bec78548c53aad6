import math
import random

import pytest

from anansi.infra import (
    AsnTable,
    BASELINE_ABSENT,
    DeadHost,
    EmptyInput,
    FixtureResolver,
    SimulatedRotator,
    StaticSite,
    Unreachable,
    attribute_hosting,
    blocklist_coverage,
    load_baseline,
    probe_fronting,
    report_from_visits,
    tld_distribution,
)

ASN_ROWS = [
    ("192.252.179.0/24", "AS64500", "INTEGEN-2"),
    ("104.16.0.0/13", "AS13335", "CLOUDFLARENET"),
    ("203.0.113.0/24", "AS64501", "HKUNITED-HK"),
]


def make_tld_fixture() -> list[str]:
    """102 domains matching the observed scam TLD mixture."""
    spread = [("com", 34), ("vip", 17), ("lat", 7), ("club", 6), ("dev", 4),
              ("icu", 9), ("xyz", 8), ("cyou", 7), ("top", 6), ("cc", 4)]
    domains = []
    for tld, count in spread:
        domains.extend(f"site{i:02d}.{tld}" for i in range(count))
    assert len(domains) == 102
    return domains


def test_shared_ip_cluster_of_12():
    domains = [f"task{i:02d}.example-jobs.vip" for i in range(12)]
    resolver = FixtureResolver({d: ["192.252.179.27"] for d in domains})
    report = attribute_hosting(domains, resolver, AsnTable(ASN_ROWS))
    assert len(report.clusters) == 1
    cluster = report.clusters[0]
    assert cluster.size == 12
    assert cluster.ip == "192.252.179.27"
    assert cluster.provider == "INTEGEN-2"
    assert report.largest_by_provider["INTEGEN-2"] == 12


def test_nxdomain_recorded_not_fatal():
    resolver = FixtureResolver({"alive.vip": ["104.17.1.1"]})
    report = attribute_hosting(["alive.vip", "gone.vip"], resolver, AsnTable(ASN_ROWS))
    assert "gone.vip" in report.failures
    profile = {p.domain: p for p in report.profiles}["gone.vip"]
    assert profile.resolved_ips == frozenset()
    alive = {p.domain: p for p in report.profiles}["alive.vip"]
    assert alive.provider == "CLOUDFLARENET"


def test_two_distinct_ips_no_cluster():
    resolver = FixtureResolver({"a.vip": ["104.17.1.1"], "b.vip": ["104.17.1.2"]})
    report = attribute_hosting(["a.vip", "b.vip"], resolver, AsnTable(ASN_ROWS))
    assert report.clusters == []


def test_hosting_accounting_partition():
    rng = random.Random(3)
    domains = [f"d{i:02d}.club" for i in range(30)]
    table = {}
    for i, domain in enumerate(domains):
        if i % 7 == 0:
            continue  # will fail resolution
        table[domain] = [f"104.17.0.{rng.randint(1, 5)}"]
    resolver = FixtureResolver(table)
    report = attribute_hosting(domains, resolver, AsnTable(ASN_ROWS))
    clustered = sum(c.size for c in report.clusters)
    in_cluster = {d for c in report.clusters for d in c.domains}
    singles = sum(
        1 for p in report.profiles
        if p.resolved_ips and p.domain not in in_cluster
    )
    assert clustered + singles + len(report.failures) == len(domains)


def test_tld_distribution_matches_observed_mixture():
    dist = tld_distribution(make_tld_fixture(), load_baseline_bundled())
    rows = {r.tld: r for r in dist.rows}
    assert rows["com"].share_percent == pytest.approx(33.33, abs=0.01)
    assert rows["vip"].share_percent == pytest.approx(16.67, abs=0.01)
    assert rows["lat"].share_percent == pytest.approx(6.86, abs=0.01)
    assert rows["club"].share_percent == pytest.approx(5.88, abs=0.01)
    assert rows["dev"].share_percent == pytest.approx(3.92, abs=0.01)
    assert rows["vip"].over_representation == pytest.approx(53.8, abs=0.1)
    assert sum(r.share_percent for r in dist.rows) == pytest.approx(100.0, abs=0.01)


def load_baseline_bundled() -> dict[str, float]:
    from importlib import resources
    with resources.as_file(resources.files("anansi").joinpath("data", "tld_baseline.csv")) as p:
        return load_baseline(p)


def test_tld_single_domain():
    dist = tld_distribution(["a.vip"], {"vip": 0.31})
    assert dist.rows[0].share_percent == 100.0


def test_tld_absent_baseline_sentinel():
    dist = tld_distribution(["ex.zz"], {"vip": 0.31})
    assert dist.rows[0].over_representation == BASELINE_ABSENT
    assert math.isinf(dist.rows[0].over_representation)


def test_tld_empty_raises():
    with pytest.raises(EmptyInput):
        tld_distribution([], {})


def test_tld_shares_sum_property():
    rng = random.Random(8)
    tlds = ["com", "vip", "icu", "xyz", "top", "zz"]
    for _ in range(25):
        domains = [f"d{i}.{rng.choice(tlds)}" for i in range(rng.randint(1, 60))]
        dist = tld_distribution(domains, {"com": 43.96})
        assert sum(r.share_percent for r in dist.rows) == pytest.approx(100.0, abs=0.01)


def make_rotator() -> SimulatedRotator:
    return SimulatedRotator(
        front_host="portal.front-maint.icu",
        destinations=[
            "a1.rot-east.cyou", "b1.rot-west.cyou", "a2.rot-east.cyou",
            "b2.rot-west.cyou", "a3.rot-east.cyou", "b3.rot-west.cyou",
        ],
    )


def test_fronting_rotator_detected():
    report = probe_fronting("https://portal.front-maint.icu", 10, make_rotator())
    assert report.verdict == "fronting_suspected"
    assert report.distinct_destinations == 6
    assert report.common_path == "/index/user/login.html"
    assert report.sld_clusters == {"rot-east.cyou": 3, "rot-west.cyou": 3}


def test_fronting_static_site_stable():
    fetcher = StaticSite("https://legit-looking.club/home")
    report = probe_fronting("https://legit-looking.club", 10, fetcher)
    assert report.verdict == "stable"
    assert report.distinct_destinations == 1


def test_fronting_unreachable():
    with pytest.raises(Unreachable):
        probe_fronting("https://dead.example.icu", 3, DeadHost())


def test_fronting_replay_deterministic():
    report = probe_fronting("https://portal.front-maint.icu", 10, make_rotator())
    replayed = report_from_visits(report.probe_url, report.visits)
    assert replayed.to_json() == report.to_json()


def test_fronting_min_visits():
    with pytest.raises(ValueError):
        probe_fronting("https://x.icu", 1, make_rotator())


def test_blocklist_coverage_basic():
    domains = [f"dom{i}.vip" for i in range(10)]
    lists = {
        "aggregator": {"dom0.vip", "dom1.vip", "dom2.vip"},
        "empty": set(),
        "full": {f"dom{i}.vip" for i in range(10)},
    }
    cov = blocklist_coverage(domains, lists)
    assert cov["aggregator"] == pytest.approx(30.0)
    assert cov["empty"] == 0.0
    assert cov["full"] == 100.0


def test_blocklist_registrable_matching():
    # subdomain input should match the registrable entry
    cov = blocklist_coverage(["login.bad-site.club"], {"bl": {"bad-site.club"}})
    assert cov["bl"] == 100.0


def test_blocklist_monotone_under_superset():
    rng = random.Random(13)
    domains = [f"d{i}.top" for i in range(20)]
    small = {rng.choice(domains) for _ in range(5)}
    big = small | {rng.choice(domains) for _ in range(8)}
    cov = blocklist_coverage(domains, {"small": small, "big": big})
    assert cov["big"] >= cov["small"]
    assert 0.0 <= cov["small"] <= cov["big"] <= 100.0
