import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from anansi.cluster import (
    EMPTY_PAGE_FINGERPRINT,
    EmptyInput,
    IocGraph,
    canonicalize_template,
    cluster_pages,
    cluster_templates,
    fingerprint_page,
    ioc_components,
    jaccard,
)
from anansi.extract import IndicatorKind

TEMPLATE_1 = ("Hello! My name is {n} from {b}. We were really impressed with your "
              "profile and would like to provide you the chance to take on a flexible "
              "remote role. In this position, you would assist merchants by updating "
              "their data. Earn $250 to $500 daily.")
TEMPLATE_2 = ("Hello, I'm {n} from the {b} Recruiting team. Your profile caught our "
              "attention through multiple recruiting platforms and we believe you'd "
              "be a good fit for our current part-time remote job opportunity.")

NAMES = ["Jasmine Martine", "Judy", "Maya", "Linda Jackson", "Elowen"]
BRANDS = ["Target", "Amazon", "Costco", "Structube", "Qualtrics"]


def instantiate(template: str, n: str, b: str) -> str:
    return template.format(n=n, b=b)


def test_canonicalize_names_brands_amounts():
    text = "Hello! My name is Jasmine Martine from Target. Earn $250 to $500"
    canon = canonicalize_template(text).canonical_text
    assert "{NAME}" in canon
    assert "{BRAND}" in canon
    assert canon.count("{AMOUNT}") == 2
    assert "jasmine" not in canon and "target" not in canon


def test_template_instances_share_canonical_form():
    a = canonicalize_template(instantiate(TEMPLATE_1, "Jasmine Martine", "Target"))
    b = canonicalize_template(instantiate(TEMPLATE_1, "Judy", "Costco"))
    assert a.canonical_text == b.canonical_text


def test_canonicalize_idempotent_simple():
    text = "Hello! My name is Judy from Amazon. Visit tx11.vip, code: AB123"
    once = canonicalize_template(text)
    twice = canonicalize_template(once.canonical_text)
    assert once.canonical_text == twice.canonical_text


def test_canonicalize_idempotent_adjacency_edge():
    # dropping the stopword "and" makes the brand words adjacent
    text = "Warner and Bros offered me a job"
    once = canonicalize_template(text)
    twice = canonicalize_template(once.canonical_text)
    assert once.canonical_text == twice.canonical_text


@settings(max_examples=150)
@given(st.text(max_size=200))
def test_canonicalize_idempotent_property(text):
    once = canonicalize_template(text)
    twice = canonicalize_template(once.canonical_text)
    assert once.canonical_text == twice.canonical_text


def test_cluster_templates_substitution_corpus():
    rng = random.Random(42)
    messages = []
    for i in range(10):
        messages.append((f"m{i:03d}", instantiate(TEMPLATE_1, rng.choice(NAMES), rng.choice(BRANDS))))
    report = cluster_templates(messages)
    assert len(report.clusters) == 1
    assert report.clusters[0].size == 10
    assert report.is_partition()


def test_cluster_templates_two_distinct_templates():
    messages = []
    for i in range(5):
        messages.append((f"a{i}", instantiate(TEMPLATE_1, NAMES[i], BRANDS[i])))
        messages.append((f"b{i}", instantiate(TEMPLATE_2, NAMES[i], BRANDS[i])))
    report = cluster_templates(messages)
    assert len(report.clusters) == 2
    assert sorted(c.size for c in report.clusters) == [5, 5]


def test_cluster_templates_exact_threshold_splits_typo():
    base = instantiate(TEMPLATE_1, "Judy", "Target")
    typo = base.replace("merchants", "merchnats")
    report = cluster_templates([("x0", base), ("x1", typo)], jaccard_threshold=1.0)
    assert len(report.clusters) == 2


def test_cluster_templates_permutation_invariant():
    rng = random.Random(7)
    messages = [(f"m{i:02d}", instantiate(TEMPLATE_1, rng.choice(NAMES), rng.choice(BRANDS)))
                for i in range(8)]
    messages += [(f"n{i:02d}", instantiate(TEMPLATE_2, rng.choice(NAMES), rng.choice(BRANDS)))
                 for i in range(8)]
    report_a = cluster_templates(list(messages))
    shuffled = list(messages)
    rng.shuffle(shuffled)
    report_b = cluster_templates(shuffled)
    assert report_a.clusters == report_b.clusters


def test_cluster_templates_empty_raises():
    with pytest.raises(EmptyInput):
        cluster_templates([])


def test_jaccard_bounds():
    assert jaccard(frozenset(), frozenset()) == 1.0
    assert jaccard(frozenset({1}), frozenset()) == 0.0
    assert jaccard(frozenset({1, 2}), frozenset({2, 3})) == pytest.approx(1 / 3)


# --- IOC components ----------------------------------------------------------

def oracle_components(n_convs: list[str], edges: list[tuple[str, str]]) -> set[frozenset]:
    """Brute-force transitive closure over the conversation projection."""
    related = {c: {c} for c in n_convs}
    by_value: dict[str, set[str]] = {}
    for conv, value in edges:
        by_value.setdefault(value, set()).add(conv)
    changed = True
    while changed:
        changed = False
        for group in by_value.values():
            merged = set()
            for conv in group:
                merged |= related[conv]
            for conv in list(merged):
                merged |= related[conv]
            for conv in merged:
                if related[conv] != merged:
                    related[conv] = merged
                    changed = True
    return {frozenset(v) for v in related.values()}


def test_ioc_shared_domain_component():
    graph = IocGraph()
    for i in range(13):
        graph.add(f"conv-{i:02d}", "wpfm.structube.club", IndicatorKind.URL)
    report = ioc_components(graph)
    assert len(report.clusters) == 1
    assert report.clusters[0].size == 13
    assert not report.clusters[0].weak


def test_ioc_transitivity():
    graph = IocGraph()
    graph.add("A", "bc1qa6esq4c6wh6ahd6rmla69s32s7wzqkym7m2x77", IndicatorKind.BTC_ADDRESS)
    graph.add("B", "bc1qa6esq4c6wh6ahd6rmla69s32s7wzqkym7m2x77", IndicatorKind.BTC_ADDRESS)
    graph.add("B", "@banshou03", IndicatorKind.TELEGRAM_HANDLE)
    graph.add("C", "@banshou03", IndicatorKind.TELEGRAM_HANDLE)
    report = ioc_components(graph)
    assert len(report.clusters) == 1
    assert report.clusters[0].members == ("A", "B", "C")


def test_ioc_singletons_without_sharing():
    graph = IocGraph()
    graph.add("A", "x.vip", IndicatorKind.URL)
    graph.add("B", "y.vip", IndicatorKind.URL)
    graph.add_conversation("C")
    report = ioc_components(graph)
    assert len(report.clusters) == 3
    assert all(c.size == 1 for c in report.clusters)


def test_ioc_wallet_only_link_flagged_weak():
    graph = IocGraph()
    graph.add("A", "36x8XoD8Fu6y5VFk28Qn4tjSSViJ17BsE4", IndicatorKind.BTC_ADDRESS)
    graph.add("B", "36x8XoD8Fu6y5VFk28Qn4tjSSViJ17BsE4", IndicatorKind.BTC_ADDRESS)
    graph.add("C", "tx11.vip", IndicatorKind.URL)
    graph.add("D", "tx11.vip", IndicatorKind.URL)
    report = ioc_components(graph)
    by_exemplar = {c.exemplar: c for c in report.clusters}
    assert by_exemplar["A"].weak is True
    assert by_exemplar["C"].weak is False


def test_ioc_kind_filter():
    graph = IocGraph()
    graph.add("A", "shared.vip", IndicatorKind.URL)
    graph.add("B", "shared.vip", IndicatorKind.URL)
    report = ioc_components(graph, kinds={IndicatorKind.BTC_ADDRESS})
    assert all(c.size == 1 for c in report.clusters)


def test_ioc_matches_oracle_on_random_graphs():
    rng = random.Random(2025)
    for trial in range(100):
        n_convs = rng.randint(1, 25)
        n_vals = rng.randint(1, 25)
        convs = [f"c{i:02d}" for i in range(n_convs)]
        values = [f"ioc{i:02d}" for i in range(n_vals)]
        graph = IocGraph()
        for conv in convs:
            graph.add_conversation(conv)
        flat_edges = []
        for _ in range(rng.randint(0, 40)):
            conv, val = rng.choice(convs), rng.choice(values)
            graph.add(conv, val, IndicatorKind.URL)
            flat_edges.append((conv, val))
        report = ioc_components(graph)
        got = {frozenset(c.members) for c in report.clusters}
        want = oracle_components(convs, flat_edges)
        assert got == want, f"trial {trial}"
        assert report.is_partition()


# --- page fingerprints --------------------------------------------------------

PAGE_A1 = b"""<html><head><title>Task Center</title></head>
<body><div class="hero banner"><h1>Welcome to SuperMall</h1></div>
<div class="grid"><div class="card"><p>Rate this blender</p></div>
<div class="card"><p>Rate this lamp</p></div></div></body></html>"""

PAGE_A2 = b"""<html><head><title>Work Bench</title></head>
<body><div class="banner hero"><h1>Welcome to MegaShop</h1></div>
<div class="grid"><div class="card"><p>Review these headphones</p></div>
<div class="card"><p>Review this rug</p></div></div></body></html>"""

PAGE_B = b"""<html><body><table><tr><td>totally different layout</td></tr></table></body></html>"""


def test_fingerprint_same_template_equal():
    assert fingerprint_page(PAGE_A1) == fingerprint_page(PAGE_A2)


def test_fingerprint_different_structure_differs():
    assert fingerprint_page(PAGE_A1) != fingerprint_page(PAGE_B)


def test_fingerprint_empty_constant():
    assert fingerprint_page(b"") == EMPTY_PAGE_FINGERPRINT
    assert fingerprint_page(b"   just text, no tags ") == EMPTY_PAGE_FINGERPRINT


def test_fingerprint_invariant_under_random_text_rewrites():
    rng = random.Random(11)
    base = fingerprint_page(PAGE_A1)
    words = ["lorem", "ipsum", "crypto", "bonus", "task", "review"]
    text = PAGE_A1.decode()
    for _ in range(20):
        mutated = text.replace("blender", rng.choice(words)).replace(
            "SuperMall", rng.choice(words).title())
        assert fingerprint_page(mutated.encode()) == base


def test_cluster_pages_partition():
    report = cluster_pages([("p1", PAGE_A1), ("p2", PAGE_A2), ("p3", PAGE_B)])
    assert report.is_partition()
    assert sorted(c.size for c in report.clusters) == [1, 2]


# --- partition property over random template corpora ---------------------------

def test_partition_property_random_corpora():
    rng = random.Random(99)
    for _ in range(20):
        msgs = []
        for i in range(rng.randint(1, 30)):
            template = rng.choice([TEMPLATE_1, TEMPLATE_2, "Totally {n} unrelated {b} words"])
            msgs.append((f"m{i:03d}", instantiate(template, rng.choice(NAMES), rng.choice(BRANDS))))
        report = cluster_templates(msgs)
        assert report.is_partition()


def test_exact_template_method():
    base = instantiate(TEMPLATE_1, "Judy", "Target")
    near = base.replace("merchants", "sellers")  # same template, one word off
    report = cluster_templates([("x0", base), ("x1", near)], jaccard_threshold=None)
    assert report.method == "exact_template"
    assert len(report.clusters) == 2  # no near-duplicate merging
    merged = cluster_templates([("x0", base), ("x1", near)], jaccard_threshold=0.7)
    assert merged.method == "jaccard_template"
    assert len(merged.clusters) == 1
