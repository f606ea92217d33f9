"""Acceptance criteria at their stated tolerances (all exact).

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion.  Run alone with ``pytest tests/test_acceptance.py``.
"""

import json
from fractions import Fraction

import pytest

from chipfire.assignment import check_assignment_lemmas
from chipfire.bipartite import verify_bipartite_lemmas, verify_theorem2
from chipfire.engine import find_cycle
from chipfire.graph import complete, complete_bipartite, cycle
from chipfire.sweep import default_graphs, random_graphs, staircase, verify_assignment_sweep, verify_range

SEED = 20240601
criterion = pytest.mark.criterion


def dump(report):
    return json.dumps(report.failures, indent=2)


@pytest.fixture(scope="module")
def small_graphs():
    return default_graphs(5)


@pytest.fixture(scope="module")
def theorem1_report(small_graphs):
    return verify_range("theorem1", small_graphs, workers=1)


@pytest.fixture(scope="module")
def conjecture1_reports(small_graphs):
    exhaustive = verify_range("conjecture1", small_graphs)
    sampled = verify_range("conjecture1", random_graphs(100, (6, 8), seed=SEED), mode="sample",
                           samples=100, seed=SEED)
    return exhaustive, sampled


@pytest.fixture(scope="module")
def theorem2_reports():
    return (verify_theorem2(2, "exhaustive"), verify_theorem2(3, "exhaustive"),
            verify_theorem2(4, "sample", samples=100_000, seed=SEED))


@pytest.fixture(scope="module")
def stabilization_report(small_graphs):
    return verify_range("stabilization", small_graphs, samples=200, seed=SEED)


@pytest.fixture(scope="module")
def assignment_report(small_graphs):
    return verify_assignment_sweep(small_graphs)


@pytest.fixture(scope="module")
def bipartite_reports():
    return verify_bipartite_lemmas(2), verify_bipartite_lemmas(3)


@pytest.fixture(scope="module")
def staircases():
    return {g.label(): (g, staircase(g, 50, seed=SEED)) for g in (complete_bipartite(4, 4), complete(6))}


@criterion(1, "no period 3 or 4 strictly between 2|E|-|V| and 2|E| chips (<=5 vertices, exhaustive)")
def test_criterion_1(theorem1_report):
    r = theorem1_report
    assert r.games_checked > 0 and not r.incomplete
    assert r.failures == [], dump(r)
    assert r.elapsed_ms < 5 * 60 * 1000


@criterion(2, "period 2 throughout the middle range (exhaustive <=5 vertices, 10,000 samples on 6-8 vertices)")
def test_criterion_2(conjecture1_reports):
    exhaustive, sampled = conjecture1_reports
    assert exhaustive.failures == [], dump(exhaustive)
    assert sampled.failures == [], dump(sampled)
    assert sampled.games_checked == 10_000
    assert exhaustive.stats["periods"] == {"2": exhaustive.games_checked}
    assert not exhaustive.incomplete and not sampled.incomplete


@criterion(3, "K_{a,a} period 2 for 2a^2-2a < |sigma| < 2a^2 (a=2,3 exhaustive, a=4 10^5 samples)")
def test_criterion_3(theorem2_reports):
    k22, k33, k44 = theorem2_reports
    for r in theorem2_reports:
        assert r.failures == [], dump(r)
        assert not r.incomplete
        assert set(r.stats["periods"]) == {"2"}
    assert k22.games_checked == 124
    assert k44.games_checked >= 100_000
    assert k33.elapsed_ms < 30_000


@criterion(4, "fewer than |E| or more than 3|E|-|V| chips stabilize with activity 0 / 1")
def test_criterion_4(stabilization_report):
    r = stabilization_report
    assert r.failures == [], dump(r)
    assert not r.incomplete and r.games_checked > 0
    assert r.stats["periods"] == {"1": r.games_checked}


@criterion(5, "invariant battery clean on every simulated game in every sweep")
def test_criterion_5(theorem1_report, conjecture1_reports, theorem2_reports, stabilization_report,
                     assignment_report, bipartite_reports, staircases):
    reports = [theorem1_report, *conjecture1_reports, *theorem2_reports, stabilization_report,
               assignment_report, *bipartite_reports] + [s.report for _, s in staircases.values()]
    battery = [f for r in reports for f in r.failures if f["detail"].startswith("battery")]
    assert battery == [], json.dumps(battery[:20], indent=2)
    assert all(r.games_checked > 0 for r in reports)


@criterion(6, "chip assignment certified on every compliant game (<=5 vertices) and the C_4 example")
def test_criterion_6(assignment_report):
    g = cycle(4)
    s = find_cycle(g, (2, 1, 1, 0))
    c4 = check_assignment_lemmas(g, s)
    assert c4.passed and s.period == 4
    r = assignment_report
    assert sum(r.stats["compliant"].values()) > 0
    assert r.failures == [], dump(r)


@criterion("6s", "supplementary: certification on compliant games whose vertices fire once per period")
def test_criterion_6_single_firing(assignment_report):
    r = assignment_report
    single = [f for f in r.failures if f.get("firings_per_period") == 1]
    assert r.stats["compliant"]["single_fire"] > 0
    assert single == [], json.dumps(single, indent=2)
    assert "single_fire" not in r.stats.get("failing_cycles", {})


@criterion(7, "bipartite lemma battery on every capped K_{2,2} and K_{3,3} config")
def test_criterion_7(bipartite_reports):
    k22, k33 = bipartite_reports
    assert k22.games_checked == 4 ** 4 and k33.games_checked == 6 ** 6
    for r in bipartite_reports:
        assert r.failures == [], dump(r)
        assert not r.incomplete


@criterion(8, "staircase stairs at exactly 0, 1/2 and 1 on K_{4,4} and K_6 (50 samples per total)")
def test_criterion_8(staircases):
    for label, (g, res) in staircases.items():
        n, m = g.n, g.m
        assert res.report.passed and not res.report.incomplete
        rows = {row.total: row for row in res.rows}
        assert sorted(rows) == list(range(4 * m + 1))
        for total, row in rows.items():
            assert len(row.activities) >= 50 and row.overflow == 0
            if total < m:
                want = Fraction(0)
            elif total > 3 * m - n:
                want = Fraction(1)
            elif 2 * m - n < total < 2 * m:
                want = Fraction(1, 2)
            else:
                continue
            assert set(row.activities) == {want}, f"{label} total {total}: {sorted(set(row.activities))}"


@criterion(9, "reports byte-identical at 1 and 8 workers for the same seed")
def test_criterion_9():
    graphs = random_graphs(8, (6, 8), seed=SEED)

    def runs(workers):
        return (
            verify_range("conjecture1", graphs, mode="sample", samples=50, seed=SEED, workers=workers).to_json(timing=False),
            verify_range("theorem1", default_graphs(4), workers=workers).to_json(timing=False),
            verify_theorem2(3, "sample", samples=2_000, seed=SEED, chunk=500, workers=workers).to_json(timing=False),
            staircase(complete_bipartite(3, 3), 10, seed=SEED, workers=workers).to_csv(),
        )

    one, eight = runs(1), runs(8)
    for a, b in zip(one, eight):
        assert a == b
