from dataclasses import replace

import pytest

from chipfire.assignment import (
    NotCompliant, ObligationUnmet, build_assignment, check_assignment_lemmas, classify_edges,
    deprived_count, edge_classes, first_fire_partition, track_chips, verify_valid,
)
from chipfire.engine import find_cycle
from chipfire.graph import complete, cycle

C4 = cycle(4)
TRI = complete(3)


@pytest.fixture
def c4():
    s = find_cycle(C4, (2, 1, 1, 0))
    return s, build_assignment(C4, s)


def test_partition_examples():
    p = first_fire_partition(find_cycle(C4, (2, 1, 1, 0)))
    assert p.classes == (frozenset({0}), frozenset({1}), frozenset({2}), frozenset({3}))
    p = first_fire_partition(find_cycle(TRI, (2, 2, 0)))
    assert p.classes == (frozenset({0, 1}), frozenset({2}))
    with pytest.raises(ValueError):
        first_fire_partition(find_cycle(TRI, (0, 1, 1)))


def test_edge_class_examples():
    ec = edge_classes(first_fire_partition(find_cycle(C4, (2, 1, 1, 0))), C4)
    E = C4.edges
    assert [E[e] for e in ec.cross(0, 1)] == [(0, 1)]
    assert [E[e] for e in ec.cross(1, 2)] == [(1, 2)]
    assert [E[e] for e in ec.cross(2, 3)] == [(2, 3)]
    assert [E[e] for e in ec.cross(0, 3)] == [(0, 3)]
    assert all(ec.e(t) == [] for t in range(4))
    ec = edge_classes(first_fire_partition(find_cycle(TRI, (2, 2, 0))), TRI)
    assert [TRI.edges[e] for e in ec.e(0)] == [(0, 1)]
    assert sorted(TRI.edges[e] for e in ec.cross(0, 1)) == [(0, 2), (1, 2)]


def test_c4_construction(c4):
    s, a = c4
    E = C4.edges
    assert a.n_chips == 4
    by_edge = {E[e]: (h, r) for e, h, r in zip(a.chip_edge, a.chip_home, a.chip_round)}
    assert by_edge == {(0, 1): (0, 0), (1, 2): (1, 1), (2, 3): (2, 2), (0, 3): (3, 3)}
    assert a.locations == ((0, 0, 1, 2), (1, 3, 1, 2), (0, 3, 2, 2), (0, 3, 1, 3), (0, 0, 1, 2))
    assert track_chips(C4, s, a) == a.locations


def test_c4_validity_and_weights(c4):
    s, a = c4
    ec = edge_classes(first_fire_partition(s), C4)
    assert verify_valid(a, ec)
    wc = classify_edges(a, ec, a.locations)
    assert wc.heavy == frozenset() and wc.light == frozenset(range(4))


def test_c4_deprived(c4):
    s, a = c4
    tr = a.locations
    assert deprived_count(C4, a, tr, 1, 0) == 1
    assert deprived_count(C4, a, tr, 0, 3) == 1
    assert deprived_count(C4, a, tr, 2, 2) == 0


def test_c4_lemmas():
    r = check_assignment_lemmas(C4, find_cycle(C4, (2, 1, 1, 0)))
    assert r.passed and r.stats == {"light": 4, "heavy": 0, "chips": 4}


def test_not_compliant():
    s = find_cycle(TRI, (2, 2, 0))
    with pytest.raises(NotCompliant):
        build_assignment(TRI, s)
    with pytest.raises(NotCompliant):
        check_assignment_lemmas(TRI, s)


def test_tampered_assignment(c4):
    s, a = c4
    # the chip of edge (0,1) re-tied to (1,2) cannot follow v0's firing
    bad = replace(a, chip_edge=(1,) + a.chip_edge[1:])
    with pytest.raises(ObligationUnmet):
        track_chips(C4, s, bad)


def test_invalid_assignments(c4):
    s, a = c4
    ec = edge_classes(first_fire_partition(s), C4)
    missing = replace(a, chip_edge=a.chip_edge[:3], chip_home=a.chip_home[:3], chip_round=a.chip_round[:3])
    assert not verify_valid(missing, ec)
    unassigned = replace(a, chip_edge=a.chip_edge[:3] + (None,))
    assert not verify_valid(unassigned, ec)
    triple = replace(a, chip_edge=(0, 0, 0, 3), chip_home=(0, 1, 0, 3))
    assert not verify_valid(triple, ec)


def test_multi_firing_counterexample():
    # C5 game where each vertex fires twice per period: the vertex that fires
    # first is left empty on the round before, with no light back-edge to count
    from chipfire.graph import Graph
    g = Graph(5, ((0, 3), (0, 4), (1, 2), (1, 4), (2, 3)))
    s = find_cycle(g, (2, 2, 1, 0, 0))
    assert s.period == 5 and all(sum(row[v] for row in s.firing) == 2 for v in range(5))
    r = check_assignment_lemmas(g, s)
    assert not r.passed
