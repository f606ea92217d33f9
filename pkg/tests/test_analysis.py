from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from chipfire.analysis import (
    ComplementUndefined, abundant_vertices, activity, complement, firing_sequence, invariant_battery,
    is_clumpy, is_compliant, is_dense,
)
from chipfire.engine import find_cycle
from chipfire.graph import complete, complete_bipartite, cycle, path, random_connected

TRI = complete(3)
K2 = path(2)
C4 = cycle(4)


def dense_oracle(s, g, v, periods=3):
    # unroll several periods and check every consecutive firing pair directly
    T = s.period
    fired = [t for t in range(periods * T) if s.firing[t % T][v]]
    for a, b in zip(fired, fired[1:]):
        for u in g.adjacency[v]:
            if not any(s.firing[t % T][u] for t in range(a + 1, b + 1)):
                return False
    return True


def test_firing_sequences():
    s = find_cycle(C4, (2, 1, 1, 0))
    assert firing_sequence(s, 0) == "1000"
    assert firing_sequence(find_cycle(TRI, (2, 2, 0)), 2) == "01"
    assert firing_sequence(find_cycle(TRI, (0, 1, 1)), 1) == "0"


@pytest.mark.parametrize("word,expected", [("1001", True), ("1010", False), ("0111", False), ("0", False), ("1100", True)])
def test_clumpy(word, expected):
    assert is_clumpy(word) is expected


def test_dense_examples():
    s = find_cycle(C4, (2, 1, 1, 0))
    assert is_dense(s, C4, 0)
    t = find_cycle(TRI, (2, 2, 0))
    assert is_dense(t, TRI, 0)
    idle = find_cycle(TRI, (0, 1, 1))
    assert is_dense(idle, TRI, 0)


def test_activity_examples():
    assert activity(find_cycle(TRI, (2, 2, 0))) == Fraction(1, 2)
    assert activity(find_cycle(TRI, (0, 1, 1))) == 0
    assert activity(find_cycle(K2, (1, 1))) == 1


def test_complement_examples():
    assert complement(TRI, (2, 2, 0)) == (1, 1, 3)
    assert complement(K2, (1, 0)) == (0, 1)
    with pytest.raises(ComplementUndefined):
        complement(TRI, (4, 0, 0))


def test_abundant_examples():
    assert abundant_vertices(TRI, (4, 0, 0)) == {0}
    assert abundant_vertices(TRI, (3, 0, 0)) == set()
    assert abundant_vertices(K2, (2, 0)) == {0}


def test_compliance_examples():
    assert is_compliant(find_cycle(C4, (2, 1, 1, 0)), C4)
    assert not is_compliant(find_cycle(TRI, (2, 2, 0)), TRI)
    assert not is_compliant(find_cycle(TRI, (0, 1, 1)), TRI)


@st.composite
def games(draw):
    g = draw(st.sampled_from([complete(4), cycle(5), cycle(6), complete_bipartite(2, 3), random_connected(6, 8, seed=2)]))
    sigma = tuple(draw(st.integers(0, 2 * d - 1)) for d in g.degree)
    return g, sigma


@settings(max_examples=300, deadline=None)
@given(games())
def test_dense_matches_unrolled_oracle(game):
    g, sigma = game
    s = find_cycle(g, sigma)
    for v in range(g.n):
        assert is_dense(s, g, v) == dense_oracle(s, g, v)


@settings(max_examples=300, deadline=None)
@given(games())
def test_battery_clean_on_random_games(game):
    g, sigma = game
    assert invariant_battery(g, find_cycle(g, sigma)) == []
