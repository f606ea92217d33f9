import pytest
from hypothesis import given, settings, strategies as st

from chipfire.engine import (
    BudgetExceeded, ConfigError, check_config, find_cycle, fires, format_config, parse_config, simulate, step,
)
from chipfire.graph import complete, cycle, path, random_connected

TRI = complete(3)
K2 = path(2)


def step_by_edges(g, sigma):
    # independent oracle: move one chip along each edge out of every firing endpoint
    out = list(sigma)
    for u, v in g.edges:
        if sigma[u] >= g.degree[u]:
            out[u] -= 1
            out[v] += 1
        if sigma[v] >= g.degree[v]:
            out[v] -= 1
            out[u] += 1
    return tuple(out)


def test_step_examples():
    assert step(TRI, (2, 2, 0)) == (1, 1, 2)
    assert step(TRI, (0, 1, 1)) == (0, 1, 1)
    assert step(K2, (1, 0)) == (0, 1)


def test_fires_examples():
    assert fires(TRI, (2, 2, 0), 0)
    assert not fires(TRI, (2, 2, 0), 2)
    assert fires(K2, (1, 0), 0)


def test_find_cycle_examples():
    s = find_cycle(TRI, (2, 0, 0))
    assert (s.t0, s.period, s.cycle_configs) == (1, 1, ((0, 1, 1),))
    s = find_cycle(TRI, (2, 2, 0))
    assert (s.t0, s.period, s.cycle_configs) == (0, 2, ((2, 2, 0), (1, 1, 2)))
    s = find_cycle(cycle(4), (2, 1, 1, 0))
    assert (s.t0, s.period) == (0, 4)
    assert s.cycle_configs == ((2, 1, 1, 0), (0, 2, 1, 1), (1, 0, 2, 1), (1, 1, 0, 2))
    assert s.firing == ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1))


def test_budget():
    with pytest.raises(BudgetExceeded):
        find_cycle(cycle(4), (2, 1, 1, 0), max_rounds=2)
    with pytest.raises(BudgetExceeded):
        find_cycle(cycle(4), (2, 1, 1, 0), max_rounds=2, low_memory=True)


def test_config_parsing(tmp_path):
    assert parse_config("2, 2,0") == (2, 2, 0)
    f = tmp_path / "c.txt"
    f.write_text("1\n2\n3\n")
    assert parse_config(f"@{f}") == (1, 2, 3)
    assert format_config((2, 2, 0)) == "2,2,0"
    with pytest.raises(ConfigError, match="config length 2 != 3 vertices"):
        check_config(TRI, (2, 2))
    for bad in ("", "1,x", "1,-2"):
        with pytest.raises(ConfigError):
            parse_config(bad)


def test_simulate_length():
    rows = simulate(TRI, (2, 2, 0), 3)
    assert rows == [(2, 2, 0), (1, 1, 2), (2, 2, 0), (1, 1, 2)]


graphs = st.sampled_from([complete(3), complete(4), cycle(5), path(4), random_connected(6, 9, seed=1)])


@st.composite
def games(draw):
    g = draw(graphs)
    sigma = tuple(draw(st.lists(st.integers(0, 3 * max(g.degree)), min_size=g.n, max_size=g.n)))
    return g, sigma


@settings(max_examples=200, deadline=None)
@given(games())
def test_step_matches_edge_oracle(game):
    g, sigma = game
    assert step(g, sigma) == step_by_edges(g, sigma)
    assert sum(step(g, sigma)) == sum(sigma)


@settings(max_examples=200, deadline=None)
@given(games())
def test_cycle_minimal_and_brent_agrees(game):
    g, sigma = game
    s = find_cycle(g, sigma)
    rows = simulate(g, sigma, s.t0 + s.period)
    # the first t0 + T configurations are distinct and the next one repeats the cycle start
    assert len(set(rows[:-1])) == s.t0 + s.period
    assert rows[-1] == rows[s.t0] == s.cycle_configs[0]
    b = find_cycle(g, sigma, low_memory=True)
    assert (b.t0, b.period, b.cycle_configs, b.firing) == (s.t0, s.period, s.cycle_configs, s.firing)
