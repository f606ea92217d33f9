"""Predicates and statistics on detected cycles: firing words, density,
activity, complement games, abundance and compliance."""

from __future__ import annotations

from fractions import Fraction

from .engine import BudgetExceeded, ChipConfig, CycleSummary, find_cycle, step
from .graph import Graph


class ComplementUndefined(ValueError):
    pass


def _check_vertex(s: CycleSummary, v: int) -> None:
    if not 0 <= v < s.graph.n:
        raise IndexError(f"vertex {v} out of range 0..{s.graph.n - 1}")


def firing_sequence(s: CycleSummary, v: int) -> str:
    """The cyclic fire/wait word of ``v`` over one period, e.g. ``"1000"``."""
    _check_vertex(s, v)
    return "".join(str(row[v]) for row in s.firing)


def cyclic_factors(word: str) -> set[str]:
    T = len(word)
    return {word[t] + word[(t + 1) % T] for t in range(T)}


def is_clumpy(word: str) -> bool:
    if not word:
        raise ValueError("empty firing sequence")
    f = cyclic_factors(word)
    return "00" in f and "11" in f


def firing_rounds(s: CycleSummary, v: int) -> list[int]:
    return [t for t, row in enumerate(s.firing) if row[v]]


def is_dense(s: CycleSummary, g: Graph, v: int) -> bool:
    """Between consecutive firings ``a < b`` of ``v`` (wrap-around included),
    every neighbor fires on some round in ``(a, b]``.  Vacuously true if ``v``
    never fires."""
    _check_vertex(s, v)
    T = s.period
    rounds = firing_rounds(s, v)
    if not rounds:
        return True
    firing = s.firing
    pairs = list(zip(rounds, rounds[1:])) + [(rounds[-1], rounds[0] + T)]
    for a, b in pairs:
        for u in g.adjacency[v]:
            if not any(firing[t % T][u] for t in range(a + 1, b + 1)):
                return False
    return True


def activity(s: CycleSummary) -> Fraction:
    fired = sum(sum(row) for row in s.firing)
    return Fraction(fired, s.period * s.graph.n)


def complement(g: Graph, sigma) -> ChipConfig:
    """sigma_c(v) = 2 deg(v) - 1 - sigma(v)."""
    out = tuple(2 * d - 1 - c for c, d in zip(sigma, g.degree))
    if any(c < 0 for c in out):
        bad = [v for v, c in enumerate(out) if c < 0]
        raise ComplementUndefined(f"complement undefined: abundant vertices {bad}")
    return out


def abundant_vertices(g: Graph, sigma) -> set[int]:
    return {v for v, (c, d) in enumerate(zip(sigma, g.degree)) if c >= 2 * d}


def is_compliant(s: CycleSummary, g: Graph) -> bool:
    """Period at least 3, no vertex fires on two consecutive rounds, and every
    firing sequence is dense."""
    if s.period < 3:
        return False
    for v in range(g.n):
        if "11" in cyclic_factors(firing_sequence(s, v)):
            return False
    return all(is_dense(s, g, v) for v in range(g.n))


def invariant_battery(g: Graph, s: CycleSummary, max_rounds: int = 100_000) -> list[str]:
    """Run the per-game invariant checks; return one message per violation.

    Covers chip conservation, equal firing counts per cycle, absence of
    clumpy words, absence of abundant vertices on non-stabilizing cycles and
    complement duality wherever the complement is defined.
    """
    problems = []
    total = sum(s.initial)
    T = s.period
    cycle = s.cycle_configs
    for t, cfg in enumerate(cycle):
        if sum(cfg) != total:
            problems.append(f"conservation: round {t} holds {sum(cfg)} chips, expected {total}")
    if step(g, cycle[-1]) != cycle[0]:
        problems.append("periodicity: cycle does not close")
    counts = {sum(row[v] for row in s.firing) for v in range(g.n)}
    if len(counts) != 1:
        problems.append(f"equal firing counts: per-vertex counts {sorted(counts)}")
    for v in range(g.n):
        w = firing_sequence(s, v)
        if is_clumpy(w):
            problems.append(f"clumpy firing sequence {w} at vertex {v}")
    if T > 1:
        for t, cfg in enumerate(cycle):
            ab = abundant_vertices(g, cfg)
            if ab:
                problems.append(f"abundant vertices {sorted(ab)} on cycle round {t}")
    if all(c <= 2 * d - 1 for c, d in zip(cycle[0], g.degree)):
        try:
            sc = find_cycle(g, complement(g, cycle[0]), max_rounds=max_rounds)
        except BudgetExceeded as exc:
            problems.append(f"complement: {exc}")
        else:
            if sc.t0 != 0:
                problems.append(f"complement: transient {sc.t0} != 0")
            if sc.period != T:
                problems.append(f"complement: period {sc.period} != {T}")
            elif any(fc != 1 - f for rc, r in zip(sc.firing, s.firing) for fc, f in zip(rc, r)):
                problems.append("complement: firing matrix is not the negation")
    return problems
