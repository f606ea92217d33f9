"""Conjugate configurations on K_{a,a} and the checks built on them.

Side L is vertices ``0..a-1`` and side R is ``a..2a-1``.  Within a side,
``L_1, ..., L_a`` orders vertices by chip count, largest first, ties by
vertex index; the ordering is fixed from the base configuration.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

from .analysis import activity, invariant_battery
from .engine import BudgetExceeded, ChipConfig, find_cycle, step
from .graph import Graph, bipartite_sides, complete_bipartite
from .report import VerificationReport, bump, failure_record
from .sweep import capped_compositions, count_capped, merge_results, rng_for, run_parallel, sample_capped


class NotBalancedBipartite(ValueError):
    pass


class ConjugateUndefined(ValueError):
    pass


@dataclass(frozen=True)
class SortedSides:
    a: int
    L_order: tuple[int, ...]
    R_order: tuple[int, ...]
    sigma_L: tuple[int, ...]
    sigma_R: tuple[int, ...]

    @property
    def total_L(self) -> int:
        return sum(self.sigma_L)

    @property
    def total_R(self) -> int:
        return sum(self.sigma_R)


@dataclass(frozen=True)
class ConjugateConfig:
    j: int
    config: ChipConfig


@dataclass(frozen=True)
class FireCountTable:
    """``u[t][v]`` counts firings of ``v`` on rounds ``0..t-1``.

    With a paired conjugate, ``u_conj`` holds the same for it and
    ``z[t][v] = u_conj[t][v] - u[t][v]``.
    """

    u: tuple[tuple[int, ...], ...]
    alpha_L: tuple[int, ...]
    alpha_R: tuple[int, ...]
    j: int | None = None
    u_conj: tuple[tuple[int, ...], ...] | None = None
    z: tuple[tuple[int, ...], ...] | None = None


def side_size(g: Graph) -> int:
    sides = bipartite_sides(g)
    if sides is None or sides[0] != sides[1]:
        raise NotBalancedBipartite(f"{g.label()} is not K_{{a,a}} with sides 0..a-1 and a..2a-1")
    return sides[0]


def sorted_sides(g: Graph, sigma) -> SortedSides:
    a = side_size(g)
    key = lambda v: (-sigma[v], v)  # noqa: E731
    L = tuple(sorted(range(a), key=key))
    R = tuple(sorted(range(a, 2 * a), key=key))
    return SortedSides(a, L, R, tuple(sigma[v] for v in L), tuple(sigma[v] for v in R))


def conjugate(ss: SortedSides, j: int) -> ConjugateConfig:
    """Shift the top ``j`` of each side by ``j - a`` and the rest by ``j``."""
    a = ss.a
    if not 1 <= j <= a:
        raise ValueError(f"conjugate index must lie in 1..{a}, got {j}")
    out = [0] * (2 * a)
    for order, vals in ((ss.L_order, ss.sigma_L), (ss.R_order, ss.sigma_R)):
        for i, (v, c) in enumerate(zip(order, vals), 1):
            out[v] = c + j - a if i <= j else c + j
    if min(out) < 0:
        raise ConjugateUndefined(f"conjugate j={j} has a negative entry: {out}")
    return ConjugateConfig(j, tuple(out))


def side_stats(ss: SortedSides) -> tuple[int, int, int, int]:
    """``(l_L, r_L, l_R, r_R)``: minimum chips on a side and how many of its vertices fire."""
    a = ss.a
    return (
        min(ss.sigma_L),
        sum(1 for c in ss.sigma_L if c >= a),
        min(ss.sigma_R),
        sum(1 for c in ss.sigma_R if c >= a),
    )


def _cumulative(g: Graph, sigma, horizon: int) -> tuple[tuple[int, ...], ...]:
    deg = g.degree
    rows = [(0,) * g.n]
    cur = tuple(sigma)
    for _ in range(horizon):
        rows.append(tuple(u + (c >= d) for u, c, d in zip(rows[-1], cur, deg)))
        cur = step(g, cur)
    return tuple(rows)


def fire_counts(g: Graph, sigma, horizon: int, paired: ConjugateConfig | None = None,
                _base=None) -> FireCountTable:
    a = side_size(g)
    if horizon < 0:
        raise ValueError("horizon must be nonnegative")
    u = _base if _base is not None else _cumulative(g, sigma, horizon)
    alpha_L = tuple(sum(row[:a]) for row in u)
    alpha_R = tuple(sum(row[a:]) for row in u)
    if paired is None:
        return FireCountTable(u, alpha_L, alpha_R)
    if len(paired.config) != g.n:
        raise ValueError(f"conjugate has {len(paired.config)} entries for a {g.n}-vertex graph")
    uc = _cumulative(g, paired.config, horizon)
    z = tuple(tuple(x - y for x, y in zip(rc, r)) for rc, r in zip(uc, u))
    return FireCountTable(u, alpha_L, alpha_R, paired.j, uc, z)


def theorem2_range(a: int) -> tuple[int, int]:
    """Inclusive chip totals strictly between 2a^2 - 2a and 2a^2."""
    return 2 * a * a - 2 * a + 1, 2 * a * a - 1


def _eq1_violations(cfg, a: int) -> list[str]:
    L = sorted(cfg[:a], reverse=True)
    R = sorted(cfg[a:], reverse=True)
    sides = [("L", L), ("R", R)]
    lighter = [sd for sd in sides if sum(sd[1]) == min(sum(L), sum(R))]
    out = []
    for name, vals in lighter:
        for i, c in enumerate(vals, 1):
            if a * c >= a * a + (a - 1) * (a - i) or c >= 2 * a - i:
                out.append(f"{name}_{i} holds {c} chips, bound requires < {2 * a - i}")
    return out


def check_bipartite_lemmas(g: Graph, sigma, horizon: int | None = None, battery: bool = True,
                           max_rounds: int = 100_000, summary=None) -> VerificationReport:
    """Check confinement, the conjugate firing-count bounds, activity equality
    under conjugation, the two-round growth bound and the in-range chip bound
    for one game on K_{a,a}.

    ``horizon`` defaults to ``t0 + 4T``.  Confinement and the chip bound are
    checked on cycle rounds.  Conjugates with a negative entry are skipped and
    tallied in ``stats["undefined_conjugates"]``.
    """
    ss = sorted_sides(g, sigma)
    a = ss.a
    sigma = tuple(sigma)
    report = VerificationReport("bipartite_lemmas")
    s = summary if summary is not None else find_cycle(g, sigma, max_rounds=max_rounds)
    report.games_checked = 1

    def fail(detail):
        report.failures.append(failure_record(g, sigma, s.t0, s.period, detail))

    if battery:
        for p in invariant_battery(g, s, max_rounds):
            fail(f"battery: {p}")
    A = activity(s)
    T = s.period
    H = s.t0 + 4 * T if horizon is None else horizon

    if 0 < A < 1:
        for t, cfg in enumerate(s.cycle_configs):
            for name, side in (("L", cfg[:a]), ("R", cfg[a:])):
                if max(side) - min(side) >= a:
                    fail(f"confinement: side {name} spread {max(side) - min(side)} >= {a} on cycle round {t}")

    base = fire_counts(g, sigma, H)
    undefined = 0
    for j in range(1, a + 1):
        try:
            cj = conjugate(ss, j)
        except ConjugateUndefined:
            undefined += 1
            continue
        table = fire_counts(g, sigma, H, cj, _base=base.u)
        for t in range(1, H + 1):
            for order in (ss.L_order, ss.R_order):
                for i, v in enumerate(order, 1):
                    z = table.z[t][v]
                    lo, hi = (-1, 0) if i <= j else (0, 1)
                    if not lo <= z <= hi:
                        fail(f"z-bound: j={j} t={t} vertex {v} (rank {i}) has z={z}, expected [{lo},{hi}]")
        try:
            sc = find_cycle(g, cj.config, max_rounds=max_rounds)
        except BudgetExceeded as exc:
            report.incomplete = True
            report.incomplete_reasons.append(f"conjugate j={j}: {exc}")
            continue
        if activity(sc) != A:
            fail(f"activity: A(sigma) = {A} but A(c^{j} sigma) = {activity(sc)}")
        if battery:
            for p in invariant_battery(g, sc, max_rounds):
                fail(f"battery (conjugate j={j}): {p}")

    u = base.u
    for name, side in (("L", range(a)), ("R", range(a, 2 * a))):
        if H >= 2 and all(u[2][v] >= 1 for v in side):
            for t in range(1, H // 2 + 1):
                low = [v for v in side if u[2 * t][v] < t]
                if low:
                    fail(f"growth: side {name} has u_{2 * t} < {t} at vertices {low}")
                    break

    lo, hi = theorem2_range(a)
    if lo <= sum(sigma) <= hi:
        for t, cfg in enumerate(s.cycle_configs):
            for msg in _eq1_violations(cfg, a):
                fail(f"chip bound on cycle round {t}: {msg}")

    report.stats = {"undefined_conjugates": undefined, "periods": {str(T): 1}}
    return report


def _bipartite_task(a: int, total: int, cap: int, horizon, battery: bool) -> VerificationReport:
    g = complete_bipartite(a, a)
    rep = VerificationReport("bipartite_lemmas")
    for sigma in capped_compositions(total, (cap,) * (2 * a)):
        rep.merge(check_bipartite_lemmas(g, sigma, horizon, battery))
    return rep


def verify_bipartite_lemmas(a: int, cap: int | None = None, horizon: int | None = None,
                            battery: bool = True, workers: int | None = 1) -> VerificationReport:
    """Run :func:`check_bipartite_lemmas` on every K_{a,a} config with entries at most ``cap``."""
    cap = 2 * a - 1 if cap is None else cap
    t_start = time.perf_counter()
    tasks = [(_bipartite_task, (a, total, cap, horizon, battery), {}) for total in range(2 * a * cap + 1)]
    params = {"a": a, "cap": cap, "horizon": horizon if horizon is not None else "t0+4T"}
    report = merge_results("bipartite_lemmas", params, run_parallel(tasks, workers))
    report.elapsed_ms = int((time.perf_counter() - t_start) * 1000)
    return report


def _theorem2_game(g: Graph, sigma, a: int, rep: VerificationReport, lemmas: bool, battery: bool,
                   max_rounds: int) -> None:
    statement_lo = 2 * a * a - a + 1
    try:
        s = find_cycle(g, sigma, max_rounds=max_rounds)
    except BudgetExceeded as exc:
        rep.incomplete = True
        rep.incomplete_reasons.append(f"sigma={list(sigma)}: {exc}")
        return
    rep.games_checked += 1
    bump(rep.stats, "periods", str(s.period))
    bump(rep.stats, "subranges", "statement" if sum(sigma) >= statement_lo else "proof_only")
    if s.period != 2:
        rep.failures.append(failure_record(g, sigma, s.t0, s.period, f"period {s.period} != 2"))
    if lemmas:
        sub = check_bipartite_lemmas(g, sigma, battery=battery, max_rounds=max_rounds, summary=s)
        rep.failures.extend(sub.failures)
        bump(rep.stats, "undefined_conjugates", by=sub.stats.get("undefined_conjugates", 0))
    elif battery:
        for p in invariant_battery(g, s, max_rounds):
            rep.failures.append(failure_record(g, sigma, s.t0, s.period, f"battery: {p}"))


def _theorem2_exhaustive_task(a, total, cap, lemmas, battery, max_rounds):
    g = complete_bipartite(a, a)
    rep = VerificationReport("theorem2")
    for sigma in capped_compositions(total, (cap,) * (2 * a)):
        _theorem2_game(g, sigma, a, rep, lemmas, battery, max_rounds)
    return rep


def _theorem2_sample_task(a, cap, count, seed, chunk, lemmas, battery, max_rounds):
    g = complete_bipartite(a, a)
    caps = (cap,) * (2 * a)
    lo, hi = theorem2_range(a)
    weights = [count_capped(t, caps) for t in range(lo, hi + 1)]
    rng = rng_for(seed, "theorem2", a, chunk)
    rep = VerificationReport("theorem2")
    for _ in range(count):
        total = rng.choices(range(lo, hi + 1), weights=weights)[0]
        _theorem2_game(g, sample_capped(total, caps, rng), a, rep, lemmas, battery, max_rounds)
    return rep


def verify_theorem2(a: int, mode: str = "exhaustive", samples: int = 100_000, seed: int | str = 0,
                    cap: int | None = None, lemmas: bool = True, battery: bool = True,
                    max_rounds: int = 100_000, workers: int | None = 1, chunk: int = 2_000) -> VerificationReport:
    """Check that every K_{a,a} game with 2a^2 - 2a < |sigma| < 2a^2 has period 2.

    Exhaustive mode covers every config with entries at most ``2a - 1``;
    since abundant vertices never occur on non-stabilizing cycles and the
    chip total is conserved, that box contains every cycle in the range.
    Sample mode draws ``samples`` configs uniformly from the in-range box
    (``cap`` may be raised to start games outside it).  Games are tallied
    separately for the stated range (above 2a^2 - a) and the wider part.
    """
    if a < 2:
        raise ValueError("theorem2 needs a >= 2")
    if mode not in ("exhaustive", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    cap = 2 * a - 1 if cap is None else cap
    lo, hi = theorem2_range(a)
    t_start = time.perf_counter()
    if mode == "exhaustive":
        tasks = [(_theorem2_exhaustive_task, (a, total, cap, lemmas, battery, max_rounds), {})
                 for total in range(lo, hi + 1)]
        params = {"a": a, "mode": mode, "cap": cap}
    else:
        sizes = [chunk] * (samples // chunk) + ([samples % chunk] if samples % chunk else [])
        tasks = [(_theorem2_sample_task, (a, cap, size, seed, i, lemmas, battery, max_rounds), {})
                 for i, size in enumerate(sizes)]
        params = {"a": a, "mode": mode, "cap": cap, "samples": samples, "seed": seed}
    report = merge_results("theorem2", params, run_parallel(tasks, workers))
    report.stats.setdefault("undefined_conjugates", 0)
    report.stats["range"] = [lo, hi]
    report.stats["statement_range"] = [2 * a * a - a + 1, hi]
    report.headline = {"a": a, "mode": mode, "range": [lo, hi],
                       "undefined_conjugates": report.stats["undefined_conjugates"]}
    report.elapsed_ms = int((time.perf_counter() - t_start) * 1000)
    return report

