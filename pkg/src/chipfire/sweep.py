"""Configuration spaces, claim sweeps, staircase tables and the worker pool.

Randomness: every task draws from its own ``random.Random`` seeded with the
string ``"<seed>/<task key>"``, so results do not depend on how tasks are
spread over workers.  ``CHIPFIRE_THREADS`` sets the default worker count.
"""

from __future__ import annotations

import csv
import io
import os
import random
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .analysis import activity, invariant_battery, is_compliant
from .engine import BudgetExceeded, ChipConfig, find_cycle
from .graph import Graph, connected_graphs_up_to, random_connected
from .report import VerificationReport, bump, failure_record

CLAIMS = ("theorem1", "conjecture1", "stabilization")
STAIRCASE_HEADER = ["total", "mean_chips", "activity_min", "activity_max", "activity_mean", "periods"]


# -- randomness and workers ------------------------------------------------------

def rng_for(seed, *keys) -> random.Random:
    return random.Random("/".join(str(k) for k in (seed,) + keys))


def resolve_workers(workers: int | None = None) -> int:
    """Explicit count wins, then ``CHIPFIRE_THREADS``, then 1."""
    if workers is None:
        env = os.environ.get("CHIPFIRE_THREADS", "").strip()
        workers = int(env) if env else 1
    if workers < 1:
        raise ValueError(f"worker count must be >= 1, got {workers}")
    return workers


@dataclass
class TaskFailure:
    index: int
    error: str


def _invoke(task):
    fn, args, kwargs = task
    try:
        return fn(*args, **kwargs)
    except Exception as exc:  # surfaced to the caller as a failed entry
        return TaskFailure(-1, f"{type(exc).__name__}: {exc}")


def run_parallel(tasks: Iterable, workers: int | None = 1) -> list:
    """Run ``(fn, args, kwargs)`` tasks and return results in task order.

    An exception inside a task, or a dead worker process, yields a
    :class:`TaskFailure` in that task's slot.
    """
    tasks = list(tasks)
    if not tasks:
        return []
    workers = resolve_workers(workers)
    if workers == 1:
        results = [_invoke(t) for t in tasks]
    else:
        results = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            it = pool.map(_invoke, tasks)
            try:
                for r in it:
                    results.append(r)
            except BrokenProcessPool as exc:
                results.extend(TaskFailure(-1, f"worker died: {exc}") for _ in range(len(tasks) - len(results)))
    for i, r in enumerate(results):
        if isinstance(r, TaskFailure):
            r.index = i
    return results


def merge_results(claim: str, parameters: dict, results: Sequence) -> VerificationReport:
    report = VerificationReport(claim, parameters=parameters)
    for r in results:
        if isinstance(r, TaskFailure):
            report.failures.append({"task": r.index, "detail": f"task failed: {r.error}"})
        else:
            report.merge(r)
    return report


# -- configuration spaces --------------------------------------------------------

def default_caps(g: Graph) -> tuple[int, ...]:
    """2 deg(v) - 1: the largest count a vertex can hold on a non-stabilizing cycle."""
    return tuple(2 * d - 1 for d in g.degree)


def capped_compositions(total: int, caps: Sequence[int]) -> Iterator[ChipConfig]:
    """Every ``x`` with ``sum(x) == total`` and ``0 <= x[i] <= caps[i]``, in lexicographic order."""
    n = len(caps)
    suffix = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + caps[i]
    if total < 0 or total > suffix[0]:
        return
    cur = [0] * n

    def rec(i, rem):
        if i == n - 1:
            cur[i] = rem
            yield tuple(cur)
            return
        for x in range(max(0, rem - suffix[i + 1]), min(caps[i], rem) + 1):
            cur[i] = x
            yield from rec(i + 1, rem - x)

    if n == 0:
        if total == 0:
            yield ()
        return
    yield from rec(0, total)


@lru_cache(maxsize=256)
def _count_table(total: int, caps: tuple[int, ...]) -> list[list[int]]:
    # W[i][s]: ways for parts i.. to sum to s
    n = len(caps)
    W = [[0] * (total + 1) for _ in range(n + 1)]
    W[n][0] = 1
    for i in range(n - 1, -1, -1):
        prefix = [0]
        for s in range(total + 1):
            prefix.append(prefix[-1] + W[i + 1][s])
        for s in range(total + 1):
            W[i][s] = prefix[s + 1] - prefix[max(0, s - caps[i])]
    return W


def count_capped(total: int, caps: Sequence[int]) -> int:
    if total < 0:
        return 0
    return _count_table(total, tuple(caps))[0][total]


def sample_capped(total: int, caps: Sequence[int] | None, rng: random.Random, n: int | None = None) -> ChipConfig:
    """Uniform draw among capped compositions (``caps=None`` means uncapped, needs ``n``)."""
    if caps is None:
        caps = (total,) * n
    W = _count_table(total, tuple(caps))
    if W[0][total] == 0:
        raise ValueError(f"no configuration with total {total} fits caps {list(caps)}")
    out = []
    rem = total
    for i, cap in enumerate(caps):
        r = rng.randrange(W[i][rem])
        for x in range(min(cap, rem) + 1):
            w = W[i + 1][rem - x]
            if r < w:
                break
            r -= w
        out.append(x)
        rem -= x
    return tuple(out)


@dataclass(frozen=True)
class ConfigSpace:
    """Configs on ``graph`` with chip total ``total`` and per-vertex ``caps``
    (default 2 deg(v) - 1).  ``mode`` is ``exhaustive`` or ``sample``."""

    graph: Graph
    total: int
    caps: tuple[int, ...] | None = None
    mode: str = "exhaustive"
    count: int = 0
    seed: int | str = 0

    def effective_caps(self) -> tuple[int, ...]:
        return self.caps if self.caps is not None else default_caps(self.graph)


def enumerate_configs(space: ConfigSpace) -> Iterator[ChipConfig]:
    caps = space.effective_caps()
    if space.total > sum(caps):
        warnings.warn(f"total {space.total} exceeds cap sum {sum(caps)}; no configurations", RuntimeWarning)
        return
    if space.mode == "exhaustive":
        yield from capped_compositions(space.total, caps)
    elif space.mode == "sample":
        rng = rng_for(space.seed, "configs", space.total)
        for _ in range(space.count):
            yield sample_capped(space.total, caps, rng)
    else:
        raise ValueError(f"unknown mode {space.mode!r}")


# -- claim sweeps -------------------------------------------------------------------

def claim_totals(claim: str, g: Graph) -> range:
    n, m = g.n, g.m
    if claim in ("theorem1", "conjecture1"):
        return range(2 * m - n + 1, 2 * m)
    if claim == "stabilization_low":
        return range(0, m)
    if claim == "stabilization_high":
        return range(3 * m - n + 1, 6 * m + 1)
    raise ValueError(f"unknown claim {claim!r}")


def _check_game(g: Graph, sigma, claim: str, rep: VerificationReport, battery: bool, max_rounds: int) -> None:
    try:
        s = find_cycle(g, sigma, max_rounds=max_rounds)
    except BudgetExceeded as exc:
        rep.incomplete = True
        rep.incomplete_reasons.append(f"{g.label()} sigma={list(sigma)}: {exc}")
        return
    rep.games_checked += 1
    bump(rep.stats, "periods", str(s.period))
    T = s.period
    if claim == "theorem1" and T in (3, 4):
        rep.failures.append(failure_record(g, sigma, s.t0, T, f"period {T} in the range 2|E|-|V| < |sigma| < 2|E|"))
    elif claim == "conjecture1" and T != 2:
        rep.failures.append(failure_record(g, sigma, s.t0, T, f"period {T} != 2"))
    elif claim == "stabilization_low" and (T != 1 or activity(s) != 0):
        rep.failures.append(failure_record(g, sigma, s.t0, T, f"expected a dead stable game, got T={T} A={activity(s)}"))
    elif claim == "stabilization_high" and (T != 1 or activity(s) != 1):
        rep.failures.append(failure_record(g, sigma, s.t0, T, f"expected an all-firing stable game, got T={T} A={activity(s)}"))
    if battery:
        for p in invariant_battery(g, s, max_rounds):
            rep.failures.append(failure_record(g, sigma, s.t0, T, f"battery: {p}"))


def _range_task(claim, g, totals, caps, mode, samples, seed, key, battery, max_rounds, limit):
    rep = VerificationReport(claim)
    if mode == "exhaustive":
        configs = (c for t in totals for c in capped_compositions(t, caps))
    else:
        rng = rng_for(seed, claim, key)
        weights = [count_capped(t, caps) for t in totals]
        picks = [t for t, w in zip(totals, weights) if w]
        weights = [w for w in weights if w]

        def draw():
            for _ in range(samples):
                yield sample_capped(rng.choices(picks, weights=weights)[0], caps, rng)

        configs = draw() if picks else iter(())
    for k, sigma in enumerate(configs):
        if limit is not None and k >= limit:
            rep.incomplete = True
            rep.incomplete_reasons.append(f"game budget reached in task {key}")
            break
        _check_game(g, sigma, claim, rep, battery, max_rounds)
    return rep


def _claim_parts(claim: str, g: Graph, mode: str):
    """(sub-claim, totals, caps, mode) pieces making up one claim on one graph."""
    if claim in ("theorem1", "conjecture1"):
        return [(claim, claim_totals(claim, g), default_caps(g), mode)]
    if claim == "stabilization":
        low = claim_totals("stabilization_low", g)
        # the low range is small enough to enumerate with no caps at all
        return [
            ("stabilization_low", low, (max(low.stop - 1, 0),) * g.n, mode),
            ("stabilization_high", claim_totals("stabilization_high", g), tuple(3 * d for d in g.degree), "sample"),
        ]
    raise ValueError(f"unknown claim {claim!r}; choose from {', '.join(CLAIMS)}")


def verify_range(claim: str, graphs: Sequence[Graph], mode: str = "exhaustive", samples: int = 100,
                 seed: int | str = 0, battery: bool = True, max_rounds: int = 100_000,
                 workers: int | None = 1, max_games: int | None = None) -> VerificationReport:
    """Check one chip-count claim over every graph in ``graphs``.

    ``theorem1`` forbids periods 3 and 4 and ``conjecture1`` demands period 2
    for 2|E|-|V| < |sigma| < 2|E| (caps 2 deg(v) - 1).  ``stabilization``
    demands a dead stable game for |sigma| < |E| (uncapped, exhaustive) and an
    all-firing stable game for |sigma| > 3|E|-|V| (caps 3 deg(v), always
    sampled with ``samples`` draws per graph).  In ``sample`` mode each graph
    gets ``samples`` configs drawn uniformly from its in-range box.
    """
    graphs = list(graphs)
    if not graphs:
        raise ValueError("empty graph stream")
    if mode not in ("exhaustive", "sample"):
        raise ValueError(f"unknown mode {mode!r}")
    t_start = time.perf_counter()
    tasks = []
    budget = max_games
    over = False
    for gi, g in enumerate(graphs):
        for sub, totals, caps, sub_mode in _claim_parts(claim, g, mode):
            if sub_mode == "exhaustive":
                pieces = [(range(t, t + 1), count_capped(t, caps)) for t in totals]
            else:
                pieces = [(totals, samples)]
            for pi, (tot, size) in enumerate(pieces):
                limit = None
                if budget is not None:
                    if budget <= 0:
                        over = True
                        break
                    if size > budget:
                        limit = budget
                    budget -= min(size, budget)
                tasks.append((_range_task, (sub, g, tot, caps, sub_mode, samples, seed,
                                            f"{gi}/{sub}/{pi}", battery, max_rounds, limit), {}))
    params = {"claim": claim, "mode": mode, "graphs": len(graphs), "seed": seed,
              "samples": samples if mode == "sample" or claim == "stabilization" else None,
              "max_rounds": max_rounds, "max_games": max_games}
    report = merge_results(claim, params, run_parallel(tasks, workers))
    if over:
        report.incomplete = True
        report.incomplete_reasons.append("game budget reached before all graphs were scheduled")
    report.elapsed_ms = int((time.perf_counter() - t_start) * 1000)
    return report


def random_graphs(count: int, n_range: tuple[int, int], seed: int | str) -> list[Graph]:
    """``count`` random connected graphs; vertex and edge counts drawn uniformly."""
    rng = rng_for(seed, "graphs")
    out = []
    for i in range(count):
        n = rng.randint(*n_range)
        m = rng.randint(n - 1, n * (n - 1) // 2)
        out.append(random_connected(n, m, seed=f"{seed}/graph/{i}"))
    return out


# -- assignment sweep -------------------------------------------------------------

def _assignment_task(g: Graph, total: int, battery: bool, max_rounds: int) -> VerificationReport:
    from .assignment import check_assignment_lemmas

    rep = VerificationReport("assignment_lemmas")
    for sigma in capped_compositions(total, default_caps(g)):
        try:
            s = find_cycle(g, sigma, max_rounds=max_rounds)
        except BudgetExceeded as exc:
            rep.incomplete = True
            rep.incomplete_reasons.append(f"{g.label()} sigma={list(sigma)}: {exc}")
            continue
        rep.games_checked += 1
        if battery:
            for p in invariant_battery(g, s, max_rounds):
                rep.failures.append(failure_record(g, sigma, s.t0, s.period, f"battery: {p}"))
        # each cycle start is itself a config in the box, so t0 == 0 picks every cycle rotation once
        if s.t0 != 0 or not is_compliant(s, g):
            continue
        fires = sum(row[0] for row in s.firing)
        kind = "single_fire" if fires == 1 else "multi_fire"
        bump(rep.stats, "compliant", kind)
        bump(rep.stats, "compliant_periods", str(s.period))
        sub = check_assignment_lemmas(g, s)
        if sub.failures:
            bump(rep.stats, "failing_cycles", kind)
        for f in sub.failures:
            f["firings_per_period"] = fires
        rep.failures.extend(sub.failures)
    return rep


def verify_assignment_sweep(graphs: Sequence[Graph], battery: bool = True, max_rounds: int = 100_000,
                            workers: int | None = 1) -> VerificationReport:
    """Find every compliant cycle on ``graphs`` (all configs with caps
    2 deg(v) - 1, every total) and certify its chip assignment."""
    t_start = time.perf_counter()
    tasks = [(_assignment_task, (g, total, battery, max_rounds), {})
             for g in graphs for total in range(sum(default_caps(g)) + 1)]
    report = merge_results("assignment_lemmas", {"graphs": len(graphs), "caps": "2deg-1"},
                           run_parallel(tasks, workers))
    report.stats.setdefault("compliant", {})
    report.elapsed_ms = int((time.perf_counter() - t_start) * 1000)
    return report


def default_graphs(n_max: int = 5) -> list[Graph]:
    return connected_graphs_up_to(n_max, dedup=True)


# -- staircase ------------------------------------------------------------------------

@dataclass
class StaircaseRow:
    total: int
    mean_chips: Fraction
    activities: list = field(default_factory=list)
    periods: dict = field(default_factory=dict)
    overflow: int = 0

    def csv_fields(self) -> list[str]:
        acts = self.activities
        hist = [f"{p}:{c}" for p, c in sorted(self.periods.items())]
        if self.overflow:
            hist.append(f"overflow:{self.overflow}")
        if not acts:
            return [str(self.total), str(self.mean_chips), "", "", "", ";".join(hist)]
        mean = sum(acts, Fraction(0)) / len(acts)
        return [str(self.total), str(self.mean_chips), str(min(acts)), str(max(acts)), str(mean), ";".join(hist)]


@dataclass
class StaircaseResult:
    rows: list
    report: VerificationReport

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(STAIRCASE_HEADER)
        for row in self.rows:
            w.writerow(row.csv_fields())
        return buf.getvalue()


def _staircase_task(g: Graph, total: int, samples: int, seed, max_rounds: int, battery: bool):
    rng = rng_for(seed, "staircase", total)
    row = StaircaseRow(total, Fraction(total, g.n))
    rep = VerificationReport("staircase_battery")
    for _ in range(samples):
        sigma = sample_capped(total, None, rng, n=g.n)
        try:
            s = find_cycle(g, sigma, max_rounds=max_rounds)
        except BudgetExceeded:
            row.overflow += 1
            continue
        rep.games_checked += 1
        row.activities.append(activity(s))
        row.periods[s.period] = row.periods.get(s.period, 0) + 1
        if battery:
            for p in invariant_battery(g, s, max_rounds):
                rep.failures.append(failure_record(g, sigma, s.t0, s.period, f"battery: {p}"))
    if row.overflow:
        rep.incomplete = True
        rep.incomplete_reasons.append(f"total {total}: {row.overflow} samples exceeded {max_rounds} rounds")
    return row, rep


def staircase(g: Graph, samples_per_total: int, seed: int | str = 0, max_rounds: int = 100_000,
              battery: bool = True, workers: int | None = 1) -> StaircaseResult:
    """Activity against chip density: for every total 0..4|E|, draw uncapped
    configs uniformly and record activity range, exact mean and period counts."""
    if samples_per_total < 1:
        raise ValueError("samples_per_total must be >= 1")
    tasks = [(_staircase_task, (g, total, samples_per_total, seed, max_rounds, battery), {})
             for total in range(4 * g.m + 1)]
    rows = []
    report = VerificationReport("staircase_battery", parameters={
        "graph": g.label(), "samples_per_total": samples_per_total, "seed": seed, "max_rounds": max_rounds})
    for total, r in enumerate(run_parallel(tasks, workers)):
        if isinstance(r, TaskFailure):
            report.failures.append({"task": r.index, "detail": f"task failed: {r.error}"})
            rows.append(StaircaseRow(total, Fraction(total, g.n), overflow=samples_per_total))
            continue
        row, rep = r
        rows.append(row)
        report.merge(rep)
    return StaircaseResult(rows, report)
