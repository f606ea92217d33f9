"""Parallel chip-firing: the one-round update and eventual-cycle detection."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .graph import Graph

ChipConfig = tuple[int, ...]

DEFAULT_MAX_ROUNDS = 1_000_000


class BudgetExceeded(RuntimeError):
    """No recurrence was found within the round cap.

    This says the cap is too small; every finite game is eventually periodic.
    """

    def __init__(self, rounds: int):
        super().__init__(f"no recurring configuration within {rounds} rounds")
        self.rounds = rounds


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class CycleSummary:
    """Eventual cycle of a game.

    ``cycle_configs[t]`` is the configuration on round ``t0 + t`` and
    ``firing[t][v]`` is 1 when ``v`` fires on that round.  Rounds inside the
    cycle are counted from ``t0``.
    """

    graph: Graph
    initial: ChipConfig
    t0: int
    period: int
    cycle_configs: tuple[ChipConfig, ...]
    firing: tuple[tuple[int, ...], ...]

    @property
    def total(self) -> int:
        return sum(self.initial)

    @property
    def stabilizes(self) -> bool:
        return self.period == 1


def check_config(g: Graph, sigma) -> ChipConfig:
    sigma = tuple(sigma)
    if len(sigma) != g.n:
        raise ConfigError(f"config length {len(sigma)} != {g.n} vertices")
    for c in sigma:
        if not isinstance(c, int) or c < 0:
            raise ConfigError(f"chip counts must be nonnegative integers, got {c!r}")
    return sigma


def parse_config(text: str) -> ChipConfig:
    """Parse ``"2,2,0"``; ``"@path"`` reads the list from a file."""
    text = text.strip()
    if text.startswith("@"):
        text = Path(text[1:]).read_text().strip()
    try:
        values = tuple(int(x) for x in text.replace("\n", ",").split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"malformed config {text!r}") from None
    if not values:
        raise ConfigError("empty config")
    if any(v < 0 for v in values):
        raise ConfigError(f"chip counts must be nonnegative: {text!r}")
    return values


def format_config(sigma) -> str:
    return ",".join(str(c) for c in sigma)


def fires(g: Graph, sigma, v: int) -> bool:
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range 0..{g.n - 1}")
    return sigma[v] >= g.degree[v]


def firing_row(g: Graph, sigma) -> tuple[int, ...]:
    return tuple(int(c >= d) for c, d in zip(sigma, g.degree))


def step(g: Graph, sigma) -> ChipConfig:
    """One round: every vertex holding at least deg(v) chips sends one to each neighbor."""
    deg = g.degree
    adj = g.adjacency
    out = list(sigma)
    for v, c in enumerate(sigma):
        d = deg[v]
        if c >= d:
            out[v] -= d
            for u in adj[v]:
                out[u] += 1
    return tuple(out)


def simulate(g: Graph, sigma, rounds: int) -> list[ChipConfig]:
    """Configurations on rounds ``0..rounds``."""
    out = [tuple(sigma)]
    for _ in range(rounds):
        out.append(step(g, out[-1]))
    return out


def _summary(g: Graph, sigma: ChipConfig, t0: int, cycle: list[ChipConfig]) -> CycleSummary:
    deg = g.degree
    firing = tuple(tuple(int(c >= d) for c, d in zip(cfg, deg)) for cfg in cycle)
    return CycleSummary(g, sigma, t0, len(cycle), tuple(cycle), firing)


def find_cycle(g: Graph, sigma, max_rounds: int = DEFAULT_MAX_ROUNDS, low_memory: bool = False) -> CycleSummary:
    """Simulate until a configuration recurs and summarize the cycle.

    By default every configuration seen is kept in a dict (exact tuple keys),
    so the first repeat gives ``t0`` and the minimal period directly.  With
    ``low_memory`` Brent's teleporting-tortoise method is used instead.
    """
    sigma = check_config(g, sigma)
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    if low_memory:
        return _find_cycle_brent(g, sigma, max_rounds)
    seen = {sigma: 0}
    traj = [sigma]
    cur = sigma
    deg = g.degree
    adj = g.adjacency
    n = g.n
    for t in range(1, max_rounds + 1):
        out = list(cur)
        for v in range(n):
            c = cur[v]
            d = deg[v]
            if c >= d:
                out[v] -= d
                for u in adj[v]:
                    out[u] += 1
        cur = tuple(out)
        first = seen.get(cur)
        if first is not None:
            return _summary(g, sigma, first, traj[first:])
        seen[cur] = t
        traj.append(cur)
    raise BudgetExceeded(max_rounds)


def _find_cycle_brent(g: Graph, sigma: ChipConfig, max_rounds: int) -> CycleSummary:
    power = lam = 1
    tortoise = sigma
    hare = step(g, sigma)
    used = 1
    while tortoise != hare:
        if power == lam:
            tortoise = hare
            power *= 2
            lam = 0
        hare = step(g, hare)
        lam += 1
        used += 1
        if used > max_rounds:
            raise BudgetExceeded(max_rounds)
    tortoise = hare = sigma
    for _ in range(lam):
        hare = step(g, hare)
    mu = 0
    while tortoise != hare:
        tortoise = step(g, tortoise)
        hare = step(g, hare)
        mu += 1
    cycle = [tortoise]
    for _ in range(lam - 1):
        cycle.append(step(g, cycle[-1]))
    return _summary(g, sigma, mu, cycle)
