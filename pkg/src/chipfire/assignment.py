"""Valid chip assignments for compliant games.

Every chip is tied to one edge incident to the vertex holding it, and chips
only ever cross the edge they are tied to.  The construction walks the
cycle round by round: vertices first firing on round ``t`` (the class
``S_t``) assign the chips they hold on that round, and the class ``S_0``
finishes the job on round ``T``.  Any step the construction cannot take is
raised as :class:`AssignmentFalsified` rather than patched over.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, replace

from .analysis import firing_rounds, is_compliant
from .engine import CycleSummary
from .graph import Graph
from .report import VerificationReport, failure_record


class NotCompliant(ValueError):
    pass


class AssignmentFalsified(RuntimeError):
    """The construction or chip tracking hit a contradiction."""

    def __init__(self, detail: str, round: int | None = None, vertex: int | None = None):
        super().__init__(detail)
        self.detail = detail
        self.round = round
        self.vertex = vertex


class ObligationUnmet(AssignmentFalsified):
    pass


@dataclass(frozen=True)
class FirstFirePartition:
    classes: tuple[frozenset[int], ...]
    class_of: tuple[int, ...]

    @property
    def period(self) -> int:
        return len(self.classes)


def first_fire_partition(s: CycleSummary) -> FirstFirePartition:
    class_of = []
    for v in range(s.graph.n):
        rounds = firing_rounds(s, v)
        if not rounds:
            raise ValueError(f"vertex {v} never fires in the cycle; first-fire partition undefined")
        class_of.append(rounds[0])
    classes = tuple(frozenset(v for v, k in enumerate(class_of) if k == t) for t in range(s.period))
    return FirstFirePartition(classes, tuple(class_of))


@dataclass(frozen=True)
class EdgeClasses:
    """Edges grouped by the first-fire classes of their endpoints (indices mod T)."""

    graph: Graph
    partition: FirstFirePartition

    @property
    def period(self) -> int:
        return self.partition.period

    def classes_of_edge(self, e: int) -> tuple[int, int]:
        u, v = self.graph.edges[e]
        return self.partition.class_of[u], self.partition.class_of[v]

    def e(self, t: int) -> list[int]:
        t %= self.period
        return [i for i in range(self.graph.m) if self.classes_of_edge(i) == (t, t)]

    def cross(self, t: int, t2: int) -> list[int]:
        t, t2 = t % self.period, t2 % self.period
        if t == t2:
            raise ValueError("cross classes need distinct indices")
        return [i for i in range(self.graph.m) if sorted(self.classes_of_edge(i)) == sorted((t, t2))]

    def e_at(self, t: int, v: int) -> list[int]:
        return [e for e in self.e(t) if v in self.graph.edges[e]]

    def cross_at(self, t: int, t2: int, v: int) -> list[int]:
        return [e for e in self.cross(t, t2) if v in self.graph.edges[e]]

    def is_consecutive(self, e: int) -> bool:
        a, b = self.classes_of_edge(e)
        T = self.period
        return a != b and ((a + 1) % T == b or (b + 1) % T == a)

    def orient(self, e: int) -> tuple[int, int]:
        """For an edge of E_{t,t+1}: ``(endpoint in S_t, endpoint in S_{t+1})``."""
        u, v = self.graph.edges[e]
        a, b = self.classes_of_edge(e)
        if (a + 1) % self.period == b:
            return u, v
        if (b + 1) % self.period == a:
            return v, u
        raise ValueError(f"edge {e} does not join consecutive classes")


def edge_classes(p: FirstFirePartition, g: Graph) -> EdgeClasses:
    return EdgeClasses(g, p)


@dataclass(frozen=True)
class ChipAssignment:
    """Chip ``i`` is tied to edge ``chip_edge[i]`` by vertex ``chip_home[i]``
    on round ``chip_round[i]``.  ``locations[t][i]`` is its vertex on cycle
    round ``t`` for ``t = 0..T``."""

    graph: Graph
    summary: CycleSummary
    chip_edge: tuple
    chip_home: tuple
    chip_round: tuple
    locations: tuple[tuple[int, ...], ...]

    @property
    def n_chips(self) -> int:
        return len(self.chip_edge)

    def chips_on(self, e: int) -> list[int]:
        return [c for c, x in enumerate(self.chip_edge) if x == e]

    def to_dict(self) -> dict:
        g = self.graph
        s = self.summary
        return {
            "graph": g.to_dict(),
            "sigma": list(s.initial),
            "t0": s.t0,
            "T": s.period,
            "cycle_start": list(s.cycle_configs[0]),
            "chips": [
                {
                    "chip_id": c,
                    "edge": list(g.edges[self.chip_edge[c]]) if self.chip_edge[c] is not None else None,
                    "home": self.chip_home[c],
                    "assigned_round": self.chip_round[c],
                    "locations": [row[c] for row in self.locations],
                }
                for c in range(self.n_chips)
            ],
        }


def _holdings(n: int, loc) -> list[list[int]]:
    held: list[list[int]] = [[] for _ in range(n)]
    for c, v in enumerate(loc):
        held[v].append(c)
    return held


def _fire(g: Graph, frow, loc, chip_edge, t: int, crossed=None) -> list[int]:
    """Move chips for one round of firing.

    Each firing endpoint of an edge sends one chip tied to that edge.  When
    both endpoints fire and only one side holds such a chip, that chip goes
    over and straight back (no net move).  With ``crossed`` given, untied
    chips may stand in; ``crossed[c]`` records the last edge chip ``c`` used.
    """
    tied = defaultdict(list)
    free = defaultdict(list)
    for c, v in enumerate(loc):
        if chip_edge[c] is None:
            free[v].append(c)
        else:
            tied[(v, chip_edge[c])].append(c)
    used = set()

    def take_free(v, e):
        if crossed is None:
            return None
        pool = [c for c in free[v] if c not in used]
        if not pool:
            return None
        pick = next((c for c in pool if crossed[c] == e), None)
        if pick is None:
            pick = next((c for c in pool if crossed[c] is None), pool[0])
        used.add(pick)
        return pick

    new = list(loc)
    moved = []
    for e, (x, y) in enumerate(g.edges):
        fx, fy = frow[x], frow[y]
        if not (fx or fy):
            continue
        cx = tied[(x, e)][0] if tied[(x, e)] else None
        cy = tied[(y, e)][0] if tied[(y, e)] else None
        if fx and fy:
            if cx is not None and cy is not None:
                moved += [(cx, y, e), (cy, x, e)]
            elif cx is not None or cy is not None:
                pass
            else:
                cx, cy = take_free(x, e), take_free(y, e)
                if cx is not None and cy is not None:
                    moved += [(cx, y, e), (cy, x, e)]
                elif cx is None and cy is None:
                    raise ObligationUnmet(f"round {t}: neither endpoint of edge {g.edges[e]} holds a chip for it", t, x)
        else:
            sender, receiver, c = (x, y, cx) if fx else (y, x, cy)
            if c is None:
                c = take_free(sender, e)
            if c is None:
                raise ObligationUnmet(f"round {t}: vertex {sender} fires but holds no chip for edge {g.edges[e]}", t, sender)
            moved.append((c, receiver, e))
    for c, dest, e in moved:
        new[c] = dest
        if crossed is not None and chip_edge[c] is None:
            crossed[c] = e
    return new


def _check_counts(g: Graph, loc, cfg, t: int) -> None:
    counts = [0] * g.n
    for v in loc:
        counts[v] += 1
    if tuple(counts) != tuple(cfg):
        raise AssignmentFalsified(f"round {t}: tracked chip counts {counts} != configuration {list(cfg)}", t)


def build_assignment(g: Graph, s: CycleSummary) -> ChipAssignment:
    """Run the round-by-round construction on a compliant cycle.

    Choices the construction leaves open go to the lowest edge id (and the
    lowest chip id); an untied chip that crossed an edge is preferred when a
    vertex ties a chip to that same edge.
    """
    if not is_compliant(s, g):
        raise NotCompliant("game is not compliant (needs T >= 3, no consecutive firings, dense sequences)")
    part = first_fire_partition(s)
    cls = part.class_of
    T = s.period
    cfg = s.cycle_configs
    loc = [v for v in range(g.n) for _ in range(cfg[0][v])]
    start = tuple(loc)
    N = len(loc)
    edge = [None] * N
    home = [None] * N
    rnd = [None] * N
    crossed = [None] * N

    def tie(c, e, v, t):
        edge[c], home[c], rnd[c] = e, v, t

    def pick(pool, e):
        # the chip that crossed e, else one that never moved
        c = next((c for c in pool if crossed[c] == e), None)
        if c is None:
            c = next((c for c in pool if crossed[c] is None), pool[0])
        pool.remove(c)
        return c

    for t in range(T):
        _check_counts(g, loc, cfg[t], t)
        held = _holdings(g.n, loc)
        for u in sorted(part.classes[t]):
            free = [c for c in held[u] if edge[c] is None]
            if t == 0:
                for e, w in g.incident[u]:
                    if cls[w] == 1:
                        if not free:
                            raise AssignmentFalsified(f"round 0: vertex {u} lacks a chip for edge {g.edges[e]}", 0, u)
                        tie(free.pop(0), e, u, 0)
                continue
            for e, w in g.incident[u]:
                k = cls[w]
                if k < t and not (k == 0 and t >= 2):
                    if not any(edge[c] == e for c in held[u]):
                        raise AssignmentFalsified(
                            f"round {t}: vertex {u} does not hold the chip tied to edge {g.edges[e]}", t, u)
                else:
                    if not free:
                        raise AssignmentFalsified(f"round {t}: vertex {u} has no chip left for edge {g.edges[e]}", t, u)
                    tie(pick(free, e), e, u, t)
            prev = [e for e, w in g.incident[u] if cls[w] == t - 1]
            if free and len(free) >= len(prev):
                raise AssignmentFalsified(
                    f"round {t}: vertex {u} has {len(free)} surplus chips but only {len(prev)} edges to S_{t - 1}", t, u)
            for c, e in zip(list(free), prev):
                tie(c, e, u, t)
        loc = _fire(g, s.firing[t], loc, edge, t, crossed)

    _check_counts(g, loc, cfg[0], T)
    held = _holdings(g.n, loc)
    for v0 in sorted(part.classes[0]):
        free = [c for c in held[v0] if edge[c] is None]
        for e, w in g.incident[v0]:
            if cls[w] != 0:
                k = sum(1 for c in held[v0] if edge[c] == e)
                if k != 1:
                    raise AssignmentFalsified(
                        f"round {T}: vertex {v0} holds {k} chips tied to edge {g.edges[e]}, expected exactly 1", T, v0)
            else:
                if not free:
                    raise AssignmentFalsified(f"round {T}: vertex {v0} has no chip left for edge {g.edges[e]}", T, v0)
                tie(pick(free, e), e, v0, T)
        prev = [e for e, w in g.incident[v0] if cls[w] == T - 1]
        if free and len(free) >= len(prev):
            raise AssignmentFalsified(
                f"round {T}: vertex {v0} has {len(free)} surplus chips but only {len(prev)} edges to S_{T - 1}", T, v0)
        for c, e in zip(list(free), prev):
            tie(c, e, v0, T)
    if any(e is None for e in edge):
        raise AssignmentFalsified(f"{edge.count(None)} chips left untied after round {T}", T)

    a = ChipAssignment(g, s, tuple(edge), tuple(home), tuple(rnd), (start,))
    return replace(a, locations=track_chips(g, s, a))


def track_chips(g: Graph, s: CycleSummary, a: ChipAssignment) -> tuple[tuple[int, ...], ...]:
    """Replay one period from ``a.locations[0]`` moving only tied chips.

    Returns the ``(T+1) x chips`` location table; raises
    :class:`ObligationUnmet` when a firing vertex cannot send across an edge
    and :class:`AssignmentFalsified` when per-vertex counts drift from the
    cycle configurations.
    """
    if any(e is None for e in a.chip_edge):
        raise ObligationUnmet("assignment has untied chips")
    loc = list(a.locations[0])
    rows = [tuple(loc)]
    for t in range(s.period):
        _check_counts(g, loc, s.cycle_configs[t], t)
        loc = _fire(g, s.firing[t], loc, a.chip_edge, t)
        rows.append(tuple(loc))
    _check_counts(g, loc, s.cycle_configs[0], s.period)
    return tuple(rows)


def verify_valid(a: ChipAssignment, c: EdgeClasses) -> bool:
    """Per-edge quotas of a completed assignment.

    Same-class edges carry one chip tied by each endpoint; edges joining
    consecutive classes carry one or two chips; all other edges exactly one.
    """
    g = a.graph
    if a.n_chips != sum(a.summary.cycle_configs[0]):
        return False
    homes = defaultdict(list)
    for chip, e in enumerate(a.chip_edge):
        if e is None or not 0 <= e < g.m:
            return False
        if a.chip_home[chip] not in g.edges[e]:
            return False
        homes[e].append(a.chip_home[chip])
    for e, (x, y) in enumerate(g.edges):
        h = homes[e]
        cx, cy = c.classes_of_edge(e)
        if cx == cy:
            if sorted(h) != [x, y]:
                return False
        elif c.is_consecutive(e):
            if not 1 <= len(h) <= 2:
                return False
        elif len(h) != 1:
            return False
    return True


@dataclass(frozen=True)
class EdgeWeightClass:
    """``leans[e] = (back, forward)`` for each two-chip edge of E_{t,t+1}:
    whether the S_t endpoint, resp. the S_{t+1} endpoint, ever holds both chips."""

    heavy: frozenset
    light: frozenset
    leans: dict


def classify_edges(a: ChipAssignment, c: EdgeClasses, tr) -> EdgeWeightClass:
    g = a.graph
    per_edge = defaultdict(list)
    for chip, e in enumerate(a.chip_edge):
        per_edge[e].append(chip)
    heavy = frozenset(e for e in range(g.m) if len(per_edge[e]) == 2)
    light = frozenset(e for e in range(g.m) if len(per_edge[e]) == 1)
    leans = {}
    for e in sorted(heavy):
        if not c.is_consecutive(e):
            continue
        back, fwd = c.orient(e)
        chips = per_edge[e]
        leans[e] = (
            any(all(row[ch] == back for ch in chips) for row in tr),
            any(all(row[ch] == fwd for ch in chips) for row in tr),
        )
    return EdgeWeightClass(heavy, light, leans)


def deprived_count(g: Graph, a: ChipAssignment, tr, v: int, rnd: int) -> int:
    """Incident edges of ``v`` none of whose chips sit on ``v`` at round ``rnd``."""
    if not 0 <= v < g.n:
        raise IndexError(f"vertex {v} out of range")
    if not 0 <= rnd < len(tr):
        raise IndexError(f"round {rnd} outside 0..{len(tr) - 1}")
    row = tr[rnd]
    holding = {a.chip_edge[c] for c, x in enumerate(row) if x == v}
    return sum(1 for e, _ in g.incident[v] if e not in holding)


def check_assignment_lemmas(g: Graph, s: CycleSummary) -> VerificationReport:
    """Build and track the assignment of a compliant game and check its
    consequences: forward-only leaning of heavy edges, the deprived-edge
    count on the round before first firing, that count being positive, and
    the light-edge total bounding the chip count."""
    if not is_compliant(s, g):
        raise NotCompliant("game is not compliant")
    report = VerificationReport("assignment_lemmas", games_checked=1)

    def fail(detail, **extra):
        report.failures.append(failure_record(g, s.cycle_configs[0], s.t0, s.period, detail, **extra))

    try:
        a = build_assignment(g, s)
    except AssignmentFalsified as exc:
        fail(f"construction: {exc.detail}", round=exc.round, vertex=exc.vertex)
        return report
    part = first_fire_partition(s)
    ec = edge_classes(part, g)
    tr = a.locations
    T = s.period
    if not verify_valid(a, ec):
        fail("constructed assignment violates the per-edge quotas")
    for chip, e in enumerate(a.chip_edge):
        ends = g.edges[e]
        if any(row[chip] not in ends for row in tr):
            fail(f"chip {chip} leaves the endpoints of its edge {ends}")
    wc = classify_edges(a, ec, tr)
    for e, (back, fwd) in wc.leans.items():
        if back or not fwd:
            fail(f"heavy edge {g.edges[e]} leans back={back} forward={fwd}; expected forward only")
    deprived_total = 0
    for v in range(g.n):
        t = part.class_of[v]
        before = (t - 1) % T
        light_prev = [e for e, w in g.incident[v] if part.class_of[w] == before and e in wc.light]
        d = deprived_count(g, a, tr, v, before)
        if d != len(light_prev):
            fail(f"vertex {v} in S_{t} is deprived of {d} edges on round {before}, light back-edges {len(light_prev)}",
                 vertex=v)
        if len(light_prev) < 1:
            fail(f"vertex {v} in S_{t} has no light edge to S_{before}", vertex=v)
        deprived_total += len(light_prev)
    n_light = len(wc.light)
    if not n_light >= deprived_total >= g.n:
        fail(f"light-edge count {n_light}, summed back-edge count {deprived_total}, |V| = {g.n}")
    if sum(s.initial) > 2 * g.m - g.n:
        fail(f"|sigma| = {sum(s.initial)} exceeds 2|E| - |V| = {2 * g.m - g.n}")
    report.stats = {"light": n_light, "heavy": len(wc.heavy), "chips": a.n_chips}
    return report
