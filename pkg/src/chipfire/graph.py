"""Simple connected graphs: parsing, named families, and small-graph enumeration."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Iterator

DEFAULT_MAX_ENUM_N = 6

FAMILIES = ("complete", "complete_bipartite", "cycle", "path", "random_connected")


class GraphError(ValueError):
    """Raised for invalid graph input.

    ``kind`` is one of ``malformed``, ``edge_count``, ``duplicate_edge``,
    ``self_loop``, ``out_of_range``, ``disconnected`` or ``params``.
    """

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


@dataclass(frozen=True)
class Graph:
    """Immutable simple connected undirected graph on vertices ``0..n-1``.

    Edges are stored once as ``(u, v)`` with ``u < v`` and sorted; an edge's
    position in ``edges`` is its edge id.
    """

    n: int
    edges: tuple[tuple[int, int], ...]
    name: str = field(default="", compare=False)
    adjacency: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)
    degree: tuple[int, ...] = field(init=False, repr=False, compare=False)
    incident: tuple[tuple[tuple[int, int], ...], ...] = field(init=False, repr=False, compare=False)
    edge_index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        edges = _normalize_edges(self.n, self.edges)
        adj: list[list[int]] = [[] for _ in range(self.n)]
        inc: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(edges):
            adj[u].append(v)
            adj[v].append(u)
            inc[u].append((i, v))
            inc[v].append((i, u))
        _check_connected(self.n, adj)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "adjacency", tuple(tuple(sorted(a)) for a in adj))
        object.__setattr__(self, "degree", tuple(len(a) for a in adj))
        object.__setattr__(self, "incident", tuple(tuple(x) for x in inc))
        object.__setattr__(self, "edge_index", {e: i for i, e in enumerate(edges)})

    def __hash__(self):
        return hash((self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        try:
            return self.edge_index[(u, v)]
        except KeyError:
            raise KeyError(f"({u}, {v}) is not an edge") from None

    def label(self) -> str:
        return self.name or f"G(n={self.n}, m={self.m})"

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines.extend(f"{u} {v}" for u, v in self.edges)
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"name": self.name, "n": self.n, "edges": [list(e) for e in self.edges]}


def _normalize_edges(n: int, edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    if n < 1:
        raise GraphError("params", f"vertex count must be positive, got {n}")
    seen = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise GraphError("out_of_range", f"edge ({u}, {v}) has a vertex outside 0..{n - 1}")
        if u == v:
            raise GraphError("self_loop", f"self-loop at vertex {u}")
        e = (u, v) if u < v else (v, u)
        if e in seen:
            raise GraphError("duplicate_edge", f"duplicate edge {e}")
        seen.add(e)
    return tuple(sorted(seen))


def _check_connected(n: int, adj: list[list[int]]) -> None:
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != n:
        raise GraphError("disconnected", f"graph is disconnected: {n - len(seen)} vertices unreachable from 0")


def parse_graph(text: str, name: str = "") -> Graph:
    """Parse the ``n m`` header plus ``m`` edge lines format.

    Blank lines and lines starting with ``#`` are ignored.
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphError("malformed", f"line {lineno}: expected two integers, got {raw!r}")
        try:
            rows.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphError("malformed", f"line {lineno}: expected two integers, got {raw!r}") from None
    if not rows:
        raise GraphError("malformed", "empty graph file")
    (n, m), edges = rows[0], rows[1:]
    if n < 1 or m < 0:
        raise GraphError("malformed", f"bad header '{n} {m}'")
    if len(edges) != m:
        raise GraphError("edge_count", f"header declares {m} edges, found {len(edges)}")
    return Graph(n, tuple(edges), name=name)


def complete(n: int) -> Graph:
    if n < 2:
        raise GraphError("params", "complete graph needs n >= 2")
    return Graph(n, tuple(itertools.combinations(range(n), 2)), name=f"K_{n}")


def complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b} with side L = 0..a-1 and side R = a..a+b-1."""
    if a < 1 or b < 1:
        raise GraphError("params", "complete bipartite graph needs a, b >= 1")
    edges = tuple((i, a + j) for i in range(a) for j in range(b))
    return Graph(a + b, edges, name=f"K_{{{a},{b}}}")


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("params", "cycle needs n >= 3")
    return Graph(n, tuple((i, (i + 1) % n) for i in range(n)), name=f"C_{n}")


def path(n: int) -> Graph:
    if n < 2:
        raise GraphError("params", "path needs n >= 2")
    return Graph(n, tuple((i, i + 1) for i in range(n - 1)), name=f"P_{n}")


def _random_tree_edges(n: int, rng: random.Random) -> list[tuple[int, int]]:
    # Pruefer decoding gives a uniform labeled tree.
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(n) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [w for w in range(n) if degree[w] == 1]
    edges.append((u, v))
    return edges


def random_connected(n: int, m: int, seed: int | str | None = None) -> Graph:
    """Uniform random spanning tree plus uniformly chosen extra edges."""
    if n < 1 or not (n - 1 <= m <= n * (n - 1) // 2):
        raise GraphError("params", f"random_connected needs n >= 1 and {max(n - 1, 0)} <= m <= {n * (n - 1) // 2}")
    rng = random.Random(seed)
    tree = {tuple(sorted(e)) for e in _random_tree_edges(n, rng)}
    rest = [e for e in itertools.combinations(range(n), 2) if e not in tree]
    extra = rng.sample(rest, m - len(tree))
    return Graph(n, tuple(tree) + tuple(extra), name=f"random(n={n},m={m},seed={seed})")


def generate(kind: str, params: list[int] | tuple[int, ...]) -> Graph:
    """Build a named graph family member, e.g. ``generate("cycle", [4])``."""
    params = list(params)
    arity = {"complete": 1, "complete_bipartite": 2, "cycle": 1, "path": 1, "random_connected": 3}
    if kind not in arity:
        raise GraphError("params", f"unknown graph family {kind!r}; choose from {', '.join(FAMILIES)}")
    if len(params) != arity[kind]:
        raise GraphError("params", f"{kind} takes {arity[kind]} integer parameter(s), got {len(params)}")
    if kind == "complete":
        return complete(*params)
    if kind == "complete_bipartite":
        return complete_bipartite(*params)
    if kind == "cycle":
        return cycle(*params)
    if kind == "path":
        return path(*params)
    return random_connected(*params)


def bipartite_sides(g: Graph) -> tuple[int, int] | None:
    """Return ``(a, b)`` if ``g`` is exactly K_{a,b} with the standard labeling."""
    for a in range(1, g.n):
        b = g.n - a
        if g.m == a * b and all(u < a <= v for u, v in g.edges):
            return a, b
    return None


# -- enumeration ---------------------------------------------------------------

def _pairs(n: int) -> list[tuple[int, int]]:
    # row-major upper triangle; pair k carries bit weight 2**(M-1-k) so that
    # integer order on masks equals lexicographic order on adjacency bit-strings
    return list(itertools.combinations(range(n), 2))


def _mask_connected(n: int, pairs, mask: int, top: int) -> bool:
    adj = [0] * n
    for k, (u, v) in enumerate(pairs):
        if mask >> (top - k) & 1:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    seen = frontier = 1
    while frontier:
        nxt = 0
        f = frontier
        while f:
            low = f & -f
            nxt |= adj[low.bit_length() - 1]
            f ^= low
        frontier = nxt & ~seen
        seen |= nxt
    return seen == (1 << n) - 1


def enumerate_connected(n: int, dedup: bool = False, max_n: int = DEFAULT_MAX_ENUM_N) -> Iterator[Graph]:
    """Yield every connected simple graph on ``n`` labeled vertices.

    With ``dedup`` one graph per isomorphism class is produced: the member
    whose adjacency bit-string is lexicographically minimal over all vertex
    permutations.  Masks are scanned in increasing order, so the first member
    met of each class is that minimum; its whole orbit is then marked seen.
    """
    if n < 2 or n > max_n:
        raise GraphError("params", f"enumerate_connected supports 2 <= n <= {max_n}, got {n}")
    pairs = _pairs(n)
    M = len(pairs)
    top = M - 1
    if dedup:
        pos = {p: k for k, p in enumerate(pairs)}
        perm_maps = []
        for perm in itertools.permutations(range(n)):
            perm_maps.append([top - pos[tuple(sorted((perm[u], perm[v])))] for u, v in pairs])
        seen: set[int] = set()
    for mask in range(1 << M):
        if dedup and mask in seen:
            continue
        if not _mask_connected(n, pairs, mask, top):
            continue
        bits = [k for k in range(M) if mask >> (top - k) & 1]
        if dedup:
            for pm in perm_maps:
                image = 0
                for k in bits:
                    image |= 1 << pm[k]
                seen.add(image)
        yield Graph(n, tuple(pairs[k] for k in bits))


def connected_graphs_up_to(n_max: int, dedup: bool = True) -> list[Graph]:
    """All connected graphs on 2..n_max vertices, named ``n<k>_g<i>``."""
    out = []
    for n in range(2, n_max + 1):
        for i, g in enumerate(enumerate_connected(n, dedup=dedup)):
            out.append(Graph(g.n, g.edges, name=f"n{n}_g{i}"))
    return out
