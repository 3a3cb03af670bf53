"""Finite graphs: construction, families, graph6 I/O, planarity, canonical forms."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterable, Sequence

import networkx as nx
import numpy as np

__all__ = [
    "Graph",
    "GraphFormatError",
    "parse_graph6",
    "write_graph6",
    "family",
    "cycle",
    "path",
    "complete",
    "complete_bipartite",
    "star",
    "edgeless",
    "shrikhande",
    "rook4",
    "disjoint_union",
    "subdivide",
    "contract",
    "is_planar",
    "canonical_labeling",
    "canonical_form",
    "canonical_graph",
    "are_isomorphic",
    "find_isomorphism",
    "enumerate_graphs",
    "MAX_ENUMERATION_ORDER",
]

MAX_ENUMERATION_ORDER = 7


class GraphFormatError(ValueError):
    """Raised for malformed graph6 input."""


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Finite undirected graph on vertices ``0..n-1``.

    Loops are only representable when ``allow_loops`` is set; they arise when
    bilabelled composition merges the two ends of an edge.
    """

    n: int
    edges: frozenset = field(default_factory=frozenset)
    allow_loops: bool = False

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        norm = set()
        for e in self.edges:
            u, v = e
            u, v = int(u), int(v)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {(u, v)} has an endpoint outside 0..{self.n - 1}")
            if u == v and not self.allow_loops:
                raise ValueError(f"loop at vertex {u} but allow_loops is false")
            norm.add(_norm_edge(u, v))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], allow_loops: bool = False) -> "Graph":
        return cls(n, frozenset(tuple(e) for e in edges), allow_loops)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def loops(self) -> frozenset:
        return frozenset(u for u, v in self.edges if u == v)

    def has_loops(self) -> bool:
        return any(u == v for u, v in self.edges)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def neighbors(self) -> list[set[int]]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return nbrs

    def adjacency_masks(self) -> list[int]:
        """Neighbourhood of each vertex as an int bitmask (loops set the own bit)."""
        masks = [0] * self.n
        for u, v in self.edges:
            masks[u] |= 1 << v
            masks[v] |= 1 << u
        return masks

    def adjacency_matrix(self, dtype=np.int64) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=dtype)
        for u, v in self.edges:
            a[u, v] = 1
            a[v, u] = 1
        return a

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def relabel(self, perm: Sequence[int]) -> "Graph":
        """Rename vertex ``v`` to ``perm[v]``."""
        return Graph(self.n, frozenset(_norm_edge(perm[u], perm[v]) for u, v in self.edges), self.allow_loops)

    def without_loops(self) -> "Graph":
        return Graph(self.n, frozenset(e for e in self.edges if e[0] != e[1]))

    def induced(self, keep: Sequence[int]) -> "Graph":
        index = {v: i for i, v in enumerate(keep)}
        edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return Graph.from_edges(len(keep), edges, self.allow_loops)

    def components(self) -> list[list[int]]:
        nbrs = self.neighbors()
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in sorted(nbrs[u]):
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(comp)
        return comps

    def is_connected(self) -> bool:
        return self.n > 0 and len(self.components()) == 1

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={self.sorted_edges()})"


# ---------------------------------------------------------------- graph6


def parse_graph6(text: str) -> Graph:
    """Decode a short-form graph6 string (n < 63)."""
    s = text.strip()
    if s.startswith(">>graph6<<"):
        s = s[len(">>graph6<<"):]
    if not s:
        raise GraphFormatError("empty graph6 string")
    for i, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise GraphFormatError(f"byte {i}: character {ch!r} outside the graph6 range")
    if s[0] == "~":
        raise GraphFormatError("byte 0: only graphs with fewer than 63 vertices are supported")
    n = ord(s[0]) - 63
    nbits = n * (n - 1) // 2
    nchars = (nbits + 5) // 6
    if len(s) != 1 + nchars:
        raise GraphFormatError(f"expected {1 + nchars} bytes for n={n}, got {len(s)}")
    bits = []
    for ch in s[1:]:
        val = ord(ch) - 63
        bits.extend((val >> (5 - k)) & 1 for k in range(6))
    if any(bits[nbits:]):
        raise GraphFormatError(f"byte {len(s) - 1}: nonzero padding bits")
    edges = []
    pos = 0
    for j in range(1, n):
        for i in range(j):
            if bits[pos]:
                edges.append((i, j))
            pos += 1
    return Graph.from_edges(n, edges)


def write_graph6(g: Graph) -> str:
    if g.has_loops():
        raise ValueError("graph6 cannot encode loops")
    if g.n >= 63:
        raise ValueError("only graphs with fewer than 63 vertices are supported")
    bits = []
    for j in range(1, g.n):
        for i in range(j):
            bits.append(1 if (i, j) in g.edges else 0)
    bits.extend([0] * (-len(bits) % 6))
    out = [chr(g.n + 63)]
    for k in range(0, len(bits), 6):
        val = 0
        for b in bits[k:k + 6]:
            val = (val << 1) | b
        out.append(chr(val + 63))
    return "".join(out)


# ---------------------------------------------------------------- families


def _require_positive(n: int, what: str) -> None:
    if n < 1:
        raise ValueError(f"{what} needs at least one vertex, got {n}")


def cycle(n: int) -> Graph:
    """C_n; by convention cycle(1) = K_1 and cycle(2) = K_2."""
    _require_positive(n, "cycle")
    if n == 1:
        return Graph(1)
    if n == 2:
        return Graph.from_edges(2, [(0, 1)])
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    """P_n on n vertices."""
    _require_positive(n, "path")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    _require_positive(n, "complete graph")
    return Graph.from_edges(n, combinations(range(n), 2))


def complete_bipartite(m: int, n: int) -> Graph:
    _require_positive(m, "complete bipartite side")
    _require_positive(n, "complete bipartite side")
    return Graph.from_edges(m + n, [(i, m + j) for i in range(m) for j in range(n)])


def star(d: int) -> Graph:
    """Star with centre 0 and leaves 1..d."""
    if d < 0:
        raise ValueError("star degree must be nonnegative")
    return Graph.from_edges(d + 1, [(0, i) for i in range(1, d + 1)])


def edgeless(n: int) -> Graph:
    _require_positive(n, "edgeless graph")
    return Graph(n)


def _z4_square(connection: Callable[[int, int, int, int], bool]) -> Graph:
    cells = [(x, y) for x in range(4) for y in range(4)]
    edges = [
        (i, j)
        for i, j in combinations(range(16), 2)
        if connection(*cells[i], *cells[j])
    ]
    return Graph.from_edges(16, edges)


def shrikhande() -> Graph:
    """Cayley graph on Z4 x Z4 with connection set ±(1,0), ±(0,1), ±(1,1)."""
    conn = {(1, 0), (3, 0), (0, 1), (0, 3), (1, 1), (3, 3)}
    return _z4_square(lambda a, b, c, d: ((c - a) % 4, (d - b) % 4) in conn)


def rook4() -> Graph:
    """4x4 rook's graph: cells adjacent iff they share a row or a column."""
    return _z4_square(lambda a, b, c, d: (a == c) != (b == d))


_FAMILIES: dict[str, Callable[..., Graph]] = {
    "cycle": cycle,
    "path": path,
    "complete": complete,
    "complete_bipartite": complete_bipartite,
    "star": star,
    "edgeless": edgeless,
    "shrikhande": shrikhande,
    "rook4": rook4,
}


def family(name: str, *params: int) -> Graph:
    try:
        ctor = _FAMILIES[name]
    except KeyError:
        raise ValueError(f"unknown graph family {name!r}; known: {sorted(_FAMILIES)}") from None
    return ctor(*params)


# ---------------------------------------------------------------- operations


def disjoint_union(g: Graph, h: Graph) -> Graph:
    shifted = [(u + g.n, v + g.n) for u, v in h.edges]
    return Graph(g.n + h.n, g.edges | frozenset(shifted), g.allow_loops or h.allow_loops)


def _check_edge(g: Graph, edge: Sequence[int]) -> tuple[int, int]:
    e = _norm_edge(*edge)
    if e not in g.edges:
        raise ValueError(f"{tuple(edge)} is not an edge")
    return e


def subdivide(g: Graph, edge: Sequence[int]) -> Graph:
    """Replace ``edge`` by a path through a new vertex ``g.n``."""
    u, v = _check_edge(g, edge)
    w = g.n
    edges = (g.edges - {(u, v)}) | {(u, w), (v, w)}
    return Graph(g.n + 1, frozenset(edges), g.allow_loops)


def contract(g: Graph, edge: Sequence[int]) -> Graph:
    """Identify the endpoints of ``edge``; the larger id is removed and later ids shift down."""
    u, v = _check_edge(g, edge)
    if u == v:
        raise ValueError("cannot contract a loop")

    def rename(x: int) -> int:
        if x == v:
            x = u
        return x - 1 if x > v else x

    edges = set()
    for a, b in g.edges:
        if (a, b) == (u, v):
            continue
        edges.add(_norm_edge(rename(a), rename(b)))
    return Graph(g.n - 1, frozenset(edges), g.allow_loops)


def is_planar(g: Graph) -> bool:
    """Planarity of ``g`` with loops ignored (left-right criterion via networkx)."""
    if g.n <= 4:
        return True
    simple = g.without_loops()
    if simple.num_edges > 3 * g.n - 6:
        return False
    planar, _ = nx.check_planarity(simple.to_networkx())
    return planar


# ---------------------------------------------------------------- canonical form


def _refine(masks: list[int], colors: list[int]) -> list[int]:
    """Colour refinement to an equitable colouring with canonical colour ids."""
    n = len(masks)
    num = len(set(colors))
    while True:
        sigs = []
        for v in range(n):
            m = masks[v]
            cnt = Counter()
            while m:
                low = m & -m
                cnt[colors[low.bit_length() - 1]] += 1
                m ^= low
            sigs.append((colors[v], tuple(sorted(cnt.items()))))
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(ranks) == num:
            return new
        colors, num = new, len(ranks)


def _certificate(masks: list[int], loops: int, order: list[int]) -> tuple:
    pos = [0] * len(order)
    for i, v in enumerate(order):
        pos[v] = i
    rows = []
    loop_bits = 0
    for i, v in enumerate(order):
        m = masks[v]
        row = 0
        while m:
            low = m & -m
            w = low.bit_length() - 1
            row |= 1 << pos[w]
            m ^= low
        rows.append(row)
        if loops >> v & 1:
            loop_bits |= 1 << i
    return (len(order), loop_bits, tuple(rows))


def _orbits(cell: list[int], autos: list[list[int]], fixed: list[int]) -> dict[int, int]:
    """Orbit representative of each vertex in ``cell`` under the known
    automorphisms that fix ``fixed`` pointwise."""
    parent = {v: v for v in cell}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a in autos:
        if any(a[f] != f for f in fixed):
            continue
        for v in cell:
            w = a[v]
            if w in parent:
                rv, rw = find(v), find(w)
                if rv != rw:
                    parent[max(rv, rw)] = min(rv, rw)
    return {v: find(v) for v in cell}


def canonical_labeling(g: Graph) -> list[int]:
    """Vertex order whose relabelled adjacency is the canonical representative.

    Individualisation-refinement with pruning by discovered automorphisms.
    """
    n = g.n
    if n == 0:
        return []
    masks = [m & ~(1 << v) for v, m in enumerate(g.adjacency_masks())]
    loops = 0
    for v in g.loops:
        loops |= 1 << v
    init = [(loops >> v) & 1 for v in range(n)]
    best: list = [None, None]  # certificate, order
    autos: list[list[int]] = []

    def search(colors: list[int], fixed: list[int]) -> None:
        colors = _refine(masks, colors)
        cells: dict[int, list[int]] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        if len(cells) == n:
            order = sorted(range(n), key=colors.__getitem__)
            cert = _certificate(masks, loops, order)
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, order
            elif cert == best[0]:
                # order -> best order is an automorphism
                auto = [0] * n
                for a, b in zip(order, best[1]):
                    auto[a] = b
                autos.append(auto)
            return
        target = min((c for c in cells if len(cells[c]) > 1), key=lambda c: (len(cells[c]), c))
        cell = cells[target]
        explored: list[int] = []
        for v in cell:
            if explored and autos:
                # skip v when a known automorphism fixing the prefix maps an explored child onto it
                orbit = _orbits(cell, autos, fixed)
                if any(orbit[v] == orbit[e] for e in explored):
                    continue
            new = [2 * c for c in colors]
            new[v] -= 1
            search(new, fixed + [v])
            explored.append(v)

    search(init, [])
    return best[1]


def canonical_form(g: Graph) -> tuple:
    """Isomorphism-invariant certificate: equal iff the graphs are isomorphic."""
    masks = [m & ~(1 << v) for v, m in enumerate(g.adjacency_masks())]
    loops = 0
    for v in g.loops:
        loops |= 1 << v
    return _certificate(masks, loops, canonical_labeling(g))


def canonical_graph(g: Graph) -> Graph:
    order = canonical_labeling(g)
    perm = [0] * g.n
    for i, v in enumerate(order):
        perm[v] = i
    return g.relabel(perm)


def find_isomorphism(g: Graph, h: Graph) -> list[int] | None:
    """A list ``sigma`` with ``sigma[v]`` the image of v, or None."""
    if g.n != h.n or g.num_edges != h.num_edges:
        return None
    og, oh = canonical_labeling(g), canonical_labeling(h)
    sigma = [0] * g.n
    for a, b in zip(og, oh):
        sigma[a] = b
    if g.relabel(sigma).edges != h.edges:
        return None
    return sigma


def are_isomorphic(g: Graph, h: Graph) -> bool:
    return find_isomorphism(g, h) is not None


# ---------------------------------------------------------------- enumeration


@lru_cache(maxsize=None)
def _all_graphs(n: int) -> tuple[Graph, ...]:
    """One canonical representative per isomorphism class on exactly n vertices."""
    if n == 1:
        return (Graph(1),)
    seen: dict[tuple, Graph] = {}
    for base in _all_graphs(n - 1):
        for mask in range(1 << (n - 1)):
            extra = [(i, n - 1) for i in range(n - 1) if mask >> i & 1]
            g = Graph(n, base.edges | frozenset(extra))
            cf = canonical_form(g)
            if cf not in seen:
                seen[cf] = canonical_graph(g)
    return tuple(seen[k] for k in sorted(seen, key=lambda c: (_edge_count(c), c)))


def _edge_count(cert: tuple) -> int:
    return sum(bin(r).count("1") for r in cert[2]) // 2


_PREDICATES: dict[str, Callable[[Graph], bool]] = {
    "any": lambda g: True,
    "connected": Graph.is_connected,
    "planar": is_planar,
    "connected_planar": lambda g: g.is_connected() and is_planar(g),
}


def enumerate_graphs(max_n: int, predicate: str | Callable[[Graph], bool] = "any") -> list[Graph]:
    """Isomorphism-class representatives on 1..max_n vertices passing ``predicate``.

    Ordered by (vertices, edges, canonical form).
    """
    if not 1 <= max_n <= MAX_ENUMERATION_ORDER:
        raise ValueError(f"max_n must lie in 1..{MAX_ENUMERATION_ORDER}, got {max_n}")
    if isinstance(predicate, str):
        try:
            predicate = _PREDICATES[predicate]
        except KeyError:
            raise ValueError(f"unknown predicate {predicate!r}; known: {sorted(_PREDICATES)}") from None
    return [g for n in range(1, max_n + 1) for g in _all_graphs(n) if predicate(g)]
