"""Bilabelled graphs: a graph with an output label vector and an input label vector."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import networkx as nx

from .graphs import Graph, is_planar
from .partitions import Partition

__all__ = [
    "BilabelledGraph",
    "b_tensor",
    "b_compose",
    "b_adjoint",
    "quotient",
    "envelope",
    "envelope_apex",
    "envelope_has_double_edge",
    "is_planar_bilabelled",
    "is_doubled",
    "doubled",
    "undoubled",
    "gamma",
    "gamma_inv",
    "b_isomorphic",
    "identity_graph",
    "multiplication",
    "edge",
]


@dataclass(frozen=True)
class BilabelledGraph:
    """A graph with out-labels ``out`` (length p) and in-labels ``inp`` (length q)."""

    graph: Graph
    out: tuple[int, ...]
    inp: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "out", tuple(int(v) for v in self.out))
        object.__setattr__(self, "inp", tuple(int(v) for v in self.inp))
        for v in self.out + self.inp:
            if not 0 <= v < self.graph.n:
                raise ValueError(f"label points at vertex {v} outside 0..{self.graph.n - 1}")

    @classmethod
    def build(cls, n: int, edges: Iterable[Sequence[int]], out: Sequence[int], inp: Sequence[int]) -> "BilabelledGraph":
        edges = [tuple(e) for e in edges]
        loops = any(u == v for u, v in edges)
        return cls(Graph.from_edges(n, edges, allow_loops=loops), tuple(out), tuple(inp))

    @property
    def arity(self) -> tuple[int, int]:
        return (len(self.out), len(self.inp))

    @property
    def n(self) -> int:
        return self.graph.n

    def labelled_vertices(self) -> set[int]:
        return set(self.out) | set(self.inp)

    def to_json(self) -> dict:
        return {
            "n": self.graph.n,
            "edges": [list(e) for e in self.graph.sorted_edges()],
            "out": list(self.out),
            "in": list(self.inp),
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "BilabelledGraph":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.build(int(data["n"]), data["edges"], data["out"], data["in"])

    def __repr__(self) -> str:
        return f"BilabelledGraph(n={self.n}, edges={self.graph.sorted_edges()}, out={list(self.out)}, in={list(self.inp)})"


def _make(n: int, edges: Iterable[tuple[int, int]], out: Sequence[int], inp: Sequence[int]) -> BilabelledGraph:
    edges = {(u, v) if u <= v else (v, u) for u, v in edges}
    loops = any(u == v for u, v in edges)
    return BilabelledGraph(Graph(n, frozenset(edges), allow_loops=loops), tuple(out), tuple(inp))


# ---------------------------------------------------------------- operations


def b_tensor(k1: BilabelledGraph, k2: BilabelledGraph) -> BilabelledGraph:
    off = k1.n
    edges = list(k1.graph.edges) + [(u + off, v + off) for u, v in k2.graph.edges]
    return _make(
        k1.n + k2.n,
        edges,
        k1.out + tuple(v + off for v in k2.out),
        k1.inp + tuple(v + off for v in k2.inp),
    )


def _merge(n: int, edges: Iterable[tuple[int, int]], pairs: Iterable[tuple[int, int]]) -> tuple[list[int], int]:
    """Union-find over ``pairs``; returns new id per old vertex and the new count.

    New ids follow the order of each class's smallest member.
    """
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    new_id: dict[int, int] = {}
    mapping = []
    for v in range(n):
        r = find(v)
        if r not in new_id:
            new_id[r] = len(new_id)
        mapping.append(new_id[r])
    return mapping, len(new_id)


def b_compose(k1: BilabelledGraph, k2: BilabelledGraph) -> BilabelledGraph:
    """Glue the in-labels of ``k1`` to the out-labels of ``k2``.

    Duplicate edges are dropped; edges whose ends merge become loops.
    """
    if len(k1.inp) != len(k2.out):
        raise ValueError(f"cannot compose {k1.arity} with {k2.arity}: in-arity {len(k1.inp)} != out-arity {len(k2.out)}")
    off = k1.n
    edges = list(k1.graph.edges) + [(u + off, v + off) for u, v in k2.graph.edges]
    mapping, count = _merge(k1.n + k2.n, edges, [(a, b + off) for a, b in zip(k1.inp, k2.out)])
    return _make(
        count,
        [(mapping[u], mapping[v]) for u, v in edges],
        [mapping[v] for v in k1.out],
        [mapping[v + off] for v in k2.inp],
    )


def b_adjoint(k: BilabelledGraph) -> BilabelledGraph:
    return BilabelledGraph(k.graph, k.inp, k.out)


def quotient(k: BilabelledGraph, blocks: Sequence[Sequence[int]]) -> BilabelledGraph:
    """Identify the vertices inside each block; unlabelled vertices must be singletons."""
    flat = [v for b in blocks for v in b]
    if sorted(flat) != list(range(k.n)) or any(len(b) == 0 for b in blocks):
        raise ValueError("blocks must partition the vertex set")
    labelled = k.labelled_vertices()
    for b in blocks:
        if len(b) > 1 and any(v not in labelled for v in b):
            raise ValueError(f"block {list(b)} merges an unlabelled vertex")
    pairs = [(b[0], v) for b in blocks for v in b[1:]]
    mapping, count = _merge(k.n, k.graph.edges, pairs)
    return _make(
        count,
        [(mapping[u], mapping[v]) for u, v in k.graph.edges],
        [mapping[v] for v in k.out],
        [mapping[v] for v in k.inp],
    )


# ---------------------------------------------------------------- planarity


def envelope(k: BilabelledGraph) -> Graph:
    """K plus a cycle through one new vertex per label, in the order
    out_1..out_p, in_q..in_1, each joined to its labelled vertex.

    With two labels the cycle degenerates to a double edge, stored as a single
    edge (a parallel edge never affects planarity).
    """
    p, q = k.arity
    n = k.n
    alpha = [n + i for i in range(p)]
    beta = [n + p + j for j in range(q)]
    ring = alpha + beta[::-1]
    edges = set(k.graph.edges)
    edges |= {(a, w) for a, w in zip(k.out, alpha)}
    edges |= {(b, w) for b, w in zip(k.inp, beta)}
    if len(ring) >= 2:
        edges |= {(ring[i], ring[(i + 1) % len(ring)]) for i in range(len(ring))}
    edges = {(u, v) if u <= v else (v, u) for u, v in edges}
    loops = any(u == v for u, v in edges)
    return Graph(n + p + q, frozenset(edges), allow_loops=loops)


def envelope_has_double_edge(k: BilabelledGraph) -> bool:
    return sum(k.arity) == 2


def envelope_apex(k: BilabelledGraph) -> Graph:
    """The envelope with one extra vertex adjacent to every cycle vertex; K itself when unlabelled."""
    p, q = k.arity
    if p + q == 0:
        return k.graph
    env = envelope(k)
    apex = env.n
    spokes = {(k.n + i, apex) for i in range(p + q)}
    return Graph(env.n + 1, env.edges | frozenset(spokes), env.allow_loops)


def is_planar_bilabelled(k: BilabelledGraph) -> bool:
    return is_planar(envelope_apex(k))


def is_doubled(k: BilabelledGraph) -> bool:
    """Both label vectors have the form (x1, x1, x2, x2, ...)."""
    return all(len(v) % 2 == 0 and all(v[i] == v[i + 1] for i in range(0, len(v), 2)) for v in (k.out, k.inp))


def doubled(k: BilabelledGraph) -> BilabelledGraph:
    return BilabelledGraph(k.graph, tuple(v for v in k.out for _ in (0, 1)), tuple(v for v in k.inp for _ in (0, 1)))


def undoubled(k: BilabelledGraph) -> BilabelledGraph:
    if not is_doubled(k):
        raise ValueError("labels are not doubled")
    return BilabelledGraph(k.graph, k.out[::2], k.inp[::2])


# ---------------------------------------------------------------- partitions


def gamma(p: Partition) -> BilabelledGraph:
    """Edgeless graph with a vertex per block; loops become unlabelled vertices."""
    n = p.num_blocks + p.empty_blocks
    return BilabelledGraph(Graph(n), p.labels[: p.lower], p.labels[p.lower:])


def gamma_inv(k: BilabelledGraph) -> Partition:
    if k.graph.edges:
        raise ValueError("only edgeless bilabelled graphs correspond to partitions")
    unlabelled = k.n - len(k.labelled_vertices())
    return Partition(len(k.out), len(k.inp), k.out + k.inp, unlabelled)


# ---------------------------------------------------------------- comparison


def _labelled_nx(k: BilabelledGraph) -> nx.Graph:
    g = nx.Graph()
    tags: dict[int, list] = {v: [] for v in range(k.n)}
    for i, v in enumerate(k.out):
        tags[v].append(("o", i))
    for j, v in enumerate(k.inp):
        tags[v].append(("i", j))
    loops = k.graph.loops
    for v in range(k.n):
        g.add_node(v, tag=(tuple(tags[v]), v in loops))
    g.add_edges_from((u, v) for u, v in k.graph.edges if u != v)
    return g


def b_isomorphic(k1: BilabelledGraph, k2: BilabelledGraph) -> bool:
    """Isomorphic via a vertex bijection that respects every label position."""
    if k1.arity != k2.arity or k1.n != k2.n or k1.graph.num_edges != k2.graph.num_edges:
        return False
    return nx.is_isomorphic(_labelled_nx(k1), _labelled_nx(k2), node_match=lambda a, b: a["tag"] == b["tag"])


# ---------------------------------------------------------------- basic graphs


def identity_graph() -> BilabelledGraph:
    return BilabelledGraph(Graph(1), (0,), (0,))


def multiplication(p: int, q: int) -> BilabelledGraph:
    """One vertex carrying p out-labels and q in-labels."""
    return BilabelledGraph(Graph(1), (0,) * p, (0,) * q)


def edge() -> BilabelledGraph:
    """Single edge, out-label on one end and in-label on the other."""
    return BilabelledGraph(Graph.from_edges(2, [(0, 1)]), (0,), (1,))
