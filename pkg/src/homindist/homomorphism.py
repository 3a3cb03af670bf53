"""Exact homomorphism counts and dense homomorphism tensors."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .graphs import Graph

if TYPE_CHECKING:
    from .bilabelled import BilabelledGraph

__all__ = [
    "HomTensor",
    "hom_count",
    "hom_tensor",
    "soe",
    "matmul",
    "kron",
    "transpose",
]

_INT64_SAFE = 1 << 62


def _fit_dtype(arr: np.ndarray) -> np.ndarray:
    """Store as int64 when every entry fits comfortably, else as Python ints."""
    if arr.dtype == object:
        if arr.size == 0 or max(abs(int(x)) for x in arr.flat) < _INT64_SAFE:
            return arr.astype(np.int64)
        return arr
    return arr.astype(np.int64, copy=False)


@dataclass(frozen=True, eq=False)
class HomTensor:
    """Integer tensor with ``p`` output legs and ``q`` input legs over ``n`` values.

    ``entries`` has shape ``(n,) * (p + q)``, output legs first; flattening it
    row-major gives the ``n**p x n**q`` matrix.
    """

    n: int
    p: int
    q: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries)
        shape = (self.n,) * (self.p + self.q)
        if arr.size != self.n ** (self.p + self.q):
            raise ValueError(f"expected {self.n ** (self.p + self.q)} entries, got {arr.size}")
        object.__setattr__(self, "entries", _fit_dtype(arr.reshape(shape)))

    @classmethod
    def from_matrix(cls, n: int, p: int, q: int, matrix) -> "HomTensor":
        return cls(n, p, q, np.asarray(matrix))

    def matrix(self) -> np.ndarray:
        return self.entries.reshape(self.n ** self.p, self.n ** self.q)

    def __getitem__(self, index: tuple[int, ...]) -> int:
        return int(self.entries[tuple(index)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HomTensor):
            return NotImplemented
        return (
            (self.n, self.p, self.q) == (other.n, other.p, other.q)
            and bool(np.array_equal(self.entries, other.entries))
        )

    def __hash__(self) -> int:
        return hash((self.n, self.p, self.q, tuple(int(x) for x in self.entries.flat)))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "out_arity": self.p,
            "in_arity": self.q,
            "entries": [str(int(x)) for x in self.entries.flat],
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "HomTensor":
        if isinstance(data, str):
            data = json.loads(data)
        entries = np.array([int(x) for x in data["entries"]], dtype=object)
        return cls(int(data["n"]), int(data["out_arity"]), int(data["in_arity"]), entries)

    def __repr__(self) -> str:
        return f"HomTensor(n={self.n}, p={self.p}, q={self.q})"


# ---------------------------------------------------------------- tensor algebra


def soe(t: HomTensor) -> int:
    """Sum of all entries."""
    arr = t.entries
    if arr.dtype != object and _bound(arr) * max(1, arr.size) < _INT64_SAFE:
        return int(arr.sum())
    return sum(int(x) for x in arr.flat)


def _bound(arr: np.ndarray) -> int:
    if arr.size == 0:
        return 0
    if arr.dtype != object:
        return int(np.abs(arr).max())
    return max(abs(int(x)) for x in arr.flat)


def matmul(t1: HomTensor, t2: HomTensor) -> HomTensor:
    if t1.n != t2.n or t1.q != t2.p:
        raise ValueError(f"cannot compose ({t1.p},{t1.q}) with ({t2.p},{t2.q}) over n={t1.n},{t2.n}")
    a, b = t1.matrix(), t2.matrix()
    if _bound(a) * _bound(b) * max(1, a.shape[1]) < _INT64_SAFE:
        c = a.astype(np.int64) @ b.astype(np.int64)
    else:
        c = a.astype(object) @ b.astype(object)
    return HomTensor(t1.n, t1.p, t2.q, c)


def kron(t1: HomTensor, t2: HomTensor) -> HomTensor:
    """Tensor product; output legs of t1 then t2, then input legs of t1 then t2."""
    if t1.n != t2.n:
        raise ValueError("kron needs equal n")
    a, b = t1.entries, t2.entries
    if _bound(a) * _bound(b) >= _INT64_SAFE:
        a, b = a.astype(object), b.astype(object)
    outer = np.multiply.outer(a, b)
    p1, q1, p2, q2 = t1.p, t1.q, t2.p, t2.q
    axes = (
        list(range(p1))
        + [p1 + q1 + i for i in range(p2)]
        + [p1 + i for i in range(q1)]
        + [p1 + q1 + p2 + i for i in range(q2)]
    )
    return HomTensor(t1.n, p1 + p2, q1 + q2, outer.transpose(axes))


def transpose(t: HomTensor) -> HomTensor:
    axes = list(range(t.p, t.p + t.q)) + list(range(t.p))
    return HomTensor(t.n, t.q, t.p, t.entries.transpose(axes))


# ---------------------------------------------------------------- counting


def _order_component(comp: Sequence[int], nbrs: list[set[int]], pinned: set[int]) -> list[int]:
    """BFS order of one component, starting from a pinned vertex if there is one."""
    start = next((v for v in comp if v in pinned), comp[0])
    order = [start]
    seen = {start}
    i = 0
    while i < len(order):
        for w in sorted(nbrs[order[i]]):
            if w not in seen and w in comp:
                seen.add(w)
                order.append(w)
        i += 1
    return order


class _Counter:
    """Backtracking extension counter for a fixed pattern and target."""

    def __init__(self, f: Graph, g: Graph):
        self.f = f
        self.g = g
        self.fn = f.neighbors()
        self.floops = f.loops
        self.gmasks = g.adjacency_masks()
        self.full = (1 << g.n) - 1
        self.gloop_mask = 0
        for v in g.loops:
            self.gloop_mask |= 1 << v

    def plan(self, order: list[int], fixed: set[int]) -> tuple[list[list[int]], int]:
        """Back-neighbour lists in ``order`` and the start of the independent tail."""
        pos = {v: i for i, v in enumerate(order)}
        back = []
        for v in order:
            back.append([w for w in self.fn[v] if w in fixed or (w in pos and pos[w] < pos[v])])
        tail = len(order)
        # shrink tail while the last vertices have no neighbours later in order
        while tail > 0:
            v = order[tail - 1]
            if any(w in pos and pos[w] >= tail for w in self.fn[v] if w != v):
                break
            tail -= 1
        return back, tail

    def candidates(self, v: int, back: list[int], img: dict[int, int]) -> int:
        cand = self.full
        for w in back:
            if w == v:
                continue
            cand &= self.gmasks[img[w]]
        if v in self.floops:
            cand &= self.gloop_mask
        return cand

    def count(self, order: list[int], back: list[list[int]], tail: int, img: dict[int, int]) -> int:
        def rec(i: int) -> int:
            if i == tail:
                total = 1
                for j in range(tail, len(order)):
                    c = self.candidates(order[j], back[j], img).bit_count()
                    if not c:
                        return 0
                    total *= c
                return total
            v = order[i]
            cand = self.candidates(v, back[i], img)
            total = 0
            while cand:
                low = cand & -cand
                img[v] = low.bit_length() - 1
                total += rec(i + 1)
                cand ^= low
            img.pop(v, None)
            return total

        return rec(0)


def hom_count(f: Graph, g: Graph) -> int:
    """Number of adjacency-preserving maps V(f) -> V(g)."""
    if g.n == 0:
        return 1 if f.n == 0 else 0
    counter = _Counter(f, g)
    total = 1
    for comp in f.components():
        if len(comp) == 1 and comp[0] not in counter.floops:
            total *= g.n
            continue
        order = _order_component(comp, counter.fn, set())
        back, tail = counter.plan(order, set())
        c = counter.count(order, back, tail, {})
        if c == 0:
            return 0
        total *= c
    return total


_EINSUM_MAX_VERTICES = 52


def _einsum_hom_tensor(k: "BilabelledGraph", g: Graph) -> np.ndarray:
    """Dense contraction in int64; exact because every entry is at most n**|V(F)| < 2**62."""
    f = k.graph
    a = np.asarray(g.adjacency_matrix(), dtype=np.int64)
    labels = list(k.out) + list(k.inp)
    pinned = list(dict.fromkeys(labels))
    operands: list = []
    touched: set[int] = set()
    for u, v in f.sorted_edges():
        operands += [np.diagonal(a).copy(), [u]] if u == v else [a, [u, v]]
        touched |= {u, v}
    ones = np.ones(g.n, dtype=np.int64)
    for v in range(f.n):
        if v not in touched:
            operands += [ones, [v]]
    if not operands:
        return np.ones((), dtype=np.int64)
    t = np.asarray(np.einsum(*operands, pinned, optimize=True), dtype=np.int64)
    if len(pinned) == len(labels):
        order = [pinned.index(x) for x in labels]
        return t.transpose(order)
    # repeated labels: place the pinned tensor on the matching diagonal
    out = np.zeros((g.n,) * len(labels), dtype=np.int64)
    grid = np.indices(t.shape)
    out[tuple(grid[pinned.index(x)] for x in labels)] = t
    return out


def hom_tensor(k: "BilabelledGraph", g: Graph) -> HomTensor:
    """Entry (u, v) counts homomorphisms sending out-labels to u and in-labels to v."""
    n = g.n
    f = k.graph
    if n > 0 and f.n <= _EINSUM_MAX_VERTICES and n ** f.n < _INT64_SAFE:
        return HomTensor(n, len(k.out), len(k.inp), _einsum_hom_tensor(k, g))
    return _backtrack_hom_tensor(k, g)


def _backtrack_hom_tensor(k: "BilabelledGraph", g: Graph) -> HomTensor:
    """Exact big-integer fallback: pin labelled vertices, then count extensions."""
    n = g.n
    f = k.graph
    labels = list(k.out) + list(k.inp)
    pinned = list(dict.fromkeys(labels))
    pinned_set = set(pinned)
    counter = _Counter(f, g)

    # unlabelled part: free components give a constant, attached ones depend on the pinning
    free_factor = 1
    attached: list[tuple[list[int], list[int], list[list[int]], int, list[int]]] = []
    unl = f.induced([v for v in range(f.n) if v not in pinned_set])
    unl_ids = [v for v in range(f.n) if v not in pinned_set]
    for comp_local in unl.components():
        comp = [unl_ids[i] for i in comp_local]
        anchors = sorted({w for v in comp for w in counter.fn[v] if w in pinned_set})
        if not anchors:
            free_factor *= hom_count(f.induced(comp), g)
            continue
        order = _order_component(comp, counter.fn, set())
        back, tail = counter.plan(order, set(anchors))
        attached.append((comp, anchors, back, tail, order))

    shape = (n,) * len(labels)
    out = np.zeros(shape, dtype=object)
    if free_factor == 0:
        return HomTensor(n, len(k.out), len(k.inp), out)

    pin_order = pinned
    pin_back = []
    for i, v in enumerate(pin_order):
        earlier = set(pin_order[:i])
        pin_back.append([w for w in counter.fn[v] if w in earlier or w == v])

    memo: list[dict] = [dict() for _ in attached]
    img: dict[int, int] = {}

    def fill() -> None:
        val = free_factor
        for idx, (comp, anchors, back, tail, order) in enumerate(attached):
            key = tuple(img[a] for a in anchors)
            c = memo[idx].get(key)
            if c is None:
                c = counter.count(order, back, tail, dict(img))
                memo[idx][key] = c
            if c == 0:
                return
            val *= c
        out[tuple(img[v] for v in labels)] = val

    def rec(i: int) -> None:
        if i == len(pin_order):
            fill()
            return
        v = pin_order[i]
        cand = counter.candidates(v, [w for w in pin_back[i] if w != v], img)
        if v in counter.floops:
            cand &= counter.gloop_mask
        while cand:
            low = cand & -cand
            img[v] = low.bit_length() - 1
            rec(i + 1)
            cand ^= low
        img.pop(v, None)

    rec(0)
    return HomTensor(n, len(k.out), len(k.inp), out)
