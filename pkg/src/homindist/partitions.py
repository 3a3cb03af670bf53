"""Set partitions of lower and upper points, their operations and linear maps.

A partition with ``lower`` = l and ``upper`` = k points partitions
``L1..Ll, U1..Uk``. Its map sends (C^n)^{(x)k} (upper, input) to
(C^n)^{(x)l} (lower, output). ``p_compose(P, Q)`` glues the upper row of P to
the lower row of Q, so its map is ``T_P @ T_Q``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Sequence

import numpy as np

from .homomorphism import HomTensor

__all__ = [
    "Partition",
    "p_tensor",
    "p_compose",
    "p_adjoint",
    "is_noncrossing",
    "partition_map",
    "classify",
    "CATEGORY_NAMES",
    "closure",
    "identity",
    "identity_power",
    "pair_cap",
    "pair_cup",
    "swap",
    "fork",
    "four_block",
    "reversal3",
    "crossed_four_block",
    "through_pair_with_singletons",
    "singleton_lower",
    "singleton_upper",
    "single_block",
    "alternating_halves",
    "nested_four_blocks",
    "named_partition",
    "NAMED_PARTITIONS",
]

_POINT = re.compile(r"^([LU])(\d+)$")


def _rgs(labels: Sequence[int]) -> tuple[int, ...]:
    """Relabel block ids in order of first appearance."""
    seen: dict[int, int] = {}
    out = []
    for x in labels:
        if x not in seen:
            seen[x] = len(seen)
        out.append(seen[x])
    return tuple(out)


def _parse_point(code, lower: int, upper: int) -> int:
    if isinstance(code, str):
        m = _POINT.match(code.strip())
        if not m:
            raise ValueError(f"bad point code {code!r}")
        row, idx = m.group(1), int(m.group(2))
    else:
        row, idx = code
    if row == "L" and 1 <= idx <= lower:
        return idx - 1
    if row == "U" and 1 <= idx <= upper:
        return lower + idx - 1
    raise ValueError(f"point {row}{idx} outside the ({lower},{upper}) point set")


@dataclass(frozen=True)
class Partition:
    """Partition of ``lower`` lower and ``upper`` upper points.

    ``labels[i]`` is the block of point i in the order L1..Ll, U1..Uk, stored
    as a restricted growth string so equal partitions have equal labels.
    ``empty_blocks`` counts closed loops left behind by composition.
    """

    lower: int
    upper: int
    labels: tuple[int, ...]
    empty_blocks: int = 0

    def __post_init__(self) -> None:
        if self.lower < 0 or self.upper < 0 or self.empty_blocks < 0:
            raise ValueError("arities and empty_blocks must be nonnegative")
        if len(self.labels) != self.lower + self.upper:
            raise ValueError(f"need {self.lower + self.upper} labels, got {len(self.labels)}")
        object.__setattr__(self, "labels", _rgs(self.labels))

    @classmethod
    def from_blocks(cls, lower: int, upper: int, blocks: Iterable[Iterable], empty_blocks: int = 0) -> "Partition":
        labels: list[int | None] = [None] * (lower + upper)
        for b, block in enumerate(blocks):
            block = list(block)
            if not block:
                raise ValueError("blocks must be nonempty; use empty_blocks for loops")
            for code in block:
                i = _parse_point(code, lower, upper)
                if labels[i] is not None:
                    raise ValueError(f"point {code} appears in two blocks")
                labels[i] = b
        missing = [i for i, x in enumerate(labels) if x is None]
        if missing:
            raise ValueError(f"points {[cls._code(lower, i) for i in missing]} are not covered")
        return cls(lower, upper, tuple(labels), empty_blocks)

    @staticmethod
    def _code(lower: int, i: int) -> str:
        return f"L{i + 1}" if i < lower else f"U{i - lower + 1}"

    @property
    def num_points(self) -> int:
        return self.lower + self.upper

    @property
    def num_blocks(self) -> int:
        return max(self.labels, default=-1) + 1

    def point_blocks(self) -> list[list[int]]:
        """Blocks as lists of point indices (L points first, then U points)."""
        blocks: list[list[int]] = [[] for _ in range(self.num_blocks)]
        for i, b in enumerate(self.labels):
            blocks[b].append(i)
        return blocks

    @property
    def blocks(self) -> list[list[str]]:
        return [[self._code(self.lower, i) for i in b] for b in self.point_blocks()]

    def canonical(self) -> "Partition":
        """The same partition with the loop count dropped."""
        return self if self.empty_blocks == 0 else Partition(self.lower, self.upper, self.labels)

    def boundary_positions(self) -> list[int]:
        """1-based position of each point walking the boundary: L1..Ll then Uk..U1."""
        total = self.num_points
        return [i + 1 if i < self.lower else total - (i - self.lower) for i in range(total)]

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "blocks": self.blocks,
            "empty_blocks": self.empty_blocks,
        }

    @classmethod
    def from_json(cls, data: dict | str) -> "Partition":
        if isinstance(data, str):
            data = json.loads(data)
        return cls.from_blocks(int(data["lower"]), int(data["upper"]), data["blocks"], int(data.get("empty_blocks", 0)))

    def __repr__(self) -> str:
        inner = ",".join("{" + ",".join(b) + "}" for b in self.blocks)
        loops = f", e={self.empty_blocks}" if self.empty_blocks else ""
        return f"Partition({self.lower},{self.upper}: {inner}{loops})"


# ---------------------------------------------------------------- operations


def p_tensor(p: Partition, q: Partition) -> Partition:
    """Side-by-side placement: arities add."""
    off = p.num_blocks
    ql = [x + off for x in q.labels]
    labels = p.labels[: p.lower] + tuple(ql[: q.lower]) + p.labels[p.lower:] + tuple(ql[q.lower:])
    return Partition(p.lower + q.lower, p.upper + q.upper, labels, p.empty_blocks + q.empty_blocks)


def p_compose(p: Partition, q: Partition) -> Partition:
    """Glue the upper row of ``p`` onto the lower row of ``q``."""
    if p.upper != q.lower:
        raise ValueError(f"cannot compose ({p.lower},{p.upper}) with ({q.lower},{q.upper}): middle rows differ")
    nb = p.num_blocks
    parent = list(range(nb + q.num_blocks))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(p.upper):
        a, b = find(p.labels[p.lower + i]), find(nb + q.labels[i])
        if a != b:
            parent[max(a, b)] = min(a, b)
    surviving = [find(x) for x in p.labels[: p.lower]] + [find(nb + x) for x in q.labels[q.lower:]]
    roots = {find(x) for x in range(len(parent))}
    loops = len(roots - set(surviving))
    return Partition(p.lower, q.upper, tuple(surviving), p.empty_blocks + q.empty_blocks + loops)


def p_adjoint(p: Partition) -> Partition:
    """Swap the roles of lower and upper points."""
    return Partition(p.upper, p.lower, p.labels[p.lower:] + p.labels[: p.lower], p.empty_blocks)


def _boundary_sequence(p: Partition) -> list[int]:
    """Block ids read along the boundary L1..Ll, Uk..U1."""
    return list(p.labels[: p.lower]) + list(reversed(p.labels[p.lower:]))


def is_noncrossing(p: Partition) -> bool:
    """No two blocks interleave when points are read around the boundary.

    The order L1..Ll, Uk..U1 is the one for which identities and caps are
    non-crossing and the swap is crossing.
    """
    seq = _boundary_sequence(p)
    positions: dict[int, list[int]] = {}
    for i, b in enumerate(seq):
        positions.setdefault(b, []).append(i)
    for b, pos in positions.items():
        if len(pos) < 2:
            continue
        lo, hi = pos[0], pos[-1]
        # region index: 0 outside [lo, hi], else the gap between consecutive points of b
        region = {}
        for gap, (x, y) in enumerate(zip(pos, pos[1:]), start=1):
            for i in range(x + 1, y):
                region[i] = gap
        seen_region: dict[int, int] = {}
        for i, c in enumerate(seq):
            if c == b:
                continue
            r = region.get(i, 0) if lo < i < hi else 0
            if seen_region.setdefault(c, r) != r:
                return False
    return True


def partition_map(p: Partition, n: int) -> HomTensor:
    """The map T_P over C^n: n**e(P) where the index is constant on blocks, else 0."""
    if n < 1:
        raise ValueError("n must be at least 1")
    scale = n ** p.empty_blocks
    entries = np.zeros((n,) * p.num_points, dtype=object)
    for values in product(range(n), repeat=p.num_blocks):
        entries[tuple(values[b] for b in p.labels)] = scale
    return HomTensor(n, p.lower, p.upper, entries)


# ---------------------------------------------------------------- categories

CATEGORY_NAMES = (
    "P", "P2", "P_even", "P'", "P_b", "P_b'",
    "NC", "NC2", "NC_even", "NC'", "NC_b", "NC_b'", "NC_b#",
    "E_o", "E_b'", "E_h",
)


def _parity_counts(p: Partition) -> list[tuple[int, int]]:
    """(odd, even) boundary-position counts per block."""
    counts = [[0, 0] for _ in range(p.num_blocks)]
    for b, pos in zip(p.labels, p.boundary_positions()):
        counts[b][pos % 2 == 0] += 1
    return [tuple(c) for c in counts]


def classify(p: Partition, s: int | None = None) -> set[str]:
    """Names of the partition categories whose defining description ``p`` meets.

    ``E_h^s`` is only tested when ``s`` (>= 3) is given.
    """
    sizes = [len(b) for b in p.point_blocks()]
    parity = _parity_counts(p)
    nc = is_noncrossing(p)
    odd_blocks = sum(1 for z in sizes if z % 2)
    singletons = sizes.count(1)
    pairs_mixed = all(o == 1 and e == 1 for (o, e), z in zip(parity, sizes) if z == 2)

    crossing_ok = {
        "P": True,
        "P2": all(z == 2 for z in sizes),
        "P_even": all(z % 2 == 0 for z in sizes),
        "P'": odd_blocks % 2 == 0,
        "P_b": all(z <= 2 for z in sizes),
        "P_b'": all(z <= 2 for z in sizes) and singletons % 2 == 0,
    }
    names = {name for name, ok in crossing_ok.items() if ok}
    if nc:
        names |= {"NC" + name[1:] for name, ok in crossing_ok.items() if ok}
        if all(z <= 2 for z in sizes) and singletons % 2 == 0 and pairs_mixed:
            names.add("NC_b#")
    if all(z == 2 for z in sizes) and pairs_mixed:
        names.add("E_o")
    if all(z <= 2 for z in sizes) and singletons % 2 == 0 and pairs_mixed:
        names.add("E_b'")
    if all(o == e for o, e in parity):
        names.add("E_h")
    if s is not None:
        if s < 3:
            raise ValueError("E_h^s needs s >= 3")
        if p.num_points % 2 == 0 and all((o - e) % s == 0 for o, e in parity):
            names.add(f"E_h^{s}")
    return names


def closure(generators: Sequence[Partition], max_points: int, slack: int = 4) -> set[Partition]:
    """Partitions with at most ``max_points`` points in the category generated
    by ``generators``, the identity and the pair cap.

    Every element of a category is a composite of layers
    ``I^a (x) g (x) I^b`` with g a generator, an adjoint of one, or a cap/cup.
    The search composes such layers onto either side of identities, discarding intermediates
    with more than ``max_points + slack`` points. Results have no loops.
    """
    if not 0 <= max_points <= 10:
        raise ValueError("max_points must lie in 0..10")
    if slack < 0:
        raise ValueError("slack must be nonnegative")
    cap = max_points + slack
    gens = {g.canonical() for g in generators} | {p_adjoint(g).canonical() for g in generators}
    gens |= {pair_cap(), pair_cup()}

    layers: dict[int, list[Partition]] = {}

    def layers_for(width: int) -> list[Partition]:
        if width not in layers:
            out = []
            for g in sorted(gens, key=repr):
                for a in range(width - g.upper + 1):
                    b = width - g.upper - a
                    out.append(p_tensor(p_tensor(identity_power(a), g), identity_power(b)))
            layers[width] = out
        return layers[width]

    start = [identity_power(k) for k in range(cap // 2 + 1)]
    seen = set(start)
    frontier = list(start)
    while frontier:
        nxt = []
        for s in frontier:
            candidates = [
                p_compose(layer, s)
                for layer in layers_for(s.lower)
                if layer.lower + s.upper <= cap
            ] + [
                p_compose(s, p_adjoint(layer))
                for layer in layers_for(s.upper)
                if s.lower + layer.lower <= cap
            ]
            for r in candidates:
                r = r.canonical()
                if r not in seen:
                    seen.add(r)
                    nxt.append(r)
        frontier = nxt
    return {x for x in seen if x.num_points <= max_points}


# ---------------------------------------------------------------- named partitions


def identity() -> Partition:
    return Partition(1, 1, (0, 0))


def identity_power(k: int) -> Partition:
    return Partition(k, k, tuple(range(k)) * 2)


def pair_cap() -> Partition:
    """{{L1, L2}}: the vector sum_i e_i (x) e_i."""
    return Partition(2, 0, (0, 0))


def pair_cup() -> Partition:
    return Partition(0, 2, (0, 0))


def swap() -> Partition:
    return Partition.from_blocks(2, 2, [["U1", "L2"], ["U2", "L1"]])


def fork() -> Partition:
    return Partition.from_blocks(2, 1, [["L1", "L2", "U1"]])


def four_block() -> Partition:
    return Partition.from_blocks(2, 2, [["L1", "L2", "U1", "U2"]])


def reversal3() -> Partition:
    """Three through-strands reversing the order of the points."""
    return Partition.from_blocks(3, 3, [["L1", "U3"], ["L2", "U2"], ["L3", "U1"]])


def crossed_four_block() -> Partition:
    return Partition.from_blocks(3, 3, [["U1", "L3"], ["L1", "L2", "U2", "U3"]])


def through_pair_with_singletons() -> Partition:
    return Partition.from_blocks(2, 2, [["L1"], ["U2"], ["L2", "U1"]])


def singleton_lower() -> Partition:
    return Partition(1, 0, (0,))


def singleton_upper() -> Partition:
    return Partition(0, 1, (0,))


def single_block(lower: int, upper: int) -> Partition:
    """One block holding every point; with no points it is a loop."""
    return Partition(lower, upper, (0,) * (lower + upper), 1 if lower + upper == 0 else 0)


def alternating_halves(s: int) -> Partition:
    """{{1,3,..,2s-1},{2,4,..,2s}} on 2s lower points."""
    if s < 1:
        raise ValueError("s must be positive")
    return Partition(2 * s, 0, tuple(i % 2 for i in range(2 * s)))


def nested_four_blocks(k: int) -> Partition:
    """k four-point blocks {i, 2k+1-i, 2k+i, 4k+1-i} on 4k lower points."""
    if k < 1:
        raise ValueError("k must be positive")
    labels = [0] * (4 * k)
    for i in range(1, k + 1):
        for pt in (i, 2 * k + 1 - i, 2 * k + i, 4 * k + 1 - i):
            labels[pt - 1] = i
    return Partition(4 * k, 0, tuple(labels))


NAMED_PARTITIONS = {
    "identity": identity,
    "cap": pair_cap,
    "cup": pair_cup,
    "swap": swap,
    "fork": fork,
    "four_block": four_block,
    "reversal3": reversal3,
    "crossed_four_block": crossed_four_block,
    "through_pair_with_singletons": through_pair_with_singletons,
    "singleton_lower": singleton_lower,
    "singleton_upper": singleton_upper,
}


def named_partition(name: str) -> Partition:
    """Look up a named partition; also accepts ``alternating_halves:s`` and ``nested_four_blocks:k``."""
    base, _, arg = name.partition(":")
    if base == "alternating_halves":
        return alternating_halves(int(arg))
    if base == "nested_four_blocks":
        return nested_four_blocks(int(arg))
    try:
        return NAMED_PARTITIONS[base]()
    except KeyError:
        raise ValueError(f"unknown partition {name!r}; known: {sorted(NAMED_PARTITIONS)}") from None
