"""Homomorphism indistinguishability over cycles, paths and cycles, bounded
planar patterns, and all graphs.

Traces and walk sums are computed with exact integers. A verdict that says
"distinguished" always carries a pattern F whose hom counts were recomputed
and found to differ, except at the isomorphism level where the evidence is
the pair of canonical forms.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .graphs import (
    Graph,
    are_isomorphic,
    canonical_form,
    canonical_graph,
    cycle,
    enumerate_graphs,
    path,
    write_graph6,
)
from .homomorphism import hom_count

__all__ = [
    "Verdict",
    "LEVELS",
    "MAX_PLANAR_BOUND",
    "decide",
    "decide_cycles",
    "decide_paths_cycles",
    "decide_planar_bounded",
    "decide_all_graphs",
    "hom_profile",
    "thread_limit",
    "traces",
    "walk_sums",
]

LEVELS = ("cycles", "paths-cycles", "planar", "iso")
MAX_PLANAR_BOUND = 7


@dataclass(frozen=True)
class Verdict:
    """Outcome of one decision procedure.

    ``witness_pattern`` and ``counts`` are set when a pattern distinguishes
    the two graphs; ``bound`` is set by the planar decider; ``invariants``
    holds the data that was compared.
    """

    equivalent: bool
    level: str
    bound: int | None = None
    witness_pattern: Graph | None = None
    counts: tuple[int, int] | None = None
    invariants: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        data: dict = {"equivalent": self.equivalent, "level": self.level}
        if self.bound is not None:
            data["bound"] = self.bound
        if self.witness_pattern is not None:
            data["witness_pattern"] = write_graph6(self.witness_pattern)
        if self.counts is not None:
            data["counts"] = [str(c) for c in self.counts]
        if self.invariants:
            data["invariants"] = self.invariants
        return data


def _distinguished(level: str, f: Graph, g: Graph, h: Graph, **extra) -> Verdict:
    counts = (hom_count(f, g), hom_count(f, h))
    if counts[0] == counts[1]:
        raise RuntimeError(f"pattern {write_graph6(f)} does not distinguish the inputs at level {level}")
    return Verdict(False, level, witness_pattern=f, counts=counts, **extra)


def _check_simple(*graphs: Graph) -> None:
    for g in graphs:
        if g.has_loops():
            raise ValueError("deciders expect graphs without loops")


def thread_limit() -> int:
    """Worker processes allowed by HOMINDIST_THREADS (default 1)."""
    raw = os.environ.get("HOMINDIST_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"HOMINDIST_THREADS must be a positive integer, got {raw!r}") from None


# ---------------------------------------------------------------- exact invariants


def _powers(g: Graph, count: int):
    a = np.array(g.adjacency_matrix(), dtype=object)
    cur = np.identity(g.n, dtype=object)
    for _ in range(count):
        yield cur
        cur = cur.dot(a)


def traces(g: Graph, kmax: int) -> list[int]:
    """[tr(A^k) for k = 1..kmax]."""
    return [int(np.trace(p)) for p in list(_powers(g, kmax + 1))[1:]]


def walk_sums(g: Graph, kmax: int) -> list[int]:
    """[1^T A^k 1 for k = 0..kmax]."""
    return [int(p.sum()) for p in _powers(g, kmax + 1)]


# ---------------------------------------------------------------- deciders


def decide_cycles(g: Graph, h: Graph) -> Verdict:
    """Equal order and equal tr(A^k) for k = 1..n; these determine the spectrum."""
    _check_simple(g, h)
    if g.n != h.n:
        return _distinguished("cycles", Graph(1), g, h)
    tg, th = traces(g, g.n), traces(h, h.n)
    for k, (x, y) in enumerate(zip(tg, th), start=1):
        if x != y:
            return _distinguished("cycles", cycle(k), g, h)
    return Verdict(True, "cycles", invariants={"order": g.n, "traces": [str(t) for t in tg]})


def decide_paths_cycles(g: Graph, h: Graph) -> Verdict:
    """Cycle equivalence plus equal walk sums 1^T A^k 1 for k = 0..n-1."""
    base = decide_cycles(g, h)
    if not base.equivalent:
        return Verdict(False, "paths-cycles", witness_pattern=base.witness_pattern, counts=base.counts)
    wg, wh = walk_sums(g, g.n - 1), walk_sums(h, h.n - 1)
    for k, (x, y) in enumerate(zip(wg, wh)):
        if x != y:
            return _distinguished("paths-cycles", path(k + 1), g, h)
    inv = dict(base.invariants)
    inv["walk_sums"] = [str(w) for w in wg]
    return Verdict(True, "paths-cycles", invariants=inv)


def decide_all_graphs(g: Graph, h: Graph) -> Verdict:
    """Isomorphism; the evidence is the pair of canonical forms."""
    _check_simple(g, h)
    forms = [write_graph6(canonical_graph(g)), write_graph6(canonical_graph(h))]
    return Verdict(are_isomorphic(g, h), "iso", invariants={"canonical_forms": forms})


def _pattern_key(f: Graph):
    return (f.n, f.num_edges, canonical_form(f))


def _count_pair(args: tuple[Graph, Graph, Graph]) -> tuple[int, int]:
    f, g, h = args
    return hom_count(f, g), hom_count(f, h)


def decide_planar_bounded(
    g: Graph,
    h: Graph,
    m: int,
    progress: Callable[[Graph, tuple[int, int]], None] | None = None,
) -> Verdict:
    """Compare hom counts from every connected planar pattern on at most m vertices.

    Connected patterns suffice because hom counts multiply over components.
    The first mismatch in (vertices, edges, canonical form) order is
    reported. Agreement only means indistinguishable up to the bound.
    """
    if not 1 <= m <= MAX_PLANAR_BOUND:
        raise ValueError(f"pattern bound must lie in 1..{MAX_PLANAR_BOUND}, got {m}")
    _check_simple(g, h)
    patterns = sorted(enumerate_graphs(m, "connected_planar"), key=_pattern_key)
    workers = thread_limit()
    jobs = ((f, g, h) for f in patterns)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_count_pair, jobs, chunksize=8)
            return _first_mismatch(patterns, results, g, h, m, progress)
    return _first_mismatch(patterns, map(_count_pair, jobs), g, h, m, progress)


def _first_mismatch(patterns, results, g, h, m, progress) -> Verdict:
    for f, counts in zip(patterns, results):
        if progress is not None:
            progress(f, counts)
        if counts[0] != counts[1]:
            return _distinguished("planar", f, g, h, bound=m)
    return Verdict(True, "planar", bound=m, invariants={"patterns_checked": len(patterns)})


def decide(level: str, g: Graph, h: Graph, bound: int | None = None) -> Verdict:
    if level == "cycles":
        return decide_cycles(g, h)
    if level == "paths-cycles":
        return decide_paths_cycles(g, h)
    if level == "iso":
        return decide_all_graphs(g, h)
    if level == "planar":
        if bound is None:
            raise ValueError("the planar level needs a pattern bound")
        return decide_planar_bounded(g, h, bound)
    raise ValueError(f"unknown level {level!r}; known: {LEVELS}")


def hom_profile(g: Graph, patterns: Sequence[Graph]) -> list[int]:
    """Exact hom(F, g) for each pattern, in input order."""
    workers = thread_limit()
    if workers > 1 and len(patterns) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(hom_count, patterns, [g] * len(patterns)))
    return [hom_count(f, g) for f in patterns]
