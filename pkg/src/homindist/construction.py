"""Gadget expressions, graph families as expressions, and graph synthesis.

``synthesize_planar`` rebuilds a planar bilabelled graph with doubled labels
from I, M(2,0), M(2,2) and A by peeling off one vertex at a time.
``synthesize_all_graphs`` builds any graph from M(2,0), an edge gadget and a
swap gadget (or a quotient by a partition).
"""

from __future__ import annotations

from itertools import permutations
from typing import Iterable, Sequence

import networkx as nx

from .bilabelled import (
    BilabelledGraph,
    b_adjoint,
    b_compose,
    b_isomorphic,
    b_tensor,
    envelope_apex,
    is_doubled,
    is_planar_bilabelled,
    quotient,
)
from .expr import (
    A,
    Adjoint,
    Compose,
    Expr,
    I,
    M,
    Pi2,
    Sbar,
    Tensor,
    arity,
    eval_graph,
    eval_tensor,
    partition_leaf,
)
from .graphs import Graph, enumerate_graphs
from .homomorphism import hom_tensor
from .partitions import Partition, crossed_four_block

__all__ = [
    "chain",
    "tensor_all",
    "identity_power",
    "compose_power",
    "tensor_power",
    "pad",
    "cycle_expr",
    "path_expr",
    "PATH_VARIANTS",
    "m_expr",
    "edge_gadget",
    "swap_gadget",
    "fat_swap",
    "star_gadget",
    "rotate",
    "bend_input",
    "gram_expr",
    "synthesize_planar",
    "synthesize_all_graphs",
    "STRATEGIES",
    "group_edge",
    "quotient_construction",
    "SynthesisError",
]

EMPTY = partition_leaf(Partition(0, 0, ()))
CUP = Adjoint(M(2, 0))


class SynthesisError(ValueError):
    """Input outside the domain of a synthesis routine."""


# ---------------------------------------------------------------- combinators


def chain(*es: Expr) -> Expr:
    """e1 o e2 o ... o ek."""
    acc = es[0]
    for e in es[1:]:
        acc = Compose(acc, e)
    return acc


def tensor_all(*es: Expr | None) -> Expr:
    """Tensor product of the non-None arguments (the empty graph if none)."""
    parts = [e for e in es if e is not None]
    if not parts:
        return EMPTY
    acc = parts[0]
    for e in parts[1:]:
        acc = Tensor(acc, e)
    return acc


def identity_power(k: int) -> Expr | None:
    """I^{(x)k}, or None for k = 0 so that ``tensor_all`` drops it."""
    return tensor_power(I, k) if k else None


def compose_power(e: Expr, k: int) -> Expr:
    """k-fold composition e o ... o e; k = 0 gives the identity of matching width."""
    p, q = arity(e)
    if k == 0:
        if p != q:
            raise ValueError("zeroth composition power needs a square expression")
        return tensor_all(identity_power(p)) if p else EMPTY
    return chain(*([e] * k))


def tensor_power(e: Expr, k: int) -> Expr:
    if k == 0:
        return EMPTY
    return tensor_all(*([e] * k))


def pad(e: Expr, left: int, right: int) -> Expr:
    """I^{(x)left} (x) e (x) I^{(x)right}."""
    return tensor_all(identity_power(left), e, identity_power(right))


# ---------------------------------------------------------------- families


def cycle_expr(n: int) -> Expr:
    """A (0,0) expression evaluating to the cycle C_n (C_1 = K_1, C_2 = K_2)."""
    if n < 1:
        raise ValueError("cycle length must be positive")
    if n == 1:
        return chain(CUP, M(2, 0))
    return chain(CUP, Tensor(A, compose_power(A, n - 1)), M(2, 0))


PATH_VARIANTS = ("plain", "doubled-singletons", "complexified")


def path_expr(n: int, variant: str = "plain") -> Expr:
    """A (0,0) expression evaluating to the path P_n on n vertices."""
    if n < 1:
        raise ValueError("path order must be positive")
    walk = compose_power(A, n - 1) if n > 1 else I
    if variant == "plain":
        if n == 1:
            return chain(CUP, M(2, 0))
        return chain(M(0, 1), walk, M(1, 0))
    if variant == "doubled-singletons":
        return chain(Tensor(M(0, 1), M(0, 1)), Tensor(walk, I), M(2, 0))
    if variant == "complexified":
        return chain(CUP, tensor_all(M(1, 0), I, M(0, 1)), Tensor(walk, I), M(2, 0))
    raise ValueError(f"unknown path variant {variant!r}; known: {PATH_VARIANTS}")


# ---------------------------------------------------------------- gadgets


def m_expr(p: int, q: int) -> Expr:
    """The one-vertex graph with p out- and q in-labels (both even) from
    M(2,0), M(2,2) and I only."""
    if p % 2 or q % 2 or p < 0 or q < 0:
        raise ValueError("m_expr needs even nonnegative arities")
    if p == 0 and q == 0:
        return chain(CUP, M(2, 0))
    if q == 0:
        return chain(m_expr(p, 2), M(2, 0))
    if p == 0:
        return Adjoint(m_expr(q, 0))
    cur: Expr = M(2, 2)
    r, s = 1, 1
    while s < q // 2:
        # cap the last out-label of cur against the first out-label of a new M(2,2)
        cur = chain(tensor_all(identity_power(2 * r - 1), CUP, I), Tensor(cur, M(2, 2)))
        s += 1
    while r < p // 2:
        cur = chain(Tensor(cur, M(2, 2)), tensor_all(identity_power(2 * s - 1), M(2, 0), I))
        r += 1
    return cur


def edge_gadget() -> Expr:
    """(4,4) gadget: composed onto doubled out-labels (.., u, u, z, z, ..) it adds the edge uz."""
    return chain(
        tensor_all(identity_power(2), M(2, 4)),
        tensor_all(identity_power(2), A, A, identity_power(2)),
        tensor_all(M(4, 2), identity_power(2)),
    )


def swap_gadget() -> Expr:
    """(4,4) gadget sending input (i, j, k, l) to output (k, l, i, j)."""
    return chain(Tensor(I, Sbar), Tensor(Sbar, I))


def rotate(e: Expr, direction: str = "right") -> Expr:
    """Move an out-label to the in-row.

    ``right``: the last out-label becomes the last in-label.
    ``left``: the first out-label becomes the first in-label.
    """
    p, _ = arity(e)
    if p == 0:
        raise ValueError("nothing to rotate: out-arity is 0")
    if direction == "right":
        return chain(tensor_all(identity_power(p - 1), CUP), Tensor(e, I))
    if direction == "left":
        return chain(tensor_all(CUP, identity_power(p - 1)), Tensor(I, e))
    raise ValueError("direction must be 'left' or 'right'")


def bend_input(e: Expr) -> Expr:
    """Move the last in-label to the end of the out-row."""
    _, q = arity(e)
    if q == 0:
        raise ValueError("nothing to bend: in-arity is 0")
    return chain(Tensor(e, I), pad(M(2, 0), q - 1, 0))


def fat_swap() -> Expr:
    """(4,4) gadget with out (x, x, y, y) and in (y, y, x, x), obtained by rotating Pi2."""
    e = rotate(Pi2, "left")
    for _ in range(3):
        e = rotate(e, "right")
    return e


def star_gadget(m: int, d: int, pos: str = "C") -> Expr:
    """Star with 2d leaves: centre carries 2m out-labels.

    ``C``: in-labels are the leaves; ``L``/``R``: two centre in-labels before/after them.
    """
    if m < 0 or d < 0:
        raise ValueError("star gadget parameters must be nonnegative")
    if pos == "C":
        return m_expr(2 * m, 0) if d == 0 else chain(m_expr(2 * m, 2 * d), tensor_power(A, 2 * d))
    if pos not in ("L", "R"):
        raise ValueError("pos must be 'C', 'L' or 'R'")
    if d == 0:
        return m_expr(2 * m, 2)
    leaves = tensor_power(A, 2 * d)
    body = Tensor(identity_power(2), leaves) if pos == "L" else Tensor(leaves, identity_power(2))
    return chain(m_expr(2 * m, 2 * d + 2), body)


def gram_expr(k1: Expr, k2: Expr) -> Expr:
    """(0,0) expression whose value over G is sum_{u,v} (K1_G)_{uv} (K2_G)_{uv}."""
    a1, a2 = arity(k1), arity(k2)
    if a1 != a2:
        raise ValueError(f"gram needs equal arities, got {a1} and {a2}")
    p, q = a1
    if p <= q:
        x, width = chain(k1, Adjoint(k2)), p
    else:
        x, width = chain(Adjoint(k1), k2), q
    if width == 0:
        return x
    # b pairs position i with position 2*width+1-i: sum_v e_v (x) e_reversed(v)
    b: Expr = M(2, 0)
    for j in range(2, width + 1):
        b = chain(pad(M(2, 0), j - 1, j - 1), b)
    return chain(Adjoint(b), Tensor(identity_power(width), x), b)


# ---------------------------------------------------------------- planar synthesis


def _remove_vertex(k: BilabelledGraph, v: int, out: Sequence[int], inp: Sequence[int]) -> BilabelledGraph:
    """K - v with new label vectors given in old vertex ids."""
    shift = lambda x: x - 1 if x > v else x  # noqa: E731
    edges = [(shift(a), shift(b)) for a, b in k.graph.edges if v not in (a, b)]
    return BilabelledGraph.build(k.n - 1, edges, [shift(x) for x in out], [shift(x) for x in inp])


def _dbl(xs: Iterable[int]) -> list[int]:
    return [x for x in xs for _ in (0, 1)]


def _neighbour_orders(k: BilabelledGraph, v: int) -> Iterable[tuple[int, ...]]:
    """Neighbour orders of v to try: rotations read off planar embeddings first."""
    nbrs = sorted(k.graph.neighbors()[v] - {v})
    if len(nbrs) <= 1:
        yield tuple(nbrs)
        return
    tried = set()
    env = envelope_apex(k).without_loops()
    planar, emb = nx.check_planarity(env.to_networkx())
    if planar:
        ring = [w for w in emb.neighbors_cw_order(v)]
        inner = [w for w in ring if w < k.n and w in nbrs]
        for order in (inner, inner[::-1]):
            for shift in range(len(order)):
                cand = tuple(order[shift:] + order[:shift])
                if cand not in tried:
                    tried.add(cand)
                    yield cand
    for cand in permutations(nbrs):
        if cand not in tried:
            yield cand


def _runs(a: Sequence[int], b: Sequence[int]) -> list[tuple[int, int, str, dict]]:
    """Vertices occurring consecutively in the cyclic word a + reversed(b).

    Returns (start, vertex, case, data) for every vertex whose occurrences
    form one cyclic run usable by a decomposition step.
    """
    word = list(a) + list(b)[::-1]
    la, lb = len(a), len(b)
    total = len(word)
    positions: dict[int, list[int]] = {}
    for i, x in enumerate(word):
        positions.setdefault(x, []).append(i)
    found = []
    for v, pos in positions.items():
        s = set(pos)
        starts = [i for i in pos if (i - 1) % total not in s]
        if len(pos) == total:
            start = 0
        elif len(starts) == 1:
            start = starts[0]
        else:
            continue
        in_a = [i for i in pos if i < la]
        in_b = [lb - 1 - (i - la) for i in pos if i >= la]
        if len(pos) == total:
            if lb == 0:
                found.append((start, v, "out", {"p": 0, "q": la - 1}))
            elif la == 0:
                found.append((start, v, "in", {"p": 0, "q": lb - 1}))
            else:
                found.append((start, v, "left", {"m": la, "r": lb}))
            continue
        contiguous = max(pos) - min(pos) + 1 == len(pos)
        if in_a and not in_b:
            if contiguous:
                found.append((start, v, "out", {"p": min(in_a), "q": max(in_a)}))
        elif in_b and not in_a:
            if contiguous:
                found.append((start, v, "in", {"p": min(in_b), "q": max(in_b)}))
        else:
            wraps_start = 0 in s and total - 1 in s
            wraps_middle = la - 1 in s and la in s
            if wraps_start and not wraps_middle:
                found.append((start, v, "left", {"m": len(in_a), "r": len(in_b)}))
            elif wraps_middle and not wraps_start:
                found.append((start, v, "right", {"m": len(in_a), "r": len(in_b)}))
    found.sort(key=lambda t: (t[0], t[1]))
    return found


def _planar_step(k: BilabelledGraph):
    """One decomposition step: (builder, K') with builder(expr_for_K') an expression for K."""
    a, b = list(k.out[::2]), list(k.inp[::2])
    la, lb = len(a), len(b)

    if la + lb == 0:
        candidates = [(0, v, "closed", {}) for v in range(k.n)]
    else:
        candidates = _runs(a, b)
    for _, v, case, data in candidates:
        for nbrs in _neighbour_orders(k, v):
            nb = list(nbrs)
            d = len(nb)
            if case == "closed":
                kp = _remove_vertex(k, v, _dbl(nb), [])
                gadget = star_gadget(0, d, "C")
                build = lambda sub, g=gadget: Compose(g, sub)  # noqa: E731
                direct = lambda kp, g=gadget: b_compose(eval_graph(g), kp)  # noqa: E731
            elif case == "out":
                p, q = data["p"], data["q"]
                kp = _remove_vertex(k, v, _dbl(a[:p] + nb + a[q + 1:]), _dbl(b))
                gadget = pad(star_gadget(q - p + 1, d, "C"), 2 * p, 2 * (la - q - 1))
                build = lambda sub, g=gadget: Compose(g, sub)  # noqa: E731
                direct = lambda kp, g=gadget: b_compose(eval_graph(g), kp)  # noqa: E731
            elif case == "in":
                p, q = data["p"], data["q"]
                kp = _remove_vertex(k, v, _dbl(a), _dbl(b[:p] + nb + b[q + 1:]))
                gadget = Adjoint(pad(star_gadget(q - p + 1, d, "C"), 2 * p, 2 * (lb - q - 1)))
                build = lambda sub, g=gadget: Compose(sub, g)  # noqa: E731
                direct = lambda kp, g=gadget: b_compose(kp, eval_graph(g))  # noqa: E731
            elif case == "left":
                m, r = data["m"], data["r"]
                kp = _remove_vertex(k, v, _dbl(nb + a[m:]), _dbl(b[r:]))
                top = Tensor(star_gadget(m, d, "L"), identity_power(2 * (la - m))) if la > m else star_gadget(m, d, "L")
                side = m_expr(2, 2 * r)
                build = lambda sub, t=top, s=side: Compose(t, Tensor(s, sub))  # noqa: E731
                direct = lambda kp, t=top, s=side: b_compose(eval_graph(t), b_tensor(eval_graph(s), kp))  # noqa: E731
            else:  # right
                m, r = data["m"], data["r"]
                kp = _remove_vertex(k, v, _dbl(a[: la - m] + nb), _dbl(b[: lb - r]))
                top = Tensor(identity_power(2 * (la - m)), star_gadget(m, d, "R")) if la > m else star_gadget(m, d, "R")
                side = m_expr(2, 2 * r)
                build = lambda sub, t=top, s=side: Compose(t, Tensor(sub, s))  # noqa: E731
                direct = lambda kp, t=top, s=side: b_compose(eval_graph(t), b_tensor(kp, eval_graph(s)))  # noqa: E731
            if is_planar_bilabelled(kp):
                return build, kp, direct
    raise RuntimeError(
        "no removable vertex found; a planar bilabelled graph always has one, so this is a bug"
    )


def synthesize_planar(k: BilabelledGraph, verify: bool = True) -> Expr:
    """Expression over I, M(2,0), M(2,2), A evaluating to ``k``.

    ``k`` must be planar bilabelled with doubled labels and no loops. With
    ``verify`` every step is checked to reproduce its input up to a
    label-preserving isomorphism, and the final expression's tensor is compared
    with ``hom_tensor(k, G)`` for every graph G on at most 3 vertices.
    """
    if not is_doubled(k):
        raise SynthesisError("labels are not doubled")
    if k.graph.has_loops():
        raise SynthesisError("graphs with loops are not supported")
    if not is_planar_bilabelled(k):
        raise SynthesisError("graph is not planar bilabelled")

    steps = []
    cur = k
    while cur.n > 1:
        build, kp, direct = _planar_step(cur)
        if verify and not b_isomorphic(direct(kp), cur):
            raise RuntimeError(f"decomposition step does not reproduce {cur!r}")
        steps.append(build)
        cur = kp
    if cur.n == 1:
        expr = m_expr(len(cur.out), len(cur.inp))
    else:
        expr = EMPTY
    for build in reversed(steps):
        expr = build(expr)

    if verify:
        if not b_isomorphic(eval_graph(expr), k):
            raise RuntimeError("synthesized expression does not evaluate to the input graph")
        for g in enumerate_graphs(3):
            if eval_tensor(expr, g) != hom_tensor(k, g):
                raise RuntimeError(f"tensor mismatch on {g!r}")
    return expr


# ---------------------------------------------------------------- all graphs

STRATEGIES = ("swap", "pi2", "group_theoretic")


def group_edge() -> Expr:
    """(2,2) edge p - q with out (p, p) and in (q, q), built from the crossed four-block."""
    g = partition_leaf(crossed_four_block())
    m13 = chain(Tensor(I, CUP), g)
    m24 = chain(Tensor(m13, m13), tensor_all(identity_power(2), M(2, 0), identity_power(2)))
    return chain(m24, tensor_power(A, 4), Adjoint(m24))


def _layered(g: Graph, swapper: Expr) -> Expr:
    n = g.n
    acc = tensor_power(M(2, 0), n)
    slot = list(range(n))  # slot[v] = current slot of vertex v
    at = list(range(n))  # at[i] = vertex in slot i
    adder = edge_gadget()

    def layer(x: Expr, i: int) -> Expr:
        return pad(x, 2 * i, 2 * (n - i - 2))

    def swap_slots(i: int) -> None:
        nonlocal acc
        acc = Compose(layer(swapper, i), acc)
        u, w = at[i], at[i + 1]
        at[i], at[i + 1] = w, u
        slot[u], slot[w] = i + 1, i

    for u, w in g.sorted_edges():
        if slot[w] < slot[u]:
            u, w = w, u
        while slot[w] > slot[u] + 1:
            swap_slots(slot[w] - 1)
        acc = Compose(layer(adder, slot[u]), acc)
    return Compose(tensor_power(CUP, n), acc)


def _quotient_partition(g: Graph) -> Partition:
    """Cap joining the positions (s, s, t, t) of each edge st to its vertices."""
    labels = []
    for u, w in g.sorted_edges():
        labels += [u, u, w, w]
    return Partition(0, len(labels), tuple(labels))


def _group_theoretic(g: Graph) -> Expr:
    if g.num_edges == 0:
        return tensor_power(chain(CUP, M(2, 0)), g.n)
    bent = bend_input(bend_input(group_edge()))
    body = tensor_power(bent, g.num_edges)
    return Compose(partition_leaf(_quotient_partition(g)), body)


def synthesize_all_graphs(g: Graph, strategy: str = "swap") -> Expr:
    """A (0,0) expression evaluating to a graph isomorphic to ``g``.

    ``swap``: edge gadget and the swap gadget built from Sbar.
    ``pi2``: edge gadget and the fat swap built from Pi2.
    ``group_theoretic``: group edges tensored together, then all copies of a
    vertex merged by one partition cap; disconnected graphs are handled per
    component.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; known: {STRATEGIES}")
    if g.n == 0:
        raise ValueError("graph must have at least one vertex")
    if g.has_loops():
        raise ValueError("graphs with loops are not supported")
    if g.n == 1:
        return chain(CUP, M(2, 0))
    if strategy == "group_theoretic":
        comps = g.components()
        return tensor_all(*(_group_theoretic(g.induced(c)) for c in comps))
    return _layered(g, swap_gadget() if strategy == "swap" else fat_swap())


def quotient_construction(g: Graph) -> BilabelledGraph:
    """Graph-level version of the group-theoretic route for connected ``g``:
    tensor one group edge per edge of g, identify endpoint copies with
    ``quotient``, then cap the doubled labels."""
    if not g.is_connected() or g.num_edges == 0:
        raise ValueError("needs a connected graph with at least one edge")
    edges = g.sorted_edges()
    body = eval_graph(tensor_power(group_edge(), len(edges)))
    # vertex ids of the copies: out (p_i, p_i), in (q_i, q_i)
    classes: dict[int, list[int]] = {}
    for i, (u, w) in enumerate(edges):
        classes.setdefault(u, []).append(body.out[2 * i])
        classes.setdefault(w, []).append(body.inp[2 * i])
    blocks = [sorted(set(c)) for c in classes.values()]
    merged = quotient(body, blocks)
    caps = eval_graph(tensor_power(CUP, len(edges)))
    return b_compose(b_compose(caps, merged), b_adjoint(caps))
