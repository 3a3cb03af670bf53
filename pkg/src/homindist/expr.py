"""Expression trees over generator bilabelled graphs, their evaluation and text form.

Leaves are generators; inner nodes are ``Compose(left, right)`` (left after
right, so in-labels of left meet out-labels of right), ``Tensor`` and
``Adjoint``. Evaluation is iterative, so deep expressions are fine.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .bilabelled import (
    BilabelledGraph,
    b_adjoint,
    b_compose,
    b_tensor,
    edge,
    gamma,
    identity_graph,
    multiplication,
)
from .graphs import Graph
from .homomorphism import HomTensor, kron, matmul, transpose
from .partitions import (
    Partition,
    alternating_halves,
    identity,
    nested_four_blocks,
    partition_map,
    reversal3,
    single_block,
    swap,
)

__all__ = [
    "Gen",
    "Compose",
    "Tensor",
    "Adjoint",
    "Expr",
    "ArityError",
    "SExprError",
    "I",
    "A",
    "S",
    "Sbar",
    "Xi",
    "Pi2",
    "M",
    "H",
    "partition_leaf",
    "arity",
    "eval_graph",
    "eval_tensor",
    "to_sexpr",
    "parse_sexpr",
    "leaf_names",
    "size",
]


@dataclass(frozen=True)
class Gen:
    """Generator leaf. ``params`` holds (p, q) for M, (s,) for H and (P,) for partition."""

    name: str
    params: tuple = ()

    def __repr__(self) -> str:
        return to_sexpr(self)


@dataclass(frozen=True)
class Compose:
    left: "Expr"
    right: "Expr"

    def __repr__(self) -> str:
        return to_sexpr(self)


@dataclass(frozen=True)
class Tensor:
    left: "Expr"
    right: "Expr"

    def __repr__(self) -> str:
        return to_sexpr(self)


@dataclass(frozen=True)
class Adjoint:
    child: "Expr"

    def __repr__(self) -> str:
        return to_sexpr(self)


Expr = Union[Gen, Compose, Tensor, Adjoint]


class ArityError(ValueError):
    """A Compose node whose inner arities do not match."""


class SExprError(ValueError):
    """Malformed expression text; the message starts with the byte offset."""

    def __init__(self, offset: int, message: str):
        super().__init__(f"byte {offset}: {message}")
        self.offset = offset


I = Gen("I")
A = Gen("A")
S = Gen("S")
Sbar = Gen("Sbar")
Xi = Gen("Xi")
Pi2 = Gen("Pi2")


def M(p: int, q: int) -> Gen:
    if p < 0 or q < 0:
        raise ValueError("M arities must be nonnegative")
    return Gen("M", (p, q))


def H(s: int) -> Gen:
    if s < 1:
        raise ValueError("H needs s >= 1")
    return Gen("H", (s,))


def partition_leaf(p: Partition) -> Gen:
    return Gen("partition", (p,))


def _leaf_partition(g: Gen) -> Partition | None:
    """The partition whose graph is this leaf, or None for the edge A."""
    match g.name:
        case "I":
            return identity()
        case "M":
            return single_block(*g.params)
        case "Xi":
            return single_block(2, 0)
        case "S":
            return swap()
        case "Sbar":
            return reversal3()
        case "Pi2":
            return nested_four_blocks(2)
        case "H":
            return alternating_halves(g.params[0])
        case "partition":
            return g.params[0]
        case "A":
            return None
    raise ValueError(f"unknown generator {g.name!r}")


def _leaf_arity(g: Gen) -> tuple[int, int]:
    if g.name == "A":
        return (1, 1)
    p = _leaf_partition(g)
    return (p.lower, p.upper)


def _fold(e: Expr, leaf: Callable, compose: Callable, tensor: Callable, adjoint: Callable, share: bool = True):
    """Post-order evaluation without recursion.

    With ``share`` a subtree object occurring several times is evaluated once;
    callbacks with side effects must pass ``share=False``.
    """
    if not share:
        return _fold_each(e, leaf, compose, tensor, adjoint)
    done: dict[int, object] = {}
    stack = [e]
    while stack:
        node = stack[-1]
        key = id(node)
        if key in done:
            stack.pop()
            continue
        if isinstance(node, Gen):
            done[key] = leaf(node)
            stack.pop()
        elif isinstance(node, Adjoint):
            if id(node.child) in done:
                done[key] = adjoint(done[id(node.child)])
                stack.pop()
            else:
                stack.append(node.child)
        elif isinstance(node, (Compose, Tensor)):
            pending = [c for c in (node.right, node.left) if id(c) not in done]
            if pending:
                stack.extend(pending)
            else:
                op = compose if isinstance(node, Compose) else tensor
                done[key] = op(done[id(node.left)], done[id(node.right)], node)
                stack.pop()
        else:
            raise TypeError(f"not an expression node: {node!r}")
    return done[id(e)]


def _fold_each(e: Expr, leaf: Callable, compose: Callable, tensor: Callable, adjoint: Callable):
    values: list = []
    stack: list[tuple[Expr, bool]] = [(e, False)]
    while stack:
        node, expanded = stack.pop()
        if isinstance(node, Gen):
            values.append(leaf(node))
        elif not expanded:
            stack.append((node, True))
            if isinstance(node, Adjoint):
                stack.append((node.child, False))
            elif isinstance(node, (Compose, Tensor)):
                stack.append((node.right, False))
                stack.append((node.left, False))
            else:
                raise TypeError(f"not an expression node: {node!r}")
        elif isinstance(node, Adjoint):
            values.append(adjoint(values.pop()))
        else:
            r = values.pop()
            l = values.pop()
            op = compose if isinstance(node, Compose) else tensor
            values.append(op(l, r, node))
    return values[0]


def _compose_arity(l: tuple[int, int], r: tuple[int, int], node) -> tuple[int, int]:
    if l[1] != r[0]:
        raise ArityError(
            f"compose node {_short(node)}: left has in-arity {l[1]}, right has out-arity {r[0]}"
        )
    return (l[0], r[1])


def _short(node, limit: int = 80) -> str:
    text = to_sexpr(node)
    return text if len(text) <= limit else text[: limit - 3] + "..."


def arity(e: Expr) -> tuple[int, int]:
    """(out, in) arity; raises ArityError naming the first mismatched node."""
    return _fold(
        e,
        _leaf_arity,
        _compose_arity,
        lambda l, r, _: (l[0] + r[0], l[1] + r[1]),
        lambda c: (c[1], c[0]),
    )


def size(e: Expr) -> int:
    """Number of leaves."""
    return _fold(e, lambda g: 1, lambda l, r, _: l + r, lambda l, r, _: l + r, lambda c: c)


def leaf_names(e: Expr) -> set[str]:
    def leaf(g: Gen) -> frozenset:
        if g.name == "M":
            return frozenset({f"M{g.params[0]},{g.params[1]}"})
        return frozenset({g.name})

    return set(_fold(e, leaf, lambda l, r, _: l | r, lambda l, r, _: l | r, lambda c: c))


# ---------------------------------------------------------------- graph evaluation


def _leaf_graph(g: Gen) -> BilabelledGraph:
    match g.name:
        case "A":
            return edge()
        case "I":
            return identity_graph()
        case "M":
            return multiplication(*g.params)
        case "Xi":
            return multiplication(2, 0)
    return gamma(_leaf_partition(g))


def eval_graph(e: Expr) -> BilabelledGraph:
    arity(e)
    return _fold(
        e,
        _leaf_graph,
        lambda l, r, _: b_compose(l, r),
        lambda l, r, _: b_tensor(l, r),
        b_adjoint,
    )


# ---------------------------------------------------------------- tensor evaluation


def _dense(e: Expr, g: Graph) -> HomTensor:
    n = g.n
    adj = HomTensor(n, 1, 1, g.adjacency_matrix())

    def leaf(x: Gen) -> HomTensor:
        p = _leaf_partition(x)
        return adj if p is None else partition_map(p, n)

    return _fold(e, leaf, lambda l, r, _: matmul(l, r), lambda l, r, _: kron(l, r), transpose)


@dataclass
class _Net:
    """Symbolic network: edge factors over variables, open legs, and a power of n."""

    factors: list[tuple[int, int]]
    out: list[int]
    inp: list[int]
    loops: int


def _network(e: Expr) -> tuple[list[tuple[int, int]], list[int], list[int], int, int]:
    """Flatten an expression to adjacency factors over shared variables."""
    parent: list[int] = []

    def fresh(k: int) -> list[int]:
        start = len(parent)
        parent.extend(range(start, start + k))
        return list(range(start, start + k))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def leaf(x: Gen) -> _Net:
        if x.name == "A":
            u, v = fresh(2)
            return _Net([(u, v)], [u], [v], 0)
        p = _leaf_partition(x)
        vs = fresh(p.num_blocks)
        return _Net([], [vs[b] for b in p.labels[: p.lower]], [vs[b] for b in p.labels[p.lower:]], p.empty_blocks)

    def compose(l: _Net, r: _Net, node) -> _Net:
        if len(l.inp) != len(r.out):
            raise ArityError(f"compose node {_short(node)}: arities do not match")
        for a, b in zip(l.inp, r.out):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        return _Net(l.factors + r.factors, l.out, r.inp, l.loops + r.loops)

    def tensor(l: _Net, r: _Net, node) -> _Net:
        return _Net(l.factors + r.factors, l.out + r.out, l.inp + r.inp, l.loops + r.loops)

    def adjoint(c: _Net) -> _Net:
        return _Net(c.factors, c.inp, c.out, c.loops)

    net = _fold(e, leaf, compose, tensor, adjoint, share=False)
    used = {find(v) for v in range(len(parent))}
    edges = [(find(u), find(v)) for u, v in net.factors]
    return edges, [find(v) for v in net.out], [find(v) for v in net.inp], net.loops, len(used)


def _contract(n: int, edges: list[tuple[int, int]], free: list[int], adj: np.ndarray, total_vars: int, loops: int, exact: bool) -> np.ndarray:
    """Sum over non-free variables of the product of adjacency factors.

    Variables are eliminated greedily, smallest intermediate first.
    """
    dtype = object if exact else np.int64
    factors: list[tuple[np.ndarray, tuple[int, ...]]] = [(adj.astype(dtype), (u, v)) for u, v in edges]
    free_set = set(free)
    in_factors = {v for _, vs in factors for v in vs}
    scale = n ** (loops + (total_vars - len(in_factors | free_set)))
    summed = in_factors - free_set
    letters = string.ascii_letters

    def einsum(parts: list[tuple[np.ndarray, tuple[int, ...]]], keep: list[int]) -> np.ndarray:
        names: dict[int, str] = {}
        for _, vs in parts:
            for v in vs:
                names.setdefault(v, letters[len(names)])
        for v in keep:
            names.setdefault(v, letters[len(names)])
        subscripts = ",".join("".join(names[v] for v in vs) for _, vs in parts) + "->" + "".join(names[v] for v in keep)
        return np.einsum(subscripts, *(a for a, _ in parts))

    while summed:
        best = None
        for v in summed:
            touching = [f for f in factors if v in f[1]]
            union = set().union(*(f[1] for f in touching)) - {v}
            cost = (len(union), len(touching))
            if best is None or cost < best[0]:
                best = (cost, v, touching, union)
        _, v, touching, union = best
        keep = sorted(union)
        merged = einsum(touching, keep)
        factors = [f for f in factors if v not in f[1]] + [(merged, tuple(keep))]
        summed.discard(v)

    uniq = list(dict.fromkeys(free))
    factors += [(np.ones(n, dtype=dtype), (v,)) for v in uniq if v not in in_factors]
    result = einsum(factors, uniq) if factors else np.array(1, dtype=dtype)
    result = result * scale

    # spread onto the legs; legs sharing a variable only see the diagonal
    if not free:
        return np.asarray(result).reshape(())
    out = np.zeros((n,) * len(free), dtype=result.dtype)
    grid = np.indices((n,) * len(uniq)).reshape(len(uniq), -1)
    pos = {v: i for i, v in enumerate(uniq)}
    out[tuple(grid[pos[v]] for v in free)] = np.asarray(result).reshape(-1)
    return out


def eval_tensor(e: Expr, g: Graph, method: str = "auto") -> HomTensor:
    """Homomorphism tensor of the expression's graph into ``g``, computed from
    the generators' tensors without building the graph.

    ``dense`` multiplies generator matrices node by node; ``network`` contracts
    adjacency factors over shared index variables. ``auto`` picks dense when
    every intermediate tensor is small.
    """
    p, q = arity(e)
    n = g.n
    if method == "auto":
        widest = _fold(
            e,
            lambda x: sum(_leaf_arity(x)),
            lambda l, r, _: max(l, r),
            lambda l, r, _: l + r,
            lambda c: c,
        )
        method = "dense" if n ** max(widest, p + q) <= 1 << 14 else "network"
    if method == "dense":
        return _dense(e, g)
    if method != "network":
        raise ValueError(f"unknown method {method!r}")
    edges, out, inp, loops, total = _network(e)
    exact = (total + loops) * max(1, n).bit_length() >= 62
    entries = _contract(n, edges, out + inp, g.adjacency_matrix(), total, loops, exact)
    return HomTensor(n, p, q, entries)


# ---------------------------------------------------------------- text form

_ATOMS = {"I": I, "A": A, "S": S, "Sbar": Sbar, "Xi": Xi, "Pi2": Pi2}


def to_sexpr(e: Expr) -> str:
    """Prefix text; left-nested chains of one operator print flat."""

    def leaf(g: Gen) -> str:
        if g.name in _ATOMS:
            return g.name
        if g.name == "M":
            return f"(M {g.params[0]} {g.params[1]})"
        if g.name == "H":
            return f"(H {g.params[0]})"
        if g.name == "partition":
            p: Partition = g.params[0]
            blocks = " ".join("(" + " ".join(b) + ")" for b in p.blocks)
            tail = f" {p.empty_blocks}" if p.empty_blocks else ""
            return f"(partition {p.lower} {p.upper} ({blocks}){tail})"
        raise ValueError(f"unknown generator {g.name!r}")

    def chain(head: str):
        def op(l: str, r: str, node) -> str:
            prefix = f"({head} "
            inner = node.left
            if isinstance(inner, type(node)) and l.startswith(prefix):
                return l[:-1] + " " + r + ")"
            return f"({head} {l} {r})"

        return op

    return _fold(e, leaf, chain("compose"), chain("tensor"), lambda c: f"(adjoint {c})")


_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            if text[pos:].strip() == "":
                break
            raise SExprError(pos, f"unexpected character {text[pos]!r}")
        tok = m.group(1) or m.group(2) or m.group(3)
        if tok is None:
            break
        tokens.append((tok, m.start(m.lastindex)))
        pos = m.end()
    return tokens


def parse_sexpr(text: str) -> Expr:
    tokens = _tokenize(text)
    if not tokens:
        raise SExprError(0, "empty expression")
    pos = 0

    def take() -> tuple[str, int]:
        nonlocal pos
        if pos >= len(tokens):
            raise SExprError(len(text.encode()), "unexpected end of input")
        tok = tokens[pos]
        pos += 1
        return tok

    def integer(tok: str, off: int) -> int:
        if not re.fullmatch(r"\d+", tok):
            raise SExprError(off, f"expected a nonnegative integer, got {tok!r}")
        return int(tok)

    def expect_close() -> None:
        tok, off = take()
        if tok != ")":
            raise SExprError(off, f"expected ')', got {tok!r}")

    def parse_blocks(lower: int, upper: int) -> list[list[str]]:
        tok, off = take()
        if tok != "(":
            raise SExprError(off, "expected '(' opening the block list")
        blocks = []
        while True:
            tok, off = take()
            if tok == ")":
                return blocks
            if tok != "(":
                raise SExprError(off, "expected '(' opening a block")
            block = []
            while True:
                tok, off = take()
                if tok == ")":
                    break
                if not re.fullmatch(r"[LU]\d+", tok):
                    raise SExprError(off, f"bad point code {tok!r}")
                block.append(tok)
            blocks.append(block)

    def node() -> Expr:
        tok, off = take()
        if tok == ")":
            raise SExprError(off, "unexpected ')'")
        if tok != "(":
            if tok in _ATOMS:
                return _ATOMS[tok]
            raise SExprError(off, f"unknown atom {tok!r}")
        head, hoff = take()
        if head in ("compose", "tensor"):
            args = []
            while pos < len(tokens) and tokens[pos][0] != ")":
                args.append(node())
            if pos >= len(tokens):
                raise SExprError(len(text.encode()), "unexpected end of input")
            if len(args) < 2:
                raise SExprError(hoff, f"{head} needs at least two arguments")
            expect_close()
            acc = args[0]
            cls = Compose if head == "compose" else Tensor
            for a in args[1:]:
                acc = cls(acc, a)
            return acc
        if head == "adjoint":
            child = node()
            expect_close()
            return Adjoint(child)
        if head == "M":
            p = integer(*take())
            q = integer(*take())
            expect_close()
            return M(p, q)
        if head == "H":
            s_tok, s_off = take()
            s = integer(s_tok, s_off)
            if s < 1:
                raise SExprError(s_off, "H needs s >= 1")
            expect_close()
            return H(s)
        if head == "partition":
            lower = integer(*take())
            upper = integer(*take())
            boff = tokens[pos][1] if pos < len(tokens) else len(text)
            blocks = parse_blocks(lower, upper)
            loops = 0
            if pos < len(tokens) and tokens[pos][0] != ")":
                loops = integer(*take())
            expect_close()
            try:
                return partition_leaf(Partition.from_blocks(lower, upper, blocks, loops))
            except ValueError as exc:
                raise SExprError(boff, str(exc)) from None
        raise SExprError(hoff, f"unknown head {head!r}")

    result = node()
    if pos != len(tokens):
        raise SExprError(tokens[pos][1], "trailing input after expression")
    arity(result)
    return result
