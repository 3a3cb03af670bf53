import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from homindist.bilabelled import b_isomorphic, gamma, multiplication
from homindist.expr import (
    A,
    Adjoint,
    ArityError,
    Compose,
    H,
    I,
    M,
    Pi2,
    S,
    Sbar,
    SExprError,
    Tensor,
    Xi,
    arity,
    eval_graph,
    eval_tensor,
    leaf_names,
    parse_sexpr,
    partition_leaf,
    size,
    to_sexpr,
)
from homindist.graphs import Graph, are_isomorphic, cycle, enumerate_graphs
from homindist.homomorphism import hom_tensor
from homindist.partitions import fork, partition_map, swap

TRIANGLE = Compose(Compose(Adjoint(M(2, 0)), Tensor(A, Compose(A, A))), M(2, 0))


def test_arity_of_leaves_and_nodes():
    assert arity(I) == (1, 1)
    assert arity(A) == (1, 1)
    assert arity(S) == (2, 2)
    assert arity(Xi) == (2, 0)
    assert arity(Pi2) == (8, 0)
    assert arity(M(3, 1)) == (3, 1)
    assert arity(Tensor(A, M(2, 0))) == (3, 1)
    assert arity(Adjoint(M(2, 0))) == (0, 2)
    assert arity(TRIANGLE) == (0, 0)


def test_arity_error_names_node():
    with pytest.raises(ArityError, match="compose"):
        arity(Compose(A, M(2, 0)))


def test_triangle_expression():
    k = eval_graph(TRIANGLE)
    assert are_isomorphic(k.graph, cycle(3))
    for g in enumerate_graphs(4):
        expected = hom_tensor(k, g)
        assert eval_tensor(TRIANGLE, g, "dense") == expected
        assert eval_tensor(TRIANGLE, g, "network") == expected


def test_partition_leaves_evaluate_to_partition_maps():
    for p in (swap(), fork()):
        leaf = partition_leaf(p)
        assert b_isomorphic(eval_graph(leaf), gamma(p))
        assert eval_tensor(leaf, Graph(3)) == partition_map(p, 3)
    assert b_isomorphic(eval_graph(S), gamma(swap()))


def _random_expr(rng: random.Random, depth: int):
    """Random well-typed expression; returns (expr, arity)."""
    if depth == 0 or rng.random() < 0.3:
        leaf = rng.choice([I, A, S, Sbar, Xi, Adjoint(Xi), M(1, 2), M(2, 1), H(1)])
        return leaf, arity(leaf)
    kind = rng.choice(["compose", "tensor", "adjoint"])
    left, (p, q) = _random_expr(rng, depth - 1)
    if kind == "adjoint":
        return Adjoint(left), (q, p)
    if kind == "tensor":
        right, (r, s) = _random_expr(rng, depth - 1)
        if p + q + r + s > 6:
            return left, (p, q)
        return Tensor(left, right), (p + r, q + s)
    # compose with something of out-arity q
    r = rng.randint(0, 2)
    right = M(q, r) if rng.random() < 0.5 else Compose(M(q, r), A) if r == 1 else M(q, r)
    return Compose(left, right), (p, r)


def test_dense_and_network_agree_with_graph_evaluation():
    rng = random.Random(6)
    targets = enumerate_graphs(3)
    for _ in range(60):
        e, _ = _random_expr(rng, 4)
        k = eval_graph(e)
        for g in targets:
            ref = hom_tensor(k, g)
            assert eval_tensor(e, g, "dense") == ref
            assert eval_tensor(e, g, "network") == ref


def test_sexpr_round_trip():
    rng = random.Random(7)
    for _ in range(100):
        e, _ = _random_expr(rng, 4)
        assert parse_sexpr(to_sexpr(e)) == e or eval_graph(parse_sexpr(to_sexpr(e))) == eval_graph(e)
    p = partition_leaf(fork())
    assert parse_sexpr(to_sexpr(p)) == p
    assert to_sexpr(Compose(Compose(A, A), A)) == "(compose A A A)"


@pytest.mark.parametrize(
    "text, offset",
    [
        ("(compose A", 10),
        ("(frobnicate A A)", 1),
        ("(M 2 x)", 5),
        ("A )", 2),
        ("(compose A B)", 11),
        ("", 0),
    ],
)
def test_sexpr_errors_report_offsets(text, offset):
    with pytest.raises(SExprError) as info:
        parse_sexpr(text)
    assert info.value.offset == offset
    assert str(info.value).startswith(f"byte {offset}:")


def test_size_and_leaf_names():
    assert size(TRIANGLE) == 5
    assert leaf_names(TRIANGLE) == {"A", "M2,0"}


@given(st.integers(0, 4), st.integers(0, 4))
@settings(max_examples=25, deadline=None)
def test_multiplication_leaf(p, q):
    assert eval_graph(M(p, q)) == multiplication(p, q)
