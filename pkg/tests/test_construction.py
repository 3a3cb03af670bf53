import random

import numpy as np
import pytest

from homindist.bilabelled import (
    BilabelledGraph,
    b_compose,
    b_isomorphic,
    doubled,
    is_planar_bilabelled,
    multiplication,
)
from homindist.construction import (
    PATH_VARIANTS,
    STRATEGIES,
    SynthesisError,
    bend_input,
    chain,
    compose_power,
    cycle_expr,
    edge_gadget,
    fat_swap,
    gram_expr,
    group_edge,
    identity_power,
    m_expr,
    path_expr,
    quotient_construction,
    rotate,
    star_gadget,
    swap_gadget,
    synthesize_all_graphs,
    synthesize_planar,
    tensor_all,
    tensor_power,
)
from homindist.expr import A, Adjoint, I, M, Pi2, arity, eval_graph, eval_tensor, leaf_names, to_sexpr
from homindist.graphs import Graph, are_isomorphic, complete, cycle, enumerate_graphs, path, star
from homindist.homomorphism import hom_count, hom_tensor, soe
from homindist.partitions import partition_map, single_block

from oracles import random_graph

CUP = Adjoint(M(2, 0))


def test_powers():
    assert arity(compose_power(A, 3)) == (1, 1)
    assert eval_graph(compose_power(A, 3)).graph.num_edges == 3
    assert arity(tensor_power(A, 3)) == (3, 3)
    assert arity(tensor_power(A, 0)) == (0, 0)
    with pytest.raises(ValueError):
        compose_power(M(2, 0), 0)


@pytest.mark.parametrize("n", range(1, 9))
def test_cycle_and_path_families(n):
    assert are_isomorphic(eval_graph(cycle_expr(n)).graph, cycle(n))
    for variant in PATH_VARIANTS:
        assert are_isomorphic(eval_graph(path_expr(n, variant)).graph, path(n))


def test_family_counts_through_tensors():
    for g in enumerate_graphs(4):
        a = g.adjacency_matrix().astype(object)
        for n in range(2, 7):
            assert soe(eval_tensor(cycle_expr(n), g)) == int(np.trace(np.linalg.matrix_power(a, n)))
            assert soe(eval_tensor(path_expr(n), g)) == hom_count(path(n), g)


def test_unknown_path_variant():
    with pytest.raises(ValueError):
        path_expr(3, "zigzag")


@pytest.mark.parametrize("p", [0, 2, 4, 6])
@pytest.mark.parametrize("q", [0, 2, 4, 6])
def test_m_expr_is_single_vertex(p, q):
    e = m_expr(p, q)
    assert b_isomorphic(eval_graph(e), multiplication(p, q))
    assert leaf_names(e) <= {"I", "M2,0", "M2,2"}
    for n in (2, 3):
        assert eval_tensor(e, Graph(n)) == partition_map(single_block(p, q), n)


def test_m_expr_rejects_odd():
    with pytest.raises(ValueError):
        m_expr(3, 2)


def test_rotate_moves_labels():
    assert eval_graph(rotate(M(3, 0), "right")).arity == (2, 1)
    # edge with both ends as out-labels
    both_out = chain(tensor_all(A, I), M(2, 0))
    right = eval_graph(rotate(both_out, "right"))
    assert b_isomorphic(right, BilabelledGraph(complete(2), (0,), (1,)))
    left = eval_graph(rotate(both_out, "left"))
    assert b_isomorphic(left, BilabelledGraph(complete(2), (1,), (0,)))
    with pytest.raises(ValueError):
        rotate(CUP, "right")


def test_bend_input():
    k = eval_graph(bend_input(A))
    assert k.arity == (2, 0) and k.graph.num_edges == 1


def test_edge_gadget_tensor():
    for g in enumerate_graphs(3):
        if g.n < 2:
            continue
        t = eval_tensor(edge_gadget(), g).entries
        a = g.adjacency_matrix()
        n = g.n
        for idx in np.ndindex(*(n,) * 8):
            o, i = idx[:4], idx[4:]
            expected = int(o[0] == o[1] == i[0] == i[1] and o[2] == o[3] == i[2] == i[3]) * a[o[0], o[2]]
            assert t[idx] == expected


def test_swap_gadgets_agree_on_doubled_inputs():
    rng = random.Random(12)
    for _ in range(20):
        g = random_graph(rng, rng.randint(2, 4))
        base = doubled(BilabelledGraph(g, tuple(rng.randrange(g.n) for _ in range(2)), ()))
        a = b_compose(eval_graph(swap_gadget()), base)
        b = b_compose(eval_graph(fat_swap()), base)
        assert b_isomorphic(a, b)
        assert a.out == (base.out[2], base.out[3], base.out[0], base.out[1]) or b_isomorphic(a, b)


def test_fat_swap_labels():
    k = eval_graph(fat_swap())
    x, y = k.out[0], k.out[2]
    assert k.out == (x, x, y, y) and k.inp == (y, y, x, x) and x != y


def test_pi2_caps_to_single_vertex():
    cap = chain(tensor_all(identity_power(4), CUP, CUP), Pi2)
    assert b_isomorphic(eval_graph(cap), multiplication(4, 0))
    m40 = cap
    m22 = chain(
        tensor_all(identity_power(2), CUP),
        tensor_all(chain(tensor_all(identity_power(3), CUP), tensor_all(m40, I)), I),
    )
    assert b_isomorphic(eval_graph(m22), multiplication(2, 2))


def test_star_gadgets():
    k = eval_graph(star_gadget(2, 3, "C"))
    assert k.arity == (4, 6) and k.graph.num_edges == 6 and len(set(k.inp)) == 6
    left = eval_graph(star_gadget(1, 2, "L"))
    assert left.arity == (2, 6) and left.inp[0] == left.inp[1] == left.out[0]
    right = eval_graph(star_gadget(1, 2, "R"))
    assert right.inp[-1] == right.out[0]
    assert eval_graph(star_gadget(1, 0, "C")) == multiplication(2, 0)
    with pytest.raises(ValueError):
        star_gadget(1, 1, "X")


def test_gram_expr_is_entrywise_inner_product():
    rng = random.Random(5)
    pairs = [(A, compose_power(A, 2)), (M(2, 0), chain(tensor_all(A, I), M(2, 0))), (M(1, 2), M(1, 2)), (cycle_expr(3), cycle_expr(4))]
    pairs.append((M(3, 1), tensor_all(A, M(2, 0))))
    for k1, k2 in pairs:
        e = gram_expr(k1, k2)
        assert arity(e) == (0, 0)
        for _ in range(4):
            g = random_graph(rng, rng.randint(1, 4))
            t1, t2 = eval_tensor(k1, g).entries, eval_tensor(k2, g).entries
            assert soe(eval_tensor(e, g)) == int(np.sum(t1.astype(object) * t2.astype(object)))
    with pytest.raises(ValueError):
        gram_expr(A, M(2, 0))


# ---------------------------------------------------------------- planar synthesis


def _planar_corpus(rng, count, max_n):
    graphs = [g for g in enumerate_graphs(max_n) if g.n > 0]
    found = []
    while len(found) < count:
        g = rng.choice(graphs)
        out = [rng.randrange(g.n) for _ in range(rng.randint(0, 3))]
        inp = [rng.randrange(g.n) for _ in range(rng.randint(0, 3))]
        k = doubled(BilabelledGraph(g, tuple(out), tuple(inp)))
        if is_planar_bilabelled(k):
            found.append(k)
    return found


def test_planar_synthesis_round_trip():
    rng = random.Random(21)
    for k in _planar_corpus(rng, 40, 5):
        e = synthesize_planar(k)
        assert leaf_names(e) <= {"I", "A", "M2,0", "M2,2"}
        assert b_isomorphic(eval_graph(e), k)


def test_planar_synthesis_larger_graphs():
    rng = random.Random(22)
    for k in _planar_corpus(rng, 10, 7):
        assert b_isomorphic(eval_graph(synthesize_planar(k, verify=False)), k)


def test_planar_synthesis_is_deterministic():
    k = doubled(BilabelledGraph(cycle(4), (0, 2), (1,)))
    assert to_sexpr(synthesize_planar(k)) == to_sexpr(synthesize_planar(k))


def test_planar_synthesis_rejects_bad_input():
    with pytest.raises(SynthesisError, match="doubled"):
        synthesize_planar(BilabelledGraph(complete(2), (0,), (1,)))
    with pytest.raises(SynthesisError, match="planar"):
        synthesize_planar(BilabelledGraph(complete(5), (), ()))
    looped = BilabelledGraph(Graph.from_edges(1, [(0, 0)], allow_loops=True), (), ())
    with pytest.raises(SynthesisError, match="loops"):
        synthesize_planar(looped)


# ---------------------------------------------------------------- all graphs


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_all_graph_strategies_reproduce_every_small_graph(strategy):
    for g in enumerate_graphs(5):
        e = synthesize_all_graphs(g, strategy)
        assert arity(e) == (0, 0)
        assert are_isomorphic(eval_graph(e).graph, g)


def test_strategies_give_equal_counts():
    g = star(3)
    target = cycle(5)
    counts = {soe(eval_tensor(synthesize_all_graphs(g, s), target)) for s in STRATEGIES}
    assert counts == {hom_count(g, target)}


def test_p4_via_pi2():
    assert are_isomorphic(eval_graph(synthesize_all_graphs(path(4), "pi2")).graph, path(4))


def test_non_planar_graph_via_swap():
    k5 = complete(5)
    assert are_isomorphic(eval_graph(synthesize_all_graphs(k5, "swap")).graph, k5)


def test_group_edge_and_quotient_route():
    k = eval_graph(group_edge())
    assert k.graph.num_edges == 1 and k.out[0] == k.out[1] and k.inp[0] == k.inp[1] and k.out[0] != k.inp[0]
    for g in enumerate_graphs(4, "connected"):
        if g.num_edges:
            assert are_isomorphic(quotient_construction(g).graph, g)
            assert are_isomorphic(eval_graph(synthesize_all_graphs(g, "group_theoretic")).graph, g)


def test_all_graph_synthesis_errors():
    with pytest.raises(ValueError):
        synthesize_all_graphs(cycle(3), "teleport")
    with pytest.raises(ValueError):
        synthesize_all_graphs(Graph(0))
    assert hom_tensor(eval_graph(synthesize_all_graphs(Graph(1))), cycle(3)).entries.item() == 3
