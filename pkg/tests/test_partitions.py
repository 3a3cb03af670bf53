import random

import numpy as np
import pytest

from homindist.homomorphism import kron, matmul, transpose
from homindist.partitions import (
    Partition,
    classify,
    closure,
    crossed_four_block,
    four_block,
    fork,
    identity,
    identity_power,
    is_noncrossing,
    named_partition,
    nested_four_blocks,
    p_adjoint,
    p_compose,
    p_tensor,
    pair_cap,
    pair_cup,
    partition_map,
    reversal3,
    singleton_lower,
    swap,
)

from oracles import all_partitions, brute_partition_map, pair_partitions, random_partition


def test_from_blocks_and_codes():
    p = Partition.from_blocks(2, 2, [["L1", "U2"], ["L2", "U1"]])
    assert p == swap()
    assert p.blocks == [["L1", "U2"], ["L2", "U1"]]
    with pytest.raises(ValueError):
        Partition.from_blocks(1, 1, [["L1"]])
    with pytest.raises(ValueError):
        Partition.from_blocks(1, 1, [["L1", "U1"], ["U1"]])
    with pytest.raises(ValueError):
        Partition.from_blocks(1, 1, [["L1", "U3"]])


def test_json_round_trip():
    p = p_compose(pair_cup(), pair_cap())
    assert p.empty_blocks == 1
    assert Partition.from_json(p.to_json()) == p


def test_compose_counts_loops():
    loop = p_compose(pair_cup(), pair_cap())
    assert (loop.lower, loop.upper, loop.empty_blocks) == (0, 0, 1)
    for n in (2, 3, 4):
        assert partition_map(loop, n).entries.item() == n


def test_compose_with_identity_and_swap_squared():
    for p in (fork(), four_block(), reversal3(), crossed_four_block()):
        assert p_compose(identity_power(p.lower), p) == p
        assert p_compose(p, identity_power(p.upper)) == p
    assert p_compose(swap(), swap()) == identity_power(2)


def test_tensor_and_adjoint():
    t = p_tensor(identity(), pair_cap())
    assert (t.lower, t.upper) == (3, 1)
    assert p_adjoint(p_adjoint(fork())) == fork()
    assert (p_adjoint(fork()).lower, p_adjoint(fork()).upper) == (1, 2)


def test_partition_map_matches_block_description():
    rng = random.Random(4)
    for _ in range(60):
        p = random_partition(rng, rng.randint(0, 3), rng.randint(0, 3))
        for n in (1, 2, 3):
            assert np.array_equal(partition_map(p, n).entries, brute_partition_map(p, n))


def test_functoriality_random():
    rng = random.Random(9)
    for _ in range(100):
        a, b, c = (rng.randint(0, 3) for _ in range(3))
        p, q = random_partition(rng, a, b), random_partition(rng, b, c)
        n = rng.choice((2, 3))
        tp, tq = partition_map(p, n), partition_map(q, n)
        assert partition_map(p_compose(p, q), n) == matmul(tp, tq)
        assert partition_map(p_tensor(p, q), n) == kron(tp, tq)
        assert partition_map(p_adjoint(p), n) == transpose(tp)


def test_noncrossing_examples():
    assert is_noncrossing(identity_power(2))
    assert not is_noncrossing(swap())
    assert is_noncrossing(four_block())
    assert not is_noncrossing(crossed_four_block())
    assert is_noncrossing(pair_cap())


def test_classify_examples():
    assert classify(swap()) == {"P", "P2", "P_even", "P'", "P_b", "P_b'"}
    assert "NC2" in classify(pair_cap())
    assert "NC_even" in classify(four_block())
    assert "NC_b" in classify(singleton_lower()) and "NC_b'" not in classify(singleton_lower())
    # blocks of the swap sit at boundary positions {1, 3} and {2, 4}
    assert "E_h" not in classify(swap())
    assert "E_h" in classify(pair_cap())
    assert "E_h^3" in classify(pair_cap(), s=3)
    with pytest.raises(ValueError):
        classify(swap(), s=2)


def test_named_partitions():
    assert named_partition("swap") == swap()
    assert named_partition("nested_four_blocks:2") == nested_four_blocks(2)
    assert named_partition("alternating_halves:2").labels == (0, 1, 0, 1)
    with pytest.raises(ValueError):
        named_partition("nothing")


def test_closure_matches_pairings_small():
    assert closure([], 4) == pair_partitions(4, noncrossing=True)
    assert closure([swap()], 4) == pair_partitions(4, noncrossing=False)


def test_closure_rejects_bad_bounds():
    with pytest.raises(ValueError):
        closure([], 11)


def test_all_partitions_are_bell_numbers():
    assert [len(all_partitions(k, 0)) for k in range(6)] == [1, 1, 2, 5, 15, 52]
