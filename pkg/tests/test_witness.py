import numpy as np
import pytest

from homindist.graphs import Graph, complete, cycle, disjoint_union, path, rook4, shrikhande, star
from homindist.partitions import (
    four_block,
    identity,
    p_tensor,
    pair_cap,
    singleton_lower,
    swap,
    through_pair_with_singletons,
)
from homindist.witness import (
    KINDS,
    QuantumMatrix,
    Refusal,
    check_conjugation,
    check_intertwiner,
    check_kind,
    synth_witness,
    tensor_power,
)

TOL = 1e-9
RNG = np.random.default_rng(2024)


def magic_unitary():
    p = np.array([[1.0, 0.0], [0.0, 0.0]])
    q = np.full((2, 2), 0.5)
    one, zero = np.eye(2), np.zeros((2, 2))
    rows = [[p, one - p, zero, zero], [one - p, p, zero, zero], [zero, zero, q, one - q], [zero, zero, one - q, q]]
    return QuantumMatrix.from_blocks(rows, tol=1e-12), p, q


def random_orthogonal(n):
    q, r = np.linalg.qr(RNG.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def random_bistochastic_orthogonal(n):
    """Orthogonal matrix fixing the all-ones vector."""
    basis = random_orthogonal(n)
    basis[:, 0] = 1 / np.sqrt(n)
    basis, _ = np.linalg.qr(basis)
    basis[:, 0] = np.abs(basis[:, 0])
    inner = np.eye(n)
    inner[1:, 1:] = random_orthogonal(n - 1)
    return basis @ inner @ basis.T


def permutation_matrix(perm):
    m = np.zeros((len(perm), len(perm)))
    for v, w in enumerate(perm):
        m[w, v] = 1.0
    return m


def qm(m):
    return QuantumMatrix.from_matrix(m, TOL)


def test_magic_unitary_is_quantum_permutation():
    u, p, q = magic_unitary()
    report = check_kind(u, "permutation")
    assert report.passed and report.max_residual < 1e-12
    assert np.linalg.norm(p @ q - q @ p, 2) > 0.4
    assert check_intertwiner(u, singleton_lower()).passed
    assert check_intertwiner(u, pair_cap()).passed
    assert check_kind(u, "orthogonal").passed
    # entries do not commute, so the swap is not an intertwiner
    assert not check_intertwiner(u, swap()).passed


def test_classical_permutation_passes_related_kinds():
    u = qm(permutation_matrix([2, 0, 3, 1]))
    for kind in ("permutation", "orthogonal", "monomial", "bistochastic", "signed-permutation", "signed-bistochastic"):
        assert check_kind(u, kind).passed, kind


def test_signed_permutations():
    perm = permutation_matrix([1, 2, 0])
    plus, minus = qm(perm), qm(-perm)
    assert check_kind(minus, "signed-permutation").passed
    assert not check_kind(minus, "permutation").passed
    assert check_kind(plus, "bistochastic").passed
    assert not check_kind(minus, "bistochastic").passed
    mixed = qm(np.diag([1.0, -1.0]))
    assert check_kind(mixed, "monomial").passed
    assert not check_kind(mixed, "permutation").passed
    # row sums 1 and -1 multiply to -1
    assert not check_kind(mixed, "signed-permutation").passed


def test_cap_intertwiner_iff_orthogonal():
    for _ in range(30):
        n = int(RNG.integers(2, 5))
        for m in (random_orthogonal(n), RNG.normal(size=(n, n)), random_orthogonal(n) * 1.001):
            u = qm(m)
            expected = np.abs(m @ m.T - np.eye(n)).max() <= TOL
            assert check_intertwiner(u, pair_cap()).passed == expected
            assert check_kind(u, "orthogonal").passed == (expected and np.abs(m.T @ m - np.eye(n)).max() <= TOL)


def test_singleton_intertwiner_iff_row_sums_one():
    for _ in range(30):
        n = int(RNG.integers(2, 5))
        for m in (random_bistochastic_orthogonal(n), random_orthogonal(n), -random_bistochastic_orthogonal(n)):
            u = qm(m)
            expected = np.abs(m.sum(axis=1) - 1).max() <= TOL
            assert check_intertwiner(u, singleton_lower()).passed == expected
            pairs = np.outer(m.sum(axis=1), m.sum(axis=1))
            assert check_intertwiner(u, p_tensor(singleton_lower(), singleton_lower())).passed == (
                np.abs(pairs - 1).max() <= TOL
            )


def test_bistochastic_kinds_on_random_inputs():
    for _ in range(20):
        n = int(RNG.integers(2, 5))
        b = random_bistochastic_orthogonal(n)
        assert check_kind(qm(b), "bistochastic").passed
        assert check_kind(qm(b), "signed-bistochastic").passed
        assert check_kind(qm(-b), "signed-bistochastic").passed
        assert not check_kind(qm(-b), "bistochastic").passed
        assert check_kind(qm(b), "complexly-signed").passed
        assert not check_kind(qm(random_orthogonal(n)), "bistochastic").passed


def test_commuting_entries_intertwine_swap():
    for _ in range(10):
        u = qm(RNG.normal(size=(3, 3)))
        assert check_intertwiner(u, swap()).passed


def test_four_block_intertwiner_matches_monomial_relations():
    mono = qm(np.diag([1.0, -1.0, 1.0]) @ permutation_matrix([2, 0, 1]))
    assert check_intertwiner(mono, four_block()).passed
    assert check_kind(mono, "monomial").passed
    dense = qm(random_orthogonal(3))
    assert not check_intertwiner(dense, four_block()).passed
    assert not check_kind(dense, "monomial").passed


def test_tensor_power_leg_order():
    u, p, q = magic_unitary()
    t = tensor_power(u, 2)
    # block ((0, 2), (0, 2)) is u[0,0] @ u[2,2] = p @ q
    assert np.allclose(t[0 * 4 + 2, 0 * 4 + 2], p @ q)
    assert tensor_power(u, 0).shape == (1, 1, 2, 2)
    assert check_intertwiner(u, identity()).passed


def test_conjugation():
    g = path(4)
    perm = [3, 1, 0, 2]
    h = g.relabel(perm)
    assert check_conjugation(qm(permutation_matrix(perm)), g, h).passed
    r = check_conjugation(qm(np.eye(4)), g, cycle(4))
    assert r.max_residual >= 1
    with pytest.raises(ValueError):
        check_conjugation(qm(np.eye(3)), g, h)


def test_synth_orthogonal_for_cospectral_pair():
    g, h = star(4), disjoint_union(cycle(4), Graph(1))
    u = synth_witness(g, h, "orthogonal")
    m = u.scalar_matrix().real
    assert np.abs(m @ g.adjacency_matrix() - h.adjacency_matrix() @ m).max() < 1e-9
    assert np.abs(m @ m.T - np.eye(5)).max() < 1e-9


def test_synth_bistochastic_refuses_with_path_evidence():
    g, h = star(4), disjoint_union(cycle(4), Graph(1))
    r = synth_witness(g, h, "bistochastic")
    assert isinstance(r, Refusal)
    assert r.verdict.counts == (20, 16) and r.verdict.witness_pattern.n == 3


def test_synth_bistochastic_for_strongly_regular_pair():
    g, h = shrikhande(), rook4()
    m = synth_witness(g, h, "bistochastic").scalar_matrix().real
    assert np.abs(m @ g.adjacency_matrix() - h.adjacency_matrix() @ m).max() < 1e-9
    assert np.abs(m @ m.T - np.eye(16)).max() < 1e-9
    assert np.abs(m @ np.ones(16) - 1).max() < 1e-9
    assert isinstance(synth_witness(g, h, "permutation"), Refusal)


def test_synth_permutation_for_isomorphic_pair():
    g = cycle(6)
    h = g.relabel([5, 3, 1, 0, 2, 4])
    u = synth_witness(g, h, "permutation")
    assert check_kind(u, "permutation").passed and check_conjugation(u, g, h).passed


def test_synth_handles_repeated_eigenvalues():
    g = complete(5)
    h = g.relabel([4, 3, 2, 1, 0])
    for kind in ("orthogonal", "bistochastic"):
        u = synth_witness(g, h, kind)
        assert check_kind(u, kind).passed


def test_json_round_trip_and_validation():
    u, _, _ = magic_unitary()
    back = QuantumMatrix.from_json(u.to_json())
    assert np.allclose(back.blocks, u.blocks) and back.tol == u.tol
    with pytest.raises(ValueError):
        QuantumMatrix(2, 1, np.zeros((2, 2, 2, 2)))
    with pytest.raises(ValueError):
        QuantumMatrix.from_matrix([[np.nan]])
    with pytest.raises(ValueError):
        check_kind(u, "unitary")
    with pytest.raises(ValueError):
        synth_witness(complete(2), complete(2), "monomial")
    assert "complexly-signed" in KINDS
    assert through_pair_with_singletons().lower == 2
