"""Matrix witnesses: checking quantum matrices modelled by d x d blocks, and
building classical witnesses from spectral data.

A quantum matrix here is an n x n array of complex d x d blocks; d = 1 is an
ordinary matrix. Every relation is checked as a concrete block identity, with
the unit mapped to the d x d identity. Passing a check says nothing about
models that would need infinite-dimensional representations.

Tensor powers multiply blocks in leg order: the (u, v) block of U^(x)k is
u[u1,v1] @ u[u2,v2] @ ... @ u[uk,vk].
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .deciders import Verdict, decide_all_graphs, decide_cycles, decide_paths_cycles
from .graphs import Graph, find_isomorphism
from .partitions import Partition, partition_map, through_pair_with_singletons

__all__ = [
    "QuantumMatrix",
    "Relation",
    "Report",
    "Refusal",
    "KINDS",
    "SYNTH_KINDS",
    "DEFAULT_TOL",
    "EIGEN_TOL",
    "check_kind",
    "check_intertwiner",
    "check_conjugation",
    "tensor_power",
    "synth_witness",
]

DEFAULT_TOL = 1e-9
EIGEN_TOL = 1e-8
KINDS = (
    "orthogonal",
    "permutation",
    "monomial",
    "signed-permutation",
    "bistochastic",
    "signed-bistochastic",
    "complexly-signed",
)
SYNTH_KINDS = ("orthogonal", "bistochastic", "permutation")
FINITE_MODEL_NOTE = "relations checked on the supplied finite-dimensional blocks only"


@dataclass(frozen=True, eq=False)
class QuantumMatrix:
    """n x n matrix of d x d complex blocks; ``blocks`` has shape (n, n, d, d)."""

    n: int
    d: int
    blocks: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self) -> None:
        arr = np.asarray(self.blocks, dtype=complex)
        if arr.shape != (self.n, self.n, self.d, self.d):
            raise ValueError(f"blocks must have shape {(self.n, self.n, self.d, self.d)}, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("blocks contain non-finite entries")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")
        object.__setattr__(self, "blocks", arr)

    @classmethod
    def from_matrix(cls, matrix, tol: float = DEFAULT_TOL) -> "QuantumMatrix":
        m = np.asarray(matrix, dtype=complex)
        return cls(m.shape[0], 1, m.reshape(m.shape[0], m.shape[1], 1, 1), tol)

    @classmethod
    def from_blocks(cls, rows, tol: float = DEFAULT_TOL) -> "QuantumMatrix":
        arr = np.asarray(rows, dtype=complex)
        return cls(arr.shape[0], arr.shape[2], arr, tol)

    def scalar_matrix(self) -> np.ndarray:
        """The n x n matrix when d = 1."""
        if self.d != 1:
            raise ValueError("only d = 1 matrices have a scalar form")
        return self.blocks[:, :, 0, 0]

    def to_json(self) -> dict:
        blocks = [
            [[[[float(z.real), float(z.imag)] for z in row] for row in self.blocks[i, j]] for j in range(self.n)]
            for i in range(self.n)
        ]
        return {"n": self.n, "d": self.d, "blocks": blocks, "tol": self.tol}

    @classmethod
    def from_json(cls, data: dict | str) -> "QuantumMatrix":
        if isinstance(data, str):
            data = json.loads(data)
        raw = np.asarray(data["blocks"], dtype=float)
        n, d = int(data["n"]), int(data["d"])
        if raw.shape != (n, n, d, d, 2):
            raise ValueError(f"blocks must have shape {(n, n, d, d, 2)}, got {raw.shape}")
        return cls(n, d, raw[..., 0] + 1j * raw[..., 1], float(data.get("tol", DEFAULT_TOL)))


@dataclass(frozen=True)
class Relation:
    name: str
    residual: float
    passed: bool


@dataclass(frozen=True)
class Report:
    subject: str
    relations: tuple[Relation, ...]
    note: str = FINITE_MODEL_NOTE

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.relations)

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.relations), default=0.0)

    def residual(self, name: str) -> float:
        return next(r.residual for r in self.relations if r.name == name)

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "relations": [{"name": r.name, "residual": repr(r.residual), "passed": r.passed} for r in self.relations],
            "note": self.note,
        }


@dataclass(frozen=True)
class Refusal:
    """Returned instead of a witness when the matching decider says the graphs differ."""

    kind: str
    verdict: Verdict
    reason: str = field(default="")

    def to_json(self) -> dict:
        return {"refused": True, "kind": self.kind, "reason": self.reason, "verdict": self.verdict.to_json()}


# ---------------------------------------------------------------- block arithmetic


def _norm(blocks: np.ndarray) -> float:
    """Largest operator norm over the blocks of an (..., d, d) array."""
    if blocks.size == 0:
        return 0.0
    return float(np.max(np.linalg.norm(blocks, ord=2, axis=(-2, -1))))


def _product(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.einsum("ijab,jkbc->ikac", x, y)


def _unit(n: int, d: int) -> np.ndarray:
    return np.einsum("ij,ab->ijab", np.eye(n), np.eye(d)).astype(complex)


def _entry_adjoint(x: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(x, -1, -2))


def _transpose(x: np.ndarray) -> np.ndarray:
    return np.swapaxes(x, 0, 1)


def _row_sums(u: QuantumMatrix) -> np.ndarray:
    return u.blocks.sum(axis=1)


def tensor_power(u: QuantumMatrix, k: int) -> np.ndarray:
    """Blocks of U^(x)k as an (n^k, n^k, d, d) array, leg-order products."""
    acc = np.eye(u.d, dtype=complex).reshape(1, 1, u.d, u.d)
    for _ in range(k):
        acc = np.einsum("IJab,ijbc->IiJjac", acc, u.blocks)
        size = acc.shape[0] * acc.shape[1]
        acc = acc.reshape(size, size, u.d, u.d)
    return acc


def _rel(name: str, residual: float, tol: float) -> Relation:
    return Relation(name, residual, residual <= tol)


# ---------------------------------------------------------------- checks


def check_intertwiner(u: QuantumMatrix, p: Partition) -> Report:
    """Residual of U^(x)lower T_P - T_P U^(x)upper."""
    t = partition_map(p, u.n).matrix().astype(float)
    left = np.einsum("IKab,KJ->IJab", tensor_power(u, p.lower), t)
    right = np.einsum("IK,KJab->IJab", t, tensor_power(u, p.upper))
    return Report(f"intertwiner {p!r}", (_rel("U^k T_P = T_P U^l", _norm(left - right), u.tol),))


def _orthogonal(u: QuantumMatrix) -> list[Relation]:
    x, one = u.blocks, _unit(u.n, u.d)
    return [
        _rel("u_ij* = u_ij", _norm(_entry_adjoint(x) - x), u.tol),
        _rel("U U^T = 1", _norm(_product(x, _transpose(x)) - one), u.tol),
        _rel("U^T U = 1", _norm(_product(_transpose(x), x) - one), u.tol),
    ]


def _four_block(u: QuantumMatrix) -> list[Relation]:
    x = u.blocks
    off = ~np.eye(u.n, dtype=bool)
    # rows[k, i, j] = u_ki u_kj, cols[k, i, j] = u_ik u_jk
    rows = np.einsum("kiab,kjbc->kijac", x, x)[:, off]
    cols = np.einsum("ikab,jkbc->kijac", x, x)[:, off]
    return [
        _rel("u_ki u_kj = 0 (i != j)", _norm(rows), u.tol),
        _rel("u_ik u_jk = 0 (i != j)", _norm(cols), u.tol),
    ]


def _row_sum_products(u: QuantumMatrix) -> Relation:
    r = _row_sums(u)
    prods = np.einsum("iab,jbc->ijac", r, r)
    return _rel("r_i r_j = 1", _norm(prods - np.eye(u.d)), u.tol)


def check_kind(u: QuantumMatrix, kind: str) -> Report:
    """Check the defining relations of one kind of quantum matrix."""
    x, d = u.blocks, u.d
    eye = np.eye(d)
    if kind == "orthogonal":
        rels = _orthogonal(u)
    elif kind == "permutation":
        rels = [
            _rel("u_ij^2 = u_ij", _norm(np.einsum("ijab,ijbc->ijac", x, x) - x), u.tol),
            _rel("u_ij* = u_ij", _norm(_entry_adjoint(x) - x), u.tol),
            _rel("row sums = 1", _norm(x.sum(axis=1) - eye), u.tol),
            _rel("column sums = 1", _norm(x.sum(axis=0) - eye), u.tol),
        ]
    elif kind == "monomial":
        rels = _orthogonal(u) + _four_block(u)
    elif kind == "signed-permutation":
        rels = _orthogonal(u) + _four_block(u) + [_row_sum_products(u)]
    elif kind == "bistochastic":
        rels = _orthogonal(u) + [_rel("row sums = 1", _norm(_row_sums(u) - eye), u.tol)]
    elif kind == "signed-bistochastic":
        rels = _orthogonal(u) + [_row_sum_products(u)]
    elif kind == "complexly-signed":
        inter = check_intertwiner(u, through_pair_with_singletons()).relations[0]
        rels = _orthogonal(u) + [Relation("through-pair intertwiner", inter.residual, inter.passed)]
    else:
        raise ValueError(f"unknown kind {kind!r}; known: {KINDS}")
    return Report(kind, tuple(rels))


def check_conjugation(u: QuantumMatrix, g: Graph, h: Graph) -> Report:
    """Residual of U A_G - A_H U, both adjacency matrices acting as scalars."""
    if not g.n == h.n == u.n:
        raise ValueError(f"orders must agree: U is {u.n}x{u.n}, graphs have {g.n} and {h.n} vertices")
    ag = np.asarray(g.adjacency_matrix(), dtype=float)
    ah = np.asarray(h.adjacency_matrix(), dtype=float)
    diff = np.einsum("ikab,kj->ijab", u.blocks, ag) - np.einsum("ik,kjab->ijab", ah, u.blocks)
    return Report("conjugation", (_rel("U A_G = A_H U", _norm(diff), u.tol),))


# ---------------------------------------------------------------- synthesis


def _eigenspaces(g: Graph) -> tuple[list[float], list[np.ndarray]]:
    vals, vecs = np.linalg.eigh(np.asarray(g.adjacency_matrix(), dtype=float))
    groups: list[list[int]] = []
    for i in range(len(vals)):
        if groups and vals[i] - vals[groups[-1][-1]] <= EIGEN_TOL:
            groups[-1].append(i)
        else:
            groups.append([i])
    return [float(vals[grp[0]]) for grp in groups], [vecs[:, grp] for grp in groups]


def _ones_first(basis: np.ndarray) -> tuple[np.ndarray, float]:
    """Orthonormal basis of the same space whose first vector is the
    normalized projection of the all-ones vector (if that projection is nonzero)."""
    w = basis @ (basis.T @ np.ones(basis.shape[0]))
    norm = float(np.linalg.norm(w))
    if norm <= EIGEN_TOL:
        return basis, 0.0
    w = w / norm
    dim = basis.shape[1]
    if dim == 1:
        return w.reshape(-1, 1), norm
    rest = basis - np.outer(w, w @ basis)
    left, _, _ = np.linalg.svd(rest, full_matrices=False)
    return np.column_stack([w, left[:, : dim - 1]]), norm


def _spectral_witness(g: Graph, h: Graph, ones_first: bool) -> np.ndarray:
    vg, qg = _eigenspaces(g)
    vh, qh = _eigenspaces(h)
    if len(vg) != len(vh) or any(a.shape != b.shape for a, b in zip(qg, qh)):
        raise RuntimeError("eigenspace multiplicities differ after grouping; spectra are not numerically matched")
    u = np.zeros((g.n, g.n))
    for bg, bh in zip(qg, qh):
        if ones_first:
            bg, ng = _ones_first(bg)
            bh, nh = _ones_first(bh)
            if abs(ng - nh) > 1e-6:
                raise RuntimeError("projections of the all-ones vector have different lengths")
        u += bh @ bg.T
    return u


def synth_witness(g: Graph, h: Graph, kind: str, tol: float = DEFAULT_TOL) -> QuantumMatrix | Refusal:
    """A d = 1 matrix U of the given kind with U A_G = A_H U, or a Refusal.

    The decider for the matching graph class is consulted first; every
    witness is re-checked before it is returned.
    """
    if kind == "orthogonal":
        verdict = decide_cycles(g, h)
    elif kind == "bistochastic":
        verdict = decide_paths_cycles(g, h)
    elif kind == "permutation":
        verdict = decide_all_graphs(g, h)
    else:
        raise ValueError(f"cannot synthesize kind {kind!r}; known: {SYNTH_KINDS}")
    if not verdict.equivalent:
        return Refusal(kind, verdict, f"graphs are distinguished at level {verdict.level}")

    if kind == "permutation":
        sigma = find_isomorphism(g, h)
        matrix = np.zeros((g.n, g.n))
        for v, w in enumerate(sigma):
            matrix[w, v] = 1.0
    else:
        matrix = _spectral_witness(g, h, ones_first=kind == "bistochastic")
    u = QuantumMatrix.from_matrix(matrix, tol)
    for report in (check_kind(u, kind), check_conjugation(u, g, h)):
        if not report.passed:
            raise RuntimeError(f"synthesized {kind} witness failed {report.subject}: residual {report.max_residual:.3e}")
    return u
