"""Finite samples of operator-valued kernels, definiteness tests, generators.

A kernel sample stores an n x n grid of module operators ``ops[i][j]``
realizing the kernel at the point pair (points[i], points[j]).

Assembly convention: the kernel is positive definite exactly when the big
dense Hermitian matrix whose (i, j) block is the dense form of ``ops[j][i]``
is positive semidefinite.  The transposition matches the pairing
sum_{i,j} <K(s_i, s_j) x_i, x_j> >= 0 that defines positive definiteness, and
it makes the assembled matrix coincide with the Gram operator matrix
(K(s_j, s_i)) used for span geometry and interpolation.

Conditional negative definiteness is decided by compressing the assembled
matrix to the zero-sum subspace {sum_i x_i = 0} along a fixed orthonormal
basis (QR of the difference vectors e_i - e_n, tensored with the identity)
and testing that the compression is negative semidefinite.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, AlgebraShape, Tolerance
from .errors import (
    PositivityError,
    ShapeMismatchError,
    UnknownPointError,
    ValidationError,
)
from .modules import (
    ModuleElement,
    ModuleOperator,
    operator_to_dense,
    rank_one,
)

# A point family assigns a module element to each point label.
PointFamily = Mapping[str, ModuleElement]


class KernelSample:
    """An operator-valued kernel restricted to a finite, ordered point set."""

    __slots__ = ("shape", "rank", "points", "ops", "hermitian")

    def __init__(self, shape, rank, points, ops, hermitian=None, tol: Tolerance = DEFAULT_TOL):
        points = tuple(str(p) for p in points)
        if len(points) == 0:
            raise ValidationError("a kernel sample needs at least one point")
        if len(set(points)) != len(points):
            raise ValidationError(f"point labels must be distinct, got {points}")
        n = len(points)
        ops = tuple(tuple(row) for row in ops)
        if len(ops) != n or any(len(row) != n for row in ops):
            raise ValidationError(f"ops must be an {n}x{n} grid")
        for row in ops:
            for op in row:
                if not isinstance(op, ModuleOperator):
                    raise ValidationError("ops entries must be ModuleOperator values")
                if op.shape != shape or op.rank != rank:
                    raise ShapeMismatchError("all ops must share the sample shape and rank")
        self.shape = shape
        self.rank = rank
        self.points = points
        self.ops = ops
        if hermitian is None:
            hermitian = _hermitian_defect(self) <= tol.slack(kernel_norm(self))
        elif hermitian:
            defect = _hermitian_defect(self)
            if defect > tol.slack(kernel_norm(self)):
                raise ValidationError(
                    f"hermitian flag claimed but adjoint symmetry fails by {defect:.3e}"
                )
        self.hermitian = bool(hermitian)

    @property
    def n(self) -> int:
        return len(self.points)

    def index(self, label: str) -> int:
        try:
            return self.points.index(label)
        except ValueError:
            raise UnknownPointError(f"unknown point label {label!r}") from None

    def op(self, s: str, t: str) -> ModuleOperator:
        """The operator realizing the kernel at (s, t)."""
        return self.ops[self.index(s)][self.index(t)]

    def subsample(self, points: Sequence[str]) -> "KernelSample":
        idx = [self.index(p) for p in points]
        return KernelSample(
            self.shape,
            self.rank,
            [self.points[i] for i in idx],
            [[self.ops[i][j] for j in idx] for i in idx],
            hermitian=self.hermitian or None,
        )

    def _check_same(self, other: "KernelSample"):
        if (
            self.shape != other.shape
            or self.rank != other.rank
            or self.points != other.points
        ):
            raise ShapeMismatchError("kernel samples are not aligned")

    def __add__(self, other: "KernelSample") -> "KernelSample":
        self._check_same(other)
        return KernelSample(
            self.shape,
            self.rank,
            self.points,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.ops, other.ops)],
        )

    def __sub__(self, other: "KernelSample") -> "KernelSample":
        self._check_same(other)
        return KernelSample(
            self.shape,
            self.rank,
            self.points,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.ops, other.ops)],
        )

    def __mul__(self, scalar) -> "KernelSample":
        return KernelSample(
            self.shape,
            self.rank,
            self.points,
            [[op * scalar for op in row] for row in self.ops],
        )

    __rmul__ = __mul__

    def __neg__(self) -> "KernelSample":
        return self * (-1.0)

    def __repr__(self):
        return (
            f"KernelSample(shape={self.shape}, rank={self.rank}, "
            f"n={self.n}, hermitian={self.hermitian})"
        )


def kernel_norm(k: KernelSample) -> float:
    """max over point pairs of the operator norm of the kernel value."""
    return max(op.norm() for row in k.ops for op in row)


def _hermitian_defect(k: KernelSample) -> float:
    worst = 0.0
    for i in range(k.n):
        for j in range(i, k.n):
            worst = max(worst, (k.ops[j][i] - k.ops[i][j].adjoint()).norm())
    return worst


def is_hermitian(k: KernelSample, tol: Tolerance = DEFAULT_TOL) -> bool:
    return _hermitian_defect(k) <= tol.slack(kernel_norm(k))


def is_symmetric(k: KernelSample, tol: Tolerance = DEFAULT_TOL) -> bool:
    worst = 0.0
    for i in range(k.n):
        for j in range(i + 1, k.n):
            worst = max(worst, (k.ops[j][i] - k.ops[i][j]).norm())
    return worst <= tol.slack(kernel_norm(k))


def assemble_dense(k: KernelSample) -> np.ndarray:
    """The big dense matrix deciding definiteness; block (i, j) is ops[j][i]."""
    N = k.shape.total_dim * k.rank
    n = k.n
    out = np.zeros((n * N, n * N), dtype=complex)
    for i in range(n):
        for j in range(n):
            out[i * N : (i + 1) * N, j * N : (j + 1) * N] = operator_to_dense(k.ops[j][i])
    return out


def pd_margin(k: KernelSample) -> tuple[float, float]:
    """(min eigenvalue of the Hermitian part, Hermitian defect) of the assembly."""
    big = assemble_dense(k)
    herm_defect = float(np.linalg.norm(big - big.conj().T, 2))
    h = 0.5 * (big + big.conj().T)
    return float(np.linalg.eigvalsh(h)[0]), herm_defect


def is_positive_definite(k: KernelSample, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Positive definiteness (semidefiniteness of the assembled quadratic form)."""
    big = assemble_dense(k)
    scale = float(np.linalg.norm(big, 2))
    if float(np.linalg.norm(big - big.conj().T, 2)) > tol.slack(scale):
        return False
    h = 0.5 * (big + big.conj().T)
    return float(np.linalg.eigvalsh(h)[0]) >= -tol.slack(scale)


def zero_sum_basis(n: int, block_dim: int) -> np.ndarray:
    """Orthonormal basis of the zero-sum constraint subspace of (C^block_dim)^n.

    Deterministic: QR of the difference vectors e_i - e_n, tensored with the
    identity on the block.  Shape (n * block_dim, (n - 1) * block_dim).
    """
    diffs = np.zeros((n, n - 1))
    for i in range(n - 1):
        diffs[i, i] = 1.0
        diffs[n - 1, i] = -1.0
    q, _ = np.linalg.qr(diffs)
    return np.kron(q, np.eye(block_dim))


def cnd_margin(k: KernelSample) -> float:
    """Max eigenvalue of the assembled matrix compressed to the zero-sum subspace."""
    big = assemble_dense(k)
    h = 0.5 * (big + big.conj().T)
    basis = zero_sum_basis(k.n, k.shape.total_dim * k.rank)
    comp = basis.conj().T @ h @ basis
    return float(np.linalg.eigvalsh(comp)[-1])


def is_conditionally_negative_definite(k: KernelSample, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Negative semidefiniteness of the quadratic form on zero-sum tuples."""
    if k.n < 2:
        raise ValidationError("conditional negativity needs at least two points")
    if not is_hermitian(k, tol):
        raise ValidationError("kernel must be hermitian for the conditional test")
    scale = float(np.linalg.norm(assemble_dense(k), 2))
    return cnd_margin(k) <= tol.slack(scale)


# generators -----------------------------------------------------------------


def _family_values(family: PointFamily, points: Sequence[str]) -> list:
    vals = []
    for p in points:
        if p not in family:
            raise UnknownPointError(f"family does not cover point {p!r}")
        vals.append(family[p])
    first = vals[0]
    for v in vals:
        if v.shape != first.shape or v.rank != first.rank:
            raise ShapeMismatchError("family values must share shape and rank")
    return vals


def gen_rank_one(family: PointFamily, points: Sequence[str]) -> KernelSample:
    """Kernel with value f(t) (x) f(s) at (s, t); always positive definite."""
    vals = _family_values(family, points)
    n = len(vals)
    ops = [[rank_one(vals[j], vals[i]) for j in range(n)] for i in range(n)]
    return KernelSample(vals[0].shape, vals[0].rank, points, ops)


def gen_left_mult_gram(family: PointFamily, points: Sequence[str]) -> KernelSample:
    """Rank-1 kernel of left multiplications by the transposed Gram data.

    The value at (s_i, s_j) is left multiplication by <x_{s_j}, x_{s_i}> where
    x ranges over the family; positive definite because the Gram matrix of the
    family, and hence its transpose, is positive.
    """
    vals = _family_values(family, points)
    n = len(vals)
    ops = [
        [
            ModuleOperator.left_multiplication(vals[j].inner(vals[i]))
            for j in range(n)
        ]
        for i in range(n)
    ]
    return KernelSample(vals[0].shape, 1, points, ops)


def _check_psd_scalar(kappa, tol: Tolerance) -> np.ndarray:
    kappa = np.asarray(kappa, dtype=complex)
    if kappa.ndim != 2 or kappa.shape[0] != kappa.shape[1]:
        raise ShapeMismatchError("kappa must be square")
    scale = float(np.linalg.norm(kappa, 2)) if kappa.size else 0.0
    if float(np.linalg.norm(kappa - kappa.conj().T, 2)) > tol.slack(scale):
        raise PositivityError("kappa is not Hermitian")
    w = np.linalg.eigvalsh(0.5 * (kappa + kappa.conj().T))
    if float(w[0]) < -tol.slack(scale):
        raise PositivityError(
            f"kappa is not positive semidefinite (min eigenvalue {w[0]:.3e})",
            min_eigenvalue=float(w[0]),
        )
    return kappa


def gen_scalar_lift(
    kappa, rank: int, shape: AlgebraShape, points: Sequence[str] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> KernelSample:
    """Kernel kappa(s, t) I from a scalar positive semidefinite matrix."""
    kappa = _check_psd_scalar(kappa, tol)
    n = kappa.shape[0]
    if points is None:
        points = [f"s{i}" for i in range(n)]
    if len(points) != n:
        raise ShapeMismatchError("points must match the side of kappa")
    eye = ModuleOperator.identity(shape, rank)
    ops = [[eye * complex(kappa[i, j]) for j in range(n)] for i in range(n)]
    return KernelSample(shape, rank, points, ops)


def gen_scaled_family(
    kappa,
    family: Mapping[str, AlgebraElement],
    points: Sequence[str],
    tol: Tolerance = DEFAULT_TOL,
) -> KernelSample:
    """Rank-1 kernel of left multiplications by kappa(s_i, s_j) a_{s_i}* a_{s_j}.

    The finite analogue of weighting a scalar positive definite kernel by a
    family of algebra elements; positive definite by the Schur product rule.
    """
    kappa = _check_psd_scalar(kappa, tol)
    if kappa.shape[0] != len(points):
        raise ShapeMismatchError("points must match the side of kappa")
    vals = []
    for p in points:
        if p not in family:
            raise UnknownPointError(f"family does not cover point {p!r}")
        vals.append(family[p])
    shape = vals[0].shape
    n = len(points)
    ops = [
        [
            ModuleOperator.left_multiplication(
                (vals[i].adjoint() @ vals[j]) * complex(kappa[i, j])
            )
            for j in range(n)
        ]
        for i in range(n)
    ]
    return KernelSample(shape, 1, points, ops)


def gen_factor_gram(
    factors: Mapping[str, ModuleOperator], points: Sequence[str]
) -> KernelSample:
    """Generic positive definite kernel W_{s_j} W_{s_i}* from operator factors."""
    vals = []
    for p in points:
        if p not in factors:
            raise UnknownPointError(f"factors do not cover point {p!r}")
        vals.append(factors[p])
    shape, rank = vals[0].shape, vals[0].rank
    n = len(points)
    ops = [[vals[j] @ vals[i].adjoint() for j in range(n)] for i in range(n)]
    return KernelSample(shape, rank, points, ops)


def from_algebra_matrix(
    shape: AlgebraShape, points: Sequence[str], entries
) -> KernelSample:
    """Lift an n x n matrix of algebra elements to a rank-1 kernel sample."""
    entries = [list(row) for row in entries]
    n = len(points)
    if len(entries) != n or any(len(row) != n for row in entries):
        raise ShapeMismatchError("entries must be an n x n grid over the points")
    ops = [
        [ModuleOperator.left_multiplication(entries[i][j]) for j in range(n)]
        for i in range(n)
    ]
    return KernelSample(shape, 1, points, ops)


def flatten_kernel(
    k: KernelSample, probes: Sequence[tuple[ModuleElement, str]]
) -> KernelSample:
    """Algebra-valued kernel <K(s_i, t_j) x_i, x_j> on probe pairs (x, s).

    Returned as a rank-1 sample of left multiplications so the definiteness
    predicates apply; positive definite whenever the source kernel is.
    """
    if not probes:
        raise ValidationError("at least one probe is required")
    entries = []
    for i, (xi, si) in enumerate(probes):
        row = []
        ii = k.index(si)
        for j, (xj, sj) in enumerate(probes):
            jj = k.index(sj)
            row.append(k.ops[ii][jj].apply(xi).inner(xj))
        entries.append(row)
    labels = [f"p{i}" for i in range(len(probes))]
    return from_algebra_matrix(k.shape, labels, entries)
