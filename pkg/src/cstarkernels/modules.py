"""The standard Hilbert module A^k over a block matrix algebra A.

Elements are k-tuples of algebra elements with the A-valued inner product
<x, y> = sum_i x_i* y_i (conjugate-linear in the first slot).  Adjointable
operators are k x k matrices over A acting by (T x)_i = sum_j T_ij x_j.

Dense realization: a module element flattens to a complex vector of length
k * total_dim by concatenating the flattened coordinates; an operator becomes
the matrix of left multiplications on those vectors.  This realization is a
faithful *-representation, so operator positivity and norms are decided by
one Hermitian eigenproblem or singular value computation on the dense form.
"""

from __future__ import annotations

import numpy as np

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    Tolerance,
    alg_to_vec,
    left_mult_matrix,
    vec_to_alg,
)
from .errors import ShapeMismatchError


class ModuleElement:
    """Element of A^k: a tuple of k algebra elements."""

    __slots__ = ("shape", "coords")

    def __init__(self, shape: AlgebraShape, coords):
        coords = tuple(coords)
        if not coords:
            raise ShapeMismatchError("module rank must be at least 1")
        for c in coords:
            if not isinstance(c, AlgebraElement) or c.shape != shape:
                raise ShapeMismatchError("coordinates must share the algebra shape")
        self.shape = shape
        self.coords = coords

    @property
    def rank(self) -> int:
        return len(self.coords)

    @classmethod
    def zero(cls, shape: AlgebraShape, rank: int) -> "ModuleElement":
        return cls(shape, [AlgebraElement.zero(shape) for _ in range(rank)])

    @classmethod
    def basis(cls, shape: AlgebraShape, rank: int, index: int) -> "ModuleElement":
        """Standard basis vector: the unit in slot ``index``, zero elsewhere."""
        coords = [AlgebraElement.zero(shape) for _ in range(rank)]
        coords[index] = AlgebraElement.unit(shape)
        return cls(shape, coords)

    def _check_same(self, other: "ModuleElement"):
        if self.shape != other.shape or self.rank != other.rank:
            raise ShapeMismatchError("module elements have different shape or rank")

    def __add__(self, other):
        self._check_same(other)
        return ModuleElement(self.shape, [a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other):
        self._check_same(other)
        return ModuleElement(self.shape, [a - b for a, b in zip(self.coords, other.coords)])

    def __neg__(self):
        return ModuleElement(self.shape, [-a for a in self.coords])

    def __mul__(self, factor):
        """Right module action for an algebra element, scaling for a scalar."""
        if isinstance(factor, AlgebraElement):
            return ModuleElement(self.shape, [c @ factor for c in self.coords])
        return ModuleElement(self.shape, [c * factor for c in self.coords])

    def __rmul__(self, scalar):
        return self.__mul__(scalar)

    def inner(self, other: "ModuleElement") -> AlgebraElement:
        """A-valued inner product sum_i x_i* y_i."""
        self._check_same(other)
        acc = AlgebraElement.zero(self.shape)
        for a, b in zip(self.coords, other.coords):
            acc = acc + (a.adjoint() @ b)
        return acc

    def norm(self) -> float:
        return float(np.sqrt(self.inner(self).norm()))

    def __repr__(self):
        return f"ModuleElement(shape={self.shape}, rank={self.rank}, norm={self.norm():.3g})"


def inner(x: ModuleElement, y: ModuleElement) -> AlgebraElement:
    return x.inner(y)


def cauchy_schwarz_gap(x: ModuleElement, y: ModuleElement) -> AlgebraElement:
    """The positive element ||y||^2 <x,x> - <x,y><y,x>."""
    xy = x.inner(y)
    return (y.norm() ** 2) * x.inner(x) - (xy @ xy.adjoint())


class ModuleOperator:
    """Adjointable operator on A^k stored as a k x k matrix over A."""

    __slots__ = ("shape", "rank", "entries")

    def __init__(self, shape: AlgebraShape, entries):
        entries = tuple(tuple(row) for row in entries)
        k = len(entries)
        if k < 1 or any(len(row) != k for row in entries):
            raise ShapeMismatchError("entries must form a square matrix")
        for row in entries:
            for e in row:
                if not isinstance(e, AlgebraElement) or e.shape != shape:
                    raise ShapeMismatchError("entries must share the algebra shape")
        self.shape = shape
        self.rank = k
        self.entries = entries

    @classmethod
    def zero(cls, shape: AlgebraShape, rank: int) -> "ModuleOperator":
        z = AlgebraElement.zero(shape)
        return cls(shape, [[z for _ in range(rank)] for _ in range(rank)])

    @classmethod
    def identity(cls, shape: AlgebraShape, rank: int) -> "ModuleOperator":
        z = AlgebraElement.zero(shape)
        u = AlgebraElement.unit(shape)
        return cls(shape, [[u if i == j else z for j in range(rank)] for i in range(rank)])

    @classmethod
    def left_multiplication(cls, a: AlgebraElement) -> "ModuleOperator":
        """The rank-1 operator b -> a b; realizes an algebra element as an operator."""
        return cls(a.shape, [[a]])

    def _check_same(self, other: "ModuleOperator"):
        if self.shape != other.shape or self.rank != other.rank:
            raise ShapeMismatchError("operators have different shape or rank")

    def apply(self, x: ModuleElement) -> ModuleElement:
        if x.shape != self.shape or x.rank != self.rank:
            raise ShapeMismatchError("operator and element have different shape or rank")
        coords = []
        for i in range(self.rank):
            acc = AlgebraElement.zero(self.shape)
            for j in range(self.rank):
                acc = acc + (self.entries[i][j] @ x.coords[j])
            coords.append(acc)
        return ModuleElement(self.shape, coords)

    def adjoint(self) -> "ModuleOperator":
        k = self.rank
        return ModuleOperator(
            self.shape,
            [[self.entries[j][i].adjoint() for j in range(k)] for i in range(k)],
        )

    def __add__(self, other):
        self._check_same(other)
        return ModuleOperator(
            self.shape,
            [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
        )

    def __sub__(self, other):
        self._check_same(other)
        return ModuleOperator(
            self.shape,
            [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)],
        )

    def __neg__(self):
        return ModuleOperator(self.shape, [[-a for a in row] for row in self.entries])

    def __mul__(self, scalar):
        return ModuleOperator(self.shape, [[a * scalar for a in row] for row in self.entries])

    __rmul__ = __mul__

    def __matmul__(self, other: "ModuleOperator") -> "ModuleOperator":
        """Operator composition (matrix product over A)."""
        self._check_same(other)
        k = self.rank
        rows = []
        for i in range(k):
            row = []
            for j in range(k):
                acc = AlgebraElement.zero(self.shape)
                for l in range(k):
                    acc = acc + (self.entries[i][l] @ other.entries[l][j])
                row.append(acc)
            rows.append(row)
        return ModuleOperator(self.shape, rows)

    def norm(self) -> float:
        """Operator norm via the faithful dense realization."""
        return float(np.linalg.norm(operator_to_dense(self), 2))

    def is_hermitian(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        gap = (self - self.adjoint()).norm()
        return gap <= tol.slack(self.norm())

    def isclose(self, other: "ModuleOperator", tol: Tolerance = DEFAULT_TOL) -> bool:
        self._check_same(other)
        scale = max(self.norm(), other.norm())
        return (self - other).norm() <= tol.slack(scale)

    def __repr__(self):
        return f"ModuleOperator(shape={self.shape}, rank={self.rank})"


def rank_one(x: ModuleElement, y: ModuleElement) -> ModuleOperator:
    """The operator z -> x <y, z>; entries are x_i y_j*."""
    x._check_same(y)
    k = x.rank
    return ModuleOperator(
        x.shape,
        [[x.coords[i] @ y.coords[j].adjoint() for j in range(k)] for i in range(k)],
    )


def imaginary_part(t: ModuleOperator) -> ModuleOperator:
    """The self-adjoint operator (T - T*) / (2i)."""
    return (t - t.adjoint()) * (-0.5j)


def real_part(t: ModuleOperator) -> ModuleOperator:
    return (t + t.adjoint()) * 0.5


# dense realization ---------------------------------------------------------


def module_to_vec(x: ModuleElement) -> np.ndarray:
    return np.concatenate([alg_to_vec(c) for c in x.coords])


def vec_to_module(shape: AlgebraShape, rank: int, vec) -> ModuleElement:
    vec = np.asarray(vec, dtype=complex).ravel()
    N = shape.total_dim
    if vec.size != rank * N:
        raise ShapeMismatchError(f"expected length {rank * N}, got {vec.size}")
    return ModuleElement(
        shape, [vec_to_alg(shape, vec[c * N : (c + 1) * N]) for c in range(rank)]
    )


def operator_to_dense(t: ModuleOperator) -> np.ndarray:
    """Dense matrix acting on flattened module elements."""
    N = t.shape.total_dim
    k = t.rank
    out = np.zeros((k * N, k * N), dtype=complex)
    for i in range(k):
        for j in range(k):
            out[i * N : (i + 1) * N, j * N : (j + 1) * N] = left_mult_matrix(t.entries[i][j])
    return out


def dense_to_operator(
    shape: AlgebraShape, rank: int, matrix, tol: Tolerance = DEFAULT_TOL
) -> tuple[ModuleOperator, float]:
    """Recover a ModuleOperator from its dense realization.

    Returns the operator together with the reconstruction residual (spectral
    norm of the part of the matrix not representable as an operator).
    """
    matrix = np.asarray(matrix, dtype=complex)
    N = shape.total_dim
    if matrix.shape != (rank * N, rank * N):
        raise ShapeMismatchError(f"expected {(rank * N, rank * N)}, got {matrix.shape}")
    unit_vec = alg_to_vec(AlgebraElement.unit(shape))
    rows = []
    for i in range(rank):
        row = []
        for j in range(rank):
            block = matrix[i * N : (i + 1) * N, j * N : (j + 1) * N]
            row.append(vec_to_alg(shape, block @ unit_vec))
        rows.append(row)
    op = ModuleOperator(shape, rows)
    residual = float(np.linalg.norm(matrix - operator_to_dense(op), 2))
    return op, residual


def left_factor_matrix(x: ModuleElement) -> np.ndarray:
    """Dense matrix of the map a -> x a from the algebra into the module."""
    return np.vstack([left_mult_matrix(c) for c in x.coords])


def op_min_eigenvalue(t: ModuleOperator) -> float:
    dense = operator_to_dense(t)
    h = 0.5 * (dense + dense.conj().T)
    return float(np.linalg.eigvalsh(h)[0])


def op_is_positive(t: ModuleOperator, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Positivity of the operator, decided spectrally on the dense realization."""
    dense = operator_to_dense(t)
    scale = float(np.linalg.norm(dense, 2))
    if float(np.linalg.norm(dense - dense.conj().T, 2)) > tol.slack(scale):
        return False
    h = 0.5 * (dense + dense.conj().T)
    return float(np.linalg.eigvalsh(h)[0]) >= -tol.slack(scale)
