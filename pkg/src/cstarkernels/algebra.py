"""Finite-dimensional C*-algebras realized as direct sums of full matrix blocks.

An algebra is described by its block dimensions (d_1, ..., d_m); an element
holds one complex d_j x d_j matrix per block.  Every order-theoretic question
(positivity, square roots, norms) reduces to Hermitian eigenproblems on the
blocks, which is the single spectral primitive used throughout the library.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PositivityError, ShapeMismatchError


@dataclass(frozen=True)
class Tolerance:
    """Relative spectral tolerance with an absolute floor.

    A quantity of magnitude ``scale`` counts as zero when it is below
    ``rel_eps * scale + abs_floor``.
    """

    rel_eps: float = 1e-9
    abs_floor: float = 1e-12

    def __post_init__(self):
        if self.rel_eps < 0 or self.abs_floor < 0:
            raise ValueError("tolerance parameters must be nonnegative")

    def slack(self, scale: float) -> float:
        return self.rel_eps * abs(scale) + self.abs_floor


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class AlgebraShape:
    """Block dimensions (d_1, ..., d_m) of a direct sum of full matrix algebras."""

    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if len(dims) < 1 or any(d < 1 for d in dims):
            raise ValueError(f"block dimensions must be positive, got {dims}")
        object.__setattr__(self, "block_dims", dims)

    @property
    def num_blocks(self) -> int:
        return len(self.block_dims)

    @property
    def total_dim(self) -> int:
        """Dimension of the algebra as a complex vector space: sum of d_j^2."""
        return sum(d * d for d in self.block_dims)

    @property
    def dense_dim(self) -> int:
        """Side length of the block-diagonal dense embedding: sum of d_j."""
        return sum(self.block_dims)

    def __str__(self):
        return "(" + ",".join(str(d) for d in self.block_dims) + ")"


class AlgebraElement:
    """Element of a block matrix algebra; immutable after construction."""

    __slots__ = ("shape", "blocks")

    def __init__(self, shape: AlgebraShape, blocks):
        blocks = tuple(np.array(b, dtype=complex) for b in blocks)
        if len(blocks) != shape.num_blocks:
            raise ShapeMismatchError(
                f"expected {shape.num_blocks} blocks, got {len(blocks)}"
            )
        for d, b in zip(shape.block_dims, blocks):
            if b.shape != (d, d):
                raise ShapeMismatchError(f"block of shape {b.shape}, expected {(d, d)}")
            b.setflags(write=False)
        self.shape = shape
        self.blocks = blocks

    @classmethod
    def zero(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls(shape, [np.zeros((d, d), dtype=complex) for d in shape.block_dims])

    @classmethod
    def unit(cls, shape: AlgebraShape) -> "AlgebraElement":
        return cls(shape, [np.eye(d, dtype=complex) for d in shape.block_dims])

    @classmethod
    def scalar(cls, shape: AlgebraShape, value: complex) -> "AlgebraElement":
        return cls(shape, [value * np.eye(d, dtype=complex) for d in shape.block_dims])

    def _check_same(self, other: "AlgebraElement"):
        if self.shape != other.shape:
            raise ShapeMismatchError(
                f"algebra shapes differ: {self.shape} vs {other.shape}"
            )

    def __add__(self, other):
        self._check_same(other)
        return AlgebraElement(self.shape, [a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        self._check_same(other)
        return AlgebraElement(self.shape, [a - b for a, b in zip(self.blocks, other.blocks)])

    def __neg__(self):
        return AlgebraElement(self.shape, [-a for a in self.blocks])

    def __mul__(self, scalar):
        if isinstance(scalar, AlgebraElement):
            raise TypeError("use @ for the algebra product")
        return AlgebraElement(self.shape, [scalar * a for a in self.blocks])

    __rmul__ = __mul__

    def __matmul__(self, other):
        """Blockwise matrix product; the algebra multiplication."""
        self._check_same(other)
        return AlgebraElement(self.shape, [a @ b for a, b in zip(self.blocks, other.blocks)])

    def adjoint(self) -> "AlgebraElement":
        """The involution: blockwise conjugate transpose."""
        return AlgebraElement(self.shape, [a.conj().T for a in self.blocks])

    def norm(self) -> float:
        """C*-norm: the largest singular value over all blocks."""
        return max(float(np.linalg.norm(b, 2)) for b in self.blocks)

    def inverse(self) -> "AlgebraElement":
        return AlgebraElement(self.shape, [np.linalg.inv(b) for b in self.blocks])

    def is_hermitian(self, tol: Tolerance = DEFAULT_TOL) -> bool:
        gap = max(float(np.linalg.norm(b - b.conj().T, 2)) for b in self.blocks)
        return gap <= tol.slack(self.norm())

    def isclose(self, other: "AlgebraElement", tol: Tolerance = DEFAULT_TOL) -> bool:
        self._check_same(other)
        scale = max(self.norm(), other.norm())
        return (self - other).norm() <= tol.slack(scale)

    def __repr__(self):
        return f"AlgebraElement(shape={self.shape}, norm={self.norm():.3g})"


def hermitian_part(a: AlgebraElement) -> AlgebraElement:
    return (a + a.adjoint()) * 0.5


def min_eigenvalue(a: AlgebraElement) -> float:
    """Smallest eigenvalue over all blocks of the Hermitian part."""
    vals = []
    for b in a.blocks:
        h = 0.5 * (b + b.conj().T)
        vals.append(float(np.linalg.eigvalsh(h)[0]))
    return min(vals)


def is_positive(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Positivity test: Hermitian within tolerance and spectrum above -slack."""
    scale = a.norm()
    if not a.is_hermitian(tol):
        return False
    return min_eigenvalue(a) >= -tol.slack(scale)


def sqrt_psd(a: AlgebraElement, tol: Tolerance = DEFAULT_TOL) -> AlgebraElement:
    """Hermitian square root of a positive element.

    Eigenvalues below zero (at most tolerance-sized, or the input would have
    been rejected) are clipped before taking the square root.
    """
    if not is_positive(a, tol):
        raise PositivityError(
            f"element is not positive (min eigenvalue {min_eigenvalue(a):.3e})",
            min_eigenvalue=min_eigenvalue(a),
        )
    roots = []
    for b in a.blocks:
        h = 0.5 * (b + b.conj().T)
        w, v = np.linalg.eigh(h)
        w = np.clip(w, 0.0, None)
        roots.append((v * np.sqrt(w)) @ v.conj().T)
    return AlgebraElement(a.shape, roots)


def embed_dense(a: AlgebraElement) -> np.ndarray:
    """Faithful embedding onto block-diagonal matrices of side sum(d_j)."""
    D = a.shape.dense_dim
    out = np.zeros((D, D), dtype=complex)
    off = 0
    for d, b in zip(a.shape.block_dims, a.blocks):
        out[off : off + d, off : off + d] = b
        off += d
    return out


def project_dense(shape: AlgebraShape, matrix, tol: Tolerance = DEFAULT_TOL) -> AlgebraElement:
    """Inverse of :func:`embed_dense`; rejects matrices with off-block mass."""
    matrix = np.asarray(matrix, dtype=complex)
    D = shape.dense_dim
    if matrix.shape != (D, D):
        raise ShapeMismatchError(f"expected a {D}x{D} matrix, got {matrix.shape}")
    scale = float(np.linalg.norm(matrix, 2)) if matrix.size else 0.0
    blocks = []
    mask = np.ones((D, D), dtype=bool)
    off = 0
    for d in shape.block_dims:
        blocks.append(matrix[off : off + d, off : off + d])
        mask[off : off + d, off : off + d] = False
        off += d
    stray = float(np.max(np.abs(matrix[mask]))) if mask.any() else 0.0
    if stray > tol.slack(scale):
        raise ShapeMismatchError(
            f"matrix is not block-diagonal for shape {shape}: off-block magnitude {stray:.3e}"
        )
    return AlgebraElement(shape, blocks)


def alg_to_vec(a: AlgebraElement) -> np.ndarray:
    """Flatten to a complex vector of length total_dim (blocks row-major, in order)."""
    return np.concatenate([b.ravel() for b in a.blocks])


def vec_to_alg(shape: AlgebraShape, vec) -> AlgebraElement:
    vec = np.asarray(vec, dtype=complex).ravel()
    if vec.size != shape.total_dim:
        raise ShapeMismatchError(f"expected length {shape.total_dim}, got {vec.size}")
    blocks = []
    off = 0
    for d in shape.block_dims:
        blocks.append(vec[off : off + d * d].reshape(d, d))
        off += d * d
    return AlgebraElement(shape, blocks)


def left_mult_matrix(a: AlgebraElement) -> np.ndarray:
    """Matrix of b -> a b on the flattened algebra (row-major vec convention)."""
    N = a.shape.total_dim
    out = np.zeros((N, N), dtype=complex)
    off = 0
    for d, b in zip(a.shape.block_dims, a.blocks):
        n = d * d
        out[off : off + n, off : off + n] = np.kron(b, np.eye(d))
        off += n
    return out


def right_mult_matrix(a: AlgebraElement) -> np.ndarray:
    """Matrix of b -> b a on the flattened algebra (row-major vec convention)."""
    N = a.shape.total_dim
    out = np.zeros((N, N), dtype=complex)
    off = 0
    for d, b in zip(a.shape.block_dims, a.blocks):
        n = d * d
        out[off : off + n, off : off + n] = np.kron(np.eye(d), b.T)
        off += n
    return out
