"""Reproducing module of a positive definite kernel sample.

Functions in the module are finite combinations sum_i G_{x_i, s_i} a_i of the
generator functions G_{x, s}(t) = K(s, t)(x), with the inner product read off
the kernel: <G_{x,s}, G_{y,t}> = <K(s, t) x, y>.  Because generators are
linear in x and the module action folds into x (G_{x,s} a = G_{x a, s}), the
span is coordinatized by one module element per sample point; its scalar Gram
matrix is exactly the assembled dense kernel matrix.

The span handle eagerly eigendecomposes that Gram matrix once.  Everything
spectral (orthonormal basis, feature maps, the Kolmogorov factorization
K(s, t) = d_t d_s*) is derived from this single factorization, and the handle
is safe to share across threads afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, Tolerance
from .errors import PositivityError, ShapeMismatchError, UnknownPointError
from .kernels import (
    KernelSample,
    PointFamily,
    assemble_dense,
    gen_rank_one,
    kernel_norm,
)
from .modules import (
    ModuleElement,
    module_to_vec,
    operator_to_dense,
    vec_to_module,
)


class SpanElement:
    """A function in the reproducing module, stored as generator terms.

    Terms are (x, s, a) triples representing G_{x, s} a.  Equality of
    functions is equality up to zero norm, not equality of term lists; use
    :meth:`isclose`.
    """

    __slots__ = ("kernel", "terms")

    def __init__(self, kernel: KernelSample, terms):
        terms = tuple(terms)
        for x, s, a in terms:
            kernel.index(s)
            if x.shape != kernel.shape or x.rank != kernel.rank:
                raise ShapeMismatchError("term element does not match the kernel")
            if a.shape != kernel.shape:
                raise ShapeMismatchError("term coefficient does not match the kernel")
        self.kernel = kernel
        self.terms = terms

    def _check_same_kernel(self, other: "SpanElement"):
        if self.kernel is not other.kernel and (
            self.kernel.points != other.kernel.points
            or self.kernel.shape != other.kernel.shape
            or self.kernel.rank != other.kernel.rank
        ):
            raise ShapeMismatchError("elements belong to different reproducing modules")

    def evaluate(self, t: str) -> ModuleElement:
        """Pointwise value sum_i K(s_i, t)(x_i) a_i."""
        k = self.kernel
        jt = k.index(t)
        out = ModuleElement.zero(k.shape, k.rank)
        for x, s, a in self.terms:
            out = out + k.ops[k.index(s)][jt].apply(x) * a
        return out

    def inner(self, other: "SpanElement") -> AlgebraElement:
        """A-valued inner product via the kernel: sum a_i* <K(s_i,t_j) x_i, y_j> b_j."""
        self._check_same_kernel(other)
        k = self.kernel
        acc = AlgebraElement.zero(k.shape)
        for x, s, a in self.terms:
            i = k.index(s)
            for y, t, b in other.terms:
                j = k.index(t)
                acc = acc + a.adjoint() @ k.ops[i][j].apply(x).inner(y) @ b
        return acc

    def norm(self) -> float:
        return float(np.sqrt(max(self.inner(self).norm(), 0.0)))

    def __add__(self, other: "SpanElement") -> "SpanElement":
        self._check_same_kernel(other)
        return SpanElement(self.kernel, self.terms + other.terms)

    def __sub__(self, other: "SpanElement") -> "SpanElement":
        return self + (-other)

    def __neg__(self) -> "SpanElement":
        return SpanElement(self.kernel, [(-x, s, a) for x, s, a in self.terms])

    def __mul__(self, factor) -> "SpanElement":
        """Right module action for an algebra element, scaling for a scalar."""
        if isinstance(factor, AlgebraElement):
            return SpanElement(self.kernel, [(x, s, a @ factor) for x, s, a in self.terms])
        return SpanElement(self.kernel, [(x, s, a * factor) for x, s, a in self.terms])

    def __rmul__(self, scalar) -> "SpanElement":
        return self.__mul__(scalar)

    def isclose(self, other: "SpanElement", tol: Tolerance = DEFAULT_TOL) -> bool:
        scale = max(self.norm(), other.norm())
        return (self - other).norm() <= tol.slack(scale)

    def __repr__(self):
        return f"SpanElement(terms={len(self.terms)}, norm={self.norm():.3g})"


def evaluate(f: SpanElement, t: str) -> ModuleElement:
    return f.evaluate(t)


def span_inner(f: SpanElement, g: SpanElement) -> AlgebraElement:
    return f.inner(g)


def norm_of(f: SpanElement) -> float:
    return f.norm()


def generator(kernel: KernelSample, x: ModuleElement, s: str) -> SpanElement:
    """The generator function G_{x, s} with coefficient 1."""
    return SpanElement(kernel, [(x, s, AlgebraElement.unit(kernel.shape))])


def reproducing_check(f: SpanElement, x: ModuleElement, s: str) -> AlgebraElement:
    """Defect <f(s), x> - <f, G_{x, s}>; zero up to rounding for span members."""
    lhs = f.evaluate(s).inner(x)
    rhs = f.inner(generator(f.kernel, x, s))
    return lhs - rhs


def membership_gap(f_values: PointFamily, kernel: KernelSample, m: float) -> KernelSample:
    """The gap kernel m K(s, t) - f(t) (x) f(s) for the membership test.

    The caller tests positive definiteness: membership of f in the module at
    a suitable bound m makes the gap positive definite.
    """
    return kernel * float(m) - gen_rank_one(f_values, kernel.points)


@dataclass(frozen=True)
class FeatureMap:
    """Evaluation at one point as a dense operator on the orthonormalized span."""

    module: "ReproducingModule"
    point: str
    matrix: np.ndarray  # (rank * total_dim) x span_rank

    def apply(self, f: SpanElement) -> ModuleElement:
        return vec_to_module(
            self.module.kernel.shape,
            self.module.kernel.rank,
            self.matrix @ self.module.ortho_coords(f),
        )

    def adjoint_apply(self, x: ModuleElement) -> SpanElement:
        """The adjoint sends x to the generator G_{x, s} (up to null vectors)."""
        return self.module.from_ortho(self.matrix.conj().T @ module_to_vec(x))


class ReproducingModule:
    """Handle to the reproducing module of a positive definite kernel sample."""

    def __init__(self, kernel: KernelSample, tol: Tolerance = DEFAULT_TOL, validate: bool = True):
        self.kernel = kernel
        self.tol = tol
        self.block_dim = kernel.shape.total_dim * kernel.rank
        gram = assemble_dense(kernel)
        scale = float(np.linalg.norm(gram, 2))
        herm_gap = float(np.linalg.norm(gram - gram.conj().T, 2))
        gram = 0.5 * (gram + gram.conj().T)
        w, v = np.linalg.eigh(gram)
        if validate and (herm_gap > tol.slack(scale) or float(w[0]) < -tol.slack(scale)):
            raise PositivityError(
                f"kernel sample is not positive definite (min eigenvalue {w[0]:.3e})",
                min_eigenvalue=float(w[0]),
            )
        keep = w > tol.slack(scale)
        self.gram = gram
        self._eigvals = w[keep]
        self._eigvecs = v[:, keep]
        self._sqrt_eigvals = np.sqrt(self._eigvals)
        self.span_rank = int(self._eigvals.size)
        self.norm_bound = kernel_norm(kernel)

    # elements ---------------------------------------------------------------

    def generator(self, x: ModuleElement, s: str) -> SpanElement:
        return generator(self.kernel, x, s)

    def zero(self) -> SpanElement:
        return SpanElement(self.kernel, [])

    def element(self, terms) -> SpanElement:
        return SpanElement(self.kernel, terms)

    # coordinates ------------------------------------------------------------

    def coords(self, f: SpanElement) -> np.ndarray:
        """Canonical coordinates: one dense module vector per sample point."""
        k = self.kernel
        per_point = [ModuleElement.zero(k.shape, k.rank) for _ in k.points]
        for x, s, a in f.terms:
            i = k.index(s)
            per_point[i] = per_point[i] + x * a
        return np.concatenate([module_to_vec(z) for z in per_point])

    def from_coords(self, coords) -> SpanElement:
        coords = np.asarray(coords, dtype=complex).ravel()
        k = self.kernel
        d = self.block_dim
        if coords.size != k.n * d:
            raise ShapeMismatchError(f"expected length {k.n * d}, got {coords.size}")
        unit = AlgebraElement.unit(k.shape)
        terms = []
        for i, p in enumerate(k.points):
            z = coords[i * d : (i + 1) * d]
            if np.any(z != 0):
                terms.append((vec_to_module(k.shape, k.rank, z), p, unit))
        return SpanElement(k, terms)

    def ortho_coords(self, f: SpanElement) -> np.ndarray:
        """Coordinates in the orthonormal basis derived from the Gram eigenbasis."""
        return self._sqrt_eigvals * (self._eigvecs.conj().T @ self.coords(f))

    def from_ortho(self, beta) -> SpanElement:
        beta = np.asarray(beta, dtype=complex).ravel()
        if beta.size != self.span_rank:
            raise ShapeMismatchError(f"expected length {self.span_rank}, got {beta.size}")
        return self.from_coords(self._eigvecs @ (beta / self._sqrt_eigvals))

    def values_vector(self, f: SpanElement) -> np.ndarray:
        """Stacked dense values of f at all sample points."""
        return np.concatenate([module_to_vec(f.evaluate(p)) for p in self.kernel.points])

    def gram_norm(self, f: SpanElement) -> float:
        """Norm of f through the canonical coordinates and the Gram matrix.

        This is the trace scalarization sqrt(tr <f, f>), an upper bound for
        the C*-norm :meth:`SpanElement.norm`; it vanishes exactly when the
        coefficients cancel, which makes it the right yardstick for zero-norm
        identities between term lists.
        """
        c = self.coords(f)
        val = float(np.real(c.conj() @ (self.gram @ c)))
        return float(np.sqrt(max(val, 0.0)))

    # feature maps and factorization ------------------------------------------

    def feature_matrix(self, s: str) -> np.ndarray:
        i = self.kernel.index(s)
        d = self.block_dim
        rows = self._eigvecs[i * d : (i + 1) * d, :]
        return rows * self._sqrt_eigvals

    def feature_map(self, s: str) -> FeatureMap:
        m = self.feature_matrix(s)
        m.setflags(write=False)
        return FeatureMap(self, s, m)

    def kolmogorov_defect(self, s: str, t: str) -> float:
        """Spectral norm of d_t d_s* - K(s, t) in the dense realization."""
        ds = self.feature_matrix(s)
        dt = self.feature_matrix(t)
        target = operator_to_dense(self.kernel.op(s, t))
        return float(np.linalg.norm(dt @ ds.conj().T - target, 2))

    def gram_submatrix(self, points: Sequence[str]) -> np.ndarray:
        idx = [self.kernel.index(p) for p in points]
        d = self.block_dim
        take = np.concatenate([np.arange(i * d, (i + 1) * d) for i in idx])
        return self.gram[np.ix_(take, take)]

    def multi_evaluation_matrix(self, points: Sequence[str]) -> np.ndarray:
        return np.vstack([self.feature_matrix(p) for p in points])


def feature_map(source: KernelSample | ReproducingModule, s: str,
                tol: Tolerance = DEFAULT_TOL) -> FeatureMap:
    module = source if isinstance(source, ReproducingModule) else ReproducingModule(source, tol)
    return module.feature_map(s)


def kolmogorov_check(source: KernelSample | ReproducingModule, s: str, t: str,
                     tol: Tolerance = DEFAULT_TOL) -> float:
    module = source if isinstance(source, ReproducingModule) else ReproducingModule(source, tol)
    return module.kolmogorov_defect(s, t)
