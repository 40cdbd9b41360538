"""Spectral factorization utilities and the Douglas-style factorization solver.

Everything here works on concrete complex matrices; the ``DenseOperator``
wrapper carries lightweight metadata naming the realization on each side.
Functions accept either a ``DenseOperator`` or a bare array and return the
matching type.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, Tolerance
from .errors import PositivityError, RangeInclusionError, ShapeMismatchError


@dataclass(frozen=True)
class Space:
    """Name and dimension of one side of a dense operator."""

    label: str
    dim: int


@dataclass(frozen=True)
class DenseOperator:
    """Complex matrix with source/target realization metadata."""

    matrix: np.ndarray
    source: Space
    target: Space

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        if m.shape != (self.target.dim, self.source.dim):
            raise ShapeMismatchError(
                f"matrix shape {m.shape} does not match "
                f"({self.target.dim}, {self.source.dim})"
            )

    @classmethod
    def wrap(cls, matrix, source="domain", target="codomain") -> "DenseOperator":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(matrix, Space(source, matrix.shape[1]), Space(target, matrix.shape[0]))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2))


def _mat(x) -> np.ndarray:
    return x.matrix if isinstance(x, DenseOperator) else np.asarray(x, dtype=complex)


def _like(template, matrix, source: Space | None = None, target: Space | None = None):
    if isinstance(template, DenseOperator):
        src = source if source is not None else template.source
        tgt = target if target is not None else template.target
        return DenseOperator(matrix, src, tgt)
    return matrix


def psd_sqrt(m, tol: Tolerance = DEFAULT_TOL):
    """Hermitian square root of a positive semidefinite matrix."""
    a = _mat(m)
    scale = float(np.linalg.norm(a, 2)) if a.size else 0.0
    if float(np.linalg.norm(a - a.conj().T, 2)) > tol.slack(scale):
        raise PositivityError("matrix is not Hermitian")
    h = 0.5 * (a + a.conj().T)
    w, v = np.linalg.eigh(h)
    lam_max = float(w[-1]) if w.size else 0.0
    if w.size and float(w[0]) < -tol.slack(max(lam_max, 0.0)):
        raise PositivityError(
            f"matrix has a significantly negative eigenvalue {w[0]:.3e}",
            min_eigenvalue=float(w[0]),
        )
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    return _like(m, root)


def pseudo_inverse(m, tol: Tolerance = DEFAULT_TOL):
    """Moore-Penrose pseudo-inverse; singular values below the cutoff are dropped."""
    a = _mat(m)
    pinv = np.linalg.pinv(a, rcond=max(tol.rel_eps, 1e-15))
    if isinstance(m, DenseOperator):
        return DenseOperator(pinv, m.target, m.source)
    return pinv


def range_residual(b, v) -> float:
    """Norm of the component of v outside the column space of b."""
    bm = _mat(b)
    vv = np.asarray(_mat(v)).ravel()
    proj = bm @ (np.linalg.pinv(bm) @ vv)
    return float(np.linalg.norm(proj - vv))


def range_contains(b, v, tol: Tolerance = DEFAULT_TOL) -> bool:
    bm = _mat(b)
    vv = np.asarray(_mat(v)).ravel()
    sigma = float(np.linalg.norm(bm, 2)) if bm.size else 0.0
    bound = tol.rel_eps * max(float(np.linalg.norm(vv)), sigma) + tol.abs_floor
    return range_residual(bm, vv) <= bound


def orthonormal_range_basis(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    a = _mat(m)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0:
        return u[:, :0]
    keep = s > tol.rel_eps * s[0] + tol.abs_floor
    return u[:, keep]


@dataclass(frozen=True)
class DouglasSolution:
    """Minimal solution C of A = B C with its certificates.

    lambda_min is ||C||^2, the least scaling for which A A* is majorized by
    lambda B B*.  cert_upper is the min eigenvalue of the compression of
    (lambda_min + slack) B B* - A A* to the range of B (should be >= -noise);
    cert_lower is the same for (lambda_min - 1e-3 lambda_min) B B* - A A*
    (should be decisively negative whenever lambda_min > 0).
    """

    C: DenseOperator
    lambda_min: float
    residual: float
    cert_upper: float
    cert_lower: float


def douglas_solve(a, b, tol: Tolerance = DEFAULT_TOL) -> DouglasSolution:
    """Solve A = B C with range(C) inside the support of B.

    Requires range(A) to be contained in range(B); the returned C has minimal
    norm, with ||C||^2 equal to the least majorization constant.
    """
    am, bm = _mat(a), _mat(b)
    if am.shape[0] != bm.shape[0]:
        raise ShapeMismatchError("A and B must map into the same space")
    sigma_b = float(np.linalg.norm(bm, 2)) if bm.size else 0.0
    bp = np.linalg.pinv(bm, rcond=max(tol.rel_eps, 1e-15))
    c = bp @ am
    defect = bm @ c - am
    # columnwise range check, thresholded like range_contains
    worst = 0.0
    for col in range(am.shape[1]):
        r = float(np.linalg.norm(defect[:, col]))
        bound = tol.rel_eps * max(float(np.linalg.norm(am[:, col])), sigma_b) + tol.abs_floor
        if r > bound:
            worst = max(worst, r)
    if worst > 0.0:
        raise RangeInclusionError(
            f"range(A) is not contained in range(B); worst column residual {worst:.3e}",
            residual=worst,
        )
    residual = float(np.linalg.norm(defect, 2))
    lam = float(np.linalg.norm(c, 2)) ** 2

    w = orthonormal_range_basis(bm, tol)
    aa = w.conj().T @ (am @ am.conj().T) @ w
    bb = w.conj().T @ (bm @ bm.conj().T) @ w
    scale = max(float(np.linalg.norm(aa, 2)), lam * float(np.linalg.norm(bb, 2)), 1.0)

    def _min_eig(lmb):
        h = lmb * bb - aa
        h = 0.5 * (h + h.conj().T)
        return float(np.linalg.eigvalsh(h)[0]) if h.size else 0.0

    cert_upper = _min_eig(lam + tol.slack(lam))
    eps = 1e-3 * lam
    cert_lower = _min_eig(lam - eps) if lam > tol.slack(scale) else 0.0

    source = a.source if isinstance(a, DenseOperator) else Space("domain", am.shape[1])
    target = b.source if isinstance(b, DenseOperator) else Space("solution", bm.shape[1])
    return DouglasSolution(
        C=DenseOperator(c, source, target),
        lambda_min=lam,
        residual=residual,
        cert_upper=cert_upper,
        cert_lower=cert_lower,
    )


def range_equality(a, b, lam: float, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Verify that A and B have the same column space, given A A* = lam B B*."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    am, bm = _mat(a), _mat(b)
    gram_gap = am @ am.conj().T - lam * (bm @ bm.conj().T)
    scale = max(float(np.linalg.norm(am, 2)) ** 2, lam * float(np.linalg.norm(bm, 2)) ** 2)
    if float(np.linalg.norm(gram_gap, 2)) > tol.slack(scale):
        raise ValueError("precondition A A* = lam B B* fails beyond tolerance")
    ua = orthonormal_range_basis(am, tol)
    ub = orthonormal_range_basis(bm, tol)
    for col in range(ua.shape[1]):
        if not range_contains(bm, ua[:, col], tol):
            return False
    for col in range(ub.shape[1]):
        if not range_contains(am, ub[:, col], tol):
            return False
    return True
