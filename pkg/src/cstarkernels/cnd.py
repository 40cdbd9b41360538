"""Conditionally negative definite kernels and their positive definite transforms.

The base-point transform sends a hermitian kernel L to

    K(s, t) = (1/2) [L(s, s0) + L(s0, t) - L(s, t) - L(s0, s0)],

which is positive definite exactly when L is conditionally negative definite.
The reverse direction reconstructs L entrywise from K together with the
correction map

    psi(s) = (1/2) L(s, s) + i Im L(s, s0),      Im T = (T - T*) / (2i),

via L(s, t) = K(s, s) + K(t, t) - 2 K(s, t) + psi(s) + psi(t)*.  The
correction vanishes exactly when L is normalized and L(s, s0) is self-adjoint
for every s; in that case the squared-distance embedding below applies.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import DEFAULT_TOL, Tolerance
from .errors import ValidationError
from .kernels import (
    KernelSample,
    from_algebra_matrix,
    is_conditionally_negative_definite,
    is_hermitian,
    is_symmetric,
    kernel_norm,
)
from .modules import ModuleElement, ModuleOperator, imaginary_part
from .reproducing import ReproducingModule, SpanElement


@dataclass(frozen=True)
class CndTransform:
    """Result of the base-point transform: the kernel, the base point, and the
    per-point correction operators needed to reconstruct the input."""

    kernel: KernelSample
    base_point: str
    correction: dict[str, ModuleOperator]


def cnd_to_pd(l: KernelSample, s0: str, tol: Tolerance = DEFAULT_TOL) -> CndTransform:
    """Base-point transform of a hermitian kernel.

    Computed unconditionally so that the equivalence (input conditionally
    negative definite iff output positive definite) is testable both ways.
    """
    if not is_hermitian(l, tol):
        raise ValidationError("input kernel must be hermitian")
    i0 = l.index(s0)
    n = l.n
    ops = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(
                (l.ops[i][i0] + l.ops[i0][j] - l.ops[i][j] - l.ops[i0][i0]) * 0.5
            )
        ops.append(row)
    kernel = KernelSample(l.shape, l.rank, l.points, ops)
    correction = {
        p: l.ops[i][i] * 0.5 + imaginary_part(l.ops[i][i0]) * 1j
        for i, p in enumerate(l.points)
    }
    return CndTransform(kernel=kernel, base_point=s0, correction=correction)


def pd_to_cnd_reconstruct(r: CndTransform) -> KernelSample:
    """Rebuild the original kernel from the transform and its correction map."""
    k = r.kernel
    n = k.n
    corr = [r.correction[p] for p in k.points]
    ops = []
    for i in range(n):
        row = []
        for j in range(n):
            row.append(
                k.ops[i][i]
                + k.ops[j][j]
                - k.ops[i][j] * 2.0
                + corr[i]
                + corr[j].adjoint()
            )
        ops.append(row)
    return KernelSample(k.shape, k.rank, k.points, ops)


def is_normalized(l: KernelSample, tol: Tolerance = DEFAULT_TOL) -> bool:
    """All diagonal values vanish (within tolerance relative to the kernel norm)."""
    scale = kernel_norm(l)
    return all(l.ops[i][i].norm() <= tol.slack(scale) for i in range(l.n))


def scalarize(l: KernelSample, x: ModuleElement, tol: Tolerance = DEFAULT_TOL) -> KernelSample:
    """Algebra-valued kernel <L(s, t) x, x> from a self-adjoint-valued kernel.

    Conditionally negative definite whenever the input is; returned as a
    rank-1 sample of left multiplications so the predicates apply directly.
    """
    for i in range(l.n):
        for j in range(l.n):
            if not l.ops[i][j].is_hermitian(tol):
                raise ValidationError(
                    f"kernel value at ({l.points[i]}, {l.points[j]}) is not self-adjoint"
                )
    entries = [
        [l.ops[i][j].apply(x).inner(x) for j in range(l.n)] for i in range(l.n)
    ]
    return from_algebra_matrix(l.shape, l.points, entries)


def schoenberg_embedding(
    l: KernelSample,
    s0: str,
    probes: Sequence[tuple[ModuleElement, str, str]] | None = None,
    tol: Tolerance = DEFAULT_TOL,
) -> tuple[ReproducingModule, Callable[[ModuleElement, str], SpanElement], float]:
    """Squared-distance realization of a normalized symmetric CND kernel.

    Returns the reproducing module of the transformed kernel, the embedding
    theta(x, s) (the generator at (x, s)), and the max probe defect of

        <L(s, t) x, x> = |theta(x, s) - theta(x, t)|^2.

    Default probes pair every ordered point pair with each standard module
    basis vector.
    """
    if not is_normalized(l, tol):
        raise ValidationError("kernel must be normalized (zero diagonal)")
    if not is_symmetric(l, tol):
        raise ValidationError("kernel must be symmetric")
    if not is_conditionally_negative_definite(l, tol):
        raise ValidationError("kernel must be conditionally negative definite")
    transform = cnd_to_pd(l, s0, tol)
    module = ReproducingModule(transform.kernel, tol)

    def theta(x: ModuleElement, s: str) -> SpanElement:
        return module.generator(x, s)

    if probes is None:
        probes = [
            (ModuleElement.basis(l.shape, l.rank, c), s, t)
            for c in range(l.rank)
            for s in l.points
            for t in l.points
            if s != t
        ]
    defect = 0.0
    for x, s, t in probes:
        lhs = l.op(s, t).apply(x).inner(x)
        diff = theta(x, s) - theta(x, t)
        rhs = diff.inner(diff)
        defect = max(defect, (lhs - rhs).norm())
    return module, theta, defect
