"""Multi-point evaluation, interpolation feasibility, and bounded extension.

Feasibility of hitting targets y_i at distinct sample points is a range
condition on the Gram operator matrix of those points; the minimal-norm
interpolant comes from the pseudo-inverse solve, and the bounded extension
feeds the evaluation operator and the target data through the Douglas-style
factorization, reporting the certified norm bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, Tolerance, alg_to_vec
from .errors import GapHypothesisError, ValidationError
from .factorization import (
    DenseOperator,
    Space,
    douglas_solve,
    range_residual,
)
from .kernels import KernelSample, PointFamily, assemble_dense, pd_margin
from .modules import ModuleElement, left_factor_matrix, module_to_vec
from .reproducing import ReproducingModule, SpanElement, membership_gap


@dataclass(frozen=True)
class InterpolationProblem:
    """Targets (s_i, y_i) at distinct points of a positive definite kernel."""

    kernel: KernelSample
    targets: tuple[tuple[str, ModuleElement], ...]

    def __post_init__(self):
        targets = tuple((str(s), y) for s, y in self.targets)
        labels = [s for s, _ in targets]
        if len(set(labels)) != len(labels):
            raise ValidationError("target points must be distinct")
        if not targets:
            raise ValidationError("at least one target is required")
        for s, y in targets:
            self.kernel.index(s)
            if y.shape != self.kernel.shape or y.rank != self.kernel.rank:
                raise ValidationError(f"target at {s!r} does not match the kernel")
        object.__setattr__(self, "targets", targets)

    @property
    def points(self) -> list[str]:
        return [s for s, _ in self.targets]


@dataclass(frozen=True)
class InterpolationResult:
    feasible: bool
    element: SpanElement | None
    norm: float | None
    residual: float
    min_norm_certified: bool = False
    least_bound: float | None = None


def _as_module(source, tol: Tolerance) -> ReproducingModule:
    return source if isinstance(source, ReproducingModule) else ReproducingModule(source, tol)


def multi_evaluation(source: KernelSample | ReproducingModule, points,
                     tol: Tolerance = DEFAULT_TOL) -> DenseOperator:
    """Stacked evaluation at the given points on the orthonormalized span."""
    module = _as_module(source, tol)
    mat = module.multi_evaluation_matrix(points)
    return DenseOperator(
        mat,
        Space("span", module.span_rank),
        Space(f"module^{len(points)}", mat.shape[0]),
    )


def _stacked_targets(problem: InterpolationProblem) -> np.ndarray:
    return np.concatenate([module_to_vec(y) for _, y in problem.targets])


def interpolation_exists(
    problem: InterpolationProblem, tol: Tolerance = DEFAULT_TOL,
    module: ReproducingModule | None = None,
) -> tuple[bool, float]:
    """Range test of the stacked targets against the Gram operator matrix."""
    module = _as_module(module if module is not None else problem.kernel, tol)
    gram = module.gram_submatrix(problem.points)
    y = _stacked_targets(problem)
    residual = range_residual(gram, y)
    sigma = float(np.linalg.norm(gram, 2))
    bound = tol.rel_eps * max(float(np.linalg.norm(y)), sigma) + tol.abs_floor
    return residual <= bound, residual


def interpolate_min_norm(
    problem: InterpolationProblem, tol: Tolerance = DEFAULT_TOL,
    module: ReproducingModule | None = None,
) -> InterpolationResult:
    """Minimal-norm interpolant via the Gram pseudo-inverse solve.

    Minimality is certified empirically against perturbations in the null
    space of the evaluation operator (orthogonality makes any perturbed
    interpolant at least as large in norm).
    """
    module = _as_module(module if module is not None else problem.kernel, tol)
    feasible, residual = interpolation_exists(problem, tol, module)
    if not feasible:
        return InterpolationResult(False, None, None, residual)
    gram = module.gram_submatrix(problem.points)
    y = _stacked_targets(problem)
    coeff = np.linalg.pinv(gram, rcond=max(tol.rel_eps, 1e-15)) @ y

    k = module.kernel
    d = module.block_dim
    unit = AlgebraElement.unit(k.shape)
    terms = []
    for i, s in enumerate(problem.points):
        block = coeff[i * d : (i + 1) * d]
        if np.any(block != 0):
            from .modules import vec_to_module

            terms.append((vec_to_module(k.shape, k.rank, block), s, unit))
    f = SpanElement(k, terms)
    fnorm = f.norm()

    # certify minimality against null directions of the evaluation operator
    ev = module.multi_evaluation_matrix(problem.points)
    _, svals, vh = np.linalg.svd(ev)
    cutoff = (svals[0] if svals.size else 0.0) * max(tol.rel_eps, 1e-15)
    null = vh.conj().T[:, np.sum(svals > cutoff) :]
    certified = True
    f_ortho = module.ortho_coords(f)
    scale = max(fnorm, 1.0)
    checks = 0
    for col in range(null.shape[1]):
        for factor in (1.0, -0.5):
            if checks >= 20:
                break
            g = module.from_ortho(f_ortho + factor * scale * null[:, col])
            if g.norm() < fnorm - tol.slack(scale):
                certified = False
            checks += 1
    return InterpolationResult(True, f, fnorm, residual, min_norm_certified=certified)


def bounded_extension(
    source: KernelSample | ReproducingModule,
    f_values: PointFamily,
    m: float,
    points=None,
    tol: Tolerance = DEFAULT_TOL,
) -> InterpolationResult:
    """Norm-bounded member matching the data, under the gap hypothesis.

    Requires the gap kernel m K - f (x) f to be positive definite over the
    sample; the extension h then satisfies ||h||^2 <= lambda_min <= m (the
    least bound is reported) and h agrees with the data at the given points.
    Raises ``GapHypothesisError`` with the most negative eigenvalue of the
    assembled gap matrix when the hypothesis fails.
    """
    module = _as_module(source, tol)
    kernel = module.kernel
    if points is None:
        points = list(kernel.points)
    gap = membership_gap(f_values, kernel, m)
    min_eig, herm_defect = pd_margin(gap)
    scale = float(np.linalg.norm(assemble_dense(gap), 2))
    if herm_defect > tol.slack(scale) or min_eig < -tol.slack(scale):
        raise GapHypothesisError(
            f"gap kernel is not positive definite (min eigenvalue {min_eig:.3e})",
            min_eigenvalue=min_eig,
        )

    a = np.vstack([left_factor_matrix(f_values[s]) for s in points])
    b = module.multi_evaluation_matrix(points)
    target = Space(f"module^{len(points)}", a.shape[0])
    solution = douglas_solve(
        DenseOperator(a, Space("algebra", a.shape[1]), target),
        DenseOperator(b, Space("span", module.span_rank), target),
        tol,
    )
    h = module.from_ortho(solution.C.matrix @ alg_to_vec(AlgebraElement.unit(kernel.shape)))
    agreement = max(
        (h.evaluate(s) - f_values[s]).norm() for s in points
    )
    return InterpolationResult(
        True,
        h,
        h.norm(),
        agreement,
        min_norm_certified=False,
        least_bound=solution.lambda_min,
    )
