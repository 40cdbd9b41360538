"""Seeded random builders for desk-scale exercises of the library.

Every constructor takes a numpy Generator so that suites are reproducible
from a single seed.  Kernels come out positive definite or conditionally
negative definite by construction (with the construction documented on each
builder), which is what the property suites rely on.
"""

from __future__ import annotations

import numpy as np

from .algebra import AlgebraElement, AlgebraShape, Tolerance, DEFAULT_TOL
from .kernels import (
    KernelSample,
    assemble_dense,
    cnd_margin,
    from_algebra_matrix,
    gen_factor_gram,
    gen_left_mult_gram,
    gen_rank_one,
    gen_scalar_lift,
    gen_scaled_family,
)
from .modules import ModuleElement, ModuleOperator
from .reproducing import ReproducingModule, SpanElement

SHAPE_POOL = [(1,), (2,), (1, 1), (2, 1), (2, 2), (3,)]

PD_KINDS = ("rank_one", "left_gram", "scalar_lift", "scaled_family", "factor_gram")


def point_labels(n: int) -> list[str]:
    return [f"s{i}" for i in range(n)]


def random_algebra_element(
    rng, shape: AlgebraShape, scale: float = 1.0, hermitian: bool = False
) -> AlgebraElement:
    blocks = []
    for d in shape.block_dims:
        b = scale * (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d)))
        if hermitian:
            b = 0.5 * (b + b.conj().T)
        blocks.append(b)
    return AlgebraElement(shape, blocks)


def random_positive_element(rng, shape: AlgebraShape, scale: float = 1.0) -> AlgebraElement:
    a = random_algebra_element(rng, shape, scale)
    return a.adjoint() @ a


def random_module_element(
    rng, shape: AlgebraShape, rank: int, scale: float = 1.0, real_diag: bool = False
) -> ModuleElement:
    coords = []
    for _ in range(rank):
        if real_diag:
            blocks = [np.diag(scale * rng.standard_normal(d)) for d in shape.block_dims]
            coords.append(AlgebraElement(shape, blocks))
        else:
            coords.append(random_algebra_element(rng, shape, scale))
    return ModuleElement(shape, coords)


def random_module_operator(
    rng, shape: AlgebraShape, rank: int, scale: float = 1.0, hermitian: bool = False
) -> ModuleOperator:
    entries = [
        [random_algebra_element(rng, shape, scale) for _ in range(rank)]
        for _ in range(rank)
    ]
    op = ModuleOperator(shape, entries)
    if hermitian:
        op = (op + op.adjoint()) * 0.5
    return op


def random_scalar_psd(rng, n: int, real: bool = False) -> np.ndarray:
    f = rng.standard_normal((n, n + 1))
    if not real:
        f = f + 1j * rng.standard_normal((n, n + 1))
    return f @ f.conj().T / n


def random_point_family(rng, shape, rank, points, scale=1.0, real_diag=False):
    return {p: random_module_element(rng, shape, rank, scale, real_diag) for p in points}


def random_pd_kernel(
    rng, shape: AlgebraShape, rank: int, n: int, kind: str | None = None
) -> KernelSample:
    """A positive definite sample from one of the library generators.

    Left-multiplication kinds ("left_gram", "scaled_family") produce rank-1
    samples by nature; with kind=None they are only drawn when rank == 1.
    """
    if kind is None:
        pool = PD_KINDS if rank == 1 else ("rank_one", "scalar_lift", "factor_gram")
        kind = pool[rng.integers(len(pool))]
    points = point_labels(n)
    if kind == "rank_one":
        return gen_rank_one(random_point_family(rng, shape, rank, points), points)
    if kind == "left_gram":
        fam = random_point_family(rng, shape, max(rank, 2), points)
        return gen_left_mult_gram(fam, points)
    if kind == "scalar_lift":
        return gen_scalar_lift(random_scalar_psd(rng, n), rank, shape, points)
    if kind == "scaled_family":
        fam = {p: random_algebra_element(rng, shape) for p in points}
        return gen_scaled_family(random_scalar_psd(rng, n), fam, points)
    if kind == "factor_gram":
        factors = {p: random_module_operator(rng, shape, rank, 0.7) for p in points}
        return gen_factor_gram(factors, points)
    raise ValueError(f"unknown kind {kind!r}")


def random_symmetric_pd_kernel(rng, shape, rank, n) -> KernelSample:
    """Symmetric positive definite sample (all values self-adjoint)."""
    if rank == 1 and rng.integers(2):
        fam = random_point_family(rng, shape, 2, point_labels(n), real_diag=True)
        return gen_left_mult_gram(fam, point_labels(n))
    return gen_scalar_lift(random_scalar_psd(rng, n, real=True), rank, shape, point_labels(n))


CND_KINDS = ("shift_pair", "distance", "scalar_distance", "from_pd")


def random_cnd_kernel(
    rng, shape: AlgebraShape, rank: int, n: int, kind: str | None = None
) -> KernelSample:
    """A hermitian, conditionally negative definite sample by construction."""
    if kind is None:
        pool = CND_KINDS if rank == 1 else ("shift_pair", "scalar_distance", "from_pd")
        kind = pool[rng.integers(len(pool))]
    points = point_labels(n)
    if kind == "shift_pair":
        # values c_i + c_j*: the constrained quadratic form telescopes to zero
        cs = [random_module_operator(rng, shape, rank) for _ in range(n)]
        ops = [[cs[i] + cs[j].adjoint() for j in range(n)] for i in range(n)]
        return KernelSample(shape, rank, points, ops)
    if kind == "distance":
        # squared distances of a family with self-adjoint pairwise inner products
        xs = [random_module_element(rng, shape, max(rank, 2), real_diag=True) for _ in range(n)]
        entries = [[(xs[i] - xs[j]).inner(xs[i] - xs[j]) for j in range(n)] for i in range(n)]
        return from_algebra_matrix(shape, points, entries)
    if kind == "scalar_distance":
        ts = rng.standard_normal(n)
        kappa = np.array([[(ts[i] - ts[j]) ** 2 for j in range(n)] for i in range(n)])
        eye = ModuleOperator.identity(shape, rank)
        ops = [[eye * float(kappa[i, j]) for j in range(n)] for i in range(n)]
        return KernelSample(shape, rank, points, ops)
    if kind == "from_pd":
        base = random_symmetric_pd_kernel(rng, shape, rank, n)
        ops = [
            [
                base.ops[i][i] + base.ops[j][j] - base.ops[i][j] * 2.0
                for j in range(n)
            ]
            for i in range(n)
        ]
        return KernelSample(shape, rank, points, ops)
    raise ValueError(f"unknown kind {kind!r}")


def random_normalized_symmetric_cnd(rng, shape, rank, n) -> KernelSample:
    kind = ("distance", "scalar_distance", "from_pd")[rng.integers(3)]
    if kind == "distance" and rank != 1:
        kind = "scalar_distance"
    return random_cnd_kernel(rng, shape, rank, n, kind)


def break_cnd(rng, l: KernelSample, tol: Tolerance = DEFAULT_TOL) -> KernelSample:
    """Perturb a hermitian kernel so it decisively fails the conditional test."""
    bump = random_pd_kernel(rng, l.shape, l.rank, l.n, "factor_gram")
    bump = KernelSample(l.shape, l.rank, l.points, bump.ops)
    gamma = 0.25 * max(1.0, float(np.linalg.norm(assemble_dense(l), 2)))
    for _ in range(40):
        cand = l + bump * gamma
        scale = float(np.linalg.norm(assemble_dense(cand), 2))
        if cnd_margin(cand) > 1e3 * tol.slack(scale):
            return cand
        gamma *= 2.0
    raise RuntimeError("failed to break conditional negativity (degenerate bump)")


def random_span_element(
    rng, module: ReproducingModule, n_terms: int = 2, scale: float = 1.0
) -> SpanElement:
    k = module.kernel
    terms = []
    for _ in range(n_terms):
        x = random_module_element(rng, k.shape, k.rank, scale)
        s = k.points[rng.integers(k.n)]
        a = random_algebra_element(rng, k.shape, scale)
        terms.append((x, s, a))
    return SpanElement(k, terms)
