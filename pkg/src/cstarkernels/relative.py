"""Relative reproducing kernels: difference reproducers and reconstruction.

A relative kernel supplies, for each (x, s, t), a span element reproducing the
difference pairing <f(s) - f(t), x> = <f, D_{x,s,t}>.  For a reproducing
module this is D_{x,s,t} = G_{x,s} - G_{x,t}.  Fixing a base point splits the
pairing into a kernel part plus evaluation at the base point, and in finite
dimensions the full kernel can be rebuilt from the relative data by solving a
Riesz problem against the span Gram matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .algebra import DEFAULT_TOL, AlgebraElement, Tolerance
from .errors import ValidationError
from .kernels import KernelSample
from .modules import ModuleElement, ModuleOperator, module_to_vec
from .reproducing import ReproducingModule, SpanElement


@dataclass(frozen=True)
class BasePointFunctional:
    """The pairing phi(x, f) = <f(s0), x> carried by the decomposition."""

    base_point: str

    def __call__(self, x: ModuleElement, f: SpanElement) -> AlgebraElement:
        return f.evaluate(self.base_point).inner(x)


class RelativeKernel:
    """Relative reproducing data over an underlying reproducing module."""

    def __init__(self, module: ReproducingModule):
        self.module = module

    @property
    def points(self):
        return self.module.kernel.points

    def difference_generator(self, x: ModuleElement, s: str, t: str) -> SpanElement:
        """D_{x,s,t}: reproduces <f(s) - f(t), x>."""
        return self.module.generator(x, s) - self.module.generator(x, t)


def relative_from_kernel(
    source: KernelSample | ReproducingModule, tol: Tolerance = DEFAULT_TOL
) -> RelativeKernel:
    module = source if isinstance(source, ReproducingModule) else ReproducingModule(source, tol)
    return RelativeKernel(module)


def _default_probes(module: ReproducingModule):
    k = module.kernel
    probes = []
    for c in range(k.rank):
        x = ModuleElement.basis(k.shape, k.rank, c)
        for s in k.points:
            f = module.generator(x, s)
            probes.append((f, x, s))
    return probes


def decompose(
    r: RelativeKernel,
    s0: str,
    probes: Sequence[tuple[SpanElement, ModuleElement, str]] | None = None,
) -> tuple[Callable[[ModuleElement, str], SpanElement], BasePointFunctional, float]:
    """Split the evaluation pairing through the base point s0.

    Returns (h, phi, defect) with h(x, s) = D_{x,s,s0} and phi evaluation at
    s0, so that <f(s), x> = <f, h(x, s)> + phi(x, f).  The defect is the max
    violation over the probes (f, x, s).
    """
    r.module.kernel.index(s0)

    def h(x: ModuleElement, s: str) -> SpanElement:
        return r.difference_generator(x, s, s0)

    phi = BasePointFunctional(s0)
    if probes is None:
        probes = _default_probes(r.module)
    defect = 0.0
    for f, x, s in probes:
        lhs = f.evaluate(s).inner(x)
        rhs = f.inner(h(x, s)) + phi(x, f)
        defect = max(defect, (lhs - rhs).norm())
    return h, phi, defect


def riesz_representer(module: ReproducingModule, values: Sequence[ModuleElement],
                      tol: Tolerance = DEFAULT_TOL) -> SpanElement:
    """The span element taking the given values at the sample points.

    Solves the Gram system; raises when the requested values are not
    attainable within the span (degenerate data).
    """
    k = module.kernel
    if len(values) != k.n:
        raise ValidationError("one value per sample point is required")
    target = np.concatenate([module_to_vec(v) for v in values])
    # minimum-norm solve against the Gram matrix, restricted to its support
    proj = module._eigvecs.conj().T @ target
    coords = module._eigvecs @ (proj / module._eigvals)
    residual = float(np.linalg.norm(module.gram @ coords - target))
    scale = max(float(np.linalg.norm(target)), 1.0)
    if residual > np.sqrt(tol.rel_eps) * scale:
        raise ValidationError(
            f"Riesz solve failed: requested values lie outside the span (residual {residual:.3e})"
        )
    return module.from_coords(coords)


def reconstruct_kernel(
    r: RelativeKernel, s0: str, tol: Tolerance = DEFAULT_TOL
) -> tuple[KernelSample, dict[str, float]]:
    """Rebuild a reproducing kernel from relative data and a base point.

    For each x the base-point representer psi_x solves <psi_x, f> = <x, f(s0)>
    over the span; the kernel is K(s, t)(x) = h_{x,s}(t) + psi_x(t).  Returns
    the kernel together with defects of the reproducing identity and of the
    difference identity D_{x,s,t} = G_{x,s} - G_{x,t} for the rebuilt kernel.
    """
    module = r.module
    k = module.kernel
    i0 = k.index(s0)
    shape, rank = k.shape, k.rank

    # column c of the rebuilt operator K'(s, t) is (h_{e_c, s} + psi_{e_c})(t)
    basis = [ModuleElement.basis(shape, rank, c) for c in range(rank)]
    representers = []
    for x in basis:
        values = [k.ops[i0][q].apply(x) for q in range(k.n)]
        representers.append(riesz_representer(module, values, tol))
    h_parts = {
        (c, s): r.difference_generator(basis[c], s, s0) for c in range(rank) for s in k.points
    }

    ops = []
    for i, s in enumerate(k.points):
        row = []
        for j, t in enumerate(k.points):
            cols = []
            for c in range(rank):
                val = h_parts[(c, s)].evaluate(t) + representers[c].evaluate(t)
                cols.append(val)
            entries = [[cols[c].coords[i2] for c in range(rank)] for i2 in range(rank)]
            row.append(ModuleOperator(shape, entries))
        ops.append(row)
    rebuilt = KernelSample(shape, rank, k.points, ops)

    rebuilt_module = ReproducingModule(rebuilt, tol, validate=False)
    rk_defect = 0.0
    diff_defect = 0.0
    for c in range(rank):
        x = basis[c]
        for s in k.points:
            f = rebuilt_module.generator(x, s)
            for t in k.points:
                lhs = f.evaluate(t).inner(x)
                rhs = f.inner(rebuilt_module.generator(x, t))
                rk_defect = max(rk_defect, (lhs - rhs).norm())
        for s in k.points:
            for t in k.points:
                d_vals_old = r.difference_generator(x, s, t)
                g_new = rebuilt_module.generator(x, s) - rebuilt_module.generator(x, t)
                for q in k.points:
                    gap = (d_vals_old.evaluate(q) - g_new.evaluate(q)).norm()
                    diff_defect = max(diff_defect, gap)
    return rebuilt, {"reproducing": rk_defect, "difference": diff_defect}
