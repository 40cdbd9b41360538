"""Operator-valued kernels on Hilbert modules over finite-dimensional C*-algebras.

Definiteness testing, reproducing-module construction with Kolmogorov
factorization, transforms between conditionally negative definite and
positive definite kernels, Douglas-style factorization, and kernel
interpolation, all at finite sample scale.
"""

from .algebra import (
    DEFAULT_TOL,
    AlgebraElement,
    AlgebraShape,
    Tolerance,
    embed_dense,
    is_positive,
    project_dense,
    sqrt_psd,
)
from .cnd import (
    CndTransform,
    cnd_to_pd,
    is_normalized,
    pd_to_cnd_reconstruct,
    scalarize,
    schoenberg_embedding,
)
from .errors import (
    GapHypothesisError,
    PositivityError,
    RangeInclusionError,
    ShapeMismatchError,
    UnknownPointError,
    ValidationError,
)
from .factorization import (
    DenseOperator,
    DouglasSolution,
    Space,
    douglas_solve,
    pseudo_inverse,
    psd_sqrt,
    range_contains,
    range_equality,
)
from .interpolation import (
    InterpolationProblem,
    InterpolationResult,
    bounded_extension,
    interpolate_min_norm,
    interpolation_exists,
    multi_evaluation,
)
from .kernels import (
    KernelSample,
    assemble_dense,
    flatten_kernel,
    from_algebra_matrix,
    gen_factor_gram,
    gen_left_mult_gram,
    gen_rank_one,
    gen_scalar_lift,
    gen_scaled_family,
    is_conditionally_negative_definite,
    is_hermitian,
    is_positive_definite,
    is_symmetric,
    kernel_norm,
)
from .modules import (
    ModuleElement,
    ModuleOperator,
    cauchy_schwarz_gap,
    inner,
    op_is_positive,
    rank_one,
)
from .relative import (
    BasePointFunctional,
    RelativeKernel,
    decompose,
    reconstruct_kernel,
    relative_from_kernel,
)
from .reproducing import (
    FeatureMap,
    ReproducingModule,
    SpanElement,
    evaluate,
    feature_map,
    generator,
    kolmogorov_check,
    membership_gap,
    norm_of,
    reproducing_check,
    span_inner,
)
from .selftest import DEFAULT_SEED, run_selftest

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
