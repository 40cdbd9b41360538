"""Command line interface.

One binary with subcommands; every run emits a single JSON report on stdout
(schema ``cstarkernels.report/1``) and diagnostics on stderr.  Exit codes:
0 all verdicts pass, 1 a mathematical verdict failed, 2 malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .algebra import Tolerance
from .cnd import cnd_to_pd, is_normalized, pd_to_cnd_reconstruct
from .errors import GapHypothesisError, PositivityError, ValidationError
from .interpolation import InterpolationProblem, bounded_extension, interpolate_min_norm
from .kernels import (
    KernelSample,
    assemble_dense,
    cnd_margin,
    is_conditionally_negative_definite,
    is_hermitian,
    is_positive_definite,
    kernel_norm,
    pd_margin,
    _hermitian_defect,
)
from .reproducing import ReproducingModule
from .selftest import DEFAULT_SEED, run_selftest
from . import io as kio

REPORT_SCHEMA_ID = "cstarkernels.report/1"

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "command", "verdicts", "metrics"],
    "properties": {
        "schema": {"const": REPORT_SCHEMA_ID},
        "command": {"type": "string"},
        "verdicts": {"type": "object", "additionalProperties": {"type": "boolean"}},
        "metrics": {
            "type": "object",
            "additionalProperties": {"type": ["number", "boolean", "integer"]},
        },
        "artifacts": {"type": "object"},
        "error": {"type": "string"},
    },
    "additionalProperties": False,
}


def _jsonable(value):
    if isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    raise TypeError(f"metric of unsupported type {type(value)!r}")


def _emit(report) -> None:
    print(json.dumps(report, indent=2, sort_keys=True))


def _report(command, verdicts, metrics, artifacts=None):
    report = {
        "schema": REPORT_SCHEMA_ID,
        "command": command,
        "verdicts": {k: bool(v) for k, v in verdicts.items()},
        "metrics": {k: _jsonable(v) for k, v in metrics.items()},
    }
    if artifacts:
        report["artifacts"] = artifacts
    return report


def _tolerance(args) -> Tolerance:
    return Tolerance(rel_eps=args.tol_rel, abs_floor=args.tol_abs)


def _cmd_check(args) -> tuple[dict, dict, dict | None]:
    kernel = kio.load_kernel(args.kernel)
    tol = _tolerance(args)
    scale = float(np.linalg.norm(assemble_dense(kernel), 2))
    if args.mode == "pd":
        min_eig, herm_defect = pd_margin(kernel)
        verdict = is_positive_definite(kernel, tol)
        return (
            {"positive_definite": verdict},
            {"min_eigenvalue": min_eig, "hermitian_defect": herm_defect, "scale": scale},
            None,
        )
    if args.mode == "cnd":
        if not is_hermitian(kernel, tol):
            raise ValidationError("kernel must be hermitian for the conditional test")
        margin = cnd_margin(kernel)
        verdict = is_conditionally_negative_definite(kernel, tol)
        return (
            {"conditionally_negative_definite": verdict},
            {"constrained_max_eigenvalue": margin, "scale": scale},
            None,
        )
    if args.mode == "hermitian":
        defect = _hermitian_defect(kernel)
        return (
            {"hermitian": is_hermitian(kernel, tol)},
            {"hermitian_defect": defect, "scale": scale},
            None,
        )
    if args.mode == "normalized":
        diag = max(kernel.ops[i][i].norm() for i in range(kernel.n))
        return (
            {"normalized": is_normalized(kernel, tol)},
            {"max_diagonal_norm": diag, "scale": scale},
            None,
        )
    raise ValidationError(f"unknown mode {args.mode!r}")


def _cmd_transform(args) -> tuple[dict, dict, dict | None]:
    kernel = kio.load_kernel(args.kernel)
    tol = _tolerance(args)
    base = args.base_point if args.base_point is not None else kernel.points[0]
    transform = cnd_to_pd(kernel, base, tol)
    if args.direction == "cnd-to-pd":
        min_eig, _ = pd_margin(transform.kernel)
        verdict = is_positive_definite(transform.kernel, tol)
        artifacts = {
            "kernel": kio.encode_kernel(transform.kernel),
            "correction": {
                p: kio.encode_operator(op) for p, op in transform.correction.items()
            },
        }
        return (
            {"transform_positive_definite": verdict},
            {"transform_min_eigenvalue": min_eig},
            artifacts,
        )
    if args.direction == "reconstruct":
        rebuilt = pd_to_cnd_reconstruct(transform)
        defect = max(
            (rebuilt.ops[i][j] - kernel.ops[i][j]).norm()
            for i in range(kernel.n)
            for j in range(kernel.n)
        )
        scale = 1.0 + kernel_norm(kernel)
        verdict = defect <= 1e-9 * scale
        return (
            {"round_trip": verdict},
            {"max_entry_defect": defect, "scale": scale},
            {"kernel": kio.encode_kernel(rebuilt)},
        )
    raise ValidationError(f"unknown direction {args.direction!r}")


def _cmd_interpolate(args) -> tuple[dict, dict, dict | None]:
    kernel, targets, m = kio.load_problem(args.problem)
    tol = _tolerance(args)
    try:
        module = ReproducingModule(kernel, tol)
    except PositivityError as exc:
        return (
            {"kernel_positive_definite": False},
            {"min_eigenvalue": exc.min_eigenvalue or 0.0},
            None,
        )
    if m is not None:
        f_values = dict(targets)
        points = [s for s, _ in targets]
        try:
            result = bounded_extension(module, f_values, float(m), points, tol)
        except GapHypothesisError as exc:
            return (
                {"gap_positive_definite": False},
                {"gap_min_eigenvalue": exc.min_eigenvalue},
                None,
            )
        verdicts = {
            "feasible": True,
            "norm_within_bound": result.norm <= float(m) + 1e-8,
        }
        metrics = {
            "norm": result.norm,
            "bound": float(m),
            "least_bound": result.least_bound,
            "evaluation_defect": result.residual,
        }
        artifacts = {"interpolant": kio.encode_span_element(result.element)}
        return verdicts, metrics, artifacts
    problem = InterpolationProblem(kernel, tuple(targets))
    result = interpolate_min_norm(problem, tol, module=module)
    if not result.feasible:
        return (
            {"feasible": False},
            {"range_residual": result.residual},
            None,
        )
    defect = max(
        (result.element.evaluate(s) - y).norm() for s, y in targets
    )
    verdicts = {"feasible": True, "min_norm_certified": result.min_norm_certified}
    metrics = {
        "range_residual": result.residual,
        "norm": result.norm,
        "evaluation_defect": defect,
    }
    artifacts = {"interpolant": kio.encode_span_element(result.element)}
    return verdicts, metrics, artifacts


def _cmd_kolmogorov(args) -> tuple[dict, dict, dict | None]:
    kernel = kio.load_kernel(args.kernel)
    tol = _tolerance(args)
    try:
        module = ReproducingModule(kernel, tol)
    except PositivityError as exc:
        return (
            {"kernel_positive_definite": False},
            {"min_eigenvalue": exc.min_eigenvalue or 0.0},
            None,
        )
    defect = max(
        module.kolmogorov_defect(s, t) for s in kernel.points for t in kernel.points
    )
    bound = 1e-8 * (1.0 + kernel_norm(kernel))
    return (
        {"kolmogorov_factorization": defect <= bound},
        {"max_defect": defect, "bound": bound},
        None,
    )


def _cmd_selftest(args) -> tuple[dict, dict, dict | None]:
    verdicts, metrics = run_selftest(
        seed=args.seed, max_points=args.max_points, max_rank=args.max_rank
    )
    metrics["seed"] = args.seed
    return verdicts, metrics, None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cstarkernels",
        description="Operator-valued kernel computations over finite-dimensional C*-algebras",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol-rel", type=float, default=1e-9,
                        help="relative spectral tolerance (default 1e-9)")
    common.add_argument("--tol-abs", type=float, default=1e-12,
                        help="absolute tolerance floor (default 1e-12)")
    common.add_argument("--output", type=str, default=None,
                        help="also write the report JSON to this file")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("check", parents=[common], help="definiteness and structure checks")
    p.add_argument("kernel", help="kernel sample JSON file")
    p.add_argument("--mode", required=True, choices=["pd", "cnd", "hermitian", "normalized"])
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("transform", parents=[common],
                       help="base-point transform and its round trip")
    p.add_argument("kernel", help="kernel sample JSON file (hermitian)")
    p.add_argument("--direction", required=True, choices=["cnd-to-pd", "reconstruct"])
    p.add_argument("--base-point", default=None, help="base point label (default: first point)")
    p.set_defaults(func=_cmd_transform)

    p = sub.add_parser("interpolate", parents=[common],
                       help="interpolation or bounded extension from a problem file")
    p.add_argument("problem", help="problem JSON file")
    p.set_defaults(func=_cmd_interpolate)

    p = sub.add_parser("kolmogorov", parents=[common],
                       help="feature-map factorization defect of a kernel")
    p.add_argument("kernel", help="kernel sample JSON file (positive definite)")
    p.set_defaults(func=_cmd_kolmogorov)

    p = sub.add_parser("selftest", parents=[common], help="run the randomized property suites")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED,
                   help=f"generator seed (default {DEFAULT_SEED})")
    p.add_argument("--max-points", type=int, default=None, help="cap sample sizes")
    p.add_argument("--max-rank", type=int, default=None, help="cap module ranks")
    p.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.cmd
    try:
        verdicts, metrics, artifacts = args.func(args)
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"schema": REPORT_SCHEMA_ID, "command": command,
               "verdicts": {}, "metrics": {}, "error": str(exc)})
        return 2
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit({"schema": REPORT_SCHEMA_ID, "command": command,
               "verdicts": {}, "metrics": {}, "error": str(exc)})
        return 2
    report = _report(command, verdicts, metrics, artifacts)
    _emit(report)
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
    for name, ok in report["verdicts"].items():
        if not ok:
            print(f"verdict failed: {name}", file=sys.stderr)
    return 0 if all(report["verdicts"].values()) else 1


if __name__ == "__main__":
    raise SystemExit(main())
