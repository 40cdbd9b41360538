"""JSON serialization of kernels, module elements, and problem files.

Conventions: complex numbers serialize as two-element arrays [re, im];
matrices are row-major nested lists; an algebra element is the list of its
block matrices; a module element is {"shape", "rank", "coords"}; a kernel
file is {"shape", "rank", "points", "hermitian", "ops"} with ops an n x n
grid of k x k grids of block lists.  Loaders validate shapes and flags and
raise ``ValidationError`` carrying a JSON-path style diagnostic.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .algebra import AlgebraElement, AlgebraShape
from .errors import ValidationError
from .kernels import KernelSample
from .modules import ModuleElement, ModuleOperator
from .reproducing import SpanElement


# encoding -------------------------------------------------------------------


def _encode_complex(z: complex):
    return [float(np.real(z)), float(np.imag(z))]


def _encode_matrix(m: np.ndarray):
    return [[_encode_complex(z) for z in row] for row in np.asarray(m)]


def encode_algebra_element(a: AlgebraElement):
    return [_encode_matrix(b) for b in a.blocks]


def encode_module_element(x: ModuleElement):
    return {
        "shape": list(x.shape.block_dims),
        "rank": x.rank,
        "coords": [encode_algebra_element(c) for c in x.coords],
    }


def encode_operator(t: ModuleOperator):
    return [[encode_algebra_element(e) for e in row] for row in t.entries]


def encode_kernel(k: KernelSample):
    return {
        "shape": list(k.shape.block_dims),
        "rank": k.rank,
        "points": list(k.points),
        "hermitian": k.hermitian,
        "ops": [[encode_operator(op) for op in row] for row in k.ops],
    }


def encode_span_element(f: SpanElement):
    return {
        "terms": [
            {
                "x": encode_module_element(x),
                "s": s,
                "a": encode_algebra_element(a),
            }
            for x, s, a in f.terms
        ]
    }


# decoding -------------------------------------------------------------------


def _expect(cond, message, path):
    if not cond:
        raise ValidationError(message, path=path)


def _decode_complex(obj, path):
    _expect(
        isinstance(obj, (list, tuple)) and len(obj) == 2,
        "complex numbers serialize as [re, im]",
        path,
    )
    re, im = obj
    _expect(isinstance(re, (int, float)) and isinstance(im, (int, float)),
            "complex parts must be numbers", path)
    return complex(re, im)


def _decode_matrix(obj, dim, path):
    _expect(isinstance(obj, list) and len(obj) == dim, f"expected {dim} rows", path)
    out = np.zeros((dim, dim), dtype=complex)
    for i, row in enumerate(obj):
        _expect(isinstance(row, list) and len(row) == dim,
                f"expected {dim} entries per row", f"{path}[{i}]")
        for j, z in enumerate(row):
            out[i, j] = _decode_complex(z, f"{path}[{i}][{j}]")
    return out


def decode_shape(obj, path="shape") -> AlgebraShape:
    _expect(isinstance(obj, list) and obj, "shape must be a nonempty list", path)
    for i, d in enumerate(obj):
        _expect(isinstance(d, int) and d >= 1, "block dimensions are positive integers",
                f"{path}[{i}]")
    return AlgebraShape(tuple(obj))


def decode_algebra_element(obj, shape: AlgebraShape, path) -> AlgebraElement:
    _expect(isinstance(obj, list) and len(obj) == shape.num_blocks,
            f"expected {shape.num_blocks} blocks", path)
    blocks = [
        _decode_matrix(b, d, f"{path}[{i}]")
        for i, (b, d) in enumerate(zip(obj, shape.block_dims))
    ]
    return AlgebraElement(shape, blocks)


def decode_module_element(obj, path="", expect_shape=None, expect_rank=None) -> ModuleElement:
    _expect(isinstance(obj, dict), "module element must be an object", path)
    shape = decode_shape(obj.get("shape"), f"{path}.shape")
    rank = obj.get("rank")
    _expect(isinstance(rank, int) and rank >= 1, "rank must be a positive integer",
            f"{path}.rank")
    if expect_shape is not None:
        _expect(shape == expect_shape, f"shape must match the kernel ({expect_shape})",
                f"{path}.shape")
    if expect_rank is not None:
        _expect(rank == expect_rank, f"rank must match the kernel ({expect_rank})",
                f"{path}.rank")
    coords = obj.get("coords")
    _expect(isinstance(coords, list) and len(coords) == rank,
            f"expected {rank} coordinates", f"{path}.coords")
    return ModuleElement(
        shape,
        [
            decode_algebra_element(c, shape, f"{path}.coords[{i}]")
            for i, c in enumerate(coords)
        ],
    )


def decode_operator(obj, shape, rank, path) -> ModuleOperator:
    _expect(isinstance(obj, list) and len(obj) == rank, f"expected {rank} rows", path)
    entries = []
    for i, row in enumerate(obj):
        _expect(isinstance(row, list) and len(row) == rank,
                f"expected {rank} entries per row", f"{path}[{i}]")
        entries.append(
            [
                decode_algebra_element(e, shape, f"{path}[{i}][{j}]")
                for j, e in enumerate(row)
            ]
        )
    return ModuleOperator(shape, entries)


def decode_kernel(obj, path="") -> KernelSample:
    _expect(isinstance(obj, dict), "kernel must be an object", path or "kernel")
    root = path or "kernel"
    shape = decode_shape(obj.get("shape"), f"{root}.shape")
    rank = obj.get("rank")
    _expect(isinstance(rank, int) and rank >= 1, "rank must be a positive integer",
            f"{root}.rank")
    points = obj.get("points")
    _expect(isinstance(points, list) and points, "points must be a nonempty list",
            f"{root}.points")
    _expect(all(isinstance(p, str) for p in points), "points are strings",
            f"{root}.points")
    _expect(len(set(points)) == len(points), "points must be distinct", f"{root}.points")
    hermitian = obj.get("hermitian")
    _expect(isinstance(hermitian, bool), "hermitian flag must be a boolean",
            f"{root}.hermitian")
    n = len(points)
    ops_obj = obj.get("ops")
    _expect(isinstance(ops_obj, list) and len(ops_obj) == n, f"expected {n} rows of ops",
            f"{root}.ops")
    ops = []
    for i, row in enumerate(ops_obj):
        _expect(isinstance(row, list) and len(row) == n, f"expected {n} ops per row",
                f"{root}.ops[{i}]")
        ops.append(
            [
                decode_operator(o, shape, rank, f"{root}.ops[{i}][{j}]")
                for j, o in enumerate(row)
            ]
        )
    try:
        return KernelSample(shape, rank, points, ops, hermitian=hermitian or None)
    except ValidationError as exc:
        raise ValidationError(str(exc), path=root) from None


def decode_span_element(obj, kernel: KernelSample, path="") -> SpanElement:
    root = path or "element"
    _expect(isinstance(obj, dict) and isinstance(obj.get("terms"), list),
            "span element must be {'terms': [...]}", root)
    terms = []
    for i, term in enumerate(obj["terms"]):
        tpath = f"{root}.terms[{i}]"
        _expect(isinstance(term, dict), "term must be an object", tpath)
        x = decode_module_element(term.get("x"), f"{tpath}.x", kernel.shape, kernel.rank)
        s = term.get("s")
        _expect(isinstance(s, str) and s in kernel.points, "unknown point label",
                f"{tpath}.s")
        a = decode_algebra_element(term.get("a"), kernel.shape, f"{tpath}.a")
        terms.append((x, s, a))
    return SpanElement(kernel, terms)


# file-level helpers ----------------------------------------------------------


def _load_json(path: Path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read file: {exc}", path=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"invalid JSON: {exc}", path=str(path)) from None


def load_kernel(path) -> KernelSample:
    return decode_kernel(_load_json(path))


def save_kernel(kernel: KernelSample, path):
    Path(path).write_text(json.dumps(encode_kernel(kernel), indent=2, sort_keys=True))


def load_problem(path):
    """Load an interpolation problem file.

    Returns (kernel, targets, m) where targets is a list of (label, element)
    and m is the optional extension bound.  The kernel may be inline or a
    path to a kernel file, resolved relative to the problem file.
    """
    obj = _load_json(path)
    _expect(isinstance(obj, dict), "problem must be an object", str(path))
    kernel_obj = obj.get("kernel")
    if isinstance(kernel_obj, str):
        kernel_path = Path(path).parent / kernel_obj
        kernel = load_kernel(kernel_path)
    else:
        kernel = decode_kernel(kernel_obj)
    targets_obj = obj.get("targets")
    _expect(isinstance(targets_obj, list) and targets_obj,
            "targets must be a nonempty list", "targets")
    targets = []
    for i, t in enumerate(targets_obj):
        tpath = f"targets[{i}]"
        _expect(isinstance(t, dict), "target must be an object", tpath)
        s = t.get("s")
        _expect(isinstance(s, str), "target point must be a string", f"{tpath}.s")
        _expect(s in kernel.points, f"unknown point label {s!r}", f"{tpath}.s")
        y = decode_module_element(t.get("y"), f"{tpath}.y", kernel.shape, kernel.rank)
        targets.append((s, y))
    m = obj.get("m")
    if m is not None:
        _expect(isinstance(m, (int, float)) and m > 0, "m must be a positive number", "m")
    return kernel, targets, m
