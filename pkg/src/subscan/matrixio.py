"""Flat-file round trip for observations.

Matrix file: CSV of float64 values, N rows x M columns, no header, printed
with 17 significant digits (exact float64 round trip).  Companion metadata:
a small JSON file recording dims, support, signal level and seed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .model import Dims, Observation, Support

_FMT = "%.17g"


def default_meta_path(matrix_path) -> Path:
    p = Path(matrix_path)
    return p.with_suffix(p.suffix + ".meta.json")


def save_matrix(
    obs: Observation,
    matrix_path,
    support: Support | None = None,
    a: float | None = None,
    seed: int | None = None,
    meta_path=None,
) -> Path:
    """Write the CSV matrix plus its metadata file; returns the metadata path."""
    matrix_path = Path(matrix_path)
    meta_path = Path(meta_path) if meta_path is not None else default_meta_path(matrix_path)
    np.savetxt(matrix_path, obs.data, fmt=_FMT, delimiter=",")
    meta = {
        "N": obs.dims.N,
        "M": obs.dims.M,
        "n": obs.dims.n,
        "m": obs.dims.m,
        "rows": list(support.rows) if support is not None else None,
        "cols": list(support.cols) if support is not None else None,
        "a": a,
        "seed": seed,
    }
    meta_path.write_text(json.dumps(meta, indent=2) + "\n")
    return meta_path


def load_matrix(matrix_path, meta_path=None) -> tuple[Observation, dict]:
    """Read a CSV matrix and its metadata; raises DimensionMismatchError if
    the file contents disagree with the recorded dims."""
    matrix_path = Path(matrix_path)
    meta_path = Path(meta_path) if meta_path is not None else default_meta_path(matrix_path)
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"unreadable metadata file {meta_path}: {exc}") from exc
    for key in ("N", "M", "n", "m"):
        if key not in meta:
            raise ValidationError(f"metadata file {meta_path} missing key {key!r}")
    dims = Dims(meta["N"], meta["M"], meta["n"], meta["m"])
    data = np.loadtxt(matrix_path, delimiter=",", ndmin=2)
    if data.shape != dims.shape:
        raise DimensionMismatchError(
            f"matrix file is {data.shape[0]}x{data.shape[1]}, metadata says {dims.N}x{dims.M}"
        )
    return Observation(data, dims), meta
