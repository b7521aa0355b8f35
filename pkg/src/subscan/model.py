"""Problem instances: dimensions, planted supports, and observation matrices.

An observation is Y = S + xi with xi i.i.d. standard Gaussian and S zero
everywhere except on a planted n x m submatrix (a row set crossed with a
column set) where every mean is at least `a`.  Generation is a pure function
of (dims, support, signal, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatchError, ValidationError
from .streams import gaussian_stream


def _as_index(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValidationError(f"{name} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class Dims:
    """Matrix size (N, M) and planted submatrix size (n, m), with 1 <= n <= N, 1 <= m <= M."""

    N: int
    M: int
    n: int
    m: int

    def __post_init__(self):
        for name in ("N", "M", "n", "m"):
            v = _as_index(getattr(self, name), name)
            if v < 1:
                raise ValidationError(f"{name} must be >= 1, got {v}")
            object.__setattr__(self, name, v)
        if self.n > self.N:
            raise ValidationError(f"need n <= N, got n={self.n} > N={self.N}")
        if self.m > self.M:
            raise ValidationError(f"need m <= M, got m={self.m} > M={self.M}")

    @property
    def p(self) -> float:
        """Row sparsity ratio n/N."""
        return self.n / self.N

    @property
    def q(self) -> float:
        """Column sparsity ratio m/M."""
        return self.m / self.M

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N, self.M)


@dataclass(frozen=True)
class Support:
    """A candidate submatrix: strictly increasing row and column index tuples."""

    rows: tuple[int, ...]
    cols: tuple[int, ...]

    def overlap(self, other: "Support") -> int:
        """Number of cells shared with another support."""
        r = len(set(self.rows) & set(other.rows))
        c = len(set(self.cols) & set(other.cols))
        return r * c

    def to_dict(self) -> dict:
        return {"rows": list(self.rows), "cols": list(self.cols)}


def _canonical_axis(ids: Sequence[int], count: int, limit: int, axis: str) -> tuple[int, ...]:
    ids = [_as_index(i, f"{axis} index") for i in ids]
    if len(ids) != count:
        raise ValidationError(f"expected {count} {axis} indices, got {len(ids)}")
    seen = set()
    for i in ids:
        if i < 0 or i >= limit:
            raise ValidationError(f"{axis} index {i} out of range [0, {limit})")
        if i in seen:
            raise ValidationError(f"duplicate {axis} index {i}")
        seen.add(i)
    return tuple(sorted(ids))


def make_support(dims: Dims, row_ids: Sequence[int], col_ids: Sequence[int]) -> Support:
    """Validate and canonicalize (sort) index lists into a Support.

    Raises ValidationError for wrong cardinality, out-of-range indices, or
    duplicates; each failure names the violated constraint.
    """
    return Support(
        rows=_canonical_axis(row_ids, dims.n, dims.N, "row"),
        cols=_canonical_axis(col_ids, dims.m, dims.M, "col"),
    )


def canonical_support(dims: Dims) -> Support:
    """The top-left block: rows 0..n-1 crossed with columns 0..m-1."""
    return Support(tuple(range(dims.n)), tuple(range(dims.m)))


@dataclass(frozen=True)
class SignalSpec:
    """Signal strength: every supported cell has mean `a` unless an explicit
    per-cell mean table (each entry >= a) is provided."""

    a: float
    means: np.ndarray | None = None

    def __post_init__(self):
        a = float(self.a)
        if not np.isfinite(a) or a < 0:
            raise ValidationError(f"a must be finite and >= 0, got {self.a!r}")
        object.__setattr__(self, "a", a)
        if self.means is not None:
            means = np.array(self.means, dtype=np.float64)
            if not np.all(np.isfinite(means)):
                raise ValidationError("means table contains non-finite entries")
            if np.any(means < a):
                raise ValidationError(f"every entry of means must be >= a={a}")
            means.flags.writeable = False
            object.__setattr__(self, "means", means)


@dataclass(frozen=True)
class Observation:
    """An immutable N x M float64 data matrix tied to its Dims."""

    data: np.ndarray
    dims: Dims

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.shape != self.dims.shape:
            raise DimensionMismatchError(
                f"data shape {data.shape} does not match dims {self.dims.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise ValidationError("observation contains non-finite entries")
        if data.flags.writeable:
            data = data.copy()
            data.flags.writeable = False
        object.__setattr__(self, "data", data)


def _check_support(dims: Dims, support: Support) -> None:
    if len(support.rows) != dims.n or len(support.cols) != dims.m:
        raise DimensionMismatchError(
            f"support is {len(support.rows)}x{len(support.cols)}, dims expect {dims.n}x{dims.m}"
        )
    if support.rows and (support.rows[0] < 0 or support.rows[-1] >= dims.N):
        raise DimensionMismatchError("support rows out of range for dims")
    if support.cols and (support.cols[0] < 0 or support.cols[-1] >= dims.M):
        raise DimensionMismatchError("support cols out of range for dims")


def generate(dims: Dims, support: Support, signal: SignalSpec, seed: int) -> Observation:
    """Draw Y = S + xi with xi i.i.d. N(0,1) from the stream keyed by seed.

    The noise depends only on (dims, seed), never on the signal, so runs at
    different signal levels share their noise (common random numbers) and
    generate(..., a=0, ...) coincides with generate_null.
    """
    _check_support(dims, support)
    data = gaussian_stream(seed).standard_normal(dims.shape)
    if signal.means is not None:
        if signal.means.shape != (dims.n, dims.m):
            raise DimensionMismatchError(
                f"means table shape {signal.means.shape} does not match ({dims.n}, {dims.m})"
            )
        data[np.ix_(support.rows, support.cols)] += signal.means
    elif signal.a != 0.0:
        data[np.ix_(support.rows, support.cols)] += signal.a
    data.flags.writeable = False  # freshly drawn, safe to freeze without a copy
    return Observation(data, dims)


def generate_null(dims: Dims, seed: int) -> Observation:
    """A pure-noise matrix; identical to generate(...) with a = 0 and the same seed."""
    data = gaussian_stream(seed).standard_normal(dims.shape)
    data.flags.writeable = False
    return Observation(data, dims)
