"""Path functionals and Monte Carlo estimation.

A FunctionalDescriptor names one scalar functional of a path:

    base value   sup / sup of |path| / sup of increments / drifted sup /
                 drifted sup minus an anchored value
    then         optional floor:  max(base, c)
    then         optional transform: x^p, exp(lambda*x), (x - t0)_+, max(x, c)

The drifted sup uses polynomial drifts m(t) = a * t^b. Because the anchor
value X_s is constant along each path,

    sup_t (X_t + m(t) - X_s) = sup_t (X_t + m(t)) - X_s,

so anchored functionals reuse the single drifted-sup reduction; every
estimator over one batch is one O(M*n) pass plus O(M) work, and repeated
reductions are cached on the batch.

Estimator means and standard errors are accumulated with compensated
summation (math.fsum) so results do not depend on summation order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .kernels import _pow
from .sampling import PathBatch

# Rows per reduction block: bounds temporaries to ~64 MB at n = 512.
_ROW_CHUNK = 16384


class Base(enum.Enum):
    SUP = "sup"
    SUP_ABS = "sup_abs"
    SUP_INCREMENT = "sup_increment"
    SUP_PLUS_DRIFT = "sup_plus_drift"
    SUP_DRIFT_MINUS_ANCHOR = "sup_drift_minus_anchor"


class TransformKind(enum.Enum):
    IDENTITY = "identity"
    MOMENT = "moment"
    EXP = "exp"
    HINGE = "hinge"
    MAX_WITH = "max_with"


@dataclass(frozen=True)
class Transform:
    kind: TransformKind = TransformKind.IDENTITY
    param: Optional[float] = None

    def __post_init__(self):
        needs_param = self.kind is not TransformKind.IDENTITY
        if needs_param and self.param is None:
            raise DomainError(f"{self.kind.value} transform needs a parameter")
        if self.kind in (TransformKind.MOMENT, TransformKind.EXP) and not (
            self.param is not None and self.param > 0
        ):
            raise DomainError(f"{self.kind.value} parameter must be > 0")

    @classmethod
    def identity(cls):
        return cls(TransformKind.IDENTITY)

    @classmethod
    def moment(cls, p: float):
        return cls(TransformKind.MOMENT, float(p))

    @classmethod
    def exp(cls, lam: float):
        return cls(TransformKind.EXP, float(lam))

    @classmethod
    def hinge(cls, t0: float):
        return cls(TransformKind.HINGE, float(t0))

    @classmethod
    def max_with(cls, c: float):
        return cls(TransformKind.MAX_WITH, float(c))

    def describe(self) -> str:
        if self.kind is TransformKind.IDENTITY:
            return ""
        if self.kind is TransformKind.MOMENT:
            return f"^{self.param!r}"
        if self.kind is TransformKind.EXP:
            return f"exp({self.param!r}*.)"
        if self.kind is TransformKind.HINGE:
            return f"hinge({self.param!r})"
        return f"max(.,{self.param!r})"


@dataclass(frozen=True)
class DriftSpec:
    """Polynomial drift m(t) = a * t^b with b >= 0."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and np.isfinite(self.b)):
            raise DomainError("drift coefficients must be finite")
        if self.b < 0:
            raise DomainError(f"drift exponent must be >= 0, got {self.b}")

    @classmethod
    def zero(cls):
        return cls(a=0.0, b=1.0)

    @property
    def is_zero(self) -> bool:
        return self.a == 0.0

    def values(self, times: np.ndarray) -> np.ndarray:
        return self.a * _pow(times, self.b)

    def describe(self) -> str:
        return f"m={self.a!r}*t^{self.b!r}"


_ANCHORED = (Base.SUP_DRIFT_MINUS_ANCHOR,)
_DRIFTED = (Base.SUP_PLUS_DRIFT, Base.SUP_DRIFT_MINUS_ANCHOR)


@dataclass(frozen=True)
class FunctionalDescriptor:
    """One scalar functional of a path; see module docstring for semantics."""

    base: Base = Base.SUP
    drift: Optional[DriftSpec] = None
    anchor_index: Optional[int] = None  # column into the origin-inclusive path
    floor_c: Optional[float] = None
    transform: Transform = Transform.identity()
    exclude_origin: bool = False

    def __post_init__(self):
        if self.base in _DRIFTED and self.drift is None:
            object.__setattr__(self, "drift", DriftSpec.zero())
        if self.drift is not None and self.base not in _DRIFTED:
            raise DomainError(f"base {self.base.value} does not take a drift")
        if self.base in _ANCHORED:
            if self.anchor_index is None:
                raise DomainError("anchored base needs anchor_index")
            if self.exclude_origin:
                raise DomainError("anchored base requires the origin column")
        elif self.anchor_index is not None:
            raise DomainError(f"base {self.base.value} does not take an anchor")

    def describe(self) -> str:
        parts = [self.base.value]
        if self.drift is not None and not self.drift.is_zero:
            parts.append(self.drift.describe())
        if self.anchor_index is not None:
            parts.append(f"anchor={self.anchor_index}")
        if self.floor_c is not None:
            parts.append(f"floor={self.floor_c!r}")
        t = self.transform.describe()
        if t:
            parts.append(t)
        if self.exclude_origin:
            parts.append("no0")
        return ",".join(parts)


@dataclass(frozen=True)
class PathStats:
    """The four undrifted base reductions of a single path."""

    sup: float
    inf: float
    sup_abs: float
    sup_increment: float


def path_functionals(values: np.ndarray) -> PathStats:
    """Base reductions of one origin-inclusive path."""
    v = np.asarray(values, dtype=float)
    if v.ndim != 1 or v.size == 0:
        raise DomainError("path must be a non-empty 1-D array")
    hi = float(v.max())
    lo = float(v.min())
    return PathStats(sup=hi, inf=lo, sup_abs=max(hi, -lo), sup_increment=hi - lo)


def _chunked_reduce(arr: np.ndarray, drift_row: Optional[np.ndarray], which: str) -> np.ndarray:
    out = np.empty(arr.shape[0])
    for r in range(0, arr.shape[0], _ROW_CHUNK):
        block = arr[r : r + _ROW_CHUNK]
        if drift_row is not None:
            block = block + drift_row
        out[r : r + block.shape[0]] = block.max(axis=1) if which == "max" else block.min(axis=1)
    return out


def _functional_matrix(
    values: np.ndarray, times_with_origin: np.ndarray, f: FunctionalDescriptor, cache=None
) -> np.ndarray:
    """Functional values for each row of an origin-inclusive path matrix."""
    if cache is None:
        cache = {}
    excl = f.exclude_origin
    cols = values[:, 1:] if excl else values

    def cached(key, fn):
        if key not in cache:
            cache[key] = fn()
        return cache[key]

    if f.base is Base.SUP:
        vals = cached(("sup", excl), lambda: _chunked_reduce(cols, None, "max"))
    elif f.base is Base.SUP_ABS:
        hi = cached(("sup", excl), lambda: _chunked_reduce(cols, None, "max"))
        lo = cached(("min", excl), lambda: _chunked_reduce(cols, None, "min"))
        vals = np.maximum(hi, -lo)
    elif f.base is Base.SUP_INCREMENT:
        hi = cached(("sup", excl), lambda: _chunked_reduce(cols, None, "max"))
        lo = cached(("min", excl), lambda: _chunked_reduce(cols, None, "min"))
        vals = hi - lo
    else:
        d = f.drift
        times = times_with_origin[1:] if excl else times_with_origin
        if d.is_zero:  # zero drift degenerates to the plain sup reduction
            key, drift_row = ("sup", excl), None
        else:
            key, drift_row = ("dsup", d.a, d.b, excl), d.values(times)
        vals = cached(key, lambda: _chunked_reduce(cols, drift_row, "max"))
        if f.base is Base.SUP_DRIFT_MINUS_ANCHOR:
            if not (0 <= f.anchor_index < values.shape[1]):
                raise DomainError(
                    f"anchor_index {f.anchor_index} outside path columns "
                    f"[0, {values.shape[1]})"
                )
            vals = vals - values[:, f.anchor_index]

    if f.floor_c is not None:
        vals = np.maximum(vals, f.floor_c)

    tr = f.transform
    if tr.kind is TransformKind.IDENTITY:
        return vals  # may alias the cache; callers treat results as read-only
    if tr.kind is TransformKind.MOMENT:
        if float(vals.min()) < 0.0:
            raise DomainError(
                f"moment transform needs nonnegative values; min is {float(vals.min()):.6g}"
            )
        return _pow(vals, tr.param)
    if tr.kind is TransformKind.EXP:
        with np.errstate(over="ignore"):
            return np.exp(tr.param * vals)
    if tr.kind is TransformKind.HINGE:
        return np.maximum(vals - tr.param, 0.0)
    return np.maximum(vals, tr.param)


def functional_values(batch: PathBatch, f: FunctionalDescriptor) -> np.ndarray:
    """Per-path functional values over a batch; base reductions cached on it."""
    return _functional_matrix(
        batch.values, batch.grid.times_with_origin, f, cache=batch._cache
    )


def apply_functional(times_with_origin, values, f: FunctionalDescriptor) -> float:
    """The functional of one path given as origin-inclusive times and values."""
    v = np.asarray(values, dtype=float)
    t = np.asarray(times_with_origin, dtype=float)
    if v.ndim != 1 or v.shape != t.shape:
        raise DomainError("path times and values must be matching 1-D arrays")
    if t[0] != 0.0 or v[0] != 0.0:
        raise DomainError("paths are origin-inclusive: times[0] == values[0] == 0")
    return float(_functional_matrix(v[None, :], t, f)[0])


@dataclass
class MCEstimate:
    """A Monte Carlo mean with its standard error."""

    mean: float
    stderr: float
    M: int
    functional: str = ""
    process: str = ""
    unreliable: bool = False
    note: str = ""

    @classmethod
    def exact(cls, value: float, note: str = "exact") -> "MCEstimate":
        return cls(mean=float(value), stderr=0.0, M=0, note=note)


def _mean_stderr(vals: np.ndarray) -> tuple:
    m = len(vals)
    mean = math.fsum(vals) / m
    var = math.fsum((vals - mean) ** 2) / (m - 1)
    return mean, math.sqrt(var / m)


def mc_estimate(batch: PathBatch, f: FunctionalDescriptor) -> MCEstimate:
    """Sample mean and standard error of a functional over a batch (M >= 2).

    Non-finite functional values (exponential overflow) mark the estimate
    unreliable instead of silently truncating.
    """
    if batch.M < 2:
        raise DomainError("mc_estimate needs at least 2 paths")
    vals = functional_values(batch, f)
    est = MCEstimate(
        mean=float("nan"),
        stderr=float("nan"),
        M=batch.M,
        functional=f.describe(),
        process=batch.label.describe(),
    )
    if not np.all(np.isfinite(vals)):
        est.mean = float(np.mean(vals))  # propagates inf/nan as-is
        est.unreliable = True
        est.note = "non-finite functional values (overflow)"
        return est
    est.mean, est.stderr = _mean_stderr(vals)
    return est


def tail_curve(batch: PathBatch, levels) -> np.ndarray:
    """Empirical P(sup >= u) with binomial standard errors.

    Returns an array of rows (u, p_hat, stderr), one per level.
    """
    levels = np.atleast_1d(np.asarray(levels, dtype=float))
    sups = np.sort(functional_values(batch, FunctionalDescriptor(base=Base.SUP)))
    m = sups.size
    counts = m - np.searchsorted(sups, levels, side="left")
    p = counts / m
    se = np.sqrt(p * (1.0 - p) / m)
    return np.column_stack([levels, p, se])


def integrated_tail(batch: PathBatch, t: float) -> MCEstimate:
    """E (sup - t)_+ estimated directly from per-path hinge values."""
    f = FunctionalDescriptor(base=Base.SUP, transform=Transform.hinge(t))
    return mc_estimate(batch, f)


def integrated_tail_quadrature(batch: PathBatch, t: float, num: int = 4097) -> float:
    """E (sup - t)_+ as a trapezoid quadrature of the empirical tail curve.

    Cross-checks integrated_tail through the identity
    E (sup - t)_+ = integral_t^inf P(sup >= u) du; agreement is limited by
    the num-point discretization of the tail.
    """
    sups = np.sort(functional_values(batch, FunctionalDescriptor(base=Base.SUP)))
    hi = float(sups[-1])
    if hi <= t:
        return 0.0
    levels = np.linspace(t, hi, num)
    p = (sups.size - np.searchsorted(sups, levels, side="left")) / sups.size
    step = (hi - t) / (num - 1)
    return float(step * (math.fsum(p) - 0.5 * (p[0] + p[-1])))
