"""Covariance kernels for fractional and bifractional Brownian motion.

Both processes are centered Gaussian, started at zero, on times s, t >= 0:

    fBm, Hurst H in (0, 1):
        R_H(s, t) = (t^{2H} + s^{2H} - |t - s|^{2H}) / 2

    bifBm, H in (0, 1), K in (0, 2), (H*K < 1 when K > 1):
        C_{H,K}(s, t) = 2^{-K} [ (t^{2H} + s^{2H})^K - |t - s|^{2HK} ]

K = 1 reduces bifBm to fBm with the same H. The variance along the diagonal
is C(t, t) = t^{2HK}, so the process is self-similar with index H*K, and the
increment variance is pinched between constant multiples of |t - s|^{2HK}:

    2^{-K} |t - s|^{2HK}  <=  E (W_t - W_s)^2  <=  2^{1-K} |t - s|^{2HK}

(the upper constant fails to dominate for K > 1, which is why the extended
regime K in (1, 2) carries an explicit positive-semidefiniteness gate).

Powers are evaluated as exp(a * ln x) with an explicit x == 0 -> 0 branch so
grid boundaries produce exact zeros instead of NaNs.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NotPositiveSemidefinite
from .grids import TimeGrid


def _pow(x, a: float):
    """x**a as exp(a*ln x), mapping x == 0 to 0 (for a > 0). x must be >= 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise DomainError("power base must be nonnegative")
    if a == 0.0:
        out = np.ones_like(arr)
    else:
        out = np.zeros_like(arr)
        nz = arr > 0.0
        np.exp(a * np.log(arr, where=nz, out=np.zeros_like(arr)), where=nz, out=out)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


class ProcessKind(enum.Enum):
    FBM = "fbm"
    BIFBM = "bifbm"


@dataclass(frozen=True)
class KernelParams:
    """Kernel parameters (H, K); kind FBM forces K == 1."""

    kind: ProcessKind
    H: float
    K: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.H < 1.0):
            raise DomainError(f"H must lie in (0, 1), got {self.H}")
        if not (0.0 < self.K < 2.0):
            raise DomainError(f"K must lie in (0, 2), got {self.K}")
        if self.kind is ProcessKind.FBM and self.K != 1.0:
            raise DomainError("fBm kernel requires K == 1")
        if self.K > 1.0 and not (self.H * self.K < 1.0):
            raise DomainError(
                f"extended regime requires H*K < 1, got H*K = {self.H * self.K}"
            )

    @property
    def hk(self) -> float:
        """Self-similarity index H*K."""
        return self.H * self.K

    @property
    def extended(self) -> bool:
        """True in the K > 1 regime, where the covariance needs a PSD gate."""
        return self.K > 1.0

    @classmethod
    def fbm(cls, H: float) -> "KernelParams":
        return cls(kind=ProcessKind.FBM, H=H, K=1.0)

    @classmethod
    def bifbm(cls, H: float, K: float) -> "KernelParams":
        return cls(kind=ProcessKind.BIFBM, H=H, K=K)


def fbm_cov(s, t, H: float):
    """fBm covariance R_H(s, t); accepts scalars or broadcastable arrays."""
    if not (0.0 < H < 1.0):
        raise DomainError(f"H must lie in (0, 1), got {H}")
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0.0) or np.any(t < 0.0):
        raise DomainError("times must be nonnegative")
    val = 0.5 * (_pow(t, 2 * H) + _pow(s, 2 * H) - _pow(np.abs(t - s), 2 * H))
    return float(val) if np.ndim(val) == 0 else val


def bifbm_cov(s, t, params: KernelParams):
    """bifBm covariance C_{H,K}(s, t); accepts scalars or broadcastable arrays."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0.0) or np.any(t < 0.0):
        raise DomainError("times must be nonnegative")
    H, K = params.H, params.K
    val = 2.0**-K * (
        _pow(_pow(t, 2 * H) + _pow(s, 2 * H), K) - _pow(np.abs(t - s), 2 * H * K)
    )
    return float(val) if np.ndim(val) == 0 else val


def kernel_cov(s, t, params: KernelParams):
    """Covariance under params, dispatching on kind."""
    if params.kind is ProcessKind.FBM:
        return fbm_cov(s, t, params.H)
    return bifbm_cov(s, t, params)


def increment_variance(s, t, params: KernelParams):
    """E (W_t - W_s)^2 = C(t,t) + C(s,s) - 2 C(s,t); zero iff s == t."""
    v = np.maximum(
        kernel_cov(t, t, params)
        + kernel_cov(s, s, params)
        - 2.0 * kernel_cov(s, t, params),
        0.0,  # clip roundoff, the true value is >= 0
    )
    return float(v) if np.ndim(v) == 0 else v


def increment_bounds(s, t, params: KernelParams):
    """The (lower, upper) pinch on E (W_t - W_s)^2, as a pair.

    lower = 2^{-K} |t - s|^{2HK}, upper = 2 * lower exactly.
    """
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0.0) or np.any(t < 0.0):
        raise DomainError("times must be nonnegative")
    lo = 2.0**-params.K * _pow(np.abs(t - s), 2.0 * params.hk)
    return lo, 2.0 * lo


@dataclass
class GramMatrix:
    """Covariance matrix of a process on a grid (origin excluded)."""

    times: np.ndarray
    values: np.ndarray
    params: KernelParams
    min_eig: Optional[float] = None


def gram_matrix(grid: TimeGrid, params: KernelParams) -> GramMatrix:
    """Kernel Gram matrix on grid.times.

    Exactly symmetric by construction (every term is computed from
    symmetric functions of the pair). In the extended regime K > 1 the
    matrix is PSD-gated before being returned.
    """
    t = grid.times
    gram = GramMatrix(
        times=t,
        values=np.asarray(kernel_cov(t[:, None], t[None, :], params)),
        params=params,
    )
    if params.extended:
        psd_check(gram)
    return gram


def psd_check(gram: GramMatrix, psd_tol: Optional[float] = None) -> float:
    """Smallest eigenvalue of the Gram matrix; stores it on the instance.

    Passes iff min_eig >= -psd_tol where psd_tol defaults to
    1e-8 * max(diagonal); raises NotPositiveSemidefinite otherwise.
    """
    if psd_tol is None:
        psd_tol = 1e-8 * float(np.max(np.diag(gram.values)))
    min_eig = float(np.linalg.eigvalsh(gram.values)[0])
    gram.min_eig = min_eig
    if min_eig < -psd_tol:
        raise NotPositiveSemidefinite(
            f"Gram matrix min eigenvalue {min_eig:.3e} < -{psd_tol:.3e} "
            f"(H={gram.params.H}, K={gram.params.K}, n={gram.times.size})"
        )
    return min_eig


class Comparison(enum.Enum):
    """The two scaled-fBm comparison processes.

    Y1 = 2^{(1-K)/2} * fBm(H*K) dominates the increments from above,
    Y2 = 2^{-K/2}    * fBm(H*K) is dominated from below.
    """

    Y1 = "Y1"
    Y2 = "Y2"


def comparison_scale(K: float, which: Comparison) -> float:
    """Standard-deviation scale applied to fBm(H*K) for a comparison process."""
    if which is Comparison.Y1:
        return 2.0 ** ((1.0 - K) / 2.0)
    return 2.0 ** (-K / 2.0)


def variance_domination(params: KernelParams, which: Comparison, grid: TimeGrid) -> bool:
    """Whether the comparison process dominates/minorizes bifBm pointwise variances.

    Y1: Var W_t <= Var Y1_t at every grid time; Y2: Var Y2_t <= Var W_t.
    Equalities hold exactly at K = 1, so the comparison carries a relative slack.
    """
    t = grid.times
    var_w = _pow(t, 2.0 * params.hk)
    var_y = comparison_scale(params.K, which) ** 2 * var_w
    slack = 1e-12 * np.maximum(var_w, var_y)
    if which is Comparison.Y1:
        return bool(np.all(var_w <= var_y + slack))
    return bool(np.all(var_y <= var_w + slack))
