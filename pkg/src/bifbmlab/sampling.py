"""Exact Gaussian path sampling.

Two exact samplers:

* ``sample_paths`` draws from any Gram matrix via its Cholesky factor
  (general grids, any kernel, O(n^2) per path after an O(n^3) factorization).
* ``sample_fbm_circulant`` draws fBm on uniform grids by circulant embedding
  of the increment autocovariance (Davies-Harte), O(n log n) per path, with
  a documented Cholesky fallback when the embedding is not nonnegative.

Both consume streams from :mod:`.streams` in fixed chunks of
``CHUNK_PATHS`` paths, so path counts never shift the randomness of other
chunks and results are independent of threading and platform.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, FactorizationFailed
from .grids import TimeGrid
from .kernels import GramMatrix, KernelParams, ProcessKind, _pow, gram_matrix
from .streams import StreamSeed, derive_stream

# Paths per stream chunk. Fixed by the reproducibility contract; do not tune.
CHUNK_PATHS = 4096


@dataclass(frozen=True)
class ProcessLabel:
    """What a batch of paths is distributed as (for reports and file headers)."""

    kind: str  # "bifbm" or "fbm_scaled"
    H: float = float("nan")
    K: float = float("nan")
    hk: float = float("nan")
    scale: float = 1.0

    @classmethod
    def bifbm(cls, params: KernelParams) -> "ProcessLabel":
        return cls(kind="bifbm", H=params.H, K=params.K, hk=params.hk, scale=1.0)

    @classmethod
    def fbm_scaled(cls, hk: float, scale: float) -> "ProcessLabel":
        return cls(kind="fbm_scaled", hk=hk, scale=scale)

    def describe(self) -> str:
        if self.kind == "bifbm":
            return f"bifbm(H={self.H!r},K={self.K!r})"
        return f"fbm(hk={self.hk!r})*{self.scale!r}"


@dataclass
class SeedInfo:
    """How a batch was generated; enough to reproduce it exactly."""

    master: int
    base_index: int
    n_chunks: int
    method: str  # "cholesky" or "circulant"
    fallback: bool = False
    jitter: float = 0.0


@dataclass
class PathBatch:
    """M sampled paths on a grid, with the origin as an explicit zero column.

    values has shape (M, n + 1); column 0 is identically zero and column
    j >= 1 is the path at grid.times[j - 1].
    """

    grid: TimeGrid
    values: np.ndarray
    label: ProcessLabel
    seed_info: SeedInfo
    _cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.values.ndim != 2 or self.values.shape[1] != self.grid.n + 1:
            raise DomainError(
                f"values must have shape (M, {self.grid.n + 1}), got {self.values.shape}"
            )

    @property
    def M(self) -> int:
        return int(self.values.shape[0])


@dataclass
class LowerFactor:
    """Lower-triangular Cholesky factor of a (possibly jittered) Gram matrix."""

    grid: TimeGrid
    L: np.ndarray
    label: ProcessLabel
    jitter: float = 0.0


def cholesky_factor(gram: GramMatrix, jitter: float = 0.0) -> LowerFactor:
    """Lower Cholesky factor, escalating diagonal jitter on failure.

    Attempts the factorization with the given jitter; on failure retries at
    1e-12 * max(diagonal), then twice more at 10x each (three escalations),
    then raises FactorizationFailed. The successful jitter is recorded.
    The reconstruction L @ L.T is verified against the jittered matrix to
    1e-8 * max|A| as a guard against silent numerical corruption.
    """
    a = gram.values
    n = a.shape[0]
    max_diag = float(np.max(np.diag(a)))
    ladder = [jitter, 1e-12 * max_diag, 1e-11 * max_diag, 1e-10 * max_diag]
    seen = []
    last_err: Optional[Exception] = None
    for j in ladder:
        if j in seen:
            continue
        seen.append(j)
        target = a if j == 0.0 else a + j * np.eye(n)
        try:
            L = np.linalg.cholesky(target)
        except np.linalg.LinAlgError as err:
            last_err = err
            continue
        resid = float(np.max(np.abs(L @ L.T - target)))
        if resid > 1e-8 * float(np.max(np.abs(a))):
            raise FactorizationFailed(
                f"Cholesky reconstruction residual {resid:.3e} exceeds tolerance"
            )
        grid = TimeGrid(T=float(gram.times[-1]), times=gram.times)
        if gram.params.kind is ProcessKind.BIFBM:
            label = ProcessLabel.bifbm(gram.params)
        else:
            label = ProcessLabel.fbm_scaled(hk=gram.params.hk, scale=1.0)
        return LowerFactor(grid=grid, L=L, label=label, jitter=j)
    raise FactorizationFailed(
        f"Cholesky failed after jitter escalation up to {ladder[-1]:.3e} "
        f"(n={n}, H={gram.params.H}, K={gram.params.K}): {last_err}"
    )


def _chunk_sizes(M: int) -> list:
    sizes = [CHUNK_PATHS] * (M // CHUNK_PATHS)
    if M % CHUNK_PATHS:
        sizes.append(M % CHUNK_PATHS)
    return sizes


def sample_paths(factor: LowerFactor, M: int, seed: StreamSeed) -> PathBatch:
    """M exact Gaussian paths with covariance L @ L.T, plus the zero origin column.

    Chunk c of 4096 paths uses stream (seed.master, seed.batch_index + c);
    the k-th path of a chunk is L @ z_k for that chunk's k-th row of normals.
    """
    if M < 1:
        raise DomainError(f"need M >= 1 paths, got {M}")
    n = factor.grid.n
    out = np.empty((M, n + 1))
    out[:, 0] = 0.0
    row = 0
    sizes = _chunk_sizes(M)
    for c, size in enumerate(sizes):
        stream = derive_stream(seed.master, seed.batch_index + c)
        z = stream.normals((size, n))
        out[row : row + size, 1:] = z @ factor.L.T
        row += size
    info = SeedInfo(
        master=seed.master,
        base_index=seed.batch_index,
        n_chunks=len(sizes),
        method="cholesky",
        jitter=factor.jitter,
    )
    return PathBatch(grid=factor.grid, values=out, label=factor.label, seed_info=info)


def embedding_eigenvalues(hk: float, n: int, T: float) -> np.ndarray:
    """Eigenvalues of the circulant embedding of the fGn autocovariance.

    The autocovariance of unit-step fGn with Hurst hk at lag k is

        gamma(k) = (|k+1|^{2hk} - 2|k|^{2hk} + |k-1|^{2hk}) / 2

    scaled by (T/n)^{2hk} for step T/n. The first row of the 2n x 2n
    circulant is [gamma_0 .. gamma_{n-1}, gamma_n, gamma_{n-1} .. gamma_1];
    its eigenvalues are the real part of its FFT.
    """
    if not (0.0 < hk < 1.0):
        raise DomainError(f"need 0 < hk < 1, got {hk}")
    k = np.arange(n + 1, dtype=float)
    a = 2.0 * hk
    gamma = 0.5 * _pow(T / n, a) * (_pow(k + 1, a) - 2.0 * _pow(k, a) + _pow(np.abs(k - 1), a))
    first_row = np.concatenate([gamma[:n], gamma[n:], gamma[n - 1 : 0 : -1]])
    return np.fft.fft(first_row).real


def sample_fbm_circulant(
    hk: float, n: int, T: float, M: int, seed: StreamSeed, scale: float = 1.0
) -> PathBatch:
    """M paths of scale * fBm(hk) on the uniform n-point grid over (0, T].

    Draws exact fGn by circulant embedding: chunk streams supply 2n normals
    per path, laid out as U_0..U_n then V_1..V_{n-1}; frequency k of the
    embedding gets coefficient sqrt(e_k / m) * U_k at k in {0, n} and
    sqrt(e_k / (2m)) * (U_k + i V_k) at 0 < k < n (conjugate-mirrored),
    with m = 2n. Increments are the first n entries of the inverse pass,
    and paths are their cumulative sums.

    If the embedding has a materially negative eigenvalue
    (min e < -1e-10 * max e) the sampler falls back to Cholesky on the fBm
    Gram matrix with the same streams; seed_info.fallback records this.
    Tiny negative eigenvalues are clipped to zero.
    """
    if M < 1:
        raise DomainError(f"need M >= 1 paths, got {M}")
    if not (scale > 0.0 and np.isfinite(scale)):
        raise DomainError(f"scale must be positive and finite, got {scale}")
    grid = TimeGrid.uniform(n, T)
    label = ProcessLabel.fbm_scaled(hk=hk, scale=scale)

    e = embedding_eigenvalues(hk, n, T)
    if float(e.min()) < -1e-10 * float(e.max()):
        factor = cholesky_factor(gram_matrix(grid, KernelParams.fbm(hk)))
        batch = sample_paths(factor, M, seed)
        if scale != 1.0:
            batch.values *= scale
        batch.label = label
        batch.seed_info.fallback = True
        return batch

    m = 2 * n
    coeff = np.sqrt(np.maximum(e, 0.0) / (2.0 * m))
    coeff[0] = np.sqrt(max(e[0], 0.0) / m)
    coeff[n] = np.sqrt(max(e[n], 0.0) / m)

    out = np.empty((M, n + 1))
    out[:, 0] = 0.0
    row = 0
    sizes = _chunk_sizes(M)
    for c, size in enumerate(sizes):
        stream = derive_stream(seed.master, seed.batch_index + c)
        z = stream.normals((size, m))
        u, v = z[:, : n + 1], z[:, n + 1 :]
        w = np.zeros((size, m), dtype=complex)
        w[:, 0] = coeff[0] * u[:, 0]
        w[:, n] = coeff[n] * u[:, n]
        w[:, 1:n] = coeff[1:n] * (u[:, 1:n] + 1j * v)
        w[:, n + 1 :] = np.conj(w[:, n - 1 : 0 : -1])
        fgn = np.fft.fft(w, axis=1).real[:, :n]
        np.cumsum(fgn, axis=1, out=out[row : row + size, 1:])
        row += size
    if scale != 1.0:
        out[:, 1:] *= scale
    info = SeedInfo(
        master=seed.master,
        base_index=seed.batch_index,
        n_chunks=len(sizes),
        method="circulant",
    )
    return PathBatch(grid=grid, values=out, label=label, seed_info=info)
