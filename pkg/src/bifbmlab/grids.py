"""Time grids on (0, T].

The origin t = 0 is deliberately excluded from every grid: all the processes
handled here start at 0 almost surely, so including it would make covariance
matrices singular. Samplers re-attach a deterministic zero column.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True, eq=False)
class TimeGrid:
    """Strictly increasing sample times in (0, T], with times[-1] == T."""

    T: float
    times: np.ndarray = field(repr=False)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        object.__setattr__(self, "times", t)
        if not (np.isfinite(self.T) and self.T > 0):
            raise DomainError(f"horizon T must be positive and finite, got {self.T}")
        if t.ndim != 1 or t.size == 0:
            raise DomainError("times must be a non-empty 1-D array")
        if not np.all(np.isfinite(t)):
            raise DomainError("times must be finite")
        if t[0] <= 0.0:
            raise DomainError("times must be strictly positive; the origin is implicit")
        if t.size > 1 and not np.all(np.diff(t) > 0.0):
            raise DomainError("times must be strictly increasing")
        if t[-1] != self.T:
            raise DomainError(f"last time {t[-1]!r} must equal the horizon T={self.T!r}")

    @classmethod
    def uniform(cls, n: int, T: float = 1.0) -> "TimeGrid":
        """n equispaced times T/n, 2T/n, ..., T."""
        if n < 1:
            raise DomainError(f"need n >= 1 grid points, got {n}")
        times = np.arange(1, n + 1, dtype=float) * (float(T) / n)
        times[-1] = float(T)  # guard against rounding in n*(T/n)
        return cls(T=float(T), times=times)

    @property
    def n(self) -> int:
        return int(self.times.size)

    @property
    def times_with_origin(self) -> np.ndarray:
        """Grid times prefixed with t = 0 (length n + 1)."""
        out = np.empty(self.n + 1)
        out[0] = 0.0
        out[1:] = self.times
        return out

    @property
    def is_uniform(self) -> bool:
        d = np.diff(self.times_with_origin)
        step = self.T / self.n
        return bool(np.allclose(d, step, rtol=1e-12, atol=0.0))

    def scaled(self, a: float) -> "TimeGrid":
        """The grid {a*t : t in times} on (0, a*T]. Used for self-similarity checks."""
        if not (a > 0 and np.isfinite(a)):
            raise DomainError(f"scale factor must be positive and finite, got {a}")
        return TimeGrid(T=self.T * a, times=self.times * a)

    def coarsened(self, step: int) -> "TimeGrid":
        """Every step-th time, keeping T. step must divide n."""
        if step < 1 or self.n % step != 0:
            raise DomainError(f"step {step} must divide n={self.n}")
        return TimeGrid(T=self.T, times=self.times[step - 1 :: step])
