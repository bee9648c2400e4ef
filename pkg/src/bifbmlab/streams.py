"""Deterministic, collision-free random streams.

Reproducibility contract
------------------------
Every batch of paths anywhere in the package is drawn from a Philox
counter-based generator keyed by a 128-bit key derived as

    key = (mix64(master + C0), mix64(batch_index + C1))

where mix64 is the splitmix64 output finalizer (a bijection on uint64).
Because each key half is a bijective image of its input, the map
(master, batch_index) -> key is injective: distinct (master, batch_index)
pairs can never collide. Streams therefore depend only on these two
integers, never on thread scheduling, chunk iteration order, or platform.

Normal variates are produced by inverse-CDF transform of 53-bit uniforms
built from Philox raw output:

    u = ((raw >> 11) + 0.5) * 2**-53      (u in (0, 1), symmetric)
    z = ndtri(u)

scipy's ndtri is a deterministic rational approximation, so the same
(master, batch_index) yields bit-identical normals on every platform.

Named tasks derive their master by folding a text label into a base seed
with keyed BLAKE2b (fold_label), so adding a new named task never perturbs
the streams of existing ones.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .errors import DomainError

_MASK64 = (1 << 64) - 1
# splitmix64 increment and two distinct offsets separating the key halves.
_C0 = 0x9E3779B97F4A7C15
_C1 = 0xD1B54A32D192ED03


def _mix64(x: int) -> int:
    """splitmix64 output finalizer; bijective on uint64."""
    x &= _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


@dataclass(frozen=True)
class StreamSeed:
    """Identity of one random stream: a master seed plus a batch index."""

    master: int
    batch_index: int

    def __post_init__(self):
        for name in ("master", "batch_index"):
            v = getattr(self, name)
            if not isinstance(v, int) or not (0 <= v <= _MASK64):
                raise DomainError(f"{name} must be an integer in [0, 2^64), got {v!r}")

    @property
    def key(self) -> tuple:
        return (_mix64(self.master + _C0), _mix64(self.batch_index + _C1))

    def _bit_generator(self) -> np.random.Philox:
        return np.random.Philox(key=np.array(self.key, dtype=np.uint64))

    def uniforms(self, count: int) -> np.ndarray:
        """count doubles in the open interval (0, 1)."""
        raw = self._bit_generator().random_raw(count)
        return ((raw >> np.uint64(11)) + 0.5) * 2.0**-53

    def normals(self, shape) -> np.ndarray:
        """Standard normals via inverse CDF; deterministic across platforms."""
        count = int(np.prod(shape))
        return ndtri(self.uniforms(count)).reshape(shape)


def derive_stream(master: int, batch_index: int) -> StreamSeed:
    """The stream for one batch of one task. Injective in (master, batch_index)."""
    return StreamSeed(master=master, batch_index=batch_index)


def fold_label(seed: int, label: str) -> int:
    """Fold a task label into a base seed, yielding a 64-bit task master.

    Keyed BLAKE2b keeps distinct labels (and distinct base seeds) on
    independent streams without any registry of offsets.
    """
    if not isinstance(seed, int) or not (0 <= seed <= _MASK64):
        raise DomainError(f"seed must be an integer in [0, 2^64), got {seed!r}")
    h = hashlib.blake2b(
        label.encode("utf-8"), digest_size=8, key=seed.to_bytes(8, "little")
    )
    return int.from_bytes(h.digest(), "little")
