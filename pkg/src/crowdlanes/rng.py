"""Portable seeded random numbers.

Every stochastic step in the package draws from xoshiro256** seeded through
splitmix64, so that traces are bit-identical across platforms and across the
compiled and pure-Python kernel backends.  Doubles are built from the top 53
bits of a draw; bounded integers are ``floor(u * n)``.
"""

from __future__ import annotations

import numpy as np

_MASK = (1 << 64) - 1


def splitmix64(x: int) -> tuple[int, int]:
    """Advance a splitmix64 state; return ``(new_state, output)``."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return x, z ^ (z >> 31)


def derive_seed(seed: int, *keys: int | str) -> int:
    """Mix integer or string keys into ``seed`` to get an independent stream seed."""
    _, h = splitmix64(seed & _MASK)
    for key in keys:
        if isinstance(key, str):
            for ch in key.encode():
                _, h = splitmix64(h ^ ch)
        else:
            _, h = splitmix64(h ^ (key & _MASK))
    return h


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


class PortableRNG:
    """xoshiro256** generator with a state that kernels can advance in place."""

    def __init__(self, seed: int = 0):
        sm = seed & _MASK
        s = []
        for _ in range(4):
            sm, out = splitmix64(sm)
            s.append(out)
        self._s = s

    @classmethod
    def from_keys(cls, seed: int, *keys: int | str) -> "PortableRNG":
        return cls(derive_seed(seed, *keys))

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & _MASK, 7) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def random(self) -> float:
        """Uniform double in [0, 1)."""
        return (self.next_u64() >> 11) * (1.0 / 9007199254740992.0)

    def below(self, n: int) -> int:
        """Uniform integer in ``range(n)``."""
        return int(self.random() * n)

    def permutation(self, n: int) -> list[int]:
        """Fisher-Yates shuffle of ``range(n)``, swapping from the top down."""
        perm = list(range(n))
        for i in range(n - 1, 0, -1):
            j = self.below(i + 1)
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    # kernels take the raw state as a uint64 array and advance it in place
    def state_array(self) -> np.ndarray:
        return np.array(self._s, dtype=np.uint64)

    def load_state(self, arr) -> None:
        self._s = [int(v) for v in arr]

    @property
    def state(self) -> tuple[int, int, int, int]:
        return tuple(self._s)
