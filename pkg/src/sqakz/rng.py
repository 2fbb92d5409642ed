"""Counter-based 64-bit random numbers shared by all simulation paths.

SplitMix64 (Steele, Lea, Flood 2014): the state is a counter advanced by a
fixed odd increment and the output is a bijective finalizer of the counter.
That makes streams cheap to split: every replica gets its own well-mixed
seed derived from (master seed, replica index) and is replayable in
isolation.  The numba engine re-implements exactly this arithmetic, so the
reference and fast paths consume identical streams.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 output finalizer (bijective on 64-bit ints)."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def mix_seed(master_seed: int, index: int) -> int:
    """Derive an independent 64-bit stream seed for replica `index`."""
    return mix64((master_seed + _GAMMA * (index + 1)) & _MASK)


def cell_seed(master_seed: int, *coords: int) -> int:
    """Fold integer cell coordinates into a stable per-cell seed."""
    h = master_seed & _MASK
    for c in coords:
        h = mix64(h ^ mix64(c & _MASK))
    return h


class SplitMix64:
    """Sequential SplitMix64 stream; `calls` counts draws for budget checks."""

    __slots__ = ("state", "calls")

    def __init__(self, seed: int):
        # Whiten the raw seed so nearby seeds give unrelated streams.
        self.state = mix64(seed & _MASK)
        self.calls = 0

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        self.calls += 1
        return mix64(self.state)

    def next_double(self) -> float:
        """Uniform in [0, 1) with 53-bit resolution."""
        return (self.next_u64() >> 11) * 2.0**-53

    def next_index(self, n: int) -> int:
        """Uniform integer in [0, n) via 32-bit fixed-point multiply."""
        return ((self.next_u64() >> 32) * n) >> 32
