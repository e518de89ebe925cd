"""Deterministic 64-bit random numbers for instance generation and seed mixing.

The generator is SplitMix64: the state advances by the golden-ratio increment
and each output is a xor-shift-multiply scramble of the new state.  A 20-line
generator beats a library one here because reproducibility is part of the
contract: the same seed must give bit-identical streams on every platform and
under every library version, which numpy's Generator API does not promise for
its distribution methods.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _scramble(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return (z ^ (z >> 31)) & MASK64


class SplitMix64:
    """Seedable stream of 64-bit words and unit-interval doubles."""

    def __init__(self, seed: int):
        self._state = seed & MASK64

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & MASK64
        return _scramble(self._state)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        # 53 high bits give the usual dyadic rational in [0, 1).
        u = (self.next_u64() >> 11) * 2.0**-53
        return lo + (hi - lo) * u


def mix64(*values: int) -> int:
    """Hash an ordered tuple of integers into a single 64-bit seed.

    Used to derive independent per-realization seeds from (base seed,
    grid index, realization index) without any sequential coupling.
    """
    acc = 0
    for v in values:
        acc = _scramble((acc + _GOLDEN + (v & MASK64)) & MASK64)
    return acc
