"""Deterministic keyed random streams built on SplitMix64.

Every random draw in this package comes from a Stream keyed by a 64-bit
seed plus a path of small integers (substream id, step index, trial id...).
A stream's output depends only on its key, never on what other streams have
done, so any single step of any experiment can be regenerated in isolation.
That property is what makes re-evolved perturbations and per-trial replay
cheap and exactly reproducible across platforms.

SplitMix64 is the fixed-increment mixing generator of Steele, Lea and Flood
(the one used to seed the xoshiro family). It is not cryptographic; it only
drives map sampling, which is fine because all security-relevant mixing
happens in the hash stage.
"""

from __future__ import annotations

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# Map one uniform double into [0, 1) from the top 53 bits of a u64.
_INV53 = 2.0 ** -53


def mix64(z: int) -> int:
    """SplitMix64 finalizer: bijective avalanche mix of a 64-bit word."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, *path: int) -> int:
    """Collapse a seed and a path of integers into one 64-bit stream key.

    Each path element is spread across the word by a golden-ratio multiply
    before being folded in, so nearby ids (step 41 vs 42) land in unrelated
    states. Distinct paths give independent streams for all practical
    purposes.
    """
    key = seed & _MASK64
    for part in path:
        key = mix64(key ^ ((part * _GOLDEN) & _MASK64))
    return key


class Stream:
    """A forward-only random stream identified by (seed, *path)."""

    __slots__ = ("_state",)

    def __init__(self, seed: int, *path: int) -> None:
        self._state = stream_key(seed, *path)

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float, hi: float) -> float:
        """Uniform double in [lo, hi), from the top 53 bits of one u64."""
        self._state = (self._state + _GOLDEN) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * _MIX_A) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX_B) & _MASK64
        u = ((z ^ (z >> 31)) >> 11) * _INV53
        return lo + (hi - lo) * u

    def below(self, n: int) -> int:
        """Integer in [0, n). Modulo bias is < n / 2**64, irrelevant here."""
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u64() % n
