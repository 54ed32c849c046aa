"""Portable splitmix64 generator for seeded initial data.

State advances by a fixed odd constant; each output is a xor-shift-multiply
mix of the state. Doubles take the top 53 bits.
"""

import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
MIX_1 = np.uint64(0xBF58476D1CE4E5B9)
MIX_2 = np.uint64(0x94D049BB133111EB)
MASK_64 = (1 << 64) - 1


class SplitMix64:
    """Deterministic 64-bit generator; same seed, same stream on every platform."""

    def __init__(self, seed: int):
        self._state = np.uint64(int(seed) & MASK_64)

    def next_u64(self) -> int:
        return int(self.next_u64_array(1)[0])

    def next_u64_array(self, count: int) -> np.ndarray:
        """The next ``count`` outputs, in order."""
        steps = np.arange(1, count + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = self._state + steps * GOLDEN_GAMMA
            self._state = z[-1] if count else self._state
            z = (z ^ (z >> np.uint64(30))) * MIX_1
            z = (z ^ (z >> np.uint64(27))) * MIX_2
        return z ^ (z >> np.uint64(31))

    def uniform(self, low: float, high: float, size) -> np.ndarray:
        """Uniform reals in [low, high) with shape ``size``."""
        shape = tuple(np.atleast_1d(size))
        count = int(np.prod(shape))
        unit = (self.next_u64_array(count) >> np.uint64(11)).astype(np.float64) * 2.0**-53
        return np.asarray(low) + (np.asarray(high) - np.asarray(low)) * unit.reshape(shape)
