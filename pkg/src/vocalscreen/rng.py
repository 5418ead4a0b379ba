"""Deterministic, platform-independent randomness for splits and folds.

Dataset splitting and fold assignment must be reproducible bit-for-bit
across runs, platforms, and reimplementations, so they avoid library RNGs
and use a fixed, fully specified scheme: a SplitMix64 stream feeding a
Fisher-Yates shuffle with modulo-reduced draws and a descending index.
"""

MASK64 = 0xFFFFFFFFFFFFFFFF


class SplitMix64:
    """SplitMix64 pseudo-random stream over unsigned 64-bit integers."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_uint64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return (z ^ (z >> 31)) & MASK64

    def next_below(self, bound: int) -> int:
        """Draw an integer in [0, bound). Modulo reduction, by definition."""
        if bound <= 0:
            raise ValueError("bound must be positive")
        return self.next_uint64() % bound


def fisher_yates(items: list, stream: SplitMix64) -> list:
    """Return a new list shuffled in place with descending-index Fisher-Yates.

    Consumes exactly ``len(items) - 1`` draws from ``stream`` (zero for
    lists shorter than two), so successive shuffles from one stream are
    well defined.
    """
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = stream.next_below(i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def shuffled(items: list, seed: int) -> list:
    """One-shot shuffle of ``items`` under a fresh SplitMix64 stream."""
    return fisher_yates(items, SplitMix64(seed))


def round_half_up(x: float) -> int:
    """Round to nearest integer with ties going up (0.5 -> 1)."""
    import math

    return int(math.floor(x + 0.5))
