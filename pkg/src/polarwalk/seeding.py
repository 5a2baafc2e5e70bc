"""Counter-based seed derivation (splitmix64).

Every random draw in the package is a pure function of a master seed and a
counter, so results never depend on worker count or scheduling.
"""
from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive(master: int, counter: int) -> int:
    """64-bit seed for stream ``counter`` under ``master``."""
    return mix64((master + (counter + 1) * GOLDEN) & MASK64)


def parse_seed(text: str | int) -> int:
    if isinstance(text, int):
        return text & MASK64
    text = text.strip().lower()
    if text.startswith("0x"):
        text = text[2:]
    return int(text, 16) & MASK64 if text else 0


def mix64_vec(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(0xBF58476D1CE4E5B9)
        z ^= z >> np.uint64(27)
        z *= np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
    return z


def derive_vec(master: int, counters: np.ndarray) -> np.ndarray:
    c = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(master & MASK64) + (c + np.uint64(1)) * np.uint64(GOLDEN)
    return mix64_vec(z)


class SplitMix:
    """Sequential stream: state advances by the golden gamma per draw."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next64(self) -> int:
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def bits(self, count: int) -> int:
        out, have = 0, 0
        while have < count:
            out |= self.next64() << have
            have += 64
        return out & ((1 << count) - 1)

    def uniform(self) -> float:
        return (self.next64() >> 11) * (1.0 / (1 << 53))

    def below(self, bound: int) -> int:
        # rejection keeps it exactly uniform
        bits = max(1, (bound - 1).bit_length())
        while True:
            v = self.bits(bits)
            if v < bound:
                return v


def stream(master: int, counter: int) -> SplitMix:
    return SplitMix(derive(master, counter))
