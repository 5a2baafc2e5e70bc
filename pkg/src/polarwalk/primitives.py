"""Seeded generators: t-wise independent and small-bias sign distributions.

Outputs are handled as bitmasks over the truth-table index convention (bit
``i`` set means output coordinate ``i+1`` is -1), so a batch of outputs is a
``uint64``/``int64`` array and histograms feed straight into a WHT.
"""
from __future__ import annotations

import math

import numpy as np

from .boolean import fwht, popcounts
from .config import ResourceError, check_n, check_seed_bits
from .gf2m import field
from .report import ExperimentReport
from .seeding import derive_vec

MAX_PRIMITIVE_SEED_BITS = 64
SMALLBIAS_MAX_M = 32


class SeededGenerator:
    """Deterministic map from ``seed_len``-bit seeds to +-1 vectors."""

    def __init__(self, n: int, seed_len: int, kind: str, params: dict | None = None):
        if seed_len > MAX_PRIMITIVE_SEED_BITS:
            raise ResourceError(f"primitive seed length {seed_len} exceeds 64 bits")
        if n > 64:
            raise ResourceError("outputs are packed into 64-bit masks; n <= 64")
        self.n = n
        self.seed_len = seed_len
        self.kind = kind
        self.params = dict(params or {})

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n}, seed_len={self.seed_len}, kind={self.kind!r})"

    def _masks(self, seeds: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def sample_masks(self, seeds) -> np.ndarray:
        """Output bitmasks for an array of seeds (int64)."""
        s = np.asarray(seeds, dtype=np.uint64)
        if self.seed_len < 64:
            if np.any(s >> np.uint64(self.seed_len)):
                raise ValueError(f"seed exceeds {self.seed_len} bits")
        return self._masks(s.astype(np.int64) if self.seed_len < 64 else s).astype(np.int64)

    def sample(self, seed: int) -> np.ndarray:
        mask = int(self.sample_masks(np.array([seed], dtype=np.uint64))[0])
        return np.array([-1 if mask >> i & 1 else 1 for i in range(self.n)], dtype=np.int8)

    def all_masks(self) -> np.ndarray:
        """Outputs for every seed, in seed order (exact mode)."""
        check_seed_bits(self.seed_len)
        return self.sample_masks(np.arange(1 << self.seed_len, dtype=np.uint64))

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n, "seed_len": self.seed_len, **self.params}


class ConstantGenerator(SeededGenerator):
    def __init__(self, n: int, value_mask: int = 0):
        super().__init__(n, 0, "constant", {"value_mask": value_mask})
        self.value_mask = value_mask

    def _masks(self, seeds):
        return np.full(seeds.shape, self.value_mask, dtype=np.int64)


class UniformGenerator(SeededGenerator):
    """The seed is the output: n truly random bits."""

    def __init__(self, n: int):
        super().__init__(n, n, "uniform")

    def _masks(self, seeds):
        return seeds.astype(np.int64)


class KWiseGenerator(SeededGenerator):
    """Evaluations of a random degree-(t-1) polynomial over GF(2^m) at 0..n-1.

    Coordinate ``i`` is -1 when the low bit of the value at point ``i`` is set.
    The seed packs the t coefficients, ``m`` bits each, lowest degree first.
    """

    def __init__(self, n: int, t: int):
        if t < 0:
            raise ValueError("t must be >= 0")
        if n < 1:
            raise ValueError("n must be >= 1")
        m = max(1, math.ceil(math.log2(n)))
        super().__init__(n, t * m, "kwise", {"t": t, "m": m})
        self.t = t
        self.m = m
        self.field = field(m)

    def coefficients(self, seeds: np.ndarray) -> list:
        mask = self.field.mask
        return [(seeds >> (j * self.m)) & mask for j in range(self.t)]

    def _masks(self, seeds):
        seeds = seeds.astype(np.int64)
        coefs = self.coefficients(seeds)
        out = np.zeros(seeds.shape, dtype=np.int64)
        for e in range(self.n):
            v = np.zeros(seeds.shape, dtype=np.int64)
            for a in reversed(coefs):
                v = self.field.mul_vec(v, e) ^ a
            out |= (v & 1) << e
        return out


class SmallBiasGenerator(SeededGenerator):
    """Powering construction: bit i is <x^i, y> over GF(2^m), i = 1..n.

    Every nonempty parity has bias at most n / 2^m.  The seed is ``x`` in the
    low ``m`` bits and ``y`` in the next ``m``.
    """

    def __init__(self, n: int, m: int):
        if not 1 <= m <= SMALLBIAS_MAX_M:
            raise ResourceError(f"small-bias field degree {m} outside [1, {SMALLBIAS_MAX_M}]")
        super().__init__(n, 2 * m, "smallbias", {"m": m, "bias_bound": n / 2 ** m})
        self.m = m
        self.field = field(m)

    @property
    def bias_bound(self) -> float:
        return self.n / 2 ** self.m

    def _masks(self, seeds):
        seeds = seeds.astype(np.int64)
        mask = self.field.mask
        x = seeds & mask
        y = (seeds >> self.m) & mask
        out = np.zeros(seeds.shape, dtype=np.int64)
        p = x.copy()
        for i in range(self.n):
            bit = _parity64(p & y)
            out |= bit << i
            p = self.field.mul_vec(p, x)
        return out


def _parity64(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64)
    for sh in (32, 16, 8, 4, 2, 1):
        v ^= v >> np.uint64(sh)
    return (v & np.uint64(1)).astype(np.int64)


def kwise_generator(n: int, t: int) -> KWiseGenerator:
    if t > n:
        raise ValueError(f"t={t} exceeds n={n}")
    return KWiseGenerator(n, t)


def smallbias_generator(n: int, delta: float) -> SeededGenerator:
    """Bias <= delta on every nonempty parity; delta >= 1 gives the t=1 construction."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if delta >= 1:
        return KWiseGenerator(n, 1)
    m = max(1, math.ceil(math.log2(n / delta)))
    if m > SMALLBIAS_MAX_M:
        raise ResourceError(f"delta={delta:g} needs a field of degree {m} > {SMALLBIAS_MAX_M}")
    return SmallBiasGenerator(n, m)


def constant_generator(n: int, value_mask: int = 0) -> ConstantGenerator:
    return ConstantGenerator(n, value_mask)


def uniform_generator(n: int) -> UniformGenerator:
    return UniformGenerator(n)


def output_histogram(masks: np.ndarray, n: int) -> np.ndarray:
    return np.bincount(np.asarray(masks, dtype=np.int64), minlength=1 << n)


def parity_sums(hist: np.ndarray) -> np.ndarray:
    """``sum_x hist[x] * x^S`` for every S (exact integers for integer histograms)."""
    return fwht(np.asarray(hist, dtype=np.int64))


def bias_audit(gen: SeededGenerator, max_set_size: int | None = None, mode: str = "exact",
               samples: int = 1 << 16, seed: int = 0) -> ExperimentReport:
    """Largest |E[X^S]| over 1 <= |S| <= max_set_size, with a witness S."""
    n = gen.n
    check_n(n)
    max_set_size = n if max_set_size is None else max_set_size
    if mode == "exact":
        masks = gen.all_masks()
        total = 1 << gen.seed_len
    elif mode == "sampled":
        seeds = derive_vec(seed, np.arange(samples))
        if gen.seed_len < 64:
            seeds &= np.uint64((1 << gen.seed_len) - 1)
        masks = gen.sample_masks(seeds)
        total = samples
    else:
        raise ValueError(f"unknown mode {mode!r}")
    sums = parity_sums(output_histogram(masks, n))
    pc = popcounts(n)
    sel = (pc >= 1) & (pc <= max_set_size)
    if not sel.any():
        raise ValueError("no sets in the requested size range")
    cand = np.where(sel, np.abs(sums), -1)
    s = int(np.argmax(cand))
    bias = float(abs(int(sums[s]))) / total
    q = {"max_bias": bias, "witness_mask": s,
         "witness_set": [i + 1 for i in range(n) if s >> i & 1],
         "seeds": total}
    notes = []
    if mode == "sampled":
        q["radius_3sigma"] = 3.0 / math.sqrt(total)
        notes.append("sampled: max_bias is an estimate with the stated 3-sigma radius per parity")
    if isinstance(gen, SmallBiasGenerator):
        q["bias_bound"] = gen.bias_bound
        notes.append("powering construction: seed length O(log n + log(1/delta)), "
                     "not the O(log log n + log k + log(1/eps)) of the optimal almost-k-wise spaces")
    return ExperimentReport("bias_audit", "diagnostic", quantities=q,
                            params={"generator": gen.describe(), "max_set_size": max_set_size},
                            mode=mode, notes=notes)
