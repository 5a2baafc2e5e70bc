"""Pure numpy walk kernels; reference behaviour for the compiled extension."""
from __future__ import annotations

import numpy as np

from .seeding import GOLDEN, derive_vec, mix64_vec

BLOCK = 1 << 16


def gen_masks(gen, seeds: np.ndarray) -> np.ndarray:
    return gen.sample_masks(np.asarray(seeds, dtype=np.uint64))


def _run(gen, c: float, T: int, n: int, step_seeds, count: int):
    """Walk ``count`` paths; ``step_seeds(t)`` gives the step-t seeds (uint64)."""
    pos = np.zeros((count, n), dtype=np.float64)
    up = np.float64(c)
    violations = 0
    for t in range(T):
        masks = gen.sample_masks(step_seeds(t))
        bits = (masks[:, None] >> np.arange(n)) & 1
        y = np.where(bits == 1, -up, up)
        pos = pos + (1.0 - np.abs(pos)) * y
        violations += int(np.count_nonzero(np.abs(pos) > 1.0))
    out = ((pos < 0).astype(np.int64) << np.arange(n)).sum(axis=1)
    resid = np.zeros(count, dtype=np.float64)
    for i in range(n):
        resid = resid + (1.0 - np.abs(pos[:, i]))
    return out, resid, violations


def walk_mc(gen, c: float, T: int, seed_len: int, master: int, start: int, count: int):
    """Monte Carlo paths ``start .. start+count-1``; path j uses the splitmix stream of (master, j)."""
    n = gen.n
    mask = np.uint64((1 << seed_len) - 1) if seed_len < 64 else np.uint64(2 ** 64 - 1)
    outs, resids, viol = [], [], 0
    for lo in range(start, start + count, BLOCK):
        hi = min(lo + BLOCK, start + count)
        s0 = derive_vec(master, np.arange(lo, hi))

        def step_seeds(t, s0=s0):
            with np.errstate(over="ignore"):
                s = s0 + np.uint64(((t + 1) * GOLDEN) & (2 ** 64 - 1))
            return mix64_vec(s) & mask

        o, r, v = _run(gen, c, T, n, step_seeds, hi - lo)
        outs.append(o)
        resids.append(r)
        viol += v
    return np.concatenate(outs), np.concatenate(resids), viol


def walk_exact(gen, c: float, T: int, seed_len: int):
    """Every composed seed u: step t consumes bits [t*seed_len, (t+1)*seed_len) of u."""
    n = gen.n
    total = 1 << (T * seed_len)
    u = np.arange(total, dtype=np.uint64)
    mask = np.uint64((1 << seed_len) - 1)

    def step_seeds(t):
        return (u >> np.uint64(t * seed_len)) & mask

    return _run(gen, c, T, n, step_seeds, total)
