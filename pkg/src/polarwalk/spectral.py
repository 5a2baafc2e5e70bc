"""Level-k spectral quantities: L_{1,k}, M_k, unsigned level sums, class maxima."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boolean import FourierExpansion, fwht, popcounts, restriction_closure_items
from .config import EXACT_CLOSURE_N, ResourceError, check_n

_ORDER_TOL = 1e-12


class MetricOrderError(AssertionError):
    """M_k exceeded L_{1,k}; only possible through a bug."""


@dataclass(frozen=True)
class LevelMetrics:
    k: int
    l1: float
    mk: float
    unsigned_sum: float
    argmax: int  # sign-vector bitmask attaining mk (bit set = -1)
    mode: str = "exact"

    def __post_init__(self):
        if self.mk > self.l1 + _ORDER_TOL:
            raise MetricOrderError(f"M_{self.k}={self.mk} > L_1,{self.k}={self.l1}")

    @property
    def argmax_hex(self) -> str:
        return format(self.argmax, "x")

    def as_dict(self) -> dict:
        return {"k": self.k, "l1": self.l1, "mk": self.mk,
                "unsigned_sum": self.unsigned_sum, "argmax_hex": self.argmax_hex,
                "mode": self.mode}


def _check_level(fe: FourierExpansion, k: int) -> None:
    if not 0 <= k <= fe.n:
        raise ValueError(f"level {k} outside [0, {fe.n}]")


def l1_level_mass(fe: FourierExpansion, k: int) -> float:
    _check_level(fe, k)
    return float(np.abs(fe.level(k)).sum())


def unsigned_level_sum(fe: FourierExpansion, k: int) -> float:
    _check_level(fe, k)
    return float(fe.level(k).sum())


def level_abs_sum(fe: FourierExpansion, k: int) -> LevelMetrics:
    """Exact M_k by evaluating the level-k part at all 2^n corners."""
    _check_level(fe, k)
    check_n(fe.n)
    vals = np.abs(fwht(fe.level(k)))
    idx = int(np.argmax(vals))
    return LevelMetrics(k, l1_level_mass(fe, k), float(vals[idx]),
                        unsigned_level_sum(fe, k), idx)


def _masked_rows(coeffs: np.ndarray, n: int, k: int, frees: np.ndarray) -> np.ndarray:
    # row F keeps fhat(S) when |S & F| == k
    pc = popcounts(n)
    s = np.arange(1 << n)
    keep = pc[frees[:, None] & s[None, :]] == k
    return np.where(keep, coeffs[None, :], 0.0)


def _partial_fwht(rows: np.ndarray, frees: np.ndarray, n: int) -> np.ndarray:
    """Butterfly row ``r`` only along the bits *not* in ``frees[r]``."""
    a = rows.copy()
    R = a.shape[0]
    h = 1
    for i in range(n):
        fixed = ((frees >> i) & 1) == 0
        v = a.reshape(R, (1 << n) // (2 * h), 2, h)
        lo = v[:, :, 0, :].copy()
        hi = v[:, :, 1, :].copy()
        sel = fixed[:, None, None]
        v[:, :, 0, :] = np.where(sel, lo + hi, lo)
        v[:, :, 1, :] = np.where(sel, lo - hi, hi)
        h *= 2
    return a


def closure_mk(fe: FourierExpansion, k: int, block: int = 256) -> tuple[float, int, int]:
    """Exact max of M_k over every restriction of ``fe``.

    A restriction with free set F and fixed signs, maximised over the free
    signs, is the same as maximising ``sum_{|S & F| = k} fhat(S) z^S`` over a
    full sign vector z; so one WHT per free set covers all 3^n restrictions.
    Returns ``(value, free_mask, z_mask)``.
    """
    _check_level(fe, k)
    n = fe.n
    if n > EXACT_CLOSURE_N:
        raise ResourceError(f"exact restriction closure needs n <= {EXACT_CLOSURE_N}")
    best, best_f, best_z = 0.0, (1 << n) - 1, 0
    for start in range(0, 1 << n, block):
        frees = np.arange(start, min(start + block, 1 << n))
        g = np.abs(fwht(_masked_rows(fe.coeffs, n, k, frees)))
        flat = int(np.argmax(g))
        r, z = divmod(flat, 1 << n)
        if g[r, z] > best:
            best, best_f, best_z = float(g[r, z]), int(frees[r]), z
    return best, best_f, best_z


def closure_l1(fe: FourierExpansion, k: int, block: int = 256) -> float:
    """Exact max of L_{1,k} over every restriction of ``fe``."""
    _check_level(fe, k)
    n = fe.n
    if n > EXACT_CLOSURE_N:
        raise ResourceError(f"exact restriction closure needs n <= {EXACT_CLOSURE_N}")
    pc = popcounts(n)
    s = np.arange(1 << n)
    best = 0.0
    for start in range(0, 1 << n, block):
        frees = np.arange(start, min(start + block, 1 << n))
        rows = np.broadcast_to(fe.coeffs, (frees.size, 1 << n))
        a = np.abs(_partial_fwht(rows, frees, n))
        on_level = pc[frees[:, None] & s[None, :]] == k
        a = np.where(on_level, a, 0.0)
        for r, F in enumerate(frees):
            sums = np.bincount(s & ~int(F), weights=a[r], minlength=1 << n)
            best = max(best, float(sums.max()))
    return best


def closure_metrics(fe: FourierExpansion, k: int, budget: int = 3 ** EXACT_CLOSURE_N,
                    seed: int = 0) -> LevelMetrics:
    """Class metrics of the restriction closure of a single function."""
    _check_level(fe, k)
    if fe.n <= EXACT_CLOSURE_N and 3 ** fe.n <= budget:
        mk, _, z = closure_mk(fe, k)
        l1 = closure_l1(fe, k)
        us = _closure_unsigned_max(fe, k)
        return LevelMetrics(k, l1, mk, us, z, "exact")
    mode, items = restriction_closure_items(fe, budget, seed)
    return _max_metrics([g for _, g in items], k, mode)


def _closure_unsigned_max(fe: FourierExpansion, k: int) -> float:
    # max over restrictions of the signed level-k sum = closure_mk's inner value without abs
    n = fe.n
    best = -np.inf
    for start in range(0, 1 << n, 256):
        frees = np.arange(start, min(start + 256, 1 << n))
        rows = np.broadcast_to(fe.coeffs, (frees.size, 1 << n))
        a = _partial_fwht(rows, frees, n)
        pc = popcounts(n)
        on_level = pc[frees[:, None] & np.arange(1 << n)[None, :]] == k
        a = np.where(on_level, a, 0.0)
        s = np.arange(1 << n)
        for r, F in enumerate(frees):
            sums = np.bincount(s & ~int(F), weights=a[r], minlength=1 << n)
            # only indices that are valid fixed-sign patterns (subsets of ~F)
            valid = (s & int(F)) == 0
            best = max(best, float(sums[valid].max()))
    return best


def _max_metrics(fes, k: int, mode: str) -> LevelMetrics:
    best = None
    l1 = 0.0
    us = -np.inf
    for g in fes:
        m = level_abs_sum(g, k)
        l1 = max(l1, m.l1)
        us = max(us, m.unsigned_sum)
        if best is None or m.mk > best.mk:
            best = m
    return LevelMetrics(k, l1, best.mk, us, best.argmax, mode)


def class_metrics(family, k: int, closure: str = "as-given",
                  budget: int = 3 ** EXACT_CLOSURE_N, seed: int = 0) -> LevelMetrics:
    """Maxima of L_{1,k}, M_k and the signed level sum over a family.

    ``closure="restriction-closure"`` maximises over every restriction of every
    member (exact when affordable).  Sampled results are lower bounds on the
    true class quantity and are labelled ``mode="sampled"``.
    """
    fes = family.expansions() if hasattr(family, "expansions") else list(family)
    if not fes:
        raise ValueError("empty family")
    if closure == "as-given":
        return _max_metrics(fes, k, "exact" if getattr(family, "mode", "exact") == "exact" else "sampled")
    if closure != "restriction-closure":
        raise ValueError(f"unknown closure mode {closure!r}")
    per = [closure_metrics(g, k, budget, seed) for g in fes]
    best = max(per, key=lambda m: m.mk)
    sampled = any(m.mode == "sampled" for m in per) or getattr(family, "mode", "exact") != "exact"
    return LevelMetrics(k, max(m.l1 for m in per), best.mk,
                        max(m.unsigned_sum for m in per), best.argmax,
                        "sampled" if sampled else "exact")
