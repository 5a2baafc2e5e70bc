"""Shifted majorities, threshold bands, covariance and the level-k reduction checks.

Inputs here are 0/1 vectors packed as truth-table indices (bit i of the
index is ``x_{i+1}``), which matches the +-1 convention through
``e(f) = (-1)^f``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product

import numpy as np

from .boolean import TruthTable, fwht, popcounts, wht_integer
from .config import DEFAULT_CONSTANTS, Constants, ResourceError, check_n
from .report import ExperimentReport
from .spectral import class_metrics

FACT63_MAX_VARS = 12


class ZeroOneFunction:
    __slots__ = ("n", "values")

    def __init__(self, n: int, values):
        check_n(n)
        v = np.asarray(values, dtype=np.int8)
        if v.shape != (1 << n,) or np.any((v != 0) & (v != 1)):
            raise ValueError(f"expected {1 << n} values in {{0,1}}")
        v = v.copy()
        v.setflags(write=False)
        self.n = n
        self.values = v

    def __call__(self, x) -> int:
        x = list(x)
        if len(x) != self.n:
            raise ValueError("dimension mismatch")
        return int(self.values[sum(int(b) << i for i, b in enumerate(x))])

    def e_lift(self) -> TruthTable:
        return TruthTable(self.n, 1 - 2 * self.values)

    def __eq__(self, other):
        return isinstance(other, ZeroOneFunction) and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash(self.values.tobytes())


def weights(n: int) -> np.ndarray:
    return popcounts(n)


def maj_a(n: int, a: int) -> ZeroOneFunction:
    """1 iff |x| > a."""
    if not 0 <= a <= n:
        raise ValueError(f"a={a} outside [0, {n}]")
    return ZeroOneFunction(n, (weights(n) > a).astype(np.int8))


def thr_theta(n: int, theta: int) -> np.ndarray:
    """Majority sign when ||x| - n/2| >= theta, else 0 (non-strict comparison)."""
    if n % 2:
        raise ValueError("threshold bands need even n")
    if not 1 <= theta <= n // 2:
        raise ValueError(f"theta={theta} outside [1, {n // 2}]")
    w = weights(n)
    dev = np.abs(w - n // 2)
    sign = np.where(w > n // 2, -1, 1)
    return np.where(dev >= theta, sign, 0).astype(np.int8)


def _pm(f) -> np.ndarray:
    if isinstance(f, ZeroOneFunction):
        return 1 - 2 * f.values.astype(np.int64)
    if isinstance(f, TruthTable):
        return f.values.astype(np.int64)
    return np.asarray(f, dtype=np.int64)


def covariance(f, g) -> Fraction:
    """|E[e(f)e(g)] - E[e(f)]E[e(g)]| exactly."""
    a, b = _pm(f), _pm(g)
    if a.shape != b.shape:
        raise ValueError("dimension mismatch")
    size = a.size
    return abs(Fraction(int(a @ b), size) - Fraction(int(a.sum()), size) * Fraction(int(b.sum()), size))


def xor_shifted_majorities(n: int, a_list) -> ZeroOneFunction:
    """Block i (bits i*n .. i*n+n-1) feeds Maj_{a_i}; output is the XOR."""
    k = len(a_list)
    if k < 1:
        raise ValueError("need at least one block")
    check_n(k * n)
    idx = np.arange(1 << (k * n))
    out = np.zeros(idx.size, dtype=np.int8)
    blk = (1 << n) - 1
    for i, a in enumerate(a_list):
        m = maj_a(n, a).values
        out ^= m[(idx >> (i * n)) & blk]
    return ZeroOneFunction(k * n, out)


def fact62_check(n: int) -> ExperimentReport:
    """sum_i e(x_i) = 2 sum_{1<=a<=n/2} Thr_a(x) at every input."""
    if n % 2:
        return ExperimentReport("fact62", "not-applicable", params={"n": n},
                                notes=["odd n: the left side n-2|x| is odd, the right side even"])
    check_n(n)
    lhs = n - 2 * weights(n)
    rhs = 2 * sum(thr_theta(n, a).astype(np.int64) for a in range(1, n // 2 + 1)) if n else np.zeros(1, np.int64)
    bad = np.nonzero(lhs != rhs)[0]
    return ExperimentReport("fact62", "pass" if bad.size == 0 else "fail",
                            quantities={"inputs": int(lhs.size), "mismatches": int(bad.size),
                                        "first_mismatch": int(bad[0]) if bad.size else None},
                            params={"n": n, "comparison": ">="})


def binomial_tail(n: int, a) -> Fraction:
    """Pr[||x| - n/2| >= a] for uniform x in {0,1}^n."""
    hits = sum(math.comb(n, w) for w in range(n + 1) if abs(2 * w - n) >= 2 * a)
    return Fraction(hits, 2 ** n)


def fact64_check(n: int, k: int = 1) -> ExperimentReport:
    """Exact tails against 2 exp(-2 a^2 / n) for 1 <= a <= n/2; least a with tail <= n^-k."""
    if not 1 <= n <= 40:
        raise ValueError("n must lie in [1, 40]")
    rows, bad = [], []
    least = None
    for a in range(0, n // 2 + 1):
        tail = binomial_tail(n, a)
        bound = 2 * math.exp(-2 * a * a / n)
        rows.append({"a": a, "tail": float(tail), "chernoff": bound})
        if a >= 1 and float(tail) > bound:
            bad.append(a)
        if least is None and tail * n ** k <= 1:
            least = a
    return ExperimentReport("fact64", "pass" if not bad else "fail",
                            quantities={"tails": rows, "violations": bad, "least_a": least,
                                        "threshold": float(Fraction(1, n ** k))},
                            params={"n": n, "k": k})


def equipartitions(m: int, k: int):
    """Unordered partitions of range(m) into k blocks of equal size (bitmasks)."""
    if m % k:
        raise ValueError("k must divide the variable count")
    size = m // k

    def rec(remaining: int, left: int):
        if left == 0:
            yield ()
            return
        first = remaining & -remaining
        rest = [i for i in range(m) if remaining >> i & 1 and (1 << i) != first]
        for combo in combinations(rest, size - 1):
            blk = first | sum(1 << i for i in combo)
            for tail in rec(remaining & ~blk, left - 1):
                yield (blk,) + tail

    yield from rec((1 << m) - 1, k)


def _cross_sets(blocks) -> list:
    bits = [[1 << i for i in range(blk.bit_length()) if blk >> i & 1] for blk in blocks]
    return [sum(choice) for choice in product(*bits)]


def fact63_check(f, k: int) -> ExperimentReport:
    """Pr * |sum_{|S|=k} fhat(S)| <= max over equipartitions of |cross-block sum|."""
    tt = f.e_lift() if isinstance(f, ZeroOneFunction) else f
    m = tt.n
    if k < 2:
        raise ValueError("k must be >= 2")
    if m > FACT63_MAX_VARS:
        raise ResourceError(f"kn={m} exceeds {FACT63_MAX_VARS}")
    if m % k:
        raise ValueError("k must divide the variable count")
    n = m // k
    W = wht_integer(tt)  # 2^m * fhat, exact
    pc = popcounts(m)
    level = int(W[pc == k].sum())
    pr = Fraction(1)
    for i in range(1, k):
        pr *= Fraction((k - i) * n, k * n - i)
    best, count = 0, 0
    for parts in equipartitions(m, k):
        count += 1
        best = max(best, abs(int(W[_cross_sets(parts)].sum())))
    lhs = pr * abs(level)
    ok = lhs <= best
    return ExperimentReport("fact63", "pass" if ok else "fail",
                            quantities={"level_sum": Fraction(level, 2 ** m), "probability": pr,
                                        "max_cross_sum": Fraction(best, 2 ** m),
                                        "lhs": lhs / 2 ** m, "partitions": count},
                            params={"k": k, "n": n})


def lemma61_harness(family, k: int, n: int, constants: Constants = DEFAULT_CONSTANTS) -> ExperimentReport:
    """Diagnostic: covariance with XORs of shifted majorities versus measured M_k."""
    fes = family.expansions() if hasattr(family, "expansions") else None
    members = list(family.members) if hasattr(family, "members") else list(family)
    tables = [_pm(g if not hasattr(g, "coeffs") else np.rint(fwht(g.coeffs))) for g in members]
    if any(t.size != 1 << (k * n) for t in tables):
        raise ValueError(f"members must have {k * n} variables")
    if k * n > 16:
        raise ResourceError("exact covariance limited to kn <= 16")
    radius = constants.c_range * math.sqrt(k * n * math.log(n)) if n > 1 else 0.0
    a_range = [a for a in range(n + 1) if abs(a - n / 2) <= radius]
    maxcov, arg = Fraction(0), None
    for a_list in product(a_range, repeat=k):
        g = _pm(xor_shifted_majorities(n, a_list))
        for i, t in enumerate(tables):
            cv = covariance(t, g)
            if cv > maxcov:
                maxcov, arg = cv, (i, list(a_list))
    t_inf = max(1.0, n * float(maxcov) ** (2 / k))
    bound = (constants.c_cov * math.sqrt(t_inf * k * math.log(n))) ** k if n > 1 else 0.0
    mk = class_metrics(fes if fes is not None else members, k).mk
    flag = mk > bound
    return ExperimentReport("lemma61", "diagnostic",
                            quantities={"max_covariance": maxcov, "argmax": arg, "t": t_inf,
                                        "mk": mk, "bound": bound, "flag": flag,
                                        "a_range": a_range},
                            params={"k": k, "n": n, "c_range": constants.c_range,
                                    "c_cov": constants.c_cov},
                            notes=["asymptotic statement: no pass/fail, flag marks mk > bound"])
