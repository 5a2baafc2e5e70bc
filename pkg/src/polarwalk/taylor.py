"""Low-degree approximation on subcubes: tails, Taylor remainders, LP optimum.

The LP for the best degree-<k approximation on [-c,c]^n is posed at the 2^n
corners only; by multilinearity the maximum of |f - g| over the cube is
attained there.  Coefficients are rescaled as ``h_S = g_S * c^|S|`` so the
constraint matrix is the +-1 character table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import chebyshev as C
from scipy.optimize import linprog

from .boolean import FourierExpansion, Restriction, all_restrictions, eval_multilinear, fwht, popcounts, restrict
from .config import MAX_LP_N, ResourceError, check_n
from .report import ExperimentReport, inequality_report
from .spectral import class_metrics, closure_metrics

TOL = 1e-9
_LP_OPTIONS = {"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10}
_LP_MAX_ENTRIES = 5 * 10 ** 7


def _check_box(x, bound: float = 1.0):
    x = np.asarray(x)
    if x.dtype != object and np.any(np.abs(x) > bound + 1e-12):
        raise ValueError(f"point outside [-{bound},{bound}]^n")
    return x


def monomials(x) -> np.ndarray:
    """``x^S`` for every subset mask ``S`` (object dtype preserved for Fractions)."""
    x = np.asarray(x)
    mono = np.ones(1, dtype=x.dtype if x.dtype == object else np.float64)
    for xi in x:
        mono = np.concatenate([mono, mono * xi])
    return mono


def level_values(fe: FourierExpansion, x) -> list:
    """``[f_0(x), ..., f_n(x)]`` where ``f_l(x) = sum_{|S|=l} fhat(S) x^S``."""
    x = _check_box(x)
    terms = fe.coeffs * monomials(x)
    pc = popcounts(fe.n)
    if terms.dtype == object:
        out = [Fraction(0)] * (fe.n + 1)
        for s, v in enumerate(terms):
            out[pc[s]] += v
        return out
    return list(np.bincount(pc, weights=terms, minlength=fe.n + 1))


def tail_eval(fe: FourierExpansion, k: int, x):
    """``f_{>=k}(x)``."""
    x = _check_box(x)
    if x.shape != (fe.n,):
        raise ValueError("dimension mismatch")
    return sum(level_values(fe, x)[k:]) if k <= fe.n else 0.0


@dataclass(frozen=True)
class UnivariateRestriction:
    """``g(t) = f(t x) = sum_l a_l t^l`` with ``a_l = f_l(x)``."""

    coeffs: tuple
    anchor: tuple

    def __call__(self, t):
        return sum(a * t ** i for i, a in enumerate(self.coeffs))

    @property
    def poly(self) -> Polynomial:
        return Polynomial([float(a) for a in self.coeffs])

    def derivative(self, k: int) -> Polynomial:
        return self.poly.deriv(k) if k else self.poly

    def derivative_at_zero(self, k: int):
        """Exact ``g^{(k)}(0) = k! a_k``."""
        return math.factorial(k) * self.coeffs[k] if k < len(self.coeffs) else 0


def univariate_restriction(fe: FourierExpansion, x) -> UnivariateRestriction:
    x = _check_box(x)
    return UnivariateRestriction(tuple(level_values(fe, x)), tuple(x.tolist()))


def _tail_corner_max(fe: FourierExpansion, k: int, c: float, probe=None) -> tuple[float, int]:
    pc = popcounts(fe.n)
    tail = np.where(pc >= k, fe.coeffs * c ** pc, 0.0)
    vals = np.abs(fwht(tail.astype(np.float64)))
    if probe is not None:
        probe = np.asarray(list(probe), dtype=np.int64)
        if probe.size == 0:
            raise ValueError("empty probe set")
        i = int(probe[np.argmax(vals[probe])])
    else:
        i = int(np.argmax(vals))
    return float(vals[i]), i


def _closure_mk(fe: FourierExpansion, k: int) -> tuple[float, str]:
    m = closure_metrics(fe, k)
    return m.mk, m.mode


def taylor_tail_check(fe: FourierExpansion, k: int, c: float, mk_class: float | None = None,
                      probe=None) -> ExperimentReport:
    """max over corners of [-c,c]^n of |f_{>=k}| against (c/(1-c))^k M_k."""
    if k < 1:
        raise ValueError("k must be >= 1 (k=0 makes the bound degenerate)")
    if not 0 < c < 1:
        raise ValueError("c must lie in (0,1)")
    check_n(fe.n)
    mode = "exact"
    if mk_class is None:
        mk_class, mode = _closure_mk(fe, k) if k <= fe.n else (0.0, "exact")
    lhs, arg = _tail_corner_max(fe, k, c, probe)
    rhs = (c / (1 - c)) ** k * mk_class
    return inequality_report("taylor_tail", lhs, rhs, TOL, params={"n": fe.n, "k": k, "c": c},
                             mode=mode if probe is None else "sampled",
                             mk_class=mk_class, argmax_corner=arg)


def mult_check(fe: FourierExpansion, k: int, c: float, mk_class: float | None = None) -> ExperimentReport:
    """|f_k(x)| <= c^k M_k on the corners of [-c,c]^n."""
    mode = "exact"
    if mk_class is None:
        mk_class, mode = _closure_mk(fe, k)
    pc = popcounts(fe.n)
    lhs = float(np.abs(fwht(np.where(pc == k, fe.coeffs * c ** k, 0.0))).max())
    return inequality_report("level_scaling", lhs, c ** k * mk_class, TOL,
                             params={"n": fe.n, "k": k, "c": c}, mode=mode, mk_class=mk_class)


def lagrange_term_check(fe: FourierExpansion, k: int, c: float, x, grid: int = 1025,
                        mk_class: float | None = None) -> ExperimentReport:
    """max_{s in [0,1]} |g^{(k)}(s)| against (c/(1-c))^k k! M_k, plus the Taylor identity."""
    if grid < 1:
        raise ValueError("grid must be nonempty")
    if not 0 < c < 1:
        raise ValueError("c must lie in (0,1)")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (fe.n,):
        raise ValueError("dimension mismatch")
    if np.any(np.abs(x) > c + 1e-12):
        raise ValueError("x outside [-c,c]^n")
    mode = "exact"
    if mk_class is None:
        mk_class, mode = _closure_mk(fe, k) if k <= fe.n else (0.0, "exact")
    g = univariate_restriction(fe, x)
    dk = g.derivative(k)
    pts = list(np.linspace(0.0, 1.0, grid))
    if fe.n <= 8 + k:
        crit = dk.deriv(1).roots() if dk.degree() >= 2 else []
        pts += [float(r.real) for r in np.atleast_1d(crit)
                if abs(r.imag) < 1e-12 and 0 <= r.real <= 1]
    lhs = float(np.max(np.abs(dk(np.array(pts))))) if dk.degree() >= 0 else 0.0
    rhs = (c / (1 - c)) ** k * math.factorial(k) * mk_class

    # Taylor identity g(1) = sum_{i<k} g^(i)(0)/i! + f_{>=k}(x), in exact rationals
    xq = np.array([Fraction(float(v)) for v in x], dtype=object)
    fq = FourierExpansion(fe.n, np.array([Fraction(float(v)) for v in fe.coeffs], dtype=object))
    gq = univariate_restriction(fq, xq)
    lower = sum((gq.derivative_at_zero(i) / math.factorial(i) for i in range(min(k, fe.n + 1))),
                Fraction(0))
    identity = lower + tail_eval(fq, k, xq) == eval_multilinear(fq, xq)

    status = "pass" if lhs <= rhs + TOL and identity else "fail"
    return ExperimentReport(
        "lagrange_term", status,
        quantities={"lhs": lhs, "rhs": rhs, "tol": TOL, "mk_class": mk_class,
                    "taylor_identity_exact": bool(identity), "grid_points": len(pts)},
        params={"n": fe.n, "k": k, "c": c, "x": x.tolist()}, mode=mode)


@dataclass
class ApproxResult:
    c: float
    k: int
    eps_lp: float
    coeffs: np.ndarray  # approximant g_S, zero for |S| >= k
    taylor_bound: float | None = None
    cheby_lower: float | None = None
    mk_class: float | None = None

    def __post_init__(self):
        if self.coeffs.size:
            n = self.coeffs.size.bit_length() - 1
            if np.any(self.coeffs[popcounts(n) >= self.k] != 0):
                raise AssertionError("approximant degree must be < k")

    def as_dict(self) -> dict:
        nz = {int(s): float(v) for s, v in enumerate(self.coeffs) if abs(v) > 1e-15}
        return {"c": self.c, "k": self.k, "eps_lp": self.eps_lp, "approximant": nz,
                "taylor_bound": self.taylor_bound, "cheby_lower": self.cheby_lower,
                "mk_class": self.mk_class}


def _lp_value(fe: FourierExpansion, k: int, c: float) -> tuple[float, np.ndarray]:
    n = fe.n
    if n > MAX_LP_N:
        raise ResourceError(f"LP over 2^{n} corners exceeds the cap n <= {MAX_LP_N}")
    if not 1 <= k <= n + 1:
        raise ValueError(f"k must lie in [1, {n + 1}]")
    pc = popcounts(n)
    low = np.nonzero(pc < k)[0]
    target = fwht(fe.coeffs.astype(np.float64) * c ** pc)  # f(c s) at every corner
    if low.size == 1 << n:
        return 0.0, fe.coeffs.astype(np.float64).copy()
    rows = 1 << n
    if 2 * rows * (low.size + 1) > _LP_MAX_ENTRIES:
        raise ResourceError("LP too large")
    s = np.arange(rows)
    chi = 1.0 - 2.0 * (pc[s[:, None] & low[None, :]] & 1)
    ones = np.ones((rows, 1))
    # f - chi h <= t   and   chi h - f <= t
    A = np.vstack([np.hstack([-chi, -ones]), np.hstack([chi, -ones])])
    ub = np.concatenate([-target, target])
    cost = np.zeros(low.size + 1)
    cost[-1] = 1.0
    bounds = [(None, None)] * low.size + [(0, None)]
    res = linprog(cost, A_ub=A, b_ub=ub, bounds=bounds, method="highs", options=_LP_OPTIONS)
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    g = np.zeros(rows)
    with np.errstate(divide="ignore", invalid="ignore"):
        g[low] = res.x[:-1] / c ** pc[low] if c > 0 else 0.0
    # report the true max error of the returned approximant, not the solver's t
    err = float(np.abs(target - chi @ res.x[:-1]).max())
    return err, g


def best_lowdeg_approx(fe: FourierExpansion, k: int, c: float, with_bounds: bool = True) -> ApproxResult:
    if not 0 < c <= 1:
        raise ValueError("c must lie in (0,1]")
    eps, g = _lp_value(fe, k, c)
    res = ApproxResult(c, k, eps, g)
    if with_bounds and k <= fe.n:
        mk, _ = _closure_mk(fe, k)
        res.mk_class = mk
        res.taylor_bound = (c / (1 - c)) ** k * mk if c < 1 else math.inf
        res.cheby_lower = (c / 2) ** k * mk
    return res


def family_lp_value(family, k: int, c: float) -> tuple[float, int]:
    """``eps_{c,k}(F)`` as the max over members, with the worst member index."""
    fes = family.expansions() if hasattr(family, "expansions") else list(family)
    vals = [_lp_value(g, k, c)[0] for g in fes]
    i = int(np.argmax(vals))
    return float(vals[i]), i


def c_k_search(family, k: int, eps: float, tol: float = 1e-6) -> float:
    """Largest c with eps_{c,k}(F) <= eps, to within ``tol`` (bisection)."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    fes = family.expansions() if hasattr(family, "expansions") else list(family)
    if eps >= 1 or all(g.degree < k for g in fes):
        return 1.0
    if family_lp_value(fes, k, 1.0)[0] <= eps:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if family_lp_value(fes, k, mid)[0] <= eps:
            lo = mid
        else:
            hi = mid
    return lo


def cheby_lower_check(family, k: int, c: float) -> ExperimentReport:
    """eps_{c,k}(F) >= (c/2)^k M_k(F) when c <= min(1/3, 3^-k M_k / M_{k+1})."""
    fes = family.expansions() if hasattr(family, "expansions") else list(family)
    n = fes[0].n
    mk_m = class_metrics(fes, k) if k <= n else None
    mk = mk_m.mk if mk_m else 0.0
    mk1_m = class_metrics(fes, k + 1) if k + 1 <= n else None
    mk1 = mk1_m.mk if mk1_m else 0.0
    limit = 1 / 3 if mk1 == 0 else min(1 / 3, 3.0 ** -k * mk / mk1)
    sampled = getattr(family, "mode", "exact") != "exact"
    hyp = "assumed" if sampled else "verified-exact"
    params = {"n": n, "k": k, "c": c, "c_limit": limit, "hypothesis": hyp}
    if mk == 0:
        # rhs vanishes so the inequality holds whatever c is
        limit = 1.0
        params["c_limit"] = limit
    if c > limit + 1e-15:
        return ExperimentReport("cheby_lower", "not-applicable",
                                quantities={"mk": mk, "mk_next": mk1, "c_limit": limit},
                                params=params, notes=["c violates the hypothesis on c"])
    lp, worst = family_lp_value(fes, k, c)
    rhs = (c / 2) ** k * mk
    return ExperimentReport("cheby_lower", "pass" if lp >= rhs - TOL else "fail",
                            quantities={"lp": lp, "rhs": rhs, "tol": TOL, "mk": mk,
                                        "mk_next": mk1, "worst_member": worst},
                            params=params, mode="sampled" if sampled else "exact")


def monic_chebyshev_check(d: int, grid: int = 4001) -> ExperimentReport:
    """Minimal sup norm of a monic degree-d polynomial on [-1,1] (grid LP)."""
    if not 1 <= d <= 8:
        raise ValueError("degree must lie in [1, 8]")
    t = np.linspace(-1.0, 1.0, grid)
    V = np.vander(t, d, increasing=True)  # columns t^0..t^{d-1}
    lead = t ** d
    ones = np.ones((grid, 1))
    A = np.vstack([np.hstack([V, -ones]), np.hstack([-V, -ones])])
    ub = np.concatenate([-lead, lead])
    cost = np.zeros(d + 1)
    cost[-1] = 1.0
    res = linprog(cost, A_ub=A, b_ub=ub, bounds=[(None, None)] * d + [(0, None)],
                  method="highs", options=_LP_OPTIONS)
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    coeffs = np.append(res.x[:-1], 1.0)
    value = float(np.abs(np.polyval(coeffs[::-1], t)).max())
    ref = C.cheb2poly([0] * d + [1]) / 2.0 ** (d - 1)
    expected = 2.0 ** (1 - d)
    coef_err = float(np.abs(coeffs - ref).max())
    ok = abs(value - expected) <= 1e-4 and coef_err <= 1e-3
    return ExperimentReport("monic_chebyshev", "pass" if ok else "fail",
                            quantities={"value": value, "expected": expected,
                                        "coef_err": coef_err, "coeffs": coeffs.tolist()},
                            params={"d": d, "grid": grid})


# ---- recentering --------------------------------------------------------------

def _as_fraction(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


def restriction_decompose(a, b) -> list:
    """Per-coordinate law ``(P[+1], P[-1], P[free])`` with mean a_i + b_i x_i."""
    if len(a) != len(b):
        raise ValueError("a and b must have equal length")
    law = []
    for ai, bi in zip(a, b):
        ai, bi = _as_fraction(ai), _as_fraction(bi)
        if bi < 0 or abs(ai) + bi > 1:
            raise ValueError("need b_i >= 0 and |a_i| + b_i <= 1")
        law.append(((1 + ai - bi) / 2, (1 - ai - bi) / 2, bi))
    return law


def restriction_distribution(a, b):
    """Every restriction with its probability (zero-probability ones skipped)."""
    law = restriction_decompose(a, b)
    for rho in all_restrictions(len(law)):
        p = Fraction(1)
        for v, (pp, pm, pf) in zip(rho.assignments, law):
            p *= pf if v is None else (pp if v == 1 else pm)
        if p:
            yield rho, p


def recenter(fe: FourierExpansion, a, b) -> FourierExpansion:
    """Expansion of ``x -> f(a + b * x)`` in exact rationals."""
    c = np.array([_as_fraction(v) for v in fe.coeffs], dtype=object)
    for i, (ai, bi) in enumerate(zip(a, b)):
        ai, bi = _as_fraction(ai), _as_fraction(bi)
        v = c.reshape(-1, 2, 1 << i)
        v[:, 0, :] = v[:, 0, :] + ai * v[:, 1, :]
        v[:, 1, :] = bi * v[:, 1, :]
    return FourierExpansion(fe.n, c)


def recentering_check(fe: FourierExpansion, a, b) -> ExperimentReport:
    """f(a + b x) == E_{z ~ D} f_z(x) as polynomials, by explicit enumeration of D."""
    fq = FourierExpansion(fe.n, np.array([_as_fraction(v) for v in fe.coeffs], dtype=object))
    lhs = recenter(fq, a, b)
    acc = np.array([Fraction(0)] * (1 << fe.n), dtype=object)
    total = Fraction(0)
    for rho, p in restriction_distribution(a, b):
        acc = acc + p * restrict(fq, rho).coeffs
        total += p
    ok = total == 1 and all(x == y for x, y in zip(lhs.coeffs, acc))
    return ExperimentReport("recentering", "pass" if ok else "fail",
                            quantities={"exact_equal": ok, "total_probability": total},
                            params={"n": fe.n})


__all__ = ["tail_eval", "univariate_restriction", "UnivariateRestriction", "taylor_tail_check",
           "lagrange_term_check", "mult_check", "best_lowdeg_approx", "ApproxResult",
           "c_k_search", "cheby_lower_check", "monic_chebyshev_check", "restriction_decompose",
           "restriction_distribution", "recenter", "recentering_check", "level_values",
           "family_lp_value", "Restriction"]
