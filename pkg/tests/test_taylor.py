from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarwalk.boolean import FourierExpansion, TruthTable, and_pm, constant, parity, wht_forward
from polarwalk.families import explicit
from polarwalk.f2poly import family_f2
from polarwalk.spectral import closure_mk
from polarwalk.taylor import (best_lowdeg_approx, c_k_search, cheby_lower_check, lagrange_term_check,
                              level_values, monic_chebyshev_check, mult_check, recenter, recentering_check,
                              restriction_decompose, tail_eval, taylor_tail_check, univariate_restriction)

P2, P3, A2 = wht_forward(parity(2)), wht_forward(parity(3)), wht_forward(and_pm(2))


def test_tail_eval_examples():
    assert tail_eval(P3, 2, [0.5] * 3) == pytest.approx(0.125, abs=1e-15)
    assert tail_eval(A2, 1, [0, 0]) == 0.0
    assert tail_eval(A2, 2, [1, 1]) == -0.5


def test_univariate_examples():
    g = univariate_restriction(P3, [1, 1, 1])
    assert list(g.coeffs) == [0, 0, 0, 1]
    g = univariate_restriction(A2, [1, 1])
    assert list(g.coeffs) == [0.5, 1.0, -0.5]
    assert g.derivative_at_zero(2) == -1.0
    g = univariate_restriction(A2, [0, 0])
    assert list(g.coeffs) == [0.5, 0, 0]


def test_taylor_tail_examples():
    r = taylor_tail_check(P3, 2, 0.25, mk_class=1)
    assert r.passed and r.quantities["lhs"] == 0.015625
    assert r.quantities["rhs"] == pytest.approx(1 / 9)
    with pytest.raises(ValueError):
        taylor_tail_check(P3, 0, 0.25, mk_class=1)
    with pytest.raises(ValueError):
        taylor_tail_check(P3, 2, 1.0, mk_class=1)
    assert taylor_tail_check(A2, 2, 0.5).passed
    with pytest.raises(ValueError):
        taylor_tail_check(P3, 2, 0.25, mk_class=1, probe=[])


def test_lagrange_examples():
    r = lagrange_term_check(P3, 3, 0.5, [0.5] * 3)
    assert r.passed and r.quantities["lhs"] == pytest.approx(0.75) and r.quantities["rhs"] == 6
    assert lagrange_term_check(wht_forward(constant(3)), 2, 0.5, [0.1, 0.2, -0.3]).quantities["lhs"] == 0
    with pytest.raises(ValueError):
        lagrange_term_check(P3, 3, 0.5, [0.6, 0, 0])


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from([-1, 1]), min_size=1 << n, max_size=1 << n),
    st.lists(st.sampled_from([-0.5, -0.25, 0.0, 0.125, 0.375]), min_size=n, max_size=n),
    st.integers(1, n))))
def test_taylor_identity_and_bounds(args):
    vals, x, k = args
    n = len(x)
    fe = wht_forward(TruthTable(n, vals))
    xq = np.array([Fraction(v) for v in x], dtype=object)
    fq = FourierExpansion(n, np.array([Fraction(v) for v in fe.coeffs], dtype=object))
    a = level_values(fq, xq)
    assert sum(a[:k], Fraction(0)) + tail_eval(fq, k, xq) == sum(a, Fraction(0))
    mk = closure_mk(fe, k)[0]
    assert lagrange_term_check(fe, k, 0.5, x, mk_class=mk).passed
    assert taylor_tail_check(fe, k, 0.5, mk_class=mk).passed
    assert mult_check(fe, k, 0.5, mk_class=mk).passed


def test_lp_examples():
    assert best_lowdeg_approx(P2, 2, 0.5).eps_lp == pytest.approx(0.25, abs=1e-7)
    r = best_lowdeg_approx(wht_forward(and_pm(2)), 3, 0.7)
    assert r.eps_lp == 0 and np.allclose(r.coeffs, A2.coeffs)
    assert best_lowdeg_approx(P3, 3, 0.3).eps_lp == pytest.approx(0.027, abs=1e-7)


@settings(max_examples=10, deadline=None)
@given(st.lists(st.sampled_from([-1, 1]), min_size=8, max_size=8))
def test_lp_monotone_and_sandwiched(vals):
    fe = wht_forward(TruthTable(3, vals))
    prev = -1.0
    for c in (0.1, 0.2, 0.3, 0.5):
        v = best_lowdeg_approx(fe, 2, c).eps_lp
        assert v >= prev - 1e-9
        prev = v
    ks = [best_lowdeg_approx(fe, k, 0.4, with_bounds=False).eps_lp for k in range(1, 5)]
    assert all(a >= b - 1e-9 for a, b in zip(ks, ks[1:]))
    r = best_lowdeg_approx(fe, 2, 0.3)
    assert r.eps_lp <= r.taylor_bound + 1e-9


def test_ck_search_examples():
    assert c_k_search([P3], 3, 0.001) == pytest.approx(0.1, abs=1e-5)
    assert c_k_search([P3], 3, 1.0) == 1.0
    assert c_k_search([A2], 3, 0.01) == 1.0
    with pytest.raises(ValueError):
        c_k_search([P3], 3, 0.1, tol=0)


def test_cheby_lower_examples():
    r = cheby_lower_check(explicit([parity(2)]), 2, 0.3)
    assert r.passed and r.quantities["lp"] == pytest.approx(0.09, abs=1e-7)
    assert r.quantities["rhs"] == pytest.approx(0.0225)
    for n in (2, 3, 4):
        for c in (0.1, 0.2, 0.3):
            assert cheby_lower_check([wht_forward(parity(n))], n, c).passed
    r = cheby_lower_check([wht_forward(parity(3))], 2, 0.2)
    assert r.passed and r.quantities["rhs"] == 0
    r = cheby_lower_check(explicit([parity(2)]), 2, 0.5)
    assert r.status == "not-applicable"
    fam = family_f2(4, 2, mode="sample", count=3, seed=1)
    assert cheby_lower_check(fam, 2, 0.01).params["hypothesis"] == "assumed"


def test_monic_chebyshev():
    for d, v in [(1, 1.0), (2, 0.5), (4, 0.125)]:
        r = monic_chebyshev_check(d)
        assert r.passed and abs(r.quantities["value"] - v) <= 1e-4
    r = monic_chebyshev_check(2)
    assert np.allclose(r.quantities["coeffs"], [-0.5, 0, 1], atol=1e-3)
    with pytest.raises(ValueError):
        monic_chebyshev_check(0)


def test_restriction_decompose_law():
    law = restriction_decompose([Fraction(1, 2)], [Fraction(1, 4)])
    assert law == [(Fraction(5, 8), Fraction(1, 8), Fraction(1, 4))]
    with pytest.raises(ValueError):
        restriction_decompose([0.8], [0.3])


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.tuples(
    st.lists(st.sampled_from([-1, 1]), min_size=1 << n, max_size=1 << n),
    st.lists(st.fractions(-1, 1, max_denominator=16), min_size=n, max_size=n),
    st.lists(st.fractions(0, 1, max_denominator=16), min_size=n, max_size=n))))
def test_recentering_identity(args):
    vals, a, scale = args
    n = len(a)
    b = [(1 - abs(x)) * s for x, s in zip(a, scale)]
    fe = wht_forward(TruthTable(n, vals))
    assert recentering_check(fe, a, b).passed
    # pointwise sanity at x = 0: f(a)
    assert recenter(fe, a, b).coeffs[0] == sum(
        Fraction(c) * np.prod([a[i] for i in range(n) if s >> i & 1] or [Fraction(1)])
        for s, c in enumerate(fe.coeffs))
