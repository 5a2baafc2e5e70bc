import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarwalk.boolean import (TruthTable, all_restrictions, and_pm, constant, majority, negate_inputs,
                               parity, restrict, wht_forward)
from polarwalk.config import ResourceError
from polarwalk.families import explicit, family_all, family_parities
from polarwalk.spectral import (LevelMetrics, MetricOrderError, class_metrics, closure_l1, closure_metrics,
                                closure_mk, l1_level_mass, level_abs_sum, unsigned_level_sum)


def fe_of(tt):
    return wht_forward(tt)


def test_l1_examples():
    assert l1_level_mass(fe_of(and_pm(2)), 1) == 1.0
    assert l1_level_mass(fe_of(parity(3)), 3) == 1.0
    assert l1_level_mass(fe_of(parity(3)), 1) == 0.0
    assert l1_level_mass(fe_of(majority(3)), 1) == 1.5
    with pytest.raises(ValueError):
        l1_level_mass(fe_of(parity(3)), 4)


def test_mk_examples():
    assert level_abs_sum(fe_of(and_pm(2)), 2).mk == 0.5
    assert level_abs_sum(fe_of(parity(3)), 2).mk == 0.0
    m = level_abs_sum(fe_of(majority(3)), 1)
    assert m.mk == 1.5 and m.argmax in (0, 7)


def test_unsigned_examples():
    assert unsigned_level_sum(fe_of(and_pm(2)), 1) == 1.0
    assert unsigned_level_sum(negate_inputs(fe_of(parity(3)), [-1, 1, 1]), 3) == -1.0
    assert unsigned_level_sum(fe_of(constant(3)), 2) == 0.0


def test_class_examples():
    m = class_metrics(explicit([parity(3)]), 2, closure="restriction-closure")
    assert m.mk == 1.0 and m.mode == "exact"
    assert class_metrics(explicit([and_pm(2)]), 2).mk == 0.5
    assert class_metrics(family_all(2), 1).mk == 1.0
    with pytest.raises(ValueError):
        class_metrics(explicit([]), 1)


def test_level_metrics_order_guard():
    with pytest.raises(MetricOrderError):
        LevelMetrics(1, 0.5, 0.6, 0.0, 0)


def _brute_closure(fe, k):
    mk = l1 = 0.0
    for rho in all_restrictions(fe.n):
        g = restrict(fe, rho)
        mk = max(mk, level_abs_sum(g, k).mk)
        l1 = max(l1, l1_level_mass(g, k))
    return mk, l1


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5).flatmap(lambda n: st.tuples(
    st.just(n), st.lists(st.sampled_from([-1, 1]), min_size=1 << n, max_size=1 << n), st.integers(0, n))))
def test_closure_fast_path_matches_enumeration(args):
    n, vals, k = args
    fe = wht_forward(TruthTable(n, vals))
    mk, l1 = _brute_closure(fe, k)
    assert abs(closure_mk(fe, k)[0] - mk) <= 1e-12
    assert abs(closure_l1(fe, k) - l1) <= 1e-12
    m = closure_metrics(fe, k)
    assert m.mk <= m.l1 + 1e-12


def test_closure_sampled_is_labelled():
    fe = fe_of(parity(4))
    m = closure_metrics(fe, 2, budget=10, seed=3)
    assert m.mode == "sampled"
    assert m.mk <= closure_metrics(fe, 2).mk + 1e-12


def test_exact_closure_cap():
    fe = wht_forward(TruthTable(13, np.ones(1 << 13)))
    with pytest.raises(ResourceError):
        closure_mk(fe, 1)


def test_negation_closure_identity_all_two_variable_functions():
    fam = family_all(2)
    for k in range(3):
        best = max(unsigned_level_sum(g, k) for g in fam.expansions())
        assert abs(class_metrics(fam, k).mk - best) <= 1e-12


def test_negation_closure_identity_parities():
    fam = family_parities(4)
    for k in range(5):
        best = max(unsigned_level_sum(g, k) for g in fam.expansions())
        assert abs(class_metrics(fam, k).mk - best) <= 1e-12


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=16, max_size=16), st.integers(0, 2))
def test_convex_combinations_do_not_increase_mk(lams, k):
    fam = family_all(2)
    lam = np.array(lams)
    if lam.sum() == 0:
        lam[0] = 1
    lam /= lam.sum()
    coeffs = sum(w * g.coeffs for w, g in zip(lam, fam.expansions()))
    from polarwalk.boolean import FourierExpansion
    g = FourierExpansion(2, coeffs)
    assert level_abs_sum(g, k).mk <= class_metrics(fam, k).mk + 1e-9
