import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarwalk.boolean import (FourierExpansion, Restriction, TruthTable, and_pm, constant,
                               eval_multilinear, format_truth_table, index_point, majority,
                               negate_inputs, parity, parse_truth_table, restrict,
                               restriction_closure, restriction_closure_items, unique_expansions,
                               wht_forward, wht_integer, wht_inverse)
from polarwalk.config import ParseError, ResourceError


def coeff(fe, *vars1):
    return fe.coeffs[sum(1 << (v - 1) for v in vars1)]


def tables(max_n=8):
    return st.integers(1, max_n).flatmap(
        lambda n: st.lists(st.sampled_from([-1, 1]), min_size=1 << n, max_size=1 << n)
        .map(lambda v: TruthTable(n, v)))


def test_and2_transform():
    fe = wht_forward(and_pm(2))
    assert coeff(fe) == 0.5 and coeff(fe, 1) == 0.5 and coeff(fe, 2) == 0.5
    assert coeff(fe, 1, 2) == -0.5


def test_parity3_and_constant_transforms():
    fe = wht_forward(parity(3))
    assert coeff(fe, 1, 2, 3) == 1 and np.count_nonzero(fe.coeffs) == 1
    fe = wht_forward(constant(3))
    assert coeff(fe) == 1 and np.count_nonzero(fe.coeffs) == 1


def test_eval_examples():
    a2 = wht_forward(and_pm(2))
    assert eval_multilinear(a2, [0, 0]) == 0.5
    assert eval_multilinear(a2, [1, -1]) == 1
    assert eval_multilinear(wht_forward(parity(3)), [0.5] * 3) == 0.125


def test_eval_errors():
    fe = wht_forward(parity(2))
    with pytest.raises(ValueError):
        eval_multilinear(fe, [0.1])
    with pytest.raises(ValueError):
        eval_multilinear(fe, [1.5, 0])


def test_restrict_examples():
    p3 = wht_forward(parity(3))
    r = restrict(p3, Restriction([None, None, -1]))
    assert coeff(r, 1, 2) == -1 and np.count_nonzero(r.coeffs) == 1
    a2 = restrict(wht_forward(and_pm(2)), Restriction([None, 1]))
    assert coeff(a2) == 1 and np.count_nonzero(a2.coeffs) == 1
    assert restrict(p3, Restriction.empty(3)) == p3


def test_negate_inputs_examples():
    p3 = negate_inputs(wht_forward(parity(3)), [-1, 1, 1])
    assert coeff(p3, 1, 2, 3) == -1
    a2 = wht_forward(and_pm(2))
    assert negate_inputs(a2, [1, 1]) == a2
    g = negate_inputs(a2, [-1, -1])
    assert (coeff(g), coeff(g, 1), coeff(g, 2), coeff(g, 1, 2)) == (0.5, -0.5, -0.5, -0.5)


def test_restriction_closure_examples():
    items = restriction_closure(wht_forward(parity(2)), budget=9)
    assert len(items) == 9
    assert len(unique_expansions(items)) == 7  # x1x2, +-x1, +-x2, +-1
    assert len(restriction_closure(wht_forward(parity(1)), budget=3)) == 3
    a = restriction_closure_items(wht_forward(parity(3)), budget=1, seed=5)
    b = restriction_closure_items(wht_forward(parity(3)), budget=1, seed=5)
    assert a[0] == "sampled" and len(a[1]) == 1 and a[1][0][0] == b[1][0][0]
    with pytest.raises(ValueError):
        restriction_closure(wht_forward(parity(2)), budget=0)


@settings(max_examples=60, deadline=None)
@given(tables(10))
def test_roundtrip_and_parseval(tt):
    assert np.array_equal(wht_inverse(wht_forward(tt)), tt.values)
    w = wht_integer(tt)
    assert int((w * w).sum()) == 1 << (2 * tt.n)
    assert abs(float((wht_forward(tt).coeffs ** 2).sum()) - 1) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(tables(6))
def test_eval_matches_table_on_cube(tt):
    fe = wht_forward(tt)
    for m in range(1 << tt.n):
        assert eval_multilinear(fe, index_point(m, tt.n)) == tt.values[m]


@settings(max_examples=20, deadline=None)
@given(tables(6), st.data())
def test_restrict_then_eval(tt, data):
    fe = wht_forward(tt)
    rho = Restriction(data.draw(st.lists(st.sampled_from([1, -1, None]), min_size=tt.n, max_size=tt.n)))
    g = restrict(fe, rho)
    free = [i for i, v in enumerate(rho.assignments) if v is None]
    for m in range(1 << len(free)):
        x = list(rho.assignments)
        for j, i in enumerate(free):
            x[i] = -1 if m >> j & 1 else 1
        assert eval_multilinear(g, x) == tt(x)


def test_truth_table_validation():
    with pytest.raises(ValueError):
        TruthTable(2, [1, 1, 1])
    with pytest.raises(ValueError):
        TruthTable(1, [1, 0])
    with pytest.raises(ResourceError):
        TruthTable(30, [1])
    with pytest.raises(ValueError):
        majority(4)


def test_file_format_roundtrip_and_errors():
    tt = and_pm(2)
    assert format_truth_table(tt) == "n=2\n8\n"
    assert parse_truth_table("n=2\n8\n") == tt
    assert parse_truth_table(format_truth_table(parity(5))) == parity(5)
    for text, line in [("", 1), ("m=2\n8", 1), ("n=2\n", 2), ("n=2\nxyz", 2), ("n=2\n1f", 2),
                       ("n=2\n8\nextra", 3)]:
        with pytest.raises(ParseError) as exc:
            parse_truth_table(text)
        assert exc.value.line == line


def test_fourier_expansion_immutable():
    fe = FourierExpansion(1, [0.5, 0.5])
    with pytest.raises(ValueError):
        fe.coeffs[0] = 1
    assert fe.degree == 1
