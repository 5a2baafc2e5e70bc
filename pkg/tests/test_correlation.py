from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarwalk.boolean import parity
from polarwalk.correlation import (ZeroOneFunction, binomial_tail, covariance, fact62_check, fact63_check,
                                   fact64_check, lemma61_harness, maj_a, thr_theta, xor_shifted_majorities)
from polarwalk.families import explicit


def idx(bits):
    return sum(b << i for i, b in enumerate(bits))


def test_maj_examples():
    assert maj_a(3, 1)([0, 1, 1]) == 1
    assert not maj_a(4, 4).values.any()
    assert list(maj_a(2, 1).values) == [0, 0, 0, 1]


def test_thr_examples():
    assert thr_theta(2, 1)[idx([1, 1])] == -1
    assert thr_theta(4, 2)[0] == 1
    assert thr_theta(4, 1)[idx([1, 1, 0, 0])] == 0 and thr_theta(4, 2)[idx([0, 1, 0, 1])] == 0
    with pytest.raises(ValueError):
        thr_theta(3, 1)


def test_covariance_examples():
    assert covariance(parity(4), parity(4)) == 1
    zero = ZeroOneFunction(3, [0] * 8)
    assert covariance(maj_a(3, 1), zero) == 0
    assert covariance(maj_a(2, 1), maj_a(2, 1)) == Fraction(3, 4)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n),
    st.lists(st.integers(0, 1), min_size=1 << n, max_size=1 << n))))
def test_covariance_properties(args):
    n = len(args[0]).bit_length() - 1
    f, g = ZeroOneFunction(n, args[0]), ZeroOneFunction(n, args[1])
    assert covariance(f, g) == covariance(g, f)
    assert 0 <= covariance(f, g) <= 2
    mean = Fraction(int((1 - 2 * f.values.astype(int)).sum()), 1 << n)
    assert covariance(f, f) == 1 - mean ** 2


def test_xor_examples():
    assert xor_shifted_majorities(3, [1]) == maj_a(3, 1)
    assert not xor_shifted_majorities(2, [2, 2]).values.any()
    assert xor_shifted_majorities(2, [1, 1])([1, 1, 1, 1]) == 0


def test_fact62():
    for n in range(2, 13, 2):
        assert fact62_check(n).passed
    assert fact62_check(3).status == "not-applicable"


def test_fact64():
    assert binomial_tail(4, 2) == Fraction(1, 8)
    assert binomial_tail(7, 0) == 1
    for n in range(1, 41):
        assert fact64_check(n).passed
    r = fact64_check(16)
    a = r.quantities["least_a"]
    assert binomial_tail(16, a) <= Fraction(1, 16) < binomial_tail(16, a - 1)


def test_fact63_examples():
    rng = np.random.default_rng(3)
    f = ZeroOneFunction(4, rng.integers(0, 2, 16))
    r = fact63_check(f, 2)
    assert r.passed and r.quantities["probability"] == Fraction(2, 3) and r.quantities["partitions"] == 3
    assert fact63_check(ZeroOneFunction(4, [0] * 16), 2).passed
    assert fact63_check(parity(6), 2).quantities["level_sum"] == 0


@pytest.mark.parametrize("k,n", [(2, 2), (2, 3), (2, 4), (3, 3)])
def test_fact63_random(k, n):
    rng = np.random.default_rng(100 * k + n)
    for _ in range(200 if k * n <= 8 else 20):
        assert fact63_check(ZeroOneFunction(k * n, rng.integers(0, 2, 1 << (k * n))), k).passed


def test_lemma61_examples():
    g = xor_shifted_majorities(4, [2, 2])
    r = lemma61_harness(explicit([g.e_lift()]), 2, 4)
    assert r.status == "diagnostic" and r.quantities["max_covariance"] > 0
    r = lemma61_harness(explicit([ZeroOneFunction(8, [0] * 256).e_lift()]), 2, 4)
    assert r.quantities["max_covariance"] == 0 and r.quantities["mk"] == 0 and not r.quantities["flag"]
    r = lemma61_harness(explicit([parity(8)]), 2, 4)
    assert r.quantities["mk"] == 0 and not r.quantities["flag"]
