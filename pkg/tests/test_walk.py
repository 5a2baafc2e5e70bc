import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarwalk.boolean import parity
from polarwalk.config import ResourceError
from polarwalk.families import explicit
from polarwalk.f2poly import family_f2
from polarwalk.fractional import FractionalPRG, build_fracprg_mk
from polarwalk.primitives import constant_generator, kwise_generator, smallbias_generator, uniform_generator
from polarwalk.walk import (ComposedPRG, DirectPRG, WalkState, admissible, auto_k, build_prg_f2,
                            build_prg_levelk, build_prg_uptok, prg_fooling_error, residual_trajectory,
                            seed_ledger, walk_compose, walk_step)


def small_prg(t=1, T=8, c=0.5, n=4):
    inner = FractionalPRG(kwise_generator(n, t), c, 0.1, t + 1, 1.0, "mk")
    return ComposedPRG(inner, T, 0.3)


def test_walk_step_examples():
    s = walk_step(WalkState.start(3), [0.25] * 3)
    assert list(s.position) == [0.25] * 3
    s = walk_step(WalkState(np.array([1.0, -1.0])), [0.3, -0.7])
    assert list(s.position) == [1.0, -1.0]
    assert walk_step(WalkState(np.array([0.5])), [0.5]).position[0] == 0.75
    with pytest.raises(ValueError):
        walk_step(WalkState.start(2), [0.1])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=1, max_size=30))
def test_containment_property(pairs):
    a = np.array([pairs[0][0]])
    for _, y in pairs:
        a = walk_step(WalkState(a), [y]).position
        assert abs(a[0]) <= 1


def test_compose_degenerate_cases():
    inner = FractionalPRG(kwise_generator(6, 2), 1.0, 0.1, 3, 1.0, "mk")
    prg = walk_compose(inner, 0.2)
    assert prg.T == math.ceil(4 * math.log(2 * 6 / 0.2))
    for seed in (0, 5, (1 << prg.seed_len) - 1):
        pos = prg.run(seed).position
        assert np.all(np.abs(pos) == 1)
        assert np.array_equal(np.sign(pos), inner.base.sample(seed & 63))
    with pytest.raises(ValueError):
        walk_compose(inner, 0)


def test_exact_kernel_matches_reference_walk():
    prg = small_prg(t=2, T=3)
    masks, resid, viol = prg.exact_masks()
    assert viol == 0 and masks.size == 1 << prg.seed_len
    for seed in range(0, masks.size, 97):
        x = prg.sample(seed)
        assert sum(1 << i for i in range(4) if x[i] < 0) == masks[seed]
        pos = prg.run(seed).position
        assert resid[seed] == pytest.approx(float(np.sum(1 - np.abs(pos))), abs=1e-12)


def test_ledger_consistency():
    for prg in (small_prg(), build_prg_levelk(8, 3, 1, 0.25)):
        seed = (1 << prg.seed_len) - 1
        assert prg.run(seed).bits_consumed == prg.seed_len == prg.T * prg.step_seed_len
    with pytest.raises(ValueError):
        small_prg().run(1 << 16)


def test_monotone_polarization():
    for t, T, c in [(1, 8, 0.5), (2, 4, 0.3), (1, 6, 0.9)]:
        traj = residual_trajectory(small_prg(t, T, c))
        assert all(b <= a + 1e-12 for a, b in zip(traj, traj[1:]))
        assert traj[0] == 4


def test_levelk_examples():
    with pytest.raises(ValueError, match="k >= 3"):
        build_prg_levelk(8, 2, 1, 0.25)
    assert build_prg_levelk(8, 4, 1, 0.25).seed_len < build_prg_levelk(8, 3, 1, 0.25).seed_len
    prg = build_prg_levelk(8, 3, 1, 0.25)
    fam = family_f2(8, 2, mode="sample", count=100, seed=4)
    r = prg_fooling_error(prg, fam, mode="sampled", samples=1 << 17, seed=1)
    assert r.quantities["max_error"] <= 0.25 and r.quantities["containment_violations"] == 0


def test_uptok_examples():
    prg = build_prg_uptok(8, 5, 1, 0.3)
    fam = family_f2(8, 2, mode="sample", count=100, seed=4)
    r = prg_fooling_error(prg, fam, mode="sampled", samples=1 << 17, seed=2)
    assert r.quantities["max_error"] <= 0.3
    assert auto_k(8, 1, 0.3) == max(3, math.ceil(math.log2(3 / 0.3)))
    assert build_prg_uptok(8, None, 1, 0.3).ledger["k"] == auto_k(8, 1, 0.3)
    assert admissible(8, 5, 1, 0.3) and not admissible(8, 3, 1, 0.3)
    assert "warning" in build_prg_uptok(8, 3, 1, 0.3).ledger


def test_seed_ledger_matches_builds():
    for n, k, b, eps in [(8, 3, 1, 0.25), (8, 5, 1, 0.3), (16, 4, 2, 0.2), (64, 6, 1, 0.1)]:
        for mode, build in (("levelk", build_prg_levelk), ("uptok", build_prg_uptok)):
            prg = build(n, k, b, eps)
            led = seed_ledger(n, k, b, eps, mode)
            assert (led["T"], led["seed_len"]) == (prg.T, prg.seed_len)


def test_uptok_seed_below_levelk_at_scale():
    # the small-bias step costs 2 log2(n/delta) bits against (k-1) log2 n,
    # so the comparison turns once log n dominates log(1/delta)
    for n in (2 ** 10, 2 ** 20, 2 ** 30):
        for k in (5, 6, 8):
            assert seed_ledger(n, k, 1, 0.3, "uptok")["seed_len"] <= seed_ledger(n, k, 1, 0.3, "levelk")["seed_len"]


def test_f2_examples():
    prg = build_prg_f2(8, 2, 0.3)
    assert prg.T == 1777 and prg.seed_len == 49756
    with pytest.raises(ResourceError):
        build_prg_f2(8, 4, 0.3)
    p1 = build_prg_f2(8, 1, 0.3)
    fam = family_f2(8, 1)
    r = prg_fooling_error(p1, fam, mode="sampled", samples=1 << 16, seed=3)
    assert r.quantities["max_error"] <= 0.3
    assert r.quantities["max_error"] <= p1.inner.base.bias_bound + r.quantities["radius_3sigma"]


def test_direct_identity_and_worst_cases():
    r = prg_fooling_error(DirectPRG(uniform_generator(8)), explicit([parity(8)]), mode="exact")
    assert r.quantities["max_error"] == 0
    r = prg_fooling_error(DirectPRG(constant_generator(8)), explicit([parity(8)]), mode="exact")
    assert r.quantities["max_error"] == 1


def test_sampled_fooling_deterministic():
    prg = small_prg(t=2, T=20, c=0.4)
    fam = family_f2(4, 2)
    a = prg_fooling_error(prg, fam, mode="sampled", samples=5000, seed=77)
    b = prg_fooling_error(prg, fam, mode="sampled", samples=5000, seed=77)
    assert a.to_json(timing=False) == b.to_json(timing=False)
