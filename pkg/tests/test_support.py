import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from polarwalk.families import from_descriptor, level_counts, parse_descriptor
from polarwalk.report import ExperimentReport
from polarwalk.seeding import derive, derive_vec, mix64, mix64_vec, parse_seed, stream


def test_splitmix_reference_value():
    # first output of the reference splitmix64 generator seeded with 0
    assert mix64(0x9E3779B97F4A7C15) == 0xE220A8397B1DCDAF


@given(st.integers(0, 2 ** 64 - 1), st.lists(st.integers(0, 2 ** 40), min_size=1, max_size=20))
def test_vectorised_derivation_matches_scalar(master, counters):
    got = derive_vec(master, np.array(counters, dtype=np.uint64))
    assert [int(v) for v in got] == [derive(master, c) for c in counters]
    assert [int(v) for v in mix64_vec(np.array(counters, dtype=np.uint64))] == [mix64(c) for c in counters]


def test_parse_seed_and_streams():
    assert parse_seed("0x5EED") == parse_seed("5eed") == 0x5EED
    assert parse_seed("") == 0
    with pytest.raises(ValueError):
        parse_seed("xyz")
    a, b = stream(7, 3), stream(7, 3)
    assert [a.next64() for _ in range(4)] == [b.next64() for _ in range(4)]
    assert stream(7, 3).bits(100) < 2 ** 100


def test_descriptors():
    assert parse_descriptor("f2:n=8,d=2,sample=5,seed=7") == ("f2", {"n": "8", "d": "2", "sample": "5", "seed": "7"})
    for text, size in [("parity:n=3", 16), ("all:n=2", 16), ("f2:n=3,d=1", 16), ("const:n=4", 2)]:
        fam = from_descriptor(text)
        assert len(fam) == size and fam.descriptor == text
    with pytest.raises(ValueError):
        from_descriptor("bogus:n=2")
    with pytest.raises(ValueError):
        parse_descriptor("f2:n")
    assert list(level_counts(4)) == [1, 4, 6, 4, 1]


def test_report_json_roundtrip():
    rep = ExperimentReport("x", "pass", quantities={"v": Fraction(1, 3), "a": np.float64(0.5), "i": np.int64(3)},
                           params={"n": 2}, wall_time=1.5)
    d = json.loads(rep.to_json())
    assert d["wall_time"] == 1.5 and "wall_time" not in json.loads(rep.to_json(timing=False))
    assert ExperimentReport.from_dict(d).to_json() == rep.to_json()
    assert rep.passed
    with pytest.raises(ValueError):
        ExperimentReport("x", "maybe")
