"""Compiled vs pure-Python kernels on the walk Monte Carlo and generator evaluation.

Usage: python3 benchmarks/bench_kernels.py [--paths N] [--repeat R]
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from polarwalk import kernels
from polarwalk.walk import build_prg_f2, build_prg_levelk


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--paths", type=int, default=2000, help="walk paths per case")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = ["python"] + (["compiled"] if kernels.compiled_available() else [])
    if len(backends) == 1:
        print("compiled extension not available: timing the fallback only")

    cases = [("f2 n=8 d=2 eps=0.3", build_prg_f2(8, 2, 0.3)),
             ("levelk n=8 k=4 eps=0.25", build_prg_levelk(8, 4, 1, 0.25))]
    print(f"{'case':<28}{'backend':<10}{'steps/s':>14}{'ns/step':>10}")
    for name, prg in cases:
        gen, c, T = prg.inner.base, prg.inner.c, prg.T
        ref = None
        for be in backends:
            out = kernels.walk_mc(gen, c, T, 0x5EED, 0, args.paths, be)
            if ref is None:
                ref = out
            elif not (np.array_equal(out[0], ref[0]) and out[1].tobytes() == ref[1].tobytes()):
                raise SystemExit(f"{name}: backends disagree")
            dt = _best(lambda: kernels.walk_mc(gen, c, T, 0x5EED, 0, args.paths, be), args.repeat)
            steps = args.paths * T
            print(f"{name:<28}{be:<10}{steps / dt:>14.3e}{1e9 * dt / steps:>10.1f}")

    gen = build_prg_f2(8, 2, 0.3).inner.base
    seeds = np.arange(1 << 18, dtype=np.uint64)
    for be in backends:
        dt = _best(lambda: kernels.gen_masks(gen, seeds, be), args.repeat)
        print(f"{'smallbias masks 2^18':<28}{be:<10}{seeds.size / dt:>14.3e}{1e9 * dt / seeds.size:>10.1f}")


if __name__ == "__main__":
    main()
