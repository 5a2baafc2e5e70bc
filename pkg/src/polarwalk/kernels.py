"""Backend selection for the walk kernels.

The compiled extension is used when it imports; ``POLARWALK_PURE=1`` forces
the numpy fallback.  Both produce identical outputs.
"""
from __future__ import annotations

import os
from functools import lru_cache

import numpy as np

from . import _fallback
from .gf2m import TABLE_MAX_M, field
from .primitives import ConstantGenerator, KWiseGenerator, SeededGenerator, SmallBiasGenerator, UniformGenerator

try:
    if os.environ.get("POLARWALK_PURE") == "1":
        raise ImportError("pure backend requested")
    from . import _ext as _compiled
except ImportError:
    _compiled = None

BACKEND = "compiled" if _compiled is not None else "python"


def compiled_available() -> bool:
    return _compiled is not None


@lru_cache(maxsize=None)
def _padded_tables(m: int):
    # exp padded with zeros so that log[0] = 2*order makes any product with 0 vanish
    exp, log = field(m).tables()
    order = (1 << m) - 1
    exp_p = np.zeros(4 * order + 1, dtype=np.int64)
    exp_p[: 2 * order] = exp
    log_p = log.copy()
    log_p[0] = 2 * order
    return exp_p, log_p


def kernel_params(gen: SeededGenerator) -> dict:
    """Flat description of a primitive generator for the compiled kernel."""
    if isinstance(gen, ConstantGenerator):
        return {"kind": 0, "n": gen.n, "value_mask": gen.value_mask}
    if isinstance(gen, UniformGenerator):
        return {"kind": 1, "n": gen.n}
    if isinstance(gen, (KWiseGenerator, SmallBiasGenerator)):
        f = gen.field
        params = {"kind": 2 if isinstance(gen, KWiseGenerator) else 3, "n": gen.n, "m": gen.m,
                "t": getattr(gen, "t", 0), "poly": f.poly, "exp": None, "log": None}
        if f.m <= TABLE_MAX_M:
            params["exp"], params["log"] = _padded_tables(f.m)
        return params
    raise TypeError(f"no kernel for {type(gen).__name__}")


def _impl(backend: str | None):
    backend = backend or BACKEND
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled backend unavailable")
        return "compiled"
    if backend != "python":
        raise ValueError(f"unknown backend {backend!r}")
    return "python"


def gen_masks(gen: SeededGenerator, seeds, backend: str | None = None) -> np.ndarray:
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    if _impl(backend) == "compiled":
        return _compiled.gen_masks(kernel_params(gen), seeds)
    return _fallback.gen_masks(gen, seeds)


def walk_mc(gen: SeededGenerator, c: float, T: int, master: int, start: int, count: int,
            backend: str | None = None):
    """``(output masks, per-path residual sum_i (1-|a_i|), containment violations)``."""
    if _impl(backend) == "compiled":
        return _compiled.walk_mc(kernel_params(gen), float(c), int(T), gen.seed_len,
                                 master & (2 ** 64 - 1), int(start), int(count))
    return _fallback.walk_mc(gen, c, T, gen.seed_len, master, start, count)


def walk_exact(gen: SeededGenerator, c: float, T: int, backend: str | None = None):
    if _impl(backend) == "compiled":
        return _compiled.walk_exact(kernel_params(gen), float(c), int(T), gen.seed_len)
    return _fallback.walk_exact(gen, c, T, gen.seed_len)
