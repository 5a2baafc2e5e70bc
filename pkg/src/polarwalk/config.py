"""Resource caps and named constants.

Caps can be overridden through environment variables; constants hidden in
asymptotic statements are collected in :class:`Constants` so every report can
echo the values it was built with.
"""
from __future__ import annotations

import os
from dataclasses import asdict, dataclass


class ResourceError(RuntimeError):
    """A requested computation exceeds a configured cap."""


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return default if raw is None else int(raw)


def max_n() -> int:
    """Largest variable count for exhaustive truth-table work."""
    return _env_int("POLARWALK_MAX_N", 20)


def max_seed_bits() -> int:
    """Largest seed space (in bits) enumerated in exact mode."""
    return _env_int("POLARWALK_MAX_SEED_BITS", 26)


def max_walk_steps() -> int:
    return _env_int("POLARWALK_MAX_WALK_STEPS", 1 << 21)


MAX_LP_N = 14
EXACT_CLOSURE_N = 12


def check_n(n: int, cap: int | None = None) -> None:
    cap = max_n() if cap is None else cap
    if n > cap:
        raise ResourceError(f"n={n} exceeds the exhaustive cap {cap}")


def check_seed_bits(bits: int) -> None:
    cap = max_seed_bits()
    if bits > cap:
        raise ResourceError(
            f"exact enumeration of 2^{bits} seeds exceeds the cap 2^{cap}; "
            "use sampled mode"
        )


@dataclass(frozen=True)
class Constants:
    """Explicit values for the O/Theta constants of the constructions."""

    c_steps: float = 4.0  # walk length T = ceil(c_steps * ln(2n/eps) / p)
    budget_split: float = 0.5  # share of the fractional error given to the high-order tail
    delta_const: float = 1.0  # per-step error delta = delta_const * (eps / (b^2 ln(n/eps)))^(k/(k-2))
    k_const: float = 2.0  # F2 recipe: k = max(3, ceil(k_const * log2(log2(n)/eps)))
    b_const: float = 2.0 ** -6  # F2 recipe: b = max(1, b_const * log2(log2(n)/eps) * 2^(3d))
    autok_const: float = 1.0  # up-to-k recipe: k = max(3, ceil(autok_const * log2(b log2(n)/eps)))
    admissible_const: float = 1.0  # eps >= b log2(n) 2^(-admissible_const * k)
    c_range: float = 1.0  # correlation harness: |a - n/2| <= c_range * sqrt(k n ln n)
    c_cov: float = 1.0  # correlation harness conclusion constant

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT_CONSTANTS = Constants()


class ParseError(ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
