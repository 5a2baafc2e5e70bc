"""Fractional PRGs: a +-1 base generator scaled by c, so outputs lie in {-c,c}^n."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CONSTANTS, Constants, check_seed_bits
from .primitives import SeededGenerator, kwise_generator, output_histogram, parity_sums, smallbias_generator
from .boolean import popcounts
from .report import ExperimentReport
from .seeding import derive_vec

_DESIGN_SLACK = 1e-12


@dataclass
class FractionalPRG:
    base: SeededGenerator
    c: float
    eps_target: float
    k: int
    b: float
    kind: str
    split: float = 0.5
    ledger: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.c <= 1:
            raise ValueError("scale c must lie in [0,1]")

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def p(self) -> float:
        """Noticeability: every coordinate has |X_i| = c, so E[X_i^2] = c^2."""
        return self.c * self.c

    @property
    def seed_len(self) -> int:
        return self.base.seed_len

    def sample(self, seed: int) -> np.ndarray:
        return self.c * self.base.sample(seed).astype(np.float64)

    def describe(self) -> dict:
        return {"kind": self.kind, "n": self.n, "k": self.k, "b": self.b, "c": self.c,
                "p": self.p, "eps_target": self.eps_target, "seed_len": self.seed_len,
                "base": self.base.describe(), "ledger": dict(self.ledger)}


def _scale(eps_high: float, k: int, b: float) -> tuple[float, float]:
    # tightest c with (c/(1-c))^k b^k <= eps_high, capped at 1/2
    r = eps_high ** (1.0 / k) / b
    return min(0.5, r / (1 + r)), r


def _check_args(n: int, k: int, b: float, eps: float):
    if k < 1:
        raise ValueError("k must be >= 1")
    if b < 1:
        raise ValueError("b must be >= 1")
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0,1)")
    if k - 1 > n:
        raise ValueError(f"k-1={k - 1} exceeds n={n}")


def build_fracprg_mk(n: int, k: int, b: float, eps: float, constants: Constants = DEFAULT_CONSTANTS,
                     c_override: float | None = None) -> FractionalPRG:
    """(k-1)-wise independent signs scaled by c; fools classes with closure M_k <= b^k.

    Low-order error is zero (exact independence); the tail costs
    ``(c/(1-c))^k b^k``, which the choice of c keeps below ``split * eps``.
    """
    _check_args(n, k, b, eps)
    split = constants.budget_split
    c, r = _scale(split * eps, k, b)
    if c_override is not None:
        c = c_override
    tail = (c / (1 - c)) ** k * b ** k if c < 1 else math.inf
    if c_override is None:
        assert tail <= split * eps * (1 + _DESIGN_SLACK), "design inequality violated"
    ledger = {"r": r, "tail_bound": tail, "low_order_bound": 0.0, "design_error": tail,
              "c_source": "override" if c_override is not None else "formula"}
    return FractionalPRG(kwise_generator(n, k - 1), c, eps, k, b, "mk", split, ledger)


def build_fracprg_l1(n: int, k: int, b: float, eps: float,
                     constants: Constants = DEFAULT_CONSTANTS) -> FractionalPRG:
    """Small-bias signs scaled by c; fools classes with L_{1,i} <= b^i for i < k.

    Low-order error is at most ``delta * sum_{i<k} (bc)^i`` with
    ``delta = (1-split) eps`` and ``bc <= 1/2``.
    """
    _check_args(n, k, b, eps)
    split = constants.budget_split
    c, r = _scale(split * eps, k, b)
    c = min(c, 1 / (2 * b))
    tail = (c / (1 - c)) ** k * b ** k
    assert tail <= split * eps * (1 + _DESIGN_SLACK), "design inequality violated"
    delta = (1 - split) * eps
    low = delta * sum((b * c) ** i for i in range(1, k))
    assert low <= delta * (1 + _DESIGN_SLACK)
    base = smallbias_generator(n, delta)
    ledger = {"r": r, "tail_bound": tail, "low_order_bound": low, "delta": delta,
              "design_error": tail + low, "c_source": "formula",
              "seed_note": "powering small-bias space: O(log n + log(1/delta)) bits"}
    return FractionalPRG(base, c, eps, k, b, "l1", split, ledger)


def _masks_for(gen: SeededGenerator, mode: str, samples: int, seed: int) -> tuple[np.ndarray, int]:
    if mode == "exact":
        check_seed_bits(gen.seed_len)
        return gen.all_masks(), 1 << gen.seed_len
    if mode == "sampled":
        s = derive_vec(seed, np.arange(samples))
        if gen.seed_len < 64:
            s &= np.uint64((1 << gen.seed_len) - 1)
        return gen.sample_masks(s), samples
    raise ValueError(f"unknown mode {mode!r}")


def fooling_error(fprg: FractionalPRG, family, mode: str = "exact", samples: int = 1 << 16,
                  seed: int = 0) -> ExperimentReport:
    """max over members of |E f(X) - f(0)|.

    ``E f(cY) = sum_S fhat(S) c^|S| E[Y^S]`` and the parity moments of the
    base distribution come exactly from a WHT of its output histogram.
    """
    fes = family.expansions() if hasattr(family, "expansions") else list(family)
    n = fprg.n
    masks, total = _masks_for(fprg.base, mode, samples, seed)
    moments = parity_sums(output_histogram(masks, n)) / float(total)
    weights = moments * fprg.c ** popcounts(n)
    weights[0] = 0.0  # f(0) = fhat(empty) cancels the empty set
    errs = [abs(math.fsum(g.coeffs * weights)) for g in fes]
    worst = int(np.argmax(errs)) if errs else 0
    err = errs[worst] if errs else 0.0
    q = {"max_error": err, "target": fprg.eps_target, "worst_member": worst,
         "seeds": total, "noticeability": fprg.p, "design_error": fprg.ledger.get("design_error")}
    notes = []
    if mode == "sampled":
        q["radius_3sigma"] = 3.0 / math.sqrt(total)
        notes.append("sampled seeds: max_error is an estimate")
    return ExperimentReport("fooling_error", "pass" if err <= fprg.eps_target else "fail",
                            quantities=q,
                            params={"fprg": fprg.describe(),
                                    "family": getattr(family, "descriptor", "explicit"),
                                    "family_size": len(fes)},
                            mode="exact" if mode == "exact" and getattr(family, "mode", "exact") == "exact"
                            else "sampled", notes=notes)


def second_moments(fprg: FractionalPRG) -> np.ndarray:
    """E[X_i^2] over the full seed space (each equals c^2).

    Computed as c^2 times the exact share of rows with |X_i| = c, so that no
    floating-point averaging error creeps in.
    """
    masks = fprg.base.all_masks()
    n = fprg.n
    vals = np.where((masks[:, None] >> np.arange(n)) & 1, -fprg.c, fprg.c)
    share = (np.abs(vals) == fprg.c).sum(axis=0) / masks.size
    return fprg.c * fprg.c * share
