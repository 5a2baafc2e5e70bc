"""Polarizing random walk: compose fractional PRG steps into a Boolean PRG.

Step rule ``a <- a + (1 - |a|) * y`` with ``y`` a fresh fractional sample;
after ``T`` steps the output is the sign of ``a`` (``a_i >= 0`` gives +1).
Each step is an instance of the recentering identity with centre ``a`` and
radius ``1 - |a|``, so the fractional PRG's guarantee applies to every step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import kernels
from .config import DEFAULT_CONSTANTS, Constants, ResourceError, check_seed_bits, max_walk_steps
from .fractional import FractionalPRG, _scale, build_fracprg_l1, build_fracprg_mk
from .boolean import wht_inverse
from .primitives import output_histogram
from .report import ExperimentReport
from .seeding import derive

MC_BLOCK = 1 << 15
LEVEL2_REASON = (
    "k <= 2 is not supported: with only a level-2 bound the tail budget forces "
    "p ~ eps^(2/k) / b^2, and the per-step error delta must shrink like "
    "(eps p / log(n/eps)), which for k <= 2 cannot be met by any c; "
    "the construction needs k >= 3"
)


@dataclass
class WalkState:
    position: np.ndarray
    step: int = 0
    bits_consumed: int = 0

    @classmethod
    def start(cls, n: int) -> "WalkState":
        return cls(np.zeros(n, dtype=np.float64))


def walk_step(state: WalkState, y, bits: int = 0) -> WalkState:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != state.position.shape:
        raise ValueError("step vector has the wrong dimension")
    if np.any(np.abs(y) > 1):
        raise ValueError("step vector outside [-1,1]^n")
    a = state.position
    return WalkState(a + (1.0 - np.abs(a)) * y, state.step + 1, state.bits_consumed + bits)


@dataclass
class ComposedPRG:
    inner: FractionalPRG
    T: int
    eps_final: float
    constants: Constants = DEFAULT_CONSTANTS
    ledger: dict = field(default_factory=dict)
    mode: str = "compose"

    @property
    def n(self) -> int:
        return self.inner.n

    @property
    def step_seed_len(self) -> int:
        return self.inner.seed_len

    @property
    def seed_len(self) -> int:
        return self.T * self.inner.seed_len

    def run(self, seed: int) -> WalkState:
        """Walk with an explicit composed seed (``seed_len`` bits, step t uses bits [t s, (t+1) s))."""
        if seed < 0 or seed >> self.seed_len:
            raise ValueError(f"seed must be a {self.seed_len}-bit integer")
        s = self.step_seed_len
        mask = (1 << s) - 1
        state = WalkState.start(self.n)
        for t in range(self.T):
            r = (seed >> (t * s)) & mask
            state = walk_step(state, self.inner.sample(r), bits=s)
        return state

    def sample(self, seed: int) -> np.ndarray:
        pos = self.run(seed).position
        return np.where(pos < 0, -1, 1).astype(np.int8)

    def exact_masks(self, backend: str | None = None):
        check_seed_bits(self.seed_len)
        return kernels.walk_exact(self.inner.base, self.inner.c, self.T, backend)

    def mc_masks(self, samples: int, master: int, start: int = 0, backend: str | None = None):
        outs, res, viol = [], [], 0
        for lo in range(start, start + samples, MC_BLOCK):
            cnt = min(MC_BLOCK, start + samples - lo)
            o, r, v = kernels.walk_mc(self.inner.base, self.inner.c, self.T, master, lo, cnt, backend)
            outs.append(o)
            res.append(r)
            viol += v
        return np.concatenate(outs), np.concatenate(res), viol

    def emit_masks(self, count: int, master: int) -> np.ndarray:
        """Output vector j comes from the per-step splitmix stream of ``derive(master, j)``."""
        return self.mc_masks(count, master)[0]

    def describe(self) -> dict:
        return {"mode": self.mode, "n": self.n, "T": self.T, "seed_len": self.seed_len,
                "step_seed_len": self.step_seed_len, "eps_final": self.eps_final,
                "inner": self.inner.describe(), "ledger": dict(self.ledger),
                "constants": self.constants.as_dict()}


def walk_steps(n: int, eps: float, p: float, c_steps: float) -> int:
    if p <= 0:
        raise ValueError("noticeability must be positive")
    return math.ceil(c_steps * math.log(2 * n / eps) / p)


def walk_compose(fprg: FractionalPRG, eps_final: float, c_steps: float | None = None,
                 constants: Constants = DEFAULT_CONSTANTS) -> ComposedPRG:
    if eps_final <= 0:
        raise ValueError("eps_final must be positive")
    c_steps = constants.c_steps if c_steps is None else c_steps
    if c_steps <= 0:
        raise ValueError("C_steps must be positive")
    T = walk_steps(fprg.n, eps_final, fprg.p, c_steps)
    if T > max_walk_steps():
        raise ResourceError(f"walk needs T={T} steps, above the cap {max_walk_steps()}")
    ledger = {"T": T, "p": fprg.p, "per_step_eps": fprg.eps_target,
              "walk_error_bound": T * fprg.eps_target, "seed_len": T * fprg.seed_len,
              "rounding": "deterministic sign; residual sum_i (1-|a_i|) measured at verification"}
    return ComposedPRG(fprg, T, eps_final, constants, ledger)


def per_step_delta(n: int, k: int, b: float, eps: float, constants: Constants) -> float:
    """delta = C (eps / (b^2 ln(n/eps)))^(k/(k-2))."""
    if k <= 2:
        raise ValueError(LEVEL2_REASON)
    base = eps / (b * b * math.log(n / eps))
    delta = constants.delta_const * base ** (k / (k - 2))
    if not delta > 1e-300:
        raise ResourceError("per-step error underflows")
    return min(delta, 0.5)


def _check(n: int, b: float, eps: float):
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0,1)")
    if b < 1:
        raise ValueError("b must be >= 1")
    if n < 2:
        raise ValueError("n must be >= 2")


def build_prg_levelk(n: int, k: int, b: float, eps: float,
                     constants: Constants = DEFAULT_CONSTANTS) -> ComposedPRG:
    """Walk over the (k-1)-wise fractional PRG for classes with closure M_k <= b^k."""
    _check(n, b, eps)
    if k <= 2:
        raise ValueError(LEVEL2_REASON)
    delta = per_step_delta(n, k, b, eps, constants)
    prg = walk_compose(build_fracprg_mk(n, k, b, delta, constants), eps, constants=constants)
    prg.mode = "levelk"
    prg.ledger.update({"k": k, "b": b, "delta": delta, "target_eps": eps})
    return prg


def auto_k(n: int, b: float, eps: float, constants: Constants = DEFAULT_CONSTANTS) -> int:
    return max(3, math.ceil(constants.autok_const * math.log2(b * math.log2(n) / eps)))


def admissible(n: int, k: int, b: float, eps: float, constants: Constants = DEFAULT_CONSTANTS) -> bool:
    return eps >= b * math.log2(n) * 2.0 ** (-constants.admissible_const * k)


def build_prg_uptok(n: int, k: int | None, b: float, eps: float,
                    constants: Constants = DEFAULT_CONSTANTS) -> ComposedPRG:
    """Walk over the small-bias fractional PRG for classes with L_{1,i} <= b^i, i < k."""
    _check(n, b, eps)
    auto = k is None
    if auto:
        k = auto_k(n, b, eps, constants)
    if k <= 2:
        raise ValueError(LEVEL2_REASON)
    delta = per_step_delta(n, k, b, eps, constants)
    prg = walk_compose(build_fracprg_l1(n, k, b, delta, constants), eps, constants=constants)
    prg.mode = "uptok"
    ok = admissible(n, k, b, eps, constants)
    prg.ledger.update({"k": k, "k_auto": auto, "b": b, "delta": delta, "target_eps": eps,
                       "admissible": ok})
    if not ok:
        prg.ledger["warning"] = (f"eps={eps} is below b*log2(n)*2^-k = "
                                 f"{b * math.log2(n) * 2.0 ** -k:.4g}; built anyway")
    return prg


def seed_ledger(n: int, k: int, b: float, eps: float, mode: str = "levelk",
                constants: Constants = DEFAULT_CONSTANTS) -> dict:
    """Closed-form T and seed length of a levelk / uptok build, without building it.

    Mirrors the builders step for step but skips generator construction, so
    it also works beyond the 64-coordinate limit of the packed kernels.
    """
    _check(n, b, eps)
    if k <= 2:
        raise ValueError(LEVEL2_REASON)
    delta = per_step_delta(n, k, b, eps, constants)
    split = constants.budget_split
    c = _scale(split * delta, k, b)[0]
    m_kw = max(1, math.ceil(math.log2(n)))
    if mode == "levelk":
        step = (k - 1) * m_kw
    elif mode == "uptok":
        c = min(c, 1 / (2 * b))
        sb_delta = (1 - split) * delta
        step = m_kw if sb_delta >= 1 else 2 * max(1, math.ceil(math.log2(n / sb_delta)))
    else:
        raise ValueError(f"unknown mode {mode!r}")
    T = walk_steps(n, eps, c * c, constants.c_steps)
    return {"mode": mode, "n": n, "k": k, "c": c, "delta": delta, "T": T,
            "step_seed_len": step, "seed_len": T * step}


def f2_parameters(n: int, d: int, eps: float, constants: Constants = DEFAULT_CONSTANTS) -> dict:
    if d < 1:
        raise ValueError("d must be >= 1")
    L = math.log2(math.log2(n) / eps)
    if L <= 0:
        raise ValueError("eps too large for the recipe (log2(log2(n)/eps) <= 0)")
    k = max(3, math.ceil(constants.k_const * L))
    b = max(1.0, constants.b_const * L * 2.0 ** (3 * d))
    if not math.isfinite(b):
        raise ResourceError("b overflows")
    return {"L": L, "k": k, "b": b, "b_level_bound": float(k * 2 ** (3 * d))}


def build_prg_f2(n: int, d: int, eps: float, constants: Constants = DEFAULT_CONSTANTS) -> ComposedPRG:
    """PRG for degree-d polynomials over F2 via the up-to-level-k construction."""
    _check(n, 1.0, eps)
    par = f2_parameters(n, d, eps, constants)
    prg = build_prg_uptok(n, par["k"], par["b"], eps, constants)
    if prg.inner.c < 1e-12:
        raise ResourceError("scale c below resolution")
    prg.mode = "f2"
    prg.ledger.update({"d": d, "L": par["L"], "b_recipe": par["b"],
                       "b_level_bound": par["b_level_bound"],
                       "b_source": "recipe b_const*L*2^(3d); level-mass bound (k 2^(3d)) recorded"})
    return prg


# ---- verification ---------------------------------------------------------------

def _tables(family):
    fes = family.expansions() if hasattr(family, "expansions") else list(family)
    rows = [np.rint(wht_inverse(g)).astype(np.int64) for g in fes]
    return np.array(rows), fes


def prg_fooling_error(prg, family, mode: str = "auto", samples: int = 10 ** 6,
                      seed: int = 0, backend: str | None = None) -> ExperimentReport:
    """max over members of |E f(G(U)) - E f(U_n)|, exact or Monte Carlo."""
    tables, fes = _tables(family)
    n = prg.n
    means = [Fraction(int(v), 1 << n) for v in tables.sum(axis=1)]
    if mode == "auto":
        mode = "exact" if prg.seed_len <= kernels_seed_cap() else "sampled"
    if mode == "exact":
        masks, resid, viol = prg.exact_masks(backend)
        total = masks.size
    elif mode == "sampled":
        masks, resid, viol = prg.mc_masks(samples, seed, backend=backend)
        total = samples
    else:
        raise ValueError(f"unknown mode {mode!r}")
    hist = output_histogram(masks, n)
    sums = tables @ hist  # exact integer sums of f over the outputs
    errs = [abs(Fraction(int(s), total) - mu) for s, mu in zip(sums, means)]
    worst = int(np.argmax([float(e) for e in errs]))
    err = float(errs[worst])
    q = {"max_error": err, "target": prg.eps_final, "worst_member": worst, "samples": total,
         "residual_mean": math.fsum(resid) / total, "containment_violations": viol,
         "seed_len": prg.seed_len, "T": getattr(prg, "T", None)}
    notes = []
    if mode == "sampled":
        p = np.array([int(s) for s in sums], dtype=np.float64) / total
        # +-1 valued: variance of f(X) is 1 - mean^2
        sig = np.sqrt(np.maximum(1.0 - p * p, 0.0) / total)
        q["radius_3sigma"] = float(3 * sig.max())
        notes.append("Monte Carlo over splitmix-derived step seeds")
    if isinstance(prg, ComposedPRG):
        q["ledger"] = prg.ledger
    fmode = "exact" if mode == "exact" and getattr(family, "mode", "exact") == "exact" else "sampled"
    return ExperimentReport("prg_fooling_error", "pass" if err <= prg.eps_final else "fail",
                            quantities=q,
                            params={"prg": prg.describe() if hasattr(prg, "describe") else {},
                                    "family": getattr(family, "descriptor", "explicit"),
                                    "family_size": len(fes)},
                            mode=fmode, notes=notes)


def kernels_seed_cap() -> int:
    from .config import max_seed_bits
    return max_seed_bits()


def residual_trajectory(prg: ComposedPRG) -> list:
    """E[sum_i (1 - |a_i|)] after each step, over the full composed seed space."""
    check_seed_bits(prg.seed_len)
    total = 1 << prg.seed_len
    s = prg.step_seed_len
    u = np.arange(total, dtype=np.uint64)
    pos = np.zeros((total, prg.n))
    out = [float(prg.n)]
    c = prg.inner.c
    for t in range(prg.T):
        r = (u >> np.uint64(t * s)) & np.uint64((1 << s) - 1)
        bits = (prg.inner.base.sample_masks(r)[:, None] >> np.arange(prg.n)) & 1
        pos = pos + (1.0 - np.abs(pos)) * np.where(bits == 1, -c, c)
        out.append(math.fsum((1.0 - np.abs(pos)).ravel()) / total)
    return out


class DirectPRG:
    """A primitive generator viewed as a Boolean PRG (for identity/worst cases)."""

    def __init__(self, gen, eps_final: float = 0.0):
        self.gen = gen
        self.eps_final = eps_final
        self.T = 1

    @property
    def n(self):
        return self.gen.n

    @property
    def seed_len(self):
        return self.gen.seed_len

    def exact_masks(self, backend=None):
        m = self.gen.all_masks()
        return m, np.zeros(m.size), 0

    def mc_masks(self, samples, master, start=0, backend=None):
        from .seeding import derive_vec
        s = derive_vec(master, np.arange(start, start + samples))
        if self.gen.seed_len < 64:
            s &= np.uint64((1 << self.gen.seed_len) - 1)
        m = self.gen.sample_masks(s)
        return m, np.zeros(m.size), 0

    def describe(self):
        return {"mode": "direct", "generator": self.gen.describe()}


__all__ = ["WalkState", "walk_step", "walk_compose", "ComposedPRG", "build_prg_levelk",
           "build_prg_uptok", "build_prg_f2", "prg_fooling_error", "residual_trajectory",
           "auto_k", "admissible", "seed_ledger", "f2_parameters", "per_step_delta", "DirectPRG", "derive"]
