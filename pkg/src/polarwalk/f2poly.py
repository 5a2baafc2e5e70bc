"""Polynomials over the two-element field and their +-1 lifts.

Input identification: the F2 value of ``x_{i+1}`` is bit ``i`` of a
truth-table index, so bit 1 corresponds to the +-1 value -1 (and 0 to +1).
"""
from __future__ import annotations

from math import comb

import numpy as np

from .boolean import TruthTable, popcounts, wht_forward
from .config import ParseError, ResourceError, check_n
from .families import FunctionFamily
from .report import ExperimentReport
from .seeding import stream
from .spectral import class_metrics


class F2Polynomial:
    """Sum of monomials; each monomial is a bitmask of variable indices."""

    __slots__ = ("n", "monomials")

    def __init__(self, n: int, monomials):
        masks = []
        for mono in monomials:
            mask = mono if isinstance(mono, int) else _mask_of(mono)
            if mask >> n:
                raise ValueError(f"monomial uses a variable beyond x{n}")
            masks.append(mask)
        if len(set(masks)) != len(masks):
            raise ValueError("duplicate monomials")
        self.n = n
        self.monomials = frozenset(masks)

    @property
    def degree(self) -> int:
        return max((bin(m).count("1") for m in self.monomials), default=0)

    def __eq__(self, other):
        return isinstance(other, F2Polynomial) and (self.n, self.monomials) == (other.n, other.monomials)

    def __hash__(self):
        return hash((self.n, self.monomials))

    def __add__(self, other: "F2Polynomial") -> "F2Polynomial":
        return F2Polynomial(max(self.n, other.n), sorted(self.monomials ^ other.monomials))

    def __repr__(self):
        return f"F2Polynomial(n={self.n}, {format_poly(self).strip() or '0'!r})"


def _mask_of(indices) -> int:
    # 0-based variable indices
    mask = 0
    for i in indices:
        if mask >> i & 1:
            raise ValueError("repeated variable inside a monomial")
        mask |= 1 << i
    return mask


def f2_eval(p: F2Polynomial, bits) -> int:
    bits = list(bits)
    if len(bits) != p.n:
        raise ValueError(f"expected {p.n} bits, got {len(bits)}")
    x = sum(1 << i for i, b in enumerate(bits) if b)
    return sum((x & m) == m for m in p.monomials) & 1


def eval_table(p: F2Polynomial) -> np.ndarray:
    """p at every index (0/1 array)."""
    m = np.arange(1 << p.n)
    out = np.zeros(1 << p.n, dtype=np.int8)
    for mono in p.monomials:
        out ^= ((m & mono) == mono).astype(np.int8)
    return out


def lift_pm(p: F2Polynomial) -> TruthTable:
    check_n(p.n)
    return TruthTable(p.n, 1 - 2 * eval_table(p))


def from_table(n: int, bits) -> F2Polynomial:
    """Algebraic normal form of a 0/1 table (Moebius transform)."""
    a = np.array(bits, dtype=np.int8) & 1
    h = 1
    while h < a.size:
        v = a.reshape(-1, 2, h)
        v[:, 1, :] ^= v[:, 0, :]
        h *= 2
    return F2Polynomial(n, [int(m) for m in np.nonzero(a)[0]])


def all_monomials(n: int, d: int) -> list:
    masks = [m for m in range(1 << n) if bin(m).count("1") <= d]
    return sorted(masks, key=lambda m: (bin(m).count("1"), m))


def family_f2(n: int, d: int, mode: str = "enumerate", count: int = 0, seed: int = 0,
              budget: int = 1 << 16) -> FunctionFamily:
    """Degree-<=d polynomials, enumerated or sampled uniformly.

    Sampling draws member ``j`` from stream ``(seed, j)``: each monomial is
    present independently with probability 1/2, i.e. uniform over the class.
    """
    check_n(n)
    monos = all_monomials(n, d)
    if mode == "enumerate":
        if len(monos) > 62 or (1 << len(monos)) > budget:
            raise ResourceError(f"2^{len(monos)} polynomials exceed the budget {budget}")
        polys = [F2Polynomial(n, [m for i, m in enumerate(monos) if code >> i & 1])
                 for code in range(1 << len(monos))]
        fmode = "exact"
    elif mode == "sample":
        polys = []
        for j in range(count):
            word = stream(seed, j).bits(len(monos))
            polys.append(F2Polynomial(n, [m for i, m in enumerate(monos) if word >> i & 1]))
        fmode = "sampled"
    else:
        raise ValueError(f"unknown mode {mode!r}")
    desc = f"f2:n={n},d={d}" + (f",sample={count},seed={seed}" if mode == "sample" else "")
    return FunctionFamily("f2", [lift_pm(p) for p in polys], closed_under_restrictions=True,
                          closed_under_negations=True, mode=fmode, descriptor=desc, extra=polys)


def prop51_bound(d: int, k: int) -> float:
    return float((k * 2 ** (3 * d)) ** k)


def prop51_check(family: FunctionFamily, d: int, k: int) -> ExperimentReport:
    """Measured class L_{1,k} against (k 2^{3d})^k; M_k recorded alongside."""
    metrics = class_metrics(family, k)
    bound = prop51_bound(d, k)
    status = "pass" if metrics.l1 <= bound else "fail"
    notes = ["the bound is imported, not proved here: a failure indicates an implementation bug"]
    return ExperimentReport(
        "prop51", status,
        quantities={"l1_max": metrics.l1, "mk_max": metrics.mk, "bound": bound},
        params={"n": family.n, "d": d, "k": k, "family": family.descriptor,
                "family_size": len(family)},
        mode=metrics.mode, notes=notes)


def format_poly(p: F2Polynomial) -> str:
    lines = []
    for m in sorted(p.monomials, key=lambda m: (bin(m).count("1"), m)):
        if m == 0:
            lines.append("1")
        else:
            lines.append("*".join(f"x{i + 1}" for i in range(p.n) if m >> i & 1))
    return "\n".join(lines) + ("\n" if lines else "0\n")


def parse_poly(text: str, n: int | None = None, path: str | None = None) -> F2Polynomial:
    """One monomial per line (``x3*x5``, ``1`` for the constant, ``0`` for none)."""
    monos = []
    seen_any = False
    top = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        seen_any = True
        if line == "0":
            continue
        if line == "1":
            mask = 0
        else:
            mask = 0
            for tok in line.split("*"):
                tok = tok.strip()
                if not (tok.startswith("x") and tok[1:].isdigit() and int(tok[1:]) >= 1):
                    raise ParseError(f"bad variable {tok!r}", lineno, path)
                i = int(tok[1:]) - 1
                if mask >> i & 1:
                    raise ParseError(f"variable {tok} repeated", lineno, path)
                mask |= 1 << i
                top = max(top, i + 1)
        if mask in monos:
            raise ParseError("duplicate monomial", lineno, path)
        monos.append(mask)
    if not seen_any:
        raise ParseError("empty polynomial file", 1, path)
    n = top if n is None else n
    if top > n:
        raise ParseError(f"polynomial uses x{top} but n={n}", None, path)
    return F2Polynomial(n, monos)


def monomial_count(n: int, d: int) -> int:
    return sum(comb(n, i) for i in range(d + 1))


def fourier_of(p: F2Polynomial):
    return wht_forward(lift_pm(p))


__all__ = ["F2Polynomial", "f2_eval", "lift_pm", "from_table", "family_f2", "prop51_check",
           "prop51_bound", "format_poly", "parse_poly", "eval_table", "all_monomials",
           "monomial_count", "popcounts"]
