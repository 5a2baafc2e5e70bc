"""Truth tables, Fourier expansions, restrictions.

Index convention used everywhere: bit ``i`` of an index ``m`` (``x_1`` is the
least significant bit) set means ``x_{i+1} = -1``, clear means ``+1``.  The
same bitmask names a subset ``S`` when indexing Fourier coefficients, so
``x^S = (-1)^{popcount(m & S)}`` at the Boolean point ``m``.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .config import ParseError, check_n
from .seeding import stream


@lru_cache(maxsize=None)
def popcounts(n: int) -> np.ndarray:
    """popcount of every index in ``range(2**n)`` (read-only)."""
    pc = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        pc = np.concatenate([pc, pc + 1])
    pc.setflags(write=False)
    return pc


def fwht(values: np.ndarray) -> np.ndarray:
    """Unnormalised Walsh-Hadamard butterfly along the last axis.

    Works for any dtype supporting ``+``/``-`` (int64 for exact work, float64,
    or object arrays of Fractions).
    """
    a = np.array(values, copy=True)
    size = a.shape[-1]
    n = size.bit_length() - 1
    if 1 << n != size:
        raise ValueError("length must be a power of two")
    batch = a.shape[:-1]
    h = 1
    for _ in range(n):
        v = a.reshape(batch + (size // (2 * h), 2, h))
        lo = v[..., 0, :].copy()
        hi = v[..., 1, :].copy()
        v[..., 0, :] = lo + hi
        v[..., 1, :] = lo - hi
        h *= 2
    return a


class TruthTable:
    """A +-1 valued function on {-1,1}^n stored as ``2**n`` int8 entries."""

    __slots__ = ("n", "values")

    def __init__(self, n: int, values: Sequence[int] | np.ndarray):
        check_n(n)
        vals = np.asarray(values, dtype=np.int8)
        if vals.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} entries, got {vals.shape}")
        if not np.all(np.abs(vals) == 1):
            raise ValueError("truth table entries must be +-1")
        vals = vals.copy()
        vals.setflags(write=False)
        self.n = n
        self.values = vals

    @classmethod
    def from_function(cls, n: int, fn) -> "TruthTable":
        """Build from ``fn(x)`` where ``x`` is a tuple of +-1 values."""
        vals = []
        for m in range(1 << n):
            x = tuple(-1 if (m >> i) & 1 else 1 for i in range(n))
            vals.append(fn(x))
        return cls(n, vals)

    def __call__(self, x: Sequence[int]) -> int:
        return int(self.values[point_index(x)])

    def __eq__(self, other):
        return isinstance(other, TruthTable) and self.n == other.n and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.n, self.values.tobytes()))

    def __repr__(self):
        return f"TruthTable(n={self.n}, hex={self.to_hex()})"

    def negated(self) -> "TruthTable":
        return TruthTable(self.n, -self.values)

    def to_hex(self) -> str:
        bits = (self.values < 0).astype(np.uint8)
        value = int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")
        width = max(1, (1 << self.n) // 4)
        return format(value, f"0{width}x")

    @classmethod
    def from_hex(cls, n: int, text: str) -> "TruthTable":
        value = int(text, 16)
        if value >> (1 << n):
            raise ValueError(f"hex string sets bits beyond index {(1 << n) - 1}")
        nbytes = max(1, (1 << n) // 8)
        raw = np.frombuffer(value.to_bytes(nbytes, "little"), dtype=np.uint8)
        bits = np.unpackbits(raw, bitorder="little")[: 1 << n].astype(np.int8)
        return cls(n, 1 - 2 * bits)


def point_index(x: Sequence[float]) -> int:
    """Index of a +-1 point (``-1`` sets the bit)."""
    m = 0
    for i, v in enumerate(x):
        if v == -1:
            m |= 1 << i
        elif v != 1:
            raise ValueError(f"coordinate {i} is {v}, not +-1")
    return m


def index_point(m: int, n: int) -> tuple:
    return tuple(-1 if (m >> i) & 1 else 1 for i in range(n))


class FourierExpansion:
    """Dense coefficient vector ``coeffs[S]`` over subset bitmasks ``S``."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs):
        arr = np.array(coeffs, copy=True)
        if arr.dtype != object:
            arr = arr.astype(np.float64)
        if arr.shape != (1 << n,):
            raise ValueError(f"expected {1 << n} coefficients, got {arr.shape}")
        arr.setflags(write=False)
        self.n = n
        self.coeffs = arr

    def __eq__(self, other):
        return (isinstance(other, FourierExpansion) and self.n == other.n
                and np.array_equal(self.coeffs, other.coeffs))

    def __hash__(self):
        return hash((self.n, self.key()))

    def key(self) -> bytes:
        return np.asarray(self.coeffs, dtype=np.float64).tobytes()

    def __repr__(self):
        nz = {int(s): float(c) for s, c in enumerate(self.coeffs) if c != 0}
        return f"FourierExpansion(n={self.n}, nonzero={nz})"

    def __call__(self, x) -> float:
        return eval_multilinear(self, x)

    def __neg__(self):
        return FourierExpansion(self.n, -self.coeffs)

    def level(self, k: int) -> np.ndarray:
        """Coefficient vector with everything off level ``k`` zeroed."""
        return np.where(popcounts(self.n) == k, self.coeffs, 0)

    @property
    def degree(self) -> int:
        nz = np.nonzero(self.coeffs)[0]
        return int(popcounts(self.n)[nz].max()) if nz.size else 0


def wht_integer(tt: TruthTable) -> np.ndarray:
    """``2**n * fhat(S)`` as exact int64."""
    check_n(tt.n)
    return fwht(tt.values.astype(np.int64))


def wht_forward(tt: TruthTable) -> FourierExpansion:
    return FourierExpansion(tt.n, wht_integer(tt) / float(1 << tt.n))


def wht_inverse(fe: FourierExpansion) -> np.ndarray:
    """Values of the multilinear polynomial at every Boolean point."""
    return fwht(fe.coeffs)


def to_truth_table(fe: FourierExpansion) -> TruthTable:
    vals = wht_inverse(fe)
    rounded = np.rint(vals)
    if not np.array_equal(rounded, vals):
        raise ValueError("expansion is not Boolean-valued")
    return TruthTable(fe.n, rounded.astype(np.int8))


def _check_point(n: int, x) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (n,):
        raise ValueError(f"point has shape {x.shape}, expected ({n},)")
    return x


def eval_multilinear(fe: FourierExpansion, x) -> float:
    """``sum_S fhat(S) prod_{i in S} x_i`` by folding one coordinate at a time."""
    x = _check_point(fe.n, x)
    if x.dtype != object and np.any(np.abs(x) > 1):
        raise ValueError("point outside [-1,1]^n")
    c = fe.coeffs
    for i in range(fe.n - 1, -1, -1):
        half = 1 << i
        c = c[:half] + x[i] * c[half:]
    return c[0]


def corner_values(fe: FourierExpansion, c: float = 1.0) -> np.ndarray:
    """``f(c * s)`` for every sign pattern ``s`` (indexed like a truth table)."""
    scaled = fe.coeffs * (c ** popcounts(fe.n))
    return fwht(scaled)


class Restriction:
    """Per-coordinate assignment: ``+1``, ``-1`` or ``None`` (free)."""

    __slots__ = ("assignments",)

    def __init__(self, assignments: Iterable):
        vals = tuple(assignments)
        for v in vals:
            if v not in (1, -1, None):
                raise ValueError(f"bad restriction value {v!r}")
        self.assignments = vals

    @classmethod
    def empty(cls, n: int) -> "Restriction":
        return cls([None] * n)

    @classmethod
    def from_dict(cls, n: int, fixed: dict) -> "Restriction":
        vals = [None] * n
        for i, v in fixed.items():
            vals[i] = v
        return cls(vals)

    @property
    def n(self) -> int:
        return len(self.assignments)

    @property
    def free_mask(self) -> int:
        return sum(1 << i for i, v in enumerate(self.assignments) if v is None)

    def __repr__(self):
        sym = {1: "+", -1: "-", None: "*"}
        return "Restriction(" + "".join(sym[v] for v in self.assignments) + ")"

    def __eq__(self, other):
        return isinstance(other, Restriction) and self.assignments == other.assignments

    def __hash__(self):
        return hash(self.assignments)


def restrict(fe: FourierExpansion, rho: Restriction) -> FourierExpansion:
    """Substitute the fixed coordinates; result lives on the same index space."""
    if rho.n != fe.n:
        raise ValueError(f"restriction has {rho.n} coordinates, function has {fe.n}")
    c = np.array(fe.coeffs, copy=True)
    for i, v in enumerate(rho.assignments):
        if v is None:
            continue
        view = c.reshape(-1, 2, 1 << i)
        view[:, 0, :] = view[:, 0, :] + v * view[:, 1, :]
        view[:, 1, :] = 0
    return FourierExpansion(fe.n, c)


def negate_inputs(fe: FourierExpansion, signs: Sequence[int]) -> FourierExpansion:
    """Expansion of ``x -> f(signs * x)``."""
    if len(signs) != fe.n:
        raise ValueError("sign vector length mismatch")
    mask = point_index(signs)
    parity = popcounts(fe.n)[np.arange(1 << fe.n) & mask] & 1
    return FourierExpansion(fe.n, np.where(parity == 1, -fe.coeffs, fe.coeffs))


def all_restrictions(n: int):
    """Every assignment in {+1, -1, free}^n, free-first lexicographic order."""
    opts = (None, 1, -1)
    for code in range(3 ** n):
        vals = []
        for _ in range(n):
            code, r = divmod(code, 3)
            vals.append(opts[r])
        yield Restriction(vals)


def restriction_closure_items(fe: FourierExpansion, budget: int, seed: int = 0):
    """``(mode, [(restriction, restricted expansion), ...])``.

    Exact when ``3**n <= budget``; otherwise ``budget`` restrictions drawn
    uniformly (each coordinate independently uniform over the three options)
    from the counter-based stream of ``seed``.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    n = fe.n
    if 3 ** n <= budget:
        return "exact", [(r, restrict(fe, r)) for r in all_restrictions(n)]
    opts = (None, 1, -1)
    items = []
    for j in range(budget):
        rng = stream(seed, j)
        r = Restriction([opts[rng.below(3)] for _ in range(n)])
        items.append((r, restrict(fe, r)))
    return "sampled", items


def restriction_closure(fe: FourierExpansion, budget: int, seed: int = 0) -> list:
    """Restricted expansions, one per restriction (duplicates kept)."""
    return [g for _, g in restriction_closure_items(fe, budget, seed)[1]]


def unique_expansions(fes: Iterable[FourierExpansion]) -> list:
    seen = {}
    for g in fes:
        seen.setdefault(g.key(), g)
    return list(seen.values())


# ---- a few standard functions -------------------------------------------------

def parity(n: int, subset: int | None = None) -> TruthTable:
    s = (1 << n) - 1 if subset is None else subset
    pc = popcounts(n)[np.arange(1 << n) & s]
    return TruthTable(n, 1 - 2 * (pc & 1))


def and_pm(n: int) -> TruthTable:
    """-1 iff every input is -1."""
    vals = np.ones(1 << n, dtype=np.int8)
    vals[-1] = -1
    return TruthTable(n, vals)


def majority(n: int) -> TruthTable:
    if n % 2 == 0:
        raise ValueError("majority needs odd n")
    pc = popcounts(n)
    return TruthTable(n, np.where(pc > n // 2, -1, 1))


def constant(n: int, value: int = 1) -> TruthTable:
    return TruthTable(n, np.full(1 << n, value, dtype=np.int8))


def tribes(n: int, width: int) -> TruthTable:
    """OR of ANDs over consecutive blocks of ``width`` (true encoded as -1)."""
    m = np.arange(1 << n)
    out = np.zeros(1 << n, dtype=bool)
    for start in range(0, n, width):
        blk = ((1 << min(width, n - start)) - 1) << start
        out |= (m & blk) == blk
    return TruthTable(n, np.where(out, -1, 1))


# ---- file format --------------------------------------------------------------

def format_truth_table(tt: TruthTable) -> str:
    return f"n={tt.n}\n{tt.to_hex()}\n"


def parse_truth_table(text: str, path: str | None = None) -> TruthTable:
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise ParseError("empty truth-table file", 1, path)
    head = lines[0].strip()
    if not head.startswith("n="):
        raise ParseError("first line must be 'n=<int>'", 1, path)
    try:
        n = int(head[2:])
    except ValueError:
        raise ParseError(f"bad variable count {head[2:]!r}", 1, path) from None
    if n < 0:
        raise ParseError("negative variable count", 1, path)
    if len(lines) < 2 or not lines[1].strip():
        raise ParseError("missing hex line", 2, path)
    hexstr = lines[1].strip().lower().removeprefix("0x")
    if any(ch not in "0123456789abcdef" for ch in hexstr):
        raise ParseError(f"invalid hex string {hexstr!r}", 2, path)
    for extra, line in enumerate(lines[2:], start=3):
        if line.strip():
            raise ParseError("unexpected trailing content", extra, path)
    try:
        return TruthTable.from_hex(n, hexstr)
    except ValueError as exc:
        raise ParseError(str(exc), 2, path) from None
