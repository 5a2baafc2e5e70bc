"""Function families: explicit lists and seeded parametric samplers."""
from __future__ import annotations

from itertools import product

import numpy as np

from .boolean import (FourierExpansion, TruthTable, constant, majority, negate_inputs, parity,
                      popcounts, tribes, wht_forward)
from .config import ResourceError, check_n
from .seeding import stream


class FunctionFamily:
    """A finite list of Boolean members plus closure metadata.

    ``mode`` is ``"exact"`` when the members are the whole class the
    descriptor names and ``"sampled"`` when they are a seeded sample of it.
    """

    def __init__(self, kind: str, members, *, closed_under_restrictions: bool = False,
                 closed_under_negations: bool = False, mode: str = "exact",
                 descriptor: str | None = None, extra=None):
        self.kind = kind
        self.members = list(members)
        self.closed_under_restrictions = closed_under_restrictions
        self.closed_under_negations = closed_under_negations
        self.mode = mode
        self.descriptor = descriptor or kind
        self.extra = extra
        self._fes = None

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def n(self) -> int:
        return self.members[0].n

    def expansions(self) -> list:
        if self._fes is None:
            self._fes = [m if isinstance(m, FourierExpansion) else wht_forward(m)
                         for m in self.members]
        return self._fes

    def describe(self) -> dict:
        return {"kind": self.kind, "descriptor": self.descriptor, "size": len(self),
                "mode": self.mode,
                "closed_under_restrictions": self.closed_under_restrictions,
                "closed_under_negations": self.closed_under_negations}


def explicit(members, name: str = "explicit", **flags) -> FunctionFamily:
    return FunctionFamily(name, members, **flags)


def family_parities(n: int) -> FunctionFamily:
    """Every character and its negation: closed under restriction and negation."""
    check_n(n)
    members = []
    for s in range(1 << n):
        p = parity(n, s)
        members += [p, p.negated()]
    return FunctionFamily("parity", members, closed_under_restrictions=True,
                          closed_under_negations=True, descriptor=f"parity:n={n}")


def family_all(n: int) -> FunctionFamily:
    """All 2^(2^n) Boolean functions on n variables (n <= 4)."""
    if n > 4:
        raise ResourceError("family 'all' is limited to n <= 4")
    size = 1 << n
    members = [TruthTable(n, [1 - 2 * ((code >> m) & 1) for m in range(size)])
               for code in range(1 << size)]
    return FunctionFamily("all", members, closed_under_restrictions=True,
                          closed_under_negations=True, descriptor=f"all:n={n}")


def family_majority(n: int) -> FunctionFamily:
    """MAJ_n under every input negation and its global negation."""
    base = wht_forward(majority(n))
    seen = {}
    for signs in product((1, -1), repeat=n):
        g = negate_inputs(base, signs)
        for h in (g, -g):
            seen.setdefault(h.key(), h)
    return FunctionFamily("maj", list(seen.values()), closed_under_negations=True,
                          descriptor=f"maj:n={n}")


def family_tribes(n: int, width: int) -> FunctionFamily:
    t = tribes(n, width)
    return FunctionFamily("tribes", [t, t.negated()], descriptor=f"tribes:n={n},w={width}")


def family_juntas(n: int, j: int, count: int, seed: int) -> FunctionFamily:
    """Random j-juntas: a random j-subset of variables and a random table on it."""
    check_n(n)
    if not 0 <= j <= n:
        raise ValueError("junta size out of range")
    members = []
    m = np.arange(1 << n)
    for idx in range(count):
        rng = stream(seed, idx)
        pool = list(range(n))
        chosen = []
        for _ in range(j):
            chosen.append(pool.pop(rng.below(len(pool))))
        table = [1 - 2 * rng.bits(1) for _ in range(1 << j)]
        key = np.zeros(1 << n, dtype=np.int64)
        for pos, var in enumerate(chosen):
            key |= ((m >> var) & 1) << pos
        members.append(TruthTable(n, np.asarray(table, dtype=np.int8)[key]))
    return FunctionFamily("junta", members, mode="sampled",
                          descriptor=f"junta:n={n},j={j},sample={count},seed={seed}")


def family_constant(n: int) -> FunctionFamily:
    return FunctionFamily("const", [constant(n, 1), constant(n, -1)],
                          closed_under_restrictions=True, closed_under_negations=True,
                          descriptor=f"const:n={n}")


def parse_descriptor(text: str) -> tuple[str, dict]:
    """``"f2:n=8,d=2,sample=500,seed=7"`` -> ``("f2", {...})``."""
    kind, _, rest = text.partition(":")
    params = {}
    for part in filter(None, rest.split(",")):
        key, eq, val = part.partition("=")
        if not eq:
            raise ValueError(f"bad family parameter {part!r}")
        params[key.strip()] = val.strip()
    return kind.strip(), params


def from_descriptor(text: str) -> FunctionFamily:
    from .f2poly import family_f2  # local: f2poly imports this module

    kind, p = parse_descriptor(text)
    n = int(p.get("n", 0))
    seed = int(p["seed"], 0) if "seed" in p else 0
    if kind == "f2":
        d = int(p["d"])
        if "sample" in p:
            fam = family_f2(n, d, mode="sample", count=int(p["sample"]), seed=seed)
        else:
            fam = family_f2(n, d, mode="enumerate")
    elif kind == "parity":
        fam = family_parities(n)
    elif kind == "all":
        fam = family_all(n)
    elif kind == "maj":
        fam = family_majority(n)
    elif kind == "tribes":
        fam = family_tribes(n, int(p.get("w", 2)))
    elif kind == "junta":
        fam = family_juntas(n, int(p["j"]), int(p.get("sample", 100)), seed)
    elif kind == "const":
        fam = family_constant(n)
    else:
        raise ValueError(f"unknown family kind {kind!r}")
    fam.descriptor = text
    return fam


def level_counts(n: int) -> np.ndarray:
    return np.bincount(popcounts(n), minlength=n + 1)
