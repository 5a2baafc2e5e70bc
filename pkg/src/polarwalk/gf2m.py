"""Arithmetic in GF(2^m) with a primitive modulus found at runtime."""
from __future__ import annotations

from functools import lru_cache

import numpy as np

TABLE_MAX_M = 22


def _prime_factors(v: int) -> list:
    out, p = [], 2
    while p * p <= v:
        if v % p == 0:
            out.append(p)
            while v % p == 0:
                v //= p
        p += 1
    if v > 1:
        out.append(v)
    return out


def clmul_mod(a: int, b: int, poly: int, m: int) -> int:
    """Product of two field elements (shift-and-add, reduce by ``poly``)."""
    r = 0
    top = 1 << m
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if a & top:
            a ^= poly
    return r


def _pow_mod(a: int, e: int, poly: int, m: int) -> int:
    r = 1
    while e:
        if e & 1:
            r = clmul_mod(r, a, poly, m)
        a = clmul_mod(a, a, poly, m)
        e >>= 1
    return r


@lru_cache(maxsize=None)
def primitive_poly(m: int) -> int:
    """Smallest degree-m polynomial (bitmask incl. x^m) whose root x generates the group."""
    if m < 1:
        raise ValueError("field degree must be >= 1")
    order = (1 << m) - 1
    factors = _prime_factors(order) if order > 1 else []
    for low in range(1, 1 << m, 2):  # constant term must be 1
        poly = (1 << m) | low
        x = 2 % poly if m > 1 else 1
        if _pow_mod(x, order, poly, m) != 1:
            continue
        if all(_pow_mod(x, order // q, poly, m) != 1 for q in factors):
            return poly
    raise AssertionError(f"no primitive polynomial of degree {m}")


class GF2m:
    """The field with 2^m elements; elements are ints in [0, 2^m)."""

    def __init__(self, m: int):
        self.m = m
        self.size = 1 << m
        self.mask = self.size - 1
        self.poly = primitive_poly(m)
        self.order = self.size - 1
        self._tables = None

    def __repr__(self):
        return f"GF2m(m={self.m}, poly={self.poly:#x})"

    def mul(self, a: int, b: int) -> int:
        return clmul_mod(a, b, self.poly, self.m)

    def pow(self, a: int, e: int) -> int:
        return _pow_mod(a, e, self.poly, self.m)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse")
        return self.pow(a, self.order - 1)

    @property
    def generator(self) -> int:
        return 2 if self.m > 1 else 1

    def tables(self) -> tuple[np.ndarray, np.ndarray]:
        """``(exp, log)``; ``exp`` has length 2*order so sums of logs need no reduction."""
        if self.m > TABLE_MAX_M:
            raise ValueError(f"log tables only for m <= {TABLE_MAX_M}")
        if self._tables is None:
            exp = np.zeros(2 * self.order, dtype=np.int64)
            log = np.zeros(self.size, dtype=np.int64)
            g, v = self.generator, 1
            for i in range(self.order):
                exp[i] = v
                log[v] = i
                v = self.mul(v, g)
            exp[self.order:] = exp[: self.order]
            exp.setflags(write=False)
            log.setflags(write=False)
            self._tables = (exp, log)
        return self._tables

    def mul_vec(self, a: np.ndarray, b) -> np.ndarray:
        """Elementwise product of integer arrays (or an array and a scalar)."""
        a = np.asarray(a, dtype=np.int64)
        b = np.broadcast_to(np.asarray(b, dtype=np.int64), a.shape)
        if self.m <= TABLE_MAX_M:
            exp, log = self.tables()
            out = exp[log[a] + log[b]]
            return np.where((a == 0) | (b == 0), 0, out)
        r = np.zeros(a.shape, dtype=np.int64)
        a = a.copy()
        for i in range(self.m):
            r ^= np.where((b >> i) & 1 == 1, a, 0)
            a <<= 1
            a = np.where(a & self.size, a ^ self.poly, a)
        return r

    def pow_vec(self, a: np.ndarray, e: int) -> np.ndarray:
        """``a**e`` elementwise (``0**0 == 1``)."""
        a = np.asarray(a, dtype=np.int64)
        if e == 0:
            return np.ones_like(a)
        if self.m <= TABLE_MAX_M:
            exp, log = self.tables()
            out = exp[(log[a] * e) % self.order]
            return np.where(a == 0, 0, out)
        r = np.ones_like(a)
        base = a.copy()
        while e:
            if e & 1:
                r = self.mul_vec(r, base)
            base = self.mul_vec(base, base)
            e >>= 1
        return r


@lru_cache(maxsize=None)
def field(m: int) -> GF2m:
    return GF2m(m)
