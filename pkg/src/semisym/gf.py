"""Exact arithmetic in GF(p^h) with polynomial-basis representatives.

Elements are coefficient vectors over GF(p) modulo a fixed monic irreducible
polynomial of degree h.  Every field element also has a canonical integer
index (the base-p value of its coefficient vector), which is what appears in
reports and in the fast numpy code paths.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator

import numpy as np


class FieldMismatchError(ValueError):
    """Raised when elements of different fields are combined."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of a modulo m in GF(p)[x].  m must be monic."""
    a = list(a)
    dm = len(m) - 1
    while len(a) > dm:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i in range(dm + 1):
                a[shift + i] = (a[shift + i] - lead * m[i]) % p
        a.pop()
    while len(a) < dm:
        a.append(0)
    return a


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return out


def _strip(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(a: list[int], b: list[int], p: int) -> tuple[list[int], list[int]]:
    """Quotient and remainder in GF(p)[x]; b must be nonzero."""
    a = _strip(list(a))
    b = _strip(list(b))
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    q = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - 1 - db
        c = a[-1] * inv_lead % p
        q[shift] = c
        for i in range(db + 1):
            a[shift + i] = (a[shift + i] - c * b[i]) % p
        a.pop()
    return q, a


def _is_irreducible(m: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg(m)/2."""
    h = len(m) - 1
    if h <= 0:
        return False
    for d in range(1, h // 2 + 1):
        for idx in range(p**d):
            div = []
            k = idx
            for _ in range(d):
                div.append(k % p)
                k //= p
            div.append(1)
            _, rem = _poly_divmod(m, div, p)
            if not any(rem):
                return False
    return True


def default_modulus(p: int, h: int) -> tuple[int, ...]:
    """Least monic irreducible of degree h over GF(p), ordered by base-p value.

    Returned as the coefficient tuple (c_0, ..., c_{h-1}, 1).
    """
    if h == 1:
        return (0, 1)
    for value in range(p**h):
        coeffs = []
        k = value
        for _ in range(h):
            coeffs.append(k % p)
            k //= p
        # ordering weights high-degree coefficients most, so sparse moduli
        # like x^3+x+1 and x^4+x+1 come first
        cand = coeffs + [1]
        if _is_irreducible(cand, p):
            return tuple(cand)
    raise ValueError(f"no irreducible polynomial of degree {h} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    """A concrete model of GF(p^h): characteristic, degree and modulus."""

    p: int
    h: int
    modulus: tuple[int, ...]

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"characteristic {self.p} is not prime")
        if self.h < 1:
            raise ValueError("extension degree must be >= 1")
        if len(self.modulus) != self.h + 1 or self.modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree h")
        if not all(0 <= c < self.p for c in self.modulus):
            raise ValueError("modulus coefficients out of range")
        if not _is_irreducible(list(self.modulus), self.p):
            raise ValueError("modulus is reducible")

    @property
    def q(self) -> int:
        return self.p**self.h

    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.h)

    def one(self) -> "FieldElement":
        return FieldElement(self, (1,) + (0,) * (self.h - 1))

    def element(self, index: int) -> "FieldElement":
        """Element with the given canonical index (base-p coefficient value)."""
        if not 0 <= index < self.q:
            raise ValueError(f"index {index} out of range for GF({self.q})")
        coeffs = []
        k = index
        for _ in range(self.h):
            coeffs.append(k % self.p)
            k //= self.p
        return FieldElement(self, tuple(coeffs))

    def to_json(self) -> dict:
        return {"p": self.p, "h": self.h, "modulus": list(self.modulus)}

    def __repr__(self):
        return f"GF({self.q})"


@functools.lru_cache(maxsize=None)
def field(q: int) -> FieldSpec:
    """FieldSpec for GF(q) with the default (least) irreducible modulus."""
    p, h = _factor_prime_power(q)
    return FieldSpec(p, h, default_modulus(p, h))


def _factor_prime_power(q: int) -> tuple[int, int]:
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            h = 0
            m = q
            while m % p == 0:
                m //= p
                h += 1
            if m != 1:
                raise ValueError(f"{q} is not a prime power")
            return p, h
    raise ValueError(f"{q} is not a prime power")


@dataclass(frozen=True)
class FieldElement:
    """Polynomial-basis representative: coeffs[i] is the coefficient of x^i."""

    spec: FieldSpec
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.spec.h:
            raise ValueError("coefficient vector has wrong length")
        if not all(0 <= c < self.spec.p for c in self.coeffs):
            raise ValueError("coefficient out of range")

    @property
    def index(self) -> int:
        v = 0
        for c in reversed(self.coeffs):
            v = v * self.spec.p + c
        return v

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other: "FieldElement"):
        if self.spec != other.spec:
            raise FieldMismatchError(f"{self.spec} vs {other.spec}")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        p = self.spec.p
        return FieldElement(self.spec, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        p = self.spec.p
        return FieldElement(self.spec, tuple((a - b) % p for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self) -> "FieldElement":
        p = self.spec.p
        return FieldElement(self.spec, tuple((-a) % p for a in self.coeffs))

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        self._check(other)
        prod = _poly_mul(list(self.coeffs), list(other.coeffs), self.spec.p)
        red = _poly_mod(prod, list(self.spec.modulus), self.spec.p)
        return FieldElement(self.spec, tuple(red))

    def inv(self) -> "FieldElement":
        """Multiplicative inverse by extended Euclid over GF(p)[x]."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        p = self.spec.p
        # extended gcd of self and the modulus
        r0, r1 = list(self.spec.modulus), _strip(list(self.coeffs))
        s0, s1 = [0], [1]
        while r1:
            q, r = _poly_divmod(r0, r1, p)
            r0, r1 = r1, _strip(r)
            qs1 = _strip(_poly_mul(q, s1, p)) if any(q) else []
            news = [(a - b) % p for a, b in
                    zip(s0 + [0] * max(0, len(qs1) - len(s0)),
                        qs1 + [0] * max(0, len(s0) - len(qs1)))]
            s0, s1 = s1, news
        # r0 is a nonzero constant gcd
        c_inv = pow(r0[0], p - 2, p)
        out = [(c_inv * c) % p for c in s0]
        return FieldElement(self.spec, tuple(_poly_mod(out, list(self.spec.modulus), p)))

    def __pow__(self, e: int) -> "FieldElement":
        if e < 0:
            return self.inv() ** (-e)
        result = self.spec.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def frobenius(self, e: int) -> "FieldElement":
        """Image under x -> x^(p^e); e counts powers of the characteristic."""
        if not 0 <= e < self.spec.h:
            raise ValueError(f"frobenius exponent {e} out of range [0, {self.spec.h})")
        return self ** (self.spec.p**e)

    def __repr__(self):
        return f"{self.spec}#{self.index}"


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    return a * b


def inv(a: FieldElement) -> FieldElement:
    return a.inv()


def frobenius(a: FieldElement, e: int) -> FieldElement:
    return a.frobenius(e)


def elements(spec: FieldSpec) -> list[FieldElement]:
    """All q elements in canonical index order (0 first, 1 second)."""
    return [spec.element(i) for i in range(spec.q)]


def iter_elements(spec: FieldSpec) -> Iterator[FieldElement]:
    for i in range(spec.q):
        yield spec.element(i)


class FieldTables:
    """Dense numpy lookup tables for one field, indexed by element index.

    Used by the geometry and graph-construction hot paths; the object API
    above stays the reference implementation.
    """

    def __init__(self, spec: FieldSpec):
        self.spec = spec
        q = spec.q
        elems = elements(spec)
        self.add = np.zeros((q, q), dtype=np.int64)
        self.mul = np.zeros((q, q), dtype=np.int64)
        for a in elems:
            ia = a.index
            for b in elems:
                if ia <= b.index:
                    s = (a + b).index
                    m = (a * b).index
                    self.add[ia, b.index] = self.add[b.index, ia] = s
                    self.mul[ia, b.index] = self.mul[b.index, ia] = m
        self.neg = np.array([(-a).index for a in elems], dtype=np.int64)
        self.inv = np.zeros(q, dtype=np.int64)
        for a in elems[1:]:
            self.inv[a.index] = a.inv().index
        self.frob = np.zeros((spec.h, q), dtype=np.int64)
        for e in range(spec.h):
            for a in elems:
                self.frob[e, a.index] = a.frobenius(e).index
        self.sub = self.add[:, self.neg]

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Product of 2-D matrices over the field; entries are element indices."""
        A = np.asarray(A)
        B = np.asarray(B)
        out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
        for k in range(A.shape[1]):
            out = self.add[out, self.mul[A[:, k, None], B[None, k, :]]]
        return out

    def vecmat(self, v: np.ndarray, M: np.ndarray) -> np.ndarray:
        """Row vector times matrix over the field."""
        out = np.zeros(M.shape[1], dtype=np.int64)
        for k in range(len(v)):
            out = self.add[out, self.mul[v[k], M[k, :]]]
        return out

    def primitive_element(self) -> int:
        """Index of the least multiplicative generator of the field."""
        q = self.spec.q
        if q == 2:
            return 1
        for g in range(2, q):
            seen = set()
            x = 1
            for _ in range(q - 1):
                x = int(self.mul[x, g])
                seen.add(x)
            if len(seen) == q - 1:
                return g
        raise AssertionError("multiplicative group of a finite field is cyclic")


@functools.lru_cache(maxsize=None)
def tables(spec: FieldSpec) -> FieldTables:
    return FieldTables(spec)


def subfield_embedding(sub: FieldSpec, big: FieldSpec) -> np.ndarray:
    """Index map realizing GF(p^a) as a subfield of GF(p^(a*b)).

    Sends the generator of `sub` to the first root of sub.modulus in `big`
    (deterministic), extended multiplicatively/additively.
    """
    if sub.p != big.p or big.h % sub.h != 0:
        raise ValueError(f"{sub} does not embed in {big}")
    if sub.h == 1:
        # prime subfield: integers map to multiples of one
        out = np.zeros(sub.q, dtype=np.int64)
        one = big.one()
        acc = big.zero()
        for i in range(sub.p):
            out[i] = acc.index
            acc = acc + one
        return out
    # find a root of sub's modulus in big
    root = None
    for cand in iter_elements(big):
        acc = big.zero()
        xpow = big.one()
        for c in sub.modulus:
            if c:
                term = xpow
                for _ in range(c - 1):
                    term = term + xpow
                acc = acc + term
            xpow = xpow * cand
        if acc.is_zero():
            root = cand
            break
    assert root is not None, "irreducible modulus must split in the extension"
    out = np.zeros(sub.q, dtype=np.int64)
    for a in iter_elements(sub):
        img = big.zero()
        rpow = big.one()
        for c in a.coeffs:
            if c:
                term = rpow
                for _ in range(c - 1):
                    term = term + rpow
                img = img + term
            rpow = rpow * root
        out[a.index] = img.index
    return out
