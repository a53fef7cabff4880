"""Exact arithmetic in Z[zeta_p] and Q(zeta_p) for an odd prime p.

Values are stored against the power basis {1, zeta, ..., zeta^(p-2)}; the
relation 1 + zeta + ... + zeta^(p-1) = 0 reduces the top power, so the
representation is a unique normal form and equality is a coefficient
compare.  Coefficients are arbitrary-precision integers; no floating
point enters any value computation.
"""

from __future__ import annotations

import math
from typing import Iterable


class CycloValue:
    """An element of Z[zeta_p] in reduced power-basis form."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != p - 1:
            raise ValueError(f"need exactly {p - 1} coefficients, got {len(coeffs)}")
        self.p = p
        self.coeffs = coeffs

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, p: int) -> "CycloValue":
        return cls(p, (0,) * (p - 1))

    @classmethod
    def integer(cls, p: int, n: int) -> "CycloValue":
        return cls(p, (n,) + (0,) * (p - 2))

    @classmethod
    def from_exponents(cls, p: int, counts) -> "CycloValue":
        """sum counts[i] * zeta^i for i in 0..p-1, reducing the top power."""
        out = list(counts[: p - 1]) + [0] * (p - 1 - len(counts[: p - 1]))
        if len(counts) == p and counts[p - 1]:
            c = counts[p - 1]
            for i in range(p - 1):
                out[i] -= c
        return cls(p, out)

    # -- ring structure -------------------------------------------------------

    def _match(self, other) -> "CycloValue":
        if isinstance(other, int):
            return CycloValue.integer(self.p, other)
        if not isinstance(other, CycloValue):
            return NotImplemented
        if other.p != self.p:
            raise ValueError("mixed root orders")
        return other

    def __add__(self, other):
        other = self._match(other)
        if other is NotImplemented:
            return NotImplemented
        return CycloValue(self.p, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._match(other)
        if other is NotImplemented:
            return NotImplemented
        return CycloValue(self.p, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return CycloValue.integer(self.p, other) - self

    def __neg__(self):
        return CycloValue(self.p, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, int):
            return CycloValue(self.p, tuple(a * other for a in self.coeffs))
        other = self._match(other)
        if other is NotImplemented:
            return NotImplemented
        p = self.p
        raw = [0] * p  # exponents mod p
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        raw[(i + j) % p] += a * b
        return CycloValue.from_exponents(p, raw)

    __rmul__ = __mul__

    def conjugate(self) -> "CycloValue":
        """Complex conjugation zeta -> zeta^(-1); a ring involution."""
        p = self.p
        raw = [0] * p
        for i, a in enumerate(self.coeffs):
            raw[(p - i) % p] += a
        return CycloValue.from_exponents(p, raw)

    def divexact(self, n: int) -> "CycloValue":
        """Divide by a nonzero integer, raising if not exact."""
        if n == 0:
            raise ZeroDivisionError
        out = []
        for a in self.coeffs:
            q, r = divmod(a, n)
            if r:
                raise ValueError(f"{self!r} is not divisible by {n}")
            out.append(q)
        return CycloValue(self.p, out)

    # -- predicates and rendering ---------------------------------------------

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_integer(self) -> bool:
        return not any(self.coeffs[1:])

    def as_integer(self) -> int:
        if not self.is_integer():
            raise ValueError(f"{self!r} is not a rational integer")
        return self.coeffs[0]

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, int):
            return self.is_integer() and self.coeffs[0] == other
        return (
            isinstance(other, CycloValue)
            and other.p == self.p
            and other.coeffs == self.coeffs
        )

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def to_json(self) -> dict:
        return {"p": self.p, "coeffs": list(self.coeffs)}

    @classmethod
    def from_json(cls, data: dict) -> "CycloValue":
        return cls(data["p"], data["coeffs"])

    def to_string(self) -> str:
        """Render as "c0+c1·z+c2·z^2+..." with zero terms dropped."""
        terms = []
        for i, c in enumerate(self.coeffs):
            if not c:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}·z")
            else:
                terms.append(f"{c}·z^{i}")
        if not terms:
            return "0"
        return "+".join(terms).replace("+-", "-")

    def __repr__(self):
        return f"Cyclo({self.p}; {self.to_string()})"


def root_power(p: int, exponent: int) -> CycloValue:
    """The canonical representation of zeta_p^exponent."""
    counts = [0] * p
    counts[exponent % p] = 1
    return CycloValue.from_exponents(p, counts)


class CycloRational:
    """A quotient v / den with v in Z[zeta_p] and den a positive integer.

    Reduced by the gcd of the coefficient content and the denominator;
    equality is representation equality of the reduced form.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: CycloValue, den: int = 1):
        if den == 0:
            raise ZeroDivisionError
        if den < 0:
            num, den = -num, -den
        g = den
        for c in num.coeffs:
            g = math.gcd(g, c)
        if g > 1:
            num = num.divexact(g)
            den //= g
        self.num = num
        self.den = den

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_integer(self) -> bool:
        return self.den == 1 and self.num.is_integer()

    def as_integer(self) -> int:
        if self.den != 1:
            raise ValueError(f"{self!r} is not an integer")
        return self.num.as_integer()

    def conjugate(self) -> "CycloRational":
        return CycloRational(self.num.conjugate(), self.den)

    def __eq__(self, other):
        if isinstance(other, int):
            return self.den == 1 and self.num == other
        return (
            isinstance(other, CycloRational)
            and other.den == self.den
            and other.num == self.num
        )

    def __hash__(self):
        return hash((self.num, self.den))

    def to_json(self) -> dict:
        d = self.num.to_json()
        d["den"] = self.den
        return d

    def __repr__(self):
        if self.den == 1:
            return f"CycloRat({self.num.to_string()})"
        return f"CycloRat(({self.num.to_string()})/{self.den})"


def inner_product(
    f: Iterable[tuple[CycloValue, int]],
    g: Iterable[tuple[CycloValue, int]],
    group_order: int,
) -> CycloRational:
    """Hermitian inner product (1/|U|) sum over classes |K| f(K) conj(g(K)).

    Both functions are given as parallel (value, class size) sequences over
    a common class partition; the sizes must sum to the group order.
    """
    f = list(f)
    g = list(g)
    if len(f) != len(g):
        raise ValueError("class functions live on different partitions")
    total = 0
    acc = None
    for (fv, fs), (gv, gs) in zip(f, g):
        if fs != gs:
            raise ValueError("class sizes disagree between the two functions")
        total += fs
        term = fv * gv.conjugate() * fs
        acc = term if acc is None else acc + term
    if total != group_order:
        raise ValueError(f"class sizes sum to {total}, expected {group_order}")
    if acc is None:
        raise ValueError("empty class partition")
    return CycloRational(acc, group_order)
