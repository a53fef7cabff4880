"""Exact arithmetic in a finite-field tower F_p <= F_q <= F_{q^k}, odd p.

Elements are residues of F_p[t] modulo a fixed monic irreducible m(t) of
degree e*k.  The modulus is chosen deterministically (lexicographically
smallest irreducible, constant coefficient compared first) so that every
serialized artifact is reproducible.  The canonical integer encoding of an
element is the base-p evaluation of its coefficient vector, constant
coefficient least significant; this encoding is the wire format used by
every other module.

Cross-tower arithmetic is a hard error, never a coercion.  Towers with
equal (p, e, k) have equal moduli and compare equal.
"""

from __future__ import annotations

import functools
import itertools
from typing import Iterable

from .errors import ShapeError, SizeGuardError

TOWER_SIZE_LIMIT = 1 << 16
_TABLE_LIMIT = 1024


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


# -- polynomial helpers over Z/p, little-endian coefficient tuples --------


def _trim(c):
    i = len(c)
    while i > 0 and c[i - 1] == 0:
        i -= 1
    return tuple(c[:i])


def _poly_mul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _trim(out)


def _poly_mod(a, m, p):
    # m monic
    a = list(a)
    dm = len(m) - 1
    while len(a) > dm:
        lead = a[-1]
        if lead:
            shift = len(a) - 1 - dm
            for i in range(dm):
                a[shift + i] = (a[shift + i] - lead * m[i]) % p
        a.pop()
    return _trim(a)


def _poly_is_irreducible(m, p):
    """Exhaustive trial division; adequate at guarded sizes."""
    d = len(m) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    if m[0] == 0:  # root at 0
        return False
    for ddiv in range(1, d // 2 + 1):
        for enc in range(p**ddiv):
            cand = _enc_to_coeffs(enc, p, ddiv) + (1,)
            if not _poly_mod(m, cand, p):
                return False
    return True


def _enc_to_coeffs(enc, p, length):
    out = []
    for _ in range(length):
        out.append(enc % p)
        enc //= p
    return tuple(out)


def _coeffs_to_enc(coeffs, p):
    enc = 0
    for c in reversed(coeffs):
        enc = enc * p + c
    return enc


class FieldTower:
    """The field F_{p^{e*k}} together with its distinguished subfields.

    q = p^e is the base of the tower and k the top extension degree; the
    constructions downstream view everything as vector spaces over F_q
    while matrix entries live in F_{q^k}.
    """

    def __init__(self, p: int, e: int, k: int):
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if p == 2:
            raise ValueError("characteristic 2 is not supported (p must be odd)")
        if e < 1 or k < 1:
            raise ValueError("extension degrees must be positive")
        degree = e * k
        size = p**degree
        if size > TOWER_SIZE_LIMIT:
            raise SizeGuardError(
                f"p^(e*k) = {size} exceeds the enumeration guard {TOWER_SIZE_LIMIT}"
            )
        self.p = p
        self.e = e
        self.k = k
        self.q = p**e
        self.degree = degree
        self.size = size
        self.modulus = self._smallest_irreducible(p, degree)
        # reduction rows: t^(degree+i) mod m, for products of degree < 2*degree-1
        self._red = []
        cur = self._mod(tuple([0] * degree + [1]))
        for _ in range(degree - 1):
            self._red.append(cur)
            cur = self._mod(_poly_mul(cur, (0, 1), p))
        self._use_tables = size <= _TABLE_LIMIT
        if self._use_tables:
            self._mul_table = [
                [self._mul_raw(a, b) for b in range(size)] for a in range(size)
            ]
        else:
            self._mul_cache: dict = {}
        self._inv_cache: dict = {}
        self._frob_cache: dict = {}
        self._subfields: dict = {}

    @staticmethod
    def _smallest_irreducible(p, degree):
        # lexicographic on (c0, ..., c_{d-1}), constant coefficient first
        for coeffs in itertools.product(range(p), repeat=degree):
            cand = coeffs + (1,)
            if _poly_is_irreducible(cand, p):
                return cand
        raise AssertionError("no irreducible polynomial found")  # unreachable

    def _key(self):
        return (self.p, self.e, self.k)

    def __eq__(self, other):
        return isinstance(other, FieldTower) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"FieldTower(p={self.p}, e={self.e}, k={self.k})"

    def _mod(self, coeffs):
        return _poly_mod(coeffs, self.modulus, self.p)

    # -- encoding-level arithmetic ----------------------------------------

    def add_enc(self, a: int, b: int) -> int:
        p = self.p
        out = 0
        mult = 1
        while a or b:
            out += ((a % p + b % p) % p) * mult
            a //= p
            b //= p
            mult *= p
        return out

    def neg_enc(self, a: int) -> int:
        p = self.p
        out = 0
        mult = 1
        while a:
            out += (-a % p) * mult
            a //= p
            mult *= p
        return out

    def sub_enc(self, a: int, b: int) -> int:
        return self.add_enc(a, self.neg_enc(b))

    def _mul_raw(self, a: int, b: int) -> int:
        ca = _enc_to_coeffs(a, self.p, self.degree)
        cb = _enc_to_coeffs(b, self.p, self.degree)
        prod = list(_poly_mul(ca, cb, self.p))
        # reduce the overflow terms with the precomputed rows
        out = [0] * self.degree
        for i, c in enumerate(prod):
            if i < self.degree:
                out[i] = (out[i] + c) % self.p
            elif c:
                row = self._red[i - self.degree]
                for j, r in enumerate(row):
                    out[j] = (out[j] + c * r) % self.p
        return _coeffs_to_enc(out, self.p)

    def mul_enc(self, a: int, b: int) -> int:
        if self._use_tables:
            return self._mul_table[a][b]
        key = (a, b) if a <= b else (b, a)
        v = self._mul_cache.get(key)
        if v is None:
            v = self._mul_raw(a, b)
            self._mul_cache[key] = v
        return v

    def pow_enc(self, a: int, n: int) -> int:
        out = 1
        base = a
        while n:
            if n & 1:
                out = self.mul_enc(out, base)
            base = self.mul_enc(base, base)
            n >>= 1
        return out

    def inv_enc(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        v = self._inv_cache.get(a)
        if v is None:
            v = self.pow_enc(a, self.size - 2)
            self._inv_cache[a] = v
        return v

    def frobenius_q_enc(self, a: int) -> int:
        """a -> a^q, the generator of Gal(F_{q^k}/F_q)."""
        v = self._frob_cache.get(a)
        if v is None:
            v = self.pow_enc(a, self.q)
            self._frob_cache[a] = v
        return v

    # -- elements ----------------------------------------------------------

    def element(self, value) -> "FieldElement":
        """Coerce an int in [0, p) (a prime-field constant) to an element."""
        if isinstance(value, FieldElement):
            if value.tower != self:
                raise ShapeError("element belongs to a different tower")
            return value
        return FieldElement(self, value % self.p)

    def from_enc(self, enc: int) -> "FieldElement":
        if not 0 <= enc < self.size:
            raise ValueError(f"encoding {enc} out of range for {self!r}")
        return FieldElement(self, enc)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, 0)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, 1)

    @property
    def gen(self) -> "FieldElement":
        """The residue of t; a primitive element of the extension."""
        return FieldElement(self, self.p if self.degree > 1 else 0)

    def elements(self) -> Iterable["FieldElement"]:
        return (FieldElement(self, enc) for enc in range(self.size))

    # -- subfields ----------------------------------------------------------

    def subfield(self, degree: int) -> "Subfield":
        """The subfield F_{p^degree}; degree must divide e*k."""
        sf = self._subfields.get(degree)
        if sf is None:
            sf = Subfield(self, degree)
            self._subfields[degree] = sf
        return sf

    @property
    def base(self) -> "Subfield":
        """F_q, the scalar field of all functionals and bases."""
        return self.subfield(self.e)

    @property
    def full(self) -> "Subfield":
        """F_{q^k} viewed as the (improper) subfield of itself."""
        return self.subfield(self.degree)


class Subfield:
    """A subfield F_{p^d} of the tower, presented as canonical encodings.

    Doubles as the scalar field for all linear algebra: the encodings are
    closed under the tower's arithmetic, and ``coords``/``combine`` give
    the F_{p^d}-coordinates of a tower element against the power basis
    {1, t, ..., t^(m-1)} where m = (e*k)/d.
    """

    def __init__(self, tower: FieldTower, degree: int):
        if degree < 1 or tower.degree % degree != 0:
            raise ValueError(f"degree {degree} does not divide {tower.degree}")
        self.tower = tower
        self.degree = degree
        self.size = tower.p**degree
        self.index = tower.degree // degree
        fixed = tuple(
            a for a in range(tower.size) if tower.pow_enc(a, self.size) == a
        )
        if len(fixed) != self.size:
            raise AssertionError("subfield enumeration has wrong cardinality")
        self.elements = fixed
        self.add = tower.add_enc
        self.sub = tower.sub_enc
        self.neg = tower.neg_enc
        self.mul = tower.mul_enc
        self.inv = tower.inv_enc
        self.zero = 0
        self.one = 1
        self._elem_set = frozenset(fixed)
        # coordinates of every tower element against {t^i} over this subfield
        basis = [1] + [tower.pow_enc(tower.p, i) for i in range(1, self.index)]
        self.power_basis = tuple(basis)
        coords = {}
        for tup in itertools.product(fixed, repeat=self.index):
            enc = 0
            for c, b in zip(tup, basis):
                enc = tower.add_enc(enc, tower.mul_enc(c, b))
            coords[enc] = tup
        if len(coords) != tower.size:
            raise AssertionError("power basis failed to span the tower")
        self._coords = coords
        self._trace_exp = {}
        for a in fixed:
            t = 0
            for i in range(degree):
                t = tower.add_enc(t, tower.pow_enc(a, tower.p**i))
            if t >= tower.p:
                raise AssertionError("trace left the prime field")
            self._trace_exp[a] = t

    def contains(self, enc: int) -> bool:
        return enc in self._elem_set

    def coords(self, enc: int) -> tuple:
        return self._coords[enc]

    def combine(self, coords) -> int:
        tower = self.tower
        enc = 0
        for c, b in zip(coords, self.power_basis):
            enc = tower.add_enc(enc, tower.mul_enc(c, b))
        return enc

    def trace_exponent(self, enc: int) -> int:
        """Tr_{F_{p^d}/F_p} as an integer exponent mod p."""
        try:
            return self._trace_exp[enc]
        except KeyError:
            raise ValueError(f"encoding {enc} is not in the degree-{self.degree} subfield")

    def dot(self, u, v) -> int:
        acc = 0
        add, mul = self.add, self.mul
        for a, b in zip(u, v):
            if a and b:
                acc = add(acc, mul(a, b))
        return acc

    def __repr__(self):
        return f"Subfield(F_{self.size} of {self.tower!r})"


class FieldElement:
    """An element of the tower's top field, immutable and hashable."""

    __slots__ = ("tower", "enc")

    def __init__(self, tower: FieldTower, enc: int):
        self.tower = tower
        self.enc = enc

    @property
    def coeffs(self) -> tuple:
        return _enc_to_coeffs(self.enc, self.tower.p, self.tower.degree)

    def _check(self, other) -> "FieldElement":
        if isinstance(other, int):
            return self.tower.element(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        if other.tower != self.tower:
            raise ShapeError("cross-tower arithmetic is not allowed")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.tower, self.tower.add_enc(self.enc, other.enc))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.tower, self.tower.sub_enc(self.enc, other.enc))

    def __rsub__(self, other):
        return self.tower.element(other) - self

    def __mul__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.tower, self.tower.mul_enc(self.enc, other.enc))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __neg__(self):
        return FieldElement(self.tower, self.tower.neg_enc(self.enc))

    def __pow__(self, n: int):
        return FieldElement(self.tower, self.tower.pow_enc(self.enc, n))

    def inverse(self) -> "FieldElement":
        return FieldElement(self.tower, self.tower.inv_enc(self.enc))

    def __bool__(self):
        return self.enc != 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.enc == other % self.tower.p and self.enc < self.tower.p
        return (
            isinstance(other, FieldElement)
            and other.tower == self.tower
            and other.enc == self.enc
        )

    def __hash__(self):
        return hash((self.enc, self.tower.p, self.tower.degree))

    def __repr__(self):
        return f"<{self.enc}:F_{self.tower.size}>"


@functools.lru_cache(maxsize=None)
def make_tower(p: int, e: int, k: int) -> FieldTower:
    """Build (and cache) the tower F_p <= F_{p^e} <= F_{p^{e*k}}."""
    return FieldTower(p, e, k)


def frobenius_q(a: FieldElement) -> FieldElement:
    """a -> a^q; an involution when k = 2 and the identity on F_q."""
    return FieldElement(a.tower, a.tower.frobenius_q_enc(a.enc))


def herm_trace(a: FieldElement) -> FieldElement:
    """a + a^q, mapping F_{q^2} onto F_q; only defined for k = 2."""
    if a.tower.k != 2:
        raise ValueError("herm_trace requires a quadratic extension (k = 2)")
    return a + frobenius_q(a)


def additive_char_exponent(a: FieldElement) -> int:
    """Tr_{F_q/F_p}(a) as an exponent mod p; requires a in F_q.

    The standard additive character is theta(a) = zeta_p^trace; it is a
    nontrivial homomorphism F_q^+ -> C^x.
    """
    return a.tower.base.trace_exponent(a.enc)


class Theta:
    """An additive character a -> zeta_p^{Tr(c*a)} of a subfield.

    ``standard`` uses c = 1.  ``alternate`` uses the smallest scalar
    c != 0, 1, giving a second independent character for the
    theta-independence checks.
    """

    def __init__(self, subfield: Subfield, c_enc: int, name: str):
        if not subfield.contains(c_enc) or c_enc == 0:
            raise ValueError("character multiplier must be a nonzero subfield scalar")
        self.subfield = subfield
        self.c_enc = c_enc
        self.name = name
        tower = subfield.tower
        self._exp = {
            a: subfield.trace_exponent(tower.mul_enc(c_enc, a))
            for a in subfield.elements
        }

    def exponent(self, enc: int) -> int:
        return self._exp[enc]

    @property
    def p(self) -> int:
        return self.subfield.tower.p

    @classmethod
    def standard(cls, subfield: Subfield) -> "Theta":
        return cls(subfield, 1, "standard")

    @classmethod
    def alternate(cls, subfield: Subfield) -> "Theta":
        c = next(a for a in subfield.elements if a not in (0, 1))
        return cls(subfield, c, "alternate")

    def __repr__(self):
        return f"Theta({self.name}, c={self.c_enc}, F_{self.subfield.size})"
