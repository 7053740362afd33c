"""Exact sparse multivariate polynomials graded by an integer internal degree.

Coefficients live in Q (exact rationals) or in F_p for an odd prime p; there
is no floating point anywhere.  A polynomial is a dict mapping exponent
vectors (tuples aligned with the ring's generator list) to nonzero
coefficients.  Generators marked invertible admit negative exponents;
generators of odd internal degree square to zero and multiplication picks up
the usual Koszul sign when odd factors move past each other.

Example::

    R = PolyRing(GF(3), [Generator("v_1", 4, invertible=True), Generator("t_1", 4)])
    v, t = R.gens()
    rel = v * t**3 - v**3 * t          # homogeneous of degree 16
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Union


class NonHomogeneousError(ValueError):
    """Raised when an element that must be homogeneous is not."""


def is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class Rationals:
    """The field Q, coefficients represented as Fraction."""

    p = 0

    def of(self, n, d=1):
        return Fraction(n, d)

    @property
    def zero(self):
        return Fraction(0)

    @property
    def one(self):
        return Fraction(1)

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of 0 in Q")
        return 1 / Fraction(a)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash(("field", 0))

    def __repr__(self):
        return "QQ"


class PrimeField:
    """The field F_p for an odd prime p; coefficients are ints in [0, p)."""

    def __init__(self, p: int):
        if not is_odd_prime(p):
            raise ValueError(f"characteristic must be an odd prime, got {p}")
        self.p = p

    def of(self, n, d=1):
        n = int(n) % self.p
        if d != 1:
            n = n * self.inv(int(d) % self.p) % self.p
        return n

    @property
    def zero(self):
        return 0

    @property
    def one(self):
        return 1

    def add(self, a, b):
        return (a + b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise ZeroDivisionError(f"inverse of 0 in F_{self.p}")
        return pow(a, self.p - 2, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("field", self.p))

    def __repr__(self):
        return f"GF({self.p})"


QQ = Rationals()


def GF(p: int) -> PrimeField:
    return PrimeField(p)


class Generator:
    """A named graded generator.

    Invertible generators admit negative exponents.  Odd internal degree
    marks an exterior generator (squares to zero, anticommutes).
    """

    __slots__ = ("name", "degree", "invertible")

    def __init__(self, name: str, degree: int, invertible: bool = False):
        self.name = name
        self.degree = degree
        self.invertible = invertible

    @property
    def odd(self) -> bool:
        return self.degree % 2 != 0

    def __eq__(self, other):
        return (
            isinstance(other, Generator)
            and self.name == other.name
            and self.degree == other.degree
            and self.invertible == other.invertible
        )

    def __hash__(self):
        return hash((self.name, self.degree, self.invertible))

    def __repr__(self):
        inv = ", invertible" if self.invertible else ""
        return f"Generator({self.name!r}, {self.degree}{inv})"


Coefficient = Union[Fraction, int]
Monomial = tuple  # exponent vector aligned with PolyRing.generators


class PolyRing:
    """A polynomial (Laurent on invertible generators) ring over Q or F_p.

    The generator list order doubles as the lexicographic priority of the
    monomial order: graded-lex, total internal degree first, then exponents
    compared left to right.  Callers who need rewrite rules keyed on
    t-monomials list t-generators first.
    """

    def __init__(self, field, generators: Iterable[Generator]):
        self.field = field
        self.generators = tuple(generators)
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ValueError("duplicate generator names")
        self.index = {g.name: k for k, g in enumerate(self.generators)}
        self._degrees = tuple(g.degree for g in self.generators)
        self._invertible = tuple(g.invertible for g in self.generators)
        self._odd = tuple(g.odd for g in self.generators)

    # -- basic accessors -------------------------------------------------
    def gen(self, name: str) -> "GradedPoly":
        k = self.index[name]
        mon = tuple(1 if j == k else 0 for j in range(len(self.generators)))
        return GradedPoly(self, {mon: self.field.one})

    def gens(self):
        return tuple(self.gen(g.name) for g in self.generators)

    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def one(self) -> "GradedPoly":
        return self.scalar(self.field.one)

    def scalar(self, c) -> "GradedPoly":
        if c == self.field.zero:
            return self.zero()
        unit = (0,) * len(self.generators)
        return GradedPoly(self, {unit: c})

    def monomial(self, exps: Mapping[str, int], coeff=None) -> "GradedPoly":
        vec = [0] * len(self.generators)
        for name, e in exps.items():
            vec[self.index[name]] = e
        c = self.field.one if coeff is None else coeff
        return GradedPoly(self, {tuple(vec): c})

    def mono_degree(self, mon: Monomial) -> int:
        return sum(e * d for e, d in zip(mon, self._degrees) if e)

    def mono_valid(self, mon: Monomial) -> bool:
        for e, inv, odd in zip(mon, self._invertible, self._odd):
            if e < 0 and not inv:
                return False
            if odd and e not in (0, 1):
                return False
        return True

    def sort_key(self, mon: Monomial):
        return (self.mono_degree(mon), mon)

    def mono_mul(self, a: Monomial, b: Monomial):
        """Product exponent vector and the Koszul sign of the merge.

        Returns (monomial, sign) with sign in {+1, -1}, or (None, 0) when an
        odd generator would acquire exponent 2.
        """
        out = tuple(x + y for x, y in zip(a, b))
        sign = 1
        if any(self._odd):
            swaps = 0
            odd_tail = 0  # odd factors of `a` strictly to the right of position j
            for j in range(len(out) - 1, -1, -1):
                if self._odd[j]:
                    if out[j] > 1:
                        return None, 0
                    if b[j]:
                        swaps += odd_tail
                    if a[j]:
                        odd_tail += 1
            # each odd factor of b at position j moved left past the odd
            # factors of a sitting at positions > j
            sign = -1 if swaps % 2 else 1
        return out, sign

    def mono_str(self, mon: Monomial, order: Iterable[int] | None = None) -> str:
        idxs = order if order is not None else range(len(mon))
        parts = []
        for j in idxs:
            e = mon[j]
            if e == 0:
                continue
            name = self.generators[j].name
            parts.append(name if e == 1 else f"{name}^{e}")
        return " ".join(parts) if parts else "1"

    def __eq__(self, other):
        return (
            isinstance(other, PolyRing)
            and self.field == other.field
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.field, self.generators))

    def __repr__(self):
        return f"PolyRing({self.field!r}, [{', '.join(g.name for g in self.generators)}])"


class GradedPoly:
    """Immutable sparse polynomial over a PolyRing.

    `terms` never stores zero coefficients, so equality is structural.
    """

    __slots__ = ("ring", "terms")

    def __init__(self, ring: PolyRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_homogeneous(self) -> bool:
        degs = {self.ring.mono_degree(m) for m in self.terms}
        return len(degs) <= 1

    def degree(self) -> int:
        """Internal degree; raises on 0 and on inhomogeneous input."""
        if not self.terms:
            raise NonHomogeneousError("zero polynomial has no degree")
        degs = {self.ring.mono_degree(m) for m in self.terms}
        if len(degs) > 1:
            raise NonHomogeneousError(f"inhomogeneous element, degrees {sorted(degs)}")
        return degs.pop()

    # -- arithmetic ------------------------------------------------------
    def _check(self, other: "GradedPoly"):
        if self.ring != other.ring:
            raise ValueError("mixed rings")

    def __add__(self, other: "GradedPoly") -> "GradedPoly":
        self._check(other)
        f = self.ring.field
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = f.add(out.get(m, f.zero), c)
            if s == f.zero:
                out.pop(m, None)
            else:
                out[m] = s
        return GradedPoly(self.ring, out)

    def __neg__(self) -> "GradedPoly":
        f = self.ring.field
        return GradedPoly(self.ring, {m: f.neg(c) for m, c in self.terms.items()})

    def __sub__(self, other: "GradedPoly") -> "GradedPoly":
        return self + (-other)

    def __mul__(self, other: "GradedPoly") -> "GradedPoly":
        self._check(other)
        ring = self.ring
        f = ring.field
        out: dict = {}
        zero = f.zero
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m, sign = ring.mono_mul(ma, mb)
                if sign == 0:
                    continue
                c = f.mul(ca, cb)
                if sign < 0:
                    c = f.neg(c)
                s = f.add(out.get(m, zero), c)
                if s == zero:
                    out.pop(m, None)
                else:
                    out[m] = s
        return GradedPoly(ring, out)

    def scale(self, c) -> "GradedPoly":
        f = self.ring.field
        if c == f.zero:
            return self.ring.zero()
        return GradedPoly(self.ring, {m: f.mul(v, c) for m, v in self.terms.items()})

    def __pow__(self, n: int) -> "GradedPoly":
        if n < 0:
            return self.inverse_monomial() ** (-n)
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def inverse_monomial(self) -> "GradedPoly":
        """Inverse of a single term supported on invertible generators."""
        if len(self.terms) != 1:
            raise ValueError("only monomials are invertible")
        ((mon, c),) = self.terms.items()
        inv_mon = tuple(-e for e in mon)
        if not self.ring.mono_valid(inv_mon):
            raise ValueError("monomial involves a non-invertible generator")
        return GradedPoly(self.ring, {inv_mon: self.ring.field.inv(c)})

    def is_unit_monomial(self) -> bool:
        """True for c*m with every exponent of m on an invertible generator."""
        if len(self.terms) != 1:
            return False
        ((mon, _),) = self.terms.items()
        return all(e == 0 or inv for e, inv in zip(mon, self.ring._invertible))

    # -- structure -------------------------------------------------------
    def leading(self):
        """(monomial, coefficient) maximal in the graded-lex order."""
        if not self.terms:
            raise ValueError("zero polynomial has no leading term")
        m = max(self.terms, key=self.ring.sort_key)
        return m, self.terms[m]

    def coefficient(self, exps: Mapping[str, int]):
        vec = [0] * len(self.ring.generators)
        for name, e in exps.items():
            vec[self.ring.index[name]] = e
        return self.terms.get(tuple(vec), self.ring.field.zero)

    def map_coefficients(self, func, target_field=None) -> "GradedPoly":
        field = target_field if target_field is not None else self.ring.field
        ring = self.ring if target_field is None else PolyRing(field, self.ring.generators)
        out = {}
        for m, c in self.terms.items():
            v = func(c)
            if v != field.zero:
                out[m] = v
        return GradedPoly(ring, out)

    def apply_map(self, target: PolyRing, images: Mapping[str, "GradedPoly"], coeff_map=None) -> "GradedPoly":
        """Push forward along a ring map.

        `images` sends generator names to elements of `target`; generators
        not listed map to the target generator of the same name.  Negative
        exponents require the image to be an invertible monomial.
        `coeff_map` converts scalars (e.g. Fraction -> residue mod p).
        """
        cmap = coeff_map or (lambda c: c)
        cache: dict = {}

        def image_of(idx: int) -> GradedPoly:
            if idx not in cache:
                name = self.ring.generators[idx].name
                if name in images:
                    img = images[name]
                    if isinstance(img, int) and img == 0:
                        img = target.zero()
                    src = self.ring.generators[idx]
                    if not img.is_zero() and img.degree() != src.degree:
                        raise ValueError(f"degree mismatch mapping {name}")
                    cache[idx] = img
                else:
                    cache[idx] = target.gen(name)
            return cache[idx]

        acc = target.zero()
        for m, c in self.terms.items():
            term = target.scalar(cmap(c))
            for idx, e in enumerate(m):
                if e == 0:
                    continue
                img = image_of(idx)
                if img.is_zero():
                    term = target.zero()
                    break
                term = term * (img ** e)
            acc = acc + term
        return acc

    # -- comparisons, display ---------------------------------------------
    def __eq__(self, other):
        return (
            isinstance(other, GradedPoly)
            and self.ring == other.ring
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: self.ring.sort_key(kv[0]), reverse=True)

    def balanced(self, c):
        """Signed representative: F_p values above p/2 display as negatives."""
        p = self.ring.field.p
        if p and c > p // 2:
            return c - p
        return c

    def __str__(self):
        if not self.terms:
            return "0"
        bits = []
        for m, c in self.sorted_terms():
            cb = self.balanced(c)
            mono = self.ring.mono_str(m)
            if mono == "1":
                frag = str(cb)
            elif cb == 1:
                frag = mono
            elif cb == -1:
                frag = f"-{mono}"
            else:
                frag = f"{cb}*{mono}"
            bits.append(frag)
        s = " + ".join(bits)
        return s.replace("+ -", "- ")

    def __repr__(self):
        return f"<GradedPoly {self}>"
