"""Truncated formal power series with graded polynomial coefficients.

Series live in 1, 2 or 3 variables, truncated at a fixed total order N
(monomials x^a y^b ... with a+b+... <= N).  Every series variable carries
internal degree -2, so a series of total degree D has the coefficient of a
total-exponent-e monomial homogeneous of internal degree D + 2e.  That makes
each displayed group-law identity a machine-checkable homogeneity statement.
"""

from __future__ import annotations

from .poly import GradedPoly, PolyRing

VAR_DEGREE = -2


class TruncSeries:
    __slots__ = ("ring", "nvars", "order", "coeffs", "total_degree")

    def __init__(self, ring: PolyRing, nvars: int, order: int, coeffs: dict,
                 total_degree: int | None = None, check: bool = False):
        self.ring = ring
        self.nvars = nvars
        self.order = order
        self.coeffs = {e: c for e, c in coeffs.items() if not c.is_zero() and sum(e) <= order}
        self.total_degree = total_degree
        if check:
            self.check_homogeneous()

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, ring, nvars, order):
        return cls(ring, nvars, order, {})

    @classmethod
    def variable(cls, ring, nvars, order, k=0):
        e = tuple(1 if j == k else 0 for j in range(nvars))
        return cls(ring, nvars, order, {e: ring.one()}, total_degree=VAR_DEGREE)

    @classmethod
    def monomial_series(cls, ring, nvars, order, exp: tuple, coeff: GradedPoly):
        return cls(ring, nvars, order, {exp: coeff})

    def check_homogeneous(self):
        if self.total_degree is None:
            degs = {c.degree() + VAR_DEGREE * sum(e) for e, c in self.coeffs.items()}
            if len(degs) > 1:
                raise ValueError(f"series is not homogeneous: total degrees {sorted(degs)}")
            if degs:
                self.total_degree = degs.pop()
            return self
        for e, c in self.coeffs.items():
            want = self.total_degree - VAR_DEGREE * sum(e)
            got = c.degree()
            if got != want:
                raise ValueError(
                    f"coefficient at {e} has degree {got}, expected {want}"
                )
        return self

    # -- ring ops ------------------------------------------------------------
    def _merge_meta(self, other):
        if self.ring != other.ring or self.nvars != other.nvars:
            raise ValueError("incompatible series")
        return min(self.order, other.order)

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        order = self._merge_meta(other)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            s = out.get(e)
            out[e] = c if s is None else s + c
        td = self.total_degree if self.total_degree == other.total_degree else None
        return TruncSeries(self.ring, self.nvars, order, out, td)

    def __neg__(self):
        return TruncSeries(self.ring, self.nvars, self.order,
                           {e: -c for e, c in self.coeffs.items()}, self.total_degree)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        order = self._merge_meta(other)
        out: dict = {}
        for ea, ca in self.coeffs.items():
            ra = sum(ea)
            for eb, cb in other.coeffs.items():
                if ra + sum(eb) > order:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                c = ca * cb
                if c.is_zero():
                    continue
                s = out.get(e)
                out[e] = c if s is None else s + c
        td = None
        if self.total_degree is not None and other.total_degree is not None:
            td = self.total_degree + other.total_degree
        return TruncSeries(self.ring, self.nvars, order, out, td)

    def scale(self, poly: GradedPoly) -> "TruncSeries":
        td = None
        if self.total_degree is not None and not poly.is_zero():
            td = self.total_degree + poly.degree()
        return TruncSeries(self.ring, self.nvars, self.order,
                           {e: c * poly for e, c in self.coeffs.items()}, td)

    def __pow__(self, n: int) -> "TruncSeries":
        if n < 0:
            raise ValueError("negative series power")
        result = TruncSeries(self.ring, self.nvars, self.order,
                             {(0,) * self.nvars: self.ring.one()}, 0)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def truncate(self, order: int) -> "TruncSeries":
        return TruncSeries(self.ring, self.nvars, order,
                           {e: c for e, c in self.coeffs.items() if sum(e) <= order},
                           self.total_degree)

    # -- access ---------------------------------------------------------------
    def coeff(self, *exp) -> GradedPoly:
        e = tuple(exp)
        return self.coeffs.get(e, self.ring.zero())

    def valuation(self) -> int:
        if not self.coeffs:
            return self.order + 1
        return min(sum(e) for e in self.coeffs)

    def constant_term(self) -> GradedPoly:
        return self.coeff(*((0,) * self.nvars))

    def is_zero(self) -> bool:
        return not self.coeffs

    # -- composition ------------------------------------------------------------
    def subst(self, args: list["TruncSeries"]) -> "TruncSeries":
        """Evaluate at argument series (one per variable, zero constant term).

        All arguments share a variable count and truncation; the result is a
        series in the arguments' variables.
        """
        if len(args) != self.nvars:
            raise ValueError(f"need {self.nvars} arguments")
        for a in args:
            if not a.constant_term().is_zero():
                raise ValueError("argument has nonzero constant term")
        tgt = args[0]
        order = min([self.order] + [a.order for a in args])
        nv = tgt.nvars
        one = TruncSeries(tgt.ring, nv, order, {(0,) * nv: tgt.ring.one()}, 0)

        pow_cache = [{0: one} for _ in args]

        def arg_pow(i: int, k: int) -> TruncSeries:
            cache = pow_cache[i]
            if k not in cache:
                m = max(j for j in cache if j <= k)
                cur = cache[m]
                while m < k:
                    cur = cur * args[i]
                    m += 1
                    cache[m] = cur
            return cache[k]

        acc = TruncSeries.zero(tgt.ring, nv, order)
        for e, c in sorted(self.coeffs.items()):
            if sum(a.valuation() * k for a, k in zip(args, e)) > order:
                continue
            term = one.scale(c)
            for i, k in enumerate(e):
                if k:
                    term = term * arg_pow(i, k)
            acc = acc + term
        return acc

    def compose_monomial(self, coeff: GradedPoly, power: int) -> "TruncSeries":
        """Substitute c*x^power for the variable of a one-variable series."""
        if self.nvars != 1:
            raise ValueError("compose_monomial needs a one-variable series")
        out = {}
        for (a,), c in self.coeffs.items():
            if a * power > self.order:
                continue
            val = c * (coeff ** a)
            if not val.is_zero():
                out[(a * power,)] = val
        td = None
        if (self.total_degree is not None and not coeff.is_zero()
                and coeff.degree() == -VAR_DEGREE * (power - 1)):
            td = self.total_degree
        return TruncSeries(self.ring, 1, self.order, out, td)

    def map_coefficients(self, target_ring: PolyRing, images, coeff_map=None) -> "TruncSeries":
        out = {}
        for e, c in self.coeffs.items():
            v = c.apply_map(target_ring, images, coeff_map)
            if not v.is_zero():
                out[e] = v
        return TruncSeries(target_ring, self.nvars, self.order, out, self.total_degree)

    # -- serialization ------------------------------------------------------------
    def to_dict(self) -> dict:
        from .presentation import coeff_str

        def poly_out(p: GradedPoly):
            return [
                {"c": coeff_str(c),
                 "e": {self.ring.generators[j].name: x for j, x in enumerate(m) if x}}
                for m, c in p.sorted_terms()
            ]

        return {
            "nvars": self.nvars,
            "order": self.order,
            "coeffs": {",".join(map(str, e)): poly_out(c)
                       for e, c in sorted(self.coeffs.items())},
        }

    def __repr__(self):
        support = sorted(self.coeffs)[:6]
        return f"<TruncSeries nvars={self.nvars} order={self.order} support~{support}>"
