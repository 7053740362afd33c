"""Finitely presented graded commutative algebras with rewrite normal forms.

A Presentation is a generator list, a set of homogeneous relations, and a
rewrite system derived from them: each relation is solved for its leading
monomial (which must carry a unit coefficient), giving a rule
``lead -> remainder`` with the remainder strictly smaller in the graded-lex
order.  Normal forms are rewriting fixpoints.  Confluence is not proven here;
it is audited empirically by the test suite on every shipped presentation.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .poly import GF, GradedPoly, Generator, PolyRing, QQ

SCHEMA_PRESENTATION = "chromalg/presentation/1"


class RewriteBudgetError(RuntimeError):
    """Rewriting did not reach a fixpoint within the step budget."""


class UnboundedBasisError(RuntimeError):
    """Monomial basis enumeration exceeded its budget (missing relations?)."""


class InfinitePerDegreeError(RuntimeError):
    """A degree slice has infinitely many monomials; count over the graded
    field (exclude the invertible ground generators) instead."""


class RewriteRule:
    """lead -> remainder, with lead a monomial carrying coefficient 1.

    Invertible-generator exponents in `lead` are folded into the remainder on
    construction, so `lead` is supported on non-invertible generators only.
    """

    __slots__ = ("ring", "lead", "remainder")

    def __init__(self, ring: PolyRing, lead: tuple, remainder: GradedPoly):
        self.ring = ring
        self.lead = lead
        self.remainder = remainder
        if not remainder.is_zero():
            if ring.sort_key(remainder.leading()[0]) >= ring.sort_key(lead):
                raise ValueError("remainder not smaller than lead monomial")

    def divides(self, mon: tuple) -> bool:
        for e_lead, e, inv in zip(self.lead, mon, self.ring._invertible):
            if e_lead and not inv and e < e_lead:
                return False
            # invertible generators never block divisibility
        return True

    @classmethod
    def from_relation(cls, ring: PolyRing, rel: GradedPoly) -> "RewriteRule":
        if rel.is_zero():
            raise ValueError("zero relation")
        rel.degree()  # homogeneity check
        lead_mon, lead_c = rel.leading()
        inv_part = tuple(e if inv else 0 for e, inv in zip(lead_mon, ring._invertible))
        bare = tuple(e - i for e, i in zip(lead_mon, inv_part))
        if all(e == 0 for e in bare):
            raise ValueError("relation leads with a unit monomial")
        # remainder = lead - rel, scaled by the inverse of the unit lead term
        unit = GradedPoly(ring, {inv_part: lead_c})
        rem = (GradedPoly(ring, {lead_mon: lead_c}) - rel) * unit.inverse_monomial()
        return cls(ring, bare, rem)


class Presentation:
    """Generators, homogeneous relations, rewrite rules and a base marker."""

    def __init__(self, ring: PolyRing, relations=(), base=(), max_steps: int = 20000):
        self.ring = ring
        self.relations = tuple(relations)
        self.base = tuple(base)
        unknown = set(self.base) - set(ring.index)
        if unknown:
            raise ValueError(f"base names not in ring: {sorted(unknown)}")
        self.max_steps = max_steps
        self.rules = tuple(RewriteRule.from_relation(ring, r) for r in self.relations)

    # -- rewriting --------------------------------------------------------
    def _find_redex(self, poly: GradedPoly, strategy: str):
        if strategy == "max":
            for mon, _ in poly.sorted_terms():
                for rule in self.rules:
                    if rule.divides(mon):
                        return mon, rule
            return None
        # "first": dict insertion order, last matching rule
        for mon in poly.terms:
            hit = None
            for rule in self.rules:
                if rule.divides(mon):
                    hit = rule
            if hit is not None:
                return mon, hit
        return None

    def normal_form(self, poly: GradedPoly, strategy: str = "max") -> GradedPoly:
        """Rewriting fixpoint of a homogeneous element.

        Idempotent and degree preserving; a step budget guards against a
        malformed (non-terminating) rule system.
        """
        if poly.ring != self.ring:
            raise ValueError("element not over this presentation's ring")
        if not poly.is_zero():
            poly.degree()
        current = poly
        for _ in range(self.max_steps):
            hit = self._find_redex(current, strategy)
            if hit is None:
                return current
            mon, rule = hit
            c = current.terms[mon]
            quot = tuple(e - l for e, l in zip(mon, rule.lead))
            stripped = GradedPoly(self.ring, {m: v for m, v in current.terms.items() if m != mon})
            replacement = GradedPoly(self.ring, {quot: c}) * rule.remainder
            current = stripped + replacement
        raise RewriteBudgetError(f"no fixpoint within {self.max_steps} steps")

    def is_normal(self, mon: tuple) -> bool:
        return not any(rule.divides(mon) for rule in self.rules)

    # -- module structure --------------------------------------------------
    def module_basis(self, budget: int = 10000) -> list:
        """Normal-form monomials in the non-base generators.

        For a quotient that is a free module over its base subalgebra, this
        is the module basis.  Raises UnboundedBasisError when the rewrite
        system does not bound some non-base generator.
        """
        n = len(self.ring.generators)
        free_idx = [k for k in range(n) if self.ring.generators[k].name not in self.base]
        for k in free_idx:
            if self.ring.generators[k].invertible:
                raise UnboundedBasisError(
                    f"non-base generator {self.ring.generators[k].name} is invertible"
                )
        unit = (0,) * n
        seen = {unit}
        frontier = [unit]
        out = [unit]
        while frontier:
            if len(out) > budget:
                raise UnboundedBasisError("basis enumeration budget exceeded")
            nxt = []
            for mon in frontier:
                for k in free_idx:
                    cand = tuple(e + 1 if j == k else e for j, e in enumerate(mon))
                    if cand in seen or not self.ring.mono_valid(cand):
                        continue
                    seen.add(cand)
                    if self.is_normal(cand):
                        out.append(cand)
                        nxt.append(cand)
            frontier = nxt
        out.sort(key=self.ring.sort_key)
        return out

    def hilbert_counts(self, lo: int, hi: int, exclude=(), budget: int = 200000) -> dict:
        """Count normal-form monomials per internal degree in [lo, hi].

        `exclude` names generators treated as ground units (the graded-field
        escape hatch).  Two or more counted invertible generators, or an
        invertible one mixed with anything else, make slices infinite.
        """
        n = len(self.ring.generators)
        counted = [k for k in range(n) if self.ring.generators[k].name not in exclude]
        inv = [k for k in counted if self.ring.generators[k].invertible]
        if inv and len(counted) > 1:
            raise InfinitePerDegreeError(
                "invertible generators with commensurable degrees; "
                "count over the graded field (exclude the ground units)"
            )
        counts = {d: 0 for d in range(lo, hi + 1)}
        if inv:
            (k,) = inv
            d = self.ring.generators[k].degree
            if d == 0:
                raise InfinitePerDegreeError("invertible generator of degree 0")
            for deg in counts:
                if deg % d == 0:
                    counts[deg] += 1
            return counts
        unit = (0,) * n
        seen = {unit}
        frontier = [unit]
        if lo <= 0 <= hi:
            counts[0] += 1
        steps = 0
        while frontier:
            nxt = []
            for mon in frontier:
                for k in counted:
                    cand = tuple(e + 1 if j == k else e for j, e in enumerate(mon))
                    if cand in seen or not self.ring.mono_valid(cand):
                        continue
                    seen.add(cand)
                    steps += 1
                    if steps > budget:
                        raise InfinitePerDegreeError("enumeration budget exceeded")
                    deg = self.ring.mono_degree(cand)
                    if deg > hi and all(self.ring.generators[j].degree > 0 for j in counted):
                        continue
                    if self.is_normal(cand):
                        if lo <= deg <= hi:
                            counts[deg] += 1
                        nxt.append(cand)
            frontier = nxt
        return counts

    # -- serialization ------------------------------------------------------
    def to_dict(self) -> dict:
        def poly_out(p: GradedPoly):
            items = []
            for mon, c in p.sorted_terms():
                exps = {
                    self.ring.generators[j].name: e
                    for j, e in enumerate(mon)
                    if e
                }
                items.append({"c": coeff_str(c), "e": dict(sorted(exps.items()))})
            return items

        return {
            "schema": SCHEMA_PRESENTATION,
            "prime": self.ring.field.p,
            "generators": [
                {"name": g.name, "degree": g.degree, "invertible": g.invertible}
                for g in self.ring.generators
            ],
            "relations": [poly_out(r) for r in self.relations],
            "base": list(self.base),
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "Presentation":
        if data.get("schema") != SCHEMA_PRESENTATION:
            raise ValueError(f"unsupported schema {data.get('schema')!r}")
        field = QQ if data["prime"] == 0 else GF(data["prime"])
        gens = [
            Generator(g["name"], g["degree"], bool(g.get("invertible", False)))
            for g in data["generators"]
        ]
        ring = PolyRing(field, gens)
        rels = []
        for rel in data["relations"]:
            p = ring.zero()
            for item in rel:
                p = p + ring.monomial(item["e"], coeff_parse(field, item["c"]))
            rels.append(p)
        return cls(ring, rels, tuple(data.get("base", ())))

    @classmethod
    def from_json(cls, text: str) -> "Presentation":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return (
            f"Presentation({self.ring!r}, {len(self.relations)} relations, "
            f"base={list(self.base)})"
        )


def coeff_str(c) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}" if c.denominator != 1 else str(c.numerator)
    return str(c)


def coeff_parse(field, s: str):
    if "/" in s:
        n, d = s.split("/")
        return field.of(int(n), int(d))
    return field.of(int(s))


def canonical_json(obj) -> str:
    """Deterministic JSON used for every serialized artifact."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def free_presentation(field, gens, base=()) -> Presentation:
    return Presentation(PolyRing(field, gens), (), base)
