"""Hochschild homology of graded commutative algebras, three ways.

* ``hh_hkr``     -- closed form P (x) Lambda(dg) for smooth generators, with
                    étale base change certified by unit-Jacobian reports
                    (refused without a certificate).
* ``hh_koszul``  -- closed-form bigraded rank table for free inputs, by
                    direct enumeration of monomials times exterior subsets.
* ``hh_bar``     -- brute-force normalized Hochschild complex of a
                    finite-dimensional graded algebra, ranks by exact
                    Gaussian elimination.  The independent oracle.

The three routes must agree on their common domains; ``compare_methods``
returns the (required empty) diff.
"""

from __future__ import annotations

from itertools import combinations

from .linalg import ExactMatrix, exact_rank
from .poly import GF, GradedPoly, Generator, PolyRing, QQ
from .presentation import Presentation
from .derivation import partial_derivative


class MissingEtaleCertificateError(RuntimeError):
    """hh_hkr refuses to assume étaleness that nobody certified."""


class DimensionBudgetError(RuntimeError):
    pass


class MethodDisagreementError(AssertionError):
    pass


class BigradedTable:
    """Ranks per (homological degree s, internal degree t) with provenance."""

    def __init__(self, ranks: dict, s_max: int, window: tuple, provenance: str):
        self.ranks = {k: v for k, v in ranks.items() if v}
        self.s_max = s_max
        self.window = tuple(window)
        self.provenance = provenance

    def rank(self, s: int, t: int) -> int:
        return self.ranks.get((s, t), 0)

    def to_dict(self) -> dict:
        return {
            "schema": "chromalg/hh-table/1",
            "provenance": self.provenance,
            "s_max": self.s_max,
            "window": list(self.window),
            "ranks": {f"{s},{t}": r for (s, t), r in sorted(self.ranks.items())},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BigradedTable":
        ranks = {}
        for key, r in data["ranks"].items():
            s, t = key.split(",")
            ranks[(int(s), int(t))] = r
        return cls(ranks, data["s_max"], tuple(data["window"]), data["provenance"])

    def __repr__(self):
        return (f"<BigradedTable {self.provenance} s<={self.s_max} "
                f"t in {self.window}, {len(self.ranks)} nonzero>")


def compare_methods(*tables: BigradedTable) -> dict:
    """Pairwise diff on the common window; an empty dict or bust."""
    if len(tables) < 2:
        return {}
    s_max = min(t.s_max for t in tables)
    lo = max(t.window[0] for t in tables)
    hi = min(t.window[1] for t in tables)
    diff = {}
    keys = set()
    for tab in tables:
        keys.update(k for k in tab.ranks
                    if k[0] <= s_max and lo <= k[1] <= hi)
    for key in sorted(keys):
        vals = [tab.rank(*key) for tab in tables]
        if len(set(vals)) > 1:
            diff[key] = vals
    return diff


def require_agreement(*tables: BigradedTable):
    diff = compare_methods(*tables)
    if diff:
        raise MethodDisagreementError(f"methods disagree: {diff}")
    return diff


class HHAnswer:
    """P tensored with an exterior algebra on degree-one classes dg."""

    def __init__(self, presentation: Presentation, exterior: list, provenance: str):
        # exterior entries: (name, internal_degree); homological degree is 1
        self.presentation = presentation
        self.exterior = list(exterior)
        self.provenance = provenance
        for name, deg in self.exterior:
            src = name[1:] if name.startswith("d") else name
            if src in presentation.ring.index:
                want = presentation.ring.generators[presentation.ring.index[src]].degree
                if deg != want:
                    raise ValueError(f"internal degree of {name} must be {want}")

    def table(self, window: tuple, s_max: int = 4, exclude=None) -> BigradedTable:
        """Rank table; invertible generators count as ground units."""
        lo, hi = window
        ring = self.presentation.ring
        if exclude is None:
            exclude = tuple(g.name for g in ring.generators if g.invertible)
        ext_degs = [d for _, d in self.exterior]
        lo2 = min(0, lo - sum(d for d in ext_degs if d > 0))
        counts = self.presentation.hilbert_counts(lo2, hi, exclude=exclude)
        ranks: dict = {}
        for s in range(0, min(s_max, len(ext_degs)) + 1):
            for subset in combinations(ext_degs, s):
                shift = sum(subset)
                for t in range(lo, hi + 1):
                    base = counts.get(t - shift, 0)
                    if base:
                        ranks[(s, t)] = ranks.get((s, t), 0) + base
        return BigradedTable(ranks, s_max, window, f"hkr:{self.provenance}")

    def __repr__(self):
        ext = ", ".join(name for name, _ in self.exterior)
        return f"<HHAnswer {self.provenance} exterior=({ext})>"


class EtaleCertificate:
    """Unit-Jacobian certificate for one algebra generator.

    Sufficient condition: a relation monic-like in the generator whose
    derivative normal-forms to a unit monomial.
    """

    def __init__(self, generator: str, jacobian: GradedPoly, verdict: str):
        self.generator = generator
        self.jacobian = jacobian
        self.verdict = verdict

    @property
    def etale(self) -> bool:
        return self.verdict == "etale"


def jacobian_certificate(pres: Presentation, gen_name: str) -> EtaleCertificate:
    """Certify one generator étale from the relation that bounds it."""
    ring = pres.ring
    k = ring.index[gen_name]
    for rel, rule in zip(pres.relations, pres.rules):
        if rule.lead[k] and all(e == 0 for j, e in enumerate(rule.lead) if j != k):
            jac = pres.normal_form(partial_derivative(rel, gen_name))
            verdict = "etale" if (not jac.is_zero() and jac.is_unit_monomial()) else "not certified"
            return EtaleCertificate(gen_name, jac, verdict)
    return EtaleCertificate(gen_name, ring.zero(), "no bounding relation")


def hh_hkr(pres: Presentation, smooth: list, tower: dict | None = None,
           provenance: str = "") -> HHAnswer:
    """HH of P as P (x) Lambda(dg : g in smooth).

    `smooth` lists the polynomial/Laurent generators of the base.  Every
    other non-base generator must come with an étale certificate in `tower`
    (anything with an ``etale`` attribute); otherwise this refuses.
    """
    ring = pres.ring
    tower = tower or {}
    for group in (smooth, list(tower)):
        for g in group:
            if g not in ring.index:
                raise ValueError(f"unknown generator {g}")
    bounded = set()
    for rule in pres.rules:
        bounded.update(ring.generators[j].name for j, e in enumerate(rule.lead) if e)
    clash = bounded & set(smooth)
    if clash:
        raise ValueError(
            f"generators bounded by relations cannot be smooth: {sorted(clash)}"
        )
    covered = set(smooth) | set(pres.base)
    for g in ring.generators:
        if g.name in covered:
            continue
        cert = tower.get(g.name)
        if cert is None:
            raise MissingEtaleCertificateError(
                f"no étale certificate for generator {g.name}"
            )
        if not getattr(cert, "etale", False):
            raise MissingEtaleCertificateError(
                f"certificate for {g.name} has verdict "
                f"{getattr(cert, 'verdict', '?')!r}"
            )
    exterior = []
    for name in smooth:
        deg = ring.generators[ring.index[name]].degree
        exterior.append((f"d{name}", deg))
    return HHAnswer(pres, exterior, provenance or f"hh({ring!r})")


def hh_koszul(gens: list, window: tuple, s_max: int = 4,
              provenance: str = "koszul") -> BigradedTable:
    """Closed-form table for a free graded-commutative algebra on even
    generators (Laurent allowed); exterior classes dg sit at (1, |g|).

    Ranks are free-module ranks over the subring generated by the invertible
    generators; with none present they are plain vector-space dimensions.
    """
    for g in gens:
        if g.degree % 2:
            raise ValueError("free odd generators are out of scope here")
    lo, hi = window
    counted = [g.degree for g in gens if not g.invertible]
    if any(d <= 0 for d in counted):
        raise ValueError("polynomial generators need positive degree")
    # bounded knapsack count of monomials per degree
    counts = [0] * (hi + 1)
    counts[0] = 1
    for d in counted:
        for t in range(d, hi + 1):
            counts[t] += counts[t - d]
    ext_degs = [g.degree for g in gens]
    ranks: dict = {}
    for s in range(0, min(s_max, len(ext_degs)) + 1):
        for subset in combinations(ext_degs, s):
            shift = sum(subset)
            for t in range(max(lo, 0), hi + 1):
                if 0 <= t - shift <= hi and counts[t - shift]:
                    ranks[(s, t)] = ranks.get((s, t), 0) + counts[t - shift]
    return BigradedTable(ranks, s_max, window, provenance)


# -- the brute-force oracle ---------------------------------------------------

class FiniteAlgebra:
    """Finite-dimensional graded algebra with an exact multiplication table."""

    def __init__(self, pres: Presentation, budget: int = 4000):
        self.presentation = pres
        ring = pres.ring
        basis = Presentation(ring, pres.relations, base=()).module_basis(budget)
        self.basis = basis
        self.index = {mon: k for k, mon in enumerate(basis)}
        self.dim = len(basis)
        self.degrees = [ring.mono_degree(m) for m in basis]
        self.unit_index = self.index[(0,) * len(ring.generators)]
        self.field = ring.field
        self._table: dict = {}

    def mul(self, a: int, b: int) -> dict:
        """Product of basis elements as {basis index: coefficient}."""
        key = (a, b)
        if key not in self._table:
            ring = self.presentation.ring
            pa = GradedPoly(ring, {self.basis[a]: self.field.one})
            pb = GradedPoly(ring, {self.basis[b]: self.field.one})
            nf = self.presentation.normal_form(pa * pb)
            self._table[key] = {self.index[m]: c for m, c in nf.terms.items()}
        return self._table[key]

    def __repr__(self):
        return f"<FiniteAlgebra dim={self.dim} over {self.field!r}>"


def specialize(pres: Presentation, values: dict) -> Presentation:
    """Collapse the grading and pin named generators to scalar values.

    The finite-dimensional specializations feed the bar oracle; the
    assignment (typically invertible generators to 1) is part of the fixture
    and only claims validity for the specialized algebra.
    """
    ring = pres.ring
    keep = [g for g in ring.generators if g.name not in values]
    target = PolyRing(ring.field, [Generator(g.name, 0) for g in keep])
    pos = {g.name: k for k, g in enumerate(keep)}
    f = ring.field

    def map_poly(p: GradedPoly) -> GradedPoly:
        out: dict = {}
        for mon, c in p.terms.items():
            vec = [0] * len(keep)
            coeff = c
            for j, e in enumerate(mon):
                if e == 0:
                    continue
                name = ring.generators[j].name
                if name in values:
                    val = f.of(values[name])
                    if e < 0:
                        val = f.inv(val)
                        e = -e
                    for _ in range(e):
                        coeff = f.mul(coeff, val)
                else:
                    vec[pos[name]] += e
            if coeff == f.zero:
                continue
            key = tuple(vec)
            out[key] = f.add(out.get(key, f.zero), coeff)
        return GradedPoly(target, {m: c for m, c in out.items() if c != f.zero})

    rels = [map_poly(r) for r in pres.relations]
    return Presentation(target, [r for r in rels if not r.is_zero()], base=())


class BarComplexSlice:
    """Chain ranks and boundary matrices at one internal degree."""

    def __init__(self, degree: int, chain_dims: list, boundaries: list):
        self.degree = degree
        self.chain_dims = chain_dims
        self.boundaries = boundaries  # boundaries[s]: C_s -> C_{s-1}


def _bar_chains(A: FiniteAlgebra, s: int):
    """Basis of A (x) Abar^(x s): tuples (b0, ..., bs), bars != unit."""
    bars = [k for k in range(A.dim) if k != A.unit_index]
    chains = [(k,) for k in range(A.dim)]
    for _ in range(s):
        chains = [c + (b,) for c in chains for b in bars]
    return chains


def bar_boundary(A: FiniteAlgebra, s: int, column_basis, row_index):
    """Matrix of b_s against the given chain bases (rows: C_{s-1})."""
    f = A.field
    rows = len(row_index)
    mat = [[f.zero] * len(column_basis) for _ in range(rows)]
    for col, chain in enumerate(column_basis):
        entries: dict = {}

        def add(target, coeff):
            if coeff == f.zero:
                return
            r = row_index.get(target)
            if r is None:
                return
            entries[r] = f.add(entries.get(r, f.zero), coeff)

        sign = 1
        for j in range(s):
            prod = A.mul(chain[j], chain[j + 1])
            for idx, c in prod.items():
                if j >= 1 and idx == A.unit_index:
                    continue  # normalized: unit dies in bar slots
                target = chain[:j] + (idx,) + chain[j + 2:]
                add(target, c if sign > 0 else f.neg(c))
            sign = -sign
        # rotation face, with the Koszul sign of moving a_s to the front
        koszul = sum(A.degrees[b] for b in chain[:-1]) * A.degrees[chain[-1]]
        rot_sign = (-1) ** s * (-1) ** (koszul % 2)
        prod = A.mul(chain[-1], chain[0])
        for idx, c in prod.items():
            target = (idx,) + chain[1:-1]
            add(target, c if rot_sign > 0 else f.neg(c))
        for r, c in entries.items():
            mat[r][col] = c
    return ExactMatrix(f, mat) if rows else ExactMatrix(f, [])


def hh_bar(A: FiniteAlgebra, s_max: int = 4, column_budget: int = 10000,
           check_dd: bool = True, provenance: str = "bar") -> BigradedTable:
    """Homology ranks of the normalized Hochschild complex per (s, t)."""
    chain_bases = []
    for s in range(s_max + 2):
        basis = _bar_chains(A, s)
        if len(basis) > column_budget:
            raise DimensionBudgetError(
                f"C_{s} has {len(basis)} columns (> {column_budget})"
            )
        chain_bases.append(basis)

    degrees_of = [
        [sum(A.degrees[k] for k in chain) for chain in basis]
        for basis in chain_bases
    ]
    all_degrees = sorted({d for degs in degrees_of for d in degs})
    ranks: dict = {}
    for t in all_degrees:
        sliced = []
        index_maps = []
        for s, basis in enumerate(chain_bases):
            sub = [c for c, d in zip(basis, degrees_of[s]) if d == t]
            sliced.append(sub)
            index_maps.append({c: r for r, c in enumerate(sub)})
        bnd_rank = [0] * (s_max + 2)
        mats = {}
        for s in range(1, s_max + 2):
            if not sliced[s]:
                continue
            mat = bar_boundary(A, s, sliced[s], index_maps[s - 1])
            mats[s] = mat
            bnd_rank[s] = exact_rank(mat) if sliced[s - 1] else 0
        if check_dd:
            _assert_dd_zero(A, mats, sliced)
        for s in range(0, s_max + 1):
            dim = len(sliced[s])
            if dim == 0:
                continue
            h = dim - bnd_rank[s] - bnd_rank[s + 1]
            if h < 0:
                raise AssertionError("negative homology rank: broken boundary")
            if h:
                ranks[(s, t)] = h
    lo = min(all_degrees, default=0)
    hi = max(all_degrees, default=0)
    return BigradedTable(ranks, s_max, (lo, hi), provenance)


def _assert_dd_zero(A: FiniteAlgebra, mats: dict, sliced: list):
    f = A.field
    for s in sorted(mats):
        if s - 1 not in mats:
            continue
        upper, lower = mats[s], mats[s - 1]
        if lower.nrows == 0 or upper.ncols == 0:
            continue
        for col in range(upper.ncols):
            colvec = [upper.rows[r][col] for r in range(upper.nrows)]
            for r2 in range(lower.nrows):
                acc = f.zero
                row = lower.rows[r2]
                for k, val in enumerate(colvec):
                    if val != f.zero:
                        acc = f.add(acc, f.mul(row[k], val))
                if acc != f.zero:
                    raise AssertionError(f"d o d != 0 at s={s}")


# -- ready-made fixtures -------------------------------------------------------

def split_etale_algebra(p: int = 3) -> FiniteAlgebra:
    """F_p[t]/(t^p - t): split étale of rank p, HH concentrated in s = 0."""
    ring = PolyRing(GF(p), [Generator("t", 0)])
    t = ring.gen("t")
    return FiniteAlgebra(Presentation(ring, [t ** p - t]))


def dual_numbers(degree: int = 2) -> FiniteAlgebra:
    """Q[x]/(x^2) with |x| = degree; the classical non-smooth test case."""
    ring = PolyRing(QQ, [Generator("x", degree)])
    x = ring.gen("x")
    return FiniteAlgebra(Presentation(ring, [x * x]))
