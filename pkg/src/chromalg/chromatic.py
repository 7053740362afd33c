"""Graded bookkeeping for spectral-sequence collapse and splitting checks.

This layer never constructs spectra.  It certifies "no room for
differentials" on first-quadrant pages whose algebra generators live in
columns 0 and 1, encodes the survival rule for Morava K-homology of
localized summands (K(i) survives an L_j-local summand iff i <= j), and
compares suspension-degree multisets of conjectured splittings against the
exterior-generator degrees of the computed K(i)-homology.  Degree multisets
of free rank-one modules are compared modulo the unit-degree lattice of the
coefficients: an invertible element of degree d shifts a module generator by
d, so only the residue is well defined.
"""

from __future__ import annotations

from math import gcd

from .poly import is_odd_prime
from .presentation import Presentation


# -- E2 pages and collapse ------------------------------------------------------

class PageGenerator:
    __slots__ = ("name", "s", "t")

    def __init__(self, name: str, s: int, t: int):
        self.name = name
        self.s = s
        self.t = t


class E2Page:
    """Free graded-commutative algebra page over an optional base.

    Differentials follow the homological convention
    d^r : (s, t) -> (s - r, t + r - 1).
    """

    def __init__(self, generators, base: Presentation | None = None,
                 label: str = "", window: int = 64):
        self.generators = [g if isinstance(g, PageGenerator) else PageGenerator(*g)
                           for g in generators]
        self.base = base
        self.label = label
        self.window = window

    def to_dict(self) -> dict:
        return {
            "schema": "chromalg/e2page/1",
            "label": self.label,
            "generators": [{"name": g.name, "s": g.s, "t": g.t} for g in self.generators],
            "base": self.base.to_dict() if self.base else None,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "E2Page":
        if data.get("schema") != "chromalg/e2page/1":
            raise ValueError("unsupported page schema")
        base = Presentation.from_dict(data["base"]) if data.get("base") else None
        return cls([(g["name"], g["s"], g["t"]) for g in data["generators"]],
                   base=base, label=data.get("label", ""))


class CollapseCertificate:
    def __init__(self, page: E2Page, collapsed: bool, candidates: list):
        self.page = page
        self.collapsed = collapsed
        self.candidates = candidates  # (gen name, r, target bidegree, reason)

    def to_dict(self) -> dict:
        return {
            "schema": "chromalg/collapse/1",
            "label": self.page.label,
            "collapsed": self.collapsed,
            "candidates": [
                {"generator": name, "r": r, "target": list(tgt), "note": note}
                for name, r, tgt, note in self.candidates
            ],
        }


def bokstedt_collapse_check(page: E2Page) -> CollapseCertificate:
    """Certify collapse when no algebra generator can support a differential.

    A generator at (s, t) could only hit (s - r, t + r - 1) for r >= 2; with
    s <= 1 every target has negative column.  When a base presentation is
    available, targets whose bidegree cannot support a nonzero group in the
    page algebra are also ruled out.  Anything left is reported as a
    candidate, not an error.
    """
    candidates = []
    for g in page.generators:
        for r in range(2, g.s + 1):
            target = (g.s - r, g.t + r - 1)
            if target[0] < 0:
                continue
            if page.base is not None and _bidegree_vanishes(page, *target):
                continue
            candidates.append((g.name, r, target, "target bidegree may be nonzero"))
    return CollapseCertificate(page, collapsed=not candidates, candidates=candidates)


def _bidegree_vanishes(page: E2Page, s: int, t: int) -> bool:
    """True when no monomial in the page generators times a base class can
    land in (s, t) (searched within the page window).

    Only sound when every generator is exterior (odd total degree), so
    monomials are square free; otherwise nothing is ruled out.
    """
    gens = page.generators
    if any((g.s + g.t) % 2 == 0 for g in gens):
        return False
    hits = [[]]
    for g in gens:
        hits = [h + [k] for h in hits for k in (0, 1)]
    for pick in hits:
        s_sum = sum(k * g.s for k, g in zip(pick, gens))
        t_sum = sum(k * g.t for k, g in zip(pick, gens))
        if s_sum != s:
            continue
        rem = t - t_sum
        if rem < 0 or rem > page.window:
            continue
        try:
            counts = page.base.hilbert_counts(rem, rem, exclude=_base_units(page.base))
        except Exception:
            return False  # cannot rule it out
        if counts.get(rem, 0):
            return False
    return True


def _base_units(pres: Presentation):
    return tuple(g.name for g in pres.ring.generators if g.invertible)


def thh_page(p: int, n: int, i: int, base: Presentation | None = None) -> E2Page:
    """The K(i)-homology page for THH of the height-n theory: exterior
    generators dw_j at (1, 2p^j - 2) for i < j <= n."""
    gens = [(f"dw_{j}", 1, 2 * p ** j - 2) for j in range(i + 1, n + 1)]
    return E2Page(gens, base=base, label=f"K({i})-page, height {n}, p={p}")


# -- summand bookkeeping ---------------------------------------------------------

class Summand:
    """A localized suspended summand: Sigma^degree L_level E(n).

    level == n means no localization; the label is the exterior monomial
    (subset of dt indices) indexing the summand.
    """

    __slots__ = ("level", "degree", "label")

    def __init__(self, level: int, degree: int, label: tuple):
        self.level = level
        self.degree = degree
        self.label = tuple(label)

    def label_str(self) -> str:
        return " ".join(f"dt_{k}" for k in self.label) if self.label else "1"


def dt_degree(p: int, k: int) -> int:
    return 2 * p ** k - 1


def cube_summands(p: int, n: int) -> list:
    """The conjectured 2^n summands of THH at height n.

    The empty monomial indexes the unlocalized copy; a monomial whose top
    index is k indexes a copy of L_(n-k) at suspension |monomial|.
    """
    out = [Summand(n, 0, ())]
    for size in range(1, n + 1):
        from itertools import combinations
        for subset in combinations(range(1, n + 1), size):
            top = max(subset)
            level = n - top
            degree = sum(dt_degree(p, k) for k in subset)
            out.append(Summand(level, degree, subset))
    return out


class DegreeMultiset:
    """Multiset of suspension degrees with a unit-degree lattice."""

    def __init__(self, degrees, lattice_gens=()):
        self.degrees = tuple(sorted(degrees))
        self.lattice_gens = tuple(sorted(set(g for g in lattice_gens if g)))

    @property
    def modulus(self) -> int:
        m = 0
        for g in self.lattice_gens:
            m = gcd(m, g)
        return m

    def residues(self) -> tuple:
        m = self.modulus
        if m == 0:
            return self.degrees
        return tuple(sorted(d % m for d in self.degrees))

    def matches(self, other: "DegreeMultiset") -> bool:
        if self.modulus != other.modulus:
            return False
        return self.residues() == other.residues()

    def __repr__(self):
        return f"DegreeMultiset({list(self.degrees)}, lattice={list(self.lattice_gens)})"


def unit_lattice(p: int, n: int, i: int) -> tuple:
    """Degrees of the invertible coefficients of K(i)_*E(n).

    v_i comes from the ground graded field (absent at i = 0, where the ground
    is Q) and the image of v_n is invertible for every i.
    """
    gens = [2 * (p ** n - 1)]
    if i >= 1:
        gens.append(2 * (p ** i - 1))
    return tuple(sorted(gens))


def ki_of_summand(i: int, summand: Summand, p: int, n: int) -> list:
    """K(i) sees an L_j-local summand iff i <= j; the contribution is its
    suspension degree."""
    if not (0 <= i <= n):
        raise ValueError("need 0 <= i <= n")
    return [summand.degree] if i <= summand.level else []


def thh_ki_expected(p: int, n: int, i: int) -> DegreeMultiset:
    """Exterior-monomial degrees of Lambda(dw_{i+1}, ..., dw_n), total
    degree |dw_j| = 2p^j - 1, relative to the unit lattice of K(i)_*E(n)."""
    from itertools import combinations
    degrees = []
    idxs = range(i + 1, n + 1)
    for size in range(0, n - i + 1):
        for subset in combinations(idxs, size):
            degrees.append(sum(dt_degree(p, j) for j in subset))
    return DegreeMultiset(degrees, unit_lattice(p, n, i))


def conjectured_ki(p: int, n: int, i: int) -> DegreeMultiset:
    degs = []
    for s in cube_summands(p, n):
        degs.extend(ki_of_summand(i, s, p, n))
    return DegreeMultiset(degs, unit_lattice(p, n, i))


class ConjectureVerdict:
    def __init__(self, p, n, i, conjectured, expected, consistent, exact):
        self.p = p
        self.n = n
        self.i = i
        self.conjectured = conjectured
        self.expected = expected
        self.consistent = consistent
        self.exact = exact

    def to_dict(self) -> dict:
        return {
            "p": self.p, "n": self.n, "i": self.i,
            "conjectured_degrees": list(self.conjectured.degrees),
            "expected_degrees": list(self.expected.degrees),
            "unit_lattice": list(self.expected.lattice_gens),
            "consistent": self.consistent,
            "exact": self.exact,
        }


def conjecture_check(p: int, n: int, i: int) -> ConjectureVerdict:
    """Compare the cube decomposition against the computed K(i) shape."""
    if not is_odd_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if n < 1 or not (0 <= i <= n):
        raise ValueError("need n >= 1 and 0 <= i <= n")
    conj = conjectured_ki(p, n, i)
    expd = thh_ki_expected(p, n, i)
    exact = conj.degrees == expd.degrees
    return ConjectureVerdict(p, n, i, conj, expd, conj.matches(expd), exact)


class SplittingReport:
    def __init__(self, p, verdicts, k0_multiset, reduced_ok):
        self.p = p
        self.verdicts = verdicts
        self.k0_multiset = k0_multiset
        self.reduced_ok = reduced_ok

    @property
    def consistent(self) -> bool:
        return self.reduced_ok and all(v.consistent for v in self.verdicts)

    def to_dict(self) -> dict:
        return {
            "schema": "chromalg/splitting/1",
            "p": self.p,
            "consistent": self.consistent,
            "k0_degrees": list(self.k0_multiset),
            "reduced_has_no_unit": self.reduced_ok,
            "verdicts": [v.to_dict() for v in self.verdicts],
        }


def e2_splitting_check(p: int) -> SplittingReport:
    """Height-2 consistency: the K(i) comparisons for i = 0, 1, 2, the exact
    rational degree multiset {0, 2p-1, 2p^2-1, 2p^2+2p-2}, and the reduced
    statement (no degree-0 summand once the unit copy is removed)."""
    verdicts = [conjecture_check(p, 2, i) for i in (0, 1, 2)]
    k0 = conjectured_ki(p, 2, 0).degrees
    expected_k0 = tuple(sorted([0, 2 * p - 1, 2 * p ** 2 - 1, 2 * p ** 2 + 2 * p - 2]))
    exact_ok = k0 == expected_k0 and verdicts[0].exact
    reduced = [d for s in cube_summands(p, 2) if s.label for d in [s.degree]]
    reduced_ok = 0 not in reduced and exact_ok
    return SplittingReport(p, verdicts, k0, reduced_ok)


# -- TeX emission ------------------------------------------------------------------

def cube_table_tex(p: int, n: int) -> str:
    """Summand table; at n = 2 the classical 2x2 cube of local pieces."""
    if n == 2:
        rows = [
            r"\begin{tabular}{r|c|c|}",
            r" & $1$ & $dt_1$ \\ \hline",
            r"$1$ & $E$ & $L_1E$ \\ \hline",
            r"$dt_2$ & $L_0E$ & $L_0E$ \\ \hline",
            r"\end{tabular}",
        ]
        return "\n".join(rows) + "\n"
    lines = [r"\begin{tabular}{lll}", r"monomial & level & suspension \\ \hline"]
    for s in cube_summands(p, n):
        label = "$" + (" ".join(f"dt_{{{k}}}" for k in s.label) if s.label else "1") + "$"
        piece = "E" if s.level == n else f"L_{{{s.level}}}E"
        lines.append(rf"{label} & ${piece}$ & $\Sigma^{{{s.degree}}}$ \\")
    lines.append(r"\end{tabular}")
    return "\n".join(lines) + "\n"


def splitting_summands_tex(p: int) -> str:
    """The three reduced height-2 summands with their suspensions."""
    degs = [(s.label_str(), s.level, s.degree) for s in cube_summands(p, 2) if s.label]
    lines = [r"\begin{tabular}{lll}", r"class & piece & suspension \\ \hline"]
    for label, level, d in degs:
        piece = f"L_{{{level}}}E"
        lines.append(rf"${label}$ & ${piece}$ & $\Sigma^{{{d}}}$ \\")
    lines.append(r"\end{tabular}")
    return "\n".join(lines) + "\n"
