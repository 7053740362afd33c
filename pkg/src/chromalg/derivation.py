"""Derive presentations of K(i)_*E(n) from the p-series intertwining identity.

Over K(i)_*E(n) the universal strict isomorphism f between the pushforwards
of the Honda law F_i and the height-n law G_n satisfies

    [p]_{G_n-pushforward}(f(x)) = f([p]_{F_i-pushforward}(x)) = f(v_i x^(p^i)).

Both sides are expanded as truncated series over a working ring
F_p[t_1..t_M, w_1..w_n, v_i^{+-1}] (w_j stands for the right-unit image of
v_j, M = i + m) and compared coefficient by coefficient in increasing
exponent order.  The lowest comparisons force w_j = 0 for j < i and
w_i = v_i; the coefficient of x^(p^(i+r)) then yields the stage-r relation,
solved for t_r^(p^i) whose coefficient is the unit v_i.  Every other exponent
must reduce to 0 modulo the relations found so far; a residue signals an
expansion bug.
"""

from __future__ import annotations

from functools import lru_cache

from .fgl import (
    FGLaw,
    en_law,
    mod_p_map,
    p_series,
    strict_iso_series,
    v_name,
)
from .poly import GF, GradedPoly, Generator, PolyRing, is_odd_prime
from .presentation import Presentation, RewriteRule


class DerivationError(RuntimeError):
    """Coefficient comparison produced an inconsistency."""


class CrossTermError(RuntimeError):
    """A formal-sum cross term contributed at a p-power exponent."""


class SigmaMismatchError(RuntimeError):
    """Derived relations disagree with the closed-form K(n)_*E(n) relations."""


def w_name(j: int) -> str:
    return f"w_{j}"


def t_name(r: int) -> str:
    return f"t_{r}"


def default_truncation(p: int, i: int, m: int) -> int:
    # smallest order capturing every compared coefficient
    return p ** (i + m) + p - 1


@lru_cache(maxsize=None)
def working_ring(p: int, i: int, n: int, t_count: int) -> PolyRing:
    """F_p[t_M..t_1, w_n..w_1, v_i] with t's ranked above w's above v.

    The ranking makes the stage-r rewrite rule lead with t_r^(p^i).
    """
    gens = []
    for r in range(t_count, 0, -1):
        gens.append(Generator(t_name(r), 2 * (p ** r - 1)))
    for j in range(n, 0, -1):
        gens.append(Generator(w_name(j), 2 * (p ** j - 1), invertible=(j == n)))
    gens.append(Generator(v_name(i), 2 * (p ** i - 1), invertible=True))
    return PolyRing(GF(p), gens)


_LAW_MEMO: dict = {}


def _pushed_law(p: int, i: int, n: int, t_count: int, order: int, scheme: str,
                cache=None) -> FGLaw:
    """G_n with coefficients renamed v_j -> w_j inside the working ring.

    An optional content-addressed SeriesCache short-circuits the expansion;
    cached series are revalidated structurally on load.
    """
    key = (p, i, n, t_count, order, scheme)
    if key in _LAW_MEMO:
        return _LAW_MEMO[key]
    ring = working_ring(p, i, n, t_count)
    meta = {"kind": "right-unit-pushforward", "p": p, "i": i, "n": n,
            "t_count": t_count, "truncation": order, "scheme": scheme}

    def compute():
        g = en_law(p, n, order, scheme)
        images = {v_name(j): ring.gen(w_name(j)) for j in range(1, n + 1)}
        return g.series.map_coefficients(ring, images, mod_p_map(p))

    if cache is not None:
        series, hit = cache.get_or_compute(meta, compute)
        if hit and series.ring != ring:
            raise ValueError("cached series does not match the working ring")
        law = FGLaw(series, p, f"eta_R(G_{n})", validate=not hit)
        if hit:
            law.series.check_homogeneous()
    else:
        law = FGLaw(compute(), p, f"eta_R(G_{n})", validate=True)
    _LAW_MEMO[key] = law
    return law


class StageRelation:
    __slots__ = ("stage", "exponent", "relation", "rule", "eta_image", "eta_name")

    def __init__(self, stage, exponent, relation, rule, eta_name=None, eta_image=None):
        self.stage = stage
        self.exponent = exponent
        self.relation = relation
        self.rule = rule
        self.eta_name = eta_name
        self.eta_image = eta_image


class EtaleReport:
    """Kähler differential data for one stage relation.

    `differential` collects the coefficient of dg for every non-ground
    generator g; `dt_coefficient` is the coefficient of dt_r, certified a
    unit; `solved` expresses dt_r in the remaining differentials.
    """

    def __init__(self, stage, differential, dt_coefficient, solved, verdict,
                 unit_certificate, free_rank, base_solved=None):
        self.stage = stage
        self.differential = differential
        self.dt_coefficient = dt_coefficient
        self.solved = solved
        self.verdict = verdict
        self.unit_certificate = unit_certificate
        self.free_rank = free_rank
        self.base_solved = base_solved or {}

    @property
    def etale(self) -> bool:
        return self.verdict == "etale"


class CrossTermReport:
    def __init__(self, stage, exponent, linear_term, cross):
        self.stage = stage
        self.exponent = exponent
        self.linear_term = linear_term
        self.cross = cross

    @property
    def clean(self) -> bool:
        return self.cross.is_zero()

    def require_clean(self):
        if not self.clean:
            raise CrossTermError(
                f"cross terms at x^{self.exponent}: {self.cross}"
            )
        return self


class DerivationState:
    def __init__(self, p, i, n, m, trunc, ring, scheme):
        self.p = p
        self.i = i
        self.n = n
        self.m = m
        self.trunc = trunc
        self.ring = ring
        self.scheme = scheme
        self.conclusions: list[tuple[str, GradedPoly]] = []
        self.stages: list[StageRelation] = []
        self.substitution: dict[str, GradedPoly] = {}
        self.lhs = None
        self.rhs = None
        self.iso = None
        self.presentation: Presentation | None = None

    # -- helpers -----------------------------------------------------------
    def apply_substitution(self, poly: GradedPoly) -> GradedPoly:
        if not self.substitution:
            return poly
        return poly.apply_map(self.ring, self.substitution)

    def rules_presentation(self, through_stage: int | None = None) -> Presentation:
        stages = self.stages if through_stage is None else self.stages[:through_stage]
        return Presentation(self.ring, [s.relation for s in stages],
                            base=self.base_names())

    def base_names(self):
        names = [v_name(self.i)]
        names += [w_name(j) for j in range(self.i + 1, self.n + 1)]
        return tuple(names)

    def normal_form(self, poly: GradedPoly, through_stage: int | None = None) -> GradedPoly:
        return self.rules_presentation(through_stage).normal_form(poly)

    def stage_relation(self, r: int) -> GradedPoly:
        return self.stages[r - 1].relation

    def solved_eta(self, j: int) -> GradedPoly:
        for s in self.stages:
            if s.eta_name == w_name(j):
                return s.eta_image
        raise KeyError(f"no eta_R image solved for w_{j}")


def derive_presentation(p: int, i: int, n: int, m: int, trunc: int | None = None,
                        scheme: str = "hazewinkel", check_all_exponents: bool = True,
                        max_order: int = 260, cache=None) -> tuple[Presentation, DerivationState]:
    """Run the coefficient comparison and return (B_m presentation, state)."""
    if not is_odd_prime(p):
        raise ValueError(f"p must be an odd prime, got {p}")
    if not (1 <= i <= n):
        raise ValueError(f"need 1 <= i <= n, got i={i}, n={n}")
    if m < 1:
        raise ValueError("m >= 1 required")
    N = trunc if trunc is not None else default_truncation(p, i, m)
    if N > max_order:
        raise ValueError(
            f"truncation {N} exceeds the resource budget {max_order}; "
            "raise max_order explicitly to go further"
        )
    if N < p ** (i + m):
        raise ValueError(f"truncation {N} cannot see x^(p^(i+m)) = x^{p ** (i + m)}")

    t_count = i + m
    ring = working_ring(p, i, n, t_count)
    law = _pushed_law(p, i, n, t_count, N, scheme, cache=cache)
    state = DerivationState(p, i, n, m, N, ring, scheme)

    ts = [ring.gen(t_name(r)) for r in range(1, t_count + 1)]
    f = strict_iso_series(law, ts)
    v_i = ring.gen(v_name(i))
    lhs = p_series(law, N).subst([f])
    rhs = f.compose_monomial(v_i, p ** i)
    state.iso = f
    state.lhs = lhs
    state.rhs = rhs

    p_powers = {p ** k: k for k in range(0, t_count + 2) if p ** k <= N}
    diff = lhs - rhs

    for e in range(1, N + 1):
        coeff = state.apply_substitution(diff.coeff(e))
        k = p_powers.get(e)
        if k is None or k == 0:
            residue = state.normal_form(coeff)
            if check_all_exponents and not residue.is_zero():
                raise DerivationError(
                    f"coefficient of x^{e} does not vanish: {residue}"
                )
            continue
        if k < i:
            expected = ring.gen(w_name(k))
            if coeff != expected:
                raise DerivationError(
                    f"coefficient of x^(p^{k}) is {coeff}, expected {expected}"
                )
            state.conclusions.append((w_name(k), ring.zero()))
            state.substitution[w_name(k)] = ring.zero()
        elif k == i:
            expected = ring.gen(w_name(i)) - v_i
            if coeff != expected:
                raise DerivationError(
                    f"coefficient of x^(p^{i}) is {coeff}, expected w_{i} - v_{i}"
                )
            state.conclusions.append((w_name(i), v_i))
            state.substitution[w_name(i)] = v_i
        else:
            r = k - i
            if r > m:
                continue
            relation = state.normal_form(coeff, through_stage=r - 1)
            _check_stage_shape(state, relation, r)
            rule = RewriteRule.from_relation(ring, relation)
            eta_name = eta_image = None
            if i + r <= n:
                eta_name = w_name(i + r)
                eta_image = _solve_for(relation, ring, eta_name)
            state.stages.append(StageRelation(r, e, relation, rule, eta_name, eta_image))

    if len(state.stages) != m:
        raise DerivationError(f"derived {len(state.stages)} stages, expected {m}")

    state.presentation = _build_quotient(state)
    return state.presentation, state


def _check_stage_shape(state: DerivationState, relation: GradedPoly, r: int):
    ring = state.ring
    lead_exp = {t_name(r): state.p ** state.i}
    lead_coeff = relation.coefficient(
        {**lead_exp, v_name(state.i): 1}
    )
    if lead_coeff != ring.field.one:
        raise DerivationError(
            f"stage {r}: coefficient of v_i*t_{r}^(p^i) is {lead_coeff}, not 1"
        )
    mon, _ = relation.leading()
    want = [0] * len(ring.generators)
    want[ring.index[t_name(r)]] = state.p ** state.i
    want[ring.index[v_name(state.i)]] = 1
    if mon != tuple(want):
        raise DerivationError(f"stage {r}: unexpected leading monomial")


def _solve_for(relation: GradedPoly, ring: PolyRing, name: str) -> GradedPoly:
    """Rearrange relation = 0 as name = ... when name appears linearly alone."""
    target = ring.gen(name)
    ((mon, _),) = target.terms.items()
    c = relation.terms.get(mon)
    if c is None:
        raise DerivationError(f"{name} does not appear in the relation")
    rest = GradedPoly(ring, {m: v for m, v in relation.terms.items() if m != mon})
    return (-rest).scale(ring.field.inv(c))


def _build_quotient(state: DerivationState) -> Presentation:
    """B_m = B(i,n)_*[t_1..t_m] / (stage relations), over the reduced ring."""
    p, i, n, m = state.p, state.i, state.n, state.m
    gens = []
    for r in range(m, 0, -1):
        gens.append(Generator(t_name(r), 2 * (p ** r - 1)))
    for j in range(n, i, -1):
        gens.append(Generator(w_name(j), 2 * (p ** j - 1), invertible=(j == n)))
    gens.append(Generator(v_name(i), 2 * (p ** i - 1), invertible=True))
    out_ring = PolyRing(GF(p), gens)
    rels = [s.relation.apply_map(out_ring, {}) for s in state.stages]
    return Presentation(out_ring, rels, base=state.base_names())


# -- the i = n specialization -------------------------------------------------

def sigma_relation(ring: PolyRing, p: int, n: int, r: int) -> GradedPoly:
    """v_n t_r^(p^n) - v_n^(p^r) t_r over a ring containing t_r, v_n."""
    v = ring.gen(v_name(n))
    t = ring.gen(t_name(r))
    return v * t ** (p ** n) - (v ** (p ** r)) * t


def sigma_n_presentation(p: int, n: int, m: int, trunc: int | None = None,
                         scheme: str = "hazewinkel", max_order: int = 260, cache=None):
    """Derive at i = n and certify against the closed-form relations.

    Each derived stage must agree with v_n t_r^(p^n) = v_n^(p^r) t_r up to a
    unit multiple after normal-form comparison modulo the earlier stages.
    """
    pres, state = derive_presentation(p, n, n, m, trunc=trunc, scheme=scheme,
                                      max_order=max_order, cache=cache)
    for r in range(1, m + 1):
        derived_rule = state.stages[r - 1].rule
        target_rule = RewriteRule.from_relation(state.ring,
                                                sigma_relation(state.ring, p, n, r))
        lhs = state.normal_form(derived_rule.remainder, through_stage=r - 1)
        rhs = state.normal_form(target_rule.remainder, through_stage=r - 1)
        if derived_rule.lead != target_rule.lead or lhs != rhs:
            raise SigmaMismatchError(
                f"stage {r} of K({n})_*E({n}) does not match the closed form: "
                f"{state.stages[r - 1].relation}"
            )
    return pres, state


# -- étale certificates --------------------------------------------------------

def partial_derivative(poly: GradedPoly, name: str) -> GradedPoly:
    ring = poly.ring
    k = ring.index[name]
    f = ring.field
    out = {}
    for mon, c in poly.terms.items():
        e = mon[k]
        if e == 0:
            continue
        c2 = f.mul(c, f.of(e))
        if c2 == f.zero:
            continue
        m2 = tuple(x - 1 if j == k else x for j, x in enumerate(mon))
        out[m2] = f.add(out.get(m2, f.zero), c2)
    return GradedPoly(ring, {m: c for m, c in out.items() if c != f.zero})


def kahler_check(state: DerivationState, stage: int) -> EtaleReport:
    """Differentiate the stage relation over K(i)_* and solve for dt_stage.

    d kills the ground field F_p[v_i^{+-1}] and p-th powers vanish in
    characteristic p, so the differential lands in the span of dw_j and dt_r.
    Étale verdict requires the dt_stage coefficient to be a unit (it comes
    out as -v_i^(p^stage)); freeness of the stage extension is certified by
    the rewrite rule bounding t_stage powers below p^i.
    """
    if not (1 <= stage <= len(state.stages)):
        raise ValueError(f"no stage {stage} available")
    rel = state.stage_relation(stage)
    ring = state.ring
    names = [g.name for g in ring.generators if g.name != v_name(state.i)]
    differential = {}
    for name in names:
        d = partial_derivative(rel, name)
        if not d.is_zero():
            differential[name] = state.normal_form(d, through_stage=stage - 1)

    tname = t_name(stage)
    c = differential.get(tname, ring.zero())
    verdict = "etale"
    unit_cert = None
    solved = {}
    if c.is_zero() or not c.is_unit_monomial():
        verdict = "not certified"
    else:
        neg_inv = (-c).inverse_monomial()
        unit_cert = str(c)
        for name, d in differential.items():
            if name == tname:
                continue
            solved[name] = state.normal_form(d * neg_inv, through_stage=stage - 1)
    rule = state.stages[stage - 1].rule
    lead_t = rule.lead[ring.index[tname]]
    if lead_t != state.p ** state.i:
        verdict = "not certified"

    # eliminate earlier dt's recursively: dt_stage in base differentials only
    base_solved = {}
    if verdict == "etale":
        base_solved = dict(solved)
        for r_prev in range(stage - 1, 0, -1):
            prev = t_name(r_prev)
            if prev not in base_solved:
                continue
            c_prev = base_solved.pop(prev)
            prev_report = kahler_check(state, r_prev)
            if not prev_report.etale:
                verdict = "tower not certified"
                base_solved = {}
                break
            for g, cg in prev_report.base_solved.items():
                acc = base_solved.get(g, ring.zero()) + state.normal_form(
                    c_prev * cg, through_stage=stage - 1)
                base_solved[g] = acc
    return EtaleReport(stage, differential, c, solved, verdict, unit_cert,
                       free_rank=state.p ** state.i, base_solved=base_solved)


# -- p-power arithmetic --------------------------------------------------------

def ppower_is_sum(p: int, r: int, exponents) -> bool:
    """Whether p^r equals a sum of distinct p-powers p^l, all l >= 1."""
    exps = list(exponents)
    if any(l < 1 for l in exps):
        raise ValueError("exponents must be >= 1")
    if len(set(exps)) != len(exps):
        raise ValueError("exponents must be pairwise distinct")
    return p ** r == sum(p ** l for l in exps)


# -- cross-term audit ------------------------------------------------------------

def cross_term_audit(state: DerivationState, stage: int) -> CrossTermReport:
    """Audit the right-hand side coefficient of x^(p^(i+stage)).

    The deduction uses only the linear term t_stage * v_i^(p^stage); this
    recomputes the full coefficient of f(v_i x^(p^i)) there and reports
    whatever the iterated-sum cross terms contribute besides it.  Sums of
    distinct p-powers never hit a p-power, but repeated ones can from stage 2
    on, so a nonzero report is a finding, not necessarily a bug.
    """
    if stage < 0:
        raise ValueError("stage must be >= 0")
    ring = state.ring
    e = state.p ** (state.i + stage)
    if e > state.trunc:
        raise ValueError(f"x^{e} lies beyond truncation {state.trunc}")
    coeff = state.apply_substitution(state.rhs.coeff(e))
    if stage == 0:
        linear = ring.gen(v_name(state.i))
    else:
        linear = ring.gen(t_name(stage)) * (ring.gen(v_name(state.i)) ** (state.p ** stage))
    cross = coeff - linear
    return CrossTermReport(stage, e, linear, cross)


# -- rendering -------------------------------------------------------------------

def display_order(ring: PolyRing):
    """v's, then w's, then t's, each by ascending index."""
    def key(idx):
        name = ring.generators[idx].name
        letter, num = name.split("_")
        rank = {"v": 0, "w": 1, "t": 2}.get(letter, 3)
        return (rank, int(num))
    return sorted(range(len(ring.generators)), key=key)


def relation_equation(poly: GradedPoly) -> str:
    """Render relation = 0 as 'positive terms = negated negative terms'."""
    ring = poly.ring
    order = display_order(ring)
    left, right = [], []
    for mon, c in poly.sorted_terms():
        cb = poly.balanced(c)
        mono = ring.mono_str(mon, order)
        side = left if cb > 0 else right
        mag = abs(cb)
        if mono == "1":
            side.append(str(mag))
        elif mag == 1:
            side.append(mono)
        else:
            side.append(f"{mag}*{mono}")
    if not right:
        right = ["0"]
    if not left:
        left = ["0"]
    return " + ".join(left) + " = " + " + ".join(right)
