"""Dispatch layer shared by the HTTP service and the CLI.

Every command takes a validated RunConfig and produces named artifacts
(canonical JSON, TeX or CSV text) plus a RunManifest.  Identical configs on
identical versions must yield byte-identical artifacts and manifests, so the
serialized manifest carries content hashes and verdicts but no timing; wall
time travels separately on the in-memory result.
"""

from __future__ import annotations

import hashlib
import time
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from . import __version__
from .cache import SeriesCache, cache_from_env
from .chromatic import (
    E2Page,
    bokstedt_collapse_check,
    conjecture_check,
    cube_table_tex,
    e2_splitting_check,
    splitting_summands_tex,
    thh_page,
)
from .derivation import (
    cross_term_audit,
    derive_presentation,
    kahler_check,
    ppower_is_sum,
    relation_equation,
    sigma_n_presentation,
    t_name,
    v_name,
    w_name,
)
from .fgl import v_name as fgl_v_name
from .hochschild import (
    FiniteAlgebra,
    hh_bar,
    hh_hkr,
    hh_koszul,
    jacobian_certificate,
    require_agreement,
)
from .poly import Generator, PolyRing, QQ, is_odd_prime
from .presentation import Presentation, canonical_json


class RunConfig(BaseModel):
    command: Literal[
        "derive", "hh", "check-conjecture", "check-e2-splitting",
        "check-collapse", "reproduce",
    ]
    p: int = 3
    i: Optional[int] = None
    n: Optional[int] = None
    m: Optional[int] = None
    trunc: Optional[int] = None
    scheme: Literal["hazewinkel", "araki"] = "hazewinkel"
    method: Optional[Literal["hkr", "koszul", "bar"]] = None
    algebra: Optional[dict] = None
    smooth: list[str] = Field(default_factory=list)
    page: Optional[dict] = None
    smax: int = 4
    window: Optional[tuple[int, int]] = None
    emit: Literal["json", "tex", "csv"] = "json"
    fixture_filter: Optional[str] = None
    cache_dir: Optional[str] = None
    max_order: int = 260

    @field_validator("p")
    @classmethod
    def _odd_prime(cls, value):
        if not is_odd_prime(value):
            raise ValueError(f"p must be an odd prime >= 3, got {value}")
        return value

    @field_validator("smax")
    @classmethod
    def _smax_range(cls, value):
        if not (0 <= value <= 6):
            raise ValueError("smax must lie in 0..6")
        return value

    @model_validator(mode="after")
    def _cross_checks(self):
        if self.window is not None and self.window[0] > self.window[1]:
            raise ValueError("window bounds out of order")
        if self.command == "derive":
            if self.i is None or self.n is None or self.m is None:
                raise ValueError("derive needs i, n and m")
            if not (1 <= self.i <= self.n):
                raise ValueError("need 1 <= i <= n")
            if self.m < 1:
                raise ValueError("m >= 1 required")
            order = self.trunc if self.trunc is not None else (
                self.p ** (self.i + self.m) + self.p - 1)
            if order > self.max_order:
                raise ValueError(
                    f"truncation {order} exceeds the budget {self.max_order}; "
                    "raise --max-order to go further"
                )
        if self.command == "hh":
            if self.method is None:
                raise ValueError("hh needs a method")
            if self.algebra is None:
                raise ValueError("hh needs an algebra presentation")
        if self.command == "check-conjecture" and self.n is None:
            raise ValueError("conjecture check needs n")
        if self.command == "check-collapse" and self.page is None:
            raise ValueError("collapse check needs a page")
        return self

    def cache(self) -> SeriesCache | None:
        if self.cache_dir:
            return SeriesCache(self.cache_dir)
        return cache_from_env()


class RunManifest(BaseModel):
    model_config = {"populate_by_name": True}

    schema_id: str = Field("chromalg/manifest/1", alias="schema")
    tool_version: str = __version__
    command: str
    config: dict
    outputs: dict[str, str]
    verdicts: dict

    def to_text(self) -> str:
        return canonical_json(self.model_dump(by_alias=True))


class RunResult:
    def __init__(self, manifest: RunManifest, artifacts: dict[str, str],
                 ok: bool, wall_time: float):
        self.manifest = manifest
        self.artifacts = artifacts
        self.ok = ok
        self.wall_time = wall_time

    def write(self, out_dir: str | Path) -> Path:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in self.artifacts.items():
            (out / name).write_text(text)
        path = out / "manifest.json"
        path.write_text(self.manifest.to_text())
        return path


def _sha(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def run_pipeline(config: RunConfig) -> RunResult:
    start = time.monotonic()
    handler = {
        "derive": _run_derive,
        "hh": _run_hh,
        "check-conjecture": _run_conjecture,
        "check-e2-splitting": _run_e2,
        "check-collapse": _run_collapse,
        "reproduce": _run_reproduce,
    }[config.command]
    artifacts, verdicts, ok = handler(config)
    manifest = RunManifest(
        command=config.command,
        config=config.model_dump(exclude={"cache_dir"}),
        outputs={name: _sha(text) for name, text in sorted(artifacts.items())},
        verdicts=verdicts,
    )
    return RunResult(manifest, artifacts, ok, time.monotonic() - start)


# -- handlers ---------------------------------------------------------------------

def _run_derive(config: RunConfig):
    pres, state = derive_presentation(
        config.p, config.i, config.n, config.m, trunc=config.trunc,
        scheme=config.scheme, max_order=config.max_order, cache=config.cache(),
    )
    reports = [kahler_check(state, r) for r in range(1, config.m + 1)]
    relations = []
    for s in state.stages:
        entry = {
            "stage": s.stage,
            "from_exponent": s.exponent,
            "equation": relation_equation(s.relation),
        }
        if s.eta_name:
            entry["right_unit_image"] = {s.eta_name: str(s.eta_image)}
        relations.append(entry)
    payload = {
        "schema": "chromalg/derivation/1",
        "p": config.p, "i": config.i, "n": config.n, "m": config.m,
        "truncation": state.trunc,
        "conclusions": [{name: str(value)} for name, value in state.conclusions],
        "relations": relations,
        "etale": [
            {
                "stage": rep.stage,
                "verdict": rep.verdict,
                "dt_coefficient": str(rep.dt_coefficient),
                "dt_in_base_differentials": {k: str(v) for k, v in sorted(rep.base_solved.items())},
                "free_rank": rep.free_rank,
            }
            for rep in reports
        ],
        "module_basis_size": len(pres.module_basis()),
    }
    artifacts = {
        "presentation.json": pres.to_json(),
        "derivation.json": canonical_json(payload),
    }
    if config.emit == "tex":
        artifacts["relations.tex"] = _relations_tex(state)
    ok = all(rep.etale for rep in reports)
    verdicts = {"etale_stages": [rep.verdict for rep in reports]}
    return artifacts, verdicts, ok


def _relations_tex(state) -> str:
    lines = [r"\begin{align*}"]
    for name, value in state.conclusions:
        lines.append(f"{_texify(name)} &= {_texify(str(value))} \\\\")
    for s in state.stages:
        eq = relation_equation(s.relation)
        left, right = eq.split(" = ")
        lines.append(f"{_texify(left)} &= {_texify(right)} \\\\")
    lines.append(r"\end{align*}")
    return "\n".join(lines) + "\n"


def _texify(s: str) -> str:
    out = []
    for token in s.split():
        if "^" in token:
            base, exp = token.split("^", 1)
            token = f"{base}^{{{exp}}}"
        out.append(token.replace("*", " "))
    return " ".join(out)


def _run_hh(config: RunConfig):
    pres = Presentation.from_dict(config.algebra)
    window = config.window or (0, 4 * config.p ** 2)
    if config.method == "bar":
        table = hh_bar(FiniteAlgebra(pres), s_max=config.smax)
    elif config.method == "koszul":
        if pres.relations:
            raise ValueError("koszul route needs a free presentation")
        table = hh_koszul(list(pres.ring.generators), window, s_max=config.smax)
    else:
        bounded = set()
        for rule in pres.rules:
            bounded.update(pres.ring.generators[j].name
                           for j, e in enumerate(rule.lead) if e)
        smooth = config.smooth or [g.name for g in pres.ring.generators
                                   if g.name not in bounded]
        tower = {name: jacobian_certificate(pres, name)
                 for g in pres.ring.generators
                 if (name := g.name) not in smooth and name not in pres.base}
        answer = hh_hkr(pres, smooth=smooth, tower=tower)
        table = answer.table(window, s_max=config.smax)
    doc = table.to_dict()
    artifacts = {"hh-table.json": canonical_json(doc)}
    if config.emit == "csv":
        rows = ["s,t,rank"] + [f"{s},{t},{r}" for (s, t), r in sorted(table.ranks.items())]
        artifacts["hh-table.csv"] = "\n".join(rows) + "\n"
    if config.emit == "tex":
        lines = [r"\begin{tabular}{rrr}", r"$s$ & $t$ & rank \\ \hline"]
        lines += [f"{s} & {t} & {r} \\\\" for (s, t), r in sorted(table.ranks.items())]
        lines.append(r"\end{tabular}")
        artifacts["hh-table.tex"] = "\n".join(lines) + "\n"
    return artifacts, {"entries": len(table.ranks)}, True


def _run_conjecture(config: RunConfig):
    n = config.n
    levels = range(0, n + 1) if config.i is None else [config.i]
    verdicts = [conjecture_check(config.p, n, i) for i in levels]
    ok = all(v.consistent for v in verdicts)
    payload = {
        "schema": "chromalg/conjecture/1",
        "p": config.p, "n": n,
        "verdicts": [v.to_dict() for v in verdicts],
        "consistent": ok,
    }
    artifacts = {"conjecture.json": canonical_json(payload)}
    if config.emit == "tex":
        artifacts["cube.tex"] = cube_table_tex(config.p, n)
    return artifacts, {"consistent": ok}, ok


def _run_e2(config: RunConfig):
    report = e2_splitting_check(config.p)
    artifacts = {"e2-splitting.json": canonical_json(report.to_dict())}
    if config.emit == "tex":
        artifacts["cube.tex"] = cube_table_tex(config.p, 2)
        artifacts["summands.tex"] = splitting_summands_tex(config.p)
    return artifacts, {"consistent": report.consistent}, report.consistent


def _run_collapse(config: RunConfig):
    page = E2Page.from_dict(config.page)
    cert = bokstedt_collapse_check(page)
    artifacts = {"collapse.json": canonical_json(cert.to_dict())}
    return artifacts, {"collapsed": cert.collapsed}, cert.collapsed


# -- the fixture battery --------------------------------------------------------

def _fx_relation_stage1(p, cache):
    pres, state = derive_presentation(p, 1, 2, 1, cache=cache)
    ring = state.ring
    v = ring.gen(v_name(1))
    t = ring.gen(t_name(1))
    w2 = ring.gen(w_name(2))
    expected = v * t ** p + w2 - (v ** p) * t
    got = state.stage_relation(1)
    return got == expected, relation_equation(got)


def _fx_right_unit_image(p, cache):
    _, state = derive_presentation(p, 1, 2, 1, cache=cache)
    ring = state.ring
    v = ring.gen(v_name(1))
    t = ring.gen(t_name(1))
    expected = (v ** p) * t - v * t ** p
    got = state.solved_eta(2)
    return got == expected, str(got)


def _fx_kahler_differential(p, cache):
    _, state = derive_presentation(p, 1, 2, 1, cache=cache)
    rep = kahler_check(state, 1)
    ring = state.ring
    want = (ring.gen(v_name(1)) ** p).inverse_monomial()
    ok = rep.etale and rep.base_solved.get(w_name(2)) == want
    return ok, f"dt_1 = v_1^-{p} dw_2; verdict {rep.verdict}"


def _fx_sigma_matches(p, cache):
    combos = [(1, 2), (2, 1)] if p == 3 else [(1, 1)]
    details = []
    for n, m in combos:
        _, state = sigma_n_presentation(p, n, m, cache=cache)
        details.append(f"K({n})E({n}) m={m} ok")
    return True, "; ".join(details)


def _fx_etale_tower(p, cache):
    _, state = derive_presentation(p, 1, 2, 1, cache=cache)
    reps = [kahler_check(state, r) for r in range(1, 2)]
    basis = state.presentation.module_basis()
    ok = all(r.etale for r in reps) and len(basis) == p
    return ok, f"module basis size {len(basis)}"


def _fx_hh_tower_shape(p, cache):
    pres, state = derive_presentation(p, 1, 2, 1, cache=cache)
    tower = {t_name(1): kahler_check(state, 1)}
    answer = hh_hkr(pres, smooth=[w_name(2)], tower=tower,
                    provenance=f"K(1)E(2) tower, p={p}")
    names = [name for name, _ in answer.exterior]
    degs = [d for _, d in answer.exterior]
    ok = names == [f"d{w_name(2)}"] and degs == [2 * p ** 2 - 2]
    return ok, f"exterior {names} at internal degrees {degs}"


def _fx_rational_tables(p, cache):
    n = 2
    gens = [Generator(fgl_v_name(k), 2 * (p ** k - 1), invertible=(k == n))
            for k in range(1, n + 1)]
    window = (0, 6 * (p ** n - 1))
    koszul = hh_koszul(gens, window, s_max=min(4, n + 1))
    pres = Presentation(PolyRing(QQ, gens), [])
    answer = hh_hkr(pres, smooth=[g.name for g in gens])
    hkr = answer.table(window, s_max=min(4, n + 1))
    require_agreement(koszul, hkr)
    return True, f"window {window}, {len(koszul.ranks)} entries agree"


def _fx_ppower_sums(p, cache):
    from itertools import combinations
    checked = 0
    for r in range(1, 9):
        for size in (2, 3, 4):
            for exps in combinations(range(1, 9), size):
                if ppower_is_sum(p, r, exps):
                    return False, f"counterexample p^{r} = sum over {exps}"
                checked += 1
    return True, f"{checked} subsets, no counterexample"


def _fx_height2_splitting(p, cache):
    report = e2_splitting_check(p)
    return report.consistent, f"K(0) degrees {list(report.k0_multiset)}"


def _fx_ki_multisets(p, cache):
    ok = True
    expected0 = tuple(sorted([0, 2 * p - 1, 2 * p ** 2 - 1, 2 * p ** 2 + 2 * p - 2]))
    from .chromatic import thh_ki_expected
    got0 = thh_ki_expected(p, 2, 0).degrees
    ok &= got0 == expected0
    got2 = thh_ki_expected(p, 2, 2).degrees
    ok &= got2 == (0,)
    got1 = thh_ki_expected(p, 2, 1).degrees
    ok &= got1 == tuple(sorted([0, 2 * p ** 2 - 1]))
    return bool(ok), f"K(0): {list(got0)}, K(1): {list(got1)}, K(2): {list(got2)}"


def _fx_height1_anchor(p, cache):
    v = conjecture_check(p, 1, 0)
    ok = v.consistent and v.exact and v.conjectured.degrees == (0, 2 * p - 1)
    return ok, f"degrees {list(v.conjectured.degrees)}"


def _fx_collapse_pages(p, cache):
    ok = True
    for n in range(1, 4):
        for i in range(0, n + 1):
            cert = bokstedt_collapse_check(thh_page(p, n, i))
            ok &= cert.collapsed
    return bool(ok), "columns 0-1 pages collapse for heights <= 3"


def _fx_cross_term_audit(p, cache):
    _, state = derive_presentation(p, 1, 2, 1, cache=cache)
    ok = cross_term_audit(state, 0).clean and cross_term_audit(state, 1).clean
    return bool(ok), "r = 0, 1 coefficients are linear-term only"


FIXTURES = [
    ("relation-stage1", _fx_relation_stage1),
    ("right-unit-image", _fx_right_unit_image),
    ("kahler-differential", _fx_kahler_differential),
    ("sigma-matches", _fx_sigma_matches),
    ("etale-tower", _fx_etale_tower),
    ("hh-tower-shape", _fx_hh_tower_shape),
    ("rational-tables", _fx_rational_tables),
    ("p-power-sums", _fx_ppower_sums),
    ("height2-splitting", _fx_height2_splitting),
    ("ki-multisets", _fx_ki_multisets),
    ("height1-anchor", _fx_height1_anchor),
    ("collapse-pages", _fx_collapse_pages),
    ("cross-term-audit", _fx_cross_term_audit),
]


def reproduce(p: int = 3, fixture_filter: str | None = None, cache=None) -> dict:
    """Run the fixture battery; one pass/fail row per fixture."""
    rows = []
    for name, fn in FIXTURES:
        if fixture_filter is not None and fixture_filter not in name:
            continue
        try:
            ok, detail = fn(p, cache)
        except Exception as exc:  # report, do not abort the batch
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        rows.append({"fixture": name, "passed": bool(ok), "detail": detail})
    return {
        "p": p,
        "fixtures": rows,
        "passed": all(r["passed"] for r in rows),
        "count": len(rows),
    }


def _run_reproduce(config: RunConfig):
    report = reproduce(config.p, config.fixture_filter, cache=config.cache())
    artifacts = {"reproduce.json": canonical_json({"schema": "chromalg/reproduce/1", **report})}
    lines = [f"{'PASS' if r['passed'] else 'FAIL'}  {r['fixture']}: {r['detail']}"
             for r in report["fixtures"]]
    artifacts["reproduce.txt"] = "\n".join(lines) + "\n" if lines else ""
    return artifacts, {"passed": report["passed"], "count": report["count"]}, report["passed"]
