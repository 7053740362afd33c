"""Acceptance gate: one test per shipped criterion, exact equality throughout.

Each test prints a single PASS line with its measured wall time so a plain
``pytest -s tests/test_acceptance.py`` doubles as the acceptance report.
"""

import json
import time
from itertools import combinations
from pathlib import Path

from click.testing import CliRunner

from chromalg.chromatic import (
    bokstedt_collapse_check,
    conjecture_check,
    e2_splitting_check,
    thh_page,
)
from chromalg.cli import main as cli_main
from chromalg.derivation import (
    derive_presentation,
    kahler_check,
    ppower_is_sum,
    sigma_n_presentation,
)
from chromalg.fgl import check_integral, universal_law
from chromalg.hochschild import (
    compare_methods,
    dual_numbers,
    hh_bar,
    hh_hkr,
    hh_koszul,
    jacobian_certificate,
    require_agreement,
    split_etale_algebra,
)
from chromalg.poly import Generator, PolyRing, QQ
from chromalg.presentation import Presentation, canonical_json

FIXTURES = Path(__file__).parent / "fixtures"


def _report(number, limit, elapsed, detail):
    assert elapsed < limit, f"criterion {number} took {elapsed:.2f}s (limit {limit}s)"
    print(f"ACCEPTANCE {number:02d} PASS ({elapsed:.2f}s < {limit}s): {detail}")


def test_criterion_01_relation_derivation():
    start = time.monotonic()
    runner = CliRunner()
    result = runner.invoke(cli_main, ["derive", "--p", "3", "--i", "1",
                                      "--n", "2", "--m", "1"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["relations"][0]["equation"] == "v_1 t_1^3 + w_2 = v_1^3 t_1"
    assert payload["conclusions"] == [{"w_1": "v_1"}]
    _, state = derive_presentation(3, 1, 2, 1)
    ring = state.ring
    v, t, w2 = ring.gen("v_1"), ring.gen("t_1"), ring.gen("w_2")
    assert state.stage_relation(1) == v * t ** 3 + w2 - v ** 3 * t
    _report(1, 5.0, time.monotonic() - start,
            "v_1 t_1^3 + w_2 = v_1^3 t_1 with w_1 = v_1 forced")


def test_criterion_02_right_unit_identity():
    start = time.monotonic()
    _, state = derive_presentation(3, 1, 2, 1)
    ring = state.ring
    v, t = ring.gen("v_1"), ring.gen("t_1")
    assert state.solved_eta(2) == v ** 3 * t - v * t ** 3
    report = kahler_check(state, 1)
    assert report.etale
    # dt_1 = v_1^{-3} dw_2, equivalently dw_2 = v_1^3 dt_1
    assert report.base_solved == {"w_2": (v ** 3).inverse_monomial()}
    assert report.dt_coefficient == -(v ** 3)
    _report(2, 5.0, time.monotonic() - start,
            "w_2 = v_1^3 t_1 - v_1 t_1^3 and dw_2 = v_1^3 dt_1")


def test_criterion_03_sigma_matches():
    start = time.monotonic()
    for p, n, m in ((3, 1, 2), (5, 1, 1), (3, 2, 1)):
        sigma_n_presentation(p, n, m)  # raises SigmaMismatchError on failure
    _report(3, 60.0, time.monotonic() - start,
            "derived relations match v_n t_r^(p^n) = v_n^(p^r) t_r on the grid")


def test_criterion_04_etaleness_and_bases():
    start = time.monotonic()
    for p, i, n, m in ((3, 1, 2, 1), (3, 2, 2, 1), (3, 1, 1, 2)):
        pres, state = derive_presentation(p, i, n, m)
        for r in range(1, m + 1):
            rep = kahler_check(state, r)
            assert rep.etale
            ((mon, _),) = rep.dt_coefficient.terms.items()
            support = {state.ring.generators[j].name for j, e in enumerate(mon) if e}
            assert support == {f"v_{i}"}
        assert len(pres.module_basis()) == p ** (i * m)
    _report(4, 10.0, time.monotonic() - start,
            "every stage etale with a v_i-power coefficient; bases of size p^(i*m)")


def test_criterion_05_p_power_sums():
    start = time.monotonic()
    counterexamples = 0
    for p in (3, 5):
        for r in range(1, 9):
            for size in (2, 3, 4):
                for exps in combinations(range(1, 9), size):
                    if ppower_is_sum(p, r, exps):
                        counterexamples += 1
    assert counterexamples == 0
    _report(5, 5.0, time.monotonic() - start,
            "no p-power is a sum of 2-4 distinct p-powers, p in {3,5}, r <= 8")


def test_criterion_06_hochschild_cross_validation():
    start = time.monotonic()
    A = split_etale_algebra(3)
    bar = hh_bar(A, s_max=4)
    assert bar.ranks == {(0, 0): 3}
    cert = jacobian_certificate(A.presentation, "t")
    hkr = hh_hkr(A.presentation, smooth=[], tower={"t": cert}).table((0, 0), s_max=4)
    assert compare_methods(bar, hkr) == {}

    dual = hh_bar(dual_numbers(2), s_max=4)
    frozen = json.loads((FIXTURES / "hh_bar_dual_numbers.json").read_text())
    assert canonical_json(dual.to_dict()) == canonical_json(frozen)

    koszul = hh_koszul([Generator("v_1", 4)], (0, 12), s_max=2)
    line = Presentation(PolyRing(QQ, [Generator("v_1", 4)]), [])
    hkr_line = hh_hkr(line, smooth=["v_1"]).table((0, 12), s_max=2)
    assert compare_methods(koszul, hkr_line) == {}
    _report(6, 120.0, time.monotonic() - start,
            "bar = hkr on the split etale algebra; dual-numbers fixture stable")


def test_criterion_07_rational_tables():
    start = time.monotonic()
    p = 3
    for n in (1, 2, 3):
        gens = [Generator(f"v_{k}", 2 * (p ** k - 1), invertible=(k == n))
                for k in range(1, n + 1)]
        width = 3 * 2 * (p ** n - 1)
        window = (0, width)
        smax = min(4, n + 1)
        koszul = hh_koszul(gens, window, s_max=smax)
        pres = Presentation(PolyRing(QQ, gens), [])
        hkr = hh_hkr(pres, smooth=[g.name for g in gens]).table(window, s_max=smax)
        require_agreement(koszul, hkr)
        for k in range(1, n + 1):
            assert koszul.rank(1, 2 * p ** k - 2) >= 1  # dv_k present
    _report(7, 30.0, time.monotonic() - start,
            "koszul and hkr agree on windows of width 3|v_n| for n <= 3")


def test_criterion_08_collapse_certificates():
    start = time.monotonic()
    for p in (3, 5):
        for n in (1, 2, 3):
            for i in range(0, n + 1):
                assert bokstedt_collapse_check(thh_page(p, n, i)).collapsed
    from chromalg.chromatic import E2Page
    import random
    rng = random.Random(1)
    for _ in range(50):
        gens = [(f"g{k}", rng.choice([0, 1]), rng.randrange(0, 64))
                for k in range(rng.randrange(0, 5))]
        assert bokstedt_collapse_check(E2Page(gens)).collapsed
    _report(8, 1.0, time.monotonic() - start,
            "columns 0-1 pages certified, including the K(i) pages for n <= 3")


def test_criterion_09_splitting_consistency():
    start = time.monotonic()
    for p in (3, 5):
        rep = e2_splitting_check(p)
        assert rep.consistent
        assert rep.k0_multiset == tuple(sorted(
            [0, 2 * p - 1, 2 * p ** 2 - 1, 2 * p ** 2 + 2 * p - 2]))
        k1 = [v for v in rep.verdicts if v.i == 1][0]
        assert k1.consistent
    _report(9, 1.0, time.monotonic() - start,
            "height-2 splitting consistent at p = 3 and 5 with exact K(0) degrees")


def test_criterion_10_conjecture_grid():
    start = time.monotonic()
    for p in (3, 5, 7):
        for n in range(1, 5):
            for i in range(0, n + 1):
                v = conjecture_check(p, n, i)
                assert v.consistent
                assert len(v.conjectured.degrees) == 2 ** (n - i)
        anchor = conjecture_check(p, 1, 0)
        assert anchor.exact and anchor.conjectured.degrees == (0, 2 * p - 1)
    _report(10, 1.0, time.monotonic() - start,
            "cube decomposition consistent for p in {3,5,7}, n <= 4; height-1 anchor exact")


def test_criterion_11_integrality():
    start = time.monotonic()
    law = universal_law(3, 2, 9)  # every coefficient through degree 2(p^2-1)
    check_integral(law.series, 3)
    for (j, k), c in law.series.coeffs.items():
        for value in c.terms.values():
            assert value.denominator % 3 != 0
    _report(11, 60.0, time.monotonic() - start,
            "universal-law coefficients through degree 2(p^2-1) lie in Z_(3)[v_1,v_2]")


def test_criterion_12_reproduce_determinism(tmp_path):
    start = time.monotonic()
    runner = CliRunner()
    outs = []
    for sub in ("one", "two"):
        out = tmp_path / sub
        result = runner.invoke(cli_main, ["reproduce", "--p", "3", "--out", str(out)])
        assert result.exit_code == 0
        outs.append((out / "manifest.json").read_bytes())
    assert outs[0] == outs[1]
    _report(12, 120.0, time.monotonic() - start,
            "back-to-back reproduce runs emit byte-identical manifests")
