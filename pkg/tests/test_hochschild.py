import json
from pathlib import Path

import pytest

from chromalg.derivation import kahler_check
from chromalg.hochschild import (
    BigradedTable,
    FiniteAlgebra,
    MethodDisagreementError,
    MissingEtaleCertificateError,
    compare_methods,
    dual_numbers,
    hh_bar,
    hh_hkr,
    hh_koszul,
    jacobian_certificate,
    require_agreement,
    specialize,
    split_etale_algebra,
)
from chromalg.poly import GF, Generator, PolyRing, QQ
from chromalg.presentation import Presentation, canonical_json

FIXTURES = Path(__file__).parent / "fixtures"


# -- bar oracle ---------------------------------------------------------------------

def test_bar_on_split_etale_concentrated_in_degree_zero():
    tab = hh_bar(split_etale_algebra(3), s_max=4)
    assert tab.ranks == {(0, 0): 3}


def test_bar_on_ground_field():
    ring = PolyRing(GF(3), [Generator("t", 0)])
    t = ring.gen("t")
    A = FiniteAlgebra(Presentation(ring, [t]))  # t = 0: the field itself
    tab = hh_bar(A, s_max=3)
    assert tab.ranks == {(0, 0): 1}


def test_bar_dual_numbers_matches_frozen_fixture():
    tab = hh_bar(dual_numbers(2), s_max=4)
    frozen = json.loads((FIXTURES / "hh_bar_dual_numbers.json").read_text())
    assert canonical_json(tab.to_dict()) == canonical_json(frozen)
    # classical sanity: one class in every positive bar degree
    per_s = {}
    for (s, t), r in tab.ranks.items():
        per_s[s] = per_s.get(s, 0) + r
    assert per_s == {0: 2, 1: 1, 2: 1, 3: 1, 4: 1}


def test_bar_homology_degree_zero_is_algebra():
    for A in (split_etale_algebra(3), dual_numbers(2)):
        tab = hh_bar(A, s_max=2)
        total0 = sum(r for (s, _), r in tab.ranks.items() if s == 0)
        assert total0 == A.dim


def test_bar_dd_zero_guard_runs():
    # check_dd is on by default; force it explicitly too
    hh_bar(dual_numbers(4), s_max=3, check_dd=True)


def test_bar_dimension_budget():
    from chromalg.hochschild import DimensionBudgetError
    with pytest.raises(DimensionBudgetError):
        hh_bar(split_etale_algebra(5), s_max=4, column_budget=100)


# -- koszul route ---------------------------------------------------------------------

def test_koszul_polynomial_line():
    tab = hh_koszul([Generator("v_1", 4)], (0, 8), s_max=1)
    assert tab.ranks == {(0, 0): 1, (0, 4): 1, (0, 8): 1, (1, 4): 1, (1, 8): 1}


def test_koszul_empty_generators():
    tab = hh_koszul([], (0, 4), s_max=3)
    assert tab.ranks == {(0, 0): 1}


def test_koszul_exterior_degrees_at_height_two():
    # dv_1 at (1, 2p-2), dv_2 at (1, 2p^2-2) for p = 3
    tab = hh_koszul(
        [Generator("v_1", 4), Generator("v_2", 16, invertible=True)],
        (0, 20), s_max=2,
    )
    assert tab.rank(1, 4) == 1    # dv_1
    assert tab.rank(1, 16) == 2   # dv_2 and v_1^3 dv_1
    assert tab.rank(2, 20) == 1   # dv_1 dv_2


def test_koszul_rejects_odd_generators():
    with pytest.raises(ValueError):
        hh_koszul([Generator("e", 5)], (0, 10))


# -- hkr route -----------------------------------------------------------------------

def test_hkr_laurent_polynomial_base():
    ring = PolyRing(QQ, [Generator("v_1", 4), Generator("v_2", 16, invertible=True)])
    pres = Presentation(ring, [])
    ans = hh_hkr(pres, smooth=["v_1", "v_2"])
    assert [(n, d) for n, d in ans.exterior] == [("dv_1", 4), ("dv_2", 16)]


def test_hkr_refuses_without_certificate():
    A = split_etale_algebra(3)
    with pytest.raises(MissingEtaleCertificateError):
        hh_hkr(A.presentation, smooth=[])


def test_hkr_refuses_bounded_smooth_generator():
    A = split_etale_algebra(3)
    with pytest.raises(ValueError):
        hh_hkr(A.presentation, smooth=["t"])


def test_hkr_with_jacobian_certificate():
    A = split_etale_algebra(3)
    cert = jacobian_certificate(A.presentation, "t")
    assert cert.etale
    ans = hh_hkr(A.presentation, smooth=[], tower={"t": cert})
    assert ans.exterior == []
    tab = ans.table((0, 0), s_max=4)
    assert tab.ranks == {(0, 0): 3}


def test_hkr_ground_field_trivial():
    ring = PolyRing(GF(3), [])
    pres = Presentation(ring, [])
    ans = hh_hkr(pres, smooth=[])
    assert ans.table((0, 0), s_max=2).ranks == {(0, 0): 1}


def test_hkr_tower_from_derivation(b1_312):
    pres, state = b1_312
    tower = {"t_1": kahler_check(state, 1)}
    ans = hh_hkr(pres, smooth=["w_2"], tower=tower)
    assert ans.exterior == [("dw_2", 16)]


def test_hkr_tower_exterior_trivial_at_top(sigma_312):
    pres, state = sigma_312
    tower = {f"t_{r}": kahler_check(state, r) for r in (1, 2)}
    ans = hh_hkr(pres, smooth=[], tower=tower)
    assert ans.exterior == []


# -- cross validation ------------------------------------------------------------------

def test_methods_agree_on_split_etale():
    A = split_etale_algebra(3)
    bar = hh_bar(A, s_max=4)
    cert = jacobian_certificate(A.presentation, "t")
    hkr = hh_hkr(A.presentation, smooth=[], tower={"t": cert}).table((0, 0), s_max=4)
    assert compare_methods(bar, hkr) == {}


def test_methods_agree_free_line():
    koszul = hh_koszul([Generator("v_1", 4)], (0, 12), s_max=2)
    pres = Presentation(PolyRing(QQ, [Generator("v_1", 4)]), [])
    hkr = hh_hkr(pres, smooth=["v_1"]).table((0, 12), s_max=2)
    require_agreement(koszul, hkr)


def test_table_self_diff_empty():
    tab = hh_koszul([Generator("v_1", 4)], (0, 8), s_max=1)
    assert compare_methods(tab, tab) == {}


def test_disagreement_detected():
    a = BigradedTable({(0, 0): 1}, 1, (0, 4), "a")
    b = BigradedTable({(0, 0): 2}, 1, (0, 4), "b")
    assert compare_methods(a, b) == {(0, 0): [1, 2]}
    with pytest.raises(MethodDisagreementError):
        require_agreement(a, b)


def test_etale_tower_specialization_concentrates(b1_312):
    """Pin the invertible generators of the derived stage to 1: the result is
    a separable field extension, so every positive bar degree dies."""
    pres, _ = b1_312
    pinned = specialize(pres, {"v_1": 1, "w_2": 1})
    (rel,) = pinned.relations
    t = pinned.ring.gen("t_1")
    assert rel == t ** 3 - t + pinned.ring.one()
    tab = hh_bar(FiniteAlgebra(pinned), s_max=4)
    assert tab.ranks == {(0, 0): 3}


def test_specialization_rejects_zero_inverse():
    ring = PolyRing(GF(3), [Generator("t", 0), Generator("w", 4, invertible=True)])
    t, w = ring.gens()
    pres = Presentation(ring, [t * w ** -1])
    with pytest.raises(ZeroDivisionError):
        specialize(pres, {"w": 0})


def test_rational_height_two_window_agreement():
    """Koszul vs HKR for the height-2 rational coefficients on a wide window."""
    p, n = 3, 2
    gens = [Generator(f"v_{k}", 2 * (p ** k - 1), invertible=(k == n))
            for k in range(1, n + 1)]
    window = (0, 3 * 2 * (p ** n - 1))
    koszul = hh_koszul(gens, window, s_max=3)
    pres = Presentation(PolyRing(QQ, gens), [])
    hkr = hh_hkr(pres, smooth=[g.name for g in gens]).table(window, s_max=3)
    require_agreement(koszul, hkr)
