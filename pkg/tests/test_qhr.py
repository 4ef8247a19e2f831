import copy
from fractions import Fraction

import pytest

from psl22w import qhr
from psl22w.scalars import KAPPA, S
from psl22w.superalgebras import load_algebra, read_table_data, table_from_data
from psl22w.vertexcalc import lambda_bracket, nth_product

CX = qhr.build_complex(KAPPA)
W = load_algebra("wpr", KAPPA)


def test_differential_squares_to_zero():
    assert nth_product(CX.differential, 0, CX.differential).is_zero()


def test_differential_gradings():
    assert CX.differential.parities() == {1}
    assert CX.ghost_number(CX.differential) == {1}
    assert CX.differential.weights() == {1}


def test_all_brst_records_pass():
    recs = qhr.check_brst(CX)
    assert recs and all(r["status"] == "pass" for r in recs), [r for r in recs if r["status"] != "pass"]


def test_building_block_closure():
    bb = qhr.building_blocks(CX)
    chi_e = bb["e(+-)"] - bb["e(-+)"]
    assert qhr.zero_mode(CX, chi_e).is_zero()
    g = CX.g
    assert bb["e(+-)"] == g("epm") - qhr.normal_order(g("beta_e"), g("c2")) + qhr.normal_order(g("b1"), g("gamma_f"))


def test_generator_weights():
    wg = qhr.w_generators(CX)
    assert wg["chi_f"].weights() == {1}
    assert wg["psi_e"].weights() == {2}


def test_conformal_candidate_brackets_agree():
    recs = qhr.check_conformal_candidate(CX)
    assert all(r["status"] == "pass" for r in recs)


@pytest.mark.parametrize("pair", [("chi", "psibar"), ("H", "H"), ("psi", "psibar"), ("chi", "H")])
def test_spot_brackets_symbolic(pair):
    rep = qhr.verify_theorem_opes(KAPPA, [pair])
    assert rep["ok"], rep


def test_reference_coefficients_in_table():
    lp = lambda_bracket(W.gen("chi"), W.gen("psibar"))
    assert lp[0] == W.gen("S")
    lp = lambda_bracket(W.gen("psi"), W.gen("psibar"))
    # pole 3(κ²-1/4)/(z-w)^4 is the λ^3 coefficient times 3!
    assert lp[3] == W.vacuum() * (Fraction(1, 2) * (KAPPA * KAPPA - Fraction(1, 4)))


@pytest.mark.parametrize("level", [Fraction(1, 2), Fraction(-1, 3), Fraction(2)])
def test_specialised_route(level):
    rep = qhr.verify_theorem_opes(S(level), [("chi", "chibar"), ("H", "psi"), ("S", "psibar")])
    assert rep["ok"], rep


def test_mutated_table_is_detected(monkeypatch):
    data = copy.deepcopy(read_table_data("wpr"))
    for br in data["brackets"]:
        if br["pair"] == ["chi", "chibar"]:
            br["lambda"]["1"] = [["3", []]]
    broken = table_from_data(data, KAPPA)
    real = qhr.load_algebra

    def fake(name, level=KAPPA):
        return broken if name == "wpr" else real(name, level)

    monkeypatch.setattr(qhr, "load_algebra", fake)
    rep = qhr.verify_theorem_opes(KAPPA, [("chi", "chibar"), ("H", "S")])
    status = {tuple(r["name"].strip("[]").split(" λ ")): r["status"] for r in rep["records"]}
    assert not rep["ok"]
    assert status[("chi", "chibar")] == "mismatch"


def test_k_squared_dependence():
    ok, bad = qhr.wpr_table_depends_only_on_k_squared()
    assert ok, bad


@pytest.mark.parametrize("level", [Fraction(1, 2), Fraction(-1, 2)])
def test_collapse(level):
    rep = qhr.collapse_check(level)
    assert rep["ok"]


def test_collapse_needs_collapsing_level():
    with pytest.raises(ValueError):
        qhr.collapse_check(Fraction(1, 3))


def test_chi_h_lands_in_ideal_at_half():
    w = load_algebra("wpr", S(Fraction(1, 2)))
    lp = lambda_bracket(w.gen("chi"), w.gen("H"))
    assert all(qhr.in_ideal(st) for st in lp.coeffs.values() if st)


def test_quotient_bracket_is_symplectic():
    w = load_algebra("wpr", S(Fraction(1, 2)))
    lp = lambda_bracket(w.gen("chi"), w.gen("chibar"))
    assert qhr.quotient(lp[1]) == w.vacuum() * 2


@pytest.mark.parametrize("level, weight", [(Fraction(1, 2), 2), (Fraction(-1, 2), 2), (Fraction(3, 2), 4),
                                           (Fraction(1, 3), 4)])
def test_shapovalov_deficiency(level, weight):
    dim, rank = qhr.shapovalov_rank(level, weight, 1)
    assert rank < dim


def weight_six_deficiency(level):
    return {g: d - r for g in range(-6, 7) for d, r in [qhr.shapovalov_rank(level, 6, g)] if r < d}


@pytest.mark.parametrize("level", [Fraction(s * p, q) for p, q in ((1, 4), (2, 3), (5, 2)) for s in (1, -1)])
def test_weight_six_singular_levels(level):
    d = weight_six_deficiency(level)
    assert d.get(1, 0) >= 1
    # the grade-flip automorphism pairs grade g with grade -g
    assert all(d.get(-g, 0) == c for g, c in d.items())


@pytest.mark.parametrize("level", [Fraction(1, 5), Fraction(3, 4), Fraction(2)])
def test_no_singular_vector_through_weight_six(level):
    for w in range(1, 7):
        for g in range(-w, w + 1):
            d, r = qhr.shapovalov_rank(level, w, g)
            assert d == r


def test_odd_mode_square_uses_self_bracket():
    # psi has a nonzero self-OPE, so psi_{-2} psi_{-2}|0> is not zero
    vm = qhr.VacuumModule(Fraction(1, 3))
    once = vm.mode("psi", -2, {(): Fraction(1)})
    twice = vm.mode("psi", -2, once)
    assert twice
    assert all(mono.count(("psi", 2)) <= 1 for mono in twice)


def test_pbw_dimensions_match_vacuum_character():
    from psl22w.charq import character
    ch = character("wpr", 8)
    for w in range(1, 7):
        dims = {g: len(qhr.pbw_basis(w, g)) for g in range(-w, w + 1)}
        assert {int(e): int(c) for e, c in ch.coeffs[w].items()} == {g: d for g, d in dims.items() if d}


def test_shapovalov_full_rank_at_integer_level():
    dim, rank = qhr.shapovalov_rank(2, 2, 1)
    assert dim == rank > 0


def test_shapovalov_weight_bound():
    with pytest.raises(ValueError, match="weight bound exceeded"):
        qhr.shapovalov_rank(Fraction(1, 2), 8, 0)


def test_gram_matrix_is_symmetric():
    vm = qhr._vacuum_module(S(Fraction(1, 3)))
    basis = qhr.pbw_basis(3, 0)
    g = vm.gram(basis)
    n = len(basis)
    assert all(g[i][j] == g[j][i] for i in range(n) for j in range(n))

