from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from psl22w import zhu
from psl22w.scalars import KAPPA, S
from psl22w.zhu import ZhuElement

RED = zhu.zhu_reduction(KAPPA)
W = RED.W
h, delta, kappa = sympy.symbols("h Delta kappa")


def g(*names):
    return ZhuElement.word(*names)


def image_of_product(a, b):
    return RED.image(zhu.zhu_product(W.gen(a), W.gen(b)))


def test_chi_squares_to_zero():
    assert image_of_product("chi", "chi").is_zero()


def test_chi_psibar_anticommutator():
    total = image_of_product("chi", "psibar") + image_of_product("psibar", "chi")
    assert total == g("S")


def test_psi_has_order_three():
    sq = RED.image(zhu.zhu_product(W.gen("psi"), W.gen("psi")))
    assert sq == g("chi", "psi") * Fraction(1, 2)
    cube = RED.evaluate(g("psi", "psi", "psi"))
    assert cube.is_zero()


def test_pbw_reordering_of_psi_h():
    k = KAPPA
    want = (g("H") + ZhuElement.unit() * Fraction(1, 2)) * g("psi") \
        + (g("H") + g("L") * (3 * k * k / 2) + ZhuElement.unit() * ((k * k - Fraction(1, 4)) / 4)) * g("chi")
    assert zhu.normal_form(g("psi", "H")) == zhu.normal_form(want)


def test_chi_chibar_anticommute():
    assert zhu.normal_form(g("chi", "chibar") + g("chibar", "chi")).is_zero()


def test_l_is_central():
    for name in zhu.ZHU_GENERATORS:
        assert zhu.normal_form(g("L", name) - g(name, "L")).is_zero()


def test_engine_reproduces_every_relation():
    recs = zhu.verify_relations_by_engine(KAPPA)
    assert recs and all(r["status"] == "pass" for r in recs), [r for r in recs if r["status"] != "pass"]


def test_confluence():
    assert zhu.presented_zhu(KAPPA).check_confluence() == []


def test_inhomogeneous_input_rejected():
    with pytest.raises(zhu.ZhuError):
        zhu.zhu_product(W.gen("chi") + W.gen("H"), W.gen("chi"))


def test_verma_matches_closed_form_matrices():
    mod = zhu.verma(h, delta)
    shown = zhu.closed_form_verma_matrices(h, delta, kappa)
    for name in ("S", "H"):
        assert (mod.matrices[name] - shown[name]).applyfunc(sympy.expand).is_zero_matrix


def test_verma_relations_hold():
    mod = zhu.verma(h, delta)
    assert mod.dim == 4
    assert all(r.is_zero_matrix for _, r in zhu.relation_residuals(mod))


def test_s_nondiagonalisable_for_nonzero_delta():
    mod = zhu.verma(0, 3)
    assert not mod.matrices["S"].is_diagonalizable()


def test_h_eigenvalues():
    data = zhu.h_eigen_data(zhu.verma(h, delta))
    root = sympy.sqrt(h + (6 * delta + 1) * kappa ** 2 / 4)
    want = {sympy.simplify(h + sympy.Rational(1, 4) + root), sympy.simplify(h + sympy.Rational(1, 4) - root)}
    got = {sympy.simplify(e) for e in data["eigenvalues"]}
    assert {sympy.expand(x ** 2) for x in got} == {sympy.expand(x ** 2) for x in want}


def test_degenerate_vectors_at_delta_zero():
    mod = zhu.verma(h, 0)
    for col in (1, 2):
        for name in ("chi", "psi"):
            assert mod.matrices[name][:, col].is_zero_matrix


@pytest.mark.parametrize("hv, dv, dim", [(0, 3, 4), (Fraction(5, 2), 3, 4), (0, 0, 1), (7, 0, 1)])
def test_classify(hv, dv, dim):
    assert zhu.classify(hv, dv)["irreducible_dim"] == dim


def test_classify_on_nondiagonalisable_locus():
    d = 2
    k = Fraction(1, 3)
    hv = -sympy.Rational(6 * d + 1, 4) * sympy.Rational(k.numerator, k.denominator) ** 2
    res = zhu.classify(hv, d, S(k))
    assert res["irreducible_dim"] == 4
    assert not res["H_diagonalisable_on_odd_block"]


@given(st.fractions(min_value=-4, max_value=4, max_denominator=5),
       st.fractions(min_value=-4, max_value=4, max_denominator=5))
def test_submodules_exist_iff_delta_zero(hv, dv):
    res = zhu.classify(sympy.Rational(hv.numerator, hv.denominator), sympy.Rational(dv.numerator, dv.denominator),
                       S(Fraction(1, 2)))
    assert res["irreducible_dim"] == (1 if dv == 0 else 4)


@given(st.fractions(min_value=-3, max_value=3, max_denominator=4),
       st.fractions(min_value=-3, max_value=3, max_denominator=4))
def test_weight_vector_search(hv, dv):
    mod = zhu.verma(sympy.Rational(hv.numerator, hv.denominator), sympy.Rational(dv.numerator, dv.denominator),
                    S(Fraction(1, 2)))
    vec = zhu.highest_weight_vector(mod.matrices)
    assert vec is not None
    assert (mod.matrices["chi"] * vec).is_zero_matrix
    assert (mod.matrices["psi"] * vec).is_zero_matrix
