from fractions import Fraction

import jsonschema
import pytest

from psl22w.scalars import KAPPA, S
from psl22w.superalgebras import (ALGEBRA_NAMES, PSL_NAMES, TABLE_SCHEMA, apply_omega, central_charge_of,
                                  embed, gram_determinant, is_virasoro, load_algebra, primary_residual,
                                  psl_structure_from_matrices, read_table_data, sugawara, supertrace_form,
                                  tensor)
from psl22w.vertexcalc import LambdaPoly, lambda_bracket, normal_order

AFF = load_algebra("psl22_affine", KAPPA)


@pytest.mark.parametrize("name", ALGEBRA_NAMES)
def test_data_files_match_schema(name):
    jsonschema.validate(read_table_data(name), TABLE_SCHEMA)


def test_affine_table_agrees_with_supermatrices():
    """Every stored generator bracket equals the supermatrix commutator plus κ times the supertrace form."""
    br, form = psl_structure_from_matrices()
    for x in PSL_NAMES:
        for y in PSL_NAMES:
            got = lambda_bracket(AFF.gen(x), AFF.gen(y))
            want0 = AFF.zero()
            for z, c in br[(x, y)].items():
                want0 = want0 + AFF.gen(z) * c
            want = {0: want0}
            if form[(x, y)]:
                want[1] = AFF.vacuum() * (KAPPA * form[(x, y)])
            assert (got - LambdaPoly(AFF, want)).is_zero(), (x, y)


def test_supertrace_form_values():
    assert supertrace_form("E1", "F1") == 1
    assert supertrace_form("E2", "F2") == -1
    assert gram_determinant() != 0


def test_symplectic_fermion_table():
    sf = load_algebra("sf", KAPPA)
    assert lambda_bracket(sf.gen("chi"), sf.gen("chi")).is_zero()
    assert lambda_bracket(sf.gen("chibar"), sf.gen("chibar")).is_zero()
    assert (lambda_bracket(sf.gen("chi"), sf.gen("chibar")) - LambdaPoly(sf, {1: sf.vacuum() * 2})).is_zero()


def test_n4_cubic_pole():
    n4 = load_algebra("n4min", KAPPA)
    lp = lambda_bracket(n4.gen("Gp"), n4.gen("Gbm"))
    # pole 2(κ+1)/(z-w)^3 is the λ^2 coefficient times 2!
    assert lp[2] == n4.vacuum() * (KAPPA + 1)


def test_sugawara_is_virasoro_with_c_minus_two():
    ok, c = is_virasoro(sugawara())
    assert ok and c == -2
    assert primary_residual(sugawara(), AFF.gen("E1"), 1).is_zero()
    assert lambda_bracket(sugawara(), AFF.vacuum()).is_zero()


@pytest.mark.parametrize("name, c", [("wpr", -2), ("sf", -2), ("n4min", None)])
def test_conformal_vectors(name, c):
    alg = load_algebra(name, KAPPA)
    ok, got = is_virasoro(alg.conformal_vector)
    assert ok
    assert got == (S(c) if c is not None else -6 * (KAPPA + 1))
    for g in alg.gens:
        if g.family is None and g.primary and g.name not in ("L", "T"):
            assert primary_residual(alg.conformal_vector, alg.gen(g.name), g.weight).is_zero(), g.name


def test_omega_swaps_and_is_an_involution():
    assert apply_omega(AFF.gen("E1")) == load_algebra("psl22_affine", -KAPPA).gen("E2")
    for name in PSL_NAMES:
        x = AFF.gen(name)
        assert apply_omega(apply_omega(x)) == x


def test_omega_is_an_automorphism_up_to_level_sign():
    neg = load_algebra("psl22_affine", -KAPPA)
    for x in PSL_NAMES:
        for y in PSL_NAMES:
            lhs = lambda_bracket(apply_omega(AFF.gen(x)), apply_omega(AFF.gen(y)))
            rhs = {n: apply_omega(st) for n, st in lambda_bracket(AFF.gen(x), AFF.gen(y)).coeffs.items()}
            assert (lhs - LambdaPoly(neg, rhs)).is_zero(), (x, y)


def test_s_field_in_wpr():
    w = load_algebra("wpr", KAPPA)
    s = w.gen("S")
    assert s == w.conformal_vector + normal_order(w.gen("chi"), w.gen("chibar")) * Fraction(1, 2)
    assert lambda_bracket(w.gen("chi"), s).is_zero()
    assert lambda_bracket(w.gen("chibar"), s).is_zero()
    assert (lambda_bracket(s, s) - LambdaPoly(w, {0: s.d(), 1: s * 2})).is_zero()


def test_tensor_and_embed():
    sf, pi = load_algebra("sf", KAPPA), load_algebra("pi", KAPPA)
    tab = tensor("sf_pi_test", sf, pi)
    total = embed(sf.conformal_vector, tab) + embed(pi.conformal_vector, tab)
    assert central_charge_of(total) == central_charge_of(sf.conformal_vector) + central_charge_of(pi.conformal_vector)
    assert lambda_bracket(tab.gen("chi"), tab.gen("c")).is_zero()
