from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given, strategies as st

from psl22w.scalars import KAPPA
from psl22w.superalgebras import load_algebra
from psl22w.vertexcalc import (LambdaPoly, ModeExpr, check_jacobi, lambda_bracket, mode_bracket,
                               normal_order, nth_product, state_modes)

AFF = load_algebra("psl22_affine", KAPPA)
GH = load_algebra("ghosts", KAPPA)
W = load_algebra("wpr", KAPPA)
PI = load_algebra("pi", KAPPA)
N4 = load_algebra("n4min", KAPPA)


def lp(alg, coeffs):
    return LambdaPoly(alg, coeffs)


def test_affine_pairing():
    got = lambda_bracket(AFF.gen("E1"), AFF.gen("F1"))
    assert (got - lp(AFF, {0: AFF.gen("H1"), 1: AFF.vacuum() * KAPPA})).is_zero()
    assert nth_product(AFF.gen("E1"), 1, AFF.gen("F1")) == AFF.vacuum() * KAPPA


def test_ghost_pairing():
    got = lambda_bracket(GH.gen("beta_e"), GH.gen("gamma_e"))
    assert (got - lp(GH, {0: -GH.vacuum()})).is_zero()


def test_symplectic_pair_in_w():
    got = lambda_bracket(W.gen("chi"), W.gen("chibar"))
    assert (got - lp(W, {1: W.vacuum() * 2})).is_zero()


def test_heisenberg_pair_a_b_regular():
    k = KAPPA
    a = PI.gen("c") * ((k + 1) / 2) + PI.gen("d") * Fraction(1, 4)
    b = PI.gen("c") * (-(k + 1) / 2) + PI.gen("d") * Fraction(1, 4)
    assert lambda_bracket(a, b).is_zero()


def test_vacuum_is_unit():
    assert nth_product(W.vacuum(), -1, W.gen("chi")) == W.gen("chi")
    assert normal_order(W.vacuum(), W.gen("H")) == W.gen("H")


def test_fermion_reordering():
    sf = load_algebra("sf", KAPPA)
    assert normal_order(sf.gen("chibar"), sf.gen("chi")) == -normal_order(sf.gen("chi"), sf.gen("chibar"))


def test_lattice_fusion_and_translation():
    e1, e2 = PI.lattice("e", 1), PI.lattice("e", 2)
    assert normal_order(e1, e1) == e2
    assert e1.d() == normal_order(PI.gen("c"), e1)
    got = lambda_bracket(PI.gen("d"), PI.lattice("e", 3))
    assert (got - lp(PI, {0: PI.lattice("e", 3) * 6})).is_zero()


def test_derivative_of_vacuum_vanishes():
    assert W.vacuum().d().is_zero()


@pytest.mark.parametrize("alg_name", ["psl22_affine", "wpr", "sf", "n4min"])
def test_jacobi_on_generator_triples(alg_name):
    alg = load_algebra(alg_name, KAPPA)
    names = [g.name for g in alg.gens if g.family is None]
    for x in names:
        for y in names:
            for z in names:
                ok, res = check_jacobi(alg.gen(x), alg.gen(y), alg.gen(z))
                assert ok, (x, y, z, res)


def test_jacobi_with_lattice_letters():
    for m in (1, 2, -1):
        ok, res = check_jacobi(PI.gen("d"), PI.gen("c"), PI.lattice("e", m))
        assert ok, res


def test_mode_brackets_of_n4():
    j0j = mode_bracket(ModeExpr.mode("J0", 0), ModeExpr.mode("Jp", 0), N4)
    assert j0j == ModeExpr.mode("Jp", 0, 2)
    # pole data 2J/(z-w)^2 + ∂J/(z-w) with Δ_G = 3/2 gives (2m+1) - (m+n+1) = m - n
    for m, n in ((Fraction(1, 2), Fraction(-1, 2)), (Fraction(3, 2), Fraction(1, 2)), (0, 0), (2, -1)):
        got = mode_bracket(ModeExpr.mode("Gp", m), ModeExpr.mode("Gbp", n), N4)
        assert got == ModeExpr.mode("Jp", m + n, m - n)


@pytest.mark.parametrize("m", [-2, -1, 0, 1, 2, 3])
def test_virasoro_modes(m):
    c = -6 * (KAPPA + 1)
    got = mode_bracket(ModeExpr.mode("T", m), ModeExpr.mode("T", -m), N4)
    want = ModeExpr.mode("T", 0, 2 * m) + ModeExpr.identity(c * Fraction(m * (m * m - 1), 12))
    assert got == want


def test_affine_mode_central_term():
    for m in (-2, 1, 3):
        got = mode_bracket(ModeExpr.mode("E1", m), ModeExpr.mode("F1", -m), AFF)
        assert got == ModeExpr.mode("H1", 0) + ModeExpr.identity(KAPPA * m)


def test_state_modes_derivative_rule():
    # (∂u)_n = -(n + Δ_u) u_n
    d_chi = W.gen("chi").d()
    assert state_modes(d_chi, Fraction(2)) == ModeExpr.mode("chi", 2, -3)


w_names = ["chi", "chibar", "H", "S", "psi", "psibar"]


@st.composite
def w_states(draw):
    """Small homogeneous-ish composites of W generators (weight at most 4)."""
    a = W.gen(draw(st.sampled_from(w_names)))
    if draw(st.booleans()):
        a = a.d()
    if draw(st.booleans()):
        b = W.gen(draw(st.sampled_from(["chi", "chibar"])))
        a = normal_order(b, a)
    return a


@given(w_states(), w_states())
def test_skew_symmetry(a, b):
    """[b λ a] = -(-1)^{|a||b|} [a λ b] at λ -> -λ - ∂."""
    ab = lambda_bracket(a, b)
    ba = lambda_bracket(b, a)
    sign = -1 if (a.parity() and b.parity()) else 1
    # expand [a_{-λ-∂} b]: coefficient of λ^j picks C(n, j) (-1)^n ∂^{n-j}
    want = {}
    for n, st_ in ab.coeffs.items():
        for j in range(n + 1):
            coeff = Fraction(factorial(n), factorial(j) * factorial(n - j)) * (-1) ** n
            term = st_.d(n - j) * (coeff * -sign)
            want[j] = want.get(j, W.zero()) + term
    assert (ba - LambdaPoly(W, want)).is_zero()


@given(w_states(), w_states())
def test_degree_bound_and_gradings(a, b):
    ab = lambda_bracket(a, b)
    for n, st_ in ab.coeffs.items():
        if st_:
            assert n + 1 <= a.weight() + b.weight()
            assert st_.parities() <= {a.parity() ^ b.parity()}
            assert st_.grades() <= {next(iter(a.grades())) + next(iter(b.grades()))}
    prod = normal_order(a, b)
    if prod:
        assert prod.parities() == {a.parity() ^ b.parity()}
