from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from psl22w.scalars import KAPPA, ONE, Scalar, ScalarError, S, parse_scalar, render, scalar_arith, specialize

SIGMA = Scalar.sigma()
small = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def scalars(draw):
    """Random elements a(κ) + b(κ)σ over a small nonzero κ-denominator."""
    a = [draw(small) for _ in range(3)]
    b = [draw(small) for _ in range(2)]
    shift = draw(st.sampled_from([1, 2, -3]))
    num = S(a[0]) + S(a[1]) * KAPPA + S(a[2]) * KAPPA * KAPPA + (S(b[0]) + S(b[1]) * KAPPA) * SIGMA
    return num / (KAPPA + shift)


def test_sigma_squared_is_kappa():
    assert SIGMA * SIGMA == KAPPA


def test_rational_function_sum():
    k = KAPPA
    lhs = (2 * k - 1) * (3 * k + 1) / (4 * k) + (2 * k + 1) * (3 * k - 1) / (4 * k)
    assert lhs == (6 * k * k - 1) / (2 * k)


def test_collapsing_coefficient_vanishes():
    x = 3 * (KAPPA * KAPPA - Fraction(1, 4))
    assert specialize(x, Fraction(1, 2)) == 0
    assert specialize(x, Fraction(-1, 2)) == 0


@pytest.mark.parametrize("level, c", [(Fraction(1, 2), -9), (Fraction(-1, 2), -3)])
def test_n4_central_charges(level, c):
    assert specialize(-6 * (KAPPA + 1), level) == c


def test_specialize_square():
    assert specialize(KAPPA * KAPPA, Fraction(1, 2)) == Fraction(1, 4)


def test_sigma_branches():
    assert specialize(SIGMA * SIGMA, 4) == 4
    assert specialize(SIGMA, 4, "+") == 2
    assert specialize(SIGMA, 4, "-") == -2


def test_division_by_zero():
    with pytest.raises((ScalarError, ZeroDivisionError)):
        ONE / (KAPPA - KAPPA)


def test_scalar_arith_dispatch():
    assert scalar_arith(KAPPA, "mul", KAPPA) == KAPPA * KAPPA
    assert scalar_arith(KAPPA, "neg") == -KAPPA
    assert scalar_arith(ONE, "div", KAPPA) * KAPPA == ONE


@given(scalars(), scalars(), scalars())
def test_ring_axioms(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x


@given(scalars())
def test_inverses(x):
    if x:
        assert x * x.inverse() == ONE
    assert x - x == S(0)


@given(scalars())
def test_render_parse_round_trip(x):
    assert parse_scalar(render(x)) == x


@given(scalars())
def test_normalize_idempotent(x):
    assert x.normalize() == x.normalize().normalize()
    assert hash(x) == hash(x.normalize())


@given(scalars(), scalars(), st.sampled_from([Fraction(4), Fraction(9, 4), Fraction(1, 4)]), st.sampled_from("+-"))
def test_specialize_commutes_with_arithmetic(x, y, k, branch):
    # κ a perfect square, so σ specialises to a rational on either branch
    try:
        sx, sy = specialize(x, k, branch), specialize(y, k, branch)
    except (ScalarError, ZeroDivisionError):
        return
    assert specialize(x + y, k, branch) == sx + sy
    assert specialize(x * y, k, branch) == sx * sy
