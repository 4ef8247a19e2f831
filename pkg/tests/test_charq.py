from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from psl22w import charq
from psl22w.charq import QSeries


def partitions_count(n):
    """Brute-force partition counts (oracle for the inverse Euler product)."""
    table = [1] + [0] * n
    for part in range(1, n + 1):
        for m in range(part, n + 1):
            table[m] += table[m - part]
    return table


def test_eta_low_coefficients():
    eta = charq.eta(10)
    assert eta.prefactor == Fraction(1, 24)
    assert [eta.coefficient(n) for n in range(4)] == [1, -1, -1, 0]


def test_eta_pentagonal_sum():
    assert charq.eta(20).equals(charq.eta_pentagonal(20))


@pytest.mark.parametrize("i", [1, 2, 3, 4])
def test_theta_product_equals_sum(i):
    assert charq.theta(i, 20).equals(charq.theta_sum(i, 20))


def test_heisenberg_pbw_character():
    ch = charq.pbw_character([(1, 0, "even")], 15)
    counts = partitions_count(14)
    assert [ch.coefficient(n) for n in range(15)] == counts


def test_symplectic_fermion_vacuum_pbw():
    ch = charq.pbw_character([(1, 1, "odd"), (1, -1, "odd")], 12)
    ref = charq.character("sf_ns", 12)
    assert ch.coefficient(1, 1) == 1 and ch.coefficient(1, -1) == 1
    assert all(ch.coefficient(n, e) == ref.coefficient(n, e) for n in range(12) for e in range(-4, 5))


def test_wpr_leading_terms():
    ch = charq.character("wpr", 10)
    assert ch.prefactor == Fraction(1, 12)
    assert ch.coefficient(0) == 1
    assert ch.coefficient(1, 1) == 1 and ch.coefficient(1, -1) == 1


def test_wpr_pbw_matches_product():
    for sup in (False, True):
        assert charq.character("wpr", 10, sup).equals(
            charq.pbw_character(charq.WPR_GENERATORS, 10, sup, central_charge=-2))


def test_identity_suite():
    rep = charq.verify_char_identities(20)
    assert rep["ok"], [r for r in rep["records"] if r["status"] != "pass"]


def test_identity_suite_needs_order():
    with pytest.raises(charq.CharError):
        charq.verify_char_identities(5)


def test_refinement_tags():
    whole = charq.character("n4_R", 10, False, Fraction(1, 3))
    a, b = charq.refine_delta(whole)
    assert a.tag != b.tag
    with pytest.raises(charq.CharError):
        charq.refine_delta(a)


def test_mismatched_tags_do_not_add():
    a = QSeries.one(5).with_tag(Fraction(1, 3), 1)
    b = QSeries.one(5).with_tag(Fraction(1, 2), 1)
    with pytest.raises(charq.CharError):
        a + b


def test_unknown_module():
    with pytest.raises(charq.CharError):
        charq.character("nope")


series_coeffs = st.dictionaries(st.integers(0, 6), st.dictionaries(st.integers(-2, 2), st.integers(-3, 3),
                                                                   max_size=3), max_size=4)


@given(series_coeffs, series_coeffs, st.integers(3, 9), st.integers(3, 9))
def test_product_order_is_minimum(a, b, oa, ob):
    x = QSeries(0, a, oa)
    y = QSeries(0, b, ob)
    assert (x * y).order == min(oa, ob)
    assert (x + y).order == min(oa, ob)


@given(series_coeffs, series_coeffs, series_coeffs)
def test_series_ring_laws(a, b, c):
    x, y, z = (QSeries(0, d, 8) for d in (a, b, c))
    assert ((x * y) * z).equals(x * (y * z))
    assert (x * (y + z)).equals(x * y + x * z)
    assert (x * y).equals(y * x)


@given(series_coeffs)
def test_inverse(a):
    a = dict(a)
    a[0] = {0: 1}
    x = QSeries(0, a, 8)
    assert (x * x.inverse()).equals(QSeries.one(8))
