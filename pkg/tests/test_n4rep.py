from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from psl22w import n4rep
from psl22w.n4rep import (FreeFieldError, LoewyError, N4Error, annihilation_pattern, compare_with_formulas,
                          conjugate, degenerations, freefield_module, jordan_report, logarithmic_top, loewy,
                          relaxed_top, spectral_flow, verify_embedding, verify_module_axioms)

H = F(1, 2)
levels = st.sampled_from([H, -H])
sectors = st.sampled_from(["R", "NS"])
# generic coset representatives avoid the degeneration points ±1/2, 1, -1
generic_lam = st.fractions(min_value=-1, max_value=1, max_denominator=7).filter(
    lambda x: x.denominator > 2)
half_ints = st.integers(-6, 6).map(lambda n: F(n, 2))
weights = st.tuples(st.fractions(max_denominator=8, min_value=-5, max_value=5),
                    st.fractions(max_denominator=8, min_value=-5, max_value=5))


def entry(mod, mode, src, dst):
    return mod.actions[mode].get(mod.index[src], {}).get(mod.index[dst], F(0))


# top-space formulas


def test_jm_on_zero_state_at_negative_level():
    mod = relaxed_top(-H, "R", 0, 7)
    assert entry(mod, ("Jm", 0), (F(0), "plain"), (F(-2), "plain")) == F(-3, 16)


def test_ramond_top_weight_negative_level():
    mod = relaxed_top(-H, "R", F(1, 3), 5)
    t = mod.matrix(("T", F(0)))
    assert {F(str(t[i, i])) for i in range(t.rows)} == {F(-1, 8)}


def test_ns_top_weight_positive_level():
    assert n4rep.top_weight(H, "NS") == -H


@given(levels, sectors, generic_lam)
@settings(max_examples=15)
def test_j0_diagonal_and_jp_shifts(kk, sector, lam):
    mod = relaxed_top(kk, sector, lam, 5)
    for mu, lab in mod.basis:
        assert entry(mod, ("J0", 0), (mu, lab), (mu, lab)) == mu
        if (mu + 2, lab) in mod.index:
            assert entry(mod, ("Jp", 0), (mu, lab), (mu + 2, lab)) == 1


def test_odd_zero_modes_vanish_on_ramond_tops():
    mod = relaxed_top(H, "R", F(1, 5), 5)
    for g in ("Gp", "Gm", "Gbp", "Gbm"):
        assert mod.matrix((g, F(0))).is_zero_matrix


def test_small_window_rejected():
    with pytest.raises(N4Error):
        relaxed_top(H, "R", 0, 2)
    with pytest.raises(N4Error):
        logarithmic_top(H, 0, "P", 3)


def test_level_must_be_admissible():
    with pytest.raises(N4Error):
        relaxed_top(F(1, 3), "R", 0, 5)


@given(levels, sectors, generic_lam)
@settings(max_examples=10)
def test_split_invariance(kk, sector, lam):
    a = relaxed_top(kk, sector, lam, 7)
    b = relaxed_top(kk, sector, lam + 2, 7)
    assert a.basis == b.basis
    assert a.actions == b.actions


# axioms


@pytest.mark.parametrize("kk", [H, -H])
@pytest.mark.parametrize("sector", ["R", "NS"])
def test_relaxed_axioms(kk, sector):
    rep = verify_module_axioms(relaxed_top(kk, sector, F(1, 3), 7))
    assert rep["ok"], rep["failures"]
    assert rep["checked_columns"] > 0


@pytest.mark.parametrize("variant", ["V", "P"])
def test_logarithmic_axioms(variant):
    rep = verify_module_axioms(logarithmic_top(H, H, variant, 7))
    assert rep["ok"], rep["failures"]


def test_corrupted_matrix_is_reported():
    mod = relaxed_top(H, "R", F(1, 3), 7)
    col = mod.index[(F(1, 3), "plain")]
    row = mod.index[(F(-5, 3), "plain")]
    mod.actions[("Jm", F(0))][col][row] += 1
    rep = verify_module_axioms(mod)
    assert not rep["ok"]
    assert any("Jm" in " ".join(f["pair"]) for f in rep["failures"])


# degenerations


def test_degeneration_roots():
    assert degenerations(-H, "R")["roots"] == [H, F(3, 2)]
    assert degenerations(-H, "R")["cosets"] == [-H, H]
    assert degenerations(H, "NS")["roots"] == [F(1)]
    assert degenerations(-H, "NS")["roots"] == [H, F(3, 2)]


@given(levels)
def test_ramond_roots_are_one_plus_minus_level(kk):
    assert degenerations(kk, "R")["roots"] == sorted([1 - kk, 1 + kk])


# free-field route


@given(levels, sectors, generic_lam)
@settings(max_examples=6)
def test_freefield_depth_zero_matches_formulas(kk, sector, lam):
    rep = compare_with_formulas(kk, sector, lam, 5)
    assert rep["ok"], rep["mismatches"]


@pytest.mark.parametrize("variant", ["V", "P"])
@pytest.mark.parametrize("kk", [H, -H])
def test_freefield_logarithmic_matches_formulas(kk, variant):
    rep = compare_with_formulas(kk, "R", H, 5, variant)
    assert rep["ok"], rep["mismatches"]


def test_freefield_j0_eigenvalue_and_top_weight():
    mod = freefield_module(H, "R", F(2, 7), 0, 5)
    for mu, lab in mod.basis:
        assert entry(mod, ("J0", 0), (mu, lab), (mu, lab)) == mu
        assert entry(mod, ("T", 0), (mu, lab), (mu, lab)) == -(H + 1) / 4


def test_depth_beyond_support():
    with pytest.raises(FreeFieldError, match="mode expansion depth"):
        freefield_module(H, "R", 0, depth=F(3, 2))


def test_half_depth_axioms():
    mod = freefield_module(H, "NS", F(1, 3), depth=H, window=5)
    rep = verify_module_axioms(mod)
    assert rep["ok"], rep["failures"]


def test_annihilation_pattern():
    rep = annihilation_pattern(H)
    assert rep["ok"], rep["checks"]


# embedding


def test_embedding_positive_level():
    rep = verify_embedding(H, general=False)
    assert rep["simple"]["ok"]
    assert rep["simple"]["central_charge"] in ("-9", F(-9))


# composition


def test_small_window_is_boundary_contaminated():
    mod = relaxed_top(-H, "R", H, 3)
    with pytest.raises(LoewyError, match="boundary-contaminated"):
        loewy(mod)


def test_ramond_sequence():
    res = loewy(relaxed_top(-H, "R", H, 7))
    assert res["names"] == ["conj(L_{-1/2})", "L_{-3/2}"]
    assert res["arrows"] == [(1, 0)]


def test_conjugated_sub_matches_other_quotient():
    sub = loewy(relaxed_top(-H, "R", H, 7))["factors"][0]
    other = loewy(relaxed_top(-H, "R", -H, 7))["factors"]
    assert sub["kind"] == "conj"
    quotient = other[-1]
    assert quotient["kind"] == "hw"
    assert quotient["name"] == "L_{" + sub["name"][len("conj(L_{"):-2] + "}"
    assert quotient["conformal_weight"] == sub["conformal_weight"]


@given(levels, sectors, generic_lam)
@settings(max_examples=8)
def test_generic_coset_is_irreducible(kk, sector, lam):
    assert loewy(relaxed_top(kk, sector, lam, 7))["count"] == 1


def test_ns_diamond():
    res = loewy(freefield_module(H, "NS", -1, depth=H, window=7))
    assert res["count"] == 4
    assert [len(layer) for layer in res["layers"]] == [1, 2, 1]


# logarithmic modules


def test_p_jm_correction_at_positive_level():
    mod = logarithmic_top(H, H, "P", 7)
    mu = H
    assert entry(mod, ("Jm", 0), (mu, "t"), (mu - 2, "b")) == F(1, 4)


@pytest.mark.parametrize("kk", [H, -H])
def test_jordan_structure(kk):
    p = jordan_report(logarithmic_top(kk, F(1, 3), "P", 5))
    assert p["square_zero"] and not p["semisimple"]
    assert p["pairs"] == [["t", "b"]]
    assert jordan_report(logarithmic_top(kk, F(1, 3), "V", 5))["semisimple"]
    assert jordan_report(relaxed_top(kk, "R", F(1, 3), 5))["semisimple"]


def test_v_generic_has_two_relaxed_factors():
    res = loewy(logarithmic_top(H, F(1, 3), "V", 7))
    assert res["count"] == 2
    assert all(f["kind"] == "relaxed" for f in res["factors"])


# conjugation and spectral flow


@given(levels, sectors, generic_lam)
@settings(max_examples=10)
def test_conjugation_is_involutive(kk, sector, lam):
    mod = relaxed_top(kk, sector, lam, 5)
    back = conjugate(conjugate(mod))
    assert back.basis == mod.basis
    assert back.actions == mod.actions


@pytest.mark.parametrize("variant", ["V", "P"])
def test_conjugation_preserves_t0_spectrum(variant):
    mod = logarithmic_top(-H, F(1, 3), variant, 5)
    t = mod.matrix(("T", F(0)))
    tc = conjugate(mod).matrix(("T", F(0)))
    assert sorted(map(str, t.eigenvals())) == sorted(map(str, tc.eigenvals()))
    assert t.charpoly() == tc.charpoly()


def test_conjugate_satisfies_axioms():
    rep = verify_module_axioms(conjugate(logarithmic_top(H, H, "P", 7)))
    assert rep["ok"], rep["failures"]


def test_flow_example():
    assert spectral_flow((0, 0), H, -H) == (H, F(-1, 8))


@given(weights, levels)
def test_flow_identity(w, kk):
    assert spectral_flow(w, 0, kk) == tuple(F(x) for x in w)


@given(weights, half_ints, half_ints, levels)
def test_flow_group_law(w, a, b, kk):
    assert spectral_flow(spectral_flow(w, a, kk), b, kk) == spectral_flow(w, a + b, kk)


@given(weights, half_ints, levels)
def test_flow_conjugation_compatibility(w, ell, kk):
    conj = lambda p: (-p[0], p[1])
    assert conj(spectral_flow(w, ell, kk)) == spectral_flow(conj(w), -ell, kk)


def test_flow_rejects_non_half_integer():
    with pytest.raises(N4Error):
        spectral_flow((0, 0), F(1, 3), H)
