"""The twelve acceptance criteria as executable checks.

Each ``criterion_N`` returns a list of records ``{name, status, residual,
seconds}``; a criterion passes when every record has status "pass".  The
CLI ``all`` command and ``tests/test_acceptance.py`` both run these.
"""
from __future__ import annotations

import random
import time
from collections import Counter
from fractions import Fraction

import sympy

from . import charq, n4rep, qhr, zhu
from .scalars import KAPPA, S
from .superalgebras import central_charge_of

HALF = Fraction(1, 2)
PASSING = {"pass", "exact match"}


def _rec(name, ok, residual=None, t0=None) -> dict:
    return {"name": name, "status": "pass" if ok else "fail",
            "residual": None if ok else (residual if residual is not None else "mismatch"),
            "seconds": round(time.perf_counter() - t0, 3) if t0 is not None else 0.0}


def _normalise(recs: list) -> list:
    out = []
    for r in recs:
        r = dict(r)
        r["status"] = "pass" if r["status"] in PASSING else "fail"
        r.setdefault("seconds", 0.0)
        out.append(r)
    return out


# 1 -------------------------------------------------------------------------

def criterion_1() -> list:
    rep = qhr.verify_theorem_opes(KAPPA)
    recs = _normalise(rep["records"])
    recs.append(_rec("21 unordered generator pairs checked", len(rep["records"]) == 21, len(rep["records"])))
    return recs


# 2 -------------------------------------------------------------------------

def criterion_2() -> list:
    return _normalise(qhr.check_brst(qhr.build_complex(KAPPA)))


# 3 -------------------------------------------------------------------------

def criterion_3() -> list:
    t = time.perf_counter()
    ok, bad = qhr.wpr_table_depends_only_on_k_squared()
    return [_rec("wpr brackets free of sigma and odd powers of kappa", ok, [list(map(str, b)) for b in bad[:5]], t)]


# 4 -------------------------------------------------------------------------

def criterion_4() -> list:
    recs = []
    for kk in (HALF, -HALF):
        t = time.perf_counter()
        rep = qhr.collapse_check(kk)
        bad = [r for r in rep["records"] if r["status"] != "pass"]
        recs.append(_rec(f"k={kk}: ideal closes and quotient is symplectic fermions ({len(rep['records'])} checks)",
                         rep["ok"], bad[:3], t))
    return recs


# 5 -------------------------------------------------------------------------

SINGULAR_CASES = [(HALF, 2), (-HALF, 2), (Fraction(1, 3), 4), (Fraction(-1, 3), 4),
                  (Fraction(3, 2), 4), (Fraction(-3, 2), 4),
                  (Fraction(1, 4), 6), (Fraction(-1, 4), 6), (Fraction(2, 3), 6), (Fraction(-2, 3), 6),
                  (Fraction(5, 2), 6), (Fraction(-5, 2), 6)]


def criterion_5() -> list:
    recs = []
    for kk, weight in SINGULAR_CASES:
        t = time.perf_counter()
        dim, rank = qhr.shapovalov_rank(kk, weight, 1)
        recs.append(_rec(f"k={kk}, weight {weight}, grade +1: rank deficiency", rank < dim,
                         f"dim={dim} rank={rank}", t))
    # the listed levels have no deficiency below the listed weight
    for kk, top in ((Fraction(1, 3), 4), (Fraction(3, 2), 4), (Fraction(1, 4), 6), (Fraction(5, 2), 6)):
        for weight in range(1, top):
            t = time.perf_counter()
            dim, rank = qhr.shapovalov_rank(kk, weight, 1)
            recs.append(_rec(f"k={kk}, weight {weight}, grade +1: full rank", rank == dim,
                             f"dim={dim} rank={rank}", t))
    t = time.perf_counter()
    dim, rank = qhr.shapovalov_rank(2, 2, 1)
    recs.append(_rec("k=2, weight 2, grade +1: full rank", rank == dim, f"dim={dim} rank={rank}", t))
    return recs


# 6 -------------------------------------------------------------------------

def criterion_6() -> list:
    recs = _normalise(zhu.verify_relations_by_engine(KAPPA))
    t = time.perf_counter()
    bad = zhu.presented_zhu(KAPPA).check_confluence()
    recs.append(_rec("rewrite system confluent on all overlaps", not bad, [str(b) for b in bad[:3]], t))
    h, delta, k = sympy.symbols("h Delta kappa")
    t = time.perf_counter()
    mod = zhu.verma(h, delta)
    recs.append(_rec("Verma module is 4-dimensional", mod.dim == 4, mod.dim, t))
    t = time.perf_counter()
    res = [(lab, r) for lab, r in zhu.relation_residuals(mod) if not r.is_zero_matrix]
    recs.append(_rec("Verma matrices satisfy every relation", not res, [lab for lab, _ in res], t))
    for d, want in ((3, 4), (Fraction(-2, 5), 4), (1, 4), (0, 1)):
        for hv in (0, Fraction(7, 3)):
            t = time.perf_counter()
            got = zhu.classify(hv, d)["irreducible_dim"]
            recs.append(_rec(f"h={hv}, Delta={d}: simple quotient dimension {want}", got == want, got, t))
    t = time.perf_counter()
    data = zhu.h_eigen_data(mod)
    x = sympy.Symbol("x")
    root = sympy.sqrt(h + sympy.Rational(1, 4) * (6 * delta + 1) * mod.level ** 2)
    formula = sympy.expand((x - (h + sympy.Rational(1, 4) + root)) * (x - (h + sympy.Rational(1, 4) - root)))
    recs.append(_rec("H eigenvalues are h + 1/4 ± sqrt(h + (6Delta+1) kappa^2 / 4)",
                     sympy.expand(data["charpoly"] - formula) == 0, str(data["charpoly"]), t))
    t = time.perf_counter()
    locus = zhu.nondiagonalisable_locus(mod)
    want = -sympy.Rational(1, 4) * (6 * delta + 1) * mod.level ** 2
    ok = len(locus) == 1 and sympy.expand(locus[0] - want) == 0
    recs.append(_rec("H nondiagonalisable locus h = -(6Delta+1) kappa^2 / 4", ok, [str(v) for v in locus], t))
    t = time.perf_counter()
    hv = -sympy.Rational(1, 4) * (6 * 2 + 1) * sympy.Rational(1, 4)
    c = zhu.classify(hv, 2, S(HALF))
    recs.append(_rec("on the locus (Delta=2, k=1/2) H is nondiagonalisable, quotient 4-dimensional",
                     c["irreducible_dim"] == 4 and not c["H_diagonalisable_on_odd_block"], c, t))
    return recs


# 7 -------------------------------------------------------------------------

def criterion_7() -> list:
    recs = []
    for kk, c_expected in ((HALF, -9), (-HALF, -3)):
        t = time.perf_counter()
        rep = n4rep.verify_embedding(kk, general=False)["simple"]
        bad = [p for p in rep["pairs"] if p["status"] != "exact match"]
        recs.append(_rec(f"k={kk}: 36 image brackets match the N=4 table", rep["ok"] and len(rep["pairs"]) == 36,
                         bad[:3], t))
        t = time.perf_counter()
        c = central_charge_of(n4rep.semikhatov_images(kk)[1]["T"])
        recs.append(_rec(f"k={kk}: central charge of the image of T is {c_expected}", c == c_expected, str(c), t))
    t = time.perf_counter()
    rep = n4rep.verify_embedding(KAPPA, general=True)["general"]
    bad = [p for p in rep["pairs"] if p["status"] != "exact match"]
    recs.append(_rec("symbolic k: full images inside W x Pi match the N=4 table", rep["ok"], bad[:3], t))
    return recs


# 8 -------------------------------------------------------------------------

LAMBDAS = (Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3), Fraction(0), Fraction(1), Fraction(-5, 7))


def criterion_8() -> list:
    recs = []
    for kk in (HALF, -HALF):
        for sector in ("R", "NS"):
            for lam in LAMBDAS:
                t = time.perf_counter()
                cmp = n4rep.compare_with_formulas(kk, sector, lam, 7)
                recs.append(_rec(f"k={kk} {sector} lambda={lam}: depth-0 free-field matrices equal the formulas",
                                 cmp["ok"], cmp["mismatches"][:2], t))
                t = time.perf_counter()
                ax = n4rep.verify_module_axioms(n4rep.relaxed_top(kk, sector, lam, 7))
                recs.append(_rec(f"k={kk} {sector} lambda={lam}: top-space mode axioms", ax["ok"],
                                 ax["failures"][:2], t))
        for variant in ("V", "P"):
            for lam in (HALF, -HALF, Fraction(1, 3)):
                t = time.perf_counter()
                cmp = n4rep.compare_with_formulas(kk, "R", lam, 7, variant)
                recs.append(_rec(f"k={kk} {variant} lambda={lam}: depth-0 free-field matrices equal the formulas",
                                 cmp["ok"], cmp["mismatches"][:2], t))
                t = time.perf_counter()
                ax = n4rep.verify_module_axioms(n4rep.logarithmic_top(kk, lam, variant, 7))
                recs.append(_rec(f"k={kk} {variant} lambda={lam}: top-space mode axioms", ax["ok"],
                                 ax["failures"][:2], t))
    for kk in (HALF, -HALF):
        for sector, variant, lam in (("R", "relaxed", HALF), ("NS", "relaxed", Fraction(1)),
                                     ("R", "V", HALF), ("R", "P", -HALF)):
            for depth in (HALF, Fraction(1)):
                t = time.perf_counter()
                mod = n4rep.freefield_module(kk, sector, lam, depth, 5, variant)
                ax = n4rep.verify_module_axioms(mod)
                recs.append(_rec(f"k={kk} {sector} {variant} depth {depth}: all declared mode pairs",
                                 ax["ok"] and ax["checked_columns"] > 0, ax["failures"][:2], t))
    t = time.perf_counter()
    pat = n4rep.annihilation_pattern(HALF)
    recs.append(_rec("k=1/2 NS depth 1/2: G-minus annihilation pattern", pat["ok"], pat["checks"], t))
    return recs


# 9 -------------------------------------------------------------------------

def _shape(result: dict) -> tuple:
    names = result["names"]
    return Counter(names), Counter((names[a], names[b]) for a, b in result["arrows"])


def _expect(name, result, factors, arrows, t0) -> dict:
    got_f, got_a = _shape(result)
    ok = got_f == Counter(factors) and got_a == Counter(arrows)
    return _rec(name, ok, n4rep.render_loewy(result), t0)


L = "L_{%s}"
C = "conj(L_{%s})"


def criterion_9() -> list:
    recs = []
    expect_roots = {("R", HALF): [HALF, Fraction(3, 2)], ("R", -HALF): [HALF, Fraction(3, 2)],
                    ("NS", -HALF): [HALF, Fraction(3, 2)], ("NS", HALF): [Fraction(1)]}
    for (sector, kk), roots in expect_roots.items():
        t = time.perf_counter()
        got = n4rep.degenerations(kk, sector)["roots"]
        recs.append(_rec(f"{sector} k={kk}: degeneration roots {[str(r) for r in roots]}", got == roots,
                         [str(r) for r in got], t))
    for kk in (HALF, -HALF):
        for sector in ("R", "NS") if kk == -HALF else ("R",):
            t = time.perf_counter()
            res = n4rep.loewy(n4rep.relaxed_top(kk, sector, HALF, 7))
            recs.append(_expect(f"{sector} k={kk} [[1/2]]: conj(L_-1/2) sub, L_-3/2 quotient", res,
                                [L % "-3/2", C % "-1/2"], [(L % "-3/2", C % "-1/2")], t))
            t = time.perf_counter()
            res = n4rep.loewy(n4rep.relaxed_top(kk, sector, -HALF, 7))
            recs.append(_expect(f"{sector} k={kk} [[-1/2]]: conj(L_-3/2) sub, L_-1/2 quotient", res,
                                [L % "-1/2", C % "-3/2"], [(L % "-1/2", C % "-3/2")], t))
    t = time.perf_counter()
    res = n4rep.loewy(n4rep.freefield_module(HALF, "NS", 1, HALF, 7))
    recs.append(_expect("NS k=1/2 [[1]] depth 1/2: diamond L_-1 / L_0 L_0 / conj(L_-1)", res,
                        [L % "-1", L % "0", L % "0", C % "-1"],
                        [(L % "-1", L % "0")] * 2 + [(L % "0", C % "-1")] * 2, t))
    v_f = [L % "-3/2", L % "-1/2", C % "-1/2", C % "-3/2"]
    v_a = [(L % "-3/2", L % "-1/2"), (L % "-3/2", C % "-1/2"), (L % "-1/2", C % "-3/2"), (C % "-1/2", C % "-3/2")]
    p_f = [L % "-1/2", L % "-3/2", L % "-3/2", C % "-3/2", L % "-1/2", C % "-1/2", C % "-1/2", C % "-3/2"]
    p_a = ([(L % "-1/2", L % "-3/2")] * 2 + [(L % "-1/2", C % "-3/2")] * 2
           + [(C % "-3/2", C % "-1/2")] * 2 + [(L % "-3/2", L % "-1/2")] * 2
           + [(L % "-3/2", C % "-1/2")] * 2 + [(C % "-1/2", C % "-3/2")] * 2)
    for kk in (HALF, -HALF):
        t = time.perf_counter()
        res = n4rep.loewy(n4rep.logarithmic_top(kk, HALF, "V", 7))
        recs.append(_expect(f"V k={kk} [[1/2]]: diamond", res, v_f, v_a, t))
        t = time.perf_counter()
        res = n4rep.loewy(n4rep.conjugate(n4rep.logarithmic_top(kk, HALF, "V", 7)))
        recs.append(_expect(f"V k={kk} [[-1/2]] (conjugate): diamond", res,
                            [_conj_name(n) for n in v_f], [(_conj_name(a), _conj_name(b)) for a, b in v_a], t))
        t = time.perf_counter()
        res = n4rep.loewy(n4rep.logarithmic_top(kk, -HALF, "P", 7))
        arrows = p_a + ([(C % "-3/2", L % "-1/2")] if kk == HALF else [])
        recs.append(_expect(f"P k={kk} [[-1/2]]: {len(p_f)} factors, {len(arrows)} arrows", res, p_f, arrows, t))
    rng = random.Random(20261015)
    samples = []
    while len(samples) < 6:
        lam = Fraction(rng.randint(-40, 40), rng.randint(3, 17))
        if lam.denominator > 2:
            samples.append(lam)
    for lam in samples:
        for kk in (HALF, -HALF):
            t = time.perf_counter()
            counts = {}
            for sector in ("R", "NS"):
                counts[sector] = n4rep.loewy(n4rep.relaxed_top(kk, sector, lam, 7))["count"]
            v = n4rep.loewy(n4rep.logarithmic_top(kk, lam, "V", 7))
            p = n4rep.loewy(n4rep.logarithmic_top(kk, lam, "P", 7))
            ok = (counts == {"R": 1, "NS": 1} and v["count"] == 2 and len(v["arrows"]) == 1
                  and p["count"] == 4 and len(p["arrows"]) == 4 and [len(r) for r in p["layers"]] == [1, 2, 1]
                  and all(f["kind"] == "relaxed" for f in v["factors"] + p["factors"]))
            recs.append(_rec(f"generic lambda={lam}, k={kk}: relaxed 1, V 2, P diamond of relaxed", ok,
                             {"relaxed": counts, "V": v["names"], "P": n4rep.render_loewy(p)}, t))
    return recs


def _conj_name(name: str) -> str:
    # conjugation swaps L_ν and conj(L_ν), keeping ν
    label = name[name.index("{") + 1:name.index("}")]
    return C % label if name.startswith("L_") else L % label


# 10 ------------------------------------------------------------------------

def criterion_10() -> list:
    recs = []
    for kk in (HALF, -HALF):
        for lam in (HALF, -HALF, Fraction(1, 3)):
            t = time.perf_counter()
            mod = n4rep.logarithmic_top(kk, lam, "P", 7)
            j = n4rep.jordan_report(mod)
            ok = (j["square_zero"] and j["pairs"] == [["t", "b"]] and j["nilpotent_rank"] == len(mod.window))
            recs.append(_rec(f"P k={kk} lambda={lam}: T_0 has rank-2 blocks pairing t over b", ok, j, t))
            t = time.perf_counter()
            sems = [n4rep.jordan_report(n4rep.logarithmic_top(kk, lam, "V", 7))["semisimple"]]
            for sector in ("R", "NS"):
                sems.append(n4rep.jordan_report(n4rep.relaxed_top(kk, sector, lam, 7))["semisimple"])
            recs.append(_rec(f"k={kk} lambda={lam}: T_0 semisimple on relaxed and V", all(sems), sems, t))
        t = time.perf_counter()
        j = n4rep.jordan_report(n4rep.freefield_module(kk, "R", -HALF, 1, 5, "P"))
        recs.append(_rec(f"P k={kk} free fields to depth 1: T_0 nilpotent part squares to zero",
                         j["square_zero"] and not j["semisimple"], j, t))
    return recs


# 11 ------------------------------------------------------------------------

def criterion_11() -> list:
    return _normalise(charq.verify_char_identities(20)["records"])


# 12 ------------------------------------------------------------------------

# module, highest weight, conformal weight, for each orbit step after the start
ORBITS = {
    -HALF: [
        [("conj", "R", "-1/2"), ("NS", "0"), ("R", "-1/2")],
        [("conj", "NS", "-1/2"), ("R", "0"), ("NS", "-1/2")],
        [("conj", "R", "-3/2"), ("NS", "1"), ("R", "-3/2")],
        [("conj", "NS", "-3/2"), ("R", "1"), ("NS", "-3/2")],
    ],
    HALF: [
        [("conj", "R", "-3/2"), ("NS", "0"), ("R", "-3/2")],
        [("conj", "R", "-1/2"), ("NS", "-1")],
        [("conj", "NS", "-1"), ("R", "-1/2")],
    ],
}


def _orbit_key(seq: list) -> list:
    head = seq[0]
    label = head["module"][head["module"].index("_{") + 2:-2]
    return [("conj", head["sector"], label)] + [(x["sector"], x["extremal"][0]) for x in seq[1:]]


def criterion_12() -> list:
    recs = []
    for kk, table in ORBITS.items():
        t = time.perf_counter()
        got = n4rep.flow_orbits(kk)
        keys = sorted(_orbit_key(o) for o in got)
        recs.append(_rec(f"k={kk}: orbit sequences", keys == sorted(table), keys, t))
        t = time.perf_counter()
        known = {(sec, lab, dl) for kind, sec, lab, dl in n4rep.catalogue_with_weights(kk) if kind == "hw"}
        new = []
        for o in got:
            for step in o[1:]:
                key = (step["sector"], step["highest_weight"], step["conformal_weight"])
                if key not in known:
                    new.append(step["module"])
        if kk == HALF:
            recs.append(_rec("k=1/2: orbits introduce no new lower-bounded top weights", not new, new, t))
        else:
            recs.append(_rec("k=-1/2: orbits introduce the new modules L^NS_1, L^R_0, L^R_1",
                             sorted(new) == sorted(["L^NS_{1}", "L^R_{0}", "L^R_{1}"]), new, t))
    t = time.perf_counter()
    recs.append(_rec("k=-1/2: flow by 1/2 takes (0, 0) to (1/2, -1/8)",
                     n4rep.spectral_flow((0, 0), HALF, -HALF) == (HALF, Fraction(-1, 8)), None, t))
    for kk in (HALF, -HALF):
        t = time.perf_counter()
        sample = [(Fraction(a, 2), Fraction(b, 8)) for a in range(-3, 4) for b in (-3, 0, 5)]
        ok = all(n4rep.spectral_flow(n4rep.spectral_flow(w, HALF, kk), HALF, kk) == n4rep.spectral_flow(w, 1, kk)
                 and n4rep.spectral_flow(w, 0, kk) == w for w in sample)
        recs.append(_rec(f"k={kk}: flow composes additively and flow by 0 is the identity", ok, None, t))
    return recs


CRITERIA = {
    1: ("symbolic W-algebra brackets from the reduction", criterion_1),
    2: ("BRST differential, conformal vector and W-generators", criterion_2),
    3: ("bracket table depends only on kappa squared", criterion_3),
    4: ("collapse to symplectic fermions at k = ±1/2", criterion_4),
    5: ("Shapovalov rank deficiencies", criterion_5),
    6: ("Zhu algebra relations, confluence and Verma modules", criterion_6),
    7: ("inverse-reduction embedding", criterion_7),
    8: ("module matrices and mode axioms", criterion_8),
    9: ("degenerations and Loewy diagrams", criterion_9),
    10: ("Jordan structure of T_0", criterion_10),
    11: ("character identities", criterion_11),
    12: ("spectral flow orbits", criterion_12),
}


def run_criterion(n: int) -> tuple[bool, list]:
    _, fn = CRITERIA[n]
    recs = fn()
    for r in recs:
        r["criterion"] = n
    return all(r["status"] == "pass" for r in recs), recs
