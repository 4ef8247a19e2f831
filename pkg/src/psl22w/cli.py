"""Command-line front end: ``psl22w <command> [flags]``.

Every command streams JSON records, one per check, with the fields
``schema, command, name, status, residual, seconds`` (plus ``data`` where a
command produces matrices, factor lists or series).  Exact scalars are
rendered as strings.  Exit status: 0 when every check passes, 1 when some
check fails, 2 for usage errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import re
import sys
import time
from fractions import Fraction
from pathlib import Path

import sympy

from . import __version__, acceptance, charq, n4rep, qhr, zhu
from .scalars import KAPPA, parse_scalar, render

SCHEMA = 1
CACHE_ENV = "PSL22W_CACHE_DIR"


class UsageError(Exception):
    pass


# -- argument helpers ---------------------------------------------------------

def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def _level_arg(text: str):
    if text == "symbolic":
        return KAPPA
    try:
        return parse_scalar(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _n4_level(text: str) -> Fraction:
    k = _rational(text)
    if k not in n4rep.LEVELS:
        raise argparse.ArgumentTypeError("level must be 1/2 or -1/2")
    return k


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


# -- JSON rendering -------------------------------------------------------------

def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_jsonable(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, float, str)):
        return x
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, sympy.Basic):
        return str(x)
    try:
        return render(x)
    except (AttributeError, TypeError):
        return str(x)


def _check(name, ok, residual=None, seconds=0.0, data=None) -> dict:
    rec = {"name": name, "status": "pass" if ok else "fail",
           "residual": None if ok else residual, "seconds": round(seconds, 3)}
    if data is not None:
        rec["data"] = data
    return rec


def _module_data(mod: n4rep.WeightModule) -> dict:
    basis = [[_jsonable(mu), lab] for mu, lab in mod.basis]
    mats = {}
    for mode in mod.modes:
        entries = []
        for col, rows in sorted(mod.actions[mode].items()):
            for row, c in sorted(rows.items()):
                entries.append([row, col, _jsonable(c)])
        mats[n4rep._mode_str(mode)] = entries
    return {"level": _jsonable(mod.kk), "sector": mod.sector, "variant": mod.variant,
            "lambda": _jsonable(mod.lam), "window": _jsonable(mod.window), "layer": _jsonable(mod.layer),
            "basis": basis, "matrices": mats}


# -- commands -------------------------------------------------------------------

def cmd_verify_opes(a) -> list:
    rep = qhr.verify_theorem_opes(a.level)
    out = [dict(r, status="pass" if r["status"] == "exact match" else "fail", detail=r["status"])
           for r in rep["records"]]
    out.append(_check("bracket pairs checked", len(rep["records"]) == 21, len(rep["records"])))
    return out


def cmd_collapse(a) -> list:
    t = time.perf_counter()
    try:
        rep = qhr.collapse_check(a.level)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    recs = [dict(r, seconds=0.0) for r in rep["records"]]
    recs.append(_check("collapse at this level", rep["ok"], None, time.perf_counter() - t))
    return recs


def cmd_shapovalov(a) -> list:
    t = time.perf_counter()
    if not a.level.is_rational():
        raise UsageError("shapovalov needs a rational level")
    try:
        dim, rank = qhr.shapovalov_rank(a.level, a.weight, a.grade, a.max_weight)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    data = {"level": render(a.level), "weight": a.weight, "grade": a.grade, "dimension": dim, "rank": rank,
            "deficiency": dim - rank, "adjoint": "chi<->chibar, psi<->-psibar, H, S self-adjoint"}
    return [_check(f"Gram matrix at weight {a.weight}, grade {a.grade}", True, None, time.perf_counter() - t, data)]


def cmd_zhu_verify(a) -> list:
    recs = [dict(r, seconds=0.0) for r in zhu.verify_relations_by_engine(a.level)]
    t = time.perf_counter()
    bad = zhu.presented_zhu(a.level).check_confluence()
    recs.append(_check("rewrite system confluent", not bad, [str(b) for b in bad[:5]], time.perf_counter() - t))
    return recs


def cmd_zhu_classify(a) -> list:
    t = time.perf_counter()
    try:
        h, delta = sympy.sympify(a.h), sympy.sympify(a.delta)
    except sympy.SympifyError as exc:
        raise UsageError(str(exc)) from exc
    res = zhu.classify(h, delta, a.level)
    mod = zhu.verma(h, delta, a.level)
    bad = [lab for lab, r in zhu.relation_residuals(mod) if not r.is_zero_matrix]
    data = dict(res, matrices={g: [[str(x) for x in m.row(i)] for i in range(m.rows)]
                               for g, m in mod.matrices.items()})
    return [_check("Verma matrices satisfy the relations", not bad, bad, time.perf_counter() - t, data)]


def _build_module(a) -> n4rep.WeightModule:
    variant = getattr(a, "variant", "relaxed")
    if variant in ("V", "P") and a.sector != "R":
        raise UsageError("logarithmic variants live in the R sector")
    if a.depth == 0 and a.source == "formula":
        if variant == "relaxed":
            return n4rep.relaxed_top(a.level, a.sector, a.lam, a.window)
        return n4rep.logarithmic_top(a.level, a.lam, variant, a.window)
    return n4rep.freefield_module(a.level, a.sector, a.lam, a.depth, a.window, variant)


def _module_checks(a, mod) -> list:
    recs = []
    t = time.perf_counter()
    ax = n4rep.verify_module_axioms(mod)
    recs.append(_check("mode axioms on interior columns", ax["ok"], ax["failures"], time.perf_counter() - t,
                       {"checked_columns": ax["checked_columns"]}))
    if a.depth == 0:
        t = time.perf_counter()
        cmp = n4rep.compare_with_formulas(a.level, a.sector, a.lam, a.window, mod.variant)
        recs.append(_check("free-field and formula matrices agree", cmp["ok"], cmp["mismatches"],
                           time.perf_counter() - t))
    return recs


def cmd_relaxed(a) -> list:
    mod = _build_module(a)
    recs = _module_checks(a, mod)
    recs.append(_check("module", True, data=_module_data(mod)))
    return recs


def cmd_loewy(a) -> list:
    mod = _build_module(a)
    t = time.perf_counter()
    try:
        res = n4rep.loewy(mod)
    except n4rep.LoewyError as exc:
        return [_check("loewy", False, str(exc), time.perf_counter() - t)]
    data = {"factors": res["factors"], "arrows": [list(x) for x in res["arrows"]], "layers": res["layers"],
            "diagram": n4rep.render_loewy(res)}
    return [_check(f"{res['count']} composition factors", True, None, time.perf_counter() - t, data)]


def cmd_log(a) -> list:
    a.sector = "R"
    mod = _build_module(a)
    recs = _module_checks(a, mod)
    t = time.perf_counter()
    j = n4rep.jordan_report(mod)
    ok = (not j["semisimple"] and j["square_zero"]) if a.variant == "P" else j["semisimple"]
    recs.append(_check("Jordan structure of T_0", ok, j, time.perf_counter() - t, j))
    recs.append(_check("module", True, data=_module_data(mod)))
    return recs


def cmd_flow(a) -> list:
    recs = []
    if a.j is not None or a.delta is not None:
        if a.j is None or a.delta is None:
            raise UsageError("--j and --delta go together")
        w = n4rep.spectral_flow((a.j, a.delta), a.ell, a.level)
        back = n4rep.spectral_flow(w, -a.ell, a.level)
        recs.append(_check("flow and its inverse", back == (a.j, a.delta), None, 0.0,
                           {"j": _jsonable(w[0]), "Delta": _jsonable(w[1]), "ell": _jsonable(a.ell),
                            "orientation": "weights move by the mode substitution"}))
    t = time.perf_counter()
    orbits = n4rep.flow_orbits(a.level)
    data = [[{"module": s["module"], "sector": s["sector"], "extremal": s["extremal"]} for s in o] for o in orbits]
    recs.append(_check("orbits through the conjugate factors", True, None, time.perf_counter() - t,
                       {"orbits": data, "arrow": "flow by -1/2 from lowest to highest top weight"}))
    return recs


def cmd_embed_check(a) -> list:
    t = time.perf_counter()
    rep = n4rep.verify_embedding(a.level, general=not a.no_general)
    recs = []
    for part in ("simple", "general"):
        if part not in rep:
            continue
        r = rep[part]
        for p in r["pairs"]:
            recs.append({"name": f"{part}: [{p['pair'][0]} λ {p['pair'][1]}]",
                         "status": "pass" if p["status"] == "exact match" else "fail",
                         "residual": p["residual"] or None, "seconds": 0.0})
        recs.append(_check(f"{part}: central charge {r['central_charge']}",
                           r["central_charge"] == r["expected_central_charge"], r["central_charge"]))
    recs[-1]["seconds"] = round(time.perf_counter() - t, 3)
    return recs


def cmd_char(a) -> list:
    t = time.perf_counter()
    try:
        ser = charq.character(a.module, a.order, a.super, a.lam, a.level)
    except charq.CharError as exc:
        raise UsageError(str(exc)) from exc
    return [_check(f"{'super' if a.super else ''}character of {a.module}", True, None,
                   time.perf_counter() - t, ser.to_json())]


def cmd_char_verify(a) -> list:
    try:
        rep = charq.verify_char_identities(a.order)
    except charq.CharError as exc:
        raise UsageError(str(exc)) from exc
    return [dict(r, seconds=0.0) for r in rep["records"]]


def cmd_all(a) -> list:
    recs = []
    for n in a.only or sorted(acceptance.CRITERIA):
        t = time.perf_counter()
        ok, sub = acceptance.run_criterion(n)
        recs.extend(sub)
        recs.append(_check(f"criterion {n}: {acceptance.CRITERIA[n][0]}", ok,
                           [r["name"] for r in sub if r["status"] != "pass"], time.perf_counter() - t))
    return recs


# -- parser -------------------------------------------------------------------

def _module_flags(p, sector=True, variant=False):
    p.add_argument("--level", type=_n4_level, required=True)
    if sector:
        p.add_argument("--sector", choices=("R", "NS"), default="R")
    p.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(1, 3))
    p.add_argument("--window", type=_positive, default=7)
    p.add_argument("--depth", type=_rational, default=Fraction(0), choices=(Fraction(0), Fraction(1, 2), Fraction(1)))
    p.add_argument("--source", choices=("formula", "freefield"), default="formula")
    if variant:
        p.add_argument("--variant", choices=("relaxed", "V", "P"), default="relaxed")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="psl22w", description="Exact checks for the psl(2|2) W-algebra and N=4 modules.")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--cache-dir", default=None, help=f"result cache (default: ${CACHE_ENV}, off if unset)")
    ap.add_argument("--no-cache", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-opes")
    p.add_argument("--level", type=_level_arg, default=KAPPA)
    p.set_defaults(func=cmd_verify_opes)

    p = sub.add_parser("collapse")
    p.add_argument("--level", type=_level_arg, required=True)
    p.set_defaults(func=cmd_collapse)

    p = sub.add_parser("shapovalov")
    p.add_argument("--level", type=_level_arg, required=True)
    p.add_argument("--weight", type=_positive, required=True)
    p.add_argument("--grade", type=int, default=1)
    p.add_argument("--max-weight", type=_positive, default=qhr.DEFAULT_MAX_WEIGHT)
    p.set_defaults(func=cmd_shapovalov)

    p = sub.add_parser("zhu-verify")
    p.add_argument("--level", type=_level_arg, default=KAPPA)
    p.set_defaults(func=cmd_zhu_verify)

    p = sub.add_parser("zhu-classify")
    p.add_argument("--h", required=True)
    p.add_argument("--delta", required=True)
    p.add_argument("--level", type=_level_arg, default=KAPPA)
    p.set_defaults(func=cmd_zhu_classify)

    p = sub.add_parser("relaxed")
    _module_flags(p)
    p.set_defaults(func=cmd_relaxed, variant="relaxed")

    p = sub.add_parser("loewy")
    _module_flags(p, variant=True)
    p.set_defaults(func=cmd_loewy)

    p = sub.add_parser("log")
    _module_flags(p, sector=False)
    p.add_argument("--variant", choices=("V", "P"), required=True)
    p.set_defaults(func=cmd_log)

    p = sub.add_parser("flow")
    p.add_argument("--level", type=_n4_level, required=True)
    p.add_argument("--ell", type=_rational, default=Fraction(1, 2))
    p.add_argument("--j", type=_rational)
    p.add_argument("--delta", type=_rational)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("embed-check")
    p.add_argument("--level", type=_n4_level, required=True)
    p.add_argument("--no-general", action="store_true", help="skip the symbolic-level check")
    p.set_defaults(func=cmd_embed_check)

    p = sub.add_parser("char")
    p.add_argument("--module", required=True, choices=("wpr", "sf_ns", "sf_r", "pi", "n4_R", "n4_NS"))
    p.add_argument("--order", type=_positive, default=charq.DEFAULT_ORDER)
    p.add_argument("--super", action="store_true")
    p.add_argument("--lambda", dest="lam", type=_rational, default=Fraction(0))
    p.add_argument("--level", type=_n4_level, default=Fraction(1, 2))
    p.set_defaults(func=cmd_char)

    p = sub.add_parser("char-verify")
    p.add_argument("--order", type=_positive, default=20)
    p.set_defaults(func=cmd_char_verify)

    p = sub.add_parser("all")
    p.add_argument("--only", type=int, nargs="*", choices=sorted(acceptance.CRITERIA))
    p.set_defaults(func=cmd_all)
    return ap


# -- caching ------------------------------------------------------------------

def _canonical_args(a) -> dict:
    skip = {"func", "format", "cache_dir", "no_cache"}
    return {k: _jsonable(v) for k, v in sorted(vars(a).items()) if k not in skip}


def cache_key(a) -> str:
    blob = json.dumps({"command": a.command, "args": _canonical_args(a), "version": __version__,
                       "schema": SCHEMA}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _cache_dir(a) -> Path | None:
    if a.no_cache:
        return None
    d = a.cache_dir or os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def execute(a) -> list:
    """Run a parsed command, consulting the cache when one is configured."""
    cdir = _cache_dir(a)
    path = cdir / f"{cache_key(a)}.json" if cdir else None
    if path is not None and path.exists():
        return json.loads(path.read_text())
    recs = [dict(r, command=a.command, schema=SCHEMA) for r in a.func(a)]
    recs = json.loads(json.dumps(_jsonable(recs)))
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(recs))
        tmp.replace(path)
    return recs


def _emit(rec: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps(rec, sort_keys=True) + "\n")
        return
    line = f"[{rec['status']}] {rec['name']} ({rec['seconds']}s)"
    if rec.get("residual") is not None:
        line += f"\n    residual: {json.dumps(rec['residual'])[:2000]}"
    data = rec.get("data")
    if isinstance(data, dict) and "diagram" in data:
        line += "\n" + "\n".join("    " + x for x in data["diagram"].splitlines())
    out.write(line + "\n")


def _glue_negative_values(argv: list) -> list:
    # argparse reads "-1/2" as an option; bind such values to their flag
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and re.match(r"^-\d", tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


_GLOBAL_FLAGS = {"--no-cache": 0, "--format": 1, "--cache-dir": 1}


def _hoist_global_flags(argv: list) -> list:
    # let global flags appear after the subcommand as well
    front, rest, i = [], [], 0
    while i < len(argv):
        tok = argv[i]
        name = tok.split("=", 1)[0]
        if name in _GLOBAL_FLAGS:
            take = 1 if "=" in tok else 1 + _GLOBAL_FLAGS[name]
            front.extend(argv[i:i + take])
            i += take
        else:
            rest.append(tok)
            i += 1
    return front + rest


def main(argv=None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    a = parser.parse_args(_glue_negative_values(_hoist_global_flags(argv)))
    try:
        recs = execute(a)
    except (UsageError, n4rep.N4Error, ValueError) as exc:
        _emit({"name": a.command, "status": "error", "residual": str(exc), "seconds": 0.0}, a.format, sys.stdout)
        return 2
    for r in recs:
        _emit(r, a.format, sys.stdout)
    return 0 if all(r["status"] == "pass" for r in recs) else 1


if __name__ == "__main__":
    sys.exit(main())
