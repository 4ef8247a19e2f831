"""Structure tables for the algebras used throughout the package.

Tables live in ``data/*.json``.  Each file lists generators (name, parity,
weight, grade), optional lattice families, and one bracket entry per
unordered pair.  A bracket entry maps λ-exponents to lists of terms
``[coefficient, word, extra_derivatives]`` where ``word`` is a list of
``[generator, derivative_order]`` pairs read as a right-nested normally
ordered product and coefficients are strings in the level symbol ``k``.
"""
from __future__ import annotations

import json
import threading
from fractions import Fraction
from functools import lru_cache
from importlib import resources

import jsonschema

from .scalars import KAPPA, ONE, ZERO, Scalar, ScalarError, S, parse_scalar
from .vertexcalc import (AlgebraTable, EngineError, Family, Generator, LambdaPoly, VState,
                         lambda_bracket, no, normal_order)

ALGEBRA_NAMES = ("psl22_affine", "ghosts", "wpr", "sf", "pi", "n4min")

TABLE_SCHEMA = {
    "type": "object",
    "required": ["name", "generators", "brackets"],
    "properties": {
        "name": {"type": "string"},
        "description": {"type": "string"},
        "central_charge": {"type": "string"},
        "conformal_vector": {"$ref": "#/$defs/state"},
        "requires_nonzero_level": {"type": "boolean"},
        "generators": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "parity", "weight"],
                "properties": {
                    "name": {"type": "string"},
                    "parity": {"enum": ["even", "odd"]},
                    "weight": {"type": "string"},
                    "grade": {"type": "integer"},
                    "primary": {"type": "boolean"},
                },
                "additionalProperties": False,
            },
        },
        "families": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "base", "weight_per_unit", "couplings"],
                "properties": {
                    "name": {"type": "string"},
                    "base": {"type": "string"},
                    "weight_per_unit": {"type": "string"},
                    "grade_per_unit": {"type": "integer"},
                    "couplings": {"type": "object", "additionalProperties": {"type": "string"}},
                },
                "additionalProperties": False,
            },
        },
        "brackets": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["pair", "lambda"],
                "properties": {
                    "pair": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2},
                    "lambda": {
                        "type": "object",
                        "patternProperties": {"^[0-9]+$": {"$ref": "#/$defs/state"}},
                        "additionalProperties": False,
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "$defs": {
        "state": {
            "type": "array",
            "items": {
                "type": "array",
                "minItems": 2,
                "maxItems": 3,
                "prefixItems": [
                    {"type": "string"},
                    {"type": "array", "items": {"type": "array", "prefixItems": [{"type": "string"}, {"type": "integer", "minimum": 0}], "minItems": 2, "maxItems": 2}},
                    {"type": "integer", "minimum": 0},
                ],
            },
        }
    },
}


# ---------------------------------------------------------------------------
# psl(2|2) as 4x4 supermatrices modulo the identity

PSL_NAMES = ["E1", "H1", "F1", "E2", "H2", "F2",
             "epp", "epm", "emp", "emm", "fpp", "fpm", "fmp", "fmm"]


def _unit(i, j, c=1):
    m = [[Fraction(0)] * 4 for _ in range(4)]
    m[i - 1][j - 1] = Fraction(c)
    return m


def _madd(a, b, c=1):
    return [[a[i][j] + c * b[i][j] for j in range(4)] for i in range(4)]


def _mmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4)] for i in range(4)]


def psl_matrices() -> dict:
    """Defining-representation matrices of the chosen basis (before projection)."""
    return {
        "E1": _unit(1, 2), "H1": _madd(_unit(1, 1), _unit(2, 2), -1), "F1": _unit(2, 1),
        "E2": _unit(3, 4), "H2": _madd(_unit(3, 3), _unit(4, 4), -1), "F2": _unit(4, 3),
        "epp": _unit(1, 4), "epm": _unit(1, 3, -1), "emp": _unit(2, 4), "emm": _unit(2, 3, -1),
        "fpp": _unit(3, 2, -1), "fpm": _unit(4, 2, -1), "fmp": _unit(3, 1), "fmm": _unit(4, 1),
    }


PSL_PARITY = {n: (0 if n[0] in "EHF" else 1) for n in PSL_NAMES}


def supercommutator(a, b, pa: int, pb: int):
    sign = -1 if (pa and pb) else 1
    return _madd(_mmul(a, b), _mmul(b, a), -sign)


def supertrace(m) -> Fraction:
    return m[0][0] + m[1][1] - m[2][2] - m[3][3]


def project_to_basis(m) -> dict:
    """Coordinates of a supertraceless matrix modulo the identity."""
    mats = psl_matrices()
    out = {}
    for name in PSL_NAMES:
        if name.startswith("H"):
            continue
        src = mats[name]
        for i in range(4):
            for j in range(4):
                if src[i][j]:
                    c = m[i][j] / src[i][j]
                    if c:
                        out[name] = c
    if supertrace(m) != 0:
        raise ValueError("matrix is not supertraceless")
    h1 = (m[0][0] - m[1][1]) / 2
    h2 = (m[2][2] - m[3][3]) / 2
    if h1:
        out["H1"] = h1
    if h2:
        out["H2"] = h2
    return out


def psl_structure_from_matrices() -> tuple[dict, dict]:
    """(brackets, form) computed directly from the supermatrix model."""
    mats = psl_matrices()
    br, form = {}, {}
    for x in PSL_NAMES:
        for y in PSL_NAMES:
            c = supercommutator(mats[x], mats[y], PSL_PARITY[x], PSL_PARITY[y])
            br[(x, y)] = project_to_basis(c)
            form[(x, y)] = supertrace(_mmul(mats[x], mats[y]))
    return br, form


def psl_table_json() -> dict:
    """Serializable table of the affine algebra built from the supermatrix model."""
    br, form = psl_structure_from_matrices()
    grade = {n: (1 if n.startswith("e") else -1 if n.startswith("f") else 0) for n in PSL_NAMES}
    gens = [{"name": n, "parity": "odd" if PSL_PARITY[n] else "even", "weight": "1", "grade": grade[n]}
            for n in PSL_NAMES]
    entries = []
    for i, x in enumerate(PSL_NAMES):
        for y in PSL_NAMES[i:]:
            lam = {}
            terms0 = [[str(c), [[z, 0]]] for z, c in sorted(br[(x, y)].items(), key=lambda t: PSL_NAMES.index(t[0]))]
            if terms0:
                lam["0"] = terms0
            if form[(x, y)]:
                f = form[(x, y)]
                lam["1"] = [["k" if f == 1 else "-k" if f == -1 else f"{f}*k", []]]
            if lam:
                entries.append({"pair": [x, y], "lambda": lam})
    return {
        "name": "psl22_affine",
        "description": "universal affine vertex superalgebra of psl(2|2) at level k; supertrace form",
        "central_charge": "-2",
        "requires_nonzero_level": True,
        "generators": gens,
        "brackets": entries,
    }


# ---------------------------------------------------------------------------
# loading


def _data_text(name: str) -> str:
    return resources.files("psl22w").joinpath("data", f"{name}.json").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def read_table_data(name: str) -> dict:
    if name not in ALGEBRA_NAMES:
        raise KeyError(f"unknown algebra {name!r}")
    data = json.loads(_data_text(name))
    jsonschema.validate(data, TABLE_SCHEMA)
    return data


def _coeff(text: str, level: Scalar) -> Scalar:
    return parse_scalar(text).substitute_kappa(level)


def _parity(p: str) -> int:
    return 1 if p == "odd" else 0


def _build_state(alg: AlgebraTable, terms: list, level: Scalar) -> VState:
    out = alg.zero()
    for term in terms:
        c = _coeff(term[0], level)
        extra = term[2] if len(term) > 2 else 0
        letters = [VState(alg, {((alg.index[n], d),): ONE}) for n, d in term[1]]
        st = no(*letters) if letters else alg.vacuum()
        out = out + st.d(extra) * c
    return out


def _is_canonical(alg: AlgebraTable, word) -> bool:
    for x, y in zip(word, word[1:]):
        kx, ky = alg.letter_key(x), alg.letter_key(y)
        if kx > ky or (kx == ky and alg.parity_letter(x)):
            return False
    return True


def table_from_data(data: dict, level: Scalar = KAPPA) -> AlgebraTable:
    level = S(level)
    if data.get("requires_nonzero_level") and not level:
        raise ScalarError("critical level")
    gens = [Generator(g["name"], _parity(g["parity"]), Fraction(g["weight"]), g.get("grade", 0),
                      None, g.get("primary", True)) for g in data["generators"]]
    fams = [Family(f["name"], f["base"], Fraction(f["weight_per_unit"]), f.get("grade_per_unit", 0),
                   {k: _coeff(v, level) for k, v in f["couplings"].items()})
            for f in data.get("families", [])]
    cc = _coeff(data["central_charge"], level) if "central_charge" in data else None
    alg = AlgebraTable(data["name"], gens, families=fams, central_charge=cc, level=level)
    seen = set()
    deferred = []
    for entry in data["brackets"]:
        x, y = entry["pair"]
        for nm in (x, y):
            if nm not in alg.index:
                raise EngineError(f"unknown bracket generator {nm}")
        if frozenset((x, y)) in seen:
            raise EngineError(f"duplicate bracket entry {x},{y}")
        seen.add(frozenset((x, y)))
        simple = True
        lp = {}
        for n, terms in entry["lambda"].items():
            st = {}
            for term in terms:
                word = tuple((alg.index[g], d) for g, d in term[1])
                extra = term[2] if len(term) > 2 else 0
                if extra or not _is_canonical(alg, word):
                    simple = False
                    break
                c = _coeff(term[0], level)
                st[word] = st.get(word, ZERO) + c
            if not simple:
                break
            lp[int(n)] = {w: c for w, c in st.items() if c}
        if simple:
            alg.set_bracket(x, y, lp)
        else:
            deferred.append(entry)
    for entry in deferred:
        x, y = entry["pair"]
        lp = {int(n): _build_state(alg, terms, level).terms for n, terms in entry["lambda"].items()}
        alg.set_bracket(x, y, lp)
    if "conformal_vector" in data:
        alg.conformal_vector = _build_state(alg, data["conformal_vector"], level)
    return alg


_TABLES: dict = {}
_TABLES_LOCK = threading.Lock()


def load_algebra(name: str, level=KAPPA) -> AlgebraTable:
    """Load (and memoize) a table at the given level."""
    level = S(level)
    key = (name, level)
    with _TABLES_LOCK:
        alg = _TABLES.get(key)
        if alg is None:
            alg = table_from_data(read_table_data(name), level)
            if name == "psl22_affine":
                alg.conformal_vector = sugawara_in(alg)
            _TABLES[key] = alg
    return alg


# ---------------------------------------------------------------------------
# derived tables


def tensor(name: str, *tables: AlgebraTable, weights: dict | None = None) -> AlgebraTable:
    """Tensor product; brackets between different factors vanish."""
    gens, fams = [], []
    weights = weights or {}
    for t in tables:
        for g in t.gens:
            if g.family is not None:
                continue
            gens.append(Generator(g.name, g.parity, Fraction(weights.get(g.name, g.weight)), g.grade, None, g.primary))
        fams.extend(t.families.values())
    out = AlgebraTable(name, gens, families=fams, level=tables[0].level)
    for t in tables:
        for (i, j), lp in t._base.items():
            gi, gj = t.gens[i], t.gens[j]
            if gi.family is not None or gj.family is not None or i > j:
                continue
            out.set_bracket(gi.name, gj.name, _transfer_lp(lp, t, out))
    return out


def _transfer_word(word, src: AlgebraTable, dst: AlgebraTable):
    out = []
    for gid, d in word:
        g = src.gens[gid]
        if g.family is not None:
            out.append(dst.family_letter(g.family[0], g.family[1]))
        else:
            out.append((dst.index[g.name], d))
    return tuple(out)


def _transfer_lp(lp: dict, src: AlgebraTable, dst: AlgebraTable) -> dict:
    return {n: {_transfer_word(w, src, dst): c for w, c in st.items()} for n, st in lp.items()}


def embed(x: VState, dst: AlgebraTable) -> VState:
    """View a state of a tensor factor inside a table containing it.

    Words are re-normal-ordered, since the destination may order letters
    differently (for instance after conformal weights are shifted)."""
    out = dst.zero()
    for w, c in x.terms.items():
        moved = _transfer_word(w, x.alg, dst)
        letters = [VState(dst, {(letter,): ONE}) for letter in moved]
        out = out + (no(*letters) if letters else dst.vacuum()) * c
    return out


def realize(x: VState, images: dict, dst: AlgebraTable) -> VState:
    """Substitute generator images (name -> VState over dst) into a state."""
    out = dst.zero()
    for w, c in x.terms.items():
        parts = []
        for gid, d in w:
            g = x.alg.gens[gid]
            if g.family is not None:
                parts.append(dst.lattice(g.family[0], g.family[1]))
            else:
                parts.append(images[g.name].d(d))
        st = no(*parts) if parts else dst.vacuum()
        out = out + st * c
    return out


# ---------------------------------------------------------------------------
# Sugawara and the swap automorphism

_SUGAWARA_TERMS = [
    ("1/2", "H1", "H1"), ("1", "E1", "F1"), ("1", "F1", "E1"),
    ("-1/2", "H2", "H2"), ("-1", "E2", "F2"), ("-1", "F2", "E2"),
    ("-1", "epp", "fmm"), ("1", "fmm", "epp"), ("1", "epm", "fmp"), ("-1", "fmp", "epm"),
    ("1", "emp", "fpm"), ("-1", "fpm", "emp"), ("-1", "emm", "fpp"), ("1", "fpp", "emm"),
]


def sugawara_in(alg: AlgebraTable) -> VState:
    kk = alg.level
    if not kk:
        raise ScalarError("critical level")
    out = alg.zero()
    for c, x, y in _SUGAWARA_TERMS:
        out = out + normal_order(alg.gen(x), alg.gen(y)) * parse_scalar(c)
    return out * (ONE / (2 * kk))


def sugawara(kk=KAPPA) -> VState:
    kk = S(kk)
    if not kk:
        raise ScalarError("critical level")
    return load_algebra("psl22_affine", kk).conformal_vector


OMEGA = {"E1": "E2", "H1": "H2", "F1": "F2", "epp": "fpp", "epm": "fmp", "emp": "fpm", "emm": "fmm"}
OMEGA.update({v: k for k, v in list(OMEGA.items())})


def apply_omega(x: VState) -> VState:
    """Swap automorphism; lands in the table at the negated level."""
    src = x.alg
    if src.name != "psl22_affine":
        raise EngineError("apply_omega acts on psl22_affine states")
    dst = load_algebra("psl22_affine", -src.level)
    images = {n: dst.gen(OMEGA[n]) for n in PSL_NAMES}
    return realize(x, images, dst)


def supertrace_form(x: str, y: str) -> Fraction:
    mats = psl_matrices()
    return supertrace(_mmul(mats[x], mats[y]))


def gram_determinant() -> Fraction:
    import sympy
    m = sympy.Matrix(len(PSL_NAMES), len(PSL_NAMES),
                     lambda i, j: sympy.Rational(str(supertrace_form(PSL_NAMES[i], PSL_NAMES[j]))))
    return Fraction(str(m.det()))


# ---------------------------------------------------------------------------
# conformal checks


def central_charge_of(L: VState) -> Scalar:
    """c from the λ^3 coefficient of [L λ L] (which equals c/12)."""
    lp = lambda_bracket(L, L)
    top = lp[3]
    if not top.terms:
        return ZERO
    if set(top.terms) != {()}:
        raise EngineError("λ^3 coefficient of [L λ L] is not central")
    return top.terms[()] * 12


def is_virasoro(L: VState) -> tuple[bool, Scalar]:
    lp = lambda_bracket(L, L)
    c = central_charge_of(L)
    expected = LambdaPoly(L.alg, {0: L.d(), 1: L * 2, 3: L.alg.vacuum() * (c / 12)})
    return (lp - expected).is_zero(), c


def primary_residual(L: VState, u: VState, weight) -> LambdaPoly:
    lp = lambda_bracket(L, u)
    expected = LambdaPoly(L.alg, {0: u.d(), 1: u * S(weight)})
    return lp - expected
