"""Zhu algebra of the principal W-algebra and its highest-weight theory.

Two independent routes meet here:

* the engine route computes Zhu products of states of the W-algebra and
  reduces them to ordered monomials in the generator images;
* the presented route rewrites noncommutative words with rules oriented
  towards the barred-left PBW order.

The Verma modules are induced through the presented route and compared with
the closed-form action matrices.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import sympy

from .scalars import KAPPA, ONE, ZERO, S, Scalar, render
from .superalgebras import load_algebra
from .vertexcalc import VState, nth_product


class ZhuError(Exception):
    pass


# names of the Zhu generators; "L" is the image of the conformal vector
ZHU_GENERATORS = ("chibar", "psibar", "S", "H", "L", "psi", "chi")
PBW_RANK = {name: i for i, name in enumerate(ZHU_GENERATORS)}
ZHU_ODD = {"chi": 1, "chibar": 1, "psi": 1, "psibar": 1, "H": 0, "S": 0, "L": 0}
ZHU_GRADE = {"chi": 1, "psi": 1, "chibar": -1, "psibar": -1, "H": 0, "S": 0, "L": 0}


# ---------------------------------------------------------------------------
# noncommutative polynomials


class ZhuElement:
    """Linear combination of words (tuples of generator names); () is the unit."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {w: S(c) for w, c in (terms or {}).items() if S(c)}

    @staticmethod
    def word(*names, coeff=ONE) -> "ZhuElement":
        return ZhuElement({tuple(names): coeff})

    @staticmethod
    def unit(coeff=ONE) -> "ZhuElement":
        return ZhuElement({(): coeff})

    def __add__(self, other: "ZhuElement") -> "ZhuElement":
        out = dict(self.terms)
        for w, c in other.terms.items():
            out[w] = out.get(w, ZERO) + c
        return ZhuElement(out)

    def __neg__(self):
        return ZhuElement({w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, ZhuElement):
            out = {}
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    out[w1 + w2] = out.get(w1 + w2, ZERO) + c1 * c2
            return ZhuElement(out)
        c = S(other)
        return ZhuElement({w: x * c for w, x in self.terms.items()})

    def __rmul__(self, other):
        c = S(other)
        return ZhuElement({w: c * x for w, x in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return isinstance(other, ZhuElement) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for w in sorted(self.terms, key=lambda w: (len(w), [PBW_RANK.get(x, -1) for x in w])):
            mono = " ".join(w) if w else "1"
            parts.append(f"({render(self.terms[w])})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__


def _g(*names) -> ZhuElement:
    return ZhuElement.word(*names)


def supercommutator(x: ZhuElement, y: ZhuElement, px: int, py: int) -> ZhuElement:
    sign = -1 if (px and py) else 1
    return x * y - (y * x) * sign


# ---------------------------------------------------------------------------
# the defining relations


def zhu_relations(kk=KAPPA) -> list:
    """(label, lhs, rhs) for each defining relation, as noncommutative polynomials."""
    k = S(kk)
    chi, chib, psi, psib, H, Sg, L = (_g(n) for n in ("chi", "chibar", "psi", "psibar", "H", "S", "L"))
    one = ZhuElement.unit()
    half = Fraction(1, 2)
    shift = H + L * (3 * k * k / 2) + one * ((k * k - Fraction(1, 4)) / 4)

    def br(a, b):
        return supercommutator(_g(a), _g(b), ZHU_ODD[a], ZHU_ODD[b])

    def sq(a):
        return _g(a) * _g(a)

    rels = [
        ("chi^2 = 0", sq("chi"), ZhuElement()),
        ("chibar^2 = 0", sq("chibar"), ZhuElement()),
        ("[chi, S] = 0", br("chi", "S"), ZhuElement()),
        ("[chibar, S] = 0", br("chibar", "S"), ZhuElement()),
        ("[chi, H] = psi", br("chi", "H"), psi),
        ("[chibar, H] = psibar", br("chibar", "H"), psib),
        ("{chi, chibar} = 0", br("chi", "chibar"), ZhuElement()),
        ("{chi, psi} = 0", br("chi", "psi"), ZhuElement()),
        ("{chibar, psibar} = 0", br("chibar", "psibar"), ZhuElement()),
        ("{chi, psibar} = S", br("chi", "psibar"), Sg),
        ("{chibar, psi} = -S", br("chibar", "psi"), -Sg),
        ("psi^2 = chi psi / 2", sq("psi"), chi * psi * half),
        ("psibar^2 = chibar psibar / 2", sq("psibar"), chib * psib * half),
        ("[psi, S] = chi S / 2", br("psi", "S"), chi * Sg * half),
        ("[psibar, S] = chibar S / 2", br("psibar", "S"), chib * Sg * half),
        ("{psi, psibar} = (chi psibar + chibar psi) / 2", br("psi", "psibar"), (chi * psib + chib * psi) * half),
        ("[S, H] = (chi psibar + psi chibar) / 2", br("S", "H"), (chi * psib + psi * chib) * half),
        ("[psi, H] = chi (H + 3k^2/2 L + (k^2 - 1/4)/4) - psi / 2", br("psi", "H"), chi * shift - psi * half),
        ("[psibar, H] = chibar (H + 3k^2/2 L + (k^2 - 1/4)/4) - psibar / 2", br("psibar", "H"),
         chib * shift - psib * half),
    ]
    return [(label, lhs, rhs, _pair_of(label)) for label, lhs, rhs in rels]


def _pair_of(label: str) -> tuple:
    head = label.split("=")[0].strip()
    if head.endswith("^2"):
        x = head[:-2]
        return (x, x)
    x, y = head.strip("[]{}").split(",")
    return (x.strip(), y.strip())


def centrality_relations() -> list:
    return [(f"[L, {n}] = 0", supercommutator(_g("L"), _g(n), 0, ZHU_ODD[n]), ZhuElement(), ("L", n))
            for n in ZHU_GENERATORS if n != "L"]


# ---------------------------------------------------------------------------
# presented algebra


@dataclass
class PresentedAlgebra:
    generators: tuple
    rules: dict          # out-of-order or forbidden pair -> replacement ZhuElement
    level: Scalar

    def reduce_word(self, w: tuple) -> ZhuElement:
        return _reduce_word(self, w)

    def normal_form(self, x: ZhuElement) -> ZhuElement:
        out = ZhuElement()
        for w, c in x.terms.items():
            out = out + self.reduce_word(w) * c
        return out

    def is_normal(self, w: tuple) -> bool:
        return all((w[i], w[i + 1]) not in self.rules for i in range(len(w) - 1))

    def overlaps(self) -> list:
        """Words xyz where both xy and yz are rule left-hand sides."""
        out = []
        for (x, y) in self.rules:
            for (y2, z) in self.rules:
                if y2 == y:
                    out.append((x, y, z))
        return out

    def check_confluence(self) -> list:
        """Critical pairs whose two reductions disagree (empty when confluent)."""
        bad = []
        for x, y, z in self.overlaps():
            left = self.normal_form(self.rules[(x, y)] * _g(z))
            right = self.normal_form(_g(x) * self.rules[(y, z)])
            if left != right:
                bad.append(((x, y, z), left - right))
        return bad

    def __hash__(self):
        return id(self)


_WORD_CACHE: dict = {}


def _reduce_word(alg: PresentedAlgebra, w: tuple) -> ZhuElement:
    key = (id(alg), w)
    hit = _WORD_CACHE.get(key)
    if hit is not None:
        return hit
    for i in range(len(w) - 1):
        rhs = alg.rules.get((w[i], w[i + 1]))
        if rhs is not None:
            out = ZhuElement()
            for w2, c in rhs.terms.items():
                out = out + _reduce_word(alg, w[:i] + w2 + w[i + 2:]) * c
            break
    else:
        out = ZhuElement({w: ONE})
    _WORD_CACHE[key] = out
    return out


def _rule_from_relation(lhs: ZhuElement, rhs: ZhuElement, pair: tuple) -> tuple:
    """Orient 'lhs = rhs' as a rule rewriting the out-of-order product of its pair."""
    x, y = pair
    lead = (x, y) if (PBW_RANK[x] > PBW_RANK[y] or x == y) else (y, x)
    diff = lhs - rhs
    c = diff.terms.get(lead)
    if not c:
        raise ZhuError(f"relation for {pair} does not contain {lead}")
    rest = ZhuElement({w: v for w, v in diff.terms.items() if w != lead})
    return lead, rest * (-ONE / c)


@lru_cache(maxsize=None)
def presented_zhu(kk=KAPPA) -> PresentedAlgebra:
    """Rewrite system from the defining relations plus centrality of L."""
    kk = S(kk)
    rules = {}
    for label, lhs, rhs, pair in zhu_relations(kk) + centrality_relations():
        if pair[0] == pair[1] and not ZHU_ODD[pair[0]]:
            continue
        lead, repl = _rule_from_relation(lhs, rhs, pair)
        if lead in rules:
            raise ZhuError(f"two relations with leading word {lead}")
        rules[lead] = repl
    alg = PresentedAlgebra(ZHU_GENERATORS, rules, kk)
    missing = [(x, y) for x in ZHU_GENERATORS for y in ZHU_GENERATORS
               if (PBW_RANK[x] > PBW_RANK[y] or (x == y and ZHU_ODD[x])) and (x, y) not in rules]
    if missing:
        raise ZhuError(f"no rule for out-of-order pairs {missing}")
    bad = alg.check_confluence()
    if bad:
        raise ZhuError(f"unresolved overlap {bad[0][0]}: {bad[0][1]}")
    return alg


def normal_form(x: ZhuElement, kk=KAPPA) -> ZhuElement:
    return presented_zhu(kk).normal_form(x)


# ---------------------------------------------------------------------------
# engine route: Zhu products of states and reduction to ordered monomials


class ZhuReduction:
    """Zhu product on the W-algebra and the map to ordered generator monomials.

    A class [v] is written in the basis of ordered monomials [g1]...[gr] of
    the free generators, ordered as the engine orders letters.  The map uses
    [:a R:] = [a]*[R] - sum_{j>=1} C(wt a, j) [a_(j-1) R] and [d A] = -wt(A) [A].
    """

    def __init__(self, kk=KAPPA):
        self.W = load_algebra("wpr", S(kk))
        self._phi = {}
        self._psi = {}

    def gen(self, name: str) -> VState:
        if name == "L":
            return self.W.conformal_vector
        if name == "1":
            return self.W.vacuum()
        return self.W.gen(name)

    def _rank(self, name: str):
        return self.W.letter_key((self.W.index[name], 0))

    def zhu_product(self, a: VState, b: VState) -> VState:
        ws = a.weights()
        if len(ws) > 1:
            raise ZhuError("inhomogeneous Zhu input")
        if not ws:
            return self.W.zero()
        wt = int(next(iter(ws)))
        out = self.W.zero()
        for j in range(wt + 1):
            out = out + nth_product(a, j - 1, b) * comb(wt, j)
        return out

    # phi: state -> {ordered monomial: Scalar}
    def image(self, st: VState) -> ZhuElement:
        out = {}
        for w, c in st.terms.items():
            for m, x in self._phi_word(w).items():
                out[m] = out.get(m, ZERO) + c * x
        return ZhuElement(out)

    def _phi_word(self, w) -> dict:
        hit = self._phi.get(w)
        if hit is not None:
            return hit
        if not w:
            res = {(): ONE}
        else:
            (gid, d), rest = w[0], w[1:]
            g = self.W.gens[gid]
            base = int(g.weight)
            f = ONE
            for i in range(d):
                f = f * S(-(base + i))
            res = {}
            for m, c in self._phi_word(rest).items():
                _acc(res, self._left_mult(g.name, m), c * f)
            letter = VState(self.W, {((gid, d),): ONE})
            rest_st = VState(self.W, {rest: ONE})
            wt = base + d
            for j in range(1, wt + 1):
                x = nth_product(letter, j - 1, rest_st)
                if x.terms:
                    _acc(res, self.image(x).terms, S(-comb(wt, j)))
        self._phi[w] = res
        return res

    def _left_mult(self, name: str, mono: tuple) -> dict:
        if not mono:
            return {(name,): ONE}
        r0, r1 = self._rank(name), self._rank(mono[0])
        if r0 < r1 or (r0 == r1 and not self.W.gens[self.W.index[name]].parity):
            return {(name,) + mono: ONE}
        return self.image(self.zhu_product(self.W.gen(name), self.lift(mono))).terms

    def lift(self, mono: tuple) -> VState:
        """A state whose class is the product of the listed generator images (left to right)."""
        hit = self._psi.get(mono)
        if hit is not None:
            return hit
        if not mono:
            res = self.W.vacuum()
        else:
            res = self.zhu_product(self.gen(mono[0]), self.lift(mono[1:]))
        self._psi[mono] = res
        return res

    def evaluate(self, x: ZhuElement) -> ZhuElement:
        """Class of a noncommutative polynomial, computed through the engine."""
        st = self.W.zero()
        for w, c in x.terms.items():
            st = st + self.lift(w) * c
        return self.image(st)


def _acc(out: dict, terms: dict, c) -> None:
    for m, x in terms.items():
        v = out.get(m, ZERO) + c * x
        if v:
            out[m] = v
        else:
            out.pop(m, None)


@lru_cache(maxsize=None)
def zhu_reduction(kk=KAPPA) -> ZhuReduction:
    return ZhuReduction(kk)


def zhu_product(a: VState, b: VState) -> VState:
    return zhu_reduction(a.alg.level if a.alg.level is not None else KAPPA).zhu_product(a, b)


def verify_relations_by_engine(kk=KAPPA) -> list:
    """Each defining relation, evaluated through Zhu products of W-states."""
    red = zhu_reduction(S(kk))
    recs = []
    extra = [("L = S + chibar chi / 2", _g("L"), _g("S") + _g("chibar", "chi") * Fraction(1, 2), None)]
    for label, lhs, rhs, _ in zhu_relations(kk) + centrality_relations() + extra:
        res = red.evaluate(lhs - rhs)
        recs.append({"name": f"engine: {label}", "status": "pass" if res.is_zero() else "fail",
                     "residual": None if res.is_zero() else str(res)})
    return recs


# ---------------------------------------------------------------------------
# Verma modules

VERMA_BASIS = ((), ("chibar",), ("psibar",), ("chibar", "psibar"))
_H, _D, _K = sympy.symbols("h Delta kappa")


@dataclass
class ZhuVerma:
    h: object
    delta: object
    level: object
    basis: tuple
    matrices: dict     # generator name -> sympy Matrix

    @property
    def dim(self) -> int:
        return len(self.basis)


def _sym(x):
    return sympy.sympify(x) if not isinstance(x, sympy.Basic) else x


def verma(h=_H, delta=_D, kk=KAPPA, kappa_symbol=_K) -> ZhuVerma:
    """Verma module induced through the rewrite system (not read off a display).

    On the generating vector v the unbarred odd generators act as zero, H by h,
    and S, L by delta."""
    alg = presented_zhu(KAPPA)
    h, delta = _sym(h), _sym(delta)
    kv = kappa_symbol if S(kk) == KAPPA else S(kk).to_sympy()
    index = {b: i for i, b in enumerate(VERMA_BASIS)}
    eig = {"H": h, "S": delta, "L": delta}
    mats = {}
    for g in ZHU_GENERATORS:
        m = sympy.zeros(4, 4)
        for j, b in enumerate(VERMA_BASIS):
            nf = alg.reduce_word((g,) + b)
            for w, c in nf.terms.items():
                coeff = c.to_sympy(kv)
                i = 0
                while i < len(w) and w[i] in ("chibar", "psibar"):
                    i += 1
                head, mid = w[:i], w[i:]
                if any(x in ("chi", "psi") for x in mid):
                    continue
                for x in mid:
                    coeff = coeff * eig[x]
                if head not in index:
                    raise ZhuError(f"word {w} escapes the Verma basis")
                m[index[head], j] += coeff
        mats[g] = m.applyfunc(sympy.expand)
    return ZhuVerma(h, delta, kv, VERMA_BASIS, mats)


def closed_form_verma_matrices(h=_H, delta=_D, kappa_value=_K) -> dict:
    """Action of S and H on the basis v, chibar v, psibar v, chibar psibar v in closed form."""
    h, d, k = _sym(h), _sym(delta), _sym(kappa_value)
    half = sympy.Rational(1, 2)
    Sm = sympy.zeros(4, 4)
    Sm[0, 0] = d
    Sm[1, 1] = d
    Sm[1, 2] = -half * d
    Sm[2, 2] = d
    Sm[3, 3] = d
    Hm = sympy.zeros(4, 4)
    Hm[0, 0] = h
    Hm[1, 1] = h
    Hm[2, 1] = -1
    Hm[1, 2] = -(h + 3 * k ** 2 / 2 * d + sympy.Rational(1, 4) * (k ** 2 - sympy.Rational(1, 4)))
    Hm[2, 2] = h + half
    Hm[3, 3] = h
    return {"S": Sm, "H": Hm}


def _eval_poly(x: ZhuElement, mats: dict, kv) -> sympy.Matrix:
    n = next(iter(mats.values())).shape[0]
    out = sympy.zeros(n, n)
    for w, c in x.terms.items():
        m = sympy.eye(n)
        for g in w:
            m = m * mats[g]
        out += c.to_sympy(kv) * m
    return out.applyfunc(sympy.expand)


def relation_residuals(mod: ZhuVerma) -> list:
    """Relations (and the L identification) evaluated on module matrices."""
    out = []
    extra = [("L = S + chibar chi / 2", _g("L"), _g("S") + _g("chibar", "chi") * Fraction(1, 2), None)]
    for label, lhs, rhs, _ in zhu_relations(KAPPA) + centrality_relations() + extra:
        r = _eval_poly(lhs - rhs, mod.matrices, mod.level)
        out.append((label, r))
    return out


def h_eigen_data(mod: ZhuVerma) -> dict:
    """Characteristic data of H on span{chibar v, psibar v}."""
    block = mod.matrices["H"][1:3, 1:3]
    x = sympy.Symbol("x")
    cp = sympy.expand(block.charpoly(x).as_expr())
    disc = sympy.expand(sympy.discriminant(cp, x))
    eigs = sympy.roots(sympy.Poly(cp, x))
    return {"charpoly": cp, "discriminant": disc, "eigenvalues": list(eigs), "block": block}


def nondiagonalisable_locus(mod: ZhuVerma) -> list:
    """Values of h (as expressions in delta, kappa) where H has a repeated eigenvalue on the block."""
    data = h_eigen_data(mod)
    return sympy.solve(sympy.Eq(data["discriminant"], 0), mod.h)


def cyclic_quotient_dim(mats: dict, dim: int) -> int:
    """Rank of the row space generated from e_0 by right multiplication: dim of the simple head."""
    rows = [sympy.Matrix([[1 if i == 0 else 0 for i in range(dim)]])]
    span = sympy.Matrix.vstack(*rows)
    frontier = list(rows)
    while frontier:
        new = []
        for r in frontier:
            for m in mats.values():
                cand = (r * m).applyfunc(sympy.expand)
                if all(x == 0 for x in cand):
                    continue
                test = sympy.Matrix.vstack(span, cand)
                if test.rank(simplify=True) > span.rank(simplify=True):
                    span = test
                    new.append(cand)
        frontier = new
    return span.rank(simplify=True)


def _diagonalisable(m: sympy.Matrix) -> bool:
    try:
        return m.is_diagonalizable()
    except (NotImplementedError, ValueError):  # pragma: no cover - symbolic corner
        return False


def classify(h, delta, kk=KAPPA) -> dict:
    """Irreducible quotient dimension of the Verma module, computed by closure."""
    mod = verma(h, delta, kk)
    dim = cyclic_quotient_dim(mod.matrices, mod.dim)
    block = mod.matrices["H"][1:3, 1:3]
    return {"verma_dim": mod.dim, "irreducible_dim": dim, "hw": True,
            "S_diagonalisable": _diagonalisable(mod.matrices["S"]),
            "H_diagonalisable_on_odd_block": _diagonalisable(block)}


def highest_weight_vector(mats: dict):
    """A common eigenvector of H and L killed by chi and psi, if the module has a weight vector."""
    kern = sympy.Matrix.vstack(mats["chi"], mats["psi"]).nullspace()
    if not kern:
        return None
    basis = sympy.Matrix.hstack(*kern)
    # restrict H and L to the joint kernel (it is invariant under both)
    pinv = (basis.T * basis).inv() * basis.T
    for name in ("L", "H"):
        restricted = (pinv * mats[name] * basis).applyfunc(sympy.simplify)
        vecs = restricted.eigenvects()
        if not vecs:
            return None
        _, _, vs = vecs[0]
        basis = basis * sympy.Matrix.hstack(*vs)
        pinv = (basis.T * basis).inv() * basis.T
    return basis[:, 0]
