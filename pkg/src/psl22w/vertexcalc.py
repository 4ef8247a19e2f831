"""Lambda-bracket engine for freely generated vertex superalgebras.

States are linear combinations of *words*.  A word is a tuple of letters
``(generator_index, derivative_order)`` read as the right-nested normally
ordered product ``:a1 :a2 ( ... an):``.  Canonical words have their letters
sorted by (weight, table position, derivative order); an odd letter never
repeats.  Members of a lattice family ``e^{mc}`` always sit at the right end
of a word and never carry derivatives (``de^{mc} = m :c e^{mc}:``).

All brackets of composite states are reduced to generator brackets through
the non-commutative Wick formula and skew-symmetry; normal ordering uses
quasi-commutativity and quasi-associativity.  Results are memoized per table.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Optional

from .scalars import ONE, ZERO, Scalar, S


class EngineError(Exception):
    pass


# ---------------------------------------------------------------------------
# raw state helpers (dict word -> Scalar)


def _acc(target: dict, src: dict, c: Scalar = ONE) -> None:
    if c is ONE:
        for w, v in src.items():
            old = target.get(w)
            if old is None:
                target[w] = v
            else:
                s = old + v
                if s:
                    target[w] = s
                else:
                    del target[w]
    else:
        if not c:
            return
        for w, v in src.items():
            x = v * c
            old = target.get(w)
            if old is None:
                target[w] = x
            else:
                s = old + x
                if s:
                    target[w] = s
                else:
                    del target[w]


def _acc1(target: dict, w, c: Scalar) -> None:
    old = target.get(w)
    if old is None:
        if c:
            target[w] = c
    else:
        s = old + c
        if s:
            target[w] = s
        else:
            del target[w]


def _lp_acc(target: dict, n: int, st: dict, c: Scalar = ONE) -> None:
    if not st:
        return
    slot = target.get(n)
    if slot is None:
        slot = {}
        target[n] = slot
    _acc(slot, st, c)
    if not slot:
        del target[n]


def _scaled(st: dict, c: Scalar) -> dict:
    if not c:
        return {}
    return {w: v * c for w, v in st.items()}


_INV = {}


def _inv(n: int) -> Scalar:
    x = _INV.get(n)
    if x is None:
        x = Scalar.const(Fraction(1, n))
        _INV[n] = x
    return x


_INT = {}


def _int(n: int) -> Scalar:
    x = _INT.get(n)
    if x is None:
        x = Scalar.const(n)
        _INT[n] = x
    return x


def gbinom(x: Fraction, j: int) -> Fraction:
    """Generalised binomial coefficient (x choose j) for rational x."""
    out = Fraction(1)
    for i in range(j):
        out *= (x - i)
    return out / factorial(j)


# ---------------------------------------------------------------------------
# table data


@dataclass
class Generator:
    name: str
    parity: int
    weight: Fraction
    grade: int = 0
    family: Optional[tuple] = None  # (family name, m)
    primary: bool = True
    index: int = -1


@dataclass
class Family:
    """Lattice family e^{mc} attached to an isotropic Heisenberg vector."""

    name: str
    base: str  # generator carrying the translation rule
    weight_per_unit: Fraction
    grade_per_unit: int
    couplings: dict  # generator name -> Scalar, [g λ e^{m}] = coupling*m*e^{m}
    parity: int = 0


class AlgebraTable:
    """Generators, generator brackets, and the memoized engine for one algebra."""

    def __init__(self, name: str, generators: Iterable[Generator], brackets: dict | None = None,
                 families: Iterable[Family] = (), central_charge: Scalar | None = None,
                 level: Scalar | None = None):
        self.name = name
        self.gens: list[Generator] = []
        self.index: dict[str, int] = {}
        for g in generators:
            self._add_gen(g)
        self.families: dict[str, Family] = {f.name: f for f in families}
        self._family_members: dict[tuple, int] = {}
        self._base: dict[tuple, dict] = {}
        self.central_charge = central_charge
        self.level = level
        self.conformal_vector: Optional["VState"] = None
        self._lock = threading.RLock()
        self._clear_caches()
        if brackets:
            for (x, y), lp in brackets.items():
                self.set_bracket(x, y, lp)

    # -- construction ----------------------------------------------------
    def _add_gen(self, g: Generator) -> int:
        if g.name in self.index:
            raise EngineError(f"duplicate generator {g.name}")
        g = Generator(g.name, g.parity, Fraction(g.weight), g.grade, g.family, g.primary, len(self.gens))
        self.gens.append(g)
        self.index[g.name] = g.index
        return g.index

    def _clear_caches(self):
        self._c_letter = {}
        self._c_bracket = {}
        self._c_nop = {}
        self._c_nopw = {}
        self._c_deriv = {}
        self._key = {}

    def set_bracket(self, x: str, y: str, lp: dict) -> None:
        """Store [x λ y] given as {n: raw state}; the reverse order is derived."""
        i, j = self.index[x], self.index[y]
        lp = {n: dict(st) for n, st in lp.items() if st}
        self._base[(i, j)] = lp
        if (j, i) not in self._base or i == j:
            self._base[(j, i)] = self._skew_raw(lp, self.gens[i].parity * self.gens[j].parity)
        self._clear_caches()

    def family_letter(self, fam: str, m) -> Optional[tuple]:
        """Letter for e^{mc}; None for m = 0 (the vacuum)."""
        m = Fraction(m)
        if m == 0:
            return None
        key = (fam, m)
        gid = self._family_members.get(key)
        if gid is None:
            with self._lock:
                gid = self._family_members.get(key)
                if gid is None:
                    f = self.families[fam]
                    name = f"{fam}^{{{_fmt_m(m)}{f.base}}}"
                    gid = self._add_gen(Generator(name, f.parity, f.weight_per_unit * m,
                                                  int(f.grade_per_unit * m), (fam, m), True))
                    self._family_members[key] = gid
        return (gid, 0)

    # -- letter data -----------------------------------------------------
    def parity_letter(self, a) -> int:
        return self.gens[a[0]].parity

    def parity_word(self, w) -> int:
        p = 0
        for a in w:
            p ^= self.gens[a[0]].parity
        return p

    def weight_word(self, w) -> Fraction:
        return sum((self.gens[a[0]].weight + a[1] for a in w), Fraction(0))

    def grade_word(self, w) -> int:
        return sum(self.gens[a[0]].grade for a in w)

    def letter_key(self, a):
        k = self._key.get(a)
        if k is None:
            g = self.gens[a[0]]
            if g.family is not None:
                k = (1, g.family[1], 0, 0)
            else:
                k = (0, g.weight, g.index, a[1])
            self._key[a] = k
        return k

    def is_family(self, a) -> bool:
        return self.gens[a[0]].family is not None

    # -- generator brackets ---------------------------------------------
    def _base_bracket(self, i: int, j: int) -> dict:
        lp = self._base.get((i, j))
        if lp is not None:
            return lp
        gi, gj = self.gens[i], self.gens[j]
        if gi.family is None and gj.family is None:
            return {}
        if gi.family is not None and gj.family is not None:
            return {}
        if gj.family is not None:
            fam = self.families[gj.family[0]]
            cpl = fam.couplings.get(gi.name)
            if cpl is None or not cpl:
                return {}
            lp = {0: {((j, 0),): cpl * Scalar.const(gj.family[1])}}
        else:
            back = self._base_bracket(j, i)
            lp = self._skew_raw(back, gi.parity * gj.parity)
        self._base[(i, j)] = lp
        return lp

    def _skew_raw(self, lp: dict, pp: int) -> dict:
        """[b λ a] from [a λ b]: -(-1)^{p(a)p(b)} sum x_n (-λ-∂)^n."""
        out: dict = {}
        sgn = ONE if pp else -ONE
        for n, x in lp.items():
            for k in range(n + 1):
                c = sgn * _int(comb(n, k) * (-1) ** n)
                _lp_acc(out, n - k, self.deriv_state_k(x, k), c)
        return out

    def letter_bracket(self, a, b) -> dict:
        key = (a, b)
        r = self._c_letter.get(key)
        if r is not None:
            return r
        base = self._base_bracket(a[0], b[0])
        out: dict = {}
        if base:
            i, j = a[1], b[1]
            for n, x in base.items():
                # (λ+∂)^j
                for k in range(j + 1):
                    c = _int(comb(j, k))
                    if i % 2:
                        c = -c
                    _lp_acc(out, n + j - k + i, self.deriv_state_k(x, k), c)
        self._c_letter[key] = out
        return out

    # -- derivatives -----------------------------------------------------
    def deriv_letter(self, a) -> dict:
        g = self.gens[a[0]]
        if g.family is None:
            return {((a[0], a[1] + 1),): ONE}
        fam = self.families[g.family[0]]
        c = (self.index[fam.base], 0)
        return _scaled(self.nop(c, (a,)), Scalar.const(g.family[1]))

    def deriv_word(self, w) -> dict:
        r = self._c_deriv.get(w)
        if r is not None:
            return r
        if not w:
            out = {}
        elif len(w) == 1:
            out = self.deriv_letter(w[0])
        else:
            a, rest = w[0], w[1:]
            out = {}
            for x, c in self.deriv_letter(a).items():
                _acc(out, self.nop_words(x, rest), c)
            for x, c in self.deriv_word(rest).items():
                _acc(out, self.nop(a, x), c)
        self._c_deriv[w] = out
        return out

    def deriv_state(self, st: dict) -> dict:
        out: dict = {}
        for w, c in st.items():
            _acc(out, self.deriv_word(w), c)
        return out

    def deriv_state_k(self, st: dict, k: int) -> dict:
        for _ in range(k):
            st = self.deriv_state(st)
        return st

    # -- normal ordering -------------------------------------------------
    def _integral_minus(self, lp: dict) -> dict:
        """∫_{-∂}^0 [a λ b] dλ = sum (-1)^n ∂^{n+1} x_n / (n+1)."""
        out: dict = {}
        for n, x in lp.items():
            c = _inv(n + 1)
            if n % 2:
                c = -c
            _acc(out, self.deriv_state_k(x, n + 1), c)
        return out

    def nop(self, a, w) -> dict:
        """Canonical form of :a w: for a letter a and canonical word w."""
        key = (a, w)
        r = self._c_nop.get(key)
        if r is not None:
            return r
        out = self._nop(a, w)
        self._c_nop[key] = out
        return out

    def _nop(self, a, w) -> dict:
        if not w:
            return {(a,): ONE}
        b = w[0]
        if self.is_family(a):
            if self.is_family(b):
                ga, gb = self.gens[a[0]], self.gens[b[0]]
                if ga.family[0] != gb.family[0]:
                    raise EngineError("products of distinct lattice families are not supported")
                # family letters commute with everything left in w (w == (b,))
                m = ga.family[1] + gb.family[1]
                if len(w) != 1:
                    raise EngineError("lattice letter not at the end of a word")
                lt = self.family_letter(ga.family[0], m)
                return {(): ONE} if lt is None else {(lt,): ONE}
            return self._swap(a, b, w[1:])
        if self.is_family(b):
            return {(a,) + w: ONE}
        ka, kb = self.letter_key(a), self.letter_key(b)
        if ka < kb:
            return {(a,) + w: ONE}
        if ka == kb:
            if not self.parity_letter(a):
                return {(a,) + w: ONE}
            integ = self._integral_minus(self.letter_bracket(a, a))
            out: dict = {}
            half = _inv(2)
            for x, c in integ.items():
                _acc(out, self.nop_words(x, w[1:]), c * half)
            return out
        return self._swap(a, b, w[1:])

    def _swap(self, a, b, rest) -> dict:
        # :a:b R:: = p(a,b) :b:a R:: + :(∫_{-∂}^0 [a λ b] dλ) R:
        out: dict = {}
        sgn = -ONE if (self.parity_letter(a) and self.parity_letter(b)) else ONE
        for x, c in self.nop(a, rest).items():
            _acc(out, self.nop(b, x), c * sgn)
        for x, c in self._integral_minus(self.letter_bracket(a, b)).items():
            _acc(out, self.nop_words(x, rest), c)
        return out

    def nop_words(self, w1, w2) -> dict:
        """Canonical form of ::w1: w2: for canonical words."""
        if not w1:
            return {w2: ONE}
        if not w2:
            return {w1: ONE}
        if len(w1) == 1:
            return self.nop(w1[0], w2)
        key = (w1, w2)
        r = self._c_nopw.get(key)
        if r is not None:
            return r
        a, r1 = w1[0], w1[1:]
        out: dict = {}
        for x, c in self.nop_words(r1, w2).items():
            _acc(out, self.nop(a, x), c)
        # quasi-associativity corrections
        da = {(a,): ONE}
        br = self.bracket(r1, w2)
        if br:
            for n in range(max(br) + 1):
                da = self.deriv_state(da)
                y = br.get(n)
                if y:
                    _acc(out, self.nop_states(da, y), _inv(n + 1))
        br = self.bracket((a,), w2)
        if br:
            sgn = -ONE if (self.parity_letter(a) and self.parity_word(r1)) else ONE
            dr = {r1: ONE}
            for n in range(max(br) + 1):
                dr = self.deriv_state(dr)
                z = br.get(n)
                if z:
                    _acc(out, self.nop_states(dr, z), sgn * _inv(n + 1))
        self._c_nopw[key] = out
        return out

    def nop_states(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for w1, c1 in x.items():
            for w2, c2 in y.items():
                _acc(out, self.nop_words(w1, w2), c1 * c2)
        return out

    # -- brackets --------------------------------------------------------
    def bracket(self, w1, w2) -> dict:
        """[w1 λ w2] as {n: raw state} (plain λ^n coefficients)."""
        if not w1 or not w2:
            return {}
        key = (w1, w2)
        r = self._c_bracket.get(key)
        if r is not None:
            return r
        if len(w2) >= 2:
            out = self._wick(w1, w2)
        elif len(w1) >= 2:
            c = w2[0]
            pp = self.parity_word(w1) * self.parity_letter(c)
            out = self._skew_raw(self.bracket((c,), w1), pp)
        else:
            out = self.letter_bracket(w1[0], w2[0])
        self._c_bracket[key] = out
        return out

    def _wick(self, A, w2) -> dict:
        # [A λ :c R:] = :[A λ c] R: + p(A,c) :c [A λ R]: + ∫_0^λ [[A λ c] μ R] dμ
        c, rest = w2[0], w2[1:]
        out: dict = {}
        ac = self.bracket(A, (c,))
        for n, x in ac.items():
            _lp_acc(out, n, self.nop_states(x, {rest: ONE}))
        sgn = -ONE if (self.parity_word(A) and self.parity_letter(c)) else ONE
        for n, y in self.bracket(A, rest).items():
            st: dict = {}
            for w, v in y.items():
                _acc(st, self.nop(c, w), v)
            _lp_acc(out, n, st, sgn)
        for n, x in ac.items():
            for m, u in self.bracket_states(x, {rest: ONE}).items():
                _lp_acc(out, n + m + 1, u, _inv(m + 1))
        return out

    def bracket_states(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for w1, c1 in x.items():
            for w2, c2 in y.items():
                br = self.bracket(w1, w2)
                if br:
                    c = c1 * c2
                    for n, st in br.items():
                        _lp_acc(out, n, st, c)
        return out

    # -- public conveniences --------------------------------------------
    def gen(self, name: str) -> "VState":
        return VState(self, {((self.index[name], 0),): ONE})

    def lattice(self, fam: str, m) -> "VState":
        lt = self.family_letter(fam, m)
        return VState(self, {(): ONE} if lt is None else {(lt,): ONE})

    def vacuum(self) -> "VState":
        return VState(self, {(): ONE})

    def zero(self) -> "VState":
        return VState(self, {})

    def generator_names(self) -> list[str]:
        return [g.name for g in self.gens if g.family is None]

    def cache_sizes(self) -> dict:
        return {"bracket": len(self._c_bracket), "nop": len(self._c_nop), "nop_words": len(self._c_nopw)}

    def word_str(self, w) -> str:
        if not w:
            return "1"
        parts = []
        for gid, d in w:
            nm = self.gens[gid].name
            parts.append(nm if d == 0 else ("d" * d if d <= 3 else f"d^{d}") + nm)
        return parts[0] if len(parts) == 1 else ":" + " ".join(parts) + ":"


def _fmt_m(m: Fraction) -> str:
    if m == 1:
        return ""
    if m == -1:
        return "-"
    return str(m)


# ---------------------------------------------------------------------------
# value types


class VState:
    """Immutable linear combination of canonical words over one table."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: AlgebraTable, terms: dict):
        self.alg = alg
        self.terms = {w: c for w, c in terms.items() if c}

    def _check(self, other: "VState"):
        if other.alg is not self.alg:
            raise EngineError("states belong to different algebra tables")

    def __add__(self, other):
        if isinstance(other, (int, Fraction, Scalar)):
            other = self.alg.vacuum() * other
        self._check(other)
        out = dict(self.terms)
        _acc(out, other.terms)
        return VState(self.alg, out)

    __radd__ = __add__

    def __neg__(self):
        return VState(self.alg, {w: -c for w, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if isinstance(c, VState):
            return normal_order(self, c)
        c = S(c)
        return VState(self.alg, _scaled(self.terms, c))

    def __rmul__(self, c):
        c = S(c)
        return VState(self.alg, _scaled(self.terms, c))

    def __truediv__(self, c):
        return self * (ONE / S(c))

    def __eq__(self, other):
        if not isinstance(other, VState):
            if other == 0:
                return not self.terms
            return NotImplemented
        return self.alg is other.alg and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def d(self, k: int = 1) -> "VState":
        return VState(self.alg, self.alg.deriv_state_k(self.terms, k))

    def map_coefficients(self, f) -> "VState":
        return VState(self.alg, {w: f(c) for w, c in self.terms.items()})

    def coefficients(self):
        return list(self.terms.values())

    def weights(self) -> set:
        return {self.alg.weight_word(w) for w in self.terms}

    def weight(self) -> Fraction:
        ws = self.weights()
        if len(ws) != 1:
            raise EngineError("state is not homogeneous in conformal weight")
        return ws.pop()

    def parities(self) -> set:
        return {self.alg.parity_word(w) for w in self.terms}

    def parity(self) -> int:
        ps = self.parities()
        if len(ps) > 1:
            raise EngineError("state is not homogeneous in parity")
        return ps.pop() if ps else 0

    def grades(self) -> set:
        return {self.alg.grade_word(w) for w in self.terms}

    def __str__(self):
        if not self.terms:
            return "0"
        items = sorted(self.terms.items(), key=lambda t: _word_sort_key(self.alg, t[0]))
        return " + ".join(f"({c})*{self.alg.word_str(w)}" for w, c in items)

    __repr__ = __str__


def _word_sort_key(alg: AlgebraTable, w):
    return (len(w), [alg.letter_key(a) for a in w])


class LambdaPoly:
    """Polynomial in λ with state coefficients (plain λ^n coefficients)."""

    __slots__ = ("alg", "coeffs")

    def __init__(self, alg: AlgebraTable, coeffs: dict):
        self.alg = alg
        self.coeffs = {n: (st if isinstance(st, VState) else VState(alg, st)) for n, st in coeffs.items()}
        self.coeffs = {n: st for n, st in self.coeffs.items() if st}

    def __getitem__(self, n: int) -> VState:
        return self.coeffs.get(n, self.alg.zero())

    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def __eq__(self, other):
        if isinstance(other, LambdaPoly):
            return self.coeffs == other.coeffs
        if other == 0:
            return not self.coeffs
        return NotImplemented

    def __sub__(self, other: "LambdaPoly") -> "LambdaPoly":
        keys = set(self.coeffs) | set(other.coeffs)
        return LambdaPoly(self.alg, {n: self[n] - other[n] for n in keys})

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        keys = set(self.coeffs) | set(other.coeffs)
        return LambdaPoly(self.alg, {n: self[n] + other[n] for n in keys})

    def scale(self, c) -> "LambdaPoly":
        return LambdaPoly(self.alg, {n: st * c for n, st in self.coeffs.items()})

    def is_zero(self) -> bool:
        return not self.coeffs

    def map_coefficients(self, f) -> "LambdaPoly":
        return LambdaPoly(self.alg, {n: st.map_coefficients(f) for n, st in self.coeffs.items()})

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"λ^{n}*[{self.coeffs[n]}]" for n in sorted(self.coeffs))

    __repr__ = __str__


def lp_from_terms(alg: AlgebraTable, terms: dict) -> LambdaPoly:
    """Build a LambdaPoly from {n: VState}."""
    return LambdaPoly(alg, {n: v for n, v in terms.items()})


# ---------------------------------------------------------------------------
# operations


def lambda_bracket(a: VState, b: VState, alg: AlgebraTable | None = None) -> LambdaPoly:
    alg = alg or a.alg
    a._check(b)
    out: dict = {}
    for w1, c1 in a.terms.items():
        for w2, c2 in b.terms.items():
            br = alg.bracket(w1, w2)
            if br:
                c = c1 * c2
                for n, st in br.items():
                    _lp_acc(out, n, st, c)
    return LambdaPoly(alg, out)


def normal_order(a: VState, b: VState) -> VState:
    a._check(b)
    return VState(a.alg, a.alg.nop_states(a.terms, b.terms))


def no(*states: VState) -> VState:
    """Right-nested normal ordering :s1 :s2 ( ... sn)::."""
    out = states[-1]
    for s in reversed(states[:-1]):
        out = normal_order(s, out)
    return out


def nth_product(a: VState, n: int, b: VState) -> VState:
    if n < -1:
        raise EngineError("unsupported product depth")
    if n == -1:
        return normal_order(a, b)
    lp = lambda_bracket(a, b)
    return lp[n] * factorial(n)


def check_jacobi(a: VState, b: VState, c: VState) -> tuple[bool, dict]:
    """[a λ [b μ c]] - p(a,b)[b μ [a λ c]] - [[a λ b] λ+μ c]; returns (ok, residual)."""
    alg = a.alg
    res: dict = {}

    def put(i, j, st, coeff=ONE):
        if not st:
            return
        slot = res.setdefault((i, j), {})
        _acc(slot, st, coeff)
        if not slot:
            del res[(i, j)]

    for m, y in lambda_bracket(b, c).coeffs.items():
        for n, z in lambda_bracket(a, y).coeffs.items():
            put(n, m, z.terms)
    pa, pb = a.parity(), b.parity()
    sgn = ONE if (pa and pb) else -ONE
    for n, u in lambda_bracket(a, c).coeffs.items():
        for m, v in lambda_bracket(b, u).coeffs.items():
            put(n, m, v.terms, sgn)
    for j, x in lambda_bracket(a, b).coeffs.items():
        for k, w in lambda_bracket(x, c).coeffs.items():
            for r in range(k + 1):
                put(j + r, k - r, w.terms, -_int(comb(k, r)))
    residual = {key: VState(alg, st) for key, st in res.items() if st}
    return (not residual), residual


# ---------------------------------------------------------------------------
# modes


class ModeExpr:
    """Linear combination of generator modes u_n and the identity (key ('1', 0))."""

    __slots__ = ("terms",)

    IDENTITY = ("1", Fraction(0))

    def __init__(self, terms: dict | None = None):
        self.terms = {}
        for k, c in (terms or {}).items():
            c = S(c)
            if c:
                self.terms[(k[0], Fraction(k[1]))] = c

    @staticmethod
    def mode(name: str, n, c=1) -> "ModeExpr":
        return ModeExpr({(name, Fraction(n)): c})

    @staticmethod
    def identity(c=1) -> "ModeExpr":
        return ModeExpr({ModeExpr.IDENTITY: c})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return ModeExpr(out)

    def __neg__(self):
        return ModeExpr({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = S(c)
        return ModeExpr({k: v * c for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, ModeExpr) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def single(self) -> tuple:
        if len(self.terms) != 1:
            raise EngineError("mode bracket needs a single mode on each side")
        (k, c), = self.terms.items()
        return k, c

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c})*{k[0]}_{{{k[1]}}}" if k[0] != "1" else f"({c})*1"
                          for k, c in sorted(self.terms.items(), key=lambda t: (t[0][0], t[0][1])))

    __repr__ = __str__


def state_modes(st: VState, n: Fraction) -> ModeExpr:
    """Mode of index n of a linear state (generators, their derivatives, vacuum)."""
    alg = st.alg
    out = ModeExpr()
    for w, c in st.terms.items():
        if not w:
            if n == 0:
                out = out + ModeExpr.identity(c)
            continue
        if len(w) != 1:
            raise EngineError("mode expansion depth")
        gid, d = w[0]
        g = alg.gens[gid]
        # (∂u)_n = -(n + Δ_u) u_n where Δ_u is the weight of u itself
        coeff = Fraction(1)
        for j in range(d):
            coeff *= -(n + g.weight + j)
        out = out + ModeExpr.mode(g.name, n, c * Scalar.const(coeff))
    return out


def mode_bracket(x: ModeExpr, y: ModeExpr, alg: AlgebraTable) -> ModeExpr:
    """[x, y] for linear combinations of generator modes."""
    out = ModeExpr()
    for (na, m), ca in x.terms.items():
        if na == "1":
            continue
        for (nb, n), cb in y.terms.items():
            if nb == "1":
                continue
            a, b = alg.gen(na), alg.gen(nb)
            wa = alg.gens[alg.index[na]].weight
            lp = lambda_bracket(a, b)
            for j, st in lp.coeffs.items():
                prod = st * factorial(j)
                coeff = gbinom(m + wa - 1, j)
                if coeff:
                    out = out + state_modes(prod, m + n) * (ca * cb * Scalar.const(coeff))
    return out
