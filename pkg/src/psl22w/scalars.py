"""Exact coefficients in Q(k)[s]/(s^2 - k).

A :class:`Scalar` is ``(p0 + s*p1) / den`` where ``p0``, ``p1`` and ``den`` are
univariate polynomials in the level ``k`` with rational coefficients.  The
denominator never contains ``s`` and is kept monic; the triple is reduced so
that the numerator and denominator share no common factor.

Polynomials are tuples of :class:`fractions.Fraction`, lowest degree first,
without trailing zeros (the zero polynomial is the empty tuple).
"""
from __future__ import annotations

import ast
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

Poly = tuple

ZERO_POLY: Poly = ()
ONE_POLY: Poly = (Fraction(1),)
_F0 = Fraction(0)
_F1 = Fraction(1)


class ScalarError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# univariate polynomial helpers


def _trim(c: list) -> Poly:
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


def padd(a: Poly, b: Poly) -> Poly:
    if not a:
        return b
    if not b:
        return a
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, x in enumerate(b):
        out[i] += x
    return _trim(out)


def pneg(a: Poly) -> Poly:
    return tuple(-x for x in a)


def psub(a: Poly, b: Poly) -> Poly:
    return padd(a, pneg(b))


def pscale(a: Poly, c: Fraction) -> Poly:
    if not c:
        return ZERO_POLY
    return tuple(x * c for x in a)


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ZERO_POLY
    if len(a) == 1:
        return pscale(b, a[0])
    if len(b) == 1:
        return pscale(a, b[0])
    out = [_F0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def pshift(a: Poly, n: int) -> Poly:
    """Multiply by k**n."""
    if not a or n == 0:
        return a
    return (_F0,) * n + a


def pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise ScalarError("zero denominator")
    if len(a) < len(b):
        return ZERO_POLY, a
    r = list(a)
    q = [_F0] * (len(a) - len(b) + 1)
    lead = b[-1]
    for i in range(len(a) - len(b), -1, -1):
        c = r[i + len(b) - 1] / lead
        q[i] = c
        if c:
            for j, y in enumerate(b):
                r[i + j] -= c * y
    return _trim(q), _trim(r[: len(b) - 1])


def pmonic(a: Poly) -> Poly:
    if not a or a[-1] == 1:
        return a
    inv = 1 / a[-1]
    return tuple(x * inv for x in a)


def _low_order(a: Poly) -> int:
    for i, x in enumerate(a):
        if x:
            return i
    return len(a)


def pgcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd."""
    while b:
        a, b = b, pdivmod(a, b)[1]
    return pmonic(a)


def peval(a: Poly, x: Fraction) -> Fraction:
    acc = _F0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def pderiv(a: Poly) -> Poly:
    return _trim([i * a[i] for i in range(1, len(a))])


def _is_monomial(a: Poly) -> bool:
    return bool(a) and a[-1] == 1 and all(not x for x in a[:-1])


# ---------------------------------------------------------------------------


def _coerce_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, str)):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {x!r}")


@dataclass(frozen=True)
class Surd:
    """The value ``rational + coeff*sqrt(radicand)``."""

    rational: Fraction
    coeff: Fraction
    radicand: Fraction

    def __str__(self) -> str:
        return f"{self.rational} + {self.coeff}*sqrt({self.radicand})"


def _rational_sqrt(x: Fraction) -> Fraction | None:
    if x < 0:
        return None
    from math import isqrt

    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


class Scalar:
    """Element of Q(k)[s]/(s^2-k) in reduced form."""

    __slots__ = ("p0", "p1", "den", "_hash")

    def __init__(self, p0: Poly = ZERO_POLY, p1: Poly = ZERO_POLY, den: Poly = ONE_POLY, *, _reduced: bool = False):
        if not _reduced:
            p0, p1, den = _normalize(p0, p1, den)
        self.p0 = p0
        self.p1 = p1
        self.den = den
        self._hash = None

    # construction -------------------------------------------------------
    @staticmethod
    def const(x) -> "Scalar":
        x = _coerce_fraction(x)
        return Scalar((x,) if x else ZERO_POLY, ZERO_POLY, ONE_POLY, _reduced=True)

    @staticmethod
    def kappa() -> "Scalar":
        return KAPPA

    @staticmethod
    def sigma() -> "Scalar":
        return SIGMA

    @staticmethod
    def coerce(x) -> "Scalar":
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return Scalar.const(x)
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot coerce {x!r} to Scalar")

    # predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.p0 and not self.p1

    def __bool__(self) -> bool:
        return bool(self.p0) or bool(self.p1)

    def is_rational(self) -> bool:
        return not self.p1 and len(self.p0) <= 1 and len(self.den) == 1

    def has_sigma(self) -> bool:
        return bool(self.p1)

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ScalarError(f"{self} is not a rational constant")
        return self.p0[0] if self.p0 else _F0

    def normalize(self) -> "Scalar":
        return Scalar(self.p0, self.p1, self.den)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar.const(other)
            else:
                return NotImplemented
        if not other:
            return self
        if not self:
            return other
        if self.den == other.den:
            p0 = padd(self.p0, other.p0)
            p1 = padd(self.p1, other.p1)
            if len(self.den) == 1:
                return Scalar(p0, p1, ONE_POLY, _reduced=True)
            return Scalar(p0, p1, self.den)
        if len(other.den) == 1:
            p0 = padd(self.p0, pmul(other.p0, self.den))
            p1 = padd(self.p1, pmul(other.p1, self.den))
            return Scalar(p0, p1, self.den)
        if len(self.den) == 1:
            return other + self
        p0 = padd(pmul(self.p0, other.den), pmul(other.p0, self.den))
        p1 = padd(pmul(self.p1, other.den), pmul(other.p1, self.den))
        return Scalar(p0, p1, pmul(self.den, other.den))

    __radd__ = __add__

    def __neg__(self):
        return Scalar(pneg(self.p0), pneg(self.p1), self.den, _reduced=True)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar.const(other)
            else:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                if not other:
                    return ZERO
                c = Fraction(other)
                return Scalar(pscale(self.p0, c), pscale(self.p1, c), self.den, _reduced=True)
            return NotImplemented
        if not self or not other:
            return ZERO
        a0, a1, b0, b1 = self.p0, self.p1, other.p0, other.p1
        p0 = pmul(a0, b0)
        if a1 and b1:
            p0 = padd(p0, pshift(pmul(a1, b1), 1))
        p1 = padd(pmul(a0, b1), pmul(a1, b0))
        if len(self.den) == 1 and len(other.den) == 1:
            return Scalar(p0, p1, ONE_POLY, _reduced=True)
        return Scalar(p0, p1, pmul(self.den, other.den))

    __rmul__ = __mul__

    def inverse(self) -> "Scalar":
        if not self:
            raise ScalarError("zero denominator")
        q0, q1, d = self.p0, self.p1, self.den
        # 1/(q0 + s q1) = (q0 - s q1) / (q0^2 - k q1^2)
        norm = psub(pmul(q0, q0), pshift(pmul(q1, q1), 1))
        return Scalar(pmul(d, q0), pmul(d, pneg(q1)), norm)

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                if not other:
                    raise ScalarError("zero denominator")
                return self * (1 / Fraction(other))
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = ONE
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.p0 == other.p0 and self.p1 == other.p1 and self.den == other.den
        if isinstance(other, (int, Fraction)):
            return self.is_rational() and self.to_fraction() == other
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.p0, self.p1, self.den))
        return self._hash

    # structure ----------------------------------------------------------
    def kappa_parity_split(self) -> tuple["Scalar", "Scalar"]:
        """Return (even, odd) parts under k -> -k (s is left alone)."""
        pos = self
        neg = self.substitute_negated_kappa()
        half = Fraction(1, 2)
        return (pos + neg) * half, (pos - neg) * half

    def substitute_negated_kappa(self) -> "Scalar":
        """k -> -k with s fixed (only meaningful when s does not occur)."""
        if self.p1:
            raise ScalarError("k -> -k is not defined on terms containing s")

        def flip(p):
            return tuple(c if i % 2 == 0 else -c for i, c in enumerate(p))

        return Scalar(flip(self.p0), ZERO_POLY, flip(self.den))

    def substitute_kappa(self, value: "Scalar") -> "Scalar":
        """Replace k by another scalar; s may only occur when value is k itself."""
        value = Scalar.coerce(value)
        if value == KAPPA:
            return self
        if self.p1:
            raise ScalarError("cannot substitute for k in a term containing s")

        def horner(p):
            out = ZERO
            for c in reversed(p):
                out = out * value + Scalar.const(c)
            return out

        return horner(self.p0) / horner(self.den)

    def to_sympy(self, kappa_symbol=None):
        """The same value as a sympy expression (s becomes sqrt(k))."""
        import sympy
        k = kappa_symbol if kappa_symbol is not None else sympy.Symbol("kappa")

        def poly(p):
            return sum((sympy.Rational(c.numerator, c.denominator) * k ** i for i, c in enumerate(p)),
                       sympy.Integer(0))

        return (poly(self.p0) + sympy.sqrt(k) * poly(self.p1)) / poly(self.den)

    def has_odd_kappa(self) -> bool:
        if self.p1:
            return True
        return any(c for c in self.p0[1::2]) or any(c for c in self.den[1::2])

    def specialize(self, kappa_value, sigma_branch: str = "+"):
        return specialize(self, kappa_value, sigma_branch)

    # rendering ----------------------------------------------------------
    def __str__(self) -> str:
        return render(self)

    def __repr__(self) -> str:
        return f"Scalar({render(self)!r})"


def _normalize(p0: Poly, p1: Poly, den: Poly) -> tuple[Poly, Poly, Poly]:
    if not den:
        raise ScalarError("zero denominator")
    if not p0 and not p1:
        return ZERO_POLY, ZERO_POLY, ONE_POLY
    if len(den) > 1:
        if _is_monomial(den):
            n = min(_low_order(p0) if p0 else 10**9, _low_order(p1) if p1 else 10**9, len(den) - 1)
            if n:
                p0 = p0[n:] if p0 else p0
                p1 = p1[n:] if p1 else p1
                den = den[n:]
        else:
            g = pgcd(den, p0) if p0 else pmonic(den)
            if len(g) > 1 and p1:
                g = pgcd(g, p1)
            if len(g) > 1:
                den = pdivmod(den, g)[0]
                p0 = pdivmod(p0, g)[0] if p0 else p0
                p1 = pdivmod(p1, g)[0] if p1 else p1
    lead = den[-1]
    if lead != 1:
        inv = 1 / lead
        p0 = pscale(p0, inv)
        p1 = pscale(p1, inv)
        den = pscale(den, inv)
    return p0, p1, den


ZERO = Scalar(ZERO_POLY, ZERO_POLY, ONE_POLY, _reduced=True)
ONE = Scalar(ONE_POLY, ZERO_POLY, ONE_POLY, _reduced=True)
KAPPA = Scalar((_F0, _F1), ZERO_POLY, ONE_POLY, _reduced=True)
SIGMA = Scalar(ZERO_POLY, ONE_POLY, ONE_POLY, _reduced=True)


def scalar_arith(lhs: Scalar, op: str, rhs: Scalar | None = None) -> Scalar:
    lhs = Scalar.coerce(lhs)
    if op == "neg":
        return -lhs
    rhs = Scalar.coerce(rhs)
    if op == "add":
        return lhs + rhs
    if op == "mul":
        return lhs * rhs
    if op == "div":
        return lhs / rhs
    raise ValueError(f"unknown operation {op!r}")


def specialize(x: Scalar, kappa_value, sigma_branch: str = "+") -> Union[Fraction, Surd]:
    """Evaluate at a rational level.  ``sigma_branch`` picks the sign of sqrt(k)."""
    x = Scalar.coerce(x)
    v = _coerce_fraction(kappa_value) if not isinstance(kappa_value, Scalar) else kappa_value.to_fraction()
    if v == 0:
        raise ScalarError("critical level")
    if sigma_branch not in ("+", "-"):
        raise ValueError("sigma_branch must be '+' or '-'")
    d = peval(x.den, v)
    if d == 0:
        raise ScalarError("pole at specialization")
    a = peval(x.p0, v) / d
    if not x.p1:
        return a
    b = peval(x.p1, v) / d
    if sigma_branch == "-":
        b = -b
    root = _rational_sqrt(v)
    if root is not None:
        return a + b * root
    return Surd(a, b, v)


# ---------------------------------------------------------------------------
# rendering and parsing

_SUPER = str.maketrans("0123456789", "⁰¹²³⁴⁵⁶⁷⁸⁹")


def _fmt_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _render_poly2(p0: Poly, p1: Poly) -> str:
    terms = []
    for i, c in enumerate(p0):
        if c:
            terms.append((i, 0, c))
    for i, c in enumerate(p1):
        if c:
            terms.append((i, 1, c))
    if not terms:
        return "0"
    # degree-lex, k before s
    terms.sort(key=lambda t: (-(t[0] + t[1]), -t[0]))
    out = []
    for n, (i, j, c) in enumerate(terms):
        mono = []
        if i:
            mono.append("κ" if i == 1 else f"κ^{i}")
        if j:
            mono.append("σ")
        mag = abs(c)
        body = "*".join(mono)
        if not body:
            piece = _fmt_coeff(mag)
        elif mag == 1:
            piece = body
        else:
            piece = f"{_fmt_coeff(mag)}*{body}"
        if n == 0:
            out.append(("-" if c < 0 else "") + piece)
        else:
            out.append((" - " if c < 0 else " + ") + piece)
    return "".join(out)


def render(x: Scalar) -> str:
    num = _render_poly2(x.p0, x.p1)
    if x.den == ONE_POLY:
        return num
    den = _render_poly2(x.den, ZERO_POLY)
    return f"({num})/({den})"


def parse_scalar(text: str) -> Scalar:
    """Parse expressions such as ``-1/2``, ``(2*k-1)/(4*k)`` or ``κ^2*σ``."""
    src = text.replace("κ", "k").replace("σ", "s").replace("^", "**")
    try:
        tree = ast.parse(src, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse scalar {text!r}") from exc
    return _eval_node(tree.body, text)


def _eval_node(node, text) -> Scalar:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return Scalar.const(node.value)
    if isinstance(node, ast.Name):
        if node.id in ("k", "kappa"):
            return KAPPA
        if node.id in ("s", "sigma"):
            return SIGMA
    if isinstance(node, ast.UnaryOp):
        v = _eval_node(node.operand, text)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
    if isinstance(node, ast.BinOp):
        lhs = _eval_node(node.left, text)
        if isinstance(node.op, ast.Pow):
            if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                raise ValueError(f"exponent must be an integer in {text!r}")
            return lhs ** node.right.value
        rhs = _eval_node(node.right, text)
        if isinstance(node.op, ast.Add):
            return lhs + rhs
        if isinstance(node.op, ast.Sub):
            return lhs - rhs
        if isinstance(node.op, ast.Mult):
            return lhs * rhs
        if isinstance(node.op, ast.Div):
            return lhs / rhs
    raise ValueError(f"cannot parse scalar {text!r}")


def S(x) -> Scalar:
    """Shorthand coercion used throughout the package."""
    return Scalar.coerce(x)
