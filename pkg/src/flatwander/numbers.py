"""Exact scalars over Q and real quadratic fields Q(sqrt(D)).

A :class:`QuadraticNumber` stores (u + v*sqrt(D))/w with unbounded integers,
canonicalized so that equality is structural and sign/floor are decided by
integer arithmetic alone.  :class:`BiQuadratic` layers one further radicand on
top (values p + q*sqrt(E) with p, q quadratic); it is what planar predicates
on geodesic segments need, since a point of an irrational-slope line mixes the
slope radicand into one coordinate.
"""

from __future__ import annotations

import math
import re
from contextlib import contextmanager
from fractions import Fraction
from functools import total_ordering
from typing import Iterator, NamedTuple, Union

from .errors import MixedRadicals, ParseError

_FLOAT_JITTER = 0.0


def set_float_jitter(eps: float) -> None:
    """Perturb every exact-to-float conversion by a relative ``eps``.

    Test harness knob: exact verdicts must be immune to it.
    """
    global _FLOAT_JITTER
    _FLOAT_JITTER = float(eps)


@contextmanager
def float_jitter(eps: float) -> Iterator[None]:
    old = _FLOAT_JITTER
    set_float_jitter(eps)
    try:
        yield
    finally:
        set_float_jitter(old)


def _jittered(x: float) -> float:
    if _FLOAT_JITTER:
        return x * (1.0 + _FLOAT_JITTER)
    return x


def squarefree_split(n: int) -> tuple[int, int]:
    """Return (f, d) with n = f*f*d and d square-free."""
    if n < 0:
        raise ValueError("radicand must be non-negative")
    f, d, p = 1, n, 2
    while p * p <= d:
        while d % (p * p) == 0:
            d //= p * p
            f *= p
        p += 1 if p == 2 else 2
    return f, d


Scalar = Union["QuadraticNumber", int, Fraction]


@total_ordering
class QuadraticNumber:
    """(u + v*sqrt(d))/w with w > 0, gcd(u, v, w) = 1, d square-free.

    v == 0 forces d == 0, so rationals have a unique representation and
    structural equality is value equality.
    """

    __slots__ = ("u", "v", "w", "d")

    def __init__(self, u: int, v: int = 0, w: int = 1, d: int = 0):
        if w == 0:
            raise ZeroDivisionError("zero denominator")
        if d < 0:
            raise ValueError("negative radicand")
        if v != 0 and d > 1:
            f, d = squarefree_split(d)
            v *= f
        if d <= 1:
            # sqrt(0) = 0 and sqrt(1) = 1 fold into the rational part.
            u, v, d = (u + v, 0, 0) if d == 1 else (u, 0, 0)
        if v == 0:
            d = 0
        if w < 0:
            u, v, w = -u, -v, -w
        g = math.gcd(math.gcd(abs(u), abs(v)), w)
        if g > 1:
            u, v, w = u // g, v // g, w // g
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "d", d)

    def __setattr__(self, *_):
        raise AttributeError("QuadraticNumber is immutable")

    @classmethod
    def from_int(cls, n: int) -> QuadraticNumber:
        return cls(n)

    @classmethod
    def from_fraction(cls, q: Fraction) -> QuadraticNumber:
        return cls(q.numerator, 0, q.denominator)

    @classmethod
    def rational(cls, num: int, den: int = 1) -> QuadraticNumber:
        return cls(num, 0, den)

    @classmethod
    def sqrt_int(cls, n: int) -> QuadraticNumber:
        """Exact sqrt of a non-negative integer, radicand reduced."""
        return cls(0, 1, 1, n)

    @staticmethod
    def _coerce(x: Scalar) -> QuadraticNumber:
        if isinstance(x, QuadraticNumber):
            return x
        if isinstance(x, int):
            return QuadraticNumber(x)
        if isinstance(x, Fraction):
            return QuadraticNumber(x.numerator, 0, x.denominator)
        return NotImplemented  # type: ignore[return-value]

    @property
    def is_rational(self) -> bool:
        return self.v == 0

    @property
    def is_integer(self) -> bool:
        return self.v == 0 and self.w == 1

    @property
    def is_zero(self) -> bool:
        return self.u == 0 and self.v == 0

    def as_fraction(self) -> Fraction:
        if not self.is_rational:
            raise ValueError("not rational")
        return Fraction(self.u, self.w)

    def as_int(self) -> int:
        if not self.is_integer:
            raise ValueError("not an integer")
        return self.u

    def _common_d(self, other: QuadraticNumber) -> int:
        a = self.d if self.v != 0 else 0
        b = other.d if other.v != 0 else 0
        if a and b and a != b:
            raise MixedRadicals(f"sqrt({a}) and sqrt({b}) in one scalar")
        return a or b

    def __add__(self, other: Scalar) -> QuadraticNumber:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self._common_d(o)
        return QuadraticNumber(
            self.u * o.w + o.u * self.w,
            self.v * o.w + o.v * self.w,
            self.w * o.w,
            d,
        )

    __radd__ = __add__

    def __sub__(self, other: Scalar) -> QuadraticNumber:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Scalar) -> QuadraticNumber:
        return (-self) + other

    def __neg__(self) -> QuadraticNumber:
        return QuadraticNumber(-self.u, -self.v, self.w, self.d)

    def __mul__(self, other: Scalar) -> QuadraticNumber:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        d = self._common_d(o)
        return QuadraticNumber(
            self.u * o.u + self.v * o.v * d,
            self.u * o.v + self.v * o.u,
            self.w * o.w,
            d,
        )

    __rmul__ = __mul__

    def inverse(self) -> QuadraticNumber:
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        # 1 / ((u + v sqrt(d))/w) = w (u - v sqrt(d)) / (u^2 - v^2 d)
        norm = self.u * self.u - self.v * self.v * self.d
        return QuadraticNumber(self.w * self.u, -self.w * self.v, norm, self.d)

    def __truediv__(self, other: Scalar) -> QuadraticNumber:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: Scalar) -> QuadraticNumber:
        return self.inverse() * other

    def __pow__(self, n: int) -> QuadraticNumber:
        if n < 0:
            return self.inverse() ** (-n)
        out = QuadraticNumber(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __abs__(self) -> QuadraticNumber:
        return -self if self.sign() < 0 else self

    def sign(self) -> int:
        """Exact sign, by integer case analysis (never floats)."""
        u, v, d = self.u, self.v, self.d
        if v == 0:
            return (u > 0) - (u < 0)
        if u == 0:
            return (v > 0) - (v < 0)
        if u > 0 and v > 0:
            return 1
        if u < 0 and v < 0:
            return -1
        t = u * u - v * v * d
        s = (t > 0) - (t < 0)
        return s if u > 0 else -s

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, QuadraticNumber):
            return NotImplemented
        return (
            self.u == other.u
            and self.v == other.v
            and self.w == other.w
            and self.d == other.d
        )

    def __lt__(self, other: Scalar) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self.is_rational:
            return hash(Fraction(self.u, self.w))
        return hash((self.u, self.v, self.w, self.d))

    def floor(self) -> int:
        """Exact floor via integer square roots plus sign fix-up."""
        u, v, w, d = self.u, self.v, self.w, self.d
        if v == 0:
            return u // w
        t = v * v * d
        r = math.isqrt(t)
        if v > 0:
            num = u + r
        else:
            num = u - r - (0 if r * r == t else 1)
        n = num // w
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def mod1(self) -> QuadraticNumber:
        """x - floor(x), exactly in [0, 1)."""
        return self - self.floor()

    def to_float(self) -> float:
        x = float(Fraction(self.u, self.w))
        if self.v:
            x += float(Fraction(self.v, self.w)) * math.sqrt(self.d)
        return _jittered(x)

    def __float__(self) -> float:
        return self.to_float()

    def to_expr(self) -> str:
        """Render in the number-expression grammar; re-parses to an equal value."""
        u, v, w, d = self.u, self.v, self.w, self.d
        if v == 0:
            return str(u) if w == 1 else f"{u}/{w}"
        if v == 1:
            rad = f"sqrt({d})"
        elif v == -1:
            rad = f"-sqrt({d})"
        else:
            rad = f"{v}*sqrt({d})"
        if u == 0:
            core = rad
        else:
            core = f"{u}+{rad}" if not rad.startswith("-") else f"{u}{rad}"
        if w == 1:
            return core
        if u == 0 and v in (1, -1):
            return f"{rad}/{w}"
        return f"({core})/{w}"

    def __repr__(self) -> str:
        return f"QuadraticNumber({self.to_expr()!r})"

    def __str__(self) -> str:
        return self.to_expr()


ZERO = QuadraticNumber(0)
ONE = QuadraticNumber(1)
HALF = QuadraticNumber(1, 0, 2)


def qn(x: Scalar) -> QuadraticNumber:
    out = QuadraticNumber._coerce(x)
    if out is NotImplemented:
        raise TypeError(f"cannot coerce {x!r}")
    return out


class ComplexPair(NamedTuple):
    """A complex number as an exact (re, im) pair."""

    re: QuadraticNumber
    im: QuadraticNumber

    @classmethod
    def make(cls, re: Scalar, im: Scalar = 0) -> ComplexPair:
        return cls(qn(re), qn(im))

    def add(self, other: ComplexPair) -> ComplexPair:
        return ComplexPair(self.re + other.re, self.im + other.im)

    def sub(self, other: ComplexPair) -> ComplexPair:
        return ComplexPair(self.re - other.re, self.im - other.im)

    def mul(self, other: ComplexPair) -> ComplexPair:
        return ComplexPair(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def neg(self) -> ComplexPair:
        return ComplexPair(-self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im.is_zero

    @property
    def is_rational_pair(self) -> bool:
        return self.re.is_rational and self.im.is_rational

    def abs2(self) -> QuadraticNumber:
        return self.re * self.re + self.im * self.im

    def to_complex(self) -> complex:
        return complex(self.re.to_float(), self.im.to_float())

    def to_expr(self) -> str:
        re_s, im = self.re, self.im
        if im.is_zero:
            return re_s.to_expr()
        if im == ONE:
            im_part = "i"
        elif im == -ONE:
            im_part = "-i"
        else:
            e = im.to_expr()
            im_part = f"{e}i" if re.fullmatch(r"-?\d+(/\d+)?", e) else f"({e})i"
        if re_s.is_zero:
            return im_part
        sign = "" if im_part.startswith("-") else "+"
        return f"{re_s.to_expr()}{sign}{im_part}"


class BiQuadratic:
    """p + q*sqrt(e) with p, q in one quadratic field and e a second radicand.

    Closed under +, -, *, /; sign and floor are exact.  The constructor folds
    degenerate towers (q == 0, e in {0, 1}, or e equal to the inner radicand)
    back into a single QuadraticNumber.
    """

    __slots__ = ("p", "q", "e")

    def __init__(self, p: QuadraticNumber, q: QuadraticNumber = ZERO, e: int = 0):
        if e < 0:
            raise ValueError("negative radicand")
        if e > 1 and not q.is_zero:
            f, e = squarefree_split(e)
            if f > 1:
                q = q * f
        if e <= 1:
            if e == 1:
                p, q = p + q, ZERO
            elif not q.is_zero:
                q = ZERO
            e = 0
        elif q.is_zero:
            e = 0
        else:
            dp = p.d if p.v != 0 else 0
            dq = q.d if q.v != 0 else 0
            if dp and dq and dp != dq:
                raise MixedRadicals(f"inner radicands sqrt({dp}) vs sqrt({dq})")
            inner = dp or dq
            if inner in (0, e):
                # sqrt(e) lies in (or generates) the inner field: fold.
                p = p + q * QuadraticNumber(0, 1, 1, e)
                q, e = ZERO, 0
            elif e < inner:
                # canonical orientation: the smaller radicand goes inside
                pa, pb = Fraction(p.u, p.w), Fraction(p.v, p.w)
                qa, qb = Fraction(q.u, q.w), Fraction(q.v, q.w)
                root_e = QuadraticNumber(0, 1, 1, e)
                new_p = qn(pa) + qn(qa) * root_e
                new_q = qn(pb) + qn(qb) * root_e
                p, q, e = new_p, new_q, inner
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "e", e)

    def __setattr__(self, *_):
        raise AttributeError("BiQuadratic is immutable")

    @classmethod
    def lift(cls, x: Scalar) -> BiQuadratic:
        return cls(qn(x))

    def _common_e(self, other: BiQuadratic) -> int:
        a = self.e if not self.q.is_zero else 0
        b = other.e if not other.q.is_zero else 0
        if a and b and a != b:
            raise MixedRadicals(f"outer radicands sqrt({a}) vs sqrt({b})")
        if a or b:
            return a or b
        # both operands folded: two distinct single fields still form a tower
        da = self.p.d if self.p.v != 0 else 0
        db = other.p.d if other.p.v != 0 else 0
        if da and db and da != db:
            return max(da, db)
        return 0

    def _parts(self, e: int) -> tuple[QuadraticNumber, QuadraticNumber]:
        """Components relative to outer radicand ``e``; un-folds a value whose
        single quadratic field happens to be generated by sqrt(e)."""
        if not self.q.is_zero:
            return self.p, self.q
        if e and self.p.v != 0 and self.p.d == e:
            return (
                QuadraticNumber(self.p.u, 0, self.p.w),
                QuadraticNumber(self.p.v, 0, self.p.w),
            )
        return self.p, ZERO

    @staticmethod
    def _coerce(x: object) -> BiQuadratic:
        if isinstance(x, BiQuadratic):
            return x
        if isinstance(x, (QuadraticNumber, int, Fraction)):
            return BiQuadratic(qn(x))  # type: ignore[arg-type]
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> BiQuadratic:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        e = self._common_e(o)
        sp, sq = self._parts(e)
        op, oq = o._parts(e)
        return BiQuadratic(sp + op, sq + oq, e)

    __radd__ = __add__

    def __neg__(self) -> BiQuadratic:
        return BiQuadratic(-self.p, -self.q, self.e)

    def __sub__(self, other: object) -> BiQuadratic:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: object) -> BiQuadratic:
        return (-self) + other

    def __mul__(self, other: object) -> BiQuadratic:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        e = self._common_e(o)
        sp, sq = self._parts(e)
        op, oq = o._parts(e)
        return BiQuadratic(
            sp * op + sq * oq * e,
            sp * oq + sq * op,
            e,
        )

    __rmul__ = __mul__

    def inverse(self) -> BiQuadratic:
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        if self.q.is_zero:
            return BiQuadratic(self.p.inverse())
        norm = self.p * self.p - self.q * self.q * self.e
        inv = norm.inverse()
        return BiQuadratic(self.p * inv, -(self.q * inv), self.e)

    def __truediv__(self, other: object) -> BiQuadratic:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def sign(self) -> int:
        sp = self.p.sign()
        if self.q.is_zero:
            return sp
        sq = self.q.sign()
        if sp == 0:
            return sq
        if sp == sq:
            return sp
        t = (self.p * self.p - self.q * self.q * self.e).sign()
        if t == 0:
            return 0
        return sp if t > 0 else sq

    @property
    def is_zero(self) -> bool:
        return self.p.is_zero and self.q.is_zero

    def __eq__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        try:
            return (self - o).is_zero
        except MixedRadicals:
            return False

    def __hash__(self) -> int:
        if self.q.is_zero:
            return hash(self.p)
        return hash((self.p, self.q, self.e))

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other: object) -> bool:
        return self._coerce(other) < self

    def __ge__(self, other: object) -> bool:
        return self._coerce(other) <= self

    def floor(self) -> int:
        if self.q.is_zero:
            return self.p.floor()
        n = math.floor(self.to_float())
        while (self - n).sign() < 0:
            n -= 1
        while (self - (n + 1)).sign() >= 0:
            n += 1
        return n

    def to_float(self) -> float:
        x = self.p.to_float()
        if not self.q.is_zero:
            x += self.q.to_float() * math.sqrt(self.e)
        return x

    def __float__(self) -> float:
        return self.to_float()

    def __repr__(self) -> str:
        if self.q.is_zero:
            return f"BiQuadratic({self.p.to_expr()!r})"
        return f"BiQuadratic({self.p.to_expr()!r} + ({self.q.to_expr()})*sqrt({self.e}))"


# ---------------------------------------------------------------------------
# Number-expression grammar
#
#   expr    := term (('+'|'-') term)*
#   term    := factor (('*' factor) | ('/' posint))*
#   factor  := int | decimal | 'sqrt(' posint ')' | '(' expr ')'
#   complex := [expr] (('+'|'-') [term] 'i')* | expr
#
# Whitespace is insignificant.  Decimal literals parse to exact rationals.
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+\.\d+|\.\d+|\d+)|(sqrt)|([()+\-*/i]))")


def _tokenize(text: str) -> list[str]:
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip():
                raise ParseError(f"unexpected character at {text[pos:]!r}")
            break
        out.append(m.group(1) or m.group(2) or m.group(3))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def take(self) -> str:
        if self.i >= len(self.toks):
            raise ParseError("unexpected end of expression")
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, tok: str) -> None:
        got = self.take()
        if got != tok:
            raise ParseError(f"expected {tok!r}, got {got!r}")

    def _number(self, tok: str) -> QuadraticNumber:
        if "." in tok:
            whole, frac = tok.split(".")
            num = int((whole or "0") + frac)
            return QuadraticNumber(num, 0, 10 ** len(frac))
        return QuadraticNumber(int(tok))

    def factor(self) -> QuadraticNumber:
        tok = self.take()
        if tok == "sqrt":
            self.expect("(")
            arg = self.take()
            if not arg.isdigit():
                raise ParseError("sqrt() takes a positive integer")
            self.expect(")")
            return QuadraticNumber.sqrt_int(int(arg))
        if tok == "(":
            val = self.expr()
            self.expect(")")
            return val
        if tok and (tok[0].isdigit() or tok[0] == "."):
            return self._number(tok)
        raise ParseError(f"unexpected token {tok!r}")

    def term(self) -> QuadraticNumber:
        val = self.factor()
        while self.peek() in ("*", "/"):
            op = self.take()
            if op == "*":
                val = val * self.factor()
            else:
                den = self.take()
                if not den.isdigit() or int(den) == 0:
                    raise ParseError("division only by a positive integer")
                val = val / int(den)
        return val

    def expr(self) -> QuadraticNumber:
        sign = 1
        if self.peek() in ("+", "-"):
            sign = -1 if self.take() == "-" else 1
        val = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.take()
            t = self.term()
            val = val + t if op == "+" else val - t
        return val

    def complex_expr(self) -> ComplexPair:
        re_acc, im_acc = ZERO, ZERO
        first = True
        while True:
            tok = self.peek()
            if tok is None:
                break
            if tok in ("+", "-"):
                sign = -1 if self.take() == "-" else 1
            elif first:
                sign = 1
            else:
                raise ParseError(f"expected '+' or '-', got {tok!r}")
            first = False
            if self.peek() == "i":
                self.take()
                im_acc = im_acc + sign
                continue
            t = self.term() * sign
            if self.peek() == "i":
                self.take()
                im_acc = im_acc + t
            else:
                re_acc = re_acc + t
        return ComplexPair(re_acc, im_acc)

    def done(self) -> None:
        if self.i != len(self.toks):
            raise ParseError(f"trailing input near {self.toks[self.i]!r}")


def parse_number(text: str) -> QuadraticNumber:
    """Parse a real scalar in the number-expression grammar."""
    p = _Parser(text)
    if not p.toks:
        raise ParseError("empty expression")
    val = p.expr()
    p.done()
    return val


def parse_complex(text: str) -> ComplexPair:
    """Parse a complex scalar (``expr``, ``expr+expr i``, ``expr i`` or ``i``)."""
    p = _Parser(text)
    if not p.toks:
        raise ParseError("empty expression")
    val = p.complex_expr()
    p.done()
    return val
