"""Flat lines mod the lattice and the classification of their orbits.

An irrational-slope line is identified by its transverse pair (alpha, beta)
mod Z^2: the functional slope*x - y is constant on the line and decomposes
uniquely as alpha + beta*slope when the transverse field does not contain the
slope radicand.  Line equality and grid membership are then exact integer
decisions.  Rational directions close up into Jordan curves and carry a
one-dimensional invariant instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import FieldClash, IrrationalOffset, SlopeNotInvariant
from .lattice import CoordPair, TorusPoint, reduce_to_fundamental
from .numbers import QuadraticNumber, qn
from .torus_map import AffineTorusMap, apply_map


@dataclass(frozen=True)
class RationalDirection:
    """Primitive integer direction vector (m, k) in lattice coordinates."""

    m: int
    k: int

    def __post_init__(self):
        if self.m == 0 and self.k == 0:
            raise ValueError("zero direction")
        if math.gcd(abs(self.m), abs(self.k)) != 1:
            raise ValueError("direction vector must be primitive")


@dataclass(frozen=True)
class IrrationalSlope:
    s: QuadraticNumber

    def __post_init__(self):
        if self.s.is_rational:
            raise ValueError("slope is rational; use RationalDirection")


SlopeSpec = RationalDirection | IrrationalSlope


def slope_spec(value: QuadraticNumber | tuple[int, int]) -> SlopeSpec:
    """Build a slope spec, folding rational slope values into directions."""
    if isinstance(value, tuple):
        m, k = value
        g = math.gcd(abs(m), abs(k))
        return RationalDirection(m // g, k // g)
    if value.is_rational:
        f = value.as_fraction()
        return RationalDirection(f.denominator, f.numerator)
    return IrrationalSlope(value)


@dataclass(frozen=True)
class TorusLine:
    """A flat line mod Z^2.

    slope: direction data.  For an irrational slope the pair (alpha, beta),
    each reduced mod 1, is the full identity of the line; for a rational
    direction the anchor point plus the invariant k*x - m*y mod 1 is.
    """

    slope: SlopeSpec
    alpha: QuadraticNumber
    beta: QuadraticNumber
    anchor: TorusPoint | None = None

    @property
    def is_irrational(self) -> bool:
        return isinstance(self.slope, IrrationalSlope)

    def transverse(self) -> tuple[QuadraticNumber, QuadraticNumber]:
        return (self.alpha, self.beta)

    def direction(self) -> tuple[QuadraticNumber, QuadraticNumber]:
        if isinstance(self.slope, IrrationalSlope):
            return (qn(1), self.slope.s)
        return (qn(self.slope.m), qn(self.slope.k))

    def base_point(self) -> CoordPair:
        """A point on a lift: (beta, -alpha) mod 1 for irrational slope."""
        if isinstance(self.slope, IrrationalSlope):
            return (self.beta, (-self.alpha).mod1())
        assert self.anchor is not None
        return self.anchor.coords()

    def same_line(self, other: TorusLine) -> bool:
        if self.slope != other.slope:
            return False
        if self.is_irrational:
            return self.alpha == other.alpha and self.beta == other.beta
        return self.alpha == other.alpha  # rational case: stored invariant

    def key(self):
        if self.is_irrational:
            s = self.slope.s
            return ("irr", s.u, s.v, s.w, s.d, hash(self.alpha), hash(self.beta))
        return ("rat", self.slope.m, self.slope.k, hash(self.alpha))


def _transverse_field_ok(value: QuadraticNumber, slope: IrrationalSlope) -> None:
    if value.v != 0 and value.d == slope.s.d:
        raise FieldClash(
            f"transverse data in Q(sqrt({value.d})) collides with the slope radicand"
        )


def line_from_point(slope: SlopeSpec, base: CoordPair) -> TorusLine:
    """Line through ``base`` with the given slope.

    Irrational slope: transverse pair (alpha, beta) = (-P2 mod 1, P1 mod 1);
    the base coordinates must avoid the slope radicand.  Rational direction:
    stores the reduced anchor and the invariant k*x - m*y mod 1.
    """
    p1, p2 = base
    if isinstance(slope, IrrationalSlope):
        _transverse_field_ok(p1, slope)
        _transverse_field_ok(p2, slope)
        return TorusLine(slope, (-p2).mod1(), p1.mod1())
    inv = (p1 * slope.k - p2 * slope.m).mod1()
    return TorusLine(slope, inv, qn(0), anchor=reduce_to_fundamental(base))


def line_image(tm: AffineTorusMap, line: TorusLine) -> TorusLine:
    """Image of a line under the covering.

    Integer multiplier: slope is preserved and the transverse pair maps by
    (alpha, beta) -> (a*alpha - b_y, a*beta + b_x) mod 1.  A rational direction
    transforms by the integer matrix under any covering.
    """
    if isinstance(line.slope, RationalDirection):
        p, q, r, s = tm.m
        m, k = line.slope.m, line.slope.k
        new_dir = (p * m + r * k, q * m + s * k)
        assert line.anchor is not None
        new_anchor = apply_map(tm, line.anchor)
        return line_from_point(slope_spec(new_dir), new_anchor.coords())
    if not tm.has_integer_multiplier:
        raise SlopeNotInvariant(
            "irrational slope is not preserved by a non-real multiplier"
        )
    a = tm.multiplier_int()
    alpha = (line.alpha * a - tm.b.y).mod1()
    beta = (line.beta * a + tm.b.x).mod1()
    return TorusLine(line.slope, alpha, beta)


@dataclass(frozen=True)
class JordanCurve:
    direction: RationalDirection


@dataclass(frozen=True)
class EventuallyPeriodic:
    preperiod: int
    period: int
    cycle: tuple[tuple[QuadraticNumber, QuadraticNumber], ...]
    states: tuple[tuple[QuadraticNumber, QuadraticNumber], ...]


@dataclass(frozen=True)
class WanderingLine:
    witness: str  # "alpha" or "beta"


LineOrbitClass = JordanCurve | EventuallyPeriodic | WanderingLine


def _require_rational_b(tm: AffineTorusMap) -> None:
    if not (tm.b.x.is_rational and tm.b.y.is_rational):
        raise IrrationalOffset("classification requires a rational translation part")


def classify_line(tm: AffineTorusMap, line: TorusLine) -> LineOrbitClass:
    """Trichotomy for the orbit of a line under an integer-multiplier covering.

    Rational direction -> Jordan curve.  Irrational slope with rational
    transverse pair -> eventually periodic, by exhaustive cycle detection on
    the exact finite orbit (denominators never grow under x -> a*x + c with
    integer a, rational c).  Irrational transverse component -> wandering: a
    periodic state of that affine map is rational, and a*irr + rational stays
    irrational, so the state can never repeat.
    """
    if isinstance(line.slope, RationalDirection):
        return JordanCurve(line.slope)
    if not tm.has_integer_multiplier:
        raise SlopeNotInvariant(
            "irrational slope is not preserved by a non-real multiplier"
        )
    _require_rational_b(tm)
    if not line.alpha.is_rational:
        return WanderingLine("alpha")
    if not line.beta.is_rational:
        return WanderingLine("beta")
    # exact cycle detection on rational transverse states
    lcm = 1
    for f in (
        line.alpha.as_fraction(),
        line.beta.as_fraction(),
        tm.b.x.as_fraction(),
        tm.b.y.as_fraction(),
    ):
        lcm = lcm * f.denominator // math.gcd(lcm, f.denominator)
    cap = lcm * lcm + 1
    seen: dict[tuple, int] = {}
    states: list[tuple[QuadraticNumber, QuadraticNumber]] = []
    cur = line
    for step in range(cap + 1):
        state = (cur.alpha, cur.beta)
        if state in seen:
            n0 = seen[state]
            period = step - n0
            return EventuallyPeriodic(
                preperiod=n0,
                period=period,
                cycle=tuple(states[n0:step]),
                states=tuple(states),
            )
        seen[state] = step
        states.append(state)
        cur = line_image(tm, cur)
    raise AssertionError("finite rational orbit exceeded its sanity cap")


def passes_through_q(
    line: TorusLine, q_points: tuple[TorusPoint, ...]
) -> TorusPoint | None:
    """First grid point lying on the line, if any.

    (q1, q2) is on an irrational-slope line iff beta = q1 and alpha = -q2
    mod 1; an irrational transverse pair can never match the rational grid.
    """
    if not line.is_irrational:
        raise ValueError("grid membership is defined for irrational-slope lines")
    for qp in q_points:
        if line.beta == qp.x and line.alpha == (-qp.y).mod1():
            return qp
    return None
