"""Segments of flat lines: exact intersection, wandering certificates and the
collision finder.

The certificate logic lives in the canonical line parameterization: with bases
(beta, -alpha) the covering acts on the parameter as t -> a*t, so the return
map of a period-p line is t -> a^p * t with fixed point 0 and a certified
subinterval only has to avoid 0 and satisfy an expansion-disjointness ratio.
Everything verdict-bearing is an exact predicate; floats appear only in
bounding-box prefilters and reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BudgetExceeded,
    DegenerateSegment,
    IncompatibleField,
    MixedRadicals,
    SlopeNotInvariant,
    UncertainAtTolerance,
)
from .lattice import Lattice, TorusPoint
from .line_orbit import (
    EventuallyPeriodic,
    IrrationalSlope,
    JordanCurve,
    TorusLine,
    WanderingLine,
    classify_line,
    line_image,
)
from .numbers import BiQuadratic, QuadraticNumber, qn
from .torus_map import (
    AffineTorusMap,
    NonRealMultiplier,
    classify_multiplier,
    rotation_matrix,
)

Point = tuple[BiQuadratic, BiQuadratic]

_BOX_MARGIN = 1e-6
_TRANSLATE_CAP = 2_000_000
_FLOAT_BAND = 1e-9


def _orient(a: Point, b: Point, c: Point) -> int:
    return ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])).sign()


def _within(a: BiQuadratic, lo: BiQuadratic, hi: BiQuadratic) -> bool:
    return (a - lo).sign() >= 0 and (hi - a).sign() >= 0


def _on_collinear_segment(p0: Point, p1: Point, r: Point) -> bool:
    for i in (0, 1):
        lo, hi = (p0[i], p1[i]) if (p1[i] - p0[i]).sign() >= 0 else (p1[i], p0[i])
        if not _within(r[i], lo, hi):
            return False
    return True


def _cross(u: Point, v: Point) -> BiQuadratic:
    return u[0] * v[1] - u[1] * v[0]


def _sub(a: Point, b: Point) -> Point:
    return (a[0] - b[0], a[1] - b[1])


def segments_meet_exact(p0: Point, p1: Point, q0: Point, q1: Point) -> Point | None:
    """Exact closed-segment intersection; returns a witness point or None."""
    o1 = _orient(p0, p1, q0)
    o2 = _orient(p0, p1, q1)
    o3 = _orient(q0, q1, p0)
    o4 = _orient(q0, q1, p1)
    if o1 * o2 < 0 and o3 * o4 < 0:
        dp = _sub(p1, p0)
        dq = _sub(q1, q0)
        t = _cross(_sub(q0, p0), dq) / _cross(dp, dq)
        return (p0[0] + t * dp[0], p0[1] + t * dp[1])
    if o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0:
        # collinear: overlap iff the coordinate boxes overlap
        for cand in (q0, q1):
            if _on_collinear_segment(p0, p1, cand):
                return cand
        for cand in (p0, p1):
            if _on_collinear_segment(q0, q1, cand):
                return cand
        return None
    if o1 == 0 and _on_collinear_segment(p0, p1, q0):
        return q0
    if o2 == 0 and _on_collinear_segment(p0, p1, q1):
        return q1
    if o3 == 0 and _on_collinear_segment(q0, q1, p0):
        return p0
    if o4 == 0 and _on_collinear_segment(q0, q1, p1):
        return p1
    return None


def _orient_float(a, b, c, scale: float) -> int:
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    if abs(det) <= _FLOAT_BAND * max(1.0, scale):
        raise UncertainAtTolerance("orientation within float tolerance band")
    return 1 if det > 0 else -1


def segments_meet_float(fp0, fp1, fq0, fq1) -> tuple[float, float] | None:
    """Float fallback; raises UncertainAtTolerance near degeneracy."""
    scale = max(abs(v) for pt in (fp0, fp1, fq0, fq1) for v in pt) ** 2
    o1 = _orient_float(fp0, fp1, fq0, scale)
    o2 = _orient_float(fp0, fp1, fq1, scale)
    o3 = _orient_float(fq0, fq1, fp0, scale)
    o4 = _orient_float(fq0, fq1, fp1, scale)
    if o1 != o2 and o3 != o4:
        dpx, dpy = fp1[0] - fp0[0], fp1[1] - fp0[1]
        dqx, dqy = fq1[0] - fq0[0], fq1[1] - fq0[1]
        den = dpx * dqy - dpy * dqx
        t = ((fq0[0] - fp0[0]) * dqy - (fq0[1] - fp0[1]) * dqx) / den
        return (fp0[0] + t * dpx, fp0[1] + t * dpy)
    return None


@dataclass(frozen=True)
class LiftSegment:
    """A segment in the plane, endpoints exact; the unit of collision search."""

    p0: Point
    p1: Point

    def midpoint(self) -> Point:
        half = qn(Fraction(1, 2))
        return ((self.p0[0] + self.p1[0]) * half, (self.p0[1] + self.p1[1]) * half)

    def translate(self, n: int, m: int) -> LiftSegment:
        return LiftSegment(
            (self.p0[0] + n, self.p0[1] + m), (self.p1[0] + n, self.p1[1] + m)
        )

    def normalize(self) -> LiftSegment:
        """Translate so the midpoint lies in the fundamental cell [0,1)^2."""
        mx, my = self.midpoint()
        return self.translate(-mx.floor(), -my.floor())

    def affine_image(
        self, m: tuple[int, int, int, int], shift: tuple[QuadraticNumber, QuadraticNumber]
    ) -> LiftSegment:
        p, q, r, s = m
        bx, by = shift

        def f(pt: Point) -> Point:
            return (pt[0] * p + pt[1] * r + bx, pt[0] * q + pt[1] * s + by)

        return LiftSegment(f(self.p0), f(self.p1))

    def box(self) -> tuple[float, float, float, float]:
        xs = (self.p0[0].to_float(), self.p1[0].to_float())
        ys = (self.p0[1].to_float(), self.p1[1].to_float())
        return (min(xs), max(xs), min(ys), max(ys))

    def euclidean_length(self, lat: Lattice) -> float:
        w = lat.omega_complex()
        dx = self.p1[0].to_float() - self.p0[0].to_float()
        dy = self.p1[1].to_float() - self.p0[1].to_float()
        return abs(dx + dy * w)

    def float_endpoints(self):
        return (
            (self.p0[0].to_float(), self.p0[1].to_float()),
            (self.p1[0].to_float(), self.p1[1].to_float()),
        )


@dataclass(frozen=True)
class IntersectionResult:
    hit: bool
    witness: tuple[float, float] | None = None
    exact: bool = True
    translate: tuple[int, int] = (0, 0)

    def __bool__(self) -> bool:
        return self.hit


def lift_segments_intersect_torus(
    lat: Lattice, s1: LiftSegment, s2: LiftSegment
) -> IntersectionResult:
    """Do the projections of two lifted segments intersect on the torus?

    Enumerates the lattice translates of s2 whose bounding box meets s1's box
    (a conservative float prefilter), then decides each candidate with exact
    orientation predicates; falls back to float predicates with an uncertainty
    band only when the scalars span more than two radicands.
    """
    b1 = s1.box()
    b2 = s2.box()
    n_lo = math.floor(b1[0] - b2[1] - _BOX_MARGIN)
    n_hi = math.ceil(b1[1] - b2[0] + _BOX_MARGIN)
    m_lo = math.floor(b1[2] - b2[3] - _BOX_MARGIN)
    m_hi = math.ceil(b1[3] - b2[2] + _BOX_MARGIN)
    count = (n_hi - n_lo + 1) * (m_hi - m_lo + 1)
    if count > _TRANSLATE_CAP:
        raise BudgetExceeded(f"{count} lattice translates exceed the enumeration cap")
    f1 = s1.float_endpoints()
    f2 = s2.float_endpoints()
    unresolved = 0
    for n in range(n_lo, n_hi + 1):
        for m in range(m_lo, m_hi + 1):
            shifted = (
                (f2[0][0] + n, f2[0][1] + m),
                (f2[1][0] + n, f2[1][1] + m),
            )
            # float prefilter: a decisive clean miss needs no exact work; the
            # uncertainty band is four orders above double rounding error
            undecided = False
            try:
                if segments_meet_float(f1[0], f1[1], *shifted) is None:
                    continue
            except UncertainAtTolerance:
                undecided = True
            cand = s2.translate(n, m)
            try:
                w = segments_meet_exact(s1.p0, s1.p1, cand.p0, cand.p1)
                if w is not None:
                    return IntersectionResult(True, reduce_mod1_float(w), True, (n, m))
            except MixedRadicals:
                # no common tower for this pair; trust floats only when they
                # are decisive, else keep looking for a decisive hit elsewhere
                if undecided:
                    unresolved += 1
                    continue
                fw = segments_meet_float(f1[0], f1[1], *shifted)
                if fw is not None:
                    return IntersectionResult(
                        True, (fw[0] % 1.0, fw[1] % 1.0), False, (n, m)
                    )
    if unresolved:
        raise UncertainAtTolerance(
            f"{unresolved} translate(s) within the float band with no common tower"
        )
    return IntersectionResult(False)


def reduce_mod1_float(p: Point) -> tuple[float, float]:
    x = p[0].to_float() - p[0].floor()
    y = p[1].to_float() - p[1].floor()
    return (x, y)


# ---------------------------------------------------------------------------
# Torus segments
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusSegment:
    """Parameter interval [t_lo, t_hi] on a lift of a flat line.

    For an irrational slope the parameterization is the canonical one:
    point(t) = (beta, -alpha) + t*(1, slope) up to an integer translate chosen
    so the segment midpoint lies in the fundamental cell.  For a rational
    direction the anchor replaces the transverse base.
    """

    line: TorusLine
    t_lo: QuadraticNumber
    t_hi: QuadraticNumber
    lift: LiftSegment

    def direction_complex(self, lat: Lattice) -> complex:
        dx, dy = self.line.direction()
        return dx.to_float() + dy.to_float() * lat.omega_complex()

    def euclidean_length(self, lat: Lattice) -> float:
        return (self.t_hi - self.t_lo).to_float() * abs(self.direction_complex(lat))

    def interval(self) -> tuple[QuadraticNumber, QuadraticNumber]:
        return (self.t_lo, self.t_hi)


def _check_param_field(t: QuadraticNumber, line: TorusLine) -> None:
    if t.is_rational:
        return
    if isinstance(line.slope, IrrationalSlope) and t.d == line.slope.s.d:
        return
    raise IncompatibleField(
        "segment parameters must be rational or share the slope radicand"
    )


def segment_new(
    line: TorusLine, t_lo: QuadraticNumber, t_hi: QuadraticNumber
) -> TorusSegment:
    """Build a segment; the lift is midpoint-normalized into the fundamental
    cell."""
    if (t_hi - t_lo).sign() <= 0:
        raise DegenerateSegment("need t_lo < t_hi")
    _check_param_field(t_lo, line)
    _check_param_field(t_hi, line)
    bx, by = line.base_point()
    dx, dy = line.direction()
    p0 = (
        BiQuadratic._coerce(bx) + BiQuadratic._coerce(t_lo) * BiQuadratic._coerce(dx),
        BiQuadratic._coerce(by) + BiQuadratic._coerce(t_lo) * BiQuadratic._coerce(dy),
    )
    p1 = (
        BiQuadratic._coerce(bx) + BiQuadratic._coerce(t_hi) * BiQuadratic._coerce(dx),
        BiQuadratic._coerce(by) + BiQuadratic._coerce(t_hi) * BiQuadratic._coerce(dy),
    )
    lift = LiftSegment(p0, p1).normalize()
    return TorusSegment(line, t_lo, t_hi, lift)


def iterate_segment(tm: AffineTorusMap, seg: TorusSegment, n: int = 1) -> TorusSegment:
    """Image under the covering, staying in canonical parameters (t -> a*t)."""
    cur = seg
    for _ in range(n):
        new_line = line_image(tm, cur.line)
        a = tm.multiplier_int()
        lo, hi = cur.t_lo * a, cur.t_hi * a
        if a < 0:
            lo, hi = hi, lo
        cur = segment_new(new_line, lo, hi)
    return cur


def segments_intersect(
    lat: Lattice, s1: TorusSegment, s2: TorusSegment
) -> IntersectionResult:
    """Torus-level intersection of two segments, exact verdicts.

    Segments on the same irrational-slope line reduce to one-dimensional
    interval overlap in the shared canonical parameter; distinct parallel
    lines are disjoint injective geodesics and need no geometry.
    """
    if (
        s1.line.is_irrational
        and s2.line.is_irrational
        and s1.line.slope == s2.line.slope
    ):
        if not s1.line.same_line(s2.line):
            return IntersectionResult(False)
        lo = s1.t_lo if (s1.t_lo - s2.t_lo).sign() >= 0 else s2.t_lo
        hi = s1.t_hi if (s1.t_hi - s2.t_hi).sign() <= 0 else s2.t_hi
        if (hi - lo).sign() < 0:
            return IntersectionResult(False)
        mid = (lo + hi) / 2
        bx, by = s1.line.base_point()
        s = s1.line.slope.s
        w = (
            BiQuadratic._coerce(bx) + BiQuadratic._coerce(mid),
            BiQuadratic._coerce(by) + BiQuadratic._coerce(mid) * BiQuadratic._coerce(s),
        )
        return IntersectionResult(True, reduce_mod1_float(w), True)
    return lift_segments_intersect_torus(lat, s1.lift, s2.lift)


def verify_disjoint_iterates(
    tm: AffineTorusMap, seg: TorusSegment, k: int
) -> tuple[bool, tuple[int, int] | None]:
    """Brute-force oracle: are the first k iterates pairwise disjoint?"""
    segs = [seg]
    for _ in range(k):
        segs.append(iterate_segment(tm, segs[-1]))
    for i in range(len(segs)):
        for j in range(i + 1, len(segs)):
            if segments_intersect(tm.lattice, segs[i], segs[j]).hit:
                return False, (i, j)
    return True, None


# ---------------------------------------------------------------------------
# Wandering certificates (integer multiplier)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WanderingCertificate:
    mode: str  # "whole-segment" | "subsegment"
    level: str  # "torus" | "sphere"
    interval: tuple[QuadraticNumber, QuadraticNumber]
    preperiod: int
    period: int
    multiplier: int  # effective return multiplier; 0 in whole-segment mode
    offset: QuadraticNumber
    fixed_point: QuadraticNumber
    checked_iterates: int
    slack: QuadraticNumber | None
    line: TorusLine


@dataclass(frozen=True)
class NotWanderable:
    reason: str


def certify_interval(
    t_lo: QuadraticNumber,
    t_hi: QuadraticNumber,
    lam: int,
    both_sides: bool = False,
) -> tuple[QuadraticNumber, QuadraticNumber, QuadraticNumber] | None:
    """Largest-practical subinterval [u, v] of [t_lo, t_hi] with 0 outside and
    max(|u|,|v|) < ratio * min(|u|,|v|), where the effective one-sided ratio is
    lam for lam > 0, lam^2 for lam < 0, and |lam| when images on both sides of
    the fixed point must be avoided.

    The supremum is an open condition, so the inner endpoint backs off from it
    by a 1/1024 notch.  Returns (u, v, slack) with slack = ratio*min/max > 1.
    """
    if lam in (-1, 0, 1):
        raise ValueError("return multiplier must be expanding")
    if lam > 0:
        ratio = lam
    else:
        ratio = -lam if both_sides else lam * lam

    def one_side(lo: QuadraticNumber, hi: QuadraticNumber):
        # requires 0 <= lo < hi, returns candidate on the positive side
        if hi.sign() <= 0:
            return None
        lo = lo if lo.sign() > 0 else None
        if lo is not None and (hi - lo * ratio).sign() < 0:
            return (lo, hi)
        inner = hi / ratio
        notch = (hi - inner) * Fraction(1, 1024)
        u = inner + notch
        if lo is not None and (u - lo).sign() < 0:
            u = lo
        if (hi - u).sign() <= 0:
            return None
        return (u, hi)

    pos = one_side(t_lo if t_lo.sign() > 0 else qn(0), t_hi)
    neg_m = one_side(-t_hi if t_hi.sign() < 0 else qn(0), -t_lo)
    neg = (-neg_m[1], -neg_m[0]) if neg_m else None

    def length(c):
        return c[1] - c[0]

    best = None
    if pos and neg:
        best = pos if (length(pos) - length(neg)).sign() >= 0 else neg
    else:
        best = pos or neg
    if best is None:
        return None
    u, v = best
    lo_abs, hi_abs = abs(u), abs(v)
    if (hi_abs - lo_abs).sign() < 0:
        lo_abs, hi_abs = hi_abs, lo_abs
    slack = lo_abs * ratio / hi_abs
    assert (slack - 1).sign() > 0
    return (u, v, slack)


def _cross_check_cycle(
    tm: AffineTorusMap,
    line: TorusLine,
    u: QuadraticNumber,
    v: QuadraticNumber,
    k: int,
) -> None:
    """Exact pairwise disjointness of iterates 0..k of the certified segment:
    distinct transverse states are distinct parallel geodesics; same-state
    pairs reduce to 1-D interval disjointness in the shared parameter."""
    a = tm.multiplier_int()
    states = []
    cur_line, cur = line, (u, v)
    intervals = []
    for _ in range(k + 1):
        states.append(cur_line.transverse())
        intervals.append(cur)
        cur_line = line_image(tm, cur_line)
        lo, hi = cur[0] * a, cur[1] * a
        cur = (hi, lo) if a < 0 else (lo, hi)
    for i in range(k + 1):
        for j in range(i + 1, k + 1):
            if states[i] != states[j]:
                continue
            lo_i, hi_i = intervals[i]
            lo_j, hi_j = intervals[j]
            disjoint = (lo_j - hi_i).sign() > 0 or (lo_i - hi_j).sign() > 0
            assert disjoint, f"certified iterates {i}, {j} overlap"


def certify_wandering(
    tm: AffineTorusMap, seg: TorusSegment, check_iterates: int = 12
) -> WanderingCertificate | NotWanderable:
    """Constructive wandering decision for an integer-multiplier covering.

    Jordan curve -> not wanderable.  Wandering line -> whole segment (iterates
    live on pairwise-distinct parallel geodesics).  Eventually periodic line
    -> certified subsegment avoiding the return-map fixed point with the
    expansion-disjointness ratio; cross-checked by exact pairwise tests.
    """
    if not tm.has_integer_multiplier:
        raise SlopeNotInvariant("wandering certificates require an integer multiplier")
    verdict = classify_line(tm, seg.line)
    if isinstance(verdict, JordanCurve):
        return NotWanderable("closed-geodesic")
    a = tm.multiplier_int()
    if isinstance(verdict, WanderingLine):
        # transverse states never repeat; exact check over the budget
        seen = set()
        cur = seg.line
        for _ in range(check_iterates + 1):
            st = cur.transverse()
            assert st not in seen
            seen.add(st)
            cur = line_image(tm, cur)
        return WanderingCertificate(
            mode="whole-segment",
            level="torus",
            interval=(seg.t_lo, seg.t_hi),
            preperiod=0,
            period=0,
            multiplier=0,
            offset=qn(0),
            fixed_point=qn(0),
            checked_iterates=check_iterates,
            slack=None,
            line=seg.line,
        )
    assert isinstance(verdict, EventuallyPeriodic)
    lam = a ** verdict.period
    got = certify_interval(seg.t_lo, seg.t_hi, lam)
    if got is None:
        return NotWanderable("no-positive-length-subsegment")
    u, v, slack = got
    if lam < 0:
        # one period maps the certified side across the fixed point: opposite
        # signs make that single pair disjoint; check it explicitly
        assert u.sign() * (u * lam).sign() == -1
    _cross_check_cycle(tm, seg.line, u, v, check_iterates)
    return WanderingCertificate(
        mode="subsegment",
        level="torus",
        interval=(u, v),
        preperiod=verdict.preperiod,
        period=verdict.period,
        multiplier=lam,
        offset=qn(0),
        fixed_point=qn(0),
        checked_iterates=check_iterates,
        slack=slack,
        line=seg.line,
    )


# ---------------------------------------------------------------------------
# Collision bound and collision finder
# ---------------------------------------------------------------------------


def collision_bound(lat: Lattice, theta: float | None = None, nu: int | None = None) -> float:
    """Length bound forcing collisions: 2(1+|omega|)/|sin(theta)| for a
    non-real multiplier at angle theta; 2(1+|omega|)/sin(pi/3) for the group
    obstruction with nu in {3, 4, 6} (worst case over those angles)."""
    if (theta is None) == (nu is None):
        raise ValueError("provide exactly one of theta, nu")
    if nu is not None:
        if nu not in (3, 4, 6):
            raise ValueError("group order must be 3, 4 or 6")
        denom = math.sin(math.pi / 3)
    else:
        denom = abs(math.sin(theta))
        if denom < 1e-15:
            raise ValueError("theta must have a nonzero sine")
    return 2.0 * (1.0 + lat.abs_omega()) / denom


@dataclass(frozen=True)
class CollisionCertificate:
    n: int
    m: int
    k: int
    witness: tuple[float, float]
    exact: bool
    bound_used: float
    budget: int


@dataclass(frozen=True)
class NoCollisionWithinBudget:
    budget: int
    group_order: int


def default_collision_budget(
    tm: AffineTorusMap, seg: TorusSegment, nu: int | None = None
) -> int:
    """ceil(log_|a|(bound / length)) + 2 iterations suffice to force a
    collision (the +2 covers an exact-power edge)."""
    if nu is not None:
        bound = collision_bound(tm.lattice, nu=nu)
    else:
        mc = classify_multiplier(tm)
        if not isinstance(mc, NonRealMultiplier):
            raise ValueError(
                "no finite default budget for an integer multiplier; pass one explicitly"
            )
        bound = collision_bound(tm.lattice, theta=mc.theta)
    length = seg.euclidean_length(tm.lattice)
    if length <= 0:
        raise DegenerateSegment("zero-length segment")
    if length >= bound:
        return 2
    return math.ceil(math.log(bound / length) / math.log(tm.abs_multiplier())) + 2


def _rho_affine(
    lat: Lattice, nu: int, z0: TorusPoint, k: int
) -> tuple[tuple[int, int, int, int], tuple[QuadraticNumber, QuadraticNumber]]:
    """Lattice-coordinate form of the k-th rotation power about z0: an integer
    matrix plus a rational shift (I - R^k) z0."""
    p, q, r, s = rotation_matrix(lat, nu)
    rk = (1, 0, 0, 1)
    for _ in range(k):
        a1, b1, c1, d1 = rk  # (p, q, r, s) layout: [[p, r], [q, s]]
        rk = (p * a1 + r * b1, q * a1 + s * b1, p * c1 + r * d1, q * c1 + s * d1)
    pk, qk, rr, sk = rk
    sx = z0.x * (1 - pk) - z0.y * rr
    sy = z0.y * (1 - sk) - z0.x * qk
    return rk, (sx, sy)


def find_collision(
    tm: AffineTorusMap,
    seg: TorusSegment,
    group: tuple[int, TorusPoint] | None = None,
    budget: int | None = None,
) -> CollisionCertificate | NoCollisionWithinBudget:
    """Search indices n < m <= budget (and rotation powers k in group mode) for
    an intersection of iterate m with the k-rotated iterate n.

    The minimal-m certificate is returned (ties broken by n, then k), which
    keeps the returned m within the log-derived forcing bound.
    """
    lat = tm.lattice
    nu = 1
    rhos: list[tuple[tuple[int, int, int, int], tuple[QuadraticNumber, QuadraticNumber]]] = []
    if group is not None:
        nu, z0 = group
        if nu not in (3, 4, 6):
            raise ValueError("group order must be 3, 4 or 6")
        rhos = [_rho_affine(lat, nu, z0, k) for k in range(nu)]
    if budget is None:
        budget = default_collision_budget(tm, seg, nu=nu if group else None)
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if group is not None:
        bound = collision_bound(lat, nu=nu)
    else:
        mc = classify_multiplier(tm)
        bound = (
            collision_bound(lat, theta=mc.theta)
            if isinstance(mc, NonRealMultiplier)
            else float("inf")
        )

    if group is None and tm.has_integer_multiplier and seg.line.is_irrational:
        # integer multipliers preserve the slope: every pair of iterates lies
        # on parallel geodesics, decided exactly without geometry
        try:
            segs = [seg]
            for _ in range(budget):
                segs.append(iterate_segment(tm, segs[-1]))
            for m in range(1, budget + 1):
                for n in range(m):
                    res = segments_intersect(lat, segs[m], segs[n])
                    if res.hit:
                        assert res.witness is not None
                        return CollisionCertificate(
                            n=n,
                            m=m,
                            k=0,
                            witness=res.witness,
                            exact=res.exact,
                            bound_used=bound,
                            budget=budget,
                        )
            return NoCollisionWithinBudget(budget=budget, group_order=1)
        except (MixedRadicals, IncompatibleField):
            pass  # fall back to the geometric chain

    b_shift = (tm.b.x, tm.b.y)
    chain: list[LiftSegment] = [seg.lift.normalize()]
    for _ in range(budget):
        chain.append(chain[-1].affine_image(tm.m, b_shift).normalize())
    rotated: dict[tuple[int, int], LiftSegment] = {}

    def rot(n: int, k: int) -> LiftSegment:
        if k == 0:
            return chain[n]
        key = (n, k)
        if key not in rotated:
            mat, shift = rhos[k]
            rotated[key] = chain[n].affine_image(mat, shift).normalize()
        return rotated[key]

    for m in range(1, budget + 1):
        for n in range(m):
            for k in range(nu if group else 1):
                res = lift_segments_intersect_torus(lat, chain[m], rot(n, k))
                if res.hit:
                    assert res.witness is not None
                    return CollisionCertificate(
                        n=n,
                        m=m,
                        k=k,
                        witness=res.witness,
                        exact=res.exact,
                        bound_used=bound,
                        budget=budget,
                    )
    return NoCollisionWithinBudget(budget=budget, group_order=nu)


def reverify_collision(
    tm: AffineTorusMap,
    seg: TorusSegment,
    cert: CollisionCertificate,
    group: tuple[int, TorusPoint] | None = None,
) -> bool:
    """Recompute the claimed intersection from scratch."""
    lat = tm.lattice
    b_shift = (tm.b.x, tm.b.y)
    cur = seg.lift.normalize()
    lifts = [cur]
    for _ in range(cert.m):
        cur = cur.affine_image(tm.m, b_shift).normalize()
        lifts.append(cur)
    target = lifts[cert.n]
    if cert.k:
        assert group is not None
        mat, shift = _rho_affine(lat, group[0], group[1], cert.k)
        target = target.affine_image(mat, shift).normalize()
    return lift_segments_intersect_torus(lat, lifts[cert.m], target).hit
