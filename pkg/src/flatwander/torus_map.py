"""Coverings A(z) = a*z + b mod the lattice: construction and classification.

The linear part is stored as the integer matrix [[p, r], [q, s]] acting on
lattice coordinates, which makes iteration exact for any supported scalar; the
complex multiplier a is kept for reporting and for its angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegreeTooLow,
    IncompatibleField,
    MixedRadicals,
    NotACovering,
    WrongLatticeForGroup,
)
from .lattice import CoordPair, Lattice, TorusPoint, reduce_to_fundamental
from .numbers import ComplexPair, QuadraticNumber


def solve_lattice_multiplier(lat: Lattice, a: ComplexPair) -> tuple[int, int, int, int]:
    """Integers (p, q, r, s) with a*1 = p + q*omega and a*omega = r + s*omega,
    or raise NotACovering when multiplication by ``a`` does not preserve the
    lattice."""
    w_re, w_im = lat.omega.re, lat.omega.im
    try:
        q_val = a.im / w_im
        if not q_val.is_integer:
            raise NotACovering(f"a*1 not in the lattice for a = {a.to_expr()}")
        q = q_val.as_int()
        p_val = a.re - w_re * q
        if not p_val.is_integer:
            raise NotACovering(f"a*1 not in the lattice for a = {a.to_expr()}")
        p = p_val.as_int()
        aw = a.mul(lat.omega)
        s_val = aw.im / w_im
        if not s_val.is_integer:
            raise NotACovering(f"a*omega not in the lattice for a = {a.to_expr()}")
        s = s_val.as_int()
        r_val = aw.re - w_re * s
        if not r_val.is_integer:
            raise NotACovering(f"a*omega not in the lattice for a = {a.to_expr()}")
        r = r_val.as_int()
    except MixedRadicals as exc:
        raise NotACovering(str(exc)) from exc
    # redundant check of the quadratic relation q*omega^2 + (p-s)*omega - r = 0
    w2 = lat.omega.mul(lat.omega)
    res_re = w2.re * q + w_re * (p - s) - r
    res_im = w2.im * q + w_im * (p - s)
    assert res_re.is_zero and res_im.is_zero, "lattice relation violated"
    return p, q, r, s


def to_lattice_coords(z: ComplexPair, lat: Lattice) -> CoordPair:
    """Write a complex scalar as x + y*omega."""
    y = z.im / lat.omega.im
    x = z.re - y * lat.omega.re
    return (x, y)


@dataclass(frozen=True)
class AffineTorusMap:
    """z -> a*z + b on the torus, with integer matrix m = (p, q, r, s)."""

    a: ComplexPair
    b: TorusPoint
    m: tuple[int, int, int, int]
    degree: int
    lattice: Lattice

    @property
    def has_integer_multiplier(self) -> bool:
        return self.a.is_real

    def multiplier_int(self) -> int:
        if not self.has_integer_multiplier:
            raise ValueError("multiplier is not real")
        return self.m[0]

    def abs_multiplier(self) -> float:
        return math.sqrt(self.degree)


def torus_map_new(a: ComplexPair, b: ComplexPair, lat: Lattice) -> AffineTorusMap:
    """Validate the covering: solves for the integer matrix, checks the degree,
    and reduces b to a torus point (b is a point of the complex plane)."""
    p, q, r, s = solve_lattice_multiplier(lat, a)
    degree = p * s - q * r
    if degree < 2:
        raise DegreeTooLow(f"degree {degree} < 2")
    # degree equals |a|^2 for a genuine multiplication matrix
    assert a.abs2() == degree
    if a.is_real:
        assert q == 0 and r == 0 and p == s
    b_coords = to_lattice_coords(b, lat)
    return AffineTorusMap(a, reduce_to_fundamental(b_coords), (p, q, r, s), degree, lat)


@dataclass(frozen=True)
class IntegerDerivative:
    a: int


@dataclass(frozen=True)
class NonRealMultiplier:
    a: ComplexPair
    theta: float


MultiplierClass = IntegerDerivative | NonRealMultiplier


def classify_multiplier(tm: AffineTorusMap) -> MultiplierClass:
    """IntegerDerivative iff Im(a) is exactly zero; otherwise the angle of a
    with its sine exact-sign-checked nonzero."""
    if tm.a.is_real:
        return IntegerDerivative(tm.multiplier_int())
    assert tm.a.im.sign() != 0
    theta = math.atan2(tm.a.im.to_float(), tm.a.re.to_float())
    return NonRealMultiplier(tm.a, theta)


def apply_map(tm: AffineTorusMap, pt: TorusPoint) -> TorusPoint:
    """(x, y) -> M (x, y)^T + b, coordinate-wise mod 1."""
    p, q, r, s = tm.m
    try:
        nx = pt.x * p + pt.y * r + tm.b.x
        ny = pt.x * q + pt.y * s + tm.b.y
    except MixedRadicals as exc:
        raise IncompatibleField(str(exc)) from exc
    return reduce_to_fundamental((nx, ny))


def iterate_map(tm: AffineTorusMap, pt: TorusPoint, n: int) -> TorusPoint:
    if n < 0:
        raise ValueError("iterate count must be non-negative")
    for _ in range(n):
        pt = apply_map(tm, pt)
    return pt


_ROTATION_SCALARS = {
    2: ComplexPair.make(-1, 0),
    3: ComplexPair(QuadraticNumber(-1, 0, 2), QuadraticNumber(0, 1, 2, 3)),
    4: ComplexPair.make(0, 1),
    6: ComplexPair(QuadraticNumber(1, 0, 2), QuadraticNumber(0, 1, 2, 3)),
}


def rotation_matrix(lat: Lattice, nu: int) -> tuple[int, int, int, int]:
    """Integer matrix of multiplication by exp(2*pi*i/nu) in lattice
    coordinates; exists iff the lattice carries an order-``nu`` rotation."""
    if nu not in _ROTATION_SCALARS:
        raise ValueError(f"group order must be one of 2, 3, 4, 6, got {nu}")
    zeta = _ROTATION_SCALARS[nu]
    try:
        m = solve_lattice_multiplier(lat, zeta)
    except NotACovering as exc:
        raise WrongLatticeForGroup(
            f"lattice omega={lat.omega.to_expr()} has no order-{nu} rotation"
        ) from exc
    p, q, r, s = m
    assert p * s - q * r == 1
    return m


def preimages(tm: AffineTorusMap, target: TorusPoint) -> list[TorusPoint]:
    """All solutions of apply_map(P) = target, by exact enumeration of the
    residue classes of Z^2 / M Z^2; there are exactly ``degree`` of them."""
    p, q, r, s = tm.m
    det = tm.degree
    cx = target.x - tm.b.x
    cy = target.y - tm.b.y
    seen: dict[tuple, TorusPoint] = {}
    # d*Z^2 is contained in M Z^2, so shifts in [0, d)^2 cover every class
    for t1 in range(det):
        for t2 in range(det):
            rx = cx + t1
            ry = cy + t2
            # M^{-1} = adj(M)/det with adj = [[s, -r], [-q, p]]
            x = (rx * s - ry * r) / det
            y = (ry * p - rx * q) / det
            cand = reduce_to_fundamental((x, y))
            seen.setdefault(cand.key(), cand)
    out = list(seen.values())
    assert len(out) == det
    return out
