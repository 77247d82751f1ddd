"""Lattice L = {n + m*omega}, lattice coordinates and the half-lattice grid.

All torus arithmetic uses lattice coordinates (x, y), meaning the point
x*1 + y*omega, so reduction mod the lattice is coordinate-wise mod 1 and every
membership decision is exact regardless of omega's numeric value.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import LowerHalfPlane
from .numbers import HALF, ZERO, ComplexPair, QuadraticNumber, qn

CoordPair = tuple[QuadraticNumber, QuadraticNumber]


@dataclass(frozen=True)
class Lattice:
    """Lattice spanned by 1 and omega, with Im(omega) > 0."""

    omega: ComplexPair

    def __post_init__(self):
        if self.omega.im.sign() <= 0:
            raise LowerHalfPlane(f"Im(omega) must be positive, got {self.omega.to_expr()}")

    def omega_complex(self) -> complex:
        return self.omega.to_complex()

    def abs_omega(self) -> float:
        return abs(self.omega_complex())

    def embed_coords(self, x: float, y: float) -> complex:
        return x + y * self.omega_complex()

    def min_vector_length(self) -> float:
        """Length of a shortest nonzero lattice vector (searched exactly enough
        for desk-scale omegas)."""
        w = self.omega_complex()
        best = abs(complex(1.0))
        for n in range(-3, 4):
            for m in range(-3, 4):
                if n == 0 and m == 0:
                    continue
                best = min(best, abs(n + m * w))
        return best

    def covering_radius_bound(self) -> float:
        """Max distance from a point of the fundamental cell to its nearest
        lattice point; the half-diagonal is a safe upper bound."""
        w = self.omega_complex()
        return max(abs((1 + w) / 2), abs((1 - w) / 2))


def lattice_new(omega: ComplexPair) -> Lattice:
    return Lattice(omega)


@dataclass(frozen=True)
class TorusPoint:
    """A point of the torus in lattice coordinates, both reduced to [0, 1)."""

    x: QuadraticNumber
    y: QuadraticNumber

    def __post_init__(self):
        for c in (self.x, self.y):
            if c.sign() < 0 or (c - 1).sign() >= 0:
                raise ValueError("TorusPoint coordinates must lie in [0,1)")

    def coords(self) -> CoordPair:
        return (self.x, self.y)

    def key(self) -> tuple:
        return (self.x.u, self.x.v, self.x.w, self.x.d, self.y.u, self.y.v, self.y.w, self.y.d)

    def to_expr(self) -> str:
        return f"({self.x.to_expr()}, {self.y.to_expr()})"


ORIGIN = TorusPoint(ZERO, ZERO)


def reduce_to_fundamental(p: CoordPair) -> TorusPoint:
    """Coordinate-wise mod 1: the representative in the parallelogram with
    vertices 0, 1, omega, 1+omega."""
    return TorusPoint(p[0].mod1(), p[1].mod1())


def point(x, y) -> TorusPoint:
    return reduce_to_fundamental((qn(x), qn(y)))


def half_lattice_q(lat: Lattice, z0: TorusPoint = ORIGIN) -> tuple[TorusPoint, ...]:
    """The four fixed points of z -> 2*z0 - z: z0 shifted by the half-lattice,
    sorted for deterministic iteration."""
    if not (z0.x.is_rational and z0.y.is_rational):
        raise ValueError("z0 must be rational")
    shifts = [(ZERO, ZERO), (HALF, ZERO), (ZERO, HALF), (HALF, HALF)]
    pts = {reduce_to_fundamental((z0.x + sx, z0.y + sy)) for sx, sy in shifts}
    assert len(pts) == 4
    return tuple(sorted(pts, key=lambda p: (p.x.as_fraction(), p.y.as_fraction())))


def embed(p: TorusPoint, lat: Lattice) -> complex:
    """Floating image x + y*omega of a torus point."""
    return lat.embed_coords(p.x.to_float(), p.y.to_float())


def embed_pair(p: CoordPair, lat: Lattice) -> complex:
    return lat.embed_coords(p[0].to_float(), p[1].to_float())


def nearest_lattice_distance(z: complex, lat: Lattice) -> float:
    """Distance from a complex number to the nearest lattice vector."""
    w = lat.omega_complex()
    y = z.imag / w.imag
    x = z.real - y * w.real
    best = float("inf")
    for n in (-1, 0, 1):
        for m in (-1, 0, 1):
            cand = (round(x) + n) + (round(y) + m) * w
            best = min(best, abs(z - cand))
    return best
