"""Fractional-linear maps of the extended plane, symmetric points with
respect to circles, and symmetric-pair enumeration for circular domains.

Coefficients are normalized to determinant 1 (up to an overall sign), but
equality and deduplication always go through the action on reference points:
coefficient comparisons are projective and unreliable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DegenerateConfigurationError,
    DegenerateTripleError,
    InternalInconsistencyError,
    NoCommonPairError,
)
from .geometry import (
    INF,
    Circle,
    CircularDomain,
    ExtendedPoint,
    is_inf,
    spherical_distance,
)

__all__ = [
    "MobiusMap",
    "Line",
    "SymmetricPair",
    "identity",
    "from_triple",
    "symmetric_point",
    "common_symmetric_pair",
    "symmetric_pairs",
    "image_of_circle",
]

#: reference points used for action-based equality of maps
ACTION_PROBES: Tuple[ExtendedPoint, ...] = (0.0 + 0.0j, 1.0 + 0.0j, INF)


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d) with a d - b c normalized to 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    @staticmethod
    def from_coefficients(a, b, c, d) -> "MobiusMap":
        det = a * d - b * c
        if det == 0:
            raise DegenerateTripleError("coefficient matrix is singular")
        s = np.sqrt(complex(det))
        return MobiusMap(complex(a / s), complex(b / s), complex(c / s), complex(d / s))

    def apply(self, z: ExtendedPoint) -> ExtendedPoint:
        if is_inf(z):
            if self.c == 0:
                return INF
            return self.a / self.c
        z = complex(z)
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    __call__ = apply

    def apply_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized action on finite points assumed away from the pole."""
        z = np.asarray(z, dtype=complex)
        return (self.a * z + self.b) / (self.c * z + self.d)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def compose(self, other: "MobiusMap") -> "MobiusMap":
        """self after other: (self.compose(other))(z) = self(other(z))."""
        return MobiusMap.from_coefficients(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __matmul__(self, other: "MobiusMap") -> "MobiusMap":
        return self.compose(other)

    def pole(self) -> ExtendedPoint:
        return INF if self.c == 0 else -self.d / self.c

    def action_distance(self, other: "MobiusMap",
                        probes: Sequence[ExtendedPoint] = ACTION_PROBES) -> float:
        return max(spherical_distance(self.apply(p), other.apply(p)) for p in probes)

    def action_equal(self, other: "MobiusMap", tol: float = 1e-9) -> bool:
        return self.action_distance(other) < tol

    def coefficient_tuple(self) -> Tuple[complex, complex, complex, complex]:
        return (self.a, self.b, self.c, self.d)


def identity() -> MobiusMap:
    return MobiusMap(1.0 + 0j, 0j, 0j, 1.0 + 0j)


def from_triple(a: ExtendedPoint, b: ExtendedPoint, c: ExtendedPoint) -> MobiusMap:
    """The map sending 0, 1, infinity to a, b, c.

    Uses the cross-ratio quotient q = (b-c)/(b-a) when all images are finite
    and explicit affine forms when one of them is the point at infinity.
    """
    pts = (a, b, c)
    for i in range(3):
        for j in range(i + 1, 3):
            if spherical_distance(pts[i], pts[j]) == 0.0:
                raise DegenerateTripleError(f"triple entries {i} and {j} coincide")
    if is_inf(a):
        b, c = complex(b), complex(c)
        return MobiusMap.from_coefficients(c, b - c, 1.0, 0.0)
    if is_inf(b):
        a, c = complex(a), complex(c)
        return MobiusMap.from_coefficients(c, -a, 1.0, -1.0)
    if is_inf(c):
        a, b = complex(a), complex(b)
        return MobiusMap.from_coefficients(b - a, a, 0.0, 1.0)
    a, b, c = complex(a), complex(b), complex(c)
    q = (b - c) / (b - a)
    return MobiusMap.from_coefficients(c, -a * q, 1.0, -q)


def symmetric_point(circle: Circle, z: ExtendedPoint) -> ExtendedPoint:
    """Inversion of z in the circle; the center and infinity swap."""
    if is_inf(z):
        return circle.center
    z = complex(z)
    if z == circle.center:
        return INF
    return circle.center + circle.radius ** 2 / np.conj(z - circle.center)


def _symmetry_residual(circle: Circle, p: ExtendedPoint, q: ExtendedPoint) -> float:
    if is_inf(p) or is_inf(q):
        other = q if is_inf(p) else p
        if is_inf(other):
            return np.inf
        return abs(complex(other) - circle.center)
    rel = (complex(p) - circle.center) * np.conj(complex(q) - circle.center)
    return abs(rel - circle.radius ** 2)


@dataclass(frozen=True)
class SymmetricPair:
    """Unordered point pair symmetric with respect to two boundary circles."""

    p: ExtendedPoint
    q: ExtendedPoint
    circle_indices: Tuple[int, int]

    def points(self) -> Tuple[ExtendedPoint, ExtendedPoint]:
        return (self.p, self.q)


def common_symmetric_pair(c1: Circle, c2: Circle,
                          indices: Tuple[int, int] = (0, 1)) -> SymmetricPair:
    """The unique pair simultaneously symmetric w.r.t. both circles.

    Concentric circles short-circuit to {center, infinity}; otherwise the
    problem reduces to a real quadratic along the line of centers, which is
    exact. Intersecting or tangent circles admit no pair.
    """
    delta = c2.center - c1.center
    d = abs(delta)
    scale = max(c1.radius, c2.radius)
    if d <= 1e-13 * scale:
        return SymmetricPair(c1.center, INF, indices)
    e = delta / d
    s = (c1.radius ** 2 - c2.radius ** 2 + d * d) / d
    disc = s * s - 4.0 * c1.radius ** 2
    if disc <= 0.0:
        raise NoCommonPairError(
            "circles intersect or are tangent; no common symmetric pair")
    root = np.sqrt(disc)
    p = c1.center + 0.5 * (s - root) * e
    q = c1.center + 0.5 * (s + root) * e
    for circ in (c1, c2):
        if _symmetry_residual(circ, p, q) > 1e-10 * max(1.0, scale ** 2):
            raise DegenerateConfigurationError(
                "symmetric-pair residual too large; configuration nearly tangent")
    return SymmetricPair(p, q, indices)


def symmetric_pairs(domain: CircularDomain) -> List[SymmetricPair]:
    """One pair per unordered circle pair: s_m = m(m-1)/2 pairs, 2 s_m points.

    A distinctness failure is reported as a degenerate configuration, since
    valid circular domains cannot produce one.
    """
    circles = domain.circles
    pairs = []
    for i in range(len(circles)):
        for j in range(i + 1, len(circles)):
            pairs.append(common_symmetric_pair(circles[i], circles[j], (i, j)))
    pts: List[ExtendedPoint] = []
    for pair in pairs:
        pts.extend(pair.points())
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            if spherical_distance(pts[i], pts[j]) <= 1e-8:
                raise DegenerateConfigurationError(
                    f"symmetric points {i} and {j} coincide; expected "
                    f"{len(pts)} distinct points")
    return pairs


@dataclass(frozen=True)
class Line:
    """Image of a circle through the pole of a fractional-linear map."""

    point: complex
    direction: complex


CircleOrLine = Union[Circle, Line]


def image_of_circle(m: MobiusMap, circle: Circle) -> CircleOrLine:
    """Image of a circle: a circle fitted through three sample images, or a
    tagged line when the pole lies on the circle. Twenty further samples
    verify the fit."""
    pole = m.pole()
    if not is_inf(pole):
        if abs(abs(complex(pole) - circle.center) - circle.radius) \
                <= 1e-9 * max(1.0, circle.radius):
            w1 = m.apply(circle.point(1.0))
            w2 = m.apply(circle.point(3.0))
            direction = complex(w2) - complex(w1)
            return Line(complex(w1), direction / abs(direction))
    zs = [circle.point(t) for t in (0.0, 2.0 * np.pi / 3.0, 4.0 * np.pi / 3.0)]
    ws = [m.apply(z) for z in zs]
    if any(is_inf(w) or abs(complex(w)) > 1e13 for w in ws):
        finite = [complex(w) for w in ws if not is_inf(w) and abs(complex(w)) < 1e13]
        direction = finite[1] - finite[0]
        return Line(finite[0], direction / abs(direction))
    center, radius = _circumcircle(*(complex(w) for w in ws))
    thetas = 2.0 * np.pi * (np.arange(20) + 0.37) / 20.0
    samples = m.apply_array(circle.center + circle.radius * np.exp(1j * thetas))
    misfit = np.max(np.abs(np.abs(samples - center) - radius))
    if misfit > 1e-9 * (1.0 + radius):
        raise InternalInconsistencyError(
            f"circle-image fit residual {misfit:g} exceeds tolerance")
    return Circle(center, radius)


def _circumcircle(z1: complex, z2: complex, z3: complex) -> Tuple[complex, float]:
    a = np.array([
        [2.0 * (z2.real - z1.real), 2.0 * (z2.imag - z1.imag)],
        [2.0 * (z3.real - z1.real), 2.0 * (z3.imag - z1.imag)],
    ])
    rhs = np.array([
        abs(z2) ** 2 - abs(z1) ** 2,
        abs(z3) ** 2 - abs(z1) ** 2,
    ])
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    if abs(det) < 1e-30:
        raise InternalInconsistencyError("circumcircle of collinear image points")
    x = np.linalg.solve(a, rhs)
    center = complex(x[0], x[1])
    return center, float(abs(z1 - center))
