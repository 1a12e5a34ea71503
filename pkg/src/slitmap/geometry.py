"""Extended-plane primitives: points, circles, sampled Jordan curves, and
multiply connected domains.

Curves are stored as equispaced-parameter samples of closed curves with an
implicit trigonometric interpolant, so spectral quadrature and
differentiation are natural on analytic boundaries. The point at infinity is
a tagged singleton, never a large float.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence, Union

import numpy as np
from scipy.spatial.distance import directed_hausdorff

from . import trig
from .errors import BoundaryProximityError, InvalidDomainError

__all__ = [
    "INF",
    "Infinity",
    "ExtendedPoint",
    "is_inf",
    "spherical_distance",
    "Circle",
    "perpendicular_circle",
    "hausdorff_distance",
    "BoundaryCurve",
    "MultiplyConnectedDomain",
    "CircularDomain",
    "contains",
    "circular_to_curves",
    "parse_domain_spec",
    "read_domain_spec",
]


class Infinity:
    """The point at infinity of the Riemann sphere (a unique tagged value)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"


INF = Infinity()

ExtendedPoint = Union[complex, Infinity]


def is_inf(z: ExtendedPoint) -> bool:
    return isinstance(z, Infinity)


def spherical_distance(z: ExtendedPoint, w: ExtendedPoint) -> float:
    """Chordal metric on the Riemann sphere; symmetric, bounded by 2.

    d(z, w) = 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)) and d(z, INF) = 2/sqrt(1+|z|^2).
    """
    if is_inf(z) and is_inf(w):
        return 0.0
    if is_inf(z):
        z, w = w, z
    if is_inf(w):
        return 2.0 / np.sqrt(1.0 + abs(complex(z)) ** 2)
    z = complex(z)
    w = complex(w)
    return 2.0 * abs(z - w) / np.sqrt((1.0 + abs(z) ** 2) * (1.0 + abs(w) ** 2))


@dataclass(frozen=True)
class Circle:
    """Round circle with a finite center and positive radius."""

    center: complex
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise InvalidDomainError(f"circle radius must be positive, got {self.radius}")

    def point(self, theta: float) -> complex:
        return self.center + self.radius * np.exp(1j * theta)

    def sample(self, n: int, clockwise: bool = False) -> np.ndarray:
        t = trig.nodes(n)
        if clockwise:
            t = -t
        return self.center + self.radius * np.exp(1j * t)


def perpendicular_circle(x1: float, x2: float) -> Circle:
    """The unique circle through real x1 < x2 orthogonal to the real axis.

    It is centered at the midpoint with radius half the gap.
    """
    if not x1 < x2:
        raise ValueError(f"need x1 < x2, got ({x1}, {x2})")
    return Circle(complex((x1 + x2) / 2.0, 0.0), (x2 - x1) / 2.0)


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between finite point sets (Euclidean)."""
    a = np.atleast_1d(np.asarray(a, dtype=complex))
    b = np.atleast_1d(np.asarray(b, dtype=complex))
    if a.size == 0 or b.size == 0:
        raise ValueError("hausdorff_distance requires non-empty point sets")
    pa = np.column_stack([a.real, a.imag])
    pb = np.column_stack([b.real, b.imag])
    return max(directed_hausdorff(pa, pb)[0], directed_hausdorff(pb, pa)[0])


class BoundaryCurve:
    """Closed Jordan curve given by N equispaced-parameter samples.

    The trigonometric interpolant through the nodes must be simple; this is
    checked with a pairwise segment-intersection test on a refined polyline.
    Orientation is read off the signed area: "positive" is counterclockwise.
    """

    def __init__(self, nodes: Sequence[complex]):
        nodes = np.asarray(nodes, dtype=complex).copy()
        n = nodes.size
        if n < 16 or n % 2 != 0:
            raise InvalidDomainError(f"curve needs an even node count >= 16, got {n}")
        if not np.all(np.isfinite(nodes)):
            raise InvalidDomainError("curve nodes must be finite")
        nodes.setflags(write=False)
        self.nodes = nodes
        self.n = n
        self._check_simple()

    @cached_property
    def dz(self) -> np.ndarray:
        """Derivative of the interpolant at the nodes."""
        return trig.diff(self.nodes)

    @cached_property
    def d2z(self) -> np.ndarray:
        return trig.diff(self.nodes, 2)

    @cached_property
    def speed(self) -> np.ndarray:
        return np.abs(self.dz)

    @cached_property
    def coeffs(self) -> np.ndarray:
        return trig.coeffs(self.nodes)

    @cached_property
    def signed_area(self) -> float:
        # (1/2) Im conj(z) dz integrated over the curve
        return float(0.5 * trig.trapezoid(np.imag(np.conj(self.nodes) * self.dz)).real)

    @property
    def orientation(self) -> str:
        return "positive" if self.signed_area > 0 else "negative"

    @cached_property
    def centroid(self) -> complex:
        return complex(self.nodes.mean())

    @cached_property
    def resolution(self) -> float:
        """Arclength node spacing: membership within this of the curve is
        indeterminate."""
        return float(2.0 * np.pi * self.speed.max() / self.n)

    @cached_property
    def refined(self) -> np.ndarray:
        factor = max(2, min(4, 2048 // self.n))
        return trig.refine(self.nodes, factor)

    def value(self, t) -> np.ndarray:
        return trig.eval_series(self.coeffs, t)

    def derivative(self, t) -> np.ndarray:
        return trig.eval_series(trig.diff_coeffs(self.coeffs), t)

    def winding(self, z: complex) -> int:
        """Winding number of the curve about a point not on it."""
        p = self.refined - z
        turns = np.angle(np.roll(p, -1) / p).sum() / (2.0 * np.pi)
        return int(np.rint(turns))

    def distance(self, z: complex) -> float:
        return float(np.min(np.abs(self.refined - z)))

    def nearest_parameter(self, z: complex, newton_steps: int = 12) -> float:
        """Parameter of the interpolant point closest to z."""
        sq = np.abs(self.refined - z) ** 2
        m = self.refined.size
        t = 2.0 * np.pi * int(np.argmin(sq)) / m
        dc = trig.diff_coeffs(self.coeffs)
        d2c = trig.diff_coeffs(self.coeffs, 2)
        for _ in range(newton_steps):
            g = trig.eval_series(self.coeffs, t) - z
            d1 = trig.eval_series(dc, t)
            d2 = trig.eval_series(d2c, t)
            # minimize |gamma(t)-z|^2: derivative Re(conj(g) d1)
            grad = np.real(np.conj(g) * d1)
            hess = np.real(np.conj(d1) * d1 + np.conj(g) * d2)
            if hess <= 0:
                break
            t = t - np.clip(grad / hess, -2 * np.pi / self.n, 2 * np.pi / self.n)
        return float(t % (2.0 * np.pi))

    def reversed(self) -> "BoundaryCurve":
        rev = np.concatenate([self.nodes[:1], self.nodes[:0:-1]])
        return BoundaryCurve(rev)

    def _check_simple(self):
        p = trig.refine(self.nodes, max(2, min(4, 2048 // self.n)))
        q = np.roll(p, -1)
        m = p.size
        d = q - p
        # proper crossing test between all non-adjacent segment pairs
        def cross(u, v):
            return u.real * v.imag - u.imag * v.real

        i = np.arange(m)
        adj = (np.abs(i[:, None] - i[None, :]) % (m - 1)) <= 1
        a1 = p[:, None]
        b1 = q[:, None]
        d1 = d[:, None]
        a2 = p[None, :]
        b2 = q[None, :]
        d2 = d[None, :]
        s1 = cross(d2, a1 - a2) * cross(d2, b1 - a2)
        s2 = cross(d1, a2 - a1) * cross(d1, b2 - a1)
        bad = (s1 < 0) & (s2 < 0) & ~adj
        if bad.any():
            raise InvalidDomainError("curve interpolant is not simple (self-intersection)")


class MultiplyConnectedDomain:
    """m-connected domain bounded by one outer curve and m-1 hole curves.

    The outer curve must be positively oriented, holes negatively oriented
    (domain on the left throughout). Closures of the components must be
    pairwise disjoint and every hole must lie strictly inside the outer curve.
    """

    def __init__(self, outer: BoundaryCurve, holes: Sequence[BoundaryCurve] = ()):
        if outer.orientation != "positive":
            raise InvalidDomainError("outer curve must be positively oriented")
        holes = tuple(holes)
        for k, h in enumerate(holes):
            if h.orientation != "negative":
                raise InvalidDomainError(f"hole {k} must be negatively oriented")
        self.outer = outer
        self.holes = holes
        self.components = (outer,) + holes
        self.m = 1 + len(holes)
        self._validate()

    def _validate(self):
        comps = self.components
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                dmin = _polyline_gap(comps[i].refined, comps[j].refined)
                if not dmin > 0.0 or _polylines_cross(comps[i].refined,
                                                      comps[j].refined):
                    raise InvalidDomainError(
                        f"components {i} and {j} are not disjoint (gap {dmin:g})")
        for k, h in enumerate(self.holes):
            if self.outer.winding(h.nodes[0]) != 1:
                raise InvalidDomainError(f"hole {k} is not inside the outer curve")
            for j, other in enumerate(self.holes):
                if j != k and other.winding(h.nodes[0]) != 0:
                    raise InvalidDomainError(f"holes {j} and {k} are nested")

    @cached_property
    def resolution(self) -> float:
        return max(c.resolution for c in self.components)

    def contains(self, z: complex) -> bool:
        """Strict interior membership via winding numbers.

        Raises BoundaryProximityError when z is within node resolution of
        some component, where membership is indeterminate.
        """
        z = complex(z)
        if not np.isfinite(z):
            raise ValueError("contains expects a finite point")
        for c in self.components:
            if c.distance(z) < c.resolution:
                raise BoundaryProximityError(
                    f"point {z} is within sampling resolution of a boundary component")
        if self.outer.winding(z) != 1:
            return False
        return all(h.winding(z) == 0 for h in self.holes)

    def boundary_distance(self, z: complex) -> float:
        return min(c.distance(z) for c in self.components)

    def interior_grid(self, target: int = 200, margin: float | None = None) -> np.ndarray:
        """Deterministic grid of interior points with a boundary clearance."""
        if margin is None:
            margin = 2.0 * self.resolution
        pts = np.concatenate([c.refined for c in self.components])
        xlo, xhi = pts.real.min(), pts.real.max()
        ylo, yhi = pts.imag.min(), pts.imag.max()
        k = max(4, int(np.sqrt(target * 2)))
        out = []
        while k < 600:
            xs = np.linspace(xlo, xhi, k)
            ys = np.linspace(ylo, yhi, k)
            out = []
            for x in xs:
                for y in ys:
                    z = complex(x, y)
                    if self.boundary_distance(z) <= margin:
                        continue
                    try:
                        if self.contains(z):
                            out.append(z)
                    except BoundaryProximityError:
                        continue
            if len(out) >= target:
                break
            k *= 2
        return np.asarray(out, dtype=complex)


def contains(d: MultiplyConnectedDomain, z: complex) -> bool:
    """Module-level alias for MultiplyConnectedDomain.contains."""
    return d.contains(z)


class CircularDomain:
    """Domain bounded by round circles: one outer circle and m-1 hole circles."""

    def __init__(self, outer: Circle, holes: Sequence[Circle] = ()):
        holes = tuple(holes)
        for k, h in enumerate(holes):
            gap = outer.radius - (abs(h.center - outer.center) + h.radius)
            if not gap > 0.0:
                raise InvalidDomainError(
                    f"hole circle {k} is not strictly inside the outer circle")
        for i in range(len(holes)):
            for j in range(i + 1, len(holes)):
                gap = abs(holes[i].center - holes[j].center) - (
                    holes[i].radius + holes[j].radius)
                if not gap > 0.0:
                    raise InvalidDomainError(f"hole circles {i} and {j} overlap")
        self.outer = outer
        self.holes = holes
        self.circles = (outer,) + holes
        self.m = 1 + len(holes)

    def contains_point(self, z: complex) -> bool:
        z = complex(z)
        if abs(z - self.outer.center) >= self.outer.radius:
            return False
        return all(abs(z - h.center) > h.radius for h in self.holes)

    def boundary_gap(self, z: complex) -> float:
        return min(abs(abs(z - c.center) - c.radius) for c in self.circles)

    def interior_probe(self) -> complex:
        """A deterministic interior point, reasonably far from all circles."""
        cands = [self.outer.center]
        for f in (0.35, 0.55, 0.75, 0.9):
            for k in range(16):
                cands.append(self.outer.center
                             + f * self.outer.radius * np.exp(2j * np.pi * k / 16))
        best, best_gap = None, 0.0
        for z in cands:
            if self.contains_point(z):
                gap = self.boundary_gap(z)
                if gap > best_gap:
                    best, best_gap = complex(z), gap
        if best is None:
            raise InvalidDomainError("no interior probe found (degenerate domain)")
        return best


def circular_to_curves(c: CircularDomain, n: int) -> MultiplyConnectedDomain:
    """Sample each circle at n equispaced angles with domain-on-left
    orientations (outer counterclockwise, holes clockwise). Node 0 sits at
    angle 0 from each center."""
    outer = BoundaryCurve(c.outer.sample(n))
    holes = [BoundaryCurve(h.sample(n, clockwise=True)) for h in c.holes]
    return MultiplyConnectedDomain(outer, holes)


def _polyline_gap(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.min(np.abs(a[:, None] - b[None, :])))


def _polylines_cross(a: np.ndarray, b: np.ndarray) -> bool:
    """Proper segment crossing between two closed polylines."""
    a2, b2 = np.roll(a, -1), np.roll(b, -1)
    da, db = a2 - a, b2 - b

    def cross(u, v):
        return u.real * v.imag - u.imag * v.real

    s1 = cross(db[None, :], a[:, None] - b[None, :]) \
        * cross(db[None, :], a2[:, None] - b[None, :])
    s2 = cross(da[:, None], b[None, :] - a[:, None]) \
        * cross(da[:, None], b2[None, :] - a[:, None])
    return bool(((s1 < 0) & (s2 < 0)).any())


def _circle_from_spec(obj: dict) -> Circle:
    x, y = obj["center"]
    return Circle(complex(float(x), float(y)), float(obj["radius"]))


def parse_domain_spec(obj: dict):
    """Build a domain from the JSON domain-spec structure.

    {"type": "circular", "outer": {"center": [x, y], "radius": r},
     "holes": [...]} or
    {"type": "curves", "components": [{"points": [[x, y], ...]}, ...]}
    (first component is the outer curve). The first violated invariant is
    reported.
    """
    if not isinstance(obj, dict) or "type" not in obj:
        raise InvalidDomainError("domain spec must be an object with a 'type' field")
    kind = obj["type"]
    if kind == "circular":
        try:
            outer = _circle_from_spec(obj["outer"])
            holes = [_circle_from_spec(h) for h in obj.get("holes", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidDomainError(f"malformed circular spec: {exc}") from exc
        return CircularDomain(outer, holes)
    if kind == "curves":
        comps = obj.get("components")
        if not comps:
            raise InvalidDomainError("curves spec needs a non-empty 'components' list")
        curves = []
        for k, comp in enumerate(comps):
            try:
                pts = np.asarray(comp["points"], dtype=float)
                nodes = pts[:, 0] + 1j * pts[:, 1]
            except (KeyError, TypeError, ValueError, IndexError) as exc:
                raise InvalidDomainError(f"malformed component {k}: {exc}") from exc
            curves.append(BoundaryCurve(nodes))
        return MultiplyConnectedDomain(curves[0], curves[1:])
    raise InvalidDomainError(f"unknown domain spec type {kind!r}")


def read_domain_spec(path):
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidDomainError(f"invalid JSON in {path}: {exc}") from exc
    return parse_domain_spec(obj)
