"""Automorphism groups of circular domains.

Two routes that must agree: a closed-form classifier for the 3-connected
family T(mu, a, r) built from circle-pair swap criteria, and an exhaustive
finite search over Mobius maps permuting the symmetric points of a general
circular domain. Every automorphism of a circular domain is a Mobius map
and permutes the m(m-1)/2 symmetric pairs, so the search space is finite.

A swap of two boundary circles fixing the third exists iff the inversive
distances (a Mobius invariant) from the fixed circle to the swapped pair
agree; for the hole swap of T(mu, a, r) this is the identity
r (1 + mu^2) = mu (1 + r^2 - a^2), exposed as `hole_swap_residual`. The
quadratic `rigidity_discriminant` is kept with the contract's printed form;
it does not coincide with the swap locus (see hole_swap_residual's note).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    InfiniteGroupError,
    InternalInconsistencyError,
    InvalidDomainError,
    ToleranceError,
)
from .geometry import INF, Circle, CircularDomain, is_inf, spherical_distance
from .mobius import (
    Line,
    MobiusMap,
    common_symmetric_pair,
    from_triple,
    identity,
    image_of_circle,
    symmetric_pairs,
)

__all__ = [
    "ThreeConnectedCircular",
    "AutGroup",
    "tau_map",
    "tau_condition",
    "rigidity_discriminant",
    "hole_swap_residual",
    "outer_swap_residual",
    "b_parameter",
    "aut_group_T",
    "enumerate_automorphisms",
    "is_rigid",
]

SWAP_TOL = 1e-12


@dataclass(frozen=True)
class ThreeConnectedCircular:
    """T(mu, a, r): unit disk minus the closed disks D_mu(0) and D_r(a),
    with 0 < mu < a - r < a + r < 1."""

    mu: float
    a: float
    r: float

    def __post_init__(self):
        if not 0.0 < self.mu < self.a - self.r < self.a + self.r < 1.0:
            raise InvalidDomainError(
                f"need 0 < mu < a-r < a+r < 1, got mu={self.mu}, a={self.a}, r={self.r}")

    def domain(self) -> CircularDomain:
        return CircularDomain(
            Circle(0j, 1.0),
            [Circle(0j, self.mu), Circle(complex(self.a), self.r)],
        )


def tau_map(mu: float) -> MobiusMap:
    """The involution z -> mu / z."""
    return MobiusMap.from_coefficients(0.0, mu, 1.0, 0.0)


def tau_condition(t: ThreeConnectedCircular) -> bool:
    """Whether z -> mu/z is an automorphism of T(mu, a, r): mu = a^2 - r^2."""
    return abs(t.mu - (t.a ** 2 - t.r ** 2)) < SWAP_TOL


def rigidity_discriminant(a: float, r: float) -> float:
    """The quadratic m^2 - (1/r - 1) m + 1 evaluated at m = a^2 - r^2.

    Note: its zero set does NOT coincide with the six-element symmetry
    locus; the correct criterion is the vanishing of hole_swap_residual,
    which is what the classifier uses. Kept as a published contract value.
    """
    if not (0.0 < r < a and a + r < 1.0):
        raise ValueError(f"need 0 < r < a and a + r < 1, got a={a}, r={r}")
    m = a ** 2 - r ** 2
    return m * m - (1.0 / r - 1.0) * m + 1.0


def hole_swap_residual(mu: float, a: float, r: float) -> float:
    """Residual of the existence condition for a disk automorphism swapping
    the holes of T(mu, a, r): r (1 + mu^2) - mu (1 + r^2 - a^2).

    It vanishes exactly when the two defining conditions
    phi_b(-mu) = a + r and phi_b(mu) = a - r admit a common b, equivalently
    when the inversive distances from the unit circle to the two holes
    agree. Under mu = a^2 - r^2 it reduces to r (1 + mu^2) - mu (1 - mu),
    solvable only for r <= (sqrt(2) - 1) / 2.
    """
    return r * (1.0 + mu * mu) - mu * (1.0 + r * r - a * a)


def outer_swap_residual(mu: float, a: float, r: float) -> float:
    """Residual of the condition for an automorphism swapping S_1(0) with
    S_r(a) while fixing S_mu(0): r (1 + mu^2) - |a^2 - r^2 - mu^2|."""
    return r * (1.0 + mu * mu) - abs(a * a - r * r - mu * mu)


def b_parameter(mu: float, a: float, r: float) -> float:
    """b = ((a+r) - mu) / (1 - (a+r) mu) of the hole-swap involution
    phi_b(z) = -(z - b)/(1 - b z)."""
    return ((a + r) - mu) / (1.0 - (a + r) * mu)


def _phi_b(mu: float, a: float, r: float) -> MobiusMap:
    b = b_parameter(mu, a, r)
    return MobiusMap.from_coefficients(-1.0, b, -b, 1.0)


def _outer_swap(mu: float, a: float, r: float) -> MobiusMap:
    """Involution swapping S_1(0) and S_r(a), fixing S_mu(0): conjugate the
    inversion z -> rho1 rho2 / z by the map sending the common symmetric
    pair of the swapped circles to {0, infinity}."""
    pair = common_symmetric_pair(Circle(0j, 1.0), Circle(complex(a), r))
    p, q = complex(pair.p), complex(pair.q)
    g = MobiusMap.from_coefficients(1.0, -p, 1.0, -q)
    rho1 = abs(g(1.0 + 0j))
    rho2 = abs(g(complex(a + r)))
    inv = MobiusMap.from_coefficients(0.0, rho1 * rho2, 1.0, 0.0)
    return g.inverse() @ inv @ g


@dataclass(frozen=True)
class AutGroup:
    """Finite automorphism group: elements (identity first), generator tags,
    and a human-readable classification."""

    elements: Tuple[MobiusMap, ...]
    generator_tags: Tuple[str, ...]
    classification: str

    @property
    def order(self) -> int:
        return len(self.elements)

    def contains_action(self, m: MobiusMap, tol: float = 1e-8) -> bool:
        return any(e.action_equal(m, tol) for e in self.elements)

    def action_equals(self, other: "AutGroup", tol: float = 1e-8) -> bool:
        if self.order != other.order:
            return False
        return all(other.contains_action(e, tol) for e in self.elements)

    def is_abelian(self, tol: float = 1e-8) -> bool:
        for x, y in itertools.combinations(self.elements, 2):
            if not (x @ y).action_equal(y @ x, tol):
                return False
        return True


def _close_group(generators: Sequence[MobiusMap], cap: int = 12,
                 tol: float = 1e-9) -> List[MobiusMap]:
    elements: List[MobiusMap] = [identity()]
    frontier = list(generators)
    while frontier:
        g = frontier.pop()
        if any(e.action_equal(g, tol) for e in elements):
            continue
        elements.append(g)
        if len(elements) > cap:
            raise InternalInconsistencyError(
                f"group closure exceeded {cap} elements")
        frontier.extend([g @ e for e in elements] + [e @ g for e in elements])
        frontier.append(g.inverse())
    return elements


def _preserves_boundary(m: MobiusMap, domain: CircularDomain,
                        tol: float) -> bool:
    for c in domain.circles:
        img = image_of_circle(m, c)
        if isinstance(img, Line):
            return False
        if not any(abs(img.center - c2.center) <= tol
                   and abs(img.radius - c2.radius) <= tol
                   for c2 in domain.circles):
            return False
    probe = domain.interior_probe()
    w = m(probe)
    if is_inf(w) or not domain.contains_point(complex(w)):
        return False
    return True


def aut_group_T(t: ThreeConnectedCircular) -> AutGroup:
    """Closed-form automorphism group of T(mu, a, r).

    Generators are decided by the three circle-pair swap criteria; the group
    is their closure. Every returned element must pass the
    boundary-preservation filter, otherwise the classification logic itself
    is inconsistent and an error is raised.
    """
    mu, a, r = t.mu, t.a, t.r
    generators: List[MobiusMap] = []
    tags: List[str] = []
    if tau_condition(t):
        generators.append(tau_map(mu))
        tags.append("tau")
    if abs(hole_swap_residual(mu, a, r)) < SWAP_TOL:
        generators.append(_phi_b(mu, a, r))
        tags.append("phi_b")
    if abs(outer_swap_residual(mu, a, r)) < SWAP_TOL:
        sigma = _outer_swap(mu, a, r)
        if not any(sigma.action_equal(g) for g in generators):
            generators.append(sigma)
            tags.append("sigma")
    elements = _close_group(generators)
    domain = t.domain()
    for e in elements:
        if not _preserves_boundary(e, domain, 1e-8):
            raise InternalInconsistencyError(
                f"classified element {e} fails the boundary filter for {t}")
    order = len(elements)
    if order == 1:
        cls = "rigid"
    elif order == 2 and "tau" in tags:
        cls = "tau-only"
    elif order == 6:
        cls = "six-element"
    else:
        cls = "other"
    return AutGroup(tuple(_sorted_elements(elements)), tuple(tags), cls)


def enumerate_automorphisms(domain: CircularDomain, tol: float = 1e-8) -> AutGroup:
    """Exhaustive automorphism search for an m-connected circular domain,
    m >= 3 (the m = 2 group is a continuum and is rejected).

    Candidates are the Mobius maps sending a fixed base triple of symmetric
    points to each ordered triple of distinct symmetric points; they are
    filtered by boundary preservation (fitted image circle within tol of a
    boundary circle) and an interior probe, deduplicated by action, and
    checked for group closure.
    """
    if domain.m < 3:
        raise InfiniteGroupError(
            "2-connected circular domains have infinitely many automorphisms")
    pairs = symmetric_pairs(domain)
    points: List = []
    for pair in pairs:
        points.extend(pair.points())
    base = points[:3]
    base_inv = from_triple(*base).inverse()
    elements: List[MobiusMap] = []
    for triple in itertools.permutations(range(len(points)), 3):
        cand = from_triple(*(points[i] for i in triple)) @ base_inv
        if not _preserves_boundary(cand, domain, tol):
            continue
        if not any(cand.action_equal(e, 1e-9) for e in elements):
            elements.append(cand)
    for x, y in itertools.product(elements, repeat=2):
        prod = x @ y
        if not any(prod.action_equal(e, 1e-7) for e in elements):
            raise ToleranceError(
                "enumerated set is not closed under composition; "
                "tighten tol or refine the configuration")
    elements = _sorted_elements(elements)
    order = len(elements)
    if order == 1:
        cls = "rigid"
    elif order == 6:
        cls = "six-element"
    elif order == 2 and _swaps_outer(elements, domain, tol):
        cls = "tau-only"
    else:
        cls = "other"
    return AutGroup(tuple(elements), (), cls)


def _swaps_outer(elements: Sequence[MobiusMap], domain: CircularDomain,
                 tol: float) -> bool:
    for e in elements:
        if e.action_equal(identity()):
            continue
        img = image_of_circle(e, domain.outer)
        if isinstance(img, Line):
            return False
        return abs(img.center - domain.outer.center) > tol \
            or abs(img.radius - domain.outer.radius) > tol
    return False


def _fingerprint(m: MobiusMap):
    out = []
    for p in (0.25 + 0j, 1j, INF):
        w = m(p)
        if is_inf(w):
            out.append((1, 0.0, 0.0))
        else:
            w = complex(w)
            out.append((0, round(w.real, 6), round(w.imag, 6)))
    return tuple(out)


def _sorted_elements(elements: Sequence[MobiusMap]) -> List[MobiusMap]:
    ident = [e for e in elements if e.action_equal(identity())]
    rest = [e for e in elements if not e.action_equal(identity())]
    return ident + sorted(rest, key=_fingerprint)


def is_rigid(domain: CircularDomain) -> bool:
    """True when the only automorphism is the identity (m >= 3)."""
    return enumerate_automorphisms(domain).order == 1
