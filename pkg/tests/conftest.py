"""Shared fixtures: the shipped test domains and their canonical maps.

Session scope keeps the expensive dense solves to one per domain across the
whole run.
"""

import numpy as np
import pytest

from slitmap.dirichlet import DirichletSolver
from slitmap.geometry import Circle, CircularDomain, circular_to_curves
from slitmap.koebe import canonical_map
from slitmap.mobius import MobiusMap, image_of_circle

MU, A, R = 3.0 / 16.0, 0.5, 0.25


def t_circular(r=R):
    return CircularDomain(Circle(0j, 1.0), [Circle(0j, MU), Circle(A + 0j, r)])


def eccentric_annulus(rho=0.5, w=0.45):
    """Mobius image of the concentric annulus A_rho: exact harmonic measure
    log|M^{-1}(z)| / log rho."""
    m = MobiusMap.from_coefficients(1.0, -w, -np.conj(w), 1.0)
    hole = image_of_circle(m, Circle(0j, rho))
    return CircularDomain(Circle(0j, 1.0), [hole]), m


def disk_automorphism(w: complex, theta: float = 0.0) -> MobiusMap:
    rot = np.exp(1j * theta)
    return MobiusMap.from_coefficients(rot, -rot * w, -np.conj(w), 1.0)


def pushforward(domain: CircularDomain, m: MobiusMap) -> CircularDomain:
    holes = [image_of_circle(m, h) for h in domain.holes]
    outer = image_of_circle(m, domain.outer)
    return CircularDomain(outer, holes)


def shipped_fixtures(nodes=256):
    """The shipped multiply connected test domains (name, MCD)."""
    from slitmap.families import general_counterexample_domain

    ecc, _ = eccentric_annulus()
    push = pushforward(t_circular(), disk_automorphism(0.12 - 0.08j, 0.7))
    out = [
        ("annulus", CircularDomain(Circle(0j, 1.0), [Circle(0j, 0.25)])),
        ("eccentric-annulus", ecc),
        ("t-symmetric", t_circular()),
        ("t-perturbed", t_circular(0.26)),
        ("t-pushforward", push),
        ("four-connected", general_counterexample_domain(
            MU, [0.25, 0.3, 0.625, 0.75], 0.01)),
    ]
    return [(name, circular_to_curves(cd, nodes)) for name, cd in out]


@pytest.fixture(scope="session")
def annulus_mcd():
    return circular_to_curves(
        CircularDomain(Circle(0j, 1.0), [Circle(0j, 0.25)]), 256)


@pytest.fixture(scope="session")
def annulus_map(annulus_mcd):
    return canonical_map(annulus_mcd, 1.0 + 0j, 0.25 + 0j)


@pytest.fixture(scope="session")
def t_mcd():
    return circular_to_curves(t_circular(), 256)


@pytest.fixture(scope="session")
def t_solver(t_mcd):
    return DirichletSolver(t_mcd)


@pytest.fixture(scope="session")
def t_map(t_mcd, t_solver):
    return canonical_map(t_mcd, 1.0 + 0j, MU + 0j, solver=t_solver)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)
