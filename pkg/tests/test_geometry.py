import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slitmap.errors import BoundaryProximityError, InvalidDomainError
from slitmap.geometry import (
    INF,
    BoundaryCurve,
    Circle,
    CircularDomain,
    MultiplyConnectedDomain,
    circular_to_curves,
    hausdorff_distance,
    parse_domain_spec,
    perpendicular_circle,
    read_domain_spec,
    spherical_distance,
)

finite = st.complex_numbers(max_magnitude=50.0, allow_nan=False, allow_infinity=False)


class TestSphericalDistance:
    def test_identity(self):
        assert spherical_distance(0j, 0j) == 0.0

    def test_zero_to_infinity(self):
        assert spherical_distance(0j, INF) == pytest.approx(2.0)

    def test_antipodal_unit_points(self):
        # chordal formula 2|z-w|/(sqrt(1+|z|^2) sqrt(1+|w|^2)) at (1, -1)
        assert spherical_distance(1.0 + 0j, -1.0 + 0j) == pytest.approx(2.0)

    def test_infinity_formula(self):
        z = 3.0 + 4.0j
        assert spherical_distance(z, INF) == pytest.approx(2.0 / np.sqrt(26.0))

    @given(finite, finite, finite)
    @settings(max_examples=60, deadline=None)
    def test_triangle_inequality(self, a, b, c):
        assert spherical_distance(a, c) <= (
            spherical_distance(a, b) + spherical_distance(b, c) + 1e-12)

    @given(finite, finite)
    @settings(max_examples=60, deadline=None)
    def test_symmetric_and_bounded(self, a, b):
        d = spherical_distance(a, b)
        assert d == pytest.approx(spherical_distance(b, a))
        assert 0.0 <= d <= 2.0 + 1e-12


class TestPerpendicularCircle:
    @pytest.mark.parametrize("x1,x2,center,radius", [
        (-1.0, 1.0, 0.0, 1.0),
        (0.25, 0.75, 0.5, 0.25),
        (0.1, 0.4, 0.25, 0.15),
    ])
    def test_midpoint_halfwidth(self, x1, x2, center, radius):
        c = perpendicular_circle(x1, x2)
        assert c.center == pytest.approx(complex(center))
        assert c.radius == pytest.approx(radius)

    def test_invalid_interval(self):
        with pytest.raises(ValueError):
            perpendicular_circle(1.0, -1.0)


class TestHausdorff:
    def test_identical_circle_samples(self):
        pts = np.exp(2j * np.pi * np.arange(64) / 64)
        assert hausdorff_distance(pts, pts) == 0.0

    def test_concentric_circles(self):
        t = 2j * np.pi * np.arange(256) / 256
        assert hausdorff_distance(np.exp(t), 0.9 * np.exp(t)) \
            == pytest.approx(0.1, abs=2e-3)

    def test_two_point_sets(self):
        # brute force over {0} x {3, 4i}: directed sup-inf both equal 4
        assert hausdorff_distance([0j], [3.0 + 0j, 4j]) == pytest.approx(4.0)

    def test_brute_force_oracle(self, rng):
        a = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        b = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        d = np.abs(a[:, None] - b[None, :])
        expect = max(d.min(axis=1).max(), d.min(axis=0).max())
        assert hausdorff_distance(a, b) == pytest.approx(expect, abs=1e-14)

    def test_zero_iff_equal(self, rng):
        a = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        assert hausdorff_distance(a, a) == 0.0
        assert hausdorff_distance(a, a + 0.5) > 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            hausdorff_distance([], [1j])


class TestBoundaryCurve:
    def test_node_count_validation(self):
        with pytest.raises(InvalidDomainError):
            BoundaryCurve(np.exp(2j * np.pi * np.arange(10) / 10))
        with pytest.raises(InvalidDomainError):
            BoundaryCurve(np.exp(2j * np.pi * np.arange(17) / 17))

    def test_self_intersection_rejected(self):
        t = 2.0 * np.pi * np.arange(64) / 64
        figure_eight = np.sin(2 * t) + 1j * np.sin(t)
        with pytest.raises(InvalidDomainError):
            BoundaryCurve(figure_eight)

    def test_orientation(self):
        t = 2.0 * np.pi * np.arange(32) / 32
        assert BoundaryCurve(np.exp(1j * t)).orientation == "positive"
        assert BoundaryCurve(np.exp(-1j * t)).orientation == "negative"

    def test_winding(self):
        t = 2.0 * np.pi * np.arange(64) / 64
        c = BoundaryCurve(np.exp(1j * t))
        assert c.winding(0.2 + 0.1j) == 1
        assert c.winding(2.0 + 0j) == 0


@pytest.fixture(scope="module")
def annulus():
    return circular_to_curves(
        CircularDomain(Circle(0j, 1.0), [Circle(0j, 0.25)]), 256)


class TestContains:
    def test_inside(self, annulus):
        assert annulus.contains(0.6 + 0j) is True

    def test_in_hole(self, annulus):
        assert annulus.contains(0.1 + 0j) is False

    def test_outside(self, annulus):
        assert annulus.contains(2.0 + 0j) is False

    def test_boundary_proximity(self, annulus):
        with pytest.raises(BoundaryProximityError):
            annulus.contains(1.0 + 1e-9j)

    def test_hole_relabeling_invariance(self):
        c1 = Circle(0.45 + 0j, 0.2)
        c2 = Circle(-0.45 + 0j, 0.2)
        d_a = circular_to_curves(CircularDomain(Circle(0j, 1.0), [c1, c2]), 64)
        d_b = circular_to_curves(CircularDomain(Circle(0j, 1.0), [c2, c1]), 64)
        for z in (0.0 + 0.5j, 0.45 + 0.05j, -0.45 - 0.05j, 0.05 + 0j):
            assert d_a.contains(z) == d_b.contains(z)


class TestCircularToCurves:
    def test_annulus_node_convention(self):
        d = circular_to_curves(
            CircularDomain(Circle(0j, 1.0), [Circle(0j, 0.25)]), 64)
        assert d.m == 2
        assert d.outer.nodes[0] == pytest.approx(1.0 + 0j)
        assert d.outer.orientation == "positive"
        assert d.holes[0].orientation == "negative"

    def test_t_domain(self):
        cd = CircularDomain(Circle(0j, 1.0),
                            [Circle(0j, 3 / 16), Circle(0.5 + 0j, 0.25)])
        d = circular_to_curves(cd, 128)
        assert d.m == 3

    def test_bad_node_count(self):
        with pytest.raises(InvalidDomainError):
            circular_to_curves(CircularDomain(Circle(0j, 1.0)), 10)

    def test_least_squares_fit_recovery(self):
        # independent oracle: algebraic (Kasa) least-squares circle fit
        cd = CircularDomain(Circle(0.3 - 0.2j, 0.7))
        d = circular_to_curves(cd, 64)
        pts = d.outer.value(np.linspace(0, 2 * np.pi, 101)[:-1])
        x, y = pts.real, pts.imag
        a = np.column_stack([2 * x, 2 * y, np.ones_like(x)])
        sol, *_ = np.linalg.lstsq(a, x * x + y * y, rcond=None)
        center = complex(sol[0], sol[1])
        radius = np.sqrt(sol[2] + abs(center) ** 2)
        assert abs(center - (0.3 - 0.2j)) < 1e-12
        assert abs(radius - 0.7) < 1e-12


class TestDomainValidation:
    def test_hole_outside_rejected(self):
        with pytest.raises(InvalidDomainError):
            CircularDomain(Circle(0j, 1.0), [Circle(2.0 + 0j, 0.3)])

    def test_overlapping_holes_rejected(self):
        with pytest.raises(InvalidDomainError):
            CircularDomain(Circle(0j, 1.0),
                           [Circle(0.2 + 0j, 0.3), Circle(-0.2 + 0j, 0.3)])

    def test_crossing_components_rejected(self):
        t = 2.0 * np.pi * np.arange(64) / 64
        outer = BoundaryCurve(np.exp(1j * t))
        crossing = BoundaryCurve(0.8 + 0.5 * np.exp(-1j * t))
        with pytest.raises(InvalidDomainError):
            MultiplyConnectedDomain(outer, [crossing])

    def test_crossing_holes_rejected(self):
        t = 2.0 * np.pi * np.arange(64) / 64
        outer = BoundaryCurve(np.exp(1j * t))
        h1 = BoundaryCurve(0.15 + 0.3 * np.exp(-1j * t))
        h2 = BoundaryCurve(-0.15 + 0.3 * np.exp(-1j * t))
        with pytest.raises(InvalidDomainError):
            MultiplyConnectedDomain(outer, [h1, h2])

    def test_wrong_orientation_rejected(self):
        t = 2.0 * np.pi * np.arange(64) / 64
        outer = BoundaryCurve(np.exp(1j * t))
        hole_ccw = BoundaryCurve(0.25 * np.exp(1j * t))
        with pytest.raises(InvalidDomainError):
            MultiplyConnectedDomain(outer, [hole_ccw])


class TestDomainSpecIO:
    def test_circular_roundtrip(self, tmp_path):
        spec = {"type": "circular",
                "outer": {"center": [0.0, 0.0], "radius": 1.0},
                "holes": [{"center": [0.5, 0.0], "radius": 0.25}]}
        path = tmp_path / "d.json"
        path.write_text(json.dumps(spec))
        d = read_domain_spec(path)
        assert isinstance(d, CircularDomain)
        assert d.holes[0].center == 0.5 + 0j

    def test_curves_spec(self):
        t = 2.0 * np.pi * np.arange(64) / 64
        comp = lambda pts: {"points": [[z.real, z.imag] for z in pts]}
        spec = {"type": "curves",
                "components": [comp(np.exp(1j * t)), comp(0.25 * np.exp(-1j * t))]}
        d = parse_domain_spec(spec)
        assert isinstance(d, MultiplyConnectedDomain)
        assert d.m == 2

    def test_first_violation_reported(self):
        spec = {"type": "circular",
                "outer": {"center": [0.0, 0.0], "radius": 1.0},
                "holes": [{"center": [0.0, 0.0], "radius": -0.25}]}
        with pytest.raises(InvalidDomainError, match="radius"):
            parse_domain_spec(spec)

    def test_unknown_type(self):
        with pytest.raises(InvalidDomainError):
            parse_domain_spec({"type": "polygon"})
