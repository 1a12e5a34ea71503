"""Invariant battery behind the `verify` subcommand.

Each check exercises one contract of the toolkit on shipped fixtures at a
node count that keeps the whole battery around a minute. The checks mirror
the per-module invariants; the full acceptance suite lives in the test
tree and pins tighter tolerances.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Tuple

import numpy as np

from .circular_aut import (
    ThreeConnectedCircular,
    aut_group_T,
    enumerate_automorphisms,
    tau_map,
)
from .dirichlet import DirichletSolver, period_matrix
from .families import biholomorphism_jump, counterexample_domain
from .geometry import (
    Circle,
    CircularDomain,
    circular_to_curves,
    hausdorff_distance,
    spherical_distance,
)
from .koebe import canonical_map
from .mobius import MobiusMap, from_triple, image_of_circle, symmetric_point

__all__ = ["run_all", "CHECKS", "CheckResult"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _annulus(n: int = 128, rho: float = 0.25):
    return circular_to_curves(
        CircularDomain(Circle(0j, 1.0), [Circle(0j, rho)]), n)


def _t_domain(n: int = 128, r: float = 0.25):
    return circular_to_curves(
        CircularDomain(Circle(0j, 1.0),
                       [Circle(0j, 3 / 16), Circle(0.5 + 0j, r)]), n)


def check_annulus_identity(rng) -> Tuple[bool, str]:
    d = _annulus(128)
    k = canonical_map(d, 1.0 + 0j, 0.25 + 0j)
    rr = np.linspace(0.3, 0.9, 5)
    th = 2.0 * np.pi * np.arange(8) / 8
    grid = (rr[:, None] * np.exp(1j * th[None, :])).ravel()
    err = float(np.max(np.abs(k.eval(grid) - grid)))
    r2err = abs(k.moduli.r2 - 0.25)
    ok = err < 1e-7 and r2err < 1e-8
    return ok, f"max|K-z|={err:.2e}, |r2-0.25|={r2err:.2e}"


def check_green_and_signs(rng) -> Tuple[bool, str]:
    worst = 0.0
    for d in (_annulus(128), _t_domain(128)):
        solver = DirichletSolver(d)
        pm = period_matrix(solver)  # raises on sign/Green violations
        worst = max(worst, float(np.max(np.abs(pm.full.sum(axis=0)))))
    return worst <= 1e-9, f"max|sum flux|={worst:.2e}"


def check_maximum_principle(rng) -> Tuple[bool, str]:
    d = _t_domain(128)
    solver = DirichletSolver(d)
    lo, hi = 1.0, 0.0
    grid = d.interior_grid(80, margin=0.2)
    for i in range(d.m):
        vals = solver.harmonic_measure(i).eval_interior(grid)
        lo = min(lo, float(np.min(vals)))
        hi = max(hi, float(np.max(vals)))
    ok = lo >= -1e-8 and hi <= 1.0 + 1e-8
    return ok, f"range [{lo:.2e}, {1 - hi:.2e} below 1]"


def check_measure_partition(rng) -> Tuple[bool, str]:
    d = _t_domain(128)
    solver = DirichletSolver(d)
    grid = d.interior_grid(40, margin=0.2)
    total = sum(solver.harmonic_measure(i).eval_interior(grid) for i in range(d.m))
    err = float(np.max(np.abs(total - 1.0)))
    return err < 1e-9, f"max|sum u_i - 1|={err:.2e}"


def check_mobius_group_laws(rng) -> Tuple[bool, str]:
    worst = 0.0
    for _ in range(10):
        pts = rng.standard_normal(9) + 1j * rng.standard_normal(9)
        m1 = from_triple(pts[0], pts[1], pts[2])
        m2 = from_triple(pts[3], pts[4], pts[5])
        m3 = from_triple(pts[6], pts[7], pts[8])
        worst = max(worst, ((m1 @ m2) @ m3).action_distance(m1 @ (m2 @ m3)))
        worst = max(worst, (m1 @ m1.inverse()).action_distance(
            MobiusMap(1, 0, 0, 1)))
    return worst < 1e-12, f"max action defect {worst:.2e}"


def check_mobius_continuity(rng) -> Tuple[bool, str]:
    base = (0.3 + 0.1j, 1.2 - 0.4j, -0.7 + 0.9j)
    phi = from_triple(*base)
    grid = [complex(x, y) for x in np.linspace(-2, 2, 8)
            for y in np.linspace(-2, 2, 8)]
    prev = None
    ratios = []
    for k in range(1, 5):
        eps = 10.0 ** (-k)
        phik = from_triple(base[0] + eps, base[1] + 1j * eps, base[2] - eps)
        err = max(spherical_distance(phik(z), phi(z)) for z in grid)
        if prev is not None:
            ratios.append(err / prev)
        prev = err
    ok = all(r < 0.2 for r in ratios)
    return ok, f"decay ratios {['%.2g' % r for r in ratios]}"


def check_symmetric_involution(rng) -> Tuple[bool, str]:
    c = Circle(0.3 - 0.2j, 0.8)
    worst = 0.0
    for _ in range(20):
        z = complex(rng.standard_normal(), rng.standard_normal())
        worst = max(worst, abs(symmetric_point(c, symmetric_point(c, z)) - z))
    return worst < 1e-10, f"max involution defect {worst:.2e}"


def check_tau_classification(rng) -> Tuple[bool, str]:
    t = ThreeConnectedCircular(3 / 16, 0.5, 0.25)
    g = aut_group_T(t)
    e = enumerate_automorphisms(t.domain())
    ok = g.order == 2 and g.classification == "tau-only" and g.action_equals(e)
    return ok, f"order {g.order}, tag {g.classification}, enum agrees: {g.action_equals(e)}"


def check_rigidity(rng) -> Tuple[bool, str]:
    t = ThreeConnectedCircular(3 / 16, 0.5, 0.26)
    e = enumerate_automorphisms(t.domain())
    return e.order == 1, f"order {e.order}"


def check_moduli_invariance(rng) -> Tuple[bool, str]:
    d = _t_domain(128)
    k = canonical_map(d, 1.0 + 0j, 3 / 16 + 0j)
    w = 0.15 - 0.1j
    m = MobiusMap.from_coefficients(1.0, -w, -np.conj(w), 1.0)
    src = CircularDomain(Circle(0j, 1.0),
                         [Circle(0j, 3 / 16), Circle(0.5 + 0j, 0.25)])
    holes = [image_of_circle(m, h) for h in src.holes]
    dm = circular_to_curves(CircularDomain(Circle(0j, 1.0), holes), 128)
    km = canonical_map(dm, complex(m(1.0 + 0j)), complex(m(3 / 16 + 0j)))
    dr2 = abs(k.moduli.r2 - km.moduli.r2) / k.moduli.r2
    a, al, be = k.moduli.slits[0]
    b, al2, be2 = km.moduli.slits[0]
    dr3 = abs(a - b) / a
    dlen = abs((be - al) - (be2 - al2))
    ok = dr2 < 1e-5 and dr3 < 1e-5 and dlen < 1e-5
    return ok, f"rel dr2={dr2:.2e}, dr3={dr3:.2e}, dlen={dlen:.2e}"


def check_rotation_uniqueness(rng) -> Tuple[bool, str]:
    d = _t_domain(128)
    k1 = canonical_map(d, 1.0 + 0j, 3 / 16 + 0j)
    k2 = canonical_map(d, 1j, 3 / 16 + 0j)
    grid = d.interior_grid(30)
    v1 = k1.eval(grid)
    v2 = k2.eval(grid)
    mu = v2[0] / v1[0]
    err = float(np.max(np.abs(v2 - mu * v1)))
    ok = abs(abs(mu) - 1.0) < 1e-7 and err < 1e-7
    return ok, f"|mu|-1={abs(mu) - 1:.2e}, sup defect {err:.2e}"


def check_marking_covariance(rng) -> Tuple[bool, str]:
    d = _t_domain(128)
    k1 = canonical_map(d, 1.0 + 0j, 3 / 16 + 0j)
    k2 = canonical_map(d, 1.0 + 0j, -3 / 16 + 0j)
    dr2 = abs(k1.moduli.r2 - k2.moduli.r2)
    s1, s2 = k1.moduli.slits[0], k2.moduli.slits[0]
    diff = max(abs(s1[0] - s2[0]), abs(s1[1] - s2[1]), abs(s1[2] - s2[2]))
    ok = dr2 < 1e-8 and diff < 1e-8
    return ok, f"dr2={dr2:.2e}, slit diff={diff:.2e}"


def check_hausdorff_family(rng) -> Tuple[bool, str]:
    lams = [0.4, 0.5, 0.7]
    worst = 0.0
    for la, lb in zip(lams, lams[1:]):
        da, db = counterexample_domain(la), counterexample_domain(lb)
        pa = np.concatenate([c.sample(256) for c in da.circles])
        pb = np.concatenate([c.sample(256) for c in db.circles])
        bound = abs(np.exp(-4 / la ** 2) - np.exp(-4 / lb ** 2)) + 1e-3
        worst = max(worst, hausdorff_distance(pa, pb) - bound)
    return worst <= 0.0, f"max excess over bound {worst:.2e}"


def check_counterexample_jump(rng) -> Tuple[bool, str]:
    rep = biholomorphism_jump([0.3, 0.4], [-0.4, -0.3], -0.9,
                              nodes=96, grid_size=6)
    ok = (rep.jump > 0.6 and rep.sup_diff_pos < 1e-4
          and rep.sup_diff_neg < 1e-4 and rep.is_discontinuous)
    return ok, f"jump={rep.jump:.4f}, branch noise " \
               f"{max(rep.sup_diff_pos, rep.sup_diff_neg):.2e}"


def check_tau_involution_value(rng) -> Tuple[bool, str]:
    tau = tau_map(3 / 16)
    err = abs(complex(tau(0.25 + 0j)) - 0.75)
    return err < 1e-15, f"|tau(1/4)-3/4|={err:.2e}"


CHECKS: List[Tuple[str, Callable]] = [
    ("annulus-identity", check_annulus_identity),
    ("green-identity-and-signs", check_green_and_signs),
    ("maximum-principle", check_maximum_principle),
    ("measure-partition-of-unity", check_measure_partition),
    ("mobius-group-laws", check_mobius_group_laws),
    ("mobius-triple-continuity", check_mobius_continuity),
    ("symmetric-point-involution", check_symmetric_involution),
    ("tau-classification", check_tau_classification),
    ("rigidity-perturbed", check_rigidity),
    ("moduli-conformal-invariance", check_moduli_invariance),
    ("rotation-uniqueness", check_rotation_uniqueness),
    ("marking-covariance", check_marking_covariance),
    ("hausdorff-family-continuity", check_hausdorff_family),
    ("counterexample-jump", check_counterexample_jump),
    ("tau-involution-value", check_tau_involution_value),
]


def run_all(seed: int = 0) -> List[CheckResult]:
    rng = np.random.default_rng(seed)
    results = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a raised invariant is a failed check
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail))
    return results
