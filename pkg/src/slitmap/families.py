"""Parameterized domain families: the discontinuity counterexample, moduli
sweeps over a parameter grid, finite-difference smoothness diagnostics, and
the biholomorphism jump witness.

The central family is D(lam) = T(3/16, 1/2, 1/4 + exp(-4/lam^2)) together
with its twin that follows D(lam) for lam >= 0 and the involution image
tau D(lam) for lam < 0. Every fiber of either family is rigid except at
lam = 0, where the twin branches agree as sets; the marked biholomorphisms
per fiber are Id on one branch and tau on the other, so the family of
biholomorphisms jumps at lam = 0 except at the fixed point -sqrt(mu).
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .circular_aut import tau_map
from .errors import FamilyRangeError, InvalidDomainError, SlitmapError
from .geometry import (
    Circle,
    CircularDomain,
    MultiplyConnectedDomain,
    circular_to_curves,
    perpendicular_circle,
)
from .koebe import Biholomorphism, SlitAnnulus, canonical_map, map_between
from .mobius import image_of_circle

__all__ = [
    "COUNTEREXAMPLE_MU",
    "COUNTEREXAMPLE_A",
    "COUNTEREXAMPLE_R",
    "DomainFamily",
    "FamilySweep",
    "SmoothnessReport",
    "JumpReport",
    "flat_bump",
    "counterexample_domain",
    "tilde_counterexample_domain",
    "general_counterexample_domain",
    "counterexample_family",
    "annulus_family",
    "sweep_moduli",
    "smoothness_report",
    "biholomorphism_jump",
]

COUNTEREXAMPLE_MU = 3.0 / 16.0
COUNTEREXAMPLE_A = 0.5
COUNTEREXAMPLE_R = 0.25

JUMP_FACTOR = 100.0  # cross-zero gap must exceed this times the branch noise


def flat_bump(lam: float) -> float:
    """exp(-4 / lam^2) with the flat value 0 at lam = 0.

    Every derivative vanishes at 0; in float64 the expression underflows to
    exactly 0 for |lam| < 0.06 anyway, the branch just formalizes it.
    """
    if lam == 0.0:
        return 0.0
    return float(np.exp(-4.0 / (lam * lam)))


@dataclass(frozen=True)
class DomainFamily:
    """lam -> domain generator over a closed parameter interval."""

    generator: Callable[[float], Union[CircularDomain, MultiplyConnectedDomain]]
    lam_range: Tuple[float, float]
    label: str

    def __call__(self, lam: float):
        lo, hi = self.lam_range
        if not lo <= lam <= hi:
            raise FamilyRangeError(
                f"lambda {lam} outside [{lo}, {hi}] for family {self.label!r}")
        return self.generator(lam)


def counterexample_domain(lam: float) -> CircularDomain:
    """T(3/16, 1/2, 1/4 + exp(-4/lam^2)) for lam in [-1, 1]."""
    if not -1.0 <= lam <= 1.0:
        raise FamilyRangeError(f"lambda {lam} outside [-1, 1]")
    return CircularDomain(
        Circle(0j, 1.0),
        [Circle(0j, COUNTEREXAMPLE_MU),
         Circle(complex(COUNTEREXAMPLE_A), COUNTEREXAMPLE_R + flat_bump(lam))],
    )


def tilde_counterexample_domain(lam: float) -> CircularDomain:
    """The twin family: equal to counterexample_domain for lam >= 0 and its
    image under tau: z -> mu/z for lam < 0 (at 0 the branches agree as sets,
    since the limit domain is tau symmetric)."""
    if not -1.0 <= lam <= 1.0:
        raise FamilyRangeError(f"lambda {lam} outside [-1, 1]")
    if lam >= 0.0:
        return counterexample_domain(lam)
    tau = tau_map(COUNTEREXAMPLE_MU)
    hole = Circle(complex(COUNTEREXAMPLE_A), COUNTEREXAMPLE_R + flat_bump(lam))
    img = image_of_circle(tau, hole)
    if not isinstance(img, Circle):
        raise InvalidDomainError("tau image of the moving hole is not a circle")
    return CircularDomain(Circle(0j, 1.0), [Circle(0j, COUNTEREXAMPLE_MU), img])


def general_counterexample_domain(mu: float, rs: Sequence[float],
                                  eps: float) -> CircularDomain:
    """Higher-connectivity analogue: the domain bounded by S_1(0), S_mu(0),
    and the circles orthogonal to the real axis over consecutive pairs of
    the perturbed points (rs[0] + eps, rs[1] + eps^2, rs[2], ...).

    The unperturbed points must be strictly increasing in (mu, 1) and
    symmetric under z -> mu/z as a set (full order reversal
    rs[n-1-i] * rs[i] = mu); eps = 0 keeps the symmetry, eps > 0 breaks it
    on the first circle only.
    """
    rs = [float(x) for x in rs]
    n = len(rs)
    if n < 2 or n % 2 != 0:
        raise ValueError(f"need an even number (>= 2) of points, got {n}")
    if not all(rs[i] < rs[i + 1] for i in range(n - 1)):
        raise ValueError("points must be strictly increasing")
    if not (mu < rs[0] and rs[-1] < 1.0):
        raise ValueError(f"points must lie in ({mu}, 1)")
    for i in range(n):
        if abs(rs[n - 1 - i] * rs[i] - mu) > 1e-10:
            raise ValueError(
                f"points are not symmetric under z -> mu/z: "
                f"rs[{n - 1 - i}] * rs[{i}] = {rs[n - 1 - i] * rs[i]:.12g} != {mu}")
    if eps < 0.0:
        raise ValueError("eps must be nonnegative")
    pert = list(rs)
    pert[0] += eps
    pert[1] += eps * eps
    if not all(pert[i] < pert[i + 1] for i in range(n - 1)):
        raise ValueError("perturbation destroys the ordering of the points")
    if not (mu < pert[0] and pert[-1] < 1.0):
        raise ValueError("perturbed points leave the annulus (mu, 1)")
    holes = [Circle(0j, mu)]
    for i in range(0, n, 2):
        holes.append(perpendicular_circle(pert[i], pert[i + 1]))
    return CircularDomain(Circle(0j, 1.0), holes)


def counterexample_family() -> DomainFamily:
    return DomainFamily(counterexample_domain, (-1.0, 1.0), "counterexample")


def annulus_family(rho0: float = 0.2, slope: float = 0.1,
                   lam_range: Tuple[float, float] = (0.0, 1.0)) -> DomainFamily:
    """Concentric annuli with inner radius rho0 + slope * lam."""

    def gen(lam: float) -> CircularDomain:
        return CircularDomain(Circle(0j, 1.0), [Circle(0j, rho0 + slope * lam)])

    return DomainFamily(gen, lam_range, f"annulus:{rho0}+{slope}*lam")


def _arg_zero_markings(domain: CircularDomain) -> Tuple[complex, complex]:
    """Deterministic markings: the argument-0 point of the outer circle and
    of the first hole circle."""
    a1 = domain.outer.center + domain.outer.radius
    a2 = domain.holes[0].center + domain.holes[0].radius
    return complex(a1), complex(a2)


@dataclass
class FamilySweep:
    """Moduli records over a strictly increasing lambda grid."""

    family: str
    grid: Tuple[float, ...]
    moduli: Tuple[Optional[SlitAnnulus], ...]
    residuals: Tuple[Optional[float], ...]
    errors: Dict[float, str] = field(default_factory=dict)

    def __post_init__(self):
        g = np.asarray(self.grid)
        if g.size < 1 or not np.all(np.diff(g) > 0):
            raise ValueError("sweep grid must be strictly increasing")
        if len(self.moduli) != g.size:
            raise ValueError("one moduli record per grid point required")

    def column(self, name: str) -> np.ndarray:
        """Extract a moduli column: 'r2' or 'r3'/'alpha3'/'beta3', ... with
        slit indices starting at 3."""
        vals = []
        for rec in self.moduli:
            if rec is None:
                vals.append(np.nan)
                continue
            if name == "r2":
                vals.append(rec.r2)
                continue
            kind = name.rstrip("0123456789")
            idx = int(name[len(kind):]) - 3
            if kind not in ("r", "alpha", "beta") or not 0 <= idx < len(rec.slits):
                raise KeyError(f"unknown moduli column {name!r}")
            vals.append(rec.slits[idx][("r", "alpha", "beta").index(kind)])
        return np.asarray(vals)

    def column_names(self) -> List[str]:
        nslits = max((len(r.slits) for r in self.moduli if r is not None), default=0)
        names = ["r2"]
        for j in range(nslits):
            names.extend([f"r{j + 3}", f"alpha{j + 3}", f"beta{j + 3}"])
        return names


def _thread_count(requested: Optional[int] = None) -> int:
    if requested is not None:
        return max(1, requested)
    env = os.environ.get("SLITMAP_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(4, os.cpu_count() or 1)


def sweep_moduli(family: DomainFamily, grid: Sequence[float], nodes: int = 256,
                 threads: Optional[int] = None) -> FamilySweep:
    """Canonical-map moduli at each grid point with per-lambda arg-0
    markings. Per-lambda failures are recorded and the sweep continues."""
    grid = [float(g) for g in grid]

    def work(lam: float):
        domain = family(lam)
        if isinstance(domain, CircularDomain):
            a1, a2 = _arg_zero_markings(domain)
            mcd = circular_to_curves(domain, nodes)
        else:
            mcd = domain
            a1 = complex(mcd.outer.nodes[0])
            a2 = complex(mcd.holes[0].nodes[0])
        k = canonical_map(mcd, a1, a2)
        return k.moduli, float(k.diagnostics["residual"])

    results: List[Optional[Tuple[SlitAnnulus, float]]] = [None] * len(grid)
    errors: Dict[float, str] = {}
    nthreads = _thread_count(threads)
    if nthreads > 1 and len(grid) > 1:
        with ThreadPoolExecutor(max_workers=nthreads) as pool:
            futs = {i: pool.submit(work, lam) for i, lam in enumerate(grid)}
            for i, fut in futs.items():
                try:
                    results[i] = fut.result()
                except SlitmapError as exc:
                    errors[grid[i]] = str(exc)
    else:
        for i, lam in enumerate(grid):
            try:
                results[i] = work(lam)
            except SlitmapError as exc:
                errors[lam] = str(exc)
    return FamilySweep(
        family=family.label,
        grid=tuple(grid),
        moduli=tuple(r[0] if r else None for r in results),
        residuals=tuple(r[1] if r else None for r in results),
        errors=errors,
    )


@dataclass(frozen=True)
class SmoothnessReport:
    """Central-difference diagnostics of the moduli curves on a uniform grid."""

    order: int
    step: float
    columns: Dict[str, np.ndarray]
    max_quotient: Dict[str, float]
    flags: Dict[str, Tuple[int, ...]]


def smoothness_report(sweep: FamilySweep, order: int = 1) -> SmoothnessReport:
    """Finite-difference quotients of each moduli column; grid must be
    uniform, order 1 or 2. Jumps above 10x the median quotient are flagged
    as discontinuity candidates."""
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    g = np.asarray(sweep.grid)
    steps = np.diff(g)
    if g.size < order + 1:
        raise ValueError("grid too short for the requested order")
    if not np.allclose(steps, steps[0], rtol=1e-12, atol=1e-14):
        raise ValueError("smoothness report requires a uniform grid")
    if any(r is None for r in sweep.moduli):
        raise ValueError("sweep contains failed grid points")
    h = float(steps[0])
    columns: Dict[str, np.ndarray] = {}
    maxq: Dict[str, float] = {}
    flags: Dict[str, Tuple[int, ...]] = {}
    for name in sweep.column_names():
        v = sweep.column(name)
        if order == 1:
            q = (v[2:] - v[:-2]) / (2.0 * h)
        else:
            q = (v[2:] - 2.0 * v[1:-1] + v[:-2]) / (h * h)
        columns[name] = q
        maxq[name] = float(np.max(np.abs(q))) if q.size else 0.0
        med = float(np.median(np.abs(q))) if q.size else 0.0
        bad = tuple(int(i) for i in np.nonzero(np.abs(q) > 10.0 * med)[0]) \
            if med > 0 else ()
        flags[name] = bad
    return SmoothnessReport(order=order, step=h, columns=columns,
                            max_quotient=maxq, flags=flags)


@dataclass(frozen=True)
class JumpReport:
    """One-sided biholomorphism limits at a probe across lambda = 0."""

    probe: complex
    lambdas_pos: Tuple[float, ...]
    lambdas_neg: Tuple[float, ...]
    values_pos: Tuple[complex, ...]
    values_neg: Tuple[complex, ...]
    sup_diff_pos: float
    sup_diff_neg: float
    limit_pos: complex
    limit_neg: complex
    jump: float
    reference_jump: float
    is_discontinuous: bool

    def as_dict(self) -> dict:
        return {
            "probe": [self.probe.real, self.probe.imag],
            "lambdas_pos": list(self.lambdas_pos),
            "lambdas_neg": list(self.lambdas_neg),
            "values_pos": [[v.real, v.imag] for v in self.values_pos],
            "values_neg": [[v.real, v.imag] for v in self.values_neg],
            "sup_diff_pos": self.sup_diff_pos,
            "sup_diff_neg": self.sup_diff_neg,
            "limit_pos": [self.limit_pos.real, self.limit_pos.imag],
            "limit_neg": [self.limit_neg.real, self.limit_neg.imag],
            "jump": self.jump,
            "reference_jump": self.reference_jump,
            "is_discontinuous": self.is_discontinuous,
        }


def _branch_biholomorphism(lam: float, nodes: int,
                           grid_size: int) -> Biholomorphism:
    """F(lam): the marked biholomorphism from D(lam) onto its twin, with the
    per-branch markings that make each one-sided family continuous."""
    d = counterexample_domain(lam)
    dt = tilde_counterexample_domain(lam)
    a1, a2 = _arg_zero_markings(d)
    if lam >= 0.0:
        marks_t = (a1, a2)
    else:
        tau = tau_map(COUNTEREXAMPLE_MU)
        marks_t = (complex(tau(a1)), complex(tau(a2)))
    return map_between(
        circular_to_curves(d, nodes),
        circular_to_curves(dt, nodes),
        (a1, a2), marks_t, grid_size=grid_size)


def biholomorphism_jump(grid_pos: Sequence[float], grid_neg: Sequence[float],
                        probe: complex, nodes: int = 256,
                        grid_size: int = 10) -> JumpReport:
    """Evaluate the per-lambda biholomorphisms of the counterexample pair at
    a probe on both sides of 0 and report the one-sided limits, the
    successive intra-branch differences, and the cross-zero jump."""
    probe = complex(probe)
    pos = sorted(float(x) for x in grid_pos)
    neg = sorted(float(x) for x in grid_neg)
    if not pos or not neg or pos[0] <= 0.0 or neg[-1] >= 0.0:
        raise ValueError("need nonempty grids with grid_pos > 0 and grid_neg < 0")
    for lam in list(pos) + list(neg):
        if not counterexample_domain(lam).contains_point(probe):
            raise ValueError(f"probe {probe} is outside the domain at lambda={lam}")
        if not tilde_counterexample_domain(lam).contains_point(probe):
            raise ValueError(f"probe {probe} is outside the twin at lambda={lam}")
    vals_pos = [complex(_branch_biholomorphism(lam, nodes, grid_size)(probe))
                for lam in pos]
    vals_neg = [complex(_branch_biholomorphism(lam, nodes, grid_size)(probe))
                for lam in neg]
    sup_pos = max((abs(b - a) for a, b in zip(vals_pos, vals_pos[1:])), default=0.0)
    sup_neg = max((abs(b - a) for a, b in zip(vals_neg, vals_neg[1:])), default=0.0)
    limit_pos = vals_pos[0]            # smallest positive lambda
    limit_neg = vals_neg[-1]           # negative lambda nearest zero
    jump = abs(limit_pos - limit_neg)
    tau = tau_map(COUNTEREXAMPLE_MU)
    reference = abs(probe - complex(tau(probe)))
    noise = max(sup_pos, sup_neg, 1e-12)
    return JumpReport(
        probe=probe,
        lambdas_pos=tuple(pos),
        lambdas_neg=tuple(neg),
        values_pos=tuple(vals_pos),
        values_neg=tuple(vals_neg),
        sup_diff_pos=sup_pos,
        sup_diff_neg=sup_neg,
        limit_pos=limit_pos,
        limit_neg=limit_neg,
        jump=jump,
        reference_jump=reference,
        is_discontinuous=bool(jump > JUMP_FACTOR * noise),
    )
