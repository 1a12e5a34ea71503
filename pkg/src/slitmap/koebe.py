"""Canonical conformal maps onto circular-slit annuli.

The map is built as K = exp(u + i v): u is the combination of harmonic
measures whose fluxes are -2 pi through the second marked component, 0
through the remaining ones (hence +2 pi through the first), and v is its
harmonic conjugate. In the double-layer-plus-sources representation the
analytic completion is explicit,

    u + i v = h(z) + sum_k A_k Log(z - z_k) + i theta0,

with near-integer strengths A_k, so exp of it is single valued up to solver
error; the continuation check quantifies the leak. Moduli are read off the
boundary traces: radii from |K| per component, slit endpoints from the
extrema of a continuous branch of arg K located by spectral interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from . import trig
from .dirichlet import DirichletSolver, HarmonicSolution, combine, period_matrix
from .errors import (
    ComponentMembershipError,
    EvaluationError,
    InternalInconsistencyError,
    InvalidDomainError,
    InversionError,
    NotEquivalentError,
    PeriodLeakError,
    SlitWrapError,
)
from .geometry import BoundaryCurve, MultiplyConnectedDomain

__all__ = [
    "SlitAnnulus",
    "CanonicalMap",
    "Biholomorphism",
    "HarmonicConjugate",
    "koebe_coefficients",
    "harmonic_conjugate_data",
    "canonical_map",
    "moduli",
    "eval_map",
    "invert_map",
    "map_between",
]


@dataclass(frozen=True)
class SlitAnnulus:
    """Moduli of a circular-slit annulus: inner radius r2 and, per slit,
    (radius, start angle, end angle) with start < end < start + 2 pi."""

    r2: float
    slits: Tuple[Tuple[float, float, float], ...] = ()

    def __post_init__(self):
        if not 0.0 < self.r2 < 1.0:
            raise InvalidDomainError(f"r2 must lie in (0,1), got {self.r2}")
        for r, alpha, beta in self.slits:
            if not self.r2 < r < 1.0:
                raise InvalidDomainError(f"slit radius {r} outside ({self.r2}, 1)")
            if not alpha < beta < alpha + 2.0 * np.pi:
                raise InvalidDomainError(
                    f"slit angles must satisfy alpha < beta < alpha + 2 pi, "
                    f"got ({alpha}, {beta})")
        slits = self.slits
        for i in range(len(slits)):
            for j in range(i + 1, len(slits)):
                if abs(slits[i][0] - slits[j][0]) < 1e-9:
                    if _arcs_overlap(slits[i][1:], slits[j][1:]):
                        raise InvalidDomainError(
                            f"slits {i} and {j} share a radius and overlap")

    def as_row(self) -> Tuple[float, ...]:
        """Flat record (r2, r_j, alpha_j, beta_j, ...) in fixed field order."""
        out = [self.r2]
        for s in self.slits:
            out.extend(s)
        return tuple(out)


def _arcs_overlap(a: Tuple[float, float], b: Tuple[float, float]) -> bool:
    twopi = 2.0 * np.pi
    a0, a1 = a[0] % twopi, a[0] % twopi + (a[1] - a[0])
    b0, b1 = b[0] % twopi, b[0] % twopi + (b[1] - b[0])
    for shift in (-twopi, 0.0, twopi):
        if a0 < b1 + shift and b0 + shift < a1:
            return True
    return False


@dataclass
class HarmonicConjugate:
    """Harmonic conjugate of the combined potential, defined mod 2 pi and
    vanishing at the base marking."""

    solution: HarmonicSolution
    a1: complex
    phase: complex  # unimodular factor making v(a1) = 0
    closure_errors: Tuple[float, ...]

    def value(self, z) -> np.ndarray:
        w = _analytic_exp(self.solution, z) * self.phase
        vals = np.angle(w)
        return vals if np.ndim(z) else float(vals)


def _analytic_exp(sol: HarmonicSolution, z) -> np.ndarray:
    """exp(h(z) + sum A_k Log(z - z_k)) at interior points (vectorized)."""
    z = np.asarray(z, dtype=complex)
    out = sol.cauchy(z)
    for zk, ak in zip(sol.source_points, sol.source_strengths):
        out = out + ak * np.log(z - zk)
    return np.exp(out)


def _boundary_exp(sol: HarmonicSolution, i: int) -> np.ndarray:
    """Boundary trace of exp(h + sum A_k Log(. - z_k)) on component i."""
    trace = sol.boundary_cauchy_trace(i)
    x = sol.domain.components[i].nodes
    for zk, ak in zip(sol.source_points, sol.source_strengths):
        trace = trace + ak * np.log(x - zk)
    return np.exp(trace)


def koebe_coefficients(domain_or_solver, gamma1: int = 0, gamma2: int = 1,
                       tol: float = 1e-8):
    """Coefficients c_i and combined potential u with the slit-annulus flux
    normalization: flux -2 pi through gamma2, 0 through the other non-base
    components (hence +2 pi through gamma1), and u = 0 on gamma1.

    Returns (coefficients keyed by component index, combined solution).
    """
    solver = domain_or_solver if isinstance(domain_or_solver, DirichletSolver) \
        else DirichletSolver(domain_or_solver)
    m = solver.domain.m
    if m < 2:
        raise ValueError("canonical maps need a multiply connected domain (m >= 2)")
    if gamma1 == gamma2 or not (0 <= gamma1 < m and 0 <= gamma2 < m):
        raise ValueError(f"invalid component designation ({gamma1}, {gamma2})")
    pm = period_matrix(solver, base=gamma1)
    rhs = np.array([-2.0 * np.pi if r == gamma2 else 0.0 for r in pm.rows])
    c = np.linalg.solve(pm.p, rhs)
    sols = [solver.harmonic_measure(comp) for comp in pm.cols]
    u = combine(sols, c)
    coeffs: Dict[int, float] = {comp: float(ci) for comp, ci in zip(pm.cols, c)}
    for i in range(m):
        want = -2.0 * np.pi if i == gamma2 else (2.0 * np.pi if i == gamma1 else 0.0)
        got = u.flux(i)
        if abs(got - want) > tol:
            raise InternalInconsistencyError(
                f"normalized flux through component {i} is {got:.3e}, want {want:.3e}")
    if not all(ci < 0.0 for ci in coeffs.values()):
        raise InternalInconsistencyError(
            f"combined potential must be negative off gamma1, got {coeffs}")
    if min(coeffs, key=coeffs.get) != gamma2:
        raise InternalInconsistencyError(
            "combined potential must attain its minimum on gamma2")
    return coeffs, u


def harmonic_conjugate_data(u: HarmonicSolution, a1: complex,
                            tol: float = 1e-8) -> HarmonicConjugate:
    """Conjugate evaluator for a flux-normalized potential, with the
    single-valuedness continuation check around every hole."""
    errors = _closure_errors(u)
    if max(errors, default=0.0) > tol:
        raise PeriodLeakError(
            f"continuation around a hole fails to close: errors {errors}")
    gamma1, t1 = _locate_component(u.domain, a1)
    w_nodes = _boundary_exp(u, gamma1)
    w1 = trig.eval_series(trig.coeffs(w_nodes), t1)
    phase = np.conj(w1) / abs(w1)
    return HarmonicConjugate(u, complex(a1), complex(phase), errors)


def _closure_errors(u: HarmonicSolution) -> Tuple[float, ...]:
    """Continuation defect of exp(u+iv) around each hole: |exp(period) - 1|
    for the loop integral of the analytic derivative."""
    out = []
    mloop = 1024
    t = 2.0 * np.pi * np.arange(mloop) / mloop
    for k in range(1, u.domain.m):
        center, radius = u._flux_loop(k)
        zeta = center + radius * np.exp(1j * t)
        dzeta = 1j * radius * np.exp(1j * t)
        period = (2.0 * np.pi / mloop) * (u.f_prime(zeta) * dzeta).sum()
        out.append(float(abs(np.exp(period) - 1.0)))
    return tuple(out)


def _locate_component(domain: MultiplyConnectedDomain, point: complex,
                      label: str = "marked point") -> Tuple[int, float]:
    dists = [c.distance(point) for c in domain.components]
    idx = int(np.argmin(dists))
    curve = domain.components[idx]
    if dists[idx] > curve.resolution:
        raise ComponentMembershipError(
            f"{label} {point} is {dists[idx]:.3g} from the nearest component, "
            f"beyond its resolution {curve.resolution:.3g}")
    t = curve.nearest_parameter(point)
    return idx, t


@dataclass
class CanonicalMap:
    """Koebe canonical map of a marked multiply connected domain."""

    domain: MultiplyConnectedDomain
    potential: HarmonicSolution
    coefficients: Dict[int, float]
    gamma1: int
    gamma2: int
    a1: complex
    a2: complex
    normalization: complex
    moduli: SlitAnnulus
    slit_components: Tuple[int, ...]
    boundary_values: Tuple[np.ndarray, ...]
    slit_preimages: Dict[int, Tuple[complex, complex]]
    diagnostics: Dict[str, object]
    _seed_cache: Optional[Tuple[np.ndarray, np.ndarray]] = field(
        default=None, repr=False)

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """K(z) at interior points (margin above node resolution required)."""
        pts = np.atleast_1d(np.asarray(z, dtype=complex))
        for p in pts:
            if not self.domain.contains(p):
                raise EvaluationError(f"point {p} is not inside the domain")
        vals = self.normalization * _analytic_exp(self.potential, pts)
        return vals if np.ndim(z) else complex(vals[0])

    def eval_unchecked(self, z):
        return self.normalization * _analytic_exp(self.potential, z)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return self.eval_unchecked(z) * self.potential.f_prime(z)

    def invert(self, w: complex, tol: float = 1e-10, margin: float = 1e-6,
               max_iter: int = 50) -> complex:
        """Newton inversion seeded from a coarse image-grid lookup.

        The target must lie strictly inside the image slit annulus, at least
        `margin` from the bounding circles and slits. Steps are damped to
        keep the iterate inside the domain and the residual monotone.
        """
        w = complex(w)
        self._check_image_point(w, margin)
        seeds_z, seeds_w = self._seeds()
        order = np.argsort(np.abs(seeds_w - w))
        for attempt in order[:10]:
            z = self._newton(complex(seeds_z[attempt]), w, tol, max_iter)
            if z is not None:
                return z
        # local reseeding: sample around the best seed and retry once
        z0 = complex(seeds_z[order[0]])
        scale = 2.0 * self.domain.resolution + 0.05
        ring = z0 + scale * np.exp(2j * np.pi * np.arange(32) / 32) \
            * (0.3 + 0.7 * np.arange(32) % 1.0)
        cand = [z for z in ring if self._safe_point(z)]
        if cand:
            cw = self.eval_unchecked(np.asarray(cand))
            for i in np.argsort(np.abs(cw - w))[:5]:
                z = self._newton(complex(cand[i]), w, tol, max_iter)
                if z is not None:
                    return z
        raise InversionError(
            f"Newton inversion did not converge for target {w} "
            "(too near a slit or boundary?)")

    def _newton(self, z: complex, w: complex, tol: float,
                max_iter: int) -> Optional[complex]:
        fz = complex(self.eval_unchecked(np.asarray([z]))[0]) - w
        for _ in range(max_iter):
            if abs(fz) < tol:
                return z if self._safe_point(z) else None
            dk = complex(self.derivative(np.asarray([z]))[0])
            if dk == 0:
                return None
            step = fz / dk
            lam = 1.0
            for _ in range(20):
                znew = z - lam * step
                if self._safe_point(znew):
                    fnew = complex(self.eval_unchecked(np.asarray([znew]))[0]) - w
                    if abs(fnew) < abs(fz):
                        z, fz = znew, fnew
                        break
                lam *= 0.5
            else:
                return None
        return z if abs(fz) < tol and self._safe_point(z) else None

    def _safe_point(self, z: complex) -> bool:
        try:
            return self.domain.contains(z)
        except Exception:
            return False

    def _seeds(self):
        if self._seed_cache is None:
            zs = self.domain.interior_grid(500)
            ws = self.eval_unchecked(zs)
            self._seed_cache = (zs, ws)
        return self._seed_cache

    def _check_image_point(self, w: complex, margin: float):
        r = abs(w)
        if not self.moduli.r2 + margin <= r <= 1.0 - margin:
            raise InversionError(
                f"target modulus {r:.6g} outside the image annulus "
                f"({self.moduli.r2:.6g}, 1) with margin {margin:g}")
        theta = np.angle(w)
        for rj, alpha, beta in self.moduli.slits:
            if abs(r - rj) < margin:
                ang_margin = margin / rj
                rel = (theta - alpha) % (2.0 * np.pi)
                if rel < (beta - alpha) + ang_margin or rel > 2.0 * np.pi - ang_margin:
                    raise InversionError(
                        f"target {w} is within {margin:g} of a slit")


def canonical_map(domain: MultiplyConnectedDomain, a1: complex, a2: complex,
                  solver: Optional[DirichletSolver] = None) -> CanonicalMap:
    """Construct the canonical map K = exp(u + i v) with K(a1) = 1 and
    |K(a2)| = r2; the components carrying a1 and a2 become the unit circle
    and the inner circle of the image annulus."""
    a1 = complex(a1)
    a2 = complex(a2)
    gamma1, t1 = _locate_component(domain, a1, "a1")
    gamma2, _ = _locate_component(domain, a2, "a2")
    if gamma1 == gamma2:
        raise ComponentMembershipError(
            "a1 and a2 must mark distinct boundary components")
    if solver is None:
        solver = DirichletSolver(domain)
    coeffs, u = koebe_coefficients(solver, gamma1, gamma2)
    errors = _closure_errors(u)
    if max(errors) > 1e-8:
        raise PeriodLeakError(
            f"continuation around a hole fails to close: errors {errors}")

    w_nodes = tuple(_boundary_exp(u, i) for i in range(domain.m))
    w1 = trig.eval_series(trig.coeffs(w_nodes[gamma1]), t1)
    mu0 = 1.0 / w1
    k_nodes = tuple(mu0 * w for w in w_nodes)

    # moduli: radii from |K| per component, slit endpoints from branch extrema
    radii = [float(np.exp(np.mean(np.log(np.abs(k))))) for k in k_nodes]
    stdevs = [float(np.std(np.abs(k))) for k in k_nodes]
    r2 = radii[gamma2]
    slit_comps = tuple(i for i in range(domain.m) if i not in (gamma1, gamma2))
    slits = []
    preimages: Dict[int, Tuple[complex, complex]] = {}
    for i in slit_comps:
        theta = np.unwrap(np.angle(k_nodes[i]))
        wind = _loop_winding(k_nodes[i])
        if wind != 0:
            raise SlitWrapError(
                f"arg K winds {wind} times around component {i}; expected a slit")
        if theta.max() - theta.min() >= 2.0 * np.pi:
            raise SlitWrapError(
                f"branch of arg K on component {i} spans >= 2 pi; under-resolved")
        t_min, alpha = trig.argmin_refined(theta)
        t_max, beta = trig.argmax_refined(theta)
        alpha_n = _principal(alpha)
        slits.append((radii[i], alpha_n, alpha_n + (beta - alpha)))
        curve = domain.components[i]
        preimages[i] = (complex(curve.value(t_min)), complex(curve.value(t_max)))
    for i in (gamma1, gamma2):
        if abs(_loop_winding(k_nodes[i])) != 1:
            raise InternalInconsistencyError(
                f"K does not wrap component {i} once around its image circle")

    sl = SlitAnnulus(r2, tuple(slits))
    kmap = CanonicalMap(
        domain=domain,
        potential=u,
        coefficients=coeffs,
        gamma1=gamma1,
        gamma2=gamma2,
        a1=a1,
        a2=a2,
        normalization=complex(mu0),
        moduli=sl,
        slit_components=slit_comps,
        boundary_values=k_nodes,
        slit_preimages=preimages,
        diagnostics={
            "cond": solver.cond,
            "residual": u.residual,
            "closure_errors": errors,
            "modulus_stdev": tuple(stdevs),
            "coefficients": dict(coeffs),
        },
    )
    _injectivity_check(kmap)
    sa2 = abs(trig.eval_series(
        trig.coeffs(k_nodes[gamma2]),
        domain.components[gamma2].nearest_parameter(a2)))
    if abs(sa2 - r2) > 1e-8:
        raise InternalInconsistencyError(
            f"|K(a2)| = {sa2:.12g} disagrees with r2 = {r2:.12g}")
    return kmap


def _principal(theta: float) -> float:
    out = (theta + np.pi) % (2.0 * np.pi) - np.pi
    return float(out)


def _loop_winding(values: np.ndarray) -> int:
    turns = np.angle(np.roll(values, -1) / values).sum() / (2.0 * np.pi)
    return int(np.rint(turns))


def _injectivity_check(k: CanonicalMap, count: int = 20, seed: int = 7):
    """Argument-principle spot check: the image boundary winds exactly once
    about image-interior probe points, so each has one preimage."""
    rng = np.random.default_rng(seed)
    sl = k.moduli
    probes = []
    guard = 0
    while len(probes) < count and guard < 40 * count:
        guard += 1
        r = sl.r2 + (1 - sl.r2) * (0.12 + 0.76 * rng.random())
        th = 2.0 * np.pi * rng.random()
        w = r * np.exp(1j * th)
        if all(abs(r - rj) > 0.02 * (1 - sl.r2) or
               not _arcs_overlap((alpha, beta), (th - 0.05, th + 0.05))
               for rj, alpha, beta in sl.slits):
            probes.append(w)
    for w in probes:
        total = sum(_loop_winding(kv - w) for kv in k.boundary_values)
        if total != 1:
            raise InternalInconsistencyError(
                f"image boundary winds {total} times about {w}; expected 1")


def moduli(k: CanonicalMap) -> SlitAnnulus:
    return k.moduli


def eval_map(k: CanonicalMap, z):
    return k.eval(z)


def invert_map(k: CanonicalMap, w: complex, tol: float = 1e-10,
               margin: float = 1e-6) -> complex:
    return k.invert(w, tol=tol, margin=margin)


@dataclass
class Biholomorphism:
    """F = K_target^{-1} (mu K_source) between domains with matching moduli."""

    source: CanonicalMap
    target: CanonicalMap
    mu: complex
    diagnostics: Dict[str, float]

    def __call__(self, z):
        if np.ndim(z) == 0:
            return self.target.invert(self.mu * complex(self.source.eval(z)))
        zs = np.asarray(z, dtype=complex)
        return np.asarray([self(p) for p in zs.ravel()]).reshape(zs.shape)


def map_between(domain: MultiplyConnectedDomain, domain_t: MultiplyConnectedDomain,
                markings: Tuple[complex, complex],
                markings_t: Tuple[complex, complex],
                moduli_rtol: float = 1e-5,
                grid_size: int = 24) -> Biholomorphism:
    """Biholomorphism between conformally equivalent marked domains.

    Both canonical maps are built; their moduli must agree (r2 relatively,
    slit triples under the marking-aligned rotation), otherwise the domains
    are not equivalent with these markings. The unimodular factor mu is fixed
    by the a1 alignment (both maps send their marking to 1).
    """
    k = canonical_map(domain, *markings)
    kt = canonical_map(domain_t, *markings_t)
    mu = complex(1.0)
    _match_moduli(k.moduli, kt.moduli, mu, moduli_rtol)
    bih = Biholomorphism(source=k, target=kt, mu=mu, diagnostics={})
    zs = domain.interior_grid(grid_size)
    sup = 0.0
    hits = 0
    for z in zs:
        try:
            fz = bih(z)
        except (InversionError, EvaluationError):
            continue
        sup = max(sup, abs(complex(kt.eval(fz)) - mu * complex(k.eval(z))))
        hits += 1
    if hits == 0:
        raise InternalInconsistencyError("no interior grid point survived round-trip")
    bih.diagnostics = {"roundtrip_sup": sup, "roundtrip_points": float(hits)}
    return bih


def _match_moduli(a: SlitAnnulus, b: SlitAnnulus, mu: complex, rtol: float):
    if abs(a.r2 - b.r2) > rtol * a.r2:
        raise NotEquivalentError(
            f"inner radii differ: {a.r2:.8g} vs {b.r2:.8g} (rtol {rtol:g})")
    if len(a.slits) != len(b.slits):
        raise NotEquivalentError(
            f"slit counts differ: {len(a.slits)} vs {len(b.slits)}")
    rot = float(np.angle(mu))
    unmatched = list(b.slits)
    for rj, alpha, beta in a.slits:
        best, best_err = None, np.inf
        for cand in unmatched:
            rb, ab, bb = cand
            err = abs(rj - rb) / rj
            err += abs((beta - alpha) - (bb - ab))
            shift = abs(_principal((alpha + rot) - ab))
            err += shift
            if err < best_err:
                best, best_err = cand, err
        if best is None or best_err > 100 * rtol + 1e-4:
            raise NotEquivalentError(
                f"slit ({rj:.6g}, {alpha:.6g}, {beta:.6g}) has no match "
                f"under the marking rotation (best err {best_err:.3g})")
        unmatched.remove(best)
