"""Numerical toolkit for Koebe circular-slit-annulus maps on multiply
connected planar domains, Mobius symmetry groups of circular domains, and
parameterized domain-family sweeps including a discontinuous family of
biholomorphisms between smoothly varying twins."""

from .circular_aut import (
    AutGroup,
    ThreeConnectedCircular,
    aut_group_T,
    enumerate_automorphisms,
    hole_swap_residual,
    is_rigid,
    rigidity_discriminant,
    tau_condition,
    tau_map,
)
from .dirichlet import (
    DirichletSolver,
    HarmonicSolution,
    PeriodMatrix,
    eval_interior,
    flux,
    harmonic_measure,
    period_matrix,
    solve_dirichlet,
)
from .families import (
    DomainFamily,
    FamilySweep,
    JumpReport,
    annulus_family,
    biholomorphism_jump,
    counterexample_domain,
    counterexample_family,
    general_counterexample_domain,
    smoothness_report,
    sweep_moduli,
    tilde_counterexample_domain,
)
from .geometry import (
    INF,
    BoundaryCurve,
    Circle,
    CircularDomain,
    MultiplyConnectedDomain,
    circular_to_curves,
    contains,
    hausdorff_distance,
    parse_domain_spec,
    perpendicular_circle,
    read_domain_spec,
    spherical_distance,
)
from .koebe import (
    Biholomorphism,
    CanonicalMap,
    SlitAnnulus,
    canonical_map,
    eval_map,
    harmonic_conjugate_data,
    invert_map,
    koebe_coefficients,
    map_between,
    moduli,
)
from .mobius import (
    Line,
    MobiusMap,
    SymmetricPair,
    common_symmetric_pair,
    from_triple,
    image_of_circle,
    symmetric_point,
    symmetric_pairs,
)

__version__ = "0.1.0"
