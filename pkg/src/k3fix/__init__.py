"""Exact Lefschetz bookkeeping for fixed loci of non-symplectic automorphisms of K3 surfaces."""

from __future__ import annotations

from .cyclotomic import CyclotomicNumber, cyclotomic_polynomial, euler_phi, mobius, primitive_trace
from .enumeration import (
    Capacity,
    CurvePolicy,
    ProjectionBound,
    Scenario,
    SolutionSet,
    enumerate_configs,
    project_type,
    solve_integer_points,
    verify_equalities,
)
from .errors import (
    InconsistencyError,
    InfeasibleError,
    K3FixError,
    ScenarioError,
    SingularTermError,
    UnboundedError,
    UsageError,
)
from .lattice import Lattice, RankScenario, deduce_ranks, invariants, named_lattice, parse_lattice
from .lefschetz import (
    FixedLocusConfig,
    PointType,
    build_holomorphic_system,
    euler_characteristic,
    isolated_types,
    point_term,
)
from .weierstrass import DiagonalAction, MonomialWeierstrass, check_invariance, two_form_weight

__version__ = "0.1.0"
