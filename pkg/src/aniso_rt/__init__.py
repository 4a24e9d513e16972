"""Anisotropic simplex geometry and Raviart-Thomas interpolation on simplices.

The main entry points are :func:`canonical_decompose` and
:func:`angle_report` for element geometry, :func:`build_space` and
:func:`interpolate_physical` for the interpolation operator, and
:func:`bound_rhs` / :func:`run_family_study` for error experiments.
"""

from .errors import (
    AnisoRTError,
    Assumption1Violated,
    BadFaceIndex,
    BadSpec,
    DegenerateElement,
    DegenerateSimplex,
    IndexOutOfRange,
    NoAdmissibleLabeling,
    ParseError,
    UnisolvenceFailure,
    UnsupportedDegree,
    UnsupportedOrder,
    WrongElementType,
)
from .experiments import (
    BoundBreakdown,
    StudyRow,
    bound_rhs,
    cap_series,
    check_scaling_lemmas,
    error_lhs,
    run_family_study,
    scaling_sweep,
)
from .fields import PolynomialField, VectorField, WaveField, catalog, get_field, pullback_field
from .geometry import (
    CanonicalDecomposition,
    GeometricReport,
    Simplex,
    angle_report,
    canonical_decompose,
    check_assumption1,
    condition_numbers,
    mathscr_H,
    param_H_T,
    param_H_T0,
    simplex_from_parameters,
)
from .mesh_io import FAMILIES, FamilySpec, Mesh, generate_family, parse_mesh, read_mesh, write_mesh
from .quadrature import QuadratureRule, face_rule, rule_on_simplex, simplex_rule
from .rt_space import RTInterpolant, RTSpace, build_space, interpolate_physical, interpolate_reference, rt_dim
from .transforms import AffineMap, DirectionFrame, PiolaMap, directional_derivative, piola_for

__version__ = "0.1.0"
