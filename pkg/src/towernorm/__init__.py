"""An octahedral norm on c00 that is smooth on a dense subspace.

The norm is assembled level by level from C^1 shape functions; see the
README for the construction and the command-line interface.
"""

from .calculus import (
    DerivativeEstimate,
    TangentDecomposition,
    directional_derivative,
    is_bj_orthogonal,
    norming_functional,
    pairing,
    phi,
    phi_identities_check,
    symmetric_quotient,
    tangent_decomposition,
)
from .kernels import BACKEND
from .norm import (
    ConvergenceError,
    EquivalenceConstants,
    LevelNormResult,
    comparison_norm,
    ell1_sum_norm,
    equivalence_constants,
    level_norm,
    member_ball,
    minkowski_oracle,
    solve_level,
    tower_norm,
    truncation_bound,
)
from .shape import (
    DEFAULT_LEVELS,
    InfiniteSlopeError,
    ScheduleError,
    ShapeFn,
    ShapeSchedule,
    make_schedule,
    shape_derivative,
    shape_eval,
    shape_sandwich_check,
)
from .space import (
    BaseSpace,
    Tolerances,
    TowerSpace,
    TowerVector,
    axpy,
    ell1_tail,
    project,
    random_vector,
    unit,
)
from .verify import CHECKS, VerificationReport, verify_all

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
