"""Incremental preference elicitation for multi-criteria sorting.

Fits piecewise-linear (possibly non-monotonic) utility models and category
thresholds from assignment examples via linear programming, picks the most
informative next question under uncertainty-sampling strategies, and sorts
the remaining alternatives.
"""

from prefsort.core import (
    AssignmentExample,
    CriterionScale,
    DecisionMatrix,
    NormalizedModel,
    UtilityModel,
    assign_category,
    build_scales,
    comprehensive_utility,
    marginal_utility,
    normalize,
)
from prefsort.errors import (
    DegenerateModelError,
    InvalidInputError,
    PrefsortError,
    SolverFailure,
    StateConflictError,
)
from prefsort.inference import (
    InferenceOutcome,
    PreferenceInstance,
    build_max_margin,
    fit,
    min_inconsistency,
    refine_complexity,
)
from prefsort.session import (
    AnswerRecord,
    BudgetT,
    FinalResult,
    Session,
    SessionConfig,
    TargetAccuracy,
)
from prefsort.strategy import (
    InfoVector,
    ProbabilityVector,
    SelectionResult,
    Strategy,
    info_vectors,
    select,
    select_from_vectors,
)

__version__ = "0.1.0"

__all__ = [
    "AssignmentExample",
    "AnswerRecord",
    "BudgetT",
    "CriterionScale",
    "DecisionMatrix",
    "DegenerateModelError",
    "FinalResult",
    "InferenceOutcome",
    "InfoVector",
    "InvalidInputError",
    "NormalizedModel",
    "PrefsortError",
    "PreferenceInstance",
    "ProbabilityVector",
    "SelectionResult",
    "Session",
    "SessionConfig",
    "SolverFailure",
    "StateConflictError",
    "Strategy",
    "TargetAccuracy",
    "UtilityModel",
    "assign_category",
    "build_max_margin",
    "build_scales",
    "comprehensive_utility",
    "fit",
    "info_vectors",
    "marginal_utility",
    "min_inconsistency",
    "normalize",
    "refine_complexity",
    "select",
    "select_from_vectors",
]
