"""Machine-learning warm starts for constraint generation in MILPs."""

__version__ = "0.1.0"

from .model import (Constraint, ConstraintSet, MilpInstance, SolveOutcome, Status,  # noqa: E402
                    binding_set, canonicalize, max_violation)
from .lp import LpProblem, solve_lp  # noqa: E402
from .milp import solve_bruteforce, solve_milp  # noqa: E402
from .congen import CgTrace, constraint_generation, identify_invariant_set  # noqa: E402
from .learner import KnnModel, LabelMatrix, fit, predict_set  # noqa: E402

__all__ = [
    "Constraint", "ConstraintSet", "MilpInstance", "SolveOutcome", "Status", "binding_set",
    "canonicalize", "max_violation", "LpProblem", "solve_lp", "solve_bruteforce", "solve_milp",
    "CgTrace", "constraint_generation", "identify_invariant_set", "KnnModel", "LabelMatrix",
    "fit", "predict_set",
]
