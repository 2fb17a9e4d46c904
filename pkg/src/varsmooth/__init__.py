"""Numerical Besov and Triebel-Lizorkin norms with variable smoothness and integrability.

Functions live on a periodic grid. Norms are available through dyadic
Fourier blocks, Peetre maximal functions, compactly supported local means
and ball means of differences.
"""

from .differences import *  # noqa: F401,F403
from .estimators import FunctionSpaceNorm, LittlewoodPaleyTransformer
from .exceptions import (
    ExpressionDomainError,
    ExpressionSyntaxError,
    GridMismatchError,
    InvalidConfigError,
    InvalidInputError,
    KernelConstructionError,
    NumericFailureError,
    PreconditionError,
    VarSmoothError,
)
from .exponents import *  # noqa: F401,F403
from .expression import ExponentExpression, evaluate, evaluate_on_grid, parse_expression
from .frequency import *  # noqa: F401,F403
from .grid import *  # noqa: F401,F403
from .harness import (
    CheckReport,
    EquivalenceReport,
    ExperimentConfig,
    make_family_sample,
    run_equivalence_experiment,
    run_suite,
)
from .lebesgue import *  # noqa: F401,F403

__version__ = "0.1.0"
