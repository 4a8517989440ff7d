"""Fitness landscape analysis for configuration tuning data.

Everyday entry points are re-exported here; specialised pieces (report
building, graph export, the CLI) live in their own modules.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .compare import ComparisonReport, compare_landscapes
from .effects import importance, mutation_effects, pairwise_interactions
from .errors import FitscapeError, PreconditionError, ValidationError
from .landscape import Landscape, load_csv, load_json
from .metrics import (
    describe,
    distance_to_global,
    fitness_distribution,
    prominent_region,
)
from .optima import assign_basins, build_lon, find_local_optima
from .search import hill_climb, simulated_annealing, warm_start_pick
from .space import ConfigSpace, OptionSpec, load_space, space_from_dict
from .surrogate import lasso_poly, train_tree
from .synthetic import NKSpec, binary_space, generate_additive, generate_nk
from .transport import emd
from .walks import autocorrelation

__all__ = [
    "__version__",
    "BACKEND",
    "ComparisonReport",
    "ConfigSpace",
    "FitscapeError",
    "Landscape",
    "NKSpec",
    "OptionSpec",
    "PreconditionError",
    "ValidationError",
    "assign_basins",
    "autocorrelation",
    "binary_space",
    "build_lon",
    "compare_landscapes",
    "describe",
    "distance_to_global",
    "emd",
    "find_local_optima",
    "fitness_distribution",
    "generate_additive",
    "generate_nk",
    "hill_climb",
    "importance",
    "lasso_poly",
    "load_csv",
    "load_json",
    "load_space",
    "mutation_effects",
    "pairwise_interactions",
    "prominent_region",
    "simulated_annealing",
    "space_from_dict",
    "train_tree",
    "warm_start_pick",
]
