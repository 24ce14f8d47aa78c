"""Inverse minisum single-facility location with variable site coordinates."""

from .core import (
    CostVector,
    Instance,
    Modification,
    NormTag,
    Point,
    Site,
    apply,
    distance,
    modification_cost,
    objective,
)
from .errors import (
    DegenerateInstanceError,
    InvalidArgumentError,
    ParseError,
    SolverFailureError,
    SubproblemFailureError,
    SubproblemInfeasibleError,
)
from .forward import centroid, solve_median, weighted_median, weiszfeld
from .inverse import (
    SolveReport,
    StopKind,
    StopReason,
    StopRule,
    baseline_sqeuclid,
    isflp1,
    isflp2,
)
from .io import attach_random_params, emit_trace_csv, load_xy_points, parse_instance
from .linprog import LinearProgram, LpStatus, solve_lp

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a bundled data file (``example1.txt`` or ``eighteen.txt``)."""
    from importlib.resources import files

    return files(__name__).joinpath("data", name)
