"""Radial basis function interpolation with linear and non-linear partition of unity."""

from .errors import (
    ConditioningError,
    CoveringError,
    DuplicatePointsError,
    InputDomainError,
    InsufficientDataError,
    PumError,
    UncoveredPointError,
)
from .kernels import RadialKernel, kernel_eval, kernel_smoothness, get_kernel
from .rbf_local import LocalRbfModel, fit_rbf, eval_rbf
from .covering import CellIndex, Covering, Domain, FillDistance, assign_points, build_covering, fill_distance
from .pum import PumConfig, PumModel, pu_weights, pum_eval, pum_fit
from .nlpum import (
    NlConfig,
    NlPumModel,
    PointClass,
    classify_point,
    mark_contaminated,
    nlpum_eval,
    nlpum_fit,
    nonlinear_weights,
    shepard_eval,
    smoothness_indicator,
)
from .sampling import NodeSpec, TestFunction, eval_test_function, grid_points, halton, make_nodes
from .metrics import LevelResult, convergence_rates, error_norms

__version__ = "0.1.0"
