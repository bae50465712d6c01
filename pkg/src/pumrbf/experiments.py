"""Experiment runners behind the command line: convergence tables, surfaces, indicators."""
from __future__ import annotations

import logging
import time
import warnings
from contextlib import contextmanager
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import csvio
from .covering import Domain, assign_points, build_covering, fill_distance
from .errors import InputDomainError
from .metrics import LevelResult, convergence_rates, error_norms, global_excess, local_range, range_excess
from .nlpum import NlConfig, add_indicators, nlpum_evaluate
from .pum import PumConfig, pum_eval, pum_fit
from .sampling import NodeSpec, TestFunction, eval_test_function, make_nodes

logger = logging.getLogger(__name__)

EXPERIMENTS = ("convergence", "surface", "indicators")
DEFAULT_PROBE = {"convergence": 60, "surface": 120, "indicators": 120}
CONVERGENCE_HEADER = ["level", "h", "mae", "rate_inf", "rmse", "rate_2", "method", "kernel_rbf", "kernel_pu", "nodes"]
SURFACE_HEADER = ["x", "y", "value", "kind", "n_active", "n_contaminated"]
INDICATOR_HEADER = csvio.COVERING_HEADER + ["h"]

REGION_NOTES = {
    TestFunction.FRANKE: "smooth everywhere",
    TestFunction.F1: "+1 where x^2 + y^2 >= 0.25",
    TestFunction.F2: "+1 where x >= 0.5 or y >= 0.5 (above/right of the L-shaped jump)",
    TestFunction.F3: "+1 where x + y >= 1",
    TestFunction.Z: "sin(xy) where (x-0.5)^2 + (y-0.5)^2 >= 0.0625, cos(xy) inside",
}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str = "convergence"
    function: str = "franke"
    nodes: str = "grid"
    levels: tuple = (4, 7)
    level: int = 6
    rbf_kernel: str = "matern2"
    pu_kernel: str = "wendland2"
    rbf_shape: float = 1.0
    relative_shape: bool = False
    nl: bool = False
    nl_params: NlConfig = field(default_factory=NlConfig)
    probe: int | None = None
    out: str = "pumrbf"
    data: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InputDomainError(f"unknown experiment {self.experiment!r}")
        TestFunction.parse(self.function)
        if self.nodes not in ("grid", "halton"):
            raise InputDomainError(f"nodes must be 'grid' or 'halton', got {self.nodes!r}")
        lo, hi = self.levels
        if not (3 <= lo <= hi <= 9):
            raise InputDomainError(f"levels must satisfy 3 <= A <= B <= 9, got {lo}..{hi}")
        if not 3 <= self.level <= 9:
            raise InputDomainError(f"level must lie in [3, 9], got {self.level}")
        if self.probe is not None and self.probe < 8:
            raise InputDomainError(f"probe grid side must be >= 8, got {self.probe}")
        if self.data is not None and self.experiment == "convergence":
            raise InputDomainError("a data file cannot be used with the convergence experiment")

    @property
    def probe_side(self) -> int:
        return self.probe if self.probe is not None else DEFAULT_PROBE[self.experiment]

    @property
    def method(self) -> str:
        return "NLPUM" if self.nl else "PUM"

    @property
    def pum_config(self) -> PumConfig:
        return PumConfig(self.rbf_kernel, self.pu_kernel, self.rbf_shape, self.relative_shape)

    def output(self, suffix: str) -> Path:
        return Path(f"{self.out}_{suffix}.csv")


@contextmanager
def phase(name: str, tag: str = ""):
    start = time.perf_counter()
    yield
    logger.info("%s%s: %.3f s", f"[{tag}] " if tag else "", name, time.perf_counter() - start)


def fit_level(config: ExperimentConfig, level: int, need_indicators: bool):
    """Nodes, values and fitted model (PUM, or NL-PUM when requested) for one level."""
    tag = f"l={level}"
    domain = Domain()
    if config.data is not None:
        X, F = csvio.read_points_csv(config.data)
        if F is None:
            raise InputDomainError(f"{config.data}: data file needs a 'value' column")
    else:
        X = make_nodes(NodeSpec(config.nodes, level, domain=domain))
        F = eval_test_function(config.function, X)
    with phase("covering", tag):
        covering = assign_points(build_covering(len(X), domain), X)
    with phase("fit", tag):
        base = pum_fit(X, F, config.pum_config, covering=covering)
    model = None
    if need_indicators:
        with phase("indicators", tag):
            model = add_indicators(base, config.nl_params)
    return X, F, base, model


def evaluate(config, base, model, Q, level):
    with phase("eval", f"l={level}"):
        if model is not None and config.nl:
            return nlpum_evaluate(model, Q)
        return pum_eval(base, Q)


def run_convergence(config: ExperimentConfig):
    """Errors and empirical rates over ``config.levels``; writes ``<out>_convergence.csv``."""
    fn = TestFunction.parse(config.function)
    if fn.piecewise:
        warnings.warn(f"convergence rates are not meaningful for the piecewise function {fn.value}", stacklevel=2)
    Q = Domain().grid(config.probe_side)
    exact = eval_test_function(fn, Q)
    results = []
    for level in range(config.levels[0], config.levels[1] + 1):
        X, F, base, model = fit_level(config, level, config.nl)
        out = evaluate(config, base, model, Q, level)
        approx = out.values if config.nl else out
        mae, rmse = error_norms(exact, approx)
        h = model.threshold if model is not None else fill_distance(X).value
        results.append(LevelResult(level, h, mae, rmse))
        logger.info("l=%d h=%.4e MAE=%.4e RMSE=%.4e", level, h, mae, rmse)
    results = convergence_rates(results)
    rows = [
        [r.level, r.fill, r.mae, r.rate_inf, r.rmse, r.rate_2, config.method, config.rbf_kernel, config.pu_kernel, config.nodes]
        for r in results
    ]
    path = csvio.write_rows(config.output("convergence"), CONVERGENCE_HEADER, rows)
    return results, path


@dataclass(frozen=True)
class SurfaceSummary:
    overshoot: float
    undershoot: float
    overshoot_global: float
    undershoot_global: float
    overshoot_discontinuity: float
    n_discontinuity: int
    n_contaminated: int
    fill: float


def run_surface(config: ExperimentConfig):
    """Fit on ``(2^level + 1)^2`` nodes, evaluate on the probe grid, measure excursions.

    Overshoot is measured against the range of data values within one patch
    radius of each probe point (the Shepard support), and also against the
    global data range. Writes ``<out>_surface.csv`` and ``<out>_summary.csv``.
    """
    fn = TestFunction.parse(config.function)
    logger.info("%s: %s", fn.value, REGION_NOTES[fn])
    Q = Domain().grid(config.probe_side)
    X, F, base, model = fit_level(config, config.level, config.nl)
    out = evaluate(config, base, model, Q, config.level)
    lo, hi = local_range(Q, X, F, base.covering.radius)
    if config.nl:
        values, disc = out.values, out.discontinuity
        kinds = np.where(disc, "discontinuity", "regular")
        n_active, n_cont = out.n_active, out.n_contaminated
    else:
        values, disc = out, np.zeros(len(Q), dtype=bool)
        kinds = np.full(len(Q), "-")
        n_active = n_cont = [None] * len(Q)
    over, under = range_excess(values, lo, hi)
    g_over, g_under = global_excess(values, F)
    excess = over + under
    summary = SurfaceSummary(
        overshoot=float(over.max()),
        undershoot=float(under.max()),
        overshoot_global=g_over,
        undershoot_global=g_under,
        overshoot_discontinuity=float(excess[disc].max()) if disc.any() else 0.0,
        n_discontinuity=int(disc.sum()),
        n_contaminated=int(model.contaminated.sum()) if model is not None else 0,
        fill=model.threshold if model is not None else fill_distance(X).value,
    )
    rows = ([q[0], q[1], v, k, a, c] for q, v, k, a, c in zip(Q.tolist(), values.tolist(), kinds, n_active, n_cont))
    surface_path = csvio.write_rows(config.output("surface"), SURFACE_HEADER, rows)
    summary_rows = [
        ["function", fn.value],
        ["region", REGION_NOTES[fn]],
        ["method", config.method],
        ["nodes", config.nodes],
        ["n_nodes", len(X)],
        ["probe", config.probe_side],
        ["kernel_rbf", config.rbf_kernel],
        ["kernel_pu", config.pu_kernel],
        ["h", summary.fill],
        ["overshoot", summary.overshoot],
        ["undershoot", summary.undershoot],
        ["overshoot_global", summary.overshoot_global],
        ["undershoot_global", summary.undershoot_global],
        ["overshoot_discontinuity", summary.overshoot_discontinuity],
        ["n_discontinuity", summary.n_discontinuity],
        ["n_contaminated", summary.n_contaminated],
    ]
    summary_path = csvio.write_rows(config.output("summary"), ["metric", "value"], summary_rows)
    return summary, surface_path, summary_path


def run_indicators(config: ExperimentConfig):
    """Per-patch indicators and contamination flags; writes ``<out>_indicators.csv``."""
    _, _, _, model = fit_level(config, config.level, True)
    cov = model.covering
    rows = (row + [model.threshold] for row in csvio.covering_rows(cov, model.indicators, model.contaminated))
    path = csvio.write_rows(config.output("indicators"), INDICATOR_HEADER, rows)
    return model, path


RUNNERS = {"convergence": run_convergence, "surface": run_surface, "indicators": run_indicators}


def run(config: ExperimentConfig):
    return RUNNERS[config.experiment](config)
