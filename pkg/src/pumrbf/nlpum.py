"""Non-linear partition of unity: data-dependent patch weights and a Shepard fallback.

Each patch gets a smoothness indicator ``I_j``, the mean absolute residual of
the best affine least-squares fit to its data. The linear PU weights are
replaced by

    W_j(x) = gamma_j phi_j(x) / sum_k gamma_k phi_k(x),   gamma_j = (eps + I_j)^(-t)

so patches crossed by a jump (large ``I_j``) get negligible weight. Points at
which every significantly weighted patch is contaminated are evaluated with
Shepard's method instead, which cannot leave the local data range.
"""
from __future__ import annotations

import enum
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .covering import CellIndex, Covering, fill_distance
from .errors import InputDomainError, InsufficientDataError, UncoveredPointError
from .kernels import RadialKernel, UNBOUNDED, kernel_smoothness
from .pum import PumConfig, PumModel, check_covered, local_values, patch_pairs, pum_fit
from .rbf_local import as_points

logger = logging.getLogger(__name__)

# residual means below this multiple of machine epsilon times the data scale are roundoff
ZERO_INDICATOR_RTOL = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class NlConfig:
    t: float = 6.0
    epsilon: float = 1e-14
    weight_threshold: float = 1e-3
    contamination_threshold: float | None = None

    def __post_init__(self):
        if not self.t > 0:
            raise InputDomainError(f"exponent t must be positive, got {self.t}")
        if not self.epsilon > 0:
            raise InputDomainError(f"epsilon must be positive, got {self.epsilon}")
        if not 0 < self.weight_threshold < 1:
            raise InputDomainError(f"weight threshold must lie in (0, 1), got {self.weight_threshold}")
        if self.contamination_threshold is not None and not self.contamination_threshold >= 0:
            raise InputDomainError("contamination threshold must be nonnegative")


class PointKind(enum.Enum):
    REGULAR = "regular"
    DISCONTINUITY = "discontinuity"


@dataclass(frozen=True)
class PointClass:
    kind: PointKind
    active_patches: tuple
    contaminated_active: tuple


@dataclass(frozen=True, eq=False)
class NlPumModel:
    base: PumModel
    indicators: np.ndarray
    log_gammas: np.ndarray
    contaminated: np.ndarray
    threshold: float
    config: NlConfig = field(default_factory=NlConfig)

    @property
    def gammas(self) -> np.ndarray:
        """``(epsilon + I_j)^(-t)``; may overflow to inf for extreme settings, use ``log_gammas``."""
        with np.errstate(over="ignore"):
            return np.exp(self.log_gammas)

    @property
    def covering(self) -> Covering:
        return self.base.covering

    @property
    def data_index(self) -> CellIndex:
        idx = self.__dict__.get("_data_index")
        if idx is None:
            cov = self.base.covering
            idx = CellIndex(cov.points, cov.radius, origin=cov.domain.lower)
            object.__setattr__(self, "_data_index", idx)
        return idx


def smoothness_indicator(points, values) -> float:
    """Mean absolute residual of the least-squares affine fit to ``(points, values)``.

    Rank-deficient geometry (e.g. collinear points) is fitted on the reduced
    basis. Results at roundoff level are reported as exactly zero.
    """
    pts = as_points(points)
    vals = np.asarray(values, dtype=float).reshape(-1)
    if len(pts) != len(vals):
        raise InputDomainError(f"got {len(pts)} points but {len(vals)} values")
    if len(vals) < 3:
        raise InsufficientDataError(f"smoothness indicator needs at least 3 points, got {len(vals)}")
    centred = pts - pts.mean(axis=0)
    design = np.column_stack([np.ones(len(pts)), centred])
    coef, *_ = np.linalg.lstsq(design, vals, rcond=None)
    indicator = float(np.mean(np.abs(vals - design @ coef)))
    if indicator <= ZERO_INDICATOR_RTOL * float(np.max(np.abs(vals))):
        return 0.0
    return indicator


def mark_contaminated(indicators, h: float) -> np.ndarray:
    """Flag patches whose indicator strictly exceeds ``h``."""
    if not h >= 0:
        raise InputDomainError(f"contamination threshold must be nonnegative, got {h}")
    return np.asarray(indicators, dtype=float) > h


def _check_exponent(t: float, kernel: RadialKernel):
    smooth = kernel_smoothness(kernel)
    if smooth == UNBOUNDED:
        return
    # accuracy bound needs t >= k/2 + nu/4 for a C^{2k}_nu kernel; take nu = 1
    need = (smooth // 2) / 2 + 0.25
    if t < need:
        warnings.warn(f"t = {t} is below {need} needed to keep the order of {kernel.family.value}", stacklevel=3)


def nlpum_fit(X, F, config: PumConfig | None = None, nl: NlConfig | None = None, probe=None, covering=None) -> NlPumModel:
    """Fit the base PUM model, then indicators, weight factors and contamination flags.

    Unless ``nl.contamination_threshold`` is given, the threshold is the fill
    distance of ``X`` measured on ``probe`` (default: a grid 4x finer than the data).
    Patches with fewer than three points get ``I_j = inf``: they are flagged
    and take no part in the non-linear weights.
    """
    base = pum_fit(X, F, config or PumConfig(), covering=covering)
    return add_indicators(base, nl, probe)


def add_indicators(base: PumModel, nl: NlConfig | None = None, probe=None) -> NlPumModel:
    """Turn a fitted PUM model into an NL-PUM model (second half of :func:`nlpum_fit`)."""
    nl = nl or NlConfig()
    _check_exponent(nl.t, base.rbf_kernel)
    pts, vals = base.covering.points, base.values
    indicators = np.full(base.covering.M, np.inf)
    for j, idx in enumerate(base.covering.members):
        if len(idx) >= 3:
            indicators[j] = smoothness_indicator(pts[idx], vals[idx])
    if nl.contamination_threshold is None:
        threshold = fill_distance(pts, probe, base.covering.domain).value
    else:
        threshold = float(nl.contamination_threshold)
    contaminated = mark_contaminated(indicators, threshold)
    with np.errstate(divide="ignore"):
        log_gammas = -nl.t * np.log(nl.epsilon + indicators)
    logger.info(
        "indicators: max finite %.3e, threshold %.3e, %d contaminated of %d",
        np.max(indicators[np.isfinite(indicators)], initial=0.0), threshold, int(contaminated.sum()), len(indicators),
    )
    return NlPumModel(base, indicators, log_gammas, contaminated, threshold, nl)


def _nonlinear_alpha(model: NlPumModel, rows, patches, phi, nq):
    """Weights ``gamma_j phi_j`` rescaled per row by the largest ``gamma`` present.

    Rows where no patch has a finite indicator get all-zero alphas.
    """
    lg = model.log_gammas[patches]
    top = np.full(nq, -np.inf)
    np.maximum.at(top, rows, lg)
    with np.errstate(invalid="ignore"):
        scale = np.exp(lg - top[rows])
    return phi * np.nan_to_num(scale, nan=0.0)


def nonlinear_weights(x, model: NlPumModel):
    """Non-linear weights at one point as a list of ``(patch, weight)``."""
    Q = np.asarray(x, dtype=float).reshape(1, -1)
    rows, patches, phi = patch_pairs(model.base, Q)
    check_covered(rows, Q)
    alpha = _nonlinear_alpha(model, rows, patches, phi, 1)
    total = alpha.sum()
    if not total > 0:
        raise UncoveredPointError(f"no patch with finite smoothness indicator covers {Q[0].tolist()}", points=Q)
    return [(int(j), float(a / total)) for j, a in zip(patches, alpha)]


@dataclass(frozen=True, eq=False)
class NlEvaluation:
    """Batch NL-PUM output; ``discontinuity[k]`` marks points sent to the Shepard fallback."""

    values: np.ndarray
    discontinuity: np.ndarray
    n_active: np.ndarray
    n_contaminated: np.ndarray
    shepard_widenings: np.ndarray


def _classify(model: NlPumModel, rows, patches, phi, nq):
    sig = phi > model.config.weight_threshold
    n_active = np.bincount(rows[sig], minlength=nq)
    n_cont = np.bincount(rows[sig & model.contaminated[patches]], minlength=nq)
    disc = (n_active > 0) & (n_active == n_cont)
    return disc, n_active, n_cont


def classify_point(x, model: NlPumModel) -> PointClass:
    """Regular, or Discontinuity when every patch with ``phi_j(x) > threshold`` is contaminated."""
    Q = np.asarray(x, dtype=float).reshape(1, -1)
    rows, patches, phi = patch_pairs(model.base, Q)
    check_covered(rows, Q)
    sig = patches[phi > model.config.weight_threshold]
    cont = sig[model.contaminated[sig]]
    kind = PointKind.DISCONTINUITY if len(sig) and len(sig) == len(cont) else PointKind.REGULAR
    return PointClass(kind, tuple(int(j) for j in sig), tuple(int(j) for j in cont))


def shepard_batch(Q, index: CellIndex, F, kernel: RadialKernel, radius: float, max_widen: int = 3):
    """Shepard values ``sum psi_i f_i / sum psi_i`` with ``psi`` supported on ``radius``.

    Points with no data in range retry with the radius doubled, up to
    ``max_widen`` times, then take the nearest data value. Returns the values
    and the number of widenings used per point (``max_widen + 1`` = nearest).
    """
    Q = as_points(Q)
    F = np.asarray(F, dtype=float)
    out = np.full(len(Q), np.nan)
    widen = np.zeros(len(Q), dtype=np.int64)
    pending = np.arange(len(Q))
    r = float(radius)
    for level in range(max_widen + 1):
        if not len(pending):
            break
        psi_kernel = kernel.with_shape(1.0 / r)
        rows, ids, dist = index.query_pairs(Q[pending], r)
        psi = psi_kernel.unchecked(dist)
        num = np.bincount(rows, weights=psi * F[ids], minlength=len(pending))
        den = np.bincount(rows, weights=psi, minlength=len(pending))
        ok = den > 0
        # convex combination; clip roundoff so the value never leaves the data range
        lo = np.full(len(pending), np.inf)
        hi = np.full(len(pending), -np.inf)
        used = psi > 0
        np.minimum.at(lo, rows[used], F[ids[used]])
        np.maximum.at(hi, rows[used], F[ids[used]])
        vals = np.clip(num[ok] / den[ok], lo[ok], hi[ok])
        out[pending[ok]] = vals
        widen[pending[ok]] = level
        pending = pending[~ok]
        r *= 2.0
    if len(pending):
        nearest, _ = index.nearest(Q[pending])
        out[pending] = F[nearest]
        widen[pending] = max_widen + 1
    return out, widen


def shepard_eval(x, X, F, weight_kernel: RadialKernel, radius: float | None = None) -> float:
    """Shepard's method at a single point with the PU weight kernel family."""
    X = as_points(X)
    if radius is None:
        radius = weight_kernel.support_radius
    if not math.isfinite(radius) or radius <= 0:
        raise InputDomainError("shepard_eval needs a finite positive radius")
    index = CellIndex(X, radius)
    vals, widen = shepard_batch(np.asarray(x, dtype=float).reshape(1, -1), index, F, weight_kernel, radius)
    if widen[0]:
        how = "nearest neighbour" if widen[0] > 3 else f"radius x{2 ** int(widen[0])}"
        logger.warning("shepard fallback at %s used %s", np.ravel(x).tolist(), how)
    return float(vals[0])


def nlpum_evaluate(model: NlPumModel, Q) -> NlEvaluation:
    """Two-pass evaluation: classify every point, blend non-linearly, Shepard at discontinuity points."""
    Q = as_points(Q)
    nq = len(Q)
    base = model.base
    rows, patches, phi = patch_pairs(base, Q)
    check_covered(rows, Q)
    disc, n_active, n_cont = _classify(model, rows, patches, phi, nq)

    values = np.empty(nq)
    regular = ~disc[rows]
    r_rows, r_patches, r_phi = rows[regular], patches[regular], phi[regular]
    alpha = _nonlinear_alpha(model, r_rows, r_patches, r_phi, nq)
    total = np.bincount(r_rows, weights=alpha, minlength=nq)
    bad = (~disc) & ~(total > 0)
    if bad.any():
        raise UncoveredPointError(
            f"{int(bad.sum())} regular point(s) see only patches without an indicator", points=Q[bad]
        )
    vals = local_values(base, Q, r_rows, r_patches)
    with np.errstate(invalid="ignore", divide="ignore"):
        blended = np.bincount(r_rows, weights=alpha * vals, minlength=nq) / total
    values[~disc] = blended[~disc]

    widen = np.zeros(nq, dtype=np.int64)
    if disc.any():
        sv, sw = shepard_batch(Q[disc], model.data_index, base.values, base.weight_kernel, base.covering.radius)
        values[disc] = sv
        widen[disc] = sw
        if sw.any():
            logger.warning("shepard fallback widened its radius at %d point(s)", int((sw > 0).sum()))
    return NlEvaluation(values, disc, n_active, n_cont, widen)


def nlpum_eval(model: NlPumModel, x):
    """NL-PUM value and classification at a single point.

    For arrays of points use :func:`nlpum_evaluate`.
    """
    Q = np.asarray(x, dtype=float).reshape(1, -1)
    res = nlpum_evaluate(model, Q)
    return float(res.values[0]), classify_point(Q[0], model)
