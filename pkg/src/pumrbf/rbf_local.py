"""Local RBF interpolation on a single patch."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve
from scipy.spatial.distance import cdist, pdist

from .errors import ConditioningError, DuplicatePointsError, InputDomainError
from .kernels import RadialKernel

logger = logging.getLogger(__name__)

JITTER_LEVELS = (0.0, 1e-12, 1e-10, 1e-8)
DUPLICATE_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class LocalRbfModel:
    nodes: np.ndarray
    coeffs: np.ndarray
    kernel: RadialKernel
    jitter_used: float = 0.0
    residual: float = 0.0

    def __call__(self, x):
        return eval_rbf(self, x)


def as_points(points) -> np.ndarray:
    """Coerce ``points`` to a float array of shape ``(N, n)``; a 1-d input is one point."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise InputDomainError(f"expected an (N, n) array of points, got shape {arr.shape}")
    return arr


def gram_matrix(kernel: RadialKernel, points: np.ndarray) -> np.ndarray:
    return kernel.unchecked(cdist(points, points))


def solve_spd(A: np.ndarray, rhs: np.ndarray, levels=JITTER_LEVELS):
    """Cholesky solve of ``A c = rhs`` with escalating diagonal jitter.

    Returns ``(c, jitter)`` where ``jitter`` is the absolute amount added to the
    diagonal. Raises :class:`ConditioningError` if every level fails.
    """
    scale = float(np.mean(np.diag(A)))
    tried = []
    for lam in levels:
        jitter = lam * scale
        tried.append(jitter)
        try:
            factor = cho_factor(A + jitter * np.eye(A.shape[0]), lower=True, check_finite=False)
        except LinAlgError:
            continue
        if lam > 0:
            logger.debug("cholesky needed jitter %.3g", jitter)
        return cho_solve(factor, rhs, check_finite=False), jitter
    raise ConditioningError(
        f"matrix of size {A.shape[0]} not positive definite after jitter {tried}", jitters=tried
    )


def fit_rbf(points, values, kernel: RadialKernel) -> LocalRbfModel:
    """Fit the interpolant ``sum_i c_i phi(|x - x_i|)`` through ``(points, values)``.

    No polynomial tail is added, so constants are not reproduced exactly.
    """
    pts = as_points(points)
    vals = np.asarray(values, dtype=float).reshape(-1)
    if len(pts) != len(vals) or len(vals) == 0:
        raise InputDomainError(f"need matching nonempty points/values, got {len(pts)} and {len(vals)}")
    if not np.all(np.isfinite(pts)) or not np.all(np.isfinite(vals)):
        raise InputDomainError("points and values must be finite")
    if len(pts) > 1 and np.min(pdist(pts)) < DUPLICATE_TOL:
        raise DuplicatePointsError("fit_rbf received duplicate points")
    A = gram_matrix(kernel, pts)
    coeffs, jitter = solve_spd(A, vals)
    resid = float(np.max(np.abs(A @ coeffs - vals)))
    return LocalRbfModel(pts, coeffs, kernel, jitter, resid)


def eval_rbf(model: LocalRbfModel, x):
    """Evaluate the local interpolant at one point or at an ``(P, n)`` array of points."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = arr.reshape(1, -1) if single else arr
    out = model.kernel.unchecked(cdist(pts, model.nodes)) @ model.coeffs
    return float(out[0]) if single else out
