"""Partition of unity interpolation with Shepard weights over ball patches."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .covering import Covering, Domain, assign_points, build_covering
from .errors import ConditioningError, InputDomainError, UncoveredPointError
from .kernels import RadialKernel, get_kernel
from .rbf_local import LocalRbfModel, as_points, eval_rbf, fit_rbf

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PumConfig:
    """Kernel choices for a PUM fit.

    ``rbf_shape`` scales the local RBF kernel. With ``relative_shape`` it is
    divided by the patch radius, so the kernel flattens at the same rate as the
    patches shrink; this keeps small patches well conditioned for very smooth
    kernels such as the Gaussian. The weight kernel always gets shape
    ``1 / radius`` so its support is exactly the patch.
    """

    rbf_kernel: str = "matern2"
    pu_kernel: str = "wendland2"
    rbf_shape: float = 1.0
    relative_shape: bool = False
    domain: Domain = field(default_factory=Domain)


@dataclass(frozen=True, eq=False)
class PumModel:
    covering: Covering
    locals: tuple
    weight_kernel: RadialKernel
    rbf_kernel: RadialKernel
    values: np.ndarray

    @property
    def points(self) -> np.ndarray:
        return self.covering.points

    @property
    def active(self) -> np.ndarray:
        return np.array([loc is not None for loc in self.locals], dtype=bool)


def pum_fit(X, F, config: PumConfig | None = None, covering: Covering | None = None) -> PumModel:
    """Fit one local RBF interpolant per nonempty patch.

    The covering defaults to ``build_covering(len(X), config.domain)``; a
    prebuilt covering (with or without members) may be passed instead.
    Patches without data are left inactive (``locals[j] is None``).
    """
    config = config or PumConfig()
    X = as_points(X)
    F = np.asarray(F, dtype=float).reshape(-1)
    if len(X) != len(F):
        raise InputDomainError(f"got {len(X)} points but {len(F)} values")
    if not np.all(np.isfinite(F)):
        raise InputDomainError("data values must be finite")
    if covering is None:
        covering = build_covering(len(X), config.domain)
    if covering.members is None or covering.points is None or not np.array_equal(covering.points, X):
        covering = assign_points(covering, X)
    shape = config.rbf_shape / covering.radius if config.relative_shape else config.rbf_shape
    rbf_kernel = get_kernel(config.rbf_kernel, shape)
    weight_kernel = get_kernel(config.pu_kernel, 1.0 / covering.radius)
    if not weight_kernel.family.compact:
        raise InputDomainError(f"partition of unity needs a compactly supported kernel, got {config.pu_kernel!r}")
    fitted = []
    for j, idx in enumerate(covering.members):
        if len(idx) == 0:
            fitted.append(None)
            continue
        try:
            fitted.append(fit_rbf(X[idx], F[idx], rbf_kernel))
        except ConditioningError as exc:
            raise ConditioningError(f"patch {j}: {exc}", jitters=exc.jitters, patch=j) from exc
    n_inactive = sum(f is None for f in fitted)
    if n_inactive:
        logger.info("%d of %d patches are empty and inactive", n_inactive, covering.M)
    return PumModel(covering, tuple(fitted), weight_kernel, rbf_kernel, F)


def patch_pairs(model: PumModel, Q: np.ndarray):
    """Active patches whose weight is positive at each query.

    Returns ``(rows, patches, phi)`` sorted by row then patch, where ``phi``
    is the unnormalised weight-kernel value.
    """
    rows, patches, dist = model.covering.patches_near(Q)
    keep = model.active[patches]
    rows, patches, dist = rows[keep], patches[keep], dist[keep]
    phi = model.weight_kernel.unchecked(dist)
    pos = phi > 0.0
    return rows[pos], patches[pos], phi[pos]


def check_covered(rows: np.ndarray, Q: np.ndarray):
    hit = np.zeros(len(Q), dtype=bool)
    hit[rows] = True
    if not hit.all():
        bad = np.flatnonzero(~hit)
        raise UncoveredPointError(
            f"{len(bad)} evaluation point(s) lie in no active patch, first at {Q[bad[0]].tolist()}",
            points=Q[bad],
        )


def local_values(model: PumModel, Q: np.ndarray, rows: np.ndarray, patches: np.ndarray) -> np.ndarray:
    """``I_j(Q[row])`` for every (row, patch) pair, evaluated patch by patch."""
    out = np.empty(len(rows))
    order = np.argsort(patches, kind="stable")
    bounds = np.flatnonzero(np.diff(patches[order])) + 1
    for chunk in np.split(order, bounds):
        if len(chunk) == 0:
            continue
        j = patches[chunk[0]]
        out[chunk] = eval_rbf(model.locals[j], Q[rows[chunk]])
    return out


def normalise(rows: np.ndarray, alpha: np.ndarray, nq: int) -> np.ndarray:
    total = np.bincount(rows, weights=alpha, minlength=nq)
    return alpha / total[rows]


def pu_weights(x, covering: Covering, weight_kernel: RadialKernel, active=None):
    """Shepard weights ``phi_j(x) / sum_k phi_k(x)`` as a list of ``(patch, weight)``."""
    x = np.asarray(x, dtype=float).reshape(1, -1)
    _, patches, dist = covering.patches_near(x)
    if active is not None:
        keep = np.asarray(active)[patches]
        patches, dist = patches[keep], dist[keep]
    phi = weight_kernel.unchecked(dist)
    pos = phi > 0.0
    patches, phi = patches[pos], phi[pos]
    if len(phi) == 0:
        raise UncoveredPointError(f"point {x[0].tolist()} lies in no patch", points=x)
    w = phi / phi.sum()
    return [(int(j), float(v)) for j, v in zip(patches, w)]


def pum_eval(model: PumModel, x):
    """Evaluate the PUM interpolant at one point or at an ``(P, n)`` array."""
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    Q = as_points(arr)
    rows, patches, phi = patch_pairs(model, Q)
    check_covered(rows, Q)
    w = normalise(rows, phi, len(Q))
    vals = local_values(model, Q, rows, patches)
    out = np.bincount(rows, weights=w * vals, minlength=len(Q))
    return float(out[0]) if single else out
