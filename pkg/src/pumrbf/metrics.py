"""Error norms, empirical convergence rates and overshoot measures."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .covering import CellIndex
from .errors import InputDomainError
from .rbf_local import as_points


@dataclass(frozen=True)
class LevelResult:
    level: int
    fill: float
    mae: float
    rmse: float
    rate_inf: float | None = None
    rate_2: float | None = None


def error_norms(exact, approx):
    """Return ``(max |e|, sqrt(mean e^2))`` over all probe points."""
    exact = np.asarray(exact, dtype=float).reshape(-1)
    approx = np.asarray(approx, dtype=float).reshape(-1)
    if exact.shape != approx.shape or exact.size == 0:
        raise InputDomainError(f"error_norms needs equal nonempty lengths, got {exact.size} and {approx.size}")
    e = np.abs(exact - approx)
    return float(e.max()), float(math.sqrt(np.mean(e * e)))


def _rate(e_prev, e_cur, h_prev, h_cur):
    if not (e_prev > 0 and e_cur > 0):
        return None
    return math.log(e_prev / e_cur) / math.log(h_prev / h_cur)


def convergence_rates(levels):
    """Fill in ``log(E_{l-1} / E_l) / log(h_{l-1} / h_l)`` for MAE and RMSE.

    The first level, and any level where an error is exactly zero, gets ``None``.
    """
    levels = list(levels)
    for a, b in zip(levels, levels[1:]):
        if not b.level > a.level:
            raise InputDomainError("levels must be sorted in ascending order")
        if not b.fill < a.fill:
            raise InputDomainError(f"fill distance must decrease from level {a.level} to {b.level}")
    out = []
    for k, cur in enumerate(levels):
        if k == 0:
            out.append(replace(cur, rate_inf=None, rate_2=None))
            continue
        prev = levels[k - 1]
        out.append(
            replace(
                cur,
                rate_inf=_rate(prev.mae, cur.mae, prev.fill, cur.fill),
                rate_2=_rate(prev.rmse, cur.rmse, prev.fill, cur.fill),
            )
        )
    return out


def local_range(Q, X, F, radius: float):
    """Min and max of the data values within ``radius`` of each query point.

    Points with no data in range get ``(inf, -inf)``.
    """
    Q, X = as_points(Q), as_points(X)
    F = np.asarray(F, dtype=float)
    rows, ids, _ = CellIndex(X, radius).query_pairs(Q, radius)
    lo = np.full(len(Q), np.inf)
    hi = np.full(len(Q), -np.inf)
    np.minimum.at(lo, rows, F[ids])
    np.maximum.at(hi, rows, F[ids])
    return lo, hi


def range_excess(values, lo, hi):
    """Per-point overshoot above ``hi`` and undershoot below ``lo`` (both >= 0)."""
    values = np.asarray(values, dtype=float)
    over = np.where(np.isfinite(hi), np.maximum(values - hi, 0.0), 0.0)
    under = np.where(np.isfinite(lo), np.maximum(lo - values, 0.0), 0.0)
    return over, under


def global_excess(values, F):
    """Largest excursion above ``max F`` and below ``min F``."""
    values = np.asarray(values, dtype=float)
    F = np.asarray(F, dtype=float)
    return float(max(values.max() - F.max(), 0.0)), float(max(F.min() - values.min(), 0.0))
