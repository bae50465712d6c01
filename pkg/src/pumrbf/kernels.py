"""Radial functions used as RBF basis functions and as partition-of-unity weights.

Every family is normalised so that ``phi(0) == 1``. The radial argument is
``shape * r``; Wendland families vanish identically for ``shape * r >= 1``.

==========  =======================================  ==========
Name        phi(s), s = shape * r                    Smoothness
==========  =======================================  ==========
gaussian    exp(-s^2)                                C^inf
wendland0   (1 - s)_+^2                              C^0
wendland2   (1 - s)_+^4 (4s + 1)                     C^2
wendland4   (1 - s)_+^6 (35s^2 + 18s + 3) / 3        C^4
matern0     exp(-s)                                  C^0
matern2     (1 + s) exp(-s)                          C^2
matern4     (3 + 3s + s^2) exp(-s) / 3               C^4
==========  =======================================  ==========
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputDomainError

UNBOUNDED = "unbounded"


class Family(enum.Enum):
    GAUSSIAN = "gaussian"
    WENDLAND0 = "wendland0"
    WENDLAND2 = "wendland2"
    WENDLAND4 = "wendland4"
    MATERN0 = "matern0"
    MATERN2 = "matern2"
    MATERN4 = "matern4"

    @classmethod
    def parse(cls, name: "str | Family") -> "Family":
        if isinstance(name, Family):
            return name
        key = str(name).strip().lower().replace("-", "").replace("_", "")
        for member in cls:
            if member.value == key:
                return member
        choices = ", ".join(m.value for m in cls)
        raise InputDomainError(f"unknown kernel family {name!r}; expected one of {choices}")

    @property
    def compact(self) -> bool:
        return self in (Family.WENDLAND0, Family.WENDLAND2, Family.WENDLAND4)


_SMOOTHNESS = {
    Family.GAUSSIAN: UNBOUNDED,
    Family.WENDLAND0: 0,
    Family.WENDLAND2: 2,
    Family.WENDLAND4: 4,
    Family.MATERN0: 0,
    Family.MATERN2: 2,
    Family.MATERN4: 4,
}


def _wendland(s, power, coeffs):
    # (1 - s)_+^power * p(s), p in Horner form with coeffs highest degree first
    poly = np.zeros_like(s)
    for c in coeffs:
        poly = poly * s + c
    base = np.clip(1.0 - s, 0.0, None)
    return base**power * poly


def _profile(family: Family, s: np.ndarray) -> np.ndarray:
    if family is Family.GAUSSIAN:
        return np.exp(-s * s)
    if family is Family.WENDLAND0:
        return _wendland(s, 2, (1.0,))
    if family is Family.WENDLAND2:
        return _wendland(s, 4, (4.0, 1.0))
    if family is Family.WENDLAND4:
        return _wendland(s, 6, (35.0 / 3.0, 6.0, 1.0))
    if family is Family.MATERN0:
        return np.exp(-s)
    if family is Family.MATERN2:
        return (1.0 + s) * np.exp(-s)
    if family is Family.MATERN4:
        return (1.0 + s * (1.0 + s / 3.0)) * np.exp(-s)
    raise AssertionError(family)


@dataclass(frozen=True)
class RadialKernel:
    """A radial function ``phi(shape * r)`` from one of the supported families."""

    family: Family
    shape: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "family", Family.parse(self.family))
        shape = float(self.shape)
        if not (shape > 0.0 and math.isfinite(shape)):
            raise InputDomainError(f"kernel shape must be positive and finite, got {self.shape!r}")
        object.__setattr__(self, "shape", shape)

    @property
    def support_radius(self) -> float:
        """Radius beyond which the kernel vanishes (``inf`` for global kernels)."""
        return 1.0 / self.shape if self.family.compact else math.inf

    def with_shape(self, shape: float) -> "RadialKernel":
        return RadialKernel(self.family, shape)

    def __call__(self, r):
        return kernel_eval(self, r)

    def unchecked(self, r: np.ndarray) -> np.ndarray:
        """Evaluate on a distance array already known to be finite and nonnegative."""
        return _profile(self.family, self.shape * r)


def get_kernel(name, shape: float = 1.0) -> RadialKernel:
    """Look up a kernel by case-insensitive family name, e.g. ``"Matern2"``."""
    return RadialKernel(Family.parse(name), shape)


def kernel_eval(kernel: RadialKernel, r):
    """Evaluate ``kernel`` at distance(s) ``r``.

    Accepts a scalar or an array; a scalar in gives a float out. Raises
    :class:`InputDomainError` for negative or non-finite distances.
    """
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise InputDomainError("kernel distances must be finite and nonnegative")
    out = kernel.unchecked(arr)
    if out.ndim == 0:
        return float(out)
    return out


def kernel_smoothness(kernel: "RadialKernel | Family | str"):
    """Smoothness class ``k`` (the kernel is C^k) or ``"unbounded"`` for the Gaussian."""
    family = kernel.family if isinstance(kernel, RadialKernel) else Family.parse(kernel)
    return _SMOOTHNESS[family]
