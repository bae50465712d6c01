"""Data sites (grids, Halton points) and the benchmark test functions."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .covering import Domain
from .errors import InputDomainError
from .rbf_local import as_points

PRIMES = (2, 3, 5, 7, 11, 13)


def radical_inverse(k: np.ndarray, base: int) -> np.ndarray:
    """Van der Corput radical inverse of the integers ``k`` in ``base``."""
    k = np.asarray(k, dtype=np.int64).copy()
    out = np.zeros(k.shape)
    scale = 1.0 / base
    while np.any(k > 0):
        out += (k % base) * scale
        k //= base
        scale /= base
    return out


def halton(count: int, dim: int = 2) -> np.ndarray:
    """First ``count`` Halton points, starting from index 1 so the origin is skipped."""
    if count < 1:
        raise InputDomainError(f"halton count must be >= 1, got {count}")
    if not 1 <= dim <= len(PRIMES):
        raise InputDomainError(f"halton supports 1..{len(PRIMES)} dimensions, got {dim}")
    k = np.arange(1, count + 1)
    return np.stack([radical_inverse(k, PRIMES[d]) for d in range(dim)], axis=1)


def grid_points(level: int) -> np.ndarray:
    """The ``(2^l + 1)^2`` lattice ``(i / 2^l, j / 2^l)`` on the unit square."""
    if level < 1:
        raise InputDomainError(f"grid level must be >= 1, got {level}")
    return Domain().grid(2**level + 1)


@dataclass(frozen=True)
class NodeSpec:
    kind: str = "grid"
    level: int = 6
    count: int | None = None
    domain: Domain = field(default_factory=Domain)

    @property
    def size(self) -> int:
        if self.kind == "halton" and self.count is not None:
            return self.count
        return (2**self.level + 1) ** 2


def make_nodes(spec: NodeSpec) -> np.ndarray:
    """Build the node set described by ``spec``, mapped into its domain.

    Halton sets default to the same size as the grid of the same level.
    """
    if spec.kind == "grid":
        unit = grid_points(spec.level)
    elif spec.kind == "halton":
        unit = halton(spec.size, 2)
    else:
        raise InputDomainError(f"unknown node kind {spec.kind!r}; expected 'grid' or 'halton'")
    lo = np.asarray(spec.domain.lower)
    return lo + unit * spec.domain.widths


class TestFunction(enum.Enum):
    FRANKE = "franke"
    F1 = "f1"
    F2 = "f2"
    F3 = "f3"
    Z = "z"

    # keep pytest from collecting this enum as a test class
    __test__ = False

    @classmethod
    def parse(cls, name) -> "TestFunction":
        if isinstance(name, TestFunction):
            return name
        try:
            return cls(str(name).strip().lower())
        except ValueError:
            choices = ", ".join(m.value for m in cls)
            raise InputDomainError(f"unknown test function {name!r}; expected one of {choices}") from None

    @property
    def piecewise(self) -> bool:
        return self is not TestFunction.FRANKE


def franke(x, y):
    return (
        0.75 * np.exp(-((9 * x - 2) ** 2 + (9 * y - 2) ** 2) / 4)
        + 0.75 * np.exp(-((9 * x + 1) ** 2) / 49 - (9 * y + 1) / 10)
        + 0.5 * np.exp(-((9 * x - 7) ** 2 + (9 * y - 3) ** 2) / 4)
        - 0.2 * np.exp(-((9 * x - 4) ** 2) - (9 * y - 7) ** 2)
    )


def upper_region(fn: TestFunction, x, y):
    """Mask of the region that carries the alternative branch.

    For f1/f2/f3 that is where +1 is added; for z it is where sin(xy) is used.
    f2 uses ``{x >= 0.5} | {y >= 0.5}``, the side above and right of the L-shaped jump.
    """
    if fn is TestFunction.F1:
        return x * x + y * y - 0.25 >= 0
    if fn is TestFunction.F2:
        return (x >= 0.5) | (y >= 0.5)
    if fn is TestFunction.F3:
        return x + y - 1 >= 0
    if fn is TestFunction.Z:
        return (x - 0.5) ** 2 + (y - 0.5) ** 2 >= 0.25**2
    return np.zeros(np.shape(x), dtype=bool)


def eval_test_function(fn, x):
    """Evaluate a test function at one point ``(x, y)`` or at an ``(P, 2)`` array."""
    fn = TestFunction.parse(fn)
    arr = np.asarray(x, dtype=float)
    single = arr.ndim == 1
    pts = as_points(arr)
    xs, ys = pts[:, 0], pts[:, 1]
    side = upper_region(fn, xs, ys)
    if fn is TestFunction.Z:
        out = np.where(side, np.sin(xs * ys), np.cos(xs * ys))
    else:
        out = franke(xs, ys) + side.astype(float)
    return float(out[0]) if single else out
