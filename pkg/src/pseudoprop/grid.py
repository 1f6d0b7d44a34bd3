"""Uniform discretization of [0, a] with quadrature-weighted norms.

Two conventions coexist and each experiment pins its own:

* endpoint-inclusive grids (n+1 points, trapezoidal weights), used by the
  convection-diffusion experiments;
* endpoint-free midpoint grids (n points, Riemann weight dx everywhere),
  used by the pure-convection experiments.

All function values are stored complex even for real data, so the whole
pipeline has a single code path.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatchError

NORM_KINDS = ("l2", "l1", "sup", "euclid")


@dataclass(frozen=True)
class Grid:
    """Ordered abscissae ``x`` on [0, a] with positive quadrature weights
    ``w`` summing to a.  Immutable; safe to share."""

    a: float
    x: np.ndarray
    w: np.ndarray
    include_endpoints: bool

    @property
    def n_points(self) -> int:
        return len(self.x)

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def compatible(self, other: "Grid") -> bool:
        return (
            self.n_points == other.n_points
            and self.include_endpoints == other.include_endpoints
            and abs(self.a - other.a) <= 1e-12 * self.a
            and float(np.max(np.abs(self.x - other.x))) <= 1e-12 * self.a
        )


@dataclass(frozen=True)
class SampledFunction:
    """Complex samples of a function on a Grid."""

    grid: Grid
    values: np.ndarray = field()

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if len(values) != self.grid.n_points:
            raise GridMismatchError(
                f"{len(values)} values for a {self.grid.n_points}-point grid"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("sampled values must be finite")


def make_grid(a: float, points_per_unit: int, include_endpoints: bool) -> Grid:
    """Build a uniform grid on [0, a].

    With endpoints, there are a*points_per_unit + 1 abscissae from 0 to a and
    trapezoidal weights (dx/2 at the two ends).  Without, there are
    a*points_per_unit midpoint abscissae (i + 1/2)*dx, each with weight dx.
    """
    if a <= 0:
        raise ValueError(f"interval length must be positive, got {a}")
    if points_per_unit < 1:
        raise ValueError(f"points_per_unit must be >= 1, got {points_per_unit}")
    n = a * points_per_unit
    n_round = int(round(n))
    if abs(n - n_round) > 1e-9 or n_round < 1:
        raise ValueError(f"a*points_per_unit = {n} is not a positive integer")

    if include_endpoints:
        x = np.linspace(0.0, a, n_round + 1)
        dx = a / n_round
        w = np.full(n_round + 1, dx)
        w[0] = w[-1] = dx / 2.0
    else:
        dx = a / n_round
        x = (np.arange(n_round) + 0.5) * dx
        w = np.full(n_round, dx)
    return Grid(a=float(a), x=x, w=w, include_endpoints=include_endpoints)


def sample(grid: Grid, fn) -> SampledFunction:
    """Sample a callable fn(x) on the grid."""
    return SampledFunction(grid, np.asarray(fn(grid.x), dtype=complex))


def _check_same_grid(f: SampledFunction, g: SampledFunction) -> None:
    if f.grid is not g.grid and not f.grid.compatible(g.grid):
        raise GridMismatchError("operands live on different grids")


def inner_product(f: SampledFunction, g: SampledFunction) -> complex:
    """Quadrature inner product sum_i w_i f_i conj(g_i).

    Linear in f, conjugate-linear in g; the discrete stand-in for the
    L2(0, a) pairing.
    """
    _check_same_grid(f, g)
    return complex(np.sum(f.grid.w * f.values * np.conj(g.values)))


def norm(f: SampledFunction, kind: str = "l2") -> float:
    """Norm of a sampled function.

    kind:
      l2     -- weighted, sqrt(sum w |f|^2); discrete L2 norm
      l1     -- weighted, sum w |f|; discrete L1 norm
      sup    -- max |f|
      euclid -- raw vector 2-norm, no quadrature weights (for comparison
                against plain-vector reference values)
    """
    if kind == "l2":
        return float(np.sqrt(np.sum(f.grid.w * np.abs(f.values) ** 2)))
    if kind == "l1":
        return float(np.sum(f.grid.w * np.abs(f.values)))
    if kind == "sup":
        return float(np.max(np.abs(f.values)))
    if kind == "euclid":
        return float(np.linalg.norm(f.values))
    raise ValueError(f"unknown norm kind {kind!r}; expected one of {NORM_KINDS}")
