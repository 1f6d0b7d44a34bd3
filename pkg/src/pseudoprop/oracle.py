"""Independent reference solutions.

The pure-convection semigroup is exactly solvable: (T_t f)(x) = f(x + t)
truncated at the right endpoint.  For the convection-diffusion operator a
Crank-Nicolson finite-difference solver on a refined grid provides the
reference; it shares no machinery with the spectral code paths it is used to
check.  The free-space gaussian peak height (1 + 4t/b)^{-1/2} gives a third,
closed-form comparison point.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

from .errors import SolverFailureError
from .grid import Grid, SampledFunction


def convection_exact(f: SampledFunction, t: float) -> SampledFunction:
    """(T_t f)(x) = f(x + t) for x + t < a, else 0.

    Off-grid shifts interpolate linearly between samples; shifts that are an
    integer multiple of the grid spacing are exact.
    """
    if t < 0:
        raise ValueError("time must be >= 0")
    grid = f.grid
    y = grid.x + t
    re = np.interp(y, grid.x, f.values.real)
    im = np.interp(y, grid.x, f.values.imag)
    shifted = re + 1j * im
    shifted[y >= grid.a] = 0.0
    return SampledFunction(grid, shifted)


def _cn_march(
    u: np.ndarray, n_steps: int, dt: float, h: float, b: float
) -> np.ndarray:
    """Advance interior Dirichlet values by n_steps of Crank-Nicolson for
    b^-1 u'' + u' with central differences."""
    m = len(u)
    lower = 1.0 / (b * h * h) - 1.0 / (2.0 * h)
    diag = -2.0 / (b * h * h)
    upper = 1.0 / (b * h * h) + 1.0 / (2.0 * h)

    ab = np.zeros((3, m), dtype=complex)
    ab[0, 1:] = -0.5 * dt * upper
    ab[1, :] = 1.0 - 0.5 * dt * diag
    ab[2, :-1] = -0.5 * dt * lower

    half = 0.5 * dt
    for _ in range(n_steps):
        rhs = (1.0 + half * diag) * u
        rhs[:-1] += half * upper * u[1:]
        rhs[1:] += half * lower * u[:-1]
        try:
            u = la.solve_banded((1, 1), ab, rhs)
        except la.LinAlgError as exc:  # pragma: no cover - matrix is diag-dominant
            raise SolverFailureError(f"Crank-Nicolson step failed: {exc}") from exc
    return u


def _fine_setup(grid: Grid, values: np.ndarray, refine: int):
    if not grid.include_endpoints:
        raise ValueError(
            "the finite-difference reference needs an endpoint-inclusive grid "
            "(Dirichlet rows live at x = 0 and x = a)"
        )
    if refine < 1 or int(refine) != refine:
        raise ValueError(f"refinement factor must be a positive integer, got {refine}")
    refine = int(refine)
    n_fine = (grid.n_points - 1) * refine
    xf = np.linspace(0.0, grid.a, n_fine + 1)
    uf = np.interp(xf, grid.x, values.real) + 1j * np.interp(xf, grid.x, values.imag)
    return xf, uf, refine


def convdiff_reference(
    f: SampledFunction, t: float, b: float, refine: int = 4, dt: float = 0.005
) -> SampledFunction:
    """Crank-Nicolson reference for b^-1 f'' + f' with Dirichlet conditions.

    The input is interpolated onto a grid refined by ``refine``, stepped to
    time t, and restricted back (the coarse points are a subset of the fine
    ones, so restriction is exact).  dt <= 0.01 is required for the accuracy
    this oracle is trusted at.
    """
    results = convdiff_reference_path(f, [t], b, refine=refine, dt=dt)
    return results[0]


def convdiff_reference_path(
    f: SampledFunction, times, b: float, refine: int = 4, dt: float = 0.005
) -> list[SampledFunction]:
    """As convdiff_reference, but marching once through a sorted list of
    times and snapshotting at each."""
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise ValueError("times must be >= 0")
    if sorted(times) != times:
        raise ValueError("times must be sorted ascending")
    if dt <= 0:
        raise ValueError("dt must be positive")
    if b <= 0:
        raise ValueError("b must be positive")
    grid = f.grid
    xf, uf, refine = _fine_setup(grid, f.values, refine)
    h = xf[1] - xf[0]

    snapshots = []
    u_int = uf[1:-1].copy()
    t_now = 0.0
    for t in times:
        if t == 0.0:
            # restriction round-trip of the initial data, boundary included
            snapshots.append(SampledFunction(grid, uf[::refine].copy()))
            continue
        span = t - t_now
        if span > 0:
            n_steps = max(1, int(round(span / dt)))
            u_int = _cn_march(u_int, n_steps, span / n_steps, h, b)
            t_now = t
        full = np.zeros_like(uf)
        full[1:-1] = u_int
        snapshots.append(SampledFunction(grid, full[::refine].copy()))
    return snapshots


def gaussian_free_max(t: float, b: float) -> float:
    """Peak height (1 + 4t/b)^{-1/2} of the freely diffusing unit gaussian
    drifting at speed 1 on the whole line."""
    if t < 0:
        raise ValueError("time must be >= 0")
    if b <= 0:
        raise ValueError("b must be positive")
    return float(1.0 / np.sqrt(1.0 + 4.0 * t / b))
