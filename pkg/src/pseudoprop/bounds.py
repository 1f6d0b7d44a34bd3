"""Growth-bound bookkeeping: real-part capping of approximate eigenvalues
and the a-priori propagation error bound.

The semigroup is assumed to satisfy ||T_t|| <= M e^{gamma t}.  Both built-in
operators are contractions, so M = 1, gamma = 0 are the defaults.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class GrowthBound:
    """Constants (M, gamma) of the semigroup growth estimate.  M >= 1 since
    ||T_0|| = 1."""

    M: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.M < 1.0:
            raise ValueError(f"M must be >= 1, got {self.M}")


@dataclass(frozen=True)
class ClipResult:
    value: complex
    eps: float
    was_clipped: bool


def clip_eigenvalue(lam: complex, gb: GrowthBound, eps: float) -> ClipResult:
    """Cap the real part of an approximate eigenvalue at gamma.

    An approximate eigenpair with defect eps cannot have Re(lambda) above
    gamma + 2*M*eps.  If Re(lambda) > gamma the eigenvalue is replaced by
    gamma + i*Im(lambda), which remains an approximate eigenvalue at the
    inflated defect eps*(3M + 1).  Values already at or below gamma pass
    through unchanged, so clipping is idempotent.
    """
    if not (0.0 < eps < 0.5):
        raise ValueError(f"defect eps must lie in (0, 1/2), got {eps}")
    lam = complex(lam)
    if lam.real <= gb.gamma:
        return ClipResult(lam, eps, False)
    if lam.real > gb.gamma + 2.0 * gb.M * eps:
        warnings.warn(
            f"Re(lambda) = {lam.real} exceeds gamma + 2*M*eps = "
            f"{gb.gamma + 2.0 * gb.M * eps}; the defect certificate looks wrong",
            stacklevel=2,
        )
    return ClipResult(complex(gb.gamma, lam.imag), eps * (3.0 * gb.M + 1.0), True)


def error_bound(
    residual: float, eps: float, gb: GrowthBound, phi_l1: float, t: float
) -> float:
    """A-priori bound on ||T_t f - G e^{lambda t} phi||:

        residual * M * e^{gamma t} + eps * (1 + M + M*t) * ||phi||_1 * e^{gamma t}

    where residual = ||f - G phi|| and phi is the least-squares coefficient
    vector of f.
    """
    growth = gb.M * np.exp(gb.gamma * t)
    return float(
        residual * growth
        + eps * (1.0 + gb.M + gb.M * t) * phi_l1 * np.exp(gb.gamma * t)
    )


def usefulness_check(
    mu: float, gb: GrowthBound, phi_l1: float, t: float, bound: float
) -> bool:
    """True when the error bound exceeds ||phi||_1 e^{mu t}, the natural size
    of the propagated state itself -- i.e. the bound has stopped saying
    anything useful.  mu = sup_s Re(lambda_s)."""
    return bound > phi_l1 * np.exp(mu * t)
