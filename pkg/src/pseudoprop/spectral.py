"""Classical spectral expansions for the convection-diffusion operator.

Two truncated reconstructions of f from the exact eigenpairs:

* Q_N f = sum_{n<=N} <f, e_n*> / <e_n, e_n*> e_n, the biorthogonal series.
  The coefficient denominators use the closed form k_n^2 a/(2 e^{ba/2}); the
  discrete pairing loses all significant digits for large b and is only
  logged for diagnosis.
* P_N f, the orthogonal projection onto span{e_1..e_N}, computed by the same
  weighted least-squares machinery as the pseudomode projection.

Both are expected to behave badly for large b; they exist as the baseline
the pseudospectral expansion is measured against, so ill-conditioning is
reported rather than fatal.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .families import EigenFamily, PseudomodeFamily, eigen_pairing
from .grid import SampledFunction
from .transform import build_transform, project

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpectralExpansion:
    eigens: EigenFamily
    N: int

    def __post_init__(self):
        if not (1 <= self.N <= self.eigens.count):
            raise ValueError(
                f"truncation N = {self.N} outside 1..{self.eigens.count}"
            )


def _truncated_eigen_family(exp: SpectralExpansion) -> PseudomodeFamily:
    """View of the first N eigenpairs as a mode family, so the projection
    machinery can be reused."""
    eig = exp.eigens
    return PseudomodeFamily(
        kind="eigen",
        grid=eig.grid,
        labels=eig.indices[: exp.N],
        eigenvalues=eig.eigenvalues[: exp.N].astype(complex),
        modes=eig.modes[:, : exp.N],
        params=dict(eig.params),
    )


def biorthogonal_expand(exp: SpectralExpansion, f: SampledFunction) -> SampledFunction:
    """Q_N f from the biorthogonal system.

    Raises OverflowError when the pairing <e_n, e_n*> is not representable
    (the adjoint family is flagged, or the closed form underflows).
    """
    eig = exp.eigens
    pairing = eigen_pairing(eig)[: exp.N]
    w = eig.grid.w
    adj = eig.adjoints[:, : exp.N]
    raw = np.conj(adj).T @ (w * f.values)  # <f, e_n*>
    discrete_pairing = np.einsum("i,ij,ij->j", w, eig.modes[:, : exp.N], np.conj(adj))
    logger.debug(
        "biorthogonal pairing: closed form %s vs discrete %s",
        pairing,
        discrete_pairing,
    )
    coeffs = raw / pairing
    return SampledFunction(eig.grid, eig.modes[:, : exp.N] @ coeffs)


def ortho_project(exp: SpectralExpansion, f: SampledFunction) -> SampledFunction:
    """P_N f, the optimal approximation in span{e_1..e_N}.

    Built without the strict Gram check: for large b or N the eigenvector
    Gram matrix is numerically singular, and the point of this baseline is
    to report how it degrades, not to crash.
    """
    transform = build_transform(_truncated_eigen_family(exp), exp.eigens.grid, strict=False)
    if not np.isfinite(transform.gram_condition):
        logger.warning(
            "eigenvector Gram matrix numerically indefinite at N=%d", exp.N
        )
    return project(transform, f).projection
