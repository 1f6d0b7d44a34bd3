"""The pseudospectral transform G and everything built on it.

G maps a coefficient vector phi (one complex number per label s) to the
superposition sum_s phi(s) u_s, sampled on the grid.  Its adjoint under the
quadrature inner product is (G* f)(s) = <f, u_s>, and B = G* G is the Gram
matrix b(s, t) = <u_t, u_s>.  S carries counting measure, so ||phi||_1 is a
plain sum of moduli.

Coefficients of a target f can be computed three ways: explicitly inverting
B, solving B phi = G* f, or minimizing ||G phi - f|| directly in the weighted
norm.  The direct least-squares route is the default: rows are scaled by
sqrt(quadrature weight) so the discrete minimization matches the continuum
one, and a rank-revealing SVD factorization with relative cutoff 1e-12
handles near-degenerate families.

Propagation multiplies each coefficient by e^{lambda_s t}; the reported
a-priori bound combines the projection residual with the family's certified
defect.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .bounds import GrowthBound, error_bound
from .errors import GridMismatchError, IllConditionedGramError, UncertifiedFamilyError
from .families import PseudomodeFamily
from .grid import Grid, SampledFunction

ANALYZE_METHODS = ("inverse", "gram_solve", "direct_lsq")

# Gram matrices with condition estimates beyond this are treated as singular.
GRAM_CONDITION_LIMIT = 1e-3 / np.finfo(float).eps

LSQ_CUTOFF = 1e-12


@dataclass(frozen=True)
class Transform:
    """Sampled transform matrix (one column per label) plus its Gram data."""

    family: PseudomodeFamily
    grid: Grid
    matrix: np.ndarray
    gram: np.ndarray
    gram_condition: float

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[1]

    def adjoint_apply(self, f: SampledFunction) -> np.ndarray:
        """(G* f)(s) = <f, u_s> for every label s."""
        self._check_grid(f)
        return np.conj(self.matrix).T @ (self.grid.w * f.values)

    def _check_grid(self, f: SampledFunction) -> None:
        if f.grid is not self.grid and not f.grid.compatible(self.grid):
            raise GridMismatchError("function does not live on the transform's grid")

    def _require_invertible_gram(self) -> None:
        if not np.isfinite(self.gram_condition) or (
            self.gram_condition > GRAM_CONDITION_LIMIT
        ):
            raise IllConditionedGramError(
                f"Gram matrix condition estimate {self.gram_condition:.3e} "
                f"exceeds {GRAM_CONDITION_LIMIT:.3e}",
                condition=self.gram_condition,
            )


@dataclass(frozen=True)
class Coefficients:
    """Expansion coefficients phi(s), indexed like the family labels."""

    labels: np.ndarray
    values: np.ndarray

    @property
    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values)))


@dataclass(frozen=True)
class ProjectionResult:
    projection: SampledFunction
    residual_l2: float
    residual_sup: float
    coefficients: Coefficients


@dataclass(frozen=True)
class PropagationReport:
    """State of the propagated expansion at one time.

    ``bound`` is residual_l2 * M e^{gamma t} + eps (1 + M + M t) ||phi||_1
    e^{gamma t} with phi the t = 0 coefficient vector.
    """

    t: float
    f_t: SampledFunction
    phi_t: Coefficients
    residual_l2: float
    residual_sup: float
    phi_l1: float
    mu: float
    bound: float


def build_transform(
    family: PseudomodeFamily, grid: Grid, strict: bool = True
) -> Transform:
    """Assemble G and its Gram matrix, verifying positive definiteness.

    With strict=True (the default) a Gram matrix whose Hermitian eigenvalue
    range looks singular raises IllConditionedGramError; strict=False defers
    the failure to the operations that actually need B.
    """
    if not family.grid.compatible(grid):
        raise GridMismatchError("family modes do not live on the given grid")
    matrix = family.modes
    gram = np.conj(matrix).T @ (grid.w[:, None] * matrix)
    eigs = la.eigvalsh(gram)
    lmin, lmax = float(eigs[0]), float(eigs[-1])
    condition = lmax / lmin if lmin > 0 else np.inf
    transform = Transform(
        family=family,
        grid=grid,
        matrix=matrix,
        gram=gram,
        gram_condition=condition,
    )
    if strict:
        transform._require_invertible_gram()
    return transform


def _weighted_lstsq(transform: Transform, f: SampledFunction) -> np.ndarray:
    sqw = np.sqrt(transform.grid.w)
    phi, _, rank, _ = la.lstsq(
        sqw[:, None] * transform.matrix,
        sqw * f.values,
        cond=LSQ_CUTOFF,
        lapack_driver="gelsd",
    )
    if rank < transform.n_modes:
        warnings.warn(
            f"effective rank {rank} < {transform.n_modes} modes; "
            f"coefficients are a minimum-norm solution",
            stacklevel=3,
        )
    return phi


def analyze(
    transform: Transform, f: SampledFunction, method: str = "direct_lsq"
) -> Coefficients:
    """Coefficients phi of f in the family, by one of three methods.

    ``direct_lsq`` (default) minimizes ||G phi - f|| without forming B and is
    the most accurate; ``gram_solve`` solves B phi = G* f; ``inverse``
    applies an explicitly computed B^-1.
    """
    transform._check_grid(f)
    if method == "direct_lsq":
        phi = _weighted_lstsq(transform, f)
    elif method in ("gram_solve", "inverse"):
        transform._require_invertible_gram()
        gstar = transform.adjoint_apply(f)
        if method == "gram_solve":
            phi = la.solve(transform.gram, gstar, assume_a="her")
        else:
            phi = la.inv(transform.gram) @ gstar
    else:
        raise ValueError(f"unknown method {method!r}; expected one of {ANALYZE_METHODS}")
    return Coefficients(labels=transform.family.labels, values=phi)


def synthesize(transform: Transform, phi: np.ndarray) -> SampledFunction:
    """G phi: the superposition of modes with the given coefficients."""
    return SampledFunction(transform.grid, transform.matrix @ phi)


def project(transform: Transform, f: SampledFunction) -> ProjectionResult:
    """Best approximation of f in the span of the modes, with residuals in
    the weighted l2 and sup norms."""
    coeffs = analyze(transform, f)
    pf = synthesize(transform, coeffs.values)
    diff = f.values - pf.values
    residual_l2 = float(np.sqrt(np.sum(transform.grid.w * np.abs(diff) ** 2)))
    residual_sup = float(np.max(np.abs(diff)))
    return ProjectionResult(pf, residual_l2, residual_sup, coeffs)


def propagate(
    transform: Transform,
    f: SampledFunction,
    times,
    growth: GrowthBound | None = None,
) -> list[PropagationReport]:
    """Evolve f: phi is solved once, then each coefficient is damped by
    e^{lambda_s t} and the state re-synthesized for every requested time.

    Requires a certified family (the error bound needs its defect epsilon).
    """
    family = transform.family
    if family.epsilon is None:
        raise UncertifiedFamilyError(
            "family has no certified defect; run certify_family first"
        )
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise ValueError("propagation times must be >= 0")
    gb = growth if growth is not None else GrowthBound()

    base = project(transform, f)
    phi = base.coefficients.values
    phi_l1 = base.coefficients.l1_norm
    lam = family.eigenvalues
    mu = float(np.max(lam.real))

    reports = []
    for t in times:
        phi_t = phi * np.exp(lam * t)
        f_t = synthesize(transform, phi_t)
        reports.append(
            PropagationReport(
                t=t,
                f_t=f_t,
                phi_t=Coefficients(labels=family.labels, values=phi_t),
                residual_l2=base.residual_l2,
                residual_sup=base.residual_sup,
                phi_l1=phi_l1,
                mu=mu,
                bound=error_bound(base.residual_l2, family.epsilon, gb, phi_l1, t),
            )
        )
    return reports


def kernel(transform: Transform, t: float) -> np.ndarray:
    """Dense integral kernel K_t(x, y) of the approximate propagator:

        K_t = U e^{lambda t} B^-1 U^H,

    acting by (R_t f)(x) = sum_y K_t(x, y) f(y) w_y."""
    if t < 0:
        raise ValueError("kernel time must be >= 0")
    transform._require_invertible_gram()
    lam = transform.family.eigenvalues
    right = la.solve(transform.gram, np.conj(transform.matrix).T, assume_a="her")
    return (transform.matrix * np.exp(lam * t)[None, :]) @ right


def apply_kernel(
    transform: Transform, kernel_matrix: np.ndarray, f: SampledFunction
) -> SampledFunction:
    """Quadrature application of a kernel matrix to a sampled function."""
    transform._check_grid(f)
    return SampledFunction(transform.grid, kernel_matrix @ (transform.grid.w * f.values))
