"""Analytic pseudomode families and exact eigenpair families.

Three pseudomode families are built from closed forms:

* convection:  u_s(x) = k e^{-cx/a + 2 pi i s x/a},  lambda_s = -c/a + 2 pi i s/a,
  with k^-2 = (a/2c)(1 - e^{-2c});
* fourier:     the c = 0 degenerate case, u_s = a^{-1/2} e^{2 pi i s x/a},
  an orthonormal set with purely imaginary lambda_s;
* convdiff:    u_sigma(x) = k (e^{z1 x} - e^{z2 x}) with z1 = -c/a + i sigma,
  z2 = -b + c/a - i sigma, sigma = 2 pi s/a, and
  lambda_s = -sigma^2/b + i sigma - c/a + c^2/(a^2 b) - 2 i sigma c/(a b).

Each family can be certified: a cutoff v turns every u_s into a
boundary-condition-respecting w_s = u_s v, and the certificate is

    epsilon = max_s ( ||u_s - w_s|| + ||A w_s - lambda_s w_s|| )

with all derivatives taken analytically, so epsilon measures the continuum
defect rather than discretization error.

The exact eigenpairs of the convection-diffusion operator b^-1 f'' + f' with
Dirichlet conditions are also provided, together with their adjoint family
and spectral projection norms.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bounds import GrowthBound, clip_eigenvalue
from .grid import Grid

CUTOFF_SHAPES = ("linear", "exponential")
FAMILY_KINDS = ("convection", "fourier", "convdiff", "eigen")


@dataclass(frozen=True)
class CutoffSpec:
    """Cutoff profile v: [0,a] -> [0,1] forcing the right-endpoint boundary
    condition.  ``linear`` is the ramp (a-x)/alpha on [a-alpha, a];
    ``exponential`` is 1 - e^{(x-a)/alpha}."""

    shape: str
    alpha: float

    def __post_init__(self):
        if self.shape not in CUTOFF_SHAPES:
            raise ValueError(f"unknown cutoff shape {self.shape!r}")
        if self.alpha <= 0:
            raise ValueError(f"cutoff alpha must be positive, got {self.alpha}")

    def profiles(self, x: np.ndarray, a: float):
        """Return (v, v', v'') sampled on x."""
        if self.shape == "linear":
            ramp = x > a - self.alpha
            v = np.where(ramp, (a - x) / self.alpha, 1.0)
            dv = np.where(ramp, -1.0 / self.alpha, 0.0)
            d2v = np.zeros_like(x)
        else:
            e = np.exp((x - a) / self.alpha)
            v = 1.0 - e
            dv = -e / self.alpha
            d2v = -e / self.alpha**2
        return v, dv, d2v


@dataclass(frozen=True)
class PseudomodeFamily:
    """Unit pseudomodes u_s (columns of ``modes``) with approximate
    eigenvalues, labelled by integers s in {-N..N}.

    ``epsilon`` is None until the family has been certified.
    """

    kind: str
    grid: Grid
    labels: np.ndarray
    eigenvalues: np.ndarray
    modes: np.ndarray
    params: dict
    epsilon: float | None = None

    @property
    def n_modes(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class EigenFamily:
    """Exact eigenpairs e_n, lambda_n of b^-1 f'' + f' (Dirichlet), plus the
    normalized adjoint eigenvectors e_n*.

    When b*a/2 > 700 the adjoint set cannot be represented in double
    precision; it is flagged and left as None.
    """

    grid: Grid
    indices: np.ndarray
    eigenvalues: np.ndarray
    normalizers: np.ndarray
    modes: np.ndarray
    adjoints: np.ndarray | None
    params: dict

    @property
    def adjoint_representable(self) -> bool:
        return self.adjoints is not None

    @property
    def count(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ProjectionNorms:
    """Spectral projection norms ||P_n|| = 1/|<e_n, e_n*>| in three flavours:
    the discrete quadrature value, the closed form 2 e^{ba/2}/(k_n^2 a), and
    the large-b asymptotic 4 pi^2 n^2 e^{ba/2}/(b^3 a^3)."""

    indices: np.ndarray
    discrete: np.ndarray
    closed_form: np.ndarray
    asymptotic: np.ndarray

    @property
    def ratio(self) -> np.ndarray:
        return self.discrete / self.asymptotic


def _check_truncation(grid: Grid, N: int) -> None:
    if N < 0:
        raise ValueError(f"truncation N must be >= 0, got {N}")
    if 2 * N >= grid.n_points:
        raise ValueError(
            f"truncation N = {N} aliases on a {grid.n_points}-point grid "
            f"(need 2N < grid points)"
        )


def asymptotic_mode_normalizer(a: float, c: float) -> float:
    """Large-b limit of the convdiff normalizer: sqrt(2c / (a (1 - e^{-2c}))),
    identical to the pure-convection k.  Exposed for testing only; the family
    constructors use exact normalization integrals."""
    return float(np.sqrt(2.0 * c / (a * -np.expm1(-2.0 * c))))


def convection_family(grid: Grid, c: float, N: int) -> PseudomodeFamily:
    """Pseudomodes of d/dx on L^2(0, a) with the right-endpoint condition
    f(a) = 0.  c = 0 degenerates to a Fourier series; use fourier_family."""
    if c <= 0:
        raise ValueError(f"decay parameter c must be positive, got {c}")
    _check_truncation(grid, N)
    a = grid.a
    labels = np.arange(-N, N + 1)
    k = asymptotic_mode_normalizer(a, c)
    lam = -c / a + 2j * np.pi * labels / a
    modes = k * np.exp(np.outer(grid.x, lam))
    return PseudomodeFamily(
        kind="convection",
        grid=grid,
        labels=labels,
        eigenvalues=lam.astype(complex),
        modes=modes,
        params={"a": a, "c": float(c), "N": int(N)},
    )


def fourier_family(grid: Grid, N: int) -> PseudomodeFamily:
    """Orthonormal Fourier modes a^{-1/2} e^{2 pi i s x/a}; their Gram matrix
    is the identity and propagation is the periodic shift."""
    _check_truncation(grid, N)
    a = grid.a
    labels = np.arange(-N, N + 1)
    lam = 2j * np.pi * labels / a
    modes = np.exp(np.outer(grid.x, lam)) / np.sqrt(a)
    return PseudomodeFamily(
        kind="fourier",
        grid=grid,
        labels=labels,
        eigenvalues=lam.astype(complex),
        modes=modes,
        params={"a": a, "N": int(N)},
    )


def _exp_integral(z: complex, a: float) -> complex:
    """int_0^a e^{z x} dx, exact."""
    if abs(z) * a < 1e-14:
        return complex(a)
    return (np.exp(z * a) - 1.0) / z


def convdiff_family(grid: Grid, b: float, c: float, N: int) -> PseudomodeFamily:
    """Pseudomodes of b^-1 f'' + f' on L^2(0, a) with Dirichlet conditions.

    Each mode is a difference of two exact exponential solutions of
    b^-1 u'' + u' = mu u, vanishing at x = 0, with the normalizer evaluated
    from the exact antiderivative of |u|^2.
    """
    if b <= 0:
        raise ValueError(f"inverse-diffusion parameter b must be positive, got {b}")
    if not (0 < c < grid.a * b / 2):
        raise ValueError(
            f"need 0 < c < a*b/2 = {grid.a * b / 2} so that the separation "
            f"delta = 1/2 - c/(a b) lies in (0, 1/2); got c = {c}"
        )
    _check_truncation(grid, N)
    a = grid.a
    labels = np.arange(-N, N + 1)
    sigma = 2.0 * np.pi * labels / a
    delta = 0.5 - c / (a * b)

    z1 = (-c / a) + 1j * sigma
    z2 = (-b + c / a) - 1j * sigma
    # |u|^2 = e^{2 Re z1 x} + e^{2 Re z2 x} - 2 Re e^{(z1 + conj(z2)) x}
    ksq_inv = np.array(
        [
            _exp_integral(2.0 * z1[j].real, a).real
            + _exp_integral(2.0 * z2[j].real, a).real
            - 2.0 * _exp_integral(z1[j] + np.conj(z2[j]), a).real
            for j in range(len(labels))
        ]
    )
    k = 1.0 / np.sqrt(ksq_inv)
    modes = k * (np.exp(np.outer(grid.x, z1)) - np.exp(np.outer(grid.x, z2)))
    lam = (
        -(sigma**2) / b
        + 1j * sigma
        - c / a
        + c**2 / (a**2 * b)
        - 2j * sigma * c / (a * b)
    )
    return PseudomodeFamily(
        kind="convdiff",
        grid=grid,
        labels=labels,
        eigenvalues=lam.astype(complex),
        modes=modes,
        params={
            "a": a,
            "b": float(b),
            "c": float(c),
            "N": int(N),
            "delta": float(delta),
        },
    )


def convdiff_eigens(grid: Grid, b: float, N: int) -> EigenFamily:
    """Exact eigenpairs e_n(x) = k_n e^{-bx/2} sin(pi n x/a),
    lambda_n = -b/4 - pi^2 n^2/(b a^2), n = 1..N, with normalized adjoints
    e_n* = k_n e^{b(x-a)/2} sin(pi n x/a)."""
    if b <= 0:
        raise ValueError(f"parameter b must be positive, got {b}")
    if N < 1:
        raise ValueError(f"need at least one eigenpair, got N = {N}")
    a = grid.a
    n = np.arange(1, N + 1)
    lam = -b / 4.0 - np.pi**2 * n**2 / (b * a**2)
    ksq_inv = 2.0 * np.pi**2 * n**2 * -np.expm1(-b * a) / (b * (b**2 * a**2 + 4.0 * np.pi**2 * n**2))
    k = 1.0 / np.sqrt(ksq_inv)
    sines = np.sin(np.pi * np.outer(grid.x, n) / a)
    modes = k * np.exp(-b * grid.x / 2.0)[:, None] * sines
    if b * a / 2.0 > 700.0:
        adjoints = None
    else:
        adjoints = k * np.exp(b * (grid.x - a) / 2.0)[:, None] * sines
    return EigenFamily(
        grid=grid,
        indices=n,
        eigenvalues=lam,
        normalizers=k,
        modes=modes.astype(complex),
        adjoints=None if adjoints is None else adjoints.astype(complex),
        params={"a": a, "b": float(b)},
    )


def eigen_pairing(eigens: EigenFamily) -> np.ndarray:
    """Closed-form pairings <e_n, e_n*> = k_n^2 a / (2 e^{ba/2})."""
    a, b = eigens.params["a"], eigens.params["b"]
    if not eigens.adjoint_representable:
        raise OverflowError(
            f"adjoint eigenvectors not representable for b*a/2 = {b * a / 2}"
        )
    pairing = eigens.normalizers**2 * a / 2.0 * np.exp(-b * a / 2.0)
    if np.any(pairing < np.finfo(float).tiny):
        raise OverflowError("eigen pairing underflows double precision")
    return pairing


def projection_norms(eigens: EigenFamily) -> ProjectionNorms:
    """Spectral projection norms ||P_n|| = 1/|<e_n, e_n*>| (discrete,
    closed-form, and large-b asymptotic)."""
    a, b = eigens.params["a"], eigens.params["b"]
    pairing = eigen_pairing(eigens)  # raises OverflowError when flagged
    w = eigens.grid.w
    discrete_pairing = np.abs(
        np.einsum("i,ij,ij->j", w, eigens.modes, np.conj(eigens.adjoints))
    )
    n = eigens.indices.astype(float)
    asymptotic = 4.0 * np.pi**2 * n**2 * np.exp(b * a / 2.0) / (b**3 * a**3)
    return ProjectionNorms(
        indices=eigens.indices,
        discrete=1.0 / discrete_pairing,
        closed_form=1.0 / pairing,
        asymptotic=asymptotic,
    )


def _mode_derivatives(family: PseudomodeFamily):
    """Analytic (u', u'') for every mode, from the same closed forms the
    constructors used."""
    x = family.grid.x
    a = family.grid.a
    if family.kind in ("convection", "fourier"):
        # u_s = k e^{lambda_s x}: differentiation multiplies by lambda_s
        lam = family.eigenvalues
        du = family.modes * lam[None, :]
        d2u = family.modes * lam[None, :] ** 2
        return du, d2u
    if family.kind == "convdiff":
        b, c = family.params["b"], family.params["c"]
        sigma = 2.0 * np.pi * family.labels / a
        z1 = (-c / a) + 1j * sigma
        z2 = (-b + c / a) - 1j * sigma
        e1 = np.exp(np.outer(x, z1))
        e2 = np.exp(np.outer(x, z2))
        # recover k from the stored modes' construction parameters
        ksq_inv = np.array(
            [
                _exp_integral(2.0 * z1[j].real, a).real
                + _exp_integral(2.0 * z2[j].real, a).real
                - 2.0 * _exp_integral(z1[j] + np.conj(z2[j]), a).real
                for j in range(len(family.labels))
            ]
        )
        k = 1.0 / np.sqrt(ksq_inv)
        du = k * (z1[None, :] * e1 - z2[None, :] * e2)
        d2u = k * (z1[None, :] ** 2 * e1 - z2[None, :] ** 2 * e2)
        return du, d2u
    raise ValueError(f"no analytic derivatives for family kind {family.kind!r}")


def _ramp_integral(rate: float, a: float, alpha: float) -> float:
    """int_0^a e^{rate x + 2(x-a)/alpha} dx for rate <= 0, overflow-safe."""
    z = rate + 2.0 / alpha
    if abs(z) * a < 1e-12:
        return a * np.exp(-2.0 * a / alpha)
    return (np.exp(rate * a) - np.exp(-2.0 * a / alpha)) / z


def _closed_form_defect_bound(family: PseudomodeFamily, cutoff: CutoffSpec) -> float:
    """Continuum upper bound for the certified defect, assembled from the
    exact exponential integrals."""
    a = family.grid.a
    alpha = cutoff.alpha
    if family.kind == "convection":
        c = family.params["c"]
        k = asymptotic_mode_normalizer(a, c)
        scale = np.sqrt(a * k**2 / (2.0 * c)) * np.exp(-c * (1.0 - alpha / a))
        return float(scale * (1.0 + 1.0 / alpha))
    if family.kind == "fourier":
        return float(np.sqrt(alpha / (3.0 * a)) + 1.0 / np.sqrt(a * alpha))
    if family.kind == "convdiff":
        b, c = family.params["b"], family.params["c"]
        sigma = 2.0 * np.pi * family.labels / a
        ii = _ramp_integral(-2.0 * c / a, a, alpha)
        jj = _ramp_integral(-2.0 * b + 2.0 * c / a, a, alpha)
        z1_sq = (c / a) ** 2 + sigma**2
        z2_sq = (b - c / a) ** 2 + sigma**2
        ksq_inv = np.array(
            [
                _exp_integral(-2.0 * c / a, a).real
                + _exp_integral(2.0 * (-b + c / a), a).real
                - 2.0 * _exp_integral(complex(-b, 2.0 * s), a).real
                for s in sigma
            ]
        )
        k = 1.0 / np.sqrt(ksq_inv)
        u_tail = 2.0 * k * np.sqrt(ii)
        du_tail = np.sqrt(2.0) * k * np.sqrt(z1_sq * ii + z2_sq * jj)
        per_mode = (
            u_tail  # ||u - w||
            + (2.0 / b) * du_tail / alpha  # 2 b^-1 ||u' v'||
            + (1.0 / b) * u_tail / alpha**2  # b^-1 ||u v''||
            + u_tail / alpha  # ||u v'||
        )
        return float(np.max(per_mode))
    raise ValueError(f"no closed-form bound for family kind {family.kind!r}")


def certify_family(
    family: PseudomodeFamily,
    cutoff: CutoffSpec,
    operator: str,
    growth: GrowthBound | None = None,
) -> tuple[PseudomodeFamily, float]:
    """Certify the family's defect under the given operator.

    For each label s, w_s = u_s * v is formed with the cutoff profile and the
    defect ||u_s - w_s|| + ||A w_s - lambda_s w_s|| is evaluated with fully
    analytic derivatives.  Eigenvalue clipping against the growth bound is
    always applied (a no-op for the built-in families, whose eigenvalues
    already satisfy Re lambda <= 0).

    Returns the certified family (epsilon set, eigenvalues possibly clipped)
    and the continuum closed-form upper bound for comparison.
    """
    gb = growth if growth is not None else GrowthBound()
    if operator == "convection":
        if family.kind not in ("convection", "fourier"):
            raise ValueError(
                f"cannot certify a {family.kind!r} family against the convection operator"
            )
        if cutoff.shape != "linear":
            raise ValueError("the convection certificate uses the linear ramp cutoff")
    elif operator == "convdiff":
        if family.kind != "convdiff":
            raise ValueError(
                f"cannot certify a {family.kind!r} family against the "
                f"convection-diffusion operator"
            )
        if cutoff.shape != "exponential":
            raise ValueError(
                "the convection-diffusion certificate uses the exponential cutoff"
            )
    else:
        raise ValueError(f"unknown operator {operator!r}")
    if not (0.0 < cutoff.alpha < family.grid.a):
        raise ValueError(
            f"cutoff alpha must lie in (0, {family.grid.a}), got {cutoff.alpha}"
        )

    grid = family.grid
    v, dv, d2v = cutoff.profiles(grid.x, grid.a)
    u = family.modes
    du, d2u = _mode_derivatives(family)
    lam = family.eigenvalues
    w_mat = u * v[:, None]
    if operator == "convection":
        # A w = w' = u' v + u v'
        aw = du * v[:, None] + u * dv[:, None]
    else:
        b = family.params["b"]
        aw = (
            d2u * v[:, None] + 2.0 * du * dv[:, None] + u * d2v[:, None]
        ) / b + (du * v[:, None] + u * dv[:, None])
    defect_vecs = aw - w_mat * lam[None, :]

    wq = grid.w
    miss = np.sqrt(np.einsum("i,ij->j", wq, np.abs(u - w_mat) ** 2).real)
    resid = np.sqrt(np.einsum("i,ij->j", wq, np.abs(defect_vecs) ** 2).real)
    defects = miss + resid
    worst = float(np.max(defects))
    if not worst < 0.5:
        raise ValueError(
            f"family defect {worst} is not below 1/2; no usable certificate"
        )

    clipped = np.empty_like(lam)
    eps = 0.0
    for j in range(len(lam)):
        result = clip_eigenvalue(lam[j], gb, float(defects[j]))
        clipped[j] = result.value
        eps = max(eps, result.eps)

    certified = replace(family, eigenvalues=clipped, epsilon=float(eps))
    return certified, _closed_form_defect_bound(family, cutoff)
