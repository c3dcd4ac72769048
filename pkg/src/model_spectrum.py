"""Parameter space of H_{m,κ}: ς, exceptional pairs, eigenvalues, shooting oracle."""

import cmath
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from src.config import config
from src.errors import (
    ExceptionalPairError,
    FitConditioningError,
    IntegrationError,
    InvalidParameterError,
)
from src.special_functions import log_gamma

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# Shooting defaults
SHOOT_RTOL = 1e-10
SHOOT_ATOL = 1e-12
SHOOT_FAR_FACTOR = 40.0
SHOOT_NEAR_FACTOR = 0.05
FIT_POINTS = 16
MAX_FIT_CONDITION = 1e10


@dataclass(frozen=True)
class ModelParams:
    """The pair (m, κ) with the derived quantity ς = κ Γ(−m)/Γ(m).

    Build instances through make_params, which validates m and caches ς.
    """

    m: complex
    kappa: complex
    varsigma: complex
    log_varsigma: complex | None = field(default=None, compare=False)

    @property
    def is_self_adjoint(self) -> bool:
        """H_{m,κ} is self-adjoint exactly when m and κ are both real."""
        return self.m.imag == 0.0 and self.kappa.imag == 0.0

    @property
    def has_boundary_coupling(self) -> bool:
        """True when κ ≠ 0 (ς ≠ 0)."""
        return self.kappa != 0


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalue parameters k_n (Re k_n > 0) and eigenvalues E_n = −k_n²."""

    indices: tuple[int, ...]
    modes: tuple[complex, ...]
    eigenvalues: tuple[complex, ...]
    margin: float

    @property
    def count(self) -> int:
        return len(self.modes)


def _principal(log_value: complex) -> complex:
    """Reduce the imaginary part of a logarithm to (−π, π]."""
    im = math.remainder(log_value.imag, TWO_PI)
    if im == -math.pi:
        im = math.pi
    return complex(log_value.real, im)


def make_params(m: complex, kappa: complex) -> ModelParams:
    """Validate (m, κ) and cache ς.

    Args:
        m: Complex order with |Re(m)| in (0, 1).
        kappa: Complex boundary parameter.

    Returns:
        Immutable ModelParams.

    Raises:
        InvalidParameterError: If Re(m) = 0 or |Re(m)| >= 1, or a value is not finite.
    """
    m = complex(m)
    kappa = complex(kappa)
    if not all(math.isfinite(v) for v in (m.real, m.imag, kappa.real, kappa.imag)):
        raise InvalidParameterError(f"non-finite parameters m={m}, kappa={kappa}")
    if not 0.0 < abs(m.real) < 1.0:
        raise InvalidParameterError(
            f"|Re(m)| must lie in (0, 1), got m={m} (Re(m)=0 is not supported)"
        )
    if kappa == 0:
        return ModelParams(m=m, kappa=kappa, varsigma=0j, log_varsigma=None)

    log_vs = _principal(cmath.log(kappa) + log_gamma(-m) - log_gamma(m))
    return ModelParams(m=m, kappa=kappa, varsigma=cmath.exp(log_vs), log_varsigma=log_vs)


def strip_solutions(p: ModelParams) -> dict[int, float] | None:
    """Real solutions n*_s of Im((Log ς + 2πin)/m) = sπ for s = ±1.

    Both the exceptional-pair test and the eigenvalue enumeration read their
    boundaries from here. Returns None when κ = 0.
    """
    if p.log_varsigma is None:
        return None
    c = (p.log_varsigma / p.m).imag
    d = TWO_PI * (1.0 / p.m).real
    return {s: (s * math.pi - c) / d for s in (1, -1)}


def _distance_to_integer(value: float) -> float:
    return abs(value - round(value))


def is_exceptional(p: ModelParams, tol: float | None = None) -> tuple[bool, int | None]:
    """Detect an exceptional pair: κ ≠ 0 and ±π ∈ Im((1/m) Ln ς).

    Args:
        p: Model parameters.
        tol: Tolerance on the integer-ness of n*. Uses config default if None.

    Returns:
        Tuple (flag, witness integer or None).
    """
    tol = config.EXCEPTIONAL_TOL if tol is None else tol
    solutions = strip_solutions(p)
    if solutions is None:
        return False, None
    for s in (1, -1):
        n_star = solutions[s]
        if _distance_to_integer(n_star) < tol:
            return True, int(round(n_star))
    return False, None


def eigen_modes(p: ModelParams, tol: float | None = None) -> SpectrumReport:
    """Enumerate k_n = 2 exp(−(Log ς + 2πin)/(2m)) with Re k_n > 0.

    The admissible integers n are those strictly between the two strip
    solutions n*_{−1} and n*_{+1}, so no scanning is involved.

    Args:
        p: Model parameters.
        tol: Exceptional tolerance. Uses config default if None.

    Returns:
        SpectrumReport sorted by n.

    Raises:
        ExceptionalPairError: If a strip boundary is within tol of an integer.
    """
    tol = config.EXCEPTIONAL_TOL if tol is None else tol
    solutions = strip_solutions(p)
    if solutions is None:
        return SpectrumReport(indices=(), modes=(), eigenvalues=(), margin=math.inf)

    margin = min(_distance_to_integer(n_star) for n_star in solutions.values())
    if margin < tol:
        flag, witness = is_exceptional(p, tol)
        raise ExceptionalPairError(
            f"(m={p.m}, kappa={p.kappa}) is exceptional: strip index {witness} "
            f"touches the continuous spectrum (margin {margin:.3g})"
        )

    lo, hi = sorted(solutions.values())
    indices = tuple(range(math.floor(lo) + 1, math.ceil(hi)))
    modes = tuple(
        2.0 * cmath.exp(-(p.log_varsigma + 2j * math.pi * n) / (2.0 * p.m)) for n in indices
    )
    eigenvalues = tuple(-(k * k) for k in modes)
    logger.debug(f"m={p.m} kappa={p.kappa}: {len(modes)} eigenvalues, margin {margin:.3g}")
    return SpectrumReport(indices=indices, modes=modes, eigenvalues=eigenvalues, margin=margin)


def count_eigenvalues(p: ModelParams, tol: float | None = None) -> int:
    """Number of eigenvalues of H_{m,κ}, each strip solution counted once."""
    return eigen_modes(p, tol).count


def frobenius_basis(nu: complex, k2: complex, x: np.ndarray) -> np.ndarray:
    """Frobenius solution x^{1/2+ν} Σ_j (k²x²/4)^j / (j! (ν+1)_j).

    It solves −f″ + (ν² − 1/4) x^{−2} f = −k² f with leading term exactly
    x^{1/2+ν}. Pass k2 = −y² for the oscillatory (kernel) equation.
    """
    x = np.asarray(x, dtype=float)
    q = complex(k2) * x * x / 4.0
    term = np.ones_like(q, dtype=complex)
    total = term.copy()
    for j in range(1, 200):
        term = term * q / (j * (nu + j))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return x ** (0.5 + nu) * total


def fit_boundary_ratio(x: np.ndarray, f: np.ndarray, m: complex, k2: complex) -> complex:
    """Least-squares fit f ≈ a φ_{−m} + b φ_{+m} on a small-x window; returns a/b.

    Raises:
        FitConditioningError: If the scaled design matrix is too ill-conditioned
            or b vanishes.
    """
    design = np.column_stack([frobenius_basis(-m, k2, x), frobenius_basis(m, k2, x)])
    scale = np.linalg.norm(design, axis=0)
    coeffs, _, _, singular = np.linalg.lstsq(design / scale, np.asarray(f), rcond=None)
    if singular[-1] == 0 or singular[0] / singular[-1] > MAX_FIT_CONDITION:
        raise FitConditioningError(f"boundary fit ill-conditioned for m={m}")
    a, b = coeffs / scale
    if b == 0:
        raise FitConditioningError("boundary fit produced b = 0")
    return complex(a / b)


def shooting_residual(
    p: ModelParams,
    k: complex,
    x_far: float | None = None,
    x_near: float | None = None,
) -> complex:
    """Independent check that k is an eigenvalue parameter of H_{m,κ}.

    Integrates −f″ + (m² − 1/4) x^{−2} f = −k² f inward from x_far, starting on
    the decaying profile e^{−kx}(1 + (4m² − 1)/(8kx)), and fits the solution
    on [x_near, 10 x_near] to a φ_{−m} + b φ_{+m}.

    Args:
        p: Model parameters.
        k: Candidate with Re(k) > 0.
        x_far: Start of the inward integration. Defaults to 40/Re(k).
        x_near: Lower end of the fit window. Defaults to 0.05/|k|.

    Returns:
        a/b − κ; close to 0 when −k² is an eigenvalue.

    Raises:
        ValueError: If Re(k) <= 0 or the window is not below x_far.
        IntegrationError: If the integrator fails.
        FitConditioningError: If the fit is ill-conditioned.
    """
    k = complex(k)
    if k.real <= 0.0:
        raise ValueError(f"shooting_residual needs Re(k) > 0, got {k}")
    x_far = SHOOT_FAR_FACTOR / k.real if x_far is None else float(x_far)
    x_near = SHOOT_NEAR_FACTOR / abs(k) if x_near is None else float(x_near)
    if not 0.0 < 10.0 * x_near < x_far:
        raise ValueError(f"need 0 < 10*x_near < x_far, got x_near={x_near}, x_far={x_far}")

    m = p.m
    potential = m * m - 0.25
    k2 = k * k
    mu = 4.0 * m * m - 1.0

    def rhs(x, y):
        return [y[1], (potential / (x * x) + k2) * y[0]]

    f0 = 1.0 + mu / (8.0 * k * x_far)
    df0 = -k * f0 - mu / (8.0 * k * x_far * x_far)
    window = np.geomspace(10.0 * x_near, x_near, FIT_POINTS)

    sol = solve_ivp(
        rhs,
        t_span=(x_far, x_near),
        y0=np.array([f0, df0], dtype=complex),
        method="DOP853",
        t_eval=window,
        rtol=SHOOT_RTOL,
        atol=SHOOT_ATOL,
    )
    if not sol.success:
        raise IntegrationError(f"shooting integration failed for k={k}: {sol.message}")

    ratio = fit_boundary_ratio(sol.t, sol.y[0], m, k2)
    return ratio - p.kappa
