"""Generalized Hankel kernels F∓_{m,κ}(x, y) and their numerical checks.

Convention: the first kernel argument is the position x (the variable carrying
the κ boundary condition), the second is the momentum y. An operator with
kernel B(x, y) has transpose kernel B(y, x).
"""

import cmath
import logging
import math
from dataclasses import dataclass

import numpy as np

from src.errors import ExceptionalPairError, PoleError, SeriesWindowError
from src.model_spectrum import ModelParams, fit_boundary_ratio
from src.special_functions import log_gamma
from src.symbol import DENOMINATOR_TOL

logger = logging.getLogger(__name__)

SERIES_LIMIT = 8.0
WINDOW_LIMIT = 60.0
MAX_SERIES_TERMS = 300
RESCALE_ABOVE = 1e200

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

# Default small-x fit window for the kernel boundary ratio
BOUNDARY_FIT_LO = 1e-4
BOUNDARY_FIT_HI = 1e-3
BOUNDARY_FIT_POINTS = 16

# Gaussian bumps count as supported on centre ± BUMP_SUPPORT · width (tail below 4e-6)
BUMP_SUPPORT = 5.0

# Oscillation periods of sin(xy) covered by one Gauss-Legendre panel
PERIODS_PER_PANEL = 8.0


@dataclass(frozen=True)
class KernelSample:
    """One kernel value F^{sign}(x, y)."""

    x: float
    y: float
    sign: int
    value: complex


@dataclass(frozen=True)
class GaussianBump:
    """Smooth test function exp(−(u − centre)² / (2 width²))."""

    centre: float
    width: float

    def __call__(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return np.exp(-0.5 * ((u - self.centre) / self.width) ** 2)

    def support(self) -> tuple[float, float]:
        return (self.centre - BUMP_SUPPORT * self.width, self.centre + BUMP_SUPPORT * self.width)


def _neumaier(total: np.ndarray, comp: np.ndarray, term: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """One Neumaier step on a real array."""
    new = total + term
    comp = comp + np.where(np.abs(total) >= np.abs(term), (total - new) + term, (term - new) + total)
    return new, comp


class _ComplexSum:
    """Compensated running sum of complex arrays (real and imaginary parts separately)."""

    def __init__(self, shape: tuple[int, ...]):
        self.re = np.zeros(shape)
        self.im = np.zeros(shape)
        self.re_comp = np.zeros(shape)
        self.im_comp = np.zeros(shape)

    def add(self, term: np.ndarray) -> None:
        self.re, self.re_comp = _neumaier(self.re, self.re_comp, term.real)
        self.im, self.im_comp = _neumaier(self.im, self.im_comp, term.imag)

    def scale(self, mask: np.ndarray, factor: float) -> None:
        for name in ("re", "im", "re_comp", "im_comp"):
            values = getattr(self, name)
            values[mask] *= factor

    def value(self) -> np.ndarray:
        return (self.re + self.re_comp) + 1j * (self.im + self.im_comp)


def _check_order(order: complex) -> None:
    if order.imag == 0.0 and order.real < 0.0:
        nearest = round(order.real)
        if abs(order.real - nearest) < 1e-12:
            raise PoleError(f"bessel_j: negative integer order {order} is not supported")


def _check_window(z: np.ndarray) -> None:
    if not np.all(np.isfinite(z)) or np.any(z <= 0.0):
        raise ValueError("Bessel arguments must be positive and finite")
    if np.any(z > WINDOW_LIMIT):
        raise SeriesWindowError(
            f"Bessel argument {float(np.max(z)):.6g} outside the window z <= {WINDOW_LIMIT:g}"
        )


def _series(order: complex, z: np.ndarray) -> np.ndarray:
    """Σ_j (−1)^j (z/2)^{ν+2j} / (j! Γ(ν+j+1)) for small z."""
    half = z / 2.0
    term = np.exp(order * np.log(half) - log_gamma(order + 1.0))
    q = -(half * half)
    acc = _ComplexSum(z.shape)
    acc.add(term)
    for j in range(1, MAX_SERIES_TERMS):
        term = term * q / (j * (order + j))
        acc.add(term)
        if np.all(np.abs(term) <= 1e-17 * np.abs(acc.value())):
            break
    return acc.value()


def _neumann_coefficients(order: complex, count: int) -> list[complex]:
    """c_k = (ν+2k) Γ(ν+k)/k!, with c_0 = Γ(ν+1)."""
    base = cmath.exp(log_gamma(order + 1.0))
    coeffs = [base]
    ratio = base  # Γ(ν+k)/k! at k = 1
    for k in range(1, count):
        if k > 1:
            ratio = ratio * (order + k - 1) / k
        coeffs.append((order + 2 * k) * ratio)
    return coeffs


def _miller(order: complex, z: np.ndarray) -> np.ndarray:
    """Backward recurrence in the order, normalised by the Neumann sum of (z/2)^ν."""
    top = int(1.2 * float(np.max(z)) + 60.0)
    top += top % 2
    coeffs = _neumann_coefficients(order, top // 2 + 1)

    f_next = np.zeros(z.shape, dtype=complex)
    f_cur = np.full(z.shape, 1e-30, dtype=complex)
    norm = _ComplexSum(z.shape)
    norm.add(coeffs[top // 2] * f_cur)
    for n in range(top, 0, -1):
        f_prev = (2.0 * (order + n) / z) * f_cur - f_next
        f_next, f_cur = f_cur, f_prev
        if (n - 1) % 2 == 0:
            norm.add(coeffs[(n - 1) // 2] * f_cur)
        large = np.abs(f_cur) > RESCALE_ABOVE
        if np.any(large):
            f_cur[large] /= RESCALE_ABOVE
            f_next[large] /= RESCALE_ABOVE
            norm.scale(large, 1.0 / RESCALE_ABOVE)
    return f_cur * np.exp(order * np.log(z / 2.0)) / norm.value()


def bessel_j(order: complex, z):
    """Bessel function J_ν(z) of complex order for 0 < z <= 60.

    Power series below z = 8, Miller's backward recurrence above; both with
    compensated summation.

    Args:
        order: Complex order, not a negative integer.
        z: Positive real argument or array of them.

    Returns:
        complex for scalar z, otherwise a complex array of the same shape.

    Raises:
        PoleError: If the order is a negative integer.
        SeriesWindowError: If any argument exceeds 60.
    """
    order = complex(order)
    _check_order(order)
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    _check_window(z)

    result = np.empty(z.shape, dtype=complex)
    small = z <= SERIES_LIMIT
    if np.any(small):
        result[small] = _series(order, z[small])
    if np.any(~small):
        result[~small] = _miller(order, z[~small])
    return complex(result[0]) if scalar else result


def hat_j(order: complex, z):
    """Ĵ_ν(z) = √(πz/2) J_ν(z); exact sin z / cos z for ν = ±1/2."""
    order = complex(order)
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    if order in (0.5, -0.5):
        if not np.all(np.isfinite(z)) or np.any(z <= 0.0):
            raise ValueError("Bessel arguments must be positive and finite")
        values = (np.sin(z) if order == 0.5 else np.cos(z)).astype(complex)
    else:
        values = np.sqrt(0.5 * math.pi * z) * bessel_j(order, z)
    return complex(values[0]) if scalar else values


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return sign


def _is_sine_case(p: ModelParams) -> bool:
    return p.m == 0.5 and not p.has_boundary_coupling


def kernel(p: ModelParams, sign: int, x, y):
    """Hankel kernel F^{sign}_{m,κ}(x, y).

    F∓(x, y) = e^{∓iπm/2} √(2/π) (Ĵ_m(xy) − ς Ĵ_{−m}(xy) (y²/4)^m)
               / (1 − ς e^{∓iπm} (y²/4)^m)

    sign = −1 selects F^−, +1 selects F^+. x and y broadcast as numpy arrays.

    Raises:
        ExceptionalPairError: If the denominator is below DENOMINATOR_TOL.
        SeriesWindowError: If x·y exceeds the Bessel window.
    """
    sign = _check_sign(sign)
    scalar = np.ndim(x) == 0 and np.ndim(y) == 0
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = np.broadcast_to(x * y, np.broadcast_shapes(x.shape, y.shape))
    phase = cmath.exp(sign * 1j * math.pi * p.m / 2.0)

    if _is_sine_case(p):
        values = phase * SQRT_2_OVER_PI * np.sin(z).astype(complex)
    elif not p.has_boundary_coupling:
        values = phase * SQRT_2_OVER_PI * hat_j(p.m, z.ravel()).reshape(z.shape)
    else:
        coupling = np.exp(p.log_varsigma + p.m * 2.0 * np.log(y / 2.0))
        coupling = np.broadcast_to(coupling, z.shape)
        denominator = 1.0 - coupling * cmath.exp(sign * 1j * math.pi * p.m)
        if np.any(np.abs(denominator) < DENOMINATOR_TOL):
            raise ExceptionalPairError(
                f"kernel denominator vanishes for m={p.m}, kappa={p.kappa} "
                f"(min |den| {float(np.min(np.abs(denominator))):.3g})"
            )
        flat = z.ravel()
        numerator = hat_j(p.m, flat).reshape(z.shape) - coupling * hat_j(-p.m, flat).reshape(z.shape)
        values = phase * SQRT_2_OVER_PI * numerator / denominator
    return complex(values.reshape(-1)[0]) if scalar else values


def transpose_kernel(p: ModelParams, sign: int, x, y):
    """Kernel of the transposed operator: F^{sign⊤}(x, y) = F^{sign}(y, x)."""
    return kernel(p, sign, y, x)


def sample_kernel(p: ModelParams, sign: int, x: float, y: float) -> KernelSample:
    """Evaluate one kernel value and package it with its coordinates."""
    value = kernel(p, sign, float(x), float(y))
    if not cmath.isfinite(value):
        raise ExceptionalPairError(f"kernel value not finite at x={x}, y={y}")
    return KernelSample(x=float(x), y=float(y), sign=sign, value=value)


def kernel_ode_residual(p: ModelParams, sign: int, x: float, y: float, h: float) -> float:
    """|(−D²_h + (m² − 1/4)/x²) F(·, y)(x) − y² F(x, y)| with a 5-point stencil.

    Raises:
        ValueError: If x <= 2h or h <= 0.
    """
    if not (h > 0.0 and x > 2.0 * h):
        raise ValueError(f"need h > 0 and x > 2h, got x={x}, h={h}")
    grid = x + h * np.arange(-2, 3)
    f = kernel(p, sign, grid, y)
    d2 = (-f[0] + 16.0 * f[1] - 30.0 * f[2] + 16.0 * f[3] - f[4]) / (12.0 * h * h)
    potential = p.m * p.m - 0.25
    return float(abs(-d2 + potential / (x * x) * f[2] - y * y * f[2]))


def kernel_boundary_ratio(
    p: ModelParams,
    sign: int,
    y: float,
    x_lo: float = BOUNDARY_FIT_LO,
    x_hi: float = BOUNDARY_FIT_HI,
) -> complex:
    """Fit F(·, y) ≈ a φ_{−m} + b φ_{+m} on [x_lo, x_hi] and return a/b (should be κ)."""
    if not 0.0 < x_lo < x_hi:
        raise ValueError(f"need 0 < x_lo < x_hi, got {x_lo}, {x_hi}")
    x = np.geomspace(x_lo, x_hi, BOUNDARY_FIT_POINTS)
    values = kernel(p, sign, x, y)
    return fit_boundary_ratio(x, values, p.m, -(y * y))


def _panel_rule(upper: float, frequency: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on [0, upper] for integrands oscillating at frequency."""
    periods = upper * frequency / (2.0 * math.pi)
    panels = max(1, math.ceil(periods / PERIODS_PER_PANEL))
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, upper, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    points = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
    return points, (half[:, None] * weights[None, :]).ravel()


def roundtrip_residual(
    p: ModelParams,
    testfn: GaussianBump,
    x_max: float,
    y_max: float,
    quad_order: int = 64,
) -> float:
    """L² norm of F^{+⊤} F^{−} f − f on [0, x_max], truncated to positions in [0, y_max].

    f is a function of the momentum on [0, x_max]. The inner integral
    h(y) = ∫ F^−(y, u) f(u) du maps it to a position profile, the outer one
    g(x) = ∫ F^+(y, x) h(y) dy maps it back. Both use Gauss-Legendre panels
    of quad_order nodes, each covering PERIODS_PER_PANEL periods of the
    kernel oscillation. The truncation error is empirical and only loosely
    bounded.

    Raises:
        ValueError: If the bump is not numerically supported in (0, x_max / 2).
        SeriesWindowError: If x_max · y_max leaves the Bessel window.
    """
    lo, hi = testfn.support()
    if not (0.0 < lo and hi < 0.5 * x_max):
        raise ValueError(f"test function support [{lo:.3g}, {hi:.3g}] not inside (0, {0.5 * x_max:g})")
    if quad_order < 2:
        raise ValueError(f"quad_order must be at least 2, got {quad_order}")
    if not _is_sine_case(p) and x_max * y_max > WINDOW_LIMIT:
        raise SeriesWindowError(
            f"truncation {x_max} x {y_max} exceeds the Bessel window {WINDOW_LIMIT:g}"
        )

    u, wu = _panel_rule(x_max, y_max, quad_order)
    y, wy = _panel_rule(y_max, x_max, quad_order)
    f = testfn(u)

    incoming = kernel(p, -1, y[:, None], u[None, :])
    profile = incoming @ (wu * f)
    outgoing = transpose_kernel(p, 1, u[:, None], y[None, :])
    restored = outgoing @ (wy * profile)

    residual = math.sqrt(float(np.sum(wu * np.abs(restored - f) ** 2)))
    logger.debug(f"roundtrip m={p.m} kappa={p.kappa} order={quad_order}: residual {residual:.3g}")
    return residual
