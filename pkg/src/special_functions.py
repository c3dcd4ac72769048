"""Complex Gamma machinery, the Ξ_m symbol function and principal-branch powers.

Every ratio of Gamma values in the package goes through ``log_gamma`` so that
nothing overflows for large imaginary arguments. Branch convention: principal
logarithm, Arg ∈ (−π, π].
"""

import cmath
import math

from src.errors import DivergentLimitError, PoleError

# Lanczos approximation, g = 7, 9 coefficients
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_LOG_HALF_I = complex(-math.log(2.0), 0.5 * math.pi)  # Log(i/2)
LN2 = math.log(2.0)

POLE_TOL = 1e-12


def _check_pole(z: complex) -> None:
    """Raise PoleError when z is within POLE_TOL of a non-positive integer."""
    if z.real > 0.5:
        return
    nearest = round(z.real)
    if nearest <= 0 and abs(z - nearest) < POLE_TOL:
        raise PoleError(f"log_gamma: argument {z} is at the pole {nearest}")


def _lanczos_log_gamma(z: complex) -> complex:
    """log Γ(z) for Re(z) >= 1/2 from the Lanczos series."""
    w = z - 1.0
    series = _LANCZOS_COEFFS[0]
    for i in range(1, len(_LANCZOS_COEFFS)):
        series += _LANCZOS_COEFFS[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (w + 0.5) * cmath.log(t) - t + cmath.log(series)


def _log_sin_pi(z: complex) -> complex:
    """Continuous log sin(πz) on the closed upper half plane.

    Uses sin(πz) = (i/2) e^{−iπz} (1 − e^{2iπz}); |e^{2iπz}| <= 1 there, so the
    principal Log of the last factor never crosses its cut.
    """
    return -1j * math.pi * z + _LOG_HALF_I + cmath.log(1.0 - cmath.exp(2j * math.pi * z))


def log_gamma(z: complex) -> complex:
    """Analytic log Γ(z) on ℂ minus the non-positive real axis.

    The branch is the one that is real on (0, ∞); it satisfies
    log_gamma(z + 1) = log_gamma(z) + Log(z) and conjugation symmetry. On the
    negative real axis the limit from above is returned.

    Args:
        z: Complex argument, not a non-positive integer.

    Returns:
        log Γ(z); exp of the result is Γ(z).

    Raises:
        PoleError: If z is within 1e-12 of a non-positive integer.
    """
    z = complex(z)
    _check_pole(z)
    if z.imag < 0.0:
        return log_gamma(z.conjugate()).conjugate()
    if z.real < 0.5:
        return _LOG_PI - _log_sin_pi(z) - _lanczos_log_gamma(1.0 - z)
    return _lanczos_log_gamma(z)


def gamma(z: complex) -> complex:
    """Γ(z) through exp(log_gamma(z))."""
    return cmath.exp(log_gamma(z))


def log_xi(m: complex, t: float) -> complex:
    """Logarithm of Ξ_m(t) = e^{i ln2 t} Γ((m+1+it)/2) / Γ((m+1−it)/2).

    Adding log_xi values multiplies the Ξ factors without ever forming the
    individual Gamma values; the e^{i ln2 t} phases of a Ξ_a(t) Ξ_b(−t) product
    cancel exactly.
    """
    m = complex(m)
    t = float(t)
    return (
        1j * LN2 * t
        + log_gamma((m + 1.0 + 1j * t) / 2.0)
        - log_gamma((m + 1.0 - 1j * t) / 2.0)
    )


def xi(m: complex, t: float) -> complex:
    """Ξ_m(t), evaluated as exp of log-gamma differences.

    Args:
        m: Complex order with (m+1±it)/2 away from Gamma poles.
        t: Real dilation variable.

    Returns:
        Ξ_m(t). Equals 1 at t = 0 and has modulus 1 for real m.
    """
    return cmath.exp(log_xi(m, t))


def xi_product_limit(mp: complex, sign: int) -> complex:
    """Closed-form corner value Ξ_{1/2}(∓∞) Ξ_{m'}(±∞) = e^{∓iπ(1/2 − m')/2}.

    Args:
        mp: The order m'.
        sign: +1 for Ξ_{1/2}(−∞)Ξ_{m'}(+∞), −1 for Ξ_{1/2}(+∞)Ξ_{m'}(−∞).

    Returns:
        The limit value (unimodular only for real m').
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    return cmath.exp(-sign * 1j * math.pi * (0.5 - complex(mp)) / 2.0)


def cpow_half_square(x: float, m: complex) -> complex:
    """Principal power (x²/4)^m for x in [0, ∞].

    Args:
        x: Non-negative real; math.inf is accepted.
        m: Complex exponent.

    Returns:
        exp(m ln(x²/4)); the limit 0 at x = 0 when Re(m) > 0 and at x = ∞
        when Re(m) < 0.

    Raises:
        ValueError: If x is negative or NaN.
        DivergentLimitError: If the requested endpoint limit does not exist.
    """
    x = float(x)
    m = complex(m)
    if not x >= 0.0:
        raise ValueError(f"cpow_half_square needs x >= 0, got {x}")
    if x == 0.0:
        if m.real > 0.0:
            return 0j
        raise DivergentLimitError(f"(x²/4)^m diverges at x = 0 for m = {m}")
    if math.isinf(x):
        if m.real < 0.0:
            return 0j
        raise DivergentLimitError(f"(x²/4)^m diverges at x = ∞ for m = {m}")
    return cmath.exp(m * 2.0 * math.log(x / 2.0))
