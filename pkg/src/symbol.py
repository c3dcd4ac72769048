"""Boundary symbol Γ_{m,κ;1/2,0}(x, t) of the wave operator on the compactified square.

The square ■ = [0, +∞] × [−∞, +∞] has the boundary edges
B1 = {0} × [−∞, +∞], B2 = [0, +∞] × {+∞}, B3 = {+∞} × [−∞, +∞] and
B4 = [0, +∞] × {−∞}. Each edge is traversed through a compactified
coordinate s ∈ [−1, 1]; s = ±1 are corners, whose values are always taken
from closed forms.
"""

import cmath
import logging
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src.errors import ExceptionalPairError
from src.model_spectrum import ModelParams
from src.special_functions import log_xi, xi_product_limit

logger = logging.getLogger(__name__)

DENOMINATOR_TOL = 1e-10
# Extra half-width (in units of 1/|Re m|) around the scattering transition window
WINDOW_PADDING = 4.0


class EdgeId(Enum):
    """The four edges of the boundary of the square."""

    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"

    @property
    def is_t_edge(self) -> bool:
        return self in (EdgeId.B1, EdgeId.B3)


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the boundary: its edge, native parameter and compactified coordinate."""

    edge: EdgeId
    param: float
    compactified: float


def _log_half_square(x: float) -> float:
    """ln(x²/4) for x in [0, ∞], with the infinite endpoints mapped to ∓inf."""
    if x == 0.0:
        return -math.inf
    if math.isinf(x):
        return math.inf
    return 2.0 * math.log(x / 2.0)


def transition_window(p: ModelParams) -> tuple[float, float]:
    """Centre and half-width, in ℓ = ln(x²/4), of the region where Γ₂ turns.

    The phase of the scattering function moves between the two values of ℓ
    where |ς e^{∓iπm} (x²/4)^m| = 1; outside that window it is nearly constant.
    """
    if not p.has_boundary_coupling:
        return 0.0, 1.0
    re_m = p.m.real
    centre = -math.log(abs(p.varsigma)) / re_m
    half_width = math.pi * abs(p.m.imag) / abs(re_m) + WINDOW_PADDING / abs(re_m)
    return centre, half_width


class BoundarySymbol:
    """Evaluator of Γ_{m,κ;1/2,0} on the square and on its four edges."""

    def __init__(self, params: ModelParams):
        """Precompute branch choices, prefactors and the corner values.

        Args:
            params: Model parameters (assumed non-exceptional).
        """
        self.params = params
        m = params.m
        coupled = params.has_boundary_coupling

        # Order used on B1 and on B3 (Re(m)-sign branch; both equal m when κ = 0)
        self.order_b1 = m if (not coupled or m.real > 0) else -m
        self.order_b3 = self.order_b1 if not coupled else -self.order_b1

        self._phase_half = cmath.exp(1j * math.pi * (0.5 - m))  # e^{iπ(1/2−m)}
        self._e_ipm = cmath.exp(1j * math.pi * m)
        self._e_2ipm = self._e_ipm * self._e_ipm
        self._full_prefactor = cmath.exp(1j * math.pi / 4.0 - 0.5j * math.pi * m)
        self.window = transition_window(params)

    # Compactification maps

    @staticmethod
    def t_of(s: float) -> float:
        """t = tan(πs/2) on B1/B3; s = ±1 gives ±inf."""
        if s >= 1.0:
            return math.inf
        if s <= -1.0:
            return -math.inf
        return math.tan(0.5 * math.pi * s)

    @staticmethod
    def s_of_t(t: float) -> float:
        return 2.0 * math.atan(t) / math.pi

    def ell_of(self, s: float) -> float:
        """ℓ = ln(x²/4) = c + w·tan(πs/2) on B2/B4."""
        if s >= 1.0:
            return math.inf
        if s <= -1.0:
            return -math.inf
        centre, half_width = self.window
        return centre + half_width * math.tan(0.5 * math.pi * s)

    def x_of(self, s: float) -> float:
        ell = self.ell_of(s)
        if ell == -math.inf:
            return 0.0
        if ell / 2.0 > 709.0:
            return math.inf
        return 2.0 * math.exp(ell / 2.0)

    def s_of_x(self, x: float) -> float:
        ell = _log_half_square(x)
        if math.isinf(ell):
            return math.copysign(1.0, ell)
        centre, half_width = self.window
        return 2.0 * math.atan((ell - centre) / half_width) / math.pi

    def point(self, edge: EdgeId, s: float) -> BoundaryPoint:
        """BoundaryPoint at compactified coordinate s on the given edge."""
        param = self.t_of(s) if edge.is_t_edge else self.x_of(s)
        return BoundaryPoint(edge=edge, param=param, compactified=s)

    # Coupling term b = ς e^{−iπm} (x²/4)^m

    def _coupling(self, ell: float) -> tuple[complex, bool]:
        """Return (b, False) when |b| <= 1, else (1/b, True).

        The inverted form keeps the evaluation finite when (x²/4)^m is huge.
        """
        p = self.params
        if math.isinf(ell):
            grows = (ell > 0) == (p.m.real > 0)
            return 0j, grows
        log_b = p.log_varsigma - 1j * math.pi * p.m + p.m * ell
        if log_b.real > 0.0:
            return cmath.exp(-log_b), True
        return cmath.exp(log_b), False

    @staticmethod
    def _guard(denominator: complex, ell: float) -> None:
        if abs(denominator) < DENOMINATOR_TOL:
            raise ExceptionalPairError(
                f"symbol denominator vanishes near ln(x²/4) = {ell:.6g} (exceptional pair)"
            )

    # Edge functions

    def _t_edge(self, order: complex, t: float) -> complex:
        """e^{iπ(1/2−μ)/2} Ξ_{1/2}(t) Ξ_μ(−t), corners in closed form."""
        prefactor = cmath.exp(0.5j * math.pi * (0.5 - order))
        if t == math.inf:
            return prefactor * xi_product_limit(order, -1)
        if t == -math.inf:
            return prefactor * xi_product_limit(order, 1)
        return prefactor * cmath.exp(log_xi(0.5, t) + log_xi(order, -t))

    def gamma1(self, t: float) -> complex:
        """Γ₁(t) = Γ(0, t)."""
        return self._t_edge(self.order_b1, t)

    def gamma3(self, t: float) -> complex:
        """Γ₃(t) = Γ(+∞, t)."""
        return self._t_edge(self.order_b3, t)

    def gamma4(self, x: float) -> complex:
        """Γ₄(x) = Γ(x, −∞) = 1."""
        return 1.0 + 0j

    def scattering_from_log(self, ell: float) -> complex:
        """Γ₂ as a function of ℓ = ln(x²/4), ℓ ∈ [−inf, +inf]."""
        if not self.params.has_boundary_coupling:
            return self._phase_half
        c, inverted = self._coupling(ell)
        if inverted:
            numerator = c - self._e_2ipm
            denominator = c - 1.0
        else:
            numerator = 1.0 - c * self._e_2ipm
            denominator = 1.0 - c
        self._guard(denominator, ell)
        return self._phase_half * numerator / denominator

    def gamma2(self, x: float) -> complex:
        """Γ₂(x) = Γ(x, +∞), the scattering function."""
        return self.scattering_from_log(_log_half_square(float(x)))

    def at(self, edge: EdgeId, s: float) -> complex:
        """Edge value at compactified coordinate s ∈ [−1, 1]."""
        if edge is EdgeId.B1:
            return self.gamma1(self.t_of(s))
        if edge is EdgeId.B3:
            return self.gamma3(self.t_of(s))
        if edge is EdgeId.B2:
            return self.scattering_from_log(self.ell_of(s))
        return 1.0 + 0j

    def full(self, x: float, t: float) -> complex:
        """Γ(x, t) on the interior of the square (finite t, x >= 0)."""
        p = self.params
        log_half = log_xi(0.5, t)
        xi_m = cmath.exp(log_half + log_xi(p.m, -t))
        if not p.has_boundary_coupling:
            return self._full_prefactor * xi_m
        ell = _log_half_square(float(x))
        xi_minus = cmath.exp(log_half + log_xi(-p.m, -t))
        c, inverted = self._coupling(ell)
        if inverted:
            numerator = xi_m * c - self._e_ipm * xi_minus
            denominator = c - 1.0
        else:
            numerator = xi_m - self._e_ipm * xi_minus * c
            denominator = 1.0 - c
        self._guard(denominator, ell)
        return self._full_prefactor * numerator / denominator

    def corner_values(self) -> dict[str, complex]:
        """Closed-form corner values, keyed by the pair of edges meeting there."""
        return {
            "B4|B1": self.gamma1(-math.inf),
            "B1|B2": self.gamma1(math.inf),
            "B2|B3": self.gamma2(math.inf),
            "B3|B4": self.gamma3(-math.inf),
        }


def gamma_full(p: ModelParams, x: float, t: float) -> complex:
    """Γ_{m,κ;1/2,0}(x, t) for finite x >= 0 and finite t.

    Raises:
        ExceptionalPairError: If |1 − ς e^{−iπm} (x²/4)^m| < 1e-10.
    """
    if not (x >= 0.0 and math.isfinite(x) and math.isfinite(t)):
        raise ValueError(f"gamma_full needs finite x >= 0 and finite t, got x={x}, t={t}")
    return BoundarySymbol(p).full(float(x), float(t))


def scattering_value(p: ModelParams, x: float) -> complex:
    """S_{m,κ;1/2,0}(x) = e^{iπ(1/2−m)} (1 − ς e^{iπm} u^m)/(1 − ς e^{−iπm} u^m), u = x²/4.

    x = 0 and x = math.inf return the closed-form limits.
    """
    if not x >= 0.0:
        raise ValueError(f"scattering_value needs x >= 0, got {x}")
    return BoundarySymbol(p).gamma2(float(x))


def edge_value(p: ModelParams, pt: BoundaryPoint) -> complex:
    """Γ restricted to the boundary at pt (native parameter; ±inf are corners)."""
    symbol = BoundarySymbol(p)
    if pt.edge is EdgeId.B1:
        return symbol.gamma1(pt.param)
    if pt.edge is EdgeId.B3:
        return symbol.gamma3(pt.param)
    if pt.edge is EdgeId.B2:
        return symbol.gamma2(pt.param)
    return symbol.gamma4(pt.param)


def corner_values(p: ModelParams) -> dict[str, complex]:
    """The four closed-form corner values of the boundary symbol."""
    return BoundarySymbol(p).corner_values()


def corner_check(p: ModelParams) -> tuple[float, float, float, float]:
    """Mismatches at the corners where consecutive edges meet.

    Returns:
        (|Γ₁(+∞)−Γ₂(0)|, |Γ₂(+∞)−Γ₃(+∞)|, |Γ₃(−∞)−Γ₄(+∞)|, |Γ₄(0)−Γ₁(−∞)|).
    """
    symbol = BoundarySymbol(p)
    return (
        abs(symbol.gamma1(math.inf) - symbol.gamma2(0.0)),
        abs(symbol.gamma2(math.inf) - symbol.gamma3(math.inf)),
        abs(symbol.gamma3(-math.inf) - symbol.gamma4(math.inf)),
        abs(symbol.gamma4(0.0) - symbol.gamma1(-math.inf)),
    )


def _log_coupling_grid(p: ModelParams, n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """ℓ grid covering the transition window, plus log b on it."""
    centre, half_width = transition_window(p)
    ell = np.linspace(centre - 2.0 * half_width, centre + 2.0 * half_width, max(n_samples, 2))
    log_b = p.log_varsigma - 1j * math.pi * p.m + p.m * ell
    return ell, log_b


def min_denominator(p: ModelParams, n_samples: int = 4096) -> float:
    """Minimum of |1 − ς e^{−iπm} (x²/4)^m| over x ∈ (0, ∞).

    Samples a grid uniform in ln(x²/4) across the transition window and adds
    the closed-form point where |ς e^{−iπm} (x²/4)^m| = 1.
    """
    if not p.has_boundary_coupling:
        return 1.0
    ell, log_b = _log_coupling_grid(p, n_samples)
    candidate = -(math.log(abs(p.varsigma)) + math.pi * p.m.imag) / p.m.real
    log_b = np.append(log_b, p.log_varsigma - 1j * math.pi * p.m + p.m * candidate)
    # |1 − b| >= |b| − 1, so points with |b| > e^50 cannot be the minimum
    finite = log_b.real < 50.0
    values = np.abs(1.0 - np.exp(log_b[finite]))
    return float(values.min()) if values.size else 1.0


def unitarity_defect(p: ModelParams, n_samples: int = 1024) -> float:
    """max_x | |S(x)| − 1 |: zero when H_{m,κ} is self-adjoint."""
    symbol = BoundarySymbol(p)
    samples = [symbol.gamma2(0.0), symbol.gamma2(math.inf)]
    if p.has_boundary_coupling:
        ell, _ = _log_coupling_grid(p, n_samples)
        samples.extend(symbol.scattering_from_log(float(v)) for v in ell)
    return max(abs(abs(v) - 1.0) for v in samples)
