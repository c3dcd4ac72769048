"""Winding number of the boundary symbol and the Levinson theorem checks."""

import cmath
import logging
import math
from dataclasses import dataclass, replace
from typing import Callable

from src.config import config
from src.errors import (
    ExceptionalPairError,
    IntegralityError,
    RefinementExhaustedError,
)
from src.model_spectrum import ModelParams, SpectrumReport, eigen_modes, is_exceptional
from src.symbol import BoundarySymbol, EdgeId, min_denominator, unitarity_defect

logger = logging.getLogger(__name__)

# Edges are counted clockwise: a counter-clockwise phase increase is negative
ORIENTATION = -1.0

# (edge, start, end) in compactified coordinates, in traversal order
TRAVERSAL = (
    (EdgeId.B1, -1.0, 1.0),  # t: −∞ → +∞
    (EdgeId.B2, -1.0, 1.0),  # x: 0 → +∞
    (EdgeId.B3, 1.0, -1.0),  # t: +∞ → −∞
    (EdgeId.B4, 1.0, -1.0),  # x: +∞ → 0
)

# Initial B2 panels per unit of |m| × window half-width
B2_PANEL_DENSITY = 16.0


@dataclass(frozen=True)
class RefinementPolicy:
    """Adaptive bisection settings for edge_winding."""

    initial_panels: int = 64
    max_depth: int = 24
    max_step: float = 0.5 * math.pi

    @classmethod
    def from_config(cls) -> "RefinementPolicy":
        return cls(initial_panels=config.INITIAL_PANELS, max_depth=config.MAX_DEPTH)


@dataclass(frozen=True)
class EdgeDiagnostics:
    """Refinement statistics of one edge."""

    panels: int
    evaluations: int
    max_phase_step: float
    deepest_level: int


@dataclass(frozen=True)
class WindingReport:
    """Per-edge and total winding numbers, counted clockwise."""

    w1: float
    w2: float
    w3: float
    w4: float
    total: float
    rounded: int
    integrality_residual: float
    max_phase_step: float
    samples_used: tuple[int, int, int, int]

    @property
    def edges(self) -> tuple[float, float, float, float]:
        return (self.w1, self.w2, self.w3, self.w4)


@dataclass(frozen=True)
class VerificationRecord:
    """Outcome of checking the Levinson identity and its corollary at one (m, κ)."""

    params: ModelParams
    winding: WindingReport
    spectrum: SpectrumReport
    theorem_ok: bool
    corollary_applies: bool
    corollary_lhs: float
    corollary_residual: float
    edge_reference_residuals: tuple[float, float]
    edge_references: tuple[float, float]
    fredholm_index: int
    unitarity_defect: float

    @property
    def spectrum_count(self) -> int:
        return self.spectrum.count

    @property
    def index_ok(self) -> bool:
        """The Fredholm index equals minus the winding number.

        The index is taken as minus the eigenvalue count, so this holds exactly
        when theorem_ok does; it is reported for the index form of the identity
        and is not an independent check.
        """
        return -self.winding.rounded == self.fredholm_index


def _checked(value: complex, s: float) -> complex:
    if value == 0 or not cmath.isfinite(value):
        raise ExceptionalPairError(f"path evaluator returned {value} at s={s}")
    return value


def edge_winding(
    f: Callable[[float], complex],
    policy: RefinementPolicy | None = None,
    start: float = -1.0,
    end: float = 1.0,
) -> tuple[float, EdgeDiagnostics]:
    """Counter-clockwise phase increment of f along [start, end], divided by 2π.

    Every panel is probed at its midpoint; it is accepted when both half-steps
    have |Arg| below policy.max_step, otherwise both halves are refined.
    Panels are processed left to right, so the result is deterministic.

    Args:
        f: Path evaluator, non-vanishing on the path.
        policy: Refinement settings. Uses defaults if None.
        start: Start of the compactified parameter range.
        end: End of the compactified parameter range (may be below start).

    Returns:
        Tuple (winding, diagnostics).

    Raises:
        RefinementExhaustedError: If a panel needs more than max_depth bisections.
        ExceptionalPairError: If f vanishes or is not finite at a sample.
    """
    policy = policy or RefinementPolicy()
    n = max(1, int(policy.initial_panels))
    nodes = [start + (end - start) * i / n for i in range(n + 1)]
    nodes[-1] = end
    values = [_checked(f(s), s) for s in nodes]

    steps: list[float] = []
    evaluations = len(nodes)
    panels = 0
    max_step = 0.0
    deepest = 0

    for i in range(n):
        stack = [(nodes[i], values[i], nodes[i + 1], values[i + 1], 0)]
        while stack:
            a, fa, b, fb, depth = stack.pop()
            mid = 0.5 * (a + b)
            fm = _checked(f(mid), mid)
            evaluations += 1
            left = cmath.phase(fm / fa)
            right = cmath.phase(fb / fm)
            if abs(left) < policy.max_step and abs(right) < policy.max_step:
                steps.extend((left, right))
                panels += 1
                max_step = max(max_step, abs(left), abs(right))
                deepest = max(deepest, depth)
                continue
            if depth >= policy.max_depth:
                raise RefinementExhaustedError(
                    f"phase step did not settle on [{a:.17g}, {b:.17g}] after "
                    f"{policy.max_depth} bisections (near-exceptional parameters?)"
                )
            stack.append((mid, fm, b, fb, depth + 1))
            stack.append((a, fa, mid, fm, depth + 1))

    winding = math.fsum(steps) / (2.0 * math.pi)
    return winding, EdgeDiagnostics(
        panels=panels, evaluations=evaluations, max_phase_step=max_step, deepest_level=deepest
    )


def edge_policy(symbol: BoundarySymbol, edge: EdgeId, policy: RefinementPolicy) -> RefinementPolicy:
    """B2 gets enough initial panels to follow the spiral of (x²/4)^m."""
    if edge is not EdgeId.B2 or not symbol.params.has_boundary_coupling:
        return policy
    _, half_width = symbol.window
    wanted = math.ceil(B2_PANEL_DENSITY * abs(symbol.params.m) * half_width)
    return replace(policy, initial_panels=max(policy.initial_panels, wanted))


def total_winding(
    p: ModelParams,
    policy: RefinementPolicy | None = None,
    integer_tol: float | None = None,
) -> WindingReport:
    """Clockwise winding number of the boundary symbol around the square.

    Traverses B1 (t: −∞→+∞), B2 (x: 0→+∞), B3 (t: +∞→−∞) and B4 (x: +∞→0).

    Raises:
        IntegralityError: If the total is not within integer_tol of an integer.
        RefinementExhaustedError: Propagated from edge_winding.
    """
    policy = policy or RefinementPolicy.from_config()
    integer_tol = config.INTEGER_TOL if integer_tol is None else integer_tol
    symbol = BoundarySymbol(p)

    windings = []
    samples = []
    max_step = 0.0
    for edge, start, end in TRAVERSAL:
        raw, diagnostics = edge_winding(
            lambda s, edge=edge: symbol.at(edge, s),
            edge_policy(symbol, edge, policy),
            start,
            end,
        )
        logger.debug(
            f"{edge.value}: raw winding {raw:+.12f}, {diagnostics.panels} panels, "
            f"{diagnostics.evaluations} evaluations, depth {diagnostics.deepest_level}"
        )
        windings.append(ORIENTATION * raw)
        samples.append(diagnostics.evaluations)
        max_step = max(max_step, diagnostics.max_phase_step)

    total = math.fsum(windings)
    rounded = int(round(total))
    residual = abs(total - rounded)
    if residual >= integer_tol:
        raise IntegralityError(
            f"winding {total:.12f} for m={p.m}, kappa={p.kappa} is not an integer "
            f"(residual {residual:.3g})"
        )
    w1, w2, w3, w4 = windings
    return WindingReport(
        w1=w1,
        w2=w2,
        w3=w3,
        w4=w4,
        total=total,
        rounded=rounded,
        integrality_residual=residual,
        max_phase_step=max_step,
        samples_used=tuple(samples),
    )


def edge_references(p: ModelParams) -> tuple[float, float]:
    """Closed-form contributions of Γ₁ and Γ₃ to the clockwise winding.

    For κ ≠ 0: (Re(m)/2 − 1/4, Re(m)/2 + 1/4) if Re(m) > 0 and
    (−Re(m)/2 − 1/4, −Re(m)/2 + 1/4) if Re(m) < 0. For κ = 0, Γ₁ = Γ₃ is
    traversed twice in opposite directions: (Re(m)/2 − 1/4, 1/4 − Re(m)/2).
    """
    re_m = p.m.real
    if not p.has_boundary_coupling:
        return re_m / 2.0 - 0.25, 0.25 - re_m / 2.0
    half = abs(re_m) / 2.0
    return half - 0.25, half + 0.25


def verify_levinson(
    p: ModelParams,
    policy: RefinementPolicy | None = None,
    margin: float | None = None,
) -> VerificationRecord:
    """Compare the winding number of the boundary symbol with the eigenvalue count.

    Args:
        p: Model parameters.
        policy: Refinement settings. Uses config defaults if None.
        margin: Exceptional refusal margin (integer-ness of the strip solutions
            and min_denominator). Uses config.EXCEPTIONAL_TOL if None.

    Returns:
        VerificationRecord; theorem_ok is True when the rounded winding equals
        the number of eigenvalues.

    Raises:
        ExceptionalPairError: If (m, κ) is within margin of an exceptional pair.
    """
    margin = config.EXCEPTIONAL_TOL if margin is None else margin
    flag, witness = is_exceptional(p, margin)
    if flag:
        raise ExceptionalPairError(
            f"refusing: exceptional pair within margin (m={p.m}, kappa={p.kappa}, n={witness})"
        )
    spectrum = eigen_modes(p, margin)
    if p.has_boundary_coupling:
        smallest = min_denominator(p)
        if smallest < margin:
            raise ExceptionalPairError(
                f"refusing: exceptional pair within margin (min denominator {smallest:.3g})"
            )

    report = total_winding(p, policy)
    count = spectrum.count
    ref1, ref3 = edge_references(p)

    corollary_applies = p.has_boundary_coupling
    corollary_lhs = report.w2 + abs(p.m.real) if corollary_applies else report.w2
    record = VerificationRecord(
        params=p,
        winding=report,
        spectrum=spectrum,
        theorem_ok=report.rounded == count,
        corollary_applies=corollary_applies,
        corollary_lhs=corollary_lhs,
        corollary_residual=abs(corollary_lhs - count),
        edge_reference_residuals=(abs(report.w1 - ref1), abs(report.w3 - ref3)),
        edge_references=(ref1, ref3),
        fredholm_index=-count,
        unitarity_defect=unitarity_defect(p),
    )
    if not record.theorem_ok:
        logger.warning(
            f"Levinson mismatch at m={p.m}, kappa={p.kappa}: winding {report.total:.9f}, "
            f"count {count}"
        )
    return record
