"""Command implementations: verify, sweep, spectrum, trace and exceptional-scan."""

import argparse
import asyncio
import json
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Any, TextIO

import numpy as np
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from src.config import config
from src.errors import (
    ConfigError,
    ExceptionalPairError,
    IntegralityError,
    LevinsonError,
    RefinementExhaustedError,
    ShootingError,
)
from src.model_spectrum import (
    ModelParams,
    eigen_modes,
    is_exceptional,
    make_params,
    shooting_residual,
)
from src.special_functions import log_gamma
from src.symbol import BoundarySymbol, min_denominator, scattering_value
from src.utils import complex_to_pair, csv_text, format_complex
from src.winding import (
    ORIENTATION,
    TRAVERSAL,
    RefinementPolicy,
    VerificationRecord,
    edge_policy,
    edge_winding,
    verify_levinson,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_MISMATCH = 2

CROSS_MARK_TOL = 1e-6
SHOOTING_TOL = 1e-5

SWEEP_COLUMNS = (
    "m_re",
    "m_im",
    "kappa_re",
    "kappa_im",
    "count",
    "winding_total",
    "w1",
    "w2",
    "w3",
    "w4",
    "corollary_lhs",
    "integrality_residual",
    "corollary_residual",
    "edge1_residual",
    "edge3_residual",
    "status",
)
TRACE_COLUMNS = ("edge", "compactified_param", "native_param", "re", "im", "unwrapped_phase")
SCAN_COLUMNS = (
    "m_re",
    "m_im",
    "branch",
    "ell",
    "kappa_re",
    "kappa_im",
    "witness",
    "flagged",
    "cross_mark",
)


# Configuration files


class ComplexGrid(BaseModel):
    """Row-major grid of complex values: real parts outer, imaginary parts inner."""

    re_min: float
    re_max: float
    re_steps: int = Field(1, ge=1)
    im_min: float = 0.0
    im_max: float = 0.0
    im_steps: int = Field(1, ge=1)

    @model_validator(mode="after")
    def check_ranges(self) -> "ComplexGrid":
        if self.re_min > self.re_max or self.im_min > self.im_max:
            raise ValueError("grid minimum exceeds maximum")
        return self

    def real_parts(self) -> list[float]:
        return [float(v) for v in np.linspace(self.re_min, self.re_max, self.re_steps)]

    def imag_parts(self) -> list[float]:
        return [float(v) for v in np.linspace(self.im_min, self.im_max, self.im_steps)]

    def points(self) -> list[complex]:
        return [complex(re, im) for re in self.real_parts() for im in self.imag_parts()]


class Tolerances(BaseModel):
    """Acceptance tolerances of a sweep."""

    integer_tol: float = Field(default_factory=lambda: config.INTEGER_TOL, gt=0)
    corollary_tol: float = Field(default_factory=lambda: config.COROLLARY_TOL, gt=0)


class SweepConfig(BaseModel):
    """JSON configuration of the sweep and exceptional-scan commands."""

    m_grid: ComplexGrid
    kappa_grid: ComplexGrid = Field(
        default_factory=lambda: ComplexGrid(re_min=-1.0, re_max=1.0, re_steps=3, im_min=-1.0, im_max=1.0, im_steps=3)
    )
    exceptional_margin: float = Field(default_factory=lambda: config.EXCEPTIONAL_MARGIN, gt=0)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    seed: int = 0
    jitter: float = Field(0.0, ge=0)
    parallelism: int = Field(default_factory=lambda: config.PARALLELISM, ge=0)
    scan_points: int = Field(64, ge=2)
    scan_log_range: float = Field(12.0, gt=0)

    @field_validator("m_grid")
    @classmethod
    def check_m_grid(cls, grid: ComplexGrid) -> ComplexGrid:
        for re in grid.real_parts():
            if not 0.0 < abs(re) < 1.0:
                raise ValueError(f"m grid contains Re(m)={re}; |Re(m)| must lie in (0, 1)")
        return grid


def load_sweep_config(path: str | Path) -> SweepConfig:
    """Read and validate a SweepConfig JSON file.

    Raises:
        ConfigError: If the file is missing or does not validate.
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        return SweepConfig.model_validate_json(text)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e


def sweep_points(cfg: SweepConfig) -> list[tuple[complex, complex]]:
    """Grid points (m, κ) in row-major order, with the seeded jitter applied.

    Jitter perturbs Im(m) and both parts of κ; Re(m) stays on the validated grid.
    """
    pairs = [(m, kappa) for m in cfg.m_grid.points() for kappa in cfg.kappa_grid.points()]
    if cfg.jitter == 0.0:
        return pairs
    rng = np.random.default_rng(cfg.seed)
    noise = rng.uniform(-cfg.jitter, cfg.jitter, size=(len(pairs), 3))
    return [
        (complex(m.real, m.imag + dm), complex(kappa.real + dkr, kappa.imag + dki))
        for (m, kappa), (dm, dkr, dki) in zip(pairs, noise)
    ]


def resolve_parallelism(requested: int) -> int:
    return requested if requested > 0 else (os.cpu_count() or 1)


# Single-point evaluation


def guard_exceptional(p: ModelParams, margin: float) -> None:
    """Refuse parameters within margin of an exceptional pair.

    Raises:
        ExceptionalPairError: With a "refusing: ..." message.
    """
    flag, witness = is_exceptional(p, margin)
    if flag:
        raise ExceptionalPairError(
            f"refusing: exceptional pair within margin (m={p.m}, kappa={p.kappa}, n={witness})"
        )
    if p.has_boundary_coupling:
        smallest = min_denominator(p)
        if smallest < margin:
            raise ExceptionalPairError(
                f"refusing: exceptional pair within margin (min denominator {smallest:.3g})"
            )


@dataclass(frozen=True)
class PointResult:
    """One sweep row. Numeric fields are nan when the point was not verified."""

    m: complex
    kappa: complex
    status: str
    count: int | None = None
    winding_total: float = math.nan
    w: tuple[float, float, float, float] = (math.nan, math.nan, math.nan, math.nan)
    corollary_lhs: float = math.nan
    integrality_residual: float = math.nan
    corollary_residual: float = math.nan
    edge_residuals: tuple[float, float] = (math.nan, math.nan)
    message: str = ""

    @property
    def is_failure(self) -> bool:
        return self.status not in ("ok", "skipped_exceptional")

    def row(self) -> list[Any]:
        return [
            self.m.real,
            self.m.imag,
            self.kappa.real,
            self.kappa.imag,
            "" if self.count is None else self.count,
            self.winding_total,
            *self.w,
            self.corollary_lhs,
            self.integrality_residual,
            self.corollary_residual,
            *self.edge_residuals,
            self.status,
        ]

    def to_dict(self) -> dict[str, Any]:
        data = dict(zip(SWEEP_COLUMNS, self.row()))
        data.update(m=complex_to_pair(self.m), kappa=complex_to_pair(self.kappa), message=self.message)
        for key in ("m_re", "m_im", "kappa_re", "kappa_im"):
            data.pop(key)
        return {k: (None if isinstance(v, float) and math.isnan(v) else v) for k, v in data.items()}


def evaluate_point(
    m: complex,
    kappa: complex,
    margin: float,
    integer_tol: float,
    corollary_tol: float,
    initial_panels: int,
    max_depth: int,
) -> PointResult:
    """Verify one grid point; never raises for numerical failures."""
    try:
        p = make_params(m, kappa)
    except LevinsonError as e:
        return PointResult(m=complex(m), kappa=complex(kappa), status="invalid", message=str(e))

    policy = RefinementPolicy(initial_panels=initial_panels, max_depth=max_depth)
    try:
        record = verify_levinson(p, policy, margin=margin)
    except ExceptionalPairError as e:
        return PointResult(m=p.m, kappa=p.kappa, status="skipped_exceptional", message=str(e))
    except (IntegralityError, RefinementExhaustedError) as e:
        return PointResult(m=p.m, kappa=p.kappa, status="winding_failure", message=str(e))

    report = record.winding
    if report.integrality_residual >= integer_tol:
        status = "winding_failure"
    elif not record.theorem_ok:
        status = "theorem_failure"
    elif record.corollary_applies and record.corollary_residual >= corollary_tol:
        status = "corollary_failure"
    else:
        status = "ok"
    return PointResult(
        m=p.m,
        kappa=p.kappa,
        status=status,
        count=record.spectrum_count,
        winding_total=report.total,
        w=report.edges,
        corollary_lhs=record.corollary_lhs,
        integrality_residual=report.integrality_residual,
        corollary_residual=record.corollary_residual,
        edge_residuals=record.edge_reference_residuals,
    )


# Sweep


@dataclass
class SweepSummary:
    """Totals of one sweep; failures carry their full rows for reproduction."""

    total_points: int
    skipped_exceptional: int
    theorem_failures: int
    corollary_failures: int
    max_integrality_residual: float
    wall_time: float
    failures: list[PointResult] = field(default_factory=list)

    @classmethod
    def from_results(cls, results: list[PointResult], wall_time: float) -> "SweepSummary":
        residuals = [r.integrality_residual for r in results if not math.isnan(r.integrality_residual)]
        return cls(
            total_points=len(results),
            skipped_exceptional=sum(r.status == "skipped_exceptional" for r in results),
            theorem_failures=sum(
                r.status in ("theorem_failure", "winding_failure", "invalid") for r in results
            ),
            corollary_failures=sum(r.status == "corollary_failure" for r in results),
            max_integrality_residual=max(residuals, default=0.0),
            wall_time=wall_time,
            failures=[r for r in results if r.is_failure],
        )

    @property
    def ok(self) -> bool:
        return self.theorem_failures == 0 and self.corollary_failures == 0

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["failures"] = [r.to_dict() for r in self.failures]
        return {"schema": SCHEMA_VERSION, **data}


async def run_sweep(cfg: SweepConfig, parallelism: int | None = None) -> list[PointResult]:
    """Evaluate every grid point; results come back in grid order.

    Args:
        cfg: Validated sweep configuration.
        parallelism: Worker processes (0 = CPU count, 1 = in-process). Defaults
            to cfg.parallelism.
    """
    workers = resolve_parallelism(cfg.parallelism if parallelism is None else parallelism)
    tasks = [
        (
            m,
            kappa,
            cfg.exceptional_margin,
            cfg.tolerances.integer_tol,
            cfg.tolerances.corollary_tol,
            config.INITIAL_PANELS,
            config.MAX_DEPTH,
        )
        for m, kappa in sweep_points(cfg)
    ]
    logger.info(f"Sweeping {len(tasks)} points with {workers} worker(s)")
    if workers == 1:
        return [evaluate_point(*task) for task in tasks]

    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [loop.run_in_executor(pool, evaluate_point, *task) for task in tasks]
        return list(await asyncio.gather(*futures))


def sweep_csv(results: list[PointResult]) -> str:
    return csv_text(SWEEP_COLUMNS, (r.row() for r in results))


# Output helpers


def _emit(text: str, out: str | None, stream: TextIO | None = None) -> None:
    """Write text to the --out path, or to stdout."""
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
        logger.info(f"Wrote {out}")
    else:
        (stream or sys.stdout).write(text)


def _params_from_args(args: argparse.Namespace) -> ModelParams:
    return make_params(args.m, args.kappa)


def record_to_dict(record: VerificationRecord) -> dict[str, Any]:
    """JSON form of a verification record (schema 1)."""
    p = record.params
    report = record.winding
    return {
        "schema": SCHEMA_VERSION,
        "m": complex_to_pair(p.m),
        "kappa": complex_to_pair(p.kappa),
        "varsigma": complex_to_pair(p.varsigma),
        "is_self_adjoint": p.is_self_adjoint,
        "count": record.spectrum_count,
        "modes": [complex_to_pair(k) for k in record.spectrum.modes],
        "eigenvalues": [complex_to_pair(e) for e in record.spectrum.eigenvalues],
        "strip_margin": None if math.isinf(record.spectrum.margin) else record.spectrum.margin,
        "winding": {
            "w1": report.w1,
            "w2": report.w2,
            "w3": report.w3,
            "w4": report.w4,
            "total": report.total,
            "rounded": report.rounded,
            "integrality_residual": report.integrality_residual,
            "max_phase_step": report.max_phase_step,
            "samples_used": list(report.samples_used),
        },
        "edge_references": list(record.edge_references),
        "edge_reference_residuals": list(record.edge_reference_residuals),
        "corollary": {
            "applies": record.corollary_applies,
            "lhs": record.corollary_lhs,
            "residual": record.corollary_residual,
        },
        "theorem_ok": record.theorem_ok,
        "fredholm_index": record.fredholm_index,
        "index_ok": record.index_ok,
        "unitarity_defect": record.unitarity_defect,
    }


def render_record(record: VerificationRecord) -> str:
    """Human-readable table of a verification record."""
    p = record.params
    report = record.winding
    ref1, ref3 = record.edge_references
    lines = [
        f"m = {format_complex(p.m)}    kappa = {format_complex(p.kappa)}",
        f"varsigma = {format_complex(p.varsigma)}    self-adjoint: {'yes' if p.is_self_adjoint else 'no'}",
        "",
        f"{'edge':<6}{'winding':>22}{'reference':>22}",
        f"{'B1':<6}{report.w1:>22.12f}{ref1:>22.12f}",
        f"{'B2':<6}{report.w2:>22.12f}{'(scattering)':>22}",
        f"{'B3':<6}{report.w3:>22.12f}{ref3:>22.12f}",
        f"{'B4':<6}{report.w4:>22.12f}{0.0:>22.12f}",
        f"{'total':<6}{report.total:>22.12f}    rounded {report.rounded}",
        "",
        f"eigenvalues: {record.spectrum_count}",
    ]
    for n, k, e in zip(record.spectrum.indices, record.spectrum.modes, record.spectrum.eigenvalues):
        lines.append(f"  n={n:<5d} k = {format_complex(k)}    E = {format_complex(e)}")
    if record.corollary_applies:
        lines.append(
            f"corollary: w2 + |Re m| = {report.w2:.12f} + {abs(p.m.real):.12f} = "
            f"{record.corollary_lhs:.12f} (residual {record.corollary_residual:.3g})"
        )
    lines.extend(
        [
            f"Fredholm index: {record.fredholm_index}    unitarity defect: {record.unitarity_defect:.3g}",
            f"Levinson identity: {'OK' if record.theorem_ok else 'MISMATCH'}",
        ]
    )
    return "\n".join(lines) + "\n"


# Commands


def cmd_verify(args: argparse.Namespace) -> int:
    """Check the Levinson identity at one (m, κ).

    Returns:
        0 when the winding number equals the eigenvalue count, 2 otherwise.
    """
    p = _params_from_args(args)
    record = verify_levinson(p, RefinementPolicy.from_config(), margin=config.EXCEPTIONAL_MARGIN)
    if args.json:
        _emit(json.dumps(record_to_dict(record), indent=2) + "\n", args.out)
    else:
        _emit(render_record(record), args.out)
    return EXIT_OK if record.theorem_ok else EXIT_MISMATCH


def cmd_sweep(args: argparse.Namespace) -> int:
    """Verify every point of a configured grid and write one CSV row per point."""
    cfg = load_sweep_config(args.config)
    if args.json and not args.out:
        raise ConfigError("sweep --json writes the summary to stdout and needs --out for the CSV")

    started = time.perf_counter()
    results = asyncio.run(run_sweep(cfg, args.parallel))
    summary = SweepSummary.from_results(results, time.perf_counter() - started)

    _emit(sweep_csv(results), args.out)
    if args.json:
        sys.stdout.write(json.dumps(summary.to_dict(), indent=2) + "\n")
    for failure in summary.failures:
        logger.warning(f"{failure.status} at m={failure.m}, kappa={failure.kappa} {failure.message}")
    logger.info(
        f"{summary.total_points} points, {summary.skipped_exceptional} skipped, "
        f"{summary.theorem_failures} theorem failures, {summary.corollary_failures} corollary "
        f"failures, max integrality residual {summary.max_integrality_residual:.3g}, "
        f"{summary.wall_time:.2f}s"
    )
    return EXIT_OK if summary.ok else EXIT_MISMATCH


def cmd_spectrum(args: argparse.Namespace) -> int:
    """List the eigenvalues; with --check, confirm each one by shooting."""
    p = _params_from_args(args)
    margin = config.EXCEPTIONAL_MARGIN
    flag, witness = is_exceptional(p, margin)
    if flag:
        raise ExceptionalPairError(
            f"refusing: exceptional pair within margin (m={p.m}, kappa={p.kappa}, n={witness})"
        )
    spectrum = eigen_modes(p, margin)

    residuals: list[float | None] = [None] * spectrum.count
    if args.check:
        for i, k in enumerate(spectrum.modes):
            try:
                residuals[i] = abs(shooting_residual(p, k))
            except ShootingError as e:
                logger.warning(f"shooting failed for k={k}: {e}")
                residuals[i] = math.inf

    if args.json:
        payload = {
            "schema": SCHEMA_VERSION,
            "m": complex_to_pair(p.m),
            "kappa": complex_to_pair(p.kappa),
            "count": spectrum.count,
            "strip_margin": None if math.isinf(spectrum.margin) else spectrum.margin,
            "modes": [
                {
                    "n": n,
                    "k": complex_to_pair(k),
                    "E": complex_to_pair(e),
                    "shooting_residual": r,
                }
                for n, k, e, r in zip(spectrum.indices, spectrum.modes, spectrum.eigenvalues, residuals)
            ],
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        lines = [f"eigenvalues: {spectrum.count}"]
        if not math.isinf(spectrum.margin):
            lines.append(f"strip margin: {spectrum.margin:.6g}")
        for n, k, e, r in zip(spectrum.indices, spectrum.modes, spectrum.eigenvalues, residuals):
            line = f"  n={n:<5d} k = {format_complex(k)}    E = {format_complex(e)}"
            if r is not None:
                line += f"    shooting |a/b - kappa| = {r:.3g}"
            lines.append(line)
        _emit("\n".join(lines) + "\n", args.out)

    checked = [r for r in residuals if r is not None]
    if checked and max(checked) >= SHOOTING_TOL:
        logger.error(f"shooting residual {max(checked):.3g} exceeds {SHOOTING_TOL:g}")
        return EXIT_MISMATCH
    return EXIT_OK


def trace_rows(p: ModelParams, samples: int) -> list[list[Any]]:
    """Boundary-phase rows along the four edges.

    unwrapped_phase is the clockwise phase accumulated from the first row; the
    increment between consecutive rows is resolved adaptively, so the last row
    equals 2π times the total winding. Each segment starts from its share of
    the edge's initial panels, so fast spirals on B2 are not skipped.
    """
    if samples < 2:
        raise ConfigError(f"--samples must be at least 2, got {samples}")
    symbol = BoundarySymbol(p)
    base = RefinementPolicy.from_config()
    rows: list[list[Any]] = []
    cumulative = 0.0
    for edge, start, end in TRAVERSAL:
        s_values = [start + (end - start) * i / (samples - 1) for i in range(samples)]
        s_values[-1] = end
        share = math.ceil(edge_policy(symbol, edge, base).initial_panels / (samples - 1))
        policy = replace(base, initial_panels=max(1, share))
        evaluate = partial(symbol.at, edge)
        previous = None
        for s in s_values:
            if previous is not None:
                increment, _ = edge_winding(evaluate, policy, previous, s)
                cumulative += ORIENTATION * 2.0 * math.pi * increment
            value = evaluate(s)
            rows.append([edge.value, s, symbol.point(edge, s).param, value.real, value.imag, cumulative])
            previous = s
    return rows


def cmd_trace(args: argparse.Namespace) -> int:
    """Export the boundary phase of Γ as plot-ready CSV."""
    p = _params_from_args(args)
    guard_exceptional(p, config.EXCEPTIONAL_MARGIN)
    rows = trace_rows(p, args.samples)
    _emit(csv_text(TRACE_COLUMNS, rows), args.out)
    logger.info(f"Final cumulative phase {rows[-1][-1] / (2.0 * math.pi):.9f} x 2pi")
    return EXIT_OK


def exceptional_rows(cfg: SweepConfig) -> list[list[Any]]:
    """Points of the exceptional κ-curves for each m of the grid.

    Along a branch ±π the varsigma values are exp(m(±iπ − ℓ)) for ℓ in
    [−L, L]; the +π points zero the scattering denominator at x = 2e^{ℓ/2},
    the −π points zero its numerator there.
    """
    rows: list[list[Any]] = []
    ells = np.linspace(-cfg.scan_log_range, cfg.scan_log_range, cfg.scan_points)
    for m in cfg.m_grid.points():
        gamma_ratio = log_gamma(m) - log_gamma(-m)
        for branch in (1, -1):
            for ell in ells:
                ell = float(ell)
                log_kappa = m * (branch * 1j * math.pi - ell) + gamma_ratio
                kappa = complex(np.exp(log_kappa))
                if kappa == 0 or not np.isfinite(kappa):
                    continue
                p = make_params(m, kappa)
                flagged, witness = is_exceptional(p, cfg.exceptional_margin)
                if branch == 1:
                    cross = min_denominator(p) < CROSS_MARK_TOL
                else:
                    cross = abs(scattering_value(p, 2.0 * math.exp(ell / 2.0))) < CROSS_MARK_TOL
                rows.append(
                    [
                        m.real,
                        m.imag,
                        branch,
                        ell,
                        kappa.real,
                        kappa.imag,
                        "" if witness is None else witness,
                        int(flagged),
                        int(cross),
                    ]
                )
    return rows


def cmd_exceptional_scan(args: argparse.Namespace) -> int:
    """Export the exceptional κ-curves of the configured m grid as CSV."""
    cfg = load_sweep_config(args.config)
    rows = exceptional_rows(cfg)
    _emit(csv_text(SCAN_COLUMNS, rows), args.out)
    unflagged = sum(1 for row in rows if not row[7])
    if unflagged:
        logger.warning(f"{unflagged} scan points were not flagged as exceptional")
    return EXIT_OK
