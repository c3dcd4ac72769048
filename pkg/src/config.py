"""Configuration management for levinson-check."""

import os

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

LOG_LEVELS = ("error", "info", "debug")


def _env_float(name: str, default: float) -> float:
    """Read a float environment variable; unparsable values become nan for validate() to reject."""
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return float(raw)
    except ValueError:
        return float("nan")


def _env_int(name: str, default: int) -> int:
    """Read an integer environment variable; unparsable values become -1 for validate() to reject."""
    raw = os.getenv(name)
    if raw is None or raw == "":
        return default
    try:
        return int(raw)
    except ValueError:
        return -1


class Config:
    """Application configuration loaded from environment variables."""

    # Logging
    LOG_LEVEL: str = os.getenv("LEVINSON_LOG", "info").lower()

    # Guards
    EXCEPTIONAL_MARGIN: float = _env_float("LEVINSON_EXCEPTIONAL_MARGIN", 1e-6)
    EXCEPTIONAL_TOL: float = _env_float("LEVINSON_EXCEPTIONAL_TOL", 1e-9)

    # Acceptance tolerances
    INTEGER_TOL: float = _env_float("LEVINSON_INTEGER_TOL", 1e-6)
    COROLLARY_TOL: float = _env_float("LEVINSON_COROLLARY_TOL", 1e-6)

    # Winding refinement
    INITIAL_PANELS: int = _env_int("LEVINSON_INITIAL_PANELS", 64)
    MAX_DEPTH: int = _env_int("LEVINSON_MAX_DEPTH", 24)

    # Sweep worker pool (0 = number of CPU cores)
    PARALLELISM: int = _env_int("LEVINSON_PARALLELISM", 0)

    @classmethod
    def validate(cls) -> list[str]:
        """Validate the configuration values.

        Returns:
            List of problems, empty when the configuration is usable.
        """
        problems = []
        if cls.LOG_LEVEL not in LOG_LEVELS:
            problems.append(f"LEVINSON_LOG must be one of {', '.join(LOG_LEVELS)}")
        for name in ("EXCEPTIONAL_MARGIN", "EXCEPTIONAL_TOL", "INTEGER_TOL", "COROLLARY_TOL"):
            value = getattr(cls, name)
            if not value > 0:
                problems.append(f"LEVINSON_{name} must be a positive number")
        if cls.INITIAL_PANELS < 1:
            problems.append("LEVINSON_INITIAL_PANELS must be at least 1")
        if cls.MAX_DEPTH < 1:
            problems.append("LEVINSON_MAX_DEPTH must be at least 1")
        if cls.PARALLELISM < 0:
            problems.append("LEVINSON_PARALLELISM must be non-negative")
        return problems


config = Config()
