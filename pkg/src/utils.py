"""Utility functions for parsing and formatting numbers."""

import csv
import io
import math
from typing import Any, Iterable, Sequence


def parse_complex(text: str) -> complex:
    """Parse a CLI complex scalar.

    Args:
        text: "re,im" (comma, no spaces) or a plain real number like "-0.5".

    Returns:
        The complex value.

    Raises:
        ValueError: If the text is not a finite number pair.
    """
    if text is None or not text.strip():
        raise ValueError("empty complex value")
    parts = text.strip().split(",")
    if len(parts) > 2:
        raise ValueError(f"expected 're,im', got {text!r}")
    try:
        values = [float(part) for part in parts]
    except ValueError:
        raise ValueError(f"expected 're,im', got {text!r}") from None
    if not all(math.isfinite(v) for v in values):
        raise ValueError(f"non-finite complex value {text!r}")
    return complex(values[0], values[1] if len(values) == 2 else 0.0)


def format_float(value: float) -> str:
    """Format a float with 17 significant digits (lossless for doubles)."""
    return "%.17g" % value


def complex_to_pair(value: complex) -> list[float]:
    """Encode a complex number as a [re, im] JSON pair."""
    value = complex(value)
    return [value.real, value.imag]


def format_complex(value: complex, digits: int = 10) -> str:
    """Format a complex number for human-readable tables.

    Args:
        value: Complex number.
        digits: Significant digits per component.

    Returns:
        String like "2 + 0i" or "0.31 - 1.2i".
    """
    value = complex(value)
    sign = "-" if value.imag < 0 else "+"
    return f"{value.real:.{digits}g} {sign} {abs(value.imag):.{digits}g}i"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows as RFC-4180 CSV with "\\n" line endings.

    Floats are written with format_float; other values with str.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()
