#!/usr/bin/env python3
"""Write a default sweep configuration file.

The default grid has 10 x 10 values of m (both signs of Re(m)) and 3 x 3
values of kappa, which is the desk-scale check of the Levinson identity.

Usage:
    python scripts/make_sweep_config.py [path]

After running:
    python -m src.main sweep --config sweep.json --out sweep.csv
"""

import sys
from pathlib import Path

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.harness import ComplexGrid, SweepConfig


def default_config() -> SweepConfig:
    """Default grid: Re(m) = -0.9, -0.7, ..., 0.9 (never 0), Im(m) in [-1, 1]."""
    return SweepConfig(
        m_grid=ComplexGrid(re_min=-0.9, re_max=0.9, re_steps=10, im_min=-1.0, im_max=1.0, im_steps=10),
        kappa_grid=ComplexGrid(re_min=-1.0, re_max=1.0, re_steps=3, im_min=-1.0, im_max=1.0, im_steps=3),
    )


def main():
    path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("sweep.json")
    if path.exists():
        response = input(f"{path} already exists. Overwrite? (y/N): ")
        if response.lower() != "y":
            print("Aborted.")
            return

    cfg = default_config()
    path.write_text(cfg.model_dump_json(indent=2) + "\n", encoding="utf-8")
    print(f"Wrote {path}")
    print(f"Grid points: {len(cfg.m_grid.points()) * len(cfg.kappa_grid.points())}")


if __name__ == "__main__":
    main()
