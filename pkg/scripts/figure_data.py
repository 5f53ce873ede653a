"""Regenerate the squeezing and Mandel Q curves as CSV files.

Writes ``<outdir>/metrics_bg.csv`` and ``<outdir>/metrics_gp.csv`` over the
default symmetric sweeps, with the truncation sized automatically.

    python3 scripts/figure_data.py [outdir]
"""

import sys
from pathlib import Path

from well_ladder.cli import METRIC_COLUMNS, emit_table
from well_ladder.nonclassical import default_alphas, metric_sweep, sweep_levels


def main(outdir: str = "figure_data") -> None:
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    for family in ("BG", "GP"):
        alphas = default_alphas(family)
        points = metric_sweep(family, alphas)
        path = out / f"metrics_{family.lower()}.csv"
        emit_table([p.as_row() for p in points], "csv", path, METRIC_COLUMNS)
        print(f"{family}: {len(points)} points, J_max={sweep_levels(family, alphas)} -> {path}")


if __name__ == "__main__":
    main(*sys.argv[1:2])
