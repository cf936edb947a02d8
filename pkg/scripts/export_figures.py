"""
Write plot-ready CSV files for the three worked examples.
Usage: python -m scripts.export_figures [--out DIR]
"""
import os
import sys

import numpy as np
import pandas as pd

from phaseforge import equiv, phtype, scenarios, xform
from phaseforge.config import settings
from phaseforge.errors import PhaseForgeError


def save(frame: pd.DataFrame, out_dir: str, name: str):
    path = os.path.join(out_dir, name)
    frame.to_csv(path, index=False, float_format=f"%.{settings.CSV_DIGITS}g", lineterminator="\n")
    print(f"  - {name} ({len(frame)} rows)")


def export_continuous(out_dir: str):
    r = scenarios.continuous_example()
    tr = xform.cont_to_cph(r)
    grid = np.round(np.arange(0, 101) * 0.1, 10)

    save(pd.DataFrame({
        "x": grid,
        "pdf": [phtype.cph_pdf(tr.ph, x) for x in grid],
        "cdf": [phtype.cph_cdf(tr.ph, x) for x in grid],
    }), out_dir, "continuous_pdf_cdf.csv")

    rows = []
    for s in range(9):
        P = phtype.cph_tpm(tr.ph, s)
        rows.extend((s, i + 1, j + 1, P[i, j]) for i in range(P.shape[0]) for j in range(P.shape[1]))
    save(pd.DataFrame(rows, columns=["s", "i", "j", "p"]), out_dir, "continuous_tpm.csv")

    save(pd.DataFrame(phtype.exit_edges(tr.ph), columns=["from", "to", "rate"]),
         out_dir, "continuous_chain.csv")

    report = equiv.verify_equivalence(r, tr, 50.0, grid)
    save(pd.DataFrame({"t": grid, "y_system": report.y_system, "y_ph": report.y_ph}),
         out_dir, "continuous_outputs.csv")


def export_discrete(name: str, u_level: float, horizon: int, out_dir: str):
    r = scenarios.build_scenario(name)
    tr = xform.disc_to_dph(r)
    raw = xform.raw_ph(tr)
    steps = np.arange(horizon + 1)
    prefix = name.replace("-", "_")

    save(pd.DataFrame({
        "k": steps,
        "pmf": [phtype.dph_pmf(tr.ph, k) for k in steps],
        "cdf": [phtype.dph_cdf(tr.ph, k) for k in steps],
        "pmf_point_mass": [phtype.dph_pmf(raw, k) for k in steps],
    }), out_dir, f"{prefix}_pmf.csv")

    sample = phtype.ph_sample(tr.ph, 1000, settings.SEED)
    save(pd.DataFrame({"value": sample.values.astype(int)}), out_dir, f"{prefix}_sample.csv")

    report = equiv.verify_equivalence(r, tr, u_level, steps)
    save(pd.DataFrame({"k": steps, "y_system": report.y_system, "y_ph": report.y_ph}),
         out_dir, f"{prefix}_outputs.csv")


def export_figures(out_dir: str):
    """Write every CSV into out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    print(f"Writing figure data to {out_dir}/")

    try:
        export_continuous(out_dir)
        export_discrete("student", 50.0, 10, out_dir)
        export_discrete("supply-chain", 100.0, 13, out_dir)
    except PhaseForgeError as e:
        print(f"❌ Error exporting figures: {e.detail}")
        sys.exit(1)

    print("✅ Figure data written successfully!")


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Export plot-ready CSV data for the worked examples")
    parser.add_argument("--out", default="figures", help="output directory (default: figures)")

    args = parser.parse_args()
    export_figures(args.out)
