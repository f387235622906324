#!/usr/bin/env python3
"""Generate the three preset precision sweeps as CSV (and optionally JSON).

Usage:
    python scripts/make_figure_data.py --outdir out [--json]

Writes fig1.csv, fig2.csv, fig3.csv: simultaneous vs independent estimation
uncertainty against the coarsening degree eta, one preset per file.
"""

import argparse
import pathlib
import sys

from spinmet.cli import main as spinmet_main


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out", help="output directory")
    parser.add_argument("--json", action="store_true", help="also write JSON reports")
    args = parser.parse_args(argv)
    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for preset in ("fig1", "fig2", "fig3"):
        csv_path = outdir / f"{preset}.csv"
        code = spinmet_main(["sweep", "--preset", preset, "--out", str(csv_path)])
        if code != 0:
            return code
        print(f"wrote {csv_path}")
        if args.json:
            json_path = outdir / f"{preset}.json"
            code = spinmet_main(
                ["sweep", "--preset", preset, "--format", "json", "--out", str(json_path)]
            )
            if code != 0:
                return code
            print(f"wrote {json_path}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
