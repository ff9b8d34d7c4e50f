#!/usr/bin/env python3
"""Sweep steady-state currents over a decade and fit the V against J law."""

import argparse
import json
import sys
from pathlib import Path

from latticeturb.cli import main as cli_main


def ohm_config(m: float, n_cells: int, n_points: int) -> dict:
    return {
        "pme": {"m": m, "k_min": 0.0, "k_max": 1.0, "n_cells": n_cells},
        "electrode_at": 1.0,
        # J = n_left^m / a, so a decade of J needs a 10^(1/m) span of levels
        "n_left_values": {
            "start": 1.0,
            "stop": 10.0 ** (1.0 / m),
            "count": n_points,
            "spacing": "log",
        },
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", type=float, default=3.0)
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--n-cells", type=int, default=1024)
    parser.add_argument("--n-points", type=int, default=8)
    args = parser.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    run_dir = args.out / f"sweep_m{args.m:g}"
    config_path = args.out / f"ohm_m{args.m:g}.json"
    config_path.write_text(
        json.dumps(ohm_config(args.m, args.n_cells, args.n_points), indent=2)
    )
    code = cli_main(["ohm", "--config", str(config_path), "--out", str(run_dir)])
    if code != 0:
        return code

    fit_config = args.out / f"fit_m{args.m:g}.json"
    fit_config.write_text(
        json.dumps(
            {
                "series": str(run_dir / "ohm_sweep.csv"),
                "x_column": "j",
                "y_column": "v",
            },
            indent=2,
        )
    )
    fit_dir = args.out / f"fit_m{args.m:g}"
    code = cli_main(["exponent", "--config", str(fit_config), "--out", str(fit_dir)])
    if code != 0:
        return code

    with open(fit_dir / "exponent_fit.csv") as handle:
        header = handle.readline().strip().split(",")
        row = handle.readline().strip().split(",")
    slope = float(row[header.index("slope")])
    print(f"m={args.m:g}: V ~ J^{slope:.5f} (theory exponent {1.0 / args.m:.5f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
