#!/usr/bin/env python3
"""Run the spreading experiment end to end: diffusion march, then slope fit.

Produces one run directory per exponent under --out, each holding the
diffusion outputs plus an exponent_fit.csv, all driven through the CLI so
every directory carries a verifiable manifest.
"""

import argparse
import json
import sys
from pathlib import Path

from latticeturb.cli import main as cli_main

DOMAINS = {3.0: (-20.0, 20.0), 5.0: (-8.0, 8.0)}


def spreading_config(m: float, n_cells: int, t_max: float) -> dict:
    k_min, k_max = DOMAINS[m]
    return {
        "pme": {"m": m, "k_min": k_min, "k_max": k_max, "n_cells": n_cells},
        "initial": {"kind": "box", "mass": 1.0, "center": 0.0, "width": 1.0},
        "record_times": {"start": 1.0, "stop": t_max, "count": 40, "spacing": "log"},
    }


def run(m: float, out: Path, n_cells: int, t_max: float) -> float:
    run_dir = out / f"m{m:g}"
    config_path = out / f"spreading_m{m:g}.json"
    config_path.write_text(json.dumps(spreading_config(m, n_cells, t_max), indent=2))
    code = cli_main(
        ["pme", "--config", str(config_path), "--out", str(run_dir)]
    )
    if code != 0:
        raise SystemExit(code)

    fit_dir = out / f"m{m:g}_fit"
    fit_config = out / f"exponent_m{m:g}.json"
    fit_config.write_text(
        json.dumps(
            {"series": str(run_dir / "diagnostics.csv"), "window": [100.0, t_max]},
            indent=2,
        )
    )
    code = cli_main(["exponent", "--config", str(fit_config), "--out", str(fit_dir)])
    if code != 0:
        raise SystemExit(code)

    with open(fit_dir / "exponent_fit.csv") as handle:
        header = handle.readline().strip().split(",")
        row = handle.readline().strip().split(",")
    return float(row[header.index("slope")])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--m", choices=["3", "5", "both"], default="both")
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--n-cells", type=int, default=4096)
    parser.add_argument("--t-max", type=float, default=1e4)
    args = parser.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    exponents = [3.0, 5.0] if args.m == "both" else [float(args.m)]
    for m in exponents:
        slope = run(m, args.out, args.n_cells, args.t_max)
        expected = 2.0 / (m + 1.0)
        print(f"m={m:g}: sigma(t) slope {slope:.4f} (theory {expected:.4f})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
