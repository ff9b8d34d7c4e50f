#!/usr/bin/env python3
"""Compare ensemble-measured intensity rates against the collision operator.

Builds a disorder-averaged kernel and a matched micro ensemble over the
same seeds and horizon, then writes a per-mode comparison table. Modes
whose predicted rate clears five times its standard error are the ones
the agreement claim is judged on.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from latticeturb import (
    InitialSpec,
    LatticeConfig,
    SpectrumField,
    build_hamiltonian,
    collision_rhs,
    intermediate_time_window,
    sample_disorder,
    solve_eigen,
)
from latticeturb.analysis import load_kernel_table, read_csv, write_csv
from latticeturb.cli import main as cli_main


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, required=True)
    parser.add_argument("--n-sites", type=int, default=64)
    parser.add_argument("--disorder", type=float, default=2.0)
    parser.add_argument("--epsilon", type=float, default=0.05)
    parser.add_argument("--n-seeds", type=int, default=512)
    parser.add_argument("--cutoff", type=int, default=26)
    parser.add_argument("--width", type=float, default=8.0)
    parser.add_argument("--workers", type=int, default=1)
    args = parser.parse_args(argv)

    args.out.mkdir(parents=True, exist_ok=True)
    lattice = {"n_sites": args.n_sites, "disorder_strength": args.disorder}
    config = LatticeConfig(n_sites=args.n_sites, disorder_strength=args.disorder)
    init = InitialSpec(
        kind="gaussian_modes",
        center=args.n_sites / 2.0,
        width=args.width,
        amplitude=1.0,
    )
    initial = {
        "kind": "gaussian_modes",
        "center": args.n_sites / 2.0,
        "width": args.width,
        "amplitude": 1.0,
    }

    # shared horizon: midpoint of the first realization's validity window
    basis = solve_eigen(build_hamiltonian(config, sample_disorder(config, 0)))
    horizon = intermediate_time_window(basis, args.epsilon).midpoint
    print(f"horizon {horizon:.2f}")

    kernel_dir = args.out / "kernel"
    kernel_config = args.out / "kernel.json"
    kernel_config.write_text(
        json.dumps(
            {
                "lattice": lattice,
                "epsilon": args.epsilon,
                "broadening": {"kind": "fejer", "horizon": horizon},
                "cutoff": args.cutoff,
                "seeds": {"base": 0, "count": args.n_seeds},
                "symmetrize": True,
                # the comparison lattice is far smaller than 10x cutoff
                "enforce_min_size": False,
                "workers": args.workers,
            },
            indent=2,
        )
    )
    code = cli_main(["kernel", "--config", str(kernel_config), "--out", str(kernel_dir)])
    if code != 0:
        return code

    micro_dir = args.out / "micro"
    micro_config = args.out / "micro.json"
    micro_config.write_text(
        json.dumps(
            {
                "task": "ensemble",
                "lattice": lattice,
                "epsilon": args.epsilon,
                "initial": initial,
                "seeds": {"base": 0, "count": args.n_seeds},
                "horizon": horizon,
                "dt": 0.05,
                "draws_per_seed": 1,
                "workers": args.workers,
            },
            indent=2,
        )
    )
    code = cli_main(["micro", "--config", str(micro_config), "--out", str(micro_dir)])
    if code != 0:
        return code

    table = load_kernel_table(kernel_dir)
    envelope = init.envelope(args.n_sites)
    predicted = collision_rhs(
        SpectrumField(values=envelope, coords=np.arange(args.n_sites, dtype=float)),
        table,
    )
    rates = read_csv(micro_dir / "ensemble_rates.csv")
    measured = np.asarray(rates["mean_rate"], dtype=float)
    se = np.asarray(rates["std_error"], dtype=float)

    comparison = write_csv(
        args.out / "comparison.csv",
        {
            "mode_index": np.arange(args.n_sites),
            "predicted_rate": predicted,
            "measured_rate": measured,
            "std_error": se,
            "reportable": (np.abs(predicted) > 5.0 * se).astype(int),
        },
    )
    reportable = np.abs(predicted) > 5.0 * se
    print(f"comparison written to {comparison}")
    print(f"{int(reportable.sum())} of {args.n_sites} modes clear the 5*SE bar")
    if reportable.any():
        z = np.abs(measured - predicted)[reportable] / se[reportable]
        print(f"max |measured - predicted| / SE on them: {z.max():.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
