"""Command-line pipeline: one executable, one subcommand per stage.

    latticeturb SUBCOMMAND [--config FILE] [--set key=value ...]
                [--out DIR] [--threads N] [--seed N]

Subcommands: eigen, kernel, micro, kinetic, pme, ohm, exponent. Every run
writes its datasets plus a manifest.json into the output directory, taken
from --out, the config's "out" key, or $LATTICETURB_OUT/<subcommand>, in
that order. Identical configs and seeds give byte-identical datasets; the
worker count is recorded but never influences the numbers. Exit codes:
0 success, 2 configuration or data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfg
from ._version import __version__
from .analysis import (
    MANIFEST_NAME,
    build_manifest,
    fit_power_law,
    load_kernel_table,
    load_manifest,
    read_csv,
    second_moment,
    self_similar_collapse,
    verify_manifest,
    write_csv,
    write_kernel_table,
    write_manifest,
)
from .dynamics import (
    FieldState,
    ensemble_intensity_rate,
    evolve_field,
    initial_mode_amplitudes,
    project_amplitudes,
)
from .eigen import localization_report, solve_eigen
from .errors import ConfigError, DomainError, NumericalError
from .kernel import kernel_table
from .kinetic import SpectrumField, evolve_kinetic
from .lattice import build_hamiltonian, sample_disorder
from .pme import (
    barenblatt_field,
    box_initial,
    evolve_pme,
    front_position,
    ohm_sweep,
)

__all__ = ["main", "run"]


def _resolve_out(subcommand: str, flag_value: str | None, config_value: str | None) -> Path:
    if flag_value is not None:
        return Path(flag_value)
    if config_value is not None:
        return Path(config_value)
    root = os.environ.get("LATTICETURB_OUT")
    if root:
        return Path(root) / subcommand
    raise ConfigError(
        "no output directory: pass --out, set the config key 'out', "
        "or export LATTICETURB_OUT"
    )


def _apply_seed_flag(subcommand: str, doc: dict, seed: int) -> None:
    """--seed N rebases whatever seed material the subcommand consumes."""
    if subcommand == "eigen" or (subcommand == "micro" and doc.get("task") == "trajectory"):
        doc["seed"] = seed
        return
    if subcommand in ("kernel", "micro"):
        current = doc.get("seeds")
        if isinstance(current, dict):
            current = dict(current)
            current["base"] = seed
            doc["seeds"] = current
        elif isinstance(current, list):
            doc["seeds"] = {"base": seed, "count": len(current)}
        else:
            doc["seeds"] = {"base": seed, "count": 1}
        return
    raise ConfigError(f"subcommand {subcommand!r} is deterministic and takes no --seed")


def _run_eigen(job: cfg.EigenJob, out_dir: Path, workers: int) -> tuple[list[Path], list[Path], tuple[int, ...]]:
    disorder = sample_disorder(job.lattice, job.seed)
    basis = solve_eigen(build_hamiltonian(job.lattice, disorder))
    report = localization_report(basis)
    n_modes, n_sites = basis.modes.shape

    outputs = [
        write_csv(
            out_dir / "energies.csv",
            {
                "mode_index": np.arange(n_modes),
                "energy": basis.energies,
                "center_site": basis.center_of_mode,
                "participation_ratio": report.participation_ratios,
            },
        ),
        write_csv(
            out_dir / "modes.csv",
            {
                "mode_index": np.repeat(np.arange(n_modes), n_sites),
                "site_index": np.tile(np.arange(n_sites), n_modes),
                "amplitude": basis.modes.ravel(),
            },
        ),
        write_csv(
            out_dir / "disorder.csv",
            {
                "site_index": np.arange(n_sites),
                "potential": disorder.potential,
            },
        ),
    ]
    return outputs, [], (job.seed,)


def _run_kernel(job: cfg.KernelJob, out_dir: Path, workers: int):
    table = kernel_table(
        job.lattice,
        job.epsilon,
        job.broadening,
        job.cutoff,
        job.seeds,
        workers=workers,
        enforce_min_size=job.enforce_min_size,
    )
    if job.symmetrize:
        table = table.symmetrize()
    csv_path, meta_path = write_kernel_table(out_dir, table)
    return [csv_path, meta_path], [], job.seeds


def _run_micro(job, out_dir: Path, workers: int):
    if isinstance(job, cfg.TrajectoryJob):
        return _run_trajectory(job, out_dir)
    rates = ensemble_intensity_rate(
        job.lattice,
        job.epsilon,
        job.initial,
        job.seeds,
        job.horizon,
        job.dt,
        draws_per_seed=job.draws_per_seed,
        workers=workers,
    )
    outputs = [
        write_csv(
            out_dir / "ensemble_rates.csv",
            {
                "mode_index": np.arange(rates.rates.shape[0]),
                "mean_rate": rates.rates,
                "std_error": rates.std_error,
            },
        )
    ]
    return outputs, [], job.seeds


def _run_trajectory(job: cfg.TrajectoryJob, out_dir: Path):
    disorder = sample_disorder(job.lattice, job.seed)
    basis = solve_eigen(build_hamiltonian(job.lattice, disorder))
    a0 = initial_mode_amplitudes(job.initial, basis, job.seed, draws=1)[:, 0]
    state = FieldState(psi=basis.modes.T @ a0, time=0.0)

    n_records = job.n_steps // job.record_every
    times = [0.0]
    mode_rows = [project_amplitudes(state, basis).intensities]
    site_rows = [np.abs(state.psi) ** 2]
    for _ in range(n_records):
        state = evolve_field(state, basis, disorder, job.epsilon, job.dt, job.record_every)
        times.append(state.time)
        mode_rows.append(project_amplitudes(state, basis).intensities)
        site_rows.append(np.abs(state.psi) ** 2)

    n_modes, n_sites = basis.modes.shape
    times_arr = np.asarray(times)
    outputs = [
        write_csv(
            out_dir / "trajectory_modes.csv",
            {
                "time": np.repeat(times_arr, n_modes),
                "index": np.tile(np.arange(n_modes), len(times)),
                "intensity": np.concatenate(mode_rows),
            },
        ),
        write_csv(
            out_dir / "trajectory_sites.csv",
            {
                "time": np.repeat(times_arr, n_sites),
                "index": np.tile(np.arange(n_sites), len(times)),
                "intensity": np.concatenate(site_rows),
            },
        ),
    ]
    return outputs, [], (job.seed,)


def _run_kinetic(job: cfg.KineticJob, out_dir: Path, workers: int):
    kernel_dir = job.kernel_dir
    manifest_path = kernel_dir / MANIFEST_NAME
    if manifest_path.is_file():
        verify_manifest(load_manifest(manifest_path), kernel_dir)
    kernel = load_kernel_table(kernel_dir)
    inputs = [kernel_dir / "kernel.csv", kernel_dir / "kernel_meta.json"]

    spectrum = SpectrumField.on_lattice(job.initial.envelope(job.n_points))
    center = 0.0
    if spectrum.mass > 0:
        center = float(np.sum(spectrum.coords * spectrum.values) / np.sum(spectrum.values))
    run = evolve_kinetic(spectrum, kernel, job.dt, job.record_times)

    n = spectrum.n_points
    outputs = [
        write_csv(
            out_dir / "kinetic_series.csv",
            {
                "time": np.repeat(run.times, n),
                "mode_index": np.tile(np.arange(n), run.times.shape[0]),
                "n": np.concatenate([s.values for s in run.snapshots]),
            },
        ),
        write_csv(
            out_dir / "kinetic_summary.csv",
            {
                "time": run.times,
                "total_mass": [s.mass for s in run.snapshots],
                "sigma": [second_moment(s, center=center) for s in run.snapshots],
            },
        ),
    ]
    return outputs, inputs, kernel.seeds


def _run_pme(job: cfg.PMEJob, out_dir: Path, workers: int):
    if len(job.record_times) < 2:
        raise ConfigError("pme runs need at least 2 record_times for the collapse check")
    if job.initial_kind == "box":
        field = box_initial(job.pme, mass=job.mass, center=job.center, width=job.width)
    else:
        field = barenblatt_field(job.pme.m, job.mass, job.t0, job.pme.cell_centers())
    run = evolve_pme(field, job.pme, job.record_times, safety=job.safety)

    center = job.center
    diag_rows = {
        "t": run.times,
        "mass": [s.mass for s in run.snapshots],
        "sigma": [second_moment(s, center=center) for s in run.snapshots],
        "front_position": [front_position(s, center=center) for s in run.snapshots],
    }
    k = field.coords
    profile_time = np.repeat(run.times, field.n_points)
    profile_k = np.tile(k, run.times.shape[0])
    profile_n = np.concatenate([s.values for s in run.snapshots])

    positive = [(job.t0 + t, s) for t, s in zip(run.times, run.snapshots) if job.t0 + t > 0]
    collapse = self_similar_collapse(positive, job.pme.m)

    outputs = [
        write_csv(out_dir / "diagnostics.csv", diag_rows),
        write_csv(
            out_dir / "profiles.csv",
            {"time": profile_time, "k": profile_k, "N": profile_n},
        ),
        write_csv(
            out_dir / "final_profile.csv",
            {"k": k, "N": run.snapshots[-1].values},
        ),
        write_csv(
            out_dir / "collapse.csv",
            {
                "m": [job.pme.m],
                "collapse_error": [collapse],
                "t_first": [positive[0][0]],
                "t_last": [positive[-1][0]],
            },
        ),
    ]
    return outputs, [], ()


def _run_ohm(job: cfg.OhmJob, out_dir: Path, workers: int):
    results = ohm_sweep(job.pme, job.n_left_values, job.electrode_at)
    outputs = [
        write_csv(
            out_dir / "ohm_sweep.csv",
            {
                "n_left": [n for n, _ in results],
                "j": [sol.J for _, sol in results],
                "v": [sol.V for _, sol in results],
            },
        )
    ]
    return outputs, [], ()


def _run_exponent(job: cfg.ExponentJob, out_dir: Path, workers: int):
    if not job.series.is_file():
        raise ConfigError(f"series file {job.series} does not exist")
    cols = read_csv(job.series)
    for name in (job.x_column, job.y_column):
        if name not in cols:
            raise ConfigError(
                f"series file {job.series} has no column {name!r}; found {sorted(cols)}"
            )
    x = cols[job.x_column]
    y = cols[job.y_column]
    keep = x > 0
    fit = fit_power_law(x[keep], y[keep], window=job.window)
    outputs = [
        write_csv(
            out_dir / "exponent_fit.csv",
            {
                "slope": [fit.slope],
                "intercept": [fit.intercept],
                "stderr": [fit.stderr],
                "t_lo": [fit.window[0]],
                "t_hi": [fit.window[1]],
            },
        )
    ]
    return outputs, [job.series], ()


_RUNNERS = {
    "eigen": _run_eigen,
    "kernel": _run_kernel,
    "micro": _run_micro,
    "kinetic": _run_kinetic,
    "pme": _run_pme,
    "ohm": _run_ohm,
    "exponent": _run_exponent,
}


def run(
    subcommand: str,
    config_path: str | None = None,
    overrides=(),
    *,
    out: str | None = None,
    threads: int | None = None,
    seed: int | None = None,
) -> int:
    """Execute one subcommand; returns the process exit code."""
    try:
        if subcommand not in cfg.SUBCOMMANDS:
            raise ConfigError(
                f"unknown subcommand {subcommand!r}; expected one of {', '.join(cfg.SUBCOMMANDS)}"
            )
        doc = cfg.load_config_file(config_path) if config_path else {}
        doc = cfg.apply_overrides(doc, overrides)
        if seed is not None:
            _apply_seed_flag(subcommand, doc, seed)
        if threads is not None:
            if threads < 1:
                raise ConfigError(f"--threads must be >= 1, got {threads}")
            doc["workers"] = threads

        config_out, workers = cfg.parse_common(doc)
        out_dir = _resolve_out(subcommand, out, config_out)
        resolved_workers = workers if workers is not None else (os.cpu_count() or 1)
        job = cfg.parse_job(subcommand, doc)

        out_dir.mkdir(parents=True, exist_ok=True)
        outputs, inputs, seeds = _RUNNERS[subcommand](job, out_dir, resolved_workers)

        parameters = dict(doc)
        parameters["subcommand"] = subcommand
        parameters["workers"] = resolved_workers
        manifest = build_manifest(parameters, seeds, outputs, out_dir, inputs)
        write_manifest(out_dir / MANIFEST_NAME, manifest)
    except NumericalError as exc:
        print(f"latticeturb {subcommand}: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, DomainError) as exc:
        print(f"latticeturb {subcommand}: {exc}", file=sys.stderr)
        return 2
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latticeturb",
        description="Wave-turbulence pipeline on a disordered lattice.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("subcommand", choices=cfg.SUBCOMMANDS)
    parser.add_argument("--config", metavar="PATH", default=None, help="JSON config file")
    parser.add_argument(
        "--set",
        metavar="KEY=VALUE",
        action="append",
        default=[],
        dest="overrides",
        help="dotted config override, value parsed as a JSON literal (repeatable)",
    )
    parser.add_argument("--out", metavar="DIR", default=None, help="output directory")
    parser.add_argument("--threads", metavar="N", type=int, default=None, help="worker count")
    parser.add_argument("--seed", metavar="N", type=int, default=None, help="rebase run seeds")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    return run(
        args.subcommand,
        config_path=args.config,
        overrides=args.overrides,
        out=args.out,
        threads=args.threads,
        seed=args.seed,
    )


if __name__ == "__main__":
    sys.exit(main())
