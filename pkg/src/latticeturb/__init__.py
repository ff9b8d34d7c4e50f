"""Wave turbulence on a disordered 1D lattice.

Pipeline: disordered Hamiltonians and their localized eigenbasis, the
four-mode interaction kernel, direct field evolution with ensemble transfer
rates, a kinetic collision solver on the kernel, and the degenerate
diffusion (porous-medium) limit with its self-similar spreading laws and
nonlinear Ohm steady states. The `latticeturb` executable exposes each
stage as a subcommand; see the README for config schemas and CSV formats.
"""

from ._version import __version__
from .analysis import (
    ExponentFit,
    RunManifest,
    build_manifest,
    file_digest,
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
    EnsembleRates,
    FieldState,
    InitialSpec,
    ModeState,
    TimeWindow,
    ensemble_intensity_rate,
    evolve_field,
    first_order_check,
    initial_mode_amplitudes,
    intermediate_time_window,
    mode_intensities,
    phase_integral,
    project_amplitudes,
    synthesize_field,
)
from .eigen import (
    EigenBasis,
    LocalizationReport,
    localization_report,
    participation_ratio,
    solve_eigen,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    IntegrityError,
    LatticeTurbError,
    NumericalError,
    StepSizeError,
)
from .kernel import (
    BroadeningSpec,
    KernelTable,
    RenormalizedEnergies,
    broadened_delta,
    diffusion_coefficient,
    kernel_table,
    nonlinear_shift,
    overlap_coefficient,
    symmetrize_kernel_values,
)
from .kinetic import (
    ClipLog,
    KineticRun,
    SpectrumField,
    collision_rhs,
    collision_scale,
    evolve_kinetic,
    step_kinetic,
)
from .lattice import (
    Boundary,
    DisorderRealization,
    HamiltonianMatrix,
    LatticeConfig,
    build_hamiltonian,
    sample_disorder,
)
from .pme import (
    OhmSolution,
    PMEConfig,
    PMERun,
    SelfSimilarFit,
    barenblatt_field,
    barenblatt_front_for_mass,
    barenblatt_mass,
    barenblatt_profile,
    box_initial,
    cfl_limit,
    evolve_pme,
    fit_self_similar,
    front_position,
    ohm_sweep,
    ohm_voltage,
    pme_step,
    predicted_spreading_exponent,
    relax_to_steady_state,
    steady_state_profile,
)
from .rng import DISORDER_STREAM, PHASE_STREAM, check_seed, make_rng

__all__ = [
    "__version__",
    # lattice
    "Boundary",
    "LatticeConfig",
    "DisorderRealization",
    "HamiltonianMatrix",
    "sample_disorder",
    "build_hamiltonian",
    # eigen
    "EigenBasis",
    "LocalizationReport",
    "solve_eigen",
    "participation_ratio",
    "localization_report",
    # kernel
    "BroadeningSpec",
    "KernelTable",
    "RenormalizedEnergies",
    "overlap_coefficient",
    "nonlinear_shift",
    "broadened_delta",
    "kernel_table",
    "symmetrize_kernel_values",
    "diffusion_coefficient",
    # dynamics
    "FieldState",
    "ModeState",
    "InitialSpec",
    "TimeWindow",
    "EnsembleRates",
    "evolve_field",
    "project_amplitudes",
    "synthesize_field",
    "mode_intensities",
    "phase_integral",
    "first_order_check",
    "intermediate_time_window",
    "initial_mode_amplitudes",
    "ensemble_intensity_rate",
    # kinetic
    "SpectrumField",
    "KineticRun",
    "ClipLog",
    "collision_rhs",
    "collision_scale",
    "step_kinetic",
    "evolve_kinetic",
    # pme
    "PMEConfig",
    "PMERun",
    "OhmSolution",
    "SelfSimilarFit",
    "pme_step",
    "cfl_limit",
    "evolve_pme",
    "box_initial",
    "front_position",
    "barenblatt_profile",
    "barenblatt_mass",
    "barenblatt_front_for_mass",
    "barenblatt_field",
    "predicted_spreading_exponent",
    "steady_state_profile",
    "ohm_voltage",
    "relax_to_steady_state",
    "ohm_sweep",
    "fit_self_similar",
    # analysis
    "ExponentFit",
    "RunManifest",
    "second_moment",
    "fit_power_law",
    "self_similar_collapse",
    "write_csv",
    "read_csv",
    "file_digest",
    "build_manifest",
    "write_manifest",
    "load_manifest",
    "verify_manifest",
    "write_kernel_table",
    "load_kernel_table",
    # errors
    "LatticeTurbError",
    "ConfigError",
    "IntegrityError",
    "DomainError",
    "NumericalError",
    "StepSizeError",
    "DivergenceError",
    "ConvergenceError",
    # rng
    "DISORDER_STREAM",
    "PHASE_STREAM",
    "check_seed",
    "make_rng",
]
