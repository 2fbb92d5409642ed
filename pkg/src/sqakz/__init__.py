"""Simulated quantum annealing of the 1D transverse-field Ising chain.

Path-integral Monte Carlo with time-swept couplings on the Trotterized
effective lattice, optional Ohmic-bath long-range kernel, and the analysis
stack (defect histograms, cumulants, Gaussian/Boltzmann models, power-law
fits) for testing Kibble-Zurek defect statistics.
"""

__version__ = "0.1.0"

from .core import (
    BathKernel,
    CouplingSet,
    ScheduleParams,
    SpinField,
    apply_flip,
    build_kernel,
    delta_energy,
    schedule_at,
    total_energy,
)
from .annealer import (
    AnnealConfig,
    ReplicaResult,
    anneal_run,
    metropolis_attempt,
    replica_seeds,
    run_replica_batch,
    sweep,
)
from .observables import (
    DefectHistogram,
    ResidualEnergySeries,
    collect_histogram,
    defects_per_slice,
    residual_energy,
    slice_defect_counts,
    summed_bond_misalignment,
    total_defect_count,
)
from .analysis import (
    CumulantRatioFit,
    CumulantSet,
    FitResult,
    boltzmann_distribution,
    boltzmann_pmf,
    cumulant_ratio_fit,
    cumulants,
    fit_beta_bl,
    fit_power_law,
    gaussian_pmf,
    kz_exponent,
    l1_distance,
    proportionality_fit,
)
from .oracle import (
    ExactDistribution,
    compare_mcmc_to_exact,
    enumerate_boltzmann,
    oracle_energy,
)
from .runner import (
    ConfigError,
    ExperimentSpec,
    RunManifest,
    merge_results,
    run_experiment,
)
from .rng import SplitMix64, mix_seed

__all__ = [name for name in dir() if not name.startswith("_")]
