"""Defect (kink) counts, residual energy, and histogram aggregation.

A defect is an anti-aligned nearest-neighbor pair within one Trotter slice;
the per-slice count n(tau) is an integer in [0, L-1].  The residual energy
per site is 2/(L*P) times the total kink count, i.e. the slice-averaged
defect density rescaled by 2/L.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .annealer import ReplicaResult
from .core import SpinField


def slice_defect_counts(spins: np.ndarray) -> np.ndarray:
    """Per-slice kink counts for an L x P array; returns length-P integers."""
    broken = spins[:-1, :] != spins[1:, :]
    return broken.sum(axis=0).astype(np.int64)


def defects_per_slice(field: SpinField, tau: int) -> int:
    """Number of anti-aligned nearest-neighbor pairs in slice tau."""
    if not (0 <= tau < field.P):
        raise IndexError(f"slice {tau} outside [0, {field.P})")
    col = field.spins[:, tau]
    return int(np.count_nonzero(col[:-1] != col[1:]))


def total_defect_count(field: SpinField) -> int:
    """Kinks summed over all slices."""
    return int(slice_defect_counts(field.spins).sum())


def summed_bond_misalignment(field: SpinField) -> int:
    """Sum over all slices and spatial bonds of (1 - S_i S_{i+1}).

    Each kink contributes 2, so this equals twice the total kink count; kept
    for completeness next to the per-slice integer counts used everywhere
    else.
    """
    return 2 * total_defect_count(field)


def residual_energy(field: SpinField) -> float:
    """Residual energy per site, in [0, 2(L-1)/L].

    Equals (1/L) sum_i (1 - (1/P) sum_tau S_i(tau) S_{i+1}(tau)), computed
    exactly as 2 * total kinks / (L * P).
    """
    return 2.0 * total_defect_count(field) / (field.L * field.P)


@dataclass
class DefectHistogram:
    """Empirical distribution of integer per-slice kink counts.

    counts[n] is the number of observations with n kinks, n = 0..L-1.
    `obs_by_replica` keeps the per-replica observations when known, which is
    what replica-level bootstrap resampling needs; histograms loaded from
    aggregate files carry counts only.
    """

    L: int
    counts: np.ndarray
    provenance: str = "aggregate"
    obs_by_replica: list[np.ndarray] | None = None

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.shape != (self.L,):
            raise ValueError("counts must have length L")
        if self.counts.min() < 0:
            raise ValueError("counts must be nonnegative")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def pmf(self) -> np.ndarray:
        if self.total == 0:
            raise ValueError("empty histogram")
        return self.counts / self.total

    def mean(self) -> float:
        return float(np.arange(self.L) @ self.counts / self.total)

    @classmethod
    def from_observations(cls, L: int, obs_by_replica: list[np.ndarray],
                          provenance: str = "aggregate") -> "DefectHistogram":
        obs_by_replica = [np.asarray(o, dtype=np.int64) for o in obs_by_replica]
        counts = np.zeros(L, dtype=np.int64)
        for obs in obs_by_replica:
            if obs.size and (obs.min() < 0 or obs.max() > L - 1):
                raise ValueError("observation outside [0, L-1]")
            counts += np.bincount(obs, minlength=L)
        return cls(L=L, counts=counts, provenance=provenance,
                   obs_by_replica=obs_by_replica)


def collect_histogram(results: list[ReplicaResult], mode: str = "all_slices",
                      slice_index: int = 0) -> DefectHistogram:
    """Pool per-slice kink counts from finished replicas.

    all_slices (default): every (replica, slice) pair is one observation.
    single_slice: only `slice_index` of each replica contributes.
    """
    if not results:
        raise ValueError("no results to aggregate")
    L, P = results[0].final_field.L, results[0].final_field.P
    for r in results:
        if r.final_field.L != L or r.final_field.P != P:
            raise ValueError("mixed lattice dimensions in results")
    if mode not in ("all_slices", "single_slice"):
        raise ValueError(f"unknown histogram mode {mode!r}")
    obs = []
    for r in results:
        per_slice = slice_defect_counts(r.final_field.spins)
        if mode == "all_slices":
            obs.append(per_slice)
        else:
            obs.append(per_slice[slice_index:slice_index + 1])
    tag = mode if mode == "all_slices" else f"single_slice[{slice_index + 1}]"
    return DefectHistogram.from_observations(L, obs, provenance=tag)


@dataclass
class ResidualEnergySeries:
    """Mean residual energy vs annealing time with standard errors."""

    ta: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    n_samples: np.ndarray

    @classmethod
    def from_samples(cls, samples_by_ta: dict[int, np.ndarray]) -> "ResidualEnergySeries":
        """samples_by_ta maps ta -> per-replica residual energies (>= 2 each)."""
        ta = np.array(sorted(samples_by_ta), dtype=np.int64)
        mean = np.empty(ta.size)
        stderr = np.empty(ta.size)
        n = np.empty(ta.size, dtype=np.int64)
        for j, t in enumerate(ta):
            vals = np.asarray(samples_by_ta[int(t)], dtype=np.float64)
            if vals.size < 2:
                raise ValueError("standard error needs >= 2 samples per point")
            mean[j] = vals.mean()
            stderr[j] = vals.std(ddof=1) / np.sqrt(vals.size)
            n[j] = vals.size
        return cls(ta=ta, mean=mean, stderr=stderr, n_samples=n)

    def __iter__(self):
        return iter(zip(self.ta, self.mean, self.stderr, self.n_samples))
