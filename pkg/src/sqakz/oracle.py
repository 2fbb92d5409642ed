"""Brute-force ground truth for small lattices; test-time only.

The energy sum here is written out naively and independently of the
production code (`_engine._total_energy`) so the two cannot share a bug;
it follows the same documented term order, which lets the suite compare
them exactly.  Configurations are encoded as integers: bit (i*P + tau) set
means spin (i, tau) is +1, matching the frozen-coupling sampler.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _engine
from .core import BathKernel, CouplingSet, SpinField, _trotter_limit
from .analysis import l1_distance
from .rng import mix64

MAX_ENUM_SPINS = 24  # 2^24 states; practical sizes are much smaller


def decode_config(index: int, L: int, P: int) -> np.ndarray:
    spins = np.empty((L, P), dtype=np.int8)
    for i in range(L):
        for tau in range(P):
            spins[i, tau] = 1 if (index >> (i * P + tau)) & 1 else -1
    return spins


def oracle_energy(spins: np.ndarray, c: CouplingSet, k: BathKernel,
                  literal_eq6_bounds: bool = False) -> float:
    """Naive re-implementation of the three-term energy sum."""
    L, P = spins.shape
    tlim = _trotter_limit(L, literal_eq6_bounds)
    ge = c.gamma / c.beta_eff
    e = 0.0
    for i in range(L - 1):
        for tau in range(P):
            e -= c.J * float(spins[i, tau]) * float(spins[i + 1, tau])
    for i in range(tlim):
        for tau in range(P):
            tp = tau + 1
            if tp == P:
                tp = 0
            e -= ge * float(spins[i, tau]) * float(spins[i, tp])
    if k.alpha > 0.0:
        for i in range(tlim):
            for tau in range(P):
                for tq in range(tau):
                    e -= k.table[tau - tq] * float(spins[i, tau]) * float(spins[i, tq])
    return e


@dataclass
class ExactDistribution:
    """Exact Boltzmann weights of every configuration of a small lattice.

    The free-boson prefactor of the partition function cancels in every
    expectation and is omitted.  `defect_marginal[n]` pools slices: it is
    the probability that a uniformly chosen slice carries n kinks.
    """

    L: int
    P: int
    couplings: CouplingSet
    probabilities: np.ndarray
    energies: np.ndarray
    defect_marginal: np.ndarray

    @property
    def n_states(self) -> int:
        return self.probabilities.size


def enumerate_boltzmann(L: int, P: int, c: CouplingSet, k: BathKernel,
                        literal_eq6_bounds: bool = False) -> ExactDistribution:
    """Exact distribution exp(-beta_eff * H) / Z over all 2^(L*P) states."""
    n_spins = L * P
    if n_spins > MAX_ENUM_SPINS:
        raise ValueError(f"L*P = {n_spins} exceeds enumeration cap {MAX_ENUM_SPINS}")
    if k.P != P:
        raise ValueError("kernel P does not match")
    n_states = 1 << n_spins
    energies = np.empty(n_states)
    marg_w = np.zeros((n_states, L))
    for idx in range(n_states):
        spins = decode_config(idx, L, P)
        energies[idx] = oracle_energy(spins, c, k, literal_eq6_bounds)
        for tau in range(P):
            kinks = 0
            for i in range(L - 1):
                if spins[i, tau] != spins[i + 1, tau]:
                    kinks += 1
            marg_w[idx, kinks] += 1.0 / P
    logw = -c.beta_eff * energies
    logw -= logw.max()  # overflow guard; cancels in the normalization
    w = np.exp(logw)
    probs = w / w.sum()
    defect_marginal = probs @ marg_w
    return ExactDistribution(L=L, P=P, couplings=c, probabilities=probs,
                             energies=energies, defect_marginal=defect_marginal)


def compare_mcmc_to_exact(L: int, P: int, c: CouplingSet, k: BathKernel,
                          sweeps: int, seed: int, exact: ExactDistribution | None = None,
                          mode: str = "config", burn_in: int = 0,
                          literal_eq6_bounds: bool = False) -> float:
    """L1 distance between frozen-coupling Metropolis occupancy and the truth.

    mode "config" accumulates the visited configuration after every attempt
    (dwell-time estimate of the stationary distribution); mode "defects"
    records the pooled per-slice kink histogram once per sweep.
    """
    if exact is None:
        exact = enumerate_boltzmann(L, P, c, k, literal_eq6_bounds)
    if exact.L != L or exact.P != P:
        raise ValueError("exact distribution dimensions do not match")
    use_bath = k.alpha > 0.0
    tlim = _trotter_limit(L, literal_eq6_bounds)
    ge = c.gamma / c.beta_eff
    st = np.empty(1, dtype=np.uint64)
    st[0] = np.uint64(mix64(seed))
    spins = np.empty((L, P), dtype=np.int8)
    _engine._init_spins(spins, st, True)
    bath = np.zeros((L, P) if use_bath else (1, 1), dtype=np.float64)
    if use_bath:
        _engine._bath_field_from_scratch(spins, k.table, bath)
    if mode == "config":
        counts = np.zeros(1 << (L * P), dtype=np.int64)
        _engine._sample_frozen_config(spins, bath, k.table, st, c.J, ge,
                                      c.beta_eff, use_bath, tlim, sweeps,
                                      burn_in, counts)
        return l1_distance(counts / counts.sum(), exact.probabilities)
    if mode == "defects":
        counts = np.zeros(L, dtype=np.int64)
        _engine._sample_frozen_defects(spins, bath, k.table, st, c.J, ge,
                                       c.beta_eff, use_bath, tlim, sweeps,
                                       burn_in, counts)
        return l1_distance(counts / counts.sum(), exact.defect_marginal)
    raise ValueError(f"unknown mode {mode!r}")


def exact_energy_table(L: int, P: int, c: CouplingSet, k: BathKernel,
                       literal_eq6_bounds: bool = False):
    """(config index, oracle energy, core energy) triples for every state."""
    n_states = 1 << (L * P)
    if L * P > MAX_ENUM_SPINS:
        raise ValueError("size cap exceeded")
    from .core import total_energy
    rows = []
    for idx in range(n_states):
        spins = decode_config(idx, L, P)
        e_oracle = oracle_energy(spins, c, k, literal_eq6_bounds)
        e_core = total_energy(SpinField(spins.copy()), c, k, literal_eq6_bounds)
        rows.append((idx, e_oracle, e_core))
    return rows
