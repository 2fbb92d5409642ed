import itertools
import math

import numpy as np
import pytest

from sqakz.core import CouplingSet, SpinField, build_kernel, total_energy
from sqakz.oracle import (
    compare_mcmc_to_exact,
    decode_config,
    enumerate_boltzmann,
    exact_energy_table,
    oracle_energy,
)

from conftest import random_couplings


def _coupling(J, gamma, beta_eff=1.0, alpha=0.0):
    return CouplingSet(J=J, Gamma=0.5, gamma=gamma, beta_eff=beta_eff, alpha=alpha)


class TestEnumerateBoltzmann:
    def test_zero_hamiltonian_is_uniform(self):
        c = _coupling(J=0.0, gamma=0.0)
        k = build_kernel(2, 0.0, 1.0)
        dist = enumerate_boltzmann(2, 2, c, k)
        assert dist.n_states == 16
        np.testing.assert_allclose(dist.probabilities, np.full(16, 1 / 16),
                                   atol=1e-15)

    def test_probabilities_normalized(self):
        c = _coupling(J=0.7, gamma=0.4, alpha=0.6)
        k = build_kernel(3, 0.6, 1.0)
        dist = enumerate_boltzmann(2, 3, c, k)
        assert abs(dist.probabilities.sum() - 1.0) <= 1e-12
        assert abs(dist.defect_marginal.sum() - 1.0) <= 1e-12

    def test_two_by_two_defect_marginal_by_hand(self):
        # independent in-test enumeration over the 16 states of a 2x2 lattice
        J, g = 0.6, 0.35
        c = _coupling(J=J, gamma=g)
        k = build_kernel(2, 0.0, 1.0)
        dist = enumerate_boltzmann(2, 2, c, k)
        weights = {}
        marg = np.zeros(2)
        for s in itertools.product((-1, 1), repeat=4):
            s11, s12, s21, s22 = s
            e = -J * (s11 * s21 + s12 * s22)
            e += -g * 2 * (s11 * s12 + s21 * s22)  # P=2 wrap counts each pair twice
            weights[s] = math.exp(-e)
        Z = sum(weights.values())
        for s, w in weights.items():
            s11, s12, s21, s22 = s
            kinks = [int(s11 != s21), int(s12 != s22)]
            for n in kinks:
                marg[n] += 0.5 * w / Z
        np.testing.assert_allclose(dist.defect_marginal, marg, atol=1e-12)

    def test_bath_reweights_imaginary_time_walls(self):
        c_open = _coupling(J=0.3, gamma=0.2, alpha=0.8)
        c_closed = _coupling(J=0.3, gamma=0.2, alpha=0.0)
        k_open = build_kernel(2, 0.8, 1.0)
        k_zero = build_kernel(2, 0.0, 1.0)
        open_d = enumerate_boltzmann(2, 2, c_open, k_open)
        closed_d = enumerate_boltzmann(2, 2, c_closed, k_zero)
        # the bath term only sees pairs within a site's Trotter column: states
        # whose columns are aligned gain weight, misaligned ones lose it
        for idx in range(16):
            spins = decode_config(idx, 2, 2)
            walls = sum(int(spins[i, 0] != spins[i, 1]) for i in range(2))
            shift = open_d.energies[idx] - closed_d.energies[idx]
            expected = k_open.table[1] * (2 * walls - 2)  # -K per aligned, +K per wall
            assert shift == pytest.approx(expected, rel=1e-12, abs=1e-15)

    def test_strong_couplings_concentrate_on_ferromagnet(self):
        c = _coupling(J=40.0, gamma=40.0)
        k = build_kernel(2, 0.0, 1.0)
        dist = enumerate_boltzmann(2, 2, c, k)
        assert dist.defect_marginal[0] >= 1.0 - 1e-10

    def test_size_cap(self):
        c = _coupling(J=0.5, gamma=0.5)
        with pytest.raises(ValueError):
            enumerate_boltzmann(5, 5, c, build_kernel(5, 0.0, 1.0))


class TestEnergyEquivalence:
    @pytest.mark.parametrize("alpha,literal", [(0.0, False), (0.9, False),
                                               (0.9, True)])
    def test_every_configuration_bit_for_bit(self, alpha, literal):
        # independent naive sum vs the production energy: exact equality
        c = _coupling(J=0.37, gamma=0.81, alpha=alpha)
        k = build_kernel(3, alpha, 1.0)
        for idx, e_oracle, e_core in exact_energy_table(2, 3, c, k, literal):
            assert e_oracle == e_core, f"state {idx}: {e_oracle} != {e_core}"

    def test_random_couplings_bit_for_bit(self, nprng):
        for _ in range(10):
            c = random_couplings(nprng, alpha=0.5)
            k = build_kernel(4, 0.5, 1.0)
            spins = nprng.choice(np.array([-1, 1], dtype=np.int8), size=(3, 4))
            assert oracle_energy(spins, c, k) == total_energy(SpinField(spins.copy()), c, k)


class TestCompareMcmcToExact:
    def test_uniform_target_converges(self):
        c = _coupling(J=0.0, gamma=0.0)
        k = build_kernel(2, 0.0, 1.0)
        l1 = compare_mcmc_to_exact(2, 2, c, k, sweeps=50_000, seed=3)
        assert l1 < 0.01

    def test_moderate_couplings_short_run(self):
        gamma = -0.5 * math.log(math.tanh(0.5))
        c = CouplingSet(J=0.5, Gamma=0.5, gamma=gamma, beta_eff=1.0)
        k = build_kernel(4, 0.0, 1.0)
        l1 = compare_mcmc_to_exact(2, 4, c, k, sweeps=100_000, seed=11)
        assert l1 < 0.03  # the full-budget 1e6-sweep check lives in acceptance

    def test_bath_path_short_run(self):
        gamma = -0.5 * math.log(math.tanh(0.5))
        c = CouplingSet(J=0.5, Gamma=0.5, gamma=gamma, beta_eff=1.0, alpha=0.6)
        k = build_kernel(4, 0.6, 1.0)
        l1 = compare_mcmc_to_exact(2, 4, c, k, sweeps=100_000, seed=11)
        assert l1 < 0.03

    def test_defect_marginal_mode(self):
        gamma = -0.5 * math.log(math.tanh(0.5))
        c = CouplingSet(J=0.5, Gamma=0.5, gamma=gamma, beta_eff=1.0)
        k = build_kernel(4, 0.0, 1.0)
        l1 = compare_mcmc_to_exact(2, 4, c, k, sweeps=50_000, seed=2,
                                   mode="defects")
        assert l1 < 0.02

    def test_deterministic(self):
        c = _coupling(J=0.5, gamma=0.4)
        k = build_kernel(2, 0.0, 1.0)
        a = compare_mcmc_to_exact(2, 2, c, k, sweeps=10_000, seed=5)
        b = compare_mcmc_to_exact(2, 2, c, k, sweeps=10_000, seed=5)
        assert a == b

    def test_unknown_mode(self):
        c = _coupling(J=0.5, gamma=0.4)
        with pytest.raises(ValueError):
            compare_mcmc_to_exact(2, 2, c, build_kernel(2, 0.0, 1.0),
                                  sweeps=10, seed=0, mode="energy")
