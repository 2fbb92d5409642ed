import math

import numpy as np
import pytest

from sqakz.core import (
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

from conftest import random_couplings, random_field


# ---------------------------------------------------------------------------
# schedules

class TestScheduleAt:
    def test_start_of_ramp(self):
        c = schedule_at(0, ScheduleParams(ta=128, beta_eff=1.0))
        assert c.J == 0.0
        assert c.Gamma == 1.0
        # frozen from -0.5*log(tanh(1.0))
        assert c.gamma == pytest.approx(0.1361707344559158, rel=1e-12)

    def test_midpoint(self):
        c = schedule_at(64, ScheduleParams(ta=128, beta_eff=1.0))
        assert c.J == 0.5
        assert c.Gamma == 0.5
        # frozen from -0.5*log(tanh(0.5))
        assert c.gamma == pytest.approx(0.3859684164526524, rel=1e-12)

    def test_endpoint_rejected(self):
        params = ScheduleParams(ta=16)
        with pytest.raises(ValueError):
            schedule_at(16, params)
        with pytest.raises(ValueError):
            schedule_at(17, params)
        with pytest.raises(ValueError):
            schedule_at(-1, params)
        schedule_at(15, params)  # last sweep of dynamics is fine

    def test_monotone_over_ramp(self):
        params = ScheduleParams(ta=64, beta_eff=1.0)
        cs = [schedule_at(t, params) for t in range(64)]
        J = [c.J for c in cs]
        G = [c.Gamma for c in cs]
        g = [c.gamma for c in cs]
        assert all(a < b for a, b in zip(J, J[1:]))
        assert all(a > b for a, b in zip(G, G[1:]))
        assert all(a < b for a, b in zip(g, g[1:]))
        assert all(math.isfinite(c.gamma) for c in cs)

    def test_beta_eff_enters_gamma(self):
        c = schedule_at(0, ScheduleParams(ta=8, beta_eff=2.0))
        assert c.gamma == pytest.approx(-0.5 * math.log(math.tanh(2.0)), rel=1e-12)


# ---------------------------------------------------------------------------
# bath kernel

class TestBuildKernel:
    def test_zero_coupling_gives_zero_table(self):
        k = build_kernel(64, 0.0, 1.0)
        assert k.is_zero
        assert np.all(k.table == 0.0)

    def test_antipodal_value(self):
        k = build_kernel(256, 0.6, 1.0)
        # frozen from (0.3)*(pi/256)^2 / sin(pi/2)^2
        assert k.table[128] == pytest.approx(4.517946350596325e-05, rel=1e-12)

    @pytest.mark.parametrize("P", [2, 4, 8, 16, 32, 64, 128, 256, 512, 1024])
    def test_symmetry_and_positivity(self, P):
        k = build_kernel(P, 0.7, 1.3)
        for d in range(1, P):
            assert k.table[d] == k.table[P - d]
            assert k.table[d] > 0.0
        assert k.table[0] == 0.0

    def test_schedule_invariant(self):
        # table depends on (P, alpha, beta_eff) only; rebuilt tables identical
        a = build_kernel(32, 0.6, 1.0)
        b = build_kernel(32, 0.6, 1.0)
        assert np.array_equal(a.table, b.table)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            build_kernel(1, 0.5, 1.0)
        with pytest.raises(ValueError):
            build_kernel(8, -0.1, 1.0)
        with pytest.raises(ValueError):
            build_kernel(8, 0.5, 0.0)


# ---------------------------------------------------------------------------
# spin field

class TestSpinField:
    def test_rejects_non_unit_spins(self):
        with pytest.raises(ValueError):
            SpinField(np.zeros((2, 2), dtype=np.int8))
        bad = np.ones((2, 2), dtype=np.int8)
        bad[0, 0] = 2
        with pytest.raises(ValueError):
            SpinField(bad)

    def test_rejects_small_dims(self):
        with pytest.raises(ValueError):
            SpinField(np.ones((1, 4), dtype=np.int8))
        with pytest.raises(ValueError):
            SpinField(np.ones((4, 1), dtype=np.int8))

    def test_bath_shape_checked(self):
        with pytest.raises(ValueError):
            SpinField(np.ones((2, 4), dtype=np.int8), np.zeros((2, 3)))

    def test_cache_matches_definition(self, nprng):
        k = build_kernel(12, 0.6, 1.0)
        f = random_field(nprng, 5, 12)
        f.enable_bath_cache(k)
        for i in range(5):
            for tau in range(12):
                expect = sum(k.table[abs(tau - tp)] * f.spins[i, tp]
                             for tp in range(12) if tp != tau)
                assert f.bath_field[i, tau] == pytest.approx(expect, abs=1e-12)


# ---------------------------------------------------------------------------
# total energy

def _manual_energy(spins, J, ge, table, tlim):
    # independent numpy evaluation of the three sums
    e = -J * np.sum(spins[:-1, :] * spins[1:, :])
    e += -ge * np.sum(spins[:tlim, :] * np.roll(spins[:tlim, :], -1, axis=1))
    P = spins.shape[1]
    for d in range(1, P):
        e += -table[d] * np.sum(spins[:tlim, d:] * spins[:tlim, :P - d])
    return float(e)


class TestTotalEnergy:
    def test_tiny_ferromagnet_by_hand(self):
        f = SpinField.all_up(2, 2)
        g = 0.37
        c = CouplingSet(J=1.0, Gamma=0.5, gamma=g, beta_eff=1.0)
        k = build_kernel(2, 0.0, 1.0)
        # 2 spatial bonds and, with both sites Trotter-coupled, 4 Trotter bonds
        assert total_energy(f, c, k) == pytest.approx(-2.0 - 4.0 * g, rel=1e-14)
        # literal bounds drop the last site's Trotter column
        assert total_energy(f, c, k, literal_eq6_bounds=True) == pytest.approx(
            -2.0 - 2.0 * g, rel=1e-14)

    def test_zero_bath_contributes_nothing(self, nprng):
        f = random_field(nprng, 4, 8)
        c = random_couplings(nprng)
        k0 = build_kernel(8, 0.0, 1.0)
        ge = c.gamma / c.beta_eff
        manual = _manual_energy(f.spins, c.J, ge, k0.table, 4)
        assert total_energy(f, c, k0) == pytest.approx(manual, rel=1e-12)

    def test_matches_manual_with_bath(self, nprng):
        k = build_kernel(8, 0.8, 1.0)
        for _ in range(20):
            f = random_field(nprng, 4, 8)
            c = random_couplings(nprng, alpha=0.8)
            ge = c.gamma / c.beta_eff
            manual = _manual_energy(f.spins, c.J, ge, k.table, 4)
            assert total_energy(f, c, k) == pytest.approx(manual, rel=1e-12)

    def test_global_flip_symmetry(self, nprng):
        k = build_kernel(10, 0.6, 1.0)
        for lit in (False, True):
            for _ in range(10):
                f = random_field(nprng, 5, 10)
                c = random_couplings(nprng, alpha=0.6)
                flipped = SpinField(-f.spins)
                assert total_energy(f, c, k, lit) == total_energy(flipped, c, k, lit)

    def test_dimension_mismatch(self, nprng):
        f = random_field(nprng, 4, 8)
        c = random_couplings(nprng)
        with pytest.raises(ValueError):
            total_energy(f, c, build_kernel(16, 0.0, 1.0))


# ---------------------------------------------------------------------------
# delta energy and flips

class TestDeltaEnergy:
    def test_tiny_ferromagnet_flip(self):
        f = SpinField.all_up(2, 2)
        g = 0.42
        c = CouplingSet(J=0.8, Gamma=0.5, gamma=g, beta_eff=1.0)
        k = build_kernel(2, 0.0, 1.0)
        assert delta_energy(f, 0, 0, c, k) == pytest.approx(
            2.0 * 0.8 + 4.0 * g, rel=1e-14)

    def test_antisymmetry_under_double_flip(self, nprng):
        k = build_kernel(8, 0.5, 1.0)
        f = random_field(nprng, 4, 8, with_cache=True, kernel=k)
        c = random_couplings(nprng, alpha=0.5)
        de1 = delta_energy(f, 2, 3, c, k)
        apply_flip(f, 2, 3, k)
        de2 = delta_energy(f, 2, 3, c, k)
        assert de2 == pytest.approx(-de1, rel=1e-10, abs=1e-12)

    @pytest.mark.parametrize("alpha,literal", [(0.0, False), (0.0, True),
                                               (0.7, False), (0.7, True)])
    def test_matches_total_energy_difference(self, nprng, alpha, literal):
        for trial in range(200):
            L = int(nprng.integers(2, 9))
            P = int(nprng.integers(2, 9))
            k = build_kernel(P, alpha, 1.0)
            f = random_field(nprng, L, P, with_cache=alpha > 0, kernel=k)
            c = random_couplings(nprng, alpha=alpha)
            i = int(nprng.integers(0, L))
            tau = int(nprng.integers(0, P))
            before = total_energy(f, c, k, literal)
            de = delta_energy(f, i, tau, c, k, literal)
            apply_flip(f, i, tau, k)
            after = total_energy(f, c, k, literal)
            scale = max(1.0, abs(after), abs(before))
            assert abs(de - (after - before)) <= 1e-10 * scale

    def test_cache_and_direct_paths_agree(self, nprng):
        k = build_kernel(16, 0.9, 1.0)
        cached = random_field(nprng, 6, 16, with_cache=True, kernel=k)
        plain = SpinField(cached.spins.copy())
        c = random_couplings(nprng, alpha=0.9)
        for i in range(6):
            for tau in range(16):
                assert delta_energy(cached, i, tau, c, k) == pytest.approx(
                    delta_energy(plain, i, tau, c, k), rel=1e-12, abs=1e-14)

    def test_index_errors(self, nprng):
        f = random_field(nprng, 4, 8)
        c = random_couplings(nprng)
        k = build_kernel(8, 0.0, 1.0)
        with pytest.raises(IndexError):
            delta_energy(f, 4, 0, c, k)
        with pytest.raises(IndexError):
            delta_energy(f, 0, 8, c, k)
        with pytest.raises(IndexError):
            apply_flip(f, -1, 0, k)


class TestApplyFlip:
    def test_involution_restores_field_and_cache(self, nprng):
        k = build_kernel(12, 0.6, 1.0)
        f = random_field(nprng, 5, 12, with_cache=True, kernel=k)
        spins0 = f.spins.copy()
        cache0 = f.bath_field.copy()
        apply_flip(f, 3, 7, k)
        apply_flip(f, 3, 7, k)
        assert np.array_equal(f.spins, spins0)
        np.testing.assert_allclose(f.bath_field, cache0, atol=1e-12)

    def test_cache_coherent_after_flip_sequence(self, nprng):
        k = build_kernel(16, 0.8, 1.0)
        f = random_field(nprng, 6, 16, with_cache=True, kernel=k)
        for _ in range(500):
            i = int(nprng.integers(0, 6))
            tau = int(nprng.integers(0, 16))
            apply_flip(f, i, tau, k)
        fresh = SpinField(f.spins.copy())
        fresh.enable_bath_cache(k)
        scale = max(1.0, float(np.abs(fresh.bath_field).max()))
        assert np.abs(f.bath_field - fresh.bath_field).max() <= 1e-10 * scale

    def test_zero_coupling_leaves_cache_alone(self, nprng):
        k = build_kernel(8, 0.0, 1.0)
        f = random_field(nprng, 4, 8)
        apply_flip(f, 1, 2, k)
        assert f.bath_field is None
        f.enable_bath_cache(k)
        apply_flip(f, 1, 3, k)
        assert np.all(f.bath_field == 0.0)


# ---------------------------------------------------------------------------
# couplings

class TestCouplingSet:
    def test_validation(self):
        with pytest.raises(ValueError):
            CouplingSet(J=0.5, Gamma=0.5, gamma=0.3, beta_eff=0.0)
        with pytest.raises(ValueError):
            CouplingSet(J=0.5, Gamma=0.5, gamma=0.3, alpha=-1.0)
        with pytest.raises(ValueError):
            CouplingSet(J=float("nan"), Gamma=0.5, gamma=0.3)

    def test_frozen_studies_allow_wide_ranges(self):
        # the enumeration oracle probes J, gamma far outside the ramp
        c = CouplingSet(J=40.0, Gamma=1.0, gamma=40.0)
        assert c.J == 40.0
