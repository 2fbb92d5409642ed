"""Compiled inner loops: single-flip Metropolis dynamics on the L x P lattice.

Everything here mirrors the reference implementations in `core`/`annealer`
bit for bit: same SplitMix64 stream (see `rng`), same draw order per attempt
(site, slice, uniform), same floating-point expression order in the energy
deltas.  No fastmath anywhere, deliberately; reordering would break the
replay guarantees the test suite relies on.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit, prange
from numba import int64, uint64, float64

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S32 = np.uint64(32)
_S11 = np.uint64(11)
_S63 = np.uint64(63)
_ONE = np.uint64(1)
_INV53 = 2.0**-53


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@njit(cache=True, inline="always")
def _next_u64(st):
    st[0] = st[0] + _GAMMA
    return _mix64(st[0])


@njit(cache=True, inline="always")
def _next_double(st):
    return float64(_next_u64(st) >> _S11) * _INV53


@njit(cache=True, inline="always")
def _next_index(st, n):
    # 32-bit fixed-point multiply; avoids the hardware divide of `%`.
    return int64(((_next_u64(st) >> _S32) * uint64(n)) >> _S32)


@njit(cache=True)
def _draw_u64(seed, n):
    """Test hook: first n raw draws of the whitened stream."""
    st = np.empty(1, np.uint64)
    st[0] = _mix64(uint64(seed))
    out = np.empty(n, np.uint64)
    for k in range(n):
        out[k] = _next_u64(st)
    return out


@njit(cache=True, inline="always")
def _delta_energy(spins, bath, i, tau, J, ge, use_bath, tlim):
    """Energy change for flipping spin (i, tau); O(1) with the bath cache."""
    L, P = spins.shape
    s = float64(spins[i, tau])
    nb = 0.0
    if i > 0:
        nb += spins[i - 1, tau]
    if i + 1 < L:
        nb += spins[i + 1, tau]
    de = 2.0 * J * s * nb
    if i < tlim:
        tp = tau + 1
        if tp == P:
            tp = 0
        tm = tau - 1
        if tm < 0:
            tm = P - 1
        tnb = float64(spins[i, tp]) + float64(spins[i, tm])
        de += 2.0 * ge * s * tnb
        if use_bath:
            de += 2.0 * s * bath[i, tau]
    return de


@njit(cache=True, inline="always")
def _apply_flip(spins, bath, kern, i, tau, update_cache):
    P = spins.shape[1]
    s_new = -spins[i, tau]
    spins[i, tau] = s_new
    if update_cache:
        step = 2.0 * float64(s_new)
        for tp in range(P):
            if tp != tau:
                d = tau - tp
                if d < 0:
                    d = -d
                bath[i, tp] += step * kern[d]


@njit(cache=True, inline="always")
def _attempt(spins, bath, kern, i, tau, u, J, ge, beta_eff, use_bath, tlim):
    de = _delta_energy(spins, bath, i, tau, J, ge, use_bath, tlim)
    # Equivalent to u < min(1, exp(-beta_eff*de)); exp never sees de <= 0.
    if de <= 0.0 or u < math.exp(-(beta_eff * de)):
        _apply_flip(spins, bath, kern, i, tau, use_bath)
        return True
    return False


@njit(cache=True)
def _build_accept_lut(J, ge, beta_eff):
    """Acceptance thresholds for every discrete closed-system energy change.

    Without the bath the flip cost is 2*J*s*nb + 2*ge*s*tnb with
    s in {-1,+1}, spatial neighbor sum nb in {-2..2} and Trotter neighbor
    sum tnb in {-2,0,2} (absent past the Trotter site limit).  Every product
    here is exact in binary floating point, so entries match the generic
    `_delta_energy` expression bit for bit.  Entries hold 2.0 (always
    accept, since u < 1) when de <= 0, else exp(-beta_eff*de); the key is
    ((s+1)/2)*20 + (nb+2)*4 + tidx with tidx 0..2 for tnb and 3 for absent.
    """
    lut = np.empty(40, np.float64)
    for si in range(2):
        s = -1.0 if si == 0 else 1.0
        for nbi in range(-2, 3):
            base = 2.0 * J * s * float64(nbi)
            for tidx in range(4):
                if tidx < 3:
                    de = base + 2.0 * ge * s * float64(2 * tidx - 2)
                else:
                    de = base
                key = si * 20 + (nbi + 2) * 4 + tidx
                lut[key] = 2.0 if de <= 0.0 else math.exp(-(beta_eff * de))
    return lut


@njit(cache=True, inline="always")
def _attempt_closed(spins, i, tau, u, lut, tlim):
    L, P = spins.shape
    s = spins[i, tau]
    nbi = 0
    if i > 0:
        nbi += spins[i - 1, tau]
    if i + 1 < L:
        nbi += spins[i + 1, tau]
    if i < tlim:
        tp = tau + 1
        if tp == P:
            tp = 0
        tm = tau - 1
        if tm < 0:
            tm = P - 1
        tidx = (spins[i, tp] + spins[i, tm] + 2) >> 1
    else:
        tidx = 3
    key = ((s + 1) >> 1) * 20 + (nbi + 2) * 4 + tidx
    if u < lut[key]:
        spins[i, tau] = -s
        return True
    return False


@njit(cache=True)
def _sweep(spins, bath, kern, st, J, ge, beta_eff, use_bath, tlim, sequential):
    """One unit time: exactly L*P Metropolis attempts.  Returns accept count."""
    L, P = spins.shape
    acc = 0
    if not use_bath:
        lut = _build_accept_lut(J, ge, beta_eff)
        if sequential:
            for i in range(L):
                for tau in range(P):
                    u = _next_double(st)
                    if _attempt_closed(spins, i, tau, u, lut, tlim):
                        acc += 1
        else:
            for _ in range(L * P):
                i = _next_index(st, L)
                tau = _next_index(st, P)
                u = _next_double(st)
                if _attempt_closed(spins, i, tau, u, lut, tlim):
                    acc += 1
        return acc
    if sequential:
        for i in range(L):
            for tau in range(P):
                u = _next_double(st)
                if _attempt(spins, bath, kern, i, tau, u, J, ge, beta_eff,
                            use_bath, tlim):
                    acc += 1
    else:
        for _ in range(L * P):
            i = _next_index(st, L)
            tau = _next_index(st, P)
            u = _next_double(st)
            if _attempt(spins, bath, kern, i, tau, u, J, ge, beta_eff,
                        use_bath, tlim):
                acc += 1
    return acc


@njit(cache=True)
def _init_spins(spins, st, random_init):
    L, P = spins.shape
    if random_init:
        for i in range(L):
            for tau in range(P):
                if (_next_u64(st) >> _S63) != uint64(0):
                    spins[i, tau] = 1
                else:
                    spins[i, tau] = -1
    else:
        for i in range(L):
            for tau in range(P):
                spins[i, tau] = 1


@njit(cache=True)
def _bath_field_from_scratch(spins, kern, out):
    """out[i, tau] = sum over tau' != tau of kern[|tau - tau'|] * spins[i, tau']."""
    L, P = spins.shape
    for i in range(L):
        for tau in range(P):
            acc = 0.0
            for tp in range(P):
                if tp != tau:
                    d = tau - tp
                    if d < 0:
                        d = -d
                    acc += kern[d] * spins[i, tp]
            out[i, tau] = acc


@njit(cache=True)
def _run_anneal(spins, bath, kern, J_arr, g_arr, beta_eff, seed, warmup,
                random_init, sequential, use_bath, tlim, wacc_out, acc_out):
    """Full annealing trajectory for one replica; spins filled in place."""
    st = np.empty(1, np.uint64)
    st[0] = _mix64(uint64(seed))
    _init_spins(spins, st, random_init)
    if use_bath:
        _bath_field_from_scratch(spins, kern, bath)
    if warmup > 0:
        J0 = J_arr[0]
        ge0 = g_arr[0] / beta_eff
        for w in range(warmup):
            wacc_out[w] = _sweep(spins, bath, kern, st, J0, ge0, beta_eff,
                                 use_bath, tlim, sequential)
    for t in range(J_arr.shape[0]):
        ge = g_arr[t] / beta_eff
        acc_out[t] = _sweep(spins, bath, kern, st, J_arr[t], ge, beta_eff,
                            use_bath, tlim, sequential)


@njit(cache=True, parallel=True)
def _run_replicas(L, P, kern, J_arr, g_arr, beta_eff, seeds, warmup,
                  random_init, sequential, use_bath, tlim):
    """Independent replicas; results do not depend on the thread count."""
    R = seeds.shape[0]
    ta = J_arr.shape[0]
    spins_out = np.empty((R, L, P), np.int8)
    acc_out = np.zeros((R, ta), np.int64)
    wacc_out = np.zeros((R, warmup if warmup > 0 else 1), np.int64)
    for r in prange(R):
        if use_bath:
            bath = np.zeros((L, P), np.float64)
        else:
            bath = np.zeros((1, 1), np.float64)
        _run_anneal(spins_out[r], bath, kern, J_arr, g_arr, beta_eff,
                    seeds[r], warmup, random_init, sequential, use_bath,
                    tlim, wacc_out[r], acc_out[r])
    return spins_out, wacc_out, acc_out


@njit(cache=True)
def _sample_frozen_config(spins, bath, kern, st, J, ge, beta_eff, use_bath,
                          tlim, sweeps, burn_in, counts):
    """Dwell counts over full configurations, recorded after every attempt.

    counts has 2^(L*P) slots; bit (i*P + tau) of the index is set when
    spins[i, tau] == +1.
    """
    L, P = spins.shape
    idx = uint64(0)
    for i in range(L):
        for tau in range(P):
            if spins[i, tau] > 0:
                idx |= _ONE << uint64(i * P + tau)
    for sw in range(burn_in + sweeps):
        record = sw >= burn_in
        for _ in range(L * P):
            i = _next_index(st, L)
            tau = _next_index(st, P)
            u = _next_double(st)
            if _attempt(spins, bath, kern, i, tau, u, J, ge, beta_eff,
                        use_bath, tlim):
                idx ^= _ONE << uint64(i * P + tau)
            if record:
                counts[int64(idx)] += 1


@njit(cache=True)
def _sample_frozen_defects(spins, bath, kern, st, J, ge, beta_eff, use_bath,
                           tlim, sweeps, burn_in, counts):
    """Pooled per-slice kink histogram, recorded once per sweep."""
    L, P = spins.shape
    for sw in range(burn_in + sweeps):
        for _ in range(L * P):
            i = _next_index(st, L)
            tau = _next_index(st, P)
            u = _next_double(st)
            _attempt(spins, bath, kern, i, tau, u, J, ge, beta_eff,
                     use_bath, tlim)
        if sw >= burn_in:
            for tau in range(P):
                kinks = 0
                for i in range(L - 1):
                    if spins[i, tau] != spins[i + 1, tau]:
                        kinks += 1
                counts[kinks] += 1


@njit(cache=True)
def _total_energy(spins, kern, J, ge, use_bath, tlim):
    """Scalar-loop energy sum; term order is part of the contract.

    Spatial bonds site-major, Trotter bonds site-major with periodic wrap,
    bath pairs (tau > tau') innermost.  The enumeration oracle follows the
    same order so the two independent implementations agree bit for bit.
    """
    L, P = spins.shape
    e = 0.0
    for i in range(L - 1):
        for tau in range(P):
            e -= J * float64(spins[i, tau]) * float64(spins[i + 1, tau])
    for i in range(tlim):
        for tau in range(P):
            tp = tau + 1
            if tp == P:
                tp = 0
            e -= ge * float64(spins[i, tau]) * float64(spins[i, tp])
    if use_bath:
        for i in range(tlim):
            for tau in range(P):
                for tq in range(tau):
                    e -= kern[tau - tq] * float64(spins[i, tau]) * float64(spins[i, tq])
    return e
