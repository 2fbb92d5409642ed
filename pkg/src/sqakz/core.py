"""Trotterized effective model of the driven transverse-field Ising chain.

The quantum chain maps onto a classical L x P spin lattice: L sites with a
free spatial boundary, P imaginary-time (Trotter) slices with a periodic
boundary.  Three couplings act on it:

    spatial   -J * S_i(tau) S_{i+1}(tau)
    Trotter   -(gamma / beta_eff) * S_i(tau) S_i(tau+1)
    bath      -K(|tau - tau'|) * S_i(tau) S_i(tau')   for all pairs tau > tau'

with K the precomputed long-range kernel of an Ohmic environment,
K(d) = (alpha / (2 beta_eff)) (pi/P)^2 / sin^2(pi d / P).

Sites and slices are 0-based throughout the in-memory API; file formats and
the CLI use 1-based indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _engine


@dataclass
class SpinField:
    """L x P array of +-1 spins with an optional accumulated bath field.

    When `bath_field` is present it caches, for every (i, tau),
    sum over tau' != tau of K(|tau - tau'|) * spins[i, tau'], which makes
    the bath part of a flip's energy change O(1).
    """

    spins: np.ndarray
    bath_field: np.ndarray | None = None

    def __post_init__(self):
        self.spins = np.ascontiguousarray(self.spins, dtype=np.int8)
        if self.spins.ndim != 2 or self.spins.shape[0] < 2 or self.spins.shape[1] < 2:
            raise ValueError("spin field must be L x P with L, P >= 2")
        if not np.all(np.abs(self.spins) == 1):
            raise ValueError("spins must be exactly -1 or +1")
        if self.bath_field is not None:
            self.bath_field = np.ascontiguousarray(self.bath_field, dtype=np.float64)
            if self.bath_field.shape != self.spins.shape:
                raise ValueError("bath_field shape must match spins")

    @property
    def L(self) -> int:
        return self.spins.shape[0]

    @property
    def P(self) -> int:
        return self.spins.shape[1]

    @classmethod
    def random(cls, L: int, P: int, rng) -> "SpinField":
        """Random +-1 field drawn from the top bit of the stream, site-major."""
        spins = np.empty((L, P), dtype=np.int8)
        for i in range(L):
            for tau in range(P):
                spins[i, tau] = 1 if (rng.next_u64() >> 63) else -1
        return cls(spins)

    @classmethod
    def all_up(cls, L: int, P: int) -> "SpinField":
        return cls(np.ones((L, P), dtype=np.int8))

    def copy(self) -> "SpinField":
        bf = None if self.bath_field is None else self.bath_field.copy()
        return SpinField(self.spins.copy(), bf)

    def enable_bath_cache(self, kernel: "BathKernel") -> None:
        """Build (or rebuild) the accumulated-field cache from scratch."""
        if kernel.P != self.P:
            raise ValueError("kernel P does not match field")
        out = np.empty((self.L, self.P), dtype=np.float64)
        _engine._bath_field_from_scratch(self.spins, kernel.table, out)
        self.bath_field = out


@dataclass(frozen=True)
class CouplingSet:
    """Instantaneous couplings driving one unit time of dynamics.

    Schedule-produced instances satisfy J in [0,1], Gamma in (0,1] and
    gamma = -0.5*ln tanh(beta_eff*Gamma) >= 0; direct construction allows
    arbitrary finite values for frozen-coupling studies.
    """

    J: float
    Gamma: float
    gamma: float
    beta_eff: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if not (self.beta_eff > 0.0):
            raise ValueError("beta_eff must be positive")
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")
        for name in ("J", "Gamma", "gamma", "beta_eff", "alpha"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")


@dataclass(frozen=True)
class BathKernel:
    """Long-range imaginary-time interaction table.

    `table` has length P with table[0] = 0 (unused) and
    table[d] = (alpha / (2 beta_eff)) * (pi/P)^2 / sin^2(pi d / P)
    for d = 1..P-1.  Symmetric: table[d] == table[P-d].  All-zero when
    alpha == 0.  Independent of the schedule.
    """

    P: int
    alpha: float
    beta_eff: float
    table: np.ndarray = dc_field(repr=False)

    @property
    def is_zero(self) -> bool:
        return self.alpha == 0.0


@dataclass(frozen=True)
class ScheduleParams:
    """Annealing-run parameters: duration in sweeps plus bath settings."""

    ta: int
    beta_eff: float = 1.0
    alpha: float = 0.0

    def __post_init__(self):
        if self.ta < 1:
            raise ValueError("ta must be a positive integer")
        if not (self.beta_eff > 0.0):
            raise ValueError("beta_eff must be positive")
        if self.alpha < 0.0:
            raise ValueError("alpha must be nonnegative")


def schedule_at(t: int, params: ScheduleParams) -> CouplingSet:
    """Couplings for sweep t of the linear ramp J: 0 -> 1, Gamma: 1 -> 0.

    Valid for 0 <= t <= ta-1.  The endpoint t = ta is rejected: there
    Gamma = 0 and the Trotter coupling gamma diverges, so dynamics never
    evaluates it (measurement happens after the last sweep instead).
    """
    ta = params.ta
    if not (0 <= t < ta):
        raise ValueError(f"sweep index t={t} outside dynamics range [0, {ta - 1}]")
    J = t / ta
    Gamma = 1.0 - t / ta
    gamma = -0.5 * math.log(math.tanh(params.beta_eff * Gamma))
    return CouplingSet(J=J, Gamma=Gamma, gamma=gamma,
                       beta_eff=params.beta_eff, alpha=params.alpha)


def build_kernel(P: int, alpha: float, beta_eff: float) -> BathKernel:
    """Precompute the bath interaction table for a given slice count."""
    if P < 2:
        raise ValueError("P must be >= 2")
    if alpha < 0.0:
        raise ValueError("alpha must be nonnegative")
    if not (beta_eff > 0.0):
        raise ValueError("beta_eff must be positive")
    table = np.zeros(P, dtype=np.float64)
    if alpha > 0.0:
        coef = alpha / (2.0 * beta_eff)
        w = (math.pi / P) ** 2
        for d in range(1, P):
            # evaluate sin at min(d, P-d): same value mathematically, and the
            # table comes out exactly symmetric and more accurate near pi
            dd = min(d, P - d)
            table[d] = coef * w / math.sin(math.pi * dd / P) ** 2
    return BathKernel(P=P, alpha=alpha, beta_eff=beta_eff, table=table)


def _trotter_limit(L: int, literal_eq6_bounds: bool) -> int:
    # The physically derived model couples all L sites in the Trotter and
    # bath directions; the literal flag restricts both to the first L-1
    # sites for comparison.
    return L - 1 if literal_eq6_bounds else L


def total_energy(field: SpinField, c: CouplingSet, k: BathKernel,
                 literal_eq6_bounds: bool = False) -> float:
    """Full effective energy: spatial + Trotter + bath terms.

    Scalar accumulation in a documented order (see `_engine._total_energy`)
    so independent re-implementations can be compared exactly.
    """
    if k.P != field.P:
        raise ValueError("kernel P does not match field")
    use_bath = k.alpha > 0.0
    tlim = _trotter_limit(field.L, literal_eq6_bounds)
    ge = c.gamma / c.beta_eff
    return float(_engine._total_energy(field.spins, k.table, c.J, ge, use_bath, tlim))


def delta_energy(field: SpinField, i: int, tau: int, c: CouplingSet,
                 k: BathKernel, literal_eq6_bounds: bool = False) -> float:
    """Energy change of flipping spin (i, tau) without mutating the field.

    O(1) when the bath cache is enabled (or alpha == 0), O(P) otherwise.
    """
    L, P = field.L, field.P
    if not (0 <= i < L) or not (0 <= tau < P):
        raise IndexError(f"site ({i}, {tau}) outside {L} x {P} lattice")
    if k.P != P:
        raise ValueError("kernel P does not match field")
    tlim = _trotter_limit(L, literal_eq6_bounds)
    ge = c.gamma / c.beta_eff
    use_bath = k.alpha > 0.0
    if not use_bath or field.bath_field is not None:
        bath = field.bath_field
        if bath is None:
            bath = _DUMMY_BATH
        return float(_engine._delta_energy(field.spins, bath, i, tau,
                                           c.J, ge, use_bath, tlim))
    # no cache: direct O(P) bath sum, same tau' order as the cache builder
    de = float(_engine._delta_energy(field.spins, _DUMMY_BATH, i, tau,
                                     c.J, ge, False, tlim))
    if i < tlim:
        spins = field.spins
        acc = 0.0
        for tp in range(P):
            if tp != tau:
                acc += k.table[abs(tau - tp)] * spins[i, tp]
        de += 2.0 * float(spins[i, tau]) * acc
    return de


_DUMMY_BATH = np.zeros((1, 1), dtype=np.float64)


def apply_flip(field: SpinField, i: int, tau: int, k: BathKernel) -> None:
    """Negate spin (i, tau); keep the bath cache coherent if present.

    Every cache entry bath_field[i, tau'] (tau' != tau) moves by
    2 * K(|tau - tau'|) * (new spin value).
    """
    L, P = field.L, field.P
    if not (0 <= i < L) or not (0 <= tau < P):
        raise IndexError(f"site ({i}, {tau}) outside {L} x {P} lattice")
    update_cache = field.bath_field is not None and not k.is_zero
    bath = field.bath_field if field.bath_field is not None else _DUMMY_BATH
    _engine._apply_flip(field.spins, bath, k.table, i, tau, update_cache)
