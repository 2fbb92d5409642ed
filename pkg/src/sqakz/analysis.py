"""Distribution models, cumulant statistics, and scaling fits.

Reference values used for comparison
------------------------------------
Generalized Kibble-Zurek theory for the driven 1D transverse-field Ising
chain predicts all defect-count cumulants proportional to the first, with
kappa2/kappa1 = 0.578 and kappa3/kappa1 = 0.134 for the isolated chain
(del Campo 2018); the dissipative extension gives kappa3/kappa1 = 0.174
(Gomez-Ruiz, Mayo, del Campo 2020).  The residual-energy exponent
b = d*nu/(1 + z*nu) is 1/2 for the isolated chain (z = nu = 1) and 0.28
with Ohmic dissipation, using the equilibrium Monte Carlo exponents
z = 1.985, nu = 0.638 of Werner, Voelker, Troyer, Chakravarty (2005).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import linregress

from .observables import DefectHistogram, ResidualEnergySeries

GKZ_CLOSED_K2_K1 = 0.578
GKZ_CLOSED_K3_K1 = 0.134
GKZ_OPEN_K3_K1 = 0.174
OPEN_CHAIN_Z = 1.985
OPEN_CHAIN_NU = 0.638


def kz_exponent(d: int = 1, z: float = 1.0, nu: float = 1.0) -> float:
    """Kibble-Zurek residual-energy exponent d*nu/(1 + z*nu)."""
    return d * nu / (1.0 + z * nu)


KZ_B_CLOSED = kz_exponent()                              # = 0.5
KZ_B_OPEN = kz_exponent(z=OPEN_CHAIN_Z, nu=OPEN_CHAIN_NU)  # ~ 0.28


@dataclass
class CumulantSet:
    """First three cumulants of pooled observations with bootstrap errors.

    kappa2 and kappa3 are the central moments (identical to cumulants up to
    third order).  Errors resample whole replicas, never individual slices,
    because slices within a replica are correlated; they are None when the
    replica structure is unknown or has fewer than two replicas.
    """

    kappa1: float
    kappa2: float
    kappa3: float
    err1: float | None = None
    err2: float | None = None
    err3: float | None = None
    n_observations: int = 0
    n_replicas: int | None = None
    n_resamples: int = 0


def _weighted_central_moments(counts: np.ndarray) -> tuple[float, float, float]:
    total = counts.sum()
    n = np.arange(counts.size, dtype=np.float64)
    k1 = float(n @ counts / total)
    d = n - k1
    k2 = float((d * d) @ counts / total)
    k3 = float((d * d * d) @ counts / total)
    return k1, k2, k3


def cumulants(hist: DefectHistogram, replica_blocks: list[np.ndarray] | None = None,
              n_resamples: int = 1000, seed: int = 0) -> CumulantSet:
    """Pooled kappa1..kappa3 of a defect histogram.

    replica_blocks overrides the histogram's own replica grouping; each
    block is the array of observations contributed by one replica.
    """
    if hist.total == 0:
        raise ValueError("empty histogram")
    if hist.total < 2:
        raise ValueError("need at least 2 observations")
    k1, k2, k3 = _weighted_central_moments(hist.counts.astype(np.float64))
    blocks = replica_blocks if replica_blocks is not None else hist.obs_by_replica
    err1 = err2 = err3 = None
    n_rep = None
    if blocks is not None:
        n_rep = len(blocks)
        if n_rep >= 2 and n_resamples > 0:
            per_rep = np.stack([np.bincount(np.asarray(b, dtype=np.int64),
                                            minlength=hist.L) for b in blocks])
            rng = np.random.default_rng(seed)
            boots = np.empty((n_resamples, 3))
            for b in range(n_resamples):
                idx = rng.integers(0, n_rep, n_rep)
                boots[b] = _weighted_central_moments(
                    per_rep[idx].sum(axis=0).astype(np.float64))
            err1, err2, err3 = (float(s) for s in boots.std(axis=0, ddof=1))
    return CumulantSet(kappa1=k1, kappa2=k2, kappa3=k3,
                       err1=err1, err2=err2, err3=err3,
                       n_observations=hist.total, n_replicas=n_rep,
                       n_resamples=n_resamples if err1 is not None else 0)


def gaussian_pmf(n, kappa1: float, kappa2: float):
    """Gaussian density (1/sqrt(2 pi k2)) exp(-(n-k1)^2 / (2 k2)) at integer n.

    Evaluated pointwise, deliberately not renormalized over the defect
    support; for very small kappa2 the pointwise values need not sum to 1.
    """
    if not (kappa2 > 0.0):
        raise ValueError("kappa2 must be positive")
    n = np.asarray(n, dtype=np.float64)
    val = np.exp(-((n - kappa1) ** 2) / (2.0 * kappa2)) / math.sqrt(2.0 * math.pi * kappa2)
    return float(val) if val.ndim == 0 else val


def boltzmann_distribution(L: int, beta_bl: float) -> np.ndarray:
    """Defect pmf of the open classical chain at J = 1: C(L-1, n) e^{-b E(n)} / Z.

    E(n) = 2n - (L-1) is the chain energy with n broken bonds.  Log-domain
    throughout, so binomials up to C(1023, 511) stay finite.
    """
    if L < 2:
        raise ValueError("L must be >= 2")
    if beta_bl < 0.0:
        raise ValueError("beta_bl must be nonnegative")
    n = np.arange(L, dtype=np.float64)
    logw = (gammaln(L) - gammaln(n + 1.0) - gammaln(L - n)
            - beta_bl * (2.0 * n - (L - 1.0)))
    return np.exp(logw - logsumexp(logw))


def boltzmann_pmf(n: int, L: int, beta_bl: float) -> float:
    if not (0 <= n <= L - 1):
        raise ValueError(f"n={n} outside [0, {L - 1}]")
    return float(boltzmann_distribution(L, beta_bl)[n])


def l1_distance(p, q) -> float:
    """Half the summed absolute difference; total-variation distance for pmfs."""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError("distributions must share support")
    return float(0.5 * np.abs(p - q).sum())


@dataclass
class FitResult:
    """A fitted model with its uncertainty and goodness metric.

    kind is "power_law" (params: b, log_amplitude) or "boltzmann"
    (params: beta_bl).  metric is R^2 for regressions, the minimized L1 for
    the Boltzmann fit.  at_bound flags a Boltzmann fit that ran into the
    search limit (e.g. a defect-free histogram).
    """

    kind: str
    params: dict
    stderr: float | None
    window: tuple
    metric: float
    n_points: int
    at_bound: bool = False

    def __post_init__(self):
        if self.stderr is not None and not (self.stderr >= 0.0):
            raise ValueError("stderr must be nonnegative")

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params),
                "stderr": self.stderr, "window": list(self.window),
                "metric": self.metric, "n_points": self.n_points,
                "at_bound": self.at_bound}


def fit_beta_bl(hist: DefectHistogram, beta_max: float = 10.0,
                grid_step: float = 0.01, tol: float = 1e-4) -> FitResult:
    """Best-fit effective inverse temperature of the Boltzmann defect model.

    Minimizes the L1 norm against the empirical pmf: coarse grid on
    [0, beta_max], then golden-section refinement of the bracketing
    interval down to `tol`.  A fit pinned at beta_max (defect-free data,
    say) is flagged via at_bound rather than treated as an error.
    """
    emp = hist.pmf()
    L = hist.L

    def objective(beta):
        return l1_distance(boltzmann_distribution(L, beta), emp)

    grid = np.arange(0.0, beta_max + grid_step / 2, grid_step)
    vals = np.array([objective(b) for b in grid])
    best = int(vals.argmin())
    lo = float(grid[max(best - 1, 0)])
    hi = float(grid[min(best + 1, grid.size - 1)])
    beta, l1_min = _golden_section(objective, lo, hi, tol)
    return FitResult(kind="boltzmann", params={"beta_bl": float(beta)},
                     stderr=None, window=(0.0, beta_max), metric=float(l1_min),
                     n_points=L, at_bound=bool(beta >= beta_max - grid_step))


_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)


def fit_power_law(series: ResidualEnergySeries, window: tuple[float, float],
                  weighted: bool = False) -> FitResult:
    """Exponent b of E ~ ta^(-b) by least squares of log E on log ta.

    Unweighted ordinary least squares by default; `weighted` switches to
    inverse-variance weights (stderr/mean)^-2 in log space for sensitivity
    checks.  Needs >= 3 points inside the window, all with positive mean.
    """
    lo, hi = window
    mask = (series.ta >= lo) & (series.ta <= hi)
    if mask.sum() < 3:
        raise ValueError(f"need >= 3 points in window [{lo}, {hi}], "
                         f"have {int(mask.sum())}")
    mean = series.mean[mask]
    if np.any(mean <= 0.0):
        raise ValueError("all residual energies in window must be positive")
    x = np.log(series.ta[mask].astype(np.float64))
    y = np.log(mean)
    n = x.size
    if not weighted:
        res = linregress(x, y)
        slope, intercept = res.slope, res.intercept
        stderr = float(res.stderr)
        r2 = float(res.rvalue ** 2)
    else:
        sig = series.stderr[mask] / mean  # delta method for log values
        w = 1.0 / sig**2
        sw = w.sum()
        xb = (w * x).sum() / sw
        yb = (w * y).sum() / sw
        sxx = (w * (x - xb) ** 2).sum()
        slope = float((w * (x - xb) * (y - yb)).sum() / sxx)
        intercept = float(yb - slope * xb)
        resid = y - (intercept + slope * x)
        chi2 = float((w * resid**2).sum())
        stderr = math.sqrt(chi2 / (n - 2) / sxx)
        ss_tot = (w * (y - yb) ** 2).sum()
        r2 = float(1.0 - chi2 / ss_tot)
    return FitResult(kind="power_law",
                     params={"b": float(-slope), "log_amplitude": float(intercept)},
                     stderr=stderr, window=(lo, hi), metric=r2, n_points=n)


@dataclass
class CumulantRatioFit:
    """Proportionality constants of kappa2 and kappa3 against kappa1."""

    k2_over_k1: float
    k3_over_k1: float
    k2_err: float | None
    k3_err: float | None
    r2_k2: float
    r2_k3: float
    window: tuple
    n_points: int

    def to_dict(self) -> dict:
        return {"k2_over_k1": self.k2_over_k1, "k3_over_k1": self.k3_over_k1,
                "k2_err": self.k2_err, "k3_err": self.k3_err,
                "r2_k2": self.r2_k2, "r2_k3": self.r2_k3,
                "window": list(self.window), "n_points": self.n_points}


def proportionality_fit(x, y, weights=None) -> tuple[float, float]:
    """Zero-intercept least squares y = r*x; returns (r, R^2).

    R^2 compares the proportional model against the constant-mean model
    (unweighted), so a value near 1 means y really does track x through the
    origin.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.ones_like(x) if weights is None else np.asarray(weights, dtype=np.float64)
    denom = (w * x * x).sum()
    if denom <= 0.0:
        raise ValueError("degenerate fit: sum of weighted x^2 is zero")
    ratio = float((w * x * y).sum() / denom)
    resid = y - ratio * x
    ss_tot = ((y - y.mean()) ** 2).sum()
    r2 = float(1.0 - (resid**2).sum() / ss_tot) if ss_tot > 0 else 1.0
    return ratio, r2


def cumulant_ratio_fit(series: list[tuple[int, DefectHistogram]],
                       window: tuple[float, float], n_resamples: int = 1000,
                       seed: int = 0) -> CumulantRatioFit:
    """Fit kappa2 = r21 * kappa1 and kappa3 = r31 * kappa1 across a ta window.

    Zero-intercept weighted least squares across the window points, with
    inverse-variance weights when per-point bootstrap errors are available
    (unit weights otherwise).  Ratio errors come from resampling whole
    replicas within every point and refitting.
    """
    lo, hi = window
    chosen = [(ta, h) for ta, h in series if lo <= ta <= hi]
    if len(chosen) < 2:
        raise ValueError(f"need >= 2 points in window [{lo}, {hi}]")
    sets = [cumulants(h, n_resamples=n_resamples, seed=seed + 1 + j)
            for j, (_, h) in enumerate(chosen)]
    k1 = np.array([s.kappa1 for s in sets])
    k2 = np.array([s.kappa2 for s in sets])
    k3 = np.array([s.kappa3 for s in sets])
    if np.all(np.abs(k1) < 1e-12):
        raise ValueError("degenerate window: kappa1 is zero everywhere")
    have_errs = all(s.err2 is not None and s.err2 > 0 and s.err3 > 0 for s in sets)
    w2 = np.array([1.0 / s.err2**2 for s in sets]) if have_errs else np.ones(k1.size)
    w3 = np.array([1.0 / s.err3**2 for s in sets]) if have_errs else np.ones(k1.size)
    r21, r2_k2 = proportionality_fit(k1, k2, w2)
    r31, r2_k3 = proportionality_fit(k1, k3, w3)

    err21 = err31 = None
    groups = [h.obs_by_replica for _, h in chosen]
    if all(g is not None and len(g) >= 2 for g in groups) and n_resamples > 0:
        per_rep = [np.stack([np.bincount(np.asarray(b, dtype=np.int64),
                                         minlength=h.L) for b in g])
                   for (_, h), g in zip(chosen, groups)]
        rng = np.random.default_rng(seed)
        boots = np.empty((n_resamples, 2))
        for bres in range(n_resamples):
            bk1 = np.empty(len(chosen))
            bk2 = np.empty(len(chosen))
            bk3 = np.empty(len(chosen))
            for j, mat in enumerate(per_rep):
                idx = rng.integers(0, mat.shape[0], mat.shape[0])
                bk1[j], bk2[j], bk3[j] = _weighted_central_moments(
                    mat[idx].sum(axis=0).astype(np.float64))
            boots[bres, 0] = (w2 * bk1 * bk2).sum() / (w2 * bk1 * bk1).sum()
            boots[bres, 1] = (w3 * bk1 * bk3).sum() / (w3 * bk1 * bk1).sum()
        err21, err31 = (float(s) for s in boots.std(axis=0, ddof=1))

    return CumulantRatioFit(k2_over_k1=r21, k3_over_k1=r31,
                            k2_err=err21, k3_err=err31,
                            r2_k2=r2_k2, r2_k3=r2_k3,
                            window=(lo, hi), n_points=len(chosen))
