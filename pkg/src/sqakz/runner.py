"""Experiment orchestration: replica farms, persistence, resume, merging.

Layout of an output directory:

    out/
      manifest.json                  run record; enough to re-create any replica
      L64_P256_alpha0/
        kinks_ta16.csv               raw: replica,slice,n   (1-based ids)
        histogram_ta16.csv           derived: n,count over n = 0..L-1
        ...
        eres.csv                     derived: ta,mean,stderr,n_samples
        summary.json                 derived: cumulants, fits, L1 curves

Raw CSVs are byte-deterministic functions of (spec, master seed); every
number in summary.json is recomputable from the raw CSVs alone (the
bootstrap seed lives in the manifest/summary).  Completed cells are skipped
on resume after their checksums verify.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import struct
import time
from dataclasses import dataclass, field as dc_field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .annealer import AnnealConfig, run_replica_batch
from .core import build_kernel
from .observables import DefectHistogram, ResidualEnergySeries, slice_defect_counts
from .analysis import (
    boltzmann_distribution,
    cumulant_ratio_fit,
    cumulants,
    fit_beta_bl,
    fit_power_law,
    gaussian_pmf,
    l1_distance,
)
from .rng import cell_seed, mix_seed

log = logging.getLogger("sqakz")

DEFAULT_TA = [2**k for k in range(2, 14)]  # 4 .. 8192

_COMPAT_FIELDS = ("master_seed", "beta_eff", "histogram_mode", "init_mode",
                  "warmup_sweeps", "literal_eq6_bounds", "sweep_order")


class ConfigError(ValueError):
    """Bad experiment specification or incompatible resume target."""


@dataclass
class ExperimentSpec:
    """Grid of simulation cells plus analysis settings.

    Config files are flat JSON documents with exactly these field names.
    """

    out_dir: str
    system: str = "closed"
    L: list = dc_field(default_factory=lambda: [64])
    p_multipliers: list = dc_field(default_factory=lambda: [4])
    alpha: list = dc_field(default_factory=lambda: [0.0])
    ta: list = dc_field(default_factory=lambda: list(DEFAULT_TA))
    samples: int = 100
    beta_eff: float = 1.0
    master_seed: int = 20240501
    histogram_mode: str = "all_slices"
    powerlaw_window: tuple = (16, 8192)
    ratio_window: tuple = (4, 118)
    init_mode: str = "random"
    warmup_sweeps: int = 0
    literal_eq6_bounds: bool = False
    sweep_order: str = "random"
    threads: int | None = None

    def __post_init__(self):
        if self.system not in ("closed", "open"):
            raise ConfigError(f"system must be 'closed' or 'open', got {self.system!r}")
        for name in ("L", "p_multipliers", "alpha", "ta"):
            if not list(getattr(self, name)):
                raise ConfigError(f"{name} must be a nonempty list")
        self.L = [int(v) for v in self.L]
        self.p_multipliers = [int(v) for v in self.p_multipliers]
        self.alpha = [float(v) for v in self.alpha]
        self.ta = sorted(int(v) for v in self.ta)
        if any(v < 2 for v in self.L):
            raise ConfigError("all L must be >= 2")
        if any(v < 1 for v in self.p_multipliers):
            raise ConfigError("all P multipliers must be >= 1")
        if any(v < 0 for v in self.alpha):
            raise ConfigError("all alpha must be >= 0")
        if any(v < 1 for v in self.ta):
            raise ConfigError("all ta must be >= 1")
        if self.system == "closed" and any(a != 0.0 for a in self.alpha):
            raise ConfigError("closed system requires alpha = [0]")
        if self.samples < 1:
            raise ConfigError("samples must be >= 1")
        if not (self.beta_eff > 0):
            raise ConfigError("beta_eff must be positive")
        if self.histogram_mode not in ("all_slices", "single_slice"):
            raise ConfigError("histogram_mode must be all_slices or single_slice")
        self.powerlaw_window = tuple(self.powerlaw_window)
        self.ratio_window = tuple(self.ratio_window)
        if len(self.powerlaw_window) != 2 or len(self.ratio_window) != 2:
            raise ConfigError("fit windows must be [lo, hi] pairs")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "out_dir" not in d:
            raise ConfigError("config must set out_dir")
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentSpec":
        try:
            d = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["powerlaw_window"] = list(self.powerlaw_window)
        d["ratio_window"] = list(self.ratio_window)
        return d

    def cells(self):
        """Yield (L, P, alpha, ta) in a stable order."""
        for L in self.L:
            for m in self.p_multipliers:
                for a in self.alpha:
                    for t in self.ta:
                        yield L, m * L, a, t


def group_key(L: int, P: int, alpha: float) -> str:
    return f"L{L}_P{P}_alpha{alpha:g}"


def _alpha_bits(alpha: float) -> int:
    return struct.unpack("<Q", struct.pack("<d", float(alpha)))[0]


def cell_replica_seeds(master_seed: int, L: int, P: int, alpha: float,
                       ta: int, samples: int) -> list[int]:
    """Per-replica seeds; depend only on the cell coordinates, never on
    execution order, so interrupted and fresh runs agree."""
    base = cell_seed(master_seed, L, P, _alpha_bits(alpha), ta)
    return [mix_seed(base, r) for r in range(samples)]


def analysis_seed(master_seed: int, L: int, P: int, alpha: float) -> int:
    return cell_seed(master_seed, L, P, _alpha_bits(alpha), 0xB00757)


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# file formats

def write_kinks_csv(path: Path, kinks: np.ndarray) -> None:
    R, P = kinks.shape
    lines = ["replica,slice,n"]
    for r in range(R):
        row = kinks[r]
        for s in range(P):
            lines.append(f"{r + 1},{s + 1},{row[s]}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_kinks_csv(path: Path) -> np.ndarray:
    rows = Path(path).read_text().strip().splitlines()
    if rows[0] != "replica,slice,n":
        raise ValueError(f"{path}: unexpected header {rows[0]!r}")
    data = np.array([[int(x) for x in line.split(",")] for line in rows[1:]],
                    dtype=np.int64)
    R = int(data[:, 0].max())
    P = int(data[:, 1].max())
    out = np.zeros((R, P), dtype=np.int64)
    out[data[:, 0] - 1, data[:, 1] - 1] = data[:, 2]
    return out


def write_histogram_csv(path: Path, counts: np.ndarray) -> None:
    lines = ["n,count"]
    for n, c in enumerate(counts):
        lines.append(f"{n},{c}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_histogram_csv(path: Path) -> np.ndarray:
    rows = Path(path).read_text().strip().splitlines()
    if rows[0] != "n,count":
        raise ValueError(f"{path}: unexpected header {rows[0]!r}")
    return np.array([int(line.split(",")[1]) for line in rows[1:]], dtype=np.int64)


def write_eres_csv(path: Path, series: ResidualEnergySeries) -> None:
    lines = ["ta,mean,stderr,n_samples"]
    for ta, mean, err, n in series:
        lines.append(f"{int(ta)},{float(mean)!r},{float(err)!r},{int(n)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_eres_csv(path: Path) -> ResidualEnergySeries:
    rows = Path(path).read_text().strip().splitlines()
    if rows[0] != "ta,mean,stderr,n_samples":
        raise ValueError(f"{path}: unexpected header {rows[0]!r}")
    ta, mean, err, n = [], [], [], []
    for line in rows[1:]:
        a, b, c, d = line.split(",")
        ta.append(int(a)); mean.append(float(b)); err.append(float(c)); n.append(int(d))
    return ResidualEnergySeries(ta=np.array(ta, dtype=np.int64),
                                mean=np.array(mean), stderr=np.array(err),
                                n_samples=np.array(n, dtype=np.int64))


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    raise TypeError(f"not JSON serializable: {type(o)}")


def _write_json(path: Path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True,
                                     default=_json_default) + "\n")


# ---------------------------------------------------------------------------
# manifest

class RunManifest:
    """On-disk record of what ran: seeds, checksums, timing."""

    FILENAME = "manifest.json"

    def __init__(self, out_dir: Path, spec: ExperimentSpec, data: dict | None = None):
        self.out_dir = Path(out_dir)
        self.spec = spec
        now = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        if data is None:
            data = {"format": 1, "code_version": __version__,
                    "created": now, "updated": now,
                    "spec": spec.to_dict(), "groups": {}}
        self.data = data

    @property
    def path(self) -> Path:
        return self.out_dir / self.FILENAME

    @classmethod
    def load_or_create(cls, out_dir: Path, spec: ExperimentSpec) -> "RunManifest":
        out_dir = Path(out_dir)
        mpath = out_dir / cls.FILENAME
        if mpath.exists():
            data = json.loads(mpath.read_text())
            old = data.get("spec", {})
            for name in _COMPAT_FIELDS:
                new_v = getattr(spec, name)
                if name in old and old[name] != new_v:
                    raise ConfigError(
                        f"resume mismatch in {out_dir}: {name} was {old[name]!r},"
                        f" requested {new_v!r}")
            data["spec"] = spec.to_dict()
            data["code_version"] = __version__
            return cls(out_dir, spec, data)
        return cls(out_dir, spec)

    def save(self) -> None:
        self.data["updated"] = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
        self.out_dir.mkdir(parents=True, exist_ok=True)
        _write_json(self.path, self.data)

    def group(self, L: int, P: int, alpha: float) -> dict:
        key = group_key(L, P, alpha)
        return self.data["groups"].setdefault(
            key, {"L": L, "P": P, "alpha": alpha, "cells": {},
                  "derived_files": {}})

    def cell_complete(self, L: int, P: int, alpha: float, ta: int,
                      samples: int) -> bool:
        """Done, with matching sample count and intact files."""
        g = self.data["groups"].get(group_key(L, P, alpha))
        if not g:
            return False
        cell = g["cells"].get(str(ta))
        if not cell or cell.get("status") != "done" or cell.get("samples") != samples:
            return False
        gdir = self.out_dir / group_key(L, P, alpha)
        for fname, digest in cell.get("files", {}).items():
            fpath = gdir / fname
            if not fpath.exists() or sha256_file(fpath) != digest:
                log.warning("checksum mismatch for %s; cell will be recomputed", fpath)
                return False
        return True

    def record_cell(self, L: int, P: int, alpha: float, ta: int, samples: int,
                    seeds: list[int], files: dict[str, str],
                    wall_seconds: float, attempts: int) -> None:
        g = self.group(L, P, alpha)
        g["cells"][str(ta)] = {
            "status": "done", "samples": samples,
            "seeds": [f"{s:#018x}" for s in seeds],
            "files": files, "wall_seconds": wall_seconds,
            "attempts": attempts,
        }

    def record_derived(self, L: int, P: int, alpha: float,
                       files: dict[str, str]) -> None:
        self.group(L, P, alpha)["derived_files"] = files


# ---------------------------------------------------------------------------
# per-group analysis (pure function of the raw CSVs + windows + seed)

def group_histograms(gdir: Path, L: int, mode: str,
                     slice_index: int = 0) -> dict[int, DefectHistogram]:
    """Per-ta histograms rebuilt from the raw kink files of a group."""
    out = {}
    for path in sorted(Path(gdir).glob("kinks_ta*.csv")):
        ta = int(path.stem.split("ta")[1])
        kinks = read_kinks_csv(path)
        if mode == "all_slices":
            obs = [row for row in kinks]
        else:
            obs = [row[slice_index:slice_index + 1] for row in kinks]
        out[ta] = DefectHistogram.from_observations(L, obs, provenance=mode)
    return dict(sorted(out.items()))


def group_eres_series(gdir: Path, L: int, P: int) -> ResidualEnergySeries:
    samples = {}
    for path in sorted(Path(gdir).glob("kinks_ta*.csv")):
        ta = int(path.stem.split("ta")[1])
        kinks = read_kinks_csv(path)
        samples[ta] = 2.0 * kinks.sum(axis=1) / (L * P)
    if not samples:
        raise ValueError(f"no raw kink files under {gdir}")
    return ResidualEnergySeries.from_samples(samples)


def analyze_group(gdir: Path, L: int, P: int, alpha: float, beta_eff: float,
                  histogram_mode: str, powerlaw_window: tuple,
                  ratio_window: tuple, seed: int,
                  n_resamples: int = 1000) -> dict:
    """Recompute eres.csv and summary.json for one (L, P, alpha) directory."""
    gdir = Path(gdir)
    hists = group_histograms(gdir, L, histogram_mode)
    series = group_eres_series(gdir, L, P)
    cells = {}
    for j, (ta, hist) in enumerate(hists.items()):
        row = {"n_samples": len(hist.obs_by_replica),
               "n_observations": hist.total}
        idx = int(np.nonzero(series.ta == ta)[0][0])
        row["e_res_mean"] = float(series.mean[idx])
        row["e_res_stderr"] = float(series.stderr[idx])
        cs = cumulants(hist, n_resamples=n_resamples, seed=seed + 17 * (j + 1))
        row.update(kappa1=cs.kappa1, kappa2=cs.kappa2, kappa3=cs.kappa3,
                   kappa1_err=cs.err1, kappa2_err=cs.err2, kappa3_err=cs.err3)
        bl = fit_beta_bl(hist)
        row["beta_bl"] = bl.params["beta_bl"]
        row["beta_bl_l1"] = bl.metric
        row["beta_bl_at_bound"] = bl.at_bound
        if cs.kappa2 > 0.0:
            q = gaussian_pmf(np.arange(L), cs.kappa1, cs.kappa2)
            row["gaussian_l1"] = l1_distance(q, hist.pmf())
        else:
            row["gaussian_l1"] = None
        cells[str(ta)] = row

    summary = {"L": L, "P": P, "alpha": alpha, "beta_eff": beta_eff,
               "histogram_mode": histogram_mode,
               "bootstrap_resamples": n_resamples,
               "analysis_seed": f"{seed:#018x}",
               "windows": {"power_law": list(powerlaw_window),
                           "ratio": list(ratio_window)},
               "cells": cells}
    try:
        fit = fit_power_law(series, powerlaw_window)
        summary["power_law_fit"] = fit.to_dict()
    except ValueError as exc:
        summary["power_law_fit"] = None
        summary["power_law_fit_error"] = str(exc)
    try:
        rfit = cumulant_ratio_fit(list(hists.items()), ratio_window,
                                  n_resamples=n_resamples, seed=seed)
        summary["ratio_fit"] = rfit.to_dict()
    except ValueError as exc:
        summary["ratio_fit"] = None
        summary["ratio_fit_error"] = str(exc)

    write_eres_csv(gdir / "eres.csv", series)
    _write_json(gdir / "summary.json", summary)
    return summary


# ---------------------------------------------------------------------------
# experiment driver

def resolve_threads(requested: int | None = None) -> int:
    """--threads flag, else SQAKZ_THREADS, else all available cores."""
    import numba

    if requested is None:
        env = os.environ.get("SQAKZ_THREADS")
        requested = int(env) if env else os.cpu_count() or 1
    n = max(1, min(int(requested), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)
    return n


def run_experiment(spec: ExperimentSpec, resume: bool = True,
                   threads: int | None = None) -> RunManifest:
    """Run every cell of the grid; idempotent over completed cells.

    Replicas within a cell run in parallel inside the compiled engine; a
    single writer then persists the cell's files.  Rerunning with the same
    spec reproduces byte-identical raw CSVs.
    """
    out = Path(spec.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest.load_or_create(out, spec)
    nthreads = resolve_threads(threads if threads is not None else spec.threads)
    log.info("running %s with %d worker thread(s)", spec.out_dir, nthreads)

    for L in spec.L:
        for m in spec.p_multipliers:
            P = m * L
            for alpha in spec.alpha:
                gdir = out / group_key(L, P, alpha)
                gdir.mkdir(parents=True, exist_ok=True)
                for ta in spec.ta:
                    if resume and manifest.cell_complete(L, P, alpha, ta, spec.samples):
                        log.debug("skip complete cell %s ta=%d",
                                  group_key(L, P, alpha), ta)
                        continue
                    _run_cell(manifest, gdir, spec, L, P, alpha, ta)
                    manifest.save()
                seed = analysis_seed(spec.master_seed, L, P, alpha)
                analyze_group(gdir, L, P, alpha, spec.beta_eff,
                              spec.histogram_mode, spec.powerlaw_window,
                              spec.ratio_window, seed)
                manifest.record_derived(L, P, alpha, {
                    name: sha256_file(gdir / name)
                    for name in ("eres.csv", "summary.json")})
                manifest.save()
    return manifest


def _run_cell(manifest: RunManifest, gdir: Path, spec: ExperimentSpec,
              L: int, P: int, alpha: float, ta: int) -> None:
    seeds = cell_replica_seeds(spec.master_seed, L, P, alpha, ta, spec.samples)
    config = AnnealConfig(L=L, ta=ta, P=P, beta_eff=spec.beta_eff, alpha=alpha,
                          init_mode=spec.init_mode,
                          warmup_sweeps=spec.warmup_sweeps,
                          literal_eq6_bounds=spec.literal_eq6_bounds,
                          sweep_order=spec.sweep_order)
    t0 = time.perf_counter()
    results = run_replica_batch(config, seeds)
    wall = time.perf_counter() - t0
    kinks = np.stack([slice_defect_counts(r.final_field.spins) for r in results])
    counts = np.zeros(L, dtype=np.int64)
    if spec.histogram_mode == "all_slices":
        for row in kinks:
            counts += np.bincount(row, minlength=L)
    else:
        counts += np.bincount(kinks[:, 0], minlength=L)

    kpath = gdir / f"kinks_ta{ta}.csv"
    hpath = gdir / f"histogram_ta{ta}.csv"
    write_kinks_csv(kpath, kinks)
    write_histogram_csv(hpath, counts)
    attempts = spec.samples * (ta + spec.warmup_sweeps) * L * P
    manifest.record_cell(L, P, alpha, ta, spec.samples, seeds,
                         {kpath.name: sha256_file(kpath),
                          hpath.name: sha256_file(hpath)},
                         wall, attempts)
    log.info("cell %s ta=%d: %d replicas, %.2fs (%.2e attempts/s)",
             group_key(L, P, alpha), ta, spec.samples, wall,
             attempts / wall if wall > 0 else float("inf"))


# ---------------------------------------------------------------------------
# merging across runs

def _load_manifest(root: Path) -> dict:
    mpath = Path(root) / RunManifest.FILENAME
    if not mpath.exists():
        raise ConfigError(f"no manifest under {root}")
    return json.loads(mpath.read_text())


def merge_results(roots: list, out_dir=None) -> dict:
    """Combine cell tables from one or more run directories.

    Compatible manifests must agree on the dynamics-affecting settings;
    overlapping cells with identical seeds are deduplicated with a warning
    and conflicting seeds are a manifest mismatch.  Writes long-format CSVs
    (one row per cell or group) under out_dir, default <first root>/merged.
    """
    roots = [Path(r) for r in roots]
    manifests = [_load_manifest(r) for r in roots]
    base = manifests[0]["spec"]
    for m, r in zip(manifests[1:], roots[1:]):
        for name in _COMPAT_FIELDS[1:]:  # master seeds may differ across runs
            if m["spec"].get(name) != base.get(name):
                raise ConfigError(
                    f"manifest mismatch: {name} differs in {r}")

    rows = {}        # (L, P, alpha, ta) -> dict
    group_rows = {}  # (L, P, alpha) -> summary dict
    for root, man in zip(roots, manifests):
        for gkey, g in sorted(man["groups"].items()):
            gdir = root / gkey
            summary = json.loads((gdir / "summary.json").read_text())
            group_rows.setdefault((g["L"], g["P"], g["alpha"]), summary)
            for ta_str, cell in sorted(g["cells"].items(), key=lambda kv: int(kv[0])):
                key = (g["L"], g["P"], g["alpha"], int(ta_str))
                entry = {"seeds": tuple(cell["seeds"]),
                         "summary_cell": summary["cells"].get(ta_str),
                         "root": str(root)}
                if key in rows:
                    if rows[key]["seeds"] == entry["seeds"]:
                        log.warning("duplicate cell %s (identical seeds); "
                                    "keeping first occurrence", key)
                        continue
                    raise ConfigError(
                        f"manifest mismatch: cell {key} present with different "
                        f"seeds in {rows[key]['root']} and {root}")
                rows[key] = entry

    out_dir = Path(out_dir) if out_dir is not None else roots[0] / "merged"
    out_dir.mkdir(parents=True, exist_ok=True)

    def fmt(v):
        return "" if v is None else repr(v) if isinstance(v, float) else str(v)

    eres_lines = ["L,P,alpha,ta,mean,stderr,n_samples"]
    cum_lines = ["L,P,alpha,ta,kappa1,kappa1_err,kappa2,kappa2_err,kappa3,kappa3_err"]
    l1_lines = ["L,P,alpha,ta,l1_gaussian,l1_boltzmann,beta_bl"]
    for (L, P, alpha, ta), entry in sorted(rows.items()):
        c = entry["summary_cell"]
        if c is None:
            continue
        pre = f"{L},{P},{alpha:g},{ta}"
        eres_lines.append(f"{pre},{fmt(c['e_res_mean'])},{fmt(c['e_res_stderr'])},"
                          f"{c['n_samples']}")
        cum_lines.append(f"{pre},{fmt(c['kappa1'])},{fmt(c['kappa1_err'])},"
                         f"{fmt(c['kappa2'])},{fmt(c['kappa2_err'])},"
                         f"{fmt(c['kappa3'])},{fmt(c['kappa3_err'])}")
        l1_lines.append(f"{pre},{fmt(c['gaussian_l1'])},{fmt(c['beta_bl_l1'])},"
                        f"{fmt(c['beta_bl'])}")

    fit_lines = ["L,P,alpha,b,b_stderr,window_lo,window_hi,r_squared,n_points"]
    ratio_lines = ["L,P,alpha,k2_over_k1,k2_err,k3_over_k1,k3_err,window_lo,window_hi"]
    for (L, P, alpha), summary in sorted(group_rows.items()):
        fit = summary.get("power_law_fit")
        if fit:
            fit_lines.append(f"{L},{P},{alpha:g},{fmt(fit['params']['b'])},"
                             f"{fmt(fit['stderr'])},{fmt(fit['window'][0])},"
                             f"{fmt(fit['window'][1])},{fmt(fit['metric'])},"
                             f"{fit['n_points']}")
        rfit = summary.get("ratio_fit")
        if rfit:
            ratio_lines.append(f"{L},{P},{alpha:g},{fmt(rfit['k2_over_k1'])},"
                               f"{fmt(rfit['k2_err'])},{fmt(rfit['k3_over_k1'])},"
                               f"{fmt(rfit['k3_err'])},{fmt(rfit['window'][0])},"
                               f"{fmt(rfit['window'][1])}")

    # Trotter-convergence panels: same (L, alpha), several P
    by_la = {}
    for (L, P, alpha, ta) in rows:
        by_la.setdefault((L, alpha), set()).add(P)
    trot_lines = ["L,alpha,ta,P,mean,stderr"]
    for (L, alpha), ps in sorted(by_la.items()):
        if len(ps) < 2:
            continue
        for P in sorted(ps):
            for (L2, P2, a2, ta), entry in sorted(rows.items()):
                if (L2, P2, a2) == (L, P, alpha) and entry["summary_cell"]:
                    c = entry["summary_cell"]
                    trot_lines.append(f"{L},{alpha:g},{ta},{P},"
                                      f"{fmt(c['e_res_mean'])},"
                                      f"{fmt(c['e_res_stderr'])}")

    written = {}
    for name, lines in (("eres_merged.csv", eres_lines),
                        ("cumulants_merged.csv", cum_lines),
                        ("l1_merged.csv", l1_lines),
                        ("fits_merged.csv", fit_lines),
                        ("ratios_merged.csv", ratio_lines),
                        ("trotter_merged.csv", trot_lines)):
        path = out_dir / name
        path.write_text("\n".join(lines) + "\n")
        written[name] = path
    return written
