"""Scenario runner: configuration, time-series generation, ensemble
averaging, Gaussian fitting, recurrence analysis, and CSV persistence.

CSV schema (single run): header `t,ge_su2,ge_so2,ext_x,ext_y,ext_z,fidelity`,
17 significant digits, UTF-8, LF line endings; the fidelity column is empty
unless a perturbation strength was configured. Ensemble runs emit
`t,p_su2_mean,p_su2_std`. Metadata rides in leading `#` comment lines.
"""

import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np
from scipy.signal import find_peaks

from . import __version__
from .dynamics import build_floquet, evolve, fidelity_series
from .errors import ValidationError
from .measures import ge_record, rmt_average_ge, haar_random_state
from .spin import GcsParams, build_gcs, build_spin_system

TIMESERIES_COLUMNS = ("t", "ge_su2", "ge_so2", "ext_x", "ext_y", "ext_z", "fidelity")
ENSEMBLE_COLUMNS = ("t", "p_su2_mean", "p_su2_std")


@dataclass(frozen=True)
class EnsembleConfig:
    count: int
    placement: str = "fibonacci-sphere"
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError(f"ensemble.count must be >= 1, got {self.count}")
        if self.placement not in ("fibonacci-sphere", "seeded-uniform"):
            raise ValidationError(
                f"ensemble.placement must be fibonacci-sphere or seeded-uniform, "
                f"got {self.placement!r}")


@dataclass(frozen=True)
class RunConfig:
    J: float
    k: float
    steps: int
    initial: dict | None = None          # {"gcs": {...}} | {"basis": {...}} | {"haar": {...}}
    delta: float | None = None
    ensemble: EnsembleConfig | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.steps < 1:
            raise ValidationError(f"steps must be >= 1, got {self.steps}")
        if self.ensemble is None:
            if self.initial is None:
                raise ValidationError("initial state required when no ensemble is set")
            if len(self.initial) != 1 or next(iter(self.initial)) not in (
                    "gcs", "basis", "haar"):
                raise ValidationError(
                    f"initial must set exactly one of gcs/basis/haar, got {self.initial}")


_INITIAL_KEYS = {"gcs": {"theta", "phi"}, "basis": {"m"}, "haar": {"seed"}}


def config_from_dict(d: dict) -> RunConfig:
    """Build a RunConfig from parsed JSON, rejecting unknown keys."""
    allowed = {"J", "k", "steps", "initial", "delta", "ensemble", "output_path"}
    unknown = set(d) - allowed
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    for req in ("J", "k", "steps"):
        if req not in d:
            raise ValidationError(f"missing config key: {req}")
    initial = d.get("initial")
    if initial is not None:
        if not isinstance(initial, dict) or len(initial) != 1:
            raise ValidationError("initial must be an object with exactly one variant")
        kind, params = next(iter(initial.items()))
        if kind not in _INITIAL_KEYS:
            raise ValidationError(f"unknown initial variant: {kind!r}")
        bad = set(params) - _INITIAL_KEYS[kind]
        if bad:
            raise ValidationError(f"unknown initial.{kind} keys: {sorted(bad)}")
    ens = d.get("ensemble")
    if ens is not None:
        bad = set(ens) - {"count", "placement", "seed"}
        if bad:
            raise ValidationError(f"unknown ensemble keys: {sorted(bad)}")
        ens = EnsembleConfig(**ens)
    return RunConfig(J=d["J"], k=d["k"], steps=int(d["steps"]), initial=initial,
                     delta=d.get("delta"), ensemble=ens,
                     output_path=d.get("output_path"))


@dataclass
class TimeSeries:
    columns: tuple
    data: dict                     # column name -> array (fidelity may be None)
    metadata: dict = field(default_factory=dict)

    @property
    def t(self):
        return self.data["t"]

    def column(self, name):
        if name not in self.data or self.data[name] is None:
            raise ValidationError(f"series has no column {name!r}")
        return self.data[name]

    def write_csv(self, path: str, include_timestamp: bool = True):
        write_csv_atomic(path, self, include_timestamp)


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv_atomic(path: str, series: TimeSeries, include_timestamp: bool = True):
    """Write via temp file + rename so readers never see a partial file."""
    lines = []
    for key, val in series.metadata.items():
        lines.append(f"# {key}={val}")
    if include_timestamp:
        lines.append(f"# generated={datetime.now(timezone.utc).isoformat()}")
    lines.append(",".join(series.columns))
    cols = [series.data.get(c) for c in series.columns]
    n = len(series.t)
    for i in range(n):
        lines.append(",".join("" if col is None else _fmt(col[i]) for col in cols))
    out_dir = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=out_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_csv(path: str) -> TimeSeries:
    """Read a CSV produced by this module (metadata lines preserved)."""
    metadata, header, rows = {}, None, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                metadata[key] = val
                continue
            if header is None:
                header = tuple(line.split(","))
                continue
            rows.append(line.split(","))
    if header is None:
        raise ValidationError(f"{path}: no header line found")
    data = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in rows]
        if all(v == "" for v in vals):
            data[name] = None
        else:
            data[name] = np.array([float(v) if v else np.nan for v in vals])
    return TimeSeries(columns=header, data=data, metadata=metadata)


def initial_state(sys, cfg: RunConfig, seed=None) -> np.ndarray:
    kind, params = next(iter(cfg.initial.items()))
    if kind == "gcs":
        return build_gcs(sys, GcsParams(params["theta"], params["phi"]))
    if kind == "basis":
        m = params["m"]
        idx = round(sys.J - m)
        if not (0 <= idx < sys.N) or abs((sys.J - m) - idx) > 1e-12:
            raise ValidationError(f"basis m={m} is not a level of J={sys.J}")
        psi = np.zeros(sys.N, dtype=complex)
        psi[idx] = 1.0
        return psi
    haar_seed = params.get("seed", seed)
    if haar_seed is None:
        raise ValidationError("haar initial state needs a seed")
    return haar_random_state(sys.N, haar_seed)


def _metadata_for(cfg: RunConfig, seed) -> dict:
    echo = {"J": cfg.J, "k": cfg.k, "steps": cfg.steps, "initial": cfg.initial,
            "delta": cfg.delta,
            "ensemble": None if cfg.ensemble is None else {
                "count": cfg.ensemble.count, "placement": cfg.ensemble.placement,
                "seed": cfg.ensemble.seed}}
    return {"config": json.dumps(echo, separators=(",", ":"), sort_keys=True),
            "version": __version__, "seed": seed}


def run_timeseries(cfg: RunConfig, seed=None,
                   include_timestamp: bool = True) -> TimeSeries:
    """Evolve one initial state, recording all GE measures per kick."""
    sys = build_spin_system(cfg.J)
    U = build_floquet(sys, cfg.k)
    psi0 = initial_state(sys, cfg, seed)
    records = []
    evolve(U, psi0, cfg.steps, lambda t, psi: records.append(ge_record(sys, psi)))
    data = {
        "t": np.arange(cfg.steps + 1),
        "ge_su2": np.array([r.ge_su2 for r in records]),
        "ge_so2": np.array([r.ge_so2 for r in records]),
        "ext_x": np.array([r.ext_x for r in records]),
        "ext_y": np.array([r.ext_y for r in records]),
        "ext_z": np.array([r.ext_z for r in records]),
        "fidelity": (fidelity_series(sys, cfg.k, cfg.delta, psi0, cfg.steps)
                     if cfg.delta is not None else None),
    }
    series = TimeSeries(columns=TIMESERIES_COLUMNS, data=data,
                        metadata=_metadata_for(cfg, seed))
    if cfg.output_path:
        series.write_csv(cfg.output_path, include_timestamp)
    return series


def fibonacci_sphere(count: int) -> list[GcsParams]:
    """Deterministic quasi-uniform coherent-state centers on the sphere."""
    i = np.arange(count)
    z = 1.0 - 2.0 * (i + 0.5) / count
    golden = np.pi * (3.0 - np.sqrt(5.0))
    phi = np.mod(i * golden + np.pi, 2 * np.pi) - np.pi
    return [GcsParams(float(np.arccos(zz)), float(pp)) for zz, pp in zip(z, phi)]


def seeded_uniform_sphere(count: int, seed) -> list[GcsParams]:
    rng = np.random.default_rng(seed)
    z = rng.uniform(-1.0, 1.0, count)
    phi = rng.uniform(-np.pi, np.pi, count)
    return [GcsParams(float(np.arccos(zz)), float(pp)) for zz, pp in zip(z, phi)]


def _purity_columns(sys, Psi: np.ndarray) -> np.ndarray:
    """su(2)-purity of each column of Psi."""
    tot = np.zeros(Psi.shape[1])
    for A in (sys.Jx, sys.Jy, sys.Jz):
        B = A @ Psi
        tot += np.einsum("ij,ij->j", Psi.conj(), B).real ** 2
    return tot / sys.J ** 2


def run_ensemble(cfg: RunConfig, seed=None, threads: int = 1,
                 include_timestamp: bool = True, centers=None) -> TimeSeries:
    """Pointwise ensemble mean and standard deviation of the su(2)-purity.

    Members are evolved as columns of a single matrix per worker chunk so
    each kick is one dense matrix product; chunks are reduced in member
    index order, so the result is independent of scheduling.
    """
    if cfg.ensemble is None or cfg.ensemble.count < 2:
        raise ValidationError("run_ensemble needs an ensemble with count >= 2")
    sys = build_spin_system(cfg.J)
    U = build_floquet(sys, cfg.k)
    if centers is None:
        if cfg.ensemble.placement == "fibonacci-sphere":
            centers = fibonacci_sphere(cfg.ensemble.count)
        else:
            centers = seeded_uniform_sphere(
                cfg.ensemble.count, seed if seed is not None else cfg.ensemble.seed)

    def run_chunk(chunk):
        Psi = np.stack([build_gcs(sys, p) for p in chunk], axis=1)
        out = np.empty((cfg.steps + 1, Psi.shape[1]))
        out[0] = _purity_columns(sys, Psi)
        for t in range(1, cfg.steps + 1):
            Psi = U.rotation @ (U.kick_phases[:, None] * Psi)
            out[t] = _purity_columns(sys, Psi)
        return out

    threads = max(1, threads)
    if threads == 1 or len(centers) < 2 * threads:
        purities = run_chunk(centers)
    else:
        bounds = np.linspace(0, len(centers), threads + 1).astype(int)
        chunks = [centers[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run_chunk, chunks))
        purities = np.concatenate(parts, axis=1)
    data = {"t": np.arange(cfg.steps + 1),
            "p_su2_mean": purities.mean(axis=1),
            "p_su2_std": purities.std(axis=1)}
    series = TimeSeries(columns=ENSEMBLE_COLUMNS, data=data,
                        metadata=_metadata_for(cfg, seed))
    if cfg.output_path:
        series.write_csv(cfg.output_path, include_timestamp)
    return series


@dataclass(frozen=True)
class GaussianFit:
    a: float
    window: int          # last kick index included in the fit
    rms_residual: float


def fit_gaussian(series: TimeSeries) -> GaussianFit:
    """Fit mean purity to exp(-a t^2), intercept pinned to P(0) = 1.

    Least squares on log P over the window where P > 0.05:
    a = -sum(t^2 log P) / sum(t^4).
    """
    P = series.column("p_su2_mean")
    t = series.t.astype(float)
    mask = P > 0.05
    if mask.sum() < 3:
        raise ValidationError(
            f"only {int(mask.sum())} points with purity > 0.05; need >= 3 to fit")
    tw, logP = t[mask], np.log(P[mask])
    denom = np.sum(tw ** 4)
    a = -np.sum(tw ** 2 * logP) / denom if denom > 0 else 0.0
    a = max(a, 0.0)
    resid = logP + a * tw ** 2
    return GaussianFit(a=float(a), window=int(tw.max()),
                       rms_residual=float(np.sqrt(np.mean(resid ** 2))))


def saturation_stats(values: np.ndarray) -> tuple[float, float]:
    """Mean and std over the final third of a series (the plateau statistic)."""
    tail = values[len(values) - len(values) // 3:]
    return float(tail.mean()), float(tail.std())


@dataclass(frozen=True)
class RecurrenceReport:
    ge_peak_times: list
    ext_peak_times: list
    matched_fraction: float
    periodic: bool
    max_ge: float
    max_ext: float


def run_recurrence_analysis(series: TimeSeries) -> RecurrenceReport:
    """Match post-saturation local maxima of GE against those of the squared
    z-extent; peaks count as matched when within one kick of each other.

    The periodic flag requires at least three GE peaks whose spacing varies
    by less than 20 percent of the mean interval.
    """
    ge = series.column("ge_su2")
    ext2 = series.column("ext_z") ** 2
    if len(ge) < 50:
        raise ValidationError(f"series too short for recurrence analysis: {len(ge)}")
    plateau, _ = saturation_stats(ge)
    sat_idx = int(np.argmax(ge >= 0.9 * plateau)) if plateau > 0 else len(ge)

    def peaks(x):
        seg = x[sat_idx:]
        rng = np.ptp(x)
        if rng == 0:
            return []
        idx, _ = find_peaks(seg, prominence=0.1 * rng)
        return [int(i + sat_idx) for i in idx]

    ge_peaks, ext_peaks = peaks(ge), peaks(ext2)
    matched = sum(1 for p in ge_peaks if any(abs(p - q) <= 1 for q in ext_peaks))
    frac = matched / len(ge_peaks) if ge_peaks else 0.0
    periodic = False
    if len(ge_peaks) >= 3:
        gaps = np.diff(ge_peaks)
        periodic = bool(gaps.std() < 0.2 * gaps.mean())
    return RecurrenceReport(ge_peak_times=ge_peaks, ext_peak_times=ext_peaks,
                            matched_fraction=frac, periodic=periodic,
                            max_ge=float(ge.max()),
                            max_ext=float(series.column("ext_z").max()))


def summary_json(series: TimeSeries, J: float, fit: GaussianFit | None = None) -> dict:
    """The machine-readable summary emitted under --json."""
    col = "p_su2_mean" if "p_su2_mean" in series.data else "ge_su2"
    vals = series.column(col)
    if col == "p_su2_mean":
        vals = 1.0 - vals   # report saturation of GE, not purity
    mean, std = saturation_stats(vals)
    return {"saturation_mean": mean, "saturation_std": std,
            "fit_a": None if fit is None else fit.a,
            "fit_residual": None if fit is None else fit.rms_residual,
            "rmt_prediction": rmt_average_ge(J)}
