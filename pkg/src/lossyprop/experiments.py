"""Experiment runner behind the ``lossyprop`` command line.

Each experiment turns an :class:`ExperimentConfig` into an
:class:`ExperimentResult`: a flat table of records plus a metadata block
(config echo, library version, timing, summary statistics). Results are
written as CSV (metadata on ``#`` comment lines) or JSON.
"""

from __future__ import annotations

import csv
import dataclasses
import datetime as _dt
import io
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .ensembles import Distribution, EnsembleSpec, SweepSpec, run_sweep, sweep_states
from .exceptions import ConfigError, InsufficientData
from .fock import check_cutoff, noon_state
from .medium import ChannelPair, ConstantProfile, PiecewiseConstantProfile, profile_from_dict
from .metrics import FIELDS
from .propagation import single_mode_output
from .splitter import loglog_slope, single_mode_convergence

EXPERIMENTS = (
    "noon-decay",
    "ensemble-coherence",
    "ensemble-negativity",
    "oracle-convergence",
    "single-mode",
)

SWEEP_COLUMNS = ("x", "state_index") + FIELDS

DEFAULT_X_MAX = {"noon-decay": 5.0, "ensemble-coherence": 30.0, "ensemble-negativity": 30.0}


# ---------------------------------------------------------------------------
# Plateau detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlateauReport:
    mid_slope: float
    tail_slope: float
    plateau_flag: bool

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _fit_slope(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.polyfit(x, y, 1)[0])


def detect_plateau(distances, values, window: int = 5, ratio: float = 0.8) -> PlateauReport:
    """Look for a mid-range flattening in a decaying positive series.

    Slopes are fitted to ``log(values)``. ``mid_slope`` is the smallest-magnitude
    sliding-window slope among windows lying inside the middle third of the
    points; ``tail_slope`` is one fit over the final third. A plateau is
    flagged when ``|mid_slope| < ratio * |tail_slope|``.

    Raises:
        InsufficientData: fewer than 10 points, a window that does not fit in
            the middle third, or non-positive values.
    """
    x = np.asarray(distances, dtype=float)
    v = np.asarray(values, dtype=float)
    if x.shape != v.shape or x.ndim != 1:
        raise InsufficientData("distances and values must be 1-D and equally long")
    n = x.size
    if n < 10:
        raise InsufficientData(f"need at least 10 points, got {n}")
    if window < 2:
        raise InsufficientData("window must cover at least 2 points")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise InsufficientData("values must be finite and positive to take logarithms")
    y = np.log(v)
    third = n // 3
    mid_lo, mid_hi = third, n - third  # middle third is [mid_lo, mid_hi)
    if mid_hi - mid_lo < window:
        raise InsufficientData(f"middle third has fewer than {window} points")
    mid = [
        _fit_slope(x[i:i + window], y[i:i + window])
        for i in range(mid_lo, mid_hi - window + 1)
    ]
    mid_slope = min(mid, key=abs)
    tail_slope = _fit_slope(x[n - third:], y[n - third:])
    return PlateauReport(mid_slope, tail_slope, bool(abs(mid_slope) < ratio * abs(tail_slope)))


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class ExperimentConfig:
    """Everything needed to run (and re-run) one experiment.

    Distances in km, rates in 1/km. ``profile`` optionally replaces the
    constant media with the serialized form of a :class:`ChannelPair`.
    """

    experiment: str
    n: int = 10
    mu_a: float = 0.2
    mu_b: float = 0.2
    eta_a: float = 1.0
    eta_b: float = 1.0
    x_min: float = 0.0
    x_max: float | None = None
    steps: int = 101
    x: float = 1.0
    count: int = 25
    seed: int = 20100101
    distribution: str = "sphere"
    subspace: list | None = None
    depth: float = 1.0
    m_values: list = field(default_factory=lambda: [10, 100, 1000, 10000])
    window: int = 5
    ratio: float = 0.8
    profile: dict | None = None
    output_path: str | None = None
    output_format: str = "csv"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.x_max is None:
            self.x_max = DEFAULT_X_MAX.get(self.experiment, 5.0)
        for name in ("mu_a", "mu_b", "eta_a", "eta_b", "x_min", "x_max", "x", "depth", "ratio"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(f"{name} must be a finite number, got {value!r}")
        if self.mu_a < 0 or self.mu_b < 0:
            raise ConfigError("extinction coefficients must be >= 0")
        if self.depth < 0:
            raise ConfigError("depth must be >= 0")
        check_cutoff(self.n)
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.output_format!r}")
        Distribution(self.distribution)
        if any(int(m) < 1 for m in self.m_values):
            raise ConfigError("splitter counts must be >= 1")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        return cls(**data)

    def channels(self) -> ChannelPair:
        if self.profile is not None:
            try:
                return ChannelPair(
                    profile_from_dict(self.profile["a"]), profile_from_dict(self.profile["b"])
                )
            except (KeyError, TypeError) as exc:
                raise ConfigError(f"malformed profile: {exc}") from exc
        return ChannelPair(ConstantProfile(self.mu_a, self.eta_a), ConstantProfile(self.mu_b, self.eta_b))

    def sweep(self) -> SweepSpec:
        return SweepSpec(self.x_min, self.x_max, self.steps, self.channels())

    def ensemble(self) -> EnsembleSpec:
        mask = None
        if self.subspace:
            mask = np.zeros((self.n + 1, self.n + 1), dtype=bool)
            for l, m in self.subspace:
                if not (0 <= l <= self.n and 0 <= m <= self.n):
                    raise ConfigError(f"subspace entry ({l}, {m}) outside cutoff {self.n}")
                mask[l, m] = True
        return EnsembleSpec(self.distribution, self.n, self.count, self.seed, mask)


def load_profile_file(path) -> dict:
    """Read a piecewise-constant medium JSON file into ``ChannelPair.to_dict`` form.

    The file holds either a list of ``{until_km, mu, eta}`` segments used for
    both channels, or ``{"a": [...], "b": [...]}``.
    """
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"profile file is not valid JSON: {exc}") from exc
    if isinstance(data, list):
        seg_a = seg_b = data
    elif isinstance(data, dict) and {"a", "b"} <= set(data):
        seg_a, seg_b = data["a"], data["b"]
    else:
        raise ConfigError("profile must be a segment list or an object with 'a' and 'b'")
    pair = ChannelPair(
        PiecewiseConstantProfile.from_segments(seg_a),
        PiecewiseConstantProfile.from_segments(seg_b),
    )
    return pair.to_dict()


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    columns: tuple[str, ...]
    rows: list[tuple]
    metadata: dict[str, Any]

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows])


def _sweep_rows(result) -> list[tuple]:
    return [
        (rec.x, i) + tuple(getattr(rec, f) for f in FIELDS)
        for i, rec in result.flat_records()
    ]


def _log_slope(xs, values) -> float:
    return float(np.polyfit(np.asarray(xs), np.log(np.asarray(values)), 1)[0])


def _run_noon(cfg: ExperimentConfig):
    result = sweep_states([noon_state(cfg.n)], cfg.sweep())
    coh = result.series("coherence_power")[0]
    summary = {"log_coherence_slope": _log_slope(result.distances, coh)}
    try:
        summary["plateau"] = detect_plateau(result.distances, coh, cfg.window, cfg.ratio).as_dict()
    except InsufficientData as exc:
        summary["plateau"] = {"skipped": str(exc)}
    return SWEEP_COLUMNS, _sweep_rows(result), summary


def _aggregates_dict(result) -> dict:
    return {
        metric: {stat: arr.tolist() for stat, arr in stats.items()}
        for metric, stats in result.aggregates.items()
    }


def _run_ensemble_coherence(cfg: ExperimentConfig):
    result = run_sweep(cfg.ensemble(), cfg.sweep())
    median = result.aggregates["coherence_power"]["median"]
    summary = {
        "distances": result.distances.tolist(),
        "aggregates": _aggregates_dict(result),
        "plateau": detect_plateau(result.distances, median, cfg.window, cfg.ratio).as_dict(),
    }
    return SWEEP_COLUMNS, _sweep_rows(result), summary


def _run_ensemble_negativity(cfg: ExperimentConfig):
    sweep = cfg.sweep()
    result = run_sweep(cfg.ensemble(), sweep)
    reference = sweep_states([noon_state(cfg.n)], sweep)
    summary = {
        "distances": result.distances.tolist(),
        "aggregates": _aggregates_dict(result),
        "noon_negativity": reference.series("negativity")[0].tolist(),
    }
    return SWEEP_COLUMNS, _sweep_rows(result), summary


def _run_single_mode(cfg: ExperimentConfig):
    profile = cfg.channels().channel_a
    rho = single_mode_output(cfg.n, profile, cfg.x)
    pops = rho.populations()
    rows = [(cfg.x, k, float(p)) for k, p in enumerate(pops)]
    summary = {
        "optical_depth": profile.optical_depth(cfg.x),
        "mean_photon_number": rho.mean_photon_number(),
    }
    return ("x", "photon_number", "population"), rows, summary


def _run_oracle(cfg: ExperimentConfig):
    ms = [int(m) for m in cfg.m_values]
    errors = single_mode_convergence(cfg.n, cfg.depth, ms)
    rows = [(m, e) for m, e in zip(ms, errors)]
    summary = {"depth": cfg.depth}
    if len(ms) >= 2 and all(e > 0 for e in errors):
        summary["loglog_slope"] = loglog_slope(ms, errors)
    return ("m", "max_abs_error"), rows, summary


_RUNNERS = {
    "noon-decay": _run_noon,
    "ensemble-coherence": _run_ensemble_coherence,
    "ensemble-negativity": _run_ensemble_negativity,
    "single-mode": _run_single_mode,
    "oracle-convergence": _run_oracle,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run one experiment in memory; see :func:`write_result` for persistence."""
    started = _dt.datetime.now(_dt.timezone.utc)
    t0 = time.perf_counter()
    columns, rows, summary = _RUNNERS[config.experiment](config)
    metadata = {
        "experiment": config.experiment,
        "config": config.to_dict(),
        "seed": config.seed,
        "library_version": __version__,
        "started_utc": started.isoformat(),
        "wall_clock_s": time.perf_counter() - t0,
        "columns": list(columns),
        "summary": summary,
    }
    return ExperimentResult(tuple(columns), rows, metadata)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def format_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    buf.write("# metadata: " + json.dumps(result.metadata) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(result.columns)
    for row in result.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def format_json(result: ExperimentResult) -> str:
    payload = {
        "metadata": result.metadata,
        "records": [dict(zip(result.columns, row)) for row in result.rows],
    }
    return json.dumps(payload, indent=1)


def write_result(result: ExperimentResult, path, fmt: str = "csv") -> None:
    text = format_csv(result) if fmt == "csv" else format_json(result)
    Path(path).write_text(text)


def _parse_cell(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_csv(text: str) -> ExperimentResult:
    metadata: dict = {}
    lines = []
    for line in text.splitlines():
        if line.startswith("# metadata: "):
            metadata = json.loads(line[len("# metadata: "):])
        elif line and not line.startswith("#"):
            lines.append(line)
    reader = csv.reader(lines)
    columns = tuple(next(reader))
    rows = [tuple(_parse_cell(c) for c in row) for row in reader]
    return ExperimentResult(columns, rows, metadata)


def parse_json(text: str) -> ExperimentResult:
    payload = json.loads(text)
    columns = tuple(payload["metadata"]["columns"])
    rows = [tuple(rec[c] for c in columns) for rec in payload["records"]]
    return ExperimentResult(columns, rows, payload["metadata"])


def read_result(path) -> ExperimentResult:
    text = Path(path).read_text()
    return parse_json(text) if text.lstrip().startswith("{") else parse_csv(text)
