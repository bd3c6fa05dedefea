"""Random input ensembles and metric sweeps over propagation distance.

Every sampled state is a pure function of ``(seed, index)``: the generator
for state ``index`` is ``numpy.random.Generator(PCG64(SeedSequence(seed,
spawn_key=(index,))))``, so states are reproducible in any evaluation order.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigError, EigensolverFailure, IndexOutOfRange
from .fock import TwoModeState, check_cutoff, make_two_mode_state
from .medium import ChannelPair
from .metrics import FIELDS, MetricRecord, metric_record
from .propagation import general_output


class Distribution(str, enum.Enum):
    UNIFORM_BOX = "box"
    SPHERE_UNIFORM = "sphere"


@dataclass(frozen=True)
class EnsembleSpec:
    """Which random states to draw.

    Attributes:
        distribution: ``box`` draws real and imaginary parts uniform on
            ``[-1, 1]``; ``sphere`` draws them standard normal. Both are then
            normalized, so ``sphere`` is uniform on the unit sphere of the
            coefficient space.
        n_max: photon cutoff per mode.
        count: number of states.
        seed: root seed.
        mask: optional boolean ``(n_max+1, n_max+1)`` grid; coefficients
            outside the mask are zero.
    """

    distribution: Distribution
    n_max: int
    count: int
    seed: int
    mask: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "distribution", Distribution(self.distribution))
        check_cutoff(self.n_max)
        if self.count < 1:
            raise ConfigError("ensemble count must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.mask is not None:
            mask = np.array(self.mask, dtype=bool)
            if mask.shape != (self.n_max + 1,) * 2 or not mask.any():
                raise ConfigError("mask must be a non-empty (n_max+1) x (n_max+1) grid")
            mask.flags.writeable = False
            object.__setattr__(self, "mask", mask)


def state_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_state(spec: EnsembleSpec, index: int) -> TwoModeState:
    if not 0 <= index < spec.count:
        raise IndexOutOfRange(f"state index {index} outside [0, {spec.count})")
    rng = state_rng(spec.seed, index)
    shape = (spec.n_max + 1, spec.n_max + 1)
    if spec.distribution is Distribution.UNIFORM_BOX:
        re, im = rng.uniform(-1.0, 1.0, shape), rng.uniform(-1.0, 1.0, shape)
    else:
        re, im = rng.standard_normal(shape), rng.standard_normal(shape)
    alpha = re + 1j * im
    if spec.mask is not None:
        alpha = np.where(spec.mask, alpha, 0.0)
    return make_two_mode_state(spec.n_max, alpha)


@dataclass(frozen=True)
class SweepSpec:
    x_start: float
    x_stop: float
    steps: int
    channels: ChannelPair

    def __post_init__(self):
        if not (0 <= self.x_start < self.x_stop):
            raise ConfigError("need 0 <= x_start < x_stop")
        if self.steps < 2:
            raise ConfigError("a sweep needs at least 2 steps")

    def distances(self) -> np.ndarray:
        return np.linspace(self.x_start, self.x_stop, self.steps)


@dataclass
class SweepResult:
    """Per-state metric series plus per-distance ensemble aggregates.

    ``records[i][j]`` is the record of state ``i`` at ``distances[j]``.
    ``aggregates[metric][stat]`` is an array over distances, with ``stat`` in
    ``mean``, ``median``, ``min``, ``max``.
    """

    distances: np.ndarray
    records: list[list[MetricRecord]]
    aggregates: dict[str, dict[str, np.ndarray]]

    def series(self, metric: str) -> np.ndarray:
        """``(count, steps)`` array of one metric."""
        return np.array([[getattr(r, metric) for r in row] for row in self.records])

    def flat_records(self):
        """Yield ``(state_index, record)`` in state-major order."""
        for i, row in enumerate(self.records):
            for rec in row:
                yield i, rec


def _aggregate(values: np.ndarray) -> dict[str, np.ndarray]:
    return {
        "mean": values.mean(axis=0),
        "median": np.median(values, axis=0),
        "min": values.min(axis=0),
        "max": values.max(axis=0),
    }


def sweep_states(states, sweep: SweepSpec) -> SweepResult:
    """Metric sweep for an explicit list of states."""
    xs = sweep.distances()
    records = []
    for i, state in enumerate(states):
        row = []
        for x in xs:
            rho = general_output(state, sweep.channels, float(x))
            try:
                row.append(metric_record(rho, float(x)))
            except EigensolverFailure as exc:
                raise EigensolverFailure(str(exc), state_index=i, x=float(x)) from exc
        records.append(row)
    result = SweepResult(xs, records, {})
    result.aggregates = {name: _aggregate(result.series(name)) for name in FIELDS}
    return result


def run_sweep(ensemble: EnsembleSpec, sweep: SweepSpec) -> SweepResult:
    states = [sample_state(ensemble, i) for i in range(ensemble.count)]
    return sweep_states(states, sweep)
