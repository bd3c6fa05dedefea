import math

import numpy as np
import pytest

from lossyprop.ensembles import (
    Distribution,
    EnsembleSpec,
    SweepSpec,
    run_sweep,
    sample_state,
    state_rng,
    sweep_states,
)
from lossyprop.exceptions import ConfigError, IndexOutOfRange
from lossyprop.experiments import detect_plateau
from lossyprop.fock import noon_state
from lossyprop.medium import ChannelPair

FIG4 = ChannelPair.constant(0.2, 1.0)


@pytest.mark.parametrize("dist", ["box", "sphere"])
def test_sample_is_deterministic(dist):
    spec = EnsembleSpec(dist, 3, 10, seed=42)
    a, b = sample_state(spec, 7), sample_state(spec, 7)
    assert np.array_equal(a.alpha, b.alpha)
    assert not np.array_equal(a.alpha, sample_state(spec, 6).alpha)


def test_sample_independent_of_order():
    spec = EnsembleSpec("sphere", 2, 5, seed=9)
    forward = [sample_state(spec, i).alpha for i in range(5)]
    backward = [sample_state(spec, i).alpha for i in reversed(range(5))][::-1]
    for f, b in zip(forward, backward):
        assert np.array_equal(f, b)


def test_sample_normalized():
    for dist in Distribution:
        spec = EnsembleSpec(dist, 4, 20, seed=1)
        for i in range(20):
            assert abs(np.sum(np.abs(sample_state(spec, i).alpha) ** 2) - 1) < 1e-12


def test_sphere_uniform_n1_symmetric_weights():
    count = 10_000
    spec = EnsembleSpec("sphere", 1, count, seed=2024)
    weights = np.array([np.abs(sample_state(spec, i).alpha.ravel()) ** 2 for i in range(count)])
    # |alpha_i|^2 ~ Beta(1, 3) on the 4-coefficient sphere: mean 1/4, variance 3/80
    sigma = math.sqrt(3 / 80 / count)
    assert np.all(np.abs(weights.mean(axis=0) - 0.25) < 3 * sigma)


def test_box_components_bounded_before_normalization():
    spec = EnsembleSpec("box", 2, 3, seed=5)
    rng = state_rng(5, 0)
    re, im = rng.uniform(-1, 1, (3, 3)), rng.uniform(-1, 1, (3, 3))
    raw = re + 1j * im
    np.testing.assert_allclose(sample_state(spec, 0).alpha, raw / np.linalg.norm(raw), atol=1e-15)


def test_mask_restricts_support():
    mask = np.zeros((3, 3), dtype=bool)
    mask[0, 0] = mask[2, 1] = True
    spec = EnsembleSpec("sphere", 2, 4, seed=3, mask=mask)
    alpha = sample_state(spec, 1).alpha
    assert np.all(alpha[~mask] == 0)
    assert np.all(alpha[mask] != 0)


def test_spec_errors():
    with pytest.raises(IndexOutOfRange):
        sample_state(EnsembleSpec("box", 2, 3, seed=0), 3)
    with pytest.raises(ConfigError):
        EnsembleSpec("box", 2, 0, seed=0)
    with pytest.raises(ValueError):
        EnsembleSpec("cube", 2, 1, seed=0)
    with pytest.raises(ConfigError):
        SweepSpec(2.0, 1.0, 10, FIG4)
    with pytest.raises(ConfigError):
        SweepSpec(0.0, 1.0, 1, FIG4)


def test_noon_singleton_sweep_slope():
    result = sweep_states([noon_state(10)], SweepSpec(0.0, 5.0, 51, FIG4))
    coh = result.series("coherence_power")[0]
    slope = np.polyfit(result.distances, np.log(coh), 1)[0]
    assert slope == pytest.approx(-4.0, abs=1e-9)


def test_sweep_start_is_pure():
    result = run_sweep(EnsembleSpec("sphere", 3, 4, seed=11), SweepSpec(0.0, 10.0, 5, FIG4))
    for row in result.records:
        assert row[0].purity == pytest.approx(1, abs=1e-12)
        assert row[0].trace_error <= 1e-12


def test_sweep_shapes_and_aggregates():
    count, steps = 5, 7
    result = run_sweep(EnsembleSpec("box", 3, count, seed=8), SweepSpec(0.5, 6.0, steps, FIG4))
    assert sum(1 for _ in result.flat_records()) == count * steps
    assert result.series("negativity").shape == (count, steps)
    for metric, stats in result.aggregates.items():
        assert np.all(stats["min"] <= stats["median"] + 1e-300)
        assert np.all(stats["median"] <= stats["max"])
        assert np.all(stats["min"] <= stats["mean"])
        assert np.all(stats["mean"] <= stats["max"])


def test_sweep_asymptotic_vacuum():
    result = run_sweep(EnsembleSpec("sphere", 4, 6, seed=13), SweepSpec(0.0, 250.0, 2, FIG4))
    for row in result.records:
        assert row[-1].coherence_power <= 1e-8
        assert row[-1].negativity <= 1e-8


def test_sweep_reproducible():
    ens = EnsembleSpec("sphere", 3, 3, seed=77)
    sweep = SweepSpec(0.0, 4.0, 5, FIG4)
    a, b = run_sweep(ens, sweep), run_sweep(ens, sweep)
    assert a.records == b.records


def test_sphere_ensemble_median_flattens_mid_range():
    result = run_sweep(EnsembleSpec("sphere", 10, 50, seed=2718), SweepSpec(0.0, 30.0, 31, FIG4))
    report = detect_plateau(result.distances, result.aggregates["coherence_power"]["median"])
    assert abs(report.tail_slope) > abs(report.mid_slope)
    assert report.plateau_flag
