import math

import numpy as np
import pytest

from cvinterface import gaussian as gc
from cvinterface.criteria import X, JointCombination, joint_variance, p_diff, x_sum
from cvinterface.mc_oracle import (
    covariance_sqrt,
    estimate_joint_variance,
    sample_quadratures,
    scan_with_noise,
)
from cvinterface.scenario import FixedSource, ScenarioConfig, build_state, reference_scenario, resolve

N = 10**6


def test_vacuum_sample_variances():
    samples = sample_quadratures(gc.make_vacuum(2), N, seed=11)
    assert samples.shape == (N, 4)
    band = 3 * math.sqrt(2 / N)
    for v in samples.var(axis=0, ddof=1):
        assert abs(v - 1) < band


def test_strong_squeezing_direction():
    s = gc.make_squeezed_thermal(1e-6, 1e6)
    run = estimate_joint_variance(s, JointCombination.of((X(0), 1.0)), N, seed=5)
    assert abs(run.estimate - 1e-6) < 3 * 1e-6 * math.sqrt(2 / N)


def test_seed_determinism():
    s = build_state(resolve(reference_scenario()))
    a = sample_quadratures(s, 1000, seed=42)
    b = sample_quadratures(s, 1000, seed=42)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_quadratures(s, 1000, seed=43))


def test_mean_is_applied():
    s = gc.displace(gc.make_vacuum(1), 0, 3.0, -2.0)
    m = sample_quadratures(s, 200_000, seed=1).mean(axis=0)
    np.testing.assert_allclose(m, [3.0, -2.0], atol=0.02)


def test_vacuum_joint_estimate():
    run = estimate_joint_variance(gc.make_vacuum(2), x_sum(), N, seed=3)
    assert abs(run.estimate - 2.0) < 0.0095
    assert run.std_error == pytest.approx(run.estimate * math.sqrt(2 / N))


def test_reference_joint_estimate():
    s = build_state(resolve(reference_scenario()))
    exact = joint_variance(s, x_sum()).variance
    run = estimate_joint_variance(s, x_sum(), N, seed=2024)
    assert abs(run.estimate - exact) < 3 * run.std_error


def test_two_samples():
    run = estimate_joint_variance(gc.make_vacuum(2), x_sum(), 2, seed=9)
    assert math.isfinite(run.estimate)
    assert run.std_error == pytest.approx(run.estimate)
    with pytest.raises(ValueError):
        estimate_joint_variance(gc.make_vacuum(2), x_sum(), 1, seed=9)


def test_rejects_non_psd_matrix():
    with pytest.raises(np.linalg.LinAlgError):
        covariance_sqrt(np.diag([1.0, -0.1]))
    root = covariance_sqrt(np.diag([4.0, 0.0]))
    np.testing.assert_allclose(root, np.diag([2.0, 0.0]))


def test_seed_independence():
    s = build_state(resolve(reference_scenario()))
    a = estimate_joint_variance(s, p_diff(), 200_000, seed=1)
    b = estimate_joint_variance(s, p_diff(), 200_000, seed=2)
    assert abs(a.estimate - b.estimate) < 6 * math.hypot(a.std_error, b.std_error)


def test_error_scales_as_inverse_root_n():
    s = build_state(resolve(reference_scenario()))
    a = estimate_joint_variance(s, x_sum(), 100_000, seed=4)
    b = estimate_joint_variance(s, x_sum(), 400_000, seed=4)
    assert b.std_error / a.std_error == pytest.approx(0.5, rel=0.1)


class TestScan:
    phases = np.linspace(0, 2 * math.pi, 13)

    def test_vacuum(self):
        c = ScenarioConfig(source=FixedSource(0.0, 0.0))
        tr = scan_with_noise(c, self.phases, 100_000, seed=2024)
        assert np.all(np.abs(tr["noise_db"]) < 3 * tr["stderr_db"])
        assert list(tr.columns) == ["phase_rad", "noise_db", "stderr_db", "n", "seed"]

    def test_reference_minimum(self):
        tr = scan_with_noise(reference_scenario(), self.phases, 200_000, seed=8)
        k = int(np.argmin(tr["noise_db"]))
        assert abs(tr["noise_db"][k] + 5.5) < 3 * tr["stderr_db"][k]

    def test_deterministic(self):
        a = scan_with_noise(reference_scenario(), self.phases, 5000, seed=77)
        b = scan_with_noise(reference_scenario(), self.phases, 5000, seed=77)
        assert a.equals(b)
        assert a.to_csv() == b.to_csv()

    def test_points_use_distinct_streams(self):
        tr = scan_with_noise(ScenarioConfig(source=FixedSource(0.0, 0.0)), [0.0, 0.0], 1000, seed=3)
        assert tr["noise_db"][0] != tr["noise_db"][1]
