"""Monte-Carlo check of the analytic variances.

Quadrature samples are drawn from the state's normal distribution and the
summed homodyne signal is reduced to a sample variance, the idealised
reading of a spectrum analyser at one sideband frequency.

Random numbers come from numpy's ``PCG64`` bit generator seeded through
``SeedSequence``. Standard normals are mapped with the symmetric square root
of the covariance (eigendecomposition), so results depend only on the seed,
the state and ``n``. Point ``i`` of a scan uses ``SeedSequence(seed,
spawn_key=(i,))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .criteria import JointCombination, NoiseLevel, QuadratureObservable
from .gaussian import GaussianState
from .scenario import (
    MODE_1550,
    MODE_532,
    ScenarioConfig,
    build_state,
    resolve,
    with_dark_floor,
)
from .traces import TraceSeries

RNG_ALGORITHM = "numpy.random.PCG64 via SeedSequence"
JITTER = 1e-12


def _rng(seed: int, key: tuple[int, ...] = ()) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=key)))


def covariance_sqrt(cov: np.ndarray) -> np.ndarray:
    """Symmetric square root; eigenvalues down to ``-JITTER`` are clipped to zero."""
    w, u = np.linalg.eigh(cov)
    if w[0] < -JITTER * max(1.0, float(np.max(np.abs(w)))):
        raise np.linalg.LinAlgError(
            f"covariance is not positive semidefinite (eigenvalue {w[0]:.3e})"
        )
    return (u * np.sqrt(np.clip(w, 0.0, None))) @ u.T


def sample_quadratures(state: GaussianState, n: int, seed: int,
                       key: tuple[int, ...] = ()) -> np.ndarray:
    """``n x 2N`` array of quadrature samples."""
    if n < 1:
        raise ValueError("need at least one sample")
    root = covariance_sqrt(state.cov)
    z = _rng(seed, key).standard_normal((n, 2 * state.n_modes))
    return state.mean + z @ root


@dataclass(frozen=True)
class SampleRun:
    seed: int
    n_samples: int
    combo: JointCombination
    estimate: float
    std_error: float

    @property
    def level(self) -> NoiseLevel:
        return NoiseLevel(self.estimate, self.combo.reference_variance)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_samples": self.n_samples,
            "combo": self.combo.to_dict(),
            "estimate": self.estimate,
            "std_error": self.std_error,
        }


def _sample_variance(values: np.ndarray) -> tuple[float, float]:
    n = len(values)
    est = float(np.var(values, ddof=1))
    return est, est * math.sqrt(2.0 / n)


def estimate_joint_variance(state: GaussianState, combo: JointCombination, n: int,
                            seed: int, key: tuple[int, ...] = ()) -> SampleRun:
    """Sample variance of the combined homodyne signal with its chi-square error."""
    if n < 2:
        raise ValueError("a sample variance needs n >= 2")
    v = combo.vector(state.n_modes)
    est, err = _sample_variance(sample_quadratures(state, n, seed, key) @ v)
    return SampleRun(seed, n, combo, est, err)


def scan_with_noise(config: ScenarioConfig, phases: Sequence[float], n: int, seed: int,
                    scan_arm: str = "532") -> TraceSeries:
    """Sampled counterpart of :func:`cvinterface.scenario.phase_scan`.

    ``stderr_db`` is the first-order propagation ``10 / ln 10 * stderr / estimate``.
    """
    if scan_arm not in ("532", "1550"):
        raise ValueError(f"scan_arm must be '532' or '1550', got {scan_arm!r}")
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size == 0 or not np.all(np.isfinite(phases)):
        raise ValueError("phase grid must be non-empty and finite")
    state = build_state(resolve(config))
    db = np.empty_like(phases)
    err_db = np.empty_like(phases)
    for i, phi in enumerate(phases):
        th, ph = (config.phase_1550, phi) if scan_arm == "532" else (phi, config.phase_532)
        combo = JointCombination.of(
            (QuadratureObservable(MODE_1550, th), 1.0),
            (QuadratureObservable(MODE_532, ph), 1.0),
        )
        run = estimate_joint_variance(state, combo, n, seed, key=(i,))
        var = with_dark_floor(run.estimate, config.dark_floor_db)
        db[i] = NoiseLevel(var, 2.0).rel_db
        err_db[i] = 10.0 / math.log(10.0) * run.std_error / var
    return TraceSeries(
        "mc_phase_scan",
        {
            "phase_rad": phases,
            "noise_db": db,
            "stderr_db": err_db,
            "n": np.full(phases.size, n, dtype=np.int64),
            "seed": np.full(phases.size, seed, dtype=np.int64),
        },
        {"scan_arm": scan_arm, "rng": RNG_ALGORITHM},
    )
