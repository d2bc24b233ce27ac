"""Sideband-frequency dependence of the squeezed source.

The source is a below-threshold degenerate OPA with Lorentzian spectra

    V-/+(f) = 1 -/+ eta * 4x / ((1 -/+ x)^2 + (f / gamma)^2)

with normalised pump amplitude ``x``, cavity half-width ``gamma`` (MHz) and
escape efficiency ``eta``. Frequencies are in MHz everywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .criteria import from_db, to_db, x_sum
from .scenario import (
    MODE_1550,
    MODE_532,
    ScenarioConfig,
    evaluate,
    joint_noise,
    resolve_vbs,
    with_dark_floor,
)
from .traces import TraceSeries

BISECT_TOL = 1e-6
BISECT_MAXITER = 200


class CalibrationInfeasible(ValueError):
    """Requested landmarks cannot be met by the source model under the given losses."""

    def __init__(self, message: str, bound_db: float | None = None):
        super().__init__(message)
        self.bound_db = bound_db


@dataclass(frozen=True)
class SourceSpectrumModel:
    pump_x: float
    linewidth_mhz: float
    escape_eff: float = 1.0

    def __post_init__(self):
        for name in ("pump_x", "linewidth_mhz", "escape_eff"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not 0.0 <= self.pump_x < 1.0:
            raise ValueError(f"pump_x must lie in [0, 1), got {self.pump_x}")
        if not self.linewidth_mhz > 0:
            raise ValueError(f"linewidth must be positive, got {self.linewidth_mhz}")
        if not 0.0 < self.escape_eff <= 1.0:
            raise ValueError(f"escape efficiency must lie in (0, 1], got {self.escape_eff}")

    def variances(self, omega: float) -> tuple[float, float]:
        return source_variances(self, omega)


def source_variances(model: SourceSpectrumModel, omega: float) -> tuple[float, float]:
    """Squeezed and anti-squeezed variances at sideband frequency ``omega``."""
    if omega < 0:
        raise ValueError(f"sideband frequency must be non-negative, got {omega}")
    x, eta = model.pump_x, model.escape_eff
    w2 = (omega / model.linewidth_mhz) ** 2
    d_minus = (1.0 + x) ** 2 + w2
    d_plus = (1.0 - x) ** 2 + w2
    # same as 1 -/+ eta 4x / d, rearranged so V- has no cancellation near threshold
    v_minus = (d_plus + 4.0 * x * (1.0 - eta)) / d_minus
    v_plus = (d_minus - 4.0 * x * (1.0 - eta)) / d_plus
    return v_minus, v_plus


@dataclass(frozen=True)
class FrequencyGrid:
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ValueError("grid bounds must be finite")
        if self.start < 0:
            raise ValueError("grid must start at a non-negative frequency")
        if not self.start < self.stop:
            raise ValueError(f"grid start {self.start} must be below stop {self.stop}")
        if int(self.points) != self.points or self.points < 2:
            raise ValueError(f"grid needs an integer number of points >= 2, got {self.points}")

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, int(self.points))


def spectrum_sweep(scenario: ScenarioConfig, grid: FrequencyGrid) -> TraceSeries:
    """X-sum and P-difference noise in dB re vacuum over ``grid``.

    Each frequency is a full :func:`~cvinterface.scenario.evaluate` call with
    the analysis frequency replaced, so a VBS directive is re-resolved per point.
    """
    freqs = grid.frequencies()
    xs = np.empty_like(freqs)
    ps = np.empty_like(freqs)
    for i, f in enumerate(freqs):
        duan = evaluate(scenario.replace(analysis_freq=float(f))).duan
        xs[i] = _db_or_floor(with_dark_floor(duan.var_x_sum, scenario.dark_floor_db))
        ps[i] = _db_or_floor(with_dark_floor(duan.var_p_diff, scenario.dark_floor_db))
    return TraceSeries("spectrum", {"freq_mhz": freqs, "xsum_db": xs, "pdiff_db": ps})


def _db_or_floor(var: float) -> float:
    return -math.inf if var == 0 else to_db(var, 2.0)


def _bisect(f, lo: float, hi: float, tol: float = BISECT_TOL) -> float:
    """Root of ``f`` on ``[lo, hi]`` given ``f(lo) > 0 > f(hi)``."""
    for _ in range(BISECT_MAXITER):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def xsum_db(scenario: ScenarioConfig, model: SourceSpectrumModel, freq: float) -> float:
    """X-sum noise in dB through the covariance pipeline."""
    cfg = scenario.replace(source=model, analysis_freq=freq)
    return joint_noise(cfg, x_sum(MODE_1550, MODE_532)).rel_db


def calibrate_to_landmarks(target_db_at_ref: float, ref_freq: float,
                           crossing_db: float, crossing_freq: float,
                           scenario: ScenarioConfig,
                           escape_eff: float | None = None) -> SourceSpectrumModel:
    """Pump amplitude and linewidth reproducing two points of the X-sum spectrum.

    The losses and VBS setting come from ``scenario``; its source is ignored
    except to supply the escape efficiency when ``escape_eff`` is not given.
    The linewidth is bisected to hit ``crossing_db`` at ``crossing_freq`` for
    each trial pump, and the pump is bisected to hit ``target_db_at_ref``.

    Raises:
        CalibrationInfeasible: if a landmark lies beyond the loss-limited
            bound or the two landmarks are inconsistent with a Lorentzian.
    """
    if escape_eff is None:
        escape_eff = getattr(scenario.source, "escape_eff", 1.0)
    if scenario.vbs == "optimize":
        raise ValueError("calibration needs a fixed VBS setting (a transmittance or 'balance')")
    if ref_freq < 0 or crossing_freq < 0:
        raise ValueError("landmark frequencies must be non-negative")
    if ref_freq == crossing_freq:
        raise ValueError("landmarks must be at distinct frequencies")

    if target_db_at_ref == 0:
        return SourceSpectrumModel(0.0, crossing_freq if crossing_freq > 0 else 1.0, escape_eff)

    t = resolve_vbs(scenario)
    r = math.sqrt(1.0 - t * t)
    gain = (t * scenario.tau_532 + r * scenario.tau_1550) ** 2
    floor_var = 2.0 - gain * escape_eff
    bound_db = to_db(floor_var, 2.0) if floor_var > 0 else -math.inf
    for name, db in (("target", target_db_at_ref), ("crossing", crossing_db)):
        if db >= 0 or db <= bound_db:
            raise CalibrationInfeasible(
                f"{name} level {db} dB is outside the attainable range "
                f"({bound_db:.4f} dB, 0 dB); loss-limited bound 2 - (t tau_532 + r tau_1550)^2 "
                f"* escape_eff = {floor_var:.6g}",
                bound_db,
            )
    # suppression falls with frequency
    if (crossing_freq > ref_freq) != (crossing_db > target_db_at_ref):
        raise CalibrationInfeasible(
            "landmarks are not monotone: the lower frequency must show the deeper suppression",
            bound_db,
        )

    need_cross = (2.0 - from_db(crossing_db, 2.0)) / (gain * escape_eff)
    # smallest pump whose zero-frequency suppression exceeds the crossing level
    a = 4.0 - 2.0 * need_cross
    x_lo = (a - math.sqrt(a * a - 4.0 * need_cross ** 2)) / (2.0 * need_cross)
    x_hi = 1.0 - 1e-6
    gamma_lo = BISECT_TOL
    gamma_hi = 1e4 * max(ref_freq, crossing_freq)

    def linewidth_for(x: float) -> float | None:
        def g(gamma):
            model = SourceSpectrumModel(x, gamma, escape_eff)
            return xsum_db(scenario, model, crossing_freq) - crossing_db

        if g(gamma_hi) > 0:
            return None
        return _bisect(g, gamma_lo, gamma_hi)

    def h(x: float) -> float:
        gamma = linewidth_for(x)
        if gamma is None:
            return math.inf
        return xsum_db(scenario, SourceSpectrumModel(x, gamma, escape_eff), ref_freq) - target_db_at_ref

    sign = 1.0 if crossing_freq > ref_freq else -1.0
    if sign * h(x_hi) > 0:
        raise CalibrationInfeasible(
            f"no pump below threshold reaches {target_db_at_ref} dB at {ref_freq} MHz "
            f"while crossing {crossing_db} dB at {crossing_freq} MHz",
            bound_db,
        )
    x = _bisect(lambda v: sign * h(v), min(x_lo, x_hi), x_hi)
    gamma = linewidth_for(x)
    if gamma is None:
        raise CalibrationInfeasible("linewidth search failed to bracket the crossing", bound_db)
    return SourceSpectrumModel(x, gamma, escape_eff)


def crossing_frequency(trace: TraceSeries, level_db: float, column: str = "xsum_db") -> float:
    """First frequency where ``column`` rises through ``level_db`` (linear interpolation)."""
    f = trace["freq_mhz"]
    y = trace[column]
    above = np.nonzero(y >= level_db)[0]
    if above.size == 0 or above[0] == 0:
        raise ValueError(f"trace does not cross {level_db} dB from below")
    i = above[0]
    return float(f[i - 1] + (level_db - y[i - 1]) * (f[i] - f[i - 1]) / (y[i] - y[i - 1]))
