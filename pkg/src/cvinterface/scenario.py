"""The up-conversion entanglement link as a Gaussian pipeline.

A squeezed-vacuum source is split on a variable beam splitter (VBS). The
reflected beam (mode 0, 1550 nm) goes straight to a homodyne detector; the
transmitted beam (mode 1, 532 nm) passes sum-frequency conversion and a
second detector. Conversion and detection inefficiencies are pure loss.

Phases are counted from the squeezed quadrature of the source, so at zero
phase both detectors read the amplitude quadrature ``X``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Protocol, Sequence

import numpy as np

from . import gaussian as gc
from .criteria import (
    DuanResult,
    JointCombination,
    NoiseLevel,
    P,
    QuadratureObservable,
    X,
    duan_i,
    joint_variance,
    p_diff,
    x_sum,
)
from .traces import TraceSeries

MODE_1550 = 0
MODE_532 = 1

VBS_DIRECTIVES = ("balance", "optimize")

# power efficiencies: SFG conversion and 532 nm photodiodes both ~90 %,
# ~12 % downstream loss on the 1550 nm arm
REF_SFG_EFFICIENCY = 0.9
REF_PD_EFFICIENCY = 0.9
REF_ETA_1550 = 0.88
REF_XSUM_DB = -5.5
REF_ANALYSIS_MHZ = 5.0

GOLDEN_TOL = 1e-9


class UnresolvedVBSError(ValueError):
    pass


class Source(Protocol):
    def variances(self, omega: float) -> tuple[float, float]: ...


@dataclass(frozen=True)
class FixedSource:
    """Frequency-independent squeezed source given by its variances in dB re vacuum.

    ``squeezing_db`` is negative for a squeezed quadrature.
    """

    squeezing_db: float
    antisqueezing_db: float

    def __post_init__(self):
        object.__setattr__(self, "squeezing_db", float(self.squeezing_db))
        object.__setattr__(self, "antisqueezing_db", float(self.antisqueezing_db))
        if not (math.isfinite(self.squeezing_db) and math.isfinite(self.antisqueezing_db)):
            raise ValueError("source levels must be finite")
        if self.squeezing_db > self.antisqueezing_db:
            raise ValueError("squeezing_db must not exceed antisqueezing_db")
        if self.squeezing_db + self.antisqueezing_db < -1e-9:
            raise ValueError(
                "source violates the uncertainty relation: "
                f"V- * V+ = {self.v_minus * self.v_plus:.6g} < 1"
            )

    @classmethod
    def from_variances(cls, v_minus: float, v_plus: float) -> "FixedSource":
        return cls(10.0 * math.log10(v_minus), 10.0 * math.log10(v_plus))

    @property
    def v_minus(self) -> float:
        return 10.0 ** (self.squeezing_db / 10.0)

    @property
    def v_plus(self) -> float:
        return 10.0 ** (self.antisqueezing_db / 10.0)

    def variances(self, omega: float = 0.0) -> tuple[float, float]:
        return self.v_minus, self.v_plus


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to evaluate one setting of the link.

    ``vbs`` is either an amplitude transmittance or one of ``"balance"``
    (cancel anti-squeezing in the phase difference) and ``"optimize"``
    (minimise the Duan sum). Arm efficiencies are power efficiencies.
    """

    source: Source
    vbs: float | str = "balance"
    eta_532: float = REF_SFG_EFFICIENCY * REF_PD_EFFICIENCY
    eta_1550: float = REF_ETA_1550
    phase_1550: float = 0.0
    phase_532: float = 0.0
    analysis_freq: float = REF_ANALYSIS_MHZ
    dark_floor_db: float | None = None

    def __post_init__(self):
        if isinstance(self.vbs, str):
            if self.vbs not in VBS_DIRECTIVES:
                raise ValueError(f"unknown VBS directive {self.vbs!r}")
        else:
            t = float(self.vbs)
            if not 0.0 <= t <= 1.0:
                raise ValueError(f"VBS transmittance must lie in [0, 1], got {t}")
            object.__setattr__(self, "vbs", t)
        for name in ("eta_532", "eta_1550"):
            v = float(getattr(self, name))
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
            object.__setattr__(self, name, v)
        if not self.analysis_freq >= 0:
            raise ValueError("analysis frequency must be non-negative")
        if self.dark_floor_db is not None and not math.isfinite(self.dark_floor_db):
            raise ValueError("dark floor must be finite")

    @property
    def tau_532(self) -> float:
        return math.sqrt(self.eta_532)

    @property
    def tau_1550(self) -> float:
        return math.sqrt(self.eta_1550)

    def source_variances(self) -> tuple[float, float]:
        return self.source.variances(self.analysis_freq)

    def replace(self, **changes) -> "ScenarioConfig":
        return replace(self, **changes)


def analytic_variances(v_minus: float, v_plus: float, t: float,
                       tau_532: float, tau_1550: float) -> tuple[float, float]:
    """Closed-form ``Var[X_1550 + X_532]`` and ``Var[P_1550 - P_532]``."""
    for name, val in (("t", t), ("tau_532", tau_532), ("tau_1550", tau_1550)):
        if not 0.0 <= val <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {val}")
    if v_minus <= 0 or v_plus <= 0:
        raise ValueError("source variances must be positive")
    r = math.sqrt(1.0 - t * t)
    var_x = 2.0 - (1.0 - v_minus) * (t * tau_532 + r * tau_1550) ** 2
    var_p = 2.0 + (v_plus - 1.0) * (t * tau_532 - r * tau_1550) ** 2
    return var_x, var_p


def analytic_duan(v_minus, v_plus, t, tau_532, tau_1550) -> float:
    return sum(analytic_variances(v_minus, v_plus, t, tau_532, tau_1550))


def solve_balance(tau_532: float, tau_1550: float) -> float:
    """Transmittance with ``t * tau_532 == r * tau_1550``."""
    if tau_532 < 0 or tau_1550 < 0:
        raise ValueError("arm transmittances must be non-negative")
    norm = math.hypot(tau_532, tau_1550)
    if norm == 0:
        raise ValueError("balance undefined when both arms are fully lost")
    return tau_1550 / norm


def golden_section(f, a: float, b: float, tol: float = GOLDEN_TOL) -> float:
    """Minimiser of a unimodal ``f`` on ``[a, b]`` to within ``tol``."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def _optimal_t(v_minus, v_plus, tau_532, tau_1550) -> tuple[float, float, str]:
    t_bal = solve_balance(tau_532, tau_1550)
    if v_minus >= 1.0:
        return t_bal, t_bal, "flat objective: source is not squeezed"

    def objective(t):
        return analytic_duan(v_minus, v_plus, t, tau_532, tau_1550)

    best = golden_section(objective, 0.0, 1.0)
    # guard against an endpoint minimum; prefer the balance point on ties
    for cand in (0.0, 1.0):
        if objective(cand) < objective(best):
            best = cand
    if objective(t_bal) <= objective(best):
        best = t_bal
    return best, t_bal, ""


def resolve_vbs(config: ScenarioConfig) -> float:
    if not isinstance(config.vbs, str):
        return config.vbs
    if config.vbs == "balance":
        return solve_balance(config.tau_532, config.tau_1550)
    v_minus, v_plus = config.source_variances()
    return _optimal_t(v_minus, v_plus, config.tau_532, config.tau_1550)[0]


def resolve(config: ScenarioConfig) -> ScenarioConfig:
    """Copy of ``config`` with the VBS directive replaced by its transmittance."""
    return config.replace(vbs=resolve_vbs(config))


def build_state(config: ScenarioConfig) -> gc.GaussianState:
    """Two-mode state at the detectors (before the homodyne phase rotations).

    Mode 0 is the 1550 nm arm, mode 1 the up-converted 532 nm arm.
    """
    if isinstance(config.vbs, str):
        raise UnresolvedVBSError(
            f"VBS directive {config.vbs!r} must be resolved before building the state"
        )
    v_minus, v_plus = config.source_variances()
    state = gc.tensor(gc.make_vacuum(1), gc.make_squeezed_thermal(v_minus, v_plus))
    state = gc.apply_beamsplitter(state, MODE_1550, MODE_532, config.vbs)
    state = gc.apply_loss(state, gc.LossChannel(MODE_1550, config.eta_1550))
    state = gc.apply_loss(state, gc.LossChannel(MODE_532, config.eta_532))
    return state


def detected_state(config: ScenarioConfig) -> gc.GaussianState:
    """Pipeline state after rotating each arm to its detector phase."""
    state = build_state(config)
    state = gc.apply_phase(state, MODE_1550, config.phase_1550)
    return gc.apply_phase(state, MODE_532, config.phase_532)


def with_dark_floor(variance: float, dark_floor_db: float | None,
                    reference: float = 2.0) -> float:
    """Add detector dark noise as power, ``floor_db`` given relative to vacuum."""
    if dark_floor_db is None:
        return variance
    return variance + reference * 10.0 ** (dark_floor_db / 10.0)


POINT_COMBINATIONS = {
    "A": x_sum(MODE_1550, MODE_532),
    "B": JointCombination.of((X(MODE_1550), 1.0), (X(MODE_532), -1.0)),
    "C": JointCombination.of((P(MODE_1550), 1.0), (P(MODE_532), 1.0)),
    "D": p_diff(MODE_1550, MODE_532),
}


@dataclass(frozen=True)
class OperatingPoint:
    t: float
    phase_1550: float
    phase_532: float
    analysis_freq: float
    v_minus: float
    v_plus: float
    duan: DuanResult
    points: dict[str, NoiseLevel] = field(hash=False)
    measured: NoiseLevel
    t_balance: float
    i_balance: float
    note: str = ""

    @property
    def r(self) -> float:
        return math.sqrt(1.0 - self.t * self.t)

    def to_dict(self) -> dict:
        return {
            "t": self.t,
            "r": self.r,
            "phase_1550": self.phase_1550,
            "phase_532": self.phase_532,
            "analysis_freq_mhz": self.analysis_freq,
            "v_minus": self.v_minus,
            "v_plus": self.v_plus,
            "duan": self.duan.to_dict(),
            "points": {k: v.to_dict() for k, v in self.points.items()},
            "measured": self.measured.to_dict(),
            "t_balance": self.t_balance,
            "i_balance": self.i_balance,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OperatingPoint":
        return cls(
            t=d["t"],
            phase_1550=d["phase_1550"],
            phase_532=d["phase_532"],
            analysis_freq=d["analysis_freq_mhz"],
            v_minus=d["v_minus"],
            v_plus=d["v_plus"],
            duan=DuanResult.from_dict(d["duan"]),
            points={k: NoiseLevel.from_dict(v) for k, v in d["points"].items()},
            measured=NoiseLevel.from_dict(d["measured"]),
            t_balance=d["t_balance"],
            i_balance=d["i_balance"],
            note=d.get("note", ""),
        )


def evaluate(config: ScenarioConfig) -> OperatingPoint:
    """Duan sum, Fig.-3 style points A-D and the configured joint reading."""
    note = ""
    v_minus, v_plus = config.source_variances()
    if config.vbs == "optimize" and v_minus >= 1.0:
        note = "flat objective: source is not squeezed"
    resolved = resolve(config)
    state = build_state(resolved)
    points = {k: joint_variance(state, c) for k, c in POINT_COMBINATIONS.items()}
    measured = joint_variance(detected_state(resolved), x_sum(MODE_1550, MODE_532))
    t_bal = solve_balance(config.tau_532, config.tau_1550)
    return OperatingPoint(
        t=resolved.vbs,
        phase_1550=config.phase_1550,
        phase_532=config.phase_532,
        analysis_freq=config.analysis_freq,
        v_minus=v_minus,
        v_plus=v_plus,
        duan=duan_i(state, MODE_1550, MODE_532),
        points=points,
        measured=measured,
        t_balance=t_bal,
        i_balance=analytic_duan(v_minus, v_plus, t_bal, config.tau_532, config.tau_1550),
        note=note,
    )


def optimize_vbs(config: ScenarioConfig) -> OperatingPoint:
    """Operating point at the VBS setting that minimises the Duan sum.

    Golden-section search over ``t`` on the closed-form objective. The result
    is never worse than the balance setting; both are reported.
    """
    v_minus, v_plus = config.source_variances()
    t_opt, _, note = _optimal_t(v_minus, v_plus, config.tau_532, config.tau_1550)
    op = evaluate(config.replace(vbs=t_opt))
    return replace(op, note=note)


def joint_noise(config: ScenarioConfig, combo: JointCombination) -> NoiseLevel:
    return joint_variance(build_state(resolve(config)), combo)


def phase_scan(config: ScenarioConfig, phases: Sequence[float],
               scan_arm: str = "532") -> TraceSeries:
    """Noise of ``X^theta_1550 + X^phi_532`` relative to vacuum while one phase is swept.

    The other detector stays at its configured phase. With the 1550 nm phase
    at 0 the sweep passes points A (phi = 0) and B (phi = pi); at pi/2 it
    passes C (phi = pi/2) and D (phi = 3 pi/2).
    """
    if scan_arm not in ("532", "1550"):
        raise ValueError(f"scan_arm must be '532' or '1550', got {scan_arm!r}")
    phases = np.asarray(phases, dtype=float).reshape(-1)
    if phases.size == 0 or not np.all(np.isfinite(phases)):
        raise ValueError("phase grid must be non-empty and finite")
    resolved = resolve(config)
    state = build_state(resolved)
    db = np.empty_like(phases)
    for i, phi in enumerate(phases):
        if scan_arm == "532":
            th, ph = config.phase_1550, phi
        else:
            th, ph = phi, config.phase_532
        combo = JointCombination.of(
            (QuadratureObservable(MODE_1550, th), 1.0),
            (QuadratureObservable(MODE_532, ph), 1.0),
        )
        level = joint_variance(state, combo)
        var = with_dark_floor(level.variance, config.dark_floor_db, level.reference_variance)
        db[i] = NoiseLevel(var, level.reference_variance).rel_db
    fixed = config.phase_1550 if scan_arm == "532" else config.phase_532
    return TraceSeries(
        "phase_scan",
        {"phase_rad": phases, "noise_db": db},
        {"scan_arm": scan_arm, "fixed_phase_rad": fixed, "t": resolved.vbs,
         "analysis_freq_mhz": config.analysis_freq},
    )


def default_phase_grid(points: int = 361, start: float = 0.0,
                       stop: float = 2.0 * math.pi) -> np.ndarray:
    if points < 2:
        raise ValueError("phase grid needs at least two points")
    return np.linspace(start, stop, points)


def reference_source(eta_532: float = REF_SFG_EFFICIENCY * REF_PD_EFFICIENCY,
                 eta_1550: float = REF_ETA_1550,
                 xsum_db: float = REF_XSUM_DB) -> FixedSource:
    """Pure squeezed source that yields ``xsum_db`` at the balance setting.

    Inverts the closed-form X-sum variance for ``V-``; ``V+ = 1 / V-``.
    """
    tau_a, tau_b = math.sqrt(eta_532), math.sqrt(eta_1550)
    t = solve_balance(tau_a, tau_b)
    gain = (t * tau_a + math.sqrt(1 - t * t) * tau_b) ** 2
    target = 2.0 * 10.0 ** (xsum_db / 10.0)
    v_minus = 1.0 - (2.0 - target) / gain
    if v_minus <= 0:
        raise ValueError(f"{xsum_db} dB is beyond the loss-limited bound")
    return FixedSource(10.0 * math.log10(v_minus), -10.0 * math.log10(v_minus))


def reference_scenario() -> ScenarioConfig:
    return ScenarioConfig(source=reference_source())
