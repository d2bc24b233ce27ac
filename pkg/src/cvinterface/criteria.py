"""Quadrature statistics and the Duan inseparability test.

Variances share the vacuum-normalised convention of :mod:`cvinterface.gaussian`:
a single vacuum quadrature has variance 1, so the Duan sum of a separable
pair is at least 4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np

from .gaussian import GaussianState, _check_mode

DUAN_BOUND = 4.0
TWO_PI = 2.0 * math.pi

# written in place of -inf dB in serialised output
BELOW_FLOOR = "below-floor"


def to_db(variance: float, reference: float) -> float:
    """Noise power of ``variance`` relative to ``reference`` in dB."""
    if reference <= 0:
        raise ValueError(f"reference variance must be positive, got {reference}")
    if variance <= 0:
        raise ValueError(f"variance must be positive for a dB value, got {variance}")
    return 10.0 * math.log10(variance / reference)


def from_db(rel_db: float, reference: float) -> float:
    if reference <= 0:
        raise ValueError(f"reference variance must be positive, got {reference}")
    if not math.isfinite(rel_db):
        raise ValueError(f"rel_db must be finite, got {rel_db}")
    return reference * 10.0 ** (rel_db / 10.0)


@dataclass(frozen=True)
class QuadratureObservable:
    """Homodyne observable ``X^phase = X cos(phase) + P sin(phase)`` on ``mode``."""

    mode: int
    phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "phase", float(self.phase) % TWO_PI)

    def vector(self, n_modes: int) -> np.ndarray:
        m = _check_mode(n_modes, self.mode)
        v = np.zeros(2 * n_modes)
        v[2 * m] = math.cos(self.phase)
        v[2 * m + 1] = math.sin(self.phase)
        return v


def X(mode: int) -> QuadratureObservable:
    return QuadratureObservable(mode, 0.0)


def P(mode: int) -> QuadratureObservable:
    return QuadratureObservable(mode, math.pi / 2)


@dataclass(frozen=True)
class JointCombination:
    """Linear combination ``sum_k c_k X_k^{phi_k}`` of homodyne observables."""

    terms: tuple[tuple[QuadratureObservable, float], ...]

    def __post_init__(self):
        terms = tuple((obs, float(c)) for obs, c in self.terms)
        if not terms:
            raise ValueError("a joint combination needs at least one term")
        if not all(math.isfinite(c) for _, c in terms):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, *terms: tuple[QuadratureObservable, float]) -> "JointCombination":
        return cls(tuple(terms))

    def vector(self, n_modes: int) -> np.ndarray:
        return sum(c * obs.vector(n_modes) for obs, c in self.terms)

    @property
    def reference_variance(self) -> float:
        """Variance of the combination evaluated on vacuum."""
        n = max(obs.mode for obs, _ in self.terms) + 1
        v = self.vector(n)
        return float(v @ v)

    def to_dict(self) -> dict:
        return {
            "terms": [
                {"mode": obs.mode, "phase": obs.phase, "coefficient": c}
                for obs, c in self.terms
            ]
        }

    @classmethod
    def from_dict(cls, d: dict) -> "JointCombination":
        return cls(tuple(
            (QuadratureObservable(t["mode"], t["phase"]), t["coefficient"]) for t in d["terms"]
        ))


def x_sum(mode_a: int = 0, mode_b: int = 1) -> JointCombination:
    return JointCombination.of((X(mode_a), 1.0), (X(mode_b), 1.0))


def p_diff(mode_a: int = 0, mode_b: int = 1) -> JointCombination:
    return JointCombination.of((P(mode_a), 1.0), (P(mode_b), -1.0))


@dataclass(frozen=True)
class NoiseLevel:
    """A measured variance together with its vacuum reference."""

    variance: float
    reference_variance: float

    def __post_init__(self):
        if self.reference_variance <= 0:
            raise ValueError("reference variance must be positive")
        if self.variance < 0:
            raise ValueError(f"negative variance {self.variance}")

    @property
    def rel_db(self) -> float:
        if self.variance == 0:
            return -math.inf
        return to_db(self.variance, self.reference_variance)

    @property
    def below_floor(self) -> bool:
        return self.variance == 0

    def to_dict(self) -> dict:
        return {
            "variance": self.variance,
            "reference_variance": self.reference_variance,
            "rel_db": BELOW_FLOOR if self.below_floor else self.rel_db,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseLevel":
        return cls(d["variance"], d["reference_variance"])


def _quadratic_form(cov: np.ndarray, v: np.ndarray) -> float:
    val = float(v @ cov @ v)
    # round-off on an exactly null direction
    if -1e-12 < val < 0:
        return 0.0
    if val < 0:
        raise ValueError(f"negative variance {val}; covariance is not positive")
    return val


def quadrature_variance(state: GaussianState, obs: QuadratureObservable) -> float:
    return _quadratic_form(state.cov, obs.vector(state.n_modes))


def joint_variance(state: GaussianState, combo: JointCombination) -> NoiseLevel:
    v = combo.vector(state.n_modes)
    return NoiseLevel(_quadratic_form(state.cov, v), float(v @ v))


@dataclass(frozen=True)
class DuanResult:
    """``Var[X_a + X_b]`` and ``Var[P_a - P_b]`` and their sum ``I``.

    ``I < 4`` certifies entanglement between the two modes.
    """

    var_x_sum: float
    var_p_diff: float

    def __post_init__(self):
        if self.var_x_sum < 0 or self.var_p_diff < 0:
            raise ValueError("variances must be non-negative")

    @property
    def i_value(self) -> float:
        return self.var_x_sum + self.var_p_diff

    @property
    def entangled(self) -> bool:
        return self.i_value < DUAN_BOUND

    def to_dict(self) -> dict:
        return {
            "var_x_sum": self.var_x_sum,
            "var_p_diff": self.var_p_diff,
            "i_value": self.i_value,
            "entangled": self.entangled,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DuanResult":
        return cls(d["var_x_sum"], d["var_p_diff"])


def duan_i(state: GaussianState, mode_a: int = 0, mode_b: int = 1) -> DuanResult:
    _check_mode(state.n_modes, mode_a)
    _check_mode(state.n_modes, mode_b)
    if mode_a == mode_b:
        raise ValueError("Duan criterion needs two distinct modes")
    return DuanResult(
        joint_variance(state, x_sum(mode_a, mode_b)).variance,
        joint_variance(state, p_diff(mode_a, mode_b)).variance,
    )


def duan_from_db(x_sum_db: float, p_diff_db: float) -> DuanResult:
    """Duan sum from joint noise levels quoted in dB relative to vacuum (reference 2)."""
    return DuanResult(from_db(x_sum_db, 2.0), from_db(p_diff_db, 2.0))

