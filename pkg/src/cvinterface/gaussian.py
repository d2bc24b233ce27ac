"""Gaussian states of optical modes and the maps acting on them.

Quadratures are interleaved, ``(x1, p1, x2, p2, ...)``, and normalised so that
the vacuum covariance matrix is the identity. With this normalisation the
uncertainty relation reads ``cov + iJ >= 0`` where ``J`` is block diagonal in
``[[0, 1], [-1, 0]]``.

All functions return new states; :class:`GaussianState` is never mutated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

SYMMETRY_TOL = 1e-12
UNCERTAINTY_TOL = 1e-9
SYMPLECTIC_TOL = 1e-12


def symplectic_form(n_modes: int) -> np.ndarray:
    """Block-diagonal symplectic form for ``n_modes`` modes."""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def _check_mode(n_modes: int, mode: int) -> int:
    if isinstance(mode, bool) or not isinstance(mode, (int, np.integer)):
        raise TypeError(f"mode index must be an integer, got {mode!r}")
    if not 0 <= mode < n_modes:
        raise IndexError(f"mode {mode} out of range for {n_modes}-mode state")
    return int(mode)


@dataclass(frozen=True, eq=False)
class GaussianState:
    """Mean vector and covariance matrix of ``n_modes`` optical modes.

    The covariance is symmetrised on construction and checked against the
    uncertainty relation; unphysical inputs raise ``ValueError``.
    """

    n_modes: int
    mean: np.ndarray = field(repr=False)
    cov: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("a Gaussian state needs at least one mode")
        dim = 2 * self.n_modes
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if mean.shape != (dim,) or cov.shape != (dim, dim):
            raise ValueError(
                f"expected mean of length {dim} and {dim}x{dim} covariance, "
                f"got {mean.shape} and {cov.shape}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise ValueError("state contains non-finite entries")
        cov = 0.5 * (cov + cov.T)
        mean = mean.copy()
        mean.flags.writeable = False
        cov.flags.writeable = False
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        lo = self.uncertainty_margin()
        # eigvalsh is accurate to ~eps * |cov|; matters only for near-threshold squeezing
        tol = max(UNCERTAINTY_TOL, 1e-14 * float(np.max(np.abs(cov))))
        if lo < -tol:
            raise ValueError(
                f"covariance violates the uncertainty relation (min eigenvalue {lo:.3e})"
            )

    def uncertainty_margin(self) -> float:
        """Smallest eigenvalue of ``cov + iJ``; non-negative for physical states."""
        herm = self.cov + 1j * symplectic_form(self.n_modes)
        return float(np.linalg.eigvalsh(herm)[0])

    def symplectic_eigenvalues(self) -> np.ndarray:
        """Williamson spectrum of the covariance, sorted ascending (each value once)."""
        ev = np.abs(np.linalg.eigvals(1j * symplectic_form(self.n_modes) @ self.cov))
        return np.sort(ev)[::2]

    def purity(self) -> float:
        return float(1.0 / np.sqrt(np.linalg.det(self.cov)))

    def allclose(self, other: "GaussianState", atol: float = 1e-12) -> bool:
        return (
            self.n_modes == other.n_modes
            and np.allclose(self.mean, other.mean, rtol=0, atol=atol)
            and np.allclose(self.cov, other.cov, rtol=0, atol=atol)
        )


@dataclass(frozen=True, eq=False)
class SymplecticMap:
    """A real ``2N x 2N`` matrix preserving the symplectic form."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] % 2:
            raise ValueError(f"symplectic matrix must be 2N x 2N, got {m.shape}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    def defect(self) -> float:
        """``max |S J S^T - J|``."""
        j = symplectic_form(self.n_modes)
        return float(np.max(np.abs(self.matrix @ j @ self.matrix.T - j)))

    def is_symplectic(self, tol: float = SYMPLECTIC_TOL) -> bool:
        return self.defect() < tol

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        return SymplecticMap(self.matrix @ other.matrix)


@dataclass(frozen=True)
class LossChannel:
    """Pure loss on one mode with power transmittance ``eta``."""

    mode: int
    transmittance_power: float

    def __post_init__(self):
        eta = float(self.transmittance_power)
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"loss transmittance must lie in [0, 1], got {eta}")
        object.__setattr__(self, "transmittance_power", eta)

    @property
    def amplitude(self) -> float:
        return float(np.sqrt(self.transmittance_power))


def _rotation(phi: float) -> np.ndarray:
    # maps (x, p) to (x cos phi + p sin phi, -x sin phi + p cos phi)
    c, s = np.cos(phi), np.sin(phi)
    return np.array([[c, s], [-s, c]])


def _embed(block: np.ndarray, modes: Sequence[int], n_modes: int) -> np.ndarray:
    idx = np.array([[2 * m, 2 * m + 1] for m in modes]).reshape(-1)
    out = np.eye(2 * n_modes)
    out[np.ix_(idx, idx)] = block
    return out


def squeezer_map(n_modes: int, mode: int, r: float, angle: float = 0.0) -> SymplecticMap:
    """Single-mode squeezer that squeezes the quadrature at ``angle`` by ``exp(-r)``."""
    _check_mode(n_modes, mode)
    rot = _rotation(angle).T
    block = rot @ np.diag([np.exp(-r), np.exp(r)]) @ rot.T
    return SymplecticMap(_embed(block, [mode], n_modes))


def phase_map(n_modes: int, mode: int, phi: float) -> SymplecticMap:
    _check_mode(n_modes, mode)
    return SymplecticMap(_embed(_rotation(phi), [mode], n_modes))


def beamsplitter_map(n_modes: int, mode_a: int, mode_b: int, t: float) -> SymplecticMap:
    """Beam splitter ``a' = t a + r b``, ``b' = -r a + t b`` with ``r = sqrt(1 - t^2)``."""
    _check_mode(n_modes, mode_a)
    _check_mode(n_modes, mode_b)
    if mode_a == mode_b:
        raise ValueError("beam splitter needs two distinct modes")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"amplitude transmittance must lie in [0, 1], got {t}")
    r = np.sqrt(1.0 - t * t)
    eye = np.eye(2)
    block = np.block([[t * eye, r * eye], [-r * eye, t * eye]])
    return SymplecticMap(_embed(block, [mode_a, mode_b], n_modes))


def apply_symplectic(state: GaussianState, smap: SymplecticMap) -> GaussianState:
    if smap.n_modes != state.n_modes:
        raise ValueError(
            f"map acts on {smap.n_modes} modes but state has {state.n_modes}"
        )
    s = smap.matrix
    return GaussianState(state.n_modes, s @ state.mean, s @ state.cov @ s.T)


def make_vacuum(n_modes: int) -> GaussianState:
    if isinstance(n_modes, bool) or not isinstance(n_modes, (int, np.integer)) or n_modes < 1:
        raise ValueError(f"n_modes must be a positive integer, got {n_modes!r}")
    return GaussianState(int(n_modes), np.zeros(2 * n_modes), np.eye(2 * n_modes))


def make_squeezed_thermal(v_minus: float, v_plus: float, angle: float = 0.0) -> GaussianState:
    """Single-mode zero-mean state with quadrature variances ``v_minus`` along ``angle``
    and ``v_plus`` orthogonal to it.

    Built as a thermal state of variance ``sqrt(v_minus * v_plus)`` followed by a
    squeezer, so ``v_minus * v_plus >= 1`` is required.
    """
    if v_minus <= 0 or v_plus <= 0:
        raise ValueError("quadrature variances must be positive")
    if v_minus > v_plus:
        raise ValueError(f"v_minus ({v_minus}) must not exceed v_plus ({v_plus})")
    nu = np.sqrt(v_minus * v_plus)
    if nu < 1.0 - 1e-9:
        raise ValueError(
            f"v_minus * v_plus = {v_minus * v_plus:.6g} < 1 violates the uncertainty relation"
        )
    # round-off on pure states
    nu = max(nu, 1.0)
    thermal = GaussianState(1, np.zeros(2), nu * np.eye(2))
    return apply_squeezer(thermal, 0, 0.25 * np.log(v_plus / v_minus), angle)


def apply_squeezer(state: GaussianState, mode: int, r: float, angle: float = 0.0) -> GaussianState:
    return apply_symplectic(state, squeezer_map(state.n_modes, mode, r, angle))


def apply_phase(state: GaussianState, mode: int, phi: float) -> GaussianState:
    """Rotate ``mode`` so that its new x quadrature is ``x cos(phi) + p sin(phi)``."""
    return apply_symplectic(state, phase_map(state.n_modes, mode, phi))


def apply_beamsplitter(state: GaussianState, mode_a: int, mode_b: int, t: float) -> GaussianState:
    return apply_symplectic(state, beamsplitter_map(state.n_modes, mode_a, mode_b, t))


def apply_loss(state: GaussianState, channel: LossChannel) -> GaussianState:
    """Mix ``channel.mode`` with vacuum at power transmittance ``eta``.

    Diagonal block becomes ``eta * block + (1 - eta) * I``, cross-covariances
    with the other modes scale by ``sqrt(eta)``.
    """
    mode = _check_mode(state.n_modes, channel.mode)
    eta = channel.transmittance_power
    sl = slice(2 * mode, 2 * mode + 2)
    x = np.ones(2 * state.n_modes)
    x[sl] = np.sqrt(eta)
    cov = state.cov * np.outer(x, x)
    cov[sl, sl] += (1.0 - eta) * np.eye(2)
    return GaussianState(state.n_modes, state.mean * x, cov)


def partial_state(state: GaussianState, modes: Sequence[int]) -> GaussianState:
    """Reduced state on ``modes`` (in the given order)."""
    modes = [_check_mode(state.n_modes, m) for m in modes]
    if not modes:
        raise ValueError("need at least one mode")
    if len(set(modes)) != len(modes):
        raise ValueError(f"duplicate mode indices in {modes}")
    idx = np.array([[2 * m, 2 * m + 1] for m in modes]).reshape(-1)
    return GaussianState(len(modes), state.mean[idx], state.cov[np.ix_(idx, idx)])


def tensor(*states: GaussianState) -> GaussianState:
    """Product state; modes are numbered in argument order."""
    if not states:
        raise ValueError("need at least one state")
    n = sum(s.n_modes for s in states)
    mean = np.concatenate([s.mean for s in states])
    cov = np.zeros((2 * n, 2 * n))
    k = 0
    for s in states:
        d = 2 * s.n_modes
        cov[k:k + d, k:k + d] = s.cov
        k += d
    return GaussianState(n, mean, cov)


def displace(state: GaussianState, mode: int, x: float, p: float) -> GaussianState:
    mode = _check_mode(state.n_modes, mode)
    mean = np.array(state.mean)
    mean[2 * mode] += x
    mean[2 * mode + 1] += p
    return GaussianState(state.n_modes, mean, state.cov)
