"""Closed-form Bloch-vector evolution of the detector under the solved master equation.

Time is the rescaled tau (coupling absorbed), the Lamb shift is dropped so the
precession rate equals the gap and is a-independent. The precession phase is
carried as an opaque parameter; with phase = 0 every vector below is already
in the phase-eliminated frame used by the Fisher-information code.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .response import DEFAULT_QUAD, KossakowskiPair, QuadratureOptions, kossakowski
from .trajectory import TrajectoryParams

PURITY_SLACK = 1e-12
PURITY_REJECT = 1e-9


@dataclass(frozen=True)
class BlochState:
    w1: float
    w2: float
    w3: float
    phase: float = 0.0

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.w1, self.w2, self.w3])

    @property
    def norm(self) -> float:
        return math.sqrt(self.w1**2 + self.w2**2 + self.w3**2)


@dataclass(frozen=True)
class DetectorConfig:
    """Initial weight angle, gap and the dissipator driving the evolution."""

    theta: float
    omega_gap: float
    pair: KossakowskiPair

    def __post_init__(self):
        if not self.omega_gap > 0:
            raise ValueError("the detector gap must be positive")
        p = self.pair
        if not p.A > 0:
            raise ValueError(f"decay coefficient must be positive, got A={p.A}")
        if abs(p.B) > p.A * (1 + 1e-12):
            raise ValueError(f"|B| = {abs(p.B)} exceeds A = {p.A}")

    @classmethod
    def from_trajectory(
        cls,
        params: TrajectoryParams,
        theta: float,
        omega_gap: float = 1.0,
        quad: QuadratureOptions = DEFAULT_QUAD,
    ) -> "DetectorConfig":
        return cls(theta=theta, omega_gap=omega_gap, pair=kossakowski(omega_gap, params, quad))


def _check_tau(tau: float) -> None:
    if not tau >= 0:
        raise ValueError(f"evolution time must be non-negative, got {tau}")


def bloch_state(tau: float, cfg: DetectorConfig, phase: float = 0.0) -> BlochState:
    _check_tau(tau)
    A, r = cfg.pair.A, cfg.pair.ratio
    e2 = math.exp(-2 * A * tau)
    e4 = e2 * e2
    m = e2 * math.sin(cfg.theta)
    w3 = e4 * math.cos(cfg.theta) + r * math.expm1(-4 * A * tau)
    return BlochState(m * math.cos(phase), m * math.sin(phase), w3, phase)


def bloch_dtheta(tau: float, cfg: DetectorConfig, phase: float = 0.0) -> np.ndarray:
    _check_tau(tau)
    A = cfg.pair.A
    e2 = math.exp(-2 * A * tau)
    dm = e2 * math.cos(cfg.theta)
    return np.array([dm * math.cos(phase), dm * math.sin(phase), -e2 * e2 * math.sin(cfg.theta)])


def bloch_da(tau: float, cfg: DetectorConfig, phase: float = 0.0) -> np.ndarray:
    _check_tau(tau)
    p = cfg.pair
    A, r, dA, dr = p.A, p.ratio, p.dA_da, p.dratio_da
    e2 = math.exp(-2 * A * tau)
    e4 = e2 * e2
    dm = -2 * tau * dA * e2 * math.sin(cfg.theta)
    dw3 = -4 * tau * dA * e4 * math.cos(cfg.theta) + dr * math.expm1(-4 * A * tau) - r * 4 * tau * dA * e4
    return np.array([dm * math.cos(phase), dm * math.sin(phase), dw3])


def purity_deficit(tau: float, cfg: DetectorConfig) -> float:
    """1 - |w|^2 without cancellation.

    Writing u = cos(theta) + B/A, the closed form factors as
    (1 - e^{-4A tau}) [(1 - (B/A)^2) + e^{-4A tau} u^2], and 1 - B/A comes
    straight from the pair, so nothing is lost when B/A is within 1e-16 of 1.
    """
    _check_tau(tau)
    p = cfg.pair
    one_m = p.one_minus_ratio
    e4 = math.exp(-4 * p.A * tau)
    u = 2 * math.cos(0.5 * cfg.theta) ** 2 - one_m
    return -math.expm1(-4 * p.A * tau) * (one_m * (2 - one_m) + e4 * u * u)


def asymptotic_state(cfg: DetectorConfig) -> BlochState:
    return BlochState(0.0, 0.0, -cfg.pair.ratio)


_SIGMA = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def pauli_combination(v) -> np.ndarray:
    """v . sigma as a 2x2 matrix."""
    v = np.asarray(v, dtype=float)
    return v[0] * _SIGMA[0] + v[1] * _SIGMA[1] + v[2] * _SIGMA[2]


def density_matrix(state: BlochState | np.ndarray) -> np.ndarray:
    w = state.vector if isinstance(state, BlochState) else np.asarray(state, dtype=float)
    n = float(np.linalg.norm(w))
    if n > 1 + PURITY_REJECT:
        raise ValueError(f"Bloch vector of length {n} is not a state")
    return 0.5 * (np.eye(2, dtype=complex) + pauli_combination(w))
