"""Stationary constant-acceleration worldlines in flat spacetime.

All quantities are measured in units of the detector gap (Omega = 1).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

# |bbar - 1| below this is treated as the cusped worldline.
CUSP_BAND = 1e-9


class TrajectoryKind(str, enum.Enum):
    LINEAR = "linear"
    CATENARY = "catenary"
    CUSPED = "cusped"
    CIRCULAR = "circular"
    HELIX = "helix"


@dataclass(frozen=True)
class TrajectoryParams:
    """Curvature ``a``, torsion ``b`` and hypertorsion ``nu`` of a worldline."""

    a: float
    b: float = 0.0
    nu: float = 0.0

    def __post_init__(self):
        if not (self.a > 0 and math.isfinite(self.a)):
            raise ValueError(f"acceleration must be positive and finite, got a={self.a}")
        if not self.b >= 0:
            raise ValueError(f"torsion must be non-negative, got b={self.b}")
        if not self.nu >= 0:
            raise ValueError(f"hypertorsion must be non-negative, got nu={self.nu}")

    @property
    def bbar(self) -> float:
        return self.b / self.a

    @classmethod
    def from_bbar(cls, a: float, bbar: float = 0.0, nu: float = 0.0) -> "TrajectoryParams":
        return cls(a=a, b=bbar * a, nu=nu)

    def with_a(self, a: float) -> "TrajectoryParams":
        """Same family (fixed bbar and nu/a) at a different acceleration."""
        return TrajectoryParams(a=a, b=self.bbar * a, nu=self.nu / self.a * a)


class FourVector(NamedTuple):
    t: float
    x: float
    y: float
    z: float

    def minkowski_dot(self, other: "FourVector") -> float:
        return self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z


@dataclass(frozen=True)
class HelixAux:
    Xi: float
    GammaPlus: float
    GammaMinus: float
    Gamma: float
    P: float
    Q: float
    calA: float
    calB: float


def classify(params: TrajectoryParams) -> TrajectoryKind:
    if params.nu > 0:
        return TrajectoryKind.HELIX
    bbar = params.bbar
    if bbar == 0:
        return TrajectoryKind.LINEAR
    if abs(bbar - 1.0) < CUSP_BAND:
        return TrajectoryKind.CUSPED
    return TrajectoryKind.CATENARY if bbar < 1 else TrajectoryKind.CIRCULAR


def helix_aux(params: TrajectoryParams) -> HelixAux:
    a, b, nu = params.a, params.b, params.nu
    calA = 0.5 * (a * a - b * b - nu * nu)
    calB = a * nu
    root = math.hypot(calA, calB)
    # Gamma_+^2 Gamma_-^2 = calB^2; get the small one from the product to avoid cancellation.
    if calA >= 0:
        gp2 = root + calA
        gm2 = calB * calB / gp2 if gp2 > 0 else 0.0
    else:
        gm2 = root - calA
        gp2 = calB * calB / gm2
    gamma2 = gp2 + gm2
    if gamma2 <= 0:
        raise ValueError("degenerate helix parameters: Gamma = 0")
    gamma = math.sqrt(gamma2)
    xi = math.sqrt(0.5 * (gamma2 + a * a + b * b + nu * nu))
    return HelixAux(
        Xi=xi,
        GammaPlus=math.sqrt(gp2),
        GammaMinus=math.sqrt(gm2),
        Gamma=gamma,
        P=xi / gamma,
        Q=a * b / (xi * gamma),
        calA=calA,
        calB=calB,
    )


def _sinh_over(x: float, k: float) -> float:
    """sinh(k x)/k, continuous at k = 0."""
    u = k * x
    if abs(u) < 1e-4:
        return x * (1.0 + u * u / 6.0)
    return math.sinh(u) / k


def _sin_over(x: float, k: float) -> float:
    u = k * x
    if abs(u) < 1e-4:
        return x * (1.0 - u * u / 6.0)
    return math.sin(u) / k


def worldline(tau: float, params: TrajectoryParams) -> FourVector:
    kind = classify(params)
    a, b = params.a, params.b
    if kind is TrajectoryKind.LINEAR:
        return FourVector(math.sinh(a * tau) / a, math.cosh(a * tau) / a, 0.0, 0.0)
    if kind is TrajectoryKind.CATENARY:
        d2 = a * a - b * b
        d = math.sqrt(d2)
        return FourVector(
            a * math.sinh(d * tau) / d2, a * math.cosh(d * tau) / d2, b * tau / d, 0.0
        )
    if kind is TrajectoryKind.CUSPED:
        return FourVector(tau + a * a * tau**3 / 6.0, a * tau * tau / 2.0, a * a * tau**3 / 6.0, 0.0)
    if kind is TrajectoryKind.CIRCULAR:
        d2 = b * b - a * a
        d = math.sqrt(d2)
        return FourVector(
            b * tau / d, a * math.cos(d * tau) / d2, a * math.sin(d * tau) / d2, 0.0
        )
    h = helix_aux(params)
    gp, gm = h.GammaPlus, h.GammaMinus
    return FourVector(
        h.P * _sinh_over(tau, gp),
        h.P * math.cosh(gp * tau) / gp,
        h.Q * math.cos(gm * tau) / gm,
        h.Q * _sin_over(tau, gm),
    )


def proper_kinematics_check(
    params: TrajectoryParams, tau: float, h: float = 1e-2
) -> tuple[float, float]:
    """Signed deviations of u.u from 1 and of -acc.acc from a^2, by central differences.

    Sixth-order stencils let h stay large, which matters because roundoff in
    the second difference grows like eps*|x|/h^2 and the coordinates grow
    like cosh(a tau). Up to a|tau| of about 5 both deviations stay below 1e-6.
    """
    k = np.arange(-3, 4)
    pts = np.array([worldline(tau + j * h, params) for j in k])
    d1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / (60 * h)
    d2 = np.array([2, -27, 270, -490, 270, -27, 2]) / (180 * h * h)
    vel = d1 @ pts
    acc = d2 @ pts
    metric = np.array([1.0, -1.0, -1.0, -1.0])
    vnorm = float(np.sum(metric * vel * vel))
    anorm = float(-np.sum(metric * acc * acc))
    return vnorm - 1.0, anorm - params.a**2
