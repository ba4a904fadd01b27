"""Quantum Fisher information of the detector state for the acceleration and the weight angle."""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import (
    PURITY_REJECT,
    DetectorConfig,
    bloch_da,
    bloch_dtheta,
    bloch_state,
    purity_deficit,
)

PURE_BRANCH = 1e-12
_SQRT3 = math.sqrt(3.0)


class QfiMethod(str, enum.Enum):
    BLOCH_CHAIN = "bloch_chain"
    SPECTRAL_ORACLE = "spectral_oracle"
    ASYMPTOTIC = "asymptotic"
    APPROXIMATION = "approximation"


@dataclass(frozen=True)
class QfiResult:
    value: float
    method: QfiMethod
    err_estimate: float = 0.0

    def __float__(self) -> float:
        return self.value


def qfi_from_bloch(w, dw, purity_deficit: float | None = None) -> QfiResult:
    """|dw|^2 + (w.dw)^2 / (1 - |w|^2), with the pure-state branch below 1e-12.

    ``purity_deficit`` overrides 1 - |w|^2 when the caller has it in a
    cancellation-free form.
    """
    w = np.asarray(w, dtype=float)
    dw = np.asarray(dw, dtype=float)
    n2 = float(w @ w)
    if n2 > (1 + PURITY_REJECT) ** 2:
        raise ValueError(f"Bloch vector of length {math.sqrt(n2)} is not a state")
    deficit = 1.0 - n2 if purity_deficit is None else purity_deficit
    base = float(dw @ dw)
    wd = float(w @ dw)
    if deficit <= PURE_BRANCH:
        if wd * wd >= 1e-10:
            raise ValueError(
                f"pure state with a non-tangent derivative (w.dw = {wd:.3e}); QFI is singular"
            )
        return QfiResult(base, QfiMethod.BLOCH_CHAIN)
    return QfiResult(base + wd * wd / deficit, QfiMethod.BLOCH_CHAIN)


def qfi_spectral(rho, drho, cutoff: float = 1e-14) -> QfiResult:
    """2 sum |<m|drho|n>|^2 / (p_m + p_n) over the eigenbasis of rho."""
    rho = np.asarray(rho, dtype=complex)
    drho = np.asarray(drho, dtype=complex)
    if rho.shape != (2, 2) or drho.shape != (2, 2):
        raise ValueError("expected 2x2 matrices")
    if not np.allclose(rho, rho.conj().T, atol=1e-12) or abs(np.trace(rho) - 1) > 1e-10:
        raise ValueError("rho must be Hermitian with unit trace")
    p, vecs = np.linalg.eigh(rho)
    if p.min() < -1e-9:
        raise ValueError(f"rho has a negative eigenvalue {p.min()}")
    d = vecs.conj().T @ drho @ vecs
    total = 0.0
    for m in range(2):
        for n in range(2):
            s = p[m] + p[n]
            if s < cutoff:
                continue
            total += abs(d[m, n]) ** 2 / s
    return QfiResult(2.0 * total, QfiMethod.SPECTRAL_ORACLE)


def _chain(tau: float, cfg: DetectorConfig, deriv) -> float:
    w = bloch_state(tau, cfg).vector
    return qfi_from_bloch(w, deriv(tau, cfg), purity_deficit(tau, cfg)).value


def _with_dA(cfg: DetectorConfig, dA: float) -> DetectorConfig:
    return dataclasses.replace(cfg, pair=dataclasses.replace(cfg.pair, dA_da=dA))


def qfi_acceleration(tau: float, cfg: DetectorConfig) -> QfiResult:
    value = _chain(tau, cfg, bloch_da)
    err = 0.0
    e = cfg.pair.err_dA_da
    if e > 0:
        err = abs(_chain(tau, _with_dA(cfg, cfg.pair.dA_da + e), bloch_da) - value)
    return QfiResult(value, QfiMethod.BLOCH_CHAIN, err)


def qfi_theta(tau: float, cfg: DetectorConfig) -> QfiResult:
    return QfiResult(_chain(tau, cfg, bloch_dtheta), QfiMethod.BLOCH_CHAIN)


def _asymptotic(cfg: DetectorConfig) -> float:
    p = cfg.pair
    one_m = p.one_minus_ratio
    return p.dratio_da**2 / (one_m * (2.0 - one_m))


def qfi_asymptotic_a(cfg: DetectorConfig) -> QfiResult:
    p = cfg.pair
    if not 0 < p.one_minus_ratio < 2:
        raise ValueError(f"asymptotic QFI needs |B/A| < 1, got 1 - B/A = {p.one_minus_ratio}")
    value = _asymptotic(cfg)
    err = 0.0
    if p.err_dA_da > 0:
        err = abs(_asymptotic(_with_dA(cfg, p.dA_da + p.err_dA_da)) - value)
    return QfiResult(value, QfiMethod.ASYMPTOTIC, err)


class ApproxFormula(str, enum.Enum):
    """Published regime formulas; each has numbered lines (1-based)."""

    ACCELERATION_SHORT_TIME = "acceleration_short_time"  # a << Omega, tau << 1/Omega
    ACCELERATION_LONG_TIME = "acceleration_long_time"  # a >> Omega, a tau >> 1
    ASYMPTOTIC_SMALL_A = "asymptotic_small_a"
    ASYMPTOTIC_LARGE_A = "asymptotic_large_a"
    THETA_SHORT_TIME = "theta_short_time"
    THETA_LONG_TIME = "theta_long_time"


APPROX_LINES = {
    ApproxFormula.ACCELERATION_SHORT_TIME: 2,
    ApproxFormula.ACCELERATION_LONG_TIME: 3,
    ApproxFormula.ASYMPTOTIC_SMALL_A: 2,
    ApproxFormula.ASYMPTOTIC_LARGE_A: 3,
    ApproxFormula.THETA_SHORT_TIME: 2,
    ApproxFormula.THETA_LONG_TIME: 3,
}


def _acc_short(line, a, om, theta, tau):
    c4 = math.cos(theta / 2) ** 4
    k = (3 + math.cos(2 * theta)) ** 2
    if line == 1:
        x = math.pi * om / a
        return om**3 * math.pi * tau * math.exp(-4 * x) / (8 * a**4) * k / (
            c4 + math.exp(-2 * x) * math.sin(theta / 2) ** 4
        )
    y = 2 * _SQRT3 * om / a
    den = 48 * om * c4 + _SQRT3 * a * math.exp(-y) * (3 + math.cos(2 * theta))
    return 3 * om**2 * tau * math.exp(-2 * y) / (8 * a**2 * math.pi) * k / den


def _acc_long(line, a, om, bbar, theta, tau):
    s2 = math.sin(theta) ** 2
    pi = math.pi
    if line == 1:
        d = 1 - bbar**2
        return pi**2 * om**2 / (a**4 * d) + d**3 * tau**2 * s2 / (16 * pi**4) * math.exp(
            -a * tau / (2 * pi**2)
        )
    if line == 2:
        return 12 * om**2 / a**4 + tau**2 * s2 / (192 * pi**2) * math.exp(
            -a * tau / (4 * _SQRT3 * pi)
        )
    return 36 * bbar**2 * pi**2 * om**2 / (169 * a**4) + 169 * tau**2 * s2 / (
        576 * bbar**2 * pi**4
    ) * math.exp(-13 * a * tau / (12 * bbar * pi**2))


def _asy_small(line, a, om):
    if line == 1:
        return 4 * math.pi**2 * om**2 / a**4 * math.exp(-2 * math.pi * om / a)
    return _SQRT3 * om / a**3 * math.exp(-2 * _SQRT3 * om / a)


def _asy_large(line, a, om, bbar):
    if line == 1:
        return math.pi**2 * om**2 / (a**4 * (1 - bbar**2))
    if line == 2:
        return 12 * om**2 / a**4
    return 36 * bbar**2 * math.pi**2 * om**2 / (169 * a**4)


def _theta_short(line, a, om, theta, tau):
    pref = math.exp(-om * tau / (2 * math.pi))
    c4 = math.cos(theta / 2) ** 4
    s2 = math.sin(theta) ** 2
    if line == 1:
        return pref * (1 - s2 / (1 + math.exp(2 * math.pi * om / a) * c4))
    den = 8 * _SQRT3 * math.exp(2 * _SQRT3 * om / a) * om * math.pi * c4 - 2 * a * math.pi * math.cos(theta)
    return pref * (1 - a * om * tau * s2 / den)


def _theta_long(line, a, bbar, theta, tau):
    if line == 1:
        k = a * (1 - bbar**2) ** 1.5 / (2 * math.pi**2)
    elif line == 2:
        k = a / (4 * _SQRT3 * math.pi)
    else:
        k = 13 * a / (12 * bbar * math.pi**2)
    c2 = math.cos(theta) ** 2
    return math.exp(-k * tau) * c2 + math.exp(-2 * k * tau) * (1 + c2) * math.sin(theta) ** 2


def qfi_approx(
    formula: ApproxFormula,
    line: int,
    *,
    a: float,
    omega: float = 1.0,
    bbar: float = 0.0,
    theta: float = 0.0,
    tau: float = 0.0,
) -> QfiResult:
    """Literal evaluation of one line of a published regime formula.

    Validity windows are the caller's responsibility; nothing is checked
    beyond the line number.
    """
    formula = ApproxFormula(formula)
    if not 1 <= line <= APPROX_LINES[formula]:
        raise ValueError(f"{formula.value} has lines 1..{APPROX_LINES[formula]}, got {line}")
    F = ApproxFormula
    if formula is F.ACCELERATION_SHORT_TIME:
        v = _acc_short(line, a, omega, theta, tau)
    elif formula is F.ACCELERATION_LONG_TIME:
        v = _acc_long(line, a, omega, bbar, theta, tau)
    elif formula is F.ASYMPTOTIC_SMALL_A:
        v = _asy_small(line, a, omega)
    elif formula is F.ASYMPTOTIC_LARGE_A:
        v = _asy_large(line, a, omega, bbar)
    elif formula is F.THETA_SHORT_TIME:
        v = _theta_short(line, a, omega, theta, tau)
    else:
        v = _theta_long(line, a, bbar, theta, tau)
    return QfiResult(v, QfiMethod.APPROXIMATION)


def circular_crossover_bbar() -> float:
    """bbar at which the circular large-a asymptote overtakes the cusped one."""
    return math.sqrt(2028.0 / (36.0 * math.pi**2))
