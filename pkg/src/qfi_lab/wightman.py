"""Real brackets of the vacuum Wightman function along stationary worldlines.

For the nu = 0 family the bracket is

    S(dtau) = -bbar^2 dtau^2 / (1 - bbar^2)
              + 4 sinh^2(a dtau sqrt(1 - bbar^2) / 2) / ((1 - bbar^2)^2 a^2)

and W = -1 / (4 pi^2 S) up to the i-epsilon prescription. Collecting the
dtau^2 pieces gives the cancellation-free form

    S = dtau^2 (1 + a^2 dtau^2 f(a^2 (1 - bbar^2) dtau^2)),
    f(w) = (2 (cosh sqrt(w) - 1) - w) / w^2,

which is smooth through bbar = 1 (f(0) = 1/12) and covers the circular
case through the trigonometric continuation of cosh at w < 0.
"""
from __future__ import annotations

import math

import numpy as np

from .trajectory import CUSP_BAND, TrajectoryKind, TrajectoryParams, classify, helix_aux

# f(w) = sum_k 2 w^k / (2k + 4)!
_SERIES = np.array([2.0 / math.factorial(2 * k + 4) for k in range(12)])
_EXP_SWITCH = 30.0


def shape_parameter(bbar: float) -> float:
    """1 - bbar^2, snapped to 0 inside the cusp band."""
    if abs(bbar - 1.0) < CUSP_BAND:
        return 0.0
    return (1.0 - bbar) * (1.0 + bbar)


def _series(w):
    out = np.zeros_like(w)
    for c in _SERIES[::-1]:
        out = out * w + c
    return out


def shape_f(w):
    """f(w) for real w (any sign) or complex w; vectorised."""
    w = np.asarray(w)
    if np.iscomplexobj(w):
        out = np.empty_like(w)
        small = np.abs(w) < 1.0
        out[small] = _series(w[small])
        wl = w[~small]
        sh = np.sinh(0.5 * np.sqrt(wl))
        out[~small] = (4.0 * sh * sh - wl) / (wl * wl)
        return out
    w = w.astype(float)
    out = np.empty_like(w)
    small = np.abs(w) < 1.0
    out[small] = _series(w[small])
    pos = (w >= 1.0) & (w < _EXP_SWITCH**2)
    u = np.sqrt(w[pos])
    sh = np.sinh(0.5 * u)
    out[pos] = (4.0 * sh * sh - w[pos]) / (w[pos] ** 2)
    big = w >= _EXP_SWITCH**2
    with np.errstate(over="ignore", divide="ignore"):
        out[big] = 1.0 / _inv_shape_large(w[big])
    neg = w <= -1.0
    t = np.sqrt(-w[neg])
    sn = np.sin(0.5 * t)
    out[neg] = (t * t - 4.0 * sn * sn) / (t**4)
    return out


def _inv_shape_large(w):
    u = np.sqrt(w)
    e = np.exp(-u)
    # 2(cosh u - 1) - u^2 = e^u (1 - (2 + u^2) e^-u + e^-2u)
    return w * w * e / (1.0 - (2.0 + u * u) * e + e * e)


def inv_shape_f(w):
    """1/f(w) for real w, finite for arbitrarily large positive w."""
    w = np.asarray(w, dtype=float)
    out = np.empty_like(w)
    big = w >= _EXP_SWITCH**2
    out[~big] = 1.0 / shape_f(w[~big])
    out[big] = _inv_shape_large(w[big])
    return out


def bracket_eps(dtau, a: float, s2: float):
    """eps with S = dtau^2 (1 + eps); eps >= 0 on the real axis."""
    dtau = np.asarray(dtau)
    x2 = dtau * dtau
    with np.errstate(over="ignore"):
        return a * a * x2 * shape_f(a * a * s2 * x2)


def bracket_nu0(dtau, params: TrajectoryParams):
    kind = classify(params)
    if kind is TrajectoryKind.HELIX:
        raise ValueError("bracket_nu0 needs nu = 0; use bracket_helix")
    s2 = shape_parameter(params.bbar)
    dtau = np.asarray(dtau, dtype=float)
    with np.errstate(over="ignore"):
        val = dtau * dtau * (1.0 + bracket_eps(dtau, params.a, s2))
    return float(val) if val.ndim == 0 else val


def _sinhc(y):
    y = np.asarray(y, dtype=float)
    out = np.ones_like(y)
    small = np.abs(y) < 1e-3
    out[small] = 1.0 + y[small] ** 2 / 6.0 + y[small] ** 4 / 120.0
    with np.errstate(over="ignore"):
        out[~small] = np.sinh(y[~small]) / y[~small]
    return out


def bracket_helix(dtau, params: TrajectoryParams):
    if not params.nu > 0:
        raise ValueError("bracket_helix needs nu > 0")
    h = helix_aux(params)
    dtau = np.asarray(dtau, dtype=float)
    x2 = dtau * dtau
    # sinc here is sin(pi x)/(pi x); the Gamma_- -> 0 limit is Q^2 dtau^2.
    val = h.P**2 * x2 * _sinhc(0.5 * h.GammaPlus * dtau) ** 2 - h.Q**2 * x2 * np.sinc(
        0.5 * h.GammaMinus * dtau / np.pi
    ) ** 2
    return float(val) if val.ndim == 0 else val


def bracket(dtau, params: TrajectoryParams):
    if params.nu > 0:
        return bracket_helix(dtau, params)
    return bracket_nu0(dtau, params)
