"""Detector response function G(omega) and the Kossakowski coefficients.

Two numerical routes are provided for nu = 0 worldlines:

* ``real``: the regularized real-axis integral
  ``(1/2pi^2) int_0^inf R(x) cos(omega x) / x^2 dx + (omega/2pi) Theta(omega)``
  on half-period panels, with the 1/x^2 tail handled analytically through
  Si(x) and a rigorous O(T^-3) bound on what remains.
* ``contour``: for omega < 0 the unregularized integral is moved onto the
  line Im(dtau) = -c just above the nearest zero of the bracket. The
  exponential smallness of the excitation rate then appears as the
  prefactor exp(omega c) instead of as cancellation, so the result keeps
  its relative accuracy however deep in the Boltzmann tail.

The regularized integral is even in omega, so G(omega) - G(-omega) = omega/2pi
for every nu = 0 worldline.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import sici

from .trajectory import TrajectoryKind, TrajectoryParams, classify
from .wightman import inv_shape_f, shape_f, shape_parameter

FOUR_PI2 = 4.0 * math.pi**2
SQRT3 = math.sqrt(3.0)

_GL_HI = np.polynomial.legendre.leggauss(16)
_GL_LO = np.polynomial.legendre.leggauss(10)
_CHUNK = 4096


class NonConvergence(RuntimeError):
    """Quadrature budget exhausted; carries the partial value and its error."""

    def __init__(self, message: str, value: float, err_estimate: float):
        super().__init__(f"{message} (partial value {value!r}, error estimate {err_estimate:.3g})")
        self.value = value
        self.err_estimate = err_estimate


class ResponseMethod(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    QUADRATURE = "quadrature"
    APPROXIMATION = "approximation"


class Regime(str, enum.Enum):
    SMALL_A_SMALL_B = "small_a_small_b"
    SMALL_A_MID_B = "small_a_mid_b"
    LARGE_A_SMALL_B = "large_a_small_b"
    LARGE_A_LARGE_B = "large_a_large_b"


@dataclass(frozen=True)
class QuadratureOptions:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_panels: int = 200_000
    tail_tol: float = 1e-10

    def __post_init__(self):
        if min(self.abs_tol, self.rel_tol, self.tail_tol) <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.max_panels < 100:
            raise ValueError("max_panels must be at least 100")


DEFAULT_QUAD = QuadratureOptions()


@dataclass(frozen=True)
class ResponseValue:
    value: float
    err_estimate: float
    method: ResponseMethod

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class KossakowskiPair:
    """Rescaled dissipator coefficients (coupling absorbed into time).

    ``gap`` is A - B = G(-Omega)/2 computed directly; forming it as a
    difference would lose everything once G(-Omega) drops below 1e-16 A.
    Derivatives are taken along the family of fixed bbar.
    """

    A: float
    B: float
    dA_da: float
    dB_da: float
    gap: float
    err_dA_da: float = 0.0

    @property
    def ratio(self) -> float:
        return self.B / self.A

    @property
    def one_minus_ratio(self) -> float:
        return self.gap / self.A

    @property
    def dratio_da(self) -> float:
        return (self.A * self.dB_da - self.B * self.dA_da) / self.A**2


def _step(omega: float) -> float:
    return 1.0 if omega > 0 else 0.0


def _check_omega(omega: float) -> None:
    if omega == 0 or not math.isfinite(omega):
        raise ValueError("omega must be finite and nonzero")


# -- closed forms --------------------------------------------------------------


def response_closed(omega: float, a: float, kind: TrajectoryKind) -> ResponseValue:
    _check_omega(omega)
    if not a > 0:
        raise ValueError("acceleration must be positive")
    kind = TrajectoryKind(kind)
    if kind is TrajectoryKind.LINEAR:
        # (omega/4pi)(1 + coth(pi omega/a)) without the 1 - coth cancellation at omega < 0
        val = (omega / (2 * math.pi)) / -math.expm1(-2 * math.pi * omega / a)
    elif kind is TrajectoryKind.CUSPED:
        val = SQRT3 * a / (24 * math.pi) * math.exp(-2 * SQRT3 * abs(omega) / a)
        val += omega / (2 * math.pi) * _step(omega)
    else:
        raise ValueError(f"no closed form for {kind.value} worldlines")
    return ResponseValue(val, 0.0, ResponseMethod.CLOSED_FORM)


def _closed_derivative_a(omega: float, a: float, kind: TrajectoryKind) -> float:
    if kind is TrajectoryKind.LINEAR:
        x = 2 * math.pi * abs(omega) / a
        em = math.exp(-x)
        # (omega^2 / 4a^2) csch^2(pi omega / a)
        return omega * omega / (a * a) * em / (-math.expm1(-x)) ** 2
    k = 2 * SQRT3 * abs(omega)
    return SQRT3 / (24 * math.pi) * math.exp(-k / a) * (1.0 + k / a)


# -- approximations ------------------------------------------------------------


def response_approx(omega: float, a: float, bbar: float, regime: Regime) -> ResponseValue:
    _check_omega(omega)
    regime = Regime(regime)
    # same Planck factor as the closed form, free of cancellation at omega < 0
    planck = (omega / (2 * math.pi)) / -math.expm1(-2 * math.pi * omega / a)
    if regime is Regime.SMALL_A_SMALL_B:
        val = planck
    elif regime is Regime.SMALL_A_MID_B:
        val = SQRT3 * a / (24 * math.pi) * math.exp(-2 * SQRT3 * abs(omega) / a)
        val += omega / (2 * math.pi) * _step(omega)
    elif regime is Regime.LARGE_A_SMALL_B:
        val = (1.0 - bbar**2) * planck
    else:
        val = 13 * a / (24 * bbar * math.pi**2) - abs(omega) / (4 * bbar**2 * math.pi)
        val += omega / (2 * math.pi) * _step(omega)
    return ResponseValue(val, 0.0, ResponseMethod.APPROXIMATION)


# -- numerics ------------------------------------------------------------------


def regularized_kernel(x, a: float, s2: float):
    """R(x)/x^2 = 1/x^2 - 1/S(x); finite at x = 0 where it equals a^2/12."""
    x = np.asarray(x, dtype=float)
    return 1.0 / (x * x + inv_shape_f(a * a * s2 * x * x) / (a * a))


def asymptotic_ratio(bbar: float) -> float:
    """Limit of the bracket ratio R at large separations."""
    return 1.0 if bbar <= 1.0 or shape_parameter(bbar) == 0.0 else 1.0 / bbar**2


def _remainder_coefficient(a: float, bbar: float, s2: float) -> float:
    """C with |R(x)/x^2 - R_inf/x^2| <= C / x^4."""
    if s2 >= 0:
        return 12.0 / (a * a)
    return 4.0 / (a * a * bbar * bbar * (bbar * bbar - 1.0))


def _feature_scale(a: float, s2: float) -> float:
    return 1.0 / (a * max(1.0, math.sqrt(abs(s2))))


def _panels(func, start: float, h: float, n: int):
    """Per-panel Gauss-Legendre sums at two orders over [start, start + n h]."""
    hi = np.empty(n, dtype=complex)
    lo = np.empty(n, dtype=complex)
    for k0 in range(0, n, _CHUNK):
        k1 = min(n, k0 + _CHUNK)
        mids = start + h * (np.arange(k0, k1) + 0.5)
        for (nodes, weights), out in ((_GL_HI, hi), (_GL_LO, lo)):
            vals = func(mids[:, None] + 0.5 * h * nodes[None, :])
            out[k0:k1] = 0.5 * h * (vals @ weights)
    return hi, lo


def _cos_tail(omega: float, T: float) -> float:
    """int_T^inf cos(omega x) / x^2 dx."""
    w = abs(omega)
    si = float(sici(w * T)[0])
    return math.cos(w * T) / T - w * (0.5 * math.pi - si)


def _real_axis(omega: float, a: float, bbar: float, quad: QuadratureOptions):
    s2 = shape_parameter(bbar)
    w = abs(omega)
    r_inf = asymptotic_ratio(bbar)
    coeff = _remainder_coefficient(a, bbar, s2)
    h = min(math.pi / w, _feature_scale(a, s2))
    pref = 1.0 / (2 * math.pi**2)
    T_want = max((coeff / (3.0 * quad.tail_tol)) ** (1.0 / 3.0), 10.0 / a, 10.0 * h)

    def integrand(x):
        return regularized_kernel(x, a, s2) * np.cos(w * x)

    while True:
        n = int(math.ceil(T_want / h))
        capped = n > quad.max_panels
        n = min(n, quad.max_panels)
        T = n * h
        hi, lo = _panels(integrand, 0.0, h, n)
        body = math.fsum(hi.real)
        quad_err = float(np.sum(np.abs(hi.real - lo.real)))
        tail = r_inf * _cos_tail(w, T)
        tail_err = coeff / (3.0 * T**3)
        value = pref * (body + tail)
        err = pref * (quad_err + tail_err)
        total = value + omega / (2 * math.pi) * _step(omega)
        tol = max(quad.abs_tol, quad.rel_tol * abs(total))
        if err <= tol:
            return total, err
        if capped or 2 * n > quad.max_panels or quad_err <= 0.5 * tol:
            raise NonConvergence("real-axis quadrature did not converge", total, err)
        h *= 0.5


def singularity_depth(a: float, bbar: float) -> float:
    """Distance below the real axis of the nearest zero of the bracket.

    The zeros nearest the axis lie on the imaginary axis: at
    dtau = -2i u/(a s) with sin(u) = bbar u for bbar < 1, and at
    dtau = -2i eta/(a k) with sinh(eta) = bbar eta, k = sqrt(bbar^2 - 1),
    for bbar > 1. Linear motion has its double zero at 2 pi / a and the cusp
    its simple zero at 2 sqrt(3) / a.
    """
    s2 = shape_parameter(bbar)
    if bbar == 0.0:
        return 2 * math.pi / a
    if s2 == 0.0:
        return 2 * SQRT3 / a
    if s2 > 0:
        u = brentq(lambda u: np.sinc(u / math.pi) - bbar, 0.0, math.pi, xtol=1e-15, rtol=1e-14)
        return 2 * u / (a * math.sqrt(s2))
    hi = 1.0
    while math.sinh(hi) / hi <= bbar:
        hi *= 2.0
    eta = brentq(lambda e: (math.sinh(e) / e if e > 0 else 1.0) - bbar, 0.0, hi, xtol=1e-15, rtol=1e-14)
    return 2 * eta / (a * math.sqrt(-s2))


def _contour(omega: float, a: float, bbar: float, quad: QuadratureOptions):
    """G(omega) for omega < 0 along Im(dtau) = -c."""
    s2 = shape_parameter(bbar)
    w = abs(omega)
    y1 = singularity_depth(a, bbar)
    delta = min(0.5 * y1, 1.0 / w)
    c = y1 - delta
    # subtracting the 1/z^2 asymptote is free: its line integral vanishes for omega < 0
    lead = 1.0 - asymptotic_ratio(bbar)
    h = min(0.5 * delta, math.pi / w, _feature_scale(a, s2))
    re_cap = 600.0

    def integrand(x):
        z = x - 1j * c
        z2 = z * z
        with np.errstate(over="ignore", invalid="ignore"):
            eps = a * a * z2 * shape_f(a * a * s2 * z2)
            inv = 1.0 / (1.0 + eps)
        if s2 > 0:
            inv = np.where(a * math.sqrt(s2) * x > re_cap, 0.0, inv)
        return np.exp(-1j * w * x) * (-(inv - lead) / (FOUR_PI2 * z2))

    x_min = 10.0 * max(y1, 1.0 / a, delta)
    # the near-pole structure has width ~delta; past 20 delta only the
    # oscillation and the kernel features limit the panel width
    x_near = 20.0 * delta
    h_far = max(h, min(math.pi / w, _feature_scale(a, s2)))
    acc = []
    quad_err = 0.0
    n_near = max(1, math.ceil(x_near / h))
    hi, lo = _panels(integrand, 0.0, h, n_near)
    acc.append(hi)
    quad_err += float(np.sum(np.abs(hi - lo)))
    used = n_near
    start = n_near * h
    h = h_far
    while True:
        n = min(_CHUNK, quad.max_panels - used)
        if n <= 0:
            J = 2.0 * math.fsum(np.concatenate(acc).real)
            val = math.exp(-w * c) * J
            raise NonConvergence("contour quadrature exhausted its panel budget", val, abs(val))
        hi, lo = _panels(integrand, start, h, n)
        acc.append(hi)
        quad_err += float(np.sum(np.abs(hi - lo)))
        used += n
        start += n * h
        tail_x = start - 0.25 * n * h + h * (np.arange(16) + 0.5) * (0.25 * n / 16)
        envelope = float(np.max(np.abs(integrand(tail_x))))
        tail_err = envelope * start / 3.0
        J = 2.0 * math.fsum(np.concatenate(acc).real)
        if start >= x_min and tail_err <= 0.1 * quad.rel_tol * abs(J):
            break
    scale = math.exp(-w * c)
    value = scale * J
    err = scale * 2.0 * (quad_err + tail_err)
    if err > quad.rel_tol * abs(value):
        raise NonConvergence("contour quadrature did not reach its tolerance", value, err)
    return value, err


def _nu0_params(params: TrajectoryParams) -> TrajectoryKind:
    kind = classify(params)
    if kind is TrajectoryKind.HELIX:
        raise ValueError("response functions are only implemented for nu = 0 worldlines")
    return kind


def response_numeric(
    omega: float,
    params: TrajectoryParams,
    quad: QuadratureOptions = DEFAULT_QUAD,
    route: str = "auto",
) -> ResponseValue:
    """Quadrature value of G(omega); ``route`` is ``auto``, ``real`` or ``contour``.

    ``auto`` integrates on the real axis for omega > 0 and on the shifted
    contour for omega < 0.
    """
    _check_omega(omega)
    _nu0_params(params)
    a, bbar = params.a, params.bbar
    if route == "auto":
        route = "real" if omega > 0 else "contour"
    if route == "real":
        val, err = _real_axis(omega, a, bbar, quad)
    elif route == "contour":
        val, err = _contour(-abs(omega), a, bbar, quad)
        val += omega / (2 * math.pi) * _step(omega)
    else:
        raise ValueError(f"unknown route {route!r}")
    return ResponseValue(float(val), float(err), ResponseMethod.QUADRATURE)


def response(
    omega: float, params: TrajectoryParams, quad: QuadratureOptions = DEFAULT_QUAD
) -> ResponseValue:
    """Closed form where one exists, quadrature otherwise."""
    kind = _nu0_params(params)
    if kind in (TrajectoryKind.LINEAR, TrajectoryKind.CUSPED):
        return response_closed(omega, params.a, kind)
    return response_numeric(omega, params, quad)


def response_derivative_a(
    omega: float,
    params: TrajectoryParams,
    quad: QuadratureOptions = DEFAULT_QUAD,
    method: str = "auto",
) -> float:
    """dG/da at fixed bbar; analytic for linear and cusped motion.

    ``method="fd"`` forces the finite-difference path for every kind.
    """
    return _derivative_a(omega, params, quad, method)[0]


def _derivative_a(omega, params, quad, method="auto"):
    _check_omega(omega)
    kind = _nu0_params(params)
    if method not in ("auto", "fd"):
        raise ValueError(f"unknown derivative method {method!r}")
    if method == "auto" and kind in (TrajectoryKind.LINEAR, TrajectoryKind.CUSPED):
        return _closed_derivative_a(omega, params.a, kind), 0.0
    a = params.a
    h = 1e-4 * a
    # the Theta(omega) piece is a-independent, so differentiate the even part
    w = -abs(omega)

    def g(x):
        return response_numeric(w, params.with_a(x), quad)

    def central(step):
        gp, gm = g(a + step), g(a - step)
        return (gp.value - gm.value) / (2 * step), (gp.err_estimate + gm.err_estimate) / (2 * step)

    d1, e1 = central(h)
    d2, e2 = central(0.5 * h)
    deriv = (4.0 * d2 - d1) / 3.0
    return deriv, (4.0 * e2 + e1) / 3.0 + abs(d2 - d1) / 3.0


def kossakowski(
    omega_gap: float, params: TrajectoryParams, quad: QuadratureOptions = DEFAULT_QUAD
) -> KossakowskiPair:
    if not omega_gap > 0:
        raise ValueError("the detector gap must be positive")
    kind = _nu0_params(params)
    g_minus = response(-omega_gap, params, quad).value
    if g_minus < -quad.abs_tol:
        raise ValueError(f"negative excitation rate {g_minus!r}: internal inconsistency")
    g_minus = max(g_minus, 0.0)
    # evenness of the regularized integral fixes G(+Omega) = Omega/2pi + G(-Omega)
    g_plus = omega_gap / (2 * math.pi) + g_minus
    dg, dg_err = _derivative_a(-omega_gap, params, quad)
    A = 0.25 * (g_plus + g_minus)
    B = 0.25 * (g_plus - g_minus)
    return KossakowskiPair(
        A=A, B=B, dA_da=0.5 * dg, dB_da=0.0, gap=0.5 * g_minus, err_dA_da=0.5 * dg_err
    )
