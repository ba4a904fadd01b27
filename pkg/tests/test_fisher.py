import dataclasses
import math
from functools import lru_cache

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfi_lab.dynamics import (
    DetectorConfig,
    bloch_da,
    bloch_dtheta,
    bloch_state,
    density_matrix,
    pauli_combination,
    purity_deficit,
)
from qfi_lab.fisher import (
    APPROX_LINES,
    ApproxFormula as F,
    QfiMethod,
    circular_crossover_bbar,
    qfi_acceleration,
    qfi_approx,
    qfi_asymptotic_a,
    qfi_from_bloch,
    qfi_spectral,
    qfi_theta,
)
from qfi_lab.response import kossakowski
from qfi_lab.trajectory import TrajectoryParams

FOUR = (0.0, 0.5, 1.0, 2.0)
THETA_GRID = np.arange(-200, 201) * (math.pi / 100)


@lru_cache(maxsize=None)
def pair(a, bbar):
    return kossakowski(1.0, TrajectoryParams.from_bbar(a, bbar))


def cfg(a, bbar, theta=0.0):
    return DetectorConfig(theta, 1.0, pair(a, bbar))


def tau_for(c, decay):
    return decay / (4 * c.pair.A)


def spectral_qfi(w, dw, phase=0.0):
    """Oracle: QFI from the density matrix after a common rotation by phase."""
    rot = np.array([[math.cos(phase), -math.sin(phase), 0], [math.sin(phase), math.cos(phase), 0], [0, 0, 1]])
    w, dw = rot @ np.asarray(w), rot @ np.asarray(dw)
    return qfi_spectral(density_matrix(w), 0.5 * pauli_combination(dw)).value


def spectral_qfi_exact(c, t, dw, dps=40):
    """Oracle at 40 digits: state rebuilt from the pair, QFI from the eigenbasis of rho.

    Near the surface of the ball a float Bloch vector fixes 1 - |w|^2 only to
    about eps / (1 - |w|^2) relative, so the comparison state is built in
    extended precision from the same pair.
    """
    with mp.workdps(dps):
        A, g = mp.mpf(c.pair.A), mp.mpf(c.pair.gap) / mp.mpf(c.pair.A)
        th, t = mp.mpf(c.theta), mp.mpf(t)
        e2 = mp.exp(-2 * A * t)
        w = [e2 * mp.sin(th), mp.mpf(0), e2 * e2 * mp.cos(th) - (1 - g) * (1 - e2 * e2)]
        sig = [mp.matrix([[0, 1], [1, 0]]), mp.matrix([[0, -1j], [1j, 0]]), mp.matrix([[1, 0], [0, -1]])]
        rho = mp.eye(2) / 2 + sum((w[k] * sig[k] for k in range(3)), mp.zeros(2)) / 2
        drho = sum((mp.mpf(float(dw[k])) * sig[k] for k in range(3)), mp.zeros(2)) / 2
        p, U = mp.eighe(rho)
        d = U.H * drho * U
        total = sum(abs(d[m, n]) ** 2 / (p[m] + p[n]) for m in range(2) for n in range(2) if p[m] + p[n] > 0)
        return float(2 * total)


class TestBlochForm:
    @pytest.mark.parametrize("theta", [0.0, 0.7, 2.5])
    def test_pure_initial_state(self, theta):
        w = [math.sin(theta), 0, math.cos(theta)]
        dw = [math.cos(theta), 0, -math.sin(theta)]
        r = qfi_from_bloch(w, dw)
        assert r.value == pytest.approx(1.0, abs=1e-15)
        assert r.method is QfiMethod.BLOCH_CHAIN

    def test_maximally_mixed(self):
        assert qfi_from_bloch([0, 0, 0], [0, 0, 0.3]).value == pytest.approx(0.09, rel=1e-15, abs=0)

    def test_pure_state_with_radial_derivative_is_rejected(self):
        with pytest.raises(ValueError):
            qfi_from_bloch([0, 0, 1], [0, 0, 0.5])

    def test_rejects_outside_ball(self):
        with pytest.raises(ValueError):
            qfi_from_bloch([0, 0, 1 + 1e-8], [1, 0, 0])

    def test_worked_example(self):
        # linear a = 1, theta = pi/2, 4 A tau = 1; w = (e^{-1/2}, 0, -0.6298)
        c = cfg(1.0, 0.0, math.pi / 2)
        t = tau_for(c, 1.0)
        w, dw = bloch_state(t, c).vector, bloch_dtheta(t, c)
        chain = qfi_from_bloch(w, dw).value
        assert chain == pytest.approx(0.3632, abs=5e-5)
        assert chain == pytest.approx(spectral_qfi(w, dw), rel=1e-12, abs=0)
        # closed chain written out
        e4, w3 = math.exp(-1), w[2]
        base = e4 * e4
        wd = -w3 * e4
        assert chain == pytest.approx(base + wd * wd / (1 - e4 - w3 * w3), rel=1e-12, abs=0)
        assert qfi_theta(t, c).value == pytest.approx(chain, rel=1e-15, abs=0)


class TestSpectral:
    def test_centre(self):
        r = qfi_spectral(np.eye(2) / 2, 0.5 * 0.7 * np.diag([1, -1]))
        assert r.value == pytest.approx(0.49, rel=1e-14, abs=0)
        assert r.method is QfiMethod.SPECTRAL_ORACLE

    def test_pure_tangent(self):
        w, dw = np.array([0.0, 0, 1]), np.array([0.4, -0.2, 0])
        assert spectral_qfi(w, dw) == pytest.approx(float(dw @ dw), rel=1e-12, abs=0)

    def test_random_agreement(self):
        rng = np.random.default_rng(20240613)
        worst = 0.0
        for _ in range(1000):
            d = rng.normal(size=3)
            w = d / np.linalg.norm(d) * rng.uniform(0, 0.999)
            dw = rng.normal(size=3)
            b, s = qfi_from_bloch(w, dw).value, spectral_qfi(w, dw)
            worst = max(worst, abs(b - s) / s)
        assert worst <= 1e-9

    @given(
        w=st.lists(st.floats(-0.57, 0.57), min_size=3, max_size=3),
        dw=st.lists(st.floats(-2, 2), min_size=3, max_size=3).filter(lambda v: sum(x * x for x in v) > 1e-6),
    )
    @settings(max_examples=200, deadline=None)
    def test_phase_invariance(self, w, dw):
        assert spectral_qfi(w, dw, 1.234) == pytest.approx(spectral_qfi(w, dw), rel=1e-12, abs=0)

    def test_rejects_non_state(self):
        with pytest.raises(ValueError):
            qfi_spectral(np.diag([0.5, 0.6]), np.zeros((2, 2)))
        with pytest.raises(ValueError):
            qfi_spectral(np.diag([1.2, -0.2]), np.zeros((2, 2)))
        with pytest.raises(ValueError):
            qfi_spectral(np.eye(3) / 3, np.zeros((3, 3)))


class TestChain:
    @pytest.mark.parametrize("bbar", FOUR)
    def test_initial_time(self, bbar):
        for theta in THETA_GRID[::20]:
            c = cfg(1.0, bbar, float(theta))
            assert abs(qfi_theta(0.0, c).value - 1) <= 1e-12
            assert abs(qfi_acceleration(0.0, c).value) <= 1e-12

    def test_theta_at_zero_angle(self):
        c = cfg(2.0, 0.5, 0.0)
        for d in (0.3, 2.0, 10.0):
            assert qfi_theta(tau_for(c, d), c).value == pytest.approx(math.exp(-d), rel=1e-12, abs=0)

    def test_oracle_equivalence_on_dynamics(self):
        rng = np.random.default_rng(11)
        mp_checked = 0
        checked = 0
        worst = 0.0
        for _ in range(1000):
            bbar = FOUR[rng.integers(4)]
            a = float(rng.choice([0.3, 0.5, 1.0, 2.0, 5.0, 10.0]))
            c = cfg(a, bbar, float(rng.uniform(-2 * math.pi, 2 * math.pi)))
            t = tau_for(c, float(rng.uniform(0, 12)))
            if purity_deficit(t, c) <= 1e-8:
                continue
            w = bloch_state(t, c).vector
            for deriv, fn in ((bloch_dtheta, qfi_theta), (bloch_da, qfi_acceleration)):
                dw = deriv(t, c)
                if purity_deficit(t, c) < 1e-4:
                    s = spectral_qfi_exact(c, t, dw)
                    mp_checked += 1
                else:
                    s = spectral_qfi(w, dw)
                if s == 0:
                    continue
                worst = max(worst, abs(fn(t, c).value - s) / s)
                checked += 1
        assert checked > 1500 and mp_checked > 0
        assert worst <= 1e-9

    @given(
        bbar=st.sampled_from(FOUR),
        a=st.sampled_from([0.5, 1.0, 5.0]),
        theta=st.floats(0, 2 * math.pi),
        decay=st.floats(0, 20),
    )
    @settings(max_examples=200, deadline=None)
    def test_even_in_theta(self, bbar, a, theta, decay):
        cp, cm = cfg(a, bbar, theta), cfg(a, bbar, -theta)
        t = tau_for(cp, decay)
        assert qfi_theta(t, cp).value == qfi_theta(t, cm).value
        assert qfi_acceleration(t, cp).value == qfi_acceleration(t, cm).value

    def test_short_time_small_a(self):
        c = cfg(0.1, 0.0, math.pi / 4)
        got = qfi_acceleration(0.01, c).value
        want = qfi_approx(F.ACCELERATION_SHORT_TIME, 1, a=0.1, theta=math.pi / 4, tau=0.01).value
        assert got == pytest.approx(want, rel=0.1, abs=0)

    @pytest.mark.parametrize("decay", [41.0, 60.0, 100.0])
    def test_linear_large_a_reaches_asymptote(self, decay):
        c = cfg(10.0, 0.0, math.pi / 3)
        got = qfi_acceleration(tau_for(c, decay), c).value
        assert got == pytest.approx(qfi_asymptotic_a(c).value, rel=1e-6, abs=0)

    @pytest.mark.parametrize("bbar", FOUR)
    def test_theta_information_is_erased(self, bbar):
        for a in (0.5, 1.0, 10.0):
            for theta in (0.0, math.pi / 4, math.pi / 2, math.pi):
                c = cfg(a, bbar, theta)
                for d in (8.0, 12.0, 30.0):
                    assert qfi_theta(tau_for(c, d), c).value < 1e-3

    def test_error_estimate_tracks_derivative_noise(self):
        c = cfg(1.0, 0.5, 1.0)
        r = qfi_acceleration(tau_for(c, 3.0), c)
        assert 0 < r.err_estimate < 1e-6 * r.value
        assert qfi_acceleration(1.0, cfg(1.0, 0.0, 1.0)).err_estimate == 0


class TestExtremalStructure:
    # fixed tau = 1, within the plotted range of the theta figures
    @pytest.mark.parametrize("bbar", FOUR)
    @pytest.mark.parametrize("a", [0.5, 1.0, 5.0])
    def test_argmax_locations(self, a, bbar):
        v_theta = [qfi_theta(1.0, cfg(a, bbar, float(t))).value for t in THETA_GRID]
        v_acc = [qfi_acceleration(1.0, cfg(a, bbar, float(t))).value for t in THETA_GRID]
        k_theta = THETA_GRID[int(np.argmax(v_theta))] / math.pi
        k_acc = THETA_GRID[int(np.argmax(v_acc))] / math.pi
        assert abs(k_theta - round(k_theta)) < 1e-9
        assert abs(k_acc - round(k_acc)) < 1e-9 and round(k_acc) % 2 == 1

    def test_acceleration_argmax_leaves_odd_poles_at_late_times(self):
        # beyond the plotted time range the ground state no longer maximises F_Q(a)
        c0 = cfg(10.0, 0.0)
        t = tau_for(c0, 4.0)
        vals = [qfi_acceleration(t, cfg(10.0, 0.0, float(th))).value for th in THETA_GRID]
        k = THETA_GRID[int(np.argmax(vals))] / math.pi
        assert abs(k - round(k)) > 0.01


class TestOrderings:
    def test_acceleration_small_a(self):
        lin = cfg(0.5, 0.0, math.pi / 4)
        taus = np.linspace(1, 50, 50) / 50 * tau_for(lin, 6.0)
        for t in taus:
            vals = [qfi_acceleration(float(t), cfg(0.5, b, math.pi / 4)).value for b in FOUR]
            assert vals == sorted(vals) and len(set(vals)) == 4

    def test_theta_small_a(self):
        vals = [qfi_theta(1.0, cfg(0.5, b, math.pi / 4)).value for b in FOUR]
        assert vals == sorted(vals, reverse=True)

    def test_theta_large_a_flips(self):
        for t in (1.0, 3.0, 10.0):
            vals = [qfi_theta(t, cfg(10.0, b, math.pi / 4)).value for b in FOUR]
            assert vals == sorted(vals)


class TestAsymptotic:
    def test_linear_unit_acceleration(self):
        r = qfi_asymptotic_a(cfg(1.0, 0.0))
        assert r.value == pytest.approx(math.pi**2 / math.cosh(math.pi) ** 2, rel=1e-9, abs=0)
        assert round(r.value, 5) == 0.07345
        assert r.method is QfiMethod.ASYMPTOTIC

    def test_linear_small_a_law(self):
        got = qfi_asymptotic_a(cfg(0.1, 0.0)).value
        want = 4 * math.pi**2 / 0.1**4 * math.exp(-2 * math.pi / 0.1)
        assert got == pytest.approx(want, rel=0.05, abs=0)

    def test_cusped_large_a_law(self):
        assert qfi_asymptotic_a(cfg(100.0, 1.0)).value == pytest.approx(12 / 100.0**4, rel=0.05, abs=0)

    def test_theta_independent(self):
        vals = [qfi_acceleration(tau_for(cfg(2.0, 0.5), 60.0), cfg(2.0, 0.5, th)).value
                for th in (0, math.pi / 4, math.pi / 2, 3 * math.pi / 4, math.pi)]
        assert (max(vals) - min(vals)) / max(vals) <= 1e-6
        assert vals[0] == pytest.approx(qfi_asymptotic_a(cfg(2.0, 0.5)).value, rel=1e-6, abs=0)

    def test_rejects_pure_asymptote(self):
        p = pair(1.0, 0.0)
        bad = dataclasses.replace(p, gap=0.0)
        with pytest.raises(ValueError):
            qfi_asymptotic_a(DetectorConfig(0.0, 1.0, bad))


class TestApprox:
    def test_large_a_linear(self):
        r = qfi_approx(F.ASYMPTOTIC_LARGE_A, 1, a=100.0, bbar=0.0)
        assert r.value == pytest.approx(math.pi**2 / 1e8, rel=1e-15, abs=0)
        assert r.method is QfiMethod.APPROXIMATION

    def test_theta_long_time_cusped(self):
        a = 3.0
        r = qfi_approx(F.THETA_LONG_TIME, 2, a=a, theta=0.0, tau=4 * math.sqrt(3) * math.pi / a)
        assert r.value == pytest.approx(math.exp(-1), rel=1e-14, abs=0)

    def test_line_numbers_checked(self):
        for formula, n in APPROX_LINES.items():
            qfi_approx(formula, n, a=2.0, bbar=3.0, theta=0.3, tau=0.1)
            with pytest.raises(ValueError):
                qfi_approx(formula, n + 1, a=2.0)
            with pytest.raises(ValueError):
                qfi_approx(formula, 0, a=2.0)

    def test_long_time_reduces_to_asymptote(self):
        for line, bbar in ((1, 0.2), (2, 1.0), (3, 4.0)):
            big = qfi_approx(F.ACCELERATION_LONG_TIME, line, a=50.0, bbar=bbar, theta=1.0, tau=1e4).value
            asy = qfi_approx(F.ASYMPTOTIC_LARGE_A, line, a=50.0, bbar=bbar).value
            assert big == pytest.approx(asy, rel=1e-12, abs=0)


class TestCrossover:
    def test_value(self):
        b = circular_crossover_bbar()
        assert b == pytest.approx(2.3891, abs=1e-4)
        assert abs(b - 2.4) <= 0.011

    def test_lines_meet(self):
        b = circular_crossover_bbar()
        l2 = qfi_approx(F.ASYMPTOTIC_LARGE_A, 2, a=7.0).value
        l3 = qfi_approx(F.ASYMPTOTIC_LARGE_A, 3, a=7.0, bbar=b).value
        assert l3 == pytest.approx(l2, rel=1e-12, abs=0)
        assert qfi_approx(F.ASYMPTOTIC_LARGE_A, 3, a=7.0, bbar=b * 1.01).value > l2
