import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfi_lab.trajectory import TrajectoryParams, helix_aux
from qfi_lab.wightman import bracket, bracket_helix, bracket_nu0, shape_f

BBARS = [0.0, 0.3, 0.8, 1.0, 1.5, 3.0]


def _raw_mp(dtau, a, bbar, dps=60):
    """Textbook bracket in extended precision, trigonometric branch for bbar > 1."""
    with mp.workdps(dps):
        dtau, a, bbar = mp.mpf(dtau), mp.mpf(a), mp.mpf(bbar)
        s2 = 1 - bbar**2
        if s2 == 0:
            return dtau**2 + a**2 * dtau**4 / 12
        if s2 > 0:
            sh = mp.sinh(a * dtau * mp.sqrt(s2) / 2) ** 2
        else:
            sh = -mp.sin(a * dtau * mp.sqrt(-s2) / 2) ** 2
        return -(bbar**2) * dtau**2 / s2 + 4 * sh / (s2**2 * a**2)


class TestExamples:
    def test_linear(self):
        assert bracket_nu0(1.0, TrajectoryParams(1.0)) == pytest.approx(4 * math.sinh(0.5) ** 2, rel=1e-14, abs=0)
        assert round(bracket_nu0(1.0, TrajectoryParams(1.0)), 5) == 1.08616

    def test_cusped(self):
        assert bracket_nu0(1.0, TrajectoryParams(1.0, 1.0)) == pytest.approx(1 + 1 / 12, rel=1e-14, abs=0)

    @pytest.mark.parametrize("bbar", BBARS)
    def test_short_distance_limit(self, bbar):
        p = TrajectoryParams.from_bbar(1.3, bbar)
        for x in (1e-3, 1e-5, 1e-8):
            assert bracket_nu0(x, p) / x**2 == pytest.approx(1.0, abs=1e-5)

    def test_helix_origin(self):
        assert bracket_helix(0.0, TrajectoryParams(2.0, 1.0, 1.0)) == 0.0

    def test_helix_direct(self):
        p = TrajectoryParams(2.0, 1.0, 1.0)
        h = helix_aux(p)
        x = 0.5
        want = (4 * h.P**2 / h.GammaPlus**2) * math.sinh(h.GammaPlus * x / 2) ** 2 - (
            4 * h.Q**2 / h.GammaMinus**2
        ) * math.sin(h.GammaMinus * x / 2) ** 2
        assert bracket_helix(x, p) == pytest.approx(want, rel=1e-13, abs=0)

    def test_helix_large_nu_resembles_linear(self):
        got = bracket_helix(1.0, TrajectoryParams(1.0, 0.5, 100.0))
        assert got == pytest.approx(bracket_nu0(1.0, TrajectoryParams(1.0)), rel=1e-2, abs=0)

    def test_rejects_wrong_family(self):
        with pytest.raises(ValueError):
            bracket_nu0(1.0, TrajectoryParams(1.0, 0.0, 1.0))
        with pytest.raises(ValueError):
            bracket_helix(1.0, TrajectoryParams(1.0))

    def test_dispatch(self):
        assert bracket(0.7, TrajectoryParams(1.0, 0.5)) == bracket_nu0(0.7, TrajectoryParams(1.0, 0.5))


class TestAccuracy:
    @pytest.mark.parametrize("bbar", [0.0, 0.5, 1 - 1e-6, 1 + 1e-6, 2.0, 5.0])
    @pytest.mark.parametrize("x", [1e-6, 1e-3, 0.01, 0.3, 1.0, 4.0, 10.0])
    def test_matches_extended_precision(self, bbar, x):
        # the raw formula loses everything near bbar = 1 and near dtau = 0 in
        # doubles; evaluated at 60 digits it is the oracle
        a = 1.7
        want = float(_raw_mp(x, a, bbar))
        assert bracket_nu0(x, TrajectoryParams.from_bbar(a, bbar)) == pytest.approx(want, rel=1e-12, abs=0)

    @pytest.mark.parametrize("x", [0.01, 0.5, 2.0, 10.0])
    def test_smooth_across_cusp(self, x):
        # The bracket is analytic in bbar through the cusp, so each side moves
        # linearly in the offset d while the symmetric mean is O(d^2).
        a = 1.0
        cusp = bracket_nu0(x, TrajectoryParams(a, a))
        slopes = []
        for d in (1e-3, 1e-4, 1e-5):
            lo = bracket_nu0(x, TrajectoryParams.from_bbar(a, 1 - d))
            hi = bracket_nu0(x, TrajectoryParams.from_bbar(a, 1 + d))
            assert hi <= cusp <= lo
            slopes.append((lo - hi) / (2 * d))
            assert abs(0.5 * (lo + hi) - cusp) <= ((1 + x**4) * d * d + 1e-15) * cusp
        assert slopes[1] == pytest.approx(slopes[0], rel=1e-5, abs=1e-9 * cusp)
        assert slopes[2] == pytest.approx(slopes[1], rel=1e-5, abs=1e-9 * cusp)

    def test_shape_f_series_and_closed_form_meet(self):
        w = np.array([-1.0 - 1e-12, -1.0, 1.0 - 1e-12, 1.0])
        v = shape_f(w)
        assert v[0] == pytest.approx(v[1], rel=1e-11, abs=0)
        assert v[2] == pytest.approx(v[3], rel=1e-11, abs=0)
        assert shape_f(np.array([0.0]))[0] == pytest.approx(1 / 12, rel=1e-15, abs=0)

    def test_complex_shape_f_matches_real(self):
        w = np.array([-20.0, -0.5, 0.3, 5.0, 200.0])
        assert np.allclose(shape_f(w.astype(complex)).real, shape_f(w), rtol=1e-12, atol=0)


class TestProperties:
    @given(a=st.floats(0.05, 20), bbar=st.sampled_from(BBARS), x=st.floats(1e-4, 20))
    @settings(max_examples=300, deadline=None)
    def test_even_and_positive(self, a, bbar, x):
        p = TrajectoryParams.from_bbar(a, bbar)
        v = bracket_nu0(x, p)
        assert v > 0
        assert bracket_nu0(-x, p) == v

    @given(a=st.floats(0.1, 5), b=st.floats(0, 5), nu=st.floats(0.01, 5), x=st.floats(1e-3, 5))
    @settings(max_examples=200, deadline=None)
    def test_helix_even_and_positive(self, a, b, nu, x):
        p = TrajectoryParams(a, b, nu)
        v = bracket_helix(x, p)
        assert v > 0
        assert bracket_helix(-x, p) == v

    @pytest.mark.parametrize("b", [0.0, 0.5, 2.0])
    def test_helix_small_nu_reduction(self, b):
        a = 1.0
        x = np.linspace(0.1, 5, 50)
        got = bracket_helix(x, TrajectoryParams(a, b, 1e-6 * a))
        want = bracket_nu0(x, TrajectoryParams(a, b))
        assert np.max(np.abs(got / want - 1)) < 1e-5
