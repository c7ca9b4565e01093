import cmath
import math

import numpy as np
import pytest

from obsgap import rfhe
from obsgap.errors import ParameterError
from obsgap.spectral_core import (
    PHYSICAL,
    FourierCoeffs,
    Grid1D,
    SampledField,
    l2_norm,
    semiclassical_fourier,
)

Z45 = cmath.exp(1j * math.pi / 4.0)


def default_evo(T=1.0):
    return rfhe.EvolutionParams(alpha=0.5, z=Z45, T=T)


class TestParams:
    def test_evolution_params_validate(self):
        with pytest.raises(ParameterError):
            rfhe.EvolutionParams(alpha=1.0, z=Z45, T=1.0)
        with pytest.raises(ParameterError):
            rfhe.EvolutionParams(alpha=-0.1, z=Z45, T=1.0)
        with pytest.raises(ParameterError):
            rfhe.EvolutionParams(alpha=0.5, z=-1.0 + 0.2j, T=1.0)
        with pytest.raises(ParameterError):
            rfhe.EvolutionParams(alpha=0.5, z=Z45, T=-1.0)

    def test_alpha_zero_allowed(self):
        evo = rfhe.EvolutionParams(alpha=0.0, z=Z45, T=1.0)
        assert evo.alpha == 0.0

    def test_coherent_state_spec_validates(self):
        with pytest.raises(ParameterError):
            rfhe.CoherentStateSpec(xi0=1.0, h=0.0)
        with pytest.raises(ParameterError):
            rfhe.CoherentStateSpec(xi0=-1.0, h=0.1)


class TestCutoff:
    def test_plateau_and_support(self):
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        assert cut.inner == pytest.approx(0.25)
        assert cut.outer == pytest.approx(0.5)
        s = np.array([-0.6, -0.5, -0.2, 0.0, 0.2, 0.5, 0.6])
        vals = rfhe.cutoff_eval(cut, s)
        assert vals[3] == 1.0
        assert vals[2] == 1.0 and vals[4] == 1.0
        assert vals[0] == 0.0 and vals[1] == 0.0
        assert vals[5] == 0.0 and vals[6] == 0.0

    def test_transition_monotone_and_even(self):
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        s = np.linspace(0.25, 0.5, 200)
        vals = rfhe.cutoff_eval(cut, s)
        assert np.all(np.diff(vals) <= 1e-15)
        assert np.allclose(rfhe.cutoff_eval(cut, -s), vals)

    def test_smooth_step_range(self):
        t = np.linspace(0.0, 1.0, 101)
        v = rfhe.smooth_step(t)
        assert v[0] == 0.0 and v[-1] == 1.0
        assert np.all((v >= 0.0) & (v <= 1.0))
        assert np.all(np.diff(v) >= -1e-15)


class TestCoherentState:
    def test_pointwise_formula(self):
        h, xi0 = 0.1, 1.0
        grid = Grid1D(-2.0, 2.0, 401)
        f = rfhe.coherent_state(rfhe.CoherentStateSpec(xi0=xi0, h=h), grid)
        x = grid.nodes()
        expect = (math.pi * h) ** -0.25 * np.exp(1j * x * xi0 / h - x**2 / (2 * h))
        assert np.max(np.abs(f.values - expect)) < 1e-14

    def test_unit_norm(self):
        grid = Grid1D(-6.0, 6.0, 4001)
        f = rfhe.coherent_state(rfhe.CoherentStateSpec(xi0=1.0, h=0.1), grid)
        assert l2_norm(f) == pytest.approx(1.0, rel=1e-10)

    def test_frequency_profile_matches_transform(self):
        # on the cutoff plateau the profile equals F_h of the coherent state
        h, xi0 = 0.1, 1.0
        cs = rfhe.CoherentStateSpec(xi0=xi0, h=h)
        cut = rfhe.CutoffSpec.for_xi0(xi0)
        grid = Grid1D(-12.0, 12.0, 4097)
        f = rfhe.coherent_state(cs, grid)
        xi = np.linspace(0.8, 1.2, 41)
        fh = semiclassical_fourier(f, h, Grid1D(0.8, 1.2, 41))
        prof = rfhe.frequency_profile(cs, cut, xi)
        assert np.max(np.abs(fh.values - prof)) < 1e-9

    def test_frequency_profile_vanishes_off_band(self):
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=0.1)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        assert rfhe.frequency_profile(cs, cut, np.array([0.4, 1.6])).tolist() == [0.0, 0.0]


class TestBandlimitedState:
    def test_peak_near_semiclassical_scale(self):
        # |g0(0)| = (pi h)^{-1/4} (1 + o(1)); the o(1) term is still 0.24
        # at h = 0.1, so the measured ratio is pinned instead
        h = 0.1
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=h)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        grid = Grid1D(-8.0, 8.0, 2001)
        g0 = rfhe.bandlimited_state(cs, cut, grid)
        ratio = float(np.max(np.abs(g0.values))) / (math.pi * h) ** -0.25
        assert ratio == pytest.approx(0.7603989447795572, rel=1e-10)

    def test_peak_ratio_improves_as_h_shrinks(self):
        ratios = []
        for h in (0.1, 0.02):
            cs = rfhe.CoherentStateSpec(xi0=1.0, h=h)
            cut = rfhe.CutoffSpec.for_xi0(1.0)
            grid = Grid1D(-4.0, 4.0, 4001)
            g0 = rfhe.bandlimited_state(cs, cut, grid)
            ratios.append(float(np.max(np.abs(g0.values))) / (math.pi * h) ** -0.25)
        assert ratios[1] > ratios[0]

    def test_stretched_exponential_tail(self):
        # |g0(x)| <= C exp(-c sqrt(x/h)) off the center
        h = 0.1
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=h)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        grid = Grid1D(2.0, 40.0, 1901)
        g0 = rfhe.bandlimited_state(cs, cut, grid)
        x = grid.nodes()
        logs = np.log(np.abs(g0.values))
        scaled = logs / np.sqrt(x / h)
        # the effective decay constant climbs from 0.63 at the band start
        # toward 0.87 by x = 40
        assert np.max(scaled) < -0.6
        assert scaled[-1] < -0.85
        assert np.max(np.abs(g0.values)) < 0.06


class TestEvolveLine:
    def test_time_zero_is_initial_state(self):
        h = 0.1
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=h)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        grid = Grid1D(-8.0, 8.0, 2001)
        g0 = rfhe.bandlimited_state(cs, cut, grid)
        gt = rfhe.evolve_line(cs, cut, default_evo(), 0.0, grid)
        assert np.max(np.abs(gt.values - g0.values)) == 0.0

    def test_norm_contracts(self):
        h = 0.1
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=h)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        grid = Grid1D(-8.0, 8.0, 2001)
        norms = [
            l2_norm(rfhe.evolve_line(cs, cut, default_evo(), t, grid))
            for t in (0.0, 0.4, 1.0)
        ]
        assert norms[0] > norms[1] > norms[2]
        assert norms[2] == pytest.approx(0.10500192653052781, rel=1e-9)

    def test_alpha_zero_is_scalar_decay(self):
        # (-Delta)^0 = identity: evolution is multiplication by e^{-t zbar}
        h = 0.1
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=h)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        evo = rfhe.EvolutionParams(alpha=0.0, z=Z45, T=1.0)
        grid = Grid1D(-6.0, 6.0, 1501)
        g0 = rfhe.bandlimited_state(cs, cut, grid)
        gt = rfhe.evolve_line(cs, cut, evo, 0.7, grid)
        factor = np.exp(-0.7 * np.conj(Z45))
        assert np.max(np.abs(gt.values - factor * g0.values)) < 1e-12

    def test_rejects_negative_time(self):
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=0.1)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        grid = Grid1D(-6.0, 6.0, 1501)
        with pytest.raises(ParameterError):
            rfhe.evolve_line(cs, cut, default_evo(), -0.1, grid)


class TestEvolveTorus:
    def coeffs(self):
        n = np.arange(6, 15)
        c = np.exp(-((0.1 * n - 1.0) ** 2) / 0.2).astype(complex)
        return FourierCoeffs(6, 14, c)

    def test_semigroup_property(self):
        c0 = self.coeffs()
        evo = default_evo()
        both = rfhe.evolve_torus(rfhe.evolve_torus(c0, evo, 0.3), evo, 0.45)
        once = rfhe.evolve_torus(c0, evo, 0.75)
        assert np.max(np.abs(both.c - once.c)) < 1e-14

    def test_multiplier_values(self):
        c0 = self.coeffs()
        evo = default_evo()
        ct = rfhe.evolve_torus(c0, evo, 0.6)
        n = c0.modes()
        expect = c0.c * np.exp(-0.6 * np.conj(Z45) * np.abs(n) ** 0.5)
        assert np.max(np.abs(ct.c - expect)) == 0.0

    def test_norm_decays(self):
        c0 = self.coeffs()
        evo = default_evo()
        n0 = c0.parseval_norm()
        n1 = rfhe.evolve_torus(c0, evo, 0.5).parseval_norm()
        assert n1 < n0


class TestPointwiseBounds:
    def test_sweep_report_frozen(self):
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=0.2)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        rep = rfhe.verify_pointwise_bounds(
            cs, cut, default_evo(), (0.2, 0.1, 0.05), eps=0.5
        )
        assert rep.m_out == pytest.approx(
            [0.1958610, 0.03356933, 0.004494266], rel=1e-5
        )
        assert rep.slope_out == pytest.approx(-0.244417, rel=1e-4)
        assert rep.slope_out < 0
        # h log m_out stays below a negative level rather than decreasing
        # monotonically at desk-scale h
        assert np.all(rep.h_log_m_out < -0.2)
        assert rep.max_in == pytest.approx(0.884234, rel=1e-4)

    def test_needs_two_h_values(self):
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=0.2)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        with pytest.raises(ParameterError):
            rfhe.verify_pointwise_bounds(cs, cut, default_evo(), (0.2,), eps=0.5)


class TestDefaultFrequencyGrid:
    def test_resolves_requested_extent(self):
        cs = rfhe.CoherentStateSpec(xi0=1.0, h=0.1)
        cut = rfhe.CutoffSpec.for_xi0(1.0)
        grid = rfhe.default_frequency_grid(cs, cut, x_max=8.0)
        # spacing must resolve e^{i x xi / h} out to x_max
        assert grid.spacing <= 0.1 / (8.0 * 8.0) + 1e-15
        assert grid.lo >= 0.4 and grid.hi <= 1.6
