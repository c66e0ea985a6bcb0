import numpy as np
import pytest

from fournls import ConfigError, make_grid, mass, sobolev_norm
from fournls.illposedness import (
    ApproxParams,
    SolitonProfile,
    build_uap,
    change_coords,
    modulated_profile,
    modulation_norm_check,
    plan_uap_discretization,
    residual_fields,
    separation_experiment,
    uap_tracking_error,
)
from fournls.spectral import Field, to_physical, to_spectrum
from fournls.spectral import Spectrum


def small_setup(N=8.0):
    return plan_uap_discretization(N, profile_length=40.0, profile_modes=256)


class TestChangeCoords:
    def test_zero_time(self):
        N = 8.0
        s, y = change_coords(N, 0.0, 3.0)
        assert s == 0.0
        assert abs(y - 3.0 / (np.sqrt(6) * N)) < 1e-15

    def test_comoving_center(self):
        N, t = 8.0, 0.3
        s, y = change_coords(N, t, -4.0 * N**3 * t)
        assert abs(y) < 1e-12

    def test_linearity(self):
        N = 16.0
        _, y1 = change_coords(N, 0.2, 1.0)
        _, y2 = change_coords(N, 0.2, 2.0)
        _, y3 = change_coords(N, 0.2, 3.0)
        assert abs((y3 - y2) - (y2 - y1)) < 1e-14


class TestSolitonProfile:
    def test_solves_profile_equation(self):
        # i v_s - v_yy - |v|^2 v = 0 checked spectrally with an FD clock
        setup = small_setup()
        prof = SolitonProfile(1.3, setup.grid_v)
        h = 1e-6
        t = 0.37
        v = prof.value(t)
        v_t = (prof.value(t + h).values - prof.value(t - h).values) / (2 * h)
        spec = to_spectrum(v)
        v_yy = to_physical(
            Spectrum(v.grid, spec.coef * (1j * v.grid.xi) ** 2)
        ).values
        resid = 1j * v_t - v_yy - np.abs(v.values) ** 2 * v.values
        assert np.max(np.abs(resid)) < 1e-8

    def test_short_domain_rejected(self):
        with pytest.raises(ConfigError):
            SolitonProfile(0.5, make_grid(20.0, 128))


class TestBuildUap:
    def test_initial_data_form(self):
        # U_ap(0, x) = e^{iNx} v(0, x/(sqrt6 N))
        setup = small_setup()
        prof = SolitonProfile(1.0, setup.grid_v)
        u0 = build_uap(prof, setup, 0.0)
        N = setup.params.N
        x = setup.grid4.x
        a = prof.amplitude
        expect = np.exp(1j * N * x) * np.sqrt(2) * a / np.cosh(
            a * x / (np.sqrt(6) * N)
        )
        # agreement up to the soliton's periodization seam (~ e^{-a Lv/2})
        assert np.max(np.abs(u0.values - expect)) < 1e-7

    def test_carrier_unimodularity(self):
        # |U_ap(t,x)| = |v(s,y)| pointwise; in L^2: ||U_ap||^2 = sqrt6 N ||v||^2
        setup = small_setup()
        prof = SolitonProfile(1.0, setup.grid_v)
        for t in (0.0, 0.4):
            u = build_uap(prof, setup, t)
            expect = np.sqrt(6) * setup.params.N * mass(prof.value(t))
            assert abs(mass(u) - expect) < 1e-8 * expect

    def test_modulated_norm_prefactor(self):
        # ||U_ap(0)||_{H^s} ~ (sqrt6 N)^{1/2} N^s ||v||_{L^2} for large N
        for N in (16.0, 32.0):
            setup = plan_uap_discretization(N, profile_length=40.0, profile_modes=256)
            prof = SolitonProfile(1.0, setup.grid_v)
            u0 = build_uap(prof, setup, 0.0)
            s = -0.5
            Nx = setup.params.N
            predict = (np.sqrt(6) * Nx) ** 0.5 * Nx**s * np.sqrt(mass(prof.value(0.0)))
            assert abs(sobolev_norm(u0, s) / predict - 1.0) < 0.01


class TestResiduals:
    def test_identity_and_refinement(self):
        setup = small_setup()
        prof = SolitonProfile(1.0, setup.grid_v)
        coarse = residual_fields(prof, setup, t=0.3, fd_step=1e-4)
        fine = residual_fields(prof, setup, t=0.3, fd_step=1e-5)
        assert fine.relative_defect < 1e-3
        assert fine.relative_defect < coarse.relative_defect

    def test_component_ratio_scales(self):
        # |E1| / |E2| in H^{-1/2} is proportional to N^{-2}
        ratios = {}
        for N in (8.0, 16.0, 32.0):
            setup = plan_uap_discretization(N, profile_length=40.0, profile_modes=256)
            prof = SolitonProfile(1.0, setup.grid_v)
            res = residual_fields(prof, setup, t=0.1)
            ratios[N] = sobolev_norm(res.e1, -0.5) / sobolev_norm(res.e2, -0.5)
        scaled = [ratios[N] * N**2 for N in (8.0, 16.0, 32.0)]
        assert max(scaled) / min(scaled) < 1.01

    def test_zero_profile_zero_residual(self):
        setup = small_setup()

        class ZeroProfile:
            grid = setup.grid_v

            def value(self, t):
                return Field(setup.grid_v, np.zeros(setup.grid_v.M, complex))

        res = residual_fields(ZeroProfile(), setup, t=0.2)
        assert np.max(np.abs(res.e1.values)) == 0
        assert np.max(np.abs(res.e2.values)) == 0
        assert np.max(np.abs(res.direct.values)) < 1e-12


@pytest.fixture(scope="module")
def grid():
    return make_grid(200.0, 16384)


class TestModulationNorms:

    def test_carrier_slope(self, grid):
        u = lambda y: np.exp(-(y**2))
        fit = modulation_norm_check(u, -0.5, grid, "carrier", [16, 32, 64, 128])
        assert abs(fit.slope - (-0.5)) < 0.05

    def test_width_slope(self, grid):
        u = lambda y: np.exp(-(y**2))
        fit = modulation_norm_check(u, -0.5, grid, "width", [0.5, 1, 2, 4], M=96.0)
        assert abs(fit.slope - 0.5) < 0.05

    def test_amplitude_slope(self, grid):
        u = lambda y: np.exp(-(y**2))
        fit = modulation_norm_check(u, -0.5, grid, "amplitude", [0.5, 1, 2, 4], M=96.0)
        assert abs(fit.slope - 1.0) < 1e-9

    def test_hypothesis_violation_warns(self, grid):
        u = lambda y: np.exp(-(y**2))
        with pytest.warns(UserWarning):
            modulation_norm_check(
                u, -0.5, grid, "width", [1e-4, 2e-4, 4e-4, 8e-4], M=16.0
            )

    def test_modulated_profile_values(self, grid):
        u = lambda y: np.exp(-(y**2))
        v = modulated_profile(u, 2.0, 8.0, 3.0, 1.0, grid)
        x = grid.x
        expect = 2.0 * np.exp(8j * x) * np.exp(-(((x - 1.0) / 3.0) ** 2))
        assert np.max(np.abs(v.values - expect)) < 1e-14


class TestExperiments:
    def test_tracking_error_decays(self):
        errs = {
            N: uap_tracking_error(N, window=0.25, dt=2e-3, profile_modes=256,
                                  profile_length=40.0, n_records=5)
            for N in (8.0, 16.0, 32.0)
        }
        assert errs[32.0] < errs[16.0] < errs[8.0]
        rate = np.log(errs[8.0] / errs[32.0]) / np.log(4.0)
        assert abs(rate - 2.0) < 0.4

    def test_equal_amplitudes_rejected(self):
        with pytest.raises(ConfigError):
            separation_experiment(1.0, 1.0, -0.75, 16.0, T=10.0)

    def test_amplitude_range_enforced(self):
        with pytest.raises(ConfigError):
            separation_experiment(0.2, 1.0, -0.75, 16.0, T=10.0)

    def test_out_of_range_s_warns(self):
        with pytest.warns(UserWarning):
            try:
                separation_experiment(1.0, 1.05, -0.3, 16.0, T=1e-9, dt=0.5,
                                      profile_modes=256, profile_length=40.0)
            except Exception:
                pass

    def test_lambda_choice(self):
        # lam = N^(-(s+1/2)/(s+3/2)): s = -3/4 gives N^(1/3)
        rep_lam = 16.0 ** (1.0 / 3.0)
        from fournls.illposedness import separation_experiment as _  # noqa: F401
        s = -0.75
        lam = 16.0 ** (-(s + 0.5) / (s + 1.5))
        assert abs(lam - rep_lam) < 1e-12
