import numpy as np
import pytest

from fournls import (
    ConfigError,
    Field,
    NumericDomainError,
    ResolutionError,
    SymbolFn,
    apply_symbol,
    fractional_derivative,
    lebesgue_norm,
    make_gaussian,
    make_grid,
    project_band,
    sobolev_norm,
    to_physical,
    to_spectrum,
)
from fournls.spectral import (
    boundary_tail_fraction,
    check_resolved,
    field_from_binary,
    field_from_csv,
    field_to_binary,
    field_to_csv,
    spectral_tail_fraction,
    spectrum_from_csv,
    spectrum_to_csv,
)


def random_field(grid, rng, decay=2.0):
    coef = (rng.normal(size=grid.M) + 1j * rng.normal(size=grid.M))
    coef /= (1.0 + np.abs(grid.k)) ** decay
    return to_physical(type(to_spectrum(Field(grid, np.zeros(grid.M))))(grid, coef))


class TestGrid:
    def test_unit_spacing_frequencies(self):
        g = make_grid(2 * np.pi, 8)
        assert sorted(g.k.tolist()) == [-4, -3, -2, -1, 0, 1, 2, 3]
        assert np.allclose(sorted(g.xi), np.arange(-4, 4))

    def test_dx(self):
        g = make_grid(100.0, 1024)
        assert g.dx == 100.0 / 1024
        assert g.dx * g.M == g.L

    def test_invalid(self):
        with pytest.raises(ConfigError):
            make_grid(-1.0, 16)
        with pytest.raises(ConfigError):
            make_grid(10.0, 15)
        with pytest.raises(ConfigError):
            make_grid(10.0, 4)


class TestTransforms:
    def test_single_mode(self):
        g = make_grid(2 * np.pi, 8)
        s = to_spectrum(Field(g, np.exp(1j * g.x)))
        assert abs(s.coef[1] - 1.0) < 1e-14
        assert np.max(np.abs(np.delete(s.coef, 1))) < 1e-14

    def test_constant(self):
        g = make_grid(2 * np.pi, 8)
        s = to_spectrum(Field(g, np.full(8, 3.0, dtype=complex)))
        assert abs(s.coef[0] - 3.0) < 1e-14
        assert np.max(np.abs(s.coef[1:])) < 1e-14

    def test_roundtrip_random(self):
        rng = np.random.default_rng(0)
        g = make_grid(30.0, 128)
        u = Field(g, rng.normal(size=128) + 1j * rng.normal(size=128))
        back = to_physical(to_spectrum(u))
        assert np.max(np.abs(back.values - u.values)) < 1e-12 * np.max(np.abs(u.values))

    def test_parseval(self):
        rng = np.random.default_rng(1)
        g = make_grid(17.0, 256)
        u = Field(g, rng.normal(size=256) + 1j * rng.normal(size=256))
        phys = g.dx * np.sum(np.abs(u.values) ** 2)
        spec = g.L * np.sum(np.abs(to_spectrum(u).coef) ** 2)
        assert abs(phys - spec) <= 1e-10 * phys


class TestSymbols:
    def test_identity(self):
        g = make_grid(10.0, 32)
        u = Field(g, np.sin(g.x) + 0.5j)
        out = to_physical(apply_symbol(to_spectrum(u), SymbolFn(lambda xi: np.ones_like(xi))))
        assert np.allclose(out.values, u.values)

    def test_half_derivative_unit_mode(self):
        g = make_grid(2 * np.pi, 16)
        u = Field(g, np.exp(1j * g.x))
        out = fractional_derivative(u, 0.5)
        assert np.max(np.abs(out.values - u.values)) < 1e-13

    def test_second_derivative(self):
        g = make_grid(2 * np.pi, 16)
        u = Field(g, np.exp(2j * g.x))
        out = fractional_derivative(u, 2.0)
        assert np.max(np.abs(out.values - 4.0 * u.values)) < 1e-12

    def test_derivative_of_constant_vanishes(self):
        g = make_grid(2 * np.pi, 16)
        out = fractional_derivative(Field(g, np.full(16, 2.0 + 0j)), 0.7)
        assert np.max(np.abs(out.values)) < 1e-14

    def test_negative_order_rejected(self):
        g = make_grid(2 * np.pi, 16)
        with pytest.raises(ConfigError):
            fractional_derivative(Field(g, np.ones(16, complex)), -1.0)

    def test_nonfinite_symbol_rejected(self):
        g = make_grid(2 * np.pi, 16)
        s = to_spectrum(Field(g, np.ones(16, complex)))
        with pytest.raises(NumericDomainError):
            apply_symbol(s, SymbolFn(lambda xi: 1.0 / xi))

    def test_symbol_composition(self):
        rng = np.random.default_rng(2)
        g = make_grid(11.0, 64)
        u = Field(g, rng.normal(size=64) + 1j * rng.normal(size=64))
        s1 = SymbolFn(lambda xi: np.exp(1j * xi))
        s2 = SymbolFn(lambda xi: 1.0 + xi**2)
        a = apply_symbol(apply_symbol(to_spectrum(u), s1), s2)
        b = apply_symbol(to_spectrum(u), SymbolFn(lambda xi: np.exp(1j * xi) * (1 + xi**2)))
        assert np.allclose(a.coef, b.coef, rtol=0, atol=1e-14)


class TestNorms:
    def test_l2_constant(self):
        g = make_grid(5.0, 32)
        u = Field(g, np.full(32, 2.0 - 1.0j))
        assert abs(sobolev_norm(u, 0.0) - abs(2 - 1j) * np.sqrt(5.0)) < 1e-12

    def test_single_mode_hs(self):
        g = make_grid(2 * np.pi, 32)
        for k in (1, 3, -5):
            u = Field(g, np.exp(1j * k * g.x))
            for s in (-0.5, 0.0, 1.5):
                expect = np.sqrt(g.L) * (1 + k * k) ** (s / 2)
                assert abs(sobolev_norm(u, s) - expect) < 1e-12 * expect

    def test_lebesgue_matches_l2(self):
        rng = np.random.default_rng(3)
        g = make_grid(9.0, 64)
        u = Field(g, rng.normal(size=64) + 1j * rng.normal(size=64))
        assert abs(lebesgue_norm(u, 2) - sobolev_norm(u, 0.0)) < 1e-12

    def test_lebesgue_inf_and_p4(self):
        g = make_grid(2 * np.pi, 32)
        u = Field(g, 3.0 * np.exp(1j * g.x))
        assert abs(lebesgue_norm(u, np.inf) - 3.0) < 1e-12
        ones = Field(g, np.ones(32, complex))
        assert abs(lebesgue_norm(ones, 4) - (2 * np.pi) ** 0.25) < 1e-12
        with pytest.raises(ConfigError):
            lebesgue_norm(u, 0.5)

    def test_monotone_in_s(self):
        rng = np.random.default_rng(4)
        g = make_grid(20.0, 128)
        u = random_field(g, rng)
        norms = [sobolev_norm(u, s) for s in (-1.0, -0.5, 0.0, 0.5, 1.0)]
        assert all(a <= b * (1 + 1e-12) for a, b in zip(norms, norms[1:]))

    def test_high_frequency_packet_scaling(self):
        # |e^{iNx} g|_{H^{-1/2}} ~ N^{-1/2} |g|_{L^2} for N >> 1
        g = make_grid(80.0, 2048)
        env = make_gaussian(g, width=2.0)
        l2 = sobolev_norm(env, 0.0)
        for N in (16.0, 32.0):
            packet = Field(g, env.values * np.exp(1j * N * g.x))
            ratio = sobolev_norm(packet, -0.5) * np.sqrt(N) / l2
            assert abs(ratio - 1.0) < 0.02


class TestProjections:
    def test_low_mode_unchanged(self):
        g = make_grid(4 * np.pi, 64)  # xi spacing 1/2
        u = Field(g, np.exp(1j * 0.5 * g.x))
        out = project_band(u, 1.0)
        assert np.max(np.abs(out.values - u.values)) < 1e-12

    def test_disjoint_band_killed(self):
        g = make_grid(2 * np.pi, 64)
        u = Field(g, np.exp(16j * g.x))
        assert np.max(np.abs(project_band(u, 4.0).values)) < 1e-14

    def test_partition_of_unity(self):
        rng = np.random.default_rng(5)
        g = make_grid(18.0, 256)
        u = random_field(g, rng, decay=1.0)
        total = np.zeros(g.M, dtype=complex)
        N = 1.0
        while N < 4 * g.xi_max:
            total += project_band(u, N).values
            N *= 2
        assert np.max(np.abs(total - u.values)) < 1e-10 * np.max(np.abs(u.values))

    def test_disjoint_projectors_annihilate(self):
        rng = np.random.default_rng(6)
        g = make_grid(18.0, 256)
        u = random_field(g, rng, decay=1.0)
        out = project_band(project_band(u, 16.0), 2.0)
        assert np.max(np.abs(out.values)) < 1e-13

    def test_non_dyadic_rejected(self):
        g = make_grid(10.0, 64)
        with pytest.raises(ConfigError):
            project_band(Field(g, np.ones(64, complex)), 3.0)


class TestGaussian:
    def test_real_even(self):
        g = make_grid(40.0, 256)
        u = make_gaussian(g, amplitude=1.0, width=1.5)
        assert np.max(np.abs(u.values.imag)) == 0
        assert np.allclose(u.values, u.values[::-1].take(range(-1, 255), mode="wrap"))

    def test_mass_analytic(self):
        # int A^2 exp(-2 x^2 / w^2) dx = A^2 w sqrt(pi/2)
        g = make_grid(60.0, 512)
        A, w = 1.7, 2.2
        u = make_gaussian(g, amplitude=A, width=w)
        expect = A * A * w * np.sqrt(np.pi / 2)
        got = g.dx * np.sum(np.abs(u.values) ** 2)
        assert abs(got - expect) < 1e-8 * expect

    def test_carrier_above_nyquist_rejected(self):
        g = make_grid(10.0, 64)
        with pytest.raises(ConfigError):
            make_gaussian(g, carrier=100.0)

    def test_underresolved_width_rejected(self):
        g = make_grid(10.0, 16)
        with pytest.raises(ResolutionError):
            make_gaussian(g, width=0.05)


class TestTailGuards:
    def test_smooth_field_passes(self):
        g = make_grid(60.0, 512)
        u = make_gaussian(g, width=2.0)
        report = check_resolved(u, tol=1e-8)
        assert report["spectral_tail"] < 1e-10
        assert report["boundary_tail"] < 1e-10

    def test_edge_mass_detected(self):
        g = make_grid(60.0, 512)
        # periodized Gaussian parked near the right edge: smooth but not local
        vals = sum(
            np.exp(-(((g.x - 28.0 - 60.0 * m) / 4.0) ** 2)) for m in (-1, 0, 1)
        )
        u = Field(g, vals.astype(complex))
        assert boundary_tail_fraction(u) > 1e-3
        with pytest.raises(ResolutionError):
            check_resolved(u, tol=1e-8)

    def test_rough_spectrum_detected(self):
        g = make_grid(10.0, 64)
        rng = np.random.default_rng(7)
        u = Field(g, rng.normal(size=64) + 0j)
        assert spectral_tail_fraction(u) > 1e-3


class TestSerialization:
    def test_field_csv_roundtrip(self, tmp_path):
        rng = np.random.default_rng(8)
        g = make_grid(12.0, 64)
        u = Field(g, rng.normal(size=64) + 1j * rng.normal(size=64))
        path = tmp_path / "field.csv"
        field_to_csv(u, path)
        back = field_from_csv(path)
        assert back.grid == g
        assert np.array_equal(back.values, u.values)

    def test_spectrum_csv_roundtrip(self, tmp_path):
        rng = np.random.default_rng(9)
        g = make_grid(12.0, 64)
        s = to_spectrum(Field(g, rng.normal(size=64) + 1j * rng.normal(size=64)))
        path = tmp_path / "spec.csv"
        spectrum_to_csv(s, path)
        back = spectrum_from_csv(path)
        assert np.array_equal(back.coef, s.coef)

    def test_field_binary_roundtrip(self, tmp_path):
        rng = np.random.default_rng(10)
        g = make_grid(7.5, 32)
        u = Field(g, rng.normal(size=32) + 1j * rng.normal(size=32))
        path = tmp_path / "field.bin"
        field_to_binary(u, path)
        back = field_from_binary(path)
        assert back.grid == g
        assert np.array_equal(back.values, u.values)
