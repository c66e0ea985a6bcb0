import numpy as np
import pytest

from fournls import (
    ConfigError,
    EvolutionConfig,
    Field,
    check_scaling_covariance,
    evolve,
    hamiltonian,
    linear_propagate_4nls,
    make_gaussian,
    make_grid,
    mass,
    scale_transform,
    sobolev_norm,
)


class TestMass:
    def test_constant(self):
        g = make_grid(7.0, 32)
        u = Field(g, np.full(32, 1.5 - 0.5j))
        assert abs(mass(u) - abs(1.5 - 0.5j) ** 2 * 7.0) < 1e-12

    def test_plane_wave(self):
        g = make_grid(2 * np.pi, 32)
        u = Field(g, np.exp(3j * g.x))
        assert abs(mass(u) - g.L) < 1e-12

    def test_invariant_under_free_flow(self):
        u = make_gaussian(make_grid(60.0, 256), width=2.0)
        out = linear_propagate_4nls(u, 0.7, orientation=-1)
        assert abs(mass(out) - mass(u)) < 1e-12 * mass(u)

    def test_equals_squared_l2(self):
        rng = np.random.default_rng(0)
        g = make_grid(9.0, 64)
        u = Field(g, rng.normal(size=64) + 1j * rng.normal(size=64))
        assert abs(mass(u) - sobolev_norm(u, 0.0) ** 2) < 1e-10


class TestHamiltonian:
    def test_plane_wave_parts(self):
        g = make_grid(2 * np.pi, 64)
        A, k = 1.3, 2
        u = Field(g, A * np.exp(1j * k * g.x))
        rep = hamiltonian(u, kappa=1)
        assert abs(rep.kinetic - 0.5 * k**4 * A**2 * g.L) < 1e-10
        assert abs(rep.quartic - A**4 * g.L) < 1e-10

    def test_kappa_flip_gap(self):
        u = make_gaussian(make_grid(40.0, 128), amplitude=1.4, width=1.5)
        plus = hamiltonian(u, kappa=1).hamiltonian
        minus = hamiltonian(u, kappa=-1).hamiltonian
        quartic = hamiltonian(u, kappa=1).quartic
        assert abs((plus - minus) - 0.5 * quartic) < 1e-12

    def test_conserved_along_flow(self):
        # adjudicates the +kappa/4 sign of the quartic term
        u = make_gaussian(make_grid(60.0, 512), amplitude=1.5, width=1.5)
        for kappa in (1, -1):
            cfg = EvolutionConfig(kappa=kappa, dt=2e-4, t_end=0.4,
                                  record_stride=200, record_fields=True)
            rec = evolve(u, cfg)
            vals = [hamiltonian(f, kappa=kappa).hamiltonian for f in rec.fields]
            drift = np.max(np.abs(np.array(vals) - vals[0])) / abs(vals[0])
            assert drift < 1e-6, (kappa, drift)


class TestScaleTransform:
    def test_identity(self):
        u = make_gaussian(make_grid(50.0, 128), width=2.0)
        out, factor = scale_transform(u, 1.0)
        assert factor == 1.0
        assert out.grid == u.grid
        assert np.array_equal(out.values, u.values)

    def test_group_action(self):
        u = make_gaussian(make_grid(50.0, 128), width=2.0)
        a = scale_transform(scale_transform(u, 2.0).field, 1.5).field
        b = scale_transform(u, 3.0).field
        assert a.grid == b.grid
        assert np.max(np.abs(a.values - b.values)) < 1e-14

    def test_homogeneous_norm_scaling(self):
        u = make_gaussian(make_grid(80.0, 512), width=2.0, carrier=2.0)
        for lam in (0.5, 2.0, 3.7):
            for s in (-0.5, -1.0, 0.5):
                scaled = scale_transform(u, lam).field
                ratio = sobolev_norm(scaled, s, homogeneous=True) / sobolev_norm(
                    u, s, homogeneous=True
                )
                assert abs(ratio - lam ** (s + 1.5)) < 1e-8 * lam ** (s + 1.5)

    def test_critical_index(self):
        u = make_gaussian(make_grid(80.0, 512), width=2.0, carrier=2.0)
        scaled = scale_transform(u, 2.0).field
        ratio = sobolev_norm(scaled, -1.5, homogeneous=True) / sobolev_norm(
            u, -1.5, homogeneous=True
        )
        assert abs(ratio - 1.0) < 1e-8

    def test_invalid_lambda(self):
        u = make_gaussian(make_grid(50.0, 128), width=2.0)
        with pytest.raises(ConfigError):
            scale_transform(u, -2.0)


class TestScalingCovariance:
    def test_lambda_one_is_roundoff(self):
        u = make_gaussian(make_grid(60.0, 256), width=2.0)
        cfg = EvolutionConfig(dt=1e-3, t_end=1.0, record_stride=50)
        defect = check_scaling_covariance(u, 1.0, cfg, t=0.02)
        assert defect < 1e-11

    def test_commuting_step_choice_is_exact(self):
        u = make_gaussian(make_grid(60.0, 256), width=2.0)
        lam = 2.0
        cfg = EvolutionConfig(dt=1e-3, t_end=1.0, record_stride=50)
        defect = check_scaling_covariance(u, lam, cfg, t=0.02,
                                          dt_scaled=1e-3 / lam**4)
        assert defect < 1e-11

    def test_defect_below_measured_discretization_error(self):
        u = make_gaussian(make_grid(60.0, 256), amplitude=1.5, width=2.0)
        lam, t, dt = 2.0, 0.02, 1e-3
        cfg = EvolutionConfig(dt=dt, t_end=1.0, record_stride=50)
        defect = check_scaling_covariance(u, lam, cfg, t=t)
        # discretization error of the scaled-data run, estimated by halving
        # its step: ||u_dt - u_dt/2|| * 4/3 bounds the order-2 error
        from dataclasses import replace
        from fournls import Field, scale_transform, sobolev_norm
        scaled0 = scale_transform(u, lam).field
        runs = {}
        for d in (dt, dt / 2):
            rec = evolve(scaled0, replace(cfg, dt=d, t_end=t, record_fields=True,
                                          record_stride=int(round(t / d))))
            runs[d] = rec.final_field()
        est = sobolev_norm(Field(runs[dt].grid,
                                 runs[dt].values - runs[dt / 2].values), 0.0) * 4 / 3
        assert defect <= 2.0 * est

    def test_defect_shrinks_at_second_order(self):
        u = make_gaussian(make_grid(60.0, 256), amplitude=1.5, width=2.0)
        lam, t = 2.0, 0.02
        dts = [4e-3, 2e-3, 1e-3, 2.5e-4]
        defects = []
        for dt in dts:
            cfg = EvolutionConfig(dt=dt, t_end=1.0, record_stride=50)
            defects.append(check_scaling_covariance(u, lam, cfg, t=t))
        slope = np.polyfit(np.log(dts), np.log(defects), 1)[0]
        assert slope >= 2.0 - 0.2
