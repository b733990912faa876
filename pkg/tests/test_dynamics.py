"""Replicator flow, embedding, Lyapunov rate, MWU, and trajectory output."""
from __future__ import annotations

import math

import numpy as np
import pytest

from zsflow import (
    IntegrationError,
    IntegratorConfig,
    build_graph,
    check_embedding,
    integrate,
    integrate_batch,
    lyapunov_rate,
    make_game,
    mass_monotone,
    mixed,
    mwu_step,
    profile_masses,
    pure_profile,
    rhs_nonsymmetric,
    rhs_symmetric,
    sink_component,
    time_average,
    uniform_profile,
    write_trajectory_csv,
    write_trajectory_svg,
)
from zsflow.sampling import game_corpus, random_mixed_profile


class TestVectorFields:
    def test_rps_edge_point_frozen(self, rps):
        # At x = (1/2, 1/2, 0): (Mx)_R = -1/2, (Mx)_P = 1/2, and x^T M x = 0
        # for any anti-symmetric M, so dx = x * (Mx) = (-1/4, 1/4, 0).
        dx = rhs_symmetric(rps, np.array([0.5, 0.5, 0.0]))
        assert np.allclose(dx, [-0.25, 0.25, 0.0], atol=1e-15)

    def test_uniform_points_are_fixed(self, mp, rps):
        dx = rhs_symmetric(rps, np.full(3, 1 / 3))
        assert np.abs(dx).max() < 1e-15
        du, dv = rhs_nonsymmetric(mp, uniform_profile(mp))
        assert np.abs(du).max() < 1e-15 and np.abs(dv).max() < 1e-15

    def test_pure_points_are_fixed(self, mp, rps):
        du, dv = rhs_nonsymmetric(mp, pure_profile(mp, (0, 1)))
        assert np.abs(du).max() == 0.0 and np.abs(dv).max() == 0.0
        dx = rhs_symmetric(rps, np.array([0.0, 1.0, 0.0]))
        assert np.abs(dx).max() == 0.0

    def test_tangency(self):
        # The field must sum to zero in each player's coordinates so the
        # simplex is invariant.
        rng = np.random.default_rng(11)
        for g in game_corpus(rng, 30):
            z = random_mixed_profile(rng, g)
            if g.symmetric:
                dx = rhs_symmetric(g, z.vectors[0])
                assert abs(dx.sum()) < 1e-12
            else:
                du, dv = rhs_nonsymmetric(g, z)
                assert abs(du.sum()) < 1e-12 and abs(dv.sum()) < 1e-12


class TestConfig:
    def test_defaults(self):
        cfg = IntegratorConfig()
        assert cfg.step == 0.01 and cfg.horizon == 200.0
        assert cfg.method == "rk4-log" and cfg.renormalize

    def test_step_counts(self):
        assert IntegratorConfig(step=0.01, horizon=200.0).steps == 20000
        assert IntegratorConfig(step=1e-4, horizon=2e-4).steps == 2
        assert IntegratorConfig(step=0.1, horizon=0.25).steps == 3
        assert IntegratorConfig(step=0.01, horizon=0.0).steps == 0

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"step": 0.0},
            {"step": -0.01},
            {"step": 0.2},
            {"step": 0.1, "horizon": 0.1},
            {"horizon": -1.0},
            {"method": "euler"},
            {"mwu_eta": 0.0},
        ],
    )
    def test_rejects_bad_settings(self, kwargs):
        with pytest.raises(ValueError):
            IntegratorConfig(**kwargs)


class TestIntegration:
    def test_sampling_grid(self, mp):
        cfg = IntegratorConfig(step=0.1, horizon=1.0)
        tr = integrate(mp, uniform_profile(mp), cfg)
        assert len(tr) == cfg.steps + 1
        assert np.allclose(tr.times, np.arange(11) * 0.1, atol=1e-12)

    def test_initial_sample_is_exact(self, mp):
        z = mixed([0.9, 0.1], [0.2, 0.8])
        tr = integrate(mp, z, IntegratorConfig(step=0.01, horizon=1.0))
        assert np.array_equal(tr.states[0][0], z.vectors[0])
        assert np.array_equal(tr.states[1][0], z.vectors[1])

    def test_zero_horizon_gives_single_sample(self, mp):
        z = mixed([0.9, 0.1], [0.2, 0.8])
        H = sink_component(build_graph(mp))
        tr = integrate(mp, z, IntegratorConfig(step=0.01, horizon=0.0), H=H)
        assert len(tr) == 1 and tr.times[0] == 0.0
        assert tr.mass is not None and tr.mass.shape == (1,)

    def test_interior_fixed_point_stays(self, rps):
        tr = integrate(rps, uniform_profile(rps), IntegratorConfig(step=0.01, horizon=5.0))
        assert np.abs(tr.states[0] - 1 / 3).max() < 1e-12

    @pytest.mark.parametrize("method", ["rk4-log", "rk4-direct"])
    def test_faces_are_invariant(self, rps, method):
        # A strategy that starts at exactly zero must stay at exactly zero.
        z0 = mixed([0.3, 0.7, 0.0])
        cfg = IntegratorConfig(step=0.01, horizon=10.0, method=method)
        tr = integrate(rps, z0, cfg)
        assert np.all(tr.states[0][:, 2] == 0.0)

    @pytest.mark.parametrize("method", ["rk4-log", "rk4-direct"])
    def test_edge_flow_is_logistic(self, mp, method):
        # On the edge where player 2 plays H, player 1's H share obeys
        # dx/dt = x(1-x) W with W = M[H][H] - M[T][H] = 2, giving the
        # explicit solution x(t) = 1 / (1 + ((1-x0)/x0) exp(-2t)).
        x0 = 0.3
        cfg = IntegratorConfig(step=0.01, horizon=4.0, method=method)
        tr = integrate(mp, mixed([x0, 1 - x0], [1.0, 0.0]), cfg)
        expected = 1.0 / (1.0 + ((1 - x0) / x0) * np.exp(-2.0 * tr.times))
        assert np.abs(tr.states[0][:, 0] - expected).max() < 1e-6
        assert np.all(tr.states[1][:, 1] == 0.0)

    def test_symmetric_edge_flow_is_logistic(self, rps):
        # Paper beats rock at weight 1, so the P share follows a rate-1
        # logistic on the R-P edge.
        x0 = 0.7
        tr = integrate(rps, mixed([1 - x0, x0, 0.0]), IntegratorConfig(step=0.01, horizon=4.0))
        expected = 1.0 / (1.0 + ((1 - x0) / x0) * np.exp(-tr.times))
        assert np.abs(tr.states[0][:, 1] - expected).max() < 1e-6

    def test_rps_interior_invariant_is_conserved(self, rps):
        # The product x_R x_P x_S is a constant of motion for the
        # rock-paper-scissors flow.
        z0 = mixed([0.2, 0.3, 0.5])
        tr = integrate(rps, z0, IntegratorConfig(step=0.01, horizon=100.0))
        prod = tr.states[0].prod(axis=1)
        assert np.abs(prod - prod[0]).max() < 1e-6

    def test_step_refinement_agrees(self, mp):
        z0 = mixed([0.9, 0.1], [0.2, 0.8])
        coarse = integrate(mp, z0, IntegratorConfig(step=0.05, horizon=5.0))
        fine = integrate(mp, z0, IntegratorConfig(step=0.0005, horizon=5.0))
        assert np.abs(coarse.final.vectors[0] - fine.final.vectors[0]).max() < 1e-6

    def test_log_and_direct_methods_agree(self, mp):
        z0 = mixed([0.9, 0.1], [0.2, 0.8])
        a = integrate(mp, z0, IntegratorConfig(step=0.01, horizon=20.0, method="rk4-log"))
        b = integrate(mp, z0, IntegratorConfig(step=0.01, horizon=20.0, method="rk4-direct"))
        assert np.abs(a.final.vectors[0] - b.final.vectors[0]).max() < 1e-9
        assert np.abs(a.final.vectors[1] - b.final.vectors[1]).max() < 1e-9

    def test_simplex_is_preserved(self, diamond):
        rng = np.random.default_rng(3)
        z0 = random_mixed_profile(rng, diamond)
        tr = integrate(diamond, z0, IntegratorConfig(step=0.01, horizon=50.0))
        for states in tr.states:
            assert np.abs(states.sum(axis=1) - 1.0).max() < 1e-9
            assert states.min() >= 0.0

    def test_mass_and_distance_series(self, diamond):
        H = sink_component(build_graph(diamond))
        z0 = mixed([0.2, 0.5, 0.3], [0.4, 0.3, 0.3])
        tr = integrate(diamond, z0, IntegratorConfig(step=0.01, horizon=1.0), H=H)
        assert tr.mass is not None and tr.dist is not None
        expected0 = sum(profile_masses(z0)[i] for i, p in enumerate(diamond.profiles()) if p in H)
        assert abs(tr.mass[0] - expected0) < 1e-12
        assert np.abs(tr.mass + tr.dist - 1.0).max() < 1e-12
        tr2 = integrate(diamond, z0, IntegratorConfig(step=0.01, horizon=1.0))
        assert tr2.mass is None and tr2.dist is None

    def test_unstable_direct_run_raises(self):
        g = make_game([[1000, -1000], [-1000, 1000]], "non-symmetric")
        cfg = IntegratorConfig(step=0.1, horizon=2.0, method="rk4-direct")
        with pytest.raises(IntegrationError):
            integrate(g, mixed([0.5, 0.5], [0.9, 0.1]), cfg)

    def test_batch_matches_single_run(self, mp):
        z = mixed([0.9, 0.1], [0.2, 0.8])
        H = sink_component(build_graph(mp))
        cfg = IntegratorConfig(step=0.01, horizon=3.0)
        batch = integrate_batch(mp, [z, z], cfg, H=H)
        single = integrate(mp, z, cfg, H=H)
        for k in range(2):
            assert np.array_equal(batch[k].states[0], single.states[0])
            assert np.array_equal(batch[k].states[1], single.states[1])
            assert np.array_equal(batch[k].mass, single.mass)

    def test_batch_requires_common_support(self, mp):
        cfg = IntegratorConfig(step=0.01, horizon=1.0)
        starts = [mixed([0.5, 0.5], [1.0, 0.0]), mixed([0.5, 0.5], [0.5, 0.5])]
        with pytest.raises(ValueError):
            integrate_batch(mp, starts, cfg)


class TestLyapunov:
    def test_rate_positive_inside_diamond_basin(self, diamond):
        H = sink_component(build_graph(diamond))
        z = mixed([0.5, 0.3, 0.2], [0.6, 0.2, 0.2])
        assert lyapunov_rate(diamond, H, z) > 0.0

    def test_rate_vanishes_on_full_sink(self, mp):
        H = sink_component(build_graph(mp))
        assert H == frozenset(mp.profiles())
        z = mixed([0.9, 0.1], [0.2, 0.8])
        assert lyapunov_rate(mp, H, z) == 0.0

    def test_rejects_non_sink_set(self, diamond):
        z = mixed([0.5, 0.3, 0.2], [0.6, 0.2, 0.2])
        with pytest.raises(ValueError):
            lyapunov_rate(diamond, frozenset({(1, 1), (2, 2)}), z)

    def test_matches_finite_difference(self, diamond):
        # d/dt x_H from a tiny integration step must agree with the closed
        # form cut rate.
        H = sink_component(build_graph(diamond))
        z = mixed([0.5, 0.3, 0.2], [0.6, 0.2, 0.2])
        rate = lyapunov_rate(diamond, H, z)
        cfg = IntegratorConfig(step=1e-4, horizon=2e-4)
        tr = integrate(diamond, z, cfg, H=H)
        fd = (tr.mass[2] - tr.mass[0]) / 2e-4
        mid = lyapunov_rate(diamond, H, tr.state(1))
        assert abs(fd - mid) < 1e-5
        assert abs(rate - mid) < 1e-3

    def test_symmetric_rate(self):
        # Strategy 0 loses to everything; 1, 2, 3 cycle like RPS.
        g = make_game(
            [[0, -1, -1, -1], [1, 0, -1, 1], [1, 1, 0, -1], [1, -1, 1, 0]],
            "symmetric",
        )
        H = sink_component(build_graph(g))
        assert H == frozenset({1, 2, 3})
        z = mixed([0.4, 0.2, 0.2, 0.2])
        rate = lyapunov_rate(g, H, z)
        assert rate > 0.0
        tr = integrate(g, z, IntegratorConfig(step=1e-4, horizon=2e-4), H=H)
        fd = (tr.mass[2] - tr.mass[0]) / 2e-4
        assert abs(fd - lyapunov_rate(g, H, tr.state(1))) < 1e-5


class TestEmbedding:
    def test_mp_residual(self, mp):
        rep = check_embedding(mp, mixed([0.9, 0.1], [0.2, 0.8]))
        assert rep.max_residual < 1e-10

    def test_fuzz(self):
        rng = np.random.default_rng(23)
        worst = 0.0
        for g in game_corpus(rng, 40):
            if g.symmetric:
                continue
            for _ in range(3):
                rep = check_embedding(g, random_mixed_profile(rng, g))
                worst = max(worst, rep.max_residual)
        assert worst < 1e-10

    def test_rejects_symmetric_games(self, rps):
        with pytest.raises(ValueError):
            check_embedding(rps, uniform_profile(rps))


class TestMwu:
    def test_uniform_mp_is_fixed(self, mp):
        z = uniform_profile(mp)
        zn = mwu_step(mp, z, 0.1)
        assert np.array_equal(zn.vectors[0], z.vectors[0])
        assert np.array_equal(zn.vectors[1], z.vectors[1])

    def test_pure_profiles_are_fixed(self, mp):
        z = pure_profile(mp, (1, 0))
        zn = mwu_step(mp, z, 0.5)
        assert np.array_equal(zn.vectors[0], z.vectors[0])
        assert np.array_equal(zn.vectors[1], z.vectors[1])

    def test_zeros_survive_exactly(self, rps):
        zn = mwu_step(rps, mixed([0.3, 0.7, 0.0]), 0.2)
        assert zn.vectors[0][2] == 0.0
        assert abs(zn.vectors[0].sum() - 1.0) < 1e-15

    def test_step_converges_to_flow(self, mp):
        # (mwu(z, eta) - z)/eta -> replicator field as eta -> 0, with the
        # deviation shrinking linearly in eta.
        z = mixed([0.9, 0.1], [0.2, 0.8])
        dx, dy = rhs_nonsymmetric(mp, z)

        def err(eta: float) -> float:
            zn = mwu_step(mp, z, eta)
            d1 = (zn.vectors[0] - z.vectors[0]) / eta
            d2 = (zn.vectors[1] - z.vectors[1]) / eta
            return max(np.abs(d1 - dx).max(), np.abs(d2 - dy).max())

        e1, e2 = err(2e-4), err(1e-4)
        assert e1 < 5e-5
        assert 0.4 < e2 / e1 < 0.6

    def test_rejects_nonpositive_eta(self, mp):
        with pytest.raises(ValueError):
            mwu_step(mp, uniform_profile(mp), 0.0)


class TestSeriesHelpers:
    def test_time_average_of_constant_run(self, rps):
        tr = integrate(rps, uniform_profile(rps), IntegratorConfig(step=0.01, horizon=2.0))
        avg = time_average(tr)
        assert np.abs(avg.vectors[0] - 1 / 3).max() < 1e-12

    def test_time_average_single_sample(self, mp):
        z = mixed([0.9, 0.1], [0.2, 0.8])
        tr = integrate(mp, z, IntegratorConfig(step=0.01, horizon=0.0))
        avg = time_average(tr)
        assert np.array_equal(avg.vectors[0], z.vectors[0])

    def test_mp_time_average_approaches_centre(self, mp):
        # The MP orbit cycles, but its running average contracts toward the
        # unique equilibrium at the centre.
        z0 = mixed([0.9, 0.1], [0.2, 0.8])
        tr = integrate(mp, z0, IntegratorConfig(step=0.05, horizon=100.0))
        avg = time_average(tr)
        assert max(np.abs(v - 0.5).max() for v in avg.vectors) < 0.02

    def test_mass_monotone(self):
        assert mass_monotone(np.array([0.2, 0.5, 0.9, 1.0]))
        assert not mass_monotone(np.array([0.2, 0.5, 0.4, 1.0]))
        # 1e-9 dips sit inside the default slack.
        assert mass_monotone(np.array([0.2, 0.5, 0.5 - 1e-9, 1.0]))
        # Once the series saturates at 1, later rounding wiggle is ignored.
        sat = np.array([0.2, 0.9, 1.0 - 1e-13, 1.0 - 5e-13, 1.0])
        assert mass_monotone(sat)
        assert mass_monotone(np.array([0.4]))


class TestWriters:
    def test_csv_layout(self, mp, tmp_path):
        H = sink_component(build_graph(mp))
        z0 = mixed([0.9, 0.1], [0.2, 0.8])
        tr = integrate(mp, z0, IntegratorConfig(step=0.1, horizon=1.0), H=H)
        path = tmp_path / "mp.csv"
        write_trajectory_csv(tr, mp, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "t,p1:H,p1:T,p2:H,p2:T,x_H,payoff,dist_content"
        assert len(lines) == len(tr) + 1
        first = lines[1].split(",")
        assert float(first[0]) == 0.0 and float(first[1]) == 0.9

    def test_csv_symmetric_labels_and_blank_mass(self, rps, tmp_path):
        tr = integrate(rps, mixed([0.2, 0.3, 0.5]), IntegratorConfig(step=0.1, horizon=0.5))
        path = tmp_path / "rps.csv"
        write_trajectory_csv(tr, rps, str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == "t,R,P,S,x_H,payoff,dist_content"
        # No sink was supplied, so the mass and distance columns stay empty.
        assert lines[1].split(",")[4] == ""
        assert lines[1].split(",")[6] == ""

    def test_csv_deterministic(self, mp, tmp_path):
        tr = integrate(mp, mixed([0.9, 0.1], [0.2, 0.8]), IntegratorConfig(step=0.1, horizon=1.0))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trajectory_csv(tr, mp, str(a))
        write_trajectory_csv(tr, mp, str(b))
        assert a.read_bytes() == b.read_bytes()

    def test_svg_output(self, diamond, tmp_path):
        H = sink_component(build_graph(diamond))
        z0 = mixed([0.2, 0.5, 0.3], [0.4, 0.3, 0.3])
        tr = integrate(diamond, z0, IntegratorConfig(step=0.01, horizon=20.0), H=H)
        path = tmp_path / "run.svg"
        write_trajectory_svg(tr, str(path), title="diamond run")
        text = path.read_text()
        assert text.startswith("<svg")
        assert text.count("<polyline") == 2
        assert "diamond run" in text

    def test_svg_requires_mass(self, mp, tmp_path):
        tr = integrate(mp, uniform_profile(mp), IntegratorConfig(step=0.1, horizon=0.5))
        with pytest.raises(ValueError):
            write_trajectory_svg(tr, str(tmp_path / "x.svg"))


def test_long_run_mass_is_monotone(diamond):
    H = sink_component(build_graph(diamond))
    z0 = mixed([0.6, 0.2, 0.2], [0.5, 0.25, 0.25])
    tr = integrate(diamond, z0, IntegratorConfig(step=0.01, horizon=200.0), H=H)
    assert mass_monotone(tr.mass)
    assert 1.0 - tr.mass[-1] < 1e-3
    assert math.isclose(tr.mass[0] + tr.dist[0], 1.0, abs_tol=1e-12)
