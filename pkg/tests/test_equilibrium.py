"""Nash solving, the essential subgame, and graph-side certification."""
from __future__ import annotations

import numpy as np
import pytest

from zsflow import (
    build_graph,
    certificate_to_dict,
    essential_subgame,
    float_matrix,
    make_game,
    rhs_nonsymmetric,
    rhs_symmetric,
    sink_component,
    solve_nash,
    verify_preference_nash,
)
from zsflow.sampling import game_corpus


def grid_value_2x2(M: np.ndarray, points: int = 20001) -> float:
    """Independent game value for a 2x2 matrix: maximise the row player's
    guaranteed payoff over a fine grid of mixtures."""
    xs = np.linspace(0.0, 1.0, points)
    rows = np.stack([xs, 1.0 - xs], axis=1)
    return float((rows @ M).min(axis=1).max())


class TestCanonicalEquilibria:
    def test_matching_pennies(self, mp):
        cert = solve_nash(mp)
        assert np.allclose(cert.equilibrium.vectors[0], [0.5, 0.5], atol=1e-9)
        assert np.allclose(cert.equilibrium.vectors[1], [0.5, 0.5], atol=1e-9)
        assert abs(cert.game_value) < 1e-9
        assert cert.support == ((0, 1), (0, 1))
        assert cert.in_sink and cert.support_strongly_connected

    def test_rock_paper_scissors(self, rps):
        cert = solve_nash(rps)
        assert len(cert.equilibrium.vectors) == 1
        assert np.allclose(cert.equilibrium.vectors[0], [1 / 3] * 3, atol=1e-9)
        assert abs(cert.game_value) < 1e-9
        assert cert.support == ((0, 1, 2),)

    def test_diamond(self, diamond):
        cert = solve_nash(diamond)
        assert np.allclose(cert.equilibrium.vectors[0], [0.0, 0.5, 0.5], atol=1e-9)
        assert np.allclose(cert.equilibrium.vectors[1], [0.0, 0.5, 0.5], atol=1e-9)
        assert abs(cert.game_value) < 1e-9
        assert cert.support == ((1, 2), (1, 2))
        assert cert.in_sink and cert.support_strongly_connected

    def test_dominant_row_game(self):
        g = make_game([[3, 1], [0, 0]], "non-symmetric")
        cert = solve_nash(g)
        assert np.allclose(cert.equilibrium.vectors[0], [1.0, 0.0], atol=1e-12)
        assert np.allclose(cert.equilibrium.vectors[1], [0.0, 1.0], atol=1e-12)
        assert abs(cert.game_value - 1.0) < 1e-12
        assert cert.support == ((0,), (1,))
        assert abs(grid_value_2x2(float_matrix(g)) - 1.0) < 1e-3

    def test_one_by_one(self):
        cert = solve_nash(make_game([[5]], "non-symmetric"))
        assert cert.game_value == 5.0
        assert cert.support == ((0,), (0,))

    def test_zero_game_tie_break(self):
        # Every profile is an equilibrium; the reported one has the largest
        # support, then the lexicographically smallest index sets.
        g = make_game([[0, 0], [0, 0]], "non-symmetric")
        cert = solve_nash(g)
        assert cert.support == ((0,), (0,))
        assert cert.game_value == 0.0
        assert essential_subgame(g) == ((0, 1), (0, 1))
        rep = verify_preference_nash(g)
        assert rep.passed
        assert rep.zero_weight_arc_pairs == 4


class TestMinimaxConsistency:
    def test_grid_oracle_2x2(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            M = rng.integers(-9, 10, size=(2, 2))
            g = make_game(M.tolist(), "non-symmetric")
            cert = solve_nash(g)
            assert abs(cert.game_value - grid_value_2x2(M.astype(float))) < 1e-3

    def test_best_replies_bracket_value(self):
        rng = np.random.default_rng(19)
        for g in game_corpus(rng, 60):
            cert = solve_nash(g)
            M = float_matrix(g)
            if g.symmetric:
                x = cert.equilibrium.vectors[0]
                assert abs(cert.game_value) < 1e-9
                assert (M @ x).max() < 1e-9
            else:
                x, y = cert.equilibrium.vectors
                # No pure deviation may beat the value on either side.
                assert (M @ y).max() <= cert.game_value + 1e-9
                assert (M.T @ x).min() >= cert.game_value - 1e-9

    def test_equilibria_are_flow_fixed_points(self, mp, rps, diamond):
        for g in (mp, rps, diamond):
            z = solve_nash(g).equilibrium
            if g.symmetric:
                dx = rhs_symmetric(g, z.vectors[0])
                assert np.abs(dx).max() < 1e-9
            else:
                du, dv = rhs_nonsymmetric(g, z)
                assert np.abs(du).max() < 1e-9
                assert np.abs(dv).max() < 1e-9


class TestEssentialSubgame:
    def test_canonical(self, mp, rps, diamond):
        assert essential_subgame(mp) == ((0, 1), (0, 1))
        assert essential_subgame(rps) == ((0, 1, 2),)
        assert essential_subgame(diamond) == ((1, 2), (1, 2))

    def test_dominant(self):
        g = make_game([[3, 1], [0, 0]], "non-symmetric")
        assert essential_subgame(g) == ((0,), (1,))

    def test_contains_selected_support(self):
        rng = np.random.default_rng(31)
        for g in game_corpus(rng, 40):
            cert = solve_nash(g)
            ess = essential_subgame(g)
            if g.symmetric:
                assert set(cert.support[0]) <= set(ess[0])
            else:
                assert set(cert.support[0]) <= set(ess[0])
                assert set(cert.support[1]) <= set(ess[1])


class TestGraphCertification:
    def test_canonical_reports(self, mp, rps, diamond):
        for g in (mp, rps, diamond):
            rep = verify_preference_nash(g)
            assert rep.passed
            assert rep.in_sink and rep.strongly_connected

    def test_diamond_support_inside_proper_sink(self, diamond):
        sink = sink_component(build_graph(diamond))
        cert = solve_nash(diamond)
        prods = {(i, j) for i in cert.support[0] for j in cert.support[1]}
        assert prods < sink

    def test_fuzz(self):
        rng = np.random.default_rng(47)
        for g in game_corpus(rng, 60):
            assert verify_preference_nash(g).passed


class TestSerialisation:
    def test_certificate_dict(self, mp):
        d = certificate_to_dict(solve_nash(mp), mp)
        assert d["support"] == {"rows": ["H", "T"], "cols": ["H", "T"]}
        assert d["equilibrium"] == [[0.5, 0.5], [0.5, 0.5]]
        assert abs(d["game_value"]) < 1e-9
        assert d["in_sink"] is True

    def test_certificate_dict_symmetric(self, rps):
        d = certificate_to_dict(solve_nash(rps), rps)
        assert d["support"] == {"strategies": ["R", "P", "S"]}
