"""Seeded random games and mixed profiles for fuzz suites and tests."""

from __future__ import annotations

import numpy as np

from .game import Game, MixedProfile, make_game, mixed


def random_game(
    rng: np.random.Generator,
    symmetric: bool,
    n: int,
    m: int | None = None,
    low: int = -9,
    high: int = 9,
) -> Game:
    """A game with i.i.d. uniform integer payoffs in [low, high].

    Symmetric games are sampled as K - K^T for a random integer K, which is
    anti-symmetric by construction.
    """
    if symmetric:
        K = rng.integers(low, high + 1, size=(n, n))
        entries = K - K.T
        return make_game([[int(v) for v in row] for row in entries], "symmetric")
    if m is None:
        m = n
    entries = rng.integers(low, high + 1, size=(n, m))
    return make_game([[int(v) for v in row] for row in entries], "non-symmetric")


def _simplex_point(rng: np.random.Generator, size: int, interior: bool) -> np.ndarray:
    if interior or size == 1:
        return rng.dirichlet(np.ones(size))
    k = int(rng.integers(1, size + 1))
    support = rng.choice(size, size=k, replace=False)
    x = np.zeros(size)
    x[np.sort(support)] = rng.dirichlet(np.ones(k))
    return x


def random_mixed_profile(
    rng: np.random.Generator, g: Game, interior: bool = True
) -> MixedProfile:
    """Dirichlet(1) point per player; interior=False draws a random support first."""
    if g.symmetric:
        return mixed(_simplex_point(rng, g.n, interior))
    return mixed(
        _simplex_point(rng, g.n, interior), _simplex_point(rng, g.m, interior)
    )


def game_corpus(
    rng: np.random.Generator,
    count: int,
    max_rows: int = 5,
    max_cols: int = 5,
    max_symmetric: int = 7,
) -> list[Game]:
    """Mixed fuzz corpus: alternating non-symmetric and symmetric games."""
    games = []
    for k in range(count):
        if k % 2 == 0:
            n = int(rng.integers(1, max_rows + 1))
            m = int(rng.integers(1, max_cols + 1))
            games.append(random_game(rng, False, n, m))
        else:
            n = int(rng.integers(2, max_symmetric + 1))
            games.append(random_game(rng, True, n))
    return games
