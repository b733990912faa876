"""Nash equilibria of zero-sum games by support enumeration, plus the link
between equilibrium supports and the preference graph's sink component.

For every pair of equal-cardinality supports the indifference conditions give
a square linear system per player; solutions that satisfy the best-response
inequalities within tolerance are equilibria.  Every extreme optimal strategy
arises from such a square subsystem, so the union of the supports found is
the full set of strategies used by any equilibrium.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

from .game import Game, MixedProfile, SUPPORT_ATOL, float_matrix
from .prefgraph import build_graph, is_strongly_connected, sink_component

# Best-response slack accepted when validating a candidate equilibrium.
EQ_TOL = 1e-9


@dataclass(frozen=True)
class NashCertificate:
    """An equilibrium together with its graph-side verdicts.

    support holds the per-player strategy index sets (a single set for
    symmetric games); in_sink and support_strongly_connected refer to the
    product of those sets inside the preference graph.
    """

    equilibrium: MixedProfile
    game_value: float
    support: tuple[tuple[int, ...], ...]
    in_sink: bool
    support_strongly_connected: bool


@dataclass(frozen=True)
class PreferenceNashReport:
    """Sink membership and connectivity of the essential subgame."""

    subgame: tuple[tuple[int, ...], ...]
    in_sink: bool
    strongly_connected: bool
    zero_weight_arc_pairs: int

    @property
    def passed(self) -> bool:
        return self.in_sink and self.strongly_connected


def _support(v: np.ndarray) -> tuple[int, ...]:
    return tuple(int(i) for i in np.nonzero(v > SUPPORT_ATOL)[0])


def _solve_candidate(M: np.ndarray, S1, S2) -> tuple | None:
    k = len(S1)
    n, m = M.shape
    # Row player's mix makes every column in S2 indifferent; value is unknown.
    A = np.zeros((k + 1, k + 1))
    b = np.zeros(k + 1)
    for r, t in enumerate(S2):
        A[r, :k] = M[list(S1), t]
        A[r, k] = -1.0
    A[k, :k] = 1.0
    b[k] = 1.0
    try:
        solx = np.linalg.solve(A, b)
    except np.linalg.LinAlgError:
        return None
    # Column player's mix makes every row in S1 indifferent.
    C = np.zeros((k + 1, k + 1))
    d = np.zeros(k + 1)
    for r, s in enumerate(S1):
        C[r, :k] = M[s, list(S2)]
        C[r, k] = -1.0
    C[k, :k] = 1.0
    d[k] = 1.0
    try:
        soly = np.linalg.solve(C, d)
    except np.linalg.LinAlgError:
        return None
    if not (np.all(np.isfinite(solx)) and np.all(np.isfinite(soly))):
        return None
    xs, v = solx[:k], solx[k]
    ys, w = soly[:k], soly[k]
    if abs(v - w) > EQ_TOL:
        return None
    if np.any(xs < -SUPPORT_ATOL) or np.any(ys < -SUPPORT_ATOL):
        return None
    x = np.zeros(n)
    y = np.zeros(m)
    x[list(S1)] = np.clip(xs, 0.0, None)
    y[list(S2)] = np.clip(ys, 0.0, None)
    return x, y, float(v)


def _is_equilibrium(M: np.ndarray, x: np.ndarray, y: np.ndarray, v: float) -> bool:
    row_payoffs = M @ y
    col_payoffs = M.T @ x
    if np.any(row_payoffs > v + EQ_TOL) or np.any(col_payoffs < v - EQ_TOL):
        return False
    sx = x > SUPPORT_ATOL
    sy = y > SUPPORT_ATOL
    if np.any(np.abs(row_payoffs[sx] - v) > EQ_TOL):
        return False
    if np.any(np.abs(col_payoffs[sy] - v) > EQ_TOL):
        return False
    return abs(float(x @ M @ y) - v) <= EQ_TOL


@lru_cache(maxsize=128)
def _enumerate_equilibria(g: Game) -> tuple:
    """All equilibria found over equal-cardinality supports, in enumeration order.

    Entries are (x tuple, y tuple, value); singular candidate systems are
    skipped.
    """
    M = float_matrix(g)
    n, m = M.shape
    found = []
    for k in range(1, min(n, m) + 1):
        for S1 in combinations(range(n), k):
            for S2 in combinations(range(m), k):
                sol = _solve_candidate(M, S1, S2)
                if sol is None:
                    continue
                x, y, v = sol
                if _is_equilibrium(M, x, y, v):
                    found.append((tuple(x), tuple(y), v))
    if not found:
        raise RuntimeError(
            "support enumeration found no equilibrium; this contradicts the "
            "minimax theorem and indicates a solver bug"
        )
    return tuple(found)


def _select(eqs: tuple) -> tuple:
    # Largest support first, then lexicographically smallest support pair.
    def rank(e):
        sx = _support(np.array(e[0]))
        sy = _support(np.array(e[1]))
        return (-(len(sx) + len(sy)), sx, sy)

    return min(eqs, key=rank)


def solve_nash(g: Game) -> NashCertificate:
    """Equilibrium with deterministic tie-breaking, certified against the graph."""
    eqs = _enumerate_equilibria(g)
    x, y, v = _select(eqs)
    x = np.array(x)
    y = np.array(y)
    if g.symmetric:
        # Any optimal strategy of one player is optimal for both, so x against
        # itself is an equilibrium of the symmetric game.
        z = MixedProfile((x,))
        M = float_matrix(g)
        support = (_support(x),)
        value = float(x @ M @ x)
        profiles = frozenset(support[0])
    else:
        z = MixedProfile((x, y))
        support = (_support(x), _support(y))
        value = v
        profiles = frozenset((i, j) for i in support[0] for j in support[1])
    pg = build_graph(g)
    sink = sink_component(pg)
    return NashCertificate(
        equilibrium=z,
        game_value=value,
        support=support,
        in_sink=profiles <= sink,
        support_strongly_connected=is_strongly_connected(pg, profiles),
    )


def essential_subgame(g: Game) -> tuple[tuple[int, ...], ...]:
    """Product of the unions of equilibrium supports over all equilibria found."""
    eqs = _enumerate_equilibria(g)
    rows: set[int] = set()
    cols: set[int] = set()
    for x, y, _ in eqs:
        rows.update(_support(np.array(x)))
        cols.update(_support(np.array(y)))
    if g.symmetric:
        return (tuple(sorted(rows | cols)),)
    return (tuple(sorted(rows)), tuple(sorted(cols)))


def verify_preference_nash(g: Game) -> PreferenceNashReport:
    """Check that the essential subgame sits inside the sink component and is
    strongly connected there; ties are reported, not resolved."""
    ess = essential_subgame(g)
    if g.symmetric:
        profiles = frozenset(ess[0])
    else:
        profiles = frozenset((i, j) for i in ess[0] for j in ess[1])
    pg = build_graph(g)
    sink = sink_component(pg)
    ties = sum(
        1 for a in pg.arcs if a.weight == 0 and a.src in profiles and a.dst in profiles
    )
    return PreferenceNashReport(
        subgame=ess,
        in_sink=profiles <= sink,
        strongly_connected=is_strongly_connected(pg, profiles),
        zero_weight_arc_pairs=ties // 2,
    )


def certificate_to_dict(cert: NashCertificate, g: Game) -> dict:
    """JSON-friendly certificate with strategy labels."""
    vecs = [[float(v) for v in vec] for vec in cert.equilibrium.vectors]
    if g.symmetric:
        support = {"strategies": [g.row_labels[s] for s in cert.support[0]]}
    else:
        support = {
            "rows": [g.row_labels[i] for i in cert.support[0]],
            "cols": [g.col_labels[j] for j in cert.support[1]],
        }
    return {
        "equilibrium": vecs,
        "game_value": cert.game_value,
        "support": support,
        "in_sink": cert.in_sink,
        "support_strongly_connected": cert.support_strongly_connected,
    }
