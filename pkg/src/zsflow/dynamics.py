"""Replicator dynamics: vector fields, fixed-step RK4 integration, Lyapunov
rates for the sink component, the product-distribution embedding check, and
multiplicative-weights steps.

The default integrator works in log-coordinates on the support: the state is
u = log x per player, advanced with classic RK4, and x is recovered by a
softmax over the support.  Faces of the simplex are then exactly invariant
(coordinates starting at zero are never represented) and positivity on the
support is structural.  A direct RK4 on the simplex with per-step
renormalisation is kept as a cross-check mode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .game import (
    Game,
    MixedProfile,
    Profile,
    _check_shape,
    float_matrix,
    profile_masses,
)
from .prefgraph import build_graph, sink_component
from .symmetrise import sym_float_matrix


class IntegrationError(RuntimeError):
    """Integration produced a non-finite or invalid state."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed-step integration parameters.

    mwu_eta is the step size used by multiplicative-weights comparisons; the
    flow integrator ignores it.
    """

    step: float = 0.01
    horizon: float = 200.0
    method: str = "rk4-log"
    renormalize: bool = True
    mwu_eta: float = 0.01

    def __post_init__(self) -> None:
        if not (self.step > 0):
            raise ValueError("step must be positive")
        if self.step > 0.1:
            raise ValueError("step must be at most 0.1")
        if self.horizon < 0:
            raise ValueError("horizon must be non-negative")
        if self.horizon > 0 and not (self.step < self.horizon):
            raise ValueError("step must be smaller than horizon")
        if self.method not in ("rk4-log", "rk4-direct"):
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.mwu_eta > 0):
            raise ValueError("mwu_eta must be positive")

    @property
    def steps(self) -> int:
        if self.horizon == 0:
            return 0
        # Guard against float fuzz in horizon / step before taking the ceiling.
        return max(1, math.ceil(self.horizon / self.step - 1e-9))


@dataclass(eq=False)
class Trajectory:
    """Sampled solution of the replicator flow.

    states holds one (samples, strategies) array per player; row k is the
    state at times[k].  mass and dist are present when a node set H was
    supplied to the integrator.
    """

    times: np.ndarray
    states: tuple[np.ndarray, ...]
    payoff: np.ndarray
    mass: np.ndarray | None = None
    dist: np.ndarray | None = None

    def __len__(self) -> int:
        return int(self.times.size)

    def state(self, k: int) -> MixedProfile:
        return MixedProfile(tuple(s[k] for s in self.states))

    @property
    def initial(self) -> MixedProfile:
        return self.state(0)

    @property
    def final(self) -> MixedProfile:
        return self.state(len(self) - 1)


def rhs_symmetric(g: Game, x: np.ndarray) -> np.ndarray:
    """Single-population replicator velocity x_s * (M x)_s."""
    if not g.symmetric:
        raise ValueError("rhs_symmetric requires a symmetric game")
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ValueError("state does not match the game dimensions")
    M = float_matrix(g)
    return x * (M @ x)


def rhs_nonsymmetric(g: Game, z: MixedProfile) -> tuple[np.ndarray, np.ndarray]:
    """Two-population replicator velocities at z = (x, y)."""
    if g.symmetric:
        raise ValueError("rhs_nonsymmetric requires a non-symmetric game")
    _check_shape(g, z)
    M = float_matrix(g)
    x, y = z.vectors
    payoff1 = M @ y
    avg = float(x @ payoff1)
    dx = x * (payoff1 - avg)
    payoff2 = M.T @ x
    dy = -y * (payoff2 - avg)
    return dx, dy


def _softmax(U: np.ndarray) -> np.ndarray:
    W = np.exp(U - U.max(axis=1, keepdims=True))
    return W / W.sum(axis=1, keepdims=True)


def _mass_series(g: Game, states: Sequence[np.ndarray], H: frozenset) -> np.ndarray:
    if g.symmetric:
        idx = sorted(H)
        return states[0][..., idx].sum(axis=-1)
    B = np.zeros((g.n, g.m))
    for (i, j) in H:
        B[i, j] = 1.0
    return np.einsum("tbi,ij,tbj->tb", states[0], B, states[1])


def _payoff_series(g: Game, states: Sequence[np.ndarray]) -> np.ndarray:
    M = float_matrix(g)
    if g.symmetric:
        return np.einsum("tbi,ij,tbj->tb", states[0], M, states[0])
    return np.einsum("tbi,ij,tbj->tb", states[0], M, states[1])


def integrate(
    g: Game, z0: MixedProfile, cfg: IntegratorConfig, H: Iterable[Profile] | None = None
) -> Trajectory:
    """Integrate the replicator flow from z0 for cfg.horizon.

    Returns ceil(horizon/step) + 1 uniformly spaced samples.  When H is given,
    the trajectory carries the sink mass x_H and distance-to-content series.
    """
    return integrate_batch(g, [z0], cfg, H)[0]


def integrate_batch(
    g: Game,
    starts: Sequence[MixedProfile],
    cfg: IntegratorConfig,
    H: Iterable[Profile] | None = None,
) -> list[Trajectory]:
    """Integrate several starts at once; all must share the same exact support."""
    if not starts:
        raise ValueError("integrate_batch requires at least one start")
    for z in starts:
        _check_shape(g, z)
    supports = starts[0].support()
    for z in starts[1:]:
        if z.support() != supports:
            raise ValueError("batched starts must share the same support pattern")
    Hset = None
    if H is not None:
        Hset = frozenset(H)
        for p in Hset:
            if not g.contains_profile(p):
                raise ValueError(f"{p!r} is not a profile of this game")

    nplayers = 1 if g.symmetric else 2
    nsteps = cfg.steps
    B = len(starts)
    times = np.arange(nsteps + 1) * cfg.step

    X0 = [
        np.stack([z.vectors[i] for z in starts]) for i in range(nplayers)
    ]  # (B, n_i)
    if cfg.method == "rk4-log":
        full = _run_log(g, X0, supports, cfg, nsteps)
    else:
        full = _run_direct(g, X0, cfg, nsteps)

    payoff = _payoff_series(g, full)
    mass = dist = None
    if Hset is not None:
        mass = _mass_series(g, full, Hset)
        dist = 1.0 - mass

    out = []
    for b in range(B):
        out.append(
            Trajectory(
                times=times.copy(),
                states=tuple(full[i][:, b, :] for i in range(nplayers)),
                payoff=payoff[:, b],
                mass=None if mass is None else mass[:, b],
                dist=None if dist is None else dist[:, b],
            )
        )
    return out


def _run_log(
    g: Game,
    X0: list[np.ndarray],
    supports: tuple[tuple[int, ...], ...],
    cfg: IntegratorConfig,
    nsteps: int,
) -> list[np.ndarray]:
    nplayers = len(X0)
    B = X0[0].shape[0]
    sizes = [x.shape[1] for x in X0]
    sup = [np.array(s, dtype=int) for s in supports]
    M = float_matrix(g)
    if g.symmetric:
        A = M[np.ix_(sup[0], sup[0])]

        def rates(xc: list[np.ndarray]) -> list[np.ndarray]:
            return [xc[0] @ A.T]

    else:
        A = M[np.ix_(sup[0], sup[1])]

        def rates(xc: list[np.ndarray]) -> list[np.ndarray]:
            return [xc[1] @ A.T, -(xc[0] @ A)]

    U = [np.log(X0[i][:, sup[i]]) for i in range(nplayers)]
    out = [np.zeros((nsteps + 1, B, sizes[i])) for i in range(nplayers)]
    Xc = [_softmax(u) for u in U]
    for i in range(nplayers):
        out[i][0][:, sup[i]] = X0[i][:, sup[i]]  # keep the exact start

    h = cfg.step
    for k in range(nsteps):
        K1 = rates(Xc)
        K2 = rates([_softmax(U[i] + 0.5 * h * K1[i]) for i in range(nplayers)])
        K3 = rates([_softmax(U[i] + 0.5 * h * K2[i]) for i in range(nplayers)])
        K4 = rates([_softmax(U[i] + h * K3[i]) for i in range(nplayers)])
        for i in range(nplayers):
            U[i] = U[i] + (h / 6.0) * (K1[i] + 2 * K2[i] + 2 * K3[i] + K4[i])
            U[i] -= U[i].max(axis=1, keepdims=True)  # softmax is shift invariant
            if not np.all(np.isfinite(U[i])):
                raise IntegrationError(
                    f"non-finite state at step {k + 1} (t = {(k + 1) * h:g})"
                )
        Xc = [_softmax(u) for u in U]
        for i in range(nplayers):
            out[i][k + 1][:, sup[i]] = Xc[i]
    return out


def _run_direct(
    g: Game, X0: list[np.ndarray], cfg: IntegratorConfig, nsteps: int
) -> list[np.ndarray]:
    nplayers = len(X0)
    B = X0[0].shape[0]
    M = float_matrix(g)
    if g.symmetric:

        def field(xs: list[np.ndarray]) -> list[np.ndarray]:
            return [xs[0] * (xs[0] @ M.T)]

    else:

        def field(xs: list[np.ndarray]) -> list[np.ndarray]:
            p1 = xs[1] @ M.T
            avg = (xs[0] * p1).sum(axis=1, keepdims=True)
            p2 = xs[0] @ M
            return [xs[0] * (p1 - avg), -xs[1] * (p2 - avg)]

    X = [x.copy() for x in X0]
    out = [np.zeros((nsteps + 1, B, x.shape[1])) for x in X0]
    for i in range(nplayers):
        out[i][0] = X[i]
    h = cfg.step
    for k in range(nsteps):
        K1 = field(X)
        K2 = field([X[i] + 0.5 * h * K1[i] for i in range(nplayers)])
        K3 = field([X[i] + 0.5 * h * K2[i] for i in range(nplayers)])
        K4 = field([X[i] + h * K3[i] for i in range(nplayers)])
        for i in range(nplayers):
            X[i] = X[i] + (h / 6.0) * (K1[i] + 2 * K2[i] + 2 * K3[i] + K4[i])
            if not np.all(np.isfinite(X[i])):
                raise IntegrationError(
                    f"non-finite state at step {k + 1} (t = {(k + 1) * h:g})"
                )
            if np.any(X[i] < -1e-12):
                raise IntegrationError(
                    f"negative coordinate at step {k + 1}; reduce the step size"
                )
            if cfg.renormalize:
                np.clip(X[i], 0.0, None, out=X[i])
                X[i] /= X[i].sum(axis=1, keepdims=True)
            out[i][k + 1] = X[i]
    return out


def lyapunov_rate(g: Game, H: Iterable[Profile], z: MixedProfile) -> float:
    """Instantaneous growth rate of the mass on H along the flow at z.

    H must be the certified sink component of g's preference graph; the rate
    is the weighted cut sum between H and its complement under the product
    masses of z.
    """
    _check_shape(g, z)
    Hset = frozenset(H)
    if Hset != sink_component(build_graph(g)):
        raise ValueError("lyapunov_rate requires the certified sink component of the game")
    if g.symmetric:
        inside = sorted(Hset)
        outside = [s for s in range(g.n) if s not in Hset]
        if not outside:
            return 0.0
        M = float_matrix(g)
        x = z.vectors[0]
        return float(x[inside] @ M[np.ix_(inside, outside)] @ x[outside])
    masses = profile_masses(z)
    S = sym_float_matrix(g)
    inside = sorted(p[0] * g.m + p[1] for p in Hset)
    outside = [k for k in range(g.n * g.m) if k not in set(inside)]
    if not outside:
        return 0.0
    return float(masses[inside] @ S[np.ix_(inside, outside)] @ masses[outside])


@dataclass(frozen=True)
class EmbeddingReport:
    """Worst-case gap between the product-rule derivative of the profile
    masses and the symmetrised single-population replicator field."""

    max_residual: float
    worst_profile: tuple[int, int]


def check_embedding(g: Game, z: MixedProfile) -> EmbeddingReport:
    """Compare d/dt (x1 (x) x2) computed two ways at z (non-symmetric games)."""
    if g.symmetric:
        raise ValueError("check_embedding requires a non-symmetric game")
    _check_shape(g, z)
    dx, dy = rhs_nonsymmetric(g, z)
    x, y = z.vectors
    via_product_rule = (np.outer(dx, y) + np.outer(x, dy)).ravel()
    masses = profile_masses(z)
    via_symmetrised = masses * (sym_float_matrix(g) @ masses)
    residual = np.abs(via_product_rule - via_symmetrised)
    worst = int(residual.argmax())
    return EmbeddingReport(float(residual.max()), (worst // g.m, worst % g.m))


def mwu_step(g: Game, z: MixedProfile, eta: float) -> MixedProfile:
    """One multiplicative-weights update x'_s proportional to x_s e^(eta u_s)."""
    if not (eta > 0):
        raise ValueError("eta must be positive")
    _check_shape(g, z)
    M = float_matrix(g)

    def update(x: np.ndarray, u: np.ndarray) -> np.ndarray:
        on = x > 0
        # Shift by the support maximum before exponentiating; the shift cancels.
        w = np.where(on, x * np.exp(eta * (u - u[on].max())), 0.0)
        return w / w.sum()

    if g.symmetric:
        x = z.vectors[0]
        return MixedProfile((update(x, M @ x),))
    x, y = z.vectors
    return MixedProfile((update(x, M @ y), update(y, -(M.T @ x))))


def time_average(tr: Trajectory) -> MixedProfile:
    """Coordinate-wise mean state over the uniformly spaced samples."""
    return MixedProfile(tuple(s.mean(axis=0) for s in tr.states))


def mass_monotone(mass: np.ndarray, slack: float = 1e-8, saturation: float = 1e-12) -> bool:
    """Whether a sink-mass series is nondecreasing up to slack.

    Once the mass exceeds 1 - saturation the trajectory counts as converged
    and later samples are not compared.
    """
    m = np.asarray(mass, dtype=float)
    crossed = np.nonzero(m > 1.0 - saturation)[0]
    end = int(crossed[0]) + 1 if crossed.size else m.size
    if end < 2:
        return True
    return bool(np.all(np.diff(m[:end]) >= -slack))


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def write_trajectory_csv(tr: Trajectory, g: Game, path: str) -> None:
    """CSV with header t, <coordinate labels...>, x_H, payoff, dist_content."""
    if g.symmetric:
        labels = list(g.row_labels)
    else:
        labels = [f"p1:{s}" for s in g.row_labels] + [f"p2:{t}" for t in g.col_labels]
    header = ["t"] + labels + ["x_H", "payoff", "dist_content"]
    lines = [",".join(header)]
    for k in range(len(tr)):
        cells = [_fmt(float(tr.times[k]))]
        for s in tr.states:
            cells.extend(_fmt(float(v)) for v in s[k])
        cells.append("" if tr.mass is None else _fmt(float(tr.mass[k])))
        cells.append(_fmt(float(tr.payoff[k])))
        cells.append("" if tr.dist is None else _fmt(float(tr.dist[k])))
        lines.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def write_trajectory_svg(tr: Trajectory, path: str, title: str = "sink mass") -> None:
    """Minimal polyline chart of x_H and dist_content against time."""
    if tr.mass is None:
        raise ValueError("trajectory has no sink-mass series to plot")
    width, height = 640, 360
    left, right, top, bottom = 50.0, 620.0, 20.0, 330.0
    tmax = float(tr.times[-1]) if float(tr.times[-1]) > 0 else 1.0
    stride = max(1, len(tr) // 1500)
    idx = list(range(0, len(tr), stride))
    if idx[-1] != len(tr) - 1:
        idx.append(len(tr) - 1)

    def poly(series: np.ndarray) -> str:
        pts = []
        for k in idx:
            px = left + (right - left) * float(tr.times[k]) / tmax
            py = bottom - (bottom - top) * min(max(float(series[k]), 0.0), 1.0)
            pts.append(f"{px:.2f},{py:.2f}")
        return " ".join(pts)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
        f'<text x="{left}" y="{top - 5}" font-size="12">{title}</text>',
        f'<text x="{right - 60}" y="{bottom + 15}" font-size="11">t = {tmax:g}</text>',
        f'<text x="{left - 35}" y="{top + 10}" font-size="11">1.0</text>',
        f'<text x="{left - 35}" y="{bottom}" font-size="11">0.0</text>',
        f'<polyline fill="none" stroke="#1f77b4" stroke-width="1.5" points="{poly(tr.mass)}"/>',
        f'<polyline fill="none" stroke="#ff7f0e" stroke-width="1.5" points="{poly(tr.dist)}"/>',
        f'<text x="{right - 150}" y="{top + 10}" font-size="11" fill="#1f77b4">x_H</text>',
        f'<text x="{right - 100}" y="{top + 10}" font-size="11" fill="#ff7f0e">dist_content</text>',
        "</svg>",
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")
