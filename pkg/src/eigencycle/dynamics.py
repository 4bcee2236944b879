"""Trajectory generators: replicator ODE, linearised modal evolution, agent play.

The ODE integrator is an embedded Dormand-Prince 5(4) pair with the usual
error-per-step control. After every accepted step the state is put back on
the product of simplices (tiny negatives clamped, each population
renormalised); the drift removed this way is recorded in
``Trajectory.meta["max_drift"]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import trapezoid

from .errors import DimensionError, InvalidState, StiffnessError, SymmetryError
from .game import PayoffBimatrix, _velocity, check_state, interior_rest_point, split
from .spectral import EigenPair, ModalCoefficients, eigencycle_set
from .tsmetrics import PROTOCOLS, PlaySeries, Session, Trajectory, instantaneous_angular_momentum

# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass(frozen=True)
class OdeConfig:
    t_span: tuple[float, float]
    initial: np.ndarray
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = np.inf
    max_steps: int = 1_000_000

    def __post_init__(self):
        t0, t1 = self.t_span
        if not t1 > t0:
            raise ValueError("t_span must satisfy t1 > t0")
        for name in ("rel_tol", "abs_tol"):
            v = getattr(self, name)
            if not 0 < v <= 1e-2:
                raise ValueError(f"{name} must lie in (0, 1e-2]")
        if not self.max_step > 0:
            raise ValueError("max_step must be positive")


def dormand_prince(f: Callable[[float, np.ndarray], np.ndarray], t_span, y0, rel_tol=1e-9, abs_tol=1e-12,
                   max_step=np.inf, max_steps=1_000_000, project=None):
    """Adaptive RK45 integration returning the accepted step times and states.

    ``project``, if given, maps each accepted state to a corrected one (used
    to stay on a constraint manifold); its effect does not enter the error
    estimate of the step.
    """
    t0, t1 = map(float, t_span)
    y = np.asarray(y0, dtype=float).copy()
    ts, ys = [t0], [y.copy()]
    k1 = f(t0, y)
    # initial step from the size of the derivative
    scale = abs_tol + rel_tol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((k1 / scale) ** 2))
    h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h = min(h, max_step, t1 - t0)
    t = t0
    n_steps = n_rejected = 0
    k = np.empty((7, len(y)))
    while t < t1:
        if n_steps >= max_steps:
            raise StiffnessError(f"step budget {max_steps} exhausted at t={t:.6g}")
        if h <= 1e-14 * max(1.0, abs(t)):
            raise StiffnessError(f"step size underflow at t={t:.6g}")
        if t + h >= t1 - 1e-12 * max(1.0, abs(t1)):
            h = t1 - t  # land exactly on t1 instead of leaving a sliver
        k[0] = k1
        for i in range(1, 7):
            k[i] = f(t + _C[i] * h, y + h * (np.asarray(_A[i]) @ k[:i]))
        y_new = y + h * (_B5 @ k)
        err_vec = h * (_E @ k)
        sc = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((err_vec / sc) ** 2))
        if err <= 1.0:
            t = t1 if t + h >= t1 else t + h
            if project is not None:
                y_new = project(y_new)
            y = y_new
            k1 = f(t, y)
            ts.append(t)
            ys.append(y.copy())
            n_steps += 1
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            n_rejected += 1
            factor = max(0.2, 0.9 * err ** -0.2)
        h = min(h * factor, max_step)
    return np.array(ts), np.array(ys), {"n_steps": n_steps, "n_rejected": n_rejected}


def integrate_replicator(game: PayoffBimatrix, cfg: OdeConfig) -> Trajectory:
    """Integrate the replicator field from ``cfg.initial`` over ``cfg.t_span``."""
    y0 = check_state(game, cfg.initial)
    drift = [0.0]

    def project(y):
        xa, xb = split(game, y)
        drift[0] = max(drift[0], abs(xa.sum() - 1.0), abs(xb.sum() - 1.0))
        try:
            return check_state(game, y)
        except InvalidState as exc:
            raise StiffnessError(f"integration left the simplex: {exc}") from exc

    ts, ys, stats = dormand_prince(
        lambda t, y: _velocity(game, y), cfg.t_span, y0, cfg.rel_tol, cfg.abs_tol,
        cfg.max_step, cfg.max_steps, project,
    )
    return Trajectory(ts, ys, meta={"max_drift": drift[0], **stats})


def tangent_projection(game: PayoffBimatrix, v) -> np.ndarray:
    """Remove each population's mean so the vector sums to zero per population."""
    v = np.asarray(v, dtype=float).copy()
    if v.shape != (game.dim,):
        raise DimensionError(f"vector has shape {v.shape}, game needs ({game.dim},)")
    for sl in (slice(0, game.n_a), slice(game.n_a, None)):
        v[sl] -= v[sl].mean()
    return v


def perturbed_state(game: PayoffBimatrix, base, size: float, rng: np.random.Generator | None = None,
                    direction=None) -> np.ndarray:
    """``base`` plus a small tangent displacement, renormalised onto the simplices.

    The raw displacement is ``size * direction`` or, without a direction,
    ``size`` times uniform [0, 1) noise. It is projected onto the tangent
    space before being added; the final renormalisation then only absorbs
    rounding.
    """
    if direction is None:
        rng = np.random.default_rng() if rng is None else rng
        direction = rng.random(game.dim)
    x = np.asarray(base, dtype=float) + size * tangent_projection(game, np.real(direction))
    return check_state(game, x)


# ----------------------------------------------------------------------------
# linearised modal evolution


def _coefficient_vector(coeffs) -> np.ndarray:
    return np.asarray(coeffs.c if isinstance(coeffs, ModalCoefficients) else coeffs, dtype=complex)


def modal_state_and_velocity(eigs: Sequence[EigenPair], coeffs, times, base, tol: float = 1e-9):
    """States ``base + sum_k c_k xi_k exp(lambda_k t)`` and their time derivatives.

    Raises SymmetryError when the coefficients do not pair up into a real
    trajectory (imaginary part above ``tol`` relative to the deviation size).
    """
    c = _coefficient_vector(coeffs)
    if len(c) != len(eigs):
        raise DimensionError(f"{len(c)} coefficients for {len(eigs)} eigenpairs")
    t = np.atleast_1d(np.asarray(times, dtype=float))
    lam = np.array([e.lam for e in eigs])
    xi = np.array([e.xi for e in eigs])  # (k, s)
    w = c[None, :] * np.exp(np.outer(t, lam))  # (T, k)
    dev = w @ xi
    vel = (w * lam[None, :]) @ xi
    size = max(1.0, float(np.abs(dev.real).max(initial=0.0)))
    if np.abs(dev.imag).max(initial=0.0) > tol * size or np.abs(vel.imag).max(initial=0.0) > tol * size:
        raise SymmetryError("coefficients are not conjugate-symmetric; trajectory would be complex")
    return np.asarray(base, dtype=float) + dev.real, vel.real


def linearized_modal_trajectory(eigs: Sequence[EigenPair], coeffs, times, base) -> Trajectory:
    """Exact evaluation of the linearised flow; velocities are kept in ``meta``."""
    x, v = modal_state_and_velocity(eigs, coeffs, times, base)
    return Trajectory(np.atleast_1d(np.asarray(times, dtype=float)), x, meta={"velocities": v})


def single_mode_coefficients(eigs: Sequence[EigenPair], tag: str, amplitude: float,
                             phase: float = 0.0) -> np.ndarray:
    """Coefficients exciting one eigenvector and its conjugate partner.

    The resulting deviation at ``t = 0`` is ``amplitude * Re(exp(i phase) xi)``.
    """
    tags = [e.tag for e in eigs]
    k = tags.index(tag)
    c = np.zeros(len(eigs), dtype=complex)
    e = eigs[k]
    if not e.is_complex:
        c[k] = amplitude * np.cos(phase)
        return c
    partner = _conjugate_partner(eigs, k)
    c[k] = 0.5 * amplitude * np.exp(1j * phase)
    c[partner] = np.conj(c[k])
    return c


def _conjugate_partner(eigs: Sequence[EigenPair], k: int) -> int:
    target = np.conj(eigs[k].xi)
    for i, e in enumerate(eigs):
        if i != k and abs(e.lam - np.conj(eigs[k].lam)) < 1e-9 and np.allclose(e.xi, target, atol=1e-12):
            return i
    raise SymmetryError(f"no conjugate partner for eigenpair {eigs[k].tag}")


def ratio_spread(l_values, sigma, rel_tol: float = 1e-9) -> float:
    """``(max r - min r) / |mean r|`` of ``r = L / sigma`` over subspaces with nonzero sigma.

    ``l_values`` may be one row per time sample; the worst row is returned.
    """
    sigma = np.asarray(getattr(sigma, "values", sigma), dtype=float)
    l2 = np.atleast_2d(np.asarray(l_values, dtype=float))
    mask = np.abs(sigma) > rel_tol * np.abs(sigma).max()
    r = l2[:, mask] / sigma[mask]
    spread = (r.max(axis=1) - r.min(axis=1)) / np.abs(r.mean(axis=1))
    return float(spread.max())


@dataclass(frozen=True)
class ManifoldReport:
    """Single-mode check of the ratio ``L / sigma`` near the rest point."""

    tag: str
    perturbation: float
    period: float
    linear_spread: float  # worst instantaneous spread, exact modal evaluation
    ode_spread: float  # worst instantaneous spread along the nonlinear orbit
    ode_mean_spread: float  # spread of the one-period time averages
    return_distance: float  # |x(T) - x(0)| after one period
    max_drift: float


def invariant_manifold_check(game: PayoffBimatrix, eigs: Sequence[EigenPair], tag: str,
                             perturbation: float = 1e-3, n_samples: int = 400) -> ManifoldReport:
    """Excite one oscillating mode and compare rotation across subspaces.

    Both the linearised flow and the full replicator ODE are started at
    ``x* + perturbation * Re(xi)`` and followed for one period ``2 pi / |Im lambda|``.
    """
    base = interior_rest_point(game)
    e = eigs[[x.tag for x in eigs].index(tag)]
    if not e.is_complex:
        raise ValueError(f"eigenpair {tag} does not oscillate")
    period = 2 * np.pi / abs(e.lam.imag)
    sigma = eigencycle_set(e)
    times = np.linspace(0.0, period, n_samples + 1)
    c = single_mode_coefficients(eigs, tag, perturbation)
    x_lin, v_lin = modal_state_and_velocity(eigs, c, times, base)
    linear = ratio_spread(instantaneous_angular_momentum(x_lin, v_lin, base), sigma)

    x0 = check_state(game, base + perturbation * np.real(e.xi))
    traj = integrate_replicator(game, OdeConfig((0.0, period), x0, max_step=period / n_samples))
    vel = np.array([_velocity(game, x) for x in traj.states])
    inst = instantaneous_angular_momentum(traj.states, vel, base)
    mean = trapezoid(inst, traj.times, axis=0) / period
    return ManifoldReport(
        tag, perturbation, period, linear, ratio_spread(inst, sigma), ratio_spread(mean, sigma),
        float(np.linalg.norm(traj.states[-1] - traj.states[0])), float(traj.meta["max_drift"]),
    )


# ----------------------------------------------------------------------------
# agent-based play

POLICIES = ("uniform", "noisy_best_response", "win_stay_lose_shift")


@dataclass(frozen=True)
class AgentConfig:
    policy: str = "uniform"
    rounds: int = 1000
    seed: int = 0
    eps: float = 0.1
    matching: str = "fixed-pair"

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if not 0.0 <= self.eps <= 1.0:
            raise ValueError("eps must lie in [0, 1]")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.matching not in PROTOCOLS:
            raise ValueError(f"matching must be one of {PROTOCOLS}")


def _pick(options: np.ndarray, u: float) -> int:
    return int(options[min(int(u * len(options)), len(options) - 1)])


def simulate_agents(game: PayoffBimatrix, cfg: AgentConfig) -> PlaySeries:
    """One fixed pair of agents playing ``cfg.rounds`` rounds.

    ``noisy_best_response`` best-responds to the opponent's previous action
    (ties broken uniformly) and plays uniformly at random with probability
    ``eps``. ``win_stay_lose_shift`` repeats its action after a strictly
    positive payoff and otherwise redraws uniformly, also exploring with
    probability ``eps``. The first round is uniform for every policy.
    """
    rng = np.random.default_rng(cfg.seed)
    n = cfg.rounds
    sizes = (game.n_a, game.n_b)
    uniform = np.stack([rng.integers(0, k, size=n) for k in sizes], axis=1)
    if cfg.policy == "uniform":
        return _series(uniform, game, cfg)
    explore = rng.random((n, 2)) < cfg.eps
    ties = rng.random((n, 2))
    pay = (game.a, game.b)  # pay[0][i, j]: A's payoff; pay[1][j, i]: B's payoff
    best = [[np.flatnonzero(p[:, o] == p[:, o].max()) for o in range(p.shape[1])] for p in pay]
    out = np.empty((n, 2), dtype=int)
    out[0] = uniform[0]
    for t in range(1, n):
        prev = out[t - 1]
        for who in (0, 1):
            if explore[t, who]:
                out[t, who] = uniform[t, who]
            elif cfg.policy == "noisy_best_response":
                out[t, who] = _pick(best[who][prev[1 - who]], ties[t, who])
            else:
                won = pay[who][prev[who], prev[1 - who]] > 0
                out[t, who] = prev[who] if won else uniform[t, who]
    return _series(out, game, cfg)


def _series(choices: np.ndarray, game: PayoffBimatrix, cfg: AgentConfig) -> PlaySeries:
    return PlaySeries((Session("1", choices[:, 0] + 1, choices[:, 1] + 1),), game.n_a, game.n_b, cfg.matching)


# ----------------------------------------------------------------------------
# linearised evolution with random phase shocks


@dataclass(frozen=True)
class NoiseRestartConfig:
    shock_rate: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.shock_rate < 0:
            raise ValueError("shock_rate must be >= 0")


def _exp_integral(mu: np.ndarray, t0: np.ndarray, t1: np.ndarray) -> np.ndarray:
    """Integral of exp(mu t) over [t0, t1], elementwise."""
    mu, t0, t1 = np.broadcast_arrays(mu, t0, t1)
    out = np.empty(mu.shape, dtype=complex)
    small = np.abs(mu) < 1e-12
    out[small] = (t1 - t0)[small]
    m = ~small
    out[m] = (np.exp(mu[m] * t1[m]) - np.exp(mu[m] * t0[m])) / mu[m]
    return out


@dataclass(frozen=True, eq=False)
class NoiseRestartResult:
    """Piecewise linearised evolution; mode phases jump at ``shock_times``.

    Mode ``k`` contributes ``2 Re(a_k exp(i theta_k) xi_k exp(lambda_k t))``
    (oscillating modes) or ``a_k xi_k exp(lambda_k t)`` (real modes), where
    ``theta_k`` is 0 before the first shock and is redrawn uniformly on
    ``[-pi, pi]`` at every shock.
    """

    base: np.ndarray
    modes: tuple[EigenPair, ...]
    amplitudes: np.ndarray
    shock_times: np.ndarray
    phases: np.ndarray  # (n_segments, n_modes)
    t_end: float

    @property
    def edges(self) -> np.ndarray:
        return np.concatenate([[0.0], self.shock_times, [self.t_end]])

    def _terms(self, segment: np.ndarray):
        """Exponential terms per mode: lists of (coef per sample/segment, xi, lambda)."""
        out = []
        for k, e in enumerate(self.modes):
            c = self.amplitudes[k] * np.exp(1j * self.phases[segment, k])
            if e.is_complex:
                out.append([(c, e.xi, e.lam), (np.conj(c), np.conj(e.xi), np.conj(e.lam))])
            else:
                out.append([(c, e.xi, e.lam)])
        return out

    def components(self, times) -> np.ndarray:
        """Per-mode deviations from ``base`` and their velocities, each (n_modes, T, s)."""
        t = np.asarray(times, dtype=float)
        seg = np.clip(np.searchsorted(self.shock_times, t, side="right"), 0, len(self.phases) - 1)
        dev = np.zeros((len(self.modes), len(t), len(self.base)))
        vel = np.zeros_like(dev)
        for k, terms in enumerate(self._terms(seg)):
            for c, xi, lam in terms:
                w = c * np.exp(lam * t)
                dev[k] += np.real(np.outer(w, xi))
                vel[k] += np.real(np.outer(w * lam, xi))
        return dev, vel

    def trajectory(self, times) -> Trajectory:
        dev, vel = self.components(times)
        return Trajectory(np.asarray(times, dtype=float), self.base + dev.sum(axis=0),
                          meta={"velocities": vel.sum(axis=0)})

    def segment_integrals(self, pair: tuple[int, int], which: str = "cross"):
        """Exact integral of the angular momentum in ``pair`` over each shock segment.

        ``which`` selects the cross-mode part (``k != l``), the self part
        (``k == l``) or all of it. Returns (integrals, durations).
        """
        if which not in ("cross", "self", "all"):
            raise ValueError("which must be 'cross', 'self' or 'all'")
        m, n = pair[0] - 1, pair[1] - 1
        edges = self.edges
        t0, t1 = edges[:-1], edges[1:]
        seg = np.arange(len(t0))
        terms = self._terms(seg)
        total = np.zeros(len(t0), dtype=complex)
        for k, tk in enumerate(terms):
            for l, tl in enumerate(terms):
                if (which == "cross" and k == l) or (which == "self" and k != l):
                    continue
                for cp, xp, lp in tk:
                    for cq, xq, lq in tl:
                        geo = xp[m] * xq[n] - xp[n] * xq[m]
                        if geo == 0:
                            continue
                        total += cp * cq * lq * geo * _exp_integral(lp + lq, t0, t1)
        return total.real, t1 - t0

    def mean_angular_momentum(self, pair: tuple[int, int], which: str = "cross") -> tuple[float, float]:
        """Time average over ``[0, t_end]`` and its standard error across shock segments.

        Segments are independent given the phase redraws, so the SE is that of a
        ratio estimator over segments; it is NaN with fewer than two segments.
        """
        ints, durs = self.segment_integrals(pair, which)
        mean = ints.sum() / durs.sum()
        if len(ints) < 2:
            return float(mean), float("nan")
        resid = ints - mean * durs
        se = np.sqrt(len(ints) / (len(ints) - 1) * np.sum(resid ** 2)) / durs.sum()
        return float(mean), float(se)


def simulate_with_noise_restarts(game: PayoffBimatrix, modes: Sequence[EigenPair], cfg: NoiseRestartConfig,
                                 t_end: float, amplitudes=None) -> NoiseRestartResult:
    """Linearised evolution of the given modes with phases redrawn at Poisson shocks.

    Pass only one member of each conjugate pair: its partner is added
    implicitly so the trajectory is real. ``amplitudes`` defaults to 1e-3
    per mode.
    """
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    base = interior_rest_point(game)
    modes = tuple(modes)
    amps = np.full(len(modes), 1e-3, dtype=complex) if amplitudes is None else np.asarray(amplitudes, dtype=complex)
    if len(amps) != len(modes):
        raise DimensionError(f"{len(amps)} amplitudes for {len(modes)} modes")
    rng = np.random.default_rng(cfg.seed)
    shocks = []
    if cfg.shock_rate > 0:
        t = rng.exponential(1.0 / cfg.shock_rate)
        while t < t_end:
            shocks.append(t)
            t += rng.exponential(1.0 / cfg.shock_rate)
    phases = np.zeros((len(shocks) + 1, len(modes)))
    if shocks:
        phases[1:] = rng.uniform(-np.pi, np.pi, size=(len(shocks), len(modes)))
    for k, e in enumerate(modes):
        if not e.is_complex:
            phases[:, k] = 0.0  # a real mode has no phase to redraw
    return NoiseRestartResult(base, modes, amps, np.array(shocks), phases, float(t_end))

