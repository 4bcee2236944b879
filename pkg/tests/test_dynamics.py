import numpy as np
import pytest
from scipy.integrate import solve_ivp, trapezoid

from eigencycle.dynamics import (
    AgentConfig,
    NoiseRestartConfig,
    OdeConfig,
    dormand_prince,
    integrate_replicator,
    invariant_manifold_check,
    linearized_modal_trajectory,
    perturbed_state,
    ratio_spread,
    simulate_agents,
    simulate_with_noise_restarts,
    single_mode_coefficients,
    tangent_projection,
)
from eigencycle.errors import StiffnessError, SymmetryError
from eigencycle.fixtures import matching_pennies_game, oneill_game, table2
from eigencycle.game import _velocity, interior_rest_point
from eigencycle.spectral import eigen_decompose, eigencycle_set, jacobian_at
from eigencycle.stats import spearman
from eigencycle.tsmetrics import angular_momentum_table, instantaneous_angular_momentum


def test_rest_point_is_fixed(oneill, x_star):
    tr = integrate_replicator(oneill, OdeConfig((0.0, 30.0), x_star))
    # rounding in x* excites the unstable .2 mode, which grows by e^6 over the span
    assert np.abs(tr.states - x_star).max() < 1e-9


def test_period_return(oneill, x_star, by_tag):
    x0 = x_star + 1e-3 * np.real(by_tag[".8i"].xi)
    period = 2 * np.pi / 0.8
    tr = integrate_replicator(oneill, OdeConfig((0.0, period), x0))
    assert tr.times[-1] == period
    assert np.linalg.norm(tr.states[-1] - x0) < 1e-4
    assert tr.meta["max_drift"] < 1e-8


def test_diameter_over_ten_periods(oneill, x_star, rng):
    x0 = perturbed_state(oneill, x_star, 1e-3, rng)
    period = 2 * np.pi / 0.8
    tr = integrate_replicator(oneill, OdeConfig((0.0, 10 * period), x0, max_step=period / 50))
    first = tr.times <= period
    last = tr.times >= 9 * period

    def diameter(xs):
        return max(np.linalg.norm(a - b) for a in xs for b in xs)

    ratio = diameter(tr.states[last]) / diameter(tr.states[first])
    assert 0.9 <= ratio <= 1.1
    assert tr.meta["max_drift"] < 1e-8


def test_matches_scipy(oneill, x_star, rng):
    x0 = perturbed_state(oneill, x_star, 0.05, rng)
    ours = integrate_replicator(oneill, OdeConfig((0.0, 12.0), x0))
    ref = solve_ivp(lambda t, y: _velocity(oneill, y), (0.0, 12.0), x0, method="DOP853", rtol=1e-11, atol=1e-13)
    assert np.abs(ours.states[-1] - ref.y[:, -1]).max() < 1e-7


def test_dormand_prince_exponential():
    ts, ys, stats = dormand_prince(lambda t, y: -y, (0.0, 2.0), np.array([1.0]))
    assert ts[-1] == 2.0 and abs(ys[-1, 0] - np.exp(-2.0)) < 1e-9
    assert stats["n_steps"] > 0


def test_stiffness_error():
    # finite-time blow-up drives the step size to underflow
    with pytest.raises(StiffnessError):
        dormand_prince(lambda t, y: y ** 2, (0.0, 2.0), np.array([1.0]))
    with pytest.raises(StiffnessError):
        dormand_prince(lambda t, y: -y, (0.0, 100.0), np.array([1.0]), max_steps=3)


@pytest.mark.parametrize("kwargs", [
    {"t_span": (1.0, 1.0)},
    {"t_span": (0.0, 1.0), "rel_tol": 0.0},
    {"t_span": (0.0, 1.0), "abs_tol": 0.1},
    {"t_span": (0.0, 1.0), "max_step": -1.0},
])
def test_ode_config_validation(kwargs, x_star):
    with pytest.raises(ValueError):
        OdeConfig(initial=x_star, **kwargs)


def test_tangent_projection(oneill, rng):
    v = tangent_projection(oneill, rng.normal(size=8))
    assert abs(v[:4].sum()) < 1e-15 and abs(v[4:].sum()) < 1e-15
    x = perturbed_state(oneill, np.full(8, 0.25), 1e-3, rng)
    assert abs(x[:4].sum() - 1) < 1e-15 and abs(x[4:].sum() - 1) < 1e-15


def test_linearized_zero_coefficients(eigs, x_star):
    tr = linearized_modal_trajectory(eigs, np.zeros(8), np.linspace(0, 10, 11), x_star)
    assert np.all(tr.states == x_star)


def test_linearized_rejects_asymmetric(eigs, x_star):
    c = np.zeros(8, dtype=complex)
    c[0] = 1e-3
    with pytest.raises(SymmetryError):
        linearized_modal_trajectory(eigs, c, [0.0, 1.0], x_star)


def test_single_mode_ellipse(eigs, x_star, by_tag):
    c = single_mode_coefficients(eigs, ".8i", 1e-2)
    t = np.linspace(0, 2 * np.pi / 0.8, 200)
    tr = linearized_modal_trajectory(eigs, c, t, x_star)
    np.testing.assert_allclose(tr.states[0] - x_star, 1e-2 * np.real(by_tag[".8i"].xi), atol=1e-15)
    # 1:1 Lissajous: each projection satisfies a fixed quadratic form
    d = tr.states - x_star
    xi = by_tag[".8i"].xi
    for m, n in [(0, 4), (0, 5), (1, 5)]:
        basis = np.array([[xi[m].real, -xi[m].imag], [xi[n].real, -xi[n].imag]]) * 1e-2
        u = np.linalg.solve(basis, d[:, [m, n]].T)
        np.testing.assert_allclose(np.hypot(u[0], u[1]), 1.0, atol=1e-9)
    np.testing.assert_allclose(tr.states[-1], tr.states[0], atol=1e-14)


def test_mixed_modes_one_to_two(eigs, x_star):
    c = single_mode_coefficients(eigs, ".8i", 1e-2) + single_mode_coefficients(eigs, ".4i_1", 1e-2)
    slow = 2 * np.pi / 0.4
    t = np.linspace(0, slow, 801)
    d = linearized_modal_trajectory(eigs, c, t, x_star).states - x_star
    # the orbit closes only after the slow period, not after the fast one
    assert np.abs(d[-1] - d[0]).max() < 1e-14
    assert np.abs(d[400] - d[0]).max() > 1e-4
    # a coordinate with both frequencies has spectral peaks at harmonics 1 and 2 of the slow period
    spec = np.abs(np.fft.rfft(d[:-1], axis=0))
    k = int(np.argmax(spec[1] * spec[2]))
    assert spec[1, k] > 1e-6 and spec[2, k] > 1e-6
    assert np.all(spec[3:, k] < 1e-9 * spec[1:3, k].max())


def test_prop1_linear_and_ode(oneill, eigs, aligned):
    for tag in (".8i", ".4i_1"):
        rep = invariant_manifold_check(oneill, aligned, tag, 1e-3)
        assert rep.linear_spread < 1e-6
        assert rep.ode_spread < 0.02
        assert rep.max_drift < 1e-8


def test_ratio_spread_basics():
    s = np.array([1.0, -2.0, 0.0, 4.0])
    assert ratio_spread(3 * s, s) == pytest.approx(0.0)
    assert ratio_spread([1.0, -2.0, 5.0, 4.0], s) == pytest.approx(0.0)  # zero-sigma entry ignored
    assert ratio_spread([1.1, -2.0, 0.0, 4.0], s) == pytest.approx(0.1 / ((1.1 + 1 + 1) / 3))


def test_agent_determinism(oneill):
    cfg = AgentConfig("noisy_best_response", 500, seed=42)
    assert simulate_agents(oneill, cfg) == simulate_agents(oneill, cfg)
    assert simulate_agents(oneill, cfg) != simulate_agents(oneill, AgentConfig("noisy_best_response", 500, seed=43))


def test_agent_config_validation():
    for kw in ({"policy": "tit-for-tat"}, {"eps": 1.5}, {"rounds": 0}, {"matching": "stranger"}):
        with pytest.raises(ValueError):
            AgentConfig(**kw)


def test_uniform_marginals(oneill):
    n = 100_000
    ser = simulate_agents(oneill, AgentConfig("uniform", n, seed=3))
    s = ser.sessions[0]
    sd = np.sqrt(0.25 * 0.75 / n)
    for choices in (s.a, s.b):
        freq = np.bincount(choices, minlength=5)[1:] / n
        assert np.all(np.abs(freq - 0.25) < 3 * sd + 1e-12)


def test_noisy_best_response_follows_eigencycle(oneill, x_star):
    ser = simulate_agents(oneill, AgentConfig("noisy_best_response", 100_000, seed=1, eps=0.1))
    tab = angular_momentum_table(ser, x_star)
    assert spearman(tab.values, table2().column(".8i").values).rho > 0.5


def test_wsls_runs(oneill):
    ser = simulate_agents(oneill, AgentConfig("win_stay_lose_shift", 2000, seed=5, eps=0.0))
    s = ser.sessions[0]
    won = oneill.a[s.a[:-1] - 1, s.b[:-1] - 1] > 0
    assert np.all(s.a[1:][won] == s.a[:-1][won])


def test_noise_restart_rate_zero_matches_linear(eigs, aligned, oneill, x_star):
    by = {e.tag: e for e in aligned}
    res = simulate_with_noise_restarts(oneill, [by[".8i"]], NoiseRestartConfig(0.0), 20.0, [5e-3])
    t = np.linspace(0, 20, 50)
    c = single_mode_coefficients(aligned, ".8i", 1e-2)
    lin = linearized_modal_trajectory(aligned, c, t, x_star)
    np.testing.assert_allclose(res.trajectory(t).states, lin.states, atol=1e-15)
    assert len(res.shock_times) == 0


def test_noise_restart_segment_integrals_match_quadrature(aligned, oneill, x_star):
    by = {e.tag: e for e in aligned}
    res = simulate_with_noise_restarts(oneill, [by[".4i_1"], by[".4i_2"]], NoiseRestartConfig(0.5, seed=4), 12.0, [1.0, 0.7])
    ints, durs = res.segment_integrals((2, 6), "all")
    t0, t1 = res.edges[0], res.edges[1]
    # stop just short of the shock, where the phases jump
    t = np.linspace(t0, t1 - 1e-12, 4001)
    tr = res.trajectory(t)
    inst = instantaneous_angular_momentum(tr.states, tr.meta["velocities"], x_star)
    k = [(m, n) for m in range(1, 9) for n in range(m + 1, 9)].index((2, 6))
    assert ints[0] == pytest.approx(trapezoid(inst[:, k], t), rel=1e-5, abs=1e-9)
    parts = sum(res.segment_integrals((2, 6), w)[0] for w in ("self", "cross"))
    np.testing.assert_allclose(parts, ints, atol=1e-12)


def test_noise_restart_degenerate_cross_term_vanishes(aligned, oneill):
    by = {e.tag: e for e in aligned}
    res = simulate_with_noise_restarts(oneill, [by[".4i_1"], by[".4i_2"]], NoiseRestartConfig(1.0, seed=7), 1e4, [1.0, 1.0])
    assert len(res.shock_times) > 9000
    mean, se = res.mean_angular_momentum((2, 6), "cross")
    self_mean, _ = res.mean_angular_momentum((2, 6), "self")
    assert abs(mean) < 3 * se
    assert abs(self_mean) > 10 * se


def test_distinct_frequencies_cross_term_vanishes(aligned, oneill):
    by = {e.tag: e for e in aligned}
    slow = 2 * np.pi / 0.4
    res = simulate_with_noise_restarts(oneill, [by[".8i"], by[".4i_1"]], NoiseRestartConfig(0.0), 1e4 * slow, [1.0, 1.0])
    worst = max(abs(res.mean_angular_momentum((m, n), "cross")[0]) for m in range(1, 9) for n in range(m + 1, 9))
    assert worst < 1e-10


def test_prop1_matching_pennies():
    game = matching_pennies_game()
    eigs = eigen_decompose(jacobian_at(game, interior_rest_point(game)).j)
    tag = next(e.tag for e in eigs if e.is_complex and e.lam.imag > 0)
    rep = invariant_manifold_check(game, eigs, tag, 1e-3)
    assert rep.linear_spread < 1e-6 and rep.ode_spread < 0.02
    assert eigencycle_set(eigs[0]).dim == 4
