"""Acceptance criteria, one test per criterion.

Each test records a ``criterion N: PASS|FAIL ...`` line that is printed in
the pytest terminal summary. Running this file directly prints the same
lines without pytest.
"""

from fractions import Fraction

import numpy as np
import pytest

from eigencycle.dynamics import (
    AgentConfig,
    NoiseRestartConfig,
    invariant_manifold_check,
    simulate_agents,
    simulate_with_noise_restarts,
)
from eigencycle.fixtures import TREATMENT_NAMES, l_table, oneill_game, table2
from eigencycle.game import interior_rest_point
from eigencycle.reproduce import (
    TABLE5_RHO,
    TABLE6,
    TABLE7,
    eigencycle_predictors,
    fine_structure_samples,
    pooled_l,
)
from eigencycle.spectral import (
    align_conjugate_pairs,
    eigen_decompose,
    eigencycle_set,
    fit_scale_sign,
    jacobian_at,
)
from eigencycle.stats import ols, spearman, t_test_one_sample
from eigencycle.tsmetrics import (
    PlaySeries,
    Trajectory,
    accumulated_angular_momentum,
    angular_momentum_table,
    net_transit,
    net_transit_from_sequences,
)

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


def _setup():
    game = oneill_game()
    x = interior_rest_point(game)
    eigs = eigen_decompose(jacobian_at(game, x).j)
    ref = table2()
    aligned = align_conjugate_pairs(eigs, 0.4j, [ref.eigenpair(".4i_1"), ref.eigenpair(".4i_2")])
    return game, x, eigs, aligned


def criterion_1():
    _, _, eigs, _ = _setup()
    got = sorted((e.lam for e in eigs), key=lambda z: (z.imag, z.real))
    want = sorted([0.8j, -0.8j, 0.2, -0.2, 0.4j, 0.4j, -0.4j, -0.4j], key=lambda z: (z.imag, z.real))
    err = max(abs(a - b) for a, b in zip(got, want))
    return err <= 1e-10, f"max eigenvalue error {err:.2e} (<= 1e-10)"


def criterion_2():
    _, _, _, aligned = _setup()
    ref = table2()
    worst = 0.0
    for e in aligned:
        if e.is_complex:
            worst = max(worst, fit_scale_sign(eigencycle_set(e), ref.column(e.tag)).max_abs_error)
    # exact ratio on the printed rational components eta_1 = -i/4, eta_2 = i/12, eta_5 = 1/4, eta_6 = -1/12
    im = {1: Fraction(-1, 4), 2: Fraction(1, 12)}
    re = {5: Fraction(1, 4), 6: Fraction(-1, 12)}
    exact = {mn: -im[mn[0]] * re[mn[1]] for mn in [(1, 5), (1, 6), (2, 6)]}  # Im(conj(a) b), a imaginary, b real
    # the ratio is one of strengths: subspace 16 turns the other way from 15 and 26
    exact_ok = (abs(exact[(1, 5)] / exact[(2, 6)]), abs(exact[(1, 6)] / exact[(2, 6)])) == (9, 3)
    s = eigencycle_set(next(e for e in aligned if e.tag == ".8i"))
    r1, r2 = abs(s["15"] / s["26"]), abs(s["16"] / s["26"])
    ratio_ok = abs(r1 - 9) < 1e-9 and abs(r2 - 3) < 1e-9
    ok = worst < 5e-4 and exact_ok and ratio_ok
    return ok, f"max fitted error {worst:.2e} (< 5e-4); ratios {r1:.12f}:{r2:.12f}:1 (9:3:1 to 1e-9)"


def criterion_3():
    lt = l_table()
    errs = {f"{a}/{b}": spearman(lt.column(a), lt.column(b)).rho - w for (a, b), w in TABLE5_RHO.items()}
    n_ok = sum(abs(e) <= 0.01 for e in errs.values())
    worst = max(errs, key=lambda k: abs(errs[k]))
    return n_ok == 15, f"{n_ok}/15 Spearman entries within 0.01; worst {worst} off by {errs[worst]:+.3f}"


def criterion_4():
    lt = l_table()
    preds = eigencycle_predictors(unit=False)
    bad = []
    for k, name in enumerate(TREATMENT_NAMES):
        y = lt.column(name)
        r = ols(y, preds["sigma_8i"].values, ["s"])
        if abs(r["s"].t - TABLE6[".8i"]["t"][k]) > 0.3 or abs(r.r_squared - TABLE6[".8i"]["r2"][k]) > 0.02:
            bad.append(f"L_{name}/.8i")
        for tag in ("4i_1", "4i_2"):
            if ols(y, preds[f"sigma_{tag}"].values, ["s"])["s"].p <= 0.1:
                bad.append(f"L_{name}/.{tag}")
    return not bad, "all 6 slope t and R^2 within tolerance, all .4i slopes p > 0.1" if not bad else f"failed: {bad}"


def criterion_5():
    samples = fine_structure_samples()
    p24 = t_test_one_sample(samples[24]).p
    p54 = t_test_one_sample(samples[54]).p
    ok = len(samples[24]) == 24 and len(samples[54]) == 54 and p24 < 1e-8 and p54 < 1e-5
    return ok, f"N=24 p={p24:.4g} (< 1e-8); N=54 p={p54:.4g} (< 1e-5)"


def criterion_6():
    names = ["sigma_8i", "sigma_alpha", "sigma_beta"]
    preds = eigencycle_predictors(unit=True)
    x = np.column_stack([preds[n].values for n in names])
    details, ok = [], True
    for weighting in ("mean", "rounds"):
        r = ols(pooled_l(weighting), x, names)
        this = (all(r[n].estimate > 0 and r[n].p < 0.05 for n in names) and r["const"].p > 0.2
                and abs(r["sigma_8i"].estimate - TABLE7["coef"]["sigma_8i"]) <= 0.2 * TABLE7["coef"]["sigma_8i"])
        ok = ok and this
        details.append(f"{weighting}: coef_8i={r['sigma_8i'].estimate:.5f} const p={r['const'].p:.3f}")
    return ok, "; ".join(details)


def criterion_7():
    game, _, _, aligned = _setup()
    r = invariant_manifold_check(game, aligned, ".8i", 1e-3)
    ok = r.linear_spread < 1e-6 and r.ode_spread < 0.02 and abs(r.period - 2.5 * np.pi) < 1e-12
    return ok, f"linear spread {r.linear_spread:.2e} (< 1e-6); ODE spread {r.ode_spread:.2e} (< 0.02) over T={r.period:.4f}"


def criterion_8():
    square = np.array([(0, 0), (1, 0), (1, 1), (0, 1), (0, 0)], dtype=float)
    tr = Trajectory(np.arange(5.0), square)
    rng = np.random.default_rng(8)
    vals = [accumulated_angular_momentum(tr, rng.normal(scale=10, size=2), (1, 2))[-1] for _ in range(100)]
    diff = max(abs(v - 2.0) for v in vals)
    return diff < 1e-12, f"max |accumulated - 2| over 100 origins {diff:.1e} (< 1e-12)"


def criterion_9():
    game, x, _, _ = _setup()
    sigma = table2().column(".8i").values
    # flaky budget: one pair may reach 3 SE on the first seed if a second seed is clean
    counts = []
    for seed in (9, 10):
        rng = np.random.default_rng(seed)
        tab = angular_momentum_table(PlaySeries.from_rounds(rng.integers(1, 5, size=(100_000, 2)), 4, 4), x)
        counts.append(int(np.count_nonzero(np.abs(tab.values) >= 3 * tab.se)))
        if counts[0] == 0:
            break
    null_ok = counts[0] == 0 or (counts[0] <= 1 and counts[-1] == 0 and len(counts) == 2)
    rhos = {}
    for policy in ("noisy_best_response", "win_stay_lose_shift"):
        ser = simulate_agents(game, AgentConfig(policy, 100_000, seed=1, eps=0.1))
        rhos[policy] = spearman(angular_momentum_table(ser, x).values, sigma).rho
    ok = null_ok and all(r > 0.5 for r in rhos.values())
    return ok, (f"uniform: pairs with |L| >= 3 SE per seed {counts}; Spearman(L, sigma_.8i) NBR {rhos['noisy_best_response']:.3f}, "
                f"WSLS {rhos['win_stay_lose_shift']:.3f} (> 0.5)")


def criterion_10():
    game, _, _, aligned = _setup()
    by = {e.tag: e for e in aligned}
    res = simulate_with_noise_restarts(game, [by[".4i_1"], by[".4i_2"]], NoiseRestartConfig(1.0, seed=10), 1e4, [1.0, 1.0])
    n_shocks = len(res.shock_times)
    zs = []
    for pair in [(2, 6), (3, 7), (4, 8), (2, 7)]:
        mean, se = res.mean_angular_momentum(pair, "cross")
        zs.append(abs(mean) / se)
    slow = 2 * np.pi / 0.4
    res2 = simulate_with_noise_restarts(game, [by[".8i"], by[".4i_1"]], NoiseRestartConfig(0.0), 1e4 * slow, [1.0, 1.0])
    worst = max(abs(res2.mean_angular_momentum((m, n), "cross")[0]) for m in range(1, 9) for n in range(m + 1, 9))
    ok = n_shocks >= 9000 and max(zs) < 3 and worst < 1e-3
    return ok, f"{n_shocks} shocks, max |cross mean|/SE {max(zs):.2f} (< 3); distinct-frequency max |mean| {worst:.1e} (< 1e-3)"


def criterion_11():
    flip = net_transit_from_sequences([[1, 2] * 50 + [1]], 2)
    cyc = net_transit_from_sequences([[1, 2, 3] * 3 + [1]], 3)
    want = np.array([[0, 1, -1], [-1, 0, 1], [1, -1, 0]]) / 3
    rng = np.random.default_rng(11)
    series = PlaySeries.from_rounds(rng.integers(1, 5, size=(5000, 2)), 4, 4)
    anti = max(float(np.abs(nt.t + nt.t.T).max()) for nt in (net_transit(series, m) for m in ("dimension", "cross", "joint")))
    ok = np.all(flip.t == 0) and np.abs(cyc.t - want).max() < 1e-12 and anti == 0.0
    return ok, f"flip-flop max |T| {np.abs(flip.t).max():.1e}; 3-cycle error {np.abs(cyc.t - want).max():.1e}; max |T + T^T| {anti:.1e}"


CRITERIA = {k: globals()[f"criterion_{k}"] for k in range(1, 12)}


def _record(k: int):
    ok, detail = CRITERIA[k]()
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, detail


@pytest.mark.parametrize("k", range(1, 12))
def test_criterion(k):
    ok, detail = _record(k)
    assert ok, detail


if __name__ == "__main__":
    for k in CRITERIA:
        _record(k)
