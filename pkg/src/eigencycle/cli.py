"""Command-line entry point.

Exit status is 0 on success, 1 when the input fails validation (or a
reproduction check fails) and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io as eio
from .dynamics import (
    POLICIES,
    AgentConfig,
    OdeConfig,
    integrate_replicator,
    invariant_manifold_check,
    perturbed_state,
    simulate_agents,
)
from .errors import EigencycleError, NotApplicable
from .fixtures import fixture_path, oneill_game, table2
from .game import PayoffBimatrix, interior_rest_point
from .render import render_accumulated, render_lissajous, render_regression_scatter
from .reproduce import TARGETS, reproduce
from .spectral import (
    align_conjugate_pairs,
    eigen_decompose,
    eigencycle_set,
    jacobian_at,
    parse_pair,
)
from .stats import ols
from .tsmetrics import NET_TRANSIT_MODES, accumulated_angular_momentum, angular_momentum_table, net_transit

POLICY_ALIASES = {"wsls": "win_stay_lose_shift", "nbr": "noisy_best_response", "best_response": "noisy_best_response"}


def _emit(text: str, out: str | None, default_name: str) -> None:
    """Write ``text`` to a file, to ``DIR/default_name``, or to stdout."""
    if out is None:
        sys.stdout.write(text)
        return
    p = Path(out)
    if not p.suffix:
        p = p / default_name
    eio.atomic_write(p, text)
    print(f"wrote {p}", file=sys.stderr)


def _json(obj) -> str:
    return json.dumps(obj, indent=1, default=eio._json_default) + "\n"


def _load_game(path: str | None) -> PayoffBimatrix:
    return oneill_game() if path is None else eio.load_game(path)


def _eigs(game: PayoffBimatrix, mode: str = "closed_form", align: bool = True):
    x = interior_rest_point(game)
    eigs = eigen_decompose(jacobian_at(game, x, mode).j)
    if align and game == oneill_game():
        ref = table2()
        eigs = align_conjugate_pairs(eigs, 0.4j, [ref.eigenpair(".4i_1"), ref.eigenpair(".4i_2")])
    return x, eigs


def _origin(arg: str | None, game: PayoffBimatrix) -> np.ndarray:
    if arg is None:
        return interior_rest_point(game)
    o = np.array([float(v) for v in arg.split(",")])
    if o.shape != (game.dim,):
        raise ValueError(f"--origin needs {game.dim} comma-separated values")
    return o


# ----------------------------------------------------------------------------
# subcommands


def cmd_spectrum(args) -> int:
    game = _load_game(args.game)
    x, eigs = _eigs(game, args.mode, not args.no_align)
    j = jacobian_at(game, x, args.mode)
    doc = {
        "rest_point": x,
        "jacobian": j.j,
        "eigenpairs": [
            {"tag": e.tag, "eigenvalue": [e.lam.real, e.lam.imag], "eigenvector": eio.complex_pairs(e.xi),
             "residual": e.residual(j.j)}
            for e in eigs
        ],
    }
    _emit(_json(doc), args.out, "spectrum.json")
    return 0


def cmd_eigencycles(args) -> int:
    game = _load_game(args.game)
    _, eigs = _eigs(game, align=not args.no_align)
    cols = {f"sigma_{e.tag}": eigencycle_set(e) for e in eigs}
    if args.format == "json":
        _emit(_json({k: v.as_dict() for k, v in cols.items()}), args.out, "eigencycles.json")
    else:
        _emit(eio.pair_columns_to_csv(cols, game.dim), args.out, "eigencycles.csv")
    return 0


def cmd_analyze(args) -> int:
    game = _load_game(args.game)
    series = eio.load_play_series(args.series, game.n_a, game.n_b, args.protocol)
    table = angular_momentum_table(series, _origin(args.origin, game))
    if args.format == "json":
        doc = {"origin": table.origin, "n_transitions": table.n_transitions,
               "L": table.as_dict(), "se": dict(zip(table.codes, table.se))}
        _emit(_json(doc), args.out, "angular_momentum.json")
    else:
        _emit(eio.l_table_to_csv(table), args.out, "angular_momentum.csv")
    return 0


def cmd_simulate(args) -> int:
    game = _load_game(args.game)
    if args.kind == "ode":
        rng = np.random.default_rng(args.seed)
        base = interior_rest_point(game)
        direction = None
        if args.mode:
            _, eigs = _eigs(game)
            direction = np.real(next(e.xi for e in eigs if e.tag == args.mode))
        x0 = perturbed_state(game, base, args.perturb, rng, direction)
        traj = integrate_replicator(game, OdeConfig((0.0, args.t1), x0, args.rel_tol, args.abs_tol,
                                                    args.max_step))
        _emit(eio.trajectory_to_csv(traj), args.out, "trajectory.csv")
    else:
        policy = POLICY_ALIASES.get(args.policy, args.policy)
        series = simulate_agents(game, AgentConfig(policy, args.rounds, args.seed, args.eps))
        _emit(eio.play_series_to_csv(series), args.out, "plays.csv")
    return 0


def _column(spec: str) -> tuple[str, np.ndarray]:
    path, _, col = spec.partition(":")
    return (col or Path(path).stem), eio.load_pair_column(path, col or None)


def cmd_regress(args) -> int:
    _, y = _column(args.y)
    xs = [_column(s) for s in args.x.split(",")]
    res = ols(y, np.column_stack([v for _, v in xs]), [n for n, _ in xs], intercept=not args.no_intercept)
    _emit(_json(res.to_dict()), args.out, "regression.json")
    print(res.table(), file=sys.stderr if args.out is None else sys.stdout)
    return 0


def cmd_net_transit(args) -> int:
    game = _load_game(args.game)
    series = eio.load_play_series(args.series, game.n_a, game.n_b, args.protocol)
    nt = net_transit(series, args.states)
    if args.format == "json":
        doc = {"labels": nt.labels, "T": nt.t, "rho": nt.rho, "A": nt.a}
        _emit(_json(doc), args.out, "net_transit.json")
    else:
        rows = [[lab, *map(repr, map(float, row))] for lab, row in zip(nt.labels, nt.t)]
        _emit(eio._csv_text(["state", *nt.labels], rows), args.out, "net_transit.csv")
    return 0


def cmd_verify_manifold(args) -> int:
    game = _load_game(args.game)
    _, eigs = _eigs(game)
    tag = args.mode or max((e for e in eigs if e.is_complex), key=lambda e: e.lam.imag).tag
    r = invariant_manifold_check(game, eigs, tag, args.perturb)
    ok = r.linear_spread < 1e-6 and r.ode_spread < 0.02
    doc = {**r.__dict__, "passed": ok}
    _emit(_json(doc), args.out, "manifold.json")
    return 0 if ok else 1


def cmd_render(args) -> int:
    if args.plot == "lissajous":
        game = _load_game(args.game)
        _, eigs = _eigs(game)
        e = next((e for e in eigs if e.tag == args.eigen), None)
        if e is None:
            raise ValueError(f"no eigenpair tagged {args.eigen!r}; have {[x.tag for x in eigs]}")
        svg = render_lissajous(e, title=f"eigencycles of lambda = {e.lam:.3g}")
    elif args.plot == "scatter":
        xname, x = _column(args.x)
        yname, y = _column(args.y)
        fit = ols(y, x, [xname])
        svg = render_regression_scatter(x, y, fit[xname].estimate, fit["const"].estimate, xlabel=xname, ylabel=yname)
    else:
        game = _load_game(args.game)
        series = eio.load_play_series(args.series, game.n_a, game.n_b)
        acc = accumulated_angular_momentum(series, interior_rest_point(game), parse_pair(args.pair))
        svg = render_accumulated(acc, ylabel=f"accumulated L({args.pair})")
    _emit(svg, args.out, f"{args.plot}.svg")
    return 0


def cmd_reproduce(args) -> int:
    game = None if args.game is None else eio.load_game(args.game)
    targets = TARGETS if args.target == "all" else (args.target,)
    docs, ok = [], True
    for t in targets:
        kwargs = {"seed": args.seed} if t == "netfig" else {}
        try:
            r = reproduce(t, game, **kwargs)
        except NotApplicable as exc:
            # O'Neill-only targets on another game are skipped, not failed
            print(f"{t}: NOT APPLICABLE ({exc})", file=sys.stderr)
            docs.append({"target": t, "passed": None, "not_applicable": str(exc)})
            continue
        print(r.summary(), file=sys.stderr)
        docs.append(r.to_dict())
        ok = ok and r.passed
    doc = docs[0] if len(docs) == 1 else {"reports": docs}
    _emit(_json(doc), args.out, f"reproduce_{args.target}.json")
    return 0 if ok else 1


# ----------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file, or directory for the default file name (default: stdout)")
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for all randomness")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    game_opt = argparse.ArgumentParser(add_help=False)
    game_opt.add_argument("--game", help=f"game JSON (default: O'Neill, {fixture_path('oneill.json').name})")

    p = argparse.ArgumentParser(prog="eigencycle", description="Eigencycle analysis of matrix-game dynamics.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common, game_opt], help="Jacobian eigen system at the rest point (JSON)")
    s.add_argument("--mode", choices=("closed_form", "finite_difference"), default="closed_form")
    s.add_argument("--no-align", action="store_true", help="keep the solver's degenerate basis")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("eigencycles", parents=[common, game_opt], help="eigencycle set of every eigenvector")
    s.add_argument("--no-align", action="store_true")
    s.set_defaults(func=cmd_eigencycles)

    s = sub.add_parser("analyze", parents=[common, game_opt], help="angular momentum table of a play series")
    s.add_argument("--series", required=True)
    s.add_argument("--origin", help="comma-separated origin (default: interior rest point)")
    s.add_argument("--protocol", choices=("fixed-pair", "random-match"), default="fixed-pair")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="generate trajectories or play series")
    sim = s.add_subparsers(dest="kind", required=True)
    o = sim.add_parser("ode", parents=[common, game_opt], help="replicator ODE near the rest point")
    o.add_argument("--t1", type=float, default=30.0)
    o.add_argument("--perturb", type=float, default=1e-3)
    o.add_argument("--mode", help="perturb along Re(xi) of this eigenpair tag instead of random noise")
    o.add_argument("--rel-tol", type=float, default=1e-9)
    o.add_argument("--abs-tol", type=float, default=1e-12)
    o.add_argument("--max-step", type=float, default=0.1)
    o.set_defaults(func=cmd_simulate)
    a = sim.add_parser("agents", parents=[common, game_opt], help="synthetic fixed-pair play")
    a.add_argument("--policy", choices=POLICIES + tuple(POLICY_ALIASES), default="uniform")
    a.add_argument("--eps", type=float, default=0.1)
    a.add_argument("--rounds", type=int, default=1000)
    a.set_defaults(func=cmd_simulate)

    s = sub.add_parser("regress", parents=[common], help="OLS of one per-subspace column on others")
    s.add_argument("--y", required=True, help="CSV[:column]")
    s.add_argument("--x", required=True, help="CSV[:column][,CSV[:column]...]")
    s.add_argument("--no-intercept", action="store_true")
    s.set_defaults(func=cmd_regress)

    s = sub.add_parser("net-transit", parents=[common, game_opt], help="net transit matrix of a play series")
    s.add_argument("--series", required=True)
    s.add_argument("--states", choices=NET_TRANSIT_MODES, default="dimension")
    s.add_argument("--protocol", choices=("fixed-pair", "random-match"), default="fixed-pair")
    s.set_defaults(func=cmd_net_transit)

    s = sub.add_parser("verify-manifold", parents=[common, game_opt], help="single-mode ratio check (JSON)")
    s.add_argument("--perturb", type=float, default=1e-3)
    s.add_argument("--mode", help="eigenpair tag (default: fastest oscillating mode)")
    s.set_defaults(func=cmd_verify_manifold)

    s = sub.add_parser("render", help="SVG figures")
    r = s.add_subparsers(dest="plot", required=True)
    lz = r.add_parser("lissajous", parents=[common, game_opt])
    lz.add_argument("--eigen", default=".8i")
    lz.set_defaults(func=cmd_render)
    sc = r.add_parser("scatter", parents=[common])
    sc.add_argument("--x", required=True)
    sc.add_argument("--y", required=True)
    sc.set_defaults(func=cmd_render)
    ac = r.add_parser("accumulated", parents=[common, game_opt])
    ac.add_argument("--series", required=True)
    ac.add_argument("--pair", default="15")
    ac.set_defaults(func=cmd_render)

    s = sub.add_parser("reproduce", parents=[common], help="compare against the published O'Neill results")
    s.add_argument("target", choices=TARGETS + ("all",))
    s.add_argument("--game", help="game JSON; non-O'Neill games are rejected by table targets")
    s.set_defaults(func=cmd_reproduce)
    return p


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (EigencycleError, ValueError, KeyError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
