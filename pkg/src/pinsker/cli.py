"""Command-line interface: ``pinsker <command> [options]``.

Commands write CSV files (``--out``) and print a one-line summary per sample
size on stdout; diagnostics go to stderr.  Exit status is 0 on success, 2 for
usage, input or configuration errors and 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._io import read_xy, write_csv
from ._validation import SieveError, check_sieve
from .basis import DesignGrid
from .config import ConfigError, load_config
from .lowerbound import lab_ladder
from .models import NoiseDensity, rng_stream, simulate
from .risk import RiskError, efficiency_curve, gamma_k, mc_risk, oracle_gap
from .selector import select
from .weights import omega

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3

RISK_COLUMNS = ("n", "density", "estimator", "mean", "stderr", "ratio", "gamma")
GAP_COLUMNS = ("n", "estimator", "beta", "t", "risk", "stderr")
LADDER_COLUMNS = ("n", "quantity", "value")


class UsageError(Exception):
    pass


def _say(msg: str) -> None:
    print(msg, flush=True)


def _warn(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _config(args, **extra):
    return load_config(
        args.config,
        seed=args.seed,
        M=getattr(args, "reps", None),
        gamma=getattr(args, "gamma", None),
        workers=getattr(args, "workers", None),
        **extra,
    )


def _ns(args, cfg):
    return (args.n,) if getattr(args, "n", None) is not None else cfg.ns


def _estimator_params(cfg, spec):
    if cfg.estimator == "selector":
        return {"gamma": cfg.gamma}
    if cfg.estimator == "reference":
        return {"ball": cfg.ball, "varsigma": spec.varsigma}
    return {}


# -- commands -------------------------------------------------------------------


def cmd_estimate(args) -> int:
    x, y = read_xy(args.input)
    grid, y = check_sieve(x, y)
    gamma = args.gamma if args.gamma is not None else 2.0
    result, est = select(y, grid, gamma)
    write_csv(args.out, ("x", "y", "fitted"),
              ({"x": a, "y": b, "fitted": c} for a, b, c in zip(x, y, est.fitted)))
    w = result.weight
    summary = {
        "n": grid.n, "beta": result.chosen.beta, "t": result.chosen.t,
        "omega": omega(result.chosen, grid.n), "j0": w.j0,
        "zeta_hat": result.zeta_hat, "rho": result.rho, "cost": result.cost,
    }
    write_csv(_sidecar(args.out), tuple(summary), [summary])
    _say(f"n={grid.n} beta={result.chosen.beta} t={result.chosen.t:.6g} "
         f"zeta_hat={result.zeta_hat:.6g} cost={result.cost:.6g}")
    return EXIT_OK


def _sidecar(out) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".summary.csv")


def cmd_simulate(args) -> int:
    cfg = _config(args)
    n = args.n if args.n is not None else cfg.ns[0]
    if n < 3 or n % 2 == 0:
        raise UsageError(f"--n must be odd and >= 3, got {n}")
    noise = NoiseDensity.parse(args.noise) if args.noise else cfg.densities[0]
    spec = cfg.model_spec(noise)
    grid = DesignGrid(n)
    y = simulate(spec, grid, rng_stream(cfg.seed, noise.stream_id))
    x = grid.points
    s_true, sigma = spec.S(x), spec.sigma(grid)
    write_csv(args.out, ("x", "y", "s_true", "sigma"),
              ({"x": a, "y": b, "s_true": c, "sigma": d} for a, b, c, d in zip(x, y, s_true, sigma)))
    _say(f"n={n} noise={noise.tag} function={cfg.function} varsigma={spec.varsigma:.6g}")
    return EXIT_OK


def cmd_risk(args) -> int:
    cfg = _config(args, estimator=args.estimator)
    spec = cfg.model_spec()
    gam = gamma_k(cfg.ball, spec.varsigma)
    rows = []
    for n in _ns(args, cfg):
        rep = mc_risk(cfg.estimator, spec, n, cfg.M, cfg.seed, cfg.densities,
                      xi_star=cfg.xi_star, workers=cfg.workers, **_estimator_params(cfg, spec))
        ratio = n ** (2.0 * cfg.k / (2 * cfg.k + 1)) * rep.risk / gam
        rows.extend(rep.rows())
        rows.append({"n": n, "density": "sup", "estimator": rep.estimator, "mean": rep.risk,
                     "stderr": rep.risk_stderr, "ratio": ratio, "gamma": gam})
        _say(f"n={n} estimator={rep.estimator} risk={rep.risk:.6g} (se {rep.risk_stderr:.2g}) ratio={ratio:.4f}")
    write_csv(args.out, RISK_COLUMNS, rows)
    return EXIT_OK


def cmd_efficiency(args) -> int:
    cfg = _config(args, estimator=args.estimator)
    spec = cfg.model_spec()
    ns = _ns(args, cfg)
    params = {"gamma": cfg.gamma} if cfg.estimator == "selector" else {}
    records = efficiency_curve(spec, ns, cfg.M, cfg.seed, cfg.densities, estimator=cfg.estimator,
                               xi_star=cfg.xi_star, workers=cfg.workers, **params)
    rows = []
    for rec in records:
        rows.extend(rec.report.rows())
        rows.append(rec.row())
        _say(f"n={rec.n} ratio={rec.ratio:.4f} (se {rec.ratio_stderr:.2g}) gamma={rec.gamma:.6g}")
    write_csv(args.out, RISK_COLUMNS, rows)
    return EXIT_OK


def cmd_oracle_gap(args) -> int:
    cfg = _config(args)
    spec = cfg.model_spec()
    rows = []
    for n in _ns(args, cfg):
        gap = oracle_gap(spec, n, cfg.M, cfg.seed, cfg.densities, gamma=cfg.gamma,
                         xi_star=cfg.xi_star, workers=cfg.workers)
        rows.extend(gap.rows())
        _say(f"n={n} selector={gap.selector_risk:.6g} best={gap.best_candidate_risk:.6g} "
             f"ratio={gap.ratio:.4f} kappa={gap.kappa:.4f} residual={gap.residual:.3g}")
    write_csv(args.out, GAP_COLUMNS, rows)
    return EXIT_OK


def cmd_lowerbound(args) -> int:
    cfg = _config(args)
    ns = (args.n,) if args.n is not None else cfg.lb_ns
    rows = lab_ladder(
        ns, k=cfg.lb_k, r=cfg.lb_r, epsilon=cfg.lb_epsilon, eta=cfg.lb_eta,
        N_rule=cfg.lb_N_rule, scale=cfg.lowerbound_scale(), draws=cfg.lb_draws,
        seed=cfg.seed, eps0=cfg.lb_eps0, workers=cfg.workers,
    )
    write_csv(args.out, LADDER_COLUMNS, rows)
    for n in ns:
        v = {r["quantity"]: r["value"] for r in rows if r["n"] == n}
        _say(f"n={n} N={v['N']} M={v['M']} bound={v['bound']:.6g} "
             f"normalized={v['normalized_bound']:.4f} target={v['target']:.4f}")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pinsker",
        description="Adaptive trigonometric regression, Monte Carlo risk and lower-bound lab.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def common(p, *, reps=True, gamma=True):
        p.add_argument("--config", help="experiment config file (dotted key = value)")
        p.add_argument("--seed", type=int, help="random seed (overrides run.seed)")
        p.add_argument("--n", type=int, help="single sample size (overrides the configured ladder)")
        if reps:
            p.add_argument("--reps", type=int, help="Monte Carlo replications (overrides run.M)")
        if gamma:
            p.add_argument("--gamma", type=float, help="penalty exponent (overrides estimator.gamma)")
        p.add_argument("--workers", type=int, help="worker threads (capped by PINSKER_THREADS)")
        p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("estimate", help="fit the adaptive estimator to an x,y CSV")
    p.add_argument("input", help="CSV with header x,y on the sieve j/n, odd n")
    p.add_argument("--gamma", type=float, help="penalty exponent (default 2)")
    p.add_argument("--out", required=True, help="output CSV path (x,y,fitted)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="draw one dataset from the configured model")
    common(p, reps=False, gamma=False)
    p.add_argument("--noise", help="noise law tag (gaussian, uniform, student_t<nu>)")
    p.set_defaults(func=cmd_simulate)

    for name, func, help_ in (
        ("risk", cmd_risk, "Monte Carlo risk per noise law"),
        ("efficiency", cmd_efficiency, "normalized risk ratios across sample sizes"),
    ):
        p = sub.add_parser(name, help=help_)
        common(p)
        p.add_argument("--estimator", choices=("selector", "reference", "first", "full"),
                       help="procedure to score (overrides estimator.name)")
        p.set_defaults(func=func)

    p = sub.add_parser("oracle-gap", help="selector risk against every candidate weight")
    common(p)
    p.set_defaults(func=cmd_oracle_gap)

    p = sub.add_parser("lowerbound", help="lower-bound lab ladder")
    common(p, reps=False, gamma=False)
    p.set_defaults(func=cmd_lowerbound)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _warn(f"config error: {exc}")
        return EXIT_USAGE
    except SieveError as exc:
        _warn(f"input error: {exc}")
        return EXIT_USAGE
    except (RiskError, FloatingPointError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _warn(f"numerical failure: {exc}")
        return EXIT_NUMERIC
    except (UsageError, ValueError, OSError) as exc:
        _warn(f"error: {exc}")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
