"""Command-line interface.

One executable with subcommands mirroring the library modules::

    wignerldp edge      --measure spec.json
    wignerldp freeconv  --measure spec.json --eta 1e-3 --out density.csv
    wignerldp ratefn    --measure spec.json --beta 1 --x 3.0 | --grid lo:hi:n --out rates.csv
    wignerldp profile   --out-dir figs/
    wignerldp mde       --measure spec.json --n 100 --z "0.5,1.0" --kind wig --out mde.csv
    wignerldp simulate  --spec ensemble.json --trials 20 --out trials.csv
    wignerldp sphint    --measure spec.json --n 400 --theta 0.3 --samples 100000
    wignerldp validate

Exit codes: 0 success, 2 configuration error, 3 numeric failure,
4 validation failure.  Numbers are printed with 12 significant digits and
infinities as the literal string "inf".
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys

import numpy as np

from . import acceptance
from .errors import ConsistencyError, DomainError, DivergenceError, IterationError
from .freeconv import free_convolution, pastur_stieltjes, right_edge
from .measures import Measure
from .mde import MDEProblem, mde_wig_gap, solve_mde
from .ratefn import rate, rate_profile, thresholds
from .sim import EnsembleSpec, esd_concentration_trial, sample_matrix, spectrum
from .sphint import spherical_integral_mc
from .ratefn import spherical_limit

_NUMERIC_ERRORS = (ConsistencyError, DivergenceError, IterationError)


def _fmt(x) -> str:
    if x is None:
        return ""
    xf = float(x)
    if math.isinf(xf):
        return "inf" if xf > 0 else "-inf"
    if math.isnan(xf):
        return "nan"
    return f"{xf:.12g}"


def _load_measure(path: str) -> Measure:
    try:
        return Measure.from_json(path)
    except FileNotFoundError:
        raise ConfigError(f"measure spec not found: {path}")
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"bad measure spec {path}: {exc}")


class ConfigError(Exception):
    pass


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) if isinstance(v, (int, float, np.floating)) else v
                             for v in row])


def _parse_grid(text: str):
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError:
        raise ConfigError(f"bad grid spec {text!r}, expected lo:hi:n")


def _cmd_edge(args) -> int:
    mu = _load_measure(args.measure)
    edge, w_star, degenerate = right_edge(mu)
    g_edge = mu.g_at_right_edge()
    x_crit = mu.right_edge + g_edge if np.isfinite(g_edge) else math.inf
    print(f"right_edge {_fmt(edge)}")
    print(f"subordination_point {_fmt(w_star) if w_star is not None else 'none'}")
    print(f"degenerate {str(degenerate).lower()}")
    print(f"x_c {_fmt(x_crit)}")
    return 0


def _cmd_freeconv(args) -> int:
    mu = _load_measure(args.measure)
    fc = free_convolution(mu, n_points=args.points)
    grid, vals = fc.density.density_pieces[0]
    eta = args.eta
    g = np.empty(grid.size, dtype=complex)
    gg = 1.0 / (grid + 2j * max(mu.span, 1.0))
    from .freeconv import _damped_grid
    for e in np.geomspace(2.0 * max(mu.span, 1.0), eta, 12):
        gg = _damped_grid(mu, grid + 1j * e, gg, tol=1e-11)
    g = gg
    rows = [(grid[i], vals[i], g[i].real, g[i].imag) for i in range(grid.size)]
    _write_csv(args.out, ["E", "density", "G_real", "G_imag"], rows)
    print(f"wrote {args.out}: {grid.size} rows, edges [{_fmt(fc.left_edge)}, "
          f"{_fmt(fc.right_edge)}], eta {_fmt(eta)}")
    return 0


def _cmd_ratefn(args) -> int:
    mu = _load_measure(args.measure)
    fc = free_convolution(mu)
    ctx = thresholds(mu, fc, beta=args.beta)
    if args.x is not None:
        pt = rate(ctx, args.x)
        value = pt.value_beta1 if args.beta == 1 else pt.value_beta2
        if pt.branch == "below-edge":
            print(f"+inf (below edge {_fmt(fc.right_edge)})")
        else:
            print(f"x {_fmt(pt.x)}  theta_x {_fmt(pt.theta)}  I {_fmt(value)}  "
                  f"branch {pt.branch}")
        return 0
    if args.grid is None:
        raise ConfigError("ratefn needs --x or --grid")
    lo, hi, n = _parse_grid(args.grid)
    profile = rate_profile(ctx, lo, hi, n)
    rows = [(p.x, p.theta, p.value_beta1, p.value_beta2, p.branch)
            for p in profile.rows]
    out = args.out or "ratefn.csv"
    _write_csv(out, ["x", "theta_x", "I_beta1", "I_beta2", "branch"], rows)
    print(f"wrote {out}: {len(rows)} rows")
    return 0


def _cmd_profile(args) -> int:
    import os
    os.makedirs(args.out_dir, exist_ok=True)
    # symmetric two-atom deformation at the critical parameter
    mu2 = Measure.two_point(1.0)
    ctx2 = thresholds(mu2, free_convolution(mu2), beta=1)
    xs = [ctx2.fc.right_edge] + list(np.round(np.arange(2.61, 3.701, 0.01), 10))
    rows = [(p.x, p.theta, p.value_beta1, p.value_beta2, p.branch)
            for p in (rate(ctx2, x) for x in xs)]
    fig2 = os.path.join(args.out_dir, "fig2.csv")
    _write_csv(fig2, ["x", "theta_x", "I_beta1", "I_beta2", "branch"], rows)
    # semicircular deformation of unit variance
    mu1 = Measure.from_spec({"preset": "semicircle", "params": {"sigma": 1.0}})
    ctx1 = thresholds(mu1, free_convolution(mu1), beta=1)
    profile = rate_profile(ctx1, ctx1.fc.right_edge, 4.1, args.points)
    rows = [(p.x, p.theta, p.value_beta1, p.value_beta2, p.branch)
            for p in profile.rows]
    fig1 = os.path.join(args.out_dir, "fig1.csv")
    _write_csv(fig1, ["x", "theta_x", "I_beta1", "I_beta2", "branch"], rows)
    print(f"wrote {fig1} and {fig2}")
    return 0


def _cmd_mde(args) -> int:
    try:
        e_str, eta_str = args.z.split(",")
        z = complex(float(e_str), float(eta_str))
    except ValueError:
        raise ConfigError(f"bad --z {args.z!r}, expected 'E,eta'")
    if args.d_file:
        d = np.loadtxt(args.d_file, delimiter=",", ndmin=1)
    elif args.measure:
        from .measures import quantile_discretize
        d = quantile_discretize(_load_measure(args.measure), args.n)
    else:
        raise ConfigError("mde needs --d-file or --measure")
    kind = {"mde": "mde", "wig": "wig"}[args.kind]
    sol = solve_mde(MDEProblem(d=d, z=z, kind=kind, tol=args.tol))
    rows = [(i, sol.m[i].real, sol.m[i].imag) for i in range(sol.m.size)]
    if args.out:
        _write_csv(args.out, ["index", "m_real", "m_imag"], rows)
    gap, budget = mde_wig_gap(d, z, tol=args.tol)
    print(f"residual {_fmt(sol.residual)}  iterations {sol.iterations}  "
          f"trace {_fmt(sol.normalized_trace.real)}{sol.normalized_trace.imag:+.12g}i  "
          f"gap {_fmt(gap)}  budget {_fmt(budget)}")
    return 0


def _cmd_simulate(args) -> int:
    with open(args.spec) as fh:
        raw = json.load(fh)
    deformation = None
    if "measure" in raw:
        deformation = Measure.from_spec(raw["measure"])
    elif "diagonal" in raw:
        deformation = np.asarray(raw["diagonal"], dtype=float)
    spec = EnsembleSpec(beta=int(raw.get("beta", 1)),
                        entry_law=raw.get("entry_law", "gaussian"),
                        n=int(raw.get("n", 100)),
                        deformation=deformation,
                        seed=int(raw.get("seed", 0)))
    fc = None
    if isinstance(deformation, Measure):
        fc = free_convolution(deformation)
    rows = []
    lmaxes = []
    for t in range(args.trials):
        trial_spec = spec.with_seed((spec.seed, t))
        sample = spectrum(sample_matrix(trial_spec))
        dist = (esd_concentration_trial(trial_spec, fc) if fc is not None else math.nan)
        rows.append((t, sample.lambda_min, sample.lambda_max, dist))
        lmaxes.append(sample.lambda_max)
    out = args.out or "simulate.csv"
    _write_csv(out, ["trial", "lambda_min", "lambda_max", "dudley_to_fc"], rows)
    summary = {
        "trials": args.trials,
        "lambda_max_mean": float(np.mean(lmaxes)),
        "lambda_max_std": float(np.std(lmaxes, ddof=1)) if len(lmaxes) > 1 else 0.0,
        "lambda_max_quantiles": {
            "q10": float(np.quantile(lmaxes, 0.1)),
            "q50": float(np.quantile(lmaxes, 0.5)),
            "q90": float(np.quantile(lmaxes, 0.9)),
        },
    }
    if fc is not None:
        summary["fc_right_edge"] = fc.right_edge
        summary["dudley_mean"] = float(np.mean([r[3] for r in rows]))
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def _cmd_sphint(args) -> int:
    if args.eigs_file:
        eigs = np.loadtxt(args.eigs_file, delimiter=",", ndmin=1)
        limit = None
    elif args.measure:
        mu = _load_measure(args.measure)
        from .measures import quantile_discretize
        eigs = quantile_discretize(mu, args.n)
        limit = spherical_limit(mu, args.theta, mu.right_edge, beta=args.beta)
    else:
        raise ConfigError("sphint needs --eigs-file or --measure")
    est = spherical_integral_mc(eigs, args.theta, args.samples, seed=args.seed,
                                method=args.method, beta=args.beta)
    line = (f"J_N {_fmt(est.value_log)}  stderr {_fmt(est.stderr_log)}  "
            f"samples {est.samples}  method {est.method}")
    if limit is not None:
        line += f"  J_analytic {_fmt(limit)}"
    print(line)
    return 0


def _cmd_validate(args) -> int:
    results = acceptance.run_all(only=args.only)
    failed = acceptance.report(results, stream=sys.stdout)
    return 0 if failed == 0 else 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wignerldp",
        description="Deformed Wigner ensembles: rate functions, free convolution, "
                    "Dyson equation, and Monte Carlo validation.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("edge", help="support edge of the free convolution")
    p.add_argument("--measure", required=True)
    p.set_defaults(func=_cmd_edge)

    p = sub.add_parser("freeconv", help="density and transform of the free convolution")
    p.add_argument("--measure", required=True)
    p.add_argument("--eta", type=float, default=1e-3)
    p.add_argument("--points", type=int, default=2000)
    p.add_argument("--out", default="freeconv.csv")
    p.set_defaults(func=_cmd_freeconv)

    p = sub.add_parser("ratefn", help="rate function values")
    p.add_argument("--measure", required=True)
    p.add_argument("--beta", type=int, choices=(1, 2), default=1)
    p.add_argument("--x", type=float)
    p.add_argument("--grid", help="lo:hi:n")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_ratefn)

    p = sub.add_parser("profile", help="write the reference figure data files")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--points", type=int, default=130)
    p.set_defaults(func=_cmd_profile)

    p = sub.add_parser("mde", help="solve the Matrix Dyson Equation")
    p.add_argument("--d-file")
    p.add_argument("--measure")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--z", required=True, help="'E,eta'")
    p.add_argument("--kind", choices=("mde", "wig"), default="wig")
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_mde)

    p = sub.add_parser("simulate", help="sample ensembles and summarize spectra")
    p.add_argument("--spec", required=True)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("sphint", help="Monte Carlo spherical integral")
    p.add_argument("--eigs-file")
    p.add_argument("--measure")
    p.add_argument("--n", type=int, default=400)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--method", choices=("naive", "tilted"), default="tilted")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--beta", type=int, choices=(1, 2), default=1)
    p.set_defaults(func=_cmd_sphint)

    p = sub.add_parser("validate", help="run the acceptance suite")
    p.add_argument("--only", type=int, nargs="*", default=None,
                   help="criterion numbers to run (default: all)")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except _NUMERIC_ERRORS as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
