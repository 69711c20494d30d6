"""Command-line interface: nullvec / lattice / sde command groups.

Exit codes form a stable contract: 0 success (solved / verified /
martingale-consistent), 1 usage error, 2 infeasible / refuted / rejected,
3 inconclusive (increase paths).  Exact rationals cross this boundary as
"p/q" strings; JSON output is deterministic for a fixed config and seed
except for the "timing" block.
"""

import argparse
import csv
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__, exactla
from .liecore import build_sl
from .weylmod import build_weyl
from . import nullsolver
from . import lattice as lat
from .sde import kernels
from .sde.laurent import NoisePath, run_f_theta, integrate_g_direct, g_from_f, strong_order_study
from .sde.martingale import martingale_mc, deterministic_drift, TruncatedRep

DEFAULT_SEED = 112358132134

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_REFUTED = 2
EXIT_INCONCLUSIVE = 3

REFERENCE_KAPPAS = {
    "sl2": {"kappa0": "8/3", "tau": "1"},
    "sl3": {"kappa0": "12/5", "tau": "4/5"},
}


class CliError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _parse_algebra(name):
    if not name.startswith("sl"):
        raise CliError(f"unknown algebra {name!r}: expected sl2, sl3, ...")
    try:
        n = int(name[2:])
    except ValueError:
        raise CliError(f"unknown algebra {name!r}") from None
    if n < 2:
        raise CliError(f"algebra rank out of range: {name}")
    return n


def _parse_weight(spec, rank):
    if spec in ("0", "vac", "vacuum"):
        return (0,) * rank
    if spec.upper().startswith("L"):
        i = int(spec[1:])
        if not 1 <= i <= rank:
            raise CliError(f"fundamental weight index out of range: {spec}")
        return tuple(1 if t == i - 1 else 0 for t in range(rank))
    parts = tuple(int(x) for x in spec.split(","))
    if len(parts) != rank:
        raise CliError(f"weight needs {rank} labels, got {spec!r}")
    return parts


def _versions():
    import scipy

    out = {"wzwsle": __version__, "numpy": np.__version__, "scipy": scipy.__version__}
    try:
        import numba

        out["numba"] = numba.__version__
    except ImportError:
        out["numba"] = None
    return out


def _emit(report, path):
    text = json.dumps(report, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _wrap(report, config, seed, t0):
    report["config"] = config
    report["seed"] = seed
    report["versions"] = _versions()
    report["backend"] = kernels.active_backend()
    report["timing"] = {"wall_seconds": round(time.time() - t0, 3)}
    return report


def _seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("WZWSLE_SEED")
    return int(env) if env else DEFAULT_SEED


# ---- nullvec ------------------------------------------------------------------


def cmd_nullvec(args):
    t0 = time.time()
    n_alg = _parse_algebra(args.algebra)
    if args.action == "scan":
        ranks = [int(x) for x in args.ranks.split(",")]
        table = nullsolver.conjecture_scan(
            ranks, n_mode=args.n, tie=args.tie, checkpoint_path=args.checkpoint
        )
        _emit(_wrap(table, {"command": "nullvec.scan", "ranks": ranks, "n": args.n}, None, t0), args.json)
        return EXIT_OK
    L = build_sl(n_alg)
    weight = _parse_weight(args.weight, L.rank)
    M = build_weyl(L, args.level, weight, 2 * args.n)
    w = M.top_vector()
    cand = nullsolver.build_candidate(M, w, args.n, tie=args.tie)
    config = {
        "command": f"nullvec.{args.action}",
        "algebra": args.algebra,
        "level": args.level,
        "weight": list(weight),
        "n": args.n,
        "tie": args.tie,
    }
    if args.action == "solve":
        rep = nullsolver.solve(cand)
        out = rep.to_json()
        out["reference"] = REFERENCE_KAPPAS.get(args.algebra)
        _emit(_wrap(out, config, None, t0), args.json)
        return EXIT_OK if rep.status != "infeasible" else EXIT_REFUTED
    # verify at explicit kappa values
    values = {"kappa0": exactla.parse_frac(args.kappa0)}
    if cand.tie == "single-tau":
        if args.tau is None:
            raise CliError("verify with --tie single-tau needs --tau")
        values["tau"] = exactla.parse_frac(args.tau)
    else:
        if args.tau is not None:
            kr = [exactla.parse_frac(args.tau)] * len(M.table.entries)
        elif args.kappa:
            kr = [exactla.parse_frac(x) for x in args.kappa.split(",")]
            if len(kr) != len(M.table.entries):
                raise CliError(f"need {len(M.table.entries)} kappa values")
        else:
            raise CliError("verify needs --kappa p/q,p/q,... or --tau p/q")
        for i, v in enumerate(kr):
            values[f"kappa{i + 1}"] = v
    vec = cand.at(values)
    is_null, cert = nullsolver.verify_null(M, vec)
    out = {
        "schema": "wzwsle.verify@1",
        "null": is_null,
        "values": {k: exactla.frac_str(v) for k, v in values.items()},
        "certificate": cert,
    }
    config["values"] = out["values"]
    _emit(_wrap(out, config, None, t0), args.json)
    return EXIT_OK if is_null else EXIT_REFUTED


# ---- lattice ------------------------------------------------------------------


def cmd_lattice(args):
    t0 = time.time()
    _parse_algebra(args.algebra)
    conventions = lat.Cocycle.CONVENTIONS if args.cocycle == "both" else (args.cocycle,)
    reports = []
    for conv in conventions:
        reports.append(lat.verify_state_identities(args.algebra, cocycle=conv))
    ok = all(r["ok"] for r in reports)
    out = {"schema": "wzwsle.lattice_verify@1", "ok": ok, "reports": reports}
    config = {"command": "lattice.verify", "algebra": args.algebra, "cocycle": args.cocycle}
    if args.log:
        with open(args.log, "w") as fh:
            for r in reports:
                fh.write(lat.render_proof_log(r) + "\n")
    _emit(_wrap(out, config, None, t0), args.json)
    return EXIT_OK if ok else EXIT_REFUTED


# ---- sde ----------------------------------------------------------------------


def _resolve_kappas(args, n_alg):
    if args.kappa == "paper" or args.kappa == "reference":
        ref = REFERENCE_KAPPAS.get(f"sl{n_alg}")
        if ref is None:
            raise CliError(f"no reference kappas for sl{n_alg}")
        return Fraction(ref["kappa0"]), Fraction(ref["tau"])
    if args.kappa0 is None:
        raise CliError("need --kappa paper or explicit --kappa0 (+ --tau)")
    k0 = exactla.parse_frac(args.kappa0)
    tau = exactla.parse_frac(args.tau) if args.tau is not None else Fraction(1)
    return k0, tau


def cmd_sde_martingale(args):
    t0 = time.time()
    n_alg = _parse_algebra(args.algebra)
    seed = _seed(args)
    k0, tau = _resolve_kappas(args, n_alg)
    L = build_sl(n_alg)
    M = build_weyl(L, args.level, (0,) * L.rank, args.ddeg)
    rep = martingale_mc(
        M,
        args.n,
        {"kappa0": k0, "tau": tau},
        T=args.T,
        dt=args.dt,
        n_paths=args.paths,
        D_deg=args.ddeg,
        seed=seed,
    )
    config = dict(rep["config"])
    config["command"] = "sde.martingale"
    _emit(_wrap(rep, config, seed, t0), args.json)
    if rep["verdict"] == "martingale-consistent":
        return EXIT_OK
    if rep["verdict"] == "rejected":
        return EXIT_REFUTED
    return EXIT_INCONCLUSIVE


def cmd_sde_trace(args):
    t0 = time.time()
    n_alg = _parse_algebra(args.algebra)
    seed = _seed(args)
    k0, tau = _resolve_kappas(args, n_alg)
    L = build_sl(n_alg)
    ngen = L.dim
    kappas = [float(k0)] + [float(tau)] * ngen
    steps = int(round(args.T / args.dt))
    noise = NoisePath(seed, args.dt, steps, kappas)
    states, censored = run_f_theta(noise, args.n, float(k0), depth=args.depth, record=True)
    direct = integrate_g_direct(noise, args.n, depth=args.depth)
    b0 = np.concatenate([[0.0], np.cumsum(noise.increments[:, 0])])
    rows = []
    for i, st in enumerate(states):
        resid = float(np.max(np.abs(g_from_f(st, args.n, b0[i]) - direct[i])))
        rows.append((st.t, st.fc.copy(), st.theta.copy(), resid))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            wr = csv.writer(fh)
            header = (
                ["t"]
                + [f"f_c{k}" for k in range(args.depth + 1)]
                + [f"theta{r}_c{j}" for r in range(ngen) for j in range(args.depth + 1)]
                + ["g_residual"]
            )
            wr.writerow(header)
            for t, fc, th, resid in rows:
                wr.writerow(
                    [f"{t:.10g}"]
                    + [f"{x:.17g}" for x in fc]
                    + [f"{x:.17g}" for x in th.ravel()]
                    + [f"{resid:.17g}"]
                )
    report = {
        "schema": "wzwsle.trace@1",
        "steps": steps,
        "censored_at": censored,
        "final_residual": rows[-1][3],
        "max_residual": max(r[3] for r in rows),
    }
    if args.check_loewner:
        slope, dts, meds = strong_order_study(
            args.n, float(k0), args.T, exponents=range(8, 13), depth=args.depth, seed=seed
        )
        report["strong_order"] = {
            "slope": slope,
            "dts": [float(x) for x in dts],
            "median_residuals": [float(x) for x in meds],
        }
    if args.svg:
        _plot_trace(args, rows, b0, args.svg)
        report["svg"] = args.svg
    config = {
        "command": "sde.trace",
        "algebra": args.algebra,
        "n": args.n,
        "kappa0": exactla.frac_str(k0),
        "tau": exactla.frac_str(tau),
        "T": args.T,
        "dt": args.dt,
        "depth": args.depth,
    }
    _emit(_wrap(report, config, seed, t0), args.json)
    return EXIT_OK


def _plot_trace(args, rows, b0, path):
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        sys.stderr.write("matplotlib not installed; skipping SVG plot\n")
        return
    ts = [r[0] for r in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(ts, args.n * b0[: len(ts)], lw=0.8)
    ax1.set_ylabel(f"{args.n} B0_t")
    ax2.plot(ts, [r[1][0] for r in rows], label="a1")
    ax2.plot(ts, [r[1][1] for r in rows], label="a0")
    ax2.set_xlabel("t")
    ax2.set_ylabel("leading f coefficients")
    ax2.legend()
    fig.savefig(path, format="svg")
    plt.close(fig)


# ---- parser -------------------------------------------------------------------


def make_parser():
    p = Parser(prog="wzwsle", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="group", required=True)

    nv = sub.add_parser("nullvec", help="null-vector solving and verification")
    nvs = nv.add_subparsers(dest="action", required=True)
    for act in ("solve", "verify", "scan"):
        q = nvs.add_parser(act)
        if act != "scan":
            q.add_argument("--algebra", required=True)
            q.add_argument("--level", type=int, default=1)
            q.add_argument("--weight", default="0")
            q.add_argument("--n", type=int, default=2)
            q.add_argument("--tie", choices=("per-generator", "single-tau"), default="per-generator")
        else:
            q.add_argument("--algebra", default="sl2", help=argparse.SUPPRESS)
            q.add_argument("--ranks", default="2,3,4")
            q.add_argument("--n", type=int, default=2)
            q.add_argument("--tie", choices=("per-generator", "single-tau"), default="single-tau")
            q.add_argument("--checkpoint")
        if act == "verify":
            q.add_argument("--kappa0", required=True)
            q.add_argument("--kappa", help="comma-separated per-generator values")
            q.add_argument("--tau")
        q.add_argument("--json", help="write the report to this path")
        q.set_defaults(func=cmd_nullvec)

    lv = sub.add_parser("lattice", help="lattice vertex-operator identity checks")
    lvs = lv.add_subparsers(dest="action", required=True)
    q = lvs.add_parser("verify")
    q.add_argument("--algebra", required=True)
    q.add_argument("--cocycle", choices=("upper", "lower", "both"), default="both")
    q.add_argument("--json")
    q.add_argument("--log", help="write a human-readable proof log here")
    q.set_defaults(func=cmd_lattice)

    sd = sub.add_parser("sde", help="growth-process simulation")
    sds = sd.add_subparsers(dest="action", required=True)
    q = sds.add_parser("martingale")
    q.add_argument("--algebra", default="sl2")
    q.add_argument("--level", type=int, default=1)
    q.add_argument("--n", type=int, default=2)
    q.add_argument("--kappa", help='"paper" to use the known reference values')
    q.add_argument("--kappa0")
    q.add_argument("--tau")
    q.add_argument("--T", type=float, default=0.5)
    q.add_argument("--dt", type=float, default=1e-3)
    q.add_argument("--paths", type=int, default=10_000)
    q.add_argument("--ddeg", type=int, default=4)
    q.add_argument("--seed", type=int)
    q.add_argument("--json")
    q.set_defaults(func=cmd_sde_martingale)
    q = sds.add_parser("trace")
    q.add_argument("--algebra", default="sl2")
    q.add_argument("--n", type=int, default=2)
    q.add_argument("--kappa")
    q.add_argument("--kappa0", default="1")
    q.add_argument("--tau", default="1")
    q.add_argument("--T", type=float, default=0.5)
    q.add_argument("--dt", type=float, default=1e-3)
    q.add_argument("--depth", type=int, default=12)
    q.add_argument("--seed", type=int)
    q.add_argument("--csv")
    q.add_argument("--svg")
    q.add_argument("--json")
    q.add_argument("--check-loewner", action="store_true")
    q.set_defaults(func=cmd_sde_trace)
    return p


def main(argv=None):
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        code = args.func(args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
