"""Command-line interface: ``multieq <command> [options]``.

Exit codes: 0 success, 1 I/O or input-format error, 2 model violation,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import export
from .dynamics import SystemInstance, ensemble_run, integrate_batch, uniform_box
from .equilibria import multistart_census
from .errors import ModelError, NumericalError
from .network import load_network, read_matrix
from .nonlinearity import builtin, verify_assumptions
from .spectral import spectral_summary
from .sweep import example1_report, example2_report, gersgorin_panels, pi_sweep

EXIT_OK, EXIT_IO, EXIT_MODEL, EXIT_NUMERIC = 0, 1, 2, 3


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:count`` -> ``count`` evenly spaced values in ``(lo, hi]``
    (``lo`` is excluded so that grids may start at a threshold)."""
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:count, got {text!r}") from None
    if count < 0 or hi <= lo:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return np.linspace(lo, hi, count + 1)[1:]


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="adjacency matrix (CSV or JSON)")
    common.add_argument("--psi", choices=["boltzmann", "mm", "cubic-tanh"])
    common.add_argument("--pi", type=float)
    common.add_argument("--pi-grid", type=str, help="lo:hi:count, values in (lo, hi]")
    common.add_argument("--starts", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--out", type=str)
    common.add_argument("--threads", type=int, help="default: number of CPUs")
    common.add_argument("--tol-newton", type=float)
    common.add_argument("--config", type=str, help="config.json of a previous run")

    p = argparse.ArgumentParser(prog="multieq", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="validate a network and report its spectrum")
    a.add_argument("path", nargs="?")
    e = sub.add_parser("equilibria", parents=[common], help="multistart census at one pi")
    e.add_argument("path", nargs="?")
    s = sub.add_parser("sweep", parents=[common], help="census over a pi grid")
    s.add_argument("path", nargs="?")
    m = sub.add_parser("simulate", parents=[common], help="random-start trajectories at one pi")
    m.add_argument("path", nargs="?")
    m.add_argument("--t-max", type=float)
    m.add_argument("--box", type=float, help="starts uniform in [-box, box]^n")
    m.add_argument("--traj-stride", type=int)
    sub.add_parser("example1", parents=[common], help="six-node network report")
    x = sub.add_parser("example2", parents=[common], help="random 20-node network report")
    x.add_argument("--n", type=int)
    x.add_argument("--p", type=float)
    x.add_argument("--paper-scale", action="store_true", default=None, help="10^4 starts x 500 pi values")
    return p


DEFAULTS = {
    "analyze": {"out": "results/analyze"},
    "equilibria": {"starts": 1000, "out": "results/equilibria"},
    "sweep": {"starts": 1000, "pi_grid": "1:5:50", "out": "results/sweep"},
    "simulate": {"starts": 100, "t_max": 1000.0, "box": 2.0, "traj_stride": 500,
                 "out": "results/simulate"},
    "example1": {"starts": 1000, "pi": 1.838, "out": "results/example1"},
    "example2": {"starts": 1000, "pi_grid": "1:20:50", "n": 20, "p": 0.1,
                 "out": "results/example2"},
}
COMMON_DEFAULTS = {"psi": "boltzmann", "threads": os.cpu_count() or 1}


def _resolve(args) -> dict:
    """Effective configuration: command line > --config file > defaults."""
    cfg = {**COMMON_DEFAULTS, **DEFAULTS[args.command]}
    if args.config:
        cfg.update(json.loads(Path(args.config).read_text()))
    for k, v in vars(args).items():
        if k in ("config",) or v is None:
            continue
        cfg[k] = v
    if cfg.get("path") and not cfg.get("input"):
        cfg["input"] = cfg["path"]
    cfg.pop("path", None)
    if cfg.get("seed") is None:
        env = os.environ.get("MULTIEQ_SEED")
        cfg["seed"] = int(env) if env else 0
    if cfg.get("paper_scale"):
        cfg["starts"] = 10_000
        cfg["pi_grid"] = "1:20:500"
    if cfg.get("tol_newton") is not None and not cfg["tol_newton"] > 0:
        raise ValueError("--tol-newton must be positive")
    cfg["command"] = args.command
    return cfg


def _load(cfg):
    if not cfg.get("input"):
        raise ValueError("an input matrix is required (positional path or --input)")
    return load_network(read_matrix(cfg["input"]))


def _summary_table(c) -> str:
    s = export.census_summary(c)
    ratio = "-" if s["max_norm_ratio"] is None else f"{s['max_norm_ratio']:.4f}"
    lines = [
        f"pi = {c.pi:g}",
        f"{'equilibria':>12} {'orthants':>9} {'stable':>7} {'max |x|/|x+|':>13}",
        f"{s['count']:>12} {s['orthants']:>9} {s['stable']:>7} {ratio:>13}",
    ]
    return "\n".join(lines)


def cmd_analyze(cfg, out: Path) -> int:
    net = _load(cfg)
    psi = builtin(cfg["psi"])
    rep = verify_assumptions(psi)
    s = spectral_summary(net)
    export.write_json(out / "validation.json", {
        "valid": True,
        "n": net.n,
        "symmetrizer": net.symmetrizer,
        "symmetrizer_residual": net.symmetrizer_residual,
        "symmetrizer_exact": net.symmetrizer_exact,
        "delta": net.delta,
        "psi": psi.kind,
        "psi_assumptions": rep.violations,
        "psi_sigmoidal": psi.is_sigmoidal,
        "psi_mu": psi.mu,
    })
    pi = cfg.get("pi")
    if pi is None:
        pi = 1.5 * s.pi2 if np.isfinite(s.pi2) else 2.0
    panels = gersgorin_panels(net, pi)
    export.write_gersgorin(out, panels)
    export.write_json(out / "summary.json", {
        **export.spectral_dict(s),
        "gersgorin_pi": pi,
        "gersgorin_max_outside": {k: p["max_outside"] for k, p in panels.items()},
    })
    print(f"rho(A) = {s.rho_A:.4f}  lambda_(n-1)(A) = {s.lambda2nd_A:.4f}")
    print(f"lambda_(n-1)(H1) = {s.lambda2nd_H1:.4f}  pi2 = {s.pi2:.4f}  "
          f"algebraic connectivity = {s.alg_conn:.4f}  simple = {s.lambda2nd_simple}")
    return EXIT_OK


def cmd_equilibria(cfg, out: Path) -> int:
    if cfg.get("pi") is None:
        raise ValueError("--pi is required")
    net = _load(cfg)
    sys_ = SystemInstance(net, builtin(cfg["psi"]), cfg["pi"])
    c = multistart_census(sys_, cfg["starts"], seed=cfg["seed"], threads=cfg.get("threads", 1),
                          tol=cfg.get("tol_newton"))
    if not any(r.is_origin for r in c):
        raise NumericalError("census lost the origin")
    export.write_census(out, c)
    export.write_json(out / "summary.json", export.census_summary(c))
    print(_summary_table(c))
    return EXIT_OK


def cmd_sweep(cfg, out: Path) -> int:
    net = _load(cfg)
    grid = parse_grid(cfg["pi_grid"])
    sw = pi_sweep(net, builtin(cfg["psi"]), grid, cfg["starts"], seed=cfg["seed"],
                  threads=cfg.get("threads", 1))
    export.write_sweep_files(out, sw)
    export.write_json(out / "summary.json", {
        "pi1": sw.pi1, "pi2": sw.pi2, "first_mixed_pi": sw.first_mixed_pi(),
        "counts": [[q.pi, q.n_equilibria, q.n_orthants] for q in sw.per_pi],
    })
    for q in sw.per_pi:
        print(f"pi = {q.pi:8.4f}  equilibria = {q.n_equilibria:5d}  orthants = {q.n_orthants:5d}")
    return EXIT_OK


def cmd_simulate(cfg, out: Path) -> int:
    if cfg.get("pi") is None:
        raise ValueError("--pi is required")
    net = _load(cfg)
    sys_ = SystemInstance(net, builtin(cfg["psi"]), cfg["pi"])
    eqs = multistart_census(sys_, 1000, seed=cfg["seed"]).records
    outcomes = ensemble_run(sys_, cfg["starts"], eqs, uniform_box(cfg["box"]),
                            seed=cfg["seed"], t_max=cfg["t_max"])
    n = net.n
    export.write_csv(
        out / "attractors.csv",
        ["index", "orthant", "stability"] + [f"x{i + 1}" for i in range(n)],
        [[k, r.orthant_string, r.stability, *r.x.tolist()] for k, r in enumerate(eqs)],
    )
    export.write_csv(
        out / "ensemble.csv",
        ["start", "attractor", "reason"] + [f"x0_{i + 1}" for i in range(n)]
        + [f"xT_{i + 1}" for i in range(n)],
        [[k, "" if o.attractor is None else o.attractor, o.reason, *o.x0.tolist(),
          *o.terminal.tolist()] for k, o in enumerate(outcomes)],
    )
    if outcomes:
        X0 = np.array([o.x0 for o in outcomes])
        times, states, _ = integrate_batch(sys_, X0, t_max=cfg["t_max"], stride=cfg["traj_stride"])
        rows = [[k, t, *states[j, k].tolist()] for k in range(len(X0)) for j, t in enumerate(times)]
        export.write_csv(out / "trajectories.csv", ["start", "t"] + [f"x{i + 1}" for i in range(n)], rows)
    table = {}
    for o in outcomes:
        key = "unresolved" if o.attractor is None else str(o.attractor)
        table[key] = table.get(key, 0) + 1
    export.write_json(out / "summary.json", {"pi": cfg["pi"], "table": table,
                                             "n_equilibria": len(eqs)})
    for k, v in sorted(table.items()):
        label = k if k == "unresolved" else f"{eqs[int(k)].orthant_string} ({eqs[int(k)].stability})"
        print(f"{label:>24}: {v}")
    return EXIT_OK


def cmd_example1(cfg, out: Path) -> int:
    pi = cfg.get("pi", 1.838)
    rep = example1_report(pi_list=(0.5, 1.1, pi), starts=cfg["starts"], seed=cfg["seed"],
                          ensemble_pi=pi, psi=builtin(cfg["psi"]), threads=cfg.get("threads", 1))
    summary = export.write_example1(out, rep)
    s = summary["spectral"]
    print(f"rho(A) = {s['rho_A']:.3f}  lambda_5(A) = {s['lambda2nd_A']:.3f}  "
          f"lambda_5(H1) = {s['lambda2nd_H1']:.3f}  pi2 = {s['pi2']:.3f}")
    for label, c in summary["censuses"].items():
        print(f"pi = {label}: {c['count']} equilibria, {c['stable']} stable")
    print("trajectories:", summary["ensemble"]["table"])
    return EXIT_OK


def cmd_example2(cfg, out: Path) -> int:
    grid = parse_grid(cfg["pi_grid"])
    rep = example2_report(n=cfg.get("n", 20), p=cfg.get("p", 0.1), pi_grid=grid,
                          starts=cfg["starts"], seed=cfg["seed"], psi=builtin(cfg["psi"]),
                          threads=cfg.get("threads", 1))
    summary = export.write_example2(out, rep)
    print(f"pi2 = {summary['spectral']['pi2']:.4f}")
    for row in rep["counts"]:
        print(f"pi = {row[0]:8.4f}  equilibria = {int(row[1]):5d}  orthants = {int(row[2]):5d}")
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "equilibria": cmd_equilibria,
    "sweep": cmd_sweep,
    "simulate": cmd_simulate,
    "example1": cmd_example1,
    "example2": cmd_example2,
}


def _error_json(out: Path, exc: Exception, kind: str) -> None:
    err = {"error": type(exc).__name__, "kind": kind, "message": str(exc)}
    if hasattr(exc, "indices"):
        err["indices"] = exc.indices
    try:
        out.mkdir(parents=True, exist_ok=True)
        export.write_json(out / "error.json", err)
    except OSError:
        pass
    print(json.dumps(export._plain(err)), file=sys.stderr)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    out = Path(args.out or DEFAULTS[args.command]["out"])
    try:
        cfg = _resolve(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        export.write_json(out / "config.json", cfg)
        return COMMANDS[args.command](cfg, out)
    except ModelError as exc:
        _error_json(out, exc, "model")
        return EXIT_MODEL
    except NumericalError as exc:
        _error_json(out, exc, "numerical")
        return EXIT_NUMERIC
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        _error_json(out, exc, "io")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
