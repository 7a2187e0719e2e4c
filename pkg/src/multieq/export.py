"""Plot-ready CSV and JSON output for reports and censuses."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .equilibria import Census
from .spectral import SpectralSummary


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n")


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def spectral_dict(s: SpectralSummary) -> dict:
    return {
        "eigs_A": s.eigs_A,
        "eigs_H1": s.eigs_H1,
        "rho_A": s.rho_A,
        "lambda2nd_A": s.lambda2nd_A,
        "lambda2nd_H1": s.lambda2nd_H1,
        "pi2": s.pi2,
        "alg_conn": s.alg_conn,
        "lambda2nd_simple": s.lambda2nd_simple,
    }


def census_summary(c: Census) -> dict:
    ratios = [r.norm_ratio for r in c if r.norm_ratio is not None]
    return {
        "pi": c.pi,
        "count": len(c),
        "orthants": c.orthant_count(),
        "stable": len(c.stable()),
        "mixed": len(c.mixed()),
        "max_norm_ratio": max(ratios) if ratios else None,
        "n_starts": c.n_starts,
        "n_failed": c.n_failed,
        "seed": c.seed,
    }


def pi_label(pi: float) -> str:
    return f"{pi:.6g}"


def write_census(out, c: Census) -> None:
    out = Path(out)
    label = pi_label(c.pi)
    write_json(out / f"census_pi_{label}.json", [r.to_dict() for r in c])
    n = len(c.x_plus)
    header = ["index", "orthant", "stability", "residual", "norm_ratio", "n_unstable"]
    header += [f"x{i + 1}" for i in range(n)] + [f"jac_re{i + 1}" for i in range(n)]
    rows = []
    for k, r in enumerate(c):
        rows.append(
            [k, r.orthant_string, r.stability, r.residual,
             "" if r.norm_ratio is None else r.norm_ratio, r.n_unstable,
             *r.x.tolist(), *r.jac_eigs_real.tolist()]
        )
    write_csv(out / f"census_pi_{label}.csv", header, rows)


def write_gersgorin(out, panels: dict) -> None:
    out = Path(out)
    for key, p in panels.items():
        write_csv(
            out / f"fig2_disks_{key}.csv",
            ["row_index", "center", "radius"],
            [[d.row_index, d.center, d.radius] for d in p["disks"]],
        )
        write_csv(
            out / f"fig2_eigs_{key}.csv",
            ["real", "imag"],
            [[z.real, z.imag] for z in p["eigs"]],
        )


def write_origin_eigs(out, curve: np.ndarray) -> None:
    n = curve.shape[1] - 1
    write_csv(Path(out) / "fig1b_eigs.csv", ["pi"] + [f"eig{i + 1}" for i in range(n)], curve.tolist())


def write_example1(out, rep: dict) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for c in rep["censuses"].values():
        write_census(out, c)
    write_gersgorin(out, rep["gersgorin"])
    write_origin_eigs(out, rep["origin_eigs"])
    ens = rep["ensemble"]
    n = rep["network"].n
    rows = []
    for k, o in enumerate(ens["outcomes"]):
        rec = None if o.attractor is None else ens["equilibria"][o.attractor]
        rows.append(
            [k, "" if o.attractor is None else o.attractor,
             "unresolved" if rec is None else rec.orthant_string,
             "" if rec is None else rec.stability, o.reason,
             *o.x0.tolist(), *o.terminal.tolist()]
        )
    write_csv(
        out / "fig1c_ensemble.csv",
        ["start", "attractor", "orthant", "stability", "reason"]
        + [f"x0_{i + 1}" for i in range(n)] + [f"xT_{i + 1}" for i in range(n)],
        rows,
    )
    v2, w2 = rep["fiedler"]
    summary = {
        "spectral": spectral_dict(rep["spectral"]),
        "thresholds": rep["thresholds"],
        "fiedler_v2": v2,
        "fiedler_w2": w2,
        "gersgorin_pi": rep["gersgorin_pi"],
        "gersgorin_max_outside": {k: p["max_outside"] for k, p in rep["gersgorin"].items()},
        "censuses": {pi_label(pi): census_summary(c) for pi, c in rep["censuses"].items()},
        "conditions": {pi_label(pi): v for pi, v in rep["conditions"].items()},
        "ensemble": {"pi": ens["pi"], "table": ens["table"]},
        "seed": rep["seed"],
    }
    write_json(out / "summary.json", summary)
    return summary


def write_sweep_files(out, sweep, polar=None) -> None:
    out = Path(out)
    write_csv(
        out / "fig3a_counts.csv",
        ["pi", "equilibria", "orthants", "stable", "mixed"],
        [[q.pi, q.n_equilibria, q.n_orthants, q.n_stable, q.n_mixed] for q in sweep.per_pi],
    )
    write_csv(
        out / "fig3b_ratios.csv",
        ["pi", "norm_ratio"],
        [[q.pi, r] for q in sweep.per_pi for r in q.norm_ratios],
    )
    if polar is None:
        polar = [
            (c.pi, r.norm_ratio, r.n_unstable, r.negative_fraction, r.stability)
            for c in sweep.censuses for r in c if r.norm_ratio is not None
        ]
    write_csv(
        out / "fig3c_polar.csv",
        ["pi", "norm_ratio", "n_positive_eigs", "negative_fraction", "stability"],
        polar,
    )
    if sweep.per_pi:
        curve = np.column_stack([sweep.pi_values, np.array([q.origin_eigs for q in sweep.per_pi])])
        write_origin_eigs(out, curve)
    for c in sweep.censuses:
        write_census(out, c)


def write_example2(out, rep: dict) -> dict:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    write_sweep_files(out, rep["sweep"], rep["polar"])
    np.savetxt(out / "network.csv", rep["network"].A, delimiter=",", fmt="%.17g")
    summary = {
        "spectral": spectral_dict(rep["spectral"]),
        "thresholds": rep["thresholds"],
        "params": rep["params"],
        "counts": rep["counts"],
        "checks_all_pass": all(
            all(v for k, v in ch.items() if k != "max_residual" and v is not None)
            for ch in rep["checks"]
        ),
        "seed": rep["seed"],
    }
    write_json(out / "summary.json", summary)
    return summary
