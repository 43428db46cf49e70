"""Reproducible experiment campaigns.

One subcommand per verification campaign; every run is seeded (defaults are
fixed constants, never the clock), writes a machine-readable result table
(csv or json) plus a manifest with per-check pass/fail, and exits 0 on
pass, 1 on a numerical failure, 2 on a usage error.

Flag values resolve as: command line > environment (GINLAB_<FLAG>) >
built-in default.
"""

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__, heat, kernel, stationary_phase
from ._rng import stream
from .group_integrals import (
    exact_shape,
    fit_shape_constant,
    integral_mc_grid,
    integral_quadrature_k2,
)
from .pfaffian import pfaffian, pfaffian_matchings
from .sampler import (
    BULK_DILATION,
    ENTRY_VARIANCE,
    duality_check,
    estimate_signed_density,
    estimate_spin_moments,
)

DEFAULT_SEED = 20240901
CAMPAIGNS = (
    "pfaffian-selftest",
    "kernel-table",
    "mc-spins",
    "mc-density",
    "lemma1",
    "matrix-integral",
    "stationary-phase",
    "heat-check",
)


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float
    passed: bool


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_results(path: str, fmt: str, campaign: str, columns, rows) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        buf.write(f"# ginlab {campaign} results v1\n")
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
        data = buf.getvalue()
    elif fmt == "json":
        data = json.dumps(
            {
                "campaign": campaign,
                "version": 1,
                "columns": list(columns),
                "rows": [dict(zip(columns, [_fmt(v) for v in row])) for row in rows],
            },
            indent=1,
            sort_keys=True,
        ) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w") as fh:
        fh.write(data)


def write_manifest(path: str, config: dict, checks, wall_time: float) -> None:
    manifest = {
        "artifact_version": __version__,
        "config": config,
        "wall_time_s": wall_time,
        "conventions": {
            "entry_variance": ENTRY_VARIANCE,
            "bulk_dilation": BULK_DILATION,
            "density_calibration": kernel.DENSITY_CALIBRATION,
        },
        "checks": [
            {
                "name": c.name,
                "measured": c.measured,
                "tolerance": c.tolerance,
                "passed": bool(c.passed),
            }
            for c in checks
        ],
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _parse_floats(text: str):
    try:
        return tuple(float(p) for p in text.split(",") if p != "")
    except ValueError as exc:
        raise UsageError(f"could not parse float list {text!r}") from exc


def _parse_bins(text: str) -> np.ndarray:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"bin spec must be lo:hi:count, got {text!r}")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1 or hi <= lo:
            raise UsageError(f"degenerate bin spec {text!r}")
        return np.linspace(lo, hi, count + 1)
    edges = np.asarray(_parse_floats(text))
    if len(edges) < 2:
        raise UsageError(f"need at least two bin edges, got {text!r}")
    return edges


class UsageError(ValueError):
    pass


def _resolve(value, env_name: str, default, cast):
    if value is not None:
        return value
    env = os.environ.get(env_name)
    if env is not None:
        try:
            return cast(env)
        except (ValueError, UsageError) as exc:
            raise UsageError(f"bad {env_name}={env!r}: {exc}") from exc
    return default


# ---------------------------------------------------------------- campaigns


def run_pfaffian_selftest(cfg):
    rng = stream(cfg["seed"], 0)
    columns = ("dim", "trial", "pf_sq_vs_det_rel", "matchings_rel")
    rows = []
    worst_det = 0.0
    worst_match = 0.0
    for dim in range(2, 13, 2):
        for trial in range(4):
            a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            a = a - a.T
            pf = pfaffian(a)
            det = np.linalg.det(a)
            rel_det = abs(pf * pf - det) / max(abs(det), 1e-300)
            rel_match = abs(pf - pfaffian_matchings(a)) / max(abs(pf), 1e-300)
            worst_det = max(worst_det, rel_det)
            worst_match = max(worst_match, rel_match)
            rows.append((dim, trial, rel_det, rel_match))
    checks = [
        Check("pfaffian_square_equals_det", worst_det, 1e-10, worst_det < 1e-10),
        Check("tridiagonal_equals_matchings", worst_match, 1e-10, worst_match < 1e-10),
    ]
    return columns, rows, checks


def run_kernel_table(cfg):
    zs = cfg["points"] or tuple(np.linspace(0.0, 3.0, 13))
    columns = (
        "z",
        "gauss_tail",
        "gauss_tail_d1",
        "gauss_tail_d2",
        "pair_correlation",
        "pair_signed_density",
        "pair_spin_moment",
    )
    rows = []
    for z in zs:
        pair = (0.0, float(z)) if z != 0 else None
        rows.append(
            (
                float(z),
                kernel.gauss_tail(float(z)),
                kernel.gauss_tail_d1(float(z)),
                kernel.gauss_tail_d2(float(z)),
                kernel.correlation(pair) if pair else kernel.correlation((0.0,)),
                kernel.signed_density(pair) if pair else 0.0,
                kernel.spin_correlation((0.0, float(z))),
            )
        )
    rho0 = kernel.correlation((0.0,))
    checks = [
        Check("gauss_tail_at_zero", kernel.gauss_tail(0.0), 0.0, kernel.gauss_tail(0.0) == 0.5),
        Check("one_point_correlation", rho0, 0.0, rho0 == 1.0 / np.sqrt(np.pi)),
        Check(
            "coincident_spin_moment",
            kernel.spin_correlation((0.3, 0.3)),
            0.0,
            kernel.spin_correlation((0.3, 0.3)) == 1.0,
        ),
    ]
    return columns, rows, checks


def run_mc_spins(cfg):
    pts = cfg["points"] or (0.0, 0.5)
    ests = estimate_spin_moments(cfg["n"], [pts], cfg["samples"], cfg["seed"])
    est = ests[0]
    closed = kernel.spin_correlation(pts)
    z = abs(est.mean - closed) / est.stderr if est.stderr else 0.0
    columns = ("points", "mean", "stderr", "closed_form", "zscore")
    rows = [(";".join(_fmt(p) for p in pts), est.mean, est.stderr, closed, z)]
    checks = [Check("spin_moment_within_3_stderr", z, 3.0, z < 3.0)]
    return columns, rows, checks


def _bin_averaged_signed_density(lo1, hi1, lo2, hi2, nodes: int = 5) -> float:
    u, w = np.polynomial.legendre.leggauss(nodes)
    x1 = 0.5 * (hi1 - lo1) * u + 0.5 * (hi1 + lo1)
    x2 = 0.5 * (hi2 - lo2) * u + 0.5 * (hi2 + lo2)
    total = 0.0
    for a, wa in zip(x1, w):
        for b, wb in zip(x2, w):
            total += wa * wb * kernel.signed_density((a, b))
    return total * 0.25


def run_mc_density(cfg):
    edges = cfg["bins"] if cfg["bins"] is not None else np.linspace(-0.75, 0.75, 5)
    dens = estimate_signed_density(cfg["n"], edges, 2, cfg["samples"], cfg["seed"])
    columns = ("lo1", "hi1", "lo2", "hi2", "estimate", "stderr", "closed_form", "zscore")
    rows = []
    worst = 0.0
    m = len(dens.intervals)
    # the raw cell measure is swap-symmetric; the closed form is its value
    # on ordered products, so compare cells with interval_i left of interval_j
    for i in range(m):
        for j in range(i + 1, m):
            closed = kernel.DENSITY_CALIBRATION * _bin_averaged_signed_density(
                *dens.intervals[i], *dens.intervals[j]
            )
            est = dens.values[i, j]
            se = dens.stderr[i, j]
            z = abs(est - closed) / se if se > 0 else 0.0
            worst = max(worst, z)
            rows.append((*dens.intervals[i], *dens.intervals[j], est, se, closed, z))
    checks = [Check("signed_density_within_3_stderr", worst, 3.0, worst < 3.0)]
    return columns, rows, checks


def run_lemma1(cfg):
    if cfg["points"]:
        configs = [cfg["points"]]
    else:
        configs = [(-0.4, 0.4), (-0.2, 0.6), (0.1, 0.8)]
    reports = [
        duality_check(cfg["n"], c, cfg["samples"], cfg["seed"] + 97 * i)
        for i, c in enumerate(configs)
    ]
    columns = ("x1", "x2", "lhs", "lhs_stderr", "rhs", "ratio", "ratio_stderr")
    rows = [
        (r.points[0], r.points[1], r.lhs, r.lhs_stderr, r.rhs, r.ratio, r.ratio_stderr)
        for r in reports
    ]
    worst = 0.0
    for i in range(len(reports)):
        for j in range(i + 1, len(reports)):
            a, b = reports[i], reports[j]
            z = abs(a.ratio - b.ratio) / np.hypot(a.ratio_stderr, b.ratio_stderr)
            worst = max(worst, z)
    checks = [Check("duality_ratio_constant", worst, 3.0, worst < 3.0)]
    return columns, rows, checks


def run_matrix_integral(cfg):
    k = cfg["k"] or 2
    ts = cfg["t_grid"] or (0.5, 0.8, 1.0, 1.5, 2.5)
    columns = ("k", "points", "t", "value", "stderr", "exact_shape", "fitted_constant")
    if k == 2:
        base = cfg["points"] or (-0.5, 0.7)
        configs = [tuple(np.asarray(base) * s) for s in (1.0, 0.8, 1.2, 0.6, 1.5)]
        values = [[integral_quadrature_k2(*c, t) for t in ts] for c in configs]
        tol = 1e-6
    elif k == 4:
        base = cfg["points"] or (-0.9, -0.3, 0.3, 0.9)
        configs = [tuple(np.asarray(base) * s) for s in (1.0, 0.75, 1.25)]
        values = integral_mc_grid(configs, ts, cfg["samples"], cfg["seed"])
        tol = 0.02
    else:
        raise UsageError(f"matrix-integral supports k=2 or k=4, got {k}")
    rows_fit, spread = fit_shape_constant(values, configs, ts)
    rows = [
        (
            k,
            ";".join(_fmt(p) for p in r.points),
            r.t,
            r.value,
            r.stderr,
            r.shape,
            r.fitted_constant,
        )
        for r in rows_fit
    ]
    checks = [Check("fitted_constant_spread", spread, tol, spread < tol)]
    return columns, rows, checks


def run_stationary_phase(cfg):
    pts = cfg["points"] or (0.3, 0.9, 1.6, 2.4)
    ts = cfg["t_grid"] or (1.0,)
    columns = (
        "matching",
        "critical_value",
        "inversions",
        "signature",
        "sqrt_abs_hessian_det",
        "measured_log2_prefactor",
    )
    rows = []
    sig_ok = True
    kk = len(pts) // 2
    for datum in stationary_phase.critical_data(pts):
        rep = stationary_phase.vandermonde_ratio_report(datum.matching, pts)
        rows.append(
            (
                str(datum.matching),
                datum.critical_value,
                datum.inversions,
                datum.signature,
                rep["sqrt_abs_hessian_det"],
                rep["measured_log2_prefactor"],
            )
        )
        if datum.signature != 4 * datum.inversions - 2 * kk * (kk - 1):
            sig_ok = False
    worst = 0.0
    for t in ts:
        lhs = stationary_phase.matchings_phase_sum(pts, t)
        rhs = stationary_phase.phase_pfaffian_ratio(pts, t)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    maxm = stationary_phase.find_max_matching(pts)
    is_consecutive = maxm.pairs == tuple((2 * i + 1, 2 * i + 2) for i in range(kk))
    checks = [
        Check("signature_identity", 0.0 if sig_ok else 1.0, 0.0, sig_ok),
        Check("phase_sum_equals_pfaffian", worst, 1e-12, worst < 1e-12),
        Check("max_matching_consecutive", 0.0 if is_consecutive else 1.0, 0.0, is_consecutive),
    ]
    return columns, rows, checks


def run_heat_check(cfg):
    pts = cfg["points"] or (-0.35, 0.55)
    ts = cfg["t_grid"] or (0.1, 0.05, 0.025)
    order_pf = heat.residual_order(heat.signed_density_t, pts, 1.0, 1e-3)

    def integral_form(x, t):
        from .group_integrals import vandermonde

        return t ** (-1.5) * vandermonde(x) * integral_quadrature_k2(x[0], x[1], t)

    order_int = heat.residual_order(integral_form, pts, 1.0, 1e-3)

    def odd_fn(x1, x2):
        return (x2 - x1) * np.exp(-x1 * x1 - x2 * x2)

    def even_fn(x1, x2):
        return (x2 - x1) ** 2 * np.exp(-x1 * x1 - x2 * x2)

    rep_odd = heat.initial_condition_check(odd_fn, ts)
    rep_even = heat.initial_condition_check(even_fn, ts)
    columns = ("test_fn", "t", "pairing", "extrapolated_limit")
    rows = [("odd", r.t, r.pairing, rep_odd.extrapolated) for r in rep_odd.rows] + [
        ("even", r.t, r.pairing, rep_even.extrapolated) for r in rep_even.rows
    ]
    rel_err = rep_odd.error / abs(rep_odd.target)
    checks = [
        Check("residual_order_density", order_pf, 1.9, order_pf >= 1.9),
        Check("residual_order_integral", order_int, 1.9, order_int >= 1.9),
        Check("odd_pairing_matches_target", rel_err, 0.02, rel_err < 0.02),
        Check("even_pairing_vanishes", abs(rep_even.extrapolated), 1e-6, abs(rep_even.extrapolated) < 1e-6),
    ]
    return columns, rows, checks


RUNNERS = {
    "pfaffian-selftest": run_pfaffian_selftest,
    "kernel-table": run_kernel_table,
    "mc-spins": run_mc_spins,
    "mc-density": run_mc_density,
    "lemma1": run_lemma1,
    "matrix-integral": run_matrix_integral,
    "stationary-phase": run_stationary_phase,
    "heat-check": run_heat_check,
}

DEFAULT_SAMPLES = {
    "mc-spins": 1000,
    "mc-density": 4000,
    "lemma1": 20000,
    "matrix-integral": 200000,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ginlab",
        description="Seeded verification campaigns for real-eigenvalue statistics.",
        epilog=(
            "Flags resolve as: command line > GINLAB_<FLAG> environment "
            "variable > default.  Exit codes: 0 pass, 1 numerical failure, "
            "2 usage error."
        ),
    )
    sub = parser.add_subparsers(dest="campaign", required=True)
    for name in CAMPAIGNS:
        p = sub.add_parser(name, help=f"run the {name} campaign")
        p.add_argument("--seed", type=int, default=None, help="RNG seed (fixed default)")
        p.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count")
        p.add_argument("--n", type=int, default=None, help="matrix size")
        p.add_argument("--k", type=int, default=None, help="point count / integral size")
        p.add_argument("--points", type=str, default=None, help="comma-separated positions")
        p.add_argument("--t-grid", type=str, default=None, help="comma-separated times")
        p.add_argument("--bins", type=str, default=None, help="bin edges e1,e2,... or lo:hi:count")
        p.add_argument("--out", type=str, default=None, help="result file path")
        p.add_argument("--format", type=str, default=None, choices=("csv", "json"))
    return parser


def resolve_config(args) -> dict:
    fmt = _resolve(args.format, "GINLAB_FORMAT", "csv", str)
    if fmt not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {fmt!r}")
    cfg = {
        "campaign": args.campaign,
        "seed": _resolve(args.seed, "GINLAB_SEED", DEFAULT_SEED, int),
        "samples": _resolve(
            args.samples, "GINLAB_SAMPLES", DEFAULT_SAMPLES.get(args.campaign, 1000), int
        ),
        "n": _resolve(args.n, "GINLAB_N", 100 if args.campaign == "mc-spins" else 10, int),
        "k": _resolve(args.k, "GINLAB_K", None, int),
        "points": _resolve(args.points, "GINLAB_POINTS", None, str),
        "t_grid": _resolve(args.t_grid, "GINLAB_T_GRID", None, str),
        "bins": _resolve(args.bins, "GINLAB_BINS", None, str),
        "out": _resolve(args.out, "GINLAB_OUT", f"{args.campaign}.{fmt}", str),
        "format": fmt,
    }
    if isinstance(cfg["points"], str):
        cfg["points"] = _parse_floats(cfg["points"])
    if isinstance(cfg["t_grid"], str):
        cfg["t_grid"] = _parse_floats(cfg["t_grid"])
    if isinstance(cfg["bins"], str):
        cfg["bins"] = _parse_bins(cfg["bins"])
    if cfg["samples"] < 1:
        raise UsageError("samples must be >= 1")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        start = time.monotonic()
        columns, rows, checks = RUNNERS[args.campaign](cfg)
        wall = time.monotonic() - start
        write_results(cfg["out"], cfg["format"], args.campaign, columns, rows)
        echo = {
            k: (list(v) if isinstance(v, (tuple, np.ndarray)) else v)
            for k, v in cfg.items()
        }
        write_manifest(cfg["out"] + ".manifest.json", echo, checks, wall)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    failed = [c for c in checks if not c.passed]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: measured {c.measured:.6g} (tolerance {c.tolerance:.6g})")
    if failed:
        print(f"{len(failed)} check(s) failed", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
