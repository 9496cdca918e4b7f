"""Batch experiment runner.

Subcommands wire the library into reproducible CSV tables:

* analytic   -- closed-form per-role rates of one cluster
* simulate   -- Monte-Carlo per-role rates with standard errors
* cluster    -- print a clustering or pairing plan for one seeded drop
* optimize   -- run the projected-gradient surface design
* sweep      -- the named figure experiments (rates-vs-snr, sic-ablation,
                si-ablation, cluster-vs-pair, rates-vs-N, custom)

Every table is a function of (config, seed, trials) only; rows are sorted
before writing so repeated runs are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import replace

import numpy as np

from .channel import StarRisState
from .clustering import cluster_users, pair_users
from .comparison import (
    cluster_power_policy,
    pair_power_policy,
    pair_rate_sums,
    simulate_pair_sums,
)
from .config import SystemConfig, baseline_config, default_power_allocation, load_config
from .design import PgamSettings, aligned_state, default_initial_state, pgam_optimize
from .geometry import sample_layout
from .rates import ROLES, rate_report
from .simulator import SimPlan, simulate, simulate_clusters

EXPERIMENTS = ("rates-vs-snr", "sic-ablation", "si-ablation", "cluster-vs-pair", "rates-vs-N", "custom")
CSV_COLUMNS = ("sweep_var", "value", "role", "method", "rate", "stderr", "seed")
DEFAULT_SNR_GRID = (0.0, 10.0, 20.0, 30.0, 40.0, 50.0)
DEFAULT_N_GRID = (4, 16, 36, 64)


def _load(args) -> SystemConfig:
    return load_config(args.config) if args.config else baseline_config()


def _pick_state(cfg: SystemConfig, kind: str, seed: int) -> StarRisState:
    if kind == "random":
        return StarRisState.random(cfg.N, np.random.default_rng(seed))
    if kind == "aligned":
        return aligned_state(cfg)
    if kind == "uniform":
        return StarRisState.uniform(cfg.N)
    raise ValueError(f"unknown state kind {kind!r}")


def _write_rows(rows, out_path):
    rows = sorted(rows, key=lambda r: tuple(str(r[c]) for c in CSV_COLUMNS))
    stream = open(out_path, "w", encoding="utf-8", newline="") if out_path else sys.stdout
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([repr(float(row[c])) if isinstance(row[c], float) else row[c] for c in CSV_COLUMNS])
    finally:
        if out_path:
            stream.close()


def _report_rows(report, sweep_var, value, seed):
    rows = []
    for role in ROLES:
        rows.append({
            "sweep_var": sweep_var, "value": value, "role": role,
            "method": report.method, "rate": float(report.rates[role]),
            "stderr": float(report.stderr[role]) if report.stderr else "",
            "seed": seed,
        })
    return rows


def validate_table(path: str) -> None:
    """Schema check of an emitted CSV: column names, no missing cells, numeric rates."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"bad header: {header}")
        for i, row in enumerate(reader):
            if len(row) != len(CSV_COLUMNS):
                raise ValueError(f"row {i}: wrong cell count")
            if any(cell == "" for cell in row[:5]):
                raise ValueError(f"row {i}: missing cell")
            float(row[4])  # rate parses
            if row[5] != "":
                float(row[5])


# -- experiments --------------------------------------------------------------


def _point_rows(cfg, state, seed, trials, sweep_var, value, cluster=1):
    power = default_power_allocation(cfg)
    ana = rate_report(cfg, power, state, cluster=cluster)
    sim = simulate(SimPlan(cfg=cfg, power=power, state=state, trials=trials, seed=seed, cluster=cluster))
    return _report_rows(ana, sweep_var, value, seed) + _report_rows(sim, sweep_var, value, seed)


def experiment_rates_vs_snr(cfg, seed, trials, grid=DEFAULT_SNR_GRID):
    state = _pick_state(cfg, "random", seed)
    rows = []
    for snr in grid:
        rows += _point_rows(cfg.with_snr(snr), state, seed, trials, "snr_db", snr)
    return rows


def experiment_sic_ablation(cfg, seed, trials, grid=DEFAULT_SNR_GRID, xis=(0.0, 0.1)):
    state = _pick_state(cfg, "random", seed)
    rows = []
    for xi in xis:
        for snr in grid:
            point = cfg.with_snr(snr)
            point = replace(point, xi_sic=xi)
            for row in _point_rows(point, state, seed, trials, "snr_db", snr):
                row["role"] = f"{row['role']}[xi={xi:g}]"
                rows.append(row)
    return rows


def experiment_si_ablation(cfg, seed, trials, grid=DEFAULT_SNR_GRID, si=((0.001, 0.1), (1.0, 0.4))):
    state = _pick_state(cfg, "random", seed)
    rows = []
    for beta, lam in si:
        for snr in grid:
            point = replace(cfg.with_snr(snr), beta_si=beta, lambda_si=lam)
            for row in _point_rows(point, state, seed, trials, "snr_db", snr):
                row["role"] = f"{row['role']}[beta={beta:g},lambda={lam:g}]"
                rows.append(row)
    return rows


def experiment_rates_vs_N(cfg, seed, trials, grid=DEFAULT_N_GRID, snr_db=40.0):
    rows = []
    for n in grid:
        point = replace(cfg.with_snr(snr_db), N=int(n))
        state = aligned_state(point)
        rows += _point_rows(point, state, seed, trials, "N", int(n))
    return rows


def experiment_cluster_vs_pair(
    cfg, seed, trials, grid=DEFAULT_SNR_GRID, xis=(0.0, 0.1),
    dl_edge_targets=None, ul_edge_targets=None,
):
    state = _pick_state(cfg, "random", seed)
    rows = []
    for xi in xis:
        for snr in grid:
            point = replace(cfg.with_snr(snr), xi_sic=xi)
            cl_pow = cluster_power_policy(point, state, dl_edge_targets, ul_edge_targets)
            pr_pow = pair_power_policy(point, state, dl_edge_targets, ul_edge_targets)

            reports, _ = simulate_clusters(point, cl_pow, state, trials, seed)
            ana_dl = sum(rate_report(point, cl_pow[j], state, cluster=j).dl_sum for j in cl_pow)
            ana_ul = sum(rate_report(point, cl_pow[j], state, cluster=j).ul_sum for j in cl_pow)
            sim_dl = sum(r.dl_sum for r in reports.values())
            sim_ul = sum(r.ul_sum for r in reports.values())
            pr_ana_dl, pr_ana_ul = pair_rate_sums(point, pr_pow, state)
            pr_sim = simulate_pair_sums(point, pr_pow, state, trials, seed)

            for role, method, rate, err in (
                (f"dl_sum_clustering[xi={xi:g}]", "analytic", ana_dl, ""),
                (f"ul_sum_clustering[xi={xi:g}]", "analytic", ana_ul, ""),
                (f"dl_sum_pairing[xi={xi:g}]", "analytic", pr_ana_dl, ""),
                (f"ul_sum_pairing[xi={xi:g}]", "analytic", pr_ana_ul, ""),
                (f"dl_sum_clustering[xi={xi:g}]", "simulated", sim_dl, ""),
                (f"ul_sum_clustering[xi={xi:g}]", "simulated", sim_ul, ""),
                (f"dl_sum_pairing[xi={xi:g}]", "simulated", pr_sim["dl_sum"], pr_sim["dl_sum_stderr"]),
                (f"ul_sum_pairing[xi={xi:g}]", "simulated", pr_sim["ul_sum"], pr_sim["ul_sum_stderr"]),
            ):
                rows.append({
                    "sweep_var": "snr_db", "value": snr, "role": role, "method": method,
                    "rate": float(rate), "stderr": err if err == "" else float(err), "seed": seed,
                })
    return rows


def experiment_custom(cfg, seed, trials, param, values):
    state = _pick_state(cfg, "random", seed)
    rows = []
    for v in values:
        point = replace(cfg, **{param: type(getattr(cfg, param))(v)})
        rows += _point_rows(point, state, seed, trials, param, v)
    return rows


# -- entry points --------------------------------------------------------------


def _cmd_analytic(args):
    cfg = _load(args)
    state = _pick_state(cfg, args.state, args.seed)
    report = rate_report(cfg, default_power_allocation(cfg), state, cluster=args.cluster)
    _write_rows(_report_rows(report, "snr_db", cfg.snr_db, args.seed), args.out)
    return 0


def _cmd_simulate(args):
    cfg = _load(args)
    state = _pick_state(cfg, args.state, args.seed)
    plan = SimPlan(
        cfg=cfg, power=default_power_allocation(cfg), state=state,
        trials=args.trials, seed=args.seed, cluster=args.cluster,
    )
    report = simulate(plan)
    stream = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["role", "rate", "stderr", "trials", "seed"])
        for role in ROLES:
            writer.writerow([role, repr(float(report.rates[role])),
                             repr(float(report.stderr[role])), args.trials, args.seed])
    finally:
        if args.out:
            stream.close()
    return 0


def _cmd_cluster(args):
    cfg = _load(args)
    if args.scheme == "cluster" and not cfg.uniform_clusters():
        print(
            "error: user counts do not form uniform 3-member clusters "
            "(need K_d1 = K_d2 = K_ed = M_d and the UL analogue)",
            file=sys.stderr,
        )
        return 2
    layout = sample_layout(cfg, np.random.default_rng(args.seed))
    build = cluster_users if args.scheme == "cluster" else pair_users
    plan = build(layout, cfg, args.mode)
    stream = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["cluster", "user", "role", "distance"])
        for c in plan.clusters:
            for member in c.members:
                writer.writerow([c.index, member.user_id, member.role, repr(member.distance)])
    finally:
        if args.out:
            stream.close()
    return 0


def _cmd_optimize(args):
    cfg = _load(args)
    settings = PgamSettings(max_iters=args.iters, restarts=args.restarts)
    initial = default_initial_state(cfg) if args.state == "default" else _pick_state(cfg, args.state, args.seed)
    state, trace = pgam_optimize(
        cfg, default_power_allocation(cfg), settings, initial=initial,
        rng=np.random.default_rng(args.seed),
    )
    stream = open(args.out, "w", encoding="utf-8", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["element", "rho_t", "rho_r", "phi_t", "phi_r"])
        for n in range(cfg.N):
            writer.writerow([n, repr(float(state.rho_t[n])), repr(float(state.rho_r[n])),
                             repr(float(state.phi_t[n])), repr(float(state.phi_r[n]))])
    finally:
        if args.out:
            stream.close()
    if args.trace:
        with open(args.trace, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["iteration", "objective"])
            for i, v in enumerate(trace):
                writer.writerow([i, repr(float(v))])
    return 0


def _cmd_sweep(args):
    cfg = _load(args)
    if args.experiment == "rates-vs-snr":
        rows = experiment_rates_vs_snr(cfg, args.seed, args.trials, args.grid or DEFAULT_SNR_GRID)
    elif args.experiment == "sic-ablation":
        rows = experiment_sic_ablation(cfg, args.seed, args.trials, args.grid or DEFAULT_SNR_GRID)
    elif args.experiment == "si-ablation":
        rows = experiment_si_ablation(cfg, args.seed, args.trials, args.grid or DEFAULT_SNR_GRID)
    elif args.experiment == "cluster-vs-pair":
        rows = experiment_cluster_vs_pair(cfg, args.seed, args.trials, args.grid or DEFAULT_SNR_GRID)
    elif args.experiment == "rates-vs-N":
        grid = [int(v) for v in args.grid] if args.grid else DEFAULT_N_GRID
        rows = experiment_rates_vs_N(cfg, args.seed, args.trials, grid)
    elif args.experiment == "custom":
        if not args.param or not args.grid:
            print("error: custom sweep needs --param and --grid", file=sys.stderr)
            return 2
        rows = experiment_custom(cfg, args.seed, args.trials, args.param, args.grid)
    else:
        print(f"error: unknown experiment {args.experiment!r}", file=sys.stderr)
        return 2
    if not rows:
        print("error: empty sweep grid", file=sys.stderr)
        return 2
    _write_rows(rows, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="starnoma", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, trials_default=200_000):
        p.add_argument("--config", help="YAML config path (defaults to the baseline)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=trials_default)
        p.add_argument("--out", help="output CSV path (default stdout)")
        p.add_argument("--state", default="random", choices=("random", "aligned", "uniform"),
                       help="surface state used for the evaluation")
        p.add_argument("--cluster", type=int, default=1)

    p = sub.add_parser("analytic", help="closed-form per-role rates")
    common(p)
    p.set_defaults(fn=_cmd_analytic)

    p = sub.add_parser("simulate", help="Monte-Carlo per-role rates")
    common(p)
    p.set_defaults(fn=_cmd_simulate)

    p = sub.add_parser("cluster", help="print a clustering or pairing plan")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", default="DL", choices=("DL", "UL"))
    p.add_argument("--scheme", default="cluster", choices=("cluster", "pair"))
    p.add_argument("--out")
    p.set_defaults(fn=_cmd_cluster)

    p = sub.add_parser("optimize", help="projected gradient surface design")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--iters", type=int, default=60)
    p.add_argument("--restarts", type=int, default=0)
    p.add_argument("--state", default="default", choices=("default", "random", "aligned", "uniform"))
    p.add_argument("--out")
    p.add_argument("--trace", help="objective trace CSV path")
    p.set_defaults(fn=_cmd_optimize)

    p = sub.add_parser("sweep", help="named figure experiments")
    common(p, trials_default=100_000)
    p.add_argument("--experiment", required=True, choices=EXPERIMENTS)
    p.add_argument("--grid", type=float, nargs="*", help="sweep grid values")
    p.add_argument("--param", help="config field for the custom sweep")
    p.set_defaults(fn=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
