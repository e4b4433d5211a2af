"""Command line entry points.

Subcommands: demo-data, synth, optimize, experiments, export-mps. A JSON
config file carries paths and parameters; flags override its entries.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import run as runner
from .builder import ProblemData, build
from .data import Horizon, load_catalog, load_dataset, make_demo_dataset, write_demo_files
from .mps import write_mps
from .scenario import ScenarioModel, build_scenario
from .solve import SolveOptions


def _add_data_flags(p):
    p.add_argument("--config", help="run configuration JSON")
    p.add_argument("--prices", help="price CSV (timestamp,price_eur_per_mwh)")
    p.add_argument("--demand", help="demand CSV (timestamp,ch_mw,wh_mw)")
    p.add_argument("--pv", help="PV CSV (timestamp,pv_cf)")
    p.add_argument("--catalog", help="storage technology catalog (INI)")
    p.add_argument("--seed", type=int, help="override config seed")


def _merged_config(args) -> dict:
    if args.config:
        cfg = runner.load_run_config(args.config)
    else:
        cfg = {"clusters": 20, "seed": 0, "horizon": {}, "sources": {},
               "experiments": []}
    for key in ("prices", "demand", "pv", "catalog"):
        val = getattr(args, key, None)
        if val:
            cfg[key] = val
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = args.seed
    for key in ("prices", "demand", "pv", "catalog"):
        if key not in cfg:
            raise SystemExit(f"missing input: --{key} or config entry '{key}'")
    return cfg


def cmd_demo_data(args):
    days = make_demo_dataset(args.seed or 0, args.days)
    paths = write_demo_files(days, args.out_dir)
    print("wrote", *paths)
    return 0


def cmd_synth(args):
    cfg = _merged_config(args)
    horizon = Horizon(**{**cfg["horizon"],
                         **({"t_syn": args.days} if args.days else {})})
    days = load_dataset(cfg["prices"], cfg["demand"], cfg["pv"], horizon)
    w = args.clusters or cfg.get("clusters", 20)
    scenario = build_scenario(days, w, horizon.t_syn, cfg["seed"])
    with open(args.out, "w") as fh:
        fh.write(scenario.to_json())
    print(f"wrote {args.out}: {w} clusters over {len(days)} historical days, "
          f"{horizon.t_syn} synthetic days")
    return 0


def _context(args, cfg):
    if args.scenario:
        with open(args.scenario) as fh:
            scenario = ScenarioModel.from_json(fh.read())
        return runner.RunContext(
            horizon=Horizon(**cfg["horizon"]),
            sources=runner.sources_from_dict(cfg["sources"]),
            catalog=load_catalog(cfg["catalog"]),
            scenario=scenario)
    return runner.context_from_config(cfg, cache_dir=args.out_dir)


def _solve_options(args) -> SolveOptions:
    engine = {"embedded": "auto", "external": "auto"}.get(args.solver, "auto")
    return SolveOptions(engine=engine)


def cmd_optimize(args):
    cfg = _merged_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    ctx = _context(args, cfg)
    ess = args.ess.split(",") if args.ess else list(ctx.catalog)
    exp = runner.ExperimentConfig(id="design", ess_subset=tuple(ess))
    if args.solver == "external":
        data = ProblemData.from_scenario(ctx.scenario, ctx.horizon, ctx.sources,
                                         {n: ctx.catalog[n] for n in ess})
        out = args.mps_out or os.path.join(args.out_dir, "model.mps")
        write_mps(build(data), out)
        print(f"wrote {out} (solve externally, e.g. with HiGHS or Gurobi)")
        return 0
    result = runner.run_one(ctx, exp, _solve_options(args))
    runner.write_results_json([result], os.path.join(args.out_dir, "result.json"))
    runner.emit_traces(result, os.path.join(args.out_dir, "traces.csv"))
    runner.write_summary([result], list(ctx.catalog),
                         os.path.join(args.out_dir, "summary.csv"))
    print(f"status={result.status} objective={result.objective:.4f} kEUR")
    return 0 if result.status == "optimal" and not result.error else 1


def cmd_experiments(args):
    cfg = _merged_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    ctx = _context(args, cfg)
    experiments = runner.experiments_from_config(cfg)
    if not experiments:
        raise SystemExit("config defines no experiments")
    results = runner.run_experiments(ctx, experiments, _solve_options(args),
                                     jobs=args.jobs)
    runner.write_summary(results, list(ctx.catalog),
                         os.path.join(args.out_dir, "summary.csv"))
    runner.write_results_json(results, os.path.join(args.out_dir, "results.json"))
    for r in results:
        runner.emit_traces(r, os.path.join(args.out_dir, f"traces_{r.exp_id}.csv"))
        note = f" ({r.error})" if r.error else ""
        print(f"exp {r.exp_id}: status={r.status} "
              f"total={r.objective:.4f} kEUR{note}")
    return 0 if all(r.status == "optimal" and not r.error for r in results) else 1


def cmd_export_mps(args):
    cfg = _merged_config(args)
    ctx = _context(args, cfg)
    ess = args.ess.split(",") if args.ess else list(ctx.catalog)
    data = ProblemData.from_scenario(ctx.scenario, ctx.horizon, ctx.sources,
                                     {n: ctx.catalog[n] for n in ess})
    write_mps(build(data), args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hessmg",
        description="Joint sizing and dispatch optimization of a truck-charging "
                    "microgrid with hybrid storage")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("demo-data", help="generate the bundled synthetic dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--days", type=int, default=120)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_demo_data)

    p = sub.add_parser("synth", help="cluster history into a synthetic period")
    _add_data_flags(p)
    p.add_argument("--clusters", type=int)
    p.add_argument("--days", type=int, help="synthetic period length T_syn")
    p.add_argument("--out", required=True, help="scenario JSON output")
    p.set_defaults(func=cmd_synth)

    for name, func in (("optimize", cmd_optimize), ("experiments", cmd_experiments)):
        p = sub.add_parser(name)
        _add_data_flags(p)
        p.add_argument("--scenario", help="reuse a scenario JSON instead of re-clustering")
        p.add_argument("--out-dir", required=True)
        p.add_argument("--solver", choices=("embedded", "external"), default="embedded")
        p.add_argument("--mps-out", help="MPS path for --solver external")
        p.add_argument("--jobs", type=int, default=1)
        if name == "optimize":
            p.add_argument("--ess", help="comma-separated technology subset")
        p.set_defaults(func=func)

    p = sub.add_parser("export-mps", help="write the model in free MPS format")
    _add_data_flags(p)
    p.add_argument("--scenario")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--ess")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_mps)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
