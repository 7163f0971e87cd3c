"""Command line entry point: ``mdarp <command> ...``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .heuristic import SearchConfig, solve_modular, solve_solo
from .instance import SPATIAL_MODES, TEMPORAL_MODES, generate_instance, load_instance, save_instance
from .network import load_network, read_coordinates, synthetic_road_network
from .schedule import dump_plan, evaluate, load_plan

log = logging.getLogger("mdarp")


def load_net(source: str, fmt: str | None = None):
    """``synthetic[:seed]`` or a network file; returns ``(network, coords or None)``."""
    if source.startswith("synthetic"):
        seed = int(source.split(":", 1)[1]) if ":" in source else 0
        return synthetic_road_network(seed=seed)
    if fmt is None:
        fmt = "tntp" if source.endswith(".tntp") or "_net" in Path(source).name else "native"
    return load_network(source, fmt), None


def cmd_gen(a):
    net, _ = load_net(a.net, a.net_format)
    inst = generate_instance(net, a.k, a.r, a.spatial, a.temporal, seed=a.seed)
    save_instance(inst, a.out)
    print(f"wrote {a.out}: {a.k} vehicles, {a.r} requests on {net.n_nodes} nodes")


def cmd_solve(a):
    inst = load_instance(a.instance)
    if a.mode == "solo":
        plan = solve_solo(inst)
    else:
        cfg = SearchConfig(seed=a.seed, n_recon=a.n_recon, n_max=a.n_max, phi=a.phi)
        plan = solve_modular(inst, cfg).plan
    _, rep, cost = evaluate(inst, plan)
    if not rep.ok:
        raise SystemExit("solver produced an infeasible plan: " + rep.violations[0].message)
    dump_plan(inst, plan, a.out)
    print(f"{a.mode}: total={cost.total:.4f} vehicle={cost.vehicle_travel_cost:.4f} "
          f"service={cost.passenger_service_time:.4f} platoons={len(plan.platoons)} "
          f"transfers={len(plan.transfers)}")


def cmd_milp(a):
    from .exact.milp import export_milp
    inst = load_instance(a.instance)
    big_m = a.big_m
    try:
        big_m = float(big_m)
    except ValueError:
        pass
    art = export_milp(inst, a.layers, big_m, a.variant or ())
    lp, side = art.write(a.out)
    print(f"wrote {lp} and {side}: {len(art.variables)} variables, "
          f"{sum(art.census.values())} constraints, objective offset {art.objective_offset:g}")


def cmd_bench(a):
    from .bench.experiments import MatrixConfig, run_matrix
    net, _ = load_net(a.net, a.net_format)
    cfg = MatrixConfig.from_json(a.grid, replications=a.reps, seed=a.seed) if a.grid else \
        MatrixConfig(replications=a.reps or 6, seed=a.seed or 0)
    df = run_matrix(net, cfg, a.out, workers=a.workers)
    bad = int((df["status"] != "ok").sum())
    print(f"wrote {a.out}: {len(df)} rows, {bad} failed")


def cmd_report(a):
    from .bench.experiments import load_results, summarize
    text = summarize(load_results(a.inp)).to_markdown()
    _emit(text, a.out)


def cmd_regress(a):
    from .bench.experiments import load_results
    from .bench.ols import regress
    fit = regress(a.formula, load_results(a.inp))
    _emit(f"`{a.formula}`\n\n" + fit.to_markdown(), a.out)


def cmd_plot(a):
    from .bench.render import render_plan
    if a.instance:
        inst = load_instance(a.instance)
        net, coords = inst.network, None
    else:
        net, coords = load_net(a.net, a.net_format)
    if a.coords:
        coords = read_coordinates(a.coords)
    plan = load_plan(a.plan)
    fmt = a.format or ("dot" if a.out.endswith(".dot") else "svg")
    render_plan(plan, net, coords, fmt, a.out)
    print(f"wrote {a.out}")


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
        print(f"wrote {out}")
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mdarp", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def net_args(sp, required=False):
        sp.add_argument("--net", default=None if required else "synthetic", required=required,
                        help="network file, or synthetic[:seed] for the 378-node surrogate")
        sp.add_argument("--net-format", choices=("native", "tntp"), default=None)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--r", type=int, required=True)
    g.add_argument("--spatial", choices=SPATIAL_MODES, default="U")
    g.add_argument("--temporal", choices=TEMPORAL_MODES, default="zero")
    g.add_argument("--seed", type=int, default=0)
    net_args(g)
    g.add_argument("--out", default="instance.json")
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve an instance in solo or modular mode")
    s.add_argument("--instance", required=True)
    s.add_argument("--mode", choices=("solo", "modular"), default="modular")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--n-recon", type=int, default=SearchConfig.n_recon)
    s.add_argument("--n-max", type=int, default=SearchConfig.n_max)
    s.add_argument("--phi", type=float, default=SearchConfig.phi)
    s.add_argument("--out", default="plan.json")
    s.set_defaults(func=cmd_solve)

    m = sub.add_parser("milp", help="export the mixed-integer model as an LP file")
    m.add_argument("--instance", required=True)
    m.add_argument("--layers", type=int, default=2)
    m.add_argument("--big-m", default="horizon", help="'horizon' or a number")
    m.add_argument("--variant", action="append", choices=("time_windows", "two_rate"))
    m.add_argument("--out", default="model.lp")
    m.set_defaults(func=cmd_milp)

    b = sub.add_parser("bench", help="run the scenario matrix")
    net_args(b)
    b.add_argument("--grid", help="JSON scenario grid (sizes, spatial, temporal, replications, seed, search)")
    b.add_argument("--reps", type=int, default=None)
    b.add_argument("--seed", type=int, default=None)
    b.add_argument("--workers", type=int, default=1)
    b.add_argument("--out", default="results.csv")
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("report", help="summary tables from a results CSV")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--out")
    r.set_defaults(func=cmd_report)

    g2 = sub.add_parser("regress", help="OLS regression on a results CSV")
    g2.add_argument("--in", dest="inp", required=True)
    g2.add_argument("--formula", default="total_diff ~ C10 + C5 + C3 + veh_cap")
    g2.add_argument("--out")
    g2.set_defaults(func=cmd_regress)

    pl = sub.add_parser("plot", help="draw a plan as SVG or DOT")
    pl.add_argument("--plan", required=True)
    pl.add_argument("--instance", help="take the network from this instance file")
    net_args(pl)
    pl.add_argument("--coords", help="TNTP node file with coordinates")
    pl.add_argument("--format", choices=("svg", "dot"))
    pl.add_argument("--out", default="plan.svg")
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
