"""Command-line entry point: ``cachemix <command> [scenario ...] [options]``.

Every command writes CSV into ``--out`` (a directory) and prints a one-line
summary. Scenarios are built-in names (``mix2011``, ``mix2015``, ``zipf08``,
...) or YAML files.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import che, hierarchy, lfu, oracle, simulator
from .scenario import BUILTINS, Scenario, ScenarioError, GridSpec, load_scenario, parse_size

COMMANDS = ("lfu-curve", "lru-curve", "per-type-hits", "cache-shares", "simulate",
            "tandem-sim", "hierarchy-grid", "savings-table", "oracle-check")


def _fmt(x) -> str:
    return repr(float(x))


def _write_csv(path: Path, header, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _out_path(args, command: str, scenario: Scenario, many: bool) -> Path:
    stem = f"{command}-{scenario.name}" if many else command
    return Path(args.out) / f"{stem}.csv"


def _grid(args, sc: Scenario, integer=False) -> list[float]:
    g = sc.default_grid()
    g = GridSpec(args.grid_min if args.grid_min is not None else g.min,
                 args.grid_max if args.grid_max is not None else g.max,
                 args.grid_points if args.grid_points is not None else g.points)
    vals = g.values(integer=integer or sc.homogeneous)
    return vals


def _policy(args, sc: Scenario) -> hierarchy.LayerPolicy:
    name = args.policy or sc.policy
    if name == "shared":
        return hierarchy.SHARED
    if sc.homogeneous:
        raise ScenarioError("vod-only policy needs a content mix")
    return hierarchy.LayerPolicy.dedicated("VoD")


def _size_arg(args, sc: Scenario, which: str) -> float:
    v = getattr(args, which)
    if v is None:
        v = getattr(sc, which)
    if v is None:
        raise ScenarioError(f"{sc.name}: no {which} given (use --{which})")
    return float(v)


# -- commands --------------------------------------------------------------

def cmd_lfu_curve(args, sc, out):
    unit = sc.size_unit
    rows = []
    if sc.homogeneous:
        for c in _grid(args, sc):
            rows.append([_fmt(c), _fmt(lfu.lfu_hit_homogeneous(sc.law, int(c)))])
    else:
        mix = sc.mix()
        for c in _grid(args, sc):
            rows.append([_fmt(c), _fmt(lfu.lfu_hit_mix(mix, c))])
    _write_csv(out, [f"cache_size_{unit}", "hit_rate"], rows)
    return f"{len(rows)} LFU points"


def _che_rows(args, sc):
    cat = sc.catalog()
    for c in _grid(args, sc):
        if c <= 0:
            continue
        yield c, che.solve_tc(cat, c)


def cmd_lru_curve(args, sc, out):
    names = [t.name for t in sc.content_types]
    header = [f"cache_size_{sc.size_unit}", "t_c", "byte_hit", "request_hit",
              *(f"hit_{n}" for n in names), *(f"share_{n}" for n in names)]
    rows = []
    for c, sol in _che_rows(args, sc):
        hits = [che.per_type_hit(sol, i) for i in range(len(names))]
        rows.append([_fmt(c), _fmt(sol.t_c), _fmt(che.overall_byte_hit(sol)),
                     _fmt(che.overall_request_hit(sol)), *map(_fmt, hits),
                     *map(_fmt, che.cache_shares(sol))])
    _write_csv(out, header, rows)
    return f"{len(rows)} LRU (Che) points"


def cmd_per_type_hits(args, sc, out):
    names = [t.name for t in sc.content_types]
    rows = [[_fmt(c), *(_fmt(che.per_type_hit(sol, i)) for i in range(len(names)))]
            for c, sol in _che_rows(args, sc)]
    _write_csv(out, [f"cache_size_{sc.size_unit}", *(f"hit_{n}" for n in names)], rows)
    return f"{len(rows)} per-type hit points"


def cmd_cache_shares(args, sc, out):
    names = [t.name for t in sc.content_types]
    rows = [[_fmt(c), *map(_fmt, che.cache_shares(sol))] for c, sol in _che_rows(args, sc)]
    _write_csv(out, [f"cache_size_{sc.size_unit}", *(f"share_{n}" for n in names)], rows)
    return f"{len(rows)} cache-share points"


def _sim_settings(args, sc):
    s = sc.simulation
    seed = args.seed if args.seed is not None else s.seed
    requests = args.requests if args.requests is not None else s.requests
    return seed, requests, s.warmup


def cmd_simulate(args, sc, out):
    law = sc.law
    cap = int(_size_arg(args, sc, "c1"))
    seed, requests, warmup = _sim_settings(args, sc)
    rep = simulator.run_single_cache(law, cap, requests, warmup, seed)
    if 0 < cap:
        sol = che.solve_tc(law, cap)
        pred = np.array([che.object_hit_rate(sol, 0, k) for k in range(1, law.population + 1)])
    else:
        pred = np.zeros(law.population)
    rep.to_csv(out, {"che_hit_rate": pred})
    return rep.summary()


def cmd_tandem_sim(args, sc, out):
    law = sc.law
    c1 = int(_size_arg(args, sc, "c1"))
    c2 = int(_size_arg(args, sc, "c2"))
    m = args.layer1_caches or sc.simulation.layer1_caches
    seed, requests, warmup = _sim_settings(args, sc)
    l1, l2 = simulator.run_tandem(law, m, c1, c2, requests, warmup, seed)
    res = hierarchy.evaluate_two_layer(law, c1, c2)
    n = law.population
    h1 = [che.object_hit_rate(res.layer1, 0, k) for k in range(1, n + 1)]
    h2 = [che.object_hit_rate(res.layer2, 0, k) for k in range(1, n + 1)]
    rows = []
    for k in range(n):
        if not l1.requests[k]:
            continue
        rows.append([k + 1, int(l1.requests[k]), int(l1.hits[k]), _fmt(l1.hit_rate(k + 1)),
                     int(l2.requests[k]), int(l2.hits[k]),
                     _fmt(l2.hit_rate(k + 1)) if l2.requests[k] else "",
                     _fmt(h1[k]), _fmt(h2[k])])
    _write_csv(out, ["rank", "l1_requests", "l1_hits", "l1_hit_rate", "l2_requests",
                     "l2_hits", "l2_hit_rate", "che_l1_hit_rate", "che_l2_hit_rate"], rows)
    sim = simulator.tandem_overall_hit(l1, l2)
    return (f"tandem m={m} c1={c1} c2={c2}: simulated overall hit {sim:.6f}, "
            f"analytic {res.total_reduction:.6f} (seed={seed})")


def cmd_hierarchy_grid(args, sc, out):
    cat = sc.catalog()
    grid = [0.0] + _grid(args, sc)
    policy = _policy(args, sc)
    h = hierarchy.contour_grid(cat, grid, grid, policy)
    unit = sc.size_unit
    rows = [[_fmt(a), _fmt(b), _fmt(100.0 * h[i, j])]
            for i, a in enumerate(grid) for j, b in enumerate(grid)]
    _write_csv(out, [f"c1_{unit}", f"c2_{unit}", "hit_percent"], rows)
    return f"{len(grid)}x{len(grid)} hierarchy grid, policy {policy.label()}"


def savings_report(rows, c1, c2) -> str:
    lines = [f"Bandwidth savings for C1 = {c1 / 1e12:g} TB and C2 = {c2 / 1e12:g} TB",
             "",
             f"{'':8}{'Zipf VoD':>10}{'layer 1':>10}{'reduction (%)':>24}",
             f"{'':8}{'(alpha)':>10}{'cache':>10}{'layer 1':>12}{'layers 1&2':>12}",
             "-" * 52]
    last_label, last_alpha = None, None
    for r in rows:
        label = r.label if r.label != last_label else ""
        alpha = f"{r.vod_alpha:g}" if (r.label, r.vod_alpha) != (last_label, last_alpha) else ""
        policy = "shared" if r.policy == "shared" else r.policy
        lines.append(f"{label:8}{alpha:>10}{policy:>10}{r.layer1_percent:>12}{r.total_percent:>12}")
        last_label, last_alpha = r.label, r.vod_alpha
    return "\n".join(lines) + "\n"


def cmd_savings_table(args, scenarios, out_dir: Path):
    c1 = args.c1 if args.c1 is not None else 1e12
    c2 = args.c2 if args.c2 is not None else 1e14
    bases = {}
    for sc in scenarios:
        if sc.homogeneous:
            raise ScenarioError(f"{sc.name}: savings-table needs a content mix")
        bases[sc.year_label or sc.name] = sc.content_types
    alphas = (args.vod_alpha,) if args.vod_alpha is not None else (0.8, 1.2)
    rows = hierarchy.savings_table(bases, alphas, c1, c2)
    _write_csv(out_dir / "savings-table.csv",
               ["scenario", "vod_alpha", "layer1_policy", "layer1_reduction",
                "total_reduction", "layer1_percent", "total_percent"],
               [[r.label, _fmt(r.vod_alpha), r.policy, _fmt(r.layer1_reduction),
                 _fmt(r.total_reduction), r.layer1_percent, r.total_percent] for r in rows])
    report = savings_report(rows, c1, c2)
    (out_dir / "savings-table.txt").write_text(report)
    return f"{len(rows)} savings rows"


def cmd_oracle_check(args, sc, out):
    law = sc.law
    if law.population > oracle.MAX_OBJECTS:
        raise ScenarioError(f"{sc.name}: oracle-check needs at most {oracle.MAX_OBJECTS} objects")
    q = law.probabilities()
    seed, requests, warmup = _sim_settings(args, sc)
    if args.requests is None:
        requests = min(requests, 2_000_000)
    rows, worst = [], 0.0
    for c in range(1, law.population):
        pf = oracle.product_form(q, c).hit_rates()
        mk = oracle.markov_stationary(q, c).hit_rates()
        exact = float(q @ pf)
        sol = che.solve_tc(law, c)
        rep = simulator.run_single_cache(law, c, requests, min(warmup or 10_000, requests // 2),
                                         seed + c)
        gap = float(np.abs(pf - mk).max())
        worst = max(worst, gap)
        rows.append([c, _fmt(exact), _fmt(float(q @ mk)), _fmt(gap),
                     _fmt(che.overall_byte_hit(sol)), _fmt(rep.overall_hit),
                     _fmt(rep.overall_stderr())])
    _write_csv(out, ["cache_size_objects", "exact_hit", "markov_hit", "max_object_gap",
                     "che_hit", "sim_hit", "sim_stderr"], rows)
    return f"oracle check over {len(rows)} sizes, product form vs chain max gap {worst:.3g}"


_SINGLE = {
    "lfu-curve": cmd_lfu_curve,
    "lru-curve": cmd_lru_curve,
    "per-type-hits": cmd_per_type_hits,
    "cache-shares": cmd_cache_shares,
    "simulate": cmd_simulate,
    "tandem-sim": cmd_tandem_sim,
    "hierarchy-grid": cmd_hierarchy_grid,
    "oracle-check": cmd_oracle_check,
}


def dispatch(command: str, scenarios: list[Scenario], args) -> list[str]:
    """Run ``command`` for every scenario; returns the summary lines."""
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if command == "savings-table":
        return [cmd_savings_table(args, scenarios, out_dir)]
    fn = _SINGLE[command]
    many = len(scenarios) > 1
    summaries = []
    for sc in scenarios:
        summaries.append(f"{sc.name}: " + fn(args, sc, _out_path(args, command, sc, many)))
    return summaries


def _size(text: str) -> float:
    try:
        return parse_size(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("scenarios", nargs="*", metavar="SCENARIO",
                        help=f"built-in name ({', '.join(BUILTINS)}) or YAML file")
    common.add_argument("--scenario", action="append", default=[],
                        help="scenario (repeatable), same as a positional argument")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--c1", type=_size, help="layer-1 / single cache size, e.g. 1TB")
    common.add_argument("--c2", type=_size, help="layer-2 cache size, e.g. 100TB")
    common.add_argument("--policy", choices=["shared", "vod-only"])
    common.add_argument("--vod-alpha", type=float, choices=[0.8, 1.2])
    common.add_argument("--seed", type=int)
    common.add_argument("--requests", type=int, help="simulated requests, warm-up included")
    common.add_argument("--layer1-caches", type=int, help="edge caches in tandem-sim")
    common.add_argument("--grid-min", type=_size)
    common.add_argument("--grid-max", type=_size)
    common.add_argument("--grid-points", type=int)

    parser = argparse.ArgumentParser(prog="cachemix", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    refs = list(args.scenarios) + list(args.scenario)
    if not refs:
        refs = ["mix2011", "mix2015"] if args.command == "savings-table" else ["mix2011"]
    try:
        scenarios = [load_scenario(r) for r in refs]
        if args.vod_alpha is not None and args.command != "savings-table":
            scenarios = [sc.with_vod_alpha(args.vod_alpha) if not sc.homogeneous else sc
                         for sc in scenarios]
        for line in dispatch(args.command, scenarios, args):
            print(line)
    except (ScenarioError, ValueError, TypeError, RuntimeError, IndexError) as exc:
        print(f"cachemix {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
