"""Command line interface.

Every subcommand accepts ``--config FILE`` (``key = value`` lines); flags
given on the command line override the file, which overrides the defaults.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import io as cio
from .embedding import LayoutConfig, embed_graph
from .evaluation import nmi
from .harness import SWEEPABLE, SweepSpec, format_results, run_sweep, summarize
from .pipeline import DetectionConfig, iter_partitions
from .proximity import graph_from_trace, read_edges, write_edges
from .scenarios import KINDS, build_scenario
from .similarity import SimilarityParams
from .simulation import SimParams, run

DEFAULTS = {
    "scenario": "straight", "width": 10.0, "amplitude": 0.0, "wavelength": 100.0,
    "separation": 20.0, "size": 100.0,
    "p": 0.2, "q": 0.5, "density": 0.3, "max_timesteps": 1000, "seed": 0, "w_max": None,
    "score": "C", "window": 100, "horizon": 100.0,
    "epsilon": 15.0, "epsilons": "5,10,15,20,25,30,35,40", "min_pts": 15, "include_self": False,
    "mode": "raw", "radius": 25.0,
    "layout_c": 1.0, "area_per_node": 100.0, "initial_iterations": 500, "step_iterations": 20,
    "step_temperature": 0.1, "tolerance": 1e-3, "repulsion_cutoff": 0.0,
    "param": "none", "values": "", "repetitions": 5, "jobs": 1, "stride": 1,
}

_TYPES = {
    "scenario": str, "score": str, "mode": str, "param": str, "values": str, "epsilons": str,
    "max_timesteps": int, "seed": int, "window": int, "min_pts": int, "initial_iterations": int,
    "step_iterations": int, "repetitions": int, "jobs": int, "stride": int,
}


def _convert(key: str, value):
    if value is None:
        return None
    if key == "include_self":
        return value if isinstance(value, bool) else str(value).lower() in ("1", "true", "yes", "on")
    if key == "w_max" and str(value).lower() in ("", "none"):
        return None
    return _TYPES.get(key, float)(value)


def _add(parser, *names, key, help, **kw):
    parser.add_argument(*names, dest=key, default=None, help=help, **kw)


def _scenario_args(p):
    g = p.add_argument_group("scenario")
    _add(g, "--scenario", key="scenario", choices=KINDS, help="scenario kind")
    _add(g, "--width", key="width", help="lane width")
    _add(g, "--amplitude", key="amplitude", help="sinusoidal lane amplitude")
    _add(g, "--wavelength", key="wavelength", help="sinusoidal lane wavelength")
    _add(g, "--separation", key="separation", help="gap between parallel lanes")
    _add(g, "--size", key="size", help="side of the square crowd region")


def _sim_args(p):
    g = p.add_argument_group("simulation")
    _add(g, "--p", key="p", help="probability of a random step")
    _add(g, "--q", key="q", help="probability that a lane walker follows the lane")
    _add(g, "--density", key="density", help="walkers per unit area")
    _add(g, "--max-timesteps", key="max_timesteps", help="simulation length cap")
    _add(g, "--seed", key="seed", help="random seed")
    _add(g, "--w-max", key="w_max", help="lane half-width (default: width / 2)")


def _similarity_args(p):
    g = p.add_argument_group("similarity")
    _add(g, "--score", key="score", choices=("A", "B", "C"), help="score function")
    _add(g, "--window", key="window", help="history window W in timesteps")
    _add(g, "--horizon", key="horizon", help="projection horizon T in timesteps")


def _dbscan_args(p, sweep=False):
    g = p.add_argument_group("dbscan")
    if sweep:
        _add(g, "--epsilons", key="epsilons", help="comma-separated epsilon grid")
    else:
        _add(g, "--epsilon", key="epsilon", help="neighbourhood radius")
    _add(g, "--min-pts", key="min_pts", help="core threshold")
    _add(g, "--stride", key="stride", help="cluster every n-th timestep only")
    g.add_argument("--include-self", dest="include_self", action="store_const", const=True, default=None,
                   help="count a node in its own neighbourhood")


def _layout_args(p):
    g = p.add_argument_group("embedding")
    _add(g, "--layout-c", key="layout_c", help="ideal edge length constant C")
    _add(g, "--area-per-node", key="area_per_node", help="frame area per node")
    _add(g, "--initial-iterations", key="initial_iterations", help="first-timestep iteration budget")
    _add(g, "--step-iterations", key="step_iterations", help="iterations per later timestep")
    _add(g, "--step-temperature", key="step_temperature", help="later-timestep temperature / k")
    _add(g, "--tolerance", key="tolerance", help="convergence tolerance / k")
    _add(g, "--repulsion-cutoff", key="repulsion_cutoff", help="repulsion cutoff / k (0 = all pairs)")


def _common(p):
    p.add_argument("--config", help="key = value configuration file")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="crowdlanes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a scenario and write a trace CSV")
    _common(p)
    _scenario_args(p)
    _sim_args(p)

    p = sub.add_parser("graph", help="build a proximity edge list from a trace")
    _common(p)
    p.add_argument("--trace", required=True)
    _add(p, "--radius", key="radius", help="detection radius")

    p = sub.add_parser("embed", help="embed a proximity edge list")
    _common(p)
    p.add_argument("--edges", required=True)
    _add(p, "--seed", key="seed", help="random seed")
    _layout_args(p)

    p = sub.add_parser("detect", help="cluster a trace or embedded positions per timestep")
    _common(p)
    p.add_argument("--trace", required=True, help="trace or embedded-positions CSV")
    _add(p, "--seed", key="seed", help="processing-order seed")
    _similarity_args(p)
    _dbscan_args(p)

    p = sub.add_parser("evaluate", help="score partitions against trace ground truth")
    _common(p)
    p.add_argument("--partitions", required=True)
    p.add_argument("--truth", required=True, help="trace CSV with labels")

    p = sub.add_parser("sweep", help="parameter sweep; writes the results CSV")
    _common(p)
    _scenario_args(p)
    _sim_args(p)
    _similarity_args(p)
    _dbscan_args(p, sweep=True)
    _layout_args(p)
    _add(p, "--param", key="param", help=f"swept parameter: none or one of {', '.join(SWEEPABLE)}")
    _add(p, "--values", key="values", help="comma-separated values of the swept parameter")
    _add(p, "--repetitions", key="repetitions", help="seeds per grid point")
    _add(p, "--mode", key="mode", choices=("raw", "embedded"), help="coordinates used for clustering")
    _add(p, "--radius", key="radius", help="proximity radius in embedded mode")
    _add(p, "--jobs", key="jobs", help="worker processes")
    p.add_argument("--gnuplot", help="also write a gnuplot data file (one block per value)")
    return parser


def resolve(args) -> dict:
    """Merge defaults, the config file and explicit flags."""
    conf = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, value in cio.read_config(args.config).items():
            if key not in DEFAULTS:
                raise SystemExit(f"unknown configuration key {key!r}")
            conf[key] = value
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            conf[key] = value
    return {k: _convert(k, v) for k, v in conf.items()}


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _geometry(c):
    return {k: c[k] for k in ("width", "amplitude", "wavelength", "separation", "size")}


def _sim(c) -> SimParams:
    return SimParams(p=c["p"], q=c["q"], density=c["density"], max_timesteps=c["max_timesteps"],
                     seed=c["seed"], w_max=c["w_max"])


def _layout(c) -> LayoutConfig:
    return LayoutConfig(c=c["layout_c"], area_per_node=c["area_per_node"],
                        initial_iterations=c["initial_iterations"], step_iterations=c["step_iterations"],
                        step_temperature=c["step_temperature"], tolerance=c["tolerance"],
                        repulsion_cutoff=c["repulsion_cutoff"])


def _similarity(c) -> SimilarityParams:
    return SimilarityParams(c["score"], c["window"], c["horizon"])


def _out(args):
    return args.out or None


def cmd_simulate(args, c):
    trace = run(build_scenario(c["scenario"], **_geometry(c)), _sim(c))
    cio.write_trace(trace, _out(args))
    logging.info("%d walkers, %d timesteps", trace.n_nodes, trace.t_end)


def cmd_graph(args, c):
    trace = cio.read_trace(args.trace)
    write_edges(graph_from_trace(trace, c["radius"]), _out(args))


def cmd_embed(args, c):
    graph = read_edges(args.edges)
    pos, active = embed_graph(graph, seed=c["seed"], config=_layout(c))
    cio.write_positions(pos, active, graph.node_ids, _out(args))


def cmd_detect(args, c):
    ids, pos, active, _ = cio.read_positions(args.trace)
    config = DetectionConfig(_similarity(c), (c["epsilon"],), c["min_pts"], c["include_self"], c["seed"],
                             stride=c["stride"])
    records = ((t, parts[c["epsilon"]]) for t, _, parts in iter_partitions(pos, active, config))
    cio.write_partitions(records, ids, _out(args))


def cmd_evaluate(args, c):
    parts = cio.read_partitions(args.partitions)
    truth = cio.truth_labels(cio.read_trace(args.truth))
    series = {}
    for t, labels in sorted(parts.items()):
        missing = [n for n in labels if n not in truth]
        if missing:
            raise SystemExit(f"timestep {t}: nodes {missing[:5]} have no ground truth")
        series[t] = nmi(labels, {n: truth[n] for n in labels})
    if not series:
        raise SystemExit("no timesteps to evaluate")
    mean = cio.write_scores(series, _out(args))
    print(f"mean_nmi={mean:.6f}", file=sys.stderr)


def cmd_sweep(args, c):
    values = tuple(v for v in c["values"].split(",") if v.strip()) if c["param"] != "none" else (None,)
    spec = SweepSpec(
        scenario=c["scenario"], geometry=_geometry(c), param=c["param"], values=values or (None,),
        epsilons=_floats(c["epsilons"]), repetitions=c["repetitions"], seed=c["seed"], sim=_sim(c),
        similarity=_similarity(c), min_pts=c["min_pts"], include_self=c["include_self"], mode=c["mode"],
        radius=c["radius"], layout=_layout(c), stride=c["stride"],
    )
    rows = run_sweep(spec, jobs=c["jobs"])
    text = format_results(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.gnuplot:
        summary = summarize(rows)
        with open(args.gnuplot, "w") as fh:
            for value in dict.fromkeys(r["value"] for r in rows):
                fh.write(f"# {spec.param}={value}\n# epsilon mean_nmi\n")
                for eps in dict.fromkeys(r["epsilon"] for r in rows):
                    fh.write(f"{eps} {summary[(value, eps)]:.6f}\n")
                fh.write("\n\n")


COMMANDS = {
    "simulate": cmd_simulate, "graph": cmd_graph, "embed": cmd_embed,
    "detect": cmd_detect, "evaluate": cmd_evaluate, "sweep": cmd_sweep,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    c = resolve(args)
    COMMANDS[args.command](args, c)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
