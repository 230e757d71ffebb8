"""Command-line front end.

Exit codes: 0 success, 1 a checked claim failed, 2 bad usage or config.
Every command writes its artifacts into ``--out`` (default ``$MORSEFLOW_OUT``
or ``runs``); all JSON carries the seed.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys as _sys
from fractions import Fraction

from . import chains as chains_mod
from .config import (
    RunConfig, candidates_from_config, graph_from_config, signal_from_config, space_from_config,
    system_from_config, system_to_config,
)
from .flow import ConfigError, ProductPoint, VectorField, trajectory
from .graph import DirectedGraph, GraphError, communicating_classes, invariant_class_exists, to_dot, validate_n_graph
from .limits import SamplingPlan, alpha_limit_estimate, omega_limit_estimate, verify_morse_decomposition
from .scenarios import SCENARIOS, dumps, run_scenario
from .signals import SymbolicSignal, chaos_certificate, distance, shift
from .svg import line_plot

def _write(out_dir: str, name: str, text: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path


def _signal_arg(args, doc: dict, h) -> SymbolicSignal:
    if args.word is not None:
        word = [int(c) for c in args.word.replace(",", " ").split()]
        return signal_from_config({"word": word, "tau": args.tau, "anchor": args.anchor,
                                   "extension": args.extension}, h)
    if "signal" in doc:
        return signal_from_config(doc["signal"], h)
    raise ConfigError("no signal given: pass --word or add a [signal] table")


# -- commands ---------------------------------------------------------------------


def cmd_graph(rc: RunConfig, args) -> int:
    doc = rc.document()
    g = graph_from_config(doc.get("graph", doc))
    report = validate_n_graph(g)
    classes = communicating_classes(g) if report.is_n_graph else []
    lines = [f"vertices {g.n_vertices}, edges {len(g.edges)}, N-graph {report.is_n_graph}"]
    for k, c in enumerate(classes):
        lines.append(f"class {k}: {c.sorted_members()} {c.kind.value}")
    print("\n".join(lines))
    out = {"seed": rc.seed, "vertices": g.n_vertices, "edges": sorted(g.edges), "n_graph": report.is_n_graph,
           "classes": [{"members": c.sorted_members(), "kind": c.kind.value} for c in classes]}
    if classes:
        out["invariant_class"] = invariant_class_exists(g).sorted_members()
    _write(rc.out_dir, "graph.json", dumps(out))
    _write(rc.out_dir, "graph.dot", to_dot(g, classes or None))
    return 0 if report.is_n_graph else 1


def cmd_signal(rc: RunConfig, args) -> int:
    doc = rc.document()
    g = graph_from_config(_need_table(doc, "graph"))
    h = Fraction(str(doc.get("h", 1)))
    sigs = [signal_from_config(s, h) for s in doc.get("signals", [])]
    for s in sigs:
        s.require_admissible(g)
    out: dict = {"seed": rc.seed, "window": args.window, "signals": [s.to_config() for s in sigs]}
    if len(sigs) >= 2:
        out["distances"] = [[distance(a, b, args.window).value for b in sigs] for a in sigs]
    if args.shift is not None:
        out["shifted"] = [shift(s, Fraction(str(args.shift))).to_config() for s in sigs]
    if args.chaos_len:
        cert = chaos_certificate(g, args.chaos_len, args.eps)
        out["chaos"] = cert
        _write(rc.out_dir, "signal.json", dumps(out))
        return 0 if cert["transitive"] and cert["sensitive"] else 1
    _write(rc.out_dir, "signal.json", dumps(out))
    return 0


def _need_table(doc: dict, key: str) -> dict:
    if key not in doc:
        raise ConfigError(f"missing [{key}] table")
    return doc[key]


def cmd_simulate(rc: RunConfig, args) -> int:
    doc = rc.document()
    sysm = system_from_config(doc)
    sig = _signal_arg(args, doc, sysm.h)
    dt = args.dt if args.dt else float(sysm.h) / 16
    tr = trajectory(sysm, ProductPoint(args.x0, sig), args.t_end, dt, backward=args.backward)
    _write(rc.out_dir, "trajectory.csv", tr.to_csv())
    _write(rc.out_dir, "trajectory.svg", line_plot([(f"x0={args.x0:g}", tr.times, tr.states)],
                                                   sysm.name or "trajectory"))
    _write(rc.out_dir, "simulate.json", dumps({"seed": rc.seed, "system": system_to_config(sysm),
                                               "signal": sig.to_config(), "x0": args.x0,
                                               "t_end": args.t_end, "backward": args.backward,
                                               "final": float(tr.states[-1]), "samples": len(tr)}))
    return 0


def cmd_limitset(rc: RunConfig, args) -> int:
    doc = rc.document()
    sysm = system_from_config(doc)
    sig = _signal_arg(args, doc, sysm.h)
    h = float(sysm.h)
    p = ProductPoint(args.x0, sig)
    kw = dict(burn=args.burn * h, horizon=args.horizon * h, r=args.radius)
    om = omega_limit_estimate(sysm, p, **kw)
    al = alpha_limit_estimate(sysm, p, **kw)
    _write(rc.out_dir, "limitset.json", dumps({"seed": rc.seed, "x0": args.x0, "signal": sig.to_config(),
                                               "omega": om.to_dict(), "alpha": al.to_dict()}))
    print(f"omega {list(om.points)}\nalpha {list(al.points)}")
    return 0


def cmd_morse(rc: RunConfig, args) -> int:
    doc = rc.document()
    sysm = system_from_config(doc)
    cands = candidates_from_config(_need_table(doc, "candidates"))
    plan = SamplingPlan(grid_n=args.grid, word_len=args.word_len, burn=args.burn, horizon=args.horizon,
                        containment_tol=args.tol, threads=rc.threads)
    rep = verify_morse_decomposition(sysm, cands, plan)
    _write(rc.out_dir, "morse.json", dumps({"seed": rc.seed, **rep.to_dict()}))
    for name in rep.CONDITIONS:
        print(f"{name}: {'pass' if rep.conditions[name].passed else 'FAIL'}")
    return 0 if rep.passed else 1


def cmd_chains(rc: RunConfig, args) -> int:
    doc = rc.document()
    sysm = system_from_config(doc)
    cg = chains_mod.build_chain_graph(sysm, args.grid, args.eps, Fraction(str(args.T)),
                                      Fraction(str(args.T_max if args.T_max is not None else args.T)),
                                      args.word_len, threads=rc.threads)
    res = chains_mod.chain_sets(cg)
    lifts = [chains_mod.lift_projection_check(cg, c).to_dict() for c in res.components] if args.lift else None
    _write(rc.out_dir, "chains.dot", cg.to_dot(res.components))
    _write(rc.out_dir, "chains.csv", res.to_csv())
    out = {"seed": rc.seed, "grid": args.grid, "eps": args.eps, "T": args.T, "T_max": args.T_max,
           "word_len": args.word_len, "edges": len(cg.edges), **res.to_dict()}
    if lifts is not None:
        out["lift_checks"] = lifts
    _write(rc.out_dir, "chains.json", dumps(out))
    print(f"{len(res.components)} chain sets")
    for c, p in zip(res.components, res.points):
        print(f"  [{min(p):.6g}, {max(p):.6g}] ({len(c)} nodes)")
    return 0 if lifts is None or all(x["passed"] for x in lifts) else 1


def cmd_sweep(rc: RunConfig, args) -> int:
    doc = rc.document()
    sw = _need_table(doc, "sweep")
    base = VectorField.from_config(_need(sw, "base"))
    u = [float(x) for x in _need(sw, "u")]
    rhos = [float(x) for x in sw.get("rhos", [0.2, 0.1, 0.05, 0.0])]
    g = graph_from_config(doc["graph"]) if "graph" in doc else DirectedGraph.complete(len(u))
    space = space_from_config(doc.get("space", {"kind": "interval", "lo": -1.0, "hi": 1.0}))
    h = Fraction(str(doc.get("h", 1)))
    res = chains_mod.perturbation_sweep(base, rhos, u, g, space, h, args.grid, args.eps, Fraction(str(args.T)),
                                        Fraction(str(args.T_max)), args.word_len, threads=rc.threads)
    _write(rc.out_dir, "sweep.csv", res.to_csv())
    counts = res.cluster_counts()
    ok = len(set(res.matched_counts())) == 1 and res.monotone() and res.within_bound()
    _write(rc.out_dir, "sweep.json", dumps({
        "seed": rc.seed, "rhos": res.rhos, "constant": res.constant, "spacing": res.spacing, "eps": res.eps,
        "cluster_counts": counts, "matched_counts": res.matched_counts(), "monotone": res.monotone(),
        "within_bound": res.within_bound(), "note": res.note,
        "rows": [r.__dict__ for r in res.rows]}))
    print(f"clusters per rho {counts}, monotone {res.monotone()}, within bound {res.within_bound()}")
    return 0 if ok else 1


def _need(cfg: dict, key: str):
    if key not in cfg:
        raise ConfigError(f"missing key {key!r}")
    return cfg[key]


def cmd_scenario(rc: RunConfig, args) -> int:
    rep = run_scenario(args.name, seed=rc.seed, threads=rc.threads, **_scenario_kw(args))
    rep.write(rc.out_dir)
    for c in rep.claims:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.id}")
    return 0 if rep.passed else 1


def _scenario_kw(args) -> dict:
    if args.name == "circle" and args.draws is not None:
        return {"draws": args.draws}
    if args.name == "flicker" and args.points is not None:
        return {"n_points": args.points}
    return {}


# -- parser -----------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(_sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand from resetting flags given before it
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="worker threads (output does not depend on it)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for randomised draws (default 0)")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output directory (default $MORSEFLOW_OUT or ./runs)")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)

    p = _Parser(prog="morseflow", description="Hybrid flows over switching signals: simulation, "
                "limit sets, Morse decompositions and chain sets.", parents=[common])
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def signal_opts(sp):
        sp.add_argument("--word", help="signal word, e.g. '0,1'")
        sp.add_argument("--extension", default="periodic", choices=["periodic", "constant-ends"])
        sp.add_argument("--tau", default="0", help="offset of the first breakpoint")
        sp.add_argument("--anchor", type=int, default=0)

    g = sub.add_parser("graph", help="communicating classes of a graph", parents=[common])
    g.add_argument("action", choices=["analyze"])
    g.add_argument("config")

    s = sub.add_parser("signal", help="signal distances, shifts and the chaos certificate", parents=[common])
    s.add_argument("config")
    s.add_argument("--window", type=int, default=20)
    s.add_argument("--shift", default=None)
    s.add_argument("--chaos-len", type=int, default=0)
    s.add_argument("--eps", type=float, default=0.05)

    sm = sub.add_parser("simulate", help="sample one trajectory", parents=[common])
    sm.add_argument("config")
    sm.add_argument("--x0", type=float, required=True)
    sm.add_argument("--t-end", type=float, default=20.0)
    sm.add_argument("--dt", type=float, default=None)
    sm.add_argument("--backward", action="store_true")
    signal_opts(sm)

    ls = sub.add_parser("limitset", help="omega and alpha limit estimates", parents=[common])
    ls.add_argument("config")
    ls.add_argument("--x0", type=float, required=True)
    ls.add_argument("--burn", type=float, default=200, help="in units of h")
    ls.add_argument("--horizon", type=float, default=400, help="in units of h")
    ls.add_argument("--radius", type=float, default=1e-3)
    signal_opts(ls)

    m = sub.add_parser("morse", help="check a Morse decomposition", parents=[common])
    m.add_argument("config")
    m.add_argument("--grid", type=int, default=21)
    m.add_argument("--word-len", type=int, default=3)
    m.add_argument("--burn", type=float, default=200)
    m.add_argument("--horizon", type=float, default=400)
    m.add_argument("--tol", type=float, default=5e-3)

    c = sub.add_parser("chains", help="(eps, T)-chain graph and chain sets", parents=[common])
    c.add_argument("config")
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--T", type=float, required=True)
    c.add_argument("--T-max", dest="T_max", type=float, default=None)
    c.add_argument("--grid", type=int, default=201)
    c.add_argument("--word-len", type=int, default=3)
    c.add_argument("--lift", action="store_true", help="also run the lift/projection check per chain set")

    w = sub.add_parser("sweep", help="chain sets under a shrinking perturbation", parents=[common])
    w.add_argument("config")
    w.add_argument("--grid", type=int, default=301)
    w.add_argument("--eps", type=float, default=0.025)
    w.add_argument("--T", type=float, default=1)
    w.add_argument("--T-max", dest="T_max", type=float, default=3)
    w.add_argument("--word-len", type=int, default=3)

    sc = sub.add_parser("scenario", help="reproduce one worked example", parents=[common])
    sc.add_argument("name", choices=SCENARIOS)
    sc.add_argument("--draws", type=int, default=None, help="circle: number of random draws")
    sc.add_argument("--points", type=int, default=None, help="flicker: number of start points")
    return p


COMMANDS = {"graph": cmd_graph, "signal": cmd_signal, "simulate": cmd_simulate, "limitset": cmd_limitset,
            "morse": cmd_morse, "chains": cmd_chains, "sweep": cmd_sweep, "scenario": cmd_scenario}


def dispatch(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    verbose = getattr(args, "verbose", False)
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(message)s")
    out = getattr(args, "out", None) or os.environ.get("MORSEFLOW_OUT") or "runs"
    path = getattr(args, "config", None)
    try:
        rc = RunConfig(args.command, path, vars(args), out, getattr(args, "seed", 0), getattr(args, "threads", 1))
        return COMMANDS[args.command](rc, args)
    except (ConfigError, GraphError, KeyError, TypeError, ValueError) as err:
        print(f"morseflow: error: {err}", file=_sys.stderr)
        return 2


def main() -> None:
    _sys.exit(dispatch())


if __name__ == "__main__":
    main()
