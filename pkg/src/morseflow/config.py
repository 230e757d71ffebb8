"""Reading system descriptions from TOML or JSON.

A system file looks like::

    name = "flicker"
    h = "3/4"                      # number or "p/q"

    [space]
    kind = "interval"              # or "circle" with `period`
    lo = -1.0
    hi = 1.0

    [graph]
    vertices = 2
    edges = [[0, 1], [1, 0]]       # or `complete = true`, `self_loops = false`

    [[fields]]
    roots = [1, -1, -0.5]          # or poly = [...] / trigpoly = {...}

Optional tables: ``[signal]`` (a default signal), ``[[candidates]]`` (Morse
candidates) and ``[sweep]`` (perturbation sweep: ``base``, ``u``, ``rhos``).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import tomli

from .flow import ConfigError, HybridSystem, StateSpace, VectorField
from .graph import DirectedGraph, GraphError
from .limits import MorseCandidate
from .signals import SymbolicSignal, as_fraction


def load_document(path: str) -> dict:
    """Parse ``path`` as JSON when it ends in ``.json``, TOML otherwise."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        if path.endswith(".json"):
            return json.loads(raw.decode("utf-8"))
        return tomli.loads(raw.decode("utf-8"))
    except (tomli.TOMLDecodeError, json.JSONDecodeError, UnicodeDecodeError) as err:
        raise ConfigError(f"cannot parse {path}: {err}") from err


def _need(cfg: dict, key: str, where: str):
    if key not in cfg:
        raise ConfigError(f"{where}: missing key {key!r}")
    return cfg[key]


def graph_from_config(cfg: dict) -> DirectedGraph:
    n = _need(cfg, "vertices", "graph")
    if not isinstance(n, int):
        raise ConfigError("graph.vertices must be an integer")
    if cfg.get("complete"):
        return DirectedGraph.complete(n, bool(cfg.get("self_loops", True)))
    edges = _need(cfg, "edges", "graph")
    return DirectedGraph.from_edges(n, edges, one_based=bool(cfg.get("one_based", False)))


def space_from_config(cfg: dict) -> StateSpace:
    kind = cfg.get("kind", "interval")
    if kind == "circle":
        return StateSpace.circle(cfg["period"]) if "period" in cfg else StateSpace.circle()
    if kind == "interval":
        return StateSpace.interval(_need(cfg, "lo", "space"), _need(cfg, "hi", "space"))
    raise ConfigError(f"unknown space kind {kind!r}")


def system_from_config(cfg: dict) -> HybridSystem:
    graph = graph_from_config(_need(cfg, "graph", "system"))
    space = space_from_config(cfg.get("space", {"kind": "interval", "lo": -1.0, "hi": 1.0}))
    fields = tuple(VectorField.from_config(f) for f in _need(cfg, "fields", "system"))
    try:
        h = as_fraction(_need(cfg, "h", "system"))
    except (ValueError, ZeroDivisionError) as err:
        raise ConfigError(f"bad dwell time: {err}") from err
    kw = {"divisions": int(cfg["divisions"])} if "divisions" in cfg else {}
    return HybridSystem(graph, fields, space, h, name=str(cfg.get("name", "")), **kw)


def system_to_config(sys: HybridSystem) -> dict:
    h = sys.h
    return {"name": sys.name, "h": float(h) if float(h) == h else str(h), "divisions": sys.divisions,
            "space": sys.space.to_config(), "graph": sys.graph.to_config(),
            "fields": [f.to_config() for f in sys.fields]}


def signal_from_config(cfg: dict, h) -> SymbolicSignal:
    try:
        return SymbolicSignal.from_config(cfg, h)
    except (KeyError, ValueError, GraphError) as err:
        raise ConfigError(f"bad signal: {err}") from err


def candidates_from_config(items: list) -> list[MorseCandidate]:
    try:
        return [MorseCandidate.from_config(c) for c in items]
    except (KeyError, ValueError) as err:
        raise ConfigError(f"bad Morse candidate: {err}") from err


@dataclass
class RunConfig:
    """One CLI invocation: the command, its input file, parameters and output place."""

    command: str
    system_path: str | None
    params: dict = field(default_factory=dict)
    out_dir: str = "runs"
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.system_path is not None and not os.path.isfile(self.system_path):
            raise ConfigError(f"config file not found: {self.system_path}")
        if self.threads < 1:
            raise ConfigError("--threads must be at least 1")

    def document(self) -> dict:
        return load_document(self.system_path) if self.system_path else {}
