"""(eps, T)-chains on a grid of the state space.

A chain graph links grid node ``i`` to node ``j`` when some sampled signal
carries ``grid[i]`` to within ``eps`` of ``grid[j]`` after a time
``t >= T``. Its recurrent strongly connected components are the grid-scale
chain sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .flow import HybridSystem, ProductPoint, StateSpace, VectorField, trajectory
from .graph import DirectedGraph, GraphError, recurrent_components
from .parallel import pmap
from .signals import as_fraction, sample_signals


@dataclass(eq=False)
class ChainGraph:
    """Grid nodes, sampled signals and the one-jump relation between nodes.

    ``edges`` maps ``(i, j)`` to a witness ``(signal index, t)``, the first
    sampled pair (in signal order, then time order) that makes the jump.
    """

    sys: HybridSystem
    grid: np.ndarray
    eps: float
    T: Fraction
    T_max: Fraction
    word_len: int
    signals: tuple
    edges: dict

    @property
    def n(self) -> int:
        return len(self.grid)

    @property
    def spacing(self) -> float:
        return float(self.sys.space.distance(self.grid[0], self.grid[1]))

    def successors(self, i: int) -> list[int]:
        return self._succ[i]

    def __post_init__(self):
        succ: list[list[int]] = [[] for _ in range(len(self.grid))]
        for i, j in sorted(self.edges):
            succ[i].append(j)
        self._succ = succ

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    def restricted(self, nodes: frozenset) -> dict:
        return {i: [j for j in self._succ[i] if j in nodes] for i in sorted(nodes)}

    def to_dot(self, components: Sequence[Sequence[int]] = (), name: str = "chains") -> str:
        lines = [f"digraph {name} {{", "  node [shape=point];"]
        placed = set()
        for k, comp in enumerate(components):
            lines.append(f"  subgraph cluster_{k} {{")
            lines.append(f'    label="chain set {k}";')
            for i in comp:
                lines.append(f'    n{i} [xlabel="{self.grid[i]:.12g}"];')
                placed.add(i)
            lines.append("  }")
        for i in range(self.n):
            if i not in placed:
                lines.append(f'    n{i} [xlabel="{self.grid[i]:.12g}"];')
        for i, j in sorted(self.edges):
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def lattice_times(h: Fraction, T, T_max) -> list[Fraction]:
    """Breakpoints ``k h`` of a signal started at a breakpoint, within ``[T, T_max]``."""
    T, T_max = as_fraction(T), as_fraction(T_max)
    if T < 0 or T_max < T:
        raise ValueError("need 0 <= T <= T_max")
    k0 = -((-T) // h)
    k1 = T_max // h
    if k1 < k0:
        raise ValueError("no breakpoint inside [T, T_max]")
    return [k * h for k in range(int(k0), int(k1) + 1)]


def build_chain_graph(sys: HybridSystem, grid_n: int, eps: float, T, T_max, word_len: int = 3,
                      threads: int = 1, grid: np.ndarray | None = None) -> ChainGraph:
    """One-jump relation over ``grid_n`` nodes.

    Signals are all admissible words with at most ``word_len`` symbols, as
    periodic and as eventually-constant signals, started at a breakpoint;
    flow times are the breakpoints ``T <= k h <= T_max``.
    """
    if grid is None:
        if grid_n < 2:
            raise ValueError("chain graph needs at least two grid nodes")
        grid = sys.space.grid(grid_n)
    grid = np.asarray(grid, dtype=float)
    if len(grid) < 2:
        raise ValueError("chain graph needs at least two grid nodes")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    h = sys.h
    times = lattice_times(h, T, T_max)
    t_hi = float(times[-1])
    first = int(round(float(times[0] / h)))
    sigs = tuple(sample_signals(sys.graph, h, range(1, word_len + 1)))
    space = sys.space

    def hits(i: int) -> list[tuple[int, int, int, Fraction]]:
        found = []
        for s_idx, sig in enumerate(sigs):
            tr = trajectory(sys, ProductPoint(float(grid[i]), sig), t_hi, float(h))
            xs = tr.states[first:first + len(times)]
            d = space.distance(xs[:, None], grid[None, :])
            for k, j in zip(*np.nonzero(d <= eps)):
                found.append((int(j), s_idx, int(k), times[int(k)]))
        return found

    results = pmap(hits, range(len(grid)), threads)
    edges: dict = {}
    for i, found in enumerate(results):
        for j, s_idx, k, t in sorted(found, key=lambda f: (f[1], f[2], f[0])):
            edges.setdefault((i, j), (s_idx, t))
    return ChainGraph(sys, grid, float(eps), as_fraction(T), as_fraction(T_max), word_len, sigs, edges)


@dataclass
class ChainSetResult:
    components: list
    points: list
    witnesses: list
    eps: float
    T: float

    def tube(self, k: int, space: StateSpace) -> tuple:
        lo, hi = hull(self.points[k], space)
        return lo - self.eps, hi + self.eps

    def component_of(self, i: int) -> int | None:
        for k, comp in enumerate(self.components):
            if i in comp:
                return k
        return None

    def to_csv(self) -> str:
        lines = ["component,node,x"]
        for k, comp in enumerate(self.components):
            for i, x in zip(comp, self.points[k]):
                lines.append(f"{k},{i},{x:.12g}")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {"eps": self.eps, "T": self.T,
                "components": [{"nodes": list(c), "lo": min(p), "hi": max(p), "witness": w}
                               for c, p, w in zip(self.components, self.points, self.witnesses)]}


def hull(points: Sequence[float], space: StateSpace) -> tuple[float, float]:
    """Smallest interval (or arc, as ``(start, end)`` with ``end`` possibly
    past the period) holding ``points``."""
    xs = np.sort(space.wrap(np.asarray(points, dtype=float)))
    if not space.is_circle or len(xs) == 1:
        return float(xs[0]), float(xs[-1])
    gaps = np.diff(np.append(xs, xs[0] + space.period))
    k = int(np.argmax(gaps))
    start = xs[(k + 1) % len(xs)]
    return float(start), float(start + space.period - gaps[k])


def _in_tube(states: np.ndarray, nodes_x: np.ndarray, eps: float, space: StateSpace) -> bool:
    lo, hi = hull(nodes_x, space)
    if space.is_circle:
        if hi - lo + 2 * eps >= space.period:
            return True
        rel = np.mod(np.asarray(states) - (lo - eps), space.period)
        return bool(np.all(rel <= hi - lo + 2 * eps + 1e-12))
    return bool(np.all((states >= lo - eps - 1e-12) & (states <= hi + eps + 1e-12)))


def tube_jumps(cg: ChainGraph, i: int, members: frozenset) -> dict:
    """Jumps ``i -> j`` into ``members`` whose whole flow segment stays in the
    members' tube, with the first witness ``(signal index, t)`` for each."""
    comp = sorted(members)
    xs = cg.grid[comp]
    lo, hi = hull(xs, cg.sys.space)
    h = cg.sys.h
    times = lattice_times(h, cg.T, cg.T_max)
    first = int(round(float(times[0] / h)))
    sub = 8
    out: dict = {}
    for s_idx, sig in enumerate(cg.signals):
        tr = trajectory(cg.sys, ProductPoint(float(cg.grid[i]), sig), float(times[-1]), float(h) / sub)
        ok = _inside_prefix(tr.states, xs, cg.eps, cg.sys.space)
        for k, t in enumerate(times):
            idx = (first + k) * sub
            if not ok[idx]:
                break
            d = cg.sys.space.distance(tr.states[idx], xs)
            for j in np.nonzero(d <= cg.eps)[0]:
                out.setdefault(comp[int(j)], (s_idx, t))
    return out


def _inside_prefix(states: np.ndarray, nodes_x: np.ndarray, eps: float, space: StateSpace) -> np.ndarray:
    """``ok[n]``: samples ``0..n`` all lie in the tube."""
    inside = np.array([_in_tube(np.array([x]), nodes_x, eps, space) for x in states]) \
        if space.is_circle else _tube_mask(states, nodes_x, eps)
    return np.logical_and.accumulate(inside)


def _tube_mask(states: np.ndarray, nodes_x: np.ndarray, eps: float) -> np.ndarray:
    lo, hi = float(np.min(nodes_x)), float(np.max(nodes_x))
    return (states >= lo - eps - 1e-12) & (states <= hi + eps + 1e-12)


def chain_sets(cg: ChainGraph) -> ChainSetResult:
    """Recurrent strongly connected components of the chain graph.

    Each component gets an invariance witness: a member, a sampled signal and
    an in-component jump whose flow segment stays in the component's tube
    (its hull widened by ``eps``), or ``None`` when no sampled jump does.
    """
    comps = recurrent_components(cg.n, cg.successors, lambda i: cg.has_edge(i, i))
    points, witnesses = [], []
    for comp in comps:
        members = frozenset(comp)
        xs = cg.grid[comp]
        points.append([float(x) for x in xs])
        wit = None
        for i in comp:
            jumps = tube_jumps(cg, i, members)
            if jumps:
                j = min(jumps)
                s_idx, t = jumps[j]
                wit = {"node": i, "x": float(cg.grid[i]), "to": j, "t": float(t),
                       "signal": cg.signals[s_idx].to_config()}
                break
        witnesses.append(wit)
    return ChainSetResult([list(c) for c in comps], points, witnesses, cg.eps, float(cg.T))


@dataclass
class LiftCheck:
    passed: bool
    invariant: bool
    transitive: bool
    core: list = field(default_factory=list)
    boundary: list = field(default_factory=list)
    failing_nodes: list = field(default_factory=list)
    unreachable_pairs: list = field(default_factory=list)
    strict_invariant_nodes: int = 0
    checked_nodes: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def lift_projection_check(cg: ChainGraph, component: Sequence[int], horizon: float = 50,
                          strict: bool = False) -> LiftCheck:
    """Grid-scale test that ``component`` projects a lifted chain set.

    Invariance: the core of the component is the set of members with a jump
    in from the component and a jump out into it whose flow segments stay in
    the component's tube (hull widened by ``eps``), so a bi-infinite in-tube
    chain passes through every core member. The core must be nonempty and
    every other member must lie within ``eps`` of the core's hull; those
    members are reported as ``boundary`` (they join the component through
    transient chains, a grid-resolution effect). Transitivity: every ordered
    pair of members is joined by a chain that never leaves the component.

    With ``strict=True`` each member is also flowed for ``horizon * h`` both
    ways under every sampled signal and the number of members some signal
    keeps in the tube is reported, as a diagnostic only.
    """
    comp = sorted(set(int(i) for i in component))
    members = frozenset(comp)
    xs = cg.grid[comp]
    space = cg.sys.space
    jumps = {i: tube_jumps(cg, i, members) for i in comp}
    core, loose = [], []
    for i in comp:
        outs = bool(jumps[i])
        ins = any(i in jumps[k] for k in comp)
        (core if outs and ins else loose).append({"node": i, "x": float(cg.grid[i]), "in": ins, "out": outs})
    boundary, failing = [], []
    if core:
        lo, hi = hull([c["x"] for c in core], space)
        for entry in loose:
            if space.is_circle:
                gap = min(space.distance(entry["x"], lo), space.distance(entry["x"], hi))
                inside = (entry["x"] - lo) % space.period <= hi - lo
                near = inside or gap <= cg.eps + 1e-12
            else:
                near = lo - cg.eps - 1e-12 <= entry["x"] <= hi + cg.eps + 1e-12
            (boundary if near else failing).append(entry)
    else:
        failing = loose
    sub = cg.restricted(members)
    unreachable = []
    for i in comp:
        seen = set()
        stack = list(sub[i])
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(sub[v])
        unreachable += [[i, j] for j in comp if j not in seen]
    strict_ok = 0
    if strict:
        h = float(cg.sys.h)
        for i in comp:
            for sig in cg.signals:
                p = ProductPoint(float(cg.grid[i]), sig)
                fw = trajectory(cg.sys, p, horizon * h, h / 4)
                bw = trajectory(cg.sys, p, horizon * h, h / 4, backward=True)
                if _in_tube(fw.states, xs, cg.eps, space) and _in_tube(bw.states, xs, cg.eps, space):
                    strict_ok += 1
                    break
    invariant = bool(core) and not failing
    return LiftCheck(invariant and not unreachable, invariant, not unreachable, [c["node"] for c in core],
                     [b["node"] for b in boundary], failing, unreachable[:20], strict_ok, len(comp))


# -- perturbation sweep ---------------------------------------------------------


@dataclass
class SweepRow:
    rho: float
    cluster: int
    match: int | None
    hausdorff: float
    lo: float
    hi: float
    components: int
    bound: float


@dataclass
class SweepResult:
    rhos: list
    results: list
    clusters: list
    rows: list
    constant: float
    spacing: float
    eps: float
    note: str = ("chain sets closer than eps are pooled into clusters; clusters are matched to the "
                 "unperturbed ones by largest node overlap, then smallest Hausdorff distance, "
                 "ties to the smaller index")

    def matched_counts(self) -> list[int]:
        return [len({r.match for r in self.rows if r.rho == rho and r.match is not None}) for rho in self.rhos]

    def cluster_counts(self) -> list[int]:
        return [len(c) for c in self.clusters]

    def distances(self, match: int) -> list[float]:
        """Hausdorff distance of the cluster matched to ``match``, per rho (in ``rhos`` order)."""
        out = []
        for rho in self.rhos:
            ds = [r.hausdorff for r in self.rows if r.rho == rho and r.match == match]
            out.append(min(ds) if ds else float("inf"))
        return out

    def within_bound(self) -> bool:
        return all(r.hausdorff <= r.bound + 1e-12 for r in self.rows)

    def monotone(self) -> bool:
        """Distances never grow as rho decreases along the ladder."""
        order = sorted(range(len(self.rhos)), key=lambda k: -self.rhos[k])
        for m in range(len(self.clusters[self.rhos.index(0.0)])):
            ds = self.distances(m)
            seq = [ds[k] for k in order]
            if any(b > a + 1e-12 for a, b in zip(seq, seq[1:])):
                return False
        return True

    def to_csv(self) -> str:
        lines = ["rho,cluster,match,hausdorff,bound,lo,hi,components"]
        for r in self.rows:
            m = "" if r.match is None else str(r.match)
            lines.append(f"{r.rho:.12g},{r.cluster},{m},{r.hausdorff:.12g},{r.bound:.12g},"
                         f"{r.lo:.12g},{r.hi:.12g},{r.components}")
        return "\n".join(lines) + "\n"


def hausdorff(a: Sequence[float], b: Sequence[float], space: StateSpace) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = space.distance(a[:, None], b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def cluster_components(res: ChainSetResult, space: StateSpace, gap: float) -> list[list[int]]:
    """Group components whose points come within ``gap`` of each other
    (single linkage); each group lists component indices."""
    n = len(res.components)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(n):
        for b in range(a + 1, n):
            d = space.distance(np.asarray(res.points[a])[:, None], np.asarray(res.points[b])[None, :])
            if float(d.min()) <= gap + 1e-12:
                parent[find(b)] = find(a)
    groups: dict = {}
    for a in range(n):
        groups.setdefault(find(a), []).append(a)
    return sorted(groups.values())


def displacement_constant(base: VectorField, space: StateSpace) -> float:
    """Largest ``1 / |X'(x*)|`` over the fixed points of ``base``: to first
    order a constant push of size ``rho`` moves a hyperbolic fixed point by at
    most this times ``rho``."""
    from .limits import fixed_points

    worst = 0.0
    for x in fixed_points(base, space):
        slope = abs(base.slope(x))
        if slope == 0.0:
            return float("inf")
        worst = max(worst, 1.0 / slope)
    return worst


def perturbed_system(base: VectorField, rho: float, u: Sequence[float], graph: DirectedGraph,
                     space: StateSpace, h) -> HybridSystem:
    fields = tuple(base.perturbed(rho, ui) for ui in u)
    return HybridSystem(graph, fields, space, h, name=f"rho={rho:g}")


def perturbation_sweep(base: VectorField, rhos: Sequence[float], u: Sequence[float], graph: DirectedGraph,
                       space: StateSpace, h, grid_n: int, eps: float, T, T_max, word_len: int = 3,
                       constant: float | None = None, threads: int = 1) -> SweepResult:
    """Chain sets of ``x' = X(x) + rho u_v`` for each ``rho``, matched to ``rho = 0``.

    ``u`` lists the per-vertex constants; one of them must be 0 on a vertex
    with a self-loop, so the unperturbed field stays available at every
    ``rho``. The unperturbed run is added when ``rhos`` lacks 0. Chain sets
    closer than ``eps`` cannot be told apart at that resolution and are pooled
    into clusters before matching. Each row carries the bound
    ``2 (spacing + rho C)``, with ``C`` from :func:`displacement_constant`
    unless given.
    """
    zero = [v for v, ui in enumerate(u) if ui == 0]
    if len(u) != graph.n_vertices:
        raise ValueError("one perturbation constant per vertex")
    if not zero or not any(graph.has_self_loop(v) for v in zero):
        raise GraphError("need a vertex with u = 0 that carries a self-loop")
    rhos = [float(r) for r in rhos]
    if 0.0 not in rhos:
        rhos = rhos + [0.0]
    if constant is None:
        constant = displacement_constant(base, space)
    results = {}
    spacing = None
    for rho in sorted(set(rhos), reverse=True):
        sys = perturbed_system(base, rho, u, graph, space, h)
        cg = build_chain_graph(sys, grid_n, eps, T, T_max, word_len, threads)
        spacing = cg.spacing
        results[rho] = chain_sets(cg)

    def pooled(res):
        groups = cluster_components(res, space, eps)
        return [(sorted(set().union(*(res.components[k] for k in g))),
                 sorted(x for k in g for x in res.points[k]), len(g)) for g in groups]

    clusters = {rho: pooled(res) for rho, res in results.items()}
    ref = clusters[0.0]
    rows = []
    for rho in rhos:
        for k, (nodes, pts, n_comp) in enumerate(clusters[rho]):
            best = None
            for m, (ref_nodes, ref_pts, _) in enumerate(ref):
                overlap = len(set(nodes) & set(ref_nodes))
                dist = hausdorff(pts, ref_pts, space)
                key = (-overlap, dist, m)
                if best is None or key < best[0]:
                    best = (key, m, dist)
            match, dist = (best[1], best[2]) if best else (None, float("inf"))
            rows.append(SweepRow(rho, k, match, dist, min(pts), max(pts), n_comp,
                                 2 * (spacing + rho * constant)))
    return SweepResult(rhos, [results[r] for r in rhos], [clusters[r] for r in rhos], rows,
                       float(constant), spacing, float(eps))
