"""Limit-set estimates, Morse decomposition checks and region tests.

Everything here is sampled: limit sets are read off long trajectories, and
each Morse condition is replaced by a finite proxy that reports the samples
it used and the first sample that broke it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .flow import HybridSystem, ProductPoint, StateSpace, VectorField, product_flow, trajectory
from .graph import DirectedGraph, GraphError, communicating_classes, shortest_path
from .parallel import pmap
from .signals import Extension, SymbolicSignal, sample_signals

DEFAULT_BURN = 200
DEFAULT_HORIZON = 400
DEFAULT_RADIUS = 1e-3


# -- limit sets -----------------------------------------------------------------


@dataclass(frozen=True)
class LimitSetEstimate:
    """Cluster representatives of a trajectory tail.

    ``points`` is an ``r``-net of the samples taken over ``[burn, horizon]``
    (``[-horizon, -burn]`` for alpha limits): representatives are more than
    ``cluster_radius`` apart and every sample lies within ``cluster_radius``
    of one.
    """

    points: tuple
    cluster_radius: float
    burn_time: float
    horizon: float
    forward: bool = True
    spread: float = 0.0

    def _pairwise(self, targets: Sequence[float], space: StateSpace) -> np.ndarray:
        return space.distance(np.asarray(self.points, dtype=float)[:, None],
                              np.asarray(targets, dtype=float)[None, :])

    def distance_to(self, targets: Sequence[float], space: StateSpace) -> float:
        """Largest distance from a representative to the nearest target."""
        if not len(targets):
            return math.inf
        return float(self._pairwise(targets, space).min(axis=1).max())

    def nearest(self, targets: Sequence[float], space: StateSpace) -> float:
        """Smallest distance from any representative to any target."""
        if not len(targets):
            return math.inf
        return float(self._pairwise(targets, space).min())

    def to_dict(self) -> dict:
        return {"points": list(self.points), "cluster_radius": self.cluster_radius,
                "burn": self.burn_time, "horizon": self.horizon,
                "direction": "forward" if self.forward else "backward", "spread": self.spread}


def cluster_points(samples: np.ndarray, r: float, space: StateSpace) -> tuple:
    """Greedy ``r``-net of 1-D samples (circle aware), in increasing order."""
    xs = np.sort(space.wrap(np.asarray(samples, dtype=float)))
    reps: list[float] = []
    i = 0
    while i < len(xs):
        reps.append(float(xs[i]))
        i = int(np.searchsorted(xs, xs[i] + r, side="right"))
    if space.is_circle and len(reps) > 1 and reps[0] + space.period - reps[-1] <= r:
        reps.pop()
    return tuple(reps)


def _limit_estimate(sys, p, burn, horizon, r, sample_dt, forward):
    h = float(sys.h)
    burn = DEFAULT_BURN * h if burn is None else float(burn)
    horizon = DEFAULT_HORIZON * h if horizon is None else float(horizon)
    if not burn < horizon:
        raise ValueError("burn time must be smaller than the horizon")
    sample_dt = h / 4 if sample_dt is None else float(sample_dt)
    # jump straight to the burn time; the flow composes, so only the tail is sampled
    start = product_flow(sys, burn if forward else -burn, p)
    tail = trajectory(sys, start, horizon - burn, sample_dt, backward=not forward).states
    pts = cluster_points(tail, r, sys.space)
    spread = float(sys.space.distance(tail.min(), tail.max())) if len(tail) else 0.0
    return LimitSetEstimate(pts, r, burn, horizon, forward, spread)


def omega_limit_estimate(sys: HybridSystem, p: ProductPoint, burn: float | None = None,
                         horizon: float | None = None, r: float = DEFAULT_RADIUS,
                         sample_dt: float | None = None) -> LimitSetEstimate:
    """Forward limit set of ``p`` read off samples in ``[burn, horizon]``.

    Defaults: ``burn = 200 h``, ``horizon = 400 h``, samples every ``h / 4``.
    """
    return _limit_estimate(sys, p, burn, horizon, r, sample_dt, True)


def alpha_limit_estimate(sys: HybridSystem, p: ProductPoint, burn: float | None = None,
                         horizon: float | None = None, r: float = DEFAULT_RADIUS,
                         sample_dt: float | None = None) -> LimitSetEstimate:
    """Backward counterpart of :func:`omega_limit_estimate`."""
    return _limit_estimate(sys, p, burn, horizon, r, sample_dt, False)


def fixed_points(f: VectorField, space: StateSpace, n: int = 4001, tol: float = 1e-9) -> tuple:
    """Zeros of ``f`` on the state space, including touching (even) zeros."""
    if space.is_circle:
        xs = np.linspace(0.0, space.period, n)
    else:
        xs = np.linspace(space.lo, space.hi, n)
    if not f.cos_ and not f.sin_ and not space.is_circle:
        coeffs = list(f.poly) or [0.0]
        coeffs[0] = coeffs[0] + f.offset
        if not any(coeffs):
            raise ValueError("the zero field has a continuum of fixed points")
        roots = np.polynomial.polynomial.polyroots(coeffs) if len(coeffs) > 1 else np.array([])
        cands = [float(z.real) for z in np.atleast_1d(roots) if abs(z.imag) < 1e-6]
    else:
        ys = f(xs)
        cands = []
        for a, b, ya, yb in zip(xs, xs[1:], ys, ys[1:]):
            if ya == 0.0:
                cands.append(float(a))
            elif ya * yb < 0:
                cands.append(brentq(f, a, b, xtol=1e-15))
        # even-order zeros do not change sign; catch them as small local minima of |f|
        mag = np.abs(ys)
        for i in range(1, len(xs) - 1):
            if mag[i] <= mag[i - 1] and mag[i] <= mag[i + 1] and mag[i] < 1e-6:
                cands.append(float(xs[i]))
    kept = []
    for z in cands:
        if not space.is_circle and not space.lo - 1e-9 <= z <= space.hi + 1e-9:
            continue
        z = float(z % space.period) if space.is_circle else min(max(z, space.lo), space.hi)
        if abs(f(z)) <= max(tol, 1e-6):
            kept.append(z)
    # a multiple root comes back as a tight cluster; its mean is far more accurate
    groups: list[list[float]] = []
    for z in sorted(kept):
        if groups and z - groups[-1][-1] <= 1e-5:
            groups[-1].append(z)
        else:
            groups.append([z])
    if space.is_circle and len(groups) > 1 and groups[0][0] + space.period - groups[-1][-1] <= 1e-5:
        groups[0] = [z - space.period for z in groups.pop()] + groups[0]
    out = [float(np.mean(gr)) for gr in groups]
    if space.is_circle:
        out = [z % space.period for z in out]
    return tuple(sorted(out))


# -- Morse candidates -----------------------------------------------------------


class FamilyKind(str, enum.Enum):
    ALL = "all"
    CONSTANT = "constant"
    LIFT = "lift"


@dataclass(frozen=True)
class SignalFamily:
    """A closed, shift-invariant set of admissible signals, described symbolically."""

    kind: FamilyKind
    vertex: int | None = None
    members: frozenset | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", FamilyKind(self.kind))
        if self.kind is FamilyKind.CONSTANT and self.vertex is None:
            raise ValueError("constant family needs a vertex")
        if self.kind is FamilyKind.LIFT:
            if not self.members:
                raise ValueError("lift family needs a nonempty vertex set")
            object.__setattr__(self, "members", frozenset(int(v) for v in self.members))

    @classmethod
    def all(cls) -> "SignalFamily":
        return cls(FamilyKind.ALL)

    @classmethod
    def constant(cls, v: int) -> "SignalFamily":
        return cls(FamilyKind.CONSTANT, vertex=int(v))

    @classmethod
    def lift(cls, members) -> "SignalFamily":
        return cls(FamilyKind.LIFT, members=frozenset(members))

    @classmethod
    def from_config(cls, cfg: dict) -> "SignalFamily":
        kind = FamilyKind(cfg.get("kind", "all"))
        if kind is FamilyKind.CONSTANT:
            return cls.constant(cfg["vertex"])
        if kind is FamilyKind.LIFT:
            return cls.lift(cfg["members"])
        return cls.all()

    def to_config(self) -> dict:
        if self.kind is FamilyKind.CONSTANT:
            return {"kind": "constant", "vertex": self.vertex}
        if self.kind is FamilyKind.LIFT:
            return {"kind": "lift", "members": sorted(self.members)}
        return {"kind": "all"}

    def allowed(self, g: DirectedGraph) -> frozenset:
        if self.kind is FamilyKind.CONSTANT:
            return frozenset([self.vertex])
        if self.kind is FamilyKind.LIFT:
            return self.members
        return frozenset(range(g.n_vertices))

    def contains(self, sig: SymbolicSignal) -> bool:
        if self.kind is FamilyKind.ALL:
            return True
        if self.kind is FamilyKind.CONSTANT:
            return sig.symbols_used() == {self.vertex}
        return sig.symbols_used() <= self.members

    def accepts_tail(self, symbols: frozenset) -> bool:
        """Whether the limit of a signal whose recurring symbols are ``symbols`` lies in the family."""
        if self.kind is FamilyKind.ALL:
            return True
        if self.kind is FamilyKind.CONSTANT:
            return symbols == {self.vertex}
        return symbols <= self.members

    def is_nonempty(self, g: DirectedGraph) -> bool:
        if self.kind is FamilyKind.CONSTANT:
            return g.has_self_loop(self.vertex)
        allowed = self.allowed(g)
        return any(a in allowed and b in allowed and (a == b or shortest_path(g, b, a, allowed))
                   for a, b in g.edges)

    def intersects(self, other: "SignalFamily", g: DirectedGraph) -> bool:
        common = self.allowed(g) & other.allowed(g)
        if not common:
            return False
        probe = SignalFamily.lift(common) if len(common) > 1 else SignalFamily.constant(next(iter(common)))
        return probe.is_nonempty(g)

    def samples(self, g: DirectedGraph, h, word_len: int, phases: Sequence = (0,)) -> list[SymbolicSignal]:
        allowed = self.allowed(g)
        return sample_signals(g, h, range(1, word_len + 1), allowed, phases)

    def describe(self) -> str:
        if self.kind is FamilyKind.CONSTANT:
            return f"constant {self.vertex}"
        if self.kind is FamilyKind.LIFT:
            return f"lift {sorted(self.members)}"
        return "all"


@dataclass(frozen=True)
class MorseCandidate:
    """Product set ``m_part x family``; ``m_part`` is a union of closed intervals
    (a point is an interval with equal ends)."""

    name: str
    m_part: tuple
    family: SignalFamily = field(default_factory=SignalFamily.all)

    def __post_init__(self):
        parts = []
        for piece in self.m_part:
            lo, hi = (float(piece), float(piece)) if np.isscalar(piece) else (float(piece[0]), float(piece[1]))
            if not lo <= hi:
                raise ValueError(f"candidate {self.name}: interval ({lo}, {hi}) is reversed")
            parts.append((lo, hi))
        if not parts:
            raise ValueError(f"candidate {self.name}: empty state part")
        object.__setattr__(self, "m_part", tuple(sorted(parts)))

    @classmethod
    def point(cls, name: str, x: float, family: SignalFamily | None = None) -> "MorseCandidate":
        return cls(name, ((x, x),), family or SignalFamily.all())

    @classmethod
    def from_config(cls, cfg: dict) -> "MorseCandidate":
        parts = []
        for piece in cfg["m_part"]:
            parts.append((piece, piece) if np.isscalar(piece) else tuple(piece))
        return cls(cfg["name"], tuple(parts), SignalFamily.from_config(cfg.get("family", {})))

    def to_config(self) -> dict:
        return {"name": self.name, "m_part": [list(p) for p in self.m_part], "family": self.family.to_config()}

    def distance(self, x: float, space: StateSpace) -> float:
        best = math.inf
        for lo, hi in self.m_part:
            if space.is_circle:
                if lo <= space.wrap(x) <= hi:
                    return 0.0
                best = min(best, space.distance(x, lo), space.distance(x, hi))
            else:
                best = min(best, max(lo - x, 0.0, x - hi))
        return best

    def sample_points(self) -> list[float]:
        pts = []
        for lo, hi in self.m_part:
            pts += [lo] if lo == hi else [lo, (lo + hi) / 2, hi]
        return pts


# -- Morse decomposition --------------------------------------------------------


@dataclass(frozen=True)
class SamplingPlan:
    """Sample sizes and tolerances for :func:`verify_morse_decomposition`.

    Times are in units of the dwell time ``h``.
    """

    grid_n: int = 21
    word_len: int = 3
    phases: tuple = (0,)
    burn: float = DEFAULT_BURN
    horizon: float = DEFAULT_HORIZON
    samples_per_h: int = 4
    cluster_radius: float = DEFAULT_RADIUS
    containment_tol: float = 5e-3
    invariance_horizon: float = 50
    invariance_tol: float = 1e-6
    shell_radius: float = 0.05
    escape_horizon: float = 100
    threads: int = 1


@dataclass
class ConditionResult:
    name: str
    passed: bool
    checked: int = 0
    detail: str = ""
    witnesses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "checked": self.checked,
                "detail": self.detail, "witnesses": self.witnesses}


@dataclass
class MorseReport:
    candidates: list
    conditions: dict
    order_edges: list
    orbits: list

    CONDITIONS = ("nonvoid", "disjoint", "invariant", "isolated", "compact", "limit_containment", "no_cycles")

    @property
    def passed(self) -> bool:
        return all(self.conditions[c].passed for c in self.CONDITIONS)

    def order_pairs(self) -> set:
        return {(e["from"], e["to"]) for e in self.order_edges}

    def order_closure(self) -> set:
        pairs = self.order_pairs()
        while True:
            extra = {(a, d) for a, b in pairs for c, d in pairs if b == c} - pairs
            if not extra:
                return pairs
            pairs |= extra

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "candidates": [c.to_config() for c in self.candidates],
            "conditions": {k: self.conditions[k].to_dict() for k in self.CONDITIONS},
            "order_edges": self.order_edges,
        }


def _signal_key(sig: SymbolicSignal) -> dict:
    return sig.to_config()


def _stays_near(sys, x, sig, cand, plan, backward) -> tuple[bool, float]:
    h = float(sys.h)
    tr = trajectory(sys, ProductPoint(x, sig), plan.invariance_horizon * h, h / plan.samples_per_h,
                    backward=backward)
    worst = max(cand.distance(float(y), sys.space) for y in tr.states)
    return worst <= plan.invariance_tol, worst


def _escapes(sys, x, sig, cand, radius, plan) -> tuple[bool, float | None]:
    """Whether the orbit of ``(x, sig)`` gets farther than ``radius`` from the
    candidate's state part in forward or backward time; returns the time."""
    h = float(sys.h)
    for backward in (False, True):
        tr = trajectory(sys, ProductPoint(x, sig), plan.escape_horizon * h, h / plan.samples_per_h,
                        backward=backward)
        d = np.array([cand.distance(float(y), sys.space) for y in tr.states])
        hit = np.nonzero(d > radius)[0]
        if len(hit):
            return True, float(tr.times[hit[0]])
    return False, None


def _signal_shell(g: DirectedGraph, h, fam: SignalFamily) -> list[SymbolicSignal]:
    """Eventually-constant signals that match the family on one side only."""
    if fam.kind is FamilyKind.ALL:
        return []
    inside = sorted(fam.allowed(g))
    out = []
    for v in inside:
        if not g.has_self_loop(v):
            continue
        for w in range(g.n_vertices):
            if w in fam.allowed(g) or not g.has_self_loop(w):
                continue
            for word in ((v, w), (w, v)):
                path = shortest_path(g, word[0], word[1])
                if path is None:
                    continue
                out.append(SymbolicSignal(tuple(path), h, 0, 0, Extension.CONSTANT_ENDS))
    return out


def _locate(est: LimitSetEstimate, tail: frozenset, candidates, space, tol) -> int | None:
    for i, c in enumerate(candidates):
        if c.family.accepts_tail(tail) and all(c.distance(p, space) <= tol for p in est.points):
            return i
    return None


def _state_parts_meet(a: MorseCandidate, b: MorseCandidate, space: StateSpace, tol: float) -> bool:
    # two arcs or intervals meet iff an endpoint of one lies in the other
    return any(b.distance(x, space) <= tol for piece in a.m_part for x in piece) or \
        any(a.distance(x, space) <= tol for piece in b.m_part for x in piece)


def connecting_orbit(sys: HybridSystem, x0: float, sig: SymbolicSignal, candidates, plan: SamplingPlan) -> dict:
    """Alpha and omega estimates of ``(x0, sig)`` and the candidates holding them."""
    h = float(sys.h)
    p = ProductPoint(float(x0), sig)
    kw = dict(r=plan.cluster_radius, sample_dt=h / plan.samples_per_h)
    om = omega_limit_estimate(sys, p, plan.burn * h, plan.horizon * h, **kw)
    al = alpha_limit_estimate(sys, p, plan.burn * h, plan.horizon * h, **kw)
    i_om = _locate(om, sig.tail_symbols(True), candidates, sys.space, plan.containment_tol)
    i_al = _locate(al, sig.tail_symbols(False), candidates, sys.space, plan.containment_tol)
    return {"x0": float(x0), "signal": _signal_key(sig), "omega": om, "alpha": al,
            "omega_in": None if i_om is None else candidates[i_om].name,
            "alpha_in": None if i_al is None else candidates[i_al].name}


def limit_containment(sys: HybridSystem, orbits: Sequence[dict], candidates: Sequence[MorseCandidate],
                      tol: float) -> ConditionResult:
    """Re-locate the limit estimates of ``orbits`` (from :func:`connecting_orbit`)
    among ``candidates``; cheap, so a candidate list can be varied without
    re-integrating."""
    wit = []
    for o in orbits:
        sig = SymbolicSignal.from_config(o["signal"])
        for est, forward in (("omega", True), ("alpha", False)):
            if _locate(o[est], sig.tail_symbols(forward), candidates, sys.space, tol) is None:
                wit.append({"x0": o["x0"], "signal": o["signal"], "direction": est,
                            "points": list(o[est].points)})
    return ConditionResult(
        "limit_containment", not wit, 2 * len(orbits),
        f"alpha/omega estimates of {len(orbits)} sampled points lie within "
        f"{tol:g} of a candidate whose family holds the signal tail", wit[:10])


def verify_morse_decomposition(sys: HybridSystem, candidates: Sequence[MorseCandidate],
                               plan: SamplingPlan | None = None) -> MorseReport:
    """Check the seven Morse-decomposition conditions by sampling.

    The proxies: candidates are nonempty and pairwise disjoint in state or
    signal part; orbits started in a candidate stay in it (``invariant``);
    orbits started on the shell at distances ``r`` and ``2 r`` around a
    candidate, or on its state part with a signal that leaves its family,
    move more than ``2 r`` away (``isolated``); the state parts are closed
    intervals inside the space and the families closed (``compact``); the
    alpha and omega estimates of a grid of sample points lie in candidates
    (``limit_containment``); and the order induced by the sampled
    connecting orbits has no cycles.
    """
    plan = plan or SamplingPlan()
    cands = list(candidates)
    names = [c.name for c in cands]
    if len(set(names)) != len(names):
        raise ValueError("candidate names must be unique")
    g, space, h = sys.graph, sys.space, sys.h
    conds: dict[str, ConditionResult] = {}

    bad = [c.name for c in cands if not c.family.is_nonempty(g)]
    conds["nonvoid"] = ConditionResult("nonvoid", not bad, len(cands),
                                       "every candidate has a state point and an admissible signal",
                                       [{"candidate": n} for n in bad])

    clashes = []
    for i in range(len(cands)):
        for j in range(i + 1, len(cands)):
            a, b = cands[i], cands[j]
            if _state_parts_meet(a, b, space, 1e-12) and a.family.intersects(b.family, g):
                clashes.append({"pair": [a.name, b.name]})
    conds["disjoint"] = ConditionResult("disjoint", not clashes, len(cands) * (len(cands) - 1) // 2,
                                        "state parts or signal families are disjoint", clashes)

    inv_jobs = [(c, x, s, back) for c in cands for x in c.sample_points()
                for s in c.family.samples(g, h, plan.word_len) for back in (False, True)]
    inv = pmap(lambda job: _stays_near(sys, job[1], job[2], job[0], plan, job[3]), inv_jobs, plan.threads)
    wit = [{"candidate": c.name, "x0": x, "signal": _signal_key(s), "backward": back, "drift": d}
           for (c, x, s, back), (ok, d) in zip(inv_jobs, inv) if not ok]
    conds["invariant"] = ConditionResult("invariant", not wit, len(inv_jobs),
                                         f"orbits from candidates stay within {plan.invariance_tol:g} "
                                         f"over {plan.invariance_horizon:g} h both ways; families are shift invariant",
                                         wit[:5])

    r = plan.shell_radius
    iso_jobs = []
    for c in cands:
        for lo, hi in c.m_part:
            for x in (lo - 2 * r, lo - r, hi + r, hi + 2 * r):
                if not space.is_circle and not space.lo <= x <= space.hi:
                    continue
                if any(o.distance(x, space) < r / 2 for o in cands if o is not c):
                    continue
                iso_jobs += [(c, float(space.wrap(x)), s) for s in c.family.samples(g, h, plan.word_len)]
        iso_jobs += [(c, x, s) for x in c.sample_points() for s in _signal_shell(g, h, c.family)]
    iso = pmap(lambda job: _escapes(sys, job[1], job[2], job[0], 2 * r, plan), iso_jobs, plan.threads)
    wit = [{"candidate": c.name, "x0": x, "signal": _signal_key(s)}
           for (c, x, s), (ok, _) in zip(iso_jobs, iso) if not ok]
    conds["isolated"] = ConditionResult("isolated", not wit, len(iso_jobs),
                                        f"shell orbits (radii {r:g}, {2 * r:g}) leave within "
                                        f"{plan.escape_horizon:g} h in one time direction", wit[:5])

    outside = []
    for c in cands:
        for lo, hi in c.m_part:
            if not all(math.isfinite(v) for v in (lo, hi)):
                outside.append({"candidate": c.name, "interval": [lo, hi]})
            elif not space.is_circle and (lo < space.lo or hi > space.hi):
                outside.append({"candidate": c.name, "interval": [lo, hi]})
    conds["compact"] = ConditionResult("compact", not outside, len(cands),
                                       "closed intervals inside the state space times closed signal families",
                                       outside)

    xs = space.grid(plan.grid_n)
    sigs = sample_signals(g, h, range(1, plan.word_len + 1), None, plan.phases)
    lim_jobs = [(float(x), s) for x in xs for s in sigs]
    orbits = pmap(lambda job: connecting_orbit(sys, job[0], job[1], cands, plan), lim_jobs, plan.threads)
    conds["limit_containment"] = limit_containment(sys, orbits, cands, plan.containment_tol)

    edges: dict[tuple, dict] = {}
    for o in orbits:
        a, w = o["alpha_in"], o["omega_in"]
        if a is not None and w is not None and a != w and (a, w) not in edges:
            edges[(a, w)] = {"from": a, "to": w, "x0": o["x0"], "signal": o["signal"]}
    order_edges = [edges[k] for k in sorted(edges, key=lambda k: (names.index(k[0]), names.index(k[1])))]
    ts = TopologicalSorter({n: set() for n in names})
    for e in order_edges:
        ts.add(e["to"], e["from"])
    try:
        ts.prepare()
        cyc = []
    except CycleError as err:
        cyc = [{"cycle": list(err.args[1])}]
    conds["no_cycles"] = ConditionResult("no_cycles", not cyc, len(order_edges),
                                         "connecting orbits induce an acyclic order", cyc)
    return MorseReport(cands, conds, order_edges, orbits)


# -- attracting regions ---------------------------------------------------------


@dataclass(frozen=True)
class AttractionResult:
    attracting: bool
    entry_time: float
    checked: int
    witness: dict | None = None


def _in_union(x: float, parts, tol: float = 0.0) -> bool:
    return any(lo - tol <= x <= hi + tol for lo, hi in parts)


def attracting_region_check(sys: HybridSystem, A: Sequence[tuple], N: Sequence[tuple], n_points: int = 41,
                            word_len: int = 3, horizon: float = 200, threads: int = 1) -> AttractionResult:
    """Sampled test that orbits from ``N`` enter ``A`` and stay there.

    ``A`` and ``N`` are unions of closed intervals. Start points are spread
    over ``N`` minus ``A``; signals are every sampled admissible signal. The
    entry time returned is the largest first-entry time over all samples,
    an empirical uniform time ``T``. ``horizon`` is in units of ``h``.
    """
    A = [tuple(map(float, p)) for p in A]
    N = [tuple(map(float, p)) for p in N]
    if not all(any(nlo <= lo and hi <= nhi for nlo, nhi in N) for lo, hi in A):
        raise ValueError("A must lie inside N")
    h = float(sys.h)
    starts = []
    for lo, hi in N:
        for x in np.linspace(lo, hi, n_points):
            if not _in_union(float(x), A):
                starts.append(float(x))
    if not starts:
        return AttractionResult(True, 0.0, 0)
    sigs = sample_signals(sys.graph, sys.h, range(1, word_len + 1))
    jobs = [(x, s) for x in starts for s in sigs]

    def run(job):
        x, s = job
        tr = trajectory(sys, ProductPoint(x, s), horizon * h, h / 8)
        inside = np.array([_in_union(float(y), A, 1e-12) for y in tr.states])
        if not inside[-1]:
            return None
        last_out = np.nonzero(~inside)[0]
        return float(tr.times[last_out[-1] + 1]) if len(last_out) else 0.0

    times = pmap(run, jobs, threads)
    for (x, s), t in zip(jobs, times):
        if t is None:
            return AttractionResult(False, math.inf, len(jobs), {"x0": x, "signal": _signal_key(s)})
    return AttractionResult(True, max(times), len(jobs))


# -- self-loop visiting schedule -----------------------------------------------


@dataclass(frozen=True)
class VisitEntry:
    round: int
    vertex: int
    eps: float
    intervals: int
    distance: float
    target: float


def selfloop_visit_schedule(sys: HybridSystem, x0: float, eps_schedule: Sequence[float],
                            max_intervals: int = 100000) -> tuple[SymbolicSignal, list[VisitEntry]]:
    """Signal prefix that brings the state close to every vertex's fixed points in turn.

    In round ``k`` each vertex ``v`` is visited in order; the signal dwells at
    ``v`` for whole intervals until the state is within ``eps_schedule[k]``
    of a fixed point of field ``v``. Moving between consecutive vertices
    follows a shortest path, one interval per intermediate vertex. The
    prefix is returned as an eventually-constant signal starting at time 0.
    """
    g = sys.graph
    if not all(g.has_self_loop(v) for v in range(g.n_vertices)):
        raise GraphError("every vertex needs a self-loop")
    classes = communicating_classes(g)
    if len(classes) != 1 or len(classes[0].members) != g.n_vertices:
        raise GraphError("graph must be a single communicating class")
    targets = [fixed_points(f, sys.space) for f in sys.fields]
    h = sys.h
    word: list[int] = []
    log: list[VisitEntry] = []
    x = float(x0)

    def dwell(v, x):
        sig = SymbolicSignal.constant(v, h)
        x, _ = sys.run(h, x, sig)
        return float(sys.space.wrap(x))

    for k, eps in enumerate(eps_schedule):
        for v in range(g.n_vertices):
            if word and word[-1] != v:
                for mid in shortest_path(g, word[-1], v)[1:-1]:
                    word.append(mid)
                    x = dwell(mid, x)
            count = 0
            while True:
                d = min(sys.space.distance(x, q) for q in targets[v])
                if d <= eps and count > 0:
                    break
                if count >= max_intervals:
                    raise RuntimeError(f"vertex {v} did not reach eps={eps} within {max_intervals} intervals")
                x = dwell(v, x)
                word.append(v)
                count += 1
            nearest = min(targets[v], key=lambda q: sys.space.distance(x, q))
            log.append(VisitEntry(k, v, float(eps), count, float(d), float(nearest)))
    sig = SymbolicSignal(tuple(word), h, 0, 0, Extension.CONSTANT_ENDS)
    return sig, log
