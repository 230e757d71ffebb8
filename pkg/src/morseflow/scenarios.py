"""Worked example systems and the checks that reproduce their claims.

Three scenarios:

``flicker``
    Two cubic fields on ``[-1, 1]`` whose graph only allows alternation.
    Every orbit is trapped strictly between the two single-field sinks, so
    the hybrid limit sets avoid both of them.
``circle``
    Two fields on the circle, each with one sink and one source, placed so
    that both rotate the same way between the sinks. Every limit set still
    meets a single-field fixed point.
``morse``
    Two quartic fields on ``[-1, 1]`` sharing the endpoints, with saddles at
    ``-1/2`` and ``1/2``; four product sets form a Morse decomposition.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .flow import ConfigError, HybridSystem, ProductPoint, StateSpace, VectorField, integrate_segment, trajectory
from .graph import DirectedGraph, GraphError
from .limits import (
    MorseCandidate, SamplingPlan, SignalFamily, cluster_points, connecting_orbit, fixed_points,
    limit_containment, omega_limit_estimate, verify_morse_decomposition,
)
from .parallel import pmap
from .signals import Extension, SymbolicSignal, as_fraction, sample_signals, shift
from .svg import line_plot

LADDER = tuple(Fraction(k, 4) for k in range(1, 33))


# -- reports --------------------------------------------------------------------


@dataclass
class Claim:
    """One checked statement. ``result`` names the proposition it belongs to."""

    id: str
    result: str
    statement: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"id": self.id, "result": self.result, "statement": self.statement,
                "passed": bool(self.passed), "measured": self.measured}


@dataclass
class ScenarioReport:
    scenario: str
    parameters: dict
    claims: list
    seed: int | None = None
    files: dict = field(default_factory=dict)
    artifacts: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.claims)

    def claim(self, cid: str) -> Claim:
        for c in self.claims:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def failed(self) -> list[str]:
        return [c.id for c in self.claims if not c.passed]

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "seed": self.seed, "passed": self.passed,
                "parameters": self.parameters, "claims": [c.to_dict() for c in self.claims],
                "artifacts": dict(sorted(self.artifacts.items()))}

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def write(self, out_dir: str) -> dict:
        """Write the report JSON plus every CSV/SVG artifact; returns name -> path."""
        os.makedirs(out_dir, exist_ok=True)
        self.artifacts = {name: f"{self.scenario}_{name}" for name in sorted(self.files)}
        self.artifacts["report"] = f"{self.scenario}_report.json"
        paths = {}
        for name, text in sorted(self.files.items()):
            path = os.path.join(out_dir, self.artifacts[name])
            with open(path, "w", newline="\n") as fh:
                fh.write(text)
            paths[name] = path
        path = os.path.join(out_dir, self.artifacts["report"])
        with open(path, "w", newline="\n") as fh:
            fh.write(self.to_json())
        paths["report"] = path
        return paths


def rounded(obj):
    """Floats to 12 significant digits, recursively; non-finite floats become strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            return str(x)
        return float(f"{x:.12g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, Fraction):
        return rounded(float(obj))
    if isinstance(obj, dict):
        return {str(k): rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return rounded(obj.to_dict())
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(rounded(obj), indent=2, sort_keys=True) + "\n"


def _trajectory_csv(rows: Sequence[tuple]) -> str:
    """``rows`` of ``(label, Trajectory)``."""
    lines = ["series,t,x,vertex"]
    for label, tr in rows:
        lines += [f"{label},{t:.12g},{x:.12g},{v}" for t, x, v in tr]
    return "\n".join(lines) + "\n"


# -- flicker: alternation traps orbits between the sinks -------------------------


FLICKER_SINKS = (-0.5, 0.5)


def flicker_fields() -> tuple[VectorField, VectorField]:
    """``(1-x)(1+x)(-1/2-x)`` and ``(1-x)(1+x)(1/2-x)``."""
    return VectorField.from_roots([1, -1, -0.5]), VectorField.from_roots([1, -1, 0.5])


def flicker_graph() -> DirectedGraph:
    return DirectedGraph.from_edges(2, [(0, 1), (1, 0)])


def flicker_system(h=1) -> HybridSystem:
    return HybridSystem(flicker_graph(), flicker_fields(), StateSpace.interval(-1, 1), h, name="flicker")


@dataclass(frozen=True)
class FlickerStep:
    h: Fraction
    eps: float
    probe: float
    ladder_index: int


def find_h_flicker(sys: HybridSystem | None = None, ladder: Sequence = LADDER) -> FlickerStep:
    """Smallest ``h`` on ``ladder`` for which field 0 carries ``1/2`` below 0.

    ``eps = 1/2 - phi_1(h, 0)`` is the guaranteed gap between the upper sink
    and the peaks of a trapped orbit.
    """
    a, b = (sys.fields if sys is not None else flicker_fields())
    for k, h in enumerate(ladder):
        h = as_fraction(h)
        step = float(h) / 64
        probe = integrate_segment(a, 0.5, float(h), step)
        if probe < 0:
            eps = 0.5 - integrate_segment(b, 0.0, float(h), step)
            if not eps > 0:
                raise RuntimeError(f"gap {eps} is not positive at h={h}")
            return FlickerStep(h, eps, probe, k)
    raise RuntimeError("no dwell time on the ladder pushes 1/2 below 0; check the integrator")


def _flicker_orbit(sys: HybridSystem, x0: float, sig: SymbolicSignal, horizon: float, per_h: int) -> dict:
    h = float(sys.h)
    tr = trajectory(sys, ProductPoint(x0, sig), horizon * h, h / per_h)
    xs = tr.states
    inside = np.abs(xs) < 0.5
    idx = np.nonzero(inside)[0]
    entry = int(idx[0]) if len(idx) else None
    stays = bool(entry is not None and inside[entry:].all())
    tail = xs[len(xs) // 2:]
    gap = float(np.min(np.abs(np.abs(tail) - 0.5)))
    # peaks and troughs after entry, against the guaranteed gap
    after = xs[entry:] if entry is not None else xs[:0]
    return {"x0": x0, "tau": float(sig.tau), "entered": entry is not None,
            "entry_time": float(tr.times[entry]) if entry is not None else math.inf,
            "stays": stays, "tail_gap": gap,
            "peak": float(after.max()) if len(after) else math.nan,
            "trough": float(after.min()) if len(after) else math.nan}


def single_field_limits(field_: VectorField, space: StateSpace, h, n_points: int = 41,
                        r: float = 1e-3) -> tuple:
    """Union of the omega-limit estimates of one field over a grid of starts."""
    sys = HybridSystem(DirectedGraph.complete(1), (field_,), space, h)
    sig = SymbolicSignal.constant(0, sys.h)
    pts = []
    for x in space.grid(n_points):
        pts += list(omega_limit_estimate(sys, ProductPoint(float(x), sig), r=r).points)
    return cluster_points(np.array(pts), r, space)


def _set_distance(a: Sequence[float], b: Sequence[float]) -> float:
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def example_flicker(n_points: int = 41, n_offsets: int = 8, horizon: float = 500, per_h: int = 16,
                    threads: int = 1, sys: HybridSystem | None = None) -> ScenarioReport:
    """Orbits of the alternating system enter ``(-1/2, 1/2)``, stay, and keep
    a positive distance from both sinks.

    Start points are ``n_points`` interior points of ``[-1, 1]``; signals are
    the alternating signal shifted by ``k * 2h / n_offsets`` (every admissible
    signal is such a shift). ``horizon`` is in units of ``h``.
    """
    if sys is not None:
        g = sys.graph
        if any(g.has_self_loop(v) for v in range(g.n_vertices)) or g.n_vertices != 2:
            raise GraphError("the flicker scenario needs two vertices joined by cross edges only")
    step = find_h_flicker(sys)
    sys = (sys or flicker_system()).with_h(step.h)
    h = sys.h
    base = SymbolicSignal.periodic((0, 1), h)
    sigs = [shift(base, k * 2 * h / n_offsets) for k in range(n_offsets)]
    xs = [float(x) for x in np.linspace(-1, 1, n_points + 2)[1:-1]]
    jobs = [(x, s) for x in xs for s in sigs]
    runs = pmap(lambda job: _flicker_orbit(sys, job[0], job[1], horizon, per_h), jobs, threads)

    claims = []
    a_field, b_field = sys.fields
    probe_claim = Claim("dwell_time", "new-limit-sets",
                        "field 0 carries 1/2 below 0 within one dwell interval, and the gap "
                        "1/2 - phi_1(h, 0) is positive",
                        step.probe < 0 < step.eps,
                        {"h": float(step.h), "phi0_at_half": step.probe, "eps": step.eps})
    claims.append(probe_claim)
    entered = [r for r in runs if r["entered"]]
    claims.append(Claim("enters_band", "new-limit-sets",
                        "every sampled orbit enters (-1/2, 1/2)", len(entered) == len(runs),
                        {"orbits": len(runs), "entered": len(entered),
                         "latest_entry": max(r["entry_time"] for r in runs)}))
    stay = [r for r in runs if r["stays"]]
    claims.append(Claim("never_leaves", "new-limit-sets",
                        f"no orbit leaves (-1/2, 1/2) after entering, over {horizon:g} h",
                        len(stay) == len(runs),
                        {"orbits": len(runs), "stayed": len(stay),
                         "highest": max(r["peak"] for r in entered) if entered else math.nan,
                         "lowest": min(r["trough"] for r in entered) if entered else math.nan}))
    margin = min(r["tail_gap"] for r in runs)
    claims.append(Claim("tail_margin", "new-limit-sets",
                        "the second half of every orbit stays a positive distance from +-1/2",
                        margin > 0, {"margin": margin, "eps": step.eps, "margin_over_eps": margin / step.eps}))

    space = sys.space
    lim_a = single_field_limits(a_field, space, h)
    lim_b = single_field_limits(b_field, space, h)
    da = _set_distance(lim_a, [-1, -0.5, 1])
    db = _set_distance(lim_b, [-1, 0.5, 1])
    claims.append(Claim("single_field_limits", "new-limit-sets",
                        "alone, field 0 has limit points {-1, -1/2, 1} and field 1 {-1, 1/2, 1} (within 1e-3)",
                        da <= 1e-3 and db <= 1e-3,
                        {"field0": list(lim_a), "field1": list(lim_b), "distance0": da, "distance1": db}))

    rep = _flicker_orbit(sys, 0.9, base, horizon, per_h)
    claims.append(Claim("start_at_0.9", "new-limit-sets",
                        "x0 = 0.9 with the unshifted signal enters the band and keeps a positive gap",
                        rep["entered"] and rep["stays"] and rep["tail_gap"] > 0, rep))
    end = trajectory(sys, ProductPoint(-1.0, base), horizon * float(h), float(h) / per_h)
    claims.append(Claim("fixed_endpoint", "new-limit-sets", "x0 = -1 stays at -1 exactly",
                        bool(np.all(end.states == -1.0)), {"max_drift": float(np.max(np.abs(end.states + 1)))}))

    omega_gaps = []
    for x in (-0.9, -0.3, 0.3, 0.9):
        est = omega_limit_estimate(sys, ProductPoint(x, base))
        omega_gaps.append(est.nearest(list(FLICKER_SINKS), space))
    claims.append(Claim("omega_avoids_sinks", "new-limit-sets",
                        "omega-limit estimates of interior starts stay away from +-1/2",
                        min(omega_gaps) > 0, {"smallest_gap": min(omega_gaps)}))

    shown = [(f"x0={x:g}", trajectory(sys, ProductPoint(x, base), 20 * float(h), float(h) / 16))
             for x in (-0.9, 0.0, 0.9)]
    files = {
        "trajectories.csv": _trajectory_csv(shown),
        "orbits.csv": "x0,tau,entered,entry_time,stays,tail_gap\n" + "".join(
            f"{r['x0']:.12g},{r['tau']:.12g},{int(r['entered'])},{r['entry_time']:.12g},"
            f"{int(r['stays'])},{r['tail_gap']:.12g}\n" for r in runs),
        "trajectories.svg": line_plot([(lbl, tr.times, tr.states) for lbl, tr in shown],
                                      "alternating signal, three starts", hlines=(-0.5, 0.5), ylim=(-1, 1)),
    }
    params = {"h": float(h), "eps": step.eps, "n_points": n_points, "n_offsets": n_offsets,
              "horizon_h": horizon, "samples_per_h": per_h}
    return ScenarioReport("flicker", params, claims, files=files)


# -- circle: common rotation between the sinks ----------------------------------


def circle_fields(offset: float = math.pi) -> tuple[VectorField, VectorField]:
    """``-(cos(x - pi/4) - cos(pi/4))`` and the same field turned by ``offset``.

    The first has a sink at 0 and a source at pi/2; with the default offset
    the second has its sink at pi and its source at 3 pi/2.
    """
    c = math.cos(math.pi / 4)

    def turned(a: float) -> VectorField:
        # cos(x - a - pi/4) = cos(a + pi/4) cos x + sin(a + pi/4) sin x
        b = a + math.pi / 4
        return VectorField.trig(const=c, cos=[-math.cos(b)], sin=[-math.sin(b)])

    return turned(0.0), turned(offset)


@dataclass(frozen=True)
class CircleLayout:
    sinks: tuple
    sources: tuple
    regions: dict

    def region_of(self, x: float, space: StateSpace) -> str | None:
        for name, (lo, hi) in self.regions.items():
            if 0 < (x - lo) % space.period < (hi - lo) % space.period:
                return name
        return None

    def to_dict(self) -> dict:
        return {"sinks": list(self.sinks), "sources": list(self.sources),
                "regions": {k: list(v) for k, v in self.regions.items()}}


def validate_circle(fields: Sequence[VectorField], space: StateSpace | None = None) -> CircleLayout:
    """Check the two-field circle layout and name its four arcs.

    Each field must have exactly one sink and one source (nonzero slope).
    Going counterclockwise from the first sink the order must be: first
    source, second sink, second source. The arcs are named I (first sink to
    first source), II (first source to second sink), III (second sink to
    second source) and IV (second source back to the first sink); on II and
    IV both fields must point the same way.
    """
    space = space or StateSpace.circle()
    if not space.is_circle or len(fields) != 2:
        raise ConfigError("the circle layout needs two fields on the circle")
    sinks, sources = [], []
    for v, f in enumerate(fields):
        pts = fixed_points(f, space)
        slopes = [float(f.slope(x)) for x in pts]
        sk = [x for x, s in zip(pts, slopes) if s < -1e-9]
        sr = [x for x, s in zip(pts, slopes) if s > 1e-9]
        if len(pts) != 2 or len(sk) != 1 or len(sr) != 1:
            raise ConfigError(f"field {v} needs exactly one sink and one source, found {pts}")
        sinks.append(sk[0])
        sources.append(sr[0])
    a1, r1, a2, r2 = sinks[0], sources[0], sinks[1], sources[1]
    rel = [(x - a1) % space.period for x in (r1, a2, r2)]
    if not 0 < rel[0] < rel[1] < rel[2]:
        raise ConfigError("fixed points are not interleaved as sink 0, source 0, sink 1, source 1")
    regions = {"I": (a1, r1), "II": (r1, a2), "III": (a2, r2), "IV": (r2, a1)}
    for name in ("II", "IV"):
        lo, hi = regions[name]
        width = (hi - lo) % space.period
        probe = space.wrap(lo + np.linspace(0.02, 0.98, 49) * width)
        s0, s1 = np.sign(fields[0](probe)), np.sign(fields[1](probe))
        if not (np.all(s0 == s0[0]) and np.all(s1 == s0[0]) and s0[0] != 0):
            raise ConfigError(f"the fields do not share a rotation direction on arc {name}")
    return CircleLayout((a1, a2), (r1, r2), regions)


def circle_system(h=1, fields: Sequence[VectorField] | None = None) -> HybridSystem:
    return HybridSystem(DirectedGraph.complete(2), tuple(fields or circle_fields()), StateSpace.circle(), h,
                        name="circle")


@dataclass(frozen=True)
class CircleStep:
    h: Fraction
    h_first: Fraction
    h_second: Fraction
    lands: dict


def find_h_circle(fields: Sequence[VectorField] | None = None, ladder: Sequence = LADDER) -> CircleStep:
    """``h = max(h_a, h_b)``: the smallest ladder times after which field 1
    carries sink 0 into arc II, and field 0 carries sink 1 into arc IV."""
    fields = tuple(fields or circle_fields())
    space = StateSpace.circle()
    lay = validate_circle(fields, space)

    def first(f, start, region):
        for h in ladder:
            h = as_fraction(h)
            y = integrate_segment(f, start, float(h), float(h) / 64, space)
            if lay.region_of(y, space) == region:
                return h, y
        raise RuntimeError(f"no ladder time moves {start} into region {region}")

    h2, y2 = first(fields[1], lay.sinks[0], "II")
    h1, y1 = first(fields[0], lay.sinks[1], "IV")
    return CircleStep(max(h1, h2), h2, h1, {"sink0_under_field1": y2, "sink1_under_field0": y1})


def random_signal(rng: np.random.Generator, g: DirectedGraph, h: Fraction, max_len: int = 6,
                  phases: int = 16) -> SymbolicSignal:
    """Random admissible periodic or eventually-constant signal with a random offset."""
    while True:
        n = int(rng.integers(1, max_len + 1))
        word = [int(rng.integers(g.n_vertices))]
        for _ in range(n - 1):
            word.append(int(rng.choice(g.successors(word[-1]))))
        ext = Extension.PERIODIC if rng.integers(2) == 0 else Extension.CONSTANT_ENDS
        anchor = int(rng.integers(n))
        tau = Fraction(int(rng.integers(phases)), phases) * h
        sig = SymbolicSignal(tuple(word), h, tau, anchor, ext)
        if sig.is_admissible(g):
            return sig


def _signed_step(a: np.ndarray, period: float) -> np.ndarray:
    return (np.diff(a) + period / 2) % period - period / 2


def example_circle(draws: int = 500, seed: int = 0, tol: float = 1e-2, per_h: int = 256,
                   threads: int = 1, fields: Sequence[VectorField] | None = None) -> ScenarioReport:
    """Every sampled omega-limit estimate comes within ``tol`` of a fixed point
    of one of the two fields."""
    fields = tuple(fields or circle_fields())
    space = StateSpace.circle()
    claims = []
    try:
        lay = validate_circle(fields, space)
    except ConfigError as err:
        return ScenarioReport("circle", {"seed": seed}, [Claim("layout", "limit-sets-meet-fixed-points", str(err),
                                                              False)], seed=seed)
    claims.append(Claim("layout", "limit-sets-meet-fixed-points",
                        "each field has one sink and one source, interleaved, with a shared rotation "
                        "direction on arcs II and IV", True, lay.to_dict()))
    step = find_h_circle(fields)
    sys = circle_system(step.h, fields)
    h = sys.h
    fhalf = float(h)
    claims.append(Claim("dwell_time", "limit-sets-meet-fixed-points",
                        "one dwell interval under field 1 carries sink 0 into II, and under field 0 "
                        "carries sink 1 into IV", True,
                        {"h": float(h), "h_sink0": float(step.h_first), "h_sink1": float(step.h_second),
                         **step.lands}))
    fixed = sorted(lay.sinks + lay.sources)

    # arcs II and IV: both fields turn counterclockwise there, so x only increases
    sigs = sample_signals(sys.graph, h, range(1, 4))
    worst = 0.0
    checked = 0
    for name in ("II", "IV"):
        lo, hi = lay.regions[name]
        width = (hi - lo) % space.period
        for frac in (0.1, 0.5, 0.9):
            x0 = float(space.wrap(lo + frac * width))
            for s in sigs:
                tr = trajectory(sys, ProductPoint(x0, s), 20 * fhalf, fhalf / 64)
                inside = np.array([lay.region_of(float(x), space) == name for x in tr.states])
                stop = int(np.argmin(inside)) if not inside.all() else len(inside)
                seg = tr.states[:stop]
                if len(seg) > 1:
                    worst = min(worst, float(_signed_step(seg, space.period).min()))
                checked += 1
    claims.append(Claim("ccw_on_II_and_IV", "limit-sets-meet-fixed-points",
                        "orbits starting in arc II or IV turn counterclockwise while they remain there, "
                        "for every sampled signal", worst >= -1e-12,
                        {"orbits": checked, "largest_backward_step": -worst}))

    const = SymbolicSignal.constant(0, h)
    basin = []
    for x0 in (-1.0, 0.7, 2.5, 4.0):
        est = omega_limit_estimate(sys, ProductPoint(float(space.wrap(x0)), const))
        basin.append(est.distance_to([lay.sinks[0]], space))
    claims.append(Claim("constant_signal_sink", "limit-sets-meet-fixed-points",
                        "with the signal constant at vertex 0, starts in the basin of sink 0 converge to it",
                        max(basin) <= 1e-3, {"largest_distance": max(basin)}))

    rng = np.random.default_rng(seed)
    jobs = [(float(rng.uniform(0, space.period)), random_signal(rng, sys.graph, h)) for _ in range(draws)]

    def run(job):
        x0, s = job
        est = omega_limit_estimate(sys, ProductPoint(x0, s), sample_dt=fhalf / per_h)
        d = [est.nearest([q], space) for q in fixed]
        k = int(np.argmin(d))
        return d[k], fixed[k], len(est.points)

    res = pmap(run, jobs, threads)
    worst_draw = max(d for d, _, _ in res)
    claims.append(Claim("random_draws", "limit-sets-meet-fixed-points",
                        f"{draws} random (x, f) draws all have an omega-limit estimate within {tol:g} "
                        "of a fixed point of field 0 or field 1", worst_draw <= tol,
                        {"draws": draws, "largest_distance": worst_draw,
                         "whole_circle_limits": sum(1 for _, _, n in res if n > 100)}))

    rows = ["draw,x0,word,extension,anchor,tau,nearest_fixed_point,distance,representatives"]
    for k, ((x0, s), (d, q, n)) in enumerate(zip(jobs, res)):
        rows.append(f"{k},{x0:.12g},{''.join(map(str, s.word))},{s.extension.value},{s.anchor},"
                    f"{float(s.tau):.12g},{q:.12g},{d:.12g},{n}")
    shown = [(f"draw{k}", trajectory(sys, ProductPoint(*jobs[k]), 40 * fhalf, fhalf / 16))
             for k in range(min(3, draws))]
    files = {"draws.csv": "\n".join(rows) + "\n", "trajectories.csv": _trajectory_csv(shown),
             "trajectories.svg": line_plot([(lbl, tr.times, tr.states) for lbl, tr in shown],
                                           "random signals on the circle", hlines=tuple(fixed),
                                           ylim=(0, space.period))}
    params = {"h": float(h), "draws": draws, "tolerance": tol, "samples_per_h": per_h,
              "fixed_points": fixed}
    return ScenarioReport("circle", params, claims, seed=seed, files=files)


# -- morse: four product sets ----------------------------------------------------


def morse_fields() -> tuple[VectorField, VectorField]:
    """``(1-x)(x+1)(x+1/2)^2`` and ``(1-x)(x+1)(x-1/2)^2``."""
    return (VectorField.from_roots([1, -1, -0.5, -0.5], scale=-1),
            VectorField.from_roots([1, -1, 0.5, 0.5], scale=-1))


def morse_system(h=1) -> HybridSystem:
    return HybridSystem(DirectedGraph.complete(2), morse_fields(), StateSpace.interval(-1, 1), h, name="morse")


def morse_candidates() -> list[MorseCandidate]:
    return [MorseCandidate.point("M1", -1.0), MorseCandidate.point("M2", -0.5, SignalFamily.constant(0)),
            MorseCandidate.point("M3", 0.5, SignalFamily.constant(1)), MorseCandidate.point("M4", 1.0)]


def morse_plan(threads: int = 1) -> SamplingPlan:
    # the saddles attract only algebraically, so tails are read late
    return SamplingPlan(burn=1000, horizon=1200, containment_tol=5e-3, threads=threads)


@dataclass(frozen=True)
class CatalogEntry:
    x0: float
    word: tuple
    anchor: int
    extension: Extension
    source: str
    target: str
    note: str

    def signal(self, h) -> SymbolicSignal:
        return SymbolicSignal(self.word, h, 0, self.anchor, self.extension)


CE, PER = Extension.CONSTANT_ENDS, Extension.PERIODIC
MORSE_CATALOG = (
    CatalogEntry(-0.75, (1, 0), 1, CE, "M1", "M2", "left of -1/2, vertex 0 from time 0"),
    CatalogEntry(-0.75, (1, 1, 1, 0), 0, CE, "M1", "M4", "crosses -1/2 under vertex 1, then vertex 0"),
    CatalogEntry(0.75, (1, 0), 1, CE, "M3", "M4", "right of 1/2, vertex 0 from time 0"),
    CatalogEntry(0.75, (1, 0, 0, 0), 3, CE, "M1", "M4", "vertex 0 for three intervals back, then vertex 1"),
    CatalogEntry(0.0, (0, 1), 0, PER, "M1", "M4", "alternating forever"),
    CatalogEntry(0.0, (0, 1), 1, CE, "M2", "M3", "vertex 0 in the past, vertex 1 in the future"),
    CatalogEntry(0.0, (0, 1, 1, 1), 3, CE, "M1", "M3", "vertex 0 before three intervals of vertex 1"),
    CatalogEntry(0.0, (0, 0, 0, 1), 0, CE, "M2", "M4", "three intervals of vertex 0, then vertex 1"),
)


def classify_fixed_points(f: VectorField, space: StateSpace, probe: float = 1e-3) -> list[tuple[float, str]]:
    """Label each fixed point by the sign of ``f`` just left and right of it."""
    out = []
    for x in fixed_points(f, space):
        left = f(max(x - probe, space.lo)) if x - probe >= space.lo else None
        right = f(min(x + probe, space.hi)) if x + probe <= space.hi else None
        into = (left is None or left > 0) and (right is None or right < 0)
        away = (left is None or left < 0) and (right is None or right > 0)
        out.append((x, "attractor" if into else "repeller" if away else "saddle"))
    return out


def example_morse(plan: SamplingPlan | None = None, threads: int = 1) -> ScenarioReport:
    """Verify the four-set Morse decomposition, its connecting orbits, and that
    dropping the lower saddle set breaks limit containment."""
    sys = morse_system()
    plan = plan or morse_plan(threads)
    cands = morse_candidates()
    claims = []
    kinds = [classify_fixed_points(f, sys.space) for f in sys.fields]
    expect = [[(-1.0, "repeller"), (-0.5, "saddle"), (1.0, "attractor")],
              [(-1.0, "repeller"), (0.5, "saddle"), (1.0, "attractor")]]
    ok = all(len(k) == 3 and all(abs(a - c) < 1e-6 and b == d for (a, b), (c, d) in zip(k, e))
             for k, e in zip(kinds, expect))
    claims.append(Claim("fixed_point_types", "morse-decomposition",
                        "vertex 0: repeller -1, saddle -1/2, attractor 1; vertex 1: repeller -1, saddle 1/2, "
                        "attractor 1", ok, {"vertex0": kinds[0], "vertex1": kinds[1]}))

    rep = verify_morse_decomposition(sys, cands, plan)
    for name in rep.CONDITIONS:
        c = rep.conditions[name]
        claims.append(Claim(f"condition_{name}", "morse-decomposition", c.detail, c.passed,
                            {"checked": c.checked, "witnesses": c.witnesses[:3]}))
    pairs = rep.order_pairs()
    needed = {("M1", "M2"), ("M1", "M4"), ("M2", "M3"), ("M2", "M4"), ("M3", "M4")}
    closure = rep.order_closure()
    antisym = not any((b, a) in closure for a, b in closure if a != b)
    claims.append(Claim("order", "morse-decomposition",
                        "sampled connecting orbits give M1 < M2, M1 < M4, M2 < M3, M2 < M4, M3 < M4 "
                        "and the closure is antisymmetric", needed <= pairs and antisym,
                        {"edges": sorted(pairs)}))

    h = sys.h
    cat_rows = []
    for k, e in enumerate(MORSE_CATALOG):
        o = connecting_orbit(sys, e.x0, e.signal(h), cands, plan)
        found = (o["alpha_in"], o["omega_in"])
        cat_rows.append((e, o))
        claims.append(Claim(f"catalog_{k}", "morse-decomposition",
                            f"x0={e.x0:g}, {e.note}: from {e.source} to {e.target}",
                            found == (e.source, e.target),
                            {"alpha_in": found[0], "omega_in": found[1], "alpha": list(o["alpha"].points),
                             "omega": list(o["omega"].points), "signal": o["signal"]}))

    fam_all = len(SignalFamily.all().samples(sys.graph, h, 3))
    fam_m2 = len(cands[1].family.samples(sys.graph, h, 3))
    claims.append(Claim("saddle_signals_not_all", "morse-decomposition",
                        "the signal part of M2 is the single constant signal, a proper subset of all signals",
                        fam_m2 == 1 and fam_all > 1, {"M2_signals": fam_m2, "all_signals": fam_all}))

    dropped = limit_containment(sys, rep.orbits, [c for c in cands if c.name != "M2"], plan.containment_tol)
    wit = dropped.witnesses[0] if dropped.witnesses else None
    claims.append(Claim("without_M2", "morse-decomposition",
                        "without M2 some sampled limit set lies in no candidate",
                        not dropped.passed and wit is not None, {"witness": wit}))

    shown = []
    for k, (e, _) in enumerate(cat_rows):
        sig = e.signal(h)
        fw = trajectory(sys, ProductPoint(e.x0, sig), 12.0, 1 / 16)
        bw = trajectory(sys, ProductPoint(e.x0, sig), 12.0, 1 / 16, backward=True)
        shown.append((f"orbit{k}", bw, fw))
    csv_rows = []
    for label, bw, fw in shown:
        csv_rows += [(label, bw), (label, fw)]
    lines = ["entry,x0,word,extension,anchor,expected_from,expected_to,alpha_in,omega_in,alpha,omega"]
    for k, (e, o) in enumerate(cat_rows):
        lines.append(f"{k},{e.x0:.12g},{''.join(map(str, e.word))},{e.extension.value},{e.anchor},{e.source},"
                     f"{e.target},{o['alpha_in']},{o['omega_in']},"
                     f"{' '.join(f'{p:.12g}' for p in o['alpha'].points)},"
                     f"{' '.join(f'{p:.12g}' for p in o['omega'].points)}")
    series = [(lbl, np.concatenate([bw.times[::-1], fw.times]), np.concatenate([bw.states[::-1], fw.states]))
              for lbl, bw, fw in shown]
    files = {"catalog.csv": "\n".join(lines) + "\n", "trajectories.csv": _trajectory_csv(csv_rows),
             "trajectories.svg": line_plot(series, "connecting orbits", hlines=(-1, -0.5, 0.5, 1), ylim=(-1, 1)),
             "morse.json": dumps(rep.to_dict())}
    params = {"h": float(h), "burn_h": plan.burn, "horizon_h": plan.horizon, "grid_n": plan.grid_n,
              "word_len": plan.word_len, "containment_tol": plan.containment_tol,
              "candidates": [c.to_config() for c in cands]}
    return ScenarioReport("morse", params, claims, files=files)


SCENARIOS = ("flicker", "circle", "morse")


def run_scenario(name: str, seed: int = 0, threads: int = 1, **kw) -> ScenarioReport:
    if name == "flicker":
        rep = example_flicker(threads=threads, **kw)
    elif name == "circle":
        rep = example_circle(seed=seed, threads=threads, **kw)
    elif name == "morse":
        rep = example_morse(threads=threads, **kw)
    else:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    rep.seed = seed
    return rep
