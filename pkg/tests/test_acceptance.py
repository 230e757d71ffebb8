"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with the measured numbers,
then asserts. Run ``pytest tests/test_acceptance.py -v`` to see the lines.
"""

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from morseflow.chains import build_chain_graph, chain_sets, perturbation_sweep
from morseflow.cli import dispatch
from morseflow.flow import HybridSystem, StateSpace, VectorField, hybrid_flow
from morseflow.graph import DirectedGraph, communicating_classes, invariant_class_exists, validate_n_graph
from morseflow.scenarios import (
    example_circle, example_flicker, example_morse, flicker_system, morse_system,
)
from morseflow.signals import (
    DIAMETER, Extension, SymbolicSignal, distance, mismatch_fraction, sensitive_pair, shift, transitive_witness,
    truncation_bound,
)
from oracles import all_graphs, brute_chain_components, brute_classes, brute_one_step, is_n_graph

WINDOW = 20


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\n{'PASS' if ok else 'FAIL'} criterion {number:>2} {title}: {detail}")
    assert ok, detail


# -- signal generators --------------------------------------------------------------


def random_signal(rng, h, n_symbols=3, max_len=6):
    word = tuple(rng.randrange(n_symbols) for _ in range(rng.randint(1, max_len)))
    tau = Fraction(rng.randrange(1000), 1000) * h
    ext = rng.choice(list(Extension))
    return SymbolicSignal(word, h, tau, rng.randint(-5, 5), ext)


def same_signal_rewritten(sig):
    """A different literal for the same function of time."""
    if sig.extension is Extension.PERIODIC:
        return SymbolicSignal(sig.word * 2, sig.h, sig.tau, sig.anchor, sig.extension)
    w = (sig.word[0],) + sig.word + (sig.word[-1],)
    return SymbolicSignal(w, sig.h, sig.tau, sig.anchor + 1, sig.extension)


# -- 1 --------------------------------------------------------------------------------


def criterion_graph_oracle():
    mismatches, exhaustive, no_invariant = 0, 0, 0
    for edges in all_graphs(4):
        if not is_n_graph(4, edges):
            continue
        exhaustive += 1
        g = DirectedGraph.from_edges(4, edges)
        got = {(c.members, c.kind.value == "invariant") for c in communicating_classes(g)}
        mismatches += got != brute_classes(4, edges)
        no_invariant += not any(inv for _, inv in got)
    rng = random.Random(2024)
    drawn = 0
    while drawn < 500:
        n = rng.randint(1, 8)
        edges = sorted({(rng.randrange(n), rng.randrange(n)) for _ in range(rng.randint(n, 3 * n))})
        g = DirectedGraph.from_edges(n, edges)
        if not validate_n_graph(g).is_n_graph:
            continue
        drawn += 1
        got = {(c.members, c.kind.value == "invariant") for c in communicating_classes(g)}
        mismatches += got != brute_classes(n, edges)
        inv = invariant_class_exists(g)
        no_invariant += (inv.members, True) not in got
    ok = mismatches == 0 and no_invariant == 0 and exhaustive > 0
    return ok, f"4-vertex N-graphs {exhaustive}, random N-graphs {drawn}, mismatches {mismatches}, " \
               f"graphs without invariant class {no_invariant}"


def test_criterion_01_graph_oracle(capsys):
    report(capsys, 1, "graph oracle equivalence", *criterion_graph_oracle())


# -- 2 --------------------------------------------------------------------------------


def criterion_metric_suite():
    rng = random.Random(11)
    h = Fraction(1)
    sigs = []
    for k in range(1000):
        x = random_signal(rng, h)
        y = same_signal_rewritten(x) if k % 4 == 0 else random_signal(rng, h)
        sigs.append((x, y))
    asym = ident = 0
    worst_triangle = Fraction(0)
    for k, (x, y) in enumerate(sigs):
        dxy = distance(x, y, WINDOW)
        asym += dxy.exact != distance(y, x, WINDOW).exact
        agree = all(mismatch_fraction(x, y, i) == 0 for i in range(-WINDOW, WINDOW + 1))
        ident += (dxy.exact == 0) != agree
        z = sigs[(k + 1) % len(sigs)][0]
        excess = distance(x, z, WINDOW).exact - dxy.exact - distance(y, z, WINDOW).exact
        worst_triangle = max(worst_triangle, excess)
    tri_slack = 2 * truncation_bound(WINDOW)

    single_ok = True
    for h in (Fraction(1), Fraction(1, 2), Fraction(3, 4)):
        for _ in range(20):
            w = [rng.randrange(3) for _ in range(5)]
            v = list(w)
            v[2] = (w[2] + rng.randint(1, 2)) % 3
            x = SymbolicSignal(tuple(w), h, 0, 2, Extension.CONSTANT_ENDS)
            y = SymbolicSignal(tuple(v), h, 0, 2, Extension.CONSTANT_ENDS)
            single_ok &= distance(x, y, WINDOW).exact == 1
    far_err = 0.0
    for _ in range(50):
        x = random_signal(rng, Fraction(1))
        y = SymbolicSignal(tuple((s + 1) % 3 for s in x.word), x.h, x.tau, x.anchor, x.extension)
        far_err = max(far_err, abs(distance(x, y, WINDOW).value - float(DIAMETER)))
    ok = asym == 0 and ident == 0 and worst_triangle <= tri_slack and single_ok and far_err < 1e-10
    return ok, (f"pairs 1000, asymmetric {asym}, identity failures {ident}, worst triangle excess "
                f"{float(worst_triangle):.3g} (allowed {float(tri_slack):.3g}), single interval exact {single_ok}, "
                f"all-different error {far_err:.3g}")


def test_criterion_02_metric_suite(capsys):
    report(capsys, 2, "metric suite", *criterion_metric_suite())


# -- 3 --------------------------------------------------------------------------------


def criterion_flow_laws():
    rng = random.Random(5)
    shift_fail = 0
    for _ in range(1000):
        sig = random_signal(rng, rng.choice([Fraction(1), Fraction(1, 2), Fraction(3, 4)]))
        s = Fraction(rng.randint(-3000, 3000), rng.randint(1, 100))
        t = Fraction(rng.randint(-3000, 3000), rng.randint(1, 100))
        left, right = shift(shift(sig, s), t), shift(sig, s + t)
        probes = [Fraction(k, 7) for k in range(-14, 15)]
        shift_fail += any(left.evaluate(u) != right.evaluate(u) or right.evaluate(u) != sig.evaluate(u + s + t)
                          for u in probes)
    worst = 0.0
    cases = [(flicker_system(Fraction(3, 4)), (0, 1)), (morse_system(), (0, 1, 1, 0, 0))]
    for sysm, word in cases:
        for _ in range(250):
            sig = SymbolicSignal.periodic(word, sysm.h, tau=Fraction(rng.randrange(10), 10) * sysm.h)
            x = rng.uniform(-1, 1)
            s = Fraction(rng.randint(-5000, 5000), 1000)
            t = Fraction(rng.randint(-5000, 5000), 1000)
            whole = hybrid_flow(sysm, s + t, x, sig)
            split = hybrid_flow(sysm, t, hybrid_flow(sysm, s, x, sig), shift(sig, s))
            worst = max(worst, abs(whole - split) / max(abs(whole), 1.0))
    lip_fail = 0
    for _ in range(200):
        h = Fraction(1)
        x, y = random_signal(rng, h), random_signal(rng, h)
        t = Fraction(rng.randint(-80, 80), 16)
        k = -(-abs(t) // h)
        lip_fail += distance(shift(x, t), shift(y, t)).value > 4 ** int(k) * distance(x, y).value + 1e-9
    ok = shift_fail == 0 and worst < 1e-9 and lip_fail == 0
    return ok, (f"shift composition failures {shift_fail}/1000, worst relative flow composition error "
                f"{worst:.3g}, Lipschitz violations {lip_fail}/200")


def test_criterion_03_flow_laws(capsys):
    report(capsys, 3, "flow laws", *criterion_flow_laws())


# -- 4 --------------------------------------------------------------------------------


def criterion_chaos():
    g = DirectedGraph.complete(2)
    (cls,) = communicating_classes(g)
    w = transitive_witness(g, cls, 4)
    text = "".join(map(str, w.word))
    doubled = text + text[:4]
    missing = ["".join(map(str, u)) for n in range(1, 5) for u in itertools.product((0, 1), repeat=n)
               if "".join(map(str, u)) not in doubled]
    pairs = []
    # breakpoints sit at tau + m h; with tau = 0 the separation time is a plain multiple of h
    for tau in (Fraction(0), Fraction(1, 3)):
        x = SymbolicSignal.periodic([0, 1, 1], 1, tau=tau)
        y, t = sensitive_pair(g, x, 0.05)
        m = (t - tau) / x.h
        pairs.append((distance(x, y).value, distance(shift(x, t), shift(y, t)).value, m, y.is_admissible(g)))
    pairs_ok = all(d0 < 0.05 and d1 >= 1 and m.denominator == 1 and adm for d0, d1, m, adm in pairs)
    ok = not missing and w.is_admissible(g) and pairs_ok
    shown = ", ".join(f"d(x,y)={d0:.3g} then {d1:.4g} at m={m}" for d0, d1, m, _ in pairs)
    return ok, f"witness length {len(w.word)}, missing words {len(missing)}, {shown}"


def test_criterion_04_chaos_certificate(capsys):
    report(capsys, 4, "chaos certificate", *criterion_chaos())


# -- 5 --------------------------------------------------------------------------------


def criterion_flicker():
    rep = example_flicker()
    ok = rep.passed
    margin = rep.claim("tail_margin").measured
    enters = rep.claim("enters_band").measured
    return ok, (f"h={rep.parameters['h']}, orbits {enters.get('orbits')}, tail margin {margin.get('margin'):.4g}, "
                f"failed claims {rep.failed()}")


def test_criterion_05_flicker(capsys):
    report(capsys, 5, "alternating two-field example", *criterion_flicker())


# -- 6 --------------------------------------------------------------------------------


def criterion_morse():
    rep = example_morse()
    conds = [c for c in rep.claims if c.id.startswith("condition_")]
    catalog = [c for c in rep.claims if c.id.startswith("catalog_")]
    dropped = rep.claim("without_M2")
    ok = (len(conds) == 7 and all(c.passed for c in conds) and len(catalog) == 8
          and all(c.passed for c in catalog) and dropped.passed and rep.passed)
    return ok, (f"conditions {sum(c.passed for c in conds)}/7, catalog {sum(c.passed for c in catalog)}/8, "
                f"without M2 witness {dropped.measured.get('witness')}")


def test_criterion_06_morse(capsys):
    report(capsys, 6, "four-set Morse decomposition", *criterion_morse())


# -- 7 --------------------------------------------------------------------------------


def criterion_circle():
    rep = example_circle(draws=500, seed=0)
    draws = rep.claim("random_draws")
    ok = rep.claim("layout").passed and draws.passed and rep.passed
    return ok, (f"draws 500, largest distance to fixed points {draws.measured.get('largest_distance'):.3g}, "
                f"failed claims {rep.failed()}")


def test_criterion_07_circle(capsys):
    report(capsys, 7, "circle example", *criterion_circle())


# -- 8 --------------------------------------------------------------------------------


def _flicker_fns():
    return [lambda x: (1 - x) * (1 + x) * (-0.5 - x), lambda x: (1 - x) * (1 + x) * (0.5 - x)]


def _saddle_fns():
    return [lambda x: (1 - x) * (x + 1) * (x + 0.5) ** 2, lambda x: (1 - x) * (x + 1) * (x - 0.5) ** 2]


def criterion_chain_oracle():
    contracting = HybridSystem(DirectedGraph.complete(1), (VectorField.polynomial([0.0, -1.0]),),
                               StateSpace.interval(-1, 1), 1)
    cases = [(flicker_system(1), _flicker_fns(), [(0, 1), (1, 0)], 2),
             (morse_system(1), _saddle_fns(), [(0, 0), (0, 1), (1, 0), (1, 1)], 2),
             (contracting, [lambda x: -x], [(0, 0)], 1)]
    configs = [(21, 0.13, 2, 4, 3), (25, 0.06, 1, 3, 2), (13, 0.2, 3, 3, 3)]
    mismatches = runs = 0
    for sysm, fns, edges, nv in cases:
        for grid_n, eps, T, T_max, word_len in configs:
            cg = build_chain_graph(sysm, grid_n, eps, T, T_max, word_len)
            step, _ = brute_one_step(fns, nv, edges, cg.grid, eps, 1.0, T, T_max, word_len)
            got = {frozenset(c) for c in chain_sets(cg).components}
            mismatches += got != brute_chain_components(cg.n, step)
            runs += 1
    split = 0
    prev = None
    for eps in (0.02, 0.04, 0.08, 0.16, 0.32):
        comps = [frozenset(c) for c in chain_sets(build_chain_graph(flicker_system(1), 41, eps, 3, 5, 2)).components]
        if prev is not None:
            split += sum(not any(c <= d for d in comps) for c in prev)
        prev = comps
    ok = mismatches == 0 and split == 0
    return ok, f"oracle runs {runs}, mismatches {mismatches}, components split along the eps ladder {split}"


def test_criterion_08_chain_oracle(capsys):
    report(capsys, 8, "chain oracle equivalence", *criterion_chain_oracle())


# -- 9 --------------------------------------------------------------------------------


def criterion_sweep():
    base = VectorField.polynomial([0.0, 1.0, 0.0, -1.0])
    res = perturbation_sweep(base, [0.2, 0.1, 0.05, 0.0], [-1.0, 0.0, 1.0], DirectedGraph.complete(3),
                             StateSpace.interval(-1.5, 1.5), Fraction(1), grid_n=301, eps=0.025, T=Fraction(1),
                             T_max=Fraction(3), word_len=3)
    counts = res.matched_counts()
    dists = {m: [round(d, 4) for d in res.distances(m)] for m in range(counts[-1])}
    ok = len(set(counts)) == 1 and counts[0] == 3 and res.monotone() and res.within_bound()
    return ok, (f"matched clusters {counts}, constant C={res.constant:.4g}, spacing {res.spacing:.4g}, "
                f"Hausdorff per cluster {dists}")


def test_criterion_09_perturbation_sweep(capsys):
    report(capsys, 9, "perturbation sweep", *criterion_sweep())


# -- 10 -------------------------------------------------------------------------------

FLICKER_TOML = """
h = "3/4"
[graph]
vertices = 2
edges = [[0, 1], [1, 0]]
[[fields]]
roots = [1, -1, -0.5]
[[fields]]
roots = [1, -1, 0.5]
"""


def criterion_cli_reproducible(tmp_path):
    cfg = tmp_path / "flicker.toml"
    cfg.write_text(FLICKER_TOML)
    commands = [["chains", str(cfg), "--eps", "0.2", "--T", "0.75", "--T-max", "2.25", "--grid", "121", "--lift"],
                ["scenario", "circle", "--draws", "40"],
                ["scenario", "flicker", "--points", "9"]]
    codes, differing, compared = [], [], 0
    for k, cmd in enumerate(commands):
        outs = []
        for threads in (1, 2, 8):
            out = tmp_path / f"cmd{k}_t{threads}"
            codes.append(dispatch(["--out", str(out), "--seed", "7", "--threads", str(threads), *cmd]))
            outs.append(out)
        names = sorted(p.name for p in outs[0].iterdir() if p.suffix in (".json", ".csv"))
        for name in names:
            compared += 1
            blobs = {(o / name).read_bytes() for o in outs}
            if len(blobs) != 1:
                differing.append(f"{cmd[0]}:{name}")
    ok = all(c == 0 for c in codes) and not differing and compared > 0
    return ok, f"artifacts compared {compared} x 3 thread counts, differing {differing}, exit codes {set(codes)}"


def test_criterion_10_cli_reproducible(capsys, tmp_path):
    report(capsys, 10, "CLI reproducibility", *criterion_cli_reproducible(tmp_path))


@pytest.mark.parametrize("sig", [SymbolicSignal.periodic([0, 1, 2], 1, tau=Fraction(1, 3)),
                                 SymbolicSignal((0, 2, 1), Fraction(1, 2), 0, 1, Extension.CONSTANT_ENDS)])
def test_rewritten_literal_is_the_same_signal(sig):
    other = same_signal_rewritten(sig)
    assert other.word != sig.word
    assert all(sig.evaluate(Fraction(k, 5)) == other.evaluate(Fraction(k, 5)) for k in range(-40, 41))
    assert distance(sig, other).exact == 0
    assert np.isfinite(distance(sig, other).value)
