import math
import warnings
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morseflow.flow import (
    ConfigError, HybridSystem, ProductPoint, StateSpace, VectorField, hybrid_flow, integrate_segment,
    product_flow, trajectory,
)
from morseflow.graph import DirectedGraph, GraphError
from morseflow.signals import Extension, SymbolicSignal, shift
from oracles import adaptive_hybrid


def flicker_a(x):
    return (1 - x) * (1 + x) * (-0.5 - x)


def flicker_b(x):
    return (1 - x) * (1 + x) * (0.5 - x)


def saddle_left(x):
    return (1 - x) * (x + 1) * (x + 0.5) ** 2


def saddle_right(x):
    return (1 - x) * (x + 1) * (x - 0.5) ** 2


ORACLE_FIELDS = {"flicker": (flicker_a, flicker_b), "saddle": (saddle_left, saddle_right)}


def make_system(name, h=1, graph=None):
    if name == "flicker":
        fields = (VectorField.from_roots([1, -1, -0.5]), VectorField.from_roots([1, -1, 0.5]))
        graph = graph or DirectedGraph.from_edges(2, [(0, 1), (1, 0)])
    else:
        fields = (VectorField.from_roots([1, -1, -0.5, -0.5], scale=-1),
                  VectorField.from_roots([1, -1, 0.5, 0.5], scale=-1))
        graph = graph or DirectedGraph.complete(2)
    return HybridSystem(graph, fields, StateSpace.interval(-1, 1), h)


@pytest.mark.parametrize("name", ["flicker", "saddle"])
def test_packed_fields_match_formulas(name):
    sys = make_system(name)
    xs = np.linspace(-1, 1, 41)
    for f, ref in zip(sys.fields, ORACLE_FIELDS[name]):
        assert np.allclose(f(xs), [ref(x) for x in xs], atol=1e-14)


def test_integrate_segment_examples():
    zero = VectorField.polynomial([0.0])
    assert integrate_segment(zero, 0.3, 7.0, 0.01) == 0.3
    a = VectorField.from_roots([1, -1, -0.5])
    assert integrate_segment(a, -1.0, 5.0, 1 / 64) == -1.0
    assert abs(integrate_segment(a, 0.4, 60.0, 1 / 64) + 0.5) < 1e-6


@pytest.mark.parametrize("name", ["flicker", "saddle"])
@pytest.mark.parametrize("x0", [-0.9, -0.3, 0.2, 0.75])
def test_rk4_agrees_with_adaptive_oracle(name, x0):
    sys = make_system(name)
    word = (0, 1) if name == "flicker" else (0, 0, 1)
    sig = SymbolicSignal.periodic(word, sys.h, tau=Fraction(3, 10))
    t_end = 50
    pieces = []
    t = Fraction(0)
    while t < t_end:
        k = sig.interval_index(t)
        nxt = min(sig.breakpoint(k + 1), Fraction(t_end))
        pieces.append((float(nxt - t), sig.symbol(k)))
        t = nxt
    ref = adaptive_hybrid(ORACLE_FIELDS[name], x0, t_end, pieces)
    assert abs(hybrid_flow(sys, t_end, x0, sig) - ref) < 1e-6


def test_identity_and_constant_signal():
    sys = make_system("saddle")
    sig = SymbolicSignal.constant(1, sys.h)
    assert hybrid_flow(sys, 0, 0.37, sig) == 0.37
    direct = integrate_segment(sys.fields[1], 0.1, 7.25, sys.step)
    assert hybrid_flow(sys, Fraction(29, 4), 0.1, sig) == pytest.approx(direct, abs=1e-13)


def composition_error(sys, sig, x, s, t):
    whole = hybrid_flow(sys, s + t, x, sig)
    split = hybrid_flow(sys, t, hybrid_flow(sys, s, x, sig), shift(sig, s))
    return abs(whole - split) / max(abs(whole), 1.0)


@pytest.mark.parametrize("name", ["flicker", "saddle"])
@settings(max_examples=150, deadline=None)
@given(x=st.floats(-1, 1), s=st.fractions(-5, 5, max_denominator=1000), t=st.fractions(-5, 5, max_denominator=1000),
       tau=st.integers(0, 9), h=st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(3, 2)]))
def test_hybrid_composition_law(name, x, s, t, tau, h):
    sys = make_system(name, h)
    word = (0, 1) if name == "flicker" else (0, 1, 1, 0, 0)
    sig = SymbolicSignal.periodic(word, h, tau=Fraction(tau, 10) * h)
    assert composition_error(sys, sig, x, s, t) < 1e-9


def test_product_flow_pairs_state_and_shift():
    sys = make_system("flicker")
    sig = SymbolicSignal.periodic([1, 0], sys.h, tau=Fraction(1, 4))
    p = product_flow(sys, Fraction(5, 2), ProductPoint(0.8, sig))
    assert p.sig == shift(sig, Fraction(5, 2))
    assert p.x == hybrid_flow(sys, Fraction(5, 2), 0.8, sig)


@pytest.mark.parametrize("name", ["flicker", "saddle"])
def test_interval_stays_invariant(name):
    sys = make_system(name)
    sig = SymbolicSignal.periodic((0, 1), sys.h) if name == "flicker" else \
        SymbolicSignal((0, 1, 1, 0), sys.h, extension=Extension.CONSTANT_ENDS)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for x0 in np.linspace(-1, 1, 21):
            for t in (40, -40):
                tr = trajectory(sys, ProductPoint(float(x0), sig), 40, 0.25, backward=t < 0)
                assert tr.states.min() >= -1 - 1e-9 and tr.states.max() <= 1 + 1e-9


def test_trajectory_samples():
    zero = VectorField.polynomial([0.0])
    sys = HybridSystem(DirectedGraph.complete(2), (zero, zero), StateSpace.interval(-1, 1), 1)
    sig = SymbolicSignal.periodic([0, 1], 1, tau=Fraction(1, 2))
    tr = trajectory(sys, ProductPoint(0.25, sig), 10, 0.3)
    assert len(tr) == math.floor(10 / 0.3) + 1
    assert np.all(tr.states == 0.25)
    assert np.all(np.diff(tr.times) > 0)
    assert [sig.evaluate(Fraction(t)) for t in tr.times] == list(tr.vertices)
    assert tr.to_csv().splitlines()[0] == "t,x,vertex"


def test_trajectory_matches_pointwise_flow():
    sys = make_system("flicker")
    sig = SymbolicSignal.periodic([0, 1], sys.h, tau=Fraction(1, 3))
    for backward in (False, True):
        tr = trajectory(sys, ProductPoint(0.3, sig), 6, 0.3, backward=backward)
        for t, x, _ in tr:
            assert x == pytest.approx(hybrid_flow(sys, Fraction(t), 0.3, sig), abs=1e-14)


def test_circle_wraps():
    f = VectorField.trig(0.3, cos=[0.5], sin=[-1.0])
    space = StateSpace.circle()
    sys = HybridSystem(DirectedGraph.complete(1), (f,), space, 1)
    sig = SymbolicSignal.constant(0, 1)
    for x in (0.1, 2.0, 5.9):
        a = hybrid_flow(sys, 3, x, sig)
        b = hybrid_flow(sys, 3, x + 2 * math.pi, sig)
        assert space.distance(a, b) < 1e-12
        assert 0 <= a < 2 * math.pi


def test_system_validation():
    a = VectorField.from_roots([1, -1, -0.5])
    g = DirectedGraph.complete(2)
    with pytest.raises(ConfigError):
        HybridSystem(g, (a,), StateSpace.interval(-1, 1), 1)
    with pytest.raises(ConfigError):
        HybridSystem(g, (a, a), StateSpace.interval(-1, 1), 0)
    with pytest.raises(ConfigError):
        # x' = 1 leaves [-1, 1] through the right end
        HybridSystem(g, (a, VectorField.polynomial([1.0])), StateSpace.interval(-1, 1), 1)
    with pytest.raises(GraphError):
        HybridSystem(DirectedGraph.from_edges(2, [(0, 1)]), (a, a), StateSpace.interval(-1, 1), 1)
    sys = make_system("flicker")
    with pytest.raises(GraphError):
        hybrid_flow(sys, 1, 0.0, SymbolicSignal.constant(0, 1))


def test_field_config_roundtrip():
    for f in (VectorField.from_roots([1, -1, 0.5]), VectorField.trig(0.1, [1.0], [0.0, 2.0]),
              VectorField.polynomial([0, 1, 0, -1]).perturbed(0.1, -1)):
        g = VectorField.from_config(f.to_config())
        xs = np.linspace(-3, 3, 13)
        assert np.allclose(f(xs), g(xs))
