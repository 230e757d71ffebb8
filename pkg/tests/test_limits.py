import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from morseflow.flow import HybridSystem, ProductPoint, StateSpace, VectorField
from morseflow.graph import DirectedGraph, GraphError
from morseflow.limits import (
    MorseCandidate, SamplingPlan, SignalFamily, alpha_limit_estimate, attracting_region_check,
    cluster_points, fixed_points, omega_limit_estimate, selfloop_visit_schedule, verify_morse_decomposition,
)
from morseflow.scenarios import flicker_fields, morse_system
from morseflow.signals import Extension, SymbolicSignal
from oracles import adaptive_flow

INTERVAL = StateSpace.interval(-1, 1)


def flicker_b(x):
    return (1 - x) * (1 + x) * (0.5 - x)


def single(field):
    return HybridSystem(DirectedGraph.from_edges(1, [(0, 0)]), (field,), INTERVAL, 1)


def both_with_loops(h=1):
    return HybridSystem(DirectedGraph.complete(2), flicker_fields(), INTERVAL, h)


# -- limit estimates ---------------------------------------------------------------


def test_single_field_omega_from_interior_basin():
    sysm = single(flicker_fields()[0])
    est = omega_limit_estimate(sysm, ProductPoint(0.0, SymbolicSignal.constant(0, 1)))
    assert est.distance_to([-0.5], INTERVAL) < 1e-3
    assert len(est.points) == 1


def test_zero_field_stays_put():
    sysm = single(VectorField.polynomial([0.0]))
    p = ProductPoint(0.37, SymbolicSignal.constant(0, 1))
    assert omega_limit_estimate(sysm, p).points == (0.37,)
    assert alpha_limit_estimate(sysm, p).points == (0.37,)


def test_backward_limit_matches_oracle():
    sysm = single(flicker_fields()[1])
    est = alpha_limit_estimate(sysm, ProductPoint(0.3, SymbolicSignal.constant(0, 1)))
    target = adaptive_flow(flicker_b, 0.3, -200.0)
    assert abs(target + 1) < 1e-6
    assert est.distance_to([target], INTERVAL) < 1e-3


@pytest.mark.parametrize("x0", [-0.7, 0.0, 0.6])
def test_alternating_signal_runs_back_to_left_end(x0):
    sysm = morse_system()
    est = alpha_limit_estimate(sysm, ProductPoint(x0, SymbolicSignal.periodic([0, 1], 1)))
    assert est.distance_to([-1.0], INTERVAL) < 1e-3


def test_saddle_reached_from_the_left():
    # constant at the field whose saddle is at -1/2; approach is algebraic, so read the tail late
    sysm = morse_system()
    sig = SymbolicSignal((1, 0), 1, 0, 0, Extension.CONSTANT_ENDS)
    est = omega_limit_estimate(sysm, ProductPoint(-0.99, sig), burn=1000, horizon=1200)
    assert est.distance_to([-0.5], INTERVAL) < 5e-3


def test_burn_must_precede_horizon():
    sysm = single(flicker_fields()[0])
    with pytest.raises(ValueError):
        omega_limit_estimate(sysm, ProductPoint(0.0, SymbolicSignal.constant(0, 1)), burn=10, horizon=5)


def test_estimates_are_deterministic():
    sysm = morse_system()
    p = ProductPoint(0.1, SymbolicSignal.periodic([0, 0, 1], 1, tau=0.5))
    assert omega_limit_estimate(sysm, p) == omega_limit_estimate(sysm, p)


@settings(max_examples=80, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=1, max_size=200), st.sampled_from([1e-3, 0.01, 0.1]))
def test_cluster_representatives_form_a_net(samples, r):
    xs = np.array(samples)
    reps = cluster_points(xs, r, INTERVAL)
    assert all(b - a > r for a, b in zip(reps, reps[1:]))
    assert max(min(abs(x - q) for q in reps) for x in xs) <= r


def test_cluster_wraps_on_circle():
    circ = StateSpace.circle()
    reps = cluster_points(np.array([0.0005, 2 * math.pi - 0.0005, 3.0]), 1e-2, circ)
    assert len(reps) == 2


def test_fixed_points_find_double_roots():
    pts = fixed_points(VectorField.from_roots([1, -1, -0.5, -0.5], scale=-1), INTERVAL)
    assert np.allclose(pts, [-1, -0.5, 1], atol=1e-6)


# -- Morse candidates ----------------------------------------------------------------


def test_candidate_config_roundtrip():
    c = MorseCandidate.from_config({"name": "S", "m_part": [[-0.2, 0.1], 0.5],
                                    "family": {"kind": "constant", "vertex": 1}})
    assert c.m_part == ((-0.2, 0.1), (0.5, 0.5))
    assert MorseCandidate.from_config(c.to_config()) == c


def test_candidate_rejects_reversed_interval():
    with pytest.raises(ValueError):
        MorseCandidate("bad", ((0.5, 0.1),), SignalFamily.all())


def test_family_membership():
    g = DirectedGraph.complete(2)
    const = SignalFamily.constant(0)
    assert const.contains(SymbolicSignal.constant(0, 1))
    assert not const.contains(SymbolicSignal.periodic([0, 1], 1))
    assert SignalFamily.lift([0, 1]).contains(SymbolicSignal.periodic([0, 1], 1))
    assert not const.intersects(SignalFamily.constant(1), g)


def test_whole_space_candidate_is_trivial_decomposition():
    sysm = morse_system()
    whole = [MorseCandidate("all", ((-1.0, 1.0),), SignalFamily.all())]
    rep = verify_morse_decomposition(sysm, whole, SamplingPlan(grid_n=5, word_len=2, burn=50, horizon=100))
    for name in ("nonvoid", "disjoint", "invariant", "compact", "limit_containment", "no_cycles"):
        assert rep.conditions[name].passed, name
    assert rep.order_edges == []


def test_overlapping_candidates_are_not_disjoint():
    sysm = morse_system()
    cands = [MorseCandidate("L", ((-1.0, 0.0),), SignalFamily.all()),
             MorseCandidate("R", ((-0.1, 1.0),), SignalFamily.all())]
    rep = verify_morse_decomposition(sysm, cands, SamplingPlan(grid_n=5, word_len=1, burn=20, horizon=40))
    assert not rep.conditions["disjoint"].passed
    assert not rep.passed


# -- attracting regions -------------------------------------------------------------


def test_right_end_attracts_a_neighbourhood():
    res = attracting_region_check(morse_system(), A=[(0.95, 1.0)], N=[(0.6, 1.0)], n_points=9, word_len=2)
    assert res.attracting and 0 < res.entry_time < math.inf
    assert res.checked > 0


def test_one_field_breaks_attraction():
    # field B alone pushes points near 0.45 back to its saddle at 1/2, outside A
    res = attracting_region_check(both_with_loops(), A=[(0.95, 1.0)], N=[(0.45, 1.0)], n_points=9, word_len=1)
    assert not res.attracting
    assert res.witness is not None


def test_whole_space_attracts_at_once():
    res = attracting_region_check(morse_system(), A=[(-1.0, 1.0)], N=[(-1.0, 1.0)])
    assert res.attracting and res.entry_time == 0.0


def test_region_must_sit_inside_neighbourhood():
    with pytest.raises(ValueError):
        attracting_region_check(morse_system(), A=[(0.0, 1.0)], N=[(0.5, 1.0)])


# -- self-loop visiting -------------------------------------------------------------


def test_visit_schedule_alternates_between_saddles():
    sysm = both_with_loops()
    sig, log = selfloop_visit_schedule(sysm, 0.0, [0.1, 0.05])
    assert [(e.round, e.vertex) for e in log] == [(0, 0), (0, 1), (1, 0), (1, 1)]
    assert all(e.distance <= e.eps for e in log)
    assert [e.target for e in log] == pytest.approx([-0.5, 0.5, -0.5, 0.5])
    assert sum(e.intervals for e in log) == len(sig.word)
    assert sig.is_admissible(sysm.graph)


def test_visit_schedule_rounds_times_vertices():
    _, log = selfloop_visit_schedule(both_with_loops(), 0.2, [0.2, 0.1, 0.05, 0.025])
    assert len(log) == 4 * 2
    assert [e.eps for e in log[::2]] == [0.2, 0.1, 0.05, 0.025]


def test_single_vertex_schedule_is_plain_approach():
    sysm = single(flicker_fields()[0])
    sig, log = selfloop_visit_schedule(sysm, 0.3, [0.01])
    assert set(sig.word) == {0}
    assert log[0].target == pytest.approx(-0.5) and log[0].distance <= 0.01


def test_visit_schedule_needs_self_loops():
    sysm = HybridSystem(DirectedGraph.from_edges(2, [(0, 1), (1, 0)]), flicker_fields(), INTERVAL, 1)
    with pytest.raises(GraphError):
        selfloop_visit_schedule(sysm, 0.0, [0.1])
