"""Hybrid flows over switching signals on a directed graph.

Modules: ``graph`` (communicating classes), ``signals`` (symbolic signals,
shift and metric), ``flow`` (hybrid flow and integrator), ``limits`` (limit
sets and Morse checks), ``chains`` (chain sets on a grid), ``scenarios``
(worked examples) and ``cli``.
"""

from .chains import (
    ChainGraph, ChainSetResult, LiftCheck, SweepResult, build_chain_graph, chain_sets, hausdorff,
    lift_projection_check, perturbation_sweep,
)
from .flow import (
    ConfigError, HybridSystem, ProductPoint, StateSpace, Trajectory, VectorField, hybrid_flow, product_flow,
    trajectory,
)
from .graph import (
    ClassKind, CommClass, DirectedGraph, GraphError, communicating_classes, invariant_class_exists,
    validate_n_graph,
)
from .limits import (
    MorseCandidate, MorseReport, SamplingPlan, SignalFamily, alpha_limit_estimate, attracting_region_check,
    omega_limit_estimate, selfloop_visit_schedule, verify_morse_decomposition,
)
from .scenarios import ScenarioReport, run_scenario
from .signals import (
    Extension, SymbolicSignal, chaos_certificate, distance, sensitive_pair, shift, transitive_witness,
)

__version__ = "0.1.0"

__all__ = [
    "ChainGraph", "ChainSetResult", "ClassKind", "CommClass", "ConfigError", "DirectedGraph", "Extension",
    "GraphError", "HybridSystem", "LiftCheck", "MorseCandidate", "MorseReport", "ProductPoint", "SamplingPlan",
    "ScenarioReport", "SignalFamily", "StateSpace", "SweepResult", "SymbolicSignal", "Trajectory",
    "VectorField", "alpha_limit_estimate", "attracting_region_check", "build_chain_graph", "chain_sets",
    "chaos_certificate", "communicating_classes", "distance", "hausdorff", "hybrid_flow",
    "invariant_class_exists", "lift_projection_check", "omega_limit_estimate", "perturbation_sweep",
    "product_flow", "run_scenario", "selfloop_visit_schedule", "sensitive_pair", "shift", "trajectory",
    "transitive_witness", "validate_n_graph", "verify_morse_decomposition",
]
