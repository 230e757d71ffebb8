"""Hybrid flows: one vector field per vertex, switched along a signal."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from . import _kernels
from .graph import DirectedGraph, require_n_graph
from .signals import Extension, SymbolicSignal, as_fraction, shift

DEFAULT_DIVISIONS = 64
CLAMP_WARN = 1e-9


class ConfigError(ValueError):
    """Raised when a system description is inconsistent."""


@dataclass(frozen=True)
class StateSpace:
    """A compact 1-D state space: a closed interval or a circle."""

    kind: str
    lo: float = -1.0
    hi: float = 1.0
    period: float = 2 * math.pi

    def __post_init__(self):
        if self.kind not in ("interval", "circle"):
            raise ConfigError(f"unknown state space kind {self.kind!r}")
        if self.kind == "interval" and not self.lo < self.hi:
            raise ConfigError("interval state space needs lo < hi")
        if self.kind == "circle" and not self.period > 0:
            raise ConfigError("circle state space needs a positive period")

    @classmethod
    def interval(cls, lo: float, hi: float) -> "StateSpace":
        return cls("interval", float(lo), float(hi))

    @classmethod
    def circle(cls, period: float = 2 * math.pi) -> "StateSpace":
        return cls("circle", period=float(period))

    @property
    def is_circle(self) -> bool:
        return self.kind == "circle"

    def wrap(self, x):
        if self.is_circle:
            return np.mod(x, self.period) if isinstance(x, np.ndarray) else x % self.period
        return x

    def distance(self, a, b):
        d = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
        if self.is_circle:
            d = np.mod(d, self.period)
            d = np.minimum(d, self.period - d)
        return d if d.ndim else float(d)

    def contains(self, x: float, tol: float = 0.0) -> bool:
        if self.is_circle:
            return math.isfinite(x)
        return self.lo - tol <= x <= self.hi + tol

    def grid(self, n: int) -> np.ndarray:
        if self.is_circle:
            return np.arange(n) * (self.period / n)
        return np.linspace(self.lo, self.hi, n)

    def to_config(self) -> dict:
        if self.is_circle:
            return {"kind": "circle", "period": self.period}
        return {"kind": "interval", "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class VectorField:
    """``poly[j] x**j + sum_k cos_[k] cos((k+1)x) + sin_[k] sin((k+1)x) + offset``."""

    poly: tuple = ()
    cos_: tuple = ()
    sin_: tuple = ()
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(float(c) for c in self.poly))
        object.__setattr__(self, "cos_", tuple(float(c) for c in self.cos_))
        object.__setattr__(self, "sin_", tuple(float(c) for c in self.sin_))
        object.__setattr__(self, "offset", float(self.offset))
        if not all(math.isfinite(c) for c in self.poly + self.cos_ + self.sin_ + (self.offset,)):
            raise ConfigError("vector field coefficients must be finite")

    @classmethod
    def polynomial(cls, coeffs: Sequence[float]) -> "VectorField":
        return cls(poly=tuple(coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[float], scale: float = 1.0) -> "VectorField":
        """``scale * prod (x - r)`` in ascending coefficients."""
        c = np.polynomial.polynomial.polyfromroots(list(roots)) * scale
        return cls(poly=tuple(c))

    @classmethod
    def trig(cls, const: float = 0.0, cos: Sequence[float] = (), sin: Sequence[float] = ()) -> "VectorField":
        n = max(len(cos), len(sin))
        cos = tuple(cos) + (0.0,) * (n - len(cos))
        sin = tuple(sin) + (0.0,) * (n - len(sin))
        return cls(poly=(const,) if const else (), cos_=cos, sin_=sin)

    @classmethod
    def from_config(cls, cfg: dict) -> "VectorField":
        if "poly" in cfg:
            f = cls(poly=tuple(cfg["poly"]))
        elif "roots" in cfg:
            f = cls.from_roots(cfg["roots"], cfg.get("scale", 1.0))
        elif "trigpoly" in cfg:
            t = cfg["trigpoly"]
            f = cls.trig(t.get("const", 0.0), t.get("cos", ()), t.get("sin", ()))
        else:
            raise ConfigError(f"field needs 'poly', 'roots' or 'trigpoly': {cfg!r}")
        if "rho" in cfg or "u" in cfg:
            f = f.perturbed(cfg.get("rho", 1.0), cfg.get("u", 0.0))
        return f

    def to_config(self) -> dict:
        cfg: dict = {}
        if self.cos_ or self.sin_:
            cfg["trigpoly"] = {"const": self.poly[0] if self.poly else 0.0,
                               "cos": list(self.cos_), "sin": list(self.sin_)}
        else:
            cfg["poly"] = list(self.poly)
        if self.offset:
            cfg["rho"] = 1.0
            cfg["u"] = self.offset
        return cfg

    def perturbed(self, rho: float, u: float) -> "VectorField":
        """The field ``X(x) + rho * u``."""
        return VectorField(self.poly, self.cos_, self.sin_, self.offset + float(rho) * float(u))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        val = np.polynomial.polynomial.polyval(x, self.poly) if self.poly else np.zeros_like(x)
        for k, (a, b) in enumerate(zip(self.cos_, self.sin_), start=1):
            val = val + a * np.cos(k * x) + b * np.sin(k * x)
        val = val + self.offset
        return val if val.ndim else float(val)

    def slope(self, x):
        """Derivative ``X'(x)``."""
        x = np.asarray(x, dtype=float)
        d = np.polynomial.polynomial.polyder(self.poly) if len(self.poly) > 1 else ()
        val = np.polynomial.polynomial.polyval(x, d) if len(d) else np.zeros_like(x)
        for k, (a, b) in enumerate(zip(self.cos_, self.sin_), start=1):
            val = val - k * a * np.sin(k * x) + k * b * np.cos(k * x)
        return val if val.ndim else float(val)


def pack_fields(fields: Sequence[VectorField]):
    n = len(fields)
    p = max(1, max(len(f.poly) for f in fields))
    k = max(1, max(len(f.cos_) for f in fields))
    P = np.zeros((n, p))
    C = np.zeros((n, k))
    S = np.zeros((n, k))
    O = np.zeros(n)
    for v, f in enumerate(fields):
        P[v, :len(f.poly)] = f.poly
        C[v, :len(f.cos_)] = f.cos_
        S[v, :len(f.sin_)] = f.sin_
        O[v] = f.offset
    return P, C, S, O


def _kernel_args(fields, space: StateSpace):
    P, C, S, O = pack_fields(fields)
    kind = _kernels.CIRCLE if space.is_circle else _kernels.INTERVAL
    lo, hi = (0.0, 0.0) if space.is_circle else (space.lo, space.hi)
    return P, C, S, O, kind, lo, hi


def _check_overshoot(amount: float) -> None:
    if amount > CLAMP_WARN:
        warnings.warn(f"integrator overshot the state space by {amount:.3g}; clamped", RuntimeWarning, stacklevel=3)


def integrate_segment(f: VectorField, x0: float, dt: float, step: float,
                      space: StateSpace | None = None) -> float:
    """Fixed-step RK4 solution of ``x' = f(x)`` at time ``dt`` (``dt < 0`` runs backward)."""
    if step <= 0:
        raise ValueError("step must be positive")
    space = space or StateSpace("interval", -math.inf, math.inf)
    P, C, S, O, kind, lo, hi = _kernel_args([f], space)
    x, _, over = _kernels.run_segments(
        float(x0), np.zeros(1, dtype=np.int64), np.zeros(1), np.array([float(dt)]), float(step),
        P, C, S, O, kind, lo, hi, 0.0, _kernels.empty_out())
    _check_overshoot(over)
    return float(space.wrap(x))


@dataclass(frozen=True)
class HybridSystem:
    graph: DirectedGraph
    fields: tuple
    space: StateSpace
    h: Fraction
    divisions: int = DEFAULT_DIVISIONS
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        object.__setattr__(self, "h", as_fraction(self.h))
        if len(self.fields) != self.graph.n_vertices:
            raise ConfigError(f"{len(self.fields)} fields for {self.graph.n_vertices} vertices")
        if self.h <= 0:
            raise ConfigError("dwell time h must be positive")
        if self.divisions < 1:
            raise ConfigError("divisions must be positive")
        require_n_graph(self.graph)
        if not self.space.is_circle:
            self._check_boundary()

    def _check_boundary(self, tol: float = 1e-9) -> None:
        for v, f in enumerate(self.fields):
            if f(self.space.lo) < -tol or f(self.space.hi) > tol:
                raise ConfigError(f"field {v} points out of [{self.space.lo}, {self.space.hi}]")

    @property
    def step(self) -> float:
        return float(self.h) / self.divisions

    @cached_property
    def _packed(self):
        return _kernel_args(self.fields, self.space)

    def with_h(self, h) -> "HybridSystem":
        return HybridSystem(self.graph, self.fields, self.space, h, self.divisions, self.name)

    def with_fields(self, fields) -> "HybridSystem":
        return HybridSystem(self.graph, tuple(fields), self.space, self.h, self.divisions, self.name)

    def check_signal(self, sig: SymbolicSignal) -> None:
        if sig.h != self.h:
            raise ValueError(f"signal dwell time {float(sig.h)} differs from system h={float(self.h)}")
        sig.require_admissible(self.graph)

    def segments(self, t, sig: SymbolicSignal):
        """Dwell segments covering ``[0, t]`` (or ``[t, 0]`` backward).

        Returns arrays ``(vertices, start_offsets, end_offsets)`` where the
        offsets are measured from the start of each dwell interval.
        """
        t = as_fraction(t)
        h = sig.h
        if t == 0:
            return np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0)
        if t > 0:
            k0 = sig.interval_index(0)
            k1 = sig.interval_index(t)
            if sig.breakpoint(k1) == t:
                k1 -= 1
            ks = np.arange(k0, k1 + 1)
            starts = np.zeros(len(ks))
            ends = np.full(len(ks), float(h))
            starts[0] = float(-sig.breakpoint(k0))
            ends[-1] = float(t - sig.breakpoint(k1))
        else:
            k0 = sig.interval_index(0)
            if sig.breakpoint(k0) == 0:
                k0 -= 1
            k1 = sig.interval_index(t)
            ks = np.arange(k0, k1 - 1, -1)
            starts = np.full(len(ks), float(h))
            ends = np.zeros(len(ks))
            starts[0] = float(-sig.breakpoint(k0))
            ends[-1] = float(t - sig.breakpoint(k1))
        return self._symbols(sig, ks), starts, ends

    @staticmethod
    def _symbols(sig: SymbolicSignal, ks: np.ndarray) -> np.ndarray:
        word = np.asarray(sig.word, dtype=np.int64)
        idx = sig.base + ks
        if sig.extension is Extension.PERIODIC:
            idx = np.mod(idx, len(word))
        else:
            idx = np.clip(idx, 0, len(word) - 1)
        return word[idx]

    def run(self, t, x0: float, sig: SymbolicSignal, sample_dt: float = 0.0, n_samples: int = 0):
        verts, starts, ends = self.segments(t, sig)
        out = np.empty(n_samples) if n_samples else _kernels.empty_out()
        P, C, S, O, kind, lo, hi = self._packed
        x, written, over = _kernels.run_segments(
            float(x0), verts, starts, ends, self.step, P, C, S, O, kind, lo, hi, float(sample_dt), out)
        _check_overshoot(over)
        return x, out[:written]


@dataclass(frozen=True)
class ProductPoint:
    x: float
    sig: SymbolicSignal


def hybrid_flow(sys: HybridSystem, t, x0: float, sig: SymbolicSignal) -> float:
    """State at time ``t`` when the fields are switched by ``sig``."""
    sys.check_signal(sig)
    x, _ = sys.run(t, x0, sig)
    return float(sys.space.wrap(x))


def product_flow(sys: HybridSystem, t, p: ProductPoint) -> ProductPoint:
    return ProductPoint(hybrid_flow(sys, t, p.x, p.sig), shift(p.sig, t))


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    vertices: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self) -> Iterator[tuple]:
        for t, x, v in zip(self.times, self.states, self.vertices):
            yield float(t), float(x), int(v)

    def to_csv(self) -> str:
        lines = ["t,x,vertex"]
        lines += [f"{t:.12g},{x:.12g},{v}" for t, x, v in self]
        return "\n".join(lines) + "\n"


def trajectory(sys: HybridSystem, p: ProductPoint, t_end: float, sample_dt: float,
               backward: bool = False) -> Trajectory:
    """Uniform samples of the state and active vertex over ``[0, t_end]``.

    With ``backward=True`` the samples run over ``[-t_end, 0]`` in reverse
    time order (time 0 first).
    """
    if sample_dt <= 0:
        raise ValueError("sample_dt must be positive")
    if t_end < 0:
        raise ValueError("t_end must be nonnegative")
    sys.check_signal(p.sig)
    n = int(math.floor(t_end / sample_dt + 1e-9)) + 1
    horizon = -as_fraction(t_end) if backward else as_fraction(t_end)
    _, xs = sys.run(horizon, p.x, p.sig, sample_dt, n)
    sgn = -1.0 if backward else 1.0
    times = sgn * np.arange(len(xs)) * sample_dt
    ks = np.floor((times - float(p.sig.tau)) / float(p.sig.h)).astype(np.int64)
    verts = HybridSystem._symbols(p.sig, ks)
    return Trajectory(times, sys.space.wrap(xs), verts)
