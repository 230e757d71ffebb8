"""Piecewise-constant switching signals, their shift flow and metric.

A bi-infinite signal is stored as a finite word plus an extension policy.
Dwell interval ``k`` is ``[tau + k*h, tau + (k+1)*h)``; the word entry used on
interval ``k`` is ``base + k`` (wrapped or clamped), where ``base`` is fixed by
``anchor``: the index of the entry covering time 0.

Times, offsets and dwell lengths are held as :class:`fractions.Fraction` so
shifts compose exactly and interval overlaps are computed without rounding.
"""

from __future__ import annotations

import enum
import math
import numbers
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .graph import ClassKind, CommClass, DirectedGraph, GraphError, admissible_words, communicating_classes, \
    shortest_path, validate_n_graph

DIAMETER = Fraction(5, 3)
DEFAULT_WINDOW = 20


class Extension(str, enum.Enum):
    PERIODIC = "periodic"
    CONSTANT_ENDS = "constant-ends"


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite time value {x!r}")
    return Fraction(x)


def time_literal(t: Fraction):
    """A float when it represents ``t`` exactly, else the string ``"p/q"``."""
    return float(t) if Fraction(float(t)) == t else str(t)


@dataclass(frozen=True)
class SymbolicSignal:
    word: tuple
    h: Fraction
    tau: Fraction = Fraction(0)
    anchor: int = 0
    extension: Extension = Extension.PERIODIC

    def __post_init__(self):
        word = tuple(int(v) for v in self.word)
        if not word:
            raise ValueError("signal word must be nonempty")
        h = as_fraction(self.h)
        tau = as_fraction(self.tau)
        if h <= 0:
            raise ValueError("dwell time h must be positive")
        if not 0 <= tau < h:
            raise ValueError(f"offset tau={float(tau)} must lie in [0, h)")
        object.__setattr__(self, "word", word)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "anchor", int(self.anchor))
        object.__setattr__(self, "extension", Extension(self.extension))

    # -- construction helpers -------------------------------------------------

    @classmethod
    def constant(cls, v: int, h) -> "SymbolicSignal":
        return cls((v,), h, 0, 0, Extension.CONSTANT_ENDS)

    @classmethod
    def periodic(cls, word: Sequence[int], h, tau=0, anchor: int = 0) -> "SymbolicSignal":
        return cls(tuple(word), h, tau, anchor, Extension.PERIODIC)

    @classmethod
    def from_config(cls, cfg: dict, h=None) -> "SymbolicSignal":
        hh = cfg.get("h", h)
        if hh is None:
            raise ValueError("signal literal needs a dwell time h")
        return cls(tuple(cfg["word"]), hh, cfg.get("tau", 0), cfg.get("anchor", 0),
                   Extension(cfg.get("extension", "periodic")))

    def to_config(self) -> dict:
        return {"word": list(self.word), "h": time_literal(self.h), "tau": time_literal(self.tau),
                "anchor": self.anchor, "extension": self.extension.value}

    # -- indexing ---------------------------------------------------------------

    @property
    def base(self) -> int:
        # time 0 sits in interval 0 when tau == 0, otherwise in interval -1
        return self.anchor + (1 if self.tau > 0 else 0)

    def interval_index(self, t) -> int:
        """Index ``k`` of the dwell interval containing time ``t``."""
        return math.floor((as_fraction(t) - self.tau) / self.h)

    def breakpoint(self, k: int) -> Fraction:
        return self.tau + k * self.h

    def symbol(self, k: int) -> int:
        """Vertex active on dwell interval ``k``."""
        i = self.base + k
        n = len(self.word)
        if self.extension is Extension.PERIODIC:
            return self.word[i % n]
        return self.word[min(max(i, 0), n - 1)]

    def evaluate(self, t) -> int:
        return self.symbol(self.interval_index(t))

    def is_admissible(self, g: DirectedGraph) -> bool:
        """Whether every transition of the bi-infinite signal is an edge of ``g``."""
        if self.extension is Extension.PERIODIC:
            return g.is_admissible(self.word, cyclic=True)
        return (g.is_admissible(self.word) and g.has_self_loop(self.word[0])
                and g.has_self_loop(self.word[-1]))

    def require_admissible(self, g: DirectedGraph) -> None:
        if not self.is_admissible(g):
            raise GraphError(f"signal {self.word} ({self.extension.value}) is not admissible for the graph")

    def symbols_used(self) -> frozenset:
        return frozenset(self.word)

    def tail_symbols(self, forward: bool = True) -> frozenset:
        """Vertices recurring as ``t -> +inf`` (or ``-inf``)."""
        if self.extension is Extension.PERIODIC:
            return frozenset(self.word)
        return frozenset([self.word[-1] if forward else self.word[0]])


def shift(sig: SymbolicSignal, t) -> SymbolicSignal:
    """Translate in time: ``evaluate(shift(sig, t), s) == evaluate(sig, s + t)``."""
    t = as_fraction(t)
    new_tau = (sig.tau - t) % sig.h
    m = (new_tau - sig.tau + t) / sig.h
    assert m.denominator == 1
    new_base = sig.base + int(m)
    anchor = new_base - (1 if new_tau > 0 else 0)
    if sig.extension is Extension.PERIODIC:
        anchor %= len(sig.word)
    return SymbolicSignal(sig.word, sig.h, new_tau, anchor, sig.extension)


def reversed_signal(sig: SymbolicSignal) -> SymbolicSignal:
    """``r(t) = sig(-t)`` up to the measure-zero breakpoint set."""
    n = len(sig.word)
    word = sig.word[::-1]
    new_tau = (-sig.tau) % sig.h
    s = 0 if sig.tau == 0 else 1
    # reversed interval j carries sig's interval -j-1-s; with word'[i] = word[n-1-i]
    # this fixes base' = n - base + s
    new_base = n - sig.base + s
    anchor = new_base - (1 if new_tau > 0 else 0)
    if sig.extension is Extension.PERIODIC:
        anchor %= n
    return SymbolicSignal(word, sig.h, new_tau, anchor, sig.extension)


@dataclass(frozen=True)
class MetricResult:
    value: float
    truncation_error_bound: float
    exact: Fraction | None = None


def truncation_bound(window: int) -> Fraction:
    """Upper bound on the weight mass outside the window, ``(8/3) 4^-N``."""
    return Fraction(8, 3) / Fraction(4) ** window


def tail_mass(window: int) -> Fraction:
    """Exact weight mass ``sum_{|i| > N} 4^-|i| = (2/3) 4^-N``."""
    return Fraction(2, 3) / Fraction(4) ** window


def mismatch_fraction(x: SymbolicSignal, y: SymbolicSignal, i: int) -> Fraction:
    """Fraction of ``[i h, (i+1) h)`` on which ``x`` and ``y`` differ."""
    h = x.h
    lo, hi = i * h, (i + 1) * h
    cuts = {lo, hi}
    for sig in (x, y):
        k0 = sig.interval_index(lo)
        k = k0 + 1
        while True:
            b = sig.breakpoint(k)
            if b >= hi:
                break
            cuts.add(b)
            k += 1
    pts = sorted(cuts)
    total = Fraction(0)
    for a, b in zip(pts, pts[1:]):
        if x.evaluate(a) != y.evaluate(a):
            total += b - a
    return total / h


def distance(x: SymbolicSignal, y: SymbolicSignal, window: int = DEFAULT_WINDOW) -> MetricResult:
    """Window-truncated ``sum_i 4^-|i| f(x, y, i)`` over ``|i| <= window``."""
    if x.h != y.h:
        raise ValueError("signals have different dwell times")
    if window < 1:
        raise ValueError("window must be at least 1")
    total = Fraction(0)
    for i in range(-window, window + 1):
        f = mismatch_fraction(x, y, i)
        if f:
            total += f / Fraction(4) ** abs(i)
    return MetricResult(float(total), float(truncation_bound(window)), total)


def lift_membership(sig: SymbolicSignal, cls: CommClass | frozenset) -> bool:
    members = cls.members if isinstance(cls, CommClass) else frozenset(cls)
    return sig.symbols_used() <= members


# -- constructive witnesses ------------------------------------------------------


def _connect(g: DirectedGraph, a: int, b: int, within: frozenset) -> list[int]:
    """Intermediate vertices of a shortest path a -> b inside ``within``."""
    if g.has_edge(a, b):
        return []
    path = shortest_path(g, a, b, within)
    if path is None:
        raise GraphError(f"no admissible path from {a} to {b} inside {sorted(within)}")
    return path[1:-1]


def minimal_period(word: Sequence[int]) -> tuple:
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and all(word[i] == word[i % p] for i in range(n)):
            return tuple(word[:p])
    return tuple(word)


def contains_cyclic(word: Sequence[int], sub: Sequence[int]) -> bool:
    """Whether ``sub`` occurs in the periodic extension of ``word``."""
    n = len(word)
    reps = len(sub) // n + 2
    ext = tuple(word) * reps
    m = len(sub)
    sub = tuple(sub)
    return any(ext[i:i + m] == sub for i in range(n))


def transitive_witness(g: DirectedGraph, cls: CommClass, L: int, h=1) -> SymbolicSignal:
    """Periodic signal inside ``cls`` whose word contains every admissible
    word of length ``<= L`` over ``cls``.

    Length-``L`` words are concatenated in lexicographic order, joined by
    shortest connecting paths inside the class.
    """
    if L < 1:
        raise ValueError("L must be at least 1")
    members = cls.members if isinstance(cls, CommClass) else frozenset(cls)
    words = admissible_words(g, L, members)
    if not words:
        raise GraphError("class admits no word of the requested length")
    seq: list[int] = []
    for w in words:
        if seq:
            seq.extend(_connect(g, seq[-1], w[0], members))
        seq.extend(w)
    seq.extend(_connect(g, seq[-1], seq[0], members))
    return SymbolicSignal.periodic(minimal_period(seq), h)


def witness_shift(witness: SymbolicSignal, target: Sequence[int], center: int) -> Fraction:
    """Time ``t`` such that ``shift(witness, t)`` shows ``target`` on dwell
    intervals ``-center .. len(target) - center - 1``."""
    if witness.extension is not Extension.PERIODIC or witness.tau != 0:
        raise ValueError("witness_shift expects an unshifted periodic witness")
    n = len(witness.word)
    target = tuple(target)
    ext = witness.word * (len(target) // n + 2)
    for i in range(n):
        if ext[i:i + len(target)] == target:
            # want word index i on interval -center
            k = (i - witness.base) + center
            return Fraction(k) * witness.h
    raise ValueError(f"target {target} does not occur in witness")


def _single_class(g: DirectedGraph) -> CommClass:
    classes = communicating_classes(g)
    if len(classes) != 1 or len(classes[0].members) != g.n_vertices:
        raise GraphError("graph is not a single communicating class")
    return classes[0]


def sensitive_pair(g: DirectedGraph, x: SymbolicSignal, eps: float) -> tuple[SymbolicSignal, Fraction]:
    """Build ``y`` close to ``x`` whose orbit separates by a full dwell interval.

    Returns ``(y, t)`` with ``distance(x, y) < eps`` and
    ``distance(shift(x, t), shift(y, t)) >= 1``.
    """
    _single_class(g)
    degrees = validate_n_graph(g)
    branching = [v for v in range(g.n_vertices) if degrees.out_degrees[v] >= 2]
    if not branching:
        raise GraphError("every vertex has out-degree 1; the shift is not sensitive")
    if eps <= 0:
        raise ValueError("eps must be positive")
    x.require_admissible(g)
    g1 = branching[0]
    members = frozenset(range(g.n_vertices))
    N = 1
    while truncation_bound(N) >= as_fraction(eps):
        N += 1
    h = x.h
    # dwell intervals meeting the time window [-N h, N h]
    k_lo = x.interval_index(-N * h)
    k_hi = x.interval_index(N * h)
    search = len(x.word) + 1
    j0 = next((k for k in range(k_hi, k_hi + search + 1) if x.symbol(k) == g1), None)
    if j0 is not None:
        prefix = [x.symbol(k) for k in range(k_lo, j0 + 1)]
        nxt = x.symbol(j0 + 1)
        other = next(w for w in g.successors(g1) if w != nxt)
        y_word = prefix + [other]
        j = j0 + 1
    else:
        prefix = [x.symbol(k) for k in range(k_lo, k_hi + 1)]
        path = shortest_path(g, prefix[-1], g1, members)
        y_word = prefix + path[1:]
        j = k_hi + len(path) - 1
    y_word += _connect(g, y_word[-1], y_word[0], members)
    new_base = -k_lo
    anchor = new_base - (1 if x.tau > 0 else 0)
    y = SymbolicSignal(tuple(y_word), h, x.tau, anchor % len(y_word), Extension.PERIODIC)
    return y, x.breakpoint(j)


def isolation_witness(sig: SymbolicSignal, cls: CommClass | frozenset, horizon: int | None = None) -> Fraction | None:
    """Shift time moving a symbol outside ``cls`` onto ``[0, h)``, or None.

    After this shift the signal is at distance ``>= 1 > 1/4`` from every
    signal of the lift of ``cls``.
    """
    members = cls.members if isinstance(cls, CommClass) else frozenset(cls)
    n = horizon if horizon is not None else 2 * len(sig.word) + 2
    for k in sorted(range(-n, n + 1), key=lambda k: (abs(k), k)):
        if sig.symbol(k) not in members:
            return sig.breakpoint(k)
    return None


def chaos_certificate(g: DirectedGraph, L: int, eps: float, probe: SymbolicSignal | None = None) -> dict:
    """Run both constructive halves of the chaos statement on ``g``."""
    cls = _single_class(g)
    witness = transitive_witness(g, cls, L)
    missing = [w for n in range(1, L + 1) for w in admissible_words(g, n, cls.members)
               if not contains_cyclic(witness.word, w)]
    x = probe if probe is not None else witness
    y, t = sensitive_pair(g, x, eps)
    d0 = distance(x, y)
    d1 = distance(shift(x, t), shift(y, t))
    return {
        "class": sorted(cls.members),
        "kind": ClassKind.INVARIANT.value,
        "witness_word": list(witness.word),
        "missing_words": [list(w) for w in missing],
        "eps": eps,
        "d_initial": d0.value,
        "separation_time": float(t),
        "d_separated": d1.value,
        "transitive": not missing,
        "sensitive": d0.value < eps and d1.value >= 1,
    }


def _normal_form(word: tuple, extension: Extension) -> tuple:
    """Shortest (word, anchor, extension) describing the same function as
    ``word`` anchored at 0."""
    if extension is Extension.PERIODIC:
        word = minimal_period(word)
        if len(word) == 1:
            return word, 0, Extension.CONSTANT_ENDS
        return word, 0, extension
    anchor = 0
    while len(word) > 1 and word[0] == word[1]:
        word = word[1:]
        anchor -= 1
    while len(word) > 1 and word[-1] == word[-2]:
        word = word[:-1]
    return word, anchor if len(word) > 1 else 0, extension


def sample_signals(g: DirectedGraph, h, lengths: Sequence[int], within: frozenset | None = None,
                   phases: Sequence = (0,)) -> list[SymbolicSignal]:
    """Admissible signals built from words of the given lengths.

    Every admissible word yields a periodic signal (when its wrap pair is an
    edge) and an eventually-constant one (when its end vertices carry
    self-loops), once per offset ``tau = phase * h``. Words that describe the same function are listed once, in
    first-seen order.
    """
    h = as_fraction(h)
    seen = set()
    out = []
    for phase in phases:
        tau = as_fraction(phase) * h
        for n in lengths:
            for word in admissible_words(g, n, within):
                for ext in (Extension.PERIODIC, Extension.CONSTANT_ENDS):
                    w, anchor, e = _normal_form(tuple(word), ext)
                    sig = SymbolicSignal(w, h, tau, anchor, e)
                    if sig in seen or not sig.is_admissible(g):
                        continue
                    seen.add(sig)
                    out.append(sig)
    return out
