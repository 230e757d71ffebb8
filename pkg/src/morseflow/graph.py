"""Directed graphs that constrain switching: N-graphs, admissible paths and
communicating classes."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence


class GraphError(ValueError):
    """Raised for malformed graphs or graphs that violate a precondition."""


class ClassKind(str, enum.Enum):
    VARIANT = "variant"
    INVARIANT = "invariant"


@dataclass(frozen=True)
class DirectedGraph:
    """A finite directed graph on vertices ``0 .. n_vertices - 1``."""

    n_vertices: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        if not isinstance(self.n_vertices, int) or self.n_vertices < 1:
            raise GraphError(f"vertex set must be nonempty, got n_vertices={self.n_vertices!r}")
        edges = []
        for e in self.edges:
            a, b = (int(v) for v in e)
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise GraphError(f"edge {(a, b)} has an endpoint outside 0..{self.n_vertices - 1}")
            edges.append((a, b))
        object.__setattr__(self, "edges", frozenset(edges))
        succ = [[] for _ in range(self.n_vertices)]
        pred = [[] for _ in range(self.n_vertices)]
        for a, b in sorted(edges):
            succ[a].append(b)
            pred[b].append(a)
        object.__setattr__(self, "_succ", tuple(tuple(s) for s in succ))
        object.__setattr__(self, "_pred", tuple(tuple(p) for p in pred))

    @classmethod
    def from_edges(cls, n_vertices: int, edges: Iterable[Sequence[int]], one_based: bool = False) -> "DirectedGraph":
        shift = 1 if one_based else 0
        pairs = [(int(a) - shift, int(b) - shift) for a, b in edges]
        if len(set(pairs)) != len(pairs):
            raise GraphError("duplicate edges in edge list")
        return cls(n_vertices, frozenset(pairs))

    @classmethod
    def complete(cls, n_vertices: int, self_loops: bool = True) -> "DirectedGraph":
        return cls(n_vertices, frozenset(
            (a, b) for a in range(n_vertices) for b in range(n_vertices) if self_loops or a != b))

    def successors(self, v: int) -> tuple:
        return self._succ[v]

    def predecessors(self, v: int) -> tuple:
        return self._pred[v]

    def has_edge(self, a: int, b: int) -> bool:
        return (a, b) in self.edges

    def has_self_loop(self, v: int) -> bool:
        return (v, v) in self.edges

    def check_vertex(self, v: int) -> int:
        if not isinstance(v, (int,)) or not 0 <= v < self.n_vertices:
            raise GraphError(f"invalid vertex index {v!r}")
        return v

    def is_admissible(self, word: Sequence[int], cyclic: bool = False) -> bool:
        """True if consecutive entries (and the wrap pair when ``cyclic``) are edges."""
        if not word:
            return False
        if any(not 0 <= v < self.n_vertices for v in word):
            return False
        pairs = list(zip(word, word[1:]))
        if cyclic:
            pairs.append((word[-1], word[0]))
        return all(p in self.edges for p in pairs)

    def to_config(self) -> dict:
        return {"vertices": self.n_vertices, "edges": [list(e) for e in sorted(self.edges)]}


@dataclass(frozen=True)
class DegreeReport:
    out_degrees: tuple
    in_degrees: tuple

    @property
    def is_n_graph(self) -> bool:
        return all(d >= 1 for d in self.out_degrees) and all(d >= 1 for d in self.in_degrees)


@dataclass(frozen=True)
class CommClass:
    members: frozenset
    kind: ClassKind

    def __contains__(self, v) -> bool:
        return v in self.members

    def sorted_members(self) -> list:
        return sorted(self.members)


def validate_n_graph(g: DirectedGraph) -> DegreeReport:
    out_deg = [0] * g.n_vertices
    in_deg = [0] * g.n_vertices
    for a, b in g.edges:
        out_deg[a] += 1
        in_deg[b] += 1
    return DegreeReport(tuple(out_deg), tuple(in_deg))


def require_n_graph(g: DirectedGraph) -> None:
    report = validate_n_graph(g)
    if not report.is_n_graph:
        bad = [v for v in range(g.n_vertices) if report.out_degrees[v] == 0 or report.in_degrees[v] == 0]
        raise GraphError(f"not an N-graph: vertices {bad} lack an incoming or outgoing edge")


def strongly_connected_components(n: int, successors) -> list[list[int]]:
    """Iterative Tarjan. ``successors(v)`` yields the out-neighbours of ``v``.

    Components come out in reverse topological order of the condensation.
    """
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, iter(successors(root)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
    return comps


def recurrent_components(n: int, successors, has_loop) -> list[list[int]]:
    """SCCs that carry at least one cycle, sorted by smallest member."""
    comps = [c for c in strongly_connected_components(n, successors) if len(c) > 1 or has_loop(c[0])]
    return sorted(comps, key=lambda c: c[0])


def communicating_classes(g: DirectedGraph) -> list[CommClass]:
    """Maximal sets of mutually reachable vertices, labelled variant/invariant.

    A vertex that lies on no cycle belongs to no class.
    """
    require_n_graph(g)
    classes = []
    for comp in recurrent_components(g.n_vertices, g.successors, g.has_self_loop):
        members = frozenset(comp)
        leaves = any(b not in members for a in comp for b in g.successors(a))
        classes.append(CommClass(members, ClassKind.VARIANT if leaves else ClassKind.INVARIANT))
    return classes


def invariant_class_exists(g: DirectedGraph) -> CommClass:
    """Return an invariant communicating class; every N-graph has one."""
    for c in communicating_classes(g):
        if c.kind is ClassKind.INVARIANT:
            return c
    raise AssertionError("N-graph without an invariant communicating class")


def admissible_paths(g: DirectedGraph, source: int, target: int, max_len: int) -> list[list[int]]:
    """All vertex sequences from ``source`` to ``target`` using 1..max_len edges.

    The trivial single-vertex path is never returned.
    """
    g.check_vertex(source)
    g.check_vertex(target)
    if max_len < 1:
        raise GraphError("max_len must be at least 1")
    found = []
    stack = [[source]]
    while stack:
        path = stack.pop()
        if len(path) > 1 and path[-1] == target:
            found.append(path)
        if len(path) - 1 < max_len:
            for w in reversed(g.successors(path[-1])):
                stack.append(path + [w])
    return sorted(found, key=lambda p: (len(p), p))


def shortest_path(g: DirectedGraph, source: int, target: int, within: frozenset | None = None) -> list[int] | None:
    """Shortest admissible path with at least one edge, optionally confined to ``within``."""
    allowed = within if within is not None else frozenset(range(g.n_vertices))
    parent: dict[int, int] = {}
    queue = deque()
    for w in g.successors(source):
        if w in allowed and w not in parent:
            parent[w] = source
            queue.append(w)
    while queue:
        v = queue.popleft()
        if v == target:
            path = [v]
            while True:
                prev = parent[path[-1]]
                path.append(prev)
                if prev == source and len(path) > 1:
                    break
            return path[::-1]
        for w in g.successors(v):
            if w in allowed and w not in parent:
                parent[w] = v
                queue.append(w)
    return None


def admissible_words(g: DirectedGraph, length: int, within: frozenset | None = None) -> list[tuple]:
    """All admissible words with ``length`` symbols, lexicographically ordered."""
    allowed = sorted(within) if within is not None else list(range(g.n_vertices))
    words = [(v,) for v in allowed]
    for _ in range(length - 1):
        words = [w + (b,) for w in words for b in g.successors(w[-1]) if within is None or b in within]
    return sorted(words)


def to_dot(g: DirectedGraph, classes: list[CommClass] | None = None, name: str = "G") -> str:
    lines = [f"digraph {name} {{"]
    clustered = set()
    for k, c in enumerate(classes or []):
        label = f"class {k} ({c.kind.value})"
        style = "bold" if c.kind is ClassKind.INVARIANT else "dashed"
        lines.append(f"  subgraph cluster_{k} {{")
        lines.append(f'    label="{label}"; style={style};')
        for v in c.sorted_members():
            lines.append(f"    {v};")
            clustered.add(v)
        lines.append("  }")
    for v in range(g.n_vertices):
        if v not in clustered:
            lines.append(f"  {v};")
    for a, b in sorted(g.edges):
        lines.append(f"  {a} -> {b};")
    lines.append("}")
    return "\n".join(lines) + "\n"
