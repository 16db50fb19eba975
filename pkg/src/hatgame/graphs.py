"""Undirected simple graphs: file format, canonical ordering, structure analysis."""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union


class GraphError(ValueError):
    """Invalid graph data or an operation applied to the wrong kind of graph."""


class GraphFormatError(GraphError):
    """Malformed graph file; message carries the offending line number."""


def _norm_edge(u: str, v: str) -> tuple[str, str]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with lexicographically ordered vertices.

    ``vertices`` is sorted; ``edges`` holds pairs ``(u, v)`` with ``u < v``.
    """

    vertices: tuple[str, ...]
    edges: frozenset[tuple[str, str]]

    @staticmethod
    def build(edges: Iterable[tuple[str, str]], isolated: Iterable[str] = ()) -> Graph:
        """Construct a graph, validating identifiers, loops and duplicates."""
        vset: set[str] = set()
        eset: set[tuple[str, str]] = set()
        for name in isolated:
            _check_vertex_id(name)
            vset.add(name)
        for u, v in edges:
            _check_vertex_id(u)
            _check_vertex_id(v)
            if u == v:
                raise GraphError(f"self-loop at vertex {u!r}")
            e = _norm_edge(u, v)
            if e in eset:
                raise GraphError(f"duplicate edge {u!r} {v!r}")
            eset.add(e)
            vset.update(e)
        return Graph(tuple(sorted(vset)), frozenset(eset))

    @cached_property
    def _adjacency(self) -> dict[str, tuple[str, ...]]:
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    def neighbors(self, v: str) -> tuple[str, ...]:
        """Neighbors of ``v`` in ascending lexicographic order."""
        if v not in self._adjacency:
            raise GraphError(f"unknown vertex {v!r}")
        return self._adjacency[v]

    def degree(self, v: str) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: str, v: str) -> bool:
        return _norm_edge(u, v) in self.edges

    def __contains__(self, v: str) -> bool:
        return v in self._adjacency

    def __len__(self) -> int:
        return len(self.vertices)

    def subgraph(self, keep: Iterable[str]) -> Graph:
        """Induced subgraph on ``keep``."""
        ks = set(keep)
        unknown = ks - set(self.vertices)
        if unknown:
            raise GraphError(f"unknown vertices {sorted(unknown)}")
        edges = [e for e in self.edges if e[0] in ks and e[1] in ks]
        return Graph.build(edges, isolated=ks)


def _check_vertex_id(name: str) -> None:
    if not name or any(c.isspace() for c in name):
        raise GraphError(f"bad vertex id {name!r}: must be nonempty and whitespace-free")
    if ":" in name:
        raise GraphError(f"bad vertex id {name!r}: ':' is reserved for model vertices")


def parse_graph(text: str) -> Graph:
    """Parse the line-oriented graph format.

    ``# comment``, ``vertex <id>`` and ``edge <id> <id>`` lines; ids are
    arbitrary non-whitespace strings without ``:``.
    """
    declared: set[str] = set()
    isolated: list[str] = []
    edges: list[tuple[str, str]] = []
    seen_edges: set[tuple[str, str]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            if tokens[0] == "vertex":
                if len(tokens) != 2:
                    raise GraphError("expected 'vertex <id>'")
                _check_vertex_id(tokens[1])
                if tokens[1] in declared:
                    raise GraphError(f"duplicate vertex declaration {tokens[1]!r}")
                declared.add(tokens[1])
                isolated.append(tokens[1])
            elif tokens[0] == "edge":
                if len(tokens) != 3:
                    raise GraphError("expected 'edge <id> <id>'")
                u, v = tokens[1], tokens[2]
                _check_vertex_id(u)
                _check_vertex_id(v)
                if u == v:
                    raise GraphError(f"self-loop at vertex {u!r}")
                e = _norm_edge(u, v)
                if e in seen_edges:
                    raise GraphError(f"duplicate edge {u!r} {v!r}")
                seen_edges.add(e)
                edges.append(e)
            else:
                raise GraphError(f"unknown directive {tokens[0]!r}")
        except GraphError as exc:
            raise GraphFormatError(f"line {lineno}: {exc}") from None
    return Graph.build(edges, isolated=isolated)


def format_graph(g: Graph) -> str:
    """Serialize to the graph file format (round-trips through parse_graph)."""
    lines = [f"vertex {v}" for v in g.vertices if not g.neighbors(v)]
    lines += [f"edge {u} {v}" for u, v in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def canonical_neighbors(g: Graph, v: str) -> tuple[str, ...]:
    """Ascending lexicographic neighbor list; the one canonical axis order."""
    return g.neighbors(v)


def connected_components(g: Graph) -> list[Graph]:
    """Components as induced subgraphs, ordered by smallest contained vertex."""
    remaining = set(g.vertices)
    comps = []
    while remaining:
        start = min(remaining)
        seen = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for u in frontier:
                for w in g.neighbors(u):
                    if w not in seen:
                        seen.add(w)
                        nxt.append(w)
            frontier = nxt
        remaining -= seen
        comps.append(g.subgraph(seen))
    return comps


def is_connected(g: Graph) -> bool:
    return len(g.vertices) > 0 and len(connected_components(g)) == 1


def prune_to_two_core(g: Graph) -> Graph:
    """Repeatedly strip degree<=1 vertices; the result is the 2-core."""
    keep = set(g.vertices)
    degrees = {v: g.degree(v) for v in keep}
    queue = [v for v in keep if degrees[v] <= 1]
    while queue:
        v = queue.pop()
        if v not in keep:
            continue
        keep.discard(v)
        for w in g.neighbors(v):
            if w in keep:
                degrees[w] -= 1
                if degrees[w] <= 1:
                    queue.append(w)
    return g.subgraph(keep)


def build_three_model(g: Graph) -> Graph:
    """The color-expanded model: vertices ``v:c`` for c in 0..2, complete
    bipartite 3x3 join per original edge."""
    isolated = [f"{v}:{c}" for v in g.vertices for c in range(3)]
    edges = [
        (f"{u}:{i}", f"{v}:{j}")
        for u, v in sorted(g.edges)
        for i in range(3)
        for j in range(3)
    ]
    return Graph.build(edges, isolated=isolated)


# --- structural classification ---------------------------------------------


@dataclass(frozen=True)
class DisjointCycles:
    """Two vertex-disjoint cycles plus a connecting path; ``pivot_a`` and
    ``pivot_b`` are adjacent vertices on the path (cycle side of a / of b)."""

    cycle_a: tuple[str, ...]
    cycle_b: tuple[str, ...]
    path: tuple[str, ...]  # from a vertex of cycle_a to a vertex of cycle_b
    pivot_a: str
    pivot_b: str


@dataclass(frozen=True)
class SharedVertexCycles:
    """Two cycles meeting in exactly one vertex; both tuples start there."""

    shared: str
    cycle_a: tuple[str, ...]
    cycle_b: tuple[str, ...]


@dataclass(frozen=True)
class Theta:
    """Vertices ``a`` and ``b`` joined by three internally disjoint paths;
    each path tuple runs from ``a`` to ``b`` inclusive."""

    a: str
    b: str
    paths: tuple[tuple[str, ...], tuple[str, ...], tuple[str, ...]]


Witness = Union[DisjointCycles, SharedVertexCycles, Theta]


@dataclass(frozen=True)
class StructureReport:
    kind: str  # "tree" | "unicyclic" | "multicyclic"
    cycle: tuple[str, ...] | None = None  # unicyclic: the unique cycle, in order
    witness: Witness | None = None  # multicyclic only


def simple_cycles(g: Graph) -> list[tuple[str, ...]]:
    """All simple cycles, each reported once.

    A cycle tuple starts at its smallest vertex; orientation is fixed by
    requiring the second vertex to be smaller than the last. Output is sorted
    by (length, vertex set, tuple) so downstream tie-breaks are stable.
    """
    cycles: list[tuple[str, ...]] = []
    path: list[str] = []
    on_path: set[str] = set()

    def extend(start: str, v: str) -> None:
        for w in g.neighbors(v):
            if w == start and len(path) >= 3:
                if path[1] < path[-1]:
                    cycles.append(tuple(path))
            elif w > start and w not in on_path:
                path.append(w)
                on_path.add(w)
                extend(start, w)
                path.pop()
                on_path.discard(w)

    for s in g.vertices:
        path = [s]
        on_path = {s}
        extend(s, s)
    cycles.sort(key=lambda c: (len(c), tuple(sorted(c)), c))
    return cycles


def _bfs_path_between(g: Graph, sources: set[str], targets: set[str]) -> tuple[str, ...]:
    """Deterministic shortest path from ``sources`` to ``targets``; interior
    vertices avoid both sets."""
    parent: dict[str, str | None] = {s: None for s in sorted(sources)}
    frontier = sorted(sources)
    while frontier:
        nxt = []
        for u in frontier:
            for w in g.neighbors(u):
                if w in parent:
                    continue
                parent[w] = u
                if w in targets:
                    out = [w]
                    while parent[out[-1]] is not None:
                        out.append(parent[out[-1]])  # type: ignore[arg-type]
                    return tuple(reversed(out))
                nxt.append(w)
        frontier = sorted(nxt)
    raise GraphError("no connecting path: graph is disconnected")


def _rotate_cycle(cycle: tuple[str, ...], start: str) -> tuple[str, ...]:
    i = cycle.index(start)
    return cycle[i:] + cycle[:i]


def _cycle_arcs(cycle: tuple[str, ...], a: str, b: str) -> list[tuple[str, ...]]:
    """The two a->b paths along a cycle through both endpoints."""
    rot = _rotate_cycle(cycle, a)
    j = rot.index(b)
    arc1 = rot[: j + 1]
    arc2 = (a,) + tuple(reversed(rot[j:]))
    return [arc1, arc2]


def validate_witness(g: Graph, w: Witness) -> None:
    """Check a multicyclic witness against the graph; raise GraphError if bad."""

    def check_cycle(cycle: tuple[str, ...]) -> None:
        if len(cycle) < 3 or len(set(cycle)) != len(cycle):
            raise GraphError(f"not a simple cycle: {cycle}")
        for i, v in enumerate(cycle):
            if not g.has_edge(v, cycle[(i + 1) % len(cycle)]):
                raise GraphError(f"cycle edge missing: {v}-{cycle[(i + 1) % len(cycle)]}")

    def check_path(p: tuple[str, ...]) -> None:
        if len(set(p)) != len(p):
            raise GraphError(f"path repeats a vertex: {p}")
        for u, v in zip(p, p[1:]):
            if not g.has_edge(u, v):
                raise GraphError(f"path edge missing: {u}-{v}")

    if isinstance(w, DisjointCycles):
        check_cycle(w.cycle_a)
        check_cycle(w.cycle_b)
        check_path(w.path)
        if set(w.cycle_a) & set(w.cycle_b):
            raise GraphError("cycles share a vertex")
        if w.path[0] not in w.cycle_a or w.path[-1] not in w.cycle_b:
            raise GraphError("path does not join the cycles")
        interior = set(w.path[1:-1])
        if interior & (set(w.cycle_a) | set(w.cycle_b)):
            raise GraphError("path interior meets a cycle")
        k = w.path.index(w.pivot_a)
        if k + 1 >= len(w.path) or w.path[k + 1] != w.pivot_b:
            raise GraphError("pivots are not consecutive on the path")
    elif isinstance(w, SharedVertexCycles):
        check_cycle(w.cycle_a)
        check_cycle(w.cycle_b)
        if set(w.cycle_a) & set(w.cycle_b) != {w.shared}:
            raise GraphError("cycles must share exactly the declared vertex")
        if w.cycle_a[0] != w.shared or w.cycle_b[0] != w.shared:
            raise GraphError("cycles must start at the shared vertex")
    elif isinstance(w, Theta):
        if len(w.paths) != 3 or len(set(w.paths)) != 3 or w.a == w.b:
            raise GraphError("need three distinct paths between distinct endpoints")
        for p in w.paths:
            if len(p) < 2 or p[0] != w.a or p[-1] != w.b:
                raise GraphError(f"path must run from {w.a} to {w.b}: {p}")
            check_path(p)
        interiors = [set(p[1:-1]) for p in w.paths]
        for i in range(3):
            for j in range(i + 1, 3):
                if interiors[i] & interiors[j]:
                    raise GraphError("theta paths share an interior vertex")
    else:
        raise GraphError(f"unknown witness type {type(w).__name__}")


def _find_disjoint_cycles(g: Graph, cycles: list[tuple[str, ...]]) -> DisjointCycles | None:
    for i, ca in enumerate(cycles):
        sa = set(ca)
        for cb in cycles[i + 1 :]:
            if sa & set(cb):
                continue
            path = _bfs_path_between(g, sa, set(cb))
            w = DisjointCycles(
                cycle_a=_rotate_cycle(ca, path[0]),
                cycle_b=_rotate_cycle(cb, path[-1]),
                path=path,
                pivot_a=path[0],
                pivot_b=path[1],
            )
            validate_witness(g, w)
            return w
    return None


def _find_shared_vertex(g: Graph, cycles: list[tuple[str, ...]]) -> SharedVertexCycles | None:
    for i, ca in enumerate(cycles):
        sa = set(ca)
        for cb in cycles[i + 1 :]:
            common = sa & set(cb)
            if len(common) != 1:
                continue
            shared = next(iter(common))
            w = SharedVertexCycles(
                shared=shared,
                cycle_a=_rotate_cycle(ca, shared),
                cycle_b=_rotate_cycle(cb, shared),
            )
            validate_witness(g, w)
            return w
    return None


def _find_theta(g: Graph, cycles: list[tuple[str, ...]]) -> Theta | None:
    # Pairs of cycles sharing >= 2 vertices, smallest total length first: split
    # by two shared vertices, take the shortest arc as one path and candidate
    # arcs of both cycles as the others, keeping the first valid combination.
    pairs = []
    for i, ca in enumerate(cycles):
        for cb in cycles[i + 1 :]:
            if len(set(ca) & set(cb)) >= 2:
                pairs.append((len(ca) + len(cb), ca, cb))
    pairs.sort(key=lambda t: (t[0], t[1], t[2]))
    for _, ca, cb in pairs:
        common = sorted(set(ca) & set(cb))
        for ia, a in enumerate(common):
            for b in common[ia + 1 :]:
                arcs = _cycle_arcs(ca, a, b) + _cycle_arcs(cb, a, b)
                arcs.sort(key=lambda p: (len(p), p))
                for i in range(4):
                    for j in range(i + 1, 4):
                        for k in range(j + 1, 4):
                            w = Theta(a=a, b=b, paths=(arcs[i], arcs[j], arcs[k]))
                            try:
                                validate_witness(g, w)
                            except GraphError:
                                continue
                            return w
    return None


def structural_class(g: Graph) -> StructureReport:
    """Tree / unicyclic / multicyclic classification of a connected graph.

    Multicyclic witnesses are searched in the order disjoint cycles, cycles
    sharing one vertex, theta; within each case candidates are tried in a
    fixed lexicographic order, so the report is deterministic.
    """
    if not g.vertices:
        raise GraphError("empty graph")
    if not is_connected(g):
        raise GraphError("graph is disconnected; classify components separately")
    n, m = len(g.vertices), len(g.edges)
    if m == n - 1:
        return StructureReport(kind="tree")
    core = prune_to_two_core(g)
    if m == n:
        # the 2-core of a unicyclic graph is exactly its cycle
        start = core.vertices[0]
        cycle = [start, core.neighbors(start)[0]]
        while True:
            options = [w for w in core.neighbors(cycle[-1]) if w != cycle[-2]]
            if options[0] == start:
                break
            cycle.append(options[0])
        return StructureReport(kind="unicyclic", cycle=tuple(cycle))
    cycles = simple_cycles(core)
    witness = (
        _find_disjoint_cycles(g, cycles)
        or _find_shared_vertex(g, cycles)
        or _find_theta(g, cycles)
    )
    if witness is None:  # unreachable on valid input: one case always applies
        raise GraphError("no multicyclic witness found")
    return StructureReport(kind="multicyclic", witness=witness)
