"""Coupling graphs and the graph algorithms the synthesizers share."""

from __future__ import annotations

import random
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

Edge = tuple[int, int]


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class CouplingGraph:
    """Undirected connected graph on vertices ``0..n-1``.

    ``coords`` is set for rectangular lattices (``coords[v] == (x, y)``) so that
    partitioning can use straight cuts.
    """

    n: int
    edges: frozenset[Edge]
    coords: tuple[tuple[int, int], ...] | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if u > v:
                raise ValueError("edges must be stored as (min, max)")
        if not _connected(self.adjacency, range(self.n)):
            raise ValueError("coupling graph must be connected")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Sequence[int]],
        coords: Sequence[tuple[int, int]] | None = None,
    ) -> CouplingGraph:
        es = frozenset(_norm(int(u), int(v)) for u, v in edges)
        return cls(n, es, tuple(coords) if coords is not None else None)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        nbrs: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return tuple(frozenset(s) for s in nbrs)

    @cached_property
    def sorted_adjacency(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(s)) for s in self.adjacency)

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def distances(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(bfs_distances(self.adjacency, s)) for s in range(self.n))

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    @property
    def is_path(self) -> bool:
        return len(self.edges) == self.n - 1 and all(len(a) <= 2 for a in self.adjacency)

    @property
    def is_ring(self) -> bool:
        return self.n >= 3 and len(self.edges) == self.n and all(
            len(a) == 2 for a in self.adjacency
        )

    @property
    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1

    def path_order(self) -> list[int]:
        """Vertices of a path graph listed from the smaller-labelled end."""
        if not self.is_path:
            raise ValueError("graph is not a path")
        if self.n == 1:
            return [0]
        ends = sorted(v for v in range(self.n) if len(self.adjacency[v]) == 1)
        order = [ends[0]]
        prev = -1
        while len(order) < self.n:
            cur = order[-1]
            nxt = next(w for w in self.adjacency[cur] if w != prev)
            prev = cur
            order.append(nxt)
        return order

    def induced(self, vertices: Iterable[int]) -> tuple[CouplingGraph, list[int]]:
        """Induced subgraph relabelled to ``0..k-1``; also returns new->old labels."""
        labels = sorted(set(vertices))
        index = {v: i for i, v in enumerate(labels)}
        es = [
            (index[u], index[v])
            for u, v in self.edges
            if u in index and v in index
        ]
        coords = [self.coords[v] for v in labels] if self.coords is not None else None
        return CouplingGraph.from_edges(len(labels), es, coords), labels

    def __repr__(self) -> str:
        return f"CouplingGraph(n={self.n}, edges={sorted(self.edges)})"


def bfs_distances(adjacency: Sequence[Iterable[int]], source: int, allowed=None) -> list[int]:
    """Hop distances from ``source``; unreachable (or disallowed) vertices get -1."""
    dist = [-1] * len(adjacency)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in adjacency[u]:
            if dist[w] < 0 and (allowed is None or w in allowed):
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def _connected(adjacency: Sequence[Iterable[int]], vertices: Iterable[int]) -> bool:
    vs = set(vertices)
    if not vs:
        return True
    start = next(iter(vs))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adjacency[u]:
            if w in vs and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(vs)


def is_connected(g: CouplingGraph, vertices: Iterable[int]) -> bool:
    return _connected(g.adjacency, vertices)


# --- constructors -----------------------------------------------------------

def path_graph(n: int) -> CouplingGraph:
    return CouplingGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def ring_graph(n: int) -> CouplingGraph:
    if n < 3:
        raise ValueError("ring needs n >= 3")
    return CouplingGraph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def grid_graph(width: int, height: int) -> CouplingGraph:
    """W x H lattice, vertex ``y * W + x``."""
    edges = []
    for y in range(height):
        for x in range(width):
            v = y * width + x
            if x + 1 < width:
                edges.append((v, v + 1))
            if y + 1 < height:
                edges.append((v, v + width))
    coords = [(v % width, v // width) for v in range(width * height)]
    return CouplingGraph.from_edges(width * height, edges, coords)


def random_tree(n: int, seed: int) -> CouplingGraph:
    """Uniform random labelled tree (Pruefer decoding)."""
    if n < 2:
        raise ValueError("tree needs n >= 2")
    if n == 2:
        return path_graph(2)
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(v for v in range(n) if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = [w for w in range(n) if degree[w] == 1]
    edges.append((u, v))
    return CouplingGraph.from_edges(n, edges)


def star_graph(leaves: int) -> CouplingGraph:
    return CouplingGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def _read_edge_file(path: str) -> CouplingGraph:
    edges = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2 or not all(p.isdigit() for p in parts):
            raise ValueError(f"{path}:{lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if not edges:
        raise ValueError(f"{path}: no edges")
    n = 1 + max(max(e) for e in edges)
    if n < 2:
        raise ValueError("graph needs n >= 2")
    return CouplingGraph.from_edges(n, edges)


def parse_graph(spec: str) -> CouplingGraph:
    """Build a graph from ``path:n``, ``ring:n``, ``grid:WxH``, ``tree:<file>`` or ``edges:<file>``."""
    kind, sep, arg = spec.partition(":")
    if not sep or not arg:
        raise ValueError(f"malformed graph spec {spec!r}")
    if kind in ("path", "ring"):
        if not arg.isdigit():
            raise ValueError(f"malformed graph spec {spec!r}")
        n = int(arg)
        if n < 2:
            raise ValueError("graph needs n >= 2")
        return path_graph(n) if kind == "path" else ring_graph(n)
    if kind == "grid":
        m = re.fullmatch(r"(\d+)x(\d+)", arg)
        if not m:
            raise ValueError(f"malformed grid spec {spec!r}")
        w, h = int(m.group(1)), int(m.group(2))
        if w * h < 2:
            raise ValueError("graph needs n >= 2")
        return grid_graph(w, h)
    if kind in ("tree", "edges"):
        g = _read_edge_file(arg)
        if kind == "tree" and not g.is_tree:
            raise ValueError(f"{arg}: edge list is not a tree")
        return g
    raise ValueError(f"unknown graph kind {kind!r}")


# --- queries ----------------------------------------------------------------

def distance(g: CouplingGraph, a: int, b: int) -> int:
    if not (0 <= a < g.n and 0 <= b < g.n):
        raise IndexError(f"vertex out of range for n={g.n}")
    return g.distances[a][b]


def articulation_points(adjacency: Sequence[Iterable[int]], vertices: Iterable[int]) -> set[int]:
    """Cut vertices of the subgraph induced on ``vertices`` (assumed connected)."""
    vs = set(vertices)
    if len(vs) <= 2:
        return set()
    disc: dict[int, int] = {}
    low: dict[int, int] = {}
    cut: set[int] = set()
    root = min(vs)
    timer = 0
    disc[root] = low[root] = 0
    root_children = 0
    # iterative DFS: (vertex, parent, neighbor iterator)
    stack = [(root, -1, iter(sorted(w for w in adjacency[root] if w in vs)))]
    while stack:
        u, parent, it = stack[-1]
        advanced = False
        for w in it:
            if w not in disc:
                timer += 1
                disc[w] = low[w] = timer
                if u == root:
                    root_children += 1
                stack.append((w, u, iter(sorted(x for x in adjacency[w] if x in vs))))
                advanced = True
                break
            if w != parent:
                low[u] = min(low[u], disc[w])
        if advanced:
            continue
        stack.pop()
        if parent >= 0:
            low[parent] = min(low[parent], low[u])
            if parent != root and low[u] >= disc[parent]:
                cut.add(parent)
    if root_children > 1:
        cut.add(root)
    return cut


def non_cut_vertices(g: CouplingGraph, vertices: Iterable[int] | None = None) -> set[int]:
    """Vertices whose removal leaves the (induced) graph connected."""
    vs = set(range(g.n)) if vertices is None else set(vertices)
    return vs - articulation_points(g.adjacency, vs)


def steiner_tree(
    g: CouplingGraph, terminals: Iterable[int], vertices: Iterable[int] | None = None
) -> frozenset[Edge]:
    """Shortest-path-heuristic Steiner tree (2-approximation).

    Grows from the smallest terminal, repeatedly attaching the nearest remaining
    terminal by a BFS shortest path; ties go to the smallest label. ``vertices``
    restricts the search to an induced subgraph.
    """
    terms = set(terminals)
    if not terms:
        raise ValueError("steiner tree needs at least one terminal")
    allowed = set(range(g.n)) if vertices is None else set(vertices)
    if not terms <= allowed:
        raise ValueError("terminals outside the allowed vertex set")
    adj = g.sorted_adjacency
    tree_vertices = {min(terms)}
    remaining = terms - tree_vertices
    edges: set[Edge] = set()
    while remaining:
        parent = {v: -1 for v in tree_vertices}
        frontier = sorted(tree_vertices)
        found: int | None = None
        while frontier and found is None:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w in allowed and w not in parent:
                        parent[w] = u
                        nxt.append(w)
            hits = [w for w in nxt if w in remaining]
            if hits:
                found = min(hits)
            frontier = sorted(nxt)
        if found is None:
            raise ValueError("terminals are not connected within the allowed vertices")
        v = found
        while v not in tree_vertices:
            u = parent[v]
            edges.add(_norm(u, v))
            tree_vertices.add(v)
            remaining.discard(v)
            v = u
    return frozenset(edges)


# --- balanced 2-partitions --------------------------------------------------

@dataclass(frozen=True)
class Partition:
    """Connected two-way split; ``removed_edges`` are the routing lanes, written (left, right)."""

    left: frozenset[int]
    right: frozenset[int]
    removed_edges: tuple[Edge, ...]
    crossing_edges: tuple[Edge, ...]
    start: int

    @property
    def imbalance(self) -> int:
        return abs(len(self.left) - len(self.right))

    @property
    def disjoint(self) -> bool:
        return len(self.removed_edges) == len(self.crossing_edges)


def _make_partition(g: CouplingGraph, left: Iterable[int], start: int) -> Partition:
    lset = frozenset(left)
    rset = frozenset(range(g.n)) - lset
    crossing = sorted(
        (u, v) if u in lset else (v, u)
        for u, v in g.edges
        if (u in lset) != (v in lset)
    )
    used: set[int] = set()
    lanes = []
    for l, r in crossing:
        if l not in used and r not in used:
            lanes.append((l, r))
            used.update((l, r))
    return Partition(lset, rset, tuple(lanes), tuple(crossing), start)


def _dfs_split(g: CouplingGraph, start: int, half: int) -> set[int] | None:
    adj = g.sorted_adjacency
    rest = set(range(g.n))
    left: set[int] = set()
    stack = [start]
    while stack and len(left) < half:
        x = stack.pop()
        if x in left:
            continue
        candidate = rest - {x}
        if not _connected(g.adjacency, candidate):
            continue
        left.add(x)
        rest = candidate
        for w in reversed(adj[x]):
            if w not in left:
                stack.append(w)
    return left or None


def _grid_cuts(g: CouplingGraph) -> list[Partition]:
    """Near-straight lattice cuts: the first ``n // 2`` vertices in column-major (or row-major) order."""
    coords = g.coords
    assert coords is not None
    xs = sorted({c[0] for c in coords})
    ys = sorted({c[1] for c in coords})
    if len(coords) != len(xs) * len(ys):
        return []
    cuts = []
    for axis, values in ((0, xs), (1, ys)):
        if len(values) < 2:
            continue
        order = sorted(range(g.n), key=lambda v: (coords[v][axis], coords[v][1 - axis]))
        left = order[: g.n // 2]
        if is_connected(g, left) and is_connected(g, order[g.n // 2 :]):
            cuts.append((len(values), axis, _make_partition(g, left, min(left))))
    # cut across the longer side first; x before y on ties
    cuts.sort(key=lambda t: (-t[0], t[1]))
    return [p for _, _, p in cuts]


def partition_graph(g: CouplingGraph, max_samples: int = 1) -> list[Partition]:
    """Up to ``max_samples`` balanced connected 2-partitions of ``g``.

    Each candidate grows a left side by DFS from one start vertex, only taking a
    vertex if the untraversed remainder stays connected, and stops at ``n // 2``.
    Candidates rank by imbalance, then vertex-disjoint crossings, then number of
    lanes, then start vertex. Enumeration stops early once ``max_samples`` ideal
    (balanced and disjoint) candidates are in hand. Lattices also offer straight
    midway cuts, preferred on ties. Only the best imbalance level is returned.
    """
    if g.n < 2:
        raise ValueError("cannot partition a single vertex")
    if max_samples < 1:
        raise ValueError("max_samples must be >= 1")
    half = g.n // 2
    seen: set[frozenset[int]] = set()
    found: list[tuple[int, Partition]] = []
    ideal = 0

    def consider(part: Partition, kind: int) -> None:
        nonlocal ideal
        key = part.left if 0 in part.left else part.right
        if key in seen:
            return
        seen.add(key)
        found.append((kind, part))
        if part.imbalance <= g.n % 2 and part.disjoint:
            ideal += 1

    if g.coords is not None:
        for cut in _grid_cuts(g):
            consider(cut, 0)
    for start in range(g.n):
        if ideal >= max_samples:
            break
        left = _dfs_split(g, start, half)
        if left is None or len(left) == g.n:
            continue
        part = _make_partition(g, left, start)
        if is_connected(g, part.right):
            consider(part, 1)
    found.sort(key=lambda t: (t[1].imbalance, not t[1].disjoint, -len(t[1].removed_edges), t[0], t[1].start))
    best = found[0][1].imbalance
    return [p for _, p in found if p.imbalance == best][:max_samples]
