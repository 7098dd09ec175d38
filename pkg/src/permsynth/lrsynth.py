"""LR-Synth: depth-oriented divide-and-conquer SWAP routing on any connected graph.

A permutation is given as a placement ``at`` where ``at[p]`` is the destination
vertex of the token currently sitting on ``p`` (tokens are named by their
destinations). Each level splits the graph into two connected halves, routes
every token to its destination's half through the crossing lanes in rounds of
vertex-disjoint swaps, and recurses on the halves.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

from permsynth.baselines import odd_even_sort
from permsynth.circuit import Circuit, Gate, depth, verify
from permsynth.gf2 import Permutation, from_permutation
from permsynth.optimal import SynthesisResult, SynthesisTimeout, exact_synth
from permsynth.satcore import DEPTH
from permsynth.topology import CouplingGraph, Partition, bfs_distances, partition_graph

Edge = tuple[int, int]

W_TERMINAL = 1.3
W_CROSS = 1.2
W_PLAIN = 1.0

DEFAULT_HYBRID_THRESHOLD = 8
ALL_PARTITIONS_UP_TO = 16


@dataclass
class PathAssignment:
    lane_of: dict[int, Edge]  # token -> (l, r)
    load: dict[Edge, int]
    move_to_left: set[int]
    move_to_right: set[int]


@dataclass
class RoutingOutcome:
    partition: Partition
    layers: list[list[Edge]]
    at: list[int]
    assignment: PathAssignment
    completed: bool

    @property
    def rounds(self) -> int:
        return len(self.layers)

    @property
    def misplaced(self) -> int:
        return sum(1 for p, t in enumerate(self.at) if p != t)


class _Split:
    """Per-partition distance tables."""

    def __init__(self, g: CouplingGraph, part: Partition):
        self.g = g
        self.part = part
        self.left = part.left
        self.right = part.right
        self.lanes = list(part.removed_edges)
        n = g.n
        lane_l = {l for l, _ in self.lanes}
        lane_r = {r for _, r in self.lanes}
        gl_adj: list[list[int]] = [[] for _ in range(n)]
        gr_adj: list[list[int]] = [[] for _ in range(n)]
        left_adj: list[list[int]] = [[] for _ in range(n)]
        right_adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in g.edges:
            if u in self.left and v in self.left:
                for a, b in ((u, v), (v, u)):
                    gl_adj[a].append(b)
                    left_adj[a].append(b)
            elif u in self.right and v in self.right:
                for a, b in ((u, v), (v, u)):
                    gr_adj[a].append(b)
                    right_adj[a].append(b)
        for l, r in self.lanes:
            gl_adj[l].append(r)
            gl_adj[r].append(l)
            gr_adj[l].append(r)
            gr_adj[r].append(l)
        gl_vertices = set(self.left) | lane_r
        gr_vertices = set(self.right) | lane_l
        # distances inside leftG + lanes to each lane's right end, and mirrored
        self.d_gl = {r: bfs_distances(gl_adj, r, gl_vertices) for r in lane_r}
        self.d_gr = {l: bfs_distances(gr_adj, l, gr_vertices) for l in lane_l}
        # distances inside each half (assignment cost, ordering guard)
        self.d_left = {l: bfs_distances(left_adj, l, self.left) for l in lane_l}
        self.d_right = {r: bfs_distances(right_adj, r, self.right) for r in lane_r}


def _inf(d: int) -> float:
    return float("inf") if d < 0 else d


def assign_paths(g: CouplingGraph, at: Sequence[int], part: Partition, split: _Split | None = None) -> PathAssignment:
    """Give every token that must cross a lane ``(l, r)``.

    A right-bound token ``v`` takes the lane minimising
    ``max(D(leftG, v, l), D(rightG, w, r)) + load / 2`` where ``w`` is the closest
    unassigned left-bound token to ``r``; ``v`` and ``w`` are then both booked on it.
    """
    sp = split or _Split(g, part)
    pos = {t: p for p, t in enumerate(at)}
    mtr = {at[p] for p in sp.left if at[p] in sp.right}
    mtl = {at[p] for p in sp.right if at[p] in sp.left}
    lane_of: dict[int, Edge] = {}
    load = {e: 0 for e in sp.lanes}
    if not sp.lanes:
        raise RuntimeError("partition has no crossing lane")

    def near_l(t: int) -> tuple:
        return (min(_inf(sp.d_left[l][pos[t]]) for l, _ in sp.lanes), pos[t])

    unassigned_left = set(mtl)
    for v in sorted(mtr, key=near_l):
        best = None
        for lane in sp.lanes:
            l, r = lane
            dv = _inf(sp.d_left[l][pos[v]])
            w = None
            if unassigned_left:
                w = min(unassigned_left, key=lambda t: (_inf(sp.d_right[r][pos[t]]), pos[t]))
            dw = _inf(sp.d_right[r][pos[w]]) if w is not None else 0
            # doubled cost keeps load / 2 exact
            cost = 2 * max(dv, dw) + load[lane]
            if best is None or cost < best[0]:
                best = (cost, lane, w)
        if best is None or best[0] == float("inf"):
            raise RuntimeError(f"token {v} cannot reach any lane")
        _, lane, w = best
        lane_of[v] = lane
        load[lane] += 1
        if w is not None:
            lane_of[w] = lane
            load[lane] += 1
            unassigned_left.discard(w)
    for w in sorted(unassigned_left, key=lambda t: pos[t]):
        lane = min(sp.lanes, key=lambda e: (_inf(sp.d_right[e[1]][pos[w]]) + load[e] / 2, e))
        lane_of[w] = lane
        load[lane] += 1
    return PathAssignment(lane_of, load, mtl, mtr)


def _terminal_paths(g: CouplingGraph) -> list[list[int]]:
    """For each vertex, the vertices on a shortest path to its nearest terminal (itself included).

    Terminals are leaves; graphs without leaves use their minimum-degree vertices.
    """
    degs = [len(a) for a in g.adjacency]
    low = 1 if 1 in degs else min(degs)
    terminals = {v for v in range(g.n) if degs[v] == low}
    out = []
    adj = g.sorted_adjacency
    for x in range(g.n):
        parent = {x: -1}
        frontier = [x]
        hit = x if x in terminals else None
        while hit is None and frontier:
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w not in parent:
                        parent[w] = u
                        nxt.append(w)
            hits = [w for w in nxt if w in terminals]
            if hits:
                hit = min(hits)
            frontier = nxt
        path = []
        v = hit
        while v != -1:
            path.append(v)
            v = parent[v]
        out.append(path)
    return out


def _ring_walk(g: CouplingGraph) -> dict[int, int]:
    order = [0]
    prev = -1
    while len(order) < g.n:
        cur = order[-1]
        nxt = min(w for w in g.adjacency[cur] if w != prev)
        prev = cur
        order.append(nxt)
    return {v: i for i, v in enumerate(order)}


def _flipped(g: CouplingGraph, index: dict[int, int], a: int, b: int, at: Sequence[int]) -> bool:
    """Whether the tokens on adjacent ``a``, ``b`` appear in the opposite order at their destinations."""
    ia, ib = index[a], index[b]
    if g.is_path:
        return (ia < ib) != (index[at[a]] < index[at[b]])
    n = g.n
    # ring: unroll along the shorter displacement of each token
    if (ib - ia) % n != 1:
        a, b, ia, ib = b, a, ib, ia

    def shift(p: int, t: int) -> int:
        d = (index[t] - index[p]) % n
        return d if d <= n // 2 else d - n

    return shift(a, at[a]) > 1 + shift(b, at[b])


def routing_rounds(
    g: CouplingGraph,
    at: Sequence[int],
    part: Partition,
    *,
    max_rounds: int | None = None,
    split: _Split | None = None,
) -> RoutingOutcome:
    """Swap rounds until every token sits in its destination's half (or the cap hits)."""
    sp = split or _Split(g, part)
    at = list(at)
    asg = assign_paths(g, at, part, sp)
    lane_of = dict(asg.lane_of)
    left, right = sp.left, sp.right
    cap = max_rounds if max_rounds is not None else 4 * g.n
    term_paths = _terminal_paths(g)
    line = None
    if g.is_path:
        line = {v: i for i, v in enumerate(g.path_order())}
    elif g.is_ring:
        line = _ring_walk(g)
    adj = g.sorted_adjacency
    edges = g.sorted_edges
    side = {p: (0 if p in left else 1) for p in range(g.n)}
    lock_l = lock_r = False
    layers: list[list[Edge]] = []

    def movers() -> tuple[set[int], set[int]]:
        return (
            {at[p] for p in left if at[p] in right},
            {at[p] for p in right if at[p] in left},
        )

    mtr, mtl = movers()
    while mtr or mtl:
        if len(layers) >= cap:
            return RoutingOutcome(part, layers, at, asg, False)
        for t in mtr | mtl:
            if t not in lane_of:
                pos_t = at.index(t)
                table = sp.d_left if t in mtr else sp.d_right
                lane_of[t] = min(
                    sp.lanes,
                    key=lambda e: (_inf(table[e[0] if t in mtr else e[1]][pos_t]), e),
                )
        cand: dict[Edge, float] = {}

        def _backs_off(t: int, src: int, dst: int) -> bool:
            # a crossing token must not be pushed away from its lane
            if t in mtr:
                d = sp.d_gl[lane_of[t][1]]
            elif t in mtl:
                d = sp.d_gr[lane_of[t][0]]
            else:
                return False
            return _inf(d[dst]) > _inf(d[src])

        def add(a: int, b: int, w: float) -> None:
            key = (a, b) if a < b else (b, a)
            if cand.get(key, 0.0) < w:
                cand[key] = w

        # swaps that finish a vertex next to an already-settled stretch to a terminal
        for a, b in edges:
            for x, y in ((a, b), (b, a)):
                if at[y] != x:
                    continue
                if side[y] != side[x] and side[at[x]] != side[y]:
                    continue
                if _backs_off(at[x], x, y):
                    continue
                ok = True
                for p in term_paths[x]:
                    tok = at[y] if p == x else (at[x] if p == y else at[p])
                    if tok != p:
                        ok = False
                        break
                if ok:
                    add(a, b, W_TERMINAL)

        for pu in range(g.n):
            u = at[pu]
            if u in mtr:
                l, r = lane_of[u]
                d_to = sp.d_gl[r]
                du = _inf(d_to[pu])
                for pv in adj[pu]:
                    v = at[pv]
                    if not du > _inf(d_to[pv]):
                        continue
                    if v in mtr and lane_of.get(v) == (l, r):
                        dr = sp.d_right[r]
                        if _inf(dr[u]) <= _inf(dr[v]):
                            continue
                    if (
                        lock_l
                        and v in mtr
                        and lane_of.get(v) != (l, r)
                        and any(at[b] not in mtr and du > _inf(d_to[b]) for b in adj[pv])
                    ):
                        add(pu, pv, W_PLAIN)
                        lock_l = False
                    if v in mtr and lane_of.get(v) != (l, r):
                        _, vb = lane_of[v]
                        dvb = sp.d_gl[vb]
                        if _inf(dvb[pv]) > _inf(dvb[pu]):
                            add(pu, pv, W_PLAIN)
                    elif pu != l:
                        add(pu, pv, W_PLAIN)
                    elif (pu, pv) == (l, r) and v in mtl and lane_of.get(v) == (l, r):
                        add(pu, pv, W_CROSS)
            elif u in mtl:
                l, r = lane_of[u]
                d_to = sp.d_gr[l]
                du = _inf(d_to[pu])
                for pv in adj[pu]:
                    v = at[pv]
                    if not du > _inf(d_to[pv]):
                        continue
                    if v in mtl and lane_of.get(v) == (l, r):
                        dl = sp.d_left[l]
                        if _inf(dl[u]) <= _inf(dl[v]):
                            continue
                    if (
                        lock_r
                        and v in mtl
                        and lane_of.get(v) != (l, r)
                        and any(at[b] not in mtl and du > _inf(d_to[b]) for b in adj[pv])
                    ):
                        add(pu, pv, W_PLAIN)
                        lock_r = False
                    if v in mtl and lane_of.get(v) != (l, r):
                        va, _ = lane_of[v]
                        dva = sp.d_gr[va]
                        if _inf(dva[pv]) > _inf(dva[pu]):
                            add(pu, pv, W_PLAIN)
                    elif pu != r:
                        add(pu, pv, W_PLAIN)
                    elif (pu, pv) == (r, l) and v in mtr and lane_of.get(v) == (l, r):
                        add(pu, pv, W_CROSS)

        matching = greedy_matching(cand)
        if not matching:
            lock_l = lock_r = True
        if line is not None and matching is not None:
            used = {q for e in matching for q in e}
            for a, b in edges:
                if a in used or b in used or side[a] != side[b]:
                    continue
                if at[a] in mtr or at[a] in mtl or at[b] in mtr or at[b] in mtl:
                    continue
                if _flipped(g, line, a, b, at):
                    matching.append((a, b))
                    used.update((a, b))
        if matching:
            for a, b in matching:
                at[a], at[b] = at[b], at[a]
            layers.append(sorted(matching))
        else:
            # an empty round still costs an iteration toward the cap
            layers.append([])
        mtr, mtl = movers()
    layers = [layer for layer in layers if layer]
    return RoutingOutcome(part, layers, at, asg, True)


def greedy_matching(weighted: dict[Edge, float]) -> list[Edge]:
    """Vertex-disjoint edges taken by weight (descending), then by (min, max) label."""
    chosen: list[Edge] = []
    used: set[int] = set()
    for (a, b), _ in sorted(weighted.items(), key=lambda kv: (-kv[1], kv[0])):
        if a not in used and b not in used:
            chosen.append((a, b))
            used.update((a, b))
    return chosen


def tree_route(g: CouplingGraph, at: Sequence[int]) -> list[Edge]:
    """Always-succeeding fallback: fill leaves of a BFS spanning tree one at a time."""
    at = list(at)
    parent = {0: -1}
    order = [0]
    for u in order:
        for w in g.sorted_adjacency[u]:
            if w not in parent:
                parent[w] = u
                order.append(w)
    tree_adj: dict[int, set[int]] = {v: set() for v in range(g.n)}
    for v, p in parent.items():
        if p >= 0:
            tree_adj[v].add(p)
            tree_adj[p].add(v)
    alive = set(range(g.n))
    swaps: list[Edge] = []
    while len(alive) > 1:
        leaf = min(v for v in alive if len(tree_adj[v] & alive) <= 1)
        src = at.index(leaf)
        # path src -> leaf inside the alive tree
        prev = {src: -1}
        queue = [src]
        for u in queue:
            for w in sorted(tree_adj[u] & alive):
                if w not in prev:
                    prev[w] = u
                    queue.append(w)
        path = [leaf]
        while path[-1] != src:
            path.append(prev[path[-1]])
        path.reverse()
        for a, b in zip(path, path[1:]):
            at[a], at[b] = at[b], at[a]
            swaps.append((a, b))
        alive.discard(leaf)
    return swaps


@dataclass
class _Stats:
    splits_tried: int = 0
    splits_discarded: int = 0
    fallbacks: int = 0
    hybrid_calls: int = 0
    hybrid_timeouts: int = 0
    levels: int = 0


def _solve(
    g: CouplingGraph,
    at: list[int],
    samples: int | None,
    threshold: int,
    hybrid_time_limit: float | None,
    backend: str,
    stats: _Stats,
) -> list[Edge]:
    if all(p == t for p, t in enumerate(at)):
        return []
    if g.n == 1:
        return []
    if g.n <= threshold:
        stats.hybrid_calls += 1
        try:
            res = exact_synth(
                g, Permutation(tuple(at)), "swap", DEPTH, hybrid_time_limit, backend=backend
            )
            return [gate.qubits for gate in res.circuit.gates]
        except SynthesisTimeout:
            stats.hybrid_timeouts += 1
    stats.levels += 1
    s = samples if samples is not None else (g.n if g.n <= ALL_PARTITIONS_UP_TO else 1)
    best: RoutingOutcome | None = None
    candidates = partition_graph(g, s)
    tried = 0
    while True:
        for part in candidates[tried:]:
            stats.splits_tried += 1
            out = routing_rounds(g, at, part)
            if not out.completed:
                stats.splits_discarded += 1
                continue
            if best is None or (out.rounds, out.misplaced) < (best.rounds, best.misplaced):
                best = out
        tried = len(candidates)
        if best is not None or tried < s:
            break
        # every sampled split stalled: widen the sample before giving up
        s = 2 * s
        candidates = partition_graph(g, s)
        if len(candidates) <= tried:
            break
    if best is None:
        stats.fallbacks += 1
        if g.is_path:
            circ = odd_even_sort(g, Permutation(tuple(at)))
            return [gate.qubits for gate in circ.gates]
        return tree_route(g, at)
    swaps = [e for layer in best.layers for e in layer]
    for half in (best.partition.left, best.partition.right):
        if len(half) <= 1:
            continue
        sub, labels = g.induced(half)
        index = {v: i for i, v in enumerate(labels)}
        sub_at = [index[best.at[v]] for v in labels]
        for a, b in _solve(sub, sub_at, samples, threshold, hybrid_time_limit, backend, stats):
            swaps.append((labels[a], labels[b]))
    return swaps


def lr_synth(
    g: CouplingGraph,
    target: Permutation,
    samples: int | None = None,
    hybrid_threshold: int = 1,
    *,
    hybrid_time_limit: float | None = 30.0,
    backend: str = "auto",
) -> SynthesisResult:
    """SWAP circuit taking each token ``v`` to ``target.dest[v]``.

    ``samples`` caps the partitions tried per level (default: all DFS-start
    partitions up to 16 vertices, one beyond). Subproblems of at most
    ``hybrid_threshold`` vertices go to the exact SWAP-depth solver.
    """
    if target.n != g.n:
        raise ValueError("permutation size does not match the graph")
    if samples is not None and samples < 1:
        raise ValueError("samples must be >= 1")
    t0 = time.perf_counter()
    stats = _Stats()
    swaps = _solve(g, list(target.dest), samples, hybrid_threshold, hybrid_time_limit, backend, stats)
    circuit = Circuit(g.n, tuple(Gate.swap(a, b) for a, b in swaps))
    verdict = verify(circuit, g, from_permutation(target))
    if not verdict:
        raise AssertionError(f"LR-Synth produced an invalid circuit: {verdict.reason}")
    method = "lr-synth-hybrid" if hybrid_threshold > 1 else "lr-synth"
    res = SynthesisResult(circuit, method, DEPTH, None, wall_time=time.perf_counter() - t0)
    res.info.update(vars(stats))
    if stats.fallbacks:
        res.flags.append("fallback")
    if stats.hybrid_timeouts:
        res.flags.append("hybrid-timeout")
    return res
