"""Reference algorithms: odd-even transposition sort and an exhaustive BFS oracle."""

from __future__ import annotations

from collections import deque
from functools import lru_cache

from permsynth.circuit import CNOT, SWAP, Circuit, Gate
from permsynth.gf2 import Gf2Matrix, Permutation, from_permutation, is_permutation_matrix
from permsynth.satcore import DEPTH, SIZE
from permsynth.topology import CouplingGraph

# state-space limits for the oracle: 20160 invertible 4x4 matrices, 7! placements
MAX_CNOT_QUBITS = 4
MAX_SWAP_QUBITS = 7


def odd_even_sort(g: CouplingGraph, p: Permutation) -> Circuit:
    """Odd-even transposition sort along a path graph; at most ``n`` layers."""
    if not g.is_path:
        raise ValueError("odd-even transposition sort needs a path topology")
    if p.n != g.n:
        raise ValueError("permutation size does not match the graph")
    order = g.path_order()
    position = {v: i for i, v in enumerate(order)}
    # key[i]: final path position of the token currently at path position i
    key = [position[p.dest[v]] for v in order]
    gates: list[Gate] = []
    rnd = 0
    while any(key[i] > key[i + 1] for i in range(g.n - 1)):
        for i in range(rnd % 2, g.n - 1, 2):
            if key[i] > key[i + 1]:
                key[i], key[i + 1] = key[i + 1], key[i]
                gates.append(Gate.swap(order[i], order[i + 1]))
        rnd += 1
    return Circuit(g.n, tuple(gates))


def _matchings(edges: list[tuple[int, int]]) -> list[tuple[tuple[int, int], ...]]:
    out: list[tuple[tuple[int, int], ...]] = []

    def rec(i: int, used: frozenset, chosen: tuple) -> None:
        if i == len(edges):
            if chosen:
                out.append(chosen)
            return
        rec(i + 1, used, chosen)
        a, b = edges[i]
        if a not in used and b not in used:
            rec(i + 1, used | {a, b}, chosen + (edges[i],))

    rec(0, frozenset(), ())
    return out


def _moves(g: CouplingGraph, gate_kind: str, objective: str) -> list[tuple[tuple[int, int], ...]]:
    if gate_kind == CNOT:
        gates = sorted([(u, v) for u, v in g.edges] + [(v, u) for u, v in g.edges])
    else:
        gates = sorted(g.edges)
    if objective == SIZE:
        return [(x,) for x in gates]
    return _matchings(gates)


def _apply(state: tuple[int, ...], move, gate_kind: str) -> tuple[int, ...]:
    rows = list(state)
    for a, b in move:
        if gate_kind == CNOT:
            rows[b] ^= rows[a]
        else:
            rows[a], rows[b] = rows[b], rows[a]
    return tuple(rows)


@lru_cache(maxsize=32)
def _all_distances(g: CouplingGraph, gate_kind: str, objective: str) -> dict[tuple[int, ...], int]:
    start = tuple(1 << i for i in range(g.n))
    moves = _moves(g, gate_kind, objective)
    dist = {start: 0}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        ds = dist[s] + 1
        for mv in moves:
            t = _apply(s, mv, gate_kind)
            if t not in dist:
                dist[t] = ds
                queue.append(t)
    return dist


def bfs_oracle(
    g: CouplingGraph,
    target: Gf2Matrix | Permutation,
    gate_kind: str = CNOT,
    objective: str = SIZE,
) -> int:
    """Exact optimum by breadth-first search over all reachable states.

    Depth search uses every non-empty set of vertex-disjoint gates as one layer.
    """
    if gate_kind not in (CNOT, SWAP):
        raise ValueError("gate_kind must be 'cnot' or 'swap'")
    if objective not in (SIZE, DEPTH):
        raise ValueError("objective must be 'size' or 'depth'")
    limit = MAX_CNOT_QUBITS if gate_kind == CNOT else MAX_SWAP_QUBITS
    if g.n > limit:
        raise ValueError(f"{gate_kind} oracle refuses n={g.n} (limit {limit})")
    matrix = from_permutation(target) if isinstance(target, Permutation) else target
    if matrix.n != g.n:
        raise ValueError("target size does not match the graph")
    if gate_kind == SWAP and not is_permutation_matrix(matrix):
        raise ValueError("SWAP oracle needs a permutation target")
    dist = _all_distances(g, gate_kind, objective)
    if matrix.rows not in dist:
        raise ValueError("target is not reachable (singular matrix?)")
    return dist[matrix.rows]
