"""ROWCOL CNOT synthesis with elimination-order search and an exact finish.

Each step picks a non-cut vertex ``v`` of the residual graph and reduces row
``v`` and column ``v`` of the working matrix to ``e_v`` with CNOTs along
Steiner trees, then drops ``v``. Gates are collected as the reduction
``target -> identity`` and reversed at the end. With a hybrid threshold the
last few vertices are handed to the CNOT-size-optimal solver instead.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Sequence

from permsynth.circuit import Circuit, Gate, depth
from permsynth.gf2 import Gf2Matrix, Permutation, from_permutation, rank, solve_row_combination
from permsynth.optimal import SynthesisResult, SynthesisTimeout, exact_synth
from permsynth.satcore import SIZE
from permsynth.topology import CouplingGraph, non_cut_vertices, steiner_tree

DEFAULT_HYBRID_THRESHOLD = 4


@dataclass(frozen=True)
class OrderStrategy:
    """``fixed`` (an explicit order), ``exhaustive`` or ``sample`` (k random valid orders)."""

    kind: str = "exhaustive"
    order: tuple[int, ...] = ()
    k: int = 5
    seed: int = 0

    @classmethod
    def fixed(cls, order: Sequence[int]) -> OrderStrategy:
        return cls("fixed", tuple(order))

    @classmethod
    def exhaustive(cls) -> OrderStrategy:
        return cls("exhaustive")

    @classmethod
    def sample(cls, k: int = 5, seed: int = 0) -> OrderStrategy:
        return cls("sample", k=k, seed=seed)

    @classmethod
    def parse(cls, text: str) -> OrderStrategy:
        if text == "exhaustive":
            return cls.exhaustive()
        if text.startswith("fixed:"):
            return cls.fixed(int(x) for x in text[6:].split(","))
        if text.startswith("sample:"):
            parts = text.split(":")
            return cls.sample(int(parts[1]), int(parts[2]) if len(parts) > 2 else 0)
        raise ValueError(f"unknown order strategy {text!r}")


def _rooted(tree_edges, root: int) -> list[tuple[int, int]]:
    """Pre-order (child, parent) pairs of a tree, children visited in label order."""
    adj: dict[int, list[int]] = {}
    for u, v in tree_edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    out = []
    stack = [(root, -1)]
    while stack:
        u, parent = stack.pop()
        if parent >= 0:
            out.append((u, parent))
        for w in sorted(adj.get(u, ()), reverse=True):
            if w != parent:
                stack.append((w, u))
    return out


def _postorder(preorder: list[tuple[int, int]]) -> list[tuple[int, int]]:
    # reversing a pre-order lists every child before its parent
    return preorder[::-1]


def _cnot(rows: list[int], gates: list[tuple[int, int]], c: int, t: int) -> None:
    rows[t] ^= rows[c]
    gates.append((c, t))


def _eliminate(
    rows: list[int], g: CouplingGraph, alive: set[int], v: int
) -> list[tuple[int, int]]:
    """Reduce row and column ``v`` to the unit vector in place; return the CNOTs used."""
    gates: list[tuple[int, int]] = []
    bit = 1 << v
    # column: every row with a 1 in column v, plus v itself
    terminals = {i for i in alive if rows[i] & bit} | {v}
    if len(terminals) > 1:
        pre = _rooted(steiner_tree(g, terminals, alive), v)
        post = _postorder(pre)
        for child, parent in post:
            if rows[child] & bit and not rows[parent] & bit:
                _cnot(rows, gates, child, parent)
        for child, parent in post:
            _cnot(rows, gates, parent, child)
    # row: the rows whose XOR is e_v (solved over GF(2))
    if rows[v] != bit:
        chosen = solve_row_combination({i: rows[i] for i in alive}, bit)
        pre = _rooted(steiner_tree(g, chosen | {v}, alive), v)
        for child, parent in pre:
            if child not in chosen:
                _cnot(rows, gates, child, parent)
        for child, parent in _postorder(pre):
            _cnot(rows, gates, child, parent)
    return gates


def eliminate_vertex(
    m: Gf2Matrix, g: CouplingGraph, v: int, alive: Sequence[int] | None = None
) -> tuple[list[Gate], Gf2Matrix, set[int]]:
    """One elimination step.

    Returns the CNOTs (reduction direction), the reduced matrix and the residual
    vertex set with ``v`` removed. ``alive`` defaults to every vertex.
    """
    live = set(range(g.n)) if alive is None else set(alive)
    if v not in live:
        raise ValueError(f"vertex {v} already eliminated")
    if v not in non_cut_vertices(g, live):
        raise ValueError(f"vertex {v} is a cut vertex of the residual graph")
    if rank(m) != m.n:
        raise ValueError("matrix is singular")
    rows = list(m.rows)
    pairs = _eliminate(rows, g, live, v)
    return [Gate.cnot(c, t) for c, t in pairs], Gf2Matrix(m.n, tuple(rows)), live - {v}


@lru_cache(maxsize=200_000)
def _residual_optimum(
    n: int, edges: frozenset, rows: tuple[int, ...], time_limit: float | None, backend: str
) -> tuple[tuple[int, int], ...]:
    sub = CouplingGraph(n, edges)
    res = exact_synth(sub, Gf2Matrix(n, rows), "cnot", SIZE, time_limit, backend=backend)
    return tuple(g.qubits for g in res.circuit.gates)


def _solve_residual(
    rows: list[int], g: CouplingGraph, alive: set[int], time_limit, backend
) -> list[tuple[int, int]] | None:
    sub, labels = g.induced(alive)
    index = {v: i for i, v in enumerate(labels)}
    local = []
    for v in labels:
        r = 0
        for w in labels:
            if rows[v] >> w & 1:
                r |= 1 << index[w]
        local.append(r)
    try:
        pairs = _residual_optimum(sub.n, sub.edges, tuple(local), time_limit, backend)
    except SynthesisTimeout:
        return None
    return [(labels[c], labels[t]) for c, t in pairs]


@dataclass
class _Candidate:
    order: tuple[int, ...]
    circuit: Circuit
    flags: list[str] = field(default_factory=list)

    @property
    def key(self):
        return (self.circuit.size, depth(self.circuit), self.order)


def _finish(
    n: int,
    elim: list[tuple[int, int]],
    rows: list[int],
    g: CouplingGraph,
    alive: set[int],
    order: tuple[int, ...],
    threshold: int,
    time_limit,
    backend,
) -> _Candidate:
    flags = []
    head: list[tuple[int, int]] = []
    if len(alive) > 1 and any(rows[v] != 1 << v for v in alive):
        residual = _solve_residual(rows, g, alive, time_limit, backend)
        if residual is None:
            flags.append("residual-timeout")
            rows = list(rows)
            elim = list(elim)
            alive = set(alive)
            extra = []
            while len(alive) > 1:
                v = min(non_cut_vertices(g, alive))
                elim.extend(_eliminate(rows, g, alive, v))
                alive.discard(v)
                extra.append(v)
            order = order + tuple(extra)
        else:
            head = residual
    # target = E^-1 R: residual circuit first, then the eliminations undone in reverse
    gates = [Gate.cnot(c, t) for c, t in head] + [Gate.cnot(c, t) for c, t in reversed(elim)]
    return _Candidate(order, Circuit(n, tuple(gates)), flags)


def _orders_dfs(
    rows: list[int],
    g: CouplingGraph,
    alive: set[int],
    elim: list[tuple[int, int]],
    order: tuple[int, ...],
    stop: int,
) -> Iterator[tuple[list[int], set[int], list[tuple[int, int]], tuple[int, ...]]]:
    if len(alive) <= stop:
        yield rows, alive, elim, order
        return
    for v in sorted(non_cut_vertices(g, alive)):
        r = list(rows)
        step = _eliminate(r, g, alive, v)
        yield from _orders_dfs(r, g, alive - {v}, elim + step, order + (v,), stop)


def _run_order(rows, g, alive, order, stop):
    rows = list(rows)
    alive = set(alive)
    elim: list[tuple[int, int]] = []
    done: list[int] = []
    for v in order:
        if len(alive) <= stop:
            break
        if v not in alive or v not in non_cut_vertices(g, alive):
            raise ValueError(f"order {order}: vertex {v} is not a non-cut vertex at its turn")
        elim.extend(_eliminate(rows, g, alive, v))
        alive.discard(v)
        done.append(v)
    if len(alive) > stop:
        raise ValueError(f"order {order} does not eliminate enough vertices")
    return rows, alive, elim, tuple(done)


def _random_order(g: CouplingGraph, rng: random.Random) -> tuple[int, ...]:
    alive = set(range(g.n))
    order = []
    while len(alive) > 1:
        v = rng.choice(sorted(non_cut_vertices(g, alive)))
        order.append(v)
        alive.discard(v)
    order.extend(alive)
    return tuple(order)


def rowcol_synth(
    g: CouplingGraph,
    target: Gf2Matrix | Permutation,
    strategy: OrderStrategy | None = None,
    hybrid_threshold: int = DEFAULT_HYBRID_THRESHOLD,
    *,
    time_limit: float | None = None,
    backend: str = "auto",
) -> SynthesisResult:
    """ROWCOL over the orders selected by ``strategy``; best by size, then depth, then order.

    ``hybrid_threshold=1`` is plain ROWCOL. The default strategy is exhaustive up to
    8 vertices and five sampled orders beyond.
    """
    if hybrid_threshold < 1:
        raise ValueError("hybrid_threshold must be >= 1")
    matrix = from_permutation(target) if isinstance(target, Permutation) else target
    if matrix.n != g.n:
        raise ValueError("target size does not match the graph")
    if rank(matrix) != matrix.n:
        raise ValueError("target matrix is singular")
    if strategy is None:
        strategy = OrderStrategy.exhaustive() if g.n <= 8 else OrderStrategy.sample(5)
    t0 = time.perf_counter()
    method = "rowcol-hybrid" if hybrid_threshold > 1 else "rowcol"
    if matrix.is_identity():
        return SynthesisResult(Circuit(g.n), method, SIZE, 0, wall_time=0.0)
    stop = max(1, hybrid_threshold)
    full = set(range(g.n))
    start_rows = list(matrix.rows)

    if strategy.kind == "exhaustive":
        runs = _orders_dfs(start_rows, g, full, [], (), stop)
    elif strategy.kind == "fixed":
        if sorted(strategy.order) != list(range(g.n)):
            raise ValueError("fixed order must list every vertex exactly once")
        runs = [_run_order(start_rows, g, full, strategy.order, stop)]
    elif strategy.kind == "sample":
        rng = random.Random(strategy.seed)
        seen = set()
        runs = []
        for _ in range(strategy.k):
            order = _random_order(g, rng)
            prefix = order[: g.n - stop]
            if prefix in seen:
                continue
            seen.add(prefix)
            runs.append(_run_order(start_rows, g, full, order, stop))
    else:
        raise ValueError(f"unknown strategy {strategy.kind!r}")

    best: _Candidate | None = None
    for rows, alive, elim, order in runs:
        cand = _finish(g.n, elim, rows, g, alive, order, stop, time_limit, backend)
        if best is None or cand.key < best.key:
            best = cand
    assert best is not None
    res = SynthesisResult(best.circuit, method, SIZE, None, wall_time=time.perf_counter() - t0)
    res.flags.extend(best.flags)
    res.info["order"] = best.order
    return res
