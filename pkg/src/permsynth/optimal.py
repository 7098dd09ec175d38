"""Exact CNOT/SWAP synthesis by iterative deepening over SAT queries."""

from __future__ import annotations

import csv
import itertools
import os
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from permsynth.circuit import CNOT, SWAP, Circuit, depth, verify
from permsynth.gf2 import Gf2Matrix, Permutation, from_permutation, is_permutation_matrix, to_permutation
from permsynth.satcore import (
    DEPTH,
    OBJECTIVES,
    SAT,
    SIZE,
    TIMEOUT,
    UNSAT,
    DEFAULT_VAR_BUDGET,
    decode,
    encode_cnot,
    encode_swap,
    solve,
)
from permsynth.topology import CouplingGraph


@dataclass
class SynthesisResult:
    circuit: Circuit
    method: str
    objective: str
    optimum: int | None = None
    queries: list[tuple[int, str, float]] = field(default_factory=list)
    wall_time: float = 0.0
    flags: list[str] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.circuit.size

    @property
    def depth(self) -> int:
        return depth(self.circuit)


class SynthesisTimeout(RuntimeError):
    """Raised when an exact search runs out of time; carries the refuted lower bound."""

    def __init__(self, lower_bound: int, queries: list[tuple[int, str, float]]):
        super().__init__(f"timed out; optimum is at least {lower_bound}")
        self.lower_bound = lower_bound
        self.queries = queries


def _normalise_target(target, gate_kind: str, n: int) -> Gf2Matrix:
    if isinstance(target, Permutation):
        if target.n != n:
            raise ValueError("permutation size does not match the graph")
        matrix = from_permutation(target)
    elif isinstance(target, Gf2Matrix):
        matrix = target
    else:
        raise TypeError("target must be a Permutation or Gf2Matrix")
    if gate_kind == SWAP and not is_permutation_matrix(matrix):
        raise ValueError("SWAP synthesis needs a permutation target")
    return matrix


def exact_synth(
    g: CouplingGraph,
    target: Gf2Matrix | Permutation,
    gate_kind: str = CNOT,
    objective: str = DEPTH,
    time_limit: float | None = None,
    *,
    backend: str = "auto",
    symmetry_breaking: bool = True,
    max_bound: int | None = None,
    var_budget: int = DEFAULT_VAR_BUDGET,
) -> SynthesisResult:
    """Smallest size or depth over bounds 0, 1, 2, ...; raises ``SynthesisTimeout``."""
    if gate_kind not in (CNOT, SWAP):
        raise ValueError("gate_kind must be 'cnot' or 'swap'")
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    matrix = _normalise_target(target, gate_kind, g.n)
    method = f"{gate_kind}-{objective}-optimal"
    t0 = time.perf_counter()
    queries: list[tuple[int, str, float]] = []
    if matrix.is_identity():
        return SynthesisResult(Circuit(g.n), method, objective, 0, queries, 0.0)
    perm = to_permutation(matrix) if gate_kind == SWAP else None
    bound = 0
    while True:
        bound += 1
        if max_bound is not None and bound > max_bound:
            raise SynthesisTimeout(bound, queries)
        remaining = None
        if time_limit is not None:
            remaining = time_limit - (time.perf_counter() - t0)
            if remaining <= 0:
                raise SynthesisTimeout(bound, queries)
        if gate_kind == CNOT:
            f, vm = encode_cnot(
                g, matrix, bound, objective,
                symmetry_breaking=symmetry_breaking, var_budget=var_budget,
            )
        else:
            f, vm = encode_swap(
                g, perm, bound, objective,
                symmetry_breaking=symmetry_breaking, var_budget=var_budget,
            )
        res = solve(f, backend, remaining)
        queries.append((bound, res.status, res.seconds))
        if res.status == TIMEOUT:
            raise SynthesisTimeout(bound, queries)
        if res.status == UNSAT:
            continue
        circuit = decode(res.model, vm)
        verdict = verify(circuit, g, matrix)
        if not verdict:
            raise AssertionError(f"decoded circuit fails verification: {verdict.reason}")
        measured = circuit.size if objective == SIZE else depth(circuit)
        if measured != bound:
            raise AssertionError(f"decoded {objective} {measured} != bound {bound}")
        return SynthesisResult(
            circuit, method, objective, bound, queries, time.perf_counter() - t0
        )


def decide_bound(
    g: CouplingGraph,
    target: Gf2Matrix | Permutation,
    gate_kind: str,
    objective: str,
    bound: int,
    time_limit: float | None = None,
    *,
    backend: str = "auto",
) -> Circuit | None:
    """A verified circuit with size/depth at most ``bound``, or None when none exists.

    One query instead of a full deepening run; raises ``SynthesisTimeout``.
    """
    matrix = _normalise_target(target, gate_kind, g.n)
    if matrix.is_identity():
        return Circuit(g.n)
    if bound <= 0:
        return None
    if gate_kind == CNOT:
        f, vm = encode_cnot(g, matrix, bound, objective, allow_idle=True)
    else:
        f, vm = encode_swap(g, to_permutation(matrix), bound, objective, allow_idle=True)
    res = solve(f, backend, time_limit)
    if res.status == TIMEOUT:
        raise SynthesisTimeout(0, [(bound, res.status, res.seconds)])
    if res.status == UNSAT:
        return None
    circuit = decode(res.model, vm)
    if not verify(circuit, g, matrix):
        raise AssertionError("decoded circuit fails verification")
    measured = circuit.size if objective == SIZE else depth(circuit)
    if measured > bound:
        raise AssertionError(f"decoded {objective} {measured} exceeds bound {bound}")
    return circuit


# --- sweeps -----------------------------------------------------------------

@dataclass
class SweepRow:
    perm: Permutation
    optimum: int | None
    queries: int
    wall_ms: float


@dataclass
class SweepResult:
    rows: list[SweepRow]
    histogram: Counter
    witness: Permutation | None
    timeouts: list[Permutation]

    @property
    def max_optimum(self) -> int | None:
        return max(self.histogram) if self.histogram else None

    def write_csv(self, path: str | os.PathLike) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["perm", "optimum", "queries", "wall_ms"])
            for r in self.rows:
                w.writerow([str(r.perm), "" if r.optimum is None else r.optimum,
                            r.queries, f"{r.wall_ms:.3f}"])

    def summary(self) -> str:
        hist = ", ".join(f"{k}:{v}" for k, v in sorted(self.histogram.items()))
        return (f"instances={len(self.rows)} histogram={{{hist}}} "
                f"max={self.max_optimum} witness={self.witness} timeouts={len(self.timeouts)}")


def _sweep_one(args) -> SweepRow:
    g, perm, gate_kind, objective, time_limit, backend = args
    t0 = time.perf_counter()
    try:
        res = exact_synth(g, perm, gate_kind, objective, time_limit, backend=backend)
        opt, nq = res.optimum, len(res.queries)
    except SynthesisTimeout as exc:
        opt, nq = None, len(exc.queries)
    return SweepRow(perm, opt, nq, (time.perf_counter() - t0) * 1000.0)


def permutations_for(n: int, sampler: str | tuple = "all") -> list[Permutation]:
    """``"all"`` enumerates n! permutations; ``("random", k, seed)`` draws k seeded ones."""
    if sampler == "all":
        return [Permutation(p) for p in itertools.permutations(range(n))]
    kind, k, seed = sampler
    if kind != "random":
        raise ValueError(f"unknown sampler {sampler!r}")
    rng = random.Random(seed)
    return [Permutation.random(n, rng) for _ in range(k)]


def sweep_all(
    g: CouplingGraph,
    gate_kind: str,
    objective: str,
    sampler: str | tuple = "all",
    *,
    time_limit: float | None = None,
    backend: str = "auto",
    workers: int = 1,
    perms: Iterable[Permutation] | None = None,
) -> SweepResult:
    todo = list(perms) if perms is not None else permutations_for(g.n, sampler)
    jobs = [(g, p, gate_kind, objective, time_limit, backend) for p in todo]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_one, jobs, chunksize=8))
    else:
        rows = [_sweep_one(j) for j in jobs]
    rows.sort(key=lambda r: r.perm.dest)
    hist = Counter(r.optimum for r in rows if r.optimum is not None)
    timeouts = [r.perm for r in rows if r.optimum is None]
    witness = None
    if hist:
        top = max(hist)
        witness = min((r.perm for r in rows if r.optimum == top), key=lambda p: p.dest)
    return SweepResult(rows, hist, witness, timeouts)
