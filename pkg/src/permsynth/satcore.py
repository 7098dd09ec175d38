"""CNF encodings of bounded CNOT / SWAP synthesis and SAT backend dispatch.

State variables ``m[d][i][k]`` hold the GF(2) matrix after ``d`` layers (layer 0
is the identity, layer ``D`` the target). Gate variables ``g[d][c -> t]`` (CNOT,
one per direction of every edge) or ``g[d][{a, b}]`` (SWAP) say which gates
fire in layer ``d``. Per layer:

* at least one gate (depth objective) or exactly one gate (size objective);
* no qubit in more than one gate;
* a CNOT forces ``m[d+1][t] = m[d][t] xor m[d][c]`` and a SWAP exchanges rows;
* a row that changes must be the target of (CNOT) or touched by (SWAP) a gate.

Optional symmetry breaking keeps only ASAP-compacted circuits (depth) or a
canonical order of commuting neighbours (size) and forbids immediately
repeated gates. The first satisfiable bound is unchanged by it.
"""

from __future__ import annotations

import multiprocessing
import os
import shutil
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from permsynth.cdcl import CDCLSolver, Timeout
from permsynth.circuit import Circuit, Gate, CNOT, SWAP
from permsynth.gf2 import Gf2Matrix, Permutation, from_permutation, rank
from permsynth.topology import CouplingGraph

SIZE = "size"
DEPTH = "depth"
OBJECTIVES = (SIZE, DEPTH)

SAT = "SAT"
UNSAT = "UNSAT"
TIMEOUT = "TIMEOUT"

DEFAULT_VAR_BUDGET = 4_000_000
SOLVER_ENV = "PERMSYNTH_SAT_SOLVER"


class EncodingError(ValueError):
    pass


class SolverError(RuntimeError):
    pass


@dataclass
class CnfFormula:
    nvars: int = 0
    clauses: list[list[int]] = field(default_factory=list)

    def new_var(self) -> int:
        self.nvars += 1
        return self.nvars

    def add(self, clause: Sequence[int]) -> None:
        if not clause:
            raise EncodingError("empty clause")
        self.clauses.append(list(clause))

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.nvars} {len(self.clauses)}"]
        lines.extend(" ".join(map(str, c)) + " 0" for c in self.clauses)
        return "\n".join(lines) + "\n"

    def write_dimacs(self, path: str | os.PathLike) -> None:
        Path(path).write_text(self.to_dimacs(), encoding="ascii", newline="\n")

    def satisfied_by(self, model: Sequence[int]) -> bool:
        """``model[v - 1]`` is ``v`` or ``-v``."""
        truth = [False] + [x > 0 for x in model]
        for c in self.clauses:
            if not any(truth[l] if l > 0 else not truth[-l] for l in c):
                return False
        return True


@dataclass
class VarMap:
    gate_kind: str
    n: int
    depth: int
    gates: list[tuple[int, int]]  # directed pairs (CNOT) or sorted edges (SWAP)
    matrix_base: int  # id of m[0][0][0]
    gate_base: int  # id of g[0][gates[0]]

    def matrix_var(self, d: int, i: int, k: int) -> int:
        return self.matrix_base + (d * self.n + i) * self.n + k

    def gate_var(self, d: int, a: int, b: int) -> int:
        if self.gate_kind == SWAP and a > b:
            a, b = b, a
        idx = self._index[(a, b)]
        return self.gate_base + d * len(self.gates) + idx

    def __post_init__(self) -> None:
        self._index = {gt: i for i, gt in enumerate(self.gates)}


def _at_most_one(f: CnfFormula, lits: Sequence[int]) -> None:
    if len(lits) <= 16:
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                f.add([-lits[i], -lits[j]])
        return
    # sequential counter
    prev = f.new_var()
    f.add([-lits[0], prev])
    for x in lits[1:-1]:
        s = f.new_var()
        f.add([-x, s])
        f.add([-prev, s])
        f.add([-x, -prev])
        prev = s
    f.add([-lits[-1], -prev])


def _check_budget(n: int, ngates: int, bound: int, var_budget: int) -> None:
    estimate = (bound + 1) * n * n + bound * ngates
    if estimate > var_budget:
        raise EncodingError(
            f"bound {bound} needs about {estimate} variables (budget {var_budget})"
        )


def _encode(
    g: CouplingGraph,
    target: Gf2Matrix,
    bound: int,
    objective: str,
    gate_kind: str,
    symmetry_breaking: bool,
    var_budget: int,
    allow_idle: bool = False,
) -> tuple[CnfFormula, VarMap]:
    if objective not in OBJECTIVES:
        raise ValueError(f"objective must be one of {OBJECTIVES}")
    if bound < 0:
        raise ValueError("bound must be >= 0")
    if target.n != g.n:
        raise EncodingError("target and graph sizes differ")
    n = g.n
    if gate_kind == CNOT:
        gates = sorted([(u, v) for u, v in g.edges] + [(v, u) for u, v in g.edges])
    else:
        gates = list(g.sorted_edges)
    _check_budget(n, len(gates), bound, var_budget)

    f = CnfFormula()
    matrix_base = 1
    f.nvars = (bound + 1) * n * n
    gate_base = f.nvars + 1
    f.nvars += bound * len(gates)
    vm = VarMap(gate_kind, n, bound, gates, matrix_base, gate_base)
    m = vm.matrix_var

    ident = Gf2Matrix.identity(n)
    for i in range(n):
        for k in range(n):
            f.add([m(0, i, k) if ident[i, k] else -m(0, i, k)])
            f.add([m(bound, i, k) if target[i, k] else -m(bound, i, k)])

    # light cone (implied): column k spreads one hop per layer from vertex k, and
    # must still be able to reach the rows where the target holds it
    dist = g.distances
    col_rows = [[j for j in range(n) if target[j, k]] for k in range(n)]
    for d in range(1, bound):
        for i in range(n):
            for k in range(n):
                if dist[i][k] > d or all(dist[i][j] > bound - d for j in col_rows[k]):
                    f.add([-m(d, i, k)])

    incident: list[list[int]] = [[] for _ in range(n)]  # gate indices touching each qubit
    targets_of: list[list[int]] = [[] for _ in range(n)]  # CNOT indices with this target
    for idx, (a, b) in enumerate(gates):
        incident[a].append(idx)
        incident[b].append(idx)
        targets_of[b].append(idx)

    for d in range(bound):
        gv = [gate_base + d * len(gates) + idx for idx in range(len(gates))]
        if not allow_idle:
            f.add(gv)  # at least one gate per layer
        if objective == SIZE:
            _at_most_one(f, gv)
        else:
            for q in range(n):
                if len(incident[q]) > 1:
                    _at_most_one(f, [gv[idx] for idx in incident[q]])

        for idx, (a, b) in enumerate(gates):
            x = gv[idx]
            if gate_kind == CNOT:
                c, t = a, b
                for j in range(n):
                    nt, ot, oc = m(d + 1, t, j), m(d, t, j), m(d, c, j)
                    f.add([-x, -nt, ot, oc])
                    f.add([-x, -nt, -ot, -oc])
                    f.add([-x, nt, -ot, oc])
                    f.add([-x, nt, ot, -oc])
            else:
                for j in range(n):
                    na, oa = m(d + 1, a, j), m(d, a, j)
                    nb, ob = m(d + 1, b, j), m(d, b, j)
                    f.add([-x, -na, ob])
                    f.add([-x, na, -ob])
                    f.add([-x, -nb, oa])
                    f.add([-x, nb, -oa])

        # frame: rows only change under a gate acting on them
        for i in range(n):
            movers = [gv[idx] for idx in (targets_of[i] if gate_kind == CNOT else incident[i])]
            for j in range(n):
                new, old = m(d + 1, i, j), m(d, i, j)
                f.add([-new, old] + movers)
                f.add([new, -old] + movers)

        if symmetry_breaking and d + 1 < bound:
            gn = [gate_base + (d + 1) * len(gates) + idx for idx in range(len(gates))]
            for idx in range(len(gates)):
                f.add([-gv[idx], -gn[idx]])  # a gate never immediately repeats
            if objective == DEPTH:
                for idx, (a, b) in enumerate(gates):
                    busy = [gv[k] for k in incident[a]] + [gv[k] for k in incident[b] if k != idx]
                    f.add([-gn[idx]] + sorted(set(busy)))
            else:
                for i1, (a1, b1) in enumerate(gates):
                    for i2, (a2, b2) in enumerate(gates):
                        if i1 > i2 and not {a1, b1} & {a2, b2}:
                            f.add([-gv[i1], -gn[i2]])
    return f, vm


def encode_cnot(
    g: CouplingGraph,
    target: Gf2Matrix,
    bound: int,
    objective: str = DEPTH,
    *,
    symmetry_breaking: bool = True,
    var_budget: int = DEFAULT_VAR_BUDGET,
    allow_idle: bool = False,
) -> tuple[CnfFormula, VarMap]:
    """CNF for "some CNOT circuit of exactly ``bound`` layers/gates computes ``target``".

    ``allow_idle`` permits empty layers, turning "exactly" into "at most".
    """
    if rank(target) != target.n:
        raise EncodingError("target matrix is not invertible")
    return _encode(g, target, bound, objective, CNOT, symmetry_breaking, var_budget, allow_idle)


def encode_swap(
    g: CouplingGraph,
    target: Permutation,
    bound: int,
    objective: str = DEPTH,
    *,
    symmetry_breaking: bool = True,
    var_budget: int = DEFAULT_VAR_BUDGET,
    allow_idle: bool = False,
) -> tuple[CnfFormula, VarMap]:
    return _encode(
        g, from_permutation(target), bound, objective, SWAP, symmetry_breaking, var_budget,
        allow_idle,
    )


# --- solving ----------------------------------------------------------------

@dataclass
class SolveResult:
    status: str
    model: list[int] | None = None
    seconds: float = 0.0


def _pysat_available() -> bool:
    try:
        import pysat.solvers  # noqa: F401
    except ImportError:
        return False
    return True


def resolve_backend(backend: str) -> str:
    if backend == "auto":
        if os.environ.get(SOLVER_ENV):
            return "external"
        return "pysat" if _pysat_available() else "embedded"
    if backend not in ("embedded", "pysat", "external"):
        raise ValueError(f"unknown SAT backend {backend!r}")
    return backend


def _solve_embedded(f: CnfFormula, time_limit: float | None, seed: int) -> SolveResult:
    solver = CDCLSolver(f.nvars, f.clauses, seed=seed)
    try:
        sat = solver.solve(time_limit)
    except Timeout:
        return SolveResult(TIMEOUT)
    return SolveResult(SAT, solver.model()) if sat else SolveResult(UNSAT)


def _pysat_model(raw: Sequence[int], nvars: int) -> list[int]:
    # variables absent from the solver's model are unconstrained; default to false
    model = [-v for v in range(1, nvars + 1)]
    for lit in raw:
        if 0 < abs(lit) <= nvars:
            model[abs(lit) - 1] = lit
    return model


def _pysat_child(conn, clauses, name: str) -> None:
    from pysat.solvers import Solver

    with Solver(name=name, bootstrap_with=clauses) as s:
        ok = s.solve()
        conn.send((ok, s.get_model() if ok else None))
    conn.close()


def _solve_pysat(f: CnfFormula, time_limit: float | None, name: str) -> SolveResult:
    from pysat.solvers import Solver

    if time_limit is None:
        with Solver(name=name, bootstrap_with=f.clauses) as s:
            ok = s.solve()
            raw = s.get_model() if ok else None
    else:
        # CaDiCaL cannot be interrupted in-process, so a forked child is killed instead
        ctx = multiprocessing.get_context("fork")
        parent, child = ctx.Pipe(duplex=False)
        proc = ctx.Process(target=_pysat_child, args=(child, f.clauses, name), daemon=True)
        proc.start()
        child.close()
        try:
            if not parent.poll(max(time_limit, 0.0)):
                return SolveResult(TIMEOUT)
            ok, raw = parent.recv()
        except EOFError as exc:
            raise SolverError(f"pysat worker died (exit code {proc.exitcode})") from exc
        finally:
            if proc.is_alive():
                proc.kill()
            proc.join()
            parent.close()
    if not ok:
        return SolveResult(UNSAT)
    return SolveResult(SAT, _pysat_model(raw or [], f.nvars))


def parse_competition_output(text: str, nvars: int) -> SolveResult:
    status = None
    values: dict[int, bool] = {}
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            elif word == "UNKNOWN":
                status = TIMEOUT
            else:
                raise SolverError(f"unparsable status line {line!r}")
        elif line.startswith("v "):
            for tok in line[2:].split():
                x = int(tok)
                if x:
                    values[abs(x)] = x > 0
    if status is None:
        raise SolverError("solver output has no 's' status line")
    if status != SAT:
        return SolveResult(status)
    return SolveResult(SAT, [v if values.get(v, False) else -v for v in range(1, nvars + 1)])


def _solve_external(f: CnfFormula, time_limit: float | None) -> SolveResult:
    exe = os.environ.get(SOLVER_ENV)
    if not exe:
        raise SolverError(f"external backend needs ${SOLVER_ENV}")
    if shutil.which(exe) is None and not Path(exe).is_file():
        raise SolverError(f"external SAT solver {exe!r} not found")
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "query.cnf"
        f.write_dimacs(path)
        try:
            proc = subprocess.run(
                [exe, str(path)], capture_output=True, text=True, timeout=time_limit
            )
        except subprocess.TimeoutExpired:
            return SolveResult(TIMEOUT)
    return parse_competition_output(proc.stdout, f.nvars)


def solve(
    f: CnfFormula,
    backend: str = "auto",
    time_limit: float | None = None,
    *,
    seed: int = 0,
    pysat_solver: str = "cadical153",
) -> SolveResult:
    """Decide ``f``. SAT models are re-checked against every clause before returning."""
    t0 = time.perf_counter()
    which = resolve_backend(backend)
    if which == "embedded":
        res = _solve_embedded(f, time_limit, seed)
    elif which == "pysat":
        res = _solve_pysat(f, time_limit, pysat_solver)
    else:
        res = _solve_external(f, time_limit)
    res.seconds = time.perf_counter() - t0
    if res.status == SAT and not f.satisfied_by(res.model):
        raise SolverError(f"{which} backend returned a model that violates the formula")
    return res


def decode(model: Sequence[int], vm: VarMap) -> Circuit:
    """Gates whose variables are true, layer by layer, sorted by (min qubit, max qubit)."""
    out: list[Gate] = []
    ngates = len(vm.gates)
    for d in range(vm.depth):
        layer = []
        used: set[int] = set()
        for idx, (a, b) in enumerate(vm.gates):
            if model[vm.gate_base + d * ngates + idx - 1] > 0:
                if a in used or b in used:
                    raise SolverError(f"layer {d} puts two gates on one qubit")
                used.update((a, b))
                layer.append((a, b))
        layer.sort(key=lambda p: (min(p), max(p)))
        for a, b in layer:
            out.append(Gate.cnot(a, b) if vm.gate_kind == CNOT else Gate.swap(a, b))
    return Circuit(vm.n, tuple(out))
