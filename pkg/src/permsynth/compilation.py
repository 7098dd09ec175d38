"""QV-style compile pipeline: route, absorb, collapse SWAP bags, resynthesize blocks.

Global metrics are in CNOT-equivalent units: every SWAP is expanded into three
CNOTs and each two-qubit unitary counts as one gate occupying one layer.
"""

from __future__ import annotations

import random
import time
from collections import deque
from dataclasses import asdict, dataclass, field

from permsynth.circuit import CNOT, PERM, SWAP, U2, Circuit, Gate, depth, swap_as_cnots
from permsynth.gf2 import Permutation
from permsynth.methods import run_method
from permsynth.optimal import SynthesisTimeout
from permsynth.satcore import DEPTH, SIZE
from permsynth.topology import CouplingGraph, steiner_tree


def generate_qv(n: int, layers: int, seed: int = 0) -> Circuit:
    """Layers of random pairings, one fresh two-qubit unitary per pair."""
    if n < 2:
        raise ValueError("need at least two qubits")
    if layers < 1:
        raise ValueError("need at least one layer")
    rng = random.Random(seed)
    gates = []
    uid = 0
    for _ in range(layers):
        qs = list(range(n))
        rng.shuffle(qs)
        for i in range(0, n - 1, 2):
            a, b = sorted(qs[i : i + 2])
            gates.append(Gate.u2(a, b, uid))
            uid += 1
    return Circuit(n, tuple(gates))


def _shortest_path(g: CouplingGraph, a: int, b: int) -> list[int]:
    prev = {a: -1}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        if u == b:
            break
        for w in g.sorted_adjacency[u]:
            if w not in prev:
                prev[w] = u
                queue.append(w)
    path = [b]
    while path[-1] != a:
        path.append(prev[path[-1]])
    return path[::-1]


def route(c: Circuit, g: CouplingGraph, seed: int = 0) -> Circuit:
    """Greedy SWAP insertion under the trivial layout.

    For each non-adjacent unitary one endpoint (picked by the seeded RNG) walks
    along a shortest path until it neighbours the other.
    """
    if c.n > g.n:
        raise ValueError("circuit is wider than the device")
    if any(gate.kind != U2 for gate in c.gates):
        raise ValueError("route expects a circuit of two-qubit unitaries only")
    rng = random.Random(seed)
    phys = list(range(g.n))  # logical -> physical
    logical = list(range(g.n))  # physical -> logical
    out: list[Gate] = []
    for gate in c.gates:
        la, lb = gate.qubits
        if rng.random() < 0.5:
            la, lb = lb, la
        path = _shortest_path(g, phys[la], phys[lb])
        for x, y in zip(path, path[1:-1]):
            out.append(Gate.swap(x, y))
            logical[x], logical[y] = logical[y], logical[x]
            phys[logical[x]] = x
            phys[logical[y]] = y
        pa, pb = sorted((phys[la], phys[lb]))
        out.append(Gate.u2(pa, pb, gate.uid, gate.mirrored))
    return Circuit(g.n, tuple(out))


def _absorb_pass(gates: list[Gate]) -> bool:
    last: dict[int, int] = {}
    for i, gate in enumerate(gates):
        if gate is None:
            continue
        if gate.kind == SWAP:
            a, b = gate.qubits
            j = last.get(a)
            if j is not None and last.get(b) == j and gates[j].kind == U2:
                u = gates[j]
                gates[j] = Gate.u2(*u.qubits, u.uid, not u.mirrored)
                gates[i] = None
                return True
        for q in gate.qubits:
            last[q] = i
    # unitaries preceded directly by a SWAP on their pair
    last = {}
    for i, gate in enumerate(gates):
        if gate is None:
            continue
        if gate.kind == U2:
            a, b = gate.qubits
            j = last.get(a)
            if j is not None and last.get(b) == j and gates[j].kind == SWAP:
                gates[i] = Gate.u2(a, b, gate.uid, not gate.mirrored)
                gates[j] = None
                return True
        for q in gate.qubits:
            last[q] = i
    return False


def absorb_swaps(c: Circuit) -> tuple[Circuit, int]:
    """Fold SWAPs into adjacent unitaries on the same pair; returns the circuit and pass count."""
    gates: list = list(c.gates)
    passes = 0
    while True:
        passes += 1
        changed = _absorb_pass(gates)
        gates = [x for x in gates if x is not None]
        if not changed:
            return Circuit(c.n, tuple(gates)), passes


def _bag_to_block(swaps: list[Gate]) -> Gate:
    qubits = sorted({q for s in swaps for q in s.qubits})
    index = {q: i for i, q in enumerate(qubits)}
    # token on qubits[i] ends on qubits[dest[i]]
    where = list(range(len(qubits)))  # slot -> token
    for s in swaps:
        a, b = index[s.qubits[0]], index[s.qubits[1]]
        where[a], where[b] = where[b], where[a]
    dest = [0] * len(qubits)
    for slot, tok in enumerate(where):
        dest[tok] = slot
    return Gate(PERM, tuple(qubits), perm=Permutation(tuple(dest)), body=tuple(swaps))


def collapse_swap_blocks(c: Circuit) -> Circuit:
    """Replace greedy SWAP bags by permutation blocks at the first SWAP's position.

    A SWAP joins the open bag unless a non-bag gate has touched one of its qubits
    since the bag opened; otherwise the bag closes and a new one opens.
    """
    out: list = []
    bag: list[Gate] = []
    slot = -1
    blocked: set[int] = set()

    def close() -> None:
        if bag:
            out[slot] = _bag_to_block(list(bag))
            bag.clear()

    for gate in c.gates:
        if gate.kind == SWAP:
            if bag and not blocked.intersection(gate.qubits):
                bag.append(gate)
                continue
            close()
            out.append(None)
            slot = len(out) - 1
            bag.append(gate)
            blocked = set()
            continue
        out.append(gate)
        if bag:
            blocked.update(gate.qubits)
    close()
    return Circuit(c.n, tuple(out))


def flatten(c: Circuit) -> Circuit:
    """Expand blocks to their bodies and SWAPs to CNOT triples."""
    out: list[Gate] = []
    for gate in c.gates:
        if gate.kind == PERM:
            out.extend(flatten(Circuit(c.n, gate.body)).gates)
        elif gate.kind == SWAP:
            out.extend(swap_as_cnots(*gate.qubits))
        else:
            out.append(gate)
    return Circuit(c.n, tuple(out))


def metrics(c: Circuit) -> dict[str, int]:
    flat = flatten(c)
    return {"size": flat.size, "depth": depth(flat)}


def replay(c: Circuit) -> tuple[list[tuple[int, frozenset]], tuple[int, ...]]:
    """Symbolic run: the logical pair each unitary meets, in order, and the final placement.

    Wire states are tracked as GF(2) rows over logical qubits so CNOT networks
    that only permute overall are handled exactly.
    """
    rows = [1 << q for q in range(c.n)]
    events: list[tuple[int, frozenset]] = []

    def run(gates) -> None:
        for gate in gates:
            if gate.kind == CNOT:
                ctl, tgt = gate.qubits
                rows[tgt] ^= rows[ctl]
            elif gate.kind == SWAP:
                a, b = gate.qubits
                rows[a], rows[b] = rows[b], rows[a]
            elif gate.kind == U2:
                a, b = gate.qubits
                for r in (rows[a], rows[b]):
                    if r == 0 or r & (r - 1):
                        raise ValueError(f"unitary {gate.uid} meets a non-basis wire state")
                events.append((gate.uid, frozenset((rows[a].bit_length() - 1, rows[b].bit_length() - 1))))
                if gate.mirrored:
                    rows[a], rows[b] = rows[b], rows[a]
            else:
                old = [rows[q] for q in gate.qubits]
                for i, q in enumerate(gate.qubits):
                    rows[gate.qubits[gate.perm.dest[i]]] = old[i]

    run(c.gates)
    return events, tuple(rows)


def equivalent(a: Circuit, b: Circuit) -> bool:
    return replay(a) == replay(b)


@dataclass
class BlockRecord:
    block: int
    qubits: list[int]
    original_size: int
    original_depth: int
    method_size: int | None
    method_depth: int | None
    accepted: bool
    synth_ms: float
    flags: list[str] = field(default_factory=list)
    global_depth_delta: int | None = None
    local_gain_no_global_gain: bool = False


@dataclass
class CompilationReport:
    objective: str
    method: str
    before: dict[str, int]
    after: dict[str, int]
    blocks: list[BlockRecord]

    @property
    def hidden_depth_cases(self) -> list[BlockRecord]:
        return [b for b in self.blocks if b.local_gain_no_global_gain]

    def to_dict(self) -> dict:
        return {
            "before": self.before,
            "after": self.after,
            "objective": self.objective,
            "method": self.method,
            "blocks": [asdict(b) for b in self.blocks],
        }


def _closure(g: CouplingGraph, qubits) -> list[int]:
    vs = set(qubits)
    for u, v in steiner_tree(g, vs):
        vs.update((u, v))
    return sorted(vs)


def _block_target(g: CouplingGraph, gate: Gate) -> tuple[CouplingGraph, list[int], Permutation]:
    sub, labels = g.induced(_closure(g, gate.qubits))
    index = {v: i for i, v in enumerate(labels)}
    dest = list(range(sub.n))
    for i, q in enumerate(gate.qubits):
        dest[index[q]] = index[gate.qubits[gate.perm.dest[i]]]
    return sub, labels, Permutation(tuple(dest))


def _cost(gates, n: int, objective: str) -> tuple[int, int]:
    flat = flatten(Circuit(n, tuple(gates)))
    size, d = flat.size, depth(flat)
    return (size, d) if objective == SIZE else (d, size)


def resynthesize(
    c: Circuit,
    g: CouplingGraph,
    method: str,
    objective: str = DEPTH,
    *,
    time_limit: float | None = 60.0,
    backend: str = "auto",
) -> tuple[Circuit, CompilationReport]:
    """Resynthesize each permutation block and keep it only when strictly better.

    Better means a lower primary cost, or an equal primary and a lower
    secondary cost (CNOT-equivalent size and depth).
    """
    if objective not in (SIZE, DEPTH):
        raise ValueError("objective must be 'size' or 'depth'")
    blocks = [i for i, gate in enumerate(c.gates) if gate.kind == PERM]
    chosen: dict[int, tuple[Gate, ...]] = {}
    records: list[BlockRecord] = []
    for k, i in enumerate(blocks):
        gate = c.gates[i]
        orig = _cost(gate.body, c.n, objective)
        o_size, o_depth = (orig if objective == SIZE else orig[::-1])
        rec = BlockRecord(k, list(gate.qubits), o_size, o_depth, None, None, False, 0.0)
        sub, labels, perm = _block_target(g, gate)
        t0 = time.perf_counter()
        try:
            res = run_method(method, sub, perm, objective, time_limit=time_limit, backend=backend)
        except SynthesisTimeout:
            rec.flags.append("timeout")
        except ValueError as exc:
            rec.flags.append(f"unsupported: {exc}")
        else:
            rec.flags.extend(res.flags)
            new = tuple(x.relabel(labels) for x in res.circuit.gates)
            cost = _cost(new, c.n, objective)
            rec.method_size, rec.method_depth = cost if objective == SIZE else cost[::-1]
            if cost < orig:
                rec.accepted = True
                chosen[i] = new
        rec.synth_ms = (time.perf_counter() - t0) * 1000.0
        records.append(rec)

    def build(replace: dict[int, tuple[Gate, ...]]) -> Circuit:
        out: list[Gate] = []
        for i, gate in enumerate(c.gates):
            if gate.kind == PERM:
                out.extend(replace.get(i, gate.body))
            else:
                out.append(gate)
        return flatten(Circuit(c.n, tuple(out)))

    base = build({})
    final = build(chosen)
    base_depth = depth(base)
    for k, i in enumerate(blocks):
        rec = records[k]
        if i not in chosen:
            continue
        rec.global_depth_delta = depth(build({i: chosen[i]})) - base_depth
        if rec.method_depth < rec.original_depth and rec.global_depth_delta >= 0:
            rec.local_gain_no_global_gain = True
    report = CompilationReport(
        objective,
        method,
        {"size": base.size, "depth": base_depth},
        {"size": final.size, "depth": depth(final)},
        records,
    )
    return final, report


@dataclass
class CompileConfig:
    qubits: int = 8
    layers: int | None = None  # None: square circuit
    graph: str = "path:8"
    method: str = "lr-synth-hybrid"
    objective: str = DEPTH
    seed: int = 0
    time_limit: float | None = 60.0
    backend: str = "auto"


def compile_qv(cfg: CompileConfig, g: CouplingGraph) -> tuple[Circuit, Circuit, CompilationReport]:
    """Full pipeline; returns the routed circuit, the final flattened circuit and the report."""
    layers = cfg.layers if cfg.layers is not None else cfg.qubits
    qv = generate_qv(cfg.qubits, layers, cfg.seed)
    routed = route(qv, g, cfg.seed)
    absorbed, _ = absorb_swaps(routed)
    blocked = collapse_swap_blocks(absorbed)
    final, report = resynthesize(
        blocked, g, cfg.method, cfg.objective, time_limit=cfg.time_limit, backend=cfg.backend
    )
    if not equivalent(routed, final):
        raise AssertionError("compiled circuit is not equivalent to the routed circuit")
    return routed, final, report
