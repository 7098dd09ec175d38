"""Gate-list circuits, ASAP depth, SWAP expansion and the verification oracle."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from permsynth.gf2 import Gf2Matrix, Permutation
from permsynth.topology import CouplingGraph

CNOT = "cnot"
SWAP = "swap"
U2 = "u2"
PERM = "perm"
KINDS = (CNOT, SWAP, U2, PERM)


@dataclass(frozen=True)
class Gate:
    """One operation. CNOT qubits are ``(control, target)``.

    ``u2`` gates carry an opaque ``uid`` and a ``mirrored`` flag (a SWAP has been
    folded into them). ``perm`` blocks carry a local permutation over ``qubits``:
    the token on ``qubits[i]`` ends on ``qubits[perm.dest[i]]``, plus the SWAP
    network they replaced in ``body``.
    """

    kind: str
    qubits: tuple[int, ...]
    uid: int | None = None
    mirrored: bool = False
    perm: Permutation | None = None
    body: tuple[Gate, ...] = field(default=(), compare=False)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError(f"{self.kind} gate on repeated qubits {self.qubits}")
        if self.kind != PERM and len(self.qubits) != 2:
            raise ValueError(f"{self.kind} gate needs exactly two qubits")
        if self.kind == PERM and (self.perm is None or self.perm.n != len(self.qubits)):
            raise ValueError("perm block needs a permutation over its qubits")

    @staticmethod
    def cnot(control: int, target: int) -> Gate:
        return Gate(CNOT, (control, target))

    @staticmethod
    def swap(a: int, b: int) -> Gate:
        return Gate(SWAP, (a, b))

    @staticmethod
    def u2(a: int, b: int, uid: int, mirrored: bool = False) -> Gate:
        return Gate(U2, (a, b), uid=uid, mirrored=mirrored)

    def relabel(self, table: Sequence[int]) -> Gate:
        body = tuple(g.relabel(table) for g in self.body)
        return Gate(
            self.kind,
            tuple(table[q] for q in self.qubits),
            self.uid,
            self.mirrored,
            self.perm,
            body,
        )

    def __repr__(self) -> str:
        extra = f"#{self.uid}{'m' if self.mirrored else ''}" if self.kind == U2 else ""
        return f"{self.kind}{extra}{self.qubits}"


@dataclass(frozen=True)
class Circuit:
    n: int
    gates: tuple[Gate, ...] = ()

    def __post_init__(self) -> None:
        for g in self.gates:
            if any(not 0 <= q < self.n for q in g.qubits):
                raise ValueError(f"gate {g!r} out of range for n={self.n}")

    @classmethod
    def of(cls, n: int, gates: Iterable[Gate]) -> Circuit:
        return cls(n, tuple(gates))

    @classmethod
    def from_cnots(cls, n: int, pairs: Iterable[tuple[int, int]]) -> Circuit:
        return cls(n, tuple(Gate.cnot(c, t) for c, t in pairs))

    @classmethod
    def from_swaps(cls, n: int, pairs: Iterable[tuple[int, int]]) -> Circuit:
        return cls(n, tuple(Gate.swap(a, b) for a, b in pairs))

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def depth(self) -> int:
        return depth(self)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)


def layers(c: Circuit) -> list[list[Gate]]:
    """Greedy ASAP layering: each gate goes one layer after the last one touching its qubits."""
    level = [0] * c.n
    out: list[list[Gate]] = []
    for g in c.gates:
        d = max(level[q] for q in g.qubits)
        if d == len(out):
            out.append([])
        out[d].append(g)
        for q in g.qubits:
            level[q] = d + 1
    return out


def depth(c: Circuit) -> int:
    level = [0] * c.n
    best = 0
    for g in c.gates:
        d = max(level[q] for q in g.qubits) + 1
        for q in g.qubits:
            level[q] = d
        if d > best:
            best = d
    return best


def swap_as_cnots(a: int, b: int) -> tuple[Gate, Gate, Gate]:
    return (Gate.cnot(a, b), Gate.cnot(b, a), Gate.cnot(a, b))


def to_cnots(c: Circuit) -> Circuit:
    out: list[Gate] = []
    for g in c.gates:
        if g.kind == CNOT:
            out.append(g)
        elif g.kind == SWAP:
            out.extend(swap_as_cnots(*g.qubits))
        else:
            raise ValueError(f"cannot expand {g.kind} gate into CNOTs")
    return Circuit(c.n, tuple(out))


def cnot_cost(c: Circuit) -> tuple[int, int]:
    """``(size, depth)`` counting each SWAP as three CNOTs."""
    expanded = to_cnots(c)
    return expanded.size, depth(expanded)


def circuit_matrix(c: Circuit) -> Gf2Matrix:
    rows = [1 << i for i in range(c.n)]
    for g in c.gates:
        if g.kind == CNOT:
            ctl, tgt = g.qubits
            rows[tgt] ^= rows[ctl]
        elif g.kind == SWAP:
            a, b = g.qubits
            rows[a], rows[b] = rows[b], rows[a]
        else:
            raise ValueError(f"{g.kind} gate has no GF(2) action")
    return Gf2Matrix(c.n, tuple(rows))


@dataclass(frozen=True)
class Verdict:
    ok: bool
    reason: str = "ok"  # "ok" | "off-graph" | "wrong-function" | "bad-gate" | "size-mismatch"
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


def verify(c: Circuit, g: CouplingGraph, target: Gf2Matrix) -> Verdict:
    """Check that every gate sits on an edge of ``g`` and the circuit computes ``target``."""
    if c.n != g.n or target.n != g.n:
        return Verdict(False, "size-mismatch", f"circuit {c.n}, graph {g.n}, target {target.n}")
    for i, gate in enumerate(c.gates):
        if gate.kind not in (CNOT, SWAP):
            return Verdict(False, "bad-gate", f"gate {i} is {gate.kind}")
        if not g.has_edge(*gate.qubits):
            return Verdict(False, "off-graph", f"gate {i} {gate!r} is not on an edge")
    got = circuit_matrix(c)
    if got != target:
        return Verdict(False, "wrong-function", f"circuit computes\n{got}")
    return Verdict(True)


def compose(a: Circuit, b: Circuit) -> Circuit:
    if a.n != b.n:
        raise ValueError(f"qubit count mismatch: {a.n} vs {b.n}")
    return Circuit(a.n, a.gates + b.gates)


def remap(c: Circuit, embedding: Sequence[int], n: int | None = None) -> Circuit:
    """Relabel qubit ``q`` as ``embedding[q]`` in a circuit on ``n`` qubits."""
    if len(embedding) != c.n:
        raise ValueError("embedding must cover every qubit of the circuit")
    if len(set(embedding)) != len(embedding):
        raise ValueError("embedding is not injective")
    target_n = n if n is not None else c.n
    if any(not 0 <= q < target_n for q in embedding):
        raise ValueError("embedding out of range")
    return Circuit(target_n, tuple(g.relabel(embedding) for g in c.gates))


# --- JSON -------------------------------------------------------------------

def gate_to_dict(g: Gate) -> dict:
    d: dict = {"kind": g.kind, "qubits": list(g.qubits)}
    if g.kind == U2:
        d["id"] = g.uid
        d["mirrored"] = g.mirrored
    if g.kind == PERM:
        d["perm"] = list(g.perm.dest)
    return d


def gate_from_dict(d: dict) -> Gate:
    kind = d["kind"]
    qubits = tuple(int(q) for q in d["qubits"])
    if kind == U2:
        return Gate(U2, qubits, uid=d.get("id"), mirrored=bool(d.get("mirrored", False)))
    if kind == PERM:
        return Gate(PERM, qubits, perm=Permutation.of(d["perm"]))
    return Gate(kind, qubits)


def circuit_to_dict(c: Circuit) -> dict:
    return {"n": c.n, "gates": [gate_to_dict(g) for g in c.gates]}


def circuit_from_dict(d: dict) -> Circuit:
    return Circuit(int(d["n"]), tuple(gate_from_dict(x) for x in d["gates"]))


def dumps(c: Circuit, **kw) -> str:
    return json.dumps(circuit_to_dict(c), **kw)


def loads(text: str) -> Circuit:
    return circuit_from_dict(json.loads(text))
