"""Bit-packed GF(2) matrices and permutations.

Row ``i`` of a matrix is stored as a Python int whose bit ``k`` is entry ``(i, k)``.
A CNOT with control ``c`` and target ``t`` XORs row ``c`` into row ``t``; a
circuit's matrix is obtained by applying its gates in temporal order to the
identity.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Permutation:
    """``dest[v]`` is the vertex where the token starting on ``v`` must end."""

    dest: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.dest) != list(range(len(self.dest))):
            raise ValueError(f"not a permutation: {list(self.dest)}")

    @classmethod
    def of(cls, dest: Iterable[int]) -> Permutation:
        return cls(tuple(int(x) for x in dest))

    @classmethod
    def identity(cls, n: int) -> Permutation:
        return cls(tuple(range(n)))

    @classmethod
    def reversal(cls, n: int) -> Permutation:
        return cls(tuple(range(n - 1, -1, -1)))

    @classmethod
    def random(cls, n: int, rng: random.Random | int) -> Permutation:
        if not isinstance(rng, random.Random):
            rng = random.Random(rng)
        dest = list(range(n))
        rng.shuffle(dest)
        return cls(tuple(dest))

    @classmethod
    def parse(cls, text: str, n: int | None = None) -> Permutation:
        """Parse ``a,b,c``, ``reversal`` or ``random:<seed>`` (the latter two need ``n``)."""
        text = text.strip()
        if text == "reversal":
            if n is None:
                raise ValueError("'reversal' needs the vertex count")
            return cls.reversal(n)
        if text.startswith("random:"):
            if n is None:
                raise ValueError("'random:<seed>' needs the vertex count")
            return cls.random(n, int(text.split(":", 1)[1]))
        try:
            perm = cls.of(int(x) for x in text.split(","))
        except ValueError as exc:
            raise ValueError(f"malformed permutation {text!r}: {exc}") from None
        if n is not None and perm.n != n:
            raise ValueError(f"permutation has {perm.n} entries, graph has {n} vertices")
        return perm

    @property
    def n(self) -> int:
        return len(self.dest)

    def inverse(self) -> Permutation:
        inv = [0] * self.n
        for v, d in enumerate(self.dest):
            inv[d] = v
        return Permutation(tuple(inv))

    def then(self, other: Permutation) -> Permutation:
        """Apply ``self`` first, then ``other``."""
        return Permutation(tuple(other.dest[d] for d in self.dest))

    def is_identity(self) -> bool:
        return all(v == d for v, d in enumerate(self.dest))

    def inversions(self) -> int:
        d = self.dest
        return sum(1 for i in range(self.n) for j in range(i + 1, self.n) if d[i] > d[j])

    def __str__(self) -> str:
        return ",".join(map(str, self.dest))


@dataclass(frozen=True)
class Gf2Matrix:
    n: int
    rows: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.rows) != self.n:
            raise ValueError("row count does not match dimension")
        limit = 1 << self.n
        if any(r < 0 or r >= limit for r in self.rows):
            raise ValueError("row has bits beyond the matrix width")

    @classmethod
    def identity(cls, n: int) -> Gf2Matrix:
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_array(cls, arr) -> Gf2Matrix:
        a = np.asarray(arr, dtype=np.uint8) & 1
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError("expected a square matrix")
        n = a.shape[0]
        rows = tuple(int(sum(1 << k for k in range(n) if a[i, k])) for i in range(n))
        return cls(n, rows)

    @classmethod
    def random_invertible(cls, n: int, rng: random.Random | int) -> Gf2Matrix:
        if not isinstance(rng, random.Random):
            rng = random.Random(rng)
        while True:
            m = cls(n, tuple(rng.getrandbits(n) for _ in range(n)))
            if rank(m) == n:
                return m

    def to_array(self) -> np.ndarray:
        return np.array(
            [[(r >> k) & 1 for k in range(self.n)] for r in self.rows], dtype=np.uint8
        )

    def __getitem__(self, idx: tuple[int, int]) -> int:
        i, k = idx
        return (self.rows[i] >> k) & 1

    def is_identity(self) -> bool:
        return all(r == 1 << i for i, r in enumerate(self.rows))

    def __str__(self) -> str:
        return "\n".join("".join(str((r >> k) & 1) for k in range(self.n)) for r in self.rows)


def from_permutation(p: Permutation) -> Gf2Matrix:
    """Matrix sending basis vector ``e_v`` to ``e_dest[v]``."""
    rows = [0] * p.n
    for v, d in enumerate(p.dest):
        rows[d] |= 1 << v
    return Gf2Matrix(p.n, tuple(rows))


def is_permutation_matrix(m: Gf2Matrix) -> bool:
    cols = 0
    for r in m.rows:
        if r == 0 or r & (r - 1):
            return False
        cols |= r
    return cols == (1 << m.n) - 1


def to_permutation(m: Gf2Matrix) -> Permutation:
    if not is_permutation_matrix(m):
        raise ValueError("matrix is not a permutation matrix")
    dest = [0] * m.n
    for d, r in enumerate(m.rows):
        dest[r.bit_length() - 1] = d
    return Permutation(tuple(dest))


def apply_cnot(m: Gf2Matrix, control: int, target: int) -> Gf2Matrix:
    if control == target:
        raise ValueError("CNOT control and target must differ")
    if not (0 <= control < m.n and 0 <= target < m.n):
        raise IndexError("CNOT qubit out of range")
    rows = list(m.rows)
    rows[target] ^= rows[control]
    return Gf2Matrix(m.n, tuple(rows))


def apply_swap(m: Gf2Matrix, a: int, b: int) -> Gf2Matrix:
    if a == b:
        raise ValueError("SWAP qubits must differ")
    rows = list(m.rows)
    rows[a], rows[b] = rows[b], rows[a]
    return Gf2Matrix(m.n, tuple(rows))


def rank_rows(rows: Sequence[int]) -> int:
    """Rank of a list of bit-rows (XOR basis insertion)."""
    basis: dict[int, int] = {}
    r = 0
    for row in rows:
        x = row
        while x:
            top = x.bit_length() - 1
            if top in basis:
                x ^= basis[top]
            else:
                basis[top] = x
                r += 1
                break
    return r


def rank(m: Gf2Matrix) -> int:
    return rank_rows(m.rows)


def multiply(a: Gf2Matrix, b: Gf2Matrix) -> Gf2Matrix:
    """Boolean matrix product ``a @ b`` over GF(2)."""
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")
    out = []
    for row in a.rows:
        acc = 0
        k = 0
        while row:
            if row & 1:
                acc ^= b.rows[k]
            row >>= 1
            k += 1
        out.append(acc)
    return Gf2Matrix(a.n, tuple(out))


def inverse(m: Gf2Matrix) -> Gf2Matrix:
    """Gauss-Jordan inverse; raises ``ValueError`` on singular input."""
    n = m.n
    work = list(m.rows)
    inv = [1 << i for i in range(n)]
    for col in range(n):
        bit = 1 << col
        pivot = next((i for i in range(col, n) if work[i] & bit), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv[col], inv[pivot] = inv[pivot], inv[col]
        for i in range(n):
            if i != col and work[i] & bit:
                work[i] ^= work[col]
                inv[i] ^= inv[col]
    return Gf2Matrix(n, tuple(inv))


def solve_row_combination(rows: dict[int, int], goal: int) -> set[int]:
    """Labels of the rows whose XOR equals ``goal``.

    ``rows`` maps a label to its bit-row; rows must be linearly independent and
    ``goal`` in their span.
    """
    basis: dict[int, tuple[int, int]] = {}  # pivot bit -> (row value, label mask)
    labels = sorted(rows)
    for idx, lab in enumerate(labels):
        x, tag = rows[lab], 1 << idx
        while x:
            top = x.bit_length() - 1
            if top not in basis:
                basis[top] = (x, tag)
                break
            bx, btag = basis[top]
            x ^= bx
            tag ^= btag
        else:
            raise ValueError("rows are linearly dependent")
    x, tag = goal, 0
    while x:
        top = x.bit_length() - 1
        if top not in basis:
            raise ValueError("goal is not in the row span")
        bx, btag = basis[top]
        x ^= bx
        tag ^= btag
    return {labels[i] for i in range(len(labels)) if (tag >> i) & 1}
