"""A small conflict-driven clause-learning SAT solver.

Two watched literals, first-UIP learning with activity-based branching, phase
saving, Luby restarts and periodic learnt-clause reduction. Pure Python; fine for
the few-thousand-variable formulas of small exact-synthesis queries.
"""

from __future__ import annotations

import heapq
import time
from typing import Sequence


def _luby(i: int) -> int:
    # i-th element (1-based) of the Luby sequence
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class Timeout(Exception):
    pass


class CDCLSolver:
    """Solve a CNF given as DIMACS-style signed-integer clauses over ``1..nvars``."""

    restart_base = 100
    var_decay = 0.95

    def __init__(self, nvars: int, clauses: Sequence[Sequence[int]], seed: int = 0):
        self.nvars = nvars
        size = 2 * nvars + 2
        # literal encoding: 2*v for v, 2*v+1 for -v
        self.vals = [0] * size
        self.level = [0] * (nvars + 1)
        self.reason = [-1] * (nvars + 1)
        self.activity = [0.0] * (nvars + 1)
        self.polarity = [False] * (nvars + 1)
        self.watches: list[list[int]] = [[] for _ in range(size)]
        self.clauses: list[list[int] | None] = []
        self.learnt_ids: list[int] = []
        self.lbd: dict[int, int] = {}
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.var_inc = 1.0
        self.ok = True
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        # tiny seed-driven jitter so ties in the activity order are reproducible but seedable
        jitter = (seed * 2654435761) & 0xFFFF
        self.heap = [(-((v * 40503 + jitter) % 65536) * 1e-12, v) for v in range(1, nvars + 1)]
        heapq.heapify(self.heap)
        for cl in clauses:
            if not self._add_input(cl):
                self.ok = False
                break

    # --- construction ---------------------------------------------------

    @staticmethod
    def _enc(lit: int) -> int:
        return 2 * lit if lit > 0 else -2 * lit + 1

    def _add_input(self, clause: Sequence[int]) -> bool:
        lits = set()
        for x in clause:
            if x == 0 or abs(x) > self.nvars:
                raise ValueError(f"literal {x} out of range")
            e = self._enc(x)
            if e ^ 1 in lits:
                return True  # tautology
            lits.add(e)
        vals = self.vals
        lits = [l for l in lits if vals[l] != -1]
        if any(vals[l] == 1 for l in lits):
            return True
        if not lits:
            return False
        if len(lits) == 1:
            self._enqueue(lits[0], -1)
            return self._propagate() == -1
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches[lits[0]].append(ci)
        self.watches[lits[1]].append(ci)
        return True

    # --- core -----------------------------------------------------------

    def _enqueue(self, lit: int, reason: int) -> None:
        v = lit >> 1
        self.vals[lit] = 1
        self.vals[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        vals = self.vals
        watches = self.watches
        clauses = self.clauses
        trail = self.trail
        level = self.level
        reason = self.reason
        dl = len(self.trail_lim)
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            kept: list[int] = []
            n_ws = len(ws)
            i = 0
            while i < n_ws:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue
                if c[0] == false_lit:
                    c[0], c[1] = c[1], false_lit
                first = c[0]
                if vals[first] == 1:
                    kept.append(ci)
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if vals[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(ci)
                        break
                else:
                    kept.append(ci)
                    if vals[first] == -1:
                        kept.extend(ws[i:])
                        watches[false_lit] = kept
                        self.qhead = len(trail)
                        return ci
                    v = first >> 1
                    vals[first] = 1
                    vals[first ^ 1] = -1
                    level[v] = dl
                    reason[v] = ci
                    trail.append(first)
                    self.propagations += 1
            watches[false_lit] = kept
        return -1

    def _bump(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.nvars + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[i], i) for i in range(1, self.nvars + 1) if self.vals[2 * i] == 0]
            heapq.heapify(self.heap)
        elif self.vals[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = self._seen
        level = self.level
        trail = self.trail
        dl = len(self.trail_lim)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        c = self.clauses[confl]
        touched = []
        while True:
            start = 0 if p == -1 else 1
            for q in c[start:]:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= dl:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            seen[p >> 1] = False
            counter -= 1
            if counter == 0:
                break
            c = self.clauses[self.reason[p >> 1]]
        learnt[0] = p ^ 1
        # drop literals implied by the rest of the clause (local minimisation)
        keep = [learnt[0]]
        for q in learnt[1:]:
            r = self.reason[q >> 1]
            if r == -1:
                keep.append(q)
                continue
            rc = self.clauses[r]
            if any(not seen[x >> 1] and level[x >> 1] > 0 for x in rc[1:]):
                keep.append(q)
        for v in touched:
            seen[v] = False
        learnt = keep
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda k: level[learnt[k] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        vals = self.vals
        act = self.activity
        heap = self.heap
        stop = self.trail_lim[lvl]
        for k in range(len(self.trail) - 1, stop - 1, -1):
            lit = self.trail[k]
            v = lit >> 1
            vals[lit] = 0
            vals[lit ^ 1] = 0
            self.reason[v] = -1
            self.polarity[v] = not (lit & 1)
            heapq.heappush(heap, (-act[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        heap = self.heap
        vals = self.vals
        while heap:
            _, v = heapq.heappop(heap)
            if vals[2 * v] == 0:
                return 2 * v if self.polarity[v] else 2 * v + 1
        return -1

    def _reduce_db(self) -> None:
        locked = {self.reason[l >> 1] for l in self.trail}
        cands = [ci for ci in self.learnt_ids if self.clauses[ci] is not None]
        cands.sort(key=lambda ci: (self.lbd[ci], len(self.clauses[ci])))
        keep = []
        for rank, ci in enumerate(cands):
            if rank < len(cands) // 2 or self.lbd[ci] <= 2 or ci in locked:
                keep.append(ci)
            else:
                self.clauses[ci] = None
                del self.lbd[ci]
        self.learnt_ids = keep

    def solve(self, time_limit: float | None = None) -> bool:
        """Return True (SAT) or False (UNSAT); raise ``Timeout`` past ``time_limit`` seconds."""
        if not self.ok:
            return False
        deadline = None if time_limit is None else time.monotonic() + time_limit
        self._seen = [False] * (self.nvars + 1)
        if self._propagate() != -1:
            self.ok = False
            return False
        restart_no = 1
        budget = self.restart_base * _luby(restart_no)
        max_learnts = max(2000, len(self.clauses) // 2)
        since_check = 0
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                budget -= 1
                if not self.trail_lim:
                    self.ok = False
                    return False
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = len(self.clauses)
                    self.clauses.append(learnt)
                    self.watches[learnt[0]].append(ci)
                    self.watches[learnt[1]].append(ci)
                    self.learnt_ids.append(ci)
                    self.lbd[ci] = len({self.level[l >> 1] for l in learnt})
                    self._enqueue(learnt[0], ci)
                self.var_inc /= self.var_decay
                continue
            since_check += 1
            if since_check >= 64:
                since_check = 0
                if deadline is not None and time.monotonic() > deadline:
                    self._cancel_until(0)
                    raise Timeout
            if budget <= 0:
                restart_no += 1
                budget = self.restart_base * _luby(restart_no)
                self._cancel_until(0)
                if len(self.learnt_ids) > max_learnts:
                    self._reduce_db()
                    max_learnts = int(max_learnts * 1.1)
                continue
            lit = self._pick()
            if lit == -1:
                return True
            self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)

    def model(self) -> list[int]:
        """Signed literals of the current total assignment, index ``v - 1`` for variable ``v``."""
        return [v if self.vals[2 * v] == 1 else -v for v in range(1, self.nvars + 1)]
