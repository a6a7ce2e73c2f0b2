"""A small CDCL SAT solver: two watched literals, 1UIP learning, VSIDS, Luby restarts.

Used as the default backend when no external solver is configured. It is
plain Python (``cdcl_jit`` holds a compiled twin), so it suits the desk-scale
instances from the encoders rather than competition benchmarks.
"""

from __future__ import annotations

import heapq
import time
from typing import Sequence


def _luby(x: int) -> int:
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) >> 1
        seq -= 1
        x %= size
    return 1 << seq


class Cdcl:
    """Solver state. Literal codes: ``2*v`` is ``v``, ``2*v+1`` is ``-v``."""

    def __init__(self, num_vars: int, clauses: Sequence[Sequence[int]]) -> None:
        self.nv = num_vars
        size = 2 * (num_vars + 1)
        self.val = [0] * size  # per literal: 1 true, -1 false, 0 unassigned
        self.level = [0] * (num_vars + 1)
        self.reason: list[int] = [-1] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[int]] = [[] for _ in range(size)]
        self.clauses: list[list[int]] = []
        self.learnt_start = 0
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.phase = [False] * (num_vars + 1)
        self.heap: list[tuple[float, int]] = [(0.0, v) for v in range(1, num_vars + 1)]
        self.ok = True
        self.conflicts = 0
        self.decay = 0.95
        self.restart_unit = 100
        units: list[int] = []
        for cl in clauses:
            lits = set()
            taut = False
            for l in cl:
                v = abs(l)
                if v == 0 or v > num_vars:
                    raise ValueError(f"literal {l} out of range")
                code = 2 * v + (l < 0)
                if code ^ 1 in lits:
                    taut = True
                    break
                lits.add(code)
            if taut:
                continue
            if not lits:
                self.ok = False
                continue
            lits = sorted(lits)
            if len(lits) == 1:
                units.append(lits[0])
            else:
                self._attach(lits)
        self.learnt_start = len(self.clauses)
        for u in units:
            if self.val[u] == -1:
                self.ok = False
            elif self.val[u] == 0:
                self._enqueue(u, -1)
        if self.ok and self._propagate() != -1:
            self.ok = False

    def _attach(self, lits: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(lits)
        self.watches[lits[0]].append(ci)
        self.watches[lits[1]].append(ci)
        return ci

    def _enqueue(self, lit: int, reason: int) -> None:
        self.val[lit] = 1
        self.val[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        val = self.val
        clauses = self.clauses
        watches = self.watches
        trail = self.trail
        while self.qhead < len(trail):
            false_lit = trail[self.qhead] ^ 1
            self.qhead += 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if val[first] == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if val[lk] != -1:
                        c[1] = lk
                        c[k] = false_lit
                        watches[lk].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if val[first] == -1:
                        while i < n:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        self.qhead = len(trail)
                        return ci
                    self._enqueue(first, ci)
            del ws[j:]
        return -1

    def _bump(self, v: int) -> None:
        a = self.activity[v] + self.var_inc
        self.activity[v] = a
        if a > 1e100:
            self.activity = [x * 1e-100 for x in self.activity]
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nv + 1) if self.val[2 * u] == 0]
            heapq.heapify(self.heap)
        else:
            heapq.heappush(self.heap, (-a, v))

    def _analyze(self, confl: int) -> tuple[list[int], int]:
        seen = self._seen
        level = self.level
        cur = len(self.trail_lim)
        learnt = [0]
        path = 0
        p = -1
        idx = len(self.trail) - 1
        to_clear = []
        while True:
            c = self.clauses[confl]
            for q in c if p == -1 else c[1:]:
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    to_clear.append(v)
                    self._bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            seen[p >> 1] = False
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        # Drop literals implied by the rest of the clause (local minimization).
        if len(learnt) > 2:
            keep = [learnt[0]]
            for q in learnt[1:]:
                r = self.reason[q >> 1]
                if r == -1:
                    keep.append(q)
                    continue
                for x in self.clauses[r][1:]:
                    xv = x >> 1
                    if not seen[xv] and level[xv] > 0:
                        keep.append(q)
                        break
            learnt = keep
        for v in to_clear:
            seen[v] = False
        if len(learnt) == 1:
            return learnt, 0
        best = max(range(1, len(learnt)), key=lambda i: level[learnt[i] >> 1])
        learnt[1], learnt[best] = learnt[best], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        start = self.trail_lim[lvl]
        val = self.val
        for lit in self.trail[start:]:
            v = lit >> 1
            val[lit] = 0
            val[lit ^ 1] = 0
            self.reason[v] = -1
            self.phase[v] = not (lit & 1)
            heapq.heappush(self.heap, (-self.activity[v], v))
        del self.trail[start:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick(self) -> int:
        heap = self.heap
        val = self.val
        act = self.activity
        while heap:
            a, v = heapq.heappop(heap)
            if val[2 * v] == 0 and -a == act[v]:
                return 2 * v + (0 if self.phase[v] else 1)
        for v in range(1, self.nv + 1):
            if val[2 * v] == 0:
                return 2 * v + (0 if self.phase[v] else 1)
        return -1

    def _reduce_db(self) -> None:
        locked = {self.reason[lit >> 1] for lit in self.trail}
        learnts = range(self.learnt_start, len(self.clauses))
        ranked = sorted(learnts, key=lambda ci: len(self.clauses[ci]))
        drop = {ci for ci in ranked[len(ranked) // 2:] if ci not in locked and len(self.clauses[ci]) > 2}
        if not drop:
            return
        remap: dict[int, int] = {}
        kept: list[list[int]] = []
        for ci, c in enumerate(self.clauses):
            if ci in drop:
                continue
            remap[ci] = len(kept)
            kept.append(c)
        self.clauses = kept
        for v in range(1, self.nv + 1):
            r = self.reason[v]
            if r != -1:
                self.reason[v] = remap[r]
        self.watches = [[] for _ in self.watches]
        for ci, c in enumerate(self.clauses):
            self.watches[c[0]].append(ci)
            self.watches[c[1]].append(ci)

    def solve(self, deadline: float | None = None) -> bool | None:
        """True (sat), False (unsat) or None (deadline reached)."""
        if not self.ok:
            return False
        self._seen = [False] * (self.nv + 1)
        max_learnts = max(2000, len(self.clauses) // 2)
        restart = 0
        budget = self.restart_unit * _luby(restart)
        since_restart = 0
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                since_restart += 1
                if not self.trail_lim:
                    return False
                learnt, back = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    self._enqueue(learnt[0], ci)
                self.var_inc /= self.decay
                if deadline is not None and self.conflicts % 128 == 0 and time.monotonic() > deadline:
                    return None
                continue
            if since_restart >= budget:
                restart += 1
                budget = self.restart_unit * _luby(restart)
                since_restart = 0
                self._cancel_until(0)
                if len(self.clauses) - self.learnt_start > max_learnts:
                    self._reduce_db()
                    max_learnts = int(max_learnts * 1.1)
                continue
            lit = self._pick()
            if lit == -1:
                return True
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)

    def model(self) -> dict[int, bool]:
        return {v: self.val[2 * v] == 1 for v in range(1, self.nv + 1)}


def solve(num_vars: int, clauses: Sequence[Sequence[int]], deadline: float | None = None):
    """Return ``(status, model)`` with status True/False/None."""
    s = Cdcl(num_vars, clauses)
    res = s.solve(deadline)
    return res, (s.model() if res else None)


def fast_solve(num_vars: int, clauses: Sequence[Sequence[int]], deadline: float | None = None):
    """Like ``solve`` but uses the compiled kernel when numba is importable."""
    try:
        from . import cdcl_jit
    except ImportError:  # pragma: no cover - numba missing
        return solve(num_vars, clauses, deadline)
    return cdcl_jit.solve(num_vars, clauses, deadline)
