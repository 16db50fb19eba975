"""Self-contained CNF solver: CDCL with watched literals and restarts.

Kept dependency-free so the whole test suite runs without an external SAT
binary; an external solver is only an optional speedup, never a requirement.
"""
from __future__ import annotations

import heapq
from collections import defaultdict


class CnfUnsupported(ValueError):
    """Instance exceeds the configured size bound for the internal solver."""


def luby(i: int) -> int:
    """The i-th element (1-based) of the Luby restart sequence."""
    k = 1
    while (1 << (k + 1)) - 1 <= i:
        k += 1
    while (1 << k) - 1 != i:
        i -= (1 << (k - 1)) - 1
        k -= 1
        while (1 << (k + 1)) - 1 <= i:
            k += 1
    return 1 << (k - 1)


class CdclSolver:
    """Complete search; returns a total assignment on SAT, None on UNSAT."""

    def __init__(self, num_vars: int, clauses):
        self.n = num_vars
        self.assign = [0] * (num_vars + 1)  # 0 unknown, 1 true, -1 false
        self.level = [0] * (num_vars + 1)
        self.reason: list[list[int] | None] = [None] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: dict[int, list[list[int]]] = defaultdict(list)
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.phase = [True] * (num_vars + 1)
        self.heap: list[tuple[float, int]] = []
        self.unsat = False
        for v in range(1, num_vars + 1):
            heapq.heappush(self.heap, (0.0, v))
        for clause in clauses:
            self._add_clause(list(clause))

    # -- literal values --

    def _value(self, lit: int) -> int:
        a = self.assign[abs(lit)]
        return a if lit > 0 else -a

    def _add_clause(self, lits: list[int]) -> None:
        seen = set()
        out = []
        for lit in lits:
            if abs(lit) > self.n or lit == 0:
                raise ValueError(f"bad literal {lit}")
            if -lit in seen:
                return  # tautology
            if lit not in seen:
                seen.add(lit)
                out.append(lit)
        if not out:
            self.unsat = True
            return
        if len(out) == 1:
            if not self._enqueue(out[0], None):
                self.unsat = True
            return
        self._attach(out)

    def _attach(self, clause: list[int]) -> None:
        self.watches[clause[0]].append(clause)
        self.watches[clause[1]].append(clause)

    def _enqueue(self, lit: int, reason: list[int] | None) -> bool:
        val = self._value(lit)
        if val == 1:
            return True
        if val == -1:
            return False
        v = abs(lit)
        self.assign[v] = 1 if lit > 0 else -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.phase[v] = lit > 0
        self.trail.append(lit)
        return True

    def _propagate(self) -> list[int] | None:
        """Unit propagation; returns a conflicting clause or None."""
        while self.qhead < len(self.trail):
            lit = self.trail[self.qhead]
            self.qhead += 1
            false_lit = -lit
            ws = self.watches[false_lit]
            kept = []
            i = 0
            while i < len(ws):
                clause = ws[i]
                i += 1
                if clause[0] == false_lit:
                    clause[0], clause[1] = clause[1], clause[0]
                first = clause[0]
                if self._value(first) == 1:
                    kept.append(clause)
                    continue
                for k in range(2, len(clause)):
                    if self._value(clause[k]) != -1:
                        clause[1], clause[k] = clause[k], clause[1]
                        self.watches[clause[1]].append(clause)
                        break
                else:
                    kept.append(clause)
                    if not self._enqueue(first, clause):
                        kept.extend(ws[i:])
                        self.watches[false_lit] = kept
                        return clause
            self.watches[false_lit] = kept
        return None

    def _bump(self, v: int) -> None:
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.n + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        heapq.heappush(self.heap, (-self.activity[v], v))

    def _analyze(self, conflict: list[int]) -> tuple[list[int], int]:
        """First-UIP learning; returns (learned clause, backjump level)."""
        cur_level = len(self.trail_lim)
        learned = [0]  # slot for the asserting literal
        seen = [False] * (self.n + 1)
        counter = 0
        p = 0
        clause = conflict
        idx = len(self.trail) - 1
        while True:
            for q in clause:
                if q == p:  # the literal being resolved on
                    continue
                v = abs(q)
                if not seen[v] and self.level[v] > 0:
                    seen[v] = True
                    self._bump(v)
                    if self.level[v] >= cur_level:
                        counter += 1
                    else:
                        learned.append(q)
            while not seen[abs(self.trail[idx])]:
                idx -= 1
            p = self.trail[idx]
            seen[abs(p)] = False
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)] or []
            idx -= 1
        learned[0] = -p
        back = 0
        if len(learned) > 1:
            back = max(self.level[abs(q)] for q in learned[1:])
            # move a literal of the backjump level into the second watch slot
            for k in range(1, len(learned)):
                if self.level[abs(learned[k])] == back:
                    learned[1], learned[k] = learned[k], learned[1]
                    break
        return learned, back

    def _backtrack(self, target: int) -> None:
        while len(self.trail_lim) > target:
            mark = self.trail_lim.pop()
            for lit in self.trail[mark:]:
                v = abs(lit)
                self.assign[v] = 0
                self.reason[v] = None
                heapq.heappush(self.heap, (-self.activity[v], v))
            del self.trail[mark:]
        self.qhead = min(self.qhead, len(self.trail))

    def _decide(self) -> int:
        while self.heap:
            _, v = heapq.heappop(self.heap)
            if self.assign[v] == 0:
                return v if self.phase[v] else -v
        return 0

    def solve(self) -> list[bool] | None:
        """Returns assignment[1..n] as a bool list (index 0 unused), or None."""
        if self.unsat:
            return None
        conflicts = 0
        restart_num = 1
        budget = 64 * luby(restart_num)
        while True:
            conflict = self._propagate()
            if conflict is not None:
                if not self.trail_lim:
                    return None
                learned, back = self._analyze(conflict)
                self._backtrack(back)
                if len(learned) == 1:
                    if not self._enqueue(learned[0], None):
                        return None
                else:
                    self._attach(learned)
                    if not self._enqueue(learned[0], learned):
                        return None
                self.var_inc /= 0.95
                conflicts += 1
                if conflicts >= budget:
                    conflicts = 0
                    restart_num += 1
                    budget = 64 * luby(restart_num)
                    self._backtrack(0)
                continue
            lit = self._decide()
            if lit == 0:
                return [False] + [self.assign[v] > 0 for v in range(1, self.n + 1)]
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, None)


def solve_cnf(num_vars: int, clauses) -> list[bool] | None:
    """Solve; on SAT the model is re-checked against every clause."""
    model = CdclSolver(num_vars, clauses).solve()
    if model is not None:
        for clause in clauses:
            if not any(model[abs(l)] == (l > 0) for l in clause):
                raise AssertionError("internal solver produced a bad model")
    return model
