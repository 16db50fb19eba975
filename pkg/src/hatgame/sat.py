"""Winning-strategy existence as CNF: encoding, DIMACS, solvers, decoding.

Variable semantics follow the counting model: variable (u, alpha, beta) is
FALSE exactly when the sage at u guesses alpha on seeing the neighbor colors
beta, so each (u, beta) block carries an exactly-one-false constraint and
every admissible placement contributes one "somebody guesses right" clause.
"""
from __future__ import annotations

import os
import subprocess
import tempfile
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import Graph, canonical_neighbors
from .strategies import (
    Hint,
    NO_HINT,
    Strategy,
    VertexTable,
    check_hint,
    enumerate_disproving,
    _digit_matrix,
)
from . import solver as _internal

DEFAULT_ENCODE_BOUND = 13
DEFAULT_INTERNAL_VAR_BOUND = 400
SOLVER_ENV_VAR = "HATGAME_SOLVER"


class SatError(RuntimeError):
    """Encoding, solver invocation, or model decoding failure."""


@dataclass(frozen=True)
class VarMap:
    """Bijection between DIMACS variables and (vertex, guess, seen-colors).

    Variable ids are contiguous per vertex: block_base(u) + alpha * 3**deg(u)
    + row_major(beta) + 1, vertices in lexicographic order.
    """

    order: tuple[str, ...]
    neighbors: dict[str, tuple[str, ...]]
    base: dict[str, int]
    num_vars: int

    @staticmethod
    def for_graph(g: Graph) -> "VarMap":
        base = {}
        total = 0
        for v in g.vertices:
            base[v] = total
            total += 3 ** (g.degree(v) + 1)
        return VarMap(
            order=g.vertices,
            neighbors={v: canonical_neighbors(g, v) for v in g.vertices},
            base=base,
            num_vars=total,
        )

    def var(self, u: str, alpha: int, beta_index: int) -> int:
        return self.base[u] + alpha * 3 ** len(self.neighbors[u]) + beta_index + 1

    def decode(self, var_id: int) -> tuple[str, int, tuple[int, ...]]:
        """Inverse of var(): (vertex, alpha, beta digits)."""
        if not 1 <= var_id <= self.num_vars:
            raise SatError(f"variable {var_id} out of range")
        for u in reversed(self.order):
            if var_id > self.base[u]:
                rest = var_id - self.base[u] - 1
                deg = len(self.neighbors[u])
                alpha, bidx = divmod(rest, 3 ** deg)
                beta = tuple((bidx // 3 ** (deg - 1 - i)) % 3 for i in range(deg))
                return u, alpha, beta
        raise SatError(f"variable {var_id} out of range")


@dataclass
class Cnf:
    num_vars: int
    clauses: list[tuple[int, ...]]


def encode_cnf(
    g: Graph, hint: Hint = NO_HINT, bound: int = DEFAULT_ENCODE_BOUND
) -> tuple[Cnf, VarMap]:
    """CNF satisfiable iff a winning strategy exists under the hint.

    Per (vertex, seen-colors) block: exactly one FALSE variable (exactly two
    for the double-guess vertex). Per admissible placement: one clause
    asserting some sage guesses right.
    """
    n = len(g.vertices)
    if n > bound:
        raise SatError(f"{n} vertices exceeds the encoding bound {bound}")
    check_hint(g, hint)
    vm = VarMap.for_graph(g)
    clauses: list[tuple[int, ...]] = []
    doubled = hint.u if hint.kind == "two_guesses" else None
    for u in vm.order:
        deg = len(vm.neighbors[u])
        for bidx in range(3 ** deg):
            m0, m1, m2 = (vm.var(u, a, bidx) for a in (0, 1, 2))
            if u == doubled:
                clauses += [(m0, m1, m2), (-m0, -m1), (-m0, -m2), (-m1, -m2)]
            else:
                clauses += [(-m0, -m1, -m2), (m0, m1), (m0, m2), (m1, m2)]
    clauses.extend(_placement_clauses(g, hint, vm))
    return Cnf(vm.num_vars, clauses), vm


def _placement_clauses(g: Graph, hint: Hint, vm: VarMap) -> list[tuple[int, ...]]:
    n = len(g.vertices)
    pos = {v: i for i, v in enumerate(vm.order)}
    colors = _digit_matrix(n).astype(np.int64)
    if hint.kind == "minus":
        mask = colors[:, pos[hint.u]] != hint.color
    elif hint.kind == "equal":
        mask = colors[:, pos[hint.u]] == colors[:, pos[hint.v]]
    elif hint.kind == "not_equal":
        mask = colors[:, pos[hint.u]] != colors[:, pos[hint.v]]
    else:
        mask = np.ones(colors.shape[0], dtype=bool)
    colors = colors[mask]
    lits = np.empty((colors.shape[0], n), dtype=np.int64)
    for j, u in enumerate(vm.order):
        deg = len(vm.neighbors[u])
        bidx = np.zeros(colors.shape[0], dtype=np.int64)
        for nb in vm.neighbors[u]:
            bidx = bidx * 3 + colors[:, pos[nb]]
        lits[:, j] = -(vm.base[u] + colors[:, j] * 3 ** deg + bidx + 1)
    return [tuple(row) for row in lits.tolist()]


def write_dimacs(cnf: Cnf, vm: VarMap) -> bytes:
    """Standard DIMACS with a decodable variable map in leading comments.

    Comment form: ``c var <id> <vertex> <alpha> <beta-digits>`` where the
    beta digit string is ``-`` for an isolated vertex. Output is
    byte-identical for equal inputs (LF endings, fixed ordering).
    """
    out = []
    for var_id in range(1, cnf.num_vars + 1):
        u, alpha, beta = vm.decode(var_id)
        digits = "".join(str(b) for b in beta) if beta else "-"
        out.append(f"c var {var_id} {u} {alpha} {digits}")
    out.append(f"p cnf {cnf.num_vars} {len(cnf.clauses)}")
    for clause in cnf.clauses:
        out.append(" ".join(str(l) for l in clause) + " 0")
    return ("\n".join(out) + "\n").encode("ascii")


def parse_var_comments(data: bytes) -> dict[int, tuple[str, int, tuple[int, ...]]]:
    """Invert the ``c var`` comment lines of write_dimacs."""
    table: dict[int, tuple[str, int, tuple[int, ...]]] = {}
    for raw in data.decode("ascii", errors="replace").splitlines():
        parts = raw.split()
        if len(parts) == 6 and parts[0] == "c" and parts[1] == "var":
            beta = () if parts[5] == "-" else tuple(int(ch) for ch in parts[5])
            table[int(parts[2])] = (parts[3], int(parts[4]), beta)
    return table


# --- solvers -----------------------------------------------------------------


@dataclass(frozen=True)
class SolverConfig:
    """External solver invocation: argv with ``{cnf}`` replaced by the DIMACS
    file path (appended when no placeholder is present)."""

    command: tuple[str, ...]

    @staticmethod
    def from_spec(spec: str) -> "SolverConfig":
        parts = tuple(spec.split())
        if not parts:
            raise SatError("empty solver command")
        return SolverConfig(parts)


def default_solver() -> SolverConfig | None:
    """Solver named by the environment, if any; None selects the fallback."""
    spec = os.environ.get(SOLVER_ENV_VAR, "").strip()
    if not spec or spec == "internal":
        return None
    return SolverConfig.from_spec(spec)


@dataclass(frozen=True)
class SatResult:
    satisfiable: bool
    assignment: dict[int, bool] | None  # total on SAT


def run_solver(dimacs: bytes, config: SolverConfig) -> SatResult:
    """Invoke an external solver on a DIMACS file and parse s/v lines."""
    with tempfile.NamedTemporaryFile(prefix="hatgame_", suffix=".cnf", delete=False) as fh:
        fh.write(dimacs)
        path = fh.name
    try:
        argv = [a.replace("{cnf}", path) for a in config.command]
        if not any("{cnf}" in a for a in config.command):
            argv.append(path)
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, check=False)
        except OSError as exc:
            raise SatError(f"cannot run solver {argv[0]!r}: {exc}") from None
        verdict = None
        lits: list[int] = []
        for line in proc.stdout.splitlines():
            if line.startswith("s "):
                token = line.split(None, 2)[1].upper()
                if token == "SATISFIABLE":
                    verdict = True
                elif token == "UNSATISFIABLE":
                    verdict = False
                else:
                    raise SatError(f"solver status {token!r}")
            elif line.startswith("v "):
                lits += [int(t) for t in line[2:].split()]
        if verdict is None:
            raise SatError(
                f"no verdict line from solver (exit {proc.returncode}); "
                f"stderr: {proc.stderr.strip()[:200]}"
            )
        if not verdict:
            return SatResult(False, None)
        assignment = {abs(l): l > 0 for l in lits if l != 0}
        return SatResult(True, assignment)
    finally:
        os.unlink(path)


def internal_solve(cnf: Cnf, var_bound: int = DEFAULT_INTERNAL_VAR_BOUND) -> SatResult:
    """Complete internal search (CDCL); bounded to keep runtimes sane."""
    if cnf.num_vars > var_bound:
        raise SatError(
            f"{cnf.num_vars} variables exceeds the internal solver bound {var_bound}; "
            f"configure an external solver or raise the bound"
        )
    model = _internal.solve_cnf(cnf.num_vars, cnf.clauses)
    if model is None:
        return SatResult(False, None)
    return SatResult(True, {v: model[v] for v in range(1, cnf.num_vars + 1)})


def solve_cnf(
    cnf: Cnf,
    vm: VarMap,
    config: SolverConfig | None = None,
    internal_bound: int = DEFAULT_INTERNAL_VAR_BOUND,
) -> SatResult:
    if config is not None:
        return run_solver(write_dimacs(cnf, vm), config)
    return internal_solve(cnf, internal_bound)


# --- decoding and the full pipeline -----------------------------------------


def decode_model(vm: VarMap, assignment: dict[int, bool], hint: Hint = NO_HINT) -> Strategy:
    """FALSE variables name the guesses; exactly one per block, two at the
    double-guess vertex."""
    doubled = hint.u if hint.kind == "two_guesses" else None
    tables = {}
    for u in vm.order:
        deg = len(vm.neighbors[u])
        cells = []
        for bidx in range(3 ** deg):
            false_alphas = tuple(
                a for a in (0, 1, 2) if not assignment.get(vm.var(u, a, bidx), True)
            )
            want = 2 if u == doubled else 1
            if len(false_alphas) != want:
                raise SatError(
                    f"block ({u}, {bidx}) has {len(false_alphas)} guesses, expected {want}"
                )
            cells.append(false_alphas)
        tables[u] = VertexTable(vm.neighbors[u], tuple(cells))
    return Strategy(tables)


def synthesize(
    g: Graph,
    hint: Hint = NO_HINT,
    config: SolverConfig | None = None,
    encode_bound: int = DEFAULT_ENCODE_BOUND,
    internal_bound: int = DEFAULT_INTERNAL_VAR_BOUND,
) -> Strategy | None:
    """Encode, solve, decode; a decoded strategy is re-verified by brute force
    before being returned. None means no winning strategy exists."""
    cnf, vm = encode_cnf(g, hint, bound=encode_bound)
    result = solve_cnf(cnf, vm, config, internal_bound)
    if not result.satisfiable:
        return None
    strategy = decode_model(vm, result.assignment or {}, hint)
    report = enumerate_disproving(g, strategy, hint, sample_limit=1, brute_bound=encode_bound)
    if report.count != 0:
        raise SatError(
            "internal consistency failure: decoded strategy admits "
            f"{report.count} disproving placements"
        )
    return strategy
