"""Strategies as guess tensors, hints, and exhaustive refutation search."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .graphs import Graph, canonical_neighbors

COLORS = (0, 1, 2)
DEFAULT_BRUTE_BOUND = 13
DEFAULT_SEARCH_BOUND = 10_000_000

HatPlacement = Mapping[str, int]


class StrategyError(ValueError):
    """Malformed strategy, hint, or an instance too large to enumerate."""


# --- hints ------------------------------------------------------------------


@dataclass(frozen=True)
class Hint:
    """Public pre-game information.

    kind is one of none / minus / equal / not_equal / two_guesses; ``u`` is
    the (first) vertex the hint refers to, ``v`` the second for the pair
    kinds, ``color`` the forbidden color for minus.
    """

    kind: str = "none"
    u: str | None = None
    v: str | None = None
    color: int | None = None

    def vertices(self) -> tuple[str, ...]:
        return tuple(x for x in (self.u, self.v) if x is not None)


NO_HINT = Hint()


def minus(v: str, color: int) -> Hint:
    if color not in COLORS:
        raise StrategyError(f"bad color {color!r}")
    return Hint("minus", u=v, color=color)


def equal(u: str, v: str) -> Hint:
    if u == v:
        raise StrategyError("hint needs two distinct vertices")
    return Hint("equal", u=u, v=v)


def not_equal(u: str, v: str) -> Hint:
    if u == v:
        raise StrategyError("hint needs two distinct vertices")
    return Hint("not_equal", u=u, v=v)


def two_guesses(v: str) -> Hint:
    return Hint("two_guesses", u=v)


def parse_hint(text: str) -> Hint:
    """Parse the CLI hint syntax: ``A-2``, ``A=B``, ``A!=B``, ``2:A``."""
    text = text.strip()
    if text in ("", "none"):
        return NO_HINT
    if text.startswith("2:"):
        return two_guesses(text[2:])
    if "!=" in text:
        u, _, v = text.partition("!=")
        return not_equal(u, v)
    if "=" in text:
        u, _, v = text.partition("=")
        return equal(u, v)
    if "-" in text:
        u, _, c = text.rpartition("-")
        if u and c in ("0", "1", "2"):
            return minus(u, int(c))
    raise StrategyError(f"cannot parse hint {text!r}")


def format_hint(h: Hint) -> str:
    if h.kind == "none":
        return "none"
    if h.kind == "minus":
        return f"{h.u}-{h.color}"
    if h.kind == "equal":
        return f"{h.u}={h.v}"
    if h.kind == "not_equal":
        return f"{h.u}!={h.v}"
    if h.kind == "two_guesses":
        return f"2:{h.u}"
    raise StrategyError(f"unknown hint kind {h.kind!r}")


def check_hint(g: Graph, h: Hint) -> None:
    for v in h.vertices():
        if v not in g:
            raise StrategyError(f"hint names unknown vertex {v!r}")


def admissible(h: Hint, placement: HatPlacement) -> bool:
    """Whether a placement is allowed by the hint (two_guesses never filters)."""
    if h.kind == "minus":
        return placement[h.u] != h.color
    if h.kind == "equal":
        return placement[h.u] == placement[h.v]
    if h.kind == "not_equal":
        return placement[h.u] != placement[h.v]
    return True


# --- strategies ---------------------------------------------------------------


@dataclass(frozen=True)
class VertexTable:
    """One sage's guess table.

    ``cells`` has ``3**len(neighbors)`` entries in row-major order over the
    neighbor colors (first neighbor most significant); each cell is a sorted
    tuple of one or two colors.
    """

    neighbors: tuple[str, ...]
    cells: tuple[tuple[int, ...], ...]

    def cell(self, seen: Sequence[int]) -> tuple[int, ...]:
        idx = 0
        for c in seen:
            idx = idx * 3 + c
        return self.cells[idx]


@dataclass(frozen=True, eq=False)
class Strategy:
    """Collective strategy: one guess table per vertex."""

    tables: dict[str, VertexTable]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Strategy) and self.tables == other.tables


def _as_cell(value) -> tuple[int, ...]:
    cell = tuple(sorted(value)) if isinstance(value, (tuple, list, set, frozenset)) else (value,)
    if not 1 <= len(cell) <= 2 or len(set(cell)) != len(cell):
        raise StrategyError(f"bad cell {value!r}")
    if any(c not in COLORS for c in cell):
        raise StrategyError(f"bad cell {value!r}")
    return cell


def make_table(neighbors: Sequence[str], cells: Iterable) -> VertexTable:
    """Build a table from guesses given flat in row-major order; each entry is
    a color or a small collection of colors."""
    neighbors = tuple(neighbors)
    out = tuple(_as_cell(c) for c in cells)
    if len(out) != 3 ** len(neighbors):
        raise StrategyError(
            f"need {3 ** len(neighbors)} cells for {len(neighbors)} neighbors, got {len(out)}"
        )
    return VertexTable(neighbors, out)


def table_from_matrix(neighbors: Sequence[str], matrix) -> VertexTable:
    """Build a table from a nested list shaped (3,)*degree, as printed in
    bracketed strategy matrices (row index = first neighbor)."""

    def flatten(m, depth: int):
        if depth == 0:
            yield m
            return
        if len(m) != 3:
            raise StrategyError("matrix axes must have length 3")
        for sub in m:
            yield from flatten(sub, depth - 1)

    return make_table(neighbors, flatten(matrix, len(tuple(neighbors))))


def validate_strategy(g: Graph, s: Strategy, hint: Hint = NO_HINT) -> None:
    """Check table shapes, canonical neighbor order, and cell sizes (single
    guess everywhere, double guesses exactly at a two_guesses vertex)."""
    if set(s.tables) != set(g.vertices):
        raise StrategyError("strategy domain differs from the vertex set")
    check_hint(g, hint)
    doubled = hint.u if hint.kind == "two_guesses" else None
    for v in g.vertices:
        t = s.tables[v]
        if t.neighbors != canonical_neighbors(g, v):
            raise StrategyError(f"vertex {v!r}: neighbors not in canonical order")
        if len(t.cells) != 3 ** len(t.neighbors):
            raise StrategyError(f"vertex {v!r}: wrong table length")
        want = 2 if v == doubled else 1
        for cell in t.cells:
            if len(cell) != want or any(c not in COLORS for c in cell):
                raise StrategyError(f"vertex {v!r}: cell {cell!r} must have {want} colors")


def evaluate_guess(s: Strategy, v: str, placement: HatPlacement) -> tuple[int, ...]:
    """The guess set vertex ``v`` announces under ``placement``."""
    if v not in s.tables:
        raise StrategyError(f"strategy has no table for {v!r}")
    t = s.tables[v]
    try:
        seen = [placement[u] for u in t.neighbors]
    except KeyError as exc:
        raise StrategyError(f"placement misses vertex {exc.args[0]!r}") from None
    return t.cell(seen)


def is_disproving(s: Strategy, placement: HatPlacement) -> bool:
    """True iff no sage guesses his own color."""
    return all(placement[v] not in evaluate_guess(s, v, placement) for v in s.tables)


@dataclass(frozen=True)
class DisproofReport:
    count: int
    samples: tuple[dict[str, int], ...]


@lru_cache(maxsize=8)
def _digit_matrix(n: int) -> np.ndarray:
    """All base-3 digit rows of length n, ascending (shape 3**n x n, int8)."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int8)
    prev = _digit_matrix(n - 1)
    out = np.empty((3 ** n, n), dtype=np.int8)
    for d in range(3):
        block = slice(d * 3 ** (n - 1), (d + 1) * 3 ** (n - 1))
        out[block, 0] = d
        out[block, 1:] = prev
    out.setflags(write=False)
    return out


_CHUNK_DIGITS = 12


def _placement_chunks(n: int):
    """Yield (first_index, colors) blocks covering all 3**n placements in
    ascending row-major order."""
    if n <= _CHUNK_DIGITS:
        yield 0, _digit_matrix(n)
        return
    h = n - _CHUNK_DIGITS
    prefixes = _digit_matrix(h)
    suffix = _digit_matrix(_CHUNK_DIGITS)
    rows = suffix.shape[0]
    for i in range(prefixes.shape[0]):
        colors = np.empty((rows, n), dtype=np.int8)
        colors[:, :h] = prefixes[i]
        colors[:, h:] = suffix
        yield i * rows, colors


class _VectorEvaluator:
    """Per-vertex guess lookup tables compiled to numpy arrays."""

    def __init__(self, g: Graph, s: Strategy, hint: Hint):
        self.order = g.vertices  # sorted: placement index is row-major over this
        self.pos = {v: i for i, v in enumerate(self.order)}
        self.hint = hint
        self.per_vertex = []
        for v in self.order:
            t = s.tables[v]
            cols = np.array([self.pos[u] for u in t.neighbors], dtype=np.intp)
            powers = (3 ** np.arange(len(t.neighbors) - 1, -1, -1, dtype=np.int64)
                      if t.neighbors else np.zeros(0, dtype=np.int64))
            first = np.array([c[0] for c in t.cells], dtype=np.int8)
            second = (np.array([c[1] for c in t.cells], dtype=np.int8)
                      if any(len(c) == 2 for c in t.cells) else None)
            self.per_vertex.append((self.pos[v], cols, powers, first, second))

    def admissible_mask(self, colors: np.ndarray) -> np.ndarray:
        h = self.hint
        if h.kind == "minus":
            return colors[:, self.pos[h.u]] != h.color
        if h.kind == "equal":
            return colors[:, self.pos[h.u]] == colors[:, self.pos[h.v]]
        if h.kind == "not_equal":
            return colors[:, self.pos[h.u]] != colors[:, self.pos[h.v]]
        return np.ones(colors.shape[0], dtype=bool)

    def disproving_mask(self, colors: np.ndarray) -> np.ndarray:
        someone_right = np.zeros(colors.shape[0], dtype=bool)
        for vi, cols, powers, first, second in self.per_vertex:
            own = colors[:, vi]
            if cols.size:
                idx = colors[:, cols].astype(np.int64) @ powers
            else:
                idx = np.zeros(colors.shape[0], dtype=np.int64)
            right = first[idx] == own
            if second is not None:
                right |= second[idx] == own
            someone_right |= right
        return ~someone_right

    def placement(self, colors: np.ndarray, row: int) -> dict[str, int]:
        return {v: int(colors[row, i]) for i, v in enumerate(self.order)}


def enumerate_disproving(
    g: Graph,
    s: Strategy,
    hint: Hint = NO_HINT,
    sample_limit: int = 10,
    brute_bound: int = DEFAULT_BRUTE_BOUND,
) -> DisproofReport:
    """Count hint-admissible disproving placements by exhausting all 3**|V|.

    Samples are the first ``sample_limit`` disproving placements in row-major
    order over the sorted vertex list, so output is deterministic.
    """
    n = len(g.vertices)
    if n > brute_bound:
        raise StrategyError(f"{n} vertices exceeds the brute-force bound {brute_bound}")
    validate_strategy(g, s, hint)
    ev = _VectorEvaluator(g, s, hint)
    count = 0
    samples: list[dict[str, int]] = []
    for _, colors in _placement_chunks(n):
        bad = ev.disproving_mask(colors) & ev.admissible_mask(colors)
        count += int(np.count_nonzero(bad))
        if len(samples) < sample_limit:
            for row in np.flatnonzero(bad)[: sample_limit - len(samples)]:
                samples.append(ev.placement(colors, int(row)))
    return DisproofReport(count=count, samples=tuple(samples))


def verify_winning(
    g: Graph,
    s: Strategy,
    hint: Hint = NO_HINT,
    full_count: bool = False,
    brute_bound: int = DEFAULT_BRUTE_BOUND,
) -> tuple[bool, DisproofReport]:
    """Decide whether the strategy wins under the hint.

    With ``full_count=False`` the scan stops at the first refutation and the
    report carries that single sample; otherwise it is a complete count.
    """
    if full_count:
        report = enumerate_disproving(g, s, hint, brute_bound=brute_bound)
        return report.count == 0, report
    n = len(g.vertices)
    if n > brute_bound:
        raise StrategyError(f"{n} vertices exceeds the brute-force bound {brute_bound}")
    validate_strategy(g, s, hint)
    ev = _VectorEvaluator(g, s, hint)
    for _, colors in _placement_chunks(n):
        bad = ev.disproving_mask(colors) & ev.admissible_mask(colors)
        rows = np.flatnonzero(bad)
        if rows.size:
            return False, DisproofReport(count=1, samples=(ev.placement(colors, int(rows[0])),))
    return True, DisproofReport(count=0, samples=())


# --- table surgery -----------------------------------------------------------


def permute_colors(s: Strategy, perm: Sequence[int]) -> Strategy:
    """Relabel colors everywhere by ``perm``; maps disproving placements
    bijectively, so counts are invariant."""
    perm = tuple(perm)
    if sorted(perm) != [0, 1, 2]:
        raise StrategyError(f"not a color permutation: {perm!r}")
    tables = {}
    for v, t in s.tables.items():
        d = len(t.neighbors)
        cells = [None] * len(t.cells)
        for idx, digits in enumerate(itertools.product(COLORS, repeat=d)):
            new_idx = 0
            for b in digits:
                new_idx = new_idx * 3 + perm[b]
            cells[new_idx] = tuple(sorted(perm[c] for c in t.cells[idx]))
        tables[v] = VertexTable(t.neighbors, tuple(cells))
    return Strategy(tables)


def reorder_axes(
    cells: Sequence[tuple[int, ...]],
    old_order: Sequence[str],
    new_order: Sequence[str],
) -> tuple[tuple[int, ...], ...]:
    """Reindex a guess table written for ``old_order`` so lookups with
    neighbors listed in ``new_order`` give the same guesses."""
    old, new = tuple(old_order), tuple(new_order)
    if sorted(old) != sorted(new) or len(set(old)) != len(old):
        raise StrategyError(f"{new!r} is not a permutation of {old!r}")
    d = len(old)
    if len(cells) != 3 ** d:
        raise StrategyError("table length does not match the neighbor count")
    if d == 0:
        return tuple(cells)
    arr = np.empty(len(cells), dtype=object)
    arr[:] = list(cells)
    axes = [old.index(u) for u in new]
    out = arr.reshape((3,) * d).transpose(axes).reshape(-1)
    return tuple(out)


def relabel_table(t: VertexTable, new_neighbors: Sequence[str]) -> VertexTable:
    """Same table semantics with neighbors renamed positionally, then put into
    canonical (sorted) axis order."""
    new_neighbors = tuple(new_neighbors)
    if len(new_neighbors) != len(t.neighbors):
        raise StrategyError("neighbor count mismatch")
    target = tuple(sorted(new_neighbors))
    positional = VertexTable(new_neighbors, t.cells)
    return VertexTable(target, reorder_axes(positional.cells, new_neighbors, target))


# --- exhaustive strategy search ------------------------------------------------


def _space_size(g: Graph) -> int:
    total = 1
    for v in g.vertices:
        total *= 3 ** (3 ** g.degree(v))
    return total


def search_all_strategies(
    g: Graph, hint: Hint = NO_HINT, bound: int = DEFAULT_SEARCH_BOUND
) -> Strategy | None:
    """Try every collective strategy; return the first winning one or None.

    Only feasible for the tiniest graphs; used as the independent oracle for
    the SAT route.
    """
    check_hint(g, hint)
    size = _space_size(g)
    if size > bound:
        raise StrategyError(f"strategy space {size} exceeds bound {bound}")
    doubled = hint.u if hint.kind == "two_guesses" else None
    placements = [
        dict(zip(g.vertices, digits))
        for digits in itertools.product(COLORS, repeat=len(g.vertices))
    ]
    placements = [p for p in placements if admissible(hint, p)]
    per_vertex_options = []
    for v in g.vertices:
        n_cells = 3 ** g.degree(v)
        choices = ((0, 1), (0, 2), (1, 2)) if v == doubled else ((0,), (1,), (2,))
        per_vertex_options.append(
            [tuple(c) for c in itertools.product(choices, repeat=n_cells)]
        )
    for combo in itertools.product(*per_vertex_options):
        s = Strategy(
            {
                v: VertexTable(canonical_neighbors(g, v), cells)
                for v, cells in zip(g.vertices, combo)
            }
        )
        if all(not is_disproving(s, p) for p in placements):
            return s
    return None


# --- file formats ---------------------------------------------------------------


def format_strategy(s: Strategy) -> str:
    """One ``strategy <id> | <neighbors> | <cells>`` line per vertex."""
    lines = []
    for v in sorted(s.tables):
        t = s.tables[v]
        cells = " ".join("".join(str(c) for c in cell) for cell in t.cells)
        lines.append(f"strategy {v} | {' '.join(t.neighbors)} | {cells}")
    return "\n".join(lines) + "\n"


def parse_strategy(text: str, g: Graph | None = None) -> Strategy:
    """Parse the strategy file format; validated against ``g`` when given."""
    tables: dict[str, VertexTable] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip() for p in line.split("|")]
        head = parts[0].split()
        if len(parts) != 3 or len(head) != 2 or head[0] != "strategy":
            raise StrategyError(f"line {lineno}: expected 'strategy <id> | <neighbors> | <cells>'")
        v = head[1]
        if v in tables:
            raise StrategyError(f"line {lineno}: duplicate strategy for {v!r}")
        neighbors = tuple(parts[1].split())
        try:
            cells = tuple(_as_cell([int(ch) for ch in tok]) for tok in parts[2].split())
        except (ValueError, StrategyError):
            raise StrategyError(f"line {lineno}: bad cell tokens") from None
        if len(cells) != 3 ** len(neighbors):
            raise StrategyError(f"line {lineno}: expected {3 ** len(neighbors)} cells")
        tables[v] = VertexTable(neighbors, cells)
    s = Strategy(tables)
    if g is not None:
        for v in tables:
            if v not in g:
                raise StrategyError(f"strategy names unknown vertex {v!r}")
        missing = set(g.vertices) - set(tables)
        if missing:
            raise StrategyError(f"strategy misses vertices {sorted(missing)}")
        for v, t in tables.items():
            if t.neighbors != canonical_neighbors(g, v):
                raise StrategyError(f"vertex {v!r}: neighbors must be in canonical order")
    return s


def format_placement(g: Graph, placement: HatPlacement) -> str:
    return "placement " + "".join(str(placement[v]) for v in g.vertices)


def parse_placement(text: str, g: Graph) -> dict[str, int]:
    """Parse ``placement <digits>`` (or a bare digit string) over the sorted
    vertex list."""
    tokens = text.split()
    if tokens and tokens[0] == "placement":
        tokens = tokens[1:]
    if len(tokens) != 1:
        raise StrategyError("expected 'placement <digits>'")
    digits = tokens[0]
    if len(digits) != len(g.vertices) or any(ch not in "012" for ch in digits):
        raise StrategyError(
            f"placement needs {len(g.vertices)} digits from 0..2, got {digits!r}"
        )
    return {v: int(ch) for v, ch in zip(g.vertices, digits)}
