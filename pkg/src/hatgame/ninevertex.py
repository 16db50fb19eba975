"""Layer tensors, transfer matrices, exact disproof counting, Motzkin paths.

Index conventions, fixed once for every module:

* an edge slot of a vertex tensor is a color pair (alpha, beta) packed as
  ``3*alpha + beta`` where alpha is the owner's color and beta the neighbor's;
* a degree-2 transfer matrix has its row slot transposed: rows are indexed by
  the pair read toward the owner (incoming neighbor's color first), columns by
  the pair read away from it, so chain products compose left to right.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graphs import Graph, canonical_neighbors
from .strategies import Strategy, NO_HINT, validate_strategy

# Exact arithmetic: int64 is provably safe while counts stay below 3**39;
# larger instances switch to Python integers rather than ever wrapping.
_INT64_SAFE_VERTICES = 39


class CountingError(ValueError):
    """Unsupported input for the tensor-counting route."""


@dataclass(frozen=True)
class AdjacencyTensor:
    """0/1 survival tensor of one vertex.

    ``array`` has one 9-valued axis per incident edge, listed in canonical
    neighbor order; entry 1 means the color assignment survives as a
    hyperedge (owner colors agree and the owner's guess is wrong).
    """

    owner: str
    neighbors: tuple[str, ...]
    array: np.ndarray


def _singleton_guess_table(g: Graph, s: Strategy, u: str) -> list[int]:
    t = s.tables[u]
    if any(len(cell) != 1 for cell in t.cells):
        raise CountingError(
            f"vertex {u!r} has multi-guess cells; tensor counting needs single guesses"
        )
    return [cell[0] for cell in t.cells]


def adjacency_tensor(g: Graph, s: Strategy, u: str) -> AdjacencyTensor:
    """Tensor entry (over pairs (alpha, beta_i) per edge) is 1 iff all alphas
    coincide and the owner's guess on (beta_1..beta_k) differs from alpha."""
    validate_strategy(g, s)
    guesses = _singleton_guess_table(g, s, u)
    nbrs = canonical_neighbors(g, u)
    k = len(nbrs)
    arr = np.zeros((9,) * k, dtype=np.int64)
    if k == 0:
        # no incident edges: the scalar counts the owner's surviving colors
        return AdjacencyTensor(u, nbrs, np.array(2, dtype=np.int64))
    for alpha in range(3):
        for bidx in range(3 ** k):
            betas = [(bidx // 3 ** (k - 1 - i)) % 3 for i in range(k)]
            if guesses[bidx] != alpha:
                arr[tuple(3 * alpha + b for b in betas)] = 1
    return AdjacencyTensor(u, nbrs, arr)


def transfer_matrix(g: Graph, s: Strategy, u: str, incoming: str | None = None) -> np.ndarray:
    """9x9 layer-to-layer matrix of a degree-2 vertex.

    Rows are pairs on the ``incoming`` edge read toward ``u`` (incoming color
    first), columns pairs on the other edge read away from ``u``. The first
    canonical neighbor is incoming unless stated otherwise.
    """
    nbrs = canonical_neighbors(g, u)
    if len(nbrs) != 2:
        raise CountingError(f"vertex {u!r} has degree {len(nbrs)}, need 2")
    if incoming is None:
        incoming = nbrs[0]
    if incoming not in nbrs:
        raise CountingError(f"{incoming!r} is not a neighbor of {u!r}")
    tensor = adjacency_tensor(g, s, u).array
    if incoming == nbrs[1]:
        tensor = tensor.T
    # tensor axes: (incoming pair (alpha,beta_in), outgoing pair (alpha,beta_out));
    # transpose the incoming pair so rows read (beta_in, alpha)
    out = np.zeros((9, 9), dtype=np.int64)
    for a in range(3):
        for b_in in range(3):
            for b_out in range(3):
                out[3 * b_in + a, 3 * a + b_out] = tensor[3 * a + b_in, 3 * a + b_out]
    return out


def _exact_product(mats: Sequence[np.ndarray]) -> np.ndarray:
    acc = np.array(mats[0], dtype=object)
    for m in mats[1:]:
        acc = acc @ np.array(m, dtype=object)
    return acc


def _demote(arr: np.ndarray) -> np.ndarray:
    flat = [int(x) for x in np.ravel(arr)]
    if all(-(2 ** 62) < x < 2 ** 62 for x in flat):
        return np.array(flat, dtype=np.int64).reshape(arr.shape)
    return arr


def matrix_power_chain(mats: Sequence[np.ndarray]) -> np.ndarray:
    """Exact integer product of transfer matrices; entry (row, col) counts
    disproving chains through the chain's inner vertices."""
    if not len(mats):
        raise CountingError("empty matrix chain")
    return _demote(_exact_product(mats))


def cycle_chain_count(mats: Sequence[np.ndarray]) -> int:
    """Number of cyclic disproving chains: trace of the full chain product."""
    prod = _exact_product(mats)
    return int(np.trace(prod))


def contract_full(g: Graph, s: Strategy) -> int:
    """Disproof count as the full contraction of all vertex tensors.

    Every edge carries one 9-valued repeated index; factors are merged
    greedily, always contracting the pair whose result tensor is smallest.
    Arithmetic is exact (int64 with a proven bound, Python ints beyond it).
    """
    validate_strategy(g, s)
    dtype = np.int64 if len(g.vertices) <= _INT64_SAFE_VERTICES else object
    factors: list[tuple[tuple, np.ndarray]] = []
    for u in g.vertices:
        t = adjacency_tensor(g, s, u)
        axes = []
        arr = t.array.astype(dtype)
        for i, v in enumerate(t.neighbors):
            edge = (u, v) if u < v else (v, u)
            axes.append(edge)
            if u != edge[0]:
                # global edge index stores (smaller endpoint, larger endpoint):
                # swap this axis from (alpha_u, beta_v) to that convention
                arr = _transpose_pair_axis(arr, i)
        factors.append((tuple(axes), arr))
    # contract shared axes pairwise until only scalars remain
    while True:
        best = None
        for i in range(len(factors)):
            for j in range(i + 1, len(factors)):
                shared = set(factors[i][0]) & set(factors[j][0])
                if not shared:
                    continue
                out_rank = len(factors[i][0]) + len(factors[j][0]) - 2 * len(shared)
                if best is None or out_rank < best[0]:
                    best = (out_rank, i, j, shared)
        if best is None:
            break
        _, i, j, shared = best
        axes_i, arr_i = factors[i]
        axes_j, arr_j = factors[j]
        idx_i = [axes_i.index(e) for e in sorted(shared)]
        idx_j = [axes_j.index(e) for e in sorted(shared)]
        merged = np.tensordot(arr_i, arr_j, axes=(idx_i, idx_j))
        keep_i = [e for e in axes_i if e not in shared]
        keep_j = [e for e in axes_j if e not in shared]
        factors = (
            [factors[k] for k in range(len(factors)) if k not in (i, j)]
            + [(tuple(keep_i + keep_j), merged)]
        )
    total = 1
    for axes, arr in factors:
        if axes:
            raise CountingError("internal error: dangling edge index")
        total *= int(arr)
    return total


def _transpose_pair_axis(arr: np.ndarray, axis: int) -> np.ndarray:
    """Swap (alpha, beta) -> (beta, alpha) on one 9-valued axis."""
    perm = [3 * b + a for a in range(3) for b in range(3)]
    return np.take(arr, perm, axis=axis)


# --- Motzkin paths -----------------------------------------------------------

UP, FLAT, DOWN = "up", "flat", "down"


def motzkin_encode(colors: Sequence[int]) -> tuple[str, ...]:
    """Steps between consecutive colors: flat on equal, up on +1 mod 3,
    down on -1 mod 3. A single color yields no steps."""
    if not len(colors):
        raise CountingError("need at least one color")
    steps = []
    for a, b in zip(colors, colors[1:]):
        if a not in (0, 1, 2) or b not in (0, 1, 2):
            raise CountingError(f"bad color in {list(colors)!r}")
        if b == a:
            steps.append(FLAT)
        elif b == (a + 1) % 3:
            steps.append(UP)
        else:
            steps.append(DOWN)
    return tuple(steps)


def motzkin_decode(start: int, steps: Sequence[str]) -> tuple[int, ...]:
    """Inverse of motzkin_encode given the starting color."""
    if start not in (0, 1, 2):
        raise CountingError(f"bad start color {start!r}")
    colors = [start]
    for step in steps:
        if step == FLAT:
            colors.append(colors[-1])
        elif step == UP:
            colors.append((colors[-1] + 1) % 3)
        elif step == DOWN:
            colors.append((colors[-1] - 1) % 3)
        else:
            raise CountingError(f"bad step {step!r}")
    return tuple(colors)


def motzkin_render(colors: Sequence[int]) -> str:
    """ASCII lattice path; row labels show the height mod 3 (the color)."""
    steps = motzkin_encode(colors)
    heights = [int(colors[0])]
    for step in steps:
        heights.append(heights[-1] + {UP: 1, FLAT: 0, DOWN: -1}[step])
    top = max(heights)
    bottom = min(heights)
    width = max(1, len(steps))
    grid = [[" "] * width for _ in range(top - bottom + 1)]

    def put(h: int, x: int, ch: str) -> None:
        grid[top - h][x] = ch

    for x, step in enumerate(steps):
        if step == UP:
            put(heights[x] + 1, x, "/")
        elif step == DOWN:
            put(heights[x], x, "\\")
        else:
            put(heights[x], x, "_")
    if not steps:
        put(heights[0], 0, "*")
    lines = []
    for row, h in enumerate(range(top, bottom - 1, -1)):
        lines.append(f"{h % 3} |" + "".join(grid[row]))
    return "\n".join(lines)
