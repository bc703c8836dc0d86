"""Minimum-cost assignment by successive shortest augmenting paths.

Left vertices ``a_i`` (arc tails) are inserted one at a time.  Each insertion
runs a Dijkstra search over reduced costs from the new left vertex and stops
at the first unmatched right vertex it settles, so after ``r`` insertions the
matching is a minimum-cost matching of ``{a_1..a_r}`` into the right side.
Every augmentation is recorded in an :class:`AugmentStep`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Infeasible
from .graph import DenseDigraph


@dataclass(frozen=True)
class Matching:
    phi: tuple[int, ...]
    cost: float

    @property
    def n(self) -> int:
        return len(self.phi)


@dataclass(frozen=True)
class AugmentStep:
    left: int  # the vertex inserted at this step
    terminal_left: int  # last left vertex on the path (the one joined to a free right vertex)
    terminal_right: int
    delta: int  # neighbours of terminal_left among right vertices free before this step
    closed_cycle: bool
    path_len: int  # arcs on the alternating path; always odd
    added_max_cost: float
    cost_after: float  # cost of the matching after this step


@dataclass(frozen=True)
class SolveReport:
    matching: Matching
    trace: tuple[AugmentStep, ...]
    max_matched_cost: float
    sum_inv_delta: float

    @property
    def deltas(self) -> list[int]:
        return [s.delta for s in self.trace]

    @property
    def prefix_costs(self) -> list[float]:
        return [s.cost_after for s in self.trace]


def count_cycles(succ: np.ndarray) -> int:
    """Cycles in a partial functional graph ``i -> succ[i]`` (``-1`` = no arc).

    In-degrees are at most one, so every component is a path or a cycle.
    """
    succ = [int(x) for x in succ]
    n = len(succ)
    seen = [False] * n
    cycles = 0
    for start in range(n):
        if seen[start]:
            continue
        v = start
        while v >= 0 and not seen[v]:
            seen[v] = True
            v = succ[v]
        # a walk that runs into its own start closes a cycle; anything else hit a path end
        if v == start:
            cycles += 1
    return cycles


@dataclass
class _State:
    n: int
    col4row: np.ndarray = field(init=False)
    row4col: np.ndarray = field(init=False)
    u: np.ndarray = field(init=False)
    v: np.ndarray = field(init=False)

    def __post_init__(self):
        self.col4row = np.full(self.n, -1, dtype=np.int64)
        self.row4col = np.full(self.n, -1, dtype=np.int64)
        self.u = np.zeros(self.n)
        self.v = np.zeros(self.n)


def _augment(cost: np.ndarray, adj: np.ndarray, st: _State, r: int) -> tuple[int, np.ndarray, np.ndarray]:
    """Shortest augmenting path from left vertex ``r``.

    Returns ``(sink, pred, scanned_rows)``.  Potentials are updated in place so
    that reduced costs stay non-negative on every arc; matching is not yet
    changed.  ``pred[j]`` is the left vertex from which right vertex ``j`` was
    reached.
    """
    n = st.n
    shortest = np.full(n, np.inf)
    pred = np.full(n, -1, dtype=np.int64)
    col_done = np.zeros(n, dtype=bool)
    rows_scanned = [r]
    free = st.row4col < 0

    i, minval, sink = r, 0.0, -1
    while sink < 0:
        row_adj = adj[i] & ~col_done
        # absent arcs are masked out before any arithmetic touches them
        cand = np.full(n, np.inf)
        cand[row_adj] = minval + cost[i, row_adj] - st.u[i] - st.v[row_adj]
        better = cand < shortest
        shortest[better] = cand[better]
        pred[better] = i

        open_dist = np.where(col_done, np.inf, shortest)
        minval = open_dist.min()
        if minval == np.inf:
            raise Infeasible(f"left vertex {r} cannot be matched: no augmenting path")
        ties = np.flatnonzero(open_dist == minval)
        free_ties = ties[free[ties]]
        j = int(free_ties[0]) if len(free_ties) else int(ties[0])
        col_done[j] = True
        if free[j]:
            sink = j
        else:
            i = int(st.row4col[j])
            rows_scanned.append(i)

    rows = np.array(rows_scanned, dtype=np.int64)
    st.u[r] += minval
    others = rows[1:]
    st.u[others] += minval - shortest[st.col4row[others]]
    st.v[col_done] -= minval - shortest[col_done]
    return sink, pred, rows


def solve_assignment(g: DenseDigraph, order=None, observer=None) -> SolveReport:
    """Solve AP on ``g``, recording one :class:`AugmentStep` per inserted vertex.

    ``order`` is the insertion order of left vertices (natural order by
    default).  If given, ``observer(step, match)`` is called after every
    augmentation with the partial matching as a tuple (``-1`` = unmatched).
    Raises :class:`Infeasible` if no perfect matching exists.
    """
    n = g.n
    cost, adj = g.cost, g.adjacency
    order = list(range(n)) if order is None else [int(x) for x in order]
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of the vertices")

    st = _State(n)
    trace: list[AugmentStep] = []
    total = 0.0
    cycles_before = 0
    for r in order:
        free_before = st.row4col < 0
        sink, pred, _ = _augment(cost, adj, st, r)
        terminal_left = int(pred[sink])
        delta = int((adj[terminal_left] & free_before).sum())

        # walk back from the sink, swapping matched/unmatched edges
        added, removed = [], []
        j = sink
        while True:
            i = int(pred[j])
            added.append((i, j))
            prev = int(st.col4row[i])
            if prev >= 0:
                removed.append((i, prev))
            st.row4col[j] = i
            st.col4row[i] = j
            if i == r:
                break
            j = prev

        total += math.fsum(cost[e] for e in added) - math.fsum(cost[e] for e in removed)
        cycles_after = count_cycles(st.col4row)
        trace.append(
            AugmentStep(
                left=r,
                terminal_left=terminal_left,
                terminal_right=sink,
                delta=delta,
                closed_cycle=cycles_after > cycles_before,
                path_len=len(added) + len(removed),
                added_max_cost=max(float(cost[e]) for e in added),
                cost_after=total,
            )
        )
        cycles_before = cycles_after
        if observer is not None:
            observer(trace[-1], tuple(int(x) for x in st.col4row))

    phi = tuple(int(x) for x in st.col4row)
    matched = cost[np.arange(n), st.col4row]
    matching = Matching(phi=phi, cost=math.fsum(matched))
    return SolveReport(
        matching=matching,
        trace=tuple(trace),
        max_matched_cost=float(matched.max()) if n else 0.0,
        sum_inv_delta=math.fsum(1.0 / s.delta for s in trace),
    )


def solve_assignment_pruned(g: DenseDigraph, cutoff: float, order=None, observer=None) -> SolveReport:
    """Solve AP using only arcs of cost at most ``cutoff``.

    The result is reported against the original instance; it raises
    :class:`Infeasible` when the pruned graph has no perfect matching, and the
    caller is expected to fall back to :func:`solve_assignment`.
    """
    if math.isnan(cutoff):
        raise ValueError("cutoff must not be NaN")
    if cutoff == math.inf:
        return solve_assignment(g, order, observer)
    pruned = np.where(g.cost <= cutoff, g.cost, np.inf)
    return solve_assignment(DenseDigraph(pruned), order, observer)


def matching_to_permutation(m: Matching) -> list[int]:
    return list(m.phi)
