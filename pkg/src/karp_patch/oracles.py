"""Exact solvers for small instances, used as ground truth in tests and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import TooLarge
from .graph import DenseDigraph

BRUTE_FORCE_MAX_N = 10
HELD_KARP_MAX_N = 18


@dataclass(frozen=True)
class ExactResult:
    value: float | None  # None when infeasible
    witness: tuple[int, ...] | None

    @property
    def feasible(self) -> bool:
        return self.value is not None


INFEASIBLE = ExactResult(None, None)


def brute_force_ap(g: DenseDigraph) -> ExactResult:
    """Enumerate every fixed-point-free permutation that uses only present arcs."""
    n = g.n
    if n > BRUTE_FORCE_MAX_N:
        raise TooLarge(f"brute force AP is limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    cost = g.cost.tolist()
    succ = [[j for j in range(n) if math.isfinite(cost[i][j])] for i in range(n)]
    used = [False] * n
    perm = [0] * n
    best_value, best_perm = math.inf, None

    def extend(i: int) -> None:
        nonlocal best_value, best_perm
        if i == n:
            total = math.fsum(cost[k][perm[k]] for k in range(n))
            if total < best_value:
                best_value, best_perm = total, tuple(perm)
            return
        for j in succ[i]:
            if not used[j]:
                used[j] = True
                perm[i] = j
                extend(i + 1)
                used[j] = False

    extend(0)
    if best_perm is None:
        return INFEASIBLE
    return ExactResult(best_value, best_perm)


def held_karp_atsp(g: DenseDigraph) -> ExactResult:
    """Minimum-cost directed Hamiltonian cycle by DP over vertex subsets.

    Tours are anchored at vertex 0.  ``best[mask, j]`` is the cheapest path
    leaving 0, visiting exactly the vertices of ``mask`` (bits for 1..n-1)
    and ending at ``j``.
    """
    n = g.n
    if n > HELD_KARP_MAX_N:
        raise TooLarge(f"Held-Karp is limited to n <= {HELD_KARP_MAX_N}, got {n}")
    if n < 2:
        return INFEASIBLE
    c = g.cost
    m = n - 1  # vertices 1..n-1 map to bits 0..m-1
    full = (1 << m) - 1
    best = np.full((1 << m, m), np.inf)
    parent = np.full((1 << m, m), -1, dtype=np.int64)
    for j in range(m):
        best[1 << j, j] = c[0, j + 1]
    sub = c[1:, 1:]
    for mask in range(1, full + 1):
        row = best[mask]
        if not np.isfinite(row).any():
            continue
        # extend every path ending at k in mask by an arc k -> j with j outside mask
        via = row[:, None] + sub  # via[k, j]
        k_best = via.argmin(axis=0)
        vals = via[k_best, np.arange(m)]
        for j in range(m):
            bit = 1 << j
            if mask & bit or not vals[j] < best[mask | bit, j]:
                continue
            best[mask | bit, j] = vals[j]
            parent[mask | bit, j] = k_best[j]

    closing = best[full] + c[1:, 0]
    last = int(np.argmin(closing))
    if not np.isfinite(closing[last]):
        return INFEASIBLE
    path, mask, j = [], full, last
    while j >= 0:
        path.append(j + 1)
        prev = int(parent[mask, j])
        mask ^= 1 << j
        j = prev
    order = (0,) + tuple(reversed(path))
    value = math.fsum(c[order[k], order[(k + 1) % n]] for k in range(n))
    return ExactResult(value, order)
