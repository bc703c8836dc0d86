"""Shared helpers: independent brute-force oracles and instance builders.

Nothing here calls into the solvers under test, so the checks stay
independent of the code paths they verify.
"""

import itertools
import math

import numpy as np
import pytest

from karp_patch.graph import CostModel, DenseDigraph, generate_instance

TOL = 1e-9

_acceptance_lines = []


def record_criterion(number, name, passed, detail=""):
    _acceptance_lines.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {name} {detail}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def random_digraph(n, p, seed):
    """Arbitrary digraph (no degree guarantee) with uniform costs."""
    rng = np.random.default_rng(seed)
    cost = np.where(rng.random((n, n)) < p, rng.random((n, n)), np.inf)
    np.fill_diagonal(cost, np.inf)
    return DenseDigraph(cost)


def enumerate_ap(g):
    """Min over fixed-point-free permutations using present arcs; None if none."""
    c = g.cost
    best = None
    for perm in itertools.permutations(range(g.n)):
        if any(not math.isfinite(c[i, j]) for i, j in enumerate(perm)):
            continue
        total = math.fsum(c[i, j] for i, j in enumerate(perm))
        if best is None or total < best:
            best = total
    return best


def enumerate_prefix_matching(g, rows):
    """Min-cost matching of the given left vertices into all right vertices."""
    c = g.cost
    best = None
    for cols in itertools.permutations(range(g.n), len(rows)):
        if any(not math.isfinite(c[i, j]) for i, j in zip(rows, cols)):
            continue
        total = math.fsum(c[i, j] for i, j in zip(rows, cols))
        if best is None or total < best:
            best = total
    return best


def enumerate_tours(g):
    """Min Hamiltonian cycle cost by listing all tours starting at 0; None if none."""
    c = g.cost
    best = None
    for rest in itertools.permutations(range(1, g.n)):
        order = (0,) + rest
        arcs = [(order[k], order[(k + 1) % g.n]) for k in range(g.n)]
        if any(not math.isfinite(c[a]) for a in arcs):
            continue
        total = math.fsum(c[a] for a in arcs)
        if best is None or total < best:
            best = total
    return best


def enumerate_patches(g, cycles):
    """All (delta, e, f) for arcs e, f on distinct cycles with both replacements present."""
    c = g.cost
    out = []
    cyc_arcs = [[(cy[k], cy[(k + 1) % len(cy)]) for k in range(len(cy))] for cy in cycles]
    for i in range(len(cycles)):
        for j in range(i + 1, len(cycles)):
            for x, y in cyc_arcs[i]:
                for u, v in cyc_arcs[j]:
                    if math.isfinite(c[u, y]) and math.isfinite(c[x, v]):
                        out.append((c[u, y] + c[x, v] - c[x, y] - c[u, v], (x, y), (u, v)))
    return out


@pytest.fixture
def triangle():
    """The 3-vertex complete instance whose optimum is 0 -> 1 -> 2 -> 0 at cost 0.45."""
    arcs = [(0, 1, 0.1), (1, 0, 0.2), (1, 2, 0.05), (2, 1, 0.9), (0, 2, 0.5), (2, 0, 0.3)]
    return DenseDigraph.from_arcs(3, arcs)


@pytest.fixture
def two_cycle():
    return DenseDigraph.from_arcs(2, [(0, 1, 0.3), (1, 0, 0.4)])


def instance(n, alpha, seed, topology="bernoulli_repair"):
    return generate_instance(n, alpha, CostModel("uniform01", seed), topology)
