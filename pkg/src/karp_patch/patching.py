"""Cycle covers and Karp's patching loop.

Cycles are stored as vertex tuples rotated so the smallest vertex comes
first, and a cover lists its cycles sorted by that first vertex.  The index
of a cycle in this canonical order is what the tie-breaking rule of
:func:`find_cheapest_patch` refers to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidMove, InvalidTour, MissingArc, NoPatchAvailable, Stuck
from .graph import DenseDigraph

Arc = tuple[int, int]


def _canonical(cycle) -> tuple[int, ...]:
    cycle = [int(v) for v in cycle]
    k = cycle.index(min(cycle))
    return tuple(cycle[k:] + cycle[:k])


@dataclass(frozen=True)
class CycleCover:
    cycles: tuple[tuple[int, ...], ...]
    cost: float

    def __post_init__(self):
        cycles = tuple(sorted((_canonical(c) for c in self.cycles), key=lambda c: c[0]))
        object.__setattr__(self, "cycles", cycles)

    @property
    def n(self) -> int:
        return sum(len(c) for c in self.cycles)

    def __len__(self):
        return len(self.cycles)

    def arcs(self) -> list[Arc]:
        return [(c[k], c[(k + 1) % len(c)]) for c in self.cycles for k in range(len(c))]

    def successor(self) -> list[int]:
        succ = [0] * self.n
        for x, y in self.arcs():
            succ[x] = y
        return succ


@dataclass(frozen=True)
class PatchMove:
    e: Arc
    f: Arc
    delta: float

    @property
    def e_new(self) -> Arc:
        return (self.f[0], self.e[1])

    @property
    def f_new(self) -> Arc:
        return (self.e[0], self.f[1])

    def to_dict(self, cycles_after: int | None = None) -> dict:
        d = {
            "e": list(self.e),
            "f": list(self.f),
            "e_new": list(self.e_new),
            "f_new": list(self.f_new),
            "delta": self.delta,
        }
        if cycles_after is not None:
            d["cycles_after"] = cycles_after
        return d


@dataclass(frozen=True)
class Tour:
    order: tuple[int, ...]
    cost: float


@dataclass
class PatchTrace:
    moves: list[PatchMove] = field(default_factory=list)
    cycles_after: list[int] = field(default_factory=list)

    def __len__(self):
        return len(self.moves)

    @property
    def deltas(self) -> list[float]:
        return [m.delta for m in self.moves]

    def to_json(self) -> list[dict]:
        return [m.to_dict(c) for m, c in zip(self.moves, self.cycles_after)]


def permutation_to_cover(g: DenseDigraph, phi) -> CycleCover:
    """Split a fixed-point-free permutation into its orbits."""
    phi = [int(x) for x in phi]
    n = len(phi)
    if n != g.n or sorted(phi) != list(range(n)):
        raise ValueError("phi must be a permutation of the instance's vertices")
    for i, j in enumerate(phi):
        if not g.has_arc(i, j):
            raise MissingArc(f"arc ({i}, {j}) is not in the instance")
    seen = [False] * n
    cycles = []
    for start in range(n):
        if seen[start]:
            continue
        cyc, v = [], start
        while not seen[v]:
            seen[v] = True
            cyc.append(v)
            v = phi[v]
        cycles.append(tuple(cyc))
    cost = math.fsum(g.arc_cost(i, phi[i]) for i in range(n))
    return CycleCover(tuple(cycles), cost)


def _cover_arrays(g: DenseDigraph, cover: CycleCover):
    arcs = cover.arcs()
    tails = np.array([a[0] for a in arcs], dtype=np.int64)
    heads = np.array([a[1] for a in arcs], dtype=np.int64)
    cid = np.repeat(np.arange(len(cover.cycles)), [len(c) for c in cover.cycles])
    pos = np.concatenate([np.arange(len(c)) for c in cover.cycles])
    return tails, heads, cid, pos


def _pair_deltas(g: DenseDigraph, cover: CycleCover):
    """Delta matrix over cover arcs ``(a, b)`` with ``cid[a] < cid[b]``; ``inf`` elsewhere.

    Entry ``[a, b]`` is the cost change of patching with ``e = arc a`` and
    ``f = arc b``: ``C(tail_b, head_a) + C(tail_a, head_b) - C(a) - C(b)``.
    """
    tails, heads, cid, pos = _cover_arrays(g, cover)
    cross = g.cost[np.ix_(tails, heads)]  # cross[a, b] = C(tail_a, head_b)
    w = g.cost[tails, heads]
    valid = np.isfinite(cross) & np.isfinite(cross.T) & (cid[:, None] < cid[None, :])
    deltas = np.full(cross.shape, np.inf)
    deltas[valid] = (cross.T + cross)[valid] - (w[:, None] + w[None, :])[valid]
    return deltas, valid, tails, heads, cid, pos


def count_patching_pairs(g: DenseDigraph, cover: CycleCover) -> int:
    """Unordered pairs of arcs on distinct cycles whose two replacement arcs both exist."""
    if len(cover.cycles) < 2:
        return 0
    _, valid, *_ = _pair_deltas(g, cover)
    return int(valid.sum())


def find_cheapest_patch(g: DenseDigraph, cover: CycleCover) -> PatchMove:
    """The patching pair with the smallest cost change over the whole cover.

    Exact ties go to the lexicographically smallest
    ``(cycle of e, cycle of f, position of e, position of f)``.
    """
    if len(cover.cycles) < 2:
        raise ValueError("cover must have at least two cycles")
    deltas, valid, tails, heads, cid, pos = _pair_deltas(g, cover)
    if not valid.any():
        raise NoPatchAvailable(f"no patching pair among {len(cover.cycles)} cycles")
    best = deltas[valid].min()
    a_idx, b_idx = np.nonzero(valid & (deltas == best))
    # lexsort sorts by the last key first
    k = np.lexsort((pos[b_idx], pos[a_idx], cid[b_idx], cid[a_idx]))[0]
    a, b = a_idx[k], b_idx[k]
    return PatchMove(
        e=(int(tails[a]), int(heads[a])),
        f=(int(tails[b]), int(heads[b])),
        delta=float(best),
    )


def apply_patch(cover: CycleCover, move: PatchMove) -> CycleCover:
    """Merge the two cycles carrying ``move.e`` and ``move.f`` into one."""
    (x, y), (u, v) = move.e, move.f
    where = {}
    for idx, c in enumerate(cover.cycles):
        for k, w in enumerate(c):
            where[w] = (idx, k)
    try:
        ci, kx = where[x]
        cj, ku = where[u]
    except KeyError as exc:
        raise InvalidMove(f"vertex {exc.args[0]} is not covered") from None
    c1, c2 = cover.cycles[ci], cover.cycles[cj]
    if c1[(kx + 1) % len(c1)] != y or c2[(ku + 1) % len(c2)] != v:
        raise InvalidMove(f"{move.e} or {move.f} is not an arc of the cover")
    if ci == cj:
        raise InvalidMove(f"{move.e} and {move.f} lie on the same cycle")

    # c1 read from y round to x, then c2 from v round to u: closing arcs are (x, v) and (u, y)
    ky, kv = (kx + 1) % len(c1), (ku + 1) % len(c2)
    merged = c1[ky:] + c1[:ky] + c2[kv:] + c2[:kv]
    rest = [c for idx, c in enumerate(cover.cycles) if idx not in (ci, cj)]
    return CycleCover(tuple(rest) + (merged,), cover.cost + move.delta)


def patch_to_tour(g: DenseDigraph, cover: CycleCover) -> tuple[Tour, PatchTrace]:
    """Apply cheapest patches until one cycle is left.

    Raises :class:`Stuck` (carrying the partial cover and trace) if the
    instance runs out of patching pairs first.
    """
    trace = PatchTrace()
    while len(cover.cycles) > 1:
        try:
            move = find_cheapest_patch(g, cover)
        except NoPatchAvailable:
            raise Stuck(cover, trace) from None
        cover = apply_patch(cover, move)
        trace.moves.append(move)
        trace.cycles_after.append(len(cover.cycles))
    return Tour(cover.cycles[0], cover.cost), trace


def verify_tour(g: DenseDigraph, t: Tour) -> float:
    """Recompute a tour's cost from the instance, checking it is Hamiltonian."""
    order = [int(v) for v in t.order]
    if len(order) != g.n:
        raise InvalidTour(f"tour visits {len(order)} vertices, instance has {g.n}")
    seen = set()
    for v in order:
        if not 0 <= v < g.n:
            raise InvalidTour(f"vertex {v} out of range")
        if v in seen:
            raise InvalidTour(f"duplicate vertex {v}")
        seen.add(v)
    costs = []
    for k, x in enumerate(order):
        y = order[(k + 1) % len(order)]
        if not g.has_arc(x, y):
            raise InvalidTour(f"missing arc ({x}, {y})")
        costs.append(g.arc_cost(x, y))
    return math.fsum(costs)
