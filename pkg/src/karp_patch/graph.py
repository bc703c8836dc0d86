"""Dense digraphs with i.i.d. random arc costs.

A :class:`DenseDigraph` keeps its costs in an ``n x n`` float64 matrix where
``inf`` marks an absent arc (the diagonal is always absent).  The matrix is
made read-only at construction, so instances can be shared freely.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import DegreeInfeasible, ParseError, SchemaError

#: Extra arc probability used by the ``bernoulli_repair`` generator.
BERNOULLI_MARGIN = 0.05


class CostKind(str, enum.Enum):
    UNIFORM01 = "uniform01"
    EXPONENTIAL1 = "exponential1"


class Topology(str, enum.Enum):
    COMPLETE = "complete"
    BERNOULLI_REPAIR = "bernoulli_repair"
    UNION_PERMUTATIONS = "union_permutations"
    # Hall-violating member of D(alpha) for alpha < 1/2; its AP is never feasible.
    HALL_DEFICIENT = "hall_deficient"


@dataclass(frozen=True)
class CostModel:
    kind: CostKind = CostKind.UNIFORM01
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", CostKind(self.kind))
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.kind is CostKind.UNIFORM01:
            return rng.random(size)
        return rng.exponential(1.0, size)


class DenseDigraph:
    """Simple digraph on vertices ``0..n-1`` with finite non-negative arc costs."""

    __slots__ = ("_cost", "_adj", "alpha_declared")

    def __init__(self, cost: np.ndarray, alpha_declared: float | None = None):
        cost = np.array(cost, dtype=np.float64)
        if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
            raise SchemaError(f"cost matrix must be square, got shape {cost.shape}")
        if np.isnan(cost).any():
            raise SchemaError("cost matrix contains NaN")
        if (cost < 0).any():
            raise SchemaError("negative arc cost")
        if np.isfinite(np.diag(cost)).any():
            raise SchemaError("self-arcs are not allowed")
        cost.setflags(write=False)
        adj = np.isfinite(cost)
        adj.setflags(write=False)
        self._cost = cost
        self._adj = adj
        self.alpha_declared = None if alpha_declared is None else float(alpha_declared)
        if self.alpha_declared is not None and not validate_membership(self, self.alpha_declared):
            raise SchemaError(f"degree bound for alpha={self.alpha_declared} is not met")

    @classmethod
    def from_arcs(cls, n: int, arcs, alpha_declared: float | None = None) -> "DenseDigraph":
        """Build from an iterable of ``(i, j, cost)`` triples."""
        cost = np.full((n, n), np.inf)
        for i, j, c in arcs:
            if i == j:
                raise SchemaError(f"self-arc ({i}, {j})")
            if math.isfinite(cost[i, j]):
                raise SchemaError(f"duplicate arc ({i}, {j})")
            if not (c >= 0 and math.isfinite(c)):
                raise SchemaError(f"arc ({i}, {j}) has invalid cost {c!r}")
            cost[i, j] = c
        return cls(cost, alpha_declared)

    @property
    def n(self) -> int:
        return self._cost.shape[0]

    @property
    def cost(self) -> np.ndarray:
        """Read-only cost matrix; ``inf`` where the arc is absent."""
        return self._cost

    @property
    def adjacency(self) -> np.ndarray:
        return self._adj

    def has_arc(self, i: int, j: int) -> bool:
        return bool(self._adj[i, j])

    def arc_cost(self, i: int, j: int) -> float:
        return float(self._cost[i, j])

    def arcs(self) -> Iterator[tuple[int, int, float]]:
        """Arcs in row-major order."""
        for i, j in zip(*np.nonzero(self._adj)):
            yield int(i), int(j), float(self._cost[i, j])

    @property
    def num_arcs(self) -> int:
        return int(self._adj.sum())

    def out_degrees(self) -> np.ndarray:
        return self._adj.sum(axis=1)

    def in_degrees(self) -> np.ndarray:
        return self._adj.sum(axis=0)

    def __eq__(self, other):
        if not isinstance(other, DenseDigraph):
            return NotImplemented
        return (
            self.alpha_declared == other.alpha_declared
            and self._cost.shape == other._cost.shape
            and np.array_equal(self._cost, other._cost)
        )

    def __hash__(self):
        return hash((self.n, self._cost.tobytes(), self.alpha_declared))

    def __repr__(self):
        return f"DenseDigraph(n={self.n}, arcs={self.num_arcs}, alpha={self.alpha_declared})"


def degree_bound(n: int, alpha: float) -> int:
    """Required in/out-degree: ``ceil(alpha * n)``, except that ``alpha == 1``
    denotes the complete digraph and asks for ``n - 1``.
    """
    if alpha >= 1:
        return n - 1
    # guard against 0.6 * 1000 = 600.0000000000001 rounding up to 601
    return math.ceil(round(alpha * n, 9))


def validate_membership(g: DenseDigraph, alpha: float) -> bool:
    k = degree_bound(g.n, alpha)
    adj = g.adjacency
    if adj.diagonal().any():
        return False
    return bool(adj.sum(axis=1).min(initial=k) >= k and adj.sum(axis=0).min(initial=k) >= k)


def _top_up_out(adj: np.ndarray, k: int, rng: np.random.Generator) -> None:
    n = adj.shape[0]
    for i in range(n):
        short = k - int(adj[i].sum())
        if short > 0:
            missing = np.flatnonzero(~adj[i] & (np.arange(n) != i))
            adj[i, rng.choice(missing, size=short, replace=False)] = True


def _top_up_in(adj: np.ndarray, k: int, rng: np.random.Generator) -> None:
    n = adj.shape[0]
    for j in range(n):
        short = k - int(adj[:, j].sum())
        if short > 0:
            missing = np.flatnonzero(~adj[:, j] & (np.arange(n) != j))
            adj[rng.choice(missing, size=short, replace=False), j] = True


def _hall_deficient(n: int, k: int, rng: np.random.Generator) -> np.ndarray:
    # k+1 vertices S whose out-arcs all land in a disjoint k-set T: |N(S)| < |S|.
    if 2 * k + 1 > n:
        raise DegreeInfeasible(
            f"hall_deficient needs 2*ceil(alpha*n)+1 <= n, got k={k}, n={n}"
        )
    perm = rng.permutation(n)
    s, t = perm[: k + 1], perm[k + 1 : 2 * k + 1]
    adj = ~np.eye(n, dtype=bool)
    adj[s] = False
    adj[np.ix_(s, t)] = True
    return adj


def generate_instance(
    n: int,
    alpha: float,
    cost_model: CostModel | None = None,
    topology: Topology | str = Topology.COMPLETE,
) -> DenseDigraph:
    """Sample a member of D(alpha) and attach i.i.d. costs to its arcs.

    The result is a pure function of the arguments (including the cost
    model's seed).  Raises :class:`DegreeInfeasible` when
    :func:`degree_bound` exceeds ``n - 1``.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    cost_model = cost_model or CostModel()
    topology = Topology(topology)
    k = degree_bound(n, alpha)
    if k > n - 1:
        raise DegreeInfeasible(f"degree bound {k} for alpha={alpha} exceeds n-1 = {n - 1}")

    rng = np.random.default_rng(cost_model.seed)
    off_diag = ~np.eye(n, dtype=bool)
    if topology is Topology.COMPLETE:
        adj = off_diag
    elif topology is Topology.BERNOULLI_REPAIR:
        p = min(1.0, alpha + BERNOULLI_MARGIN)
        adj = (rng.random((n, n)) < p) & off_diag
        _top_up_out(adj, k, rng)
        _top_up_in(adj, k, rng)
    elif topology is Topology.UNION_PERMUTATIONS:
        adj = np.zeros((n, n), dtype=bool)
        for i in range(n):
            others = np.delete(np.arange(n), i)
            adj[i, rng.choice(others, size=k, replace=False)] = True
        _top_up_in(adj, k, rng)
    else:
        adj = _hall_deficient(n, k, rng)

    cost = np.full((n, n), np.inf)
    cost[adj] = cost_model.draw(rng, int(adj.sum()))
    return DenseDigraph(cost, alpha_declared=alpha)


def save_instance(g: DenseDigraph) -> bytes:
    """Serialize to the JSON instance schema.  Float ``repr`` keeps costs bit-exact."""
    arcs = [[i, j, c] for i, j, c in g.arcs()]
    return json.dumps({"n": g.n, "alpha": g.alpha_declared, "arcs": arcs}).encode()


def load_instance(data: bytes | str) -> DenseDigraph:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        obj = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc

    if not isinstance(obj, dict):
        raise ParseError("top level must be an object")
    for key in ("n", "arcs"):
        if key not in obj:
            raise ParseError(f"missing field {key!r}")
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ParseError(f"field 'n' must be a positive integer, got {n!r}")
    alpha = obj.get("alpha")
    if alpha is not None and (isinstance(alpha, bool) or not isinstance(alpha, (int, float))):
        raise ParseError(f"field 'alpha' must be a number or null, got {alpha!r}")
    if not isinstance(obj["arcs"], list):
        raise ParseError("field 'arcs' must be a list")

    triples = []
    for idx, arc in enumerate(obj["arcs"]):
        where = f"arcs[{idx}]"
        if not isinstance(arc, list) or len(arc) != 3:
            raise ParseError(f"{where}: expected [i, j, cost], got {arc!r}")
        i, j, c = arc
        for name, v in (("i", i), ("j", j)):
            if not isinstance(v, int) or isinstance(v, bool):
                raise ParseError(f"{where}: vertex {name} must be an integer, got {v!r}")
            if not 0 <= v < n:
                raise SchemaError(f"{where}: vertex {v} out of range [0, {n})")
        if isinstance(c, bool) or not isinstance(c, (int, float)):
            raise ParseError(f"{where}: cost must be a number, got {c!r}")
        if i == j:
            raise SchemaError(f"{where}: self-arc ({i}, {j})")
        if not math.isfinite(c) or c < 0:
            raise SchemaError(f"{where}: cost must be finite and non-negative, got {c!r}")
        triples.append((i, j, float(c)))
    return DenseDigraph.from_arcs(n, triples, alpha_declared=alpha)
