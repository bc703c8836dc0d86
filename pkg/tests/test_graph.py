import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from karp_patch.errors import DegreeInfeasible, ParseError, SchemaError
from karp_patch.graph import (
    CostModel,
    DenseDigraph,
    Topology,
    degree_bound,
    generate_instance,
    load_instance,
    save_instance,
    validate_membership,
)


def degree_scan(g):
    """Independent min in/out degree by looping over every ordered pair."""
    outs = [0] * g.n
    ins = [0] * g.n
    for i in range(g.n):
        for j in range(g.n):
            if i != j and np.isfinite(g.cost[i, j]):
                outs[i] += 1
                ins[j] += 1
    return min(outs), min(ins)


def test_complete_small():
    g = generate_instance(3, 1.0, CostModel("uniform01", 1), "complete")
    assert g.num_arcs == 6
    costs = [c for _, _, c in g.arcs()]
    assert all(0 <= c < 1 for c in costs)


def test_degree_infeasible():
    with pytest.raises(DegreeInfeasible):
        generate_instance(2, 0.9, CostModel("uniform01", 1), "complete")


def test_bernoulli_repair_meets_bound():
    g = generate_instance(50, 0.6, CostModel("uniform01", 7), "bernoulli_repair")
    assert min(degree_scan(g)) >= 30


def test_union_permutations_meets_bound():
    g = generate_instance(30, 0.55, CostModel("uniform01", 3), "union_permutations")
    assert min(degree_scan(g)) >= 17
    assert validate_membership(g, 0.55)


def test_degree_bound_rounding():
    # 0.6 * 1000 is 600.0000000000001 in floating point
    assert degree_bound(1000, 0.6) == 600
    assert degree_bound(50, 0.61) == 31


def test_membership_examples():
    full = generate_instance(4, 1.0, CostModel(), "complete")
    assert validate_membership(full, 1.0)
    cost = np.array(full.cost)
    cost[0, :] = np.inf
    assert not validate_membership(DenseDigraph(cost), 0.5)


def test_exponential_costs():
    g = generate_instance(40, 1.0, CostModel("exponential1", 5), "complete")
    costs = np.array([c for _, _, c in g.arcs()])
    assert (costs >= 0).all()
    assert costs.max() > 1  # Exp(1) is unbounded; 1560 draws all below 1 has prob ~e^-1560
    assert abs(costs.mean() - 1) < 0.1


def test_hall_deficient_shape():
    g = generate_instance(100, 0.3, CostModel("uniform01", 2), "hall_deficient")
    assert validate_membership(g, 0.3)
    # some 31 vertices send all arcs into the same 30 vertices
    rows = [i for i in range(100) if g.out_degrees()[i] == 30]
    targets = set(np.flatnonzero(g.adjacency[rows].any(axis=0)))
    assert len(rows) == 31 and len(targets) == 30


def test_hall_deficient_needs_sparse():
    with pytest.raises(DegreeInfeasible):
        generate_instance(10, 0.5, CostModel(), "hall_deficient")


def test_immutable():
    g = generate_instance(5, 1.0, CostModel(), "complete")
    with pytest.raises(ValueError):
        g.cost[0, 1] = 3.0


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(2, 25),
    alpha=st.floats(0.05, 1.0),
    seed=st.integers(0, 2**64 - 1),
    topology=st.sampled_from([Topology.COMPLETE, Topology.BERNOULLI_REPAIR, Topology.UNION_PERMUTATIONS]),
    kind=st.sampled_from(["uniform01", "exponential1"]),
)
def test_generators_in_class_and_deterministic(n, alpha, seed, topology, kind):
    try:
        g = generate_instance(n, alpha, CostModel(kind, seed), topology)
    except DegreeInfeasible:
        assert degree_bound(n, alpha) > n - 1
        return
    assert validate_membership(g, alpha)
    assert not g.adjacency.diagonal().any()
    assert g == generate_instance(n, alpha, CostModel(kind, seed), topology)
    if topology is Topology.COMPLETE:
        assert g.num_arcs == n * (n - 1)


def test_round_trip_small(triangle):
    assert load_instance(save_instance(triangle)) == triangle


@settings(max_examples=30, deadline=None)
@given(n=st.integers(2, 15), seed=st.integers(0, 2**32), kind=st.sampled_from(["uniform01", "exponential1"]))
def test_round_trip_bit_exact(n, seed, kind):
    g = generate_instance(n, 0.5, CostModel(kind, seed), "bernoulli_repair")
    h = load_instance(save_instance(g))
    assert h == g
    assert h.cost.tobytes() == g.cost.tobytes()
    assert h.alpha_declared == g.alpha_declared


@pytest.mark.parametrize(
    "payload, exc",
    [
        ({"n": 3, "alpha": None, "arcs": [[2, 2, 0.5]]}, SchemaError),
        ({"n": 3, "alpha": None, "arcs": [[0, 1, -0.1]]}, SchemaError),
        ({"n": 3, "alpha": None, "arcs": [[0, 1, 0.1], [0, 1, 0.2]]}, SchemaError),
        ({"n": 3, "alpha": None, "arcs": [[0, 5, 0.1]]}, SchemaError),
        ({"n": 3, "alpha": None, "arcs": [[0, 1]]}, ParseError),
        ({"n": 3, "alpha": None, "arcs": [[0, 1, "x"]]}, ParseError),
        ({"n": "3", "arcs": []}, ParseError),
        ({"arcs": []}, ParseError),
    ],
)
def test_load_rejects(payload, exc):
    with pytest.raises(exc):
        load_instance(json.dumps(payload))


def test_parse_error_has_position():
    with pytest.raises(ParseError, match="line 2"):
        load_instance(b'{"n": 3,\n "arcs": [}')


def test_parse_error_names_field():
    with pytest.raises(ParseError, match=r"arcs\[1\]"):
        load_instance(json.dumps({"n": 3, "arcs": [[0, 1, 0.1], [1, 2]]}))
