import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from permsynth.circuit import depth, layers, verify
from permsynth.gf2 import Permutation, from_permutation
from permsynth.lrsynth import assign_paths, greedy_matching, lr_synth, routing_rounds, tree_route
from permsynth.topology import grid_graph, partition_graph, path_graph, random_tree, ring_graph

from .strategies import permutations, topologies

RING8_AT = [0, 5, 6, 3, 4, 1, 2, 7]


def test_ring8_assignment_spreads_lanes():
    g = ring_graph(8)
    part = partition_graph(g, 1)[0]
    asg = assign_paths(g, RING8_AT, part)
    assert asg.move_to_right == {5, 6} and asg.move_to_left == {1, 2}
    for lane in [(0, 7), (3, 4)]:
        booked = [t for t, e in asg.lane_of.items() if e == lane]
        assert len(booked) == 2
        assert len([t for t in booked if t in asg.move_to_right]) == 1
    assert asg.load == {(0, 7): 2, (3, 4): 2}


def test_ring8_lanes_used_in_parallel():
    g = ring_graph(8)
    out = routing_rounds(g, RING8_AT, partition_graph(g, 1)[0])
    assert out.completed and out.rounds == 2
    assert set(out.layers[-1]) == {(0, 7), (3, 4)}
    assert all(t in out.partition.left for t in out.at[:4])


def test_trivial_cases():
    assert lr_synth(path_graph(5), Permutation.identity(5)).size == 0
    res = lr_synth(path_graph(2), Permutation.of([1, 0]))
    assert res.size == 1 and res.depth == 1
    with pytest.raises(ValueError):
        lr_synth(path_graph(3), Permutation.identity(4))


@settings(max_examples=40)
@given(topologies(max_n=32), st.data())
def test_lr_synth_verifies(g, data):
    p = data.draw(permutations(g.n))
    res = lr_synth(g, p)
    assert verify(res.circuit, g, from_permutation(p))
    for layer in layers(res.circuit):
        touched = [q for gate in layer for q in gate.qubits]
        assert len(touched) == len(set(touched))
    assert "fallback" not in res.flags


@settings(max_examples=30)
@given(st.integers(2, 40).flatmap(permutations))
def test_path_depth_within_3n(p):
    assert lr_synth(path_graph(p.n), p).depth <= 3 * p.n


@pytest.mark.parametrize("n", [8, 16, 32])
def test_reversal_matches_inversions(n):
    res = lr_synth(path_graph(n), Permutation.reversal(n))
    assert res.size == n * (n - 1) // 2
    assert res.depth <= n + 1


def test_hybrid_uses_exact_leaves():
    g = grid_graph(3, 4)
    p = Permutation.random(12, 4)
    res = lr_synth(g, p, hybrid_threshold=6)
    assert res.method == "lr-synth-hybrid" and res.info["hybrid_calls"] >= 1
    assert verify(res.circuit, g, from_permutation(p))


def test_greedy_matching():
    m = greedy_matching({(0, 1): 1.0, (1, 2): 1.3, (2, 3): 1.2, (3, 4): 1.0})
    assert m == [(1, 2), (3, 4)]


@given(st.integers(2, 14), st.integers(0, 500), st.data())
def test_tree_route(n, seed, data):
    g = random_tree(n, seed)
    at = list(data.draw(permutations(n)).dest)
    swaps = tree_route(g, at)
    state = list(at)
    for a, b in swaps:
        assert g.has_edge(a, b)
        state[a], state[b] = state[b], state[a]
    assert state == list(range(n))


def test_samples_validation():
    with pytest.raises(ValueError):
        lr_synth(ring_graph(4), Permutation.identity(4), samples=0)


def test_deterministic():
    g = ring_graph(20)
    p = Permutation.random(20, random.Random(2))
    assert lr_synth(g, p).circuit == lr_synth(g, p).circuit
