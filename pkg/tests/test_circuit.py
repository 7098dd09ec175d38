import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permsynth.circuit import (
    Circuit,
    Gate,
    circuit_matrix,
    compose,
    depth,
    dumps,
    layers,
    loads,
    remap,
    to_cnots,
    verify,
)
from permsynth.gf2 import Gf2Matrix, Permutation, from_permutation
from permsynth.topology import path_graph, ring_graph


@st.composite
def swap_circuits(draw, max_n=16, max_len=40):
    n = draw(st.integers(2, max_n))
    pairs = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=2, max_size=2, unique=True), max_size=max_len))
    return Circuit.from_swaps(n, [tuple(p) for p in pairs])


def test_depth_examples():
    c = Circuit.from_cnots(4, [(0, 1), (2, 3), (1, 2), (0, 1)])
    assert depth(c) == 3
    assert [len(layer) for layer in layers(c)] == [2, 1, 1]
    assert depth(Circuit(3)) == 0


def test_swap_expansion_order():
    c = to_cnots(Circuit.from_swaps(2, [(0, 1)]))
    assert [g.qubits for g in c.gates] == [(0, 1), (1, 0), (0, 1)]


@given(swap_circuits())
def test_to_cnots_depth_and_function(c):
    expanded = to_cnots(c)
    assert depth(expanded) <= 3 * depth(c)
    assert expanded.size == 3 * c.size
    assert circuit_matrix(expanded) == circuit_matrix(c)


def test_to_cnots_thousand_random():
    rng = random.Random(0)
    for _ in range(1000):
        n = rng.randint(2, 16)
        c = Circuit.from_swaps(n, [tuple(rng.sample(range(n), 2)) for _ in range(rng.randint(0, 30))])
        assert depth(to_cnots(c)) <= 3 * depth(c)


@given(swap_circuits(max_n=8))
def test_depth_invariant_under_layer_shuffle(c):
    shuffled = [g for layer in layers(c) for g in reversed(layer)]
    assert depth(Circuit(c.n, tuple(shuffled))) == depth(c)


def test_verify_reasons():
    g = path_graph(3)
    swap01 = Circuit.from_swaps(3, [(0, 1)])
    target = from_permutation(Permutation.of([1, 0, 2]))
    assert verify(swap01, g, target)
    assert verify(Circuit.from_swaps(3, [(0, 2)]), g, target).reason == "off-graph"
    assert verify(swap01, g, Gf2Matrix.identity(3)).reason == "wrong-function"
    assert verify(swap01, path_graph(4), target).reason == "size-mismatch"
    u = Circuit(3, (Gate.u2(0, 1, 0),))
    assert verify(u, g, target).reason == "bad-gate"


def test_cnot_convention():
    # CNOT(0 -> 1) adds row 0 into row 1
    m = circuit_matrix(Circuit.from_cnots(2, [(0, 1)]))
    assert m.to_array().tolist() == [[1, 0], [1, 1]]


def test_json_round_trip():
    c = Circuit(
        4,
        (
            Gate.cnot(0, 1),
            Gate.swap(1, 2),
            Gate.u2(2, 3, 7, mirrored=True),
            Gate("perm", (0, 1, 3), perm=Permutation.of([2, 0, 1])),
        ),
    )
    text = dumps(c)
    doc = json.loads(text)
    assert list(doc) == ["n", "gates"]
    assert list(doc["gates"][0]) == ["kind", "qubits"]
    assert doc["gates"][2] == {"kind": "u2", "qubits": [2, 3], "id": 7, "mirrored": True}
    assert loads(text) == c


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate.cnot(1, 1)
    with pytest.raises(ValueError):
        Gate("toffoli", (0, 1))
    with pytest.raises(ValueError):
        Circuit.from_cnots(2, [(0, 2)])


def test_compose_and_remap():
    a = Circuit.from_swaps(3, [(0, 1)])
    b = Circuit.from_swaps(3, [(1, 2)])
    assert compose(a, b).size == 2
    with pytest.raises(ValueError):
        compose(a, Circuit(4))
    r = remap(b, [4, 2, 3], n=5)
    assert r.gates[0].qubits == (2, 3)
    assert verify(r, ring_graph(5), from_permutation(Permutation.of([0, 1, 3, 2, 4])))
