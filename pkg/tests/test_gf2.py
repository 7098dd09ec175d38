import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permsynth.gf2 import (
    Gf2Matrix,
    Permutation,
    apply_cnot,
    apply_swap,
    from_permutation,
    inverse,
    is_permutation_matrix,
    multiply,
    rank,
    solve_row_combination,
    to_permutation,
)

from .strategies import invertible, permutations


def span_size(rows):
    span = {0}
    for r in rows:
        span |= {x ^ r for x in span}
    return len(span)


def test_parse_forms():
    assert Permutation.parse("2,0,1").dest == (2, 0, 1)
    assert Permutation.parse("reversal", 4).dest == (3, 2, 1, 0)
    assert Permutation.parse("random:7", 6) == Permutation.random(6, 7)
    assert str(Permutation.parse("1,0")) == "1,0"
    for bad in ["1,1", "0,2", "a,b", ""]:
        with pytest.raises(ValueError):
            Permutation.parse(bad)
    with pytest.raises(ValueError):
        Permutation.parse("1,0", 3)


def test_from_permutation_convention():
    m = from_permutation(Permutation.of([2, 0, 1]))
    # column v holds e_dest[v]
    assert m.to_array().tolist() == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]


def test_symbolic_cnot_row():
    m = Gf2Matrix.from_array([[1, 0, 1], [0, 1, 1], [1, 1, 0]])
    out = apply_cnot(m, 0, 2)
    assert [out[2, j] for j in range(3)] == [m[0, j] ^ m[2, j] for j in range(3)]
    assert out.rows[:2] == m.rows[:2]


def test_apply_errors():
    m = Gf2Matrix.identity(3)
    with pytest.raises(ValueError):
        apply_cnot(m, 1, 1)
    with pytest.raises(IndexError):
        apply_cnot(m, 0, 3)
    with pytest.raises(ValueError):
        apply_swap(m, 2, 2)


@given(st.integers(2, 16).flatmap(invertible), st.data())
def test_cnot_preserves_rank(m, data):
    c, t = data.draw(st.lists(st.integers(0, m.n - 1), min_size=2, max_size=2, unique=True))
    assert rank(apply_cnot(m, c, t)) == m.n == rank(m)


@given(st.integers(1, 16).flatmap(invertible))
def test_inverse_against_numpy(m):
    a, b = m.to_array().astype(int), inverse(m).to_array().astype(int)
    assert ((a @ b) % 2 == np.eye(m.n, dtype=int)).all()
    assert multiply(m, inverse(m)).is_identity()


@given(st.integers(1, 8).flatmap(lambda n: st.lists(st.integers(0, 2**n - 1), min_size=n, max_size=n)))
def test_rank_against_span(rows):
    m = Gf2Matrix(len(rows), tuple(rows))
    assert 2 ** rank(m) == span_size(rows)


@given(st.integers(1, 8).flatmap(invertible), st.integers(1, 8).flatmap(invertible))
def test_multiply_against_numpy(a, b):
    if a.n != b.n:
        return
    expected = (a.to_array().astype(int) @ b.to_array().astype(int)) % 2
    assert (multiply(a, b).to_array() == expected).all()


def test_singular_inverse():
    with pytest.raises(ValueError):
        inverse(Gf2Matrix.from_array([[1, 1], [1, 1]]))


@pytest.mark.parametrize("n", range(1, 7))
def test_permutation_round_trip(n):
    for dest in itertools.permutations(range(n)):
        p = Permutation(dest)
        m = from_permutation(p)
        assert is_permutation_matrix(m)
        assert to_permutation(m) == p


@given(st.integers(1, 8).flatmap(permutations), st.integers(1, 8).flatmap(permutations))
def test_then_is_matrix_product(p, q):
    if p.n != q.n:
        return
    assert from_permutation(p.then(q)) == multiply(from_permutation(q), from_permutation(p))
    assert p.then(p.inverse()).is_identity()


@given(st.integers(2, 10).flatmap(invertible), st.data())
def test_solve_row_combination(m, data):
    goal = data.draw(st.integers(1, 2**m.n - 1))
    chosen = solve_row_combination(dict(enumerate(m.rows)), goal)
    acc = 0
    for i in chosen:
        acc ^= m.rows[i]
    assert acc == goal


def test_inversions():
    assert Permutation.reversal(5).inversions() == 10
    assert Permutation.identity(5).inversions() == 0
