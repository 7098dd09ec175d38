import stat
import sys
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from permsynth.cdcl import CDCLSolver, Timeout
from permsynth.circuit import depth, layers, verify
from permsynth.gf2 import Gf2Matrix, Permutation, from_permutation
from permsynth.satcore import (
    SAT,
    SOLVER_ENV,
    TIMEOUT,
    UNSAT,
    CnfFormula,
    EncodingError,
    SolverError,
    decode,
    encode_cnot,
    encode_swap,
    parse_competition_output,
    resolve_backend,
    solve,
)
from permsynth.topology import path_graph, ring_graph

BACKENDS = ["embedded", "pysat"]
TRANSPOSITION = from_permutation(Permutation.of([1, 0]))


def pigeonhole(holes):
    f = CnfFormula()
    var = {(p, h): f.new_var() for p in range(holes + 1) for h in range(holes)}
    for p in range(holes + 1):
        f.add([var[p, h] for h in range(holes)])
    for h in range(holes):
        for p in range(holes + 1):
            for q in range(p + 1, holes + 1):
                f.add([-var[p, h], -var[q, h]])
    return f


def test_dimacs_format(tmp_path):
    f = CnfFormula()
    a, b = f.new_var(), f.new_var()
    f.add([a, -b])
    f.add([b])
    assert f.to_dimacs() == "p cnf 2 2\n1 -2 0\n2 0\n"
    path = tmp_path / "q.cnf"
    f.write_dimacs(path)
    assert path.read_bytes() == b"p cnf 2 2\n1 -2 0\n2 0\n"
    with pytest.raises(EncodingError):
        f.add([])


def test_competition_output_parsing():
    out = parse_competition_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 4)
    assert out.status == SAT and out.model == [1, -2, 3, -4]
    assert parse_competition_output("s UNSATISFIABLE\n", 3).status == UNSAT
    assert parse_competition_output("s UNKNOWN\n", 3).status == TIMEOUT
    with pytest.raises(SolverError):
        parse_competition_output("c nothing\n", 3)
    with pytest.raises(SolverError):
        parse_competition_output("s MAYBE\n", 3)


@pytest.mark.parametrize("backend", BACKENDS)
def test_transposition_depth_boundary(backend):
    g = path_graph(2)
    f2, _ = encode_cnot(g, TRANSPOSITION, 2, "depth")
    assert solve(f2, backend).status == UNSAT
    f3, vm = encode_cnot(g, TRANSPOSITION, 3, "depth")
    res = solve(f3, backend)
    assert res.status == SAT
    c = decode(res.model, vm)
    pairs = [gate.qubits for gate in c.gates]
    assert pairs in ([(0, 1), (1, 0), (0, 1)], [(1, 0), (0, 1), (1, 0)])


def test_allow_idle_means_at_most():
    g = path_graph(2)
    f, _ = encode_cnot(g, TRANSPOSITION, 4, "depth")
    assert solve(f, "pysat").status == UNSAT
    f, vm = encode_cnot(g, TRANSPOSITION, 4, "depth", allow_idle=True)
    res = solve(f, "pysat")
    assert res.status == SAT
    assert depth(decode(res.model, vm)) == 3


@pytest.mark.parametrize("backend", BACKENDS)
def test_swap_reversal_path3(backend):
    g = path_graph(3)
    p = Permutation.reversal(3)
    assert solve(encode_swap(g, p, 2, "depth")[0], backend).status == UNSAT
    f, vm = encode_swap(g, p, 3, "depth")
    res = solve(f, backend)
    c = decode(res.model, vm)
    assert verify(c, g, from_permutation(p)) and depth(c) == 3


@pytest.mark.parametrize("objective", ["size", "depth"])
def test_models_respect_at_most_one(objective):
    g = ring_graph(5)
    m = Gf2Matrix.random_invertible(5, 3)
    for bound in range(1, 20):
        f, vm = encode_cnot(g, m, bound, objective)
        res = solve(f, "pysat")
        if res.status == SAT:
            c = decode(res.model, vm)
            for layer in layers(c):
                qs = [q for gate in layer for q in gate.qubits]
                assert len(qs) == len(set(qs))
            assert verify(c, g, m)
            break
    else:
        pytest.fail("no bound found")


def test_var_budget():
    with pytest.raises(EncodingError):
        encode_cnot(path_graph(6), Gf2Matrix.identity(6), 50, "depth", var_budget=1000)
    with pytest.raises(EncodingError):
        encode_cnot(path_graph(2), Gf2Matrix.from_array([[1, 1], [1, 1]]), 3)


def test_embedded_timeout():
    f = pigeonhole(9)
    with pytest.raises(Timeout):
        CDCLSolver(f.nvars, f.clauses).solve(0.05)
    assert solve(pigeonhole(9), "embedded", 0.05).status == TIMEOUT


def test_pysat_timeout_and_pigeonhole():
    assert solve(pigeonhole(5), "pysat").status == UNSAT
    assert solve(pigeonhole(11), "pysat", 0.2).status == TIMEOUT


@st.composite
def random_cnf(draw):
    n = draw(st.integers(3, 14))
    lit = st.integers(1, n).flatmap(lambda v: st.sampled_from([v, -v]))
    clauses = draw(st.lists(st.lists(lit, min_size=1, max_size=3), min_size=1, max_size=int(4.5 * n)))
    f = CnfFormula(nvars=n)
    for c in clauses:
        f.add(c)
    return f


@given(random_cnf(), st.integers(0, 5))
def test_embedded_agrees_with_pysat(f, seed):
    a = solve(f, "embedded", seed=seed)
    b = solve(f, "pysat")
    assert a.status == b.status
    if a.status == SAT:
        assert f.satisfied_by(a.model)


def test_external_backend(tmp_path, monkeypatch):
    wrapper = tmp_path / "solver.sh"
    script = Path(__file__).with_name("fake_solver.py")
    wrapper.write_text(f'#!/bin/sh\nexec "{sys.executable}" "{script}" "$1"\n')
    wrapper.chmod(wrapper.stat().st_mode | stat.S_IEXEC)
    monkeypatch.setenv(SOLVER_ENV, str(wrapper))
    assert resolve_backend("auto") == "external"
    g = path_graph(2)
    f, vm = encode_cnot(g, TRANSPOSITION, 3, "depth")
    res = solve(f, "auto")
    assert res.status == SAT and verify(decode(res.model, vm), g, TRANSPOSITION)
    assert solve(encode_cnot(g, TRANSPOSITION, 2, "depth")[0]).status == UNSAT


def test_external_backend_missing(monkeypatch):
    monkeypatch.setenv(SOLVER_ENV, "/nonexistent/solver")
    with pytest.raises(SolverError):
        solve(pigeonhole(2), "external")
    monkeypatch.delenv(SOLVER_ENV)
    assert resolve_backend("auto") in ("pysat", "embedded")
    with pytest.raises(ValueError):
        resolve_backend("glpk")


def test_bad_model_rejected(monkeypatch):
    import permsynth.satcore as sc

    f = CnfFormula(nvars=1)
    f.add([1])
    monkeypatch.setattr(sc, "_solve_embedded", lambda *a: sc.SolveResult(SAT, [-1]))
    with pytest.raises(SolverError):
        solve(f, "embedded")
