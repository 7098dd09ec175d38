"""Command-line front end: ``permsynth {synth,sweep,bench,compile,verify}``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import random
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from statistics import mean

from permsynth.circuit import Circuit, depth, dumps, loads, to_cnots, verify
from permsynth.compilation import CompileConfig, compile_qv
from permsynth.gf2 import Permutation, from_permutation
from permsynth.methods import METHODS, run_method
from permsynth.optimal import SynthesisTimeout, permutations_for, sweep_all
from permsynth.rowcol import OrderStrategy
from permsynth.topology import grid_graph, parse_graph, path_graph, random_tree, ring_graph

EXIT_OK, EXIT_INVALID, EXIT_TIMEOUT = 0, 1, 2
MAX_ENUMERATE = 8


class UsageError(Exception):
    pass


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def _metrics(c: Circuit, wall_ms: float) -> dict:
    expanded = to_cnots(c)
    return {
        "size": c.size,
        "depth": depth(c),
        "cnot_equivalent_size": expanded.size,
        "cnot_equivalent_depth": depth(expanded),
        "wall_ms": round(wall_ms, 3),
    }


def cmd_synth(args) -> int:
    g = parse_graph(args.graph)
    perm = Permutation.parse(args.perm, g.n)
    order = OrderStrategy.parse(args.order) if args.order else None
    t0 = time.perf_counter()
    try:
        res = run_method(
            args.method, g, perm, args.objective,
            time_limit=args.time_limit, samples=args.samples, order=order, backend=args.backend,
        )
    except SynthesisTimeout as exc:
        partial = {
            "status": "timeout",
            "graph": args.graph,
            "perm": str(perm),
            "method": args.method,
            "objective": args.objective,
            "lower_bound": exc.lower_bound,
            "queries": [list(q) for q in exc.queries],
        }
        _emit(json.dumps(partial, indent=2), args.out)
        return EXIT_TIMEOUT
    wall_ms = (time.perf_counter() - t0) * 1000.0
    m = _metrics(res.circuit, wall_ms)
    if args.format == "text":
        lines = [f"{k}: {v}" for k, v in m.items()]
        lines += [" ".join(f"{g.kind}{g.qubits}" for g in res.circuit.gates)]
        _emit("\n".join(lines), args.out)
    else:
        doc = {
            "status": "ok",
            "graph": args.graph,
            "perm": str(perm),
            "method": res.method,
            "objective": res.objective,
            "optimum": res.optimum,
            "flags": res.flags,
            "metrics": m,
            "circuit": json.loads(dumps(res.circuit)),
        }
        _emit(json.dumps(doc, indent=2), args.out)
    return EXIT_OK


def _parse_enumerate(text: str, n: int):
    if text == "all":
        if n > MAX_ENUMERATE:
            raise UsageError(
                f"{math.factorial(n)} permutations for n={n} is too many to enumerate; "
                "use --enumerate random:<k>:<seed>"
            )
        return "all"
    parts = text.split(":")
    if parts[0] == "random" and len(parts) == 3:
        return ("random", int(parts[1]), int(parts[2]))
    raise UsageError(f"bad --enumerate {text!r}; expected all or random:k:seed")


def cmd_sweep(args) -> int:
    g = parse_graph(args.graph)
    kinds = {"cnot-opt": "cnot", "swap-opt": "swap"}
    if args.method not in kinds:
        raise UsageError("sweep supports cnot-opt and swap-opt")
    sampler = _parse_enumerate(args.enumerate, g.n)
    result = sweep_all(
        g, kinds[args.method], args.objective, sampler,
        time_limit=args.time_limit, backend=args.backend, workers=args.workers,
    )
    if args.out:
        result.write_csv(args.out)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["perm", "optimum", "queries", "wall_ms"])
        for r in result.rows:
            w.writerow([str(r.perm), "" if r.optimum is None else r.optimum, r.queries, f"{r.wall_ms:.3f}"])
    print(result.summary(), file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def _parse_sizes(text: str) -> list[int]:
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def _bench_graph(topology: str, n: int, seed: int):
    if topology == "path":
        return path_graph(n)
    if topology == "ring":
        return ring_graph(n)
    if topology == "tree":
        return random_tree(n, seed)
    if topology == "grid":
        w = max(d for d in range(1, math.isqrt(n) + 1) if n % d == 0)
        if w == 1:
            raise UsageError(f"grid size {n} has no two-dimensional factorisation")
        return grid_graph(n // w, w)
    raise UsageError(f"unknown topology {topology!r}")


def _bench_cell(job) -> list:
    topology, n, method, k, seed, time_limit, backend = job
    g = _bench_graph(topology, n, seed)
    rng = random.Random(f"{seed}:{topology}:{n}")
    perms = [Permutation.random(n, rng) for _ in range(k)]
    sizes, depths, walls = [], [], []
    for p in perms:
        t0 = time.perf_counter()
        try:
            res = run_method(method, g, p, "depth", time_limit=time_limit, backend=backend)
        except SynthesisTimeout:
            continue
        target = from_permutation(p)
        if not verify(res.circuit, g, target):
            raise AssertionError(f"{method} produced an invalid circuit on {topology}:{n}")
        sizes.append(res.circuit.size)
        depths.append(depth(res.circuit))
        walls.append((time.perf_counter() - t0) * 1000.0)

    def fmt(xs):
        return f"{mean(xs):.3f}" if xs else ""

    return [topology, n, method, fmt(sizes), fmt(depths), fmt(walls), len(sizes), seed]


def cmd_bench(args) -> int:
    methods = args.methods.split(",")
    for m in methods:
        if m not in METHODS:
            raise UsageError(f"unknown method {m!r}")
    if "odd-even" in methods and args.topology != "path":
        raise UsageError("odd-even needs --topology path")
    jobs = [
        (args.topology, n, m, args.perms, args.seed, args.time_limit, args.backend)
        for n in _parse_sizes(args.sizes)
        for m in methods
    ]
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_bench_cell, jobs))
    else:
        rows = [_bench_cell(j) for j in jobs]
    rows.sort(key=lambda r: (r[0], r[1], r[2]))
    fh = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["topology", "n", "method", "mean_size", "mean_depth", "mean_wall_ms", "samples", "seed"])
        w.writerows(rows)
    finally:
        if args.out:
            fh.close()
    return EXIT_OK


def cmd_compile(args) -> int:
    graph = args.graph or f"path:{args.qubits}"
    g = parse_graph(graph)
    layers = None if args.square else args.layers
    cfg = CompileConfig(
        args.qubits, layers, graph, args.method, args.objective, args.seed, args.time_limit, args.backend
    )
    _, _, report = compile_qv(cfg, g)
    _emit(json.dumps(report.to_dict(), indent=2), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    with open(args.circuit, encoding="utf-8") as fh:
        doc = json.load(fh)
    circ = loads(json.dumps(doc["circuit"] if "circuit" in doc else doc))
    g = parse_graph(args.graph)
    perm = Permutation.parse(args.perm, g.n)
    verdict = verify(circ, g, from_permutation(perm))
    print(f"{verdict.reason} {verdict.detail}".strip())
    return EXIT_OK if verdict else EXIT_INVALID


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="permsynth", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    cpu = os.cpu_count() or 1

    def common(sp, objective_default="depth"):
        sp.add_argument("--objective", choices=["size", "depth"], default=objective_default)
        sp.add_argument("--time-limit", type=float, default=None, help="seconds per instance")
        sp.add_argument("--backend", default="auto", choices=["auto", "embedded", "pysat", "external"])

    s = sub.add_parser("synth", help="synthesize one permutation")
    s.add_argument("--graph", required=True)
    s.add_argument("--perm", required=True, help="csv, reversal or random:seed")
    s.add_argument("--method", required=True, choices=METHODS)
    s.add_argument("--samples", type=int, default=None, help="LR-Synth partitions per level")
    s.add_argument("--order", default=None, help="ROWCOL order: fixed:list, exhaustive or sample:k[:seed]")
    s.add_argument("--format", choices=["json", "text"], default="json")
    s.add_argument("--out", default=None)
    common(s)
    s.set_defaults(func=cmd_synth)

    w = sub.add_parser("sweep", help="exact optima over many permutations")
    w.add_argument("--graph", required=True)
    w.add_argument("--method", required=True, choices=["cnot-opt", "swap-opt"])
    w.add_argument("--enumerate", default="all", help="all or random:k:seed")
    w.add_argument("--out", default=None)
    w.add_argument("--workers", type=int, default=cpu)
    common(w)
    w.set_defaults(func=cmd_sweep)

    b = sub.add_parser("bench", help="mean size/depth/runtime per topology size and method")
    b.add_argument("--topology", required=True, choices=["path", "ring", "grid", "tree"])
    b.add_argument("--sizes", required=True, help="lo..hi or a comma list")
    b.add_argument("--perms", type=int, default=10, help="permutations per size")
    b.add_argument("--methods", required=True, help="comma list")
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out", default=None)
    b.add_argument("--workers", type=int, default=cpu)
    b.add_argument("--time-limit", type=float, default=None)
    b.add_argument("--backend", default="auto", choices=["auto", "embedded", "pysat", "external"])
    b.set_defaults(func=cmd_bench)

    c = sub.add_parser("compile", help="QV-style compile with block resynthesis")
    c.add_argument("--qubits", type=int, default=8)
    c.add_argument("--layers", type=int, default=None)
    c.add_argument("--square", action="store_true", help="layers = qubits")
    c.add_argument("--graph", default=None, help="default path:<qubits>")
    c.add_argument("--method", default="lr-synth-hybrid", choices=METHODS)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", default=None)
    common(c)
    c.set_defaults(func=cmd_compile)

    v = sub.add_parser("verify", help="check a circuit JSON against a graph and permutation")
    v.add_argument("--circuit", required=True)
    v.add_argument("--graph", required=True)
    v.add_argument("--perm", required=True)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "command", None) == "compile" and not args.square and args.layers is None:
        args.square = True
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
