"""Name-based dispatch over every synthesis method."""

from __future__ import annotations

import time

from permsynth.baselines import odd_even_sort
from permsynth.circuit import CNOT, SWAP
from permsynth.gf2 import Permutation
from permsynth.lrsynth import DEFAULT_HYBRID_THRESHOLD as LR_THRESHOLD
from permsynth.lrsynth import lr_synth
from permsynth.optimal import SynthesisResult, exact_synth
from permsynth.rowcol import DEFAULT_HYBRID_THRESHOLD as RC_THRESHOLD
from permsynth.rowcol import OrderStrategy, rowcol_synth
from permsynth.satcore import DEPTH, SIZE
from permsynth.topology import CouplingGraph

METHODS = ("cnot-opt", "swap-opt", "rowcol", "rowcol-hybrid", "lr-synth", "lr-synth-hybrid", "odd-even")
SWAP_METHODS = ("swap-opt", "lr-synth", "lr-synth-hybrid", "odd-even")


def run_method(
    name: str,
    g: CouplingGraph,
    perm: Permutation,
    objective: str = DEPTH,
    *,
    time_limit: float | None = None,
    samples: int | None = None,
    order: OrderStrategy | None = None,
    backend: str = "auto",
) -> SynthesisResult:
    """Synthesize ``perm`` on ``g`` with the named method.

    ``objective`` only matters for the exact methods; ROWCOL targets size and
    LR-Synth and odd-even target depth. Exact methods raise ``SynthesisTimeout``.
    """
    if objective not in (SIZE, DEPTH):
        raise ValueError(f"objective must be 'size' or 'depth', not {objective!r}")
    if name == "cnot-opt":
        return exact_synth(g, perm, CNOT, objective, time_limit, backend=backend)
    if name == "swap-opt":
        return exact_synth(g, perm, SWAP, objective, time_limit, backend=backend)
    if name in ("rowcol", "rowcol-hybrid"):
        threshold = RC_THRESHOLD if name == "rowcol-hybrid" else 1
        return rowcol_synth(g, perm, order, threshold, time_limit=time_limit, backend=backend)
    if name in ("lr-synth", "lr-synth-hybrid"):
        threshold = LR_THRESHOLD if name == "lr-synth-hybrid" else 1
        limit = time_limit if time_limit is not None else 30.0
        return lr_synth(g, perm, samples, threshold, hybrid_time_limit=limit, backend=backend)
    if name == "odd-even":
        t0 = time.perf_counter()
        circ = odd_even_sort(g, perm)
        return SynthesisResult(circ, "odd-even", DEPTH, None, wall_time=time.perf_counter() - t0)
    raise ValueError(f"unknown method {name!r}; choose from {', '.join(METHODS)}")
