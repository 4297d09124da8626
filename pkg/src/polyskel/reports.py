"""Fixtures for the known counterexamples, fulfillment audits and timing tables."""
from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import VertexSet
from .edgecheck import SkeletonConfig, SkeletonTiming, compute_skeleton, resolve_pair
from .families import Dag, char_imset, generate
from .rhombus import FulfillmentReport, check_fulfillment

# Five tree DAGs on six nodes whose imsets span a 3-dimensional face of the
# tree-DAG imset polytope.  Undirected edges of the drawn essential graphs
# are oriented as noted; any orientation without new colliders gives the
# same imset.
CIMTREE6_ARCS = (
    # 2 - 3 oriented 2 -> 3
    ((2, 1), (5, 1), (3, 0), (4, 0), (2, 3)),
    # 0 - 1 oriented 0 -> 1
    ((0, 1), (0, 5), (2, 5), (1, 4), (3, 4)),
    # 2 - 3 oriented 2 -> 3
    ((0, 5), (2, 5), (1, 4), (3, 4), (2, 3)),
    ((1, 0), (1, 4), (2, 1), (3, 4), (5, 1)),
    ((0, 1), (0, 5), (2, 5), (3, 0), (4, 0)),
)


def fixture_dags() -> list[Dag]:
    return [Dag(6, frozenset(arcs)) for arcs in CIMTREE6_ARCS]


def fixture_cimtree6() -> tuple[VertexSet, tuple[int, int]]:
    """The five imsets in drawing order; the top pair is (0, 1)."""
    rows = np.array([char_imset(d) for d in fixture_dags()], dtype=np.int64)
    return VertexSet(rows, "cimtree6-face"), (0, 1)


def affine_dimension(vs: VertexSet) -> int:
    """Exact rank of the difference vectors, by fraction elimination."""
    if len(vs) == 0:
        return -1
    base = vs.array[0]
    rows = [[Fraction(int(x)) for x in r - base] for r in vs.array[1:]]
    rank = 0
    cols = vs.dim
    for c in range(cols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                f = rows[r][c] / rows[rank][c]
                rows[r] = [x - f * y for x, y in zip(rows[r], rows[rank])]
        rank += 1
    return rank


# ---------------------------------------------------------------------------
# audits


def pipeline_oracle(vs: VertexSet, seed: int = 0, method: str = "pipeline"):
    """Sound edge oracle: numeric search with certificates, exact LP fallback."""
    cfg = SkeletonConfig(method=method, seed=seed)
    binary = vs.is_binary()
    return lambda a, b: resolve_pair(vs, a, b, cfg, binary).status


def audit_rhombus(vs: VertexSet, seed: int = 0, method: str = "pipeline") -> FulfillmentReport:
    return check_fulfillment(vs, pipeline_oracle(vs, seed, method))


# ---------------------------------------------------------------------------
# timing


@dataclass
class TimingRow:
    instance: str
    vertices: int
    pairs: int
    total: float
    ledger: float
    rhombus: float
    verify: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


TIMING_COLUMNS = ("instance", "vertices", "pairs", "total", "ledger", "rhombus", "verify")


def time_instance(vs: VertexSet, name: str, config: SkeletonConfig | None = None,
                  repeats: int = 1) -> TimingRow:
    """Best-of-``repeats`` stage times of the skeleton pipeline."""
    best = None
    for _ in range(max(1, repeats)):
        tm = SkeletonTiming()
        led = compute_skeleton(vs, config or SkeletonConfig(), timing=tm)
        if best is None:
            best = tm
        else:
            best.ledger = min(best.ledger, tm.ledger)
            best.rhombus = min(best.rhombus, tm.rhombus)
            best.verify = min(best.verify, tm.verify)
    return TimingRow(name, len(vs), len(led), best.total, best.ledger, best.rhombus, best.verify)


def timing_report(families, sizes, config: SkeletonConfig | None = None,
                  repeats: int = 1) -> list[TimingRow]:
    """One row per (family, size); ``sizes`` is a list or a dict keyed by family."""
    rows = []
    for fam in families:
        for n in (sizes[fam] if isinstance(sizes, dict) else sizes):
            vs = generate(fam, n=n)
            rows.append(time_instance(vs, f"{fam}:{n}", config, repeats))
    return rows


def format_table(rows: list[TimingRow]) -> str:
    head = f"{'instance':<16}{'v':>8}{'pairs':>12}{'total':>10}{'ledger':>10}" \
           f"{'rhombus':>10}{'verify':>10}"
    lines = [head]
    for r in rows:
        lines.append(f"{r.instance:<16}{r.vertices:>8}{r.pairs:>12}{r.total:>10.3f}"
                     f"{r.ledger:>10.3f}{r.rhombus:>10.3f}{r.verify:>10.3f}")
    return "\n".join(lines)


def scan_scaling_ratio(vertex_counts, scan_times) -> float:
    """max/min of t / (v^2 log v) across instances; 1.0 is a perfect fit."""
    ratios = [t / (v * v * math.log(v)) for v, t in zip(vertex_counts, scan_times)]
    return max(ratios) / min(ratios)


def scan_fit(vertex_counts, scan_times) -> tuple[float, float]:
    """Fit t = C * v^2 log v by least squares on log t.

    Returns (C, worst) where ``worst`` is the largest factor by which a
    measured time deviates from the fitted curve, in either direction.
    """
    logs = [math.log(t / (v * v * math.log(v))) for v, t in zip(vertex_counts, scan_times)]
    log_c = sum(logs) / len(logs)
    worst = max(abs(x - log_c) for x in logs)
    return math.exp(log_c), math.exp(worst)


def measure_scan(vs: VertexSet, repeats: int = 3, min_total: float = 0.25) -> float:
    """Best time of the sort-and-mark pass over at least ``repeats`` runs.

    Small instances are rerun until ``min_total`` seconds have been spent so
    that timer noise does not swamp them.
    """
    from .core import make_ledger
    from .rhombus import rhombus_scan

    led = make_ledger(vs, with_keys=True)
    best = math.inf
    spent = 0.0
    runs = 0
    while runs < repeats or spent < min_total:
        t0 = time.perf_counter()
        rhombus_scan(led, vs)
        dt = time.perf_counter() - t0
        best = min(best, dt)
        spent += dt
        runs += 1
    return best
