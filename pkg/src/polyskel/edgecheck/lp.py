"""Exact edge test by linear feasibility.

{a, b} is an edge iff the line through the two vertices misses the convex
hull of the other vertices.  With delta = a - b this is infeasibility of

    sum_i x_i v_i - t * delta = b,   sum_i x_i = 1,   x >= 0,  t free.

The system is solved by phase-1 simplex on an integer tableau with
fraction-free pivoting (every entry is the basis determinant times the
rational value, and the row updates divide exactly).  Bland's rule keeps it
from cycling.  When the system is infeasible the final duals give an integer
cost vector that separates {a, b} from the rest.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from ..core import VertexSet
from ..errors import DomainError, NumericError

_INT64_SAFE = 1 << 62


class Status(enum.Enum):
    EDGE = 1
    NON_EDGE = -1
    INDETERMINATE = 0

    @property
    def code(self) -> int:
        return self.value


@dataclass(frozen=True)
class NonEdgeCertificate:
    """sum(weights[i] * V[i]) equals t*a + (1-t)*b.

    ``weights`` maps vertex indices to nonnegative fractions summing to one.
    """

    weights: dict
    t: Fraction

    def point(self, vs: VertexSet, a: int, b: int) -> list[Fraction]:
        alpha, beta = vs.array[a], vs.array[b]
        return [self.t * int(x) + (1 - self.t) * int(y) for x, y in zip(alpha, beta)]

    def check(self, vs: VertexSet, a: int, b: int) -> bool:
        if any(w < 0 for w in self.weights.values()) or sum(self.weights.values()) != 1:
            return False
        if a in self.weights or b in self.weights:
            return False
        arr = vs.array
        combo = [Fraction(0)] * vs.dim
        for i, w in self.weights.items():
            for k, x in enumerate(arr[i]):
                combo[k] += w * int(x)
        return combo == self.point(vs, a, b)


@dataclass(frozen=True)
class EdgeVerdict:
    status: Status
    certificate: object = None

    @property
    def is_edge(self) -> bool:
        return self.status is Status.EDGE


def _scores(arr: np.ndarray, cost) -> np.ndarray:
    c = [int(x) for x in cost]
    reach = max((abs(x) for x in c), default=0) * max(1, int(np.abs(arr).max(initial=0)))
    if reach * max(1, arr.shape[1]) < _INT64_SAFE:
        return arr.astype(np.int64) @ np.array(c, dtype=np.int64)
    return arr.astype(object) @ np.array(c, dtype=object)


def separates(vs: VertexSet, a: int, b: int, cost, members=None) -> bool:
    """Exact check that ``cost`` is maximized over ``members`` exactly at a and b."""
    idx = np.arange(len(vs)) if members is None else np.asarray(list(members), dtype=np.int64)
    idx = np.union1d(idx, [a, b])
    sc = _scores(vs.array[idx], cost)
    pos_a = int(np.searchsorted(idx, a))
    pos_b = int(np.searchsorted(idx, b))
    top = sc[pos_a]
    if sc[pos_b] != top:
        return False
    rest = np.ones(len(idx), dtype=bool)
    rest[[pos_a, pos_b]] = False
    return bool(all(x < top for x in sc[rest])) if sc.dtype == object else bool(
        np.all(sc[rest] < top))


def _primitive(vec) -> tuple[int, ...]:
    g = 0
    for x in vec:
        g = gcd(g, int(x))
    return tuple(int(x) // g for x in vec) if g > 1 else tuple(int(x) for x in vec)


def _phase_one(A: np.ndarray, rhs: np.ndarray):
    """Fraction-free phase-1 simplex on A z = rhs, z >= 0 (rhs >= 0).

    Returns (feasible, basis, tableau, det) where the tableau includes the
    artificial columns and, as the last row, the reduced costs.  The tableau
    lives in int64 while a bound on the next pivot's entries allows it and
    switches to Python integers for good otherwise.
    """
    rows, cols = A.shape
    small = A.dtype != object and int(np.abs(A).max(initial=0)) * (rows + 1) < _INT64_SAFE >> 8
    T = np.zeros((rows + 1, cols + rows + 1), dtype=np.int64 if small else object)
    T[:rows, :cols] = A
    T[:rows, cols:cols + rows] = np.identity(rows, dtype=np.int64)
    T[:rows, -1] = rhs
    T[rows, :cols] = -A.sum(axis=0)
    T[rows, -1] = -rhs.sum()
    basis = list(range(cols, cols + rows))
    det = 1
    while True:
        neg = np.flatnonzero(T[rows, :cols] < 0)
        if len(neg) == 0:
            break
        entering = int(neg[0])
        col = T[:rows, entering]
        best = -1
        for i in np.flatnonzero(col > 0):
            if best < 0:
                best = i
                continue
            lhs = int(T[i, -1]) * int(col[best])
            rhs_b = int(T[best, -1]) * int(col[i])
            if lhs < rhs_b or (lhs == rhs_b and basis[i] < basis[best]):
                best = i
        if best < 0:  # pragma: no cover - phase 1 is bounded below by 0
            raise NumericError("phase-1 simplex reported an unbounded ray")
        piv = int(T[best, entering])
        pivot_row = T[best].copy()
        pivot_col = T[:, entering].copy()
        if T.dtype != object:
            top = int(np.abs(T).max())
            bound = abs(piv) * top + int(np.abs(pivot_col).max()) * int(np.abs(pivot_row).max())
            if bound >= _INT64_SAFE:
                T = T.astype(object)
                pivot_row = pivot_row.astype(object)
                pivot_col = pivot_col.astype(object)
        prod = piv * T - np.multiply.outer(pivot_col, pivot_row)
        # exact: every entry is a minor of the original system
        T = prod // det
        T[best] = pivot_row
        det = piv
        basis[best] = entering
    feasible = int(T[rows, -1]) == 0
    return feasible, basis, T, det


def solve_line_hull(vs: VertexSet, a: int, b: int):
    """Run the feasibility LP; returns the raw outcome used by exact_edge_test."""
    arr = vs.array
    m = len(vs)
    others = np.array([i for i in range(m) if i != a and i != b], dtype=np.int64)
    small = int(np.abs(arr).max(initial=0)) < (1 << 30)
    dt = np.int64 if small else object
    X = arr.astype(dt)
    delta = X[a] - X[b]
    d = vs.dim
    k = len(others)
    A = np.zeros((d + 1, k + 2), dtype=dt)
    A[:d, :k] = X[others].T
    A[:d, k] = -delta
    A[:d, k + 1] = delta
    A[d, :k] = 1
    rhs = np.zeros(d + 1, dtype=dt)
    rhs[:d] = X[b]
    rhs[d] = 1
    flip = np.where(rhs >= 0, 1, -1).astype(dt)
    A = A * flip[:, None]
    rhs = rhs * flip
    feasible, basis, T, det = _phase_one(A, rhs)
    return others.tolist(), flip, feasible, basis, T, det


def exact_edge_test(vs: VertexSet, a: int, b: int) -> EdgeVerdict:
    """Decide whether {a, b} spans an edge of conv(vs), exactly.

    Non-edges come with convex weights on the other vertices that reproduce
    a point t*a + (1-t)*b; edges come with an integer cost vector maximized
    over vs exactly at a and b.
    """
    a, b = int(a), int(b)
    if a == b:
        raise DomainError("exact_edge_test needs two distinct vertices")
    m = len(vs)
    if not (0 <= a < m and 0 <= b < m):
        raise DomainError(f"vertex index out of range for {m} vertices")
    others, flip, feasible, basis, T, det = solve_line_hull(vs, a, b)
    n_x = len(others)
    rows = vs.dim + 1
    if feasible:
        weights = {}
        t = Fraction(0)
        for i, var in enumerate(basis):
            val = Fraction(int(T[i, -1]), int(det))
            if val == 0:
                continue
            if var < n_x:
                weights[others[var]] = weights.get(others[var], 0) + val
            elif var == n_x:
                t += val
            elif var == n_x + 1:
                t -= val
        cert = NonEdgeCertificate(weights, t)
        if not cert.check(vs, a, b):
            raise NumericError("non-edge certificate failed its exact recheck")
        return EdgeVerdict(Status.NON_EDGE, cert)
    cols = n_x + 2
    # duals y = D - reduced cost of the artificial columns (scaled by det > 0)
    y = [(int(det) - int(T[rows, cols + k])) * int(flip[k]) for k in range(rows)]
    cost = _primitive(y[:-1])
    if not separates(vs, a, b, cost):
        raise NumericError("edge certificate failed its exact recheck")
    return EdgeVerdict(Status.EDGE, cost)


def is_edge(vs: VertexSet, a: int, b: int) -> bool:
    return exact_edge_test(vs, a, b).is_edge
