"""Numeric edge verification by cost-function search.

The search looks for a cost vector orthogonal to delta = a - b that is
maximized over the vertex set only at a and b.  A vertex scoring above a
triggers a cost update; once no vertex does, an exact integer copy of the
cost vector cuts the working set down to its maximizers.  When at most three
vertices are left, {a, b} is an edge of that face and hence of the polytope.

The floating-point work only steers the search.  Every face cut is done with
integer cost vectors, and a returned edge always comes with an integer
certificate that has been rechecked exactly, so a TRUE answer is sound.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import _kernels
from ..core import VertexSet
from ..errors import DomainError, NumericError
from .lp import separates

DEFAULT_EPS = 1e-6
DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 100
MAX_NUDGES = 8


def _project(v, delta, dd):
    return v - (v @ delta) / dd * delta


def cost_update(c, alpha, beta, mu, eps: float = DEFAULT_EPS, rng=None,
                max_nudges: int = MAX_NUDGES) -> np.ndarray:
    """Move c so that mu drops strictly below alpha while alpha and beta stay tied.

    The step is along p, the part of c_mu = 2*mu - 1 orthogonal to delta.  The
    offset eps is applied against the sign of <p, alpha - mu>, which is what
    makes <c', alpha - mu> = |eps| * |<p, alpha - mu>| positive.  If p is
    orthogonal to alpha - mu, c_mu is nudged by a random vector with entries
    below 1/d in absolute value.
    """
    c = np.asarray(c, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    delta = alpha - beta
    dd = float(delta @ delta)
    if dd == 0.0:
        raise DomainError("alpha and beta coincide")
    d = len(c)
    rng = np.random.default_rng() if rng is None else rng
    cm = 2.0 * mu - 1.0
    diff = alpha - mu
    eps = abs(eps)
    for attempt in range(max_nudges + 1):
        if attempt:
            cm = cm + rng.uniform(-1.0, 1.0, d) * (0.999 / d)
        p = _project(cm, delta, dd)
        den = float(p @ diff)
        if abs(den) > 1e-12:
            lam = float(c @ diff) / den - eps * np.sign(den)
            return c - lam * p
    raise NumericError("cost update stayed degenerate after nudging")


def _scale_for(X: np.ndarray) -> float:
    """Integer scale for rounding unit cost vectors without int64 overflow."""
    m, d = X.shape
    big = max(1, int(np.abs(X).max()))
    span = max(1, int((X.max(axis=0) - X.min(axis=0)).max()))
    bound = 2 * d * d * big * span * span + 1
    return float(min(2**40, max(1, (2**62) // bound)))


@dataclass
class NumericResult:
    verified: bool
    iterations: int
    certificate: tuple | None = None
    status: int = _kernels.SEARCH_EXHAUSTED
    face: tuple = ()


def _start_vector(rng, delta, dd):
    d = len(delta)
    for _ in range(100):
        c = _project(rng.uniform(-1.0, 1.0, d), delta, dd)
        nrm = np.linalg.norm(c)
        if nrm > 1e-6:
            return c / nrm
    raise NumericError("could not draw a start vector orthogonal to delta")


def _assemble(Xi_obj, ia, ib, chain, alive_end) -> tuple | None:
    """Combine the face cuts into one integer cost vector, exactly."""
    m = len(Xi_obj)
    alpha = Xi_obj[ia]
    delta = alpha - Xi_obj[ib]
    dd = int(delta @ delta)
    rest = [j for j in np.flatnonzero(alive_end) if j != ia and j != ib]
    if len(rest) > 1:
        return None
    if rest:
        g = alpha - Xi_obj[rest[0]]
        cur = g * dd - int(g @ delta) * delta
    else:
        cur = np.zeros(len(alpha), dtype=object)
    # replay the cuts to recover which vertices each one removed
    alive = np.ones(m, dtype=bool)
    removed = []
    for ci in chain:
        gap = (Xi_obj - alpha) @ ci
        out = alive & np.array([x < 0 for x in gap], dtype=bool)
        removed.append(np.flatnonzero(out))
        alive &= ~out
    for ci, out in zip(reversed(chain), reversed(removed)):
        if len(out) == 0:
            continue
        worst = max(int(x) for x in (Xi_obj[out] - alpha) @ cur)
        cur = cur + (max(worst, 0) + 1) * ci
    return tuple(int(x) for x in cur)


def numeric_search(vs: VertexSet, a: int, b: int, max_iter: int = DEFAULT_MAX_ITER,
                   seed=None, eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL,
                   members=None) -> NumericResult:
    """Run the cost-function search on ``vs`` (or its rows ``members``)."""
    a, b = int(a), int(b)
    if a == b:
        raise DomainError("numeric edge search needs two distinct vertices")
    idx = np.arange(len(vs)) if members is None else np.asarray(members, dtype=np.int64)
    pos = {int(v): k for k, v in enumerate(idx)}
    if a not in pos or b not in pos:
        raise DomainError("both vertices must belong to the working set")
    Xi = vs.array[idx].astype(np.int64)
    X = Xi.astype(np.float64)
    ia, ib = pos[a], pos[b]
    delta = X[ia] - X[ib]
    dd = float(delta @ delta)
    d = X.shape[1]
    if d < 2:
        # no direction orthogonal to delta; leave the pair to the exact test
        return NumericResult(False, 0, None, _kernels.SEARCH_DEGENERATE)
    rng = np.random.default_rng(seed)
    c0 = _start_vector(rng, delta, dd)
    randoms = rng.uniform(-1.0, 1.0, (max(max_iter, 1), d))
    status, its, chain, nchain, alive = _kernels.numeric_search(
        X, Xi, ia, ib, c0, randoms, float(eps), float(tol), int(max_iter), _scale_for(Xi))
    status = int(status)
    if status != _kernels.SEARCH_VERIFIED:
        return NumericResult(False, int(its), None, status)
    Xo = Xi.astype(object)
    cert = _assemble(Xo, ia, ib, [chain[k].astype(object) for k in range(nchain)], alive)
    if cert is None or not separates(vs, a, b, cert, members=[int(i) for i in idx]):
        return NumericResult(False, int(its), None, _kernels.SEARCH_EXHAUSTED)
    face = tuple(int(idx[j]) for j in np.flatnonzero(alive))
    return NumericResult(True, int(its), cert, status, face)


def verify_edge_numeric(vs: VertexSet, a: int, b: int, max_iter: int = DEFAULT_MAX_ITER,
                        seed=None, eps: float = DEFAULT_EPS, tol: float = DEFAULT_TOL) -> bool:
    """True only if a separating cost vector was found and rechecked exactly.

    False is inconclusive: the pair may still be an edge.
    """
    return numeric_search(vs, a, b, max_iter, seed, eps, tol).verified
