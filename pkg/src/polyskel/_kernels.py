"""Hot inner loops, compiled with numba when available.

Set ``POLYSKEL_DISABLE_JIT=1`` to force the pure-numpy implementations.  Both
paths implement the same algorithms; ``JIT_ENABLED`` tells which is active.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("POLYSKEL_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
except ImportError:  # pragma: no cover - exercised via the env flag in CI
    njit = None

JIT_ENABLED = njit is not None

# numeric search exit codes
SEARCH_VERIFIED = 1
SEARCH_EXHAUSTED = 0
SEARCH_DEGENERATE = -1


# ---------------------------------------------------------------------------
# numpy reference implementations


def face_mask_np(arr, a, b):
    agree = a == b
    if not agree.any():
        return np.ones(arr.shape[0], dtype=np.bool_)
    return np.all(arr[:, agree] == a[agree], axis=1)


def group_partners_np(new_group):
    """Partner position for every sorted record.

    ``new_group[k]`` is True when record k starts a new sum-key group.  Records
    of a group are paired off two by two; in odd groups the last record points
    at the first one.  Singleton groups get -1.
    """
    p = len(new_group)
    out = np.full(p, -1, dtype=np.int64)
    if p == 0:
        return out
    starts = np.flatnonzero(new_group)
    ends = np.append(starts[1:], p)
    sizes = ends - starts
    pos = np.arange(p)
    gstart = np.repeat(starts, sizes)
    gsize = np.repeat(sizes, sizes)
    off = pos - gstart
    even = off % 2 == 0
    out = np.where(even, pos + 1, pos - 1)
    odd_tail = (gsize % 2 == 1) & (off == gsize - 1)
    out[odd_tail] = gstart[odd_tail]
    out[gsize == 1] = -1
    return out


def _integerize_np(c, delta_i, dd, scale):
    ci = np.rint(c * scale).astype(np.int64)
    return ci * dd - (ci @ delta_i) * delta_i


def _update_np(c, alpha, delta, dd, mu, eps, nudge):
    d = c.shape[0]
    cm = 2.0 * mu - 1.0
    cm = cm / np.linalg.norm(cm)
    diff = alpha - mu
    for attempt in range(9):
        if attempt:
            cm = cm + nudge * (attempt / 8.0)
        p = cm - (delta @ cm) / dd * delta
        den = p @ diff
        if abs(den) > 1e-12:
            lam = (c @ diff) / den - eps * np.sign(den)
            out = c - lam * p
            out = out - (out @ delta) / dd * delta
            nrm = np.linalg.norm(out)
            if nrm == 0.0:
                return out, False
            return out / nrm, True
    return c, False


def numeric_search_np(X, Xi, ia, ib, c0, randoms, eps, tol, max_iter, scale):
    m, d = X.shape
    alive = np.ones(m, dtype=np.bool_)
    n_alive = m
    alpha = X[ia]
    delta = X[ia] - X[ib]
    dd = float(delta @ delta)
    delta_i = Xi[ia] - Xi[ib]
    dd_i = int(delta_i @ delta_i)
    chain = np.zeros((max_iter, d), dtype=np.int64)
    nchain = 0
    c = c0.copy()
    if n_alive <= 3:
        return SEARCH_VERIFIED, 0, chain, nchain, alive
    for it in range(max_iter):
        idx = np.flatnonzero(alive)
        s = X[idx] @ c
        sa = alpha @ c
        mu = -1
        top = int(np.argmax(s))
        if s[top] > sa + tol:
            mu = idx[top]
        else:
            ci = _integerize_np(c, delta_i, dd_i, scale)
            si = Xi[idx] @ ci
            sai = Xi[ia] @ ci
            top = int(np.argmax(si))
            if si[top] > sai:
                mu = idx[top]
            elif np.any(ci != 0):
                drop = idx[si < sai]
                if len(drop):
                    alive[drop] = False
                    n_alive -= len(drop)
                    chain[nchain] = ci
                    nchain += 1
                # restart from a fresh direction inside the smaller face
                r = randoms[it] - (randoms[it] @ delta) / dd * delta
                nr = np.linalg.norm(r)
                if nr > 0:
                    c = r / nr
            else:
                r = randoms[it] - (randoms[it] @ delta) / dd * delta
                c = r / np.linalg.norm(r)
        if mu >= 0:
            nudge = randoms[it] / d
            c, ok = _update_np(c, alpha, delta, dd, X[mu], eps, nudge)
            if not ok:
                return SEARCH_DEGENERATE, it + 1, chain, nchain, alive
        if n_alive <= 3:
            return SEARCH_VERIFIED, it + 1, chain, nchain, alive
    return SEARCH_EXHAUSTED, max_iter, chain, nchain, alive


# ---------------------------------------------------------------------------
# numba versions

if JIT_ENABLED:

    @njit(cache=True, nogil=True)
    def face_mask_nb(arr, a, b):
        m, d = arr.shape
        out = np.ones(m, dtype=np.bool_)
        for j in range(m):
            for i in range(d):
                if a[i] == b[i] and arr[j, i] != a[i]:
                    out[j] = False
                    break
        return out

    @njit(cache=True, nogil=True)
    def group_partners_nb(new_group):
        p = new_group.shape[0]
        out = np.full(p, -1, dtype=np.int64)
        k = 0
        while k < p:
            e = k + 1
            while e < p and not new_group[e]:
                e += 1
            size = e - k
            if size >= 2:
                j = k
                while j + 1 < e:
                    out[j] = j + 1
                    out[j + 1] = j
                    j += 2
                if size % 2 == 1:
                    out[e - 1] = k
            k = e
        return out

    @njit(cache=True, nogil=True)
    def _norm_nb(x):
        s = 0.0
        for i in range(x.shape[0]):
            s += x[i] * x[i]
        return np.sqrt(s)

    @njit(cache=True, nogil=True)
    def _update_nb(c, alpha, delta, dd, mu, eps, nudge):
        cm = 2.0 * mu - 1.0
        cm = cm / _norm_nb(cm)
        diff = alpha - mu
        for attempt in range(9):
            if attempt > 0:
                cm = cm + nudge * (attempt / 8.0)
            p = cm - (np.dot(delta, cm) / dd) * delta
            den = np.dot(p, diff)
            if abs(den) > 1e-12:
                lam = np.dot(c, diff) / den - eps * np.sign(den)
                out = c - lam * p
                out = out - (np.dot(out, delta) / dd) * delta
                nrm = _norm_nb(out)
                if nrm == 0.0:
                    return out, False
                return out / nrm, True
        return c, False

    @njit(cache=True, nogil=True)
    def numeric_search_nb(X, Xi, ia, ib, c0, randoms, eps, tol, max_iter, scale):
        m, d = X.shape
        alive = np.ones(m, dtype=np.bool_)
        n_alive = m
        alpha = X[ia].copy()
        delta = X[ia] - X[ib]
        dd = np.dot(delta, delta)
        delta_i = Xi[ia] - Xi[ib]
        dd_i = 0
        for i in range(d):
            dd_i += delta_i[i] * delta_i[i]
        chain = np.zeros((max_iter, d), dtype=np.int64)
        nchain = 0
        c = c0.copy()
        ci = np.zeros(d, dtype=np.int64)
        if n_alive <= 3:
            return SEARCH_VERIFIED, 0, chain, nchain, alive
        for it in range(max_iter):
            sa = np.dot(alpha, c)
            mu = -1
            best = sa + tol
            for j in range(m):
                if alive[j]:
                    s = 0.0
                    for i in range(d):
                        s += X[j, i] * c[i]
                    if s > best:
                        best = s
                        mu = j
            if mu < 0:
                proj = 0
                for i in range(d):
                    ci[i] = np.int64(np.rint(c[i] * scale))
                    proj += ci[i] * delta_i[i]
                nonzero = False
                for i in range(d):
                    ci[i] = ci[i] * dd_i - proj * delta_i[i]
                    if ci[i] != 0:
                        nonzero = True
                sai = 0
                for i in range(d):
                    sai += Xi[ia, i] * ci[i]
                best_i = sai
                for j in range(m):
                    if alive[j]:
                        si = 0
                        for i in range(d):
                            si += Xi[j, i] * ci[i]
                        if si > best_i:
                            best_i = si
                            mu = j
                if mu < 0 and nonzero:
                    dropped = 0
                    for j in range(m):
                        if alive[j]:
                            si = 0
                            for i in range(d):
                                si += Xi[j, i] * ci[i]
                            if si < sai:
                                alive[j] = False
                                dropped += 1
                    if dropped > 0:
                        n_alive -= dropped
                        chain[nchain] = ci
                        nchain += 1
                if mu < 0:
                    r = randoms[it] - (np.dot(randoms[it], delta) / dd) * delta
                    nr = _norm_nb(r)
                    if nr > 0:
                        c = r / nr
            if mu >= 0:
                nudge = randoms[it] / d
                c, ok = _update_nb(c, alpha, delta, dd, X[mu], eps, nudge)
                if not ok:
                    return SEARCH_DEGENERATE, it + 1, chain, nchain, alive
            if n_alive <= 3:
                return SEARCH_VERIFIED, it + 1, chain, nchain, alive
        return SEARCH_EXHAUSTED, max_iter, chain, nchain, alive

    face_mask = face_mask_nb
    group_partners = group_partners_nb
    numeric_search = numeric_search_nb
else:
    face_mask = face_mask_np
    group_partners = group_partners_np
    numeric_search = numeric_search_np


def backend() -> str:
    return "numba" if JIT_ENABLED else "numpy"
