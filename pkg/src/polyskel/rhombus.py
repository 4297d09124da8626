"""The rhombus-criterion prefilter and the fulfillment audit.

Two pairs {a, b} and {a', b'} with a + b = a' + b' are witnesses for each
other, and neither can be an edge.  Sorting the ledger by the sum key puts
all such pairs next to each other, so one sort and one linear pass find them.
"""
from __future__ import annotations

import logging
import math
import os
import tempfile
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from . import _kernels
from .core import (EDGE, NON_EDGE, SOURCE_RHOMBUS, UNKNOWN, PairLedger, VertexSet,
                   make_ledger, pair_sums)
from .errors import DomainError

log = logging.getLogger(__name__)


def sum_key(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a + b


@lru_cache(maxsize=64)
def _packing(base: int, d: int) -> tuple:
    """Column blocks and positional weights for packing d digits of ``base``."""
    per_col = max(1, int(62 / math.log2(base))) if base > 1 else d
    blocks = tuple((start, min(start + per_col, d)) for start in range(0, d, per_col))
    weights = tuple(base ** np.arange(stop - start - 1, -1, -1, dtype=np.int64)
                    for start, stop in blocks)
    return blocks, weights


def encode_keys(keys: np.ndarray, chunk: int = 1 << 14, value_range=None) -> np.ndarray:
    """Pack each key row into as few int64 columns as possible.

    Packing is positional (first coordinate most significant), so comparing
    packed rows lexicographically equals comparing the original rows.
    ``value_range`` fixes (min, max) so separate batches encode alike.
    """
    keys = np.asarray(keys)
    if keys.ndim != 2:
        raise DomainError("keys must be a 2-d array")
    p, d = keys.shape
    if p == 0 or d == 0:
        return np.zeros((p, 1), dtype=np.int64)
    lo, hi = (int(keys.min()), int(keys.max())) if value_range is None else value_range
    blocks, weights = _packing(int(hi) - int(lo) + 1, d)
    out = np.empty((p, len(blocks)), dtype=np.int64)
    for r0 in range(0, p, chunk):
        shifted = keys[r0:r0 + chunk].astype(np.int64)
        if lo:
            shifted -= lo
        for c, (start, stop) in enumerate(blocks):
            out[r0:r0 + chunk, c] = shifted[:, start:stop] @ weights[c]
    return out


def sorted_groups(keys: np.ndarray, value_range=None) -> tuple[np.ndarray, np.ndarray]:
    """Sort order of the key rows and the group-start flags in that order."""
    enc = encode_keys(keys, value_range=value_range)
    new_group = np.ones(len(enc), dtype=np.bool_)
    if enc.shape[1] == 1:
        col = enc[:, 0]
        order = np.argsort(col, kind="stable")
        s = col[order]
        np.not_equal(s[1:], s[:-1], out=new_group[1:])
    else:
        order = np.lexsort(enc.T[::-1])
        s = enc[order]
        if len(order) > 1:
            new_group[1:] = np.any(s[1:] != s[:-1], axis=1)
    return order, new_group


def rhombus_scan(ledger: PairLedger, vs: VertexSet | None = None) -> PairLedger:
    """Mark every pair that shares its sum key with another pair as a non-edge.

    Each marked record gets a witness pair from its own group; statuses of
    pairs in singleton groups are left alone.  The ledger is updated in place
    and returned; ``ledger.n_groups`` records the number of groups with two
    or more members.
    """
    if ledger.sum_keys is None:
        if vs is None:
            raise DomainError("ledger has no sum keys and no vertex set was given")
        ledger.sum_keys = pair_sums(vs.array, ledger.a, ledger.b)
    rng = None
    if vs is not None and len(vs):
        rng = (2 * int(vs.array.min()), 2 * int(vs.array.max()))
    order, new_group = sorted_groups(ledger.sum_keys, rng)
    partner = _kernels.group_partners(new_group)
    hit = partner >= 0
    rec = order[hit]
    wit = order[partner[hit]]
    ledger.status[rec] = NON_EDGE
    ledger.source[rec] = SOURCE_RHOMBUS
    ledger.witness_a[rec] = ledger.a[wit]
    ledger.witness_b[rec] = ledger.b[wit]
    # a group of size >= 2 starts where new_group is followed by a non-start
    ledger.n_groups = int(np.count_nonzero(new_group[:-1] & ~new_group[1:]))
    return ledger


def find_witness(vs: VertexSet, a: int, b: int) -> tuple[int, int] | None:
    """Some pair {a', b'} other than {a, b} with the same sum, if any."""
    arr = vs.array
    target = arr[a] + arr[b]
    for i, row in enumerate(arr):
        if i == a or i == b:
            continue
        other = tuple((target - row).tolist())
        if other in vs:
            j = vs.index_of(other)
            if j not in (a, b, i):
                return (i, j) if i < j else (j, i)
    return None


def _as_status(value) -> int:
    if isinstance(value, (bool, np.bool_)):
        return EDGE if value else NON_EDGE
    status = getattr(value, "status", value)
    code = getattr(status, "code", status)
    return int(code)


@dataclass
class FulfillmentReport:
    fulfills: bool
    violations: list = field(default_factory=list)
    pairs: int = 0
    with_witness: int = 0
    oracle_calls: int = 0

    def as_dict(self) -> dict:
        return {"fulfills": self.fulfills, "violations": [list(p) for p in self.violations],
                "pairs": self.pairs, "with_witness": self.with_witness,
                "oracle_calls": self.oracle_calls}


def check_fulfillment(vs: VertexSet, edge_oracle: Callable[[int, int], object],
                      pairs: Iterable[tuple[int, int]] | None = None) -> FulfillmentReport:
    """A pair violates the criterion iff it is a non-edge and has no witnesses.

    Witness existence is settled first; the oracle is only asked about pairs
    without witnesses.  ``pairs`` restricts the audit to the given pairs.
    """
    if pairs is None:
        led = rhombus_scan(make_ledger(vs, with_keys=True), vs)
        todo = np.flatnonzero(led.status != NON_EDGE)
        candidates = list(zip(led.a[todo].tolist(), led.b[todo].tolist()))
        total = len(led)
    else:
        candidates = []
        total = 0
        for a, b in pairs:
            total += 1
            if find_witness(vs, a, b) is None:
                candidates.append((min(a, b), max(a, b)))
    violations = []
    for a, b in candidates:
        if _as_status(edge_oracle(a, b)) == NON_EDGE:
            violations.append((a, b))
    return FulfillmentReport(not violations, violations, total, total - len(candidates),
                             len(candidates))


# ---------------------------------------------------------------------------
# sharded scan for ledgers above the memory budget


_HASH_MULT = np.int64(0x9E3779B97F4A7C15 - (1 << 64))


@dataclass
class ShardedScan:
    """Result of a key-partitioned scan.

    ``unknown_paths`` hold, per shard, an ``(k, 2)`` int32 array of the pairs
    left unknown; ``marked`` counts the pairs marked as non-edges.
    """

    workdir: Path
    unknown_paths: list
    marked: int
    groups: int
    pairs: int

    def iter_unknown(self):
        for path in self.unknown_paths:
            yield np.load(path)


def sharded_rhombus_scan(vs: VertexSet, n_shards: int = 16, workdir=None,
                         block_rows: int = 256) -> ShardedScan:
    """Rhombus scan without materializing the ledger.

    Pairs are routed to shards by a hash of their sum key, so every group of
    equal keys lands in one shard and each shard is scanned independently.
    """
    workdir = Path(workdir or tempfile.mkdtemp(prefix="polyskel-shards-"))
    workdir.mkdir(parents=True, exist_ok=True)
    arr = vs.array
    v = len(vs)
    pieces = [[] for _ in range(n_shards)]
    counters = [0] * n_shards
    total = 0
    key_range = (2 * int(arr.min()), 2 * int(arr.max())) if v else (0, 0)

    def flush(s):
        if pieces[s]:
            chunk = np.concatenate(pieces[s])
            np.save(workdir / f"in-{s:04d}-{counters[s]:06d}.npy", chunk)
            counters[s] += 1
            pieces[s] = []

    buffered = 0
    for lo in range(0, v - 1, block_rows):
        hi = min(lo + block_rows, v - 1)
        a_list, b_list = [], []
        for i in range(lo, hi):
            js = np.arange(i + 1, v, dtype=np.int32)
            a_list.append(np.full(len(js), i, dtype=np.int32))
            b_list.append(js)
        a = np.concatenate(a_list)
        b = np.concatenate(b_list)
        total += len(a)
        enc = encode_keys(pair_sums(arr, a, b), value_range=key_range)
        h = np.zeros(len(a), dtype=np.int64)
        for j in range(enc.shape[1]):
            h = (h ^ enc[:, j]) * _HASH_MULT
        shard = (h >> 17) % n_shards
        for s in range(n_shards):
            sel = shard == s
            if sel.any():
                pieces[s].append(np.stack([a[sel], b[sel]], axis=1))
        buffered += len(a)
        if buffered > 1 << 22:
            for s in range(n_shards):
                flush(s)
            buffered = 0
    for s in range(n_shards):
        flush(s)

    unknown_paths = []
    marked = 0
    groups = 0
    for s in range(n_shards):
        files = sorted(workdir.glob(f"in-{s:04d}-*.npy"))
        if files:
            pairs = np.concatenate([np.load(f) for f in files])
        else:
            pairs = np.zeros((0, 2), dtype=np.int32)
        for f in files:
            os.remove(f)
        if len(pairs):
            order, new_group = sorted_groups(pair_sums(arr, pairs[:, 0], pairs[:, 1]))
            partner = _kernels.group_partners(new_group)
            starts = np.flatnonzero(new_group)
            sizes = np.diff(np.append(starts, len(order)))
            groups += int(np.count_nonzero(sizes >= 2))
            keep = np.sort(order[partner < 0])
            marked += int(np.count_nonzero(partner >= 0))
            left = pairs[keep]
        else:
            left = pairs
        path = workdir / f"unknown-{s:04d}.npy"
        np.save(path, left)
        unknown_paths.append(path)
    log.info("sharded scan: %d pairs, %d marked, %d groups", total, marked, groups)
    return ShardedScan(workdir, unknown_paths, marked, groups, total)
