"""Vertex sets, canonical imset coordinates, the pair ledger and file I/O."""
from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, MemoryBudgetError, ParseError

log = logging.getLogger(__name__)

NON_EDGE = -1
UNKNOWN = 0
EDGE = 1

STATUS_NAMES = {NON_EDGE: "non-edge", UNKNOWN: "unknown", EDGE: "edge"}

# how a ledger status was decided
SOURCE_NONE = 0
SOURCE_RHOMBUS = 1
SOURCE_EXACT = 2
SOURCE_NUMERIC = 3

DEFAULT_MEM_BUDGET = 10**8


def mem_budget() -> int:
    raw = os.environ.get("POLYSKEL_MEM_BUDGET")
    return int(float(raw)) if raw else DEFAULT_MEM_BUDGET


# ---------------------------------------------------------------------------
# canonical subset order: by cardinality, then lexicographic on sorted members


@lru_cache(maxsize=None)
def subsets(n: int) -> tuple[tuple[int, ...], ...]:
    """All subsets of {0..n-1} with at least two members, in canonical order."""
    if n < 2:
        return ()
    return tuple(
        s for k in range(2, n + 1) for s in itertools.combinations(range(n), k)
    )


@lru_cache(maxsize=None)
def _subset_lookup(n: int) -> dict[frozenset, int]:
    return {frozenset(s): i for i, s in enumerate(subsets(n))}


def imset_dim(n: int) -> int:
    return 2**n - n - 1


def subset_index(s: Iterable[int], n: int) -> int:
    key = frozenset(s)
    if len(key) < 2:
        raise DomainError(f"subset {sorted(key)} has fewer than two members")
    try:
        return _subset_lookup(n)[key]
    except KeyError:
        raise DomainError(f"subset {sorted(key)} is not contained in range({n})") from None


def index_subset(i: int, n: int) -> tuple[int, ...]:
    subs = subsets(n)
    if not 0 <= i < len(subs):
        raise DomainError(f"index {i} out of range for n={n}")
    return subs[i]


def pair_index(i: int, j: int, n: int) -> int:
    """Position of the 2-subset {i, j}; 2-subsets come first in canonical order."""
    if i == j:
        raise DomainError("pair needs two distinct nodes")
    if i > j:
        i, j = j, i
    if not 0 <= i < j < n:
        raise DomainError(f"pair ({i}, {j}) out of range for n={n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


# ---------------------------------------------------------------------------
# vertex sets


def _as_int_rows(rows) -> np.ndarray:
    try:
        arr = np.asarray(rows)
    except ValueError:
        raise DomainError("vertex rows must all have the same length") from None
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    if arr.ndim != 2:
        raise DomainError("vertex data must be two-dimensional")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(np.int64)
        if not np.array_equal(as_int, arr):
            raise DomainError("vertex coordinates must be integers")
        arr = as_int
    return arr.astype(np.int64, copy=False)


class VertexSet:
    """Immutable, deduplicated and indexed collection of integer vertices.

    Duplicates are dropped keeping the first occurrence, so indices follow the
    input order.
    """

    def __init__(self, rows, family_tag: str | None = None, *, dim: int | None = None):
        arr = _as_int_rows(rows)
        if arr.shape[0] == 0 and dim is not None:
            arr = arr.reshape(0, dim)
        if arr.shape[0]:
            _, first = np.unique(arr, axis=0, return_index=True)
            if len(first) != arr.shape[0]:
                log.warning("dropped %d duplicate vertices", arr.shape[0] - len(first))
                arr = arr[np.sort(first)]
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        self._array = arr
        self.family_tag = family_tag
        self._index = None

    @property
    def array(self) -> np.ndarray:
        return self._array

    @property
    def dim(self) -> int:
        return self._array.shape[1]

    def __len__(self) -> int:
        return self._array.shape[0]

    def __getitem__(self, i) -> np.ndarray:
        return self._array[i]

    def __iter__(self):
        return iter(self._array)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VertexSet):
            return NotImplemented
        return self._array.shape == other._array.shape and np.array_equal(
            self._array, other._array
        )

    def __repr__(self) -> str:
        tag = f", family_tag={self.family_tag!r}" if self.family_tag else ""
        return f"VertexSet({len(self)} vertices, dim={self.dim}{tag})"

    def index_of(self, vertex) -> int:
        if self._index is None:
            self._index = {tuple(r): i for i, r in enumerate(self._array.tolist())}
        key = tuple(int(x) for x in vertex)
        try:
            return self._index[key]
        except KeyError:
            raise DomainError(f"{key} is not a vertex of this set") from None

    def __contains__(self, vertex) -> bool:
        try:
            self.index_of(vertex)
        except DomainError:
            return False
        return True

    def subset(self, indices) -> "VertexSet":
        return VertexSet(self._array[np.asarray(indices, dtype=np.int64)], self.family_tag,
                         dim=self.dim)

    def as_set(self) -> set[tuple[int, ...]]:
        return {tuple(r) for r in self._array.tolist()}

    def is_binary(self) -> bool:
        return bool(np.all((self._array == 0) | (self._array == 1)))

    def sorted(self) -> "VertexSet":
        """Copy in lexicographic order of the coordinate vectors."""
        if len(self) == 0:
            return self
        order = np.lexsort(self._array.T[::-1])
        return VertexSet(self._array[order], self.family_tag)


def read_vertices(source) -> VertexSet:
    """Read the plain-text vertex format: a ``"<v> <d>"`` header, then v rows."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            return _parse_vertices(fh)
    return _parse_vertices(source)


def _parse_vertices(fh) -> VertexSet:
    tag = None
    header = None
    rows: list[list[int]] = []
    for lineno, raw in enumerate(fh, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("family:"):
                tag = body[len("family:"):].strip() or None
            continue
        tokens = line.split()
        try:
            values = [int(t) for t in tokens]
        except ValueError:
            raise ParseError(f"non-integer token in {line!r}", lineno) from None
        if header is None:
            if len(values) != 2 or values[0] < 0 or values[1] <= 0:
                raise ParseError("header must be '<vertex count> <dimension>'", lineno)
            header = values
            continue
        if len(values) != header[1]:
            raise ParseError(f"expected {header[1]} coordinates, got {len(values)}", lineno)
        rows.append(values)
        if len(rows) > header[0]:
            raise ParseError(f"more than the declared {header[0]} vertices", lineno)
    if header is None:
        raise ParseError("empty vertex file", 1)
    if len(rows) != header[0]:
        raise ParseError(f"declared {header[0]} vertices, found {len(rows)}", None)
    return VertexSet(np.array(rows, dtype=np.int64).reshape(len(rows), header[1]), tag,
                     dim=header[1])


def write_vertices(vs: VertexSet, target) -> None:
    lines = []
    if vs.family_tag:
        lines.append(f"# family: {vs.family_tag}")
    lines.append(f"{len(vs)} {vs.dim}")
    lines.extend(" ".join(map(str, row)) for row in vs.array.tolist())
    text = "\n".join(lines) + "\n"
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


# ---------------------------------------------------------------------------
# the pair ledger


@dataclass(frozen=True)
class PairRecord:
    a: int
    b: int
    status: int = UNKNOWN
    sum_key: tuple[int, ...] | None = None
    witness: tuple[int, int] | None = None


def _key_dtype(vertices: np.ndarray):
    bound = 2 * int(np.abs(vertices).max()) if vertices.size else 0
    for dt in (np.int8, np.int16, np.int32):
        if bound <= np.iinfo(dt).max:
            return dt
    return np.int64


class PairLedger:
    """Column-oriented table of all unordered vertex pairs.

    ``status`` holds -1/0/+1 (non-edge, unknown, edge); ``witness_a`` and
    ``witness_b`` are -1 when no witness pair is recorded.  ``source`` says
    which stage decided the status and ``iterations`` keeps the numeric
    search effort per pair.
    """

    def __init__(self, a, b, vertex_count: int, sum_keys=None):
        self.a = np.asarray(a, dtype=np.int32)
        self.b = np.asarray(b, dtype=np.int32)
        self.vertex_count = int(vertex_count)
        n = len(self.a)
        self.status = np.zeros(n, dtype=np.int8)
        self.witness_a = np.full(n, -1, dtype=np.int32)
        self.witness_b = np.full(n, -1, dtype=np.int32)
        self.source = np.zeros(n, dtype=np.int8)
        self.iterations = np.zeros(n, dtype=np.int32)
        self.sum_keys = sum_keys

    def __len__(self) -> int:
        return len(self.a)

    @property
    def records(self) -> list[PairRecord]:
        return [self.record(k) for k in range(len(self))]

    def record(self, k: int) -> PairRecord:
        wa, wb = int(self.witness_a[k]), int(self.witness_b[k])
        key = None if self.sum_keys is None else tuple(int(x) for x in self.sum_keys[k])
        return PairRecord(int(self.a[k]), int(self.b[k]), int(self.status[k]), key,
                          (wa, wb) if wa >= 0 else None)

    def position(self, a: int, b: int) -> int:
        """Row of the pair {a, b} in a fully materialized, unsorted ledger."""
        if a > b:
            a, b = b, a
        v = self.vertex_count
        k = a * v - a * (a + 1) // 2 + (b - a - 1)
        if not (0 <= k < len(self)) or self.a[k] != a or self.b[k] != b:
            hit = np.flatnonzero((self.a == a) & (self.b == b))
            if len(hit) != 1:
                raise DomainError(f"pair ({a}, {b}) not in ledger")
            k = int(hit[0])
        return k

    def counts(self) -> dict[str, int]:
        return {
            "edges": int(np.count_nonzero(self.status == EDGE)),
            "non_edges": int(np.count_nonzero(self.status == NON_EDGE)),
            "unknown": int(np.count_nonzero(self.status == UNKNOWN)),
        }

    def edges(self) -> list[tuple[int, int]]:
        mask = self.status == EDGE
        pairs = sorted(zip(self.a[mask].tolist(), self.b[mask].tolist()))
        return pairs

    def write_csv(self, target) -> None:
        own = isinstance(target, (str, Path))
        fh = open(target, "w", newline="", encoding="utf-8") if own else target
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["a", "b", "status", "witness_a", "witness_b"])
            for a, b, s, wa, wb in zip(self.a.tolist(), self.b.tolist(), self.status.tolist(),
                                       self.witness_a.tolist(), self.witness_b.tolist()):
                w.writerow([a, b, s, wa if wa >= 0 else "", wb if wb >= 0 else ""])
        finally:
            if own:
                fh.close()

    @classmethod
    def read_csv(cls, source, vertex_count: int | None = None) -> "PairLedger":
        own = isinstance(source, (str, Path))
        fh = open(source, newline="", encoding="utf-8") if own else source
        try:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["a", "b", "status", "witness_a", "witness_b"]:
                raise ParseError(f"unexpected ledger header {header}", 1)
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if len(row) != 5:
                    raise ParseError("ledger rows need five fields", lineno)
                try:
                    rows.append([int(row[0]), int(row[1]), int(row[2]),
                                 int(row[3]) if row[3] else -1, int(row[4]) if row[4] else -1])
                except ValueError:
                    raise ParseError(f"bad ledger row {row}", lineno) from None
        finally:
            if own:
                fh.close()
        data = np.array(rows, dtype=np.int64).reshape(-1, 5)
        if vertex_count is None:
            vertex_count = int(data[:, :2].max()) + 1 if len(data) else 0
        led = cls(data[:, 0], data[:, 1], vertex_count)
        led.status[:] = data[:, 2]
        led.witness_a[:] = data[:, 3]
        led.witness_b[:] = data[:, 4]
        return led


def make_ledger(vs: VertexSet, with_keys: bool = True, *, budget: int | None = None) -> PairLedger:
    v = len(vs)
    if v < 2:
        raise DomainError("a ledger needs at least two vertices")
    count = math.comb(v, 2)
    limit = mem_budget() if budget is None else budget
    if count > limit:
        raise MemoryBudgetError(
            f"{count} pairs exceed the in-memory budget of {limit} records; "
            "use the sharded scan (rhombus.sharded_rhombus_scan) or raise "
            "POLYSKEL_MEM_BUDGET"
        )
    a, b = np.triu_indices(v, k=1)
    led = PairLedger(a, b, v)
    if with_keys:
        led.sum_keys = pair_sums(vs.array, led.a, led.b)
    return led


def pair_sums(vertices: np.ndarray, a: np.ndarray, b: np.ndarray,
              chunk: int = 1 << 20) -> np.ndarray:
    dt = _key_dtype(vertices)
    src = vertices.astype(dt)
    out = np.empty((len(a), vertices.shape[1]), dtype=dt)
    for lo in range(0, len(a), chunk):
        hi = lo + chunk
        np.add(src[a[lo:hi]], src[b[lo:hi]], out=out[lo:hi])
    return out


def skeleton_json(vs: VertexSet, edges: Sequence[tuple[int, int]]) -> dict:
    return {
        "dim": vs.dim,
        "vertices": len(vs),
        "edges": [[int(i), int(j)] for i, j in sorted((min(p), max(p)) for p in edges)],
    }


def write_skeleton(vs: VertexSet, edges, target) -> None:
    text = json.dumps(skeleton_json(vs, edges))
    if isinstance(target, (str, Path)):
        Path(target).write_text(text + "\n", encoding="utf-8")
    else:
        target.write(text)


def read_vertices_text(text: str) -> VertexSet:
    return read_vertices(io.StringIO(text))
