"""Face restriction for 0/1-polytopes and the chordal compatibility machinery.

Imsets are handled internally as Python ``int`` bitmasks over the canonical
subset order (bit k is the coordinate of ``subsets(n)[k]``).
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .core import VertexSet, subsets
from .errors import DomainError, IndeterminateError
from .families import UGraph

DEFAULT_COMPONENT_CAP = 20


def face_cost(a, b) -> np.ndarray:
    """+1 where both are 1, -1 where both are 0, 0 where they disagree."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DomainError("vertices differ in dimension")
    if not (np.isin(a, (0, 1)).all() and np.isin(b, (0, 1)).all()):
        raise DomainError("face_cost needs 0/1 vertices")
    out = np.zeros(a.shape, dtype=np.int64)
    out[(a == 1) & (b == 1)] = 1
    out[(a == 0) & (b == 0)] = -1
    return out


def restrict_face(vs: VertexSet, a: int, b: int) -> np.ndarray:
    """Indices of all vertices agreeing with a and b wherever those two agree."""
    if a == b:
        raise DomainError("restrict_face needs two distinct vertices")
    if not vs.is_binary():
        raise DomainError("restrict_face is only defined for 0/1 vertex sets")
    arr = vs.array
    mask = _kernels.face_mask(arr, arr[a], arr[b])
    return np.flatnonzero(mask)


# ---------------------------------------------------------------------------
# chordality


def is_chordal(g: UGraph) -> bool:
    """Maximum cardinality search followed by a perfect elimination check."""
    return perfect_elimination_order(g) is not None


def perfect_elimination_order(g: UGraph) -> list[int] | None:
    n = g.n
    weight = [0] * n
    numbered = [False] * n
    visit = []
    for _ in range(n):
        v = max((u for u in range(n) if not numbered[u]), key=lambda u: (weight[u], -u))
        numbered[v] = True
        visit.append(v)
        for w in g.neighbors(v):
            if not numbered[w]:
                weight[w] += 1
    pos = {v: k for k, v in enumerate(visit)}
    for v in visit:
        earlier = [w for w in g.neighbors(v) if pos[w] < pos[v]]
        if len(earlier) < 2:
            continue
        u = max(earlier, key=pos.__getitem__)
        nbrs = g.neighbors(u)
        if any(w != u and w not in nbrs for w in earlier):
            return None
    return visit[::-1]


def maximal_cliques(g: UGraph) -> list[frozenset]:
    out = []

    def expand(r, p, x):
        if not p and not x:
            out.append(frozenset(r))
            return
        pivot = max(p | x, key=lambda u: len(g.neighbors(u) & p))
        for v in sorted(p - g.neighbors(pivot)):
            expand(r | {v}, p & g.neighbors(v), x & g.neighbors(v))
            p = p - {v}
            x = x | {v}

    expand(set(), set(range(g.n)), set())
    return out


def split_partition(g: UGraph) -> tuple[frozenset, frozenset] | None:
    """(K, O) with K a maximum clique and O independent, or None if not split.

    Among valid maximum cliques the lexicographically smallest is chosen.
    """
    if g.n == 0:
        return frozenset(), frozenset()
    cliques = sorted(maximal_cliques(g), key=lambda c: (-len(c), sorted(c)))
    everything = frozenset(range(g.n))
    for k in cliques:
        rest = everything - k
        if g.is_independent(rest):
            return k, rest
    return None


def is_split(g: UGraph) -> bool:
    return split_partition(g) is not None


# ---------------------------------------------------------------------------
# imset bitmasks


@lru_cache(maxsize=None)
def _subset_bits(n: int) -> tuple[int, ...]:
    """Node bitmask of every canonical subset."""
    return tuple(sum(1 << i for i in s) for s in subsets(n))


@lru_cache(maxsize=None)
def _pair_positions(n: int) -> tuple[tuple[int, int, int], ...]:
    return tuple((k, s[0], s[1]) for k, s in enumerate(subsets(n)) if len(s) == 2)


def clique_mask(g: UGraph) -> int:
    adj = [sum(1 << w for w in g.neighbors(u)) | (1 << u) for u in range(g.n)]
    mask = 0
    for k, bits in enumerate(_subset_bits(g.n)):
        ok = True
        rem = bits
        while rem:
            low = rem & -rem
            if adj[low.bit_length() - 1] & bits != bits:
                ok = False
                break
            rem ^= low
        if ok:
            mask |= 1 << k
    return mask


def _graph_of_mask(mask: int, n: int) -> UGraph:
    return UGraph(n, frozenset((i, j) for k, i, j in _pair_positions(n) if mask >> k & 1))


def mask_to_vector(mask: int, n: int) -> np.ndarray:
    dim = len(subsets(n))
    return np.array([(mask >> k) & 1 for k in range(dim)], dtype=np.int64)


def vector_to_mask(vec) -> int:
    out = 0
    for k, x in enumerate(np.asarray(vec).tolist()):
        if x:
            out |= 1 << k
    return out


# ---------------------------------------------------------------------------
# Delta(G, H)


@dataclass(frozen=True)
class DeltaGraph:
    """Subsets on which two imsets differ; S ~ T iff S & T is also a node.

    ``nodes`` are canonical subset indices, ``component_of`` maps each node
    to a component id and ``components`` lists the nodes per component.
    ``g_value[c]`` is the constant value of c_G on component c.
    """

    n: int
    nodes: tuple[int, ...]
    component_of: dict
    components: tuple[tuple[int, ...], ...]
    g_value: tuple[int, ...]
    base_mask: int  # coordinates where both imsets are 1

    def __len__(self) -> int:
        return len(self.nodes)

    def adjacent(self, s: int, t: int) -> bool:
        if s == t:
            return False
        inter = _subset_bits(self.n)[s] & _subset_bits(self.n)[t]
        return _bits_index(self.n).get(inter) in self.component_of

    def component_mask(self, c: int) -> int:
        return self._comp_masks[c]

    @property
    def _comp_masks(self) -> tuple[int, ...]:
        cached = self.__dict__.get("_cm")
        if cached is None:
            cached = tuple(sum(1 << s for s in comp) for comp in self.components)
            object.__setattr__(self, "_cm", cached)
        return cached

    def selection_mask(self, chosen) -> int:
        out = self.base_mask
        for c in chosen:
            if not 0 <= c < len(self.components):
                raise DomainError(f"component id {c} out of range")
            out |= self._comp_masks[c]
        return out

    def g_selection(self) -> frozenset:
        return frozenset(c for c, v in enumerate(self.g_value) if v)

    def h_selection(self) -> frozenset:
        return frozenset(c for c, v in enumerate(self.g_value) if not v)


@lru_cache(maxsize=None)
def _bits_index(n: int) -> dict[int, int]:
    return {bits: k for k, bits in enumerate(_subset_bits(n))}


def delta_from_masks(cg: int, ch: int, n: int) -> DeltaGraph:
    diff = cg ^ ch
    bits = _subset_bits(n)
    index = _bits_index(n)
    nodes = tuple(k for k in range(len(bits)) if diff >> k & 1)
    parent = {s: s for s in nodes}

    def find(s):
        while parent[s] != s:
            parent[s] = parent[parent[s]]
            s = parent[s]
        return s

    for s, t in itertools.combinations(nodes, 2):
        inter = index.get(bits[s] & bits[t])
        if inter is not None and diff >> inter & 1:
            rs, rt = find(s), find(t)
            if rs != rt:
                parent[max(rs, rt)] = min(rs, rt)
    roots = sorted({find(s) for s in nodes})
    rid = {r: c for c, r in enumerate(roots)}
    component_of = {s: rid[find(s)] for s in nodes}
    comps = [[] for _ in roots]
    for s in nodes:
        comps[component_of[s]].append(s)
    g_value = tuple((cg >> comp[0]) & 1 for comp in comps)
    return DeltaGraph(n, nodes, component_of, tuple(tuple(c) for c in comps), g_value, cg & ch)


def delta_graph(g: UGraph, h: UGraph) -> DeltaGraph:
    if g.n != h.n:
        raise DomainError("graphs must have the same node count")
    return delta_from_masks(clique_mask(g), clique_mask(h), g.n)


def selection_imset(g: UGraph, h: UGraph, sel, delta: DeltaGraph | None = None) -> np.ndarray:
    """c_G = c_H off Delta, 1 on the chosen components and 0 on the rest."""
    delta = delta or delta_graph(g, h)
    return mask_to_vector(delta.selection_mask(sel), g.n)


class Compatibility(enum.Enum):
    COMPATIBLE = "compatible"
    NOT_CHORDAL = "not-chordal"
    EXTRA_CLIQUE = "extra-clique"


@dataclass(frozen=True)
class CompatibilityResult:
    verdict: Compatibility
    graph: UGraph | None = None  # the induced graph D
    extra: tuple[int, ...] | None = None  # a subset complete in D but 0 in the selection


def _check_mask(mask: int, n: int) -> CompatibilityResult:
    d = _graph_of_mask(mask, n)
    if not is_chordal(d):
        return CompatibilityResult(Compatibility.NOT_CHORDAL, d)
    cd = clique_mask(d)
    if cd != mask:
        extra = (cd & ~mask).bit_length() - 1
        return CompatibilityResult(Compatibility.EXTRA_CLIQUE, d, subsets(n)[extra])
    return CompatibilityResult(Compatibility.COMPATIBLE, d)


def chordally_compatible(g: UGraph, h: UGraph, sel,
                         delta: DeltaGraph | None = None) -> CompatibilityResult:
    if not (is_chordal(g) and is_chordal(h)):
        raise DomainError("chordally_compatible needs chordal graphs")
    delta = delta or delta_graph(g, h)
    return _check_mask(delta.selection_mask(sel), g.n)


def find_chordal_witnesses(g: UGraph, h: UGraph, cap: int = DEFAULT_COMPONENT_CAP,
                           delta: DeltaGraph | None = None) -> tuple[UGraph, UGraph] | None:
    """Search selections S with S and its complement both chordally compatible.

    Returns the witness graphs (D1, D2), whose imsets add up to c_G + c_H, or
    None when no selection other than the two reproducing G and H works.
    """
    if not (is_chordal(g) and is_chordal(h)):
        raise DomainError("find_chordal_witnesses needs chordal graphs")
    delta = delta or delta_graph(g, h)
    k = len(delta.components)
    if k == 0:
        raise DomainError("G and H have equal imsets")
    if k > cap:
        raise IndeterminateError(f"Delta(G, H) has {k} components, above the cap of {cap}")
    n = g.n
    full = (1 << k) - 1
    g_sel = sum(1 << c for c in delta.g_selection())
    skip = {g_sel, full ^ g_sel}
    comp_masks = [delta.component_mask(c) for c in range(k)]
    memo: dict[int, bool] = {}

    def ok(sel_bits: int) -> bool:
        hit = memo.get(sel_bits)
        if hit is None:
            mask = delta.base_mask
            for c in range(k):
                if sel_bits >> c & 1:
                    mask |= comp_masks[c]
            hit = _check_mask(mask, n).verdict is Compatibility.COMPATIBLE
            memo[sel_bits] = hit
        return hit

    # Gray-code order; S and its complement give the same witness pair
    for step in range(1 << k):
        sel_bits = step ^ (step >> 1)
        if sel_bits in skip or sel_bits > (full ^ sel_bits):
            continue
        if ok(sel_bits) and ok(full ^ sel_bits):
            m1 = delta.selection_mask(c for c in range(k) if sel_bits >> c & 1)
            m2 = delta.selection_mask(c for c in range(k) if not sel_bits >> c & 1)
            return _graph_of_mask(m1, n), _graph_of_mask(m2, n)
    return None


def compatible_selections(g: UGraph, h: UGraph, delta: DeltaGraph | None = None) -> list[frozenset]:
    """Every chordally compatible selection (exhaustive, for small Delta)."""
    delta = delta or delta_graph(g, h)
    k = len(delta.components)
    out = []
    for bits in range(1 << k):
        sel = frozenset(c for c in range(k) if bits >> c & 1)
        if _check_mask(delta.selection_mask(sel), g.n).verdict is Compatibility.COMPATIBLE:
            out.append(sel)
    return out
