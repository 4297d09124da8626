"""Vertex generators for the polytope families and the graph types they use.

Every generator returns its vertices in lexicographic order so indices are
reproducible between runs.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .core import VertexSet, imset_dim, pair_index, subset_index, subsets
from .errors import DomainError, ParseError


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class UGraph:
    n: int
    edges: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise DomainError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"edge ({u}, {v}) out of range for n={self.n}")
            norm.add(_norm_edge(u, v))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def complete(cls, n: int) -> "UGraph":
        return cls(n, frozenset(itertools.combinations(range(n), 2)))

    @classmethod
    def path(cls, n: int) -> "UGraph":
        return cls(n, frozenset((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> "UGraph":
        return cls(n, frozenset(_norm_edge(i, (i + 1) % n) for i in range(n)))

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def neighbors(self, u: int) -> frozenset:
        return self._adj[u]

    @property
    def _adj(self) -> tuple[frozenset, ...]:
        adj = self.__dict__.get("_adj_cache")
        if adj is None:
            sets = [set() for _ in range(self.n)]
            for u, v in self.edges:
                sets[u].add(v)
                sets[v].add(u)
            adj = tuple(frozenset(s) for s in sets)
            object.__setattr__(self, "_adj_cache", adj)
        return adj

    def is_clique(self, nodes) -> bool:
        nodes = list(nodes)
        return all(self.has_edge(u, v) for u, v in itertools.combinations(nodes, 2))

    def is_independent(self, nodes) -> bool:
        nodes = list(nodes)
        return not any(self.has_edge(u, v) for u, v in itertools.combinations(nodes, 2))

    def complement(self) -> "UGraph":
        return UGraph(self.n, frozenset(
            e for e in itertools.combinations(range(self.n), 2) if e not in self.edges))

    def union(self, other: "UGraph") -> "UGraph":
        return UGraph(self.n, self.edges | other.edges)

    def is_connected_on(self, nodes) -> bool:
        nodes = set(nodes)
        if not nodes:
            return True
        start = next(iter(nodes))
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            for w in self._adj[u]:
                if w in nodes and w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen == nodes

    def is_tree(self) -> bool:
        return len(self.edges) == self.n - 1 and self.is_connected_on(range(self.n))

    def __str__(self) -> str:
        return f"UGraph(n={self.n}, edges={sorted(self.edges)})"


@dataclass(frozen=True)
class Dag:
    n: int
    arcs: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        arcs = frozenset((int(u), int(v)) for u, v in self.arcs)
        for u, v in arcs:
            if u == v:
                raise DomainError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise DomainError(f"arc ({u}, {v}) out of range for n={self.n}")
            if (v, u) in arcs:
                raise DomainError(f"arcs {u}->{v} and {v}->{u} form a cycle")
        object.__setattr__(self, "arcs", arcs)
        if self._topological_order() is None:
            raise DomainError("arcs contain a directed cycle")

    def _topological_order(self):
        indeg = [0] * self.n
        out = [[] for _ in range(self.n)]
        for u, v in self.arcs:
            indeg[v] += 1
            out[u].append(v)
        ready = [i for i in range(self.n) if indeg[i] == 0]
        order = []
        while ready:
            u = ready.pop()
            order.append(u)
            for v in out[u]:
                indeg[v] -= 1
                if indeg[v] == 0:
                    ready.append(v)
        return order if len(order) == self.n else None

    @classmethod
    def from_parents(cls, parents) -> "Dag":
        return cls(len(parents), frozenset((p, i) for i, ps in enumerate(parents) for p in ps))

    def parents(self, i: int) -> frozenset:
        return frozenset(u for u, v in self.arcs if v == i)

    def parent_sets(self) -> tuple[frozenset, ...]:
        ps = [set() for _ in range(self.n)]
        for u, v in self.arcs:
            ps[v].add(u)
        return tuple(frozenset(p) for p in ps)

    def skeleton(self) -> UGraph:
        return UGraph(self.n, frozenset(_norm_edge(u, v) for u, v in self.arcs))

    def v_structures(self) -> set[tuple[int, int, int]]:
        """Triples (a, c, b) with a -> c <- b, a < b and a, b non-adjacent."""
        skel = self.skeleton()
        out = set()
        for c, ps in enumerate(self.parent_sets()):
            for a, b in itertools.combinations(sorted(ps), 2):
                if not skel.has_edge(a, b):
                    out.add((a, c, b))
        return out

    def __str__(self) -> str:
        return "Dag(n={}, arcs={})".format(
            self.n, ", ".join(f"{u}->{v}" for u, v in sorted(self.arcs)))


@dataclass(frozen=True)
class Matching:
    m: int
    n: int
    pairs: frozenset

    def __post_init__(self):
        pairs = frozenset((int(r), int(c)) for r, c in self.pairs)
        rows = [r for r, _ in pairs]
        cols = [c for _, c in pairs]
        if len(set(rows)) != len(rows) or len(set(cols)) != len(cols):
            raise DomainError("a matching may not repeat a row or column")
        if any(not (0 <= r < self.m and 0 <= c < self.n) for r, c in pairs):
            raise DomainError("matching entry out of range")
        object.__setattr__(self, "pairs", pairs)

    @property
    def k(self) -> int:
        return len(self.pairs)

    def vector(self) -> np.ndarray:
        out = np.zeros(self.m * self.n, dtype=np.int64)
        for r, c in self.pairs:
            out[r * self.n + c] = 1
        return out

    @classmethod
    def from_vector(cls, vec, m: int, n: int) -> "Matching":
        mat = np.asarray(vec).reshape(m, n)
        return cls(m, n, frozenset(zip(*map(lambda a: a.tolist(), np.nonzero(mat)))))


# ---------------------------------------------------------------------------
# imsets


@lru_cache(maxsize=None)
def _family_masks(n: int) -> tuple[dict, ...]:
    """For every node i, map parent set P to the bitmask of subsets S with
    i in S and S within P + {i}."""
    lookup = {frozenset(s): k for k, s in enumerate(subsets(n))}
    out = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        table = {}
        for r in range(n):
            for ps in itertools.combinations(others, r):
                mask = 0
                for size in range(1, len(ps) + 1):
                    for sub in itertools.combinations(ps, size):
                        mask |= 1 << lookup[frozenset(sub) | {i}]
                table[frozenset(ps)] = mask
        out.append(table)
    return tuple(out)


def _mask_to_vector(mask: int, dim: int) -> np.ndarray:
    bits = np.frombuffer(mask.to_bytes((dim + 7) // 8 or 1, "little"), dtype=np.uint8)
    return np.unpackbits(bits, bitorder="little")[:dim].astype(np.int64)


def _masks_to_vertices(masks, dim: int, tag: str) -> VertexSet:
    rows = np.array([_mask_to_vector(m, dim) for m in masks], dtype=np.int64).reshape(-1, dim)
    return VertexSet(rows, tag).sorted()


def imset_mask(g: Dag) -> int:
    tables = _family_masks(g.n)
    mask = 0
    for i, ps in enumerate(g.parent_sets()):
        mask |= tables[i][ps]
    return mask


def char_imset(g: Dag) -> np.ndarray:
    """Characteristic imset: coordinate S is 1 iff S lies in pa(i) + {i} for
    some i in S."""
    if g.n < 2:
        return np.zeros(0, dtype=np.int64)
    return _mask_to_vector(imset_mask(g), imset_dim(g.n))


def chordal_imset(g: UGraph) -> np.ndarray:
    """Coordinate S is 1 iff S induces a clique in ``g``."""
    return np.array([1 if g.is_clique(s) else 0 for s in subsets(g.n)], dtype=np.int64)


def graph_from_imset(vec, n: int) -> UGraph:
    """The graph read off the 2-subset coordinates of an imset."""
    vec = np.asarray(vec)
    return UGraph(n, frozenset(
        (i, j) for i, j in itertools.combinations(range(n), 2) if vec[pair_index(i, j, n)]))


def iter_dags(n: int) -> Iterator[tuple[frozenset, ...]]:
    """Parent-set tuples of every labeled DAG on n nodes, each exactly once."""
    seen = set()
    for order in itertools.permutations(range(n)):
        choices = [
            [frozenset(c) for r in range(k + 1) for c in itertools.combinations(order[:k], r)]
            for k in range(n)
        ]
        for combo in itertools.product(*choices):
            parents = [None] * n
            for pos, node in enumerate(order):
                parents[node] = combo[pos]
            key = tuple(parents)
            if key not in seen:
                seen.add(key)
                yield key


def enum_cim_vertices(n: int) -> VertexSet:
    if not 2 <= n <= 5:
        raise DomainError("enum_cim_vertices supports 2 <= n <= 5")
    tables = _family_masks(n)
    masks = set()
    for order in itertools.permutations(range(n)):
        # parents of the node at position k are drawn from order[:k]
        partial = {0}
        for k, node in enumerate(order):
            opts = [tables[node][frozenset(c)]
                    for r in range(k + 1) for c in itertools.combinations(order[:k], r)]
            partial = {m | o for m in partial for o in opts}
        masks |= partial
    return _masks_to_vertices(masks, imset_dim(n), f"cim:{n}")


def iter_trees(n: int) -> Iterator[UGraph]:
    """All labeled trees on n nodes, decoded from Pruefer sequences."""
    if n < 2:
        return
    if n == 2:
        yield UGraph(2, frozenset({(0, 1)}))
        return
    for seq in itertools.product(range(n), repeat=n - 2):
        yield UGraph(n, frozenset(prufer_decode(seq, n)))


def prufer_decode(seq, n: int) -> list[tuple[int, int]]:
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append(_norm_edge(leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, w = [i for i in range(n) if degree[i] == 1]
    edges.append(_norm_edge(u, w))
    return edges


def iter_orientations(tree: UGraph) -> Iterator[Dag]:
    edges = sorted(tree.edges)
    for flips in itertools.product((False, True), repeat=len(edges)):
        yield Dag(tree.n, frozenset((v, u) if f else (u, v) for (u, v), f in zip(edges, flips)))


def enum_cimtree_vertices(n: int) -> VertexSet:
    if not 3 <= n <= 6:
        raise DomainError("enum_cimtree_vertices supports 3 <= n <= 6")
    tables = _family_masks(n)
    masks = set()
    for tree in iter_trees(n):
        edges = sorted(tree.edges)
        for flips in itertools.product((False, True), repeat=len(edges)):
            parents = [set() for _ in range(n)]
            for (u, v), f in zip(edges, flips):
                if f:
                    parents[u].add(v)
                else:
                    parents[v].add(u)
            mask = 0
            for i in range(n):
                mask |= tables[i][frozenset(parents[i])]
            masks.add(mask)
    return _masks_to_vertices(masks, imset_dim(n), f"cimtree:{n}")


def iter_graphs(n: int) -> Iterator[UGraph]:
    pairs = list(itertools.combinations(range(n), 2))
    for bits in range(1 << len(pairs)):
        yield UGraph(n, frozenset(p for k, p in enumerate(pairs) if bits >> k & 1))


def iter_chordal_graphs(n: int) -> Iterator[UGraph]:
    from .faces import is_chordal

    for g in iter_graphs(n):
        if is_chordal(g):
            yield g


def enum_cgp_vertices(n: int) -> VertexSet:
    if not 2 <= n <= 6:
        raise DomainError("enum_cgp_vertices supports 2 <= n <= 6")
    rows = [chordal_imset(g) for g in iter_chordal_graphs(n)]
    return VertexSet(np.array(rows, dtype=np.int64), f"cgp:{n}").sorted()


def tree_vector(tree: UGraph) -> np.ndarray:
    out = np.zeros(math.comb(tree.n, 2), dtype=np.int64)
    for u, v in tree.edges:
        out[pair_index(u, v, tree.n)] = 1
    return out


def spanning_tree_vertices(n: int) -> VertexSet:
    if n < 2:
        raise DomainError("spanning trees need n >= 2")
    rows = [tree_vector(t) for t in iter_trees(n)]
    return VertexSet(np.array(rows, dtype=np.int64), f"spanning-tree:{n}").sorted()


def permutation_matrix(perm) -> np.ndarray:
    n = len(perm)
    out = np.zeros((n, n), dtype=np.int64)
    out[np.arange(n), list(perm)] = 1
    return out.reshape(-1)


def birkhoff_vertices(n: int) -> VertexSet:
    if n < 1:
        raise DomainError("birkhoff_vertices needs n >= 1")
    rows = [permutation_matrix(p) for p in itertools.permutations(range(n))]
    return VertexSet(np.array(rows, dtype=np.int64), f"birkhoff:{n}").sorted()


def k_assignment_vertices(m: int, n: int, k: int) -> VertexSet:
    if not 1 <= k <= min(m, n):
        raise DomainError(f"k={k} must satisfy 1 <= k <= min(m, n)")
    rows = []
    for rs in itertools.combinations(range(m), k):
        for cs in itertools.permutations(range(n), k):
            rows.append(Matching(m, n, frozenset(zip(rs, cs))).vector())
    return VertexSet(np.array(rows, dtype=np.int64), f"k-assignment:{m},{n},{k}").sorted()


def stable_sets(g: UGraph) -> list[frozenset]:
    return [frozenset(c) for r in range(g.n + 1)
            for c in itertools.combinations(range(g.n), r) if g.is_independent(c)]


def incidence_vector(nodes, n: int) -> np.ndarray:
    out = np.zeros(n, dtype=np.int64)
    out[list(nodes)] = 1
    return out


def stab_vertices(g: UGraph) -> VertexSet:
    rows = [incidence_vector(a, g.n) for a in stable_sets(g)]
    return VertexSet(np.array(rows, dtype=np.int64).reshape(-1, g.n), "stab").sorted()


def product_vertices(v1: VertexSet, v2: VertexSet) -> VertexSet:
    a, b = v1.array, v2.array
    rows = np.concatenate([np.repeat(a, len(b), axis=0), np.tile(b, (len(a), 1))], axis=1)
    tag = f"product({v1.family_tag},{v2.family_tag})" if v1.family_tag or v2.family_tag else None
    return VertexSet(rows, tag)


def cross_polytope_vertices(n: int) -> VertexSet:
    if n < 1:
        raise DomainError("cross polytope needs n >= 1")
    eye = np.eye(n, dtype=np.int64)
    return VertexSet(np.concatenate([eye, -eye]), f"cross:{n}").sorted()


def permutohedron_vertices(n: int) -> VertexSet:
    if n < 2:
        raise DomainError("permutohedron needs n >= 2")
    rows = list(itertools.permutations(range(1, n + 1)))
    return VertexSet(np.array(rows, dtype=np.int64), f"permutohedron:{n}").sorted()


def cube_vertices(d: int) -> VertexSet:
    if d < 1:
        raise DomainError("cube needs d >= 1")
    rows = list(itertools.product((0, 1), repeat=d))
    return VertexSet(np.array(rows, dtype=np.int64), f"cube:{d}")


def simplex_vertices(d: int) -> VertexSet:
    """The d-simplex as the d+1 standard unit vectors."""
    if d < 0:
        raise DomainError("simplex needs d >= 0")
    return VertexSet(np.eye(d + 1, dtype=np.int64)[::-1], f"simplex:{d}").sorted()


# ---------------------------------------------------------------------------
# graph files


def read_graph(source) -> UGraph | Dag:
    """Parse ``"<n> <m>"`` then m lines ``"u v"`` (undirected) or ``"u -> v"``."""
    if isinstance(source, (str, Path)):
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = source.read().splitlines()
    header = None
    edges, arcs = [], []
    count = 0
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.replace("->", " -> ").split()
        if header is None:
            try:
                header = [int(t) for t in tokens]
            except ValueError:
                raise ParseError("header must be '<n> <m>'", lineno) from None
            if len(header) != 2:
                raise ParseError("header must be '<n> <m>'", lineno)
            continue
        count += 1
        try:
            if len(tokens) == 3 and tokens[1] == "->":
                arcs.append((int(tokens[0]), int(tokens[2])))
            elif len(tokens) == 2:
                edges.append((int(tokens[0]), int(tokens[1])))
            else:
                raise ValueError
        except ValueError:
            raise ParseError(f"cannot parse edge {raw!r}", lineno) from None
    if header is None:
        raise ParseError("empty graph file", 1)
    if count != header[1]:
        raise ParseError(f"declared {header[1]} edges, found {count}")
    if arcs and edges:
        raise ParseError("mixed directed and undirected edges")
    if arcs:
        return Dag(header[0], frozenset(arcs))
    return UGraph(header[0], frozenset(edges))


def write_graph(g: UGraph | Dag, target) -> None:
    if isinstance(g, Dag):
        body = [f"{u} -> {v}" for u, v in sorted(g.arcs)]
    else:
        body = [f"{u} {v}" for u, v in sorted(g.edges)]
    text = "\n".join([f"{g.n} {len(body)}", *body]) + "\n"
    if isinstance(target, (str, Path)):
        Path(target).write_text(text, encoding="utf-8")
    else:
        target.write(text)


def generate(family: str, *, n: int | None = None, m: int | None = None,
             k: int | None = None, graph: UGraph | None = None) -> VertexSet:
    """Dispatch by family name, as used by the command line."""
    def need(x, name):
        if x is None:
            raise DomainError(f"family {family!r} needs --{name}")
        return x

    family = family.lower().replace("_", "-")
    if family == "cim":
        return enum_cim_vertices(need(n, "n"))
    if family == "cimtree":
        return enum_cimtree_vertices(need(n, "n"))
    if family == "cgp":
        return enum_cgp_vertices(need(n, "n"))
    if family in ("spanning-tree", "stp"):
        return spanning_tree_vertices(need(n, "n"))
    if family == "birkhoff":
        return birkhoff_vertices(need(n, "n"))
    if family == "k-assignment":
        return k_assignment_vertices(need(m, "m"), need(n, "n"), need(k, "k"))
    if family == "stab":
        if not isinstance(need(graph, "graph"), UGraph):
            raise DomainError("stab needs an undirected graph")
        return stab_vertices(graph)
    if family == "cross":
        return cross_polytope_vertices(need(n, "n"))
    if family == "permutohedron":
        return permutohedron_vertices(need(n, "n"))
    if family == "cube":
        return cube_vertices(need(n, "n"))
    if family == "simplex":
        return simplex_vertices(need(n, "n"))
    raise DomainError(f"unknown family {family!r}")


FAMILIES = ("cim", "cimtree", "cgp", "spanning-tree", "birkhoff", "k-assignment", "stab",
            "cross", "permutohedron", "cube", "simplex")
