import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyskel import oracles
from polyskel.core import VertexSet
from polyskel.edgecheck import is_edge
from polyskel.errors import DomainError
from polyskel.families import (Dag, Matching, UGraph, birkhoff_vertices, char_imset,
                               enum_cimtree_vertices, iter_orientations, iter_trees,
                               k_assignment_vertices, permutation_matrix, spanning_tree_vertices,
                               stab_vertices, stable_sets, incidence_vector, tree_vector)

perms4 = st.permutations(range(4))


def tree(n, *edges):
    return UGraph(n, frozenset(edges))


# ---------------------------------------------------------------------------
# spanning trees


def test_spanning_tree_examples():
    t1 = tree(4, (0, 1), (1, 2), (2, 3))
    assert oracles.spanning_tree_edge(t1, tree(4, (0, 1), (1, 2), (1, 3)))
    far = tree(4, (0, 2), (1, 3), (0, 3))
    assert not oracles.spanning_tree_edge(t1, far)
    with pytest.raises(DomainError):
        oracles.spanning_tree_edge(t1, t1)
    with pytest.raises(DomainError):
        oracles.spanning_tree_edge(t1, tree(4, (0, 1), (1, 2), (0, 2)))


def test_spanning_tree_witnesses_sum():
    trees = list(iter_trees(5))
    rng = random.Random(3)
    for t1, t2 in rng.sample(list(itertools.combinations(trees, 2)), 300):
        assert oracles.spanning_tree_edge(t1, t2) == oracles.spanning_tree_edge(t2, t1)
        w = oracles.spanning_tree_witnesses(t1, t2)
        if w is None:
            continue
        a, b = w
        assert a.is_tree() and b.is_tree() and {a, b}.isdisjoint({t1, t2})
        assert (tree_vector(a) + tree_vector(b) == tree_vector(t1) + tree_vector(t2)).all()


def test_spanning_tree_matches_lp_n4():
    vs = spanning_tree_vertices(4)
    trees = list(iter_trees(4))
    for t1, t2 in itertools.combinations(trees, 2):
        a, b = vs.index_of(tree_vector(t1)), vs.index_of(tree_vector(t2))
        assert oracles.spanning_tree_edge(t1, t2) == is_edge(vs, a, b)


# ---------------------------------------------------------------------------
# permutations


def test_birkhoff_examples():
    ident = (0, 1, 2, 3)
    assert oracles.birkhoff_edge(ident, (1, 0, 2, 3))
    assert not oracles.birkhoff_edge(ident, (1, 0, 3, 2))
    assert set(oracles.birkhoff_witnesses(ident, (1, 0, 3, 2))) == {(1, 0, 2, 3), (0, 1, 3, 2)}
    assert oracles.birkhoff_edge(ident, (1, 2, 0, 3))
    with pytest.raises(DomainError):
        oracles.birkhoff_edge(ident, ident)
    with pytest.raises(DomainError):
        oracles.birkhoff_edge(ident, (0, 0, 1, 2))


@settings(max_examples=100, deadline=None)
@given(perms4, perms4, perms4)
def test_birkhoff_left_invariance(s, w, pi):
    if s == w:
        return
    left = lambda p: tuple(pi[x] for x in p)
    assert oracles.birkhoff_edge(s, w) == oracles.birkhoff_edge(left(s), left(w))
    assert oracles.birkhoff_edge(s, w) == oracles.birkhoff_edge(w, s)


@settings(max_examples=100, deadline=None)
@given(perms4, perms4)
def test_birkhoff_witness_sums(s, w):
    if s == w or oracles.birkhoff_edge(s, w):
        return
    p1, p2 = oracles.birkhoff_witnesses(s, w)
    lhs = permutation_matrix(s) + permutation_matrix(w)
    assert (permutation_matrix(p1) + permutation_matrix(p2) == lhs).all()
    assert {p1, p2}.isdisjoint({tuple(s), tuple(w)})


def test_birkhoff_matches_lp_n3():
    vs = birkhoff_vertices(3)
    perms = list(itertools.permutations(range(3)))
    for s, w in itertools.combinations(perms, 2):
        a = vs.index_of(permutation_matrix(s).ravel())
        b = vs.index_of(permutation_matrix(w).ravel())
        assert oracles.birkhoff_edge(s, w) == is_edge(vs, a, b)


# ---------------------------------------------------------------------------
# k-assignments


def test_k_assignment_examples():
    m1, m2 = Matching(2, 2, frozenset({(0, 0)})), Matching(2, 2, frozenset({(1, 1)}))
    assert oracles.k_assignment_edge(m1, m2)
    with pytest.raises(DomainError):
        oracles.k_assignment_edge(m1, m1)


def test_two_perfect_matchings_of_two_by_two():
    """B_2 is a segment, so its two vertices are adjacent even though the
    symmetric difference is a 4-cycle."""
    m1 = Matching(2, 2, frozenset({(0, 0), (1, 1)}))
    m2 = Matching(2, 2, frozenset({(0, 1), (1, 0)}))
    vs = k_assignment_vertices(2, 2, 2)
    assert len(vs) == 2 and is_edge(vs, 0, 1)
    assert oracles.k_assignment_edge(m1, m2)


@pytest.mark.parametrize("m, n, k", [(2, 3, 1), (3, 3, 2), (2, 4, 2), (3, 4, 2)])
def test_k_assignment_matches_lp(m, n, k):
    vs = k_assignment_vertices(m, n, k)
    ms = [Matching.from_vector(r, m, n) for r in vs.array]
    for i, j in itertools.combinations(range(len(vs)), 2):
        edge = oracles.k_assignment_edge(ms[i], ms[j])
        assert edge == is_edge(vs, i, j)
        if not edge:
            a, b = oracles.k_assignment_witnesses(ms[i], ms[j])
            assert (a.vector() + b.vector() == vs.array[i] + vs.array[j]).all()
            assert {a.pairs, b.pairs}.isdisjoint({ms[i].pairs, ms[j].pairs})


# ---------------------------------------------------------------------------
# stable sets


def test_stab_examples():
    assert oracles.stab_edge(UGraph.complete(2), {0}, {1})
    p3 = UGraph.path(3)
    assert not oracles.stab_edge(p3, {0}, {2})
    w = oracles.stab_witnesses(p3, {0}, {2})
    assert set(w) == {frozenset(), frozenset({0, 2})}
    assert not oracles.stab_edge(UGraph(2, frozenset()), {0}, {1})
    with pytest.raises(DomainError):
        oracles.stab_edge(p3, {0, 1}, {2})


def test_stab_matches_lp_on_c5_and_witnesses():
    g = UGraph.cycle(5)
    vs = stab_vertices(g)
    sets = stable_sets(g)
    for a, b in itertools.combinations(sets, 2):
        ia, ib = vs.index_of(incidence_vector(a, 5)), vs.index_of(incidence_vector(b, 5))
        edge = oracles.stab_edge(g, a, b)
        assert edge == is_edge(vs, ia, ib)
        if not edge:
            a2, b2 = oracles.stab_witnesses(g, a, b)
            assert g.is_independent(a2) and g.is_independent(b2)
            assert (incidence_vector(a2, 5) + incidence_vector(b2, 5)
                    == incidence_vector(a, 5) + incidence_vector(b, 5)).all()


# ---------------------------------------------------------------------------
# tree DAGs


def tree_dag_classes(n):
    """imset -> (a v-structure-free representative or None, all representatives)."""
    out = {}
    for t in iter_trees(n):
        for d in iter_orientations(t):
            key = tuple(char_imset(d))
            free, reps = out.get(key, (None, []))
            if free is None and not d.v_structures():
                free = d
            reps.append(d)
            out[key] = (free, reps)
    return out


def test_orient_tree():
    t = tree(5, (0, 1), (1, 2), (1, 3), (3, 4))
    d = oracles.orient_tree(t)
    assert d.skeleton() == t and not d.v_structures()
    d = oracles.orient_tree(t, collider=1, parents={0, 2})
    assert d.parents(1) == {0, 2} and len(d.v_structures()) == 1
    with pytest.raises(DomainError):
        oracles.orient_tree(t, collider=1, parents={4})


def test_cimtree_single_swap():
    g = oracles.orient_tree(tree(4, (0, 1), (1, 2), (2, 3)))
    h = oracles.orient_tree(tree(4, (0, 1), (1, 2), (1, 3)))
    assert oracles.cimtree_neighbor_test(g, h)


def test_cimtree_triangle_exception():
    # g: path i - l - j with i=0, l=1, j=2 plus a pendant node; h: j -> i <- l
    g = oracles.orient_tree(tree(4, (0, 1), (1, 2), (2, 3)))
    h = oracles.orient_tree(tree(4, (0, 1), (0, 2), (2, 3)), collider=0, parents={1, 2})
    assert not oracles.cimtree_neighbor_test(g, h)
    d1, d2 = oracles.cimtree_triangle_witnesses(g, h)
    assert oracles.cimtree_rhombus_holds(g, h, d1, d2)
    vs = enum_cimtree_vertices(4)
    assert not is_edge(vs, vs.index_of(char_imset(g)), vs.index_of(char_imset(h)))


def test_cimtree_two_colliders_not_adjacent():
    g = oracles.orient_tree(tree(6, (0, 1), (1, 2), (2, 3), (3, 4), (4, 5)))
    h = Dag(6, frozenset({(0, 1), (2, 1), (2, 3), (4, 3), (5, 4)}))
    assert not oracles.cimtree_neighbor_test(g, h)
    vs = enum_cimtree_vertices(6)
    assert not is_edge(vs.subset(_face(vs, g, h)), *_face_pos(vs, g, h))


def _face(vs, g, h):
    from polyskel.faces import restrict_face
    return restrict_face(vs, vs.index_of(char_imset(g)), vs.index_of(char_imset(h)))


def _face_pos(vs, g, h):
    face = _face(vs, g, h).tolist()
    return face.index(vs.index_of(char_imset(g))), face.index(vs.index_of(char_imset(h)))


def test_cimtree_matches_lp_n4_all_representatives():
    vs = enum_cimtree_vertices(4)
    classes = tree_dag_classes(4)
    checked = 0
    for key_g, (g, _) in classes.items():
        if g is None:
            continue
        ia = vs.index_of(key_g)
        for key_h, (_, reps) in classes.items():
            if key_h == key_g:
                continue
            ib = vs.index_of(key_h)
            lp = is_edge(vs, ia, ib)
            for h in reps:
                assert oracles.cimtree_neighbor_test(g, h) == lp, (g, h)
                checked += 1
    assert checked > 1000


def test_cimtree_domain_errors():
    g = oracles.orient_tree(tree(4, (0, 1), (1, 2), (2, 3)))
    collider = Dag(4, frozenset({(0, 1), (2, 1), (2, 3)}))
    with pytest.raises(DomainError):
        oracles.cimtree_neighbor_test(collider, g)
    with pytest.raises(DomainError):
        oracles.cimtree_neighbor_test(g, g)
    with pytest.raises(DomainError):
        oracles.cimtree_neighbor_test(g, Dag(4, frozenset({(0, 1), (1, 2)})))
