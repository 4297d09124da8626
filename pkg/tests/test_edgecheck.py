import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import lp_edges, square
from polyskel import oracles
from polyskel.core import EDGE, NON_EDGE, SOURCE_RHOMBUS, UNKNOWN, VertexSet
from polyskel.edgecheck import (NonEdgeCertificate, SkeletonConfig, SkeletonTiming, Status,
                                compute_skeleton, cost_update, exact_edge_test, exact_skeleton,
                                is_edge, numeric_search, separates, verify_edge_numeric,
                                verify_pair)
from polyskel.errors import DomainError, NumericError
from polyskel.families import (UGraph, birkhoff_vertices, cross_polytope_vertices, cube_vertices,
                               enum_cgp_vertices, iter_trees, permutohedron_vertices,
                               simplex_vertices, spanning_tree_vertices, tree_vector)

points = st.sets(st.tuples(*[st.integers(-2, 2)] * 3), min_size=3, max_size=12)


def brute_is_edge(vs, a, b):
    """Independent check: the vertex pair is an edge iff some cost vector from a small
    integer grid is maximized exactly at a and b.  Only used where the grid suffices."""
    arr = vs.array
    for c in itertools.product(range(-3, 4), repeat=vs.dim):
        s = arr @ np.array(c)
        top = s.max()
        if s[a] == s[b] == top and (s == top).sum() == 2:
            return True
    return False


# ---------------------------------------------------------------------------
# exact test


def test_triangle_all_edges():
    vs = simplex_vertices(2)
    for a, b in itertools.combinations(range(3), 2):
        v = exact_edge_test(vs, a, b)
        assert v.is_edge and separates(vs, a, b, v.certificate)


def test_square_diagonal_certificate(unit_square):
    a, b = unit_square.index_of([0, 0]), unit_square.index_of([1, 1])
    v = exact_edge_test(unit_square, a, b)
    assert v.status is Status.NON_EDGE
    cert = v.certificate
    assert cert.t == Fraction(1, 2)
    assert cert.weights == {unit_square.index_of([0, 1]): Fraction(1, 2),
                            unit_square.index_of([1, 0]): Fraction(1, 2)}
    assert cert.check(unit_square, a, b)


def test_exact_agrees_with_spanning_tree_oracle():
    trees = list(iter_trees(4))
    vs = spanning_tree_vertices(4)
    assert len(trees) == 16
    for t1, t2 in itertools.combinations(trees, 2):
        a, b = vs.index_of(tree_vector(t1)), vs.index_of(tree_vector(t2))
        assert is_edge(vs, a, b) == oracles.spanning_tree_edge(t1, t2)


def test_exact_errors(unit_square):
    with pytest.raises(DomainError):
        exact_edge_test(unit_square, 1, 1)
    with pytest.raises(DomainError):
        exact_edge_test(unit_square, 0, 9)


def test_cross_polytope_antipodes():
    vs = cross_polytope_vertices(3)
    for a, b in itertools.combinations(range(6), 2):
        antipodal = (vs.array[a] + vs.array[b] == 0).all()
        assert is_edge(vs, a, b) == (not antipodal)


def test_collinear_interior_point():
    vs = VertexSet([[0, 0], [2, 0], [1, 0], [0, 1]])
    # the segment through [0,0] and [2,0] contains [1,0]
    assert not is_edge(vs, 0, 1)
    assert is_edge(vs, 0, 3)


@settings(max_examples=60, deadline=None)
@given(points, st.data())
def test_exact_matches_grid_search(rows, data):
    vs = VertexSet(sorted(rows))
    a, b = data.draw(st.sampled_from(list(itertools.combinations(range(len(vs)), 2))))
    verdict = exact_edge_test(vs, a, b)
    if verdict.is_edge:
        assert separates(vs, a, b, verdict.certificate)
    else:
        assert verdict.certificate.check(vs, a, b)
        assert not brute_is_edge(vs, a, b)


@settings(max_examples=30, deadline=None)
@given(points, st.data())
def test_affine_invariance(rows, data):
    """Adjacency survives a unimodular change of coordinates plus translation."""
    vs = VertexSet(sorted(rows))
    M = np.array([[1, 2, 0], [0, 1, -1], [1, 1, 0]])  # det = 1
    shift = np.array(data.draw(st.lists(st.integers(-4, 4), min_size=3, max_size=3)))
    moved = VertexSet(vs.array @ M.T + shift)
    assert lp_edges(vs) == lp_edges(moved)


# ---------------------------------------------------------------------------
# cost update


def test_cost_update_example():
    alpha, beta, mu = np.array([1, 0]), np.array([0, 1]), np.array([1, 1])
    c = cost_update([1.0, 1.0], alpha, beta, mu, eps=0.01)
    assert abs(c @ alpha - c @ beta) < 1e-12
    assert c @ mu < c @ alpha


def test_cost_update_sign_matters(rng):
    """The offset has to push against sign(<p, alpha - mu>); the other sign breaks it."""
    d = 6
    for _ in range(50):
        alpha, beta, mu = (rng.integers(0, 2, d) for _ in range(3))
        if (alpha == beta).all():
            continue
        delta = (alpha - beta).astype(float)
        p = 2.0 * mu - 1.0
        p = p - (p @ delta) / (delta @ delta) * delta
        den = p @ (alpha - mu)
        if abs(den) < 1e-9:
            continue
        c = rng.normal(size=d)
        c = c - (c @ delta) / (delta @ delta) * delta
        good = cost_update(c, alpha, beta, mu, eps=0.1)
        assert good @ mu < good @ alpha
        lam = (c @ (alpha - mu)) / den + 0.1 * np.sign(den)
        bad = c - lam * p
        assert bad @ mu > bad @ alpha


def test_cost_update_degenerate_nudges(rng):
    # p is orthogonal to alpha - mu without the nudge
    alpha, beta, mu = np.array([1, 0, 0]), np.array([0, 1, 0]), np.array([0, 1, 0])
    c = cost_update([0.0, 0.0, 1.0], alpha, beta, np.array([1, 1, 0]), rng=rng)
    assert c @ np.array([1, 1, 0]) < c @ alpha
    with pytest.raises(DomainError):
        cost_update([1.0, 0.0], [1, 0], [1, 0], [0, 1])
    with pytest.raises(NumericError):
        cost_update([1.0, 0.0, 0.0], alpha, beta, mu, max_nudges=0)


# ---------------------------------------------------------------------------
# numeric search


def test_numeric_square(unit_square):
    i00, i01 = unit_square.index_of([0, 0]), unit_square.index_of([0, 1])
    i11 = unit_square.index_of([1, 1])
    assert verify_edge_numeric(unit_square, i00, i01, max_iter=50, seed=1)
    for it in (1, 10, 200):
        assert not verify_edge_numeric(unit_square, i00, i11, max_iter=it, seed=2)


def test_numeric_birkhoff_three_cycle():
    vs = birkhoff_vertices(4)
    from polyskel.families import permutation_matrix
    a = vs.index_of(permutation_matrix((0, 1, 2, 3)).ravel())
    b = vs.index_of(permutation_matrix((1, 2, 0, 3)).ravel())
    res = numeric_search(vs, a, b, max_iter=100, seed=0)
    assert res.verified and separates(vs, a, b, res.certificate)


def test_numeric_certificates_are_exact():
    vs = enum_cgp_vertices(4)
    hits = 0
    for a, b in itertools.islice(itertools.combinations(range(len(vs)), 2), 0, 1830, 37):
        res = numeric_search(vs, a, b, seed=a * 1000 + b)
        if res.verified:
            hits += 1
            assert separates(vs, a, b, res.certificate)
            assert is_edge(vs, a, b)
    assert hits > 0


def test_numeric_on_members_only():
    vs = cube_vertices(3)
    face = [0, 1, 2, 3]
    res = numeric_search(vs, 0, 3, seed=0, members=face)
    assert not res.verified
    with pytest.raises(DomainError):
        numeric_search(vs, 0, 7, members=face)


# ---------------------------------------------------------------------------
# skeleton pipeline


def test_skeleton_square():
    led = compute_skeleton(square())
    vs = square()
    sides = {tuple(sorted((vs.index_of(p), vs.index_of(q)))) for p, q in
             [([0, 0], [0, 1]), ([0, 0], [1, 0]), ([1, 1], [0, 1]), ([1, 1], [1, 0])]}
    assert set(led.edges()) == sides
    assert led.counts() == {"edges": 4, "non_edges": 2, "unknown": 0}


def test_skeleton_birkhoff3_matches_oracle():
    vs = birkhoff_vertices(3)
    perms = list(itertools.permutations(range(3)))
    from polyskel.families import permutation_matrix
    idx = [vs.index_of(permutation_matrix(p).ravel()) for p in perms]
    expect = {tuple(sorted((idx[i], idx[j]))) for i, j in itertools.combinations(range(6), 2)
              if oracles.birkhoff_edge(perms[i], perms[j])}
    for method in ("pipeline", "exact"):
        assert set(compute_skeleton(vs, method=method).edges()) == expect


def test_cgp4_non_edges_carry_witnesses():
    vs = enum_cgp_vertices(4)
    led = compute_skeleton(vs)
    non = np.flatnonzero(led.status == NON_EDGE)
    assert (led.source[non] == SOURCE_RHOMBUS).all()
    assert (led.witness_a[non] >= 0).all()
    assert led.counts()["unknown"] == 0


@pytest.mark.parametrize("vs", [permutohedron_vertices(3), cross_polytope_vertices(3),
                                cube_vertices(3), enum_cgp_vertices(3), birkhoff_vertices(3)])
def test_pipeline_equals_exact(vs):
    assert sorted(compute_skeleton(vs).edges()) == exact_skeleton(vs)


def test_threads_and_seed_determinism():
    vs = spanning_tree_vertices(5)
    runs = [compute_skeleton(vs, threads=t, seed=7) for t in (1, 3)]
    for field in ("status", "source", "iterations", "witness_a", "witness_b"):
        assert getattr(runs[0], field).tolist() == getattr(runs[1], field).tolist()


def test_numeric_mode_leaves_unknown(unit_square):
    led = compute_skeleton(permutohedron_vertices(3), method="numeric", max_iter=1)
    assert set(led.status.tolist()) <= {EDGE, NON_EDGE, UNKNOWN}
    exact = set(exact_skeleton(permutohedron_vertices(3)))
    assert set(led.edges()) <= exact


def test_certificates_lift_to_full_set():
    vs = enum_cgp_vertices(4)
    led = compute_skeleton(vs, keep_certificates=True)
    assert led.certificates
    for (a, b), cert in led.certificates.items():
        if isinstance(cert, NonEdgeCertificate):
            assert cert.check(vs, a, b)
        else:
            assert separates(vs, a, b, cert)


@pytest.mark.parametrize("method", ["pipeline", "exact"])
def test_verify_pair_certificates(method):
    vs = permutohedron_vertices(3)
    for a, b in itertools.combinations(range(6), 2):
        v = verify_pair(vs, a, b, method=method)
        if v.is_edge:
            assert separates(vs, a, b, v.certificate)
        else:
            assert v.certificate.check(vs, a, b)


def test_timing_fields():
    tm = SkeletonTiming()
    compute_skeleton(birkhoff_vertices(4), timing=tm)
    assert tm.total == pytest.approx(tm.ledger + tm.rhombus + tm.verify)
    assert tm.unknown_after_scan > 0


def test_config_validation():
    with pytest.raises(DomainError):
        SkeletonConfig(method="magic")
    with pytest.raises(DomainError):
        SkeletonConfig(threads=0)
    with pytest.raises(DomainError):
        compute_skeleton(VertexSet([[0, 1]]))


def test_one_dimensional_sets_fall_back_to_exact():
    vs = VertexSet([[0], [1]])
    assert not numeric_search(vs, 0, 1, seed=0).verified
    assert compute_skeleton(vs).edges() == [(0, 1)]
