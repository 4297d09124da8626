import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import lp_edges
from polyskel.core import NON_EDGE, SOURCE_RHOMBUS, UNKNOWN, VertexSet, make_ledger
from polyskel.edgecheck import is_edge
from polyskel.errors import DomainError
from polyskel.families import (birkhoff_vertices, cube_vertices, enum_cgp_vertices,
                               permutohedron_vertices, simplex_vertices, spanning_tree_vertices)
from polyskel.rhombus import (check_fulfillment, encode_keys, find_witness, rhombus_scan,
                              sharded_rhombus_scan, sorted_groups, sum_key)


def scanned(vs):
    return rhombus_scan(make_ledger(vs, with_keys=True), vs)


def brute_witnessed(vs):
    """Pairs sharing their sum with another pair, by comparing all pairs of pairs."""
    arr = vs.array
    sums = {}
    for a, b in itertools.combinations(range(len(vs)), 2):
        sums.setdefault(tuple(arr[a] + arr[b]), []).append((a, b))
    return {p for group in sums.values() if len(group) > 1 for p in group}


def test_sum_key_examples():
    assert sum_key([0, 1], [1, 0]).tolist() == [1, 1]
    assert sum_key([1, 1], [0, 0]).tolist() == [1, 1]
    with pytest.raises(DomainError):
        sum_key([0, 1], [1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-5, 5), min_size=4, max_size=4),
       st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_sum_key_commutes(a, b):
    assert sum_key(a, b).tolist() == sum_key(b, a).tolist()


def test_square_diagonals(unit_square):
    led = scanned(unit_square)
    i00, i11 = unit_square.index_of([0, 0]), unit_square.index_of([1, 1])
    i01, i10 = unit_square.index_of([0, 1]), unit_square.index_of([1, 0])
    k1, k2 = led.position(i00, i11), led.position(i01, i10)
    assert led.status[k1] == led.status[k2] == NON_EDGE
    assert (led.witness_a[k1], led.witness_b[k1]) == (min(i01, i10), max(i01, i10))
    assert (led.witness_a[k2], led.witness_b[k2]) == (i00, i11)
    assert (led.source[[k1, k2]] == SOURCE_RHOMBUS).all()
    assert led.counts()["non_edges"] == 2 and led.n_groups == 1


def test_permutohedron_long_diagonals():
    vs = permutohedron_vertices(3)
    led = scanned(vs)
    long = [k for k in range(len(led))
            if (vs.array[led.a[k]] + vs.array[led.b[k]]).tolist() == [4, 4, 4]]
    assert len(long) == 3
    assert (led.status[long] == NON_EDGE).all()
    assert led.counts()["non_edges"] == 3


def test_triangle_untouched():
    led = scanned(simplex_vertices(2))
    assert (led.status == UNKNOWN).all() and led.n_groups == 0


@pytest.mark.parametrize("vs", [cube_vertices(4), birkhoff_vertices(4), enum_cgp_vertices(4),
                                spanning_tree_vertices(5), permutohedron_vertices(4)])
def test_scan_marks_exactly_the_witnessed_pairs(vs):
    led = scanned(vs)
    marked = {(int(a), int(b)) for a, b, s in zip(led.a, led.b, led.status) if s == NON_EDGE}
    assert marked == brute_witnessed(vs)
    arr = vs.array
    for k in np.flatnonzero(led.status == NON_EDGE):
        a, b, wa, wb = led.a[k], led.b[k], led.witness_a[k], led.witness_b[k]
        assert {wa, wb}.isdisjoint({a, b}) and wa != wb
        assert (arr[a] + arr[b] == arr[wa] + arr[wb]).all()


def test_scan_soundness_against_lp():
    for vs in (cube_vertices(3), birkhoff_vertices(3), permutohedron_vertices(3),
               enum_cgp_vertices(3)):
        led = scanned(vs)
        for k in np.flatnonzero(led.status == NON_EDGE):
            assert not is_edge(vs, led.a[k], led.b[k])


def test_witness_links_are_mutual_except_odd_tails():
    vs = enum_cgp_vertices(4)
    led = scanned(vs)
    pos = {(int(a), int(b)): k for k, (a, b) in enumerate(zip(led.a, led.b))}
    keys = led.sum_keys
    sizes = {}
    for k in np.flatnonzero(led.status == NON_EDGE):
        sizes[tuple(keys[k])] = sizes.get(tuple(keys[k]), 0) + 1
    one_way = 0
    for k in np.flatnonzero(led.status == NON_EDGE):
        back = pos[(int(led.witness_a[k]), int(led.witness_b[k]))]
        if (led.witness_a[back], led.witness_b[back]) != (led.a[k], led.b[k]):
            one_way += 1
            assert sizes[tuple(keys[k])] % 2 == 1
    assert one_way == sum(1 for s in sizes.values() if s % 2 == 1)


def test_encode_keys_preserves_order(rng):
    keys = rng.integers(-3, 7, size=(500, 30))
    enc = encode_keys(keys, chunk=64)
    by_rows = sorted(range(500), key=lambda i: tuple(keys[i]))
    by_enc = sorted(range(500), key=lambda i: tuple(enc[i]))
    assert [tuple(keys[i]) for i in by_rows] == [tuple(keys[i]) for i in by_enc]
    assert len({tuple(r) for r in enc}) == len({tuple(r) for r in keys})


def test_sorted_groups_flags(rng):
    keys = rng.integers(0, 2, size=(200, 3))
    order, new_group = sorted_groups(keys)
    s = keys[order]
    assert new_group[0]
    for k in range(1, len(s)):
        assert new_group[k] == (tuple(s[k]) != tuple(s[k - 1]))


def test_find_witness():
    vs = cube_vertices(2)
    a, b = vs.index_of([0, 0]), vs.index_of([1, 1])
    w = find_witness(vs, a, b)
    assert w is not None
    assert sorted(vs.array[i].tolist() for i in w) == [[0, 1], [1, 0]]
    assert find_witness(vs, vs.index_of([0, 0]), vs.index_of([0, 1])) is None


def test_fulfillment_examples():
    trees = spanning_tree_vertices(4)
    assert check_fulfillment(trees, lambda a, b: is_edge(trees, a, b)).fulfills
    perm = permutohedron_vertices(3)
    rep = check_fulfillment(perm, lambda a, b: is_edge(perm, a, b))
    assert not rep.fulfills
    short = {(a, b) for a, b in itertools.combinations(range(6), 2)
             if (perm.array[a] + perm.array[b]).tolist() != [4, 4, 4]
             and not is_edge(perm, a, b)}
    assert set(rep.violations) == short and len(short) == 6


def test_fulfillment_on_explicit_pairs(unit_square):
    rep = check_fulfillment(unit_square, lambda a, b: is_edge(unit_square, a, b),
                            pairs=[(0, 3), (1, 2), (0, 1)])
    assert rep.fulfills and rep.pairs == 3 and rep.with_witness == 2 and rep.oracle_calls == 1


@pytest.mark.parametrize("vs", [birkhoff_vertices(4), enum_cgp_vertices(4), cube_vertices(5)])
def test_sharded_scan_agrees(vs, tmp_path):
    led = scanned(vs)
    res = sharded_rhombus_scan(vs, n_shards=5, workdir=tmp_path, block_rows=7)
    unknown = {tuple(p) for arr in res.iter_unknown() for p in arr.tolist()}
    expect = {(int(a), int(b)) for a, b, s in zip(led.a, led.b, led.status) if s != NON_EDGE}
    assert unknown == expect
    assert res.marked == led.counts()["non_edges"]
    assert res.groups == led.n_groups and res.pairs == len(led)


@settings(max_examples=30, deadline=None)
@given(st.sets(st.tuples(*[st.integers(0, 1)] * 4), min_size=3, max_size=16))
def test_scan_property_random_01_sets(rows):
    vs = VertexSet(sorted(rows))
    led = scanned(vs)
    marked = {(int(a), int(b)) for a, b, s in zip(led.a, led.b, led.status) if s == NON_EDGE}
    assert marked == brute_witnessed(vs)
    assert marked.isdisjoint(lp_edges(vs))
