import math

import pytest

from polyskel.core import VertexSet
from polyskel.edgecheck import SkeletonConfig
from polyskel.families import birkhoff_vertices, cube_vertices
from polyskel.reports import (TIMING_COLUMNS, affine_dimension, audit_rhombus, fixture_cimtree6,
                              fixture_dags, format_table, measure_scan, scan_fit,
                              scan_scaling_ratio, timing_report)


def test_affine_dimension():
    assert affine_dimension(cube_vertices(4)) == 4
    assert affine_dimension(VertexSet([[1, 1, 1]])) == 0
    assert affine_dimension(VertexSet([[0, 0], [1, 1], [2, 2]])) == 1


def test_fixture_shape():
    vs, (i, j) = fixture_cimtree6()
    assert len(vs) == 5 and (i, j) == (0, 1)
    assert affine_dimension(vs) == 3
    for d in fixture_dags():
        assert d.skeleton().is_tree() and len(d.v_structures()) <= 2


def test_timing_report_columns():
    rows = timing_report(["birkhoff"], [3, 4], config=SkeletonConfig(seed=1))
    assert TIMING_COLUMNS[3:] == ("total", "ledger", "rhombus", "verify")
    assert [r.instance for r in rows] == ["birkhoff:3", "birkhoff:4"]
    assert all(math.isclose(r.total, r.ledger + r.rhombus + r.verify) for r in rows)
    table = format_table(rows).splitlines()
    assert table[0].split() == ["instance", "v", "pairs", "total", "ledger", "rhombus", "verify"]
    assert len(table) == 3


def test_scan_fit_math():
    v = [10, 20, 40]
    t = [2.0 * x * x * math.log(x) for x in v]
    c, worst = scan_fit(v, t)
    assert c == pytest.approx(2.0) and worst == pytest.approx(1.0)
    assert scan_scaling_ratio(v, t) == pytest.approx(1.0)
    t[0] *= 4
    assert scan_scaling_ratio(v, t) == pytest.approx(4.0)
    assert scan_fit(v, t)[1] == pytest.approx(4 ** (2 / 3))


def test_measure_scan_positive():
    assert 0 < measure_scan(birkhoff_vertices(4), repeats=2, min_total=0.01)


def test_audit_rhombus_methods_agree():
    vs = birkhoff_vertices(4)
    assert audit_rhombus(vs).as_dict() == audit_rhombus(vs, method="exact").as_dict()
