import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ray_cast_inside
from rtnrt.errors import GeometryError, ParameterError
from rtnrt.geometry import (
    TestDomain,
    _circle,
    check_distance_property,
    contains,
    contains_points,
    curve_from_record,
    dilate,
    grading_map,
    make_circle,
    make_convex_polygon,
    make_ellipse,
    translate,
    winding_number,
)
from rtnrt.layers import double_layer


def test_four_node_circle_layout():
    c = _circle((0, 0), 1.0, 4)
    assert np.allclose(c.params, [0, np.pi / 2, np.pi, 3 * np.pi / 2])
    assert np.allclose(c.nodes, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)
    assert np.allclose(c.weights, np.pi / 2)


def test_circle_perimeter():
    c = make_circle((0, 0), 0.3, 64)
    assert abs(c.weights.sum() - 0.6 * np.pi) < 1e-12


def test_circle_normals_radial():
    c = make_circle((0.2, 0), 0.5, 128)
    assert np.allclose(c.normals, (c.nodes - [0.2, 0]) / 0.5, atol=1e-14)


@pytest.mark.parametrize("r,n", [(0.0, 64), (-1.0, 64), (1.0, 6), (1.0, 9), (1.0, 10.5)])
def test_circle_rejects_bad_parameters(r, n):
    with pytest.raises(ParameterError):
        make_circle((0, 0), r, n)


def test_curves_are_immutable():
    c = make_circle((0, 0), 0.5, 16)
    with pytest.raises(ValueError):
        c.nodes[0, 0] = 3.0
    with pytest.raises(AttributeError):
        c.kind = "ellipse"


def test_triangle_perimeter_and_count():
    v = [[0, 0], [0.4, 0], [0.2, 0.4 * math.sqrt(3) / 2]]
    p = make_convex_polygon(v, 16, 3)
    assert p.n == 48
    assert abs(p.weights.sum() - 1.2) < 1e-6


def test_square_identity_grading_is_uniform():
    v = [[-0.2, -0.2], [0.2, -0.2], [0.2, 0.2], [-0.2, 0.2]]
    p = make_convex_polygon(v, 8, 1)
    first_edge = p.nodes[:8]
    assert np.allclose(first_edge[:, 0], -0.2 + 0.4 * (np.arange(8) + 0.5) / 8)
    assert np.allclose(p.weights, 0.4 / 8)


def test_collinear_vertices_rejected():
    with pytest.raises(GeometryError):
        make_convex_polygon([[0, 0], [0.1, 0], [0.2, 0]], 8, 3)


def test_nonconvex_rejected():
    with pytest.raises(GeometryError):
        make_convex_polygon([[0, 0], [1, 0], [0.2, 0.2], [0, 1]], 8, 3)


def test_clockwise_input_reoriented():
    p = make_convex_polygon([[0, 0], [0, 0.3], [0.3, 0]], 8, 3)
    assert p.signed_area > 0


def test_corners_are_not_nodes():
    v = np.array([[0, 0], [0.4, 0], [0.2, 0.3]])
    p = make_convex_polygon(v, 16, 3)
    d = np.min(np.linalg.norm(p.nodes[:, None, :] - v[None], axis=-1))
    assert d > 0


@pytest.mark.parametrize("p", [1, 3, 5, 7])
def test_grading_map_endpoints_and_density(p):
    s = np.linspace(0, 1, 201)
    g, dg = grading_map(s, p)
    assert abs(g[0]) < 1e-15 and abs(g[-1] - 1) < 1e-15
    assert np.all(np.diff(g) >= 0)
    fine = np.linspace(0, 1, 20001)
    _, dfine = grading_map(fine, p)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (dfine[1:] + dfine[:-1]) * np.diff(fine))])
    assert np.allclose(np.interp(s, fine, cum), g, atol=1e-6)


@pytest.mark.parametrize("curve", [
    make_circle((0.1, -0.2), 0.4, 64),
    make_ellipse((0.0, 0.1), (0.4, 0.2), 0.3, 64),
])
def test_invariants_smooth(curve):
    assert curve.signed_area > 0
    assert np.allclose(np.linalg.norm(curve.normals, axis=1), 1.0, atol=1e-12)
    assert abs(curve.weights.sum() - curve.exact_perimeter) < 1e-10


def test_polygon_invariants():
    p = make_convex_polygon([[0, 0], [0.5, 0.1], [0.3, 0.4], [-0.1, 0.3]], 20, 3)
    assert p.signed_area > 0
    assert np.allclose(np.linalg.norm(p.normals, axis=1), 1.0, atol=1e-12)
    assert abs(p.weights.sum() - p.exact_perimeter) < 1e-10


def test_contains_examples():
    d = TestDomain(make_circle((0, 0), 0.3, 64), "d")
    assert contains(d, (0, 0))
    assert contains(d, (0.3, 0))
    sq = TestDomain(make_convex_polygon([[-1, -1], [1, -1], [1, 1], [-1, 1]], 4, 1), "sq")
    assert not contains(sq, (2, 0))
    assert contains(sq, (1, 0))


def test_distance_property_examples():
    omega = make_circle((0, 0), 1.0, 256)
    side = 0.3
    tri = make_convex_polygon(
        [[-side / 2, -side / (2 * math.sqrt(3))], [side / 2, -side / (2 * math.sqrt(3))], [0, side / math.sqrt(3)]], 8, 3
    )
    assert check_distance_property(tri, omega)
    assert not check_distance_property(make_circle((0, 0), 0.45, 64), omega)
    tiny = make_convex_polygon([[0, 0], [1e-6, 0], [0, 1e-6]], 4, 1)
    assert check_distance_property(tiny, omega)


@pytest.mark.parametrize("curve", [
    make_circle((0.0, 0.0), 0.5, 64),
    make_ellipse((0.1, 0.0), (0.5, 0.25), 0.7, 128),
    make_convex_polygon([[0, 0], [0.5, 0.1], [0.3, 0.4], [-0.1, 0.3]], 16, 3),
])
def test_gauss_integral(curve):
    inside = curve.centroid
    outside = curve.centroid + np.array([2.0, 0.5])
    vals = double_layer(np.array([inside, outside]), curve) @ np.ones(curve.n)
    tol = 1e-6 if curve.is_smooth else 1e-4
    assert abs(vals[0] + 1.0) < tol
    assert abs(vals[1]) < tol


@pytest.mark.parametrize("make", [
    lambda n: make_ellipse((0, 0), (0.5, 0.3), 0.2, n),
    lambda n: make_convex_polygon([[0, 0], [0.5, 0.1], [0.3, 0.4]], n // 2, 3),
])
def test_perimeter_refinement_monotone(make):
    errs = []
    for n in (8, 16, 32, 64):
        c = make(n)
        errs.append(abs(c.weights.sum() - c.exact_perimeter))
    assert all(b <= a + 1e-15 for a, b in zip(errs, errs[1:]))


SHAPES = [
    make_circle((0.1, 0.0), 0.4, 128),
    make_ellipse((0.0, 0.1), (0.5, 0.2), 0.4, 256),
    make_convex_polygon([[-0.3, -0.2], [0.4, -0.1], [0.2, 0.4], [-0.3, 0.3]], 8, 1),
]


@pytest.mark.parametrize("shape", SHAPES, ids=["circle", "ellipse", "polygon"])
def test_contains_agrees_with_winding_number(shape):
    rng = np.random.default_rng(7)
    pts = rng.uniform(-0.7, 0.7, size=(1000, 2))
    wn = winding_number(shape, pts)
    inside = contains_points(shape, pts)
    if shape.kind == "convex_polygon":
        assert np.array_equal(inside, wn == 1)
    else:
        # node polygon differs from the smooth curve within a thin band
        r = np.linalg.norm(pts[:, None, :] - shape.nodes[None], axis=-1).min(axis=1)
        far = r > 0.01
        assert np.array_equal(inside[far], (wn == 1)[far])


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0, 2 * math.pi, allow_nan=False), min_size=3, max_size=7, unique=True),
    st.floats(-0.8, 0.8),
    st.floats(-0.8, 0.8),
)
def test_polygon_membership_matches_ray_casting(angles, px, py):
    angles = sorted(angles)
    gaps = np.diff(angles + [angles[0] + 2 * math.pi])
    if np.min(gaps) < 0.05 or np.max(gaps) > math.pi - 0.05:
        return
    v = 0.5 * np.column_stack([np.cos(angles), np.sin(angles)])
    poly = make_convex_polygon(v, 4, 1)
    e = np.roll(v, -1, 0) - v
    rel = np.array([px, py]) - v
    edge_dist = np.min(np.abs(e[:, 0] * rel[:, 1] - e[:, 1] * rel[:, 0]) / np.linalg.norm(e, axis=1))
    if edge_dist < 1e-9:
        return
    assert contains(poly, (px, py)) == ray_cast_inside(poly.vertices, (px, py))


def test_record_round_trip():
    for c in (make_circle((0.1, 0.2), 0.3, 32), make_ellipse((0, 0), (0.3, 0.2), 0.1, 32),
              make_convex_polygon([[0, 0], [0.3, 0], [0, 0.3]], 8, 3)):
        back = curve_from_record(c.to_record())
        assert np.allclose(back.nodes, c.nodes)
        assert np.allclose(back.weights, c.weights)


def test_nodes_csv_has_header_and_rows():
    c = make_circle((0, 0), 1, 8)
    lines = c.nodes_csv().splitlines()
    assert lines[0] == "x,y,nx,ny,w"
    assert len(lines) == 9
    assert float(lines[1].split(",")[0]) == 1.0


def test_translate_and_dilate():
    c = make_circle((0, 0), 0.2, 16)
    t = translate(c, (0.1, 0))
    assert t.spec["center"] == (0.1, 0.0)
    p = make_convex_polygon([[0, 0], [0.3, 0], [0, 0.3]], 8, 3)
    d = dilate(p, 2.0)
    assert np.allclose(d.vertices - d.centroid, 2 * (p.vertices - p.centroid))
