import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from rtnrt._backend import BACKEND, KERNEL_NAMES, available_backends, get_backend

pytestmark = pytest.mark.skipif("cython" not in available_backends(), reason="compiled kernels not built")

coords = arrays(np.float64, st.tuples(st.integers(1, 12), st.just(2)), elements=st.floats(-0.9, 0.9))


def _unit(a):
    return a / np.maximum(np.linalg.norm(a, axis=1, keepdims=True), 1e-3)


@settings(max_examples=40, deadline=None)
@given(coords, coords, coords)
def test_layer_kernels_agree(tx, sx, sn):
    n = min(len(sx), len(sn))
    sx, sn = sx[:n], _unit(sn[:n] + 0.01)
    tn = _unit(tx + 0.01)
    sw = np.linspace(0.1, 1.0, n)
    c, p = get_backend("cython"), get_backend("python")
    for name, args in (
        ("single_layer", (tx, sx, sw)),
        ("double_layer", (tx, sx, sn, sw)),
        ("adjoint_double_layer", (tx, tn, sx, sw)),
        ("double_layer_dn", (tx, tn, sx, sn, sw)),
        ("green_disk", (tx, sx, sw)),
    ):
        a = getattr(c, name)(*args)
        b = getattr(p, name)(*args)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12), name


def test_boundary_and_membership_kernels_agree():
    rng = np.random.default_rng(3)
    t = rng.uniform(0, 2 * np.pi, 20)
    tx = np.ascontiguousarray(np.column_stack([np.cos(t), np.sin(t)]))
    sx = rng.uniform(-0.6, 0.6, (15, 2))
    sw = rng.uniform(0.1, 1, 15)
    c, p = get_backend("cython"), get_backend("python")
    assert np.allclose(c.green_disk_dnx_unit(tx, sx, sw), p.green_disk_dnx_unit(tx, sx, sw), rtol=1e-13)
    pts = rng.uniform(-1, 1, (500, 2))
    centers, radii = np.array([[0.0, 0.0], [0.3, 0.1]]), np.array([0.5, 0.4])
    assert np.array_equal(c.points_in_all_disks(pts, centers, radii, 1e-12), p.points_in_all_disks(pts, centers, radii, 1e-12))
    verts = np.array([[-0.5, -0.4], [0.6, -0.3], [0.1, 0.7]])
    assert np.array_equal(c.points_in_convex_polygon(pts, verts, 1e-12), p.points_in_convex_polygon(pts, verts, 1e-12))


def test_every_kernel_is_present():
    for name in ("cython", "python"):
        ns = get_backend(name)
        for k in KERNEL_NAMES:
            assert callable(getattr(ns, k))


def test_default_backend_is_compiled():
    if os.environ.get("RTNRT_PURE_PYTHON"):
        pytest.skip("fallback forced by environment")
    assert BACKEND == "cython"


def test_environment_forces_fallback():
    env = dict(os.environ, RTNRT_PURE_PYTHON="1")
    out = subprocess.run(
        [sys.executable, "-c", "import rtnrt._backend as b; print(b.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
