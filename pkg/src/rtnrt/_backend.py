"""Select the kernel implementation at import time.

The compiled extension is used when it is importable; set the environment
variable ``RTNRT_PURE_PYTHON=1`` to force the numpy fallback.
"""

import os
from types import SimpleNamespace

import numpy as np

from . import _kernels_py

KERNEL_NAMES = (
    "single_layer",
    "double_layer",
    "adjoint_double_layer",
    "double_layer_dn",
    "layer_gradients",
    "green_disk",
    "green_disk_grad",
    "green_disk_dnx_unit",
    "points_in_all_disks",
    "points_in_convex_polygon",
)


def _load_compiled():
    try:
        from . import _kernels_c
    except ImportError:
        return None
    return _kernels_c


def _build(name):
    mods = [_kernels_py]
    if name == "cython":
        compiled = _load_compiled()
        if compiled is None:
            raise ImportError("compiled kernels are not built")
        mods.insert(0, compiled)
    funcs = {}
    for fn in KERNEL_NAMES:
        for mod in mods:
            if hasattr(mod, fn):
                funcs[fn] = getattr(mod, fn)
                break
    return SimpleNamespace(name=name, **funcs)


def get_backend(name=None):
    """Return a kernel namespace: ``"cython"``, ``"python"`` or the default."""
    if name is None:
        return kernels
    return _build(name)


def available_backends():
    names = ["python"]
    if _load_compiled() is not None:
        names.insert(0, "cython")
    return names


if os.environ.get("RTNRT_PURE_PYTHON") or _load_compiled() is None:
    kernels = _build("python")
else:
    kernels = _build("cython")

BACKEND = kernels.name


def as_points(a):
    """Contiguous float64 (n, 2) view accepted by both backends."""
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64).reshape(-1, 2))


def as_vector(a):
    return np.ascontiguousarray(np.asarray(a, dtype=np.float64).reshape(-1))
