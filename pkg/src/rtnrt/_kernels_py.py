"""Pure numpy implementations of the hot kernel loops.

Every function takes float64 arrays of shape (M, 2) / (N, 2) / (N,) and
returns a dense (M, N) matrix whose column j already carries the source
quadrature weight ``sw[j]``. Coincident target/source pairs produce 0; the
caller is responsible for the diagonal of on-curve matrices.

``_kernels_c`` (Cython) exports the same names and is preferred when built.
"""

import numpy as np

_INV_2PI = 1.0 / (2.0 * np.pi)
_INV_4PI = 1.0 / (4.0 * np.pi)


def _diff(tx, sx):
    dx = tx[:, 0, None] - sx[None, :, 0]
    dy = tx[:, 1, None] - sx[None, :, 1]
    r2 = dx * dx + dy * dy
    zero = r2 == 0.0
    r2 = np.where(zero, 1.0, r2)
    return dx, dy, r2, zero


def single_layer(tx, sx, sw):
    dx, dy, r2, zero = _diff(tx, sx)
    out = -_INV_4PI * np.log(r2)
    out[zero] = 0.0
    return out * sw[None, :]


def double_layer(tx, sx, sn, sw):
    dx, dy, r2, zero = _diff(tx, sx)
    out = _INV_2PI * (dx * sn[None, :, 0] + dy * sn[None, :, 1]) / r2
    out[zero] = 0.0
    return out * sw[None, :]


def adjoint_double_layer(tx, tn, sx, sw):
    dx, dy, r2, zero = _diff(tx, sx)
    out = -_INV_2PI * (dx * tn[:, 0, None] + dy * tn[:, 1, None]) / r2
    out[zero] = 0.0
    return out * sw[None, :]


def double_layer_dn(tx, tn, sx, sn, sw):
    dx, dy, r2, zero = _diff(tx, sx)
    dot_s = dx * sn[None, :, 0] + dy * sn[None, :, 1]
    dot_t = dx * tn[:, 0, None] + dy * tn[:, 1, None]
    nn = tn[:, 0, None] * sn[None, :, 0] + tn[:, 1, None] * sn[None, :, 1]
    out = _INV_2PI * (nn / r2 - 2.0 * (dot_s / r2) * (dot_t / r2))
    out[zero] = 0.0
    return out * sw[None, :]


def layer_gradients(tx, sx, sn, sw):
    """x-gradients of the single- and double-layer kernels.

    Returns ``(sl_x, sl_y, dl_x, dl_y)``, each (M, N) and weighted.
    """
    dx, dy, r2, zero = _diff(tx, sx)
    sl_x = -_INV_2PI * dx / r2
    sl_y = -_INV_2PI * dy / r2
    dot_s = dx * sn[None, :, 0] + dy * sn[None, :, 1]
    dl_x = _INV_2PI * (sn[None, :, 0] / r2 - 2.0 * (dot_s / r2) * (dx / r2))
    dl_y = _INV_2PI * (sn[None, :, 1] / r2 - 2.0 * (dot_s / r2) * (dy / r2))
    out = []
    for m in (sl_x, sl_y, dl_x, dl_y):
        m[zero] = 0.0
        out.append(m * sw[None, :])
    return tuple(out)


def green_disk(tx, sx, sw):
    dx, dy, r2, zero = _diff(tx, sx)
    t2 = tx[:, 0, None] ** 2 + tx[:, 1, None] ** 2
    s2 = sx[None, :, 0] ** 2 + sx[None, :, 1] ** 2
    dot = tx[:, 0, None] * sx[None, :, 0] + tx[:, 1, None] * sx[None, :, 1]
    q = 1.0 - 2.0 * dot + t2 * s2
    out = -_INV_4PI * (np.log(r2) - np.log(q))
    out[zero] = 0.0
    return out * sw[None, :]


def green_disk_grad(tx, sx, sw):
    """Weighted x-gradient of the unit-disk Dirichlet Green function."""
    dx, dy, r2, zero = _diff(tx, sx)
    t2 = tx[:, 0, None] ** 2 + tx[:, 1, None] ** 2
    s2 = sx[None, :, 0] ** 2 + sx[None, :, 1] ** 2
    dot = tx[:, 0, None] * sx[None, :, 0] + tx[:, 1, None] * sx[None, :, 1]
    q = 1.0 - 2.0 * dot + t2 * s2
    gx = -_INV_2PI * (dx / r2 - (s2 * tx[:, 0, None] - sx[None, :, 0]) / q)
    gy = -_INV_2PI * (dy / r2 - (s2 * tx[:, 1, None] - sx[None, :, 1]) / q)
    gx[zero] = 0.0
    gy[zero] = 0.0
    return gx * sw[None, :], gy * sw[None, :]


def green_disk_dnx_unit(tx, sx, sw):
    """Weighted outward normal derivative in x of the disk Green function.

    Targets must lie on the unit circle, where the derivative reduces to
    minus the Poisson kernel.
    """
    dx, dy, r2, zero = _diff(tx, sx)
    s2 = sx[None, :, 0] ** 2 + sx[None, :, 1] ** 2
    out = -_INV_2PI * (1.0 - s2) / r2
    out[zero] = 0.0
    return out * sw[None, :]


def points_in_all_disks(px, centers, radii, tol):
    inside = np.ones(px.shape[0], dtype=bool)
    for c, r in zip(centers, radii):
        d2 = (px[:, 0] - c[0]) ** 2 + (px[:, 1] - c[1]) ** 2
        inside &= d2 <= (r + tol) ** 2
    return inside


def points_in_convex_polygon(px, vertices, tol):
    """Closed membership for a counter-clockwise convex polygon."""
    inside = np.ones(px.shape[0], dtype=bool)
    m = vertices.shape[0]
    for k in range(m):
        a = vertices[k]
        b = vertices[(k + 1) % m]
        ex, ey = b[0] - a[0], b[1] - a[1]
        length = np.hypot(ex, ey)
        cross = ex * (px[:, 1] - a[1]) - ey * (px[:, 0] - a[0])
        inside &= cross >= -tol * length
    return inside
