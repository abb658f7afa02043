"""Laplace kernels in the plane: the fundamental solution and the Dirichlet
Green function of the unit disk, with analytic derivatives.

The disk Green function is evaluated as

    G(x, y) = -(1/4π) [log|x - y|^2 - log(1 - 2 x·y + |x|^2 |y|^2)]

which is the method-of-images formula with the image distance rewritten so
that it stays smooth at y = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError, SingularEvaluationError

ELL_MAX = 12
_INV_2PI = 1.0 / (2.0 * math.pi)
_INV_4PI = 1.0 / (4.0 * math.pi)


@dataclass(frozen=True)
class KernelEval:
    value: float
    grad_x: np.ndarray
    grad_y: np.ndarray


def _pt(p):
    a = np.asarray(p, dtype=np.float64).reshape(2)
    return a


def fundamental_solution(x, y) -> KernelEval:
    x, y = _pt(x), _pt(y)
    d = x - y
    r2 = float(d @ d)
    if r2 == 0.0:
        raise SingularEvaluationError("fundamental solution evaluated at x == y")
    gx = -_INV_2PI * d / r2
    return KernelEval(-_INV_4PI * math.log(r2), gx, -gx)


def _check_disk_args(x, y):
    if float(y @ y) >= 1.0:
        raise DomainError("source point must lie strictly inside the unit disk")
    if float(x @ x) > 1.0 + 1e-12:
        raise DomainError("target point lies outside the unit disk")
    if np.array_equal(x, y):
        raise SingularEvaluationError("Green function evaluated at x == y")


def dirichlet_green_disk(x, y) -> KernelEval:
    x, y = _pt(x), _pt(y)
    _check_disk_args(x, y)
    d = x - y
    r2 = float(d @ d)
    x2, y2 = float(x @ x), float(y @ y)
    q = 1.0 - 2.0 * float(x @ y) + x2 * y2
    value = -_INV_4PI * (math.log(r2) - math.log(q))
    gx = -_INV_2PI * (d / r2 - (y2 * x - y) / q)
    gy = -_INV_2PI * (-d / r2 - (x2 * y - x) / q)
    return KernelEval(value, gx, gy)


def normal_derivative_green_on_boundary(x, y) -> float:
    """Outward normal derivative in x of the disk Green function, |x| = 1."""
    x, y = _pt(x), _pt(y)
    if abs(float(x @ x) - 1.0) > 1e-10:
        raise DomainError("x must lie on the unit circle")
    if float(y @ y) >= 1.0:
        raise DomainError("y must lie strictly inside the unit disk")
    d = x - y
    return -_INV_2PI * (1.0 - float(y @ y)) / float(d @ d)


def _log_derivative_terms(order, zeta, xi):
    """k-th complex derivative in ζ of log(ζ - ξ) - log(1 - conj(ξ) ζ)."""
    xb = np.conj(xi)
    if order == 0:
        return np.log(zeta - xi) - np.log(1.0 - xb * zeta)
    fact = math.factorial(order - 1)
    direct = (-1.0) ** (order - 1) * fact / (zeta - xi) ** order
    image = fact * xb**order / (1.0 - xb * zeta) ** order
    return direct + image


def directional_derivative_green_many(h, order, xs, z) -> np.ndarray:
    """``(h·∇_z)^order G(x, z)`` for many x at once."""
    if int(order) != order or order < 0:
        raise ParameterError("derivative order must be a nonnegative integer")
    if order > ELL_MAX:
        raise ParameterError(f"derivative order {order} exceeds the cap {ELL_MAX}")
    h = _pt(h)
    z = _pt(z)
    xs = np.asarray(xs, dtype=np.float64).reshape(-1, 2)
    hc = complex(h[0], h[1])
    zeta = complex(z[0], z[1])
    xi = xs[:, 0] + 1j * xs[:, 1]
    if np.any(xi == zeta):
        raise SingularEvaluationError("kernel derivative evaluated at x == z")
    terms = _log_derivative_terms(int(order), zeta, xi)
    return -_INV_2PI * np.real(hc**order * terms)


def directional_derivative_green(h, order, x, z) -> float:
    x, z = _pt(x), _pt(z)
    _check_disk_args(x, z)
    return float(directional_derivative_green_many(h, order, x, z)[0])
