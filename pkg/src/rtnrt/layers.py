"""Nyström matrices for Laplace layer potentials with the free-space kernel.

Conventions (Φ(x, y) = -(1/2π) log|x - y|, n = outward normal):

* single layer   S[σ](x)  = ∫ Φ(x, y) σ(y) ds(y)
* double layer   D[σ](x)  = ∫ ∂Φ/∂n(y) σ(y) ds(y),   D[1] = -1 inside, 0 outside
* on-curve limits of D: interior K - 1/2, exterior K + 1/2
* on-curve limits of ∂S/∂n(x): interior K' + 1/2, exterior K' - 1/2
* normal derivative of D has no jump; it is evaluated through the
  tangential-derivative identity T = d/ds S d/ds.

On-curve matrices rely on the uniform global parameter of every curve.
"""

from __future__ import annotations

import numpy as np

from ._backend import as_points, as_vector, kernels
from .geometry import BoundaryCurve

_INV_4PI = 1.0 / (4.0 * np.pi)


def log_weights(n: int) -> np.ndarray:
    """Circulant weights for ∫ log(4 sin²((t - τ)/2)) f(τ) dτ on n nodes."""
    d = 2.0 * np.pi * np.arange(n) / n
    half = n // 2
    m = np.arange(1, (n - 1) // 2 + 1)
    r = (np.cos(np.outer(d, m)) / m).sum(axis=1)
    if n % 2 == 0:
        r += np.cos(half * d) / n
    col = -(4.0 * np.pi / n) * r
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    return col[idx]


def spectral_derivative(n: int) -> np.ndarray:
    """Matrix of d/dt on n periodic samples (Nyquist mode dropped)."""
    k = np.fft.fftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[n // 2] = 0.0
    return np.real(np.fft.ifft(1j * k[:, None] * np.fft.fft(np.eye(n), axis=0), axis=0))


def single_layer_self(curve: BoundaryCurve) -> np.ndarray:
    n = curve.n
    x = curve.nodes
    dt = x[:, None, :] - x[None, :, :]
    r2 = np.sum(dt * dt, axis=-1)
    tdiff = curve.params[:, None] - curve.params[None, :]
    s2 = 4.0 * np.sin(0.5 * tdiff) ** 2
    np.fill_diagonal(s2, 1.0)
    np.fill_diagonal(r2, 1.0)
    # graded polygon nodes can coincide in floating point near a corner
    smooth = np.log(np.maximum(r2, 1e-300) / s2)
    np.fill_diagonal(smooth, np.log(curve.speed**2))
    mat = log_weights(n) + (2.0 * np.pi / n) * smooth
    return -_INV_4PI * mat * curve.speed[None, :]


def double_layer_self(curve: BoundaryCurve) -> np.ndarray:
    """Principal value K (no jump term)."""
    x = as_points(curve.nodes)
    mat = kernels.double_layer(x, x, as_points(curve.normals), as_vector(curve.weights))
    mat[np.diag_indices_from(mat)] = -_INV_4PI * curve.curvature * curve.weights
    return mat


def adjoint_double_layer_self(curve: BoundaryCurve) -> np.ndarray:
    """Principal value K' of the normal derivative of S (no jump term)."""
    x = as_points(curve.nodes)
    mat = kernels.adjoint_double_layer(x, as_points(curve.normals), x, as_vector(curve.weights))
    mat[np.diag_indices_from(mat)] = -_INV_4PI * curve.curvature * curve.weights
    return mat


def hypersingular_self(curve: BoundaryCurve, single=None) -> np.ndarray:
    """Normal derivative of D on the curve itself."""
    s = single_layer_self(curve) if single is None else single
    dt = spectral_derivative(curve.n)
    inv_speed = 1.0 / curve.speed
    return (inv_speed[:, None] * dt) @ s @ (inv_speed[:, None] * dt)


def single_layer(targets, curve: BoundaryCurve) -> np.ndarray:
    return kernels.single_layer(as_points(targets), as_points(curve.nodes), as_vector(curve.weights))


def double_layer(targets, curve: BoundaryCurve) -> np.ndarray:
    return kernels.double_layer(
        as_points(targets), as_points(curve.nodes), as_points(curve.normals), as_vector(curve.weights)
    )


def single_layer_dn(targets, target_normals, curve: BoundaryCurve) -> np.ndarray:
    return kernels.adjoint_double_layer(
        as_points(targets), as_points(target_normals), as_points(curve.nodes), as_vector(curve.weights)
    )


def double_layer_dn(targets, target_normals, curve: BoundaryCurve) -> np.ndarray:
    return kernels.double_layer_dn(
        as_points(targets),
        as_points(target_normals),
        as_points(curve.nodes),
        as_points(curve.normals),
        as_vector(curve.weights),
    )


def layer_gradients(targets, curve: BoundaryCurve):
    """Matrices giving ∇S[σ] and ∇D[σ] at off-curve targets."""
    return kernels.layer_gradients(
        as_points(targets), as_points(curve.nodes), as_points(curve.normals), as_vector(curve.weights)
    )
