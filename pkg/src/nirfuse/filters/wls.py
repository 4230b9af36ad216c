"""Weighted-least-squares edge-preserving smoothing.

Minimises ``sum (u - g)^2 + lam * sum w * |grad u|^2`` where the weights
``w = 1 / (|grad l|^alpha + epsilon)`` come from the log-luminance
``l = log(g + 0.01)`` of the input.  The normal equations
``(I + lam * L_w) u = g`` form a five-point inhomogeneous Laplacian.
"""

from __future__ import annotations

import numpy as np

from ..imaging import as_plane
from .params import WLSParams
from .pcg import FivePointOperator, solve_spd

LOG_OFFSET = 1e-2


def smoothness_weights(src, alpha: float, epsilon: float) -> tuple[np.ndarray, np.ndarray]:
    """Forward-difference weights along x and y.

    Replicate boundaries make the difference past the last column/row zero;
    those couplings do not exist and are returned as zero.
    """
    log_lum = np.log(as_plane(src) + LOG_OFFSET)
    wx = np.zeros_like(log_lum)
    wy = np.zeros_like(log_lum)
    wx[:, :-1] = 1.0 / (np.abs(np.diff(log_lum, axis=1)) ** alpha + epsilon)
    wy[:-1, :] = 1.0 / (np.abs(np.diff(log_lum, axis=0)) ** alpha + epsilon)
    return wx, wy


def wls_operator(src, p: WLSParams = WLSParams()) -> FivePointOperator:
    wx, wy = smoothness_weights(src, p.alpha, p.epsilon)
    cx = p.lam * wx
    cy = p.lam * wy
    diag = 1.0 + cx + cy
    diag[:, 1:] += cx[:, :-1]
    diag[1:, :] += cy[:-1, :]
    return FivePointOperator(diag, cx, cy)


def wls_energy(u, g, p: WLSParams = WLSParams()) -> float:
    """Objective value of ``u`` for the smoothing problem defined by ``g``."""
    u = np.asarray(u, dtype=np.float64)
    wx, wy = smoothness_weights(g, p.alpha, p.epsilon)
    fit = np.sum((u - g) ** 2)
    smooth = np.sum(wx[:, :-1] * np.diff(u, axis=1) ** 2) + np.sum(
        wy[:-1, :] * np.diff(u, axis=0) ** 2
    )
    return float(fit + p.lam * smooth)


def wls_smooth(src, p: WLSParams = WLSParams(), clamp: bool = True) -> np.ndarray:
    """Edge-preserving smoothing of a plane.

    Raises ConvergenceError if the solver cannot reach ``p.solver_tol``.
    Pass ``clamp=False`` to get the raw solution (tests compare it against a
    dense solve).
    """
    src = as_plane(src)
    if p.lam == 0:
        return src.copy()
    A = wls_operator(src, p)
    u = solve_spd(A, src, tol=p.solver_tol, max_iter=p.max_iter, x0=src)
    return np.clip(u, 0.0, 1.0) if clamp else u
