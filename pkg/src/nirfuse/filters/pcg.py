"""Jacobi-preconditioned conjugate gradients.

``solve_spd`` accepts any symmetric positive-definite operator supporting
``A @ x`` (dense arrays, scipy sparse matrices) and has a fused, compiled
path for :class:`FivePointOperator`, the structure produced by WLS
smoothing.  Both paths run the same recurrence in a fixed summation order,
so results are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np
import scipy.sparse as sp

from ..errors import ConvergenceError, ShapeError


@dataclass(frozen=True, eq=False)
class FivePointOperator:
    """``diag * u - (neighbour couplings)`` on an ``H x W`` grid.

    ``cx[i, j]`` couples pixel ``(i, j)`` with ``(i, j + 1)`` and ``cy[i, j]``
    couples it with ``(i + 1, j)``.  The last column of ``cx`` and last row of
    ``cy`` must be zero.
    """

    diag: np.ndarray
    cx: np.ndarray
    cy: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        n = self.diag.size
        return (n, n)

    def __matmul__(self, x):
        u = np.asarray(x, dtype=np.float64).reshape(self.diag.shape)
        out = self.diag * u
        out[:, :-1] -= self.cx[:, :-1] * u[:, 1:]
        out[:, 1:] -= self.cx[:, :-1] * u[:, :-1]
        out[:-1, :] -= self.cy[:-1, :] * u[1:, :]
        out[1:, :] -= self.cy[:-1, :] * u[:-1, :]
        return out.reshape(np.shape(x))

    def diagonal(self) -> np.ndarray:
        return self.diag.ravel().copy()

    def to_sparse(self) -> sp.csr_matrix:
        h, w = self.diag.shape
        cx = self.cx.ravel()[:-1]
        cy = self.cy.ravel()[: -w] if h > 1 else np.zeros(0)
        return sp.diags(
            [self.diag.ravel(), -cx, -cx, -cy, -cy], [0, 1, -1, w, -w], format="csr"
        )


@dataclass
class SolveInfo:
    iterations: int
    residual: float
    history: list = field(default_factory=list)


@numba.njit(cache=True, nogil=True)
def _stencil_apply(diag, cx, cy, u, out):
    h, w = diag.shape
    for i in range(h):
        for j in range(w):
            out[i, j] = diag[i, j] * u[i, j]
        for j in range(w - 1):
            c = cx[i, j]
            out[i, j] -= c * u[i, j + 1]
            out[i, j + 1] -= c * u[i, j]
        if i > 0:
            for j in range(w):
                c = cy[i - 1, j]
                out[i - 1, j] -= c * u[i, j]
                out[i, j] -= c * u[i - 1, j]


@numba.njit(cache=True, nogil=True)
def _stencil_pcg(diag, cx, cy, b, x, tol, max_iter, history):
    """Run PCG in place on ``x``; return (iterations, relative residual)."""
    h, w = diag.shape
    r = np.empty_like(b)
    z = np.empty_like(b)
    p = np.empty_like(b)
    q = np.empty_like(b)
    dinv = 1.0 / diag
    bnorm = np.sqrt(np.sum(b * b))
    if bnorm == 0.0:
        x[:] = 0.0
        return 0, 0.0

    it = 0
    rel = 0.0
    while True:
        # (Re)start from the true residual.
        _stencil_apply(diag, cx, cy, x, q)
        rz = 0.0
        rr = 0.0
        for i in range(h):
            for j in range(w):
                rv = b[i, j] - q[i, j]
                r[i, j] = rv
                zv = rv * dinv[i, j]
                z[i, j] = zv
                p[i, j] = zv
                rz += rv * zv
                rr += rv * rv
        rel = np.sqrt(rr) / bnorm
        if it == 0:
            history.append(rel)
        if rel <= tol:
            return it, rel
        while it < max_iter:
            _stencil_apply(diag, cx, cy, p, q)
            pq = 0.0
            for i in range(h):
                for j in range(w):
                    pq += p[i, j] * q[i, j]
            a = rz / pq
            rz_new = 0.0
            rr = 0.0
            for i in range(h):
                for j in range(w):
                    x[i, j] += a * p[i, j]
                    rv = r[i, j] - a * q[i, j]
                    r[i, j] = rv
                    zv = rv * dinv[i, j]
                    z[i, j] = zv
                    rz_new += rv * zv
                    rr += rv * rv
            it += 1
            rel = np.sqrt(rr) / bnorm
            history.append(rel)
            if rel <= tol:
                break
            beta = rz_new / rz
            rz = rz_new
            for i in range(h):
                for j in range(w):
                    p[i, j] = z[i, j] + beta * p[i, j]
        if it >= max_iter and rel > tol:
            return it, rel
        # The recurrence claims convergence; confirm with the true residual.
        _stencil_apply(diag, cx, cy, x, q)
        rr = 0.0
        for i in range(h):
            for j in range(w):
                rv = b[i, j] - q[i, j]
                rr += rv * rv
        rel = np.sqrt(rr) / bnorm
        if rel <= tol or it >= max_iter:
            return it, rel


def _generic_pcg(A, b, x, tol, max_iter, history):
    if sp.issparse(A):
        d = A.diagonal()
    elif hasattr(A, "diagonal"):
        d = np.asarray(A.diagonal())
    else:
        d = np.diag(np.asarray(A))
    if np.any(d <= 0):
        raise ValueError("operator diagonal must be positive")
    dinv = 1.0 / d
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        x[:] = 0.0
        return 0, 0.0

    it = 0
    while True:
        r = b - A @ x
        z = dinv * r
        p = z.copy()
        rz = r @ z
        rel = np.linalg.norm(r) / bnorm
        if it == 0:
            history.append(rel)
        if rel <= tol:
            return it, rel
        while it < max_iter:
            q = A @ p
            a = rz / (p @ q)
            x += a * p
            r -= a * q
            z = dinv * r
            rz_new = r @ z
            it += 1
            rel = np.linalg.norm(r) / bnorm
            history.append(rel)
            if rel <= tol:
                break
            p = z + (rz_new / rz) * p
            rz = rz_new
        if it >= max_iter and rel > tol:
            return it, rel
        rel = np.linalg.norm(b - A @ x) / bnorm
        if rel <= tol or it >= max_iter:
            return it, rel


def solve_spd(A, b, tol: float = 1e-6, max_iter: int = 2000, x0=None, full_output=False):
    """Solve ``A x = b`` for symmetric positive-definite ``A``.

    Stops once ``||A x - b|| / ||b|| <= tol`` (checked on the true residual).
    Raises :class:`ConvergenceError` if ``max_iter`` iterations are not
    enough.  With ``full_output`` returns ``(x, SolveInfo)``.
    """
    b = np.asarray(b, dtype=np.float64)
    n = A.shape[0]
    if A.shape != (n, n) or b.size != n:
        raise ShapeError(f"operator {A.shape} does not match rhs of size {b.size}")
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64).ravel()
    history = numba.typed.List.empty_list(numba.float64) if isinstance(
        A, FivePointOperator
    ) else []

    if isinstance(A, FivePointOperator):
        shape = A.diag.shape
        xg = np.ascontiguousarray(x.reshape(shape))
        it, rel = _stencil_pcg(
            np.ascontiguousarray(A.diag),
            np.ascontiguousarray(A.cx),
            np.ascontiguousarray(A.cy),
            np.ascontiguousarray(b.reshape(shape)),
            xg,
            float(tol),
            int(max_iter),
            history,
        )
        x = xg.ravel()
    else:
        it, rel = _generic_pcg(A, b.ravel(), x, tol, max_iter, history)

    history = list(history)
    if rel > tol:
        raise ConvergenceError(f"PCG did not converge in {it} iterations", rel, history)
    x = x.reshape(b.shape)
    if full_output:
        return x, SolveInfo(it, rel, history)
    return x
