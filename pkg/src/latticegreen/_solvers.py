"""Preconditioned conjugate gradient on degree-symmetrized lattice systems."""

import numpy as np


def pcg(matvec, diag, b, tol, maxiter):
    """CG with Jacobi preconditioner diag, started at zero.

    Stops when max_i |r_i| / diag_i <= tol, i.e. when the residual of the
    walk-normalized equation D^{-1}(b - L x) is below tol in max-norm.
    Returns (x, iterations, achieved, converged).
    """
    x = np.zeros_like(b, dtype=float)
    r = np.asarray(b, dtype=float).copy()
    achieved = float(np.max(np.abs(r) / diag))
    if achieved <= tol:
        return x, 0, achieved, True
    z = r / diag
    p = z.copy()
    rz = float(r @ z)
    for it in range(1, maxiter + 1):
        ap = matvec(p)
        denom = float(p @ ap)
        if denom <= 0.0:
            # numerically lost positive-definiteness; report as stalled
            return x, it, achieved, False
        alpha = rz / denom
        x += alpha * p
        r -= alpha * ap
        achieved = float(np.max(np.abs(r) / diag))
        if achieved <= tol:
            return x, it, achieved, True
        z = r / diag
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, maxiter, achieved, False
