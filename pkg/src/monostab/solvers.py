"""Iterative linear algebra on raw arrays with a pluggable inner product.

The grid operators are self-adjoint with respect to quadrature-weighted
inner products rather than the plain Euclidean one, so both solvers take
the dot product as an argument and never assume unit weights.
"""

import numpy as np

from .errors import ConvergenceError


def conjugate_gradient(apply_A, b, dot, x0=None, tol=1e-12, max_iter=None):
    """Solve A x = b for A self-adjoint positive (semi)definite under dot.

    Parameters
    ----------
    apply_A : callable
        Matrix-free operator; takes and returns arrays shaped like b.
    b : ndarray
        Right-hand side.
    dot : callable
        Inner product, e.g. a quadrature-weighted sum.
    x0 : ndarray, optional
        Warm start; defaults to zero.
    tol : float
        Relative tolerance on the residual norm against ||b||.
    max_iter : int, optional
        Defaults to 10x the number of unknowns.

    Returns
    -------
    (x, iterations)

    Raises
    ------
    ConvergenceError
        With the residual history attached when the tolerance is not met
        or the Krylov recurrence breaks down.
    """
    bnorm = np.sqrt(dot(b, b))
    if bnorm == 0.0:
        return np.zeros_like(b), 0
    if max_iter is None:
        max_iter = 10 * b.size + 50
    target = tol * bnorm

    if x0 is None:
        x = np.zeros_like(b)
        r = b.copy()
    else:
        x = x0.copy()
        r = b - apply_A(x)
    p = r.copy()
    rs = dot(r, r)
    log = [float(np.sqrt(rs))]

    for k in range(max_iter):
        if np.sqrt(rs) <= target:
            return x, k
        Ap = apply_A(p)
        pAp = dot(p, Ap)
        if pAp <= 0.0:
            raise ConvergenceError(
                "conjugate gradient breakdown (operator not positive on iterate)",
                residual=float(np.sqrt(rs)),
                iterations=k,
                log=log,
            )
        alpha = rs / pAp
        x = x + alpha * p
        r = r - alpha * Ap
        rs_new = dot(r, r)
        p = r + (rs_new / rs) * p
        rs = rs_new
        log.append(float(np.sqrt(rs)))

    if np.sqrt(rs) <= target:
        return x, max_iter
    raise ConvergenceError(
        f"conjugate gradient stagnated at residual {np.sqrt(rs):.3e} "
        f"(target {target:.3e}) after {max_iter} iterations",
        residual=float(np.sqrt(rs)),
        iterations=max_iter,
        log=log,
    )


def smallest_eigenvalue(apply_L, dot, x0, tol=1e-6, max_iter=200, cg_tol=1e-12, cg_max_iter=None):
    """Smallest eigenvalue of a self-adjoint positive definite operator.

    Inverse power iteration with inner conjugate-gradient solves; the
    Rayleigh quotient is declared converged once its relative change per
    sweep drops below tol.

    Returns (eigenvalue, eigenvector) with the eigenvector normalized
    under dot.
    """
    x = x0 / np.sqrt(dot(x0, x0))
    lam = dot(apply_L(x), x)
    for _ in range(max_iter):
        y, _ = conjugate_gradient(apply_L, x, dot, x0=x / lam, tol=cg_tol, max_iter=cg_max_iter)
        x = y / np.sqrt(dot(y, y))
        lam_new = dot(apply_L(x), x)
        if abs(lam_new - lam) <= tol * max(abs(lam_new), np.finfo(float).tiny):
            return float(lam_new), x
        lam = lam_new
    raise ConvergenceError(
        f"inverse power iteration did not settle within {max_iter} sweeps",
        residual=abs(lam_new - lam),
        iterations=max_iter,
    )
