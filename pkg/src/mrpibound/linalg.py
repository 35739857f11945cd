"""Dense linear-algebra kernels.

Small, dense, well-conditioned problems only (n <= 32 for eigen-extremes,
n <= 20 for Lyapunov solves through the Kronecker form).
"""

import numpy as np

from .config import DEFAULT, Tolerances
from .exceptions import (
    DimensionMismatch,
    Infeasible,
    NoConvergence,
    NotPositiveDefinite,
    NotSchurStable,
    SingularMatrix,
)


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float array."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} has non-finite entries")
    return a


def _square(a, name="matrix"):
    a = as_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {a.shape}")
    return a


def solve_linear(A, b, tol: Tolerances = DEFAULT):
    """Solve ``A x = b`` by Gaussian elimination with partial pivoting.

    Raises:
        SingularMatrix: if a pivot magnitude falls below ``tol.pivot``.
    """
    A = _square(A, "A").copy()
    b = np.asarray(b, dtype=float)
    vector_rhs = b.ndim == 1
    B = b.reshape(A.shape[0], -1).copy()
    if B.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"rhs has {B.shape[0]} rows, A has {A.shape[0]}")
    n = A.shape[0]
    for k in range(n):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[p, k]) <= tol.pivot:
            raise SingularMatrix(f"pivot {A[p, k]:.3e} at column {k}")
        if p != k:
            A[[k, p]] = A[[p, k]]
            B[[k, p]] = B[[p, k]]
        factors = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(factors, A[k, k:])
        B[k + 1:] -= np.outer(factors, B[k])
    x = np.zeros_like(B)
    for k in range(n - 1, -1, -1):
        x[k] = (B[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x[:, 0] if vector_rhs else x


def cholesky(P, tol: Tolerances = DEFAULT):
    """Lower-triangular ``L`` with ``P = L L^T``."""
    P = _square(P, "P")
    scale = max(np.abs(P).max(), 1.0)
    if np.abs(P - P.T).max() > tol.symmetry * scale:
        raise NotPositiveDefinite("P is not symmetric")
    try:
        L = np.linalg.cholesky(0.5 * (P + P.T))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite(str(exc)) from exc
    if np.any(np.diag(L) <= 0.0):
        raise NotPositiveDefinite("non-positive pivot in Cholesky factor")
    return L


def solve_triangular(L, b, lower=True):
    """Forward/back substitution for a triangular system."""
    L = np.asarray(L, dtype=float)
    b = np.asarray(b, dtype=float)
    n = L.shape[0]
    x = np.zeros_like(b, dtype=float)
    rows = range(n) if lower else range(n - 1, -1, -1)
    for i in rows:
        if lower:
            s = L[i, :i] @ x[:i]
        else:
            s = L[i, i + 1:] @ x[i + 1:]
        x[i] = (b[i] - s) / L[i, i]
    return x


def sym_eig_max(S, tol: Tolerances = DEFAULT):
    """Largest eigenvalue of a symmetric matrix."""
    S = _square(S, "S")
    try:
        return float(np.linalg.eigvalsh(0.5 * (S + S.T))[-1])
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def spectral_radius(A):
    A = _square(A, "A")
    try:
        return float(np.max(np.abs(np.linalg.eigvals(A))))
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def solve_discrete_lyapunov(A, Q, tol: Tolerances = DEFAULT):
    """Solve ``A^T P A - P = -Q`` through its vectorized form.

    The n^2 x n^2 system ``(I - A^T kron A^T) vec(P) = vec(Q)`` is solved
    directly, which is fine for the n <= 20 systems this package targets.
    """
    A = _square(A, "A")
    Q = _square(Q, "Q")
    n = A.shape[0]
    if Q.shape != A.shape:
        raise DimensionMismatch(f"Q shape {Q.shape} does not match A {A.shape}")
    rho = spectral_radius(A)
    if rho >= 1.0 - tol.schur_margin:
        raise NotSchurStable(f"spectral radius {rho:.6g} is not below 1")
    # Row-major vec: vec(A^T P A) = (A^T kron A^T) vec(P).
    M = np.eye(n * n) - np.kron(A.T, A.T)
    p = solve_linear(M, Q.reshape(-1), tol)
    P = p.reshape(n, n)
    return 0.5 * (P + P.T)


def _box_kkt_ok(H, g, z, lower, upper, eps):
    grad = H @ z + g
    at_lo = np.isclose(z, lower, rtol=0.0, atol=eps)
    at_hi = np.isclose(z, upper, rtol=0.0, atol=eps)
    free = ~(at_lo | at_hi)
    scale = 1.0 + np.abs(g).max(initial=0.0)
    return (np.all(np.abs(grad[free]) <= eps * scale)
            and np.all(grad[at_lo & ~at_hi] >= -eps * scale)
            and np.all(grad[at_hi & ~at_lo] <= eps * scale))


def solve_qp(H, g, lower, upper, tol: Tolerances = DEFAULT):
    """Minimize ``0.5 z^T H z + g^T z`` subject to ``lower <= z <= upper``.

    Primal active-set method on the bound constraints. ``H`` must be
    symmetric positive definite; infinite bounds are allowed.
    """
    H = _square(H, "H")
    g = np.asarray(g, dtype=float).reshape(-1)
    lower = np.asarray(lower, dtype=float).reshape(-1)
    upper = np.asarray(upper, dtype=float).reshape(-1)
    n = H.shape[0]
    if not (g.size == lower.size == upper.size == n):
        raise DimensionMismatch("H, g and bounds must agree in size")
    if np.any(lower > upper):
        raise Infeasible("lower bound exceeds upper bound")

    z = np.clip(np.zeros(n), lower, upper)
    # fixed[i] is -1 (at lower), +1 (at upper) or 0 (free).
    fixed = np.zeros(n, dtype=int)
    fixed[(z == lower) & np.isfinite(lower)] = -1
    fixed[(z == upper) & np.isfinite(upper) & (fixed == 0)] = 1
    eq = lower == upper
    fixed[eq] = -1

    stationary = False
    for _ in range(tol.max_iterations):
        grad = H @ z + g
        free = fixed == 0
        if stationary or not free.any():
            # Minimizer on the working set: release the worst-signed bound.
            mult = np.where(fixed == -1, grad, np.where(fixed == 1, -grad, 0.0))
            mult[eq] = 0.0
            worst = int(np.argmin(mult))
            if mult[worst] >= -1e-13 * (1.0 + np.abs(g).max(initial=0.0)):
                return z
            fixed[worst] = 0
            stationary = False
            continue
        step = np.zeros(n)
        step[free] = solve_linear(H[np.ix_(free, free)], -grad[free], tol)
        alpha = 1.0
        blocking = -1
        for i in np.flatnonzero(free):
            if step[i] < 0 and np.isfinite(lower[i]):
                a = (lower[i] - z[i]) / step[i]
            elif step[i] > 0 and np.isfinite(upper[i]):
                a = (upper[i] - z[i]) / step[i]
            else:
                continue
            if a < alpha:
                alpha, blocking = a, i
        z = z + max(alpha, 0.0) * step
        if blocking >= 0:
            if step[blocking] < 0:
                z[blocking], fixed[blocking] = lower[blocking], -1
            else:
                z[blocking], fixed[blocking] = upper[blocking], 1
        else:
            stationary = True
    raise NoConvergence("box QP active-set iteration cap reached")


def qp_kkt_satisfied(H, g, z, lower, upper, eps=DEFAULT.kkt):
    """Check first-order optimality of ``z`` for the box QP."""
    return _box_kkt_ok(np.asarray(H, float), np.asarray(g, float), np.asarray(z, float),
                       np.asarray(lower, float), np.asarray(upper, float), eps)
