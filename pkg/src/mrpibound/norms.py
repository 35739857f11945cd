"""Quadratic vector norms ``||x||_P = sqrt(x^T P x)`` and the quantities built on them.

The contraction factor of a system matrix is its induced norm under one of
these norms; shaping ``P`` (diagonal grid search or a Lyapunov solve) is how
the decay rate of the truncation bound is tuned.
"""

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import linalg
from .config import DEFAULT, Tolerances
from .exceptions import DimensionMismatch, NotSchurStable


class QuadraticNorm:
    """Weighted Euclidean norm defined by a symmetric positive definite ``P``.

    The Cholesky factor and the inverse are computed once at construction;
    instances are treated as immutable.
    """

    def __init__(self, p, label=None, tol: Tolerances = DEFAULT):
        p = linalg.as_matrix(p, "P")
        self.p = 0.5 * (p + p.T)
        self.factor = linalg.cholesky(self.p, tol)
        self._factor_inv = np.linalg.inv(self.factor)
        self.p_inverse = self._factor_inv.T @ self._factor_inv
        self.p_inverse_diag = np.diag(self.p_inverse).copy()
        self.label = label or "custom"
        for arr in (self.p, self.factor, self._factor_inv, self.p_inverse, self.p_inverse_diag):
            arr.setflags(write=False)

    @classmethod
    def euclidean(cls, dim):
        return cls(np.eye(dim), label="euclidean")

    @classmethod
    def diagonal(cls, d, label=None):
        d = np.asarray(d, dtype=float)
        return cls(np.diag(d), label=label or "diag(" + ",".join(f"{v:g}" for v in d) + ")")

    @property
    def dim(self):
        return self.p.shape[0]

    def whiten(self, x):
        """Map ``x`` to coordinates where the norm is Euclidean (``L^T x``)."""
        return np.asarray(x, dtype=float) @ self.factor

    def dual_coordinates(self, u):
        """``L^{-1} u`` for rows of ``u``; its Euclidean length is the dual norm."""
        return np.asarray(u, dtype=float) @ self._factor_inv.T

    def __repr__(self):
        return f"QuadraticNorm(label={self.label!r}, dim={self.dim})"


def _check_dim(x, norm):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != norm.dim:
        raise DimensionMismatch(f"vector dimension {x.shape[-1]} != norm dimension {norm.dim}")
    return x


def vec_norm(x, norm: QuadraticNorm):
    """``sqrt(x^T P x)``; rows of a 2-D ``x`` are treated as separate vectors."""
    x = _check_dim(x, norm)
    return np.linalg.norm(norm.whiten(x), axis=-1)


def dual_norm(u, norm: QuadraticNorm):
    """Dual norm ``sqrt(u^T P^{-1} u)``.

    A single vector goes through two triangular solves against the cached
    factor; stacked rows use the cached inverse factor.
    """
    u = _check_dim(u, norm)
    if u.ndim == 1:
        y = linalg.solve_triangular(norm.factor, u, lower=True)
        return float(np.sqrt(y @ y))
    return np.linalg.norm(norm.dual_coordinates(u), axis=-1)


def induced_norm(A, norm: QuadraticNorm, tol: Tolerances = DEFAULT):
    """Operator norm of ``A`` with respect to ``||.||_P``."""
    A = linalg.as_matrix(A, "A")
    if A.shape != (norm.dim, norm.dim):
        raise DimensionMismatch(f"A shape {A.shape} does not match norm dimension {norm.dim}")
    # ||A x||_P / ||x||_P with y = L^T x becomes ||L^T A L^{-T} y||_2 / ||y||_2.
    M = norm.factor.T @ A @ norm._factor_inv.T
    lam = linalg.sym_eig_max(M.T @ M, tol)
    return float(np.sqrt(max(lam, 0.0)))


def induced_norm_between(M, src: QuadraticNorm):
    """Operator norm of ``M`` from ``||.||_P`` (on ``src``) to the Euclidean norm."""
    M = linalg.as_matrix(M, "M")
    return float(np.linalg.norm(M @ src._factor_inv.T, 2))


@dataclass(frozen=True)
class ContractionReport:
    gamma: float
    rho: float
    norm: QuadraticNorm = field(repr=False)

    @property
    def contractive(self):
        return self.gamma < 1.0


def contraction_report(A, norm: QuadraticNorm, tol: Tolerances = DEFAULT):
    return ContractionReport(gamma=induced_norm(A, norm, tol), rho=linalg.spectral_radius(A), norm=norm)


def lyapunov_norm(A, rate=None, tol: Tolerances = DEFAULT):
    """Norm from the solution of ``A^T P A - P = -I``; contractive for every Schur ``A``.

    With ``rate`` in ``(rho(A), 1)`` the equation is solved for ``A / rate``
    instead, which guarantees ``||A||_P < rate``.
    """
    A = linalg.as_matrix(A, "A")
    label = "lyapunov"
    shaped = A
    if rate is not None:
        if not 0.0 < rate <= 1.0:
            raise ValueError(f"rate must lie in (0, 1], got {rate!r}")
        shaped = A / rate
        label = f"lyapunov@{rate:g}"
    P = linalg.solve_discrete_lyapunov(shaped, np.eye(A.shape[0]), tol)
    return contraction_report(A, QuadraticNorm(P, label=label, tol=tol), tol)


def diagonal_scaling_search(A, grid, tol: Tolerances = DEFAULT):
    """Best diagonal weighting ``P = diag(d)`` among the candidates in ``grid``.

    Ties keep the first candidate.
    """
    A = linalg.as_matrix(A, "A")
    rho = linalg.spectral_radius(A)
    if rho >= 1.0 - tol.schur_margin:
        raise NotSchurStable(f"spectral radius {rho:.6g} is not below 1")
    best = None
    for d in grid:
        norm = QuadraticNorm.diagonal(d)
        gamma = induced_norm(A, norm, tol)
        if best is None or gamma < best.gamma:
            best = ContractionReport(gamma=gamma, rho=rho, norm=norm)
    if best is None:
        raise ValueError("empty scaling grid")
    return best


def log_spaced_diagonal_grid(dim, exponents=(-2, -1, 0, 1, 2), base=3.0, max_candidates=4096, seed=0):
    """Candidate diagonals ``base**e`` per axis; randomly subsampled past ``max_candidates``.

    The first coordinate is pinned to 1 since ``P`` and ``t P`` induce the
    same matrix norm.
    """
    exps = np.asarray(exponents, dtype=float)
    total = len(exps) ** (dim - 1)
    if total <= max_candidates:
        combos = itertools.product(exps, repeat=dim - 1)
        return [np.concatenate(([1.0], base ** np.asarray(c))) for c in combos]
    rng = np.random.default_rng(seed)
    grid = [np.ones(dim)]
    picks = rng.choice(exps, size=(max_candidates - 1, dim - 1))
    grid.extend(np.concatenate(([1.0], base ** row)) for row in picks)
    return grid


class DisturbanceRadius(NamedTuple):
    value: float
    conservative: bool


def disturbance_radius(w, norm: QuadraticNorm, tol: Tolerances = DEFAULT):
    """Largest norm of a point in the box ``w``.

    Exact by vertex enumeration up to ``tol.vertex_enumeration_max_dim``
    nonzero widths; above that, an upper bound flagged ``conservative``.
    """
    c = np.asarray(w.center, dtype=float)
    h = np.asarray(w.half_widths, dtype=float)
    if c.size != norm.dim:
        raise DimensionMismatch(f"box dimension {c.size} != norm dimension {norm.dim}")
    active = np.flatnonzero(h > 0)
    if active.size == 0:
        return DisturbanceRadius(float(vec_norm(c, norm)), False)
    if active.size <= tol.vertex_enumeration_max_dim:
        signs = np.array(list(itertools.product((-1.0, 1.0), repeat=active.size)))
        verts = np.tile(c, (signs.shape[0], 1))
        verts[:, active] += signs * h[active]
        return DisturbanceRadius(float(vec_norm(verts, norm).max()), False)
    centered = np.sqrt(h @ np.abs(norm.p) @ h)
    return DisturbanceRadius(float(vec_norm(c, norm) + centered), True)
