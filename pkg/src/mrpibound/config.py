"""Numerical tolerances and iteration caps used throughout the package.

Every module reads its thresholds from :data:`DEFAULT`; tests and callers may
pass a modified copy (``dataclasses.replace(DEFAULT, ...)``) where a function
accepts a ``tol`` argument.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    pivot: float = 1e-12
    solve_residual: float = 1e-9
    symmetry: float = 1e-10
    cholesky_residual: float = 1e-9
    eig_relative: float = 1e-8
    spectral_radius_relative: float = 1e-6
    lyapunov_residual: float = 1e-8
    schur_margin: float = 1e-10
    kkt: float = 1e-6
    max_iterations: int = 10_000
    riccati: float = 1e-10
    nested: float = 1e-10
    max_generators: int = 100_000
    vertex_enumeration_max_dim: int = 16
    decay_floor: float = 1e-14


DEFAULT = Tolerances()
