"""Closed-form truncation certificate for the minimal RPI set.

With ``gamma = ||A||`` in some induced norm and ``r_w`` the largest norm of a
disturbance, the Hausdorff distance between ``E_N = sum_{i<N} A^i W`` and
``E_inf`` is at most ``r_w * gamma**N / (1 - gamma)``. This module evaluates
that bound, inverts it for the smallest sufficient horizon, and packages the
result as an outer approximation ``E_N (+) Ball(tail)`` of ``E_inf``.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import linalg
from .config import DEFAULT, Tolerances
from .exceptions import DimensionMismatch, InvalidContraction, InvalidTolerance, NotContractive
from .norms import QuadraticNorm, disturbance_radius, induced_norm
from .sets import Box, NormBall, OuterSet, Zonotope, normalize_directions, support_gap, support_of


def _check_gamma(gamma):
    if not (0.0 <= gamma < 1.0) or math.isnan(gamma):
        raise InvalidContraction(f"contraction factor must lie in [0, 1), got {gamma!r}")


def tail_bound(r_w, gamma, n):
    """``r_w * gamma**n / (1 - gamma)``."""
    _check_gamma(gamma)
    if r_w < 0:
        raise ValueError("disturbance radius must be nonnegative")
    if n < 0:
        raise ValueError("horizon must be nonnegative")
    return r_w * gamma ** n / (1.0 - gamma)


def n_min(epsilon, gamma, r_w):
    """Smallest horizon ``N >= 0`` with ``tail_bound(r_w, gamma, N) <= epsilon``.

    Evaluates ``ceil(ln(eps (1 - gamma) / r_w) / ln(gamma))``, clamped at 0,
    then nudges by one step if rounding put it on the wrong side.
    """
    if not epsilon > 0:
        raise InvalidTolerance(f"epsilon must be positive, got {epsilon!r}")
    _check_gamma(gamma)
    if r_w < 0:
        raise ValueError("disturbance radius must be nonnegative")
    if tail_bound(r_w, gamma, 0) <= epsilon:
        return 0
    if gamma == 0.0:
        return 1
    n = max(0, math.ceil(math.log(epsilon * (1.0 - gamma) / r_w) / math.log(gamma)))
    while tail_bound(r_w, gamma, n) > epsilon:
        n += 1
    while n > 0 and tail_bound(r_w, gamma, n - 1) <= epsilon:
        n -= 1
    return n


@dataclass(frozen=True)
class TruncationCertificate:
    n: int
    gamma: float
    r_w: float
    tail: float
    norm_id: str
    conservative_radius: bool = False

    def as_record(self):
        return asdict(self)

    def to_text(self):
        """Flat ``key=value`` pairs joined by ``;`` for embedding in a CSV cell."""
        return ";".join(f"{k}={v!r}" if isinstance(v, float) else f"{k}={v}"
                        for k, v in self.as_record().items())

    @classmethod
    def from_text(cls, text):
        fields = dict(item.split("=", 1) for item in text.split(";"))
        return cls(
            n=int(fields["n"]),
            gamma=float(fields["gamma"]),
            r_w=float(fields["r_w"]),
            tail=float(fields["tail"]),
            norm_id=fields["norm_id"],
            conservative_radius=fields["conservative_radius"] == "True",
        )


def certify(A, w: Box, norm: QuadraticNorm, n, tol: Tolerances = DEFAULT):
    """Assemble ``(N, gamma, r_w, tail)`` for ``x+ = A x + w``, ``w in W``.

    Raises:
        NotContractive: if ``||A||`` is not below one in ``norm``; reshape the
            norm (``lyapunov_norm`` always works for Schur ``A``).
    """
    A = linalg.as_matrix(A, "A")
    if w.dim != A.shape[0]:
        raise DimensionMismatch(f"disturbance dimension {w.dim} != state dimension {A.shape[0]}")
    gamma = induced_norm(A, norm, tol)
    if gamma >= 1.0:
        raise NotContractive(f"||A|| = {gamma:.6g} in the {norm.label} norm")
    r = disturbance_radius(w, norm, tol)
    return TruncationCertificate(
        n=int(n),
        gamma=gamma,
        r_w=r.value,
        tail=tail_bound(r.value, gamma, n),
        norm_id=norm.label,
        conservative_radius=r.conservative,
    )


def certified_outer(e_n: Zonotope, cert: TruncationCertificate, norm: QuadraticNorm):
    """``E_N (+) Ball_P(tail)``, an RPI outer approximation of ``E_inf``."""
    return OuterSet(core=e_n, pad=NormBall(norm, cert.tail))


def operator_contraction_gap(A, w: Box, s1, s2, dirs, norm: QuadraticNorm | None = None):
    """Sampled check of ``d(T(S1), T(S2)) <= gamma d(S1, S2)`` for ``T(S) = A S (+) W``.

    Returns ``(lhs, rhs)``. The right-hand side is evaluated over ``dirs``
    together with the mapped directions ``A^T u`` so the inequality holds
    exactly on the sampled set rather than only in the limit.
    """
    from .mrpi import set_operator_apply

    A = linalg.as_matrix(A, "A")
    if not (s1.dim == s2.dim == A.shape[0]):
        raise DimensionMismatch("sets and system matrix disagree in dimension")
    norm = norm or QuadraticNorm.euclidean(A.shape[0])
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    lhs = support_gap(set_operator_apply(A, w, s1), set_operator_apply(A, w, s2), dirs, norm)
    gamma = induced_norm(A, norm)
    both = np.vstack((dirs, dirs @ A))
    rhs = gamma * support_gap(s1, s2, both, norm)
    return lhs, rhs


def rpi_violation(A, w: Box, s, dirs, norm: QuadraticNorm | None = None):
    """``max_u h_{A S (+) W}(u) - h_S(u)``; nonpositive (up to rounding) when ``S`` is RPI."""
    A = linalg.as_matrix(A, "A")
    u = normalize_directions(dirs, norm)
    mapped = u @ A  # rows are A^T u
    image = support_of(s, mapped) + support_of(w, u)
    return float((image - support_of(s, u)).max())
