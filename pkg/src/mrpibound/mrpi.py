"""Truncated Minkowski series ``E_N = W (+) A W (+) ... (+) A^{N-1} W``.

:class:`MrpiSeries` caches the generator blocks ``A^i W`` once, so any
truncation up to its horizon is a slice. :func:`error_curve` measures the
sampled distance from ``E_N`` to a long-horizon reference next to the
closed-form bound, which is the data behind the decay plots.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .bound import tail_bound
from .config import DEFAULT
from .exceptions import CapacityExceeded, DegenerateCurve, DimensionMismatch, HorizonExceeded, NotContractive, NotNested
from .norms import QuadraticNorm, disturbance_radius, induced_norm
from .sets import Box, Zonotope, box_to_zonotope, linear_map, minkowski_sum, normalize_directions, sample_unit_directions

DEFAULT_K_REF = 200
CONVENTIONS = ("N", "N+1")


class MrpiSeries:
    """Cached powers ``A^i W`` for ``i < horizon``.

    Attributes:
        system: the matrix ``A``.
        disturbance: the box ``W``.
        blocks: array of shape ``(horizon, n, m)``; ``blocks[i]`` holds the
            generators of ``A^i W``.
        centers: array of shape ``(horizon, n)`` with ``A^i c_W``.
    """

    def __init__(self, A, w: Box, horizon=DEFAULT_K_REF):
        A = linalg.as_matrix(A, "A")
        if A.shape != (w.dim, w.dim):
            raise DimensionMismatch(f"A shape {A.shape} does not match disturbance dimension {w.dim}")
        wz = box_to_zonotope(w)
        if horizon * wz.num_generators > DEFAULT.max_generators:
            raise CapacityExceeded(f"horizon {horizon} x {wz.num_generators} generators exceeds cap")
        self.system = A
        self.disturbance = w
        self.horizon = int(horizon)
        n, m = wz.generators.shape
        self.blocks = np.empty((self.horizon, n, m))
        self.centers = np.empty((self.horizon, n))
        power = np.eye(n)
        for i in range(self.horizon):
            self.blocks[i] = power @ wz.generators
            self.centers[i] = power @ wz.center
            power = A @ power
        self.blocks.setflags(write=False)
        self.centers.setflags(write=False)

    @property
    def dim(self):
        return self.system.shape[0]

    def block_supports(self, dirs):
        """``h_{A^i W}(u)`` for every block ``i`` and direction row ``u``; shape ``(horizon, k)``."""
        U = np.atleast_2d(np.asarray(dirs, dtype=float))
        out = np.empty((self.horizon, U.shape[0]))
        for i in range(self.horizon):
            out[i] = U @ self.centers[i] + np.abs(U @ self.blocks[i]).sum(axis=1)
        return out


def truncated_mrpi(series: MrpiSeries, n):
    """``E_n``; ``E_0`` is the origin."""
    if n > series.horizon:
        raise HorizonExceeded(f"requested {n} terms but series holds {series.horizon}")
    if n < 0:
        raise ValueError("n must be nonnegative")
    center = series.centers[:n].sum(axis=0) if n else np.zeros(series.dim)
    G = np.concatenate(series.blocks[:n], axis=1) if n else np.zeros((series.dim, 0))
    return Zonotope(center, G)


def reference_mrpi(series: MrpiSeries, k_ref=DEFAULT_K_REF):
    """Long truncation standing in for ``E_inf``."""
    return truncated_mrpi(series, k_ref)


def set_operator_apply(A, w: Box, s: Zonotope):
    """``T(S) = A S (+) W``; iterating from the origin reproduces ``E_N``."""
    A = linalg.as_matrix(A, "A")
    if s.dim != A.shape[1] or w.dim != A.shape[0]:
        raise DimensionMismatch("set, disturbance and system matrix disagree in dimension")
    return minkowski_sum(linear_map(A, s), box_to_zonotope(w))


@dataclass(frozen=True)
class ErrorRow:
    n: int
    d_num: float
    d_bound: float
    gamma: float
    r_w: float


@dataclass
class ErrorCurve:
    rows: list
    convention: str = "N"
    seed: int = 0
    reference_slack: float = 0.0
    norm_id: str = "euclidean"
    conservative_radius: bool = False
    meta: dict = field(default_factory=dict)

    CSV_HEADER = ("n", "d_num", "d_bound", "gamma", "r_w", "convention", "seed")

    def violations(self, atol=1e-9):
        """Rows where the sampled distance exceeds the bound plus reference slack."""
        return [r for r in self.rows if r.d_num > r.d_bound + self.reference_slack + atol]

    @property
    def n(self):
        return np.array([r.n for r in self.rows])

    @property
    def d_num(self):
        return np.array([r.d_num for r in self.rows])

    @property
    def d_bound(self):
        return np.array([r.d_bound for r in self.rows])

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.CSV_HEADER)
        for r in self.rows:
            writer.writerow([r.n, repr(r.d_num), repr(r.d_bound), repr(r.gamma), repr(r.r_w),
                             self.convention, self.seed])
        return buf.getvalue()


def error_curve(A, w: Box, norm: QuadraticNorm, n_range, dir_count=2000, seed=0,
                k_ref=DEFAULT_K_REF, exponent_convention="N", dirs=None):
    """Sampled ``d_H(E_N, E_ref)`` next to the truncation bound for each ``N`` in ``n_range``.

    Under convention ``"N"`` row ``N`` compares ``E_N`` (terms ``0..N-1``)
    with ``r_w gamma^N / (1 - gamma)``. Under ``"N+1"`` row ``N`` uses the
    set with terms ``0..N`` and the exponent ``N + 1``, the indexing in
    which the remainder starts at ``A^{N+1} W``. Directions are normalized to
    unit dual norm, so both columns are distances in ``norm``.
    """
    if exponent_convention not in CONVENTIONS:
        raise ValueError(f"exponent_convention must be one of {CONVENTIONS}")
    A = linalg.as_matrix(A, "A")
    gamma = induced_norm(A, norm)
    if gamma >= 1.0:
        raise NotContractive(f"||A|| = {gamma:.6g} in the {norm.label} norm")
    radius = disturbance_radius(w, norm)
    shift = 1 if exponent_convention == "N+1" else 0
    ns = [int(n) for n in n_range]
    if max(ns) + shift > k_ref:
        raise HorizonExceeded(f"largest truncation {max(ns) + shift} exceeds reference horizon {k_ref}")

    series = MrpiSeries(A, w, k_ref)
    if dirs is None:
        dirs = sample_unit_directions(A.shape[0], dir_count, seed)
    u = normalize_directions(dirs, norm)
    blocks = series.block_supports(u)
    # tails[j] = h_{E_ref}(u) - h_{E_j}(u); nonnegative when W is centered at the origin.
    tails = np.vstack((np.cumsum(blocks[::-1], axis=0)[::-1], np.zeros((1, u.shape[0]))))
    centered = not np.any(w.center)
    if centered and tails.min() < -DEFAULT.nested * (1.0 + np.abs(tails).max()):
        raise NotNested("truncated set exceeds the reference in a sampled direction")

    rows = []
    for n in ns:
        k = n + shift
        rows.append(ErrorRow(
            n=n,
            d_num=float(np.abs(tails[k]).max()),
            d_bound=tail_bound(radius.value, gamma, k),
            gamma=gamma,
            r_w=radius.value,
        ))
    return ErrorCurve(
        rows=rows,
        convention=exponent_convention,
        seed=seed,
        reference_slack=tail_bound(radius.value, gamma, k_ref),
        norm_id=norm.label,
        conservative_radius=radius.conservative,
        meta={"k_ref": k_ref, "directions": int(u.shape[0]), "rho": linalg.spectral_radius(A)},
    )


def fit_decay_slope(curve: ErrorCurve, floor=DEFAULT.decay_floor, min_n=None):
    """Least-squares slope of ``ln d_num`` against ``n``.

    Rows with ``d_num <= floor`` (and, if given, ``n < min_n``) are skipped.
    """
    n = curve.n.astype(float)
    d = curve.d_num
    keep = d > floor
    if min_n is not None:
        keep &= n >= min_n
    if keep.sum() < 3:
        raise DegenerateCurve(f"only {int(keep.sum())} usable rows, need 3")
    slope, _ = np.polyfit(n[keep], np.log(d[keep]), 1)
    return float(slope)


def random_schur_matrix(dim, seed, target_rho=None):
    """Entries uniform in ``[-1, 1]``, rescaled to spectral radius ``target_rho``.

    Default radius is 0.9 below dimension 10 and 0.8 from there on.
    """
    if target_rho is None:
        target_rho = 0.9 if dim < 10 else 0.8
    rng = np.random.default_rng(seed)
    M = rng.uniform(-1.0, 1.0, size=(dim, dim))
    rho = linalg.spectral_radius(M)
    return M * (target_rho / rho)


def random_normal_schur_matrix(dim, seed, target_rho=None):
    """Symmetric matrix ``Q diag(lam) Q^T`` with ``max |lam| = target_rho``.

    For normal matrices the Euclidean induced norm equals the spectral radius.
    """
    if target_rho is None:
        target_rho = 0.9 if dim < 10 else 0.8
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((dim, dim)))
    lam = rng.uniform(-1.0, 1.0, size=dim)
    lam *= target_rho / np.abs(lam).max()
    M = (Q * lam) @ Q.T
    return 0.5 * (M + M.T)
