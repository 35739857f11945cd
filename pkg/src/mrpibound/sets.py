"""Boxes, zonotopes and norm balls with exact Minkowski arithmetic.

Everything is evaluated through support functions, so no vertex or facet
enumeration is ever needed. Directions are passed as a single vector of
shape ``(n,)`` or as stacked rows of shape ``(k, n)``.
"""

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT
from .exceptions import CapacityExceeded, DimensionMismatch, EmptyDifference, NotNested
from .norms import QuadraticNorm, dual_norm


def _vector(x, name):
    x = np.asarray(x, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} has non-finite entries")
    return x


@dataclass(frozen=True)
class Box:
    center: np.ndarray
    half_widths: np.ndarray

    def __post_init__(self):
        c = _vector(self.center, "center")
        h = _vector(self.half_widths, "half_widths")
        if c.shape != h.shape:
            raise DimensionMismatch(f"center {c.shape} and half_widths {h.shape} differ")
        if np.any(h < 0):
            raise ValueError("half_widths must be nonnegative")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "half_widths", h)

    @classmethod
    def from_bounds(cls, lower, upper):
        lower, upper = _vector(lower, "lower"), _vector(upper, "upper")
        return cls(0.5 * (lower + upper), 0.5 * (upper - lower))

    @classmethod
    def symmetric(cls, half_width, dim):
        return cls(np.zeros(dim), np.full(dim, float(half_width)))

    @property
    def dim(self):
        return self.center.size

    @property
    def lower(self):
        return self.center - self.half_widths

    @property
    def upper(self):
        return self.center + self.half_widths

    @property
    def volume(self):
        return float(np.prod(2.0 * self.half_widths))

    def contains(self, x, atol=0.0):
        x = np.asarray(x, dtype=float)
        return bool(np.all(np.abs(x - self.center) <= self.half_widths + atol))


@dataclass(frozen=True)
class Zonotope:
    """``{c + G a : ||a||_inf <= 1}``; generators are the columns of ``G``."""

    center: np.ndarray
    generators: np.ndarray

    def __post_init__(self):
        c = _vector(self.center, "center")
        G = np.asarray(self.generators, dtype=float)
        if G.size == 0:
            G = np.zeros((c.size, 0))
        if G.ndim != 2 or G.shape[0] != c.size:
            raise DimensionMismatch(f"generators shape {G.shape} incompatible with center {c.shape}")
        if G.shape[1] > DEFAULT.max_generators:
            raise CapacityExceeded(f"{G.shape[1]} generators exceeds cap {DEFAULT.max_generators}")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "generators", G)

    @classmethod
    def point(cls, x):
        x = _vector(x, "point")
        return cls(x, np.zeros((x.size, 0)))

    @classmethod
    def origin(cls, dim):
        return cls.point(np.zeros(dim))

    @property
    def dim(self):
        return self.center.size

    @property
    def num_generators(self):
        return self.generators.shape[1]


@dataclass(frozen=True)
class NormBall:
    norm: QuadraticNorm
    radius: float

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("radius must be nonnegative")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self):
        return self.norm.dim

    def axis_extents(self):
        """Reach of the ball along each coordinate axis: ``radius * sqrt((P^-1)_jj)``."""
        return self.radius * np.sqrt(self.norm.p_inverse_diag)


@dataclass(frozen=True)
class OuterSet:
    """``core (+) pad``: a zonotope inflated by a norm ball."""

    core: Zonotope
    pad: NormBall

    def __post_init__(self):
        if self.core.dim != self.pad.dim:
            raise DimensionMismatch(f"core dimension {self.core.dim} != pad dimension {self.pad.dim}")

    @property
    def dim(self):
        return self.core.dim


def box_to_zonotope(b: Box):
    nz = np.flatnonzero(b.half_widths > 0)
    G = np.zeros((b.dim, nz.size))
    G[nz, np.arange(nz.size)] = b.half_widths[nz]
    return Zonotope(b.center, G)


def minkowski_sum(z1: Zonotope, z2: Zonotope):
    if z1.dim != z2.dim:
        raise DimensionMismatch(f"cannot add sets of dimension {z1.dim} and {z2.dim}")
    return Zonotope(z1.center + z2.center, np.hstack((z1.generators, z2.generators)))


def linear_map(M, z: Zonotope):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.shape[1] != z.dim:
        raise DimensionMismatch(f"matrix with {M.shape[1]} columns cannot map dimension {z.dim}")
    return Zonotope(M @ z.center, M @ z.generators)


def _directions(u, dim):
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != dim:
        raise DimensionMismatch(f"direction dimension {u.shape[-1]} != set dimension {dim}")
    return u


def support(z: Zonotope, u):
    """``u^T c + sum_i |u^T g_i|``."""
    u = _directions(u, z.dim)
    return u @ z.center + np.abs(u @ z.generators).sum(axis=-1)


def support_outer(s: OuterSet, u):
    u = _directions(u, s.dim)
    return support(s.core, u) + s.pad.radius * dual_norm(u, s.pad.norm)


def support_of(s, u):
    """Support function of a :class:`Zonotope`, :class:`OuterSet` or :class:`Box`."""
    if isinstance(s, OuterSet):
        return support_outer(s, u)
    if isinstance(s, Box):
        s = box_to_zonotope(s)
    return support(s, u)


def axis_extents(z: Zonotope):
    return np.abs(z.generators).sum(axis=1)


def outer_axis_extents(s):
    if isinstance(s, OuterSet):
        return axis_extents(s.core) + s.pad.axis_extents()
    return axis_extents(s)


def pontryagin_diff_box(x: Box, s):
    """``x (-) s`` for a set ``s`` symmetric about its center.

    Raises:
        EmptyDifference: if the tightening exceeds some half-width of ``x``.
    """
    core = s.core if isinstance(s, OuterSet) else s
    if core.dim != x.dim:
        raise DimensionMismatch(f"box dimension {x.dim} != set dimension {core.dim}")
    widths = x.half_widths - outer_axis_extents(s)
    if np.any(widths < 0):
        axis = int(np.argmin(widths))
        raise EmptyDifference(f"tightening exceeds half-width on axis {axis} by {-widths[axis]:.6g}")
    return Box(x.center - core.center, widths)


def sample_unit_directions(dim, count, seed):
    """Signed coordinate axes followed by ``count`` Gaussian directions on the unit sphere."""
    if dim < 1 or count < 1:
        raise ValueError("dim and count must be positive")
    axes = np.vstack((np.eye(dim), -np.eye(dim)))
    if dim == 1:
        return axes
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, dim))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return np.vstack((axes, g))


def normalize_directions(dirs, norm: QuadraticNorm | None = None):
    """Scale rows to unit dual norm (Euclidean when ``norm`` is None); zero rows are dropped."""
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    lengths = np.linalg.norm(dirs, axis=1) if norm is None else dual_norm(dirs, norm)
    keep = lengths > 0
    return dirs[keep] / lengths[keep, None]


def hausdorff_sampled(inner, outer, dirs, norm: QuadraticNorm | None = None, check=True):
    """Largest support gap ``h_outer(u) - h_inner(u)`` over the given directions.

    For nested convex sets this is a lower estimate of the Hausdorff distance
    in ``norm`` (Euclidean by default), converging as ``dirs`` densify.

    Raises:
        NotNested: if ``check`` and some direction shows ``inner`` sticking out.
    """
    u = normalize_directions(dirs, norm)
    gap = support_of(outer, u) - support_of(inner, u)
    if check:
        worst = float(gap.min())
        scale = 1.0 + float(np.abs(support_of(outer, u)).max())
        if worst < -DEFAULT.nested * scale:
            raise NotNested(f"inner set exceeds outer by {-worst:.3e} in a sampled direction")
    return float(max(gap.max(), 0.0))


def support_gap(a, b, dirs, norm: QuadraticNorm | None = None):
    """``max |h_a(u) - h_b(u)|`` over unit-dual-norm directions.

    Sampled Hausdorff estimate for arbitrary (not necessarily nested) convex sets.
    """
    u = normalize_directions(dirs, norm)
    return float(np.abs(support_of(a, u) - support_of(b, u)).max())
