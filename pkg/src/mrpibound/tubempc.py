"""Tube MPC on top of the certified outer set.

The real state is split as ``x = z + e`` with nominal ``z`` and error ``e``.
Under ``u = v_nom + K (x - z)`` the error obeys ``e+ = (A + B K) e + w``, so
any RPI set ``Z`` of the closed loop bounds ``e`` for all time. Two choices of
``Z`` are compared: the classical ball of radius ``r_w / (1 - gamma)`` and
the certified ``E_N (+) Ball(r_w gamma^N / (1 - gamma))``.
"""

import csv
import io
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import linalg
from .bound import TruncationCertificate, certified_outer, certify, n_min
from .config import DEFAULT, Tolerances
from .exceptions import (
    DimensionMismatch,
    EmptyDifference,
    InfeasibleTightening,
    InvalidContraction,
    NoConvergence,
    NotContractive,
    NotStabilizable,
)
from .mrpi import MrpiSeries, truncated_mrpi
from .norms import QuadraticNorm, disturbance_radius, induced_norm, induced_norm_between
from .sets import (
    Box,
    NormBall,
    OuterSet,
    Zonotope,
    linear_map,
    outer_axis_extents,
    pontryagin_diff_box,
    sample_unit_directions,
    support_of,
)


@dataclass(frozen=True)
class Plant:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = linalg.as_matrix(self.a, "A")
        b = np.asarray(self.b, dtype=float)
        if b.ndim == 1:
            b = b.reshape(-1, 1)
        if a.shape[0] != a.shape[1] or b.shape[0] != a.shape[0]:
            raise DimensionMismatch(f"A {a.shape} and B {b.shape} are not conformable")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def dim_x(self):
        return self.a.shape[0]

    @property
    def dim_u(self):
        return self.b.shape[1]

    def step(self, x, u, w=None):
        x_next = self.a @ x + self.b @ np.atleast_1d(u)
        return x_next if w is None else x_next + w


def double_integrator():
    """The 2-D plant used for the tube-MPC comparison."""
    return Plant(np.array([[1.0, 1.0], [0.0, 1.0]]), np.array([[0.5], [1.0]]))


def dlqr(plant: Plant, q, r, tol: Tolerances = DEFAULT):
    """Infinite-horizon LQR gain ``K`` (``u = K x``) by Riccati fixed-point iteration."""
    A, B = plant.a, plant.b
    Q = linalg.as_matrix(q, "Q")
    R = linalg.as_matrix(r, "R")
    P = Q.copy()
    for _ in range(tol.max_iterations):
        S = R + B.T @ P @ B
        K = -linalg.solve_linear(S, B.T @ P @ A, tol)
        P_next = Q + A.T @ P @ (A + B @ K)
        P_next = 0.5 * (P_next + P_next.T)
        if np.abs(P_next - P).max() <= tol.riccati * max(1.0, np.abs(P).max()):
            P = P_next
            break
        P = P_next
    else:
        raise NoConvergence("Riccati iteration cap reached")
    K = -linalg.solve_linear(R + B.T @ P @ B, B.T @ P @ A, tol)
    if linalg.spectral_radius(A + B @ K) >= 1.0:
        raise NotStabilizable("LQR closed loop is not Schur stable")
    return K


class Method(str, Enum):
    BASELINE = "baseline"
    CERTIFIED = "certified"


@dataclass(frozen=True)
class TubeDesign:
    k_gain: np.ndarray
    a_cl: np.ndarray
    cross_section: OuterSet
    x_tight: Box
    u_tight: Box
    method: Method
    cert: TruncationCertificate | None = None


def baseline_tube(r_w, gamma, norm: QuadraticNorm):
    """Ball of radius ``r_w / (1 - gamma)``: the classical invariant radius."""
    if not 0.0 <= gamma < 1.0:
        raise InvalidContraction(f"contraction factor must lie in [0, 1), got {gamma!r}")
    return OuterSet(Zonotope.origin(norm.dim), NormBall(norm, r_w / (1.0 - gamma)))


def certified_tube(a_cl, w: Box, norm: QuadraticNorm, n):
    """``E_N (+) Ball(tail)`` for the closed-loop error dynamics; returns ``(Z, cert)``."""
    cert = certify(a_cl, w, norm, n)
    e_n = truncated_mrpi(MrpiSeries(a_cl, w, max(n, 1)), n)
    return certified_outer(e_n, cert, norm), cert


def input_image(k_gain, z: OuterSet):
    """Outer bound on ``K Z``: core mapped exactly, ball scaled by ``||K||_{P->2}``."""
    K = np.atleast_2d(np.asarray(k_gain, dtype=float))
    radius = z.pad.radius * induced_norm_between(K, z.pad.norm)
    return OuterSet(linear_map(K, z.core), NormBall(QuadraticNorm.euclidean(K.shape[0]), radius))


def tighten(x: Box, u: Box, cross_section: OuterSet, k_gain):
    """``(X (-) Z, U (-) K Z)``.

    Raises:
        InfeasibleTightening: if either difference is empty.
    """
    try:
        x_tight = pontryagin_diff_box(x, cross_section)
        u_tight = pontryagin_diff_box(u, input_image(k_gain, cross_section))
    except EmptyDifference as exc:
        raise InfeasibleTightening(str(exc)) from exc
    return x_tight, u_tight


def design_tube(plant: Plant, k_gain, x: Box, u: Box, w: Box, norm: QuadraticNorm,
                method=Method.CERTIFIED, n=None, epsilon=1e-3):
    """Build a complete :class:`TubeDesign`.

    For the certified method ``n`` defaults to ``n_min(epsilon) + 1``.
    """
    method = Method(method)
    K = np.atleast_2d(np.asarray(k_gain, dtype=float))
    a_cl = plant.a + plant.b @ K
    gamma = induced_norm(a_cl, norm)
    if gamma >= 1.0:
        raise NotContractive(f"||A + B K|| = {gamma:.6g} in the {norm.label} norm")
    r_w = disturbance_radius(w, norm).value
    cert = None
    if method is Method.BASELINE:
        z = baseline_tube(r_w, gamma, norm)
    else:
        if n is None:
            n = n_min(epsilon, gamma, r_w) + 1
        z, cert = certified_tube(a_cl, w, norm, n)
    x_tight, u_tight = tighten(x, u, z, K)
    return TubeDesign(k_gain=K, a_cl=a_cl, cross_section=z, x_tight=x_tight, u_tight=u_tight,
                      method=method, cert=cert)


@dataclass(frozen=True)
class MpcConfig:
    q: np.ndarray
    r: np.ndarray
    horizon: int = 10

    @classmethod
    def default(cls, plant: Plant, horizon=10):
        return cls(np.eye(plant.dim_x), np.eye(plant.dim_u), horizon)


@dataclass(frozen=True)
class NominalPlan:
    v: np.ndarray        # (H, m) corrections on top of K z
    u: np.ndarray        # (H, m) nominal inputs
    z: np.ndarray        # (H + 1, n) nominal states
    v_bound: float


def _prediction_matrices(a_cl, b, horizon):
    n, m = b.shape
    Sx = np.zeros(((horizon + 1) * n, horizon * m))
    Tx = np.zeros(((horizon + 1) * n, n))
    power = np.eye(n)
    for k in range(horizon + 1):
        Tx[k * n:(k + 1) * n] = power
        power = a_cl @ power
    for k in range(1, horizon + 1):
        for j in range(k):
            Sx[k * n:(k + 1) * n, j * m:(j + 1) * m] = np.linalg.matrix_power(a_cl, k - 1 - j) @ b
    return Sx, Tx


def _uniform_bound(center, spread, box: Box):
    """Largest ``beta`` with ``center +/- beta * spread`` inside the (tiled) box."""
    lo = np.tile(box.lower, center.size // box.dim)
    hi = np.tile(box.upper, center.size // box.dim)
    if np.any(center < lo - 1e-12) or np.any(center > hi + 1e-12):
        return -np.inf
    live = spread > 0
    if not live.any():
        return np.inf
    room = np.minimum(hi - center, center - lo)[live]
    return float((np.maximum(room, 0.0) / spread[live]).min())


def solve_nominal_mpc(plant: Plant, k_gain, config: MpcConfig, x_tight: Box, u_tight: Box, z0):
    """Nominal tube-MPC problem from ``z0``.

    Inputs are parameterized as ``u_k = K z_k + v_k``; the stage cost is
    ``z_k^T Q z_k + u_k^T R u_k`` for ``k < H`` plus ``z_H^T Q z_H``.
    State and input boxes are enforced by choosing a common bound
    ``|v_k| <= beta`` so large that every ``v`` in that box keeps the whole
    predicted trajectory feasible, which leaves a pure box QP.

    Raises:
        InfeasibleTightening: if even ``v = 0`` violates the tightened boxes.
    """
    K = np.atleast_2d(np.asarray(k_gain, dtype=float))
    H = int(config.horizon)
    if H < 1:
        raise ValueError("horizon must be at least 1")
    n, m = plant.dim_x, plant.dim_u
    a_cl = plant.a + plant.b @ K
    z0 = np.asarray(z0, dtype=float)
    Sx, Tx = _prediction_matrices(a_cl, plant.b, H)
    Kbar = np.kron(np.eye(H), K)
    Su = Kbar @ Sx[:H * n] + np.eye(H * m)
    Tu = Kbar @ Tx[:H * n]

    cx, cu = Tx @ z0, Tu @ z0
    beta = min(_uniform_bound(cx, np.abs(Sx).sum(axis=1), x_tight),
               _uniform_bound(cu, np.abs(Su).sum(axis=1), u_tight))
    if beta < 0:
        raise InfeasibleTightening("nominal state is outside the region where v = 0 is feasible")

    Qbar = np.kron(np.eye(H + 1), linalg.as_matrix(config.q, "Q"))
    Rbar = np.kron(np.eye(H), linalg.as_matrix(config.r, "R"))
    hess = 2.0 * (Sx.T @ Qbar @ Sx + Su.T @ Rbar @ Su)
    grad = 2.0 * (Sx.T @ Qbar @ cx + Su.T @ Rbar @ cu)
    bound = np.full(H * m, beta)
    v = linalg.solve_qp(0.5 * (hess + hess.T), grad, -bound, bound)
    return NominalPlan(
        v=v.reshape(H, m),
        u=(cu + Su @ v).reshape(H, m),
        z=(cx + Sx @ v).reshape(H + 1, n),
        v_bound=beta,
    )


@dataclass
class TrajectoryLog:
    x_real: np.ndarray
    x_nom: np.ndarray
    u_nom: np.ndarray
    u_applied: np.ndarray
    w: np.ndarray
    violations: int = 0
    containment_failures: int = 0
    max_error_norm: float = 0.0

    @property
    def error(self):
        return self.x_real - self.x_nom


def in_set(point, s, dirs, atol=1e-9):
    """Support-function membership test over the given directions."""
    return bool(np.all(dirs @ point <= support_of(s, dirs) + atol))


def nominal_trajectory(plant: Plant, design: TubeDesign, config: MpcConfig, z0, steps):
    """Receding-horizon nominal states and inputs; independent of the disturbance."""
    z = np.zeros((steps + 1, plant.dim_x))
    u = np.zeros((steps, plant.dim_u))
    z[0] = z0
    for k in range(steps):
        plan = solve_nominal_mpc(plant, design.k_gain, config, design.x_tight, design.u_tight, z[k])
        u[k] = plan.u[0]
        z[k + 1] = plant.step(z[k], u[k])
    return z, u


def simulate_closed_loop(plant: Plant, design: TubeDesign, config: MpcConfig, w: Box, x0,
                         steps=50, rollouts=100, seed=0, x_box: Box | None = None,
                         u_box: Box | None = None, dirs=None):
    """Monte Carlo rollouts of the tube controller under uniform disturbances.

    Rollout ``i`` draws its disturbances from ``default_rng(seed + i)``.
    Violations count steps where the real state leaves ``x_box`` or the
    applied input leaves ``u_box``; containment failures count steps where
    the error leaves the cross-section (checked on ``dirs``).
    """
    if dirs is None:
        dirs = sample_unit_directions(plant.dim_x, 2000, seed)
    z, u_nom = nominal_trajectory(plant, design, config, x0, steps)
    K = design.k_gain
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    h_tube = support_of(design.cross_section, dirs)
    logs = []
    for i in range(rollouts):
        rng = np.random.default_rng(seed + i)
        ws = rng.uniform(w.lower, w.upper, size=(steps, plant.dim_x))
        x = np.zeros_like(z)
        u_app = np.zeros_like(u_nom)
        x[0] = z[0]
        log = TrajectoryLog(x_real=x, x_nom=z, u_nom=u_nom, u_applied=u_app, w=ws)
        for k in range(steps):
            u_app[k] = u_nom[k] + K @ (x[k] - z[k])
            x[k + 1] = plant.step(x[k], u_app[k], ws[k])
        for k in range(steps + 1):
            if x_box is not None and not x_box.contains(x[k], atol=1e-12):
                log.violations += 1
            if k < steps and u_box is not None and not u_box.contains(u_app[k], atol=1e-12):
                log.violations += 1
        outside = ((x - z) @ dirs.T > h_tube + 1e-9).any(axis=1)
        log.containment_failures = int(outside.sum())
        log.max_error_norm = float(np.linalg.norm(x - z, axis=1).max())
        logs.append(log)
    return logs


def trajectories_to_csv(logs):
    """CSV ``rollout,k,x_real...,x_nom...,u_nom,u_applied,w...``."""
    n = logs[0].x_real.shape[1]
    m = logs[0].u_nom.shape[1]
    header = (["rollout", "k"] + [f"x_real{j}" for j in range(n)] + [f"x_nom{j}" for j in range(n)]
              + [f"u_nom{j}" for j in range(m)] + [f"u_applied{j}" for j in range(m)]
              + [f"w{j}" for j in range(n)])
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for i, log in enumerate(logs):
        for k in range(log.u_nom.shape[0]):
            row = [i, k]
            for arr in (log.x_real[k], log.x_nom[k], log.u_nom[k], log.u_applied[k], log.w[k]):
                row.extend(repr(float(v)) for v in arr)
            writer.writerow(row)
    return buf.getvalue()


@dataclass
class FeasibleSetReport:
    rows: list = field(default_factory=list)   # (design, axis, halfwidth, volume)
    volumes: dict = field(default_factory=dict)
    empty: dict = field(default_factory=dict)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["design", "axis", "halfwidth", "volume"])
        for name, axis, hw, vol in self.rows:
            writer.writerow([name, axis, repr(float(hw)), repr(float(vol))])
        return buf.getvalue()


def feasible_set_report(x: Box, designs):
    """Tightened state boxes side by side; ``designs`` maps a name to a design or ``None``.

    A ``None`` entry marks a design whose tightening came out empty; it is
    reported with zero widths and zero volume.
    """
    designs = dict(designs)
    if len(designs) < 2:
        raise ValueError("need at least two designs to compare")
    report = FeasibleSetReport()
    for name, design in designs.items():
        if design is None:
            widths, vol = np.zeros(x.dim), 0.0
            report.empty[name] = True
        else:
            widths, vol = design.x_tight.half_widths, design.x_tight.volume
            report.empty[name] = False
        report.volumes[name] = vol
        for axis, hw in enumerate(widths):
            report.rows.append((name, axis, hw, vol))
    return report


def tightening_margins(design: TubeDesign):
    """Per-axis state tightening ``X.half_width - X_tight.half_width``."""
    return outer_axis_extents(design.cross_section)


__all__ = [
    "Method",
    "MpcConfig",
    "Plant",
    "TubeDesign",
    "baseline_tube",
    "certified_tube",
    "design_tube",
    "dlqr",
    "double_integrator",
    "feasible_set_report",
    "simulate_closed_loop",
    "solve_nominal_mpc",
    "tighten",
]
