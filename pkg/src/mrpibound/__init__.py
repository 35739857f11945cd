"""Certified truncation of minimal robust positively invariant sets.

For ``x+ = A x + w`` with ``w`` in a box ``W``, the set
``E_N = W (+) A W (+) ... (+) A^{N-1} W`` lies within Hausdorff distance
``r_w gamma^N / (1 - gamma)`` of the minimal RPI set, where ``gamma`` is the
induced norm of ``A`` and ``r_w`` the largest norm of a disturbance. The
package builds ``E_N`` as a zonotope, evaluates and inverts the bound, and
uses the resulting outer set to tighten tube-MPC constraints.
"""

__version__ = "0.1.0"

from .bound import (
    TruncationCertificate,
    certified_outer,
    certify,
    n_min,
    operator_contraction_gap,
    rpi_violation,
    tail_bound,
)
from .config import DEFAULT, Tolerances
from .mrpi import (
    ErrorCurve,
    MrpiSeries,
    error_curve,
    fit_decay_slope,
    random_normal_schur_matrix,
    random_schur_matrix,
    reference_mrpi,
    set_operator_apply,
    truncated_mrpi,
)
from .norms import (
    ContractionReport,
    QuadraticNorm,
    diagonal_scaling_search,
    disturbance_radius,
    dual_norm,
    induced_norm,
    lyapunov_norm,
    vec_norm,
)
from .sets import (
    Box,
    NormBall,
    OuterSet,
    Zonotope,
    axis_extents,
    box_to_zonotope,
    hausdorff_sampled,
    linear_map,
    minkowski_sum,
    pontryagin_diff_box,
    sample_unit_directions,
    support,
    support_outer,
)
