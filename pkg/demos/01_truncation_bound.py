"""How far is a truncated Minkowski series from the minimal RPI set?

For x+ = A x + w with w in a box W, the minimal RPI set is the infinite sum
W + AW + A^2 W + ...  Keeping only N terms gives E_N, and the distance to the
full set is at most r_w gamma^N / (1 - gamma). This script walks through the
scalar case, where the bound is attained exactly, and then a random 6-D
system, where it is a safe upper envelope.
"""

from mrpibound import (
    Box,
    MrpiSeries,
    QuadraticNorm,
    certify,
    error_curve,
    lyapunov_norm,
    n_min,
    random_schur_matrix,
    tail_bound,
    truncated_mrpi,
)
from mrpibound.sets import axis_extents

# Scalar system a = 0.5 with W = [-1, 1]: E_inf = [-2, 2].
series = MrpiSeries([[0.5]], Box.symmetric(1.0, 1), 200)
print("scalar system a = 0.5, W = [-1, 1]")
for n in (1, 2, 3, 5, 10):
    extent = axis_extents(truncated_mrpi(series, n))[0]
    print(f"  N={n:2d}  E_N = [-{extent:.6f}, {extent:.6f}]  gap to 2 = {2 - extent:.6f}"
          f"  bound = {tail_bound(1.0, 0.5, n):.6f}")

cert = certify([[0.5]], Box.symmetric(1.0, 1), QuadraticNorm.euclidean(1), 3)
print("  certificate:", cert.to_text())

# A random Schur-stable 6-D system. Its Euclidean norm usually exceeds one,
# so the certificate is taken in the Lyapunov norm, which always contracts.
A = random_schur_matrix(6, seed=0)
w = Box.symmetric(0.1, 6)
rep = lyapunov_norm(A)
print(f"\n6-D system: spectral radius {rep.rho:.4f}, Lyapunov-norm gamma {rep.gamma:.4f}")

curve = error_curve(A, w, rep.norm, range(1, 31, 3))
for row in curve.rows:
    print(f"  N={row.n:2d}  sampled d_H = {row.d_num:.3e}   bound = {row.d_bound:.3e}")
print(f"  rows above the bound: {len(curve.violations())}")

eps = 1e-3
n = n_min(eps, rep.gamma, curve.rows[0].r_w)
print(f"\nsmallest N with bound <= {eps:g}: {n} (bound {tail_bound(curve.rows[0].r_w, rep.gamma, n):.3e})")
# The reference has to reach past N, so lengthen it for this one row.
far = error_curve(A, w, rep.norm, [n], k_ref=n + 200).rows[0]
print(f"sampled distance at that N: {far.d_num:.3e}")

# gamma close to one makes N large; a Lyapunov norm built for a target rate helps.
shaped = lyapunov_norm(A, rate=0.93)
n_shaped = n_min(eps, shaped.gamma, error_curve(A, w, shaped.norm, [1]).rows[0].r_w)
print(f"with the lyapunov@0.93 norm (gamma {shaped.gamma:.4f}) the same tolerance needs N = {n_shaped}")
