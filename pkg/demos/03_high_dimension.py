"""The bound stays sound as the state dimension grows.

For n = 10, 15, 20 the series E_N is built as a zonotope with N n
generators and compared to a 200-term reference on about 2000 directions.
At n = 20 the disturbance radius switches from vertex enumeration to a
conservative estimate, which keeps the certificate valid.
"""

import time

from mrpibound import Box, error_curve, fit_decay_slope, lyapunov_norm, random_schur_matrix

for dim in (10, 15, 20):
    t0 = time.perf_counter()
    A = random_schur_matrix(dim, seed=0)
    rep = lyapunov_norm(A)
    curve = error_curve(A, Box.symmetric(0.1, dim), rep.norm, range(1, 21))
    slope = fit_decay_slope(curve)
    print(f"n={dim}: gamma={rep.gamma:.4f} rho={rep.rho:.2f} conservative r_w={curve.conservative_radius} "
          f"violations={len(curve.violations())} fitted slope={slope:.3f} ({time.perf_counter() - t0:.2f}s)")
    for row in curve.rows[::5]:
        print(f"    N={row.n:2d}  sampled {row.d_num:.3e}  bound {row.d_bound:.3e}")
