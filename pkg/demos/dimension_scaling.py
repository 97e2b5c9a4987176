#! /usr/bin/env python3
"""Monte Carlo estimates next to the bounds, across dimension.

For N(0, I_d) with sigma = 1 / sqrt(d), the spectral gap should fall like
1/d, the half-space flow like 1/sqrt(d), and the acceptance rate should
hold steady.  Each estimate uses i.i.d. stationary pairs, so the standard
errors are honest without any autocorrelation correction.
"""

import isomix as im

DIMS = [2, 4, 8, 16, 32, 64]
N = 50_000
SEED = 2024

expected = {"gap": -1.0, "flow": -0.5, "acceptance": 0.0}
for metric in ["gap", "flow", "acceptance"]:
    res = im.dimension_scan(DIMS, 1.0, metric, N, SEED)
    print(f"\n{metric}: log-log slope {res.slope:+.3f} +/- {res.slope_se:.3f} "
          f"(theory {expected[metric]:+.1f})")
    print(f"{'d':>5} {'lower':>11} {'estimate':>11} {'SE':>10} {'upper':>11}")
    for r in res.rows:
        print(f"{r.d:>5} {r.lower_bound:>11.4e} {r.estimate:>11.4e} {r.std_error:>10.2e} "
              f"{r.upper_bound:>11.4e}")

# The lower bounds are conservative by several orders of magnitude, which is
# the price of constants that hold for every smooth strongly log-concave
# target.  The slopes are the part that transfers.
