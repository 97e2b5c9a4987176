#! /usr/bin/env python3
"""How the RWM guarantees scale with dimension and condition number.

Every number here is closed form: no sampling happens.  The scaling
sigma = varsigma / sqrt(L d) keeps the acceptance floor dimension-free,
and the spectral-gap floor then decays like 1 / (kappa d).
"""

import math

import isomix as im

print("universal constants")
print(f"  C_ell   = {im.C_ELL:.10f}")
print(f"  C_gamma = {im.C_GAMMA:.12f}")

# At a fixed varsigma the acceptance floor does not move with d, while the
# gap floor times kappa * d stays put.
print("\nRWM floors for N(0, I_d), varsigma = 1")
print(f"{'d':>6} {'alpha0':>10} {'gap floor':>12} {'d * gap':>12} {'gap upper':>12}")
for d in [1, 10, 100, 1000, 10_000]:
    lo = im.rwm_lower_bounds(1.0, 1.0, d, 1.0)
    sigma = im.rwm_sigma(1.0, d, 1.0)
    hi = im.rwm_upper_bounds(1.0, 1.0, d, sigma)
    alpha0 = im.rwm_alpha0_lower(1.0, sigma, d)
    print(f"{d:>6} {alpha0:>10.6f} {lo.gap:>12.4e} {d * lo.gap:>12.4e} {hi.gap:>12.4e}")

# The ill-conditioned case pays kappa once, through L in the step size.
print("\ngap floor against kappa at d = 100")
for kappa in [1, 10, 100, 1000]:
    lo = im.rwm_lower_bounds(1.0, float(kappa), 100, 1.0)
    print(f"  kappa = {kappa:>5}: gap >= {lo.gap:.4e}   kappa * gap = {kappa * lo.gap:.4e}")

# Mixing budgets from a Gaussian warm start at the mode.  The two
# prefactor conventions differ only by a constant; both grow like kappa d
# times a log of the warm-start constant.
print("\nmixing budgets, eps_mix = 0.25, warm start N(x*, L^-1 I)")
print(f"{'d':>6} {'kappa':>6} {'log u0':>9} {'derived':>12} {'published':>12}")
for d, kappa in [(10, 1), (10, 10), (100, 10), (1000, 2)]:
    u0 = im.warm_start_u0("gaussian-mode", kappa=kappa, d=d)
    derived = im.rwm_mixing_time(1.0, kappa, d, 1.0, u0, 0.25)
    published = im.rwm_mixing_time(1.0, kappa, d, 1.0, u0, 0.25, printed=True)
    print(f"{d:>6} {kappa:>6} {math.log(u0):>9.2f} {derived.mixing_n:>12.4e} "
          f"{published.mixing_n:>12.4e}")

# The isoperimetric route accepts any minorant.  A Lipschitz pushforward of
# a standard Gaussian is as good as the Gaussian itself, up to the
# Lipschitz constant.
cc = im.rwm_close_coupling(0.3, im.rwm_sigma(1.0, 10, 1.0))
base = im.strongly_logconcave_minorant(1.0)
pushed = im.lipschitz_pushforward(base, 2.0)
print("\nconductance floors at d = 10")
print(f"  N(0, I)                  : {im.conductance_star_lower(base, cc):.4e}")
print(f"  2-Lipschitz image of it  : {im.conductance_star_lower(pushed, cc):.4e}")
print(f"  Laplace                  : {im.conductance_star_lower(im.laplace_profile(), cc):.4e}")
