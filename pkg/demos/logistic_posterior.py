#! /usr/bin/env python3
"""Bayesian logistic regression as a smooth strongly log-concave target.

The Gaussian prior supplies m = 1 / sigma0^2 and the Gram matrix bounds L.
There is no exact sampler, so estimates come from burned-in replicas and
carry whatever bias the burn-in leaves behind.  The potential follows the
printed form sum log(1 + exp(-<a, x>)) - y <a, x>, a linear tilt of the
usual logit likelihood, so the mode is not the maximum-likelihood fit.
"""

import numpy as np

import isomix as im

rng = np.random.default_rng(11)
n_obs, d = 200, 5
beta = rng.normal(size=d)
A = rng.normal(size=(n_obs, d)) / np.sqrt(d)
y = (rng.uniform(size=n_obs) < 1.0 / (1.0 + np.exp(-A @ beta))).astype(float)

target = im.logistic_posterior_target(A, y, sigma0_sq=4.0)
print(f"d = {target.d}, m = {target.m:.4f}, L = {target.L:.4f}, kappa = {target.kappa:.3f}")
print(f"posterior mode: {np.array2string(target.mode, precision=3)}")

rep = im.check_smooth_convex(target, n_samples=500)
print(f"curvature sandwich holds at sampled pairs: {rep.passed}")

u0 = im.warm_start_u0("gaussian-mode", kappa=target.kappa, d=target.d)
bound = im.rwm_mixing_time(target.m, target.L, target.d, 1.0, u0, 0.25)
print(f"\nmixing budget from N(x*, L^-1 I): {bound.mixing_n:.4e} steps")
print(f"spectral gap floor: {bound.gap_lower:.4e}")

sigma = im.rwm_sigma(target.L, target.d, 1.0)
cfg = im.KernelConfig("rwm", sigma=sigma)
stats = im.run_chain(cfg, target, im.mode_gaussian_init(target), 20_000, seed=5,
                     functionals=[im.coordinate(i) for i in range(d)])
means = np.array([s[0] for s in stats.functional_sums]) / stats.n_steps
print(f"\nchain of {stats.n_steps} steps: acceptance {stats.acceptance_rate:.3f}")
print(f"posterior mean estimate: {np.array2string(means, precision=3)}")

est = im.acceptance_rate(target, cfg, 5_000, seed=6, burn_in=100)
print(f"replica acceptance after 100 burn-in steps: {est.value:.4f} +/- {est.std_error:.4f}"
      f"   floor {bound.alpha0_lower:.4f}")
