"""Monte Carlo estimators that put numbers next to the theoretical bounds.

All stationary estimators draw ``X ~ pi`` exactly and take one kernel step
``Y ~ P(X, .)`` from each draw, so the pairs are i.i.d. and standard errors
need no autocorrelation correction.  The pairs are held in memory as two
``(n, d)`` arrays, so memory grows as ``O(n d)``; ``n = 1e5`` at ``d = 1000``
needs about 1.6 GB.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from .bounds import rwm_alpha0_lower, rwm_lower_bounds, rwm_sigma
from .errors import InvalidArgument, NumericalFailure
from .rng import CounterRNG
from .samplers import KernelConfig, kernel_step_batch
from .targets import TargetSpec, gaussian_target

_X_STREAM, _STEP_STREAM, _BURN_STREAM = 1, 2, 3


@dataclass(frozen=True)
class EstimateWithError:
    value: float
    std_error: float
    n: int


def coordinate(i: int) -> Callable:
    """Vectorised ``x -> x[i]`` (works on a point or on rows of an array)."""

    def f(x):
        return np.asarray(x)[..., i]

    f.vectorized = True
    return f


def linear(a) -> Callable:
    """Vectorised ``x -> <a, x>``."""
    a = np.asarray(a, dtype=np.float64)

    def f(x):
        return np.asarray(x) @ a

    f.vectorized = True
    return f


def _apply(f, xs):
    if getattr(f, "vectorized", False):
        return np.asarray(f(xs), dtype=np.float64)
    return np.fromiter((f(x) for x in xs), dtype=np.float64, count=len(xs))


def _stationary_pairs(target, config, n, seed, burn_in=0):
    if int(n) != n or n < 2:
        raise InvalidArgument("n must be an integer >= 2")
    root = CounterRNG(seed)
    if getattr(target, "exact_sampler", None) is not None:
        xs = target.sample(root.split(_X_STREAM), int(n))
    elif burn_in > 0:
        # n independent replicas started at the mode; biased by whatever
        # distance to stationarity remains after burn_in steps
        start = getattr(target, "mode", None)
        xs = np.tile(np.zeros(target.d) if start is None else start, (int(n), 1))
        burn = root.split(_BURN_STREAM)
        for _ in range(int(burn_in)):
            xs = kernel_step_batch(xs, target, config, burn).y
    else:
        raise InvalidArgument("target has no exact sampler; pass burn_in > 0 to approximate pi")
    return xs, kernel_step_batch(xs, target, config, root.split(_STEP_STREAM))


def _jackknife_ratio(num, den):
    """``sum(num) / sum(den)`` with its leave-one-out jackknife standard error."""
    n = num.size
    s_num, s_den = math.fsum(num), math.fsum(den)
    value = s_num / s_den
    loo = (s_num - num) / (s_den - den)
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return value, se


def rayleigh_quotient(target: TargetSpec, config: KernelConfig, f: Callable, n: int,
                      seed: int, burn_in: int = 0) -> EstimateWithError:
    """Dirichlet form over variance, ``E[(f(Y) - f(X))^2] / (2 Var f(X))``.

    Its expectation upper-bounds the spectral gap.  The standard error is
    the O(n) leave-one-out jackknife of the ratio.  Targets without an
    exact sampler need ``burn_in > 0``; the result is then biased by the
    residual distance to stationarity.
    """
    xs, step = _stationary_pairs(target, config, n, seed, burn_in)
    fx = _apply(f, xs)
    fy = _apply(f, step.y)
    centred = fx - fx.mean()
    if not np.any(centred):
        raise InvalidArgument("degenerate functional: f is constant on the sample")
    half_sq = 0.5 * (fy - fx) ** 2
    n = fx.size
    s_a, s_c2 = math.fsum(half_sq), math.fsum(centred ** 2)
    value = (s_a / n) / (s_c2 / n)
    # leave-one-out: the centred sum is zero, so removing c_i shifts the mean by -c_i/(n-1)
    var_loo = (s_c2 - centred ** 2) / (n - 1) - (centred / (n - 1)) ** 2
    loo = ((s_a - half_sq) / (n - 1)) / var_loo
    se = math.sqrt((n - 1) / n * float(np.sum((loo - loo.mean()) ** 2)))
    return EstimateWithError(value, se, n)


def halfspace_flow(target: TargetSpec, config: KernelConfig, direction, offset: float, n: int,
                   seed: int, burn_in: int = 0) -> EstimateWithError:
    """One-step probability of leaving ``A = {<direction, x> >= offset}`` from ``pi|A``."""
    u = np.asarray(direction, dtype=np.float64)
    norm = np.linalg.norm(u)
    if norm == 0:
        raise InvalidArgument("direction must be nonzero")
    u = u / norm
    xs, step = _stationary_pairs(target, config, n, seed, burn_in)
    in_a = xs @ u >= offset
    if not in_a.any():
        raise NumericalFailure("no sampled state fell in the half-space")
    leave = in_a & (step.y @ u < offset)
    value, se = _jackknife_ratio(leave.astype(np.float64), in_a.astype(np.float64))
    return EstimateWithError(value, se, int(in_a.sum()))


def acceptance_rate(target, config: KernelConfig, n: int, seed: int,
                    burn_in: int = 0) -> EstimateWithError:
    """Stationary acceptance probability with its binomial standard error."""
    _, step = _stationary_pairs(target, config, n, seed, burn_in)
    p = float(step.accepted.mean())
    return EstimateWithError(p, math.sqrt(p * (1.0 - p) / step.accepted.size), step.accepted.size)


# --------------------------------------------------------------------------
# dimension scans

METRICS = ("gap", "flow", "acceptance")


@dataclass(frozen=True)
class ScanRow:
    d: int
    estimate: float
    std_error: float
    lower_bound: float
    upper_bound: float


@dataclass(frozen=True)
class ScanResult:
    metric: str
    rows: tuple[ScanRow, ...]
    slope: float
    slope_se: float


def _scan_one(args):
    d, varsigma, family, metric, n, seed = args
    target = family(d) if callable(family) else gaussian_target(d, 1.0)
    sigma = rwm_sigma(target.L, d, varsigma)
    cfg = KernelConfig("rwm", sigma=sigma)
    run_seed = CounterRNG(seed).split(d).stream
    if metric == "gap":
        est = rayleigh_quotient(target, cfg, coordinate(0), n, run_seed)
        lo = rwm_lower_bounds(target.m, target.L, d, varsigma).gap
        hi = 0.5 * target.L * sigma ** 2
    elif metric == "flow":
        e1 = np.zeros(d)
        e1[0] = 1.0
        est = halfspace_flow(target, cfg, e1, float(target.mode[0]), n, run_seed)
        lo = rwm_lower_bounds(target.m, target.L, d, varsigma).phi_star
        hi = 2.0 * math.sqrt(target.L) * sigma
    else:
        est = acceptance_rate(target, cfg, n, run_seed)
        lo = rwm_alpha0_lower(target.L, sigma, d)
        hi = 1.0
    return ScanRow(d, est.value, est.std_error, lo, hi)


def dimension_scan(dims: Sequence[int], varsigma: float, metric: str, n: int, seed: int,
                   family: Callable[[int], TargetSpec] | None = None, jobs: int = 1) -> ScanResult:
    """Estimate ``metric`` at each dimension with ``sigma = varsigma / sqrt(L d)``.

    Returns the table and the least-squares slope of ``log(estimate)``
    against ``log(d)``.  Each dimension uses its own child stream, so the
    numbers do not depend on ``jobs``.  ``family`` defaults to the standard
    Gaussian; a custom family must be picklable when ``jobs > 1``.
    """
    if metric not in METRICS:
        raise InvalidArgument(f"metric must be one of {METRICS}")
    dims = [int(d) for d in dims]
    if len(dims) < 2 or len(set(dims)) < 2:
        raise InvalidArgument("need at least two distinct dimensions")
    work = [(d, varsigma, family, metric, n, seed) for d in dims]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_scan_one, work))
    else:
        rows = [_scan_one(w) for w in work]
    est = np.array([r.estimate for r in rows])
    if np.any(est <= 0):
        raise NumericalFailure("nonpositive estimate; cannot fit a log-log slope")
    fit = stats.linregress(np.log(dims), np.log(est))
    return ScanResult(metric, tuple(rows), float(fit.slope), float(fit.stderr))


# --------------------------------------------------------------------------
# closed-form chi-square


def chi2_gaussian_diag(mean1, var1, mean2, var2) -> float:
    """``chi^2(N(mean1, diag var1) || N(mean2, diag var2))``.

    Returns ``inf`` when some ``2 var2 <= var1`` (the divergence is infinite).
    """
    m1, v1, m2, v2 = (np.atleast_1d(np.asarray(a, dtype=np.float64)) for a in (mean1, var1, mean2, var2))
    m1, v1, m2, v2 = np.broadcast_arrays(m1, v1, m2, v2)
    if np.any(v1 <= 0) or np.any(v2 <= 0):
        raise InvalidArgument("variances must be positive")
    denom = 2.0 * v2 - v1
    if np.any(denom <= 0):
        return math.inf
    log_terms = np.log(v2) - 0.5 * np.log(v1) - 0.5 * np.log(denom) + (m1 - m2) ** 2 / denom
    return math.expm1(math.fsum(log_terms))
