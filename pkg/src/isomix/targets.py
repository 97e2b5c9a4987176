"""Target distributions with explicit convexity and smoothness constants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument, NumericalFailure
from .rng import CounterRNG, as_rng


@dataclass(frozen=True)
class TargetSpec:
    """Density ``pi ∝ exp(-U)`` on R^d with ``m``-strongly convex, ``L``-smooth ``U``.

    ``potential`` and ``gradient`` take a point of shape ``(d,)``; the
    optional ``batch_potential`` takes an ``(n, d)`` array and is used by the
    vectorised estimators.  ``exact_sampler(rng, n)`` returns ``(n, d)``
    i.i.d. draws from ``pi``.
    """

    d: int
    potential: Callable = field(repr=False)
    gradient: Callable = field(repr=False)
    m: float
    L: float
    mode: np.ndarray = field(repr=False)
    exact_sampler: Optional[Callable] = field(default=None, repr=False)
    batch_potential: Optional[Callable] = field(default=None, repr=False)
    name: str = ""

    def __post_init__(self):
        if self.d < 1:
            raise InvalidArgument("dimension must be positive")
        if not (self.L > 0 and self.L >= self.m >= 0):
            raise InvalidArgument(f"need L >= m >= 0 and L > 0, got m={self.m}, L={self.L}")
        mode = np.asarray(self.mode, dtype=np.float64)
        if mode.shape != (self.d,):
            raise InvalidArgument("mode must have shape (d,)")
        mode.setflags(write=False)
        object.__setattr__(self, "mode", mode)

    @property
    def kappa(self) -> float:
        return self.L / self.m if self.m > 0 else math.inf

    def potentials(self, xs: np.ndarray) -> np.ndarray:
        xs = np.atleast_2d(xs)
        if self.batch_potential is not None:
            return np.asarray(self.batch_potential(xs), dtype=np.float64)
        return np.array([self.potential(x) for x in xs], dtype=np.float64)

    def sample(self, rng, n: int) -> np.ndarray:
        if self.exact_sampler is None:
            raise InvalidArgument(f"target {self.name!r} has no exact sampler")
        return self.exact_sampler(as_rng(rng), n)


def diagonal_gaussian_target(precisions, mode=None, name: str | None = None) -> TargetSpec:
    """``N(mode, diag(1/precisions))``; m and L are the extreme precisions."""
    lam = np.asarray(precisions, dtype=np.float64)
    if lam.ndim != 1 or lam.size == 0 or np.any(lam <= 0) or not np.all(np.isfinite(lam)):
        raise InvalidArgument("precisions must be a nonempty vector of positive numbers")
    d = lam.size
    mu = np.zeros(d) if mode is None else np.asarray(mode, dtype=np.float64)
    scale = 1.0 / np.sqrt(lam)

    def potential(x):
        r = np.asarray(x) - mu
        return 0.5 * float(np.dot(lam * r, r))

    def gradient(x):
        return lam * (np.asarray(x) - mu)

    def batch(xs):
        r = xs - mu
        return 0.5 * np.einsum("ij,j,ij->i", r, lam, r)

    def sampler(rng: CounterRNG, n):
        return mu + scale * rng.normal((n, d))

    return TargetSpec(
        d=d, potential=potential, gradient=gradient, m=float(lam.min()), L=float(lam.max()),
        mode=mu, exact_sampler=sampler, batch_potential=batch,
        name=name or f"diag-gaussian(d={d})",
    )


def gaussian_target(d: int, sigma0_sq: float) -> TargetSpec:
    """Isotropic ``N(0, sigma0_sq * I_d)``, for which ``m = L = 1/sigma0_sq``."""
    if int(d) != d or d < 1:
        raise InvalidArgument("d must be a positive integer")
    if not sigma0_sq > 0:
        raise InvalidArgument("sigma0_sq must be positive")
    return diagonal_gaussian_target(
        np.full(int(d), 1.0 / sigma0_sq), name=f"gaussian(d={d}, sigma0_sq={sigma0_sq:g})"
    )


def lambda_max_gram(A, rel_tol: float = 1e-10, max_iter: int = 10_000, seed: int = 0) -> float:
    """Largest eigenvalue of ``A A^T`` by power iteration on ``A^T A``."""
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        return 0.0
    d = A.shape[1]
    v = CounterRNG(seed).normal(d) + 1.0
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = A.T @ (A @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        new = float(v @ w)
        v = w / norm
        if abs(new - lam) <= rel_tol * abs(new):
            return new
        lam = new
    raise NumericalFailure("power iteration did not converge", partial=lam)


def _log1pexp(z):
    return np.logaddexp(0.0, z)


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def newton_mode(potential, gradient, hessian, x0, tol: float = 1e-10, max_iter: int = 200):
    """Damped Newton with Armijo backtracking."""
    x = np.array(x0, dtype=np.float64)
    for _ in range(max_iter):
        g = gradient(x)
        if np.linalg.norm(g) <= tol:
            return x
        step = np.linalg.solve(hessian(x), g)
        u0 = potential(x)
        slope = float(g @ step)
        t = 1.0
        while potential(x - t * step) > u0 - 1e-4 * t * slope and t > 1e-12:
            t *= 0.5
        x = x - t * step
    if np.linalg.norm(gradient(x)) <= tol:
        return x
    raise NumericalFailure(f"Newton did not reach |grad| <= {tol} in {max_iter} iterations", partial=x)


def logistic_posterior_target(covariates, responses, sigma0_sq: float) -> TargetSpec:
    """Posterior of Bayesian logistic regression under a ``N(0, sigma0_sq I)`` prior.

    The potential is
    ``|x|^2 / (2 sigma0_sq) + sum_i log(1 + exp(-<a_i, x>)) - y_i <a_i, x>``.
    This differs from the usual Bernoulli-logit negative log-likelihood
    ``log(1 + exp(<a_i, x>)) - y_i <a_i, x>`` by the linear term
    ``sum_i <a_i, x>``, which moves the mode but not ``m`` or ``L``.
    """
    A = np.asarray(covariates, dtype=np.float64)
    y = np.asarray(responses, dtype=np.float64)
    if A.ndim != 2:
        raise InvalidArgument("covariates must be an N x d matrix")
    if y.shape != (A.shape[0],):
        raise InvalidArgument("responses must have one entry per covariate row")
    if not np.all(np.isfinite(A)):
        raise InvalidArgument("covariates must be finite")
    if not np.all((y == 0) | (y == 1)):
        raise InvalidArgument("responses must be binary (0 or 1)")
    if not sigma0_sq > 0:
        raise InvalidArgument("sigma0_sq must be positive")
    d = A.shape[1]
    if d < 1:
        raise InvalidArgument("need at least one covariate column")
    if A.shape[0] == 0:
        # empty likelihood: the prior itself, with its exact sampler
        return gaussian_target(d, sigma0_sq)
    prec = 1.0 / sigma0_sq

    def potential(x):
        z = A @ x
        return 0.5 * prec * float(x @ x) + float(np.sum(_log1pexp(-z) - y * z))

    def batch(xs):
        z = xs @ A.T
        return 0.5 * prec * np.einsum("ij,ij->i", xs, xs) + np.sum(_log1pexp(-z) - y * z, axis=1)

    def gradient(x):
        z = A @ x
        return prec * x + A.T @ (_sigmoid(z) - 1.0 - y)

    def hessian(x):
        s = _sigmoid(A @ x)
        return prec * np.eye(d) + (A.T * (s * (1.0 - s))) @ A

    L = prec + 0.25 * lambda_max_gram(A)
    mode = newton_mode(potential, gradient, hessian, np.zeros(d))
    return TargetSpec(
        d=d, potential=potential, gradient=gradient, m=prec, L=L, mode=mode,
        exact_sampler=None, batch_potential=batch,
        name=f"logistic(N={A.shape[0]}, d={d})",
    )


def load_logistic_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``y,a1,...,ad`` rows (header optional) into ``(A, y)``."""
    import csv

    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                if rows:
                    raise
                continue  # header
    data = np.array(rows, dtype=np.float64)
    if data.ndim != 2 or data.shape[1] < 2:
        raise InvalidArgument(f"{path}: expected columns y,a1..ad")
    return data[:, 1:], data[:, 0]


@dataclass(frozen=True)
class SandwichReport:
    lower_violation: float
    upper_violation: float
    min_lower_slack: float
    min_upper_slack: float
    passed: bool
    n_samples: int


def _ball(rng: CounterRNG, n, d, radius):
    g = rng.normal((n, d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    r = radius * rng.uniform(n) ** (1.0 / d)
    return g * r[:, None]


def check_smooth_convex(target: TargetSpec, n_samples: int = 1000, radius: float = 3.0,
                        seed: int = 0) -> SandwichReport:
    """Sample ``(x, h)`` in a ball and test the quadratic sandwich on ``U``.

    Violations are normalised by ``1 + |U(x)|``; the check passes when no
    normalised violation exceeds 1e-8.
    """
    rng = as_rng(seed)
    xs = target.mode + _ball(rng, n_samples, target.d, radius)
    hs = _ball(rng, n_samples, target.d, radius)
    worst_lo = worst_hi = 0.0
    slack_lo = slack_hi = math.inf
    for x, h in zip(xs, hs):
        ux = target.potential(x)
        gap = target.potential(x + h) - ux - float(target.gradient(x) @ h)
        q = 0.5 * float(h @ h)
        scale = 1.0 + abs(ux)
        slack_lo = min(slack_lo, gap - target.m * q)
        slack_hi = min(slack_hi, target.L * q - gap)
        worst_lo = max(worst_lo, (target.m * q - gap) / scale)
        worst_hi = max(worst_hi, (gap - target.L * q) / scale)
    passed = max(worst_lo, worst_hi) <= 1e-8
    return SandwichReport(worst_lo, worst_hi, slack_lo, slack_hi, passed, n_samples)


# --------------------------------------------------------------------------
# pCN targets


@dataclass(frozen=True)
class PcnTarget:
    """``pi(dx) ∝ N(dx; 0, C) exp(-Psi(x))`` with convex, ``L_psi``-smooth ``Psi``."""

    cov: np.ndarray = field(repr=False)
    psi: Callable = field(repr=False)
    psi_grad: Callable = field(repr=False)
    L_psi: float
    batch_psi: Optional[Callable] = field(default=None, repr=False)
    exact_sampler: Optional[Callable] = field(default=None, repr=False)
    name: str = ""
    cov_chol: np.ndarray = field(init=False, repr=False)
    diag: Optional[np.ndarray] = field(init=False, repr=False)

    def __post_init__(self):
        cov = np.array(self.cov, dtype=np.float64)
        if cov.ndim == 1:
            cov = np.diag(cov)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
            raise InvalidArgument("cov must be a square matrix or a vector of variances")
        if not np.allclose(cov, cov.T, rtol=0, atol=1e-12 * np.abs(cov).max()):
            raise InvalidArgument("cov must be symmetric")
        if not self.L_psi >= 0:
            raise InvalidArgument("L_psi must be nonnegative")
        is_diag = np.count_nonzero(cov - np.diag(np.diag(cov))) == 0
        if is_diag:
            var = np.diag(cov).copy()
            if np.any(var <= 0):
                raise InvalidArgument("cov must be positive definite")
            chol = np.diag(np.sqrt(var))
            diag = np.sqrt(var)
        else:
            try:
                chol = np.linalg.cholesky(cov)
            except np.linalg.LinAlgError as exc:
                raise InvalidArgument("cov must be positive definite") from exc
            diag = None
        for arr in (cov, chol):
            arr.setflags(write=False)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "cov_chol", chol)
        object.__setattr__(self, "diag", diag)

    @property
    def d(self) -> int:
        return self.cov.shape[0]

    @property
    def trace_c(self) -> float:
        return float(np.trace(self.cov))

    @property
    def kappa_tilde(self) -> float:
        return self.L_psi * self.trace_c

    def psis(self, xs):
        xs = np.atleast_2d(xs)
        if self.batch_psi is not None:
            return np.asarray(self.batch_psi(xs), dtype=np.float64)
        return np.array([self.psi(x) for x in xs], dtype=np.float64)

    def sample(self, rng, n: int) -> np.ndarray:
        if self.exact_sampler is None:
            raise InvalidArgument(f"{self.name or 'target'} has no exact sampler")
        return np.asarray(self.exact_sampler(as_rng(rng), int(n)), dtype=np.float64)

    def correlate(self, z):
        """Map standard normals (rows) to ``N(0, C)`` draws."""
        if self.diag is not None:
            return z * self.diag
        return z @ self.cov_chol.T


def pcn_quadratic_target(cov, L: float) -> PcnTarget:
    """``Psi(x) = L |x|^2 / 2`` (``L = 0`` gives the Gaussian reference itself)."""

    def psi(x):
        return 0.5 * L * float(np.dot(x, x))

    def psi_grad(x):
        return L * np.asarray(x, dtype=np.float64)

    def batch(xs):
        return 0.5 * L * np.einsum("ij,ij->i", xs, xs)

    target = PcnTarget(cov=cov, psi=psi, psi_grad=psi_grad, L_psi=float(L), batch_psi=batch,
                       name=f"pcn-quadratic(L={L:g})")
    # the posterior is N(0, C (I + L C)^{-1})
    if target.diag is not None:
        c = target.diag ** 2
        scale = np.sqrt(c / (1.0 + L * c))

        def sampler(rng, n):
            return rng.normal((n, target.d)) * scale
    else:
        post = np.linalg.solve(np.eye(target.d) + L * target.cov, target.cov)
        chol = np.linalg.cholesky(0.5 * (post + post.T))

        def sampler(rng, n):
            return rng.normal((n, target.d)) @ chol.T

    object.__setattr__(target, "exact_sampler", sampler)
    return target
