"""Random-walk Metropolis and pCN kernels, chain runner and warm-start initialisers.

Every step consumes exactly ``d + 1`` words of the counter-based stream
(``d`` normals, then one uniform), whether or not the proposal is accepted.
Step ``k`` of a chain with seed ``s`` therefore always sees the same
variates, which is what lets a run of ``n1 + n2`` steps be reproduced by a
run of ``n1`` followed by a run of ``n2`` started at step ``n1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import InvalidArgument, NumericalFailure
from .rng import CounterRNG, as_rng
from .targets import PcnTarget, TargetSpec

_BLOCK = 4096
_INIT_STREAM = 0x1A17  # child stream used for random initial states


@dataclass(frozen=True)
class KernelConfig:
    """Kernel choice and step size.

    Give either ``varsigma`` (dimension-free scale, converted with the
    target's constants) or the explicit step: ``sigma`` for RWM, ``rho``
    or ``eta`` for pCN.
    """

    kind: str
    sigma: Optional[float] = None
    rho: Optional[float] = None
    eta: Optional[float] = None
    varsigma: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("rwm", "pcn"):
            raise InvalidArgument(f"unknown kernel kind {self.kind!r}")
        explicit = [v for v in (self.sigma, self.rho, self.eta) if v is not None]
        if self.kind == "rwm" and (self.rho is not None or self.eta is not None):
            raise InvalidArgument("rwm kernels take sigma or varsigma")
        if self.kind == "pcn" and self.sigma is not None:
            raise InvalidArgument("pcn kernels take rho/eta or varsigma")
        if self.varsigma is not None and explicit:
            raise InvalidArgument("give either varsigma or an explicit step size, not both")
        if self.varsigma is None and not explicit:
            raise InvalidArgument("a step size is required")
        if self.varsigma is not None and not self.varsigma > 0:
            raise InvalidArgument("varsigma must be positive")
        if self.sigma is not None and not self.sigma >= 0:
            raise InvalidArgument("sigma must be nonnegative")
        if self.kind == "pcn" and explicit:
            rho, eta = _complete_rho_eta(self.rho, self.eta)
            object.__setattr__(self, "rho", rho)
            object.__setattr__(self, "eta", eta)

    def resolve(self, target) -> "KernelConfig":
        """Explicit-step copy; ``varsigma`` is converted using ``target``."""
        if self.varsigma is None:
            return self
        if self.kind == "rwm":
            return KernelConfig("rwm", sigma=self.varsigma / math.sqrt(target.L * target.d))
        eta = self.varsigma / math.sqrt(target.L_psi * target.trace_c)
        if not eta < 1.0:
            raise InvalidArgument("varsigma too large: need eta = varsigma / sqrt(L Tr C) < 1")
        return KernelConfig("pcn", eta=eta)


def _complete_rho_eta(rho, eta):
    if rho is None:
        if not 0.0 < eta < 1.0:
            raise InvalidArgument("eta must lie in (0, 1)")
        return math.sqrt(1.0 - eta * eta), eta
    if eta is None:
        if not 0.0 < rho < 1.0:
            raise InvalidArgument("rho must lie in (0, 1)")
        return rho, math.sqrt(1.0 - rho * rho)
    if abs(rho * rho + eta * eta - 1.0) > 1e-12 or not (0 < rho < 1 and 0 < eta < 1):
        raise InvalidArgument("need rho, eta in (0, 1) with rho^2 + eta^2 = 1")
    return rho, eta


class Step(NamedTuple):
    x: np.ndarray
    accepted: bool
    log_ratio: float


def _accept(log_ratio, u):
    """Log-space Metropolis test; non-finite ratios reject."""
    with np.errstate(invalid="ignore"):
        return np.isfinite(log_ratio) & (np.log(u) < np.minimum(0.0, log_ratio))


def rwm_step(x, target: TargetSpec, sigma: float, rand) -> Step:
    """One RWM transition from ``x``; consumes ``d + 1`` words of ``rand``."""
    rng = as_rng(rand)
    x = np.asarray(x, dtype=np.float64)
    z, u = rng.step_block(1, target.d)
    y = x + sigma * z[0]
    with np.errstate(invalid="ignore", over="ignore"):
        log_ratio = float(target.potential(x) - target.potential(y))
    ok = bool(_accept(log_ratio, u[0]))
    return Step(y if ok else x.copy(), ok, log_ratio)


def pcn_step(x, target: PcnTarget, rho: float, rand) -> Step:
    """One pCN transition: propose ``rho x + eta C^{1/2} xi``."""
    if not 0.0 < rho < 1.0:
        raise InvalidArgument("rho must lie in (0, 1)")
    rng = as_rng(rand)
    eta = math.sqrt(1.0 - rho * rho)
    x = np.asarray(x, dtype=np.float64)
    z, u = rng.step_block(1, target.d)
    w = rho * x + eta * target.correlate(z)[0]
    with np.errstate(invalid="ignore", over="ignore"):
        log_ratio = float(target.psi(x) - target.psi(w))
    ok = bool(_accept(log_ratio, u[0]))
    return Step(w if ok else x.copy(), ok, log_ratio)


class BatchStep(NamedTuple):
    y: np.ndarray
    accepted: np.ndarray
    log_ratio: np.ndarray


def kernel_step_batch(xs, target, config: KernelConfig, rand) -> BatchStep:
    """One independent transition from each row of ``xs``.

    Row ``i`` uses the same ``d + 1`` words a single-step call would use at
    stream position ``i (d + 1)``.
    """
    rng = as_rng(rand)
    cfg = config.resolve(target)
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    z, u = rng.step_block(xs.shape[0], target.d)
    with np.errstate(invalid="ignore", over="ignore"):
        if cfg.kind == "rwm":
            prop = xs + cfg.sigma * z
            log_ratio = target.potentials(xs) - target.potentials(prop)
        else:
            prop = cfg.rho * xs + cfg.eta * target.correlate(z)
            log_ratio = target.psis(xs) - target.psis(prop)
    ok = _accept(log_ratio, u)
    return BatchStep(np.where(ok[:, None], prop, xs), ok, log_ratio)


# --------------------------------------------------------------------------
# chains


@dataclass
class ChainStats:
    """Sufficient statistics of a chain segment.

    For each functional ``f`` the row of ``functional_sums`` holds
    ``[sum f(X_i), sum f(X_i)^2, sum f(X_i) f(X_{i+1}), sum (f(X_{i+1}) - f(X_i))^2]``
    over the pre-step states ``i = start_step, ..., start_step + n_steps - 1``,
    so segments merge by addition.
    """

    n_steps: int
    n_accepted: int
    n_nonfinite: int
    seed: int
    start_step: int
    functional_sums: np.ndarray
    final_state: np.ndarray
    trajectory: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def acceptance_rate(self) -> float:
        return self.n_accepted / self.n_steps

    def merge(self, later: "ChainStats") -> "ChainStats":
        """Concatenate with the segment that continues this one."""
        if later.start_step != self.start_step + self.n_steps or later.seed != self.seed:
            raise InvalidArgument("segments are not consecutive pieces of one chain")
        traj = None
        if self.trajectory is not None and later.trajectory is not None:
            traj = np.vstack([self.trajectory, later.trajectory])
        return ChainStats(
            n_steps=self.n_steps + later.n_steps,
            n_accepted=self.n_accepted + later.n_accepted,
            n_nonfinite=self.n_nonfinite + later.n_nonfinite,
            seed=self.seed,
            start_step=self.start_step,
            functional_sums=self.functional_sums + later.functional_sums,
            final_state=later.final_state,
            trajectory=traj,
        )

    def to_dict(self) -> dict:
        return {
            "n_steps": self.n_steps,
            "n_accepted": self.n_accepted,
            "n_nonfinite": self.n_nonfinite,
            "acceptance_rate": self.acceptance_rate,
            "seed": self.seed,
            "start_step": self.start_step,
            "functional_sums": self.functional_sums.tolist(),
            "final_state": self.final_state.tolist(),
        }


def _initial_state(init, target, seed):
    if callable(init):
        rng = CounterRNG(seed).split(_INIT_STREAM)
        return np.asarray(init(rng), dtype=np.float64).reshape(target.d)
    x = np.array(init, dtype=np.float64).reshape(-1)
    if x.shape != (target.d,):
        raise InvalidArgument(f"initial state must have shape ({target.d},)")
    return x


def run_chain(config: KernelConfig, target, init: Union[Sequence[float], np.ndarray, Callable],
              n: int, seed: int, functionals: Sequence[Callable] = (), start_step: int = 0,
              record_every: int = 0) -> ChainStats:
    """Run ``n`` Metropolis steps and accumulate statistics.

    Args:
        config: kernel and step size.
        target: a :class:`TargetSpec` (RWM) or :class:`PcnTarget` (pCN).
        init: starting point, or a callable ``rng -> point`` for a random start
            (drawn from a child stream so the step variates are unaffected).
        n: number of steps.
        seed: stream seed; the result is a deterministic function of
            ``(config, target, init, n, seed, start_step)``.
        functionals: scalar maps of the state to accumulate.
        start_step: absolute index of the first step, used to continue a chain.
        record_every: if positive, keep rows ``(step, f_1..f_k, accepted)``
            for every ``record_every``-th step.
    """
    if int(n) != n or n < 1:
        raise InvalidArgument("n must be a positive integer")
    cfg = config.resolve(target)
    d = target.d
    x = _initial_state(init, target, seed)
    rng = CounterRNG(seed, 0, int(start_step) * (d + 1))
    if cfg.kind == "rwm":
        if not isinstance(target, TargetSpec):
            raise InvalidArgument("rwm kernels need a TargetSpec")
        energy = target.potential

        def propose(x, z):
            return x + cfg.sigma * z
    else:
        if not isinstance(target, PcnTarget):
            raise InvalidArgument("pcn kernels need a PcnTarget")
        energy = target.psi
        rho, eta = cfg.rho, cfg.eta

        def propose(x, z):
            return rho * x + eta * target.correlate(z)

    k = len(functionals)
    sums = np.zeros((k, 4))
    fx = np.array([f(x) for f in functionals], dtype=np.float64)
    ex = float(energy(x))
    n_acc = n_bad = 0
    rows = []
    done = 0
    while done < n:
        b = min(_BLOCK, n - done)
        z, u = rng.step_block(b, d)
        log_u = np.log(u)
        before = np.empty((b, k))
        after = np.empty((b, k))
        acc = np.zeros(b, dtype=bool)
        for i in range(b):
            before[i] = fx
            y = propose(x, z[i])
            with np.errstate(invalid="ignore", over="ignore"):
                ey = float(energy(y))
                log_ratio = ex - ey
            if not math.isfinite(log_ratio):
                n_bad += 1
            elif log_u[i] < min(0.0, log_ratio):
                x, ex = y, ey
                fx = np.array([f(x) for f in functionals], dtype=np.float64)
                acc[i] = True
            after[i] = fx
        n_acc += int(acc.sum())
        if k:
            sums[:, 0] += before.sum(axis=0)
            sums[:, 1] += (before * before).sum(axis=0)
            sums[:, 2] += (before * after).sum(axis=0)
            sums[:, 3] += ((after - before) ** 2).sum(axis=0)
        if record_every:
            steps = start_step + done + np.arange(b)
            keep = (steps + 1) % record_every == 0
            rows.append(np.column_stack([steps[keep] + 1, after[keep], acc[keep]]))
        done += b
    traj = np.vstack(rows) if record_every else None
    return ChainStats(n, n_acc, n_bad, int(seed), int(start_step), sums, x, traj)


# --------------------------------------------------------------------------
# initialisers


class AcceptedProposal(NamedTuple):
    x: np.ndarray
    trials: int


def accepted_proposal_init(x0, target: TargetSpec, sigma: float, rand,
                           max_trials: int = 10 ** 6) -> AcceptedProposal:
    """Propose from ``x0`` until a Metropolis test passes; return that proposal.

    The result is a draw from the accepted-move law ``P^alpha(x0, .)``.
    Trials are processed in vectorised chunks but the stream is left
    positioned exactly after the accepting trial.

    Raises:
        NumericalFailure: if ``max_trials`` proposals are all rejected.
    """
    if not sigma > 0:
        raise InvalidArgument("sigma must be positive")
    rng = as_rng(rand)
    x0 = np.asarray(x0, dtype=np.float64)
    d = target.d
    u_x0 = target.potential(x0)
    trials = 0
    chunk = 16
    while trials < max_trials:
        b = min(chunk, max_trials - trials)
        start = rng.position
        z, u = rng.step_block(b, d)
        ys = x0 + sigma * z
        with np.errstate(invalid="ignore", over="ignore"):
            ok = _accept(u_x0 - target.potentials(ys), u)
        hits = np.flatnonzero(ok)
        if hits.size:
            j = int(hits[0])
            rng.position = start + (j + 1) * (d + 1)
            return AcceptedProposal(ys[j], trials + j + 1)
        trials += b
        chunk = min(chunk * 2, _BLOCK)
    raise NumericalFailure(f"no proposal accepted in {max_trials} trials; sigma is badly tuned",
                           partial=trials)


def gaussian_sample(mean, rand, *, var: float | None = None, chol=None, cov=None,
                    size: int | None = None) -> np.ndarray:
    """``mean + A z`` for standard normal ``z``.

    Exactly one of ``var`` (isotropic variance), ``chol`` (lower-triangular
    factor) or ``cov`` (covariance, factored here) must be given.
    """
    mean = np.asarray(mean, dtype=np.float64)
    d = mean.size
    given = [v is not None for v in (var, chol, cov)]
    if sum(given) != 1:
        raise InvalidArgument("give exactly one of var, chol, cov")
    if cov is not None:
        cov = np.asarray(cov, dtype=np.float64)
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise InvalidArgument("covariance is not symmetric positive definite") from exc
        if not np.allclose(cov, cov.T):
            raise InvalidArgument("covariance is not symmetric")
    if var is not None and not var >= 0:
        raise InvalidArgument("variance must be nonnegative")
    rng = as_rng(rand)
    z = rng.normal((1 if size is None else size, d))
    if var is not None:
        out = mean + math.sqrt(var) * z
    else:
        out = mean + z @ np.asarray(chol, dtype=np.float64).T
    return out[0] if size is None else out


def mode_gaussian_init(target: TargetSpec) -> Callable[[CounterRNG], np.ndarray]:
    """Sampler for ``N(x*, I / L)``, whose chi-square to the target is at most ``kappa^(d/2)``."""
    return lambda rng: gaussian_sample(target.mode, rng, var=1.0 / target.L)


def pcn_init_cov(target: PcnTarget) -> np.ndarray:
    """``C (I + L C)^{-1}``, the pCN analogue of ``N(x*, I/L)``."""
    L = target.L_psi
    if target.diag is not None:
        c = target.diag ** 2
        return np.diag(c / (1.0 + L * c))
    return np.linalg.solve(np.eye(target.d) + L * target.cov, target.cov).T


def pcn_gaussian_init(target: PcnTarget) -> Callable[[CounterRNG], np.ndarray]:
    cov = pcn_init_cov(target)
    return lambda rng: gaussian_sample(np.zeros(target.d), rng, cov=0.5 * (cov + cov.T))
