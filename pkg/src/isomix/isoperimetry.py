"""Isoperimetric minorants and the algebra that transfers them.

A minorant is stored as a function of ``s = min(p, 1 - p)`` on (0, 1/2], so
symmetry about 1/2 holds by construction.  Every constructor verifies the
regularity and concavity flags it emits on a grid before returning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import ndtri

from .errors import InvalidArgument

EUCLIDEAN = "euclidean"
COV_WEIGHTED = "cov-weighted"
METRIC_TAGS = (EUCLIDEAN, COV_WEIGHTED)

P_MIN = 1e-300
P_MAX = 1.0 - 1e-16

_SQRT_2PI = math.sqrt(2.0 * math.pi)


def inv_normal_cdf(p):
    """Standard normal quantile.

    Inputs in (0, 1e-300) are clamped to 1e-300 (and symmetrically at the
    upper end).  Evaluated on the lower half and reflected, so the result is
    exactly antisymmetric about 1/2.

    Raises:
        InvalidArgument: if any ``p`` lies outside the open interval (0, 1).
    """
    arr = np.asarray(p, dtype=np.float64)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise InvalidArgument("inv_normal_cdf requires p in (0, 1)")
    clamped = np.clip(arr, P_MIN, P_MAX)
    upper = clamped > 0.5
    t = np.where(upper, 1.0 - clamped, clamped)
    z = ndtri(t)
    z = np.where(upper, -z, z)
    return float(z) if z.ndim == 0 else z


def normal_pdf(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.exp(-0.5 * z * z) / _SQRT_2PI
    return float(out) if out.ndim == 0 else out


def gaussian_profile(p):
    """Isoperimetric profile of the standard Gaussian, ``phi(Phi^{-1}(p))``."""
    return normal_pdf(inv_normal_cdf(p))


@dataclass(frozen=True)
class UniversalConstants:
    c_ell: float
    c_gamma: float

    @classmethod
    def compute(cls) -> "UniversalConstants":
        c_ell = math.sqrt(2.0 / (math.pi * math.log(2.0)))
        c_gamma = gaussian_profile(0.25)
        consts = cls(c_ell=c_ell, c_gamma=c_gamma)
        consts.check()
        return consts

    def check(self):
        if not (self.c_ell >= 0.958357 and self.c_gamma >= 0.3177765):
            raise ArithmeticError(f"universal constants below their floors: {self}")


CONSTANTS = UniversalConstants.compute()
C_ELL = CONSTANTS.c_ell
C_GAMMA = CONSTANTS.c_gamma


# --------------------------------------------------------------------------
# minorants

_GRID_SIZE = 1000


def _check_flags(fn, regular, concave, label):
    s = np.linspace(0.5 / _GRID_SIZE, 0.5, _GRID_SIZE)
    vals = np.asarray(fn(s), dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(vals))))
    tol = 1e-12 * scale
    if np.any(~np.isfinite(vals)) or np.any(vals < 0):
        raise InvalidArgument(f"{label}: minorant must be finite and nonnegative")
    if regular and np.any(np.diff(vals) < -tol):
        raise InvalidArgument(f"{label}: claimed regular but not nondecreasing on (0, 1/2]")
    if concave:
        # full (0, 1) grid, mirrored, so the join at 1/2 is checked too
        full = np.concatenate([vals, vals[-2::-1]])
        second = full[:-2] - 2.0 * full[1:-1] + full[2:]
        if np.any(second > tol):
            raise InvalidArgument(f"{label}: claimed concave but fails the grid check")
        if regular and np.any(np.diff(vals / s) > tol * _GRID_SIZE):
            raise InvalidArgument(f"{label}: I/id is not nonincreasing on (0, 1/2]")


@dataclass(frozen=True)
class IsoMinorant:
    """Lower bound ``p -> I(p)`` on an isoperimetric profile.

    ``half`` maps ``s = min(p, 1-p)`` in (0, 1/2] to the bound; it must
    accept numpy arrays.
    """

    half: Callable = field(repr=False)
    regular: bool = True
    concave: bool = True
    label: str = ""
    metric_tag: str = EUCLIDEAN
    verify: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.metric_tag not in METRIC_TAGS:
            raise InvalidArgument(f"unknown metric tag {self.metric_tag!r}")
        if self.verify:
            _check_flags(self.half, self.regular, self.concave, self.label or "minorant")

    def __call__(self, p):
        arr = np.asarray(p, dtype=np.float64)
        s = np.clip(np.minimum(arr, 1.0 - arr), P_MIN, 0.5)
        out = np.asarray(self.half(np.atleast_1d(s)), dtype=np.float64).reshape(s.shape)
        return float(out) if out.ndim == 0 else out

    def ratio(self, p):
        """``I(p) / p``, the quantity the conductance bounds are written in."""
        arr = np.asarray(p, dtype=np.float64)
        out = self(arr) / arr
        return float(out) if np.ndim(out) == 0 else out

    def scaled(self, factor: float, label: str | None = None) -> "IsoMinorant":
        half = self.half
        return IsoMinorant(
            half=lambda s: factor * half(s),
            regular=self.regular,
            concave=self.concave,
            label=label or f"{factor:g}*{self.label}",
            metric_tag=self.metric_tag,
            verify=False,  # positive scaling preserves both flags
        )


def _positive(name, value):
    if not (value > 0 and math.isfinite(value)):
        raise InvalidArgument(f"{name} must be a positive finite number, got {value!r}")


def log_power_minorant(c: float, r: float, label: str | None = None) -> IsoMinorant:
    """``c * s * log(1/s)**r`` on (0, 1/2].

    For ``r > log 2`` the raw function turns down before 1/2; it is capped at
    its value at 1/2, which keeps it a minorant while restoring monotonicity
    and concavity.
    """
    _positive("c", c)
    if not 0.0 <= r <= 1.0:
        raise InvalidArgument("exponent r must lie in [0, 1]")
    cap = 0.5 * math.log(2.0) ** r

    def half(s):
        raw = s * np.log(1.0 / s) ** r if r > 0 else s
        if r > math.log(2.0):
            raw = np.minimum(raw, cap)
        return c * raw

    return IsoMinorant(half=half, label=label or f"{c:g}*p*log(1/p)^{r:g}")


def strongly_logconcave_minorant(m: float) -> IsoMinorant:
    """``sqrt(m) * phi(Phi^{-1}(p))`` for an m-strongly convex potential."""
    _positive("m", m)
    root = math.sqrt(m)
    return IsoMinorant(half=lambda s: root * gaussian_profile(s), label=f"gaussian(m={m:g})")


def strongly_logconcave_log_minorant(m: float) -> IsoMinorant:
    """The weaker closed form ``C_ell * sqrt(m) * p * sqrt(log(1/p))``."""
    _positive("m", m)
    return log_power_minorant(C_ELL * math.sqrt(m), 0.5, label=f"gaussian-log(m={m:g})")


def laplace_profile() -> IsoMinorant:
    return IsoMinorant(half=lambda s: np.array(s, dtype=np.float64), label="laplace")


def subbotin_minorant(alpha: float, k_alpha: float) -> IsoMinorant:
    """Minorant for density proportional to ``exp(-|x|^alpha)``, 1 < alpha < 2.

    ``k_alpha`` has no closed form and must be supplied.
    """
    if not 1.0 < alpha < 2.0:
        raise InvalidArgument("alpha must lie in (1, 2)")
    return log_power_minorant(k_alpha, 1.0 - 1.0 / alpha, label=f"subbotin(alpha={alpha:g})")


def minorant_from_poincare(gamma_pi: float) -> IsoMinorant:
    _positive("gamma_pi", gamma_pi)
    c = math.sqrt(gamma_pi) / 6.0
    return IsoMinorant(half=lambda s: c * s, label=f"poincare({gamma_pi:g})")


def minorant_from_logsobolev(lambda_pi: float, q: float = 2.0, c_q: float | None = None) -> IsoMinorant:
    """Minorant from a (q-)log-Sobolev inequality.

    For ``q == 2`` the prefactor is ``sqrt(lambda_pi) / 34`` and ``c_q`` is
    ignored.  For ``q < 2``, ``lambda_pi`` is the constant ``D`` of the
    q-log-Sobolev inequality and the prefactor is ``c_q * D``.
    """
    _positive("lambda_pi", lambda_pi)
    if not 1.0 <= q <= 2.0:
        raise InvalidArgument("q must lie in [1, 2]")
    if q == 2.0:
        return log_power_minorant(math.sqrt(lambda_pi) / 34.0, 0.5, label=f"logsobolev({lambda_pi:g})")
    if c_q is None:
        raise InvalidArgument("c_q must be supplied when q < 2")
    _positive("c_q", c_q)
    return log_power_minorant(c_q * lambda_pi, 1.0 / q, label=f"q-logsobolev(q={q:g})")


def lipschitz_pushforward(minorant: IsoMinorant, lip_norm: float) -> IsoMinorant:
    """Minorant of ``T#mu`` when ``T`` is a ``lip_norm``-Lipschitz bijection."""
    _positive("lip_norm", lip_norm)
    if lip_norm == 1.0:
        return minorant
    return minorant.scaled(1.0 / lip_norm, label=f"{minorant.label}/lip{lip_norm:g}")


def density_perturbation(minorant: IsoMinorant, c: float) -> IsoMinorant:
    """Minorant of ``nu`` when ``d nu / d mu >= c``."""
    if not 0.0 < c <= 1.0:
        raise InvalidArgument("density floor c must lie in (0, 1]")
    if c == 1.0:
        return minorant
    return minorant.scaled(c, label=f"{c:g}*{minorant.label}")


def osc_perturbation(minorant: IsoMinorant, osc: float) -> IsoMinorant:
    """Bounded perturbation of the potential with oscillation ``osc``."""
    if not osc >= 0.0:
        raise InvalidArgument("oscillation must be nonnegative")
    return density_perturbation(minorant, math.exp(-osc))


def three_set_lower(minorant: IsoMinorant, p1: float, p2: float, dist: float) -> float:
    """Guaranteed lower bound on the mass of the separating set."""
    if not minorant.regular:
        raise InvalidArgument("three-set bound requires a regular minorant")
    if p1 < 0 or p2 < 0 or dist < 0:
        raise InvalidArgument("masses and distance must be nonnegative")
    if p1 + p2 > 1.0 + 1e-15:
        raise InvalidArgument("p1 + p2 must not exceed 1")
    low = min(p1, p2)
    if low == 0.0 or dist == 0.0:
        return 0.0
    return dist * minorant(low)
