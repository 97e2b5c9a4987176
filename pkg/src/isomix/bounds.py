"""Explicit conductance, spectral-gap, mixing-time and warm-start bounds.

Everything here is a pure function of its arguments.  Mixing budgets are
reported both as the real-valued sufficient number of steps and as its
ceiling.  Quantities that can underflow (the small-set threshold ``v`` for
poorly conditioned targets, for instance) are carried in log space.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgument
from .isoperimetry import (
    C_ELL,
    C_GAMMA,
    COV_WEIGHTED,
    EUCLIDEAN,
    METRIC_TAGS,
    IsoMinorant,
    P_MIN,
)
from .quadrature import adaptive_quadrature, chi_expectation
from .targets import TargetSpec

QUAD_REL_TOL = 1e-9
LOG4 = math.log(4.0)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class CloseCoupling:
    """Kernels from states within ``delta`` overlap by at least ``eps`` in TV."""

    metric_tag: str
    delta: float
    eps: float

    def __post_init__(self):
        if self.metric_tag not in METRIC_TAGS:
            raise InvalidArgument(f"unknown metric tag {self.metric_tag!r}")
        if not self.delta > 0:
            raise InvalidArgument("close-coupling delta must be positive")
        if not 0.0 < self.eps <= 1.0:
            raise InvalidArgument("close-coupling eps must lie in (0, 1]")


@dataclass
class BoundReport:
    """Evaluated bounds for one configuration.

    ``None`` marks a quantity the producing routine does not bound.
    ``mixing_bound`` is the real-valued sufficient step count and
    ``mixing_n`` its ceiling.
    """

    phi_star_lower: Optional[float] = None
    phi_star_upper: Optional[float] = None
    gap_lower: Optional[float] = None
    gap_upper: Optional[float] = None
    alpha0_lower: Optional[float] = None
    v_star: Optional[float] = None
    mixing_bound: Optional[float] = None
    mixing_n: Optional[int] = None
    mixing_phase_terms: Optional[tuple[float, float, float]] = None
    inputs: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        if self.mixing_phase_terms is not None:
            out["mixing_phase_terms"] = list(self.mixing_phase_terms)
        return out


@dataclass(frozen=True)
class BoundPair:
    """A conductance bound and a spectral-gap bound; unpacks as ``(phi, gap)``."""

    phi_star: float
    gap: float
    alt_phi_star: Optional[float] = None

    def __iter__(self):
        return iter((self.phi_star, self.gap))


# --------------------------------------------------------------------------
# generic profile machinery


def _require_regular_concave(minorant: IsoMinorant):
    if not (minorant.regular and minorant.concave):
        raise InvalidArgument(
            f"{minorant.label or 'minorant'}: conductance bounds need a regular, concave minorant"
        )


def _check_eps_mix(eps_mix):
    if not 0.0 < eps_mix < 8.0:
        raise InvalidArgument("eps_mix must lie in (0, 8)")


def _check_u0(u0):
    if not (u0 >= 0.0) or math.isnan(u0):
        raise InvalidArgument("u0 must be nonnegative")


def _golden_max(fn, lo=0.0, hi=1.0, tol=1e-10):
    """Maximise a unimodal function on [lo, hi]."""
    a, b = lo, hi
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc < fd:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = fn(d)
        else:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = fn(c)
    return max(fc, fd, fn(lo), fn(hi))


def conductance_profile_lower(minorant: IsoMinorant, cc: CloseCoupling, v: float) -> float:
    """Lower bound on the conductance profile at ``v`` in (0, 1/2].

    Returns the larger of the closed form
    ``eps/4 * min(1, delta/2 * I(v/2)/(v/2))`` and the sup over theta of
    ``min((1-theta) eps/2, eps delta I(theta v) / (4 v))``.
    """
    _require_regular_concave(minorant)
    if not 0.0 < v <= 0.5:
        raise InvalidArgument("v must lie in (0, 1/2]")
    eps, delta = cc.eps, cc.delta
    closed = 0.25 * eps * min(1.0, 0.5 * delta * minorant.ratio(0.5 * v))

    def objective(theta):
        return min(0.5 * (1.0 - theta) * eps, 0.25 * eps * delta * minorant(theta * v) / v)

    return max(closed, _golden_max(objective))


def conductance_star_lower(minorant: IsoMinorant, cc: CloseCoupling) -> float:
    _require_regular_concave(minorant)
    return 0.25 * cc.eps * min(1.0, 2.0 * cc.delta * minorant(0.25))


def spectral_gap_lower(minorant: IsoMinorant, cc: CloseCoupling) -> float:
    """Half the square of the conductance bound (Cheeger)."""
    return 0.5 * conductance_star_lower(minorant, cc) ** 2


def spectral_profile_lower(phi_profile: Callable[[float], float], phi_star: float, v: float) -> float:
    if v <= 0.5:
        return 0.5 * phi_profile(v) ** 2
    return 0.5 * phi_star ** 2


def v_star(minorant: IsoMinorant, delta: float) -> float:
    """Largest ``v`` in (0, 1/2] with ``delta/2 * I(v/2)/(v/2) >= 1``.

    ``I/id`` is nonincreasing for a regular concave minorant, so the
    feasible set is an interval starting at 0 and bisection (on ``log v``,
    so that tiny thresholds resolve to full relative precision) finds its
    end.  Returns 1/2 if the condition holds at 1/2 and 0 if it fails for
    every ``v >= 2e-300`` (the smallest ``v`` whose half is not clipped).
    """
    _require_regular_concave(minorant)
    if not delta > 0:
        raise InvalidArgument("delta must be positive")

    def holds(v):
        return 0.5 * delta * minorant.ratio(0.5 * v) >= 1.0

    if holds(0.5):
        return 0.5
    v_min = 2.0 * P_MIN
    if not holds(v_min):
        return 0.0
    lo, hi = math.log(v_min), math.log(0.5)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if holds(math.exp(mid)):
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14:
            break
    return math.exp(lo)


def _log_integral(fn_of_x, lo, hi):
    """``int_lo^hi fn(x) dx`` evaluated as ``int fn(e^t) e^t dt``."""
    if not lo < hi:
        return 0.0

    def integrand(t):
        x = np.exp(t)
        return fn_of_x(x) * x

    return adaptive_quadrature(integrand, math.log(lo), math.log(hi), rel_tol=QUAD_REL_TOL)


def mixing_time_profile_bound(phi_profile: Callable, phi_star: float, u0: float,
                              eps_mix: float) -> float:
    """Real-valued step budget from a conductance-profile lower bound."""
    _check_eps_mix(eps_mix)
    _check_u0(u0)
    if not phi_star > 0:
        raise InvalidArgument("phi_star must be positive")
    integral = 0.0
    if u0 > 8.0:
        profile = np.vectorize(phi_profile, otypes=[float])
        integral = _log_integral(lambda v: 1.0 / (v * profile(v) ** 2), 4.0 / u0, 0.5)
    tail = math.log(max(min(u0, 8.0) / eps_mix, 1.0)) / phi_star ** 2
    return 2.0 + 4.0 * integral + tail


def mixing_time_profile(phi_profile: Callable, phi_star: float, u0: float, eps_mix: float) -> int:
    """Integer number of steps sufficient for ``chi^2 <= eps_mix``."""
    return math.ceil(mixing_time_profile_bound(phi_profile, phi_star, u0, eps_mix))


def _report_mixing(report: BoundReport, terms):
    terms = tuple(float(t) for t in terms)
    bound = 2.0 + math.fsum(terms)
    report.mixing_phase_terms = terms
    report.mixing_bound = bound
    report.mixing_n = math.ceil(bound) if math.isfinite(bound) else None
    return report


def mixing_time_iso(minorant: IsoMinorant, cc: CloseCoupling, u0: float, eps_mix: float) -> BoundReport:
    """Three-phase mixing budget from an isoperimetric minorant and a close coupling."""
    _require_regular_concave(minorant)
    _check_eps_mix(eps_mix)
    _check_u0(u0)
    eps, delta = cc.eps, cc.delta
    vs = v_star(minorant, delta)
    i_quarter = minorant(0.25)

    far = 0.0
    if vs > 0 and u0 > 0:
        far = 2.0 ** 6 / eps ** 2 * max(math.log(u0) + math.log(vs) - LOG4, 0.0)

    lo = max(min(2.0 / u0, 0.25) if u0 > 0 else 0.25, 0.5 * vs)
    integral = _log_integral(lambda xi: xi / minorant(xi) ** 2, lo, 0.25)
    profile = 2.0 ** 8 / (eps ** 2 * delta ** 2) * integral

    gap_term = (2.0 ** 4 * max(1.0, 0.25 / (delta ** 2 * i_quarter ** 2)) / eps ** 2
                * math.log(max(min(u0, 8.0) / eps_mix, 1.0)))

    phi = conductance_star_lower(minorant, cc)
    report = BoundReport(
        phi_star_lower=phi, gap_lower=0.5 * phi ** 2, v_star=vs,
        inputs={"minorant": minorant.label, "metric": cc.metric_tag, "delta": delta,
                "eps": eps, "u0": u0, "eps_mix": eps_mix},
    )
    return _report_mixing(report, (far, profile, gap_term))


# --------------------------------------------------------------------------
# random-walk Metropolis


def rwm_sigma(L: float, d: int, varsigma: float) -> float:
    """Proposal scale ``varsigma / sqrt(L d)``."""
    return varsigma / math.sqrt(L * d)


def _check_mL(m, L):
    if not (m > 0 and L > 0):
        raise InvalidArgument("m and L must be positive")
    if m > L:
        raise InvalidArgument("need m <= L")


def _check_positive(**kw):
    for name, value in kw.items():
        if not (value > 0 and math.isfinite(value)):
            raise InvalidArgument(f"{name} must be positive and finite, got {value!r}")


def rwm_alpha0_lower_general(psi: Callable, sigma: float, d: int) -> float:
    """Acceptance floor ``exp(-E psi(sigma R_d)) / 2`` for chi-distributed ``R_d``.

    ``psi`` bounds the second-order remainder of ``U`` as a function of the
    step length; it should accept numpy arrays.
    """
    _check_positive(sigma=sigma)

    def h(r):
        try:
            return np.asarray(psi(sigma * r), dtype=np.float64) * np.ones_like(r)
        except TypeError:
            return np.array([psi(sigma * ri) for ri in np.atleast_1d(r)], dtype=np.float64)

    return 0.5 * math.exp(-chi_expectation(h, int(d), rel_tol=QUAD_REL_TOL))


def rwm_alpha0_lower(L: float, sigma: float, d: int) -> float:
    _check_positive(L=L, sigma=sigma)
    return 0.5 * math.exp(-0.5 * L * sigma * sigma * d)


def rwm_close_coupling(alpha0: float, sigma: float) -> CloseCoupling:
    if not 0.0 < alpha0 <= 1.0:
        raise InvalidArgument("alpha0 must lie in (0, 1]")
    return CloseCoupling(EUCLIDEAN, alpha0 * sigma, 0.5 * alpha0)


def rwm_lower_bounds_general(alpha0: float, sigma: float, minorant: IsoMinorant) -> BoundPair:
    """Conductance and gap floors for any acceptance floor and minorant."""
    phi = 0.125 * alpha0 * min(1.0, 2.0 * alpha0 * sigma * minorant(0.25))
    return BoundPair(phi, 0.5 * phi * phi)


def rwm_lower_bounds(m: float, L: float, d: int, varsigma: float) -> BoundPair:
    """Dimension- and condition-number-explicit floors under the scaling ``rwm_sigma``."""
    _check_mL(m, L)
    _check_positive(d=d, varsigma=varsigma)
    kd = L / m * d
    phi = C_GAMMA / 16.0 * varsigma * math.exp(-varsigma ** 2) / math.sqrt(kd)
    gap = C_GAMMA ** 2 / 512.0 * varsigma ** 2 * math.exp(-2.0 * varsigma ** 2) / kd
    return BoundPair(phi, gap)


def rwm_upper_bounds(m: float, L: float, d: int, sigma: float) -> BoundPair:
    """Ceilings on conductance and spectral gap.

    ``phi_star`` uses ``2 sqrt(L) sigma``; ``alt_phi_star`` carries the looser
    ``4 sqrt(L) sigma`` variant for comparison.
    """
    _check_mL(m, L)
    _check_positive(d=d, sigma=sigma)
    decay = math.exp(-0.5 * d * math.log1p(m * sigma * sigma))
    phi = min(2.0 * math.sqrt(L) * sigma, decay)
    gap = min(0.5 * L * sigma * sigma, decay)
    return BoundPair(phi, gap, alt_phi_star=min(4.0 * math.sqrt(L) * sigma, decay))


def rwm_asvar_bounds(varsigma: float, kappa: float, d: int, f_norm_sq: float) -> tuple[float, float]:
    """``(upper, linear_lower)`` on the asymptotic variance of ergodic averages."""
    _check_positive(varsigma=varsigma, kappa=kappa, d=d, f_norm_sq=f_norm_sq)
    s2 = varsigma ** 2
    upper = 2.0 ** 10 / C_GAMMA ** 2 / s2 * math.exp(2.0 * s2) * kappa * d * f_norm_sq
    lower = 2.0 / s2 * d * f_norm_sq
    return upper, lower


def _loglog_ratio(u0, log_two_over_v):
    """``log(log(min(max(u0/2, 4), 2/v)) / log 4)``, given ``log(2/v)``."""
    log_arg = min(max(math.log(0.5 * u0), LOG4) if u0 > 0 else LOG4, log_two_over_v)
    return math.log(log_arg / LOG4)


def _far_term(u0, log_v):
    if u0 <= 0:
        return 0.0
    return max(math.log(u0) + log_v - LOG4, 0.0)


def _three_variants(variant, *, alpha0, spread, kd_eff, varsigma, u0, eps_mix, printed,
                    c3_printed_v1, extra_v1_factor=1.0, v3_inner=None):
    """Shared arithmetic for the RWM and pCN closed forms.

    ``spread`` is ``1 / (delta^2 * (I(1/4)/C_gamma)^2 / alpha0^2)``, i.e.
    ``sigma^-2 m^-1`` for RWM and ``rho^2 / eta^2`` for pCN.  ``kd_eff`` is
    ``kappa d`` or ``L Tr C``.
    """
    s2 = varsigma ** 2
    log_min = math.log(max(min(u0, 8.0) / eps_mix, 1.0))
    if variant == 1:
        x = 4.0 / C_ELL ** 2 * spread / alpha0 ** 2
        log_v = min(math.log(0.5), math.log(2.0) - x)
        t1 = 2.0 ** 8 / alpha0 ** 2 * _far_term(u0, log_v)
        t2 = 2.0 ** 10 / C_ELL ** 2 / alpha0 ** 4 * spread * _loglog_ratio(u0, math.log(2.0) - log_v)
        c3 = c3_printed_v1 if printed else 2.0 ** 6
        t3 = (c3 * max(1.0, 0.25 / C_GAMMA ** 2 / alpha0 ** 2 * spread) / alpha0 ** 2
              * extra_v1_factor * log_min)
        return (t1, t2, t3), math.exp(log_v)
    a = math.exp(s2) / s2 * kd_eff  # exp(varsigma^2) varsigma^-2 kappa d
    c3 = 2.0 ** 6 if printed else 2.0 ** 8
    t3_coef = c3 / C_GAMMA ** 2 * math.exp(s2) * a
    t2_coef = 2.0 ** 14 / C_ELL ** 2 * math.exp(s2) * a
    if variant == 2:
        x = 16.0 / C_ELL ** 2 * a
        log_v = min(math.log(0.5), math.log(2.0) - x)
        t1 = 2.0 ** 10 * math.exp(s2) * _far_term(u0, log_v)
        t2 = t2_coef * _loglog_ratio(u0, math.log(2.0) - log_v)
        return (t1, t2, t3_coef * log_min), math.exp(log_v)
    if variant == 3:
        t1 = 2.0 ** 10 * math.exp(s2) * math.log(max(u0, 1.0))
        t2 = t2_coef * v3_inner
        t3 = t3_coef * math.log(8.0 / eps_mix)
        return (t1, t2, t3), None
    raise InvalidArgument("variant must be 1, 2 or 3")


def rwm_mixing_time(m: float, L: float, d: int, varsigma: float, u0: float, eps_mix: float,
                    variant: int = 1, printed: bool = False, proof_form: bool = False) -> BoundReport:
    """Closed-form mixing budgets for RWM with ``sigma = varsigma / sqrt(L d)``.

    Variants 1 to 3 are successively weaker.  By default the gap-phase
    prefactors are the ones obtained by substituting ``eps = alpha0 / 2`` in
    the general three-phase bound (``2^6`` in variant 1, ``2^8`` in variants
    2 and 3); ``printed=True`` switches to the smaller published prefactors
    (``2^4`` and ``2^6``).  ``proof_form=True`` multiplies the variant-1 gap
    phase by ``sigma^-2``.
    """
    _check_mL(m, L)
    _check_positive(d=d, varsigma=varsigma)
    _check_eps_mix(eps_mix)
    _check_u0(u0)
    sigma = rwm_sigma(L, d, varsigma)
    alpha0 = rwm_alpha0_lower(L, sigma, d)
    kd = L / m * d
    v3_inner = math.log(16.0 / C_ELL ** 2 / varsigma ** 2) + math.log(kd) + varsigma ** 2
    terms, v_circ = _three_variants(
        variant, alpha0=alpha0, spread=1.0 / (sigma * sigma * m), kd_eff=kd, varsigma=varsigma,
        u0=u0, eps_mix=eps_mix, printed=printed, c3_printed_v1=2.0 ** 4,
        extra_v1_factor=1.0 / sigma ** 2 if proof_form else 1.0, v3_inner=v3_inner,
    )
    lower = rwm_lower_bounds(m, L, d, varsigma)
    upper = rwm_upper_bounds(m, L, d, sigma)
    report = BoundReport(
        phi_star_lower=lower.phi_star, phi_star_upper=upper.phi_star,
        gap_lower=lower.gap, gap_upper=upper.gap, alpha0_lower=alpha0, v_star=v_circ,
        inputs={"kernel": "rwm", "m": m, "L": L, "d": d, "kappa": L / m, "varsigma": varsigma,
                "sigma": sigma, "u0": u0, "eps_mix": eps_mix, "variant": variant,
                "printed": printed, "proof_form": proof_form},
        extras={"phi_star_upper_4": upper.alt_phi_star},
    )
    return _report_mixing(report, terms)


# --------------------------------------------------------------------------
# warm starts and proposal continuity


def warm_start_u0(kind: str, **params) -> float:
    """Upper bound on ``chi^2(mu, pi)`` for the supported initial laws.

    Keyword arguments by kind:
        gaussian-mode: ``kappa``, ``d`` (``mu = N(x*, I/L)``).
        accepted-proposal: ``varsigma``, ``kappa``, ``d``, ``L``, ``dist_sq``
            (squared distance from the start point to the mode).
        pcn-gaussian: ``L``, ``trace_c``.

    A bound beyond the double range is returned as ``inf``.
    """
    try:
        if kind == "gaussian-mode":
            log_u = 0.5 * params["d"] * math.log(params["kappa"])
            return math.exp(log_u) if log_u < 709.0 else math.inf
        if kind == "accepted-proposal":
            s2 = params["varsigma"] ** 2
            kd = params["kappa"] * params["d"]
            log_u = (math.log(2.0) + 0.5 * s2 + 0.5 * params["d"] * math.log(kd / s2)
                     + 0.5 * params["L"] * params["dist_sq"])
            return math.exp(log_u) if log_u < 709.0 else math.inf
        if kind == "pcn-gaussian":
            log_u = 0.5 * params["L"] * params["trace_c"]
            return math.exp(log_u) if log_u < 709.0 else math.inf
    except KeyError as exc:
        raise InvalidArgument(f"warm start {kind!r} needs parameter {exc.args[0]!r}") from None
    raise InvalidArgument(f"unknown warm-start kind {kind!r}")


def tv_proposal_bound(kind: str, displacement: float, sigma: float | None = None,
                      rho: float | None = None, eta: float | None = None) -> float:
    """Pinsker bound on the TV distance between proposals from two states."""
    if displacement < 0:
        raise InvalidArgument("displacement must be nonnegative")
    if kind == "rwm":
        _check_positive(sigma=sigma)
        return min(1.0, displacement / (2.0 * sigma))
    if kind == "pcn":
        _check_positive(rho=rho, eta=eta)
        return min(1.0, 0.5 * rho / eta * displacement)
    raise InvalidArgument(f"unknown kernel kind {kind!r}")


def gauss_sandwich(target: TargetSpec, x) -> tuple[float, float]:
    """Gaussian lower/upper envelopes on the normalised target density at ``x``."""
    m, L, d = target.m, target.L, target.d
    if not m > 0:
        raise InvalidArgument("gauss_sandwich needs m > 0")
    r2 = float(np.sum((np.asarray(x, dtype=np.float64) - target.mode) ** 2))
    log_lo = 0.5 * d * math.log(m / L) + 0.5 * d * math.log(L / (2.0 * math.pi)) - 0.5 * L * r2
    log_hi = 0.5 * d * math.log(L / m) + 0.5 * d * math.log(m / (2.0 * math.pi)) - 0.5 * m * r2
    return math.exp(log_lo), math.exp(log_hi)


# --------------------------------------------------------------------------
# preconditioned Crank-Nicolson


def pcn_eta(L: float, trace_c: float, varsigma: float) -> float:
    """Step size ``varsigma / sqrt(L Tr C)``."""
    return varsigma / math.sqrt(L * trace_c)


def pcn_alpha0_lower(L: float, eta: float, trace_c: float) -> float:
    if not 0.0 < eta < 1.0:
        raise InvalidArgument("eta must lie in (0, 1)")
    if L < 0 or not trace_c > 0:
        raise InvalidArgument("need L >= 0 and Tr C > 0")
    return 0.5 * math.exp(-0.5 * L * eta * eta * trace_c)


def _check_rho_eta(rho, eta):
    if not (0.0 < rho < 1.0 and 0.0 < eta < 1.0):
        raise InvalidArgument("rho and eta must lie in (0, 1)")
    if abs(rho * rho + eta * eta - 1.0) > 1e-12:
        raise InvalidArgument("need rho^2 + eta^2 = 1")


def pcn_close_coupling(alpha0: float, rho: float, eta: float) -> CloseCoupling:
    _check_rho_eta(rho, eta)
    if not 0.0 < alpha0 <= 1.0:
        raise InvalidArgument("alpha0 must lie in (0, 1]")
    return CloseCoupling(COV_WEIGHTED, alpha0 * eta / rho, 0.5 * alpha0)


def _check_pcn_varsigma(L, trace_c, varsigma):
    _check_positive(L=L, trace_c=trace_c, varsigma=varsigma)
    if not varsigma < math.sqrt(L * trace_c):
        raise InvalidArgument("varsigma must lie in (0, sqrt(L Tr C)) so that eta < 1")


def pcn_lower_bounds(L: float, trace_c: float, varsigma: float) -> BoundPair:
    """Conductance and gap floors; they depend on ``C`` only through ``Tr C``."""
    _check_pcn_varsigma(L, trace_c, varsigma)
    eta = pcn_eta(L, trace_c, varsigma)
    alpha0 = pcn_alpha0_lower(L, eta, trace_c)
    phi = 0.25 * C_GAMMA * alpha0 ** 2 * eta
    gap = C_GAMMA ** 2 / 32.0 * alpha0 ** 4 * eta ** 2
    return BoundPair(phi, gap)


def pcn_optimized_gap_floor(kappa_tilde: float) -> float:
    """Gap floor at the best ``varsigma^2 = 1/2``: ``2^-10 C_gamma^2 e^-1 / (L Tr C)``."""
    _check_positive(kappa_tilde=kappa_tilde)
    return C_GAMMA ** 2 / 1024.0 / math.e / kappa_tilde


def pcn_step_size_infimum(kappa_tilde: float) -> float:
    """``inf over eta in (0,1) of exp(eta^2 kappa_tilde) / eta^2``."""
    _check_positive(kappa_tilde=kappa_tilde)
    return math.exp(kappa_tilde) if kappa_tilde <= 1.0 else kappa_tilde * math.e


def pcn_mixing_time(L: float, trace_c: float, varsigma: float, u0: float, eps_mix: float,
                    variant: int = 1, printed: bool = False) -> BoundReport:
    """Closed-form mixing budgets for pCN with ``eta = varsigma / sqrt(L Tr C)``.

    Prefactor conventions match :func:`rwm_mixing_time`; the published
    variant-1 gap-phase prefactor already equals the derived one.
    """
    _check_pcn_varsigma(L, trace_c, varsigma)
    _check_eps_mix(eps_mix)
    _check_u0(u0)
    kt = L * trace_c
    eta = pcn_eta(L, trace_c, varsigma)
    rho = math.sqrt(1.0 - eta * eta)
    alpha0 = pcn_alpha0_lower(L, eta, trace_c)
    v3_inner = math.log(16.0 / C_ELL ** 2 / varsigma ** 2 * kt) + varsigma ** 2
    terms, v_circ = _three_variants(
        variant, alpha0=alpha0, spread=(rho / eta) ** 2, kd_eff=kt, varsigma=varsigma,
        u0=u0, eps_mix=eps_mix, printed=printed, c3_printed_v1=2.0 ** 6, v3_inner=v3_inner,
    )
    lower = pcn_lower_bounds(L, trace_c, varsigma)
    report = BoundReport(
        phi_star_lower=lower.phi_star, gap_lower=lower.gap, alpha0_lower=alpha0, v_star=v_circ,
        inputs={"kernel": "pcn", "L": L, "trace_c": trace_c, "kappa_tilde": kt,
                "varsigma": varsigma, "eta": eta, "rho": rho, "u0": u0, "eps_mix": eps_mix,
                "variant": variant, "printed": printed},
    )
    return _report_mixing(report, terms)
