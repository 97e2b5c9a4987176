"""Globally adaptive Gauss-Kronrod (7/15) quadrature."""

from __future__ import annotations

import heapq
import math

import numpy as np

from .errors import InvalidArgument, NumericalFailure

_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

# 15 abscissae on [-1, 1]: -x0..-x6, 0, x6..x0
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[13, 11, 9]] = _WG[:3]

ABS_FLOOR = 1e-300


def _rule(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    fx = np.asarray(f(mid + half * _NODES), dtype=np.float64)
    if fx.shape != (15,):
        fx = np.broadcast_to(fx, (15,))
    if not np.all(np.isfinite(fx)):
        raise NumericalFailure(f"integrand not finite on [{a}, {b}]")
    kron = half * float(_KW @ fx)
    gauss = half * float(_GW @ fx)
    return kron, abs(kron - gauss)


def adaptive_quadrature(f, a: float, b: float, rel_tol: float = 1e-9,
                        abs_tol: float = ABS_FLOOR, max_intervals: int = 4000,
                        breakpoints=()) -> float:
    """Integrate ``f`` over ``[a, b]``.

    ``f`` must accept a 1-D array of abscissae.  ``b`` may be ``+inf``, in
    which case the tail is mapped onto a finite interval.  Refinement stops
    once the summed Kronrod-Gauss error estimate falls below
    ``rel_tol * |I| + abs_tol``.

    Raises:
        NumericalFailure: if the interval budget is exhausted; the partial
            value is attached as ``.partial``.
    """
    if not a <= b:
        raise InvalidArgument("adaptive_quadrature requires a <= b")
    if a == b:
        return 0.0
    if math.isinf(a):
        raise InvalidArgument("lower limit must be finite")
    if math.isinf(b):
        # x = a + t / (1 - t), t in [0, 1)
        def g(t, _f=f, _a=a):
            t = np.asarray(t)
            return _f(_a + t / (1.0 - t)) / (1.0 - t) ** 2
        a, b = 0.0, 1.0
        breakpoints = ()
    else:
        g = f

    edges = [a] + sorted(x for x in breakpoints if a < x < b) + [b]
    heap = []
    total = 0.0
    err_total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _rule(g, lo, hi)
        total += val
        err_total += err
        heapq.heappush(heap, (-err, lo, hi, val))
    while err_total > rel_tol * abs(total) + abs_tol:
        if len(heap) >= max_intervals:
            raise NumericalFailure(
                f"quadrature did not converge: estimate {total!r}, error {err_total:.3g}",
                partial=total,
            )
        neg_err, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise NumericalFailure("interval collapsed below machine resolution", partial=total)
        v1, e1 = _rule(g, lo, mid)
        v2, e2 = _rule(g, mid, hi)
        total += v1 + v2 - val
        err_total += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
    # re-sum to shed accumulated cancellation in the running total
    return math.fsum(item[3] for item in heap)


def chi_expectation(h, d: int, rel_tol: float = 1e-9) -> float:
    """``E[h(R)]`` for ``R`` chi-distributed with ``d`` degrees of freedom."""
    if d < 1:
        raise InvalidArgument("d must be a positive integer")
    log_norm = (0.5 * d - 1.0) * math.log(2.0) + math.lgamma(0.5 * d)
    mode = math.sqrt(max(d - 1.0, 0.0))
    r_max = mode + 40.0

    def integrand(r):
        r = np.asarray(r, dtype=np.float64)
        with np.errstate(divide="ignore"):
            log_pdf = (d - 1.0) * np.log(r) - 0.5 * r * r - log_norm
        pdf = np.where(r > 0, np.exp(log_pdf), 1.0 / math.exp(log_norm) if d == 1 else 0.0)
        return np.asarray(h(r), dtype=np.float64) * pdf

    points = [p for p in (mode - 5.0, mode, mode + 5.0) if 0.0 < p < r_max]
    return adaptive_quadrature(integrand, 0.0, r_max, rel_tol=rel_tol, breakpoints=points)
