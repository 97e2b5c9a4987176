import math

import mpmath as mp
import numpy as np
import pytest

from isomix import adaptive_quadrature, chi_expectation
from isomix.errors import InvalidArgument


def test_loglog_integral_closed_form():
    got = adaptive_quadrature(lambda x: 1.0 / (x * np.log(1.0 / x)), 0.01, 0.25)
    assert got == pytest.approx(math.log(math.log(100) / math.log(4)), abs=1e-12)
    # the often-quoted 1.2005857 is not the value of this integral
    assert abs(got - 1.2005857) > 1e-5


@pytest.mark.parametrize("f, a, b", [
    (np.exp, 0.0, 1.0),
    (lambda x: np.sqrt(x), 0.0, 1.0),
    (lambda x: 1.0 / (1.0 + x * x), -50.0, 50.0),
    (lambda x: np.log(x), 1e-12, 1.0),
])
def test_against_mpmath(f, a, b):
    want = float(mp.quad(lambda t: mp.mpf(float(f(np.array([float(t)]))[0])), [a, (a + b) / 2, b]))
    assert adaptive_quadrature(f, a, b) == pytest.approx(want, rel=1e-8)


def test_empty_and_reversed_interval():
    assert adaptive_quadrature(np.exp, 1.0, 1.0) == 0.0
    with pytest.raises(InvalidArgument):
        adaptive_quadrature(np.exp, 1.0, 0.0)


def test_breakpoints_help_kinks():
    f = lambda x: np.abs(x - 0.3)
    assert adaptive_quadrature(f, 0.0, 1.0, breakpoints=(0.3,)) == pytest.approx(0.29, rel=1e-12)


@pytest.mark.parametrize("d", [1, 2, 5, 20])
def test_chi_expectation_moments(d):
    # E|Z|^2 = d and E 1 = 1 for Z ~ N(0, I_d)
    assert chi_expectation(lambda r: r * r, d) == pytest.approx(d, rel=1e-9)
    assert chi_expectation(lambda r: np.ones_like(r), d) == pytest.approx(1.0, rel=1e-9)
