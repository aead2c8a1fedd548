import math

import numpy as np
import pytest
from scipy import integrate

from bloore.quadrature import integrate_1d, integrate_2d


def test_polynomial_exact():
    res = integrate_1d(lambda x: 3 * x**2, 0.0, 2.0)
    assert res.converged and res.value == pytest.approx(8.0, rel=1e-14)
    assert float(res) == res.value


def test_endpoint_singularity():
    res = integrate_1d(lambda x: 1 / np.sqrt(x), 0.0, 1.0, 1e-12, endpoint_sqrt="left")
    assert res.value == pytest.approx(2.0, rel=1e-11)
    res = integrate_1d(lambda x: np.log(x) * np.sqrt(1 - x), 0.0, 1.0, 1e-12, endpoint_sqrt="both")
    ref = integrate.quad(lambda x: math.log(x) * math.sqrt(1 - x), 0, 1, epsabs=1e-14, limit=200)[0]
    assert res.value == pytest.approx(ref, rel=1e-10)


def test_breakpoint_kink():
    f = lambda x: np.minimum(1.0, np.sqrt(x))
    res = integrate_1d(f, 0.0, 4.0, 1e-12, breakpoints=(1.0,), endpoint_sqrt="left")
    assert res.value == pytest.approx(2 / 3 + 3, rel=1e-11)


def test_oscillatory_against_scipy():
    f = lambda x: np.sin(30 * x) * np.exp(-x)
    ref = integrate.quad(lambda x: math.sin(30 * x) * math.exp(-x), 0, 5, limit=500, epsabs=1e-14)[0]
    assert integrate_1d(f, 0.0, 5.0, 1e-11).value == pytest.approx(ref, rel=1e-9)


def test_nonconvergence_is_reported():
    res = integrate_1d(lambda x: np.sin(1 / x), 1e-8, 1.0, 1e-14, max_intervals=20)
    assert not res.converged


def test_2d_disk_area():
    res = integrate_2d(lambda x, y: np.ones_like(x), (-1.0, 1.0),
                       (lambda x: -np.sqrt(1 - x**2), lambda x: np.sqrt(1 - x**2)), 1e-10,
                       endpoint_sqrt=("both", "both"))
    assert res.value == pytest.approx(math.pi, rel=1e-9)
