import cmath
import math

import numpy as np
import pytest

from hadamard_kit.cycles import circle_cycle
from hadamard_kit.errors import IntegrandFailure, SingularPoint, ToleranceNotMet
from hadamard_kit.quadrature import circle_integral, integrate_cycle, integrate_segments


def test_polynomial_on_segment_is_exact():
    q = integrate_segments(lambda t: t**3 + 2j * t, [0.0], [2.0])
    assert abs(q.value - (4.0 + 4j)) < 1e-14
    assert q.evaluations == 15


@pytest.mark.parametrize("k", range(-3, 4))
def test_monomials_on_unit_circle(k):
    q = circle_integral(lambda t: t**k, 0, 1.0)
    want = 2j * math.pi if k == -1 else 0
    assert abs(q.value - want) < 1e-12


def test_cauchy_formula():
    q = circle_integral(lambda t: np.exp(t) / (t - 0.3), 0, 1.0)
    assert abs(q.value / (2j * math.pi) - math.exp(0.3)) < 1e-10


def test_reversal_negates_exactly():
    c = circle_cycle(0.1 + 0.2j, 0.7)
    g = lambda t: np.exp(t) / (t - 0.25)
    fwd = integrate_cycle(g, c).value
    back = integrate_cycle(g, c.reversed()).value
    assert fwd == -back


def test_weights_scale_integral():
    a = integrate_segments(np.sin, [0.0], [1.0]).value
    b = integrate_segments(np.sin, [0.0], [1.0], [3.0]).value
    assert abs(b - 3 * a) < 1e-15


def test_near_pole_still_converges():
    # pole at distance 1e-3 from the circle
    pole = 1.001
    q = circle_integral(lambda t: 1 / (t - pole), 0, 1.0, tol=1e-10)
    assert abs(q.value) < 1e-8


def test_singular_integrand_is_located():
    def g(t):
        if np.any(np.abs(t - 1.0) < 1e-2):
            raise SingularPoint("hit")
        return t
    with pytest.raises(IntegrandFailure) as info:
        integrate_segments(g, [0.0, 0.5], [0.5, 1.0])
    assert info.value.location == (0.5 + 0j, 1 + 0j)


def test_unreachable_tolerance_raises():
    g = lambda t: np.abs(t - 0.37) ** -0.9 + 0j
    with pytest.raises(ToleranceNotMet):
        integrate_segments(g, [0.0], [1.0], tol=1e-14, max_depth=4)


def test_residue_theorem_battery():
    rng = np.random.default_rng(7)
    for _ in range(20):
        poles = rng.uniform(-0.8, 0.8, 3) + 1j * rng.uniform(-0.8, 0.8, 3)
        res = rng.normal(size=3) + 1j * rng.normal(size=3)
        g = lambda t, p=poles, r=res: sum(rk / (t - pk) for rk, pk in zip(r, p))
        q = circle_integral(g, 0, 1.5)
        assert abs(q.value - 2j * math.pi * res.sum()) < 1e-12 * (1 + abs(res).sum())
    assert cmath.isclose(circle_integral(lambda t: 1 / t, 0, 2.0, orientation=-1).value, -2j * math.pi)
