import math

import mpmath
import numpy as np
import pytest

from hadamard_kit import hadamard as hd
from hadamard_kit.errors import (
    GridOutsideWindow,
    NoMargin,
    NotStronglyConvolvable,
    PointInProduct,
    VanishingAtInfinityViolated,
)
from hadamard_kit.functions import FunctionDef, builtin
from hadamard_kit.sphere_sets import FULL_ARC, Arc, LogPolarBox, StarSet, preset

G2 = FunctionDef.from_text("1/(1-z/2)")
G3 = FunctionDef.from_text("1/(1-z/3)")
L = builtin("log1p")


def annulus(r0, r1):
    return StarSet((LogPolarBox(math.log(r0), math.log(r1), FULL_ARC),))


@pytest.mark.parametrize("z", [0.5, 1j, -2 + 1j, 3 * np.exp(0.4j), 10.0])
def test_geometric_pair(z):
    assert abs(hd.hadamard_at(G2, G3, z) - 1 / (1 - z / 6)) < 1e-10


@pytest.mark.parametrize("z", [0.5, -0.9, 0.3 + 0.6j, -3 + 0.5j, 2.5j, 7 - 1j])
def test_log1p_squared_is_dilog(z):
    want = complex(mpmath.polylog(2, z))
    assert abs(hd.hadamard_at(L, L, z) - want) < 1e-9


def test_point_in_product_is_a_domain_error():
    with pytest.raises(PointInProduct):
        hd.hadamard_at(G2, G3, 6.0)


def test_not_strongly_convolvable():
    f1 = FunctionDef.from_text("1/(z-2)", preset("ray(0,2)"))
    f2 = FunctionDef.from_text("1/(z-0.5)", preset("segment0(0,0.5)"))
    with pytest.raises(NotStronglyConvolvable):
        hd.hadamard_at(f1, f2, 1j)


def test_commutativity_defect():
    f1 = FunctionDef.from_text("1/(z-2)")
    f2 = FunctionDef.from_text("exp(1/z)", preset("punctured_disk(0.5)"))
    assert abs(hd.commutativity_defect(f1, f2, 2.5 + 1j) + 0.5) < 1e-8
    f3 = FunctionDef.from_text("1/(1-2*z)")
    assert abs(hd.commutativity_defect(f1, f3, 2.5 + 1j)) < 1e-9


def test_residue_zero_loop():
    f1 = FunctionDef.from_text("1/(z-2)")
    f2 = FunctionDef.from_text("exp(1/z)")
    assert abs(hd.residue_zero_loop(f1, f2, 3.0, 1e-2) - (-0.5)) < 1e-9


def test_pohlen_matches_generalized():
    f1 = FunctionDef.from_text("1/(z-2)")
    f2 = FunctionDef.from_text("1/(z-3)")
    for z in [1.0, 2j, -4 + 1j]:
        assert abs(hd.pohlen_at(f1, f2, z) - hd.hadamard_at(f1, f2, z)) < 1e-9
        assert abs(hd.pohlen_at(f1, f2, z, ambiguous="acc-") - hd.hadamard_at(f1, f2, z)) < 1e-9


def test_pohlen_requires_vanishing_at_infinity():
    with pytest.raises(VanishingAtInfinityViolated):
        hd.pohlen_at(G2, FunctionDef.from_text("1+1/(z-3)"), 1.0)


def test_eps_independence():
    z = -0.5 + 0.3j
    a = hd.hadamard_eval(L, L, z)
    b = hd.hadamard_eval(L, L, z, eps=a.cycle.eps / 2)
    assert abs(a.value - b.value) < 1e-9
    assert a.cycle.digest() != b.cycle.digest()


def test_grid_matches_pointwise_and_is_deterministic():
    K = annulus(0.3, 0.9)
    grid = [0.7 * np.exp(1j * t) for t in np.linspace(0, 6, 7)]
    r1 = hd.hadamard_grid(L, L, K, grid, threads=3)
    r2 = hd.hadamard_grid(L, L, K, grid)
    assert r1.to_csv() == r2.to_csv()
    for z, v in zip(grid, r1.values):
        assert abs(v - hd.hadamard_at(L, L, z)) < 1e-9 * (1 + abs(v))
    with pytest.raises(GridOutsideWindow):
        hd.hadamard_grid(L, L, K, [2.0])


def test_localized_windows():
    U = annulus(0.1, 3.0)
    V = StarSet((LogPolarBox(-0.2, math.inf, Arc(-0.3, 0.6)),))
    grid = [2.0 * np.exp(1j * t) for t in (0.5, 1.0, 2.0, -2.5)]
    res = hd.localized_product(L, L, U, V, grid)
    for z, v in zip(grid, res.values):
        assert abs(v - complex(mpmath.polylog(2, z))) < 1e-9
    with pytest.raises(NoMargin):
        hd.localized_product(L, L, U, StarSet((LogPolarBox(0.5, math.inf, Arc(-0.3, 0.6)),)), grid)
    with pytest.raises(GridOutsideWindow):
        hd.localized_product(L, L, U, V, [2.0])


def test_class_equality_and_jump():
    li2 = builtin("li2")
    cut = preset("ray(0,1)")
    assert hd.class_equal_mod_entire(li2, lambda t: li2(t) + np.exp(t), cut)
    assert not hd.class_equal_mod_entire(li2, lambda t: 0 * t, cut)
    # adding 1/z changes nothing modulo Hol(C*)
    inv = FunctionDef.from_text("laurent([1],-1)")
    assert hd.class_equal_mod_entire(lambda t: li2(t) + inv(t), li2, cut)
    assert not hd.class_equal_mod_entire(li2, L, cut)
    for x in (1.5, 2.0, 4.0):
        # Li2(x + i0) - Li2(x - i0) = 2 pi i log x, up to O(eps)
        assert abs(hd.jump(li2, x, 1e-7) - 2j * math.pi * math.log(x)) < 1e-5


def test_cohomology_convolution_and_form_sign():
    S = preset("ray(pi,1)")
    c = hd.cohom_convolve(hd.CohomClass(L, S), hd.CohomClass(L, S))
    assert abs(c.rep(0.5) - 0.5822405264650125) < 1e-10
    z = 0.5
    # scaling form coefficients by 1/FORM_SCALE and back reproduces the pointwise product
    dens = hd.form_convolution_density(lambda t: L(t) / hd.FORM_SCALE, lambda t: L(t) / hd.FORM_SCALE, S, S, z)
    assert abs(dens * hd.FORM_SCALE - hd.hadamard_at(L, L, z)) < 1e-10


def test_evaluator_memoizes():
    S = preset("ray(pi,1)")
    ev = hd.ProductEvaluator(L, L, S, S)
    a = ev(np.array([0.5, 0.25j]))
    b = ev(np.array([0.5, 0.25j]))
    assert np.array_equal(a, b)
    K = annulus(0.3, 0.9)
    v = ev.on_compact(K, [0.6, 0.9j])
    assert abs(v[0] - complex(mpmath.polylog(2, 0.6))) < 1e-9
