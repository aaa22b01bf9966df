import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamard_kit.errors import UndefinedProduct, UnrepresentableSet
from hadamard_kit.sphere_sets import (
    FULL_ARC,
    INF,
    INFINITY,
    ZERO,
    Arc,
    LogPolarBox,
    SpherePoint,
    StarSet,
    clusters,
    convolvable,
    ext_mul,
    is_proper,
    point_set,
    preset,
    sample_set,
    set_difference,
    set_inverse,
    set_product,
    set_scale,
    sphere_inv,
    starset_from_record,
    strongly_convolvable,
    thicken,
)


def test_extended_product_domain():
    assert ext_mul(INFINITY, SpherePoint.finite(2)) == INFINITY
    assert ext_mul(SpherePoint.finite(2), SpherePoint.finite(3j)).value == 6j
    with pytest.raises(UndefinedProduct):
        ext_mul(ZERO, INFINITY)
    with pytest.raises(UndefinedProduct):
        ext_mul(INFINITY, ZERO)
    assert sphere_inv(ZERO) == INFINITY
    assert sphere_inv(INFINITY) == ZERO


def test_negative_ray_squared_is_positive_ray():
    r = preset("ray(pi,1)")
    p = set_product(r, r)
    assert len(p.boxes) == 1
    b = p.boxes[0]
    assert (b.rho_lo, b.rho_hi) == (0.0, INF)
    assert b.arc.width == 0.0 and b.arc.theta_lo == 0.0


def test_disk_complements_multiply_radii():
    p = set_product(preset("disk_complement(2)"), preset("disk_complement(3)"))
    assert p.boxes[0].rho_lo == pytest.approx(math.log(6), abs=1e-15)
    assert p.boxes[0].arc.full and p.closure_has_inf


def test_inverse_and_scale():
    s = preset("segment0(0,1)")
    inv = set_inverse(s)
    assert inv.contains(2.0) and not inv.contains(0.5)
    sc = set_scale(2j, preset("ray(0,1)"))
    assert sc.contains(3j) and not sc.contains(1j) and not sc.contains(3.0)


def test_unrepresentable_presets():
    with pytest.raises(UnrepresentableSet):
        preset("factorial(2)")


def test_record_round_trip():
    rec = {"boxes": [{"rho": ["-inf", 0.5], "arc": [0.1, 0.7]}, {"rho": [1, "+inf"], "arc": "full"}]}
    s = starset_from_record(rec)
    assert s.closure_has_zero and s.closure_has_inf and not s.compact
    again = starset_from_record(s.to_record())
    assert again.boxes == s.boxes


def test_point_set_contains_only_the_point():
    s = point_set(1 + 1j)
    assert s.contains(1 + 1j)
    assert not s.contains(1 + 1.01j)


def test_properness():
    assert is_proper(preset("ray(0,1)"))
    # a full-angle box touching both 0 and oo is not proper
    assert not is_proper(StarSet((LogPolarBox(-INF, INF, FULL_ARC),)))


def test_strong_convolvability_rejects_zero_infinity_pairing():
    a = preset("segment0(0,1)")
    b = preset("ray(0,1)")
    assert not strongly_convolvable(a, b)
    assert strongly_convolvable(a, a)
    assert convolvable(preset("ray(pi,1)"), preset("ray(pi,1)"))


def test_thicken_and_difference():
    s = preset("point(1,0)")
    t = thicken(s, 0.1)
    assert t.contains(math.exp(0.09)) and not t.contains(math.exp(0.11))
    annulus = StarSet((LogPolarBox(-1.0, 1.0, FULL_ARC),))
    hole = StarSet((LogPolarBox(-0.5, 0.5, FULL_ARC),))
    d = set_difference(annulus, hole)
    assert d.contains(math.exp(0.8)) and d.contains(math.exp(-0.8))
    assert not d.contains(1.0)


def test_clusters_split_far_pieces():
    s = preset("point(2,0)") | preset("point(-3,0)") | preset("point(2.0000001,0)")
    assert len(clusters(s, gap=0.01)) == 2


box_st = st.builds(
    lambda lo, w, t0, tw: LogPolarBox(lo, lo + w, Arc(t0, tw)),
    st.floats(-3, 3), st.floats(0, 2), st.floats(0, 6.28), st.floats(0, 3),
)


@settings(max_examples=40, deadline=None)
@given(box_st, box_st, st.integers(0, 2**31))
def test_product_sampling_soundness(b1, b2, seed):
    rng = np.random.default_rng(seed)
    s1, s2 = StarSet((b1,)), StarSet((b2,))
    p = set_product(s1, s2)
    z = sample_set(s1, 200, rng) * sample_set(s2, 200, rng)
    assert np.all(p.contains(z, 1e-9))


@settings(max_examples=40, deadline=None)
@given(box_st, st.integers(0, 2**31))
def test_inverse_sampling_soundness(b, seed):
    rng = np.random.default_rng(seed)
    s = StarSet((b,))
    z = sample_set(s, 200, rng)
    assert np.all(set_inverse(s).contains(1 / z, 1e-9))
