import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamard_kit import cycles as cy
from hadamard_kit.errors import NoMargin, PointInProduct, PointOnCycle
from hadamard_kit.sphere_sets import point_set, preset, sample_set
from hadamard_kit.verify import random_spec


def test_circle_winding_numbers():
    c = cy.circle_cycle(0.5, 1.0)
    assert list(cy.winding_numbers(c, [0.5, 1.0, 3.0, -2j])) == [1, 1, 0, 0]
    assert cy.winding_number(c.reversed(), 0.5) == -1
    assert cy.winding_number(-c, 0.5) == -1


def test_point_on_cycle_is_rejected():
    c = cy.circle_cycle(0, 1.0, max_arc_step=math.pi / 2)
    with pytest.raises(PointOnCycle):
        cy.winding_numbers(c, [1.0])


def test_cycle_sum_adds_windings():
    a = cy.circle_cycle(0, 1.0)
    b = cy.circle_cycle(0, 3.0, orientation=2)
    pts = [0.5, 2.0, 10.0]
    assert list(cy.winding_numbers(a + b, pts)) == [3, 2, 0]


def test_path_validation():
    with pytest.raises(ValueError):
        cy.Path(np.array([1, 2]))
    with pytest.raises(ValueError):
        cy.Path(np.array([1, 0, 1j]))
    with pytest.raises(ValueError):
        cy.Cycle(((cy.circle_path(0, 1), 0),))


def test_record_round_trip_and_digest():
    c = cy.circle_cycle(1 + 1j, 0.5) + cy.circle_cycle(-2, 0.3, orientation=-1)
    again = cy.Cycle.from_record(c.to_record())
    assert again.digest() == c.digest()
    assert c.n_vertices == again.n_vertices


@pytest.mark.parametrize("name,expected", [
    ("point(2,0)", (-1, 0, 0)),          # bounded S1
    ("ray(pi,1)", (0, 1, 1)),            # S1 reaches oo
    ("segment0(0,1)", (-1, 0, -1)),      # S1 reaches 0
])
def test_hadamard_lambda(name, expected):
    assert cy.hadamard_lambda(preset(name)) == expected


def test_geometric_pair_cycle_windings():
    S1, S2 = point_set(2), point_set(3)
    spec = cy.hadamard_winding_spec(S1, S2, 1.0)
    c = cy.synthesize_cycle(spec)
    assert cy.certify(c, spec).ok
    assert list(cy.winding_numbers(c, [2.0, 1 / 3, spec.zero_probe, spec.far_probe])) == [-1, 0, 0, 0]


def test_dilog_cycle_windings():
    S = preset("ray(pi,1)")
    spec = cy.hadamard_winding_spec(S, S, 0.5)
    c = cy.synthesize_cycle(spec)
    rep = cy.certify(c, spec)
    assert rep.ok and rep.n_probes >= 64
    # S1 = (-oo,-1]: winding 0; z S2^-1 = [-1/2, 0): winding 1, as is 0 itself
    assert list(cy.winding_numbers(c, [-3.0, -0.25, -0.01])) == [0, 1, 1]


def test_point_in_product_and_margin():
    S1, S2 = point_set(2), point_set(3)
    with pytest.raises(PointInProduct):
        cy.hadamard_winding_spec(S1, S2, 6.0)
    with pytest.raises(NoMargin):
        cy.hadamard_winding_spec(S1, S2, 6.0 * math.exp(1e-7))
    spec = cy.hadamard_winding_spec(S1, S2, 1.0)
    with pytest.raises(NoMargin):
        cy.synthesize_cycle(spec, eps=10.0)


def test_shared_cycle_needs_compact_k():
    S = preset("ray(pi,1)")
    with pytest.raises(NoMargin):
        cy.shared_cycle(S, S, preset("disk_complement(2)"))


def test_pohlen_cells():
    S = preset("ray(pi,1)")
    assert cy.pohlen_cell(S, S) == "cc+"
    assert cy.pohlen_cell(point_set(2), point_set(3)) == "cc+|acc-"
    assert cy.pohlen_cell(preset("ray(0,2)"), point_set(3)) == "cc+"
    assert cy.pohlen_cell(preset("segment0(0,0.5)"), point_set(3)) == "acc-"
    spec = cy.pohlen_winding_spec(point_set(2), point_set(3), 1.0, ambiguous="acc-")
    assert spec.zero_winding == -1 and spec.windings == (-1, 0)


def test_eps_choice_does_not_change_windings():
    S = preset("ray(pi,1)")
    spec = cy.hadamard_winding_spec(S, S, -0.5 + 0.3j)
    a = cy.synthesize_cycle(spec)
    b = cy.synthesize_cycle(spec, eps=a.eps / 2)
    pts, _ = cy.certify_probes(spec)
    assert np.array_equal(cy.winding_numbers(a, pts), cy.winding_numbers(b, pts))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_random_specs_windings_at_sampled_points(seed):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng)
    c = cy.synthesize_cycle(spec)
    assert cy.certify(c, spec).ok
    lo, hi = spec.window
    for region, w in zip(spec.forbidden, spec.windings):
        z = sample_set(region, 50, rng)
        r = np.log(np.abs(z))
        z = z[(r > lo) & (r < hi)]
        assert np.all(cy.winding_numbers(c, z) == w)
    assert cy.winding_number(c, spec.far_probe) == 0
    assert cy.winding_number(c, spec.zero_probe) == spec.zero_winding


@pytest.mark.parametrize("s1,s2,z", [
    ("ray(pi,1)", "ray(pi,1)", 0.5 + 0.2j),        # oo in S1: Cauchy cycle with +1 at 0
    ("segment0(0,0.5)", "point(3,0)", 2j),         # 0 in S1: anti-Cauchy cycle with -1 at 0
])
def test_generalized_spec_agrees_with_table(s1, s2, z):
    S1, S2 = preset(s1), preset(s2)
    a = cy.hadamard_winding_spec(S1, S2, z)
    b = cy.pohlen_winding_spec(S1, S2, z)
    assert a.same_prescription(b)


def test_disk_complement_gives_one_circle():
    spec = cy.make_spec([preset("disk_complement(2)")], [0], 1)
    c = cy.synthesize_cycle(spec)
    ((path, mult),) = c.terms
    assert mult == 1
    assert np.allclose(np.abs(path.vertices), 2 * math.exp(-c.eps), rtol=1e-14)


def test_certify_reports_violations():
    spec = cy.make_spec([point_set(2)], [-1], 0)
    rep = cy.certify(cy.circle_cycle(2, 0.5), spec)
    assert not rep.ok
    assert any(abs(p - 2) < 1e-12 and (want, got) == (-1, 1) for p, want, got in rep.violations)


def test_rounding_residual_far_from_support():
    rng = np.random.default_rng(3)
    S = preset("ray(pi,1)")
    c = cy.synthesize_cycle(cy.hadamard_winding_spec(S, S, 0.5 + 0.5j))
    w = 4 * (rng.uniform(-1, 1, 1000) + 1j * rng.uniform(-1, 1, 1000))
    path = c.terms[0][0]
    keep = cy._segment_distance(path.vertices, np.roll(path.vertices, -1), w) >= 1e-6
    turns = cy._path_turns(path.vertices, w[keep])
    assert np.max(np.abs(turns - np.round(turns))) < 0.25
