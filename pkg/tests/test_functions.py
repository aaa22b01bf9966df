import cmath

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hadamard_kit import special
from hadamard_kit.errors import (
    BranchCut,
    CircleMeetsSingularSet,
    InvalidFunctionDef,
    ParseError,
    RejectedExpression,
    SingularPoint,
    UnknownBuiltin,
)
from hadamard_kit.expr import evaluate, parse_expr, to_text
from hadamard_kit.functions import (
    FunctionDef,
    builtin,
    eval_series,
    function_from_record,
    series_hadamard,
    taylor_coeffs,
)
from hadamard_kit.sphere_sets import EMPTY, preset


@pytest.mark.parametrize("text,z,expected", [
    ("1/(1-z/2)", 0.5, 1 / (1 - 0.25)),
    ("-z^2", 2.0, -4.0),
    ("2i*z + 3", 1.0, 3 + 2j),
    ("exp(1/z)", 2.0, cmath.exp(0.5)),
    ("z^-2", 2.0, 0.25),
])
def test_evaluate_matches_python(text, z, expected):
    got = complex(evaluate(parse_expr(text), np.array([z]))[0])
    assert abs(got - expected) < 1e-15


@pytest.mark.parametrize("text,pos", [("1/(1-z", 7), ("z+*2", 3), ("foo(z)", 1), ("", 1)])
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.position == pos


def test_printer_round_trip():
    for text in ["1/(1-z/2)", "exp(1/z) - 3*z", "li2(z)+log1p(-z)", "z^3/(z-2i)"]:
        e = parse_expr(text)
        again = parse_expr(to_text(e))
        z = np.array([0.3 + 0.2j, -0.7 + 0.1j])
        assert np.allclose(evaluate(e, z), evaluate(again, z), rtol=0, atol=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.complex_numbers(max_magnitude=0.95, allow_nan=False, allow_infinity=False))
def test_li2_against_mpmath_in_disk(z):
    want = complex(mpmath.polylog(2, z))
    assert abs(special.li2(np.array([z]))[0] - want) < 1e-13 * (1 + abs(want))


@pytest.mark.parametrize("z", [-3.0, -50 + 1j, 5 + 0.5j, 2 - 3j, 0.99 + 0.2j, 1.2j, -1e3])
def test_li2_against_mpmath_outside(z):
    want = complex(mpmath.polylog(2, z))
    assert abs(special.li2(np.array([z]))[0] - want) < 1e-13 * (1 + abs(want))


def test_log1p_small_argument():
    w = np.array([1e-18, 1e-10 + 1e-10j])
    want = np.array([complex(mpmath.log1p(x)) for x in w])
    assert np.allclose(special.log1p(w), want, rtol=1e-15, atol=0)


def test_branch_cut_points_are_rejected():
    with pytest.raises(SingularPoint):
        builtin("log1p")(-2.0)
    # an undeclared cut is still caught during evaluation
    bare = FunctionDef.from_text("log1p(z)", EMPTY, check=False)
    with pytest.raises(BranchCut):
        bare(-2.0)
    g = FunctionDef.from_text("1/(z-2)")
    with pytest.raises(SingularPoint):
        g(2.0)


def test_unknown_builtin():
    with pytest.raises(UnknownBuiltin):
        builtin("gamma")


def test_singular_set_inferred_from_poles():
    f = FunctionDef.from_text("1/((z-2)*(z+3i))")
    assert f.singular.contains(2.0) and f.singular.contains(-3j)
    assert f.vanishes_at_inf


def test_vanishing_flag_is_checked():
    with pytest.raises(InvalidFunctionDef):
        FunctionDef.from_text("1+1/(z-2)", vanishes_at_inf=True)
    assert FunctionDef.from_text("1/(1-z/2)").vanishes_at_inf


def test_record_with_builtin_singular_preset():
    f = function_from_record({"expr": "log1p(z)", "singular": "preset:log1p"})
    assert f.singular.contains(-2.0) and not f.singular.contains(2.0)


def test_taylor_coefficients_of_geometric_series():
    f = FunctionDef.from_text("1/(1-z/2)")
    a = taylor_coeffs(f, 1.0, 12)
    assert np.allclose(a, 0.5 ** np.arange(13), atol=1e-14)


def test_taylor_circle_must_avoid_singular_set():
    with pytest.raises(CircleMeetsSingularSet):
        taylor_coeffs(FunctionDef.from_text("1/(1-z/2)"), 2.5, 4)


def test_series_hadamard_and_horner():
    a = 0.5 ** np.arange(40)
    b = (1 / 3) ** np.arange(40)
    c = series_hadamard(a, b)
    assert abs(eval_series(c, 1.0) - 1 / (1 - 1 / 6)) < 1e-15
    assert eval_series([1, 2, 3], 2.0) == 17


def test_singular_preset_string():
    f = FunctionDef.from_text("1/(z-2)", preset("ray(0,2)"))
    with pytest.raises(SingularPoint):
        f(5.0)


def test_log_needs_affine_argument():
    f = FunctionDef.from_text("log(2*z+1)")
    assert f.singular.contains(-1.0) and not f.singular.contains(-0.25)
    with pytest.raises(RejectedExpression):
        FunctionDef.from_text("log(z^2+1)")
