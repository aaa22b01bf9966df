"""Holomorphic functions with declared singular sets, and power-series oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import expr as ex
from .errors import (
    CircleMeetsSingularSet,
    InfinityInSingularSet,
    InvalidFunctionDef,
    NoLimit,
    RejectedExpression,
    SingularPoint,
    UnknownBuiltin,
    UnrepresentableSet,
)
from .sphere_sets import (
    EMPTY,
    INF,
    Arc,
    LogPolarBox,
    StarSet,
    normalize,
    starset_from_record,
)

EVAL_TOL = 1e-10
SMOKE_SAMPLES = 256
SMOKE_DISTANCE = 0.05


@dataclass(frozen=True)
class FunctionDef:
    """f in Hol(C* minus singular); `vanishes_at_inf` encodes f(oo) = 0.

    Construction runs a randomized smoke test (evaluation must succeed away
    from `singular`) and, when oo is off the closure of `singular`, checks the
    vanishing flag against the numerical limit.  Pass ``check=False`` to skip.
    """

    expr: ex.Expr
    singular: StarSet = EMPTY
    vanishes_at_inf: bool | None = None
    text: str = ""
    check: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if not self.text:
            object.__setattr__(self, "text", ex.to_text(self.expr))
        if self.check:
            _smoke_test(self)
            _check_vanishing(self)
        elif self.vanishes_at_inf is None:
            object.__setattr__(self, "vanishes_at_inf", False)

    @classmethod
    def from_text(cls, text: str, singular: StarSet | None = None, vanishes_at_inf: bool | None = None, **kw):
        e = ex.parse_expr(text)
        if singular is None:
            singular = infer_singular(e)
        return cls(e, singular, vanishes_at_inf, text, **kw)

    def __call__(self, z):
        return eval_function(self, z)

    def to_record(self) -> dict:
        return {
            "expr": self.text,
            "singular": self.singular.to_record(),
            "vanishes_at_inf": bool(self.vanishes_at_inf),
        }


def eval_function(f: FunctionDef, z, tol: float = EVAL_TOL):
    """Evaluate f at z (scalar or array); points in f.singular raise SingularPoint."""
    arr = np.asarray(z, dtype=complex)
    nz = arr != 0
    if f.singular.boxes and np.any(nz):
        d = np.asarray(f.singular.distance(np.where(nz, arr, 1.0)))
        bad = nz & (d <= tol)
        if np.any(bad):
            w = np.atleast_1d(arr[bad])[0]
            raise SingularPoint(f"{f.text}: z={w!r} lies in the declared singular set {f.singular.label or ''}".rstrip())
    out = ex.evaluate(f.expr, arr, check_cuts=1e-14)
    if not np.all(np.isfinite(out)):
        w = np.atleast_1d(arr[~np.isfinite(out)])[0]
        raise SingularPoint(f"{f.text}: non-finite value at z={w!r}")
    return out[()] if out.ndim == 0 else out


def _smoke_test(f: FunctionDef) -> None:
    rng = np.random.default_rng(12345)
    rhos = f.singular.finite_rhos()
    lo, hi = (min(rhos) - 3.0, max(rhos) + 3.0) if rhos else (-3.0, 3.0)
    z = np.exp(rng.uniform(lo, hi, SMOKE_SAMPLES) + 1j * rng.uniform(-math.pi, math.pi, SMOKE_SAMPLES))
    if f.singular.boxes:
        z = z[np.asarray(f.singular.distance(z)) > SMOKE_DISTANCE]
    try:
        eval_function(f, z)
    except SingularPoint as exc:
        raise InvalidFunctionDef(
            f"{f.text}: evaluation fails away from the declared singular set ({exc}); declare a larger set"
        ) from None


def _check_vanishing(f: FunctionDef) -> None:
    if f.singular.closure_has_inf:
        if f.vanishes_at_inf is None:
            object.__setattr__(f, "vanishes_at_inf", False)
        return
    try:
        v = value_at_infinity(f)
    except NoLimit:
        if f.vanishes_at_inf:
            raise InvalidFunctionDef(f"{f.text}: declared to vanish at oo but has no limit there") from None
        object.__setattr__(f, "vanishes_at_inf", False)
        return
    vanishes = abs(v) < 1e-8
    if f.vanishes_at_inf is None:
        object.__setattr__(f, "vanishes_at_inf", vanishes)
    elif bool(f.vanishes_at_inf) != vanishes:
        raise InvalidFunctionDef(
            f"{f.text}: vanishes_at_inf={f.vanishes_at_inf} contradicts f(oo) = {v:.6g}"
        )


# ---------------------------------------------------------------------------
# Limits at 0 and oo
# ---------------------------------------------------------------------------

_LIMIT_ANGLES = (0.3, 2.1, 4.2)


def _richardson_limit(f: FunctionDef, radii, agree: float) -> complex:
    """f(R) ~ L + c * (R_next / R) along rays; extrapolate pairs and compare."""
    estimates = []
    for theta in _LIMIT_ANGLES:
        direction = complex(math.cos(theta), math.sin(theta))
        try:
            vals = [complex(eval_function(f, r * direction)) for r in radii]
        except SingularPoint as exc:
            raise NoLimit(str(exc)) from None
        e1 = (10 * vals[1] - vals[0]) / 9
        e2 = (10 * vals[2] - vals[1]) / 9
        if not abs(e1 - e2) < agree * max(1.0, abs(e2)):
            raise NoLimit(f"{f.text}: values {vals} do not settle")
        estimates.append(e2)
    spread = max(abs(a - b) for a in estimates for b in estimates)
    if not spread < agree * max(1.0, abs(estimates[0])):
        raise NoLimit(f"{f.text}: limit depends on direction ({estimates})")
    return complex(np.mean(estimates))


def value_at_infinity(f: FunctionDef) -> complex:
    if f.singular.closure_has_inf:
        raise InfinityInSingularSet(f"{f.text}: oo lies in the closure of the singular set")
    rhos = f.singular.finite_rhos()
    base = max(1e4, math.exp(max(rhos) + 3.0)) if rhos else 1e4
    return _richardson_limit(f, (base, 10 * base, 100 * base), 1e-8)


def value_at_zero(f: FunctionDef) -> complex:
    if f.singular.closure_has_zero:
        raise SingularPoint(f"{f.text}: 0 lies in the closure of the singular set")
    rhos = f.singular.finite_rhos()
    base = min(1e-4, math.exp(min(rhos) - 3.0)) if rhos else 1e-4
    return _richardson_limit(f, (base, base / 10, base / 100), 1e-8)


# ---------------------------------------------------------------------------
# Singular sets of builtins and simple expressions
# ---------------------------------------------------------------------------


def _radial_cut(c: complex, d: complex) -> list[LogPolarBox]:
    """Boxes for {(t + c) * d : t >= 0} with c real, d != 0."""
    if abs(c.imag) > 1e-14 * max(1.0, abs(c)):
        raise UnrepresentableSet("branch cut is not radial; declare the singular set explicitly")
    c = c.real
    fwd = float(np.angle(d))
    if c > 0:
        return [LogPolarBox(math.log(c * abs(d)), INF, Arc.point(fwd))]
    if c == 0:
        return [LogPolarBox(-INF, INF, Arc.point(fwd))]
    return [
        LogPolarBox(-INF, math.log(-c * abs(d)), Arc.point(fwd + math.pi)),
        LogPolarBox(-INF, INF, Arc.point(fwd)),
    ]


def _affine(arg: ex.Expr) -> tuple[complex, complex]:
    poly = ex.as_polynomial(arg)
    if poly is None or len(poly) > 2:
        raise RejectedExpression("argument is not affine in z")
    a = poly[0] if poly else 0j
    b = poly[1] if len(poly) > 1 else 0j
    return a, b


def _node_cut(node) -> list[LogPolarBox]:
    if isinstance(node, (ex.LogP, ex.Log1p)):
        a, b = _affine(node.arg)
        if isinstance(node, ex.Log1p):
            a += 1
        if b == 0:
            return []
        # log(a + b z) is cut where a + b z = -t:  z = (t + a) * (-1/b)
        return _radial_cut(a, -1 / b)
    if isinstance(node, ex.Li2):
        a, b = _affine(node.arg)
        if b == 0:
            return []
        # li2(a + b z) is cut where a + b z = 1 + t:  z = (t + 1 - a) / b
        return _radial_cut(1 - a, 1 / b)
    return []


def infer_singular(e: ex.Expr) -> StarSet:
    """Poles of polynomial denominators plus radial branch cuts."""
    boxes: list[LogPolarBox] = []
    for node in ex.walk(e):
        boxes.extend(_node_cut(node))
    for den in ex.denominators(e):
        poly = ex.as_polynomial(den)
        if poly is None:
            if isinstance(den, ex.Exp):
                continue
            raise RejectedExpression(
                f"cannot locate zeros of denominator {ex.to_text(den)}; declare the singular set"
            )
        if len(poly) <= 1:
            continue
        for root in np.roots(poly[::-1]):
            if abs(root) > 1e-14:
                r = math.log(abs(root))
                boxes.append(LogPolarBox(r, r, Arc.point(float(np.angle(root)))))
    return normalize(StarSet(tuple(boxes), "inferred"))


_BUILTIN_EXPR = {
    "log1p": ex.Log1p(ex.Var()),
    "li2": ex.Li2(ex.Var()),
    "log": ex.LogP(ex.Var()),
    "exp": ex.Exp(ex.Var()),
}


def builtin_singular_set(name: str) -> StarSet:
    try:
        node = _BUILTIN_EXPR[name]
    except KeyError:
        raise UnknownBuiltin(f"no builtin named {name!r}; known: {sorted(_BUILTIN_EXPR)}") from None
    return normalize(StarSet(tuple(_node_cut(node)), name))


def builtin(name: str) -> FunctionDef:
    """FunctionDef for a builtin applied to z (log1p, li2, log, exp)."""
    singular = builtin_singular_set(name)
    return FunctionDef(_BUILTIN_EXPR[name], singular, text=f"{name}(z)")


def function_from_record(rec: dict) -> FunctionDef:
    text = rec["expr"]
    sing = rec.get("singular")
    if sing is None or sing == "auto":
        singular = infer_singular(ex.parse_expr(text))
    elif isinstance(sing, str) and sing.startswith("preset:") and sing[7:] in _BUILTIN_EXPR:
        singular = builtin_singular_set(sing[7:])
    else:
        singular = starset_from_record(sing)
    return FunctionDef.from_text(text, singular, rec.get("vanishes_at_inf"))


# ---------------------------------------------------------------------------
# Power series
# ---------------------------------------------------------------------------


def taylor_coeffs(f: FunctionDef, r: float, n: int) -> np.ndarray:
    """a_0..a_n of f at 0 from the trapezoid rule on |z| = r, refined by doubling."""
    log_r = math.log(r)
    for box in f.singular.boxes:
        if box.rho_lo <= log_r + 1e-12:
            raise CircleMeetsSingularSet(
                f"{f.text}: singular set reaches |z| <= {r:g}; the circle must bound a disk of holomorphy"
            )
    m = 8 * (n + 1)
    prev = None
    for _ in range(12):
        w = r * np.exp(2j * np.pi * np.arange(m) / m)
        vals = eval_function(f, w)
        coeffs = np.fft.fft(vals)[: n + 1] / m / r ** np.arange(n + 1)
        if prev is not None and np.max(np.abs(coeffs - prev)) < 1e-12:
            return coeffs
        prev = coeffs
        m *= 2
    raise NoLimit(f"{f.text}: Taylor coefficients did not converge on |z| = {r:g}")


def series_hadamard(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    return a * b


def eval_series(coeffs, z):
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in np.asarray(coeffs)[::-1]:
        acc = acc * z + c
    return acc
