"""Generalized and Pohlen Hadamard products, class convolution and class tests."""

from __future__ import annotations

import io
import json
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cycles import (
    DEFAULT_MARGIN,
    Cycle,
    hadamard_winding_spec,
    pohlen_cell,
    pohlen_winding_spec,
    shared_cycle,
    synthesize_cycle,
)
from .errors import (
    GridOutsideWindow,
    NoMargin,
    NotStronglyConvolvable,
    UndecidableClass,
    VanishingAtInfinityViolated,
)
from .functions import FunctionDef, eval_function
from .quadrature import DEFAULT_TOL, QuadResult, circle_integral, integrate_cycle
from .sphere_sets import (
    TWO_PI,
    LogPolarBox,
    StarSet,
    clusters,
    set_difference,
    set_product,
    set_separation,
    strongly_convolvable,
    thicken,
)

TWO_PI_I = 2j * math.pi
# a form F dz stands for the function -2 pi i F
FORM_SCALE = -2j * math.pi

Evaluator = Callable[[np.ndarray], np.ndarray]


def _integrand(f1: FunctionDef, f2: FunctionDef, z: complex):
    def g(t):
        return eval_function(f1, t) * eval_function(f2, z / t) / t

    return g


@dataclass(frozen=True)
class PointResult:
    z: complex
    value: complex
    error_estimate: float
    cycle: Cycle = field(repr=False)


def hadamard_eval(
    f1: FunctionDef,
    f2: FunctionDef,
    z: complex,
    tol: float = DEFAULT_TOL,
    eps: float | None = None,
    margin: float = DEFAULT_MARGIN,
) -> PointResult:
    spec = hadamard_winding_spec(f1.singular, f2.singular, z, margin)
    c = synthesize_cycle(spec, eps=eps)
    q = integrate_cycle(_integrand(f1, f2, z), c, tol=tol)
    return PointResult(complex(z), q.value / TWO_PI_I, q.error_estimate / (2 * math.pi), c)


def hadamard_at(f1: FunctionDef, f2: FunctionDef, z: complex, tol: float = DEFAULT_TOL, **kw) -> complex:
    """(f1 * f2)(z) = (1/2 pi i) int_{c_z} f1(t) f2(z/t) dt/t over a generalized Hadamard cycle."""
    return hadamard_eval(f1, f2, z, tol, **kw).value


@dataclass(frozen=True)
class GridResult:
    points: list
    values: list
    cycle_used: Cycle = field(repr=False)
    tolerances: list = field(default_factory=list)

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write("re_z,im_z,re_val,im_val,err_est\n")
        for z, v, e in zip(self.points, self.values, self.tolerances):
            out.write(f"{z.real!r},{z.imag!r},{v.real!r},{v.imag!r},{e!r}\n")
        return out.getvalue()


def _map(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _grid_on_cycle(f1, f2, c: Cycle, grid, tol, threads) -> tuple[list, list]:
    def one(z):
        q = integrate_cycle(_integrand(f1, f2, z), c, tol=tol)
        return q.value / TWO_PI_I, q.error_estimate / (2 * math.pi)

    res = _map(one, list(grid), threads)
    return [complex(v) for v, _ in res], [float(e) for _, e in res]


def hadamard_grid(
    f1: FunctionDef,
    f2: FunctionDef,
    K: StarSet,
    grid: Sequence[complex],
    tol: float = DEFAULT_TOL,
    eps: float | None = None,
    margin: float = DEFAULT_MARGIN,
    threads: int = 1,
) -> GridResult:
    """Values on `grid` from one cycle shared by every z in the compact set K."""
    grid = [complex(z) for z in grid]
    if not grid:
        raise GridOutsideWindow("empty grid")
    outside = [z for z in grid if z == 0 or not K.contains(z, 1e-12)]
    if outside:
        raise GridOutsideWindow(f"grid point {outside[0]!r} lies outside K")
    c = shared_cycle(f1.singular, f2.singular, K, eps=eps, margin=margin)
    values, errs = _grid_on_cycle(f1, f2, c, grid, tol, threads)
    return GridResult(grid, values, c, errs)


def _check_vanishing(f: FunctionDef, which: str) -> None:
    if not f.singular.closure_has_inf and not f.vanishes_at_inf:
        raise VanishingAtInfinityViolated(
            f"{which} = {f.text} must vanish at oo because oo lies in its domain"
        )


def pohlen_eval(
    f1: FunctionDef, f2: FunctionDef, z: complex, tol: float = DEFAULT_TOL,
    ambiguous: str = "cc+", margin: float = DEFAULT_MARGIN,
) -> PointResult:
    S1, S2 = f1.singular, f2.singular
    spec = pohlen_winding_spec(S1, S2, z, margin, ambiguous)
    _check_vanishing(f1, "f1")
    _check_vanishing(f2, "f2")
    c = synthesize_cycle(spec)
    q = integrate_cycle(_integrand(f1, f2, z), c, tol=tol)
    return PointResult(complex(z), q.value / TWO_PI_I, q.error_estimate / (2 * math.pi), c)


def pohlen_at(f1: FunctionDef, f2: FunctionDef, z: complex, tol: float = DEFAULT_TOL, **kw) -> complex:
    """Product over the Cauchy / anti-Cauchy cycle of the 0/oo table."""
    return pohlen_eval(f1, f2, z, tol, **kw).value


def commutativity_defect(f1: FunctionDef, f2: FunctionDef, z: complex, tol: float = DEFAULT_TOL) -> complex:
    return hadamard_at(f1, f2, z, tol) - hadamard_at(f2, f1, z, tol)


def residue_zero_loop(f1: FunctionDef, f2: FunctionDef, z: complex, r: float, tol: float = DEFAULT_TOL) -> complex:
    """(1/2 pi i) times the integral of f1(t) f2(z/t)/t over |t| = r, counterclockwise."""
    q = circle_integral(_integrand(f1, f2, z), 0.0, r, 1, tol=tol)
    return q.value / TWO_PI_I


# ---------------------------------------------------------------------------
# Forms and classes
# ---------------------------------------------------------------------------


def form_convolution_density(F1: Callable, F2: Callable, S1: StarSet, S2: StarSet, z: complex,
                             tol: float = DEFAULT_TOL) -> complex:
    """Coefficient of the convolved form: -int_{c_z} F1(t) F2(z/t) dt/t."""
    spec = hadamard_winding_spec(S1, S2, z)
    c = synthesize_cycle(spec)
    q = integrate_cycle(lambda t: F1(t) * F2(z / t) / t, c, tol=tol)
    return -q.value


class ProductEvaluator:
    """Memoizing evaluator of f1 * f2 (cycles built from the class supports)."""

    def __init__(self, f1, f2, S1: StarSet, S2: StarSet, tol: float = DEFAULT_TOL):
        self.f1, self.f2, self.S1, self.S2, self.tol = f1, f2, S1, S2, tol
        self._points: dict[tuple[complex, float], complex] = {}
        self._grids: dict[tuple[str, float], GridResult] = {}
        self._lock = threading.Lock()

    def _one(self, z: complex) -> complex:
        key = (complex(z), self.tol)
        with self._lock:
            if key in self._points:
                return self._points[key]
        spec = hadamard_winding_spec(self.S1, self.S2, z)
        c = synthesize_cycle(spec)
        v = integrate_cycle(_integrand(self.f1, self.f2, z), c, tol=self.tol).value / TWO_PI_I
        with self._lock:
            self._points[key] = v
        return v

    def __call__(self, z):
        arr = np.asarray(z, dtype=complex)
        out = np.array([self._one(w) for w in arr.ravel()], dtype=complex).reshape(arr.shape)
        return out[()] if out.ndim == 0 else out

    def on_compact(self, K: StarSet, grid) -> np.ndarray:
        """Values on `grid` (inside K) from one shared cycle; memoized per (K, tol)."""
        grid = [complex(z) for z in np.ravel(grid)]
        key = (json.dumps(K.to_record(), sort_keys=True) + repr(grid), self.tol)
        with self._lock:
            hit = self._grids.get(key)
        if hit is None:
            c = shared_cycle(self.S1, self.S2, K)
            values, errs = _grid_on_cycle(self.f1, self.f2, c, grid, self.tol, 1)
            hit = GridResult(grid, values, c, errs)
            with self._lock:
                self._grids[key] = hit
        return np.asarray(hit.values, dtype=complex)


@dataclass(frozen=True, eq=False)
class CohomClass:
    """A class in Hol(C* minus set) / Hol(C*), given by a representative."""

    rep: object
    set: StarSet

    def __post_init__(self):
        if isinstance(self.rep, FunctionDef) and not _covered(self.rep.singular, self.set):
            raise NoMargin(f"representative {self.rep.text} is singular outside the class support")


def _covered(inner: StarSet, outer: StarSet) -> bool:
    return set_difference(inner, thicken(outer, 1e-12)).empty if not inner.empty else True


def cohom_convolve(a: CohomClass, b: CohomClass, tol: float = DEFAULT_TOL) -> CohomClass:
    """[f1] * [f2] = [f1 * f2] on set_product(a.set, b.set)."""
    if not strongly_convolvable(a.set, b.set):
        raise NotStronglyConvolvable("class supports are not strongly convolvable")
    f1 = a.rep if not isinstance(a.rep, CohomClass) else a.rep.rep
    f2 = b.rep if not isinstance(b.rep, CohomClass) else b.rep.rep
    return CohomClass(ProductEvaluator(f1, f2, a.set, b.set, tol), set_product(a.set, b.set))


# ---------------------------------------------------------------------------
# Class equality modulo Hol(C*)
# ---------------------------------------------------------------------------

_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_PANEL = 0.05
_LOOP_GAP = 0.1


@dataclass(frozen=True)
class _Piece:
    """Side of a loop on the cylinder: rho or theta varies linearly."""

    rho0: float
    rho1: float
    th0: float
    th1: float

    def nodes(self):
        length = max(abs(self.rho1 - self.rho0), abs(self.th1 - self.th0))
        n = max(1, math.ceil(length / _PANEL))
        s_lo = np.arange(n) / n
        half = 0.5 / n
        s = (s_lo[:, None] + half * (1 + _GL_X[None, :])).ravel()
        w = np.tile(_GL_W * half, n)
        lw = (self.rho0 + s * (self.rho1 - self.rho0)) + 1j * (self.th0 + s * (self.th1 - self.th0))
        zeta = np.exp(lw)
        dlw = (self.rho1 - self.rho0) + 1j * (self.th1 - self.th0)
        return zeta, w * zeta * dlw  # d zeta = zeta d(log zeta)


def _rect(r0, r1, t0, t1, cuts_lo=(), cuts_hi=()) -> list[_Piece]:
    """CCW rectangle on the cylinder; the rho sides are split at the given angles."""
    def split(ts, a, b):
        pts = [a] + sorted(t for t in ts if a < t < b) + [b]
        return list(zip(pts[:-1], pts[1:]))

    pieces = [_Piece(r0, r1, t0, t0)]
    pieces += [_Piece(r1, r1, a, b) for a, b in split(cuts_hi, t0, t1)]
    pieces.append(_Piece(r1, r0, t1, t1))
    pieces += [_Piece(r0, r0, b, a) for a, b in reversed(split(cuts_lo, t0, t1))]
    return pieces


def _annulus(r0, r1) -> list[_Piece]:
    return [_Piece(r1, r1, 0.0, TWO_PI), _Piece(r0, r0, TWO_PI, 0.0)]


def _arc_hull(boxes: Sequence[LogPolarBox]):
    """Smallest arc (t0, t1) holding every box arc, or None if they surround 0."""
    if any(b.arc.full for b in boxes):
        return None
    spans = []
    for b in boxes:
        lo, hi = b.arc.theta_lo, b.arc.theta_hi
        spans += [(lo, TWO_PI), (0.0, hi - TWO_PI)] if hi > TWO_PI else [(lo, hi)]
    spans.sort()
    merged = [list(spans[0])]
    for lo, hi in spans[1:]:
        if lo <= merged[-1][1] + 1e-12:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    gaps = [(merged[k][1], merged[k + 1][0]) for k in range(len(merged) - 1)]
    gaps.append((merged[-1][1], merged[0][0] + TWO_PI))
    g_lo, g_hi = max(gaps, key=lambda g: g[1] - g[0])
    if g_hi - g_lo <= 1e-12:
        return None
    t0 = g_hi % TWO_PI
    return t0, t0 + TWO_PI - (g_hi - g_lo)


def class_loops(S: StarSet, gap: float = _LOOP_GAP) -> list[list[_Piece]]:
    """Loops around each cluster of S that never wind around 0.

    Unbounded clusters are cut off one unit past their finite data; the cut
    crosses thin rays at loop vertices, so no node sits on S.
    """
    groups = clusters(S, 0.0)
    if len(groups) > 1:
        sep = min(set_separation(a, b) for i, a in enumerate(groups) for b in groups[i + 1:])
        gap = min(gap, sep / 3)
    loops = []
    for g in groups:
        rhos = g.finite_rhos()
        top = max(rhos) if rhos else 0.0
        bottom = min(rhos) if rhos else 0.0
        r1 = top + gap if not g.closure_has_inf else top + 1.0
        r0 = bottom - gap if not g.closure_has_zero else bottom - 1.0
        hull = _arc_hull(g.boxes)
        if hull is None:
            if not g.compact:
                raise UndecidableClass("unbounded cluster wraps around 0; no loop avoids it")
            loops.append(_annulus(r0, r1))
            continue
        t0, t1 = hull[0] - gap, hull[1] + gap
        cut_angles = {}
        for level in (r0, r1):
            crossing = [b for b in g.boxes if b.rho_lo <= level <= b.rho_hi]
            if any(b.arc.width > 1e-12 for b in crossing):
                raise UndecidableClass("an unbounded cluster is too wide where the test loop crosses it")
            cut_angles[level] = [t0 + (b.arc.theta_lo - t0) % TWO_PI for b in crossing]
        loops.append(_rect(r0, r1, t0, t1, cut_angles[r0], cut_angles[r1]))
    return loops


def _eval_on_piece(g, piece: _Piece, zeta: np.ndarray) -> np.ndarray:
    if hasattr(g, "on_compact"):
        r = np.log(np.abs(zeta))
        th = np.unwrap(np.angle(zeta))
        from .sphere_sets import Arc

        K = StarSet((LogPolarBox(float(r.min()), float(r.max()), Arc(float(th.min()), float(th.max() - th.min()))),))
        return g.on_compact(K, zeta)
    return np.asarray(g(zeta), dtype=complex)


def morera_moments(g, h, S: StarSet, moments: int = 4):
    """For each loop: (moments of (g-h) t^k dt for k < moments, max |g-h| on the loop)."""
    out = []
    for loop in class_loops(S):
        mom = np.zeros(moments, dtype=complex)
        peak = 0.0
        for piece in loop:
            zeta, wd = piece.nodes()
            d = _eval_on_piece(g, piece, zeta) - np.asarray(h(zeta), dtype=complex)
            peak = max(peak, float(np.max(np.abs(d))))
            for k in range(moments):
                mom[k] += np.sum(d * zeta**k * wd)
        out.append((mom, peak))
    return out


def class_equal_mod_entire(g, h, S: StarSet, moments: int = 4) -> bool:
    """Morera-moment test: does g - h extend holomorphically across S?"""
    return all(np.all(np.abs(mom) < 1e-7 * (1 + peak)) for mom, peak in morera_moments(g, h, S, moments))


def jump(g, x: float, eps: float) -> complex:
    vals = np.asarray(g(np.array([x + 1j * eps, x - 1j * eps])), dtype=complex)
    return complex(vals[0] - vals[1])


# ---------------------------------------------------------------------------
# Localized products
# ---------------------------------------------------------------------------


def localized_product(
    f1: FunctionDef,
    f2: FunctionDef,
    U: StarSet,
    V: StarSet,
    grid: Sequence[complex],
    tol: float = DEFAULT_TOL,
    margin: float = DEFAULT_MARGIN,
    threads: int = 1,
) -> GridResult:
    """Values on the part of U off V, from one closed cycle for closure(U minus V)."""
    S1, S2 = f1.singular, f2.singular
    if not strongly_convolvable(S1, S2):
        raise NotStronglyConvolvable("singular sets are not strongly convolvable")
    if not U.compact:
        raise GridOutsideWindow("U must have compact closure")
    prod = set_product(S1, S2)
    if not prod.empty and not set_difference(thicken(prod, margin), V).empty:
        raise NoMargin("V must contain a neighbourhood of S1*S2")
    grid = [complex(z) for z in grid]
    for z in grid:
        if z == 0 or not U.contains(z, 1e-12) or V.contains(z, margin):
            raise GridOutsideWindow(f"grid point {z!r} is not in U minus V")
    K = set_difference(U, V)
    c = shared_cycle(S1, S2, K, margin=margin)
    values, errs = _grid_on_cycle(f1, f2, c, grid, tol, threads)
    return GridResult(grid, values, c, errs)


def pohlen_table_cell(f1: FunctionDef, f2: FunctionDef) -> str:
    return pohlen_cell(f1.singular, f2.singular)


__all__ = [
    "CohomClass",
    "FORM_SCALE",
    "GridResult",
    "PointResult",
    "ProductEvaluator",
    "QuadResult",
    "class_equal_mod_entire",
    "class_loops",
    "cohom_convolve",
    "commutativity_defect",
    "form_convolution_density",
    "hadamard_at",
    "hadamard_eval",
    "hadamard_grid",
    "jump",
    "localized_product",
    "morera_moments",
    "pohlen_at",
    "pohlen_eval",
    "residue_zero_loop",
]
