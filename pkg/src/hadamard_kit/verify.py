"""Verification suites shared by the `verify` subcommand and the acceptance tests.

Every suite compares computed values against an independent closed form or
an independent algorithm and records the worst deviation per check.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import cycles as cy
from .functions import FunctionDef, builtin, series_hadamard, taylor_coeffs, eval_series
from .hadamard import (
    CohomClass,
    class_equal_mod_entire,
    cohom_convolve,
    commutativity_defect,
    hadamard_at,
    hadamard_grid,
    jump,
    localized_product,
    pohlen_at,
    residue_zero_loop,
)
from .quadrature import circle_integral, integrate_cycle
from .special import li2
from .sphere_sets import (
    FULL_ARC,
    TWO_PI,
    Arc,
    LogPolarBox,
    StarSet,
    is_proper,
    preset,
    sample_set,
    set_inverse,
    set_product,
    set_scale,
    thicken,
)


@dataclass
class Check:
    name: str
    ok: bool
    delta: float
    tol: float
    detail: str = ""

    def to_record(self) -> dict:
        return {"name": self.name, "ok": self.ok, "delta": self.delta, "tol": self.tol, "detail": self.detail}


@dataclass
class SuiteReport:
    suite: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return bool(self.checks) and all(c.ok for c in self.checks)

    def add(self, name: str, delta: float, tol: float, detail: str = "") -> None:
        delta = float(delta)
        self.checks.append(Check(name, bool(delta < tol), delta, tol, detail))

    def add_flag(self, name: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(ok), 0.0 if ok else 1.0, 0.5, detail))

    def to_record(self) -> dict:
        return {"suite": self.suite, "ok": self.ok, "seconds": self.seconds,
                "checks": [c.to_record() for c in self.checks]}


def _fn(text: str, singular=None) -> FunctionDef:
    return FunctionDef.from_text(text, preset(singular) if isinstance(singular, str) else singular)


def _ring_points(radius: float, n: int, offset: float = 0.37) -> np.ndarray:
    return radius * np.exp(1j * (offset + TWO_PI * np.arange(n) / n))


# ---------------------------------------------------------------------------


def suite_series_oracle(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("series-oracle")
    f1, f2 = _fn("1/(1-z/2)"), _fn("1/(1-z/3)")
    zs = np.concatenate([_ring_points(0.5, 9), _ring_points(1.0, 8), _ring_points(3.0, 8)])
    got = np.array([hadamard_at(f1, f2, z) for z in zs])
    rep.add("closed form 1/(1-z/6) at 25 points", np.max(np.abs(got - 1 / (1 - zs / 6))), 1e-8)
    n = 80
    a, b = taylor_coeffs(f1, 1.5, n), taylor_coeffs(f2, 1.5, n)
    c = series_hadamard(a, b)
    ser = eval_series(c, zs)
    # tail of sum 6^-n z^n beyond n: |z/6|^(n+1) / (1 - |z/6|)
    q = np.max(np.abs(zs)) / 6
    tail = q ** (n + 1) / (1 - q)
    rep.add("truncated Taylor product vs quadrature", np.max(np.abs(ser - got)), 1e-8 + tail)
    return rep


def suite_dilog(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("dilog")
    rng = np.random.default_rng(seed)
    L, Li = builtin("log1p"), builtin("li2")
    inner = np.sqrt(rng.uniform(0.01, 0.9, 20)) * np.exp(1j * rng.uniform(-np.pi, np.pi, 20))
    outer = rng.uniform(1.2, 5.0, 10) * np.exp(1j * rng.uniform(0.3, TWO_PI - 0.3, 10))
    for name, zs in (("|z|<1", inner), ("|z|>1", outer)):
        got = np.array([hadamard_at(L, L, z) for z in zs])
        rep.add(f"log1p*log1p vs li2 at {zs.size} points {name}", np.max(np.abs(got - li2(zs))), 1e-7)
    cls = cohom_convolve(CohomClass(L, L.singular), CohomClass(L, L.singular))
    rep.add_flag("class equality mod Hol(C*) with 4 moments",
                 class_equal_mod_entire(cls.rep, Li, cls.set, moments=4))
    for x in (1.5, 2.0, 4.0):
        d = abs(jump(cls.rep, x, 1e-5) - jump(Li, x, 1e-5))
        rep.add(f"jump across the cut at x={x}", d, 1e-6)
    return rep


def _defect_points(rng, n):
    return rng.uniform(1.5, 4.0, n) * np.exp(1j * rng.uniform(-np.pi, np.pi, n))


def suite_defect(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("defect")
    rng = np.random.default_rng(seed)
    f1 = _fn("1/(z-2)")
    f2 = _fn("exp(1/z)", "punctured_disk(0.5)")
    zs = _defect_points(rng, 10)
    expected = f1(0) * 1.0  # f2(oo) = exp(0) = 1
    d = max(abs(commutativity_defect(f1, f2, z) - expected) for z in zs)
    rep.add("defect = f1(0) f2(oo) = -1/2 at 10 points", d, 1e-7)
    g2 = _fn("1/(1-2*z)")
    d0 = max(abs(commutativity_defect(f1, g2, z)) for z in zs)
    rep.add("defect vanishes when f2(oo) = 0", d0, 1e-9)
    return rep


_RESIDUE_PAIRS = (
    # (f1, f2, f2 singular set, z, f1(0) * f2(oo))
    ("1/(z-2)", "exp(1/z)", "punctured_disk(0.25)", 1.0, -0.5),
    ("1/(z-3)", "2 + 1/z", "punctured_disk(0.1)", 0.5 + 0.5j, -2 / 3),
    ("exp(z)", "(3*z + 1)/(z - 1)", None, 1j, 3.0),
    ("1/(z-2)", "1/(1-2*z)", None, 1.0, 0.0),
)


def suite_residue(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("residue")
    for t1, t2, s2, z, expected in _RESIDUE_PAIRS:
        f1, f2 = _fn(t1), _fn(t2, s2)
        for r in (1e-2, 1e-3):
            got = residue_zero_loop(f1, f2, z, r)
            rep.add(f"{t1} | {t2} at z={z}, r={r:g}", abs(got - expected), 1e-8)
    return rep


_POHLEN_PAIRS = (
    ("1/(z-2)", "1/(z-3)"),
    ("1/(z^2+4)", "1/(z-3)"),
    ("1/(z+2.5)", "z/(z^2+9)"),
)


def suite_pohlen(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("pohlen")
    zs = np.concatenate([_ring_points(0.5, 7, 0.2), _ring_points(1.5, 7, 0.5), _ring_points(3.0, 6, 0.9)])
    for t1, t2 in _POHLEN_PAIRS:
        f1, f2 = _fn(t1), _fn(t2)
        d = 0.0
        for z in zs:
            a, b = pohlen_at(f1, f2, z), hadamard_at(f1, f2, z)
            d = max(d, abs(a - b) / (1 + abs(b)))
        rep.add(f"pohlen vs generalized for {t1} | {t2} at 20 points", d, 1e-8)
    f1, f2 = _fn("1/(z-2)"), _fn("1/(z-3)")
    v = pohlen_at(f1, f2, 0.01)
    rep.add("continuity at 0: (f1*f2)(0.01) vs f1(0) f2(0)", abs(v - f1(0) * f2(0)), 1e-3)
    return rep


def random_spec(rng: np.random.Generator, min_sep: float = 0.15) -> cy.WindingSpec:
    """Random prescription: bounded boxes with windings, optional unbounded ends."""
    while True:
        boxes, windings = [], []
        zero_w = int(rng.choice([0, 0, 1, -1]))
        for _ in range(int(rng.integers(1, 4))):
            r0 = rng.uniform(-1.5, 1.5)
            t0 = rng.uniform(0, TWO_PI)
            boxes.append(LogPolarBox(r0, r0 + rng.choice([0.0, rng.uniform(0, 0.8)]),
                                     Arc(t0, rng.choice([0.0, rng.uniform(0, 2.0)]))))
            windings.append(int(rng.choice([-1, 1, 2])))
        if rng.random() < 0.3:
            boxes.append(LogPolarBox(rng.uniform(2.2, 2.6), math.inf, Arc(rng.uniform(0, TWO_PI), 0.5)))
            windings.append(0)
        if rng.random() < 0.3:
            boxes.append(LogPolarBox(-math.inf, rng.uniform(-2.6, -2.2), Arc(rng.uniform(0, TWO_PI), 0.5)))
            windings.append(zero_w)
        regions = [StarSet((b,)) for b in boxes]
        spec = cy.make_spec(regions, windings, zero_w)
        if cy.separation(spec) >= min_sep and any(w == 1 for w in windings):
            return spec


def _test_integrands(spec: cy.WindingSpec):
    a = next(s.boxes[0] for s, w in zip(spec.forbidden, spec.windings) if w == 1)
    rho = a.rho_lo if math.isfinite(a.rho_lo) else a.rho_hi
    pole = complex(np.exp(rho + 1j * (a.arc.theta_lo + a.arc.width / 2)))
    return pole, [(k, (lambda k: lambda t: t**k / (t - pole))(k)) for k in range(-2, 3)]


def suite_homology(seed: int = 0, configs: int = 50) -> SuiteReport:
    rep = SuiteReport("homology")
    rng = np.random.default_rng(seed)
    worst_int = 0.0
    worst_oracle = 0.0
    failures = 0
    min_probes = math.inf
    for _ in range(configs):
        spec = random_spec(rng)
        c1 = cy.synthesize_cycle(spec)
        c2 = cy.synthesize_cycle(spec, eps=c1.eps / 2)
        for c in (c1, c2):
            r = cy.certify(c, spec)
            failures += not r.ok
            boxes = sum(len(s.boxes) for s in spec.forbidden)
            min_probes = min(min_probes, (r.n_probes - len(spec.probes)) / boxes)
        pole, fns = _test_integrands(spec)
        for k, g in fns:
            v1 = integrate_cycle(g, c1).value
            v2 = integrate_cycle(g, c2).value
            worst_int = max(worst_int, abs(v1 - v2) / (1 + abs(v1)))
            # residues: pole gets winding 1; 0 is a pole of order -k for k < 0
            exact = 2j * math.pi * pole**k
            if k < 0:
                exact += 2j * math.pi * spec.zero_winding * (-(pole ** (k)))
            worst_oracle = max(worst_oracle, abs(v1 - exact) / (1 + abs(exact)))
    rep.add(f"certification failures over {configs} configurations", failures, 0.5)
    rep.add("ring probes per box", 64 - min_probes, 0.5, f"min {min_probes:g}")
    rep.add("eps vs eps/2 integrals of t^k/(t-a), k=-2..2", worst_int, 1e-8)
    rep.add("integrals vs residue theorem", worst_oracle, 1e-8)
    return rep


def _shared_cases():
    L = builtin("log1p")
    return (
        ("geometric", _fn("1/(1-z/2)"), _fn("1/(1-z/3)"),
         StarSet((LogPolarBox(math.log(0.5), 0.0, FULL_ARC),)),
         lambda n: np.concatenate([_ring_points(0.5, n // 2), _ring_points(1.0, n - n // 2, 0.1)])),
        ("dilog", L, L,
         StarSet((LogPolarBox(-1.0, 1.0, Arc(0.5, TWO_PI - 1.0)),)),
         lambda n: np.exp(np.linspace(-0.9, 0.9, n) + 1j * np.linspace(0.6, TWO_PI - 0.6, n))),
        ("defect pair", _fn("1/(z-2)"), _fn("exp(1/z)", "punctured_disk(0.5)"),
         StarSet((LogPolarBox(math.log(1.5), math.log(3.0), FULL_ARC),)),
         lambda n: np.exp(np.linspace(math.log(1.5), math.log(3.0), n) + 1j * np.linspace(0, 6, n))),
    )


def suite_shared_cycle(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("shared-cycle")
    for name, f1, f2, K, pts in _shared_cases():
        grid = pts(20)
        res = hadamard_grid(f1, f2, K, grid)
        d = max(abs(v - hadamard_at(f1, f2, z)) / (1 + abs(v)) for z, v in zip(grid, res.values))
        rep.add(f"{name}: shared cycle vs per-point cycles on 20 points", d, 1e-8)
    return rep


def _raster_proper(s: StarSet, n: int = 1000) -> bool:
    rhos = s.finite_rhos() or [0.0]
    rho = np.linspace(min(rhos) - 1, max(rhos) + 1, n)
    th = (np.arange(n) + 0.5) * TWO_PI / n
    covered = np.zeros((n, n), dtype=bool)
    for b in s.boxes:
        rows = (rho >= b.rho_lo) & (rho <= b.rho_hi)
        cols = np.asarray(b.arc.contains(th, 1e-12), dtype=bool)
        covered |= rows[:, None] & cols[None, :]
    return not covered.all()


def _lattice_config(rng) -> StarSet:
    boxes = []
    for _ in range(int(rng.integers(1, 6))):
        lo = rng.integers(-4, 4) * 0.5
        hi = lo + rng.integers(0, 5) * 0.5
        if rng.random() < 0.25:
            lo = -math.inf
        if rng.random() < 0.25:
            hi = math.inf
        width = rng.integers(0, 17) * math.pi / 8
        boxes.append(LogPolarBox(lo, hi, Arc(rng.integers(0, 16) * math.pi / 8, width)))
    return StarSet(tuple(boxes))


def suite_sets(seed: int = 0, samples: int = 10_000) -> SuiteReport:
    rep = SuiteReport("sets")
    rng = np.random.default_rng(seed)
    a = StarSet((LogPolarBox(-0.5, 0.7, Arc(0.3, 1.1)), LogPolarBox(1.0, 1.0, Arc.point(2.0))))
    b = StarSet((LogPolarBox(0.2, 1.5, Arc(4.0, 0.6)), LogPolarBox(-1.0, -0.2, Arc(5.5, 1.5))))
    x, y = sample_set(a, samples, rng), sample_set(b, samples, rng)
    prod = set_product(a, b)
    rep.add("product contains sampled x*y", np.max(prod.distance(x * y)), 1e-9)
    rep.add("inverse contains sampled 1/x", np.max(set_inverse(a).distance(1 / x)), 1e-9)
    z = 1.7 * np.exp(0.4j)
    rep.add("scale contains sampled z*x", np.max(set_scale(z, a).distance(z * x)), 1e-9)
    # the converse: sampled points of the product factor through the sets
    w = sample_set(prod, 2000, rng)
    back = np.min([a.distance(w / yy) for yy in y[:400]], axis=0)
    rep.add("sampled product points factor as x*y (coarse)", np.max(back), 0.2)
    neg = StarSet((LogPolarBox(0.0, math.inf, Arc.point(math.pi)),))
    sq = set_product(neg, neg)
    exact = sq.boxes == (LogPolarBox(0.0, math.inf, Arc.point(0.0)),)
    rep.add_flag("(-oo,-1] x (-oo,-1] = [1,oo) at box level", exact, repr(sq))
    mismatches = 0
    for _ in range(20):
        s = _lattice_config(rng)
        mismatches += is_proper(s) != _raster_proper(s)
    rep.add("properness sweep vs 10^6-point raster on 20 configurations", mismatches, 0.5)
    return rep


def suite_quadrature(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("quadrature")
    worst = 0.0
    for r in (0.1, 1.0, 10.0):
        for k in range(-3, 4):
            got = circle_integral(lambda t, k=k: t**k, 0.0, r).value
            worst = max(worst, abs(got - (2j * math.pi if k == -1 else 0.0)))
    rep.add("residue battery t^k, k=-3..3, r in {0.1,1,10}", worst, 1e-12)
    got = circle_integral(lambda t: np.exp(t) / (t - 0.3), 0.0, 1.0).value / (2j * math.pi)
    rep.add("Cauchy formula for exp at 0.3", abs(got - math.exp(0.3)), 1e-10)
    return rep


def suite_localized(seed: int = 0) -> SuiteReport:
    rep = SuiteReport("localized")
    L = builtin("log1p")
    U1 = StarSet((LogPolarBox(math.log(0.1), math.log(3.0), FULL_ARC),))
    V1 = thicken(preset("ray(0,1)"), 0.2)
    U2 = StarSet((LogPolarBox(math.log(0.3), math.log(2.5), FULL_ARC),))
    V2 = thicken(preset("ray(0,1)"), 0.1)
    grid = np.concatenate([_ring_points(2.0, 9, 0.25), _ring_points(0.5, 6, 0.1), _ring_points(1.0, 5, 0.7)])
    grid = [z for z in grid if abs(np.angle(z)) > 0.25]
    r1 = localized_product(L, L, U1, V1, grid)
    r2 = localized_product(L, L, U2, V2, grid)
    glob = np.array([hadamard_at(L, L, z) for z in grid])
    v1, v2 = np.array(r1.values), np.array(r2.values)
    rep.add("window 1 vs global product", np.max(np.abs(v1 - glob)), 1e-8)
    rep.add("window 2 vs global product", np.max(np.abs(v2 - glob)), 1e-8)
    rep.add("window 1 vs window 2 on the overlap", np.max(np.abs(v1 - v2)), 1e-8)
    edge = [2 * np.exp(0.25j), 2 * np.exp(-0.25j)]
    r = localized_product(L, L, U1, V1, edge)
    rep.add("jump across the cut window vs li2", abs((r.values[0] - r.values[1]) - (li2(edge[0]) - li2(edge[1]))), 1e-8)
    return rep


SUITES = {
    "series-oracle": suite_series_oracle,
    "dilog": suite_dilog,
    "defect": suite_defect,
    "residue": suite_residue,
    "pohlen": suite_pohlen,
    "homology": suite_homology,
    "shared-cycle": suite_shared_cycle,
    "sets": suite_sets,
    "quadrature": suite_quadrature,
    "localized": suite_localized,
}


def run_suite(name: str, seed: int = 0) -> list[SuiteReport]:
    names = list(SUITES) if name == "all" else [name]
    out = []
    for n in names:
        t0 = time.perf_counter()
        rep = SUITES[n](seed=seed)
        rep.seconds = time.perf_counter() - t0
        out.append(rep)
    return out
