"""Polygonal cycles in C*, winding numbers, and synthesis from winding data.

A cycle class in H_1 of a plane domain is pinned down by its winding numbers
around the complement, so cycles are built from a prescription: each
forbidden region gets an integer, and the synthesized cycle is the boundary
of the eps-dilation of the regions (drawn on the log-polar cylinder, where
boxes are rectangles) weighted by those integers.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NoMargin,
    NotStronglyConvolvable,
    PointInProduct,
    PointOnCycle,
    SynthesisFailed,
    TableCaseImpossible,
)
from .sphere_sets import (
    TWO_PI,
    Arc,
    LogPolarBox,
    StarSet,
    set_inverse,
    set_product,
    set_scale,
    strongly_convolvable,
)

ON_CYCLE_TOL = 1e-9
MAX_ARC_STEP = math.pi / 64
WINDOW_PAD = 2.0
DEFAULT_MARGIN = 1e-6
RING_PROBES = 64
_CHUNK = 2_000_000


# ---------------------------------------------------------------------------
# Paths and cycles
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Path:
    """Closed polyline; the last vertex connects back to the first."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=complex).ravel()
        if v.size < 3:
            raise ValueError(f"a path needs at least 3 vertices, got {v.size}")
        if np.any(v == 0):
            raise ValueError("path vertices must avoid 0")
        if np.any(np.abs(np.roll(v, -1) - v) <= 1e-12):
            raise ValueError("consecutive path vertices must be distinct")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    def reversed(self) -> "Path":
        return Path(self.vertices[::-1].copy())

    def to_record(self) -> list:
        return [[float(p.real), float(p.imag)] for p in self.vertices]


@dataclass(frozen=True, eq=False)
class Cycle:
    terms: tuple[tuple[Path, int], ...] = ()
    eps: float | None = field(default=None, compare=False)

    def __post_init__(self):
        terms = tuple((p, int(m)) for p, m in self.terms)
        if any(m == 0 for _, m in terms):
            raise ValueError("cycle multiplicities must be nonzero")
        object.__setattr__(self, "terms", terms)

    def __add__(self, other: "Cycle") -> "Cycle":
        return Cycle(self.terms + other.terms)

    def __neg__(self) -> "Cycle":
        return Cycle(tuple((p, -m) for p, m in self.terms), self.eps)

    def reversed(self) -> "Cycle":
        """Every path traversed backwards (same multiplicities)."""
        return Cycle(tuple((p.reversed(), m) for p, m in self.terms), self.eps)

    def segments(self):
        if not self.terms:
            empty = np.zeros(0, dtype=complex)
            return empty, empty, np.zeros(0)
        starts = np.concatenate([p.vertices for p, _ in self.terms])
        ends = np.concatenate([np.roll(p.vertices, -1) for p, _ in self.terms])
        mults = np.concatenate([np.full(p.vertices.size, float(m)) for p, m in self.terms])
        return starts, ends, mults

    @property
    def n_vertices(self) -> int:
        return sum(p.vertices.size for p, _ in self.terms)

    def to_record(self) -> dict:
        return {"terms": [{"multiplicity": m, "vertices": p.to_record()} for p, m in self.terms]}

    @classmethod
    def from_record(cls, rec: dict) -> "Cycle":
        terms = []
        for t in rec["terms"]:
            v = np.array([complex(a, b) for a, b in t["vertices"]])
            terms.append((Path(v), int(t["multiplicity"])))
        return cls(tuple(terms))

    def digest(self) -> str:
        blob = json.dumps(self.to_record(), separators=(",", ":")).encode()
        return hashlib.sha256(blob).hexdigest()


def circle_path(center: complex, radius: float, max_arc_step: float = MAX_ARC_STEP) -> Path:
    """CCW regular polygon inscribed in the circle."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    n = max(8, math.ceil(TWO_PI / max_arc_step))
    return Path(center + radius * np.exp(1j * TWO_PI * np.arange(n) / n))


def circle_cycle(center: complex, radius: float, orientation: int = 1, max_arc_step: float = MAX_ARC_STEP) -> Cycle:
    return Cycle(((circle_path(center, radius, max_arc_step), orientation),))


# ---------------------------------------------------------------------------
# Winding numbers
# ---------------------------------------------------------------------------


def _segment_distance(a: np.ndarray, b: np.ndarray, w: np.ndarray) -> np.ndarray:
    """min over segments [a_k, b_k] of the distance to each w (shape of w)."""
    ab = b - a
    len2 = np.maximum(np.abs(ab) ** 2, 1e-300)
    t = ((w[:, None] - a[None, :]) * np.conj(ab)[None, :]).real / len2[None, :]
    t = np.clip(t, 0.0, 1.0)
    return np.min(np.abs(a[None, :] + t * ab[None, :] - w[:, None]), axis=1)


def _path_turns(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    d = v[None, :] - w[:, None]
    return np.angle(np.roll(d, -1, axis=1) / d).sum(axis=1) / TWO_PI


def _subdivide(v: np.ndarray) -> np.ndarray:
    out = np.empty(2 * v.size, dtype=complex)
    out[0::2] = v
    out[1::2] = 0.5 * (v + np.roll(v, -1))
    return out


def winding_numbers(c: Cycle, w, check: bool = True) -> np.ndarray:
    """Winding numbers of c around each point of w (vectorized)."""
    w = np.atleast_1d(np.asarray(w, dtype=complex)).ravel()
    total = np.zeros(w.size, dtype=np.int64)
    for path, mult in c.terms:
        v = path.vertices
        step = max(1, _CHUNK // max(v.size, 1))
        for lo in range(0, w.size, step):
            chunk = w[lo:lo + step]
            if check:
                dist = _segment_distance(v, np.roll(v, -1), chunk)
                if np.any(dist <= ON_CYCLE_TOL):
                    bad = chunk[np.argmax(dist <= ON_CYCLE_TOL)]
                    raise PointOnCycle(f"w={bad!r} is within {ON_CYCLE_TOL:g} of the cycle")
            turns = _path_turns(v, chunk)
            vv = v
            for _ in range(6):
                resid = np.abs(turns - np.round(turns))
                if np.all(resid < 0.25):
                    break
                vv = _subdivide(vv)
                turns = _path_turns(vv, chunk)
            else:
                raise PointOnCycle("winding number did not settle near an integer")
            total[lo:lo + step] += mult * np.round(turns).astype(np.int64)
    return total


def winding_number(c: Cycle, w: complex) -> int:
    return int(winding_numbers(c, [w])[0])


# ---------------------------------------------------------------------------
# Winding prescriptions
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WindingSpec:
    """Required winding per forbidden region plus explicit probe points.

    `windings[k]` is the winding every point of `forbidden[k]` must get;
    `zero_winding` is the winding around 0; far away the winding is 0.
    `window` is the rho range that holds all finite data (padded).
    """

    probes: tuple[tuple[complex, int], ...]
    forbidden: tuple[StarSet, ...]
    windings: tuple[int, ...]
    zero_winding: int
    margin: float
    window: tuple[float, float]
    labels: tuple[str, ...] = ()

    @property
    def zero_probe(self) -> complex:
        return complex(math.exp(self.window[0] - 1.0) * np.exp(1j * self._free_angle()))

    @property
    def far_probe(self) -> complex:
        return complex(math.exp(self.window[1] + 1.0) * np.exp(1j * self._free_angle()))

    def _free_angle(self) -> float:
        """An angle far from every box arc (ties to the smallest angle)."""
        arcs = [b.arc for s in self.forbidden for b in s.boxes if not b.arc.full]
        if not arcs:
            return 0.0
        grid = np.linspace(0.0, TWO_PI, 720, endpoint=False)
        score = np.min([a.angular_distance(grid) for a in arcs], axis=0)
        return float(grid[int(np.argmax(score))])

    def same_prescription(self, other: "WindingSpec") -> bool:
        return [(p, r) for p, r in self.probes] == [(p, r) for p, r in other.probes]

    def region_union(self, winding: int) -> StarSet:
        boxes = tuple(b for s, m in zip(self.forbidden, self.windings) if m == winding for b in s.boxes)
        return StarSet(boxes)


def _box_probes(box: LogPolarBox, lo: float, hi: float) -> list[complex]:
    r0, r1 = max(box.rho_lo, lo), min(box.rho_hi, hi)
    if r0 > r1:
        r0 = r1 = min(max(box.rho_lo, lo), hi)
    if box.arc.full:
        t0, t1 = 0.0, math.pi
        pts = [(0.5 * (r0 + r1), 0.0)] + [(r, t) for r in (r0, r1) for t in (t0, t1)]
    else:
        t0, t1 = box.arc.theta_lo, box.arc.theta_hi
        pts = [(0.5 * (r0 + r1), 0.5 * (t0 + t1))] + [(r, t) for r in (r0, r1) for t in (t0, t1)]
    return [complex(np.exp(r + 1j * t)) for r, t in pts]


def make_spec(
    regions,
    windings,
    zero_winding: int,
    margin: float = DEFAULT_MARGIN,
    labels=(),
    extra_rhos=(),
) -> WindingSpec:
    """Assemble a WindingSpec: box centers/corners of each region plus the two proxies."""
    regions = tuple(regions)
    windings = tuple(int(m) for m in windings)
    if len(regions) != len(windings):
        raise ValueError("one winding per region is required")
    rhos = [r for s in regions for r in s.finite_rhos()] + [float(r) for r in extra_rhos]
    if rhos:
        window = (min(rhos) - WINDOW_PAD, max(rhos) + WINDOW_PAD)
    else:
        window = (-WINDOW_PAD, WINDOW_PAD)
    probes: list[tuple[complex, int]] = []
    for s, m in zip(regions, windings):
        for box in s.boxes:
            probes.extend((p, m) for p in _box_probes(box, *window))
    spec = WindingSpec((), regions, windings, int(zero_winding), float(margin), window, tuple(labels))
    probes.append((spec.zero_probe, int(zero_winding)))
    probes.append((spec.far_probe, 0))
    return WindingSpec(tuple(probes), regions, windings, int(zero_winding), float(margin), window, tuple(labels))


def _check_pair(S1: StarSet, S2: StarSet) -> None:
    if not strongly_convolvable(S1, S2):
        raise NotStronglyConvolvable(
            f"{S1.label or 'S1'} and {S2.label or 'S2'} are not strongly convolvable"
        )


def _check_margin(S1: StarSet, S2: StarSet, K: StarSet, margin: float, point: bool = True) -> None:
    prod = set_product(S1, S2)
    if prod.empty:
        return
    from .sphere_sets import set_separation

    d = set_separation(prod, K)
    if point and d <= 1e-12:
        raise PointInProduct(f"{K.label or 'z'} meets S1*S2 = {prod!r}")
    if d < 2 * margin:
        raise NoMargin(f"{K.label or 'z'} is within {d:.3g} of S1*S2 (need >= {2 * margin:g})")


def hadamard_lambda(S1: StarSet) -> tuple[int, int, int]:
    """(winding on S1, winding on z S2^-1, winding at 0) of a generalized Hadamard cycle."""
    inf1 = int(S1.closure_has_inf)
    zero1 = int(S1.closure_has_zero)
    return -1 + inf1, inf1, -zero1 + inf1


def _spec_from_k(S1: StarSet, S2: StarSet, Kz: StarSet, margin: float, point: bool = False) -> WindingSpec:
    _check_pair(S1, S2)
    _check_margin(S1, S2, Kz, margin, point)
    K = set_product(Kz, set_inverse(S2))
    w1, wk, w0 = hadamard_lambda(S1)
    regions, windings, labels = [], [], []
    if not S1.empty:
        regions.append(S1), windings.append(w1), labels.append("S1")
    if not K.empty:
        regions.append(K), windings.append(wk), labels.append("zS2^-1")
    return make_spec(regions, windings, w0, margin, labels)


def hadamard_winding_spec(S1: StarSet, S2: StarSet, z: complex, margin: float = DEFAULT_MARGIN) -> WindingSpec:
    from .sphere_sets import point_set

    if z == 0:
        raise PointInProduct("z must be nonzero")
    return _spec_from_k(S1, S2, point_set(z, "z"), margin, point=True)


# Rows: (0 in Omega2, oo in Omega2); columns: (0 in Omega1, oo in Omega1).
_POHLEN_TABLE = {
    ((True, True), (True, True)): "cc+|acc-",
    ((True, True), (False, True)): "acc-",
    ((True, True), (True, False)): "cc+",
    ((True, True), (False, False)): "cc",
    ((False, True), (True, True)): "acc-",
    ((False, True), (False, True)): "acc-",
    ((True, False), (True, True)): "cc+",
    ((True, False), (True, False)): "cc+",
    ((False, False), (True, True)): "acc",
}


def pohlen_cell(S1: StarSet, S2: StarSet) -> str:
    col = (not S1.closure_has_zero, not S1.closure_has_inf)
    row = (not S2.closure_has_zero, not S2.closure_has_inf)
    return _POHLEN_TABLE.get((row, col), "/")


def pohlen_winding_spec(
    S1: StarSet, S2: StarSet, z: complex, margin: float = DEFAULT_MARGIN, ambiguous: str = "cc+"
) -> WindingSpec:
    """Cauchy / anti-Cauchy cycle prescribed by the table of 0/oo memberships."""
    from .sphere_sets import point_set

    if ambiguous not in ("cc+", "acc-"):
        raise ValueError("ambiguous must be 'cc+' or 'acc-'")
    _check_pair(S1, S2)
    cell = pohlen_cell(S1, S2)
    if cell == "/":
        raise TableCaseImpossible(
            "this pattern of 0 and oo in the two domains has no Cauchy or anti-Cauchy cycle"
        )
    if cell == "cc+|acc-":
        cell = ambiguous
    _check_margin(S1, S2, point_set(z, "z"), margin)
    K = set_scale(z, set_inverse(S2))
    if cell.startswith("cc"):
        w1, wk = 0, 1
    else:
        w1, wk = -1, 0
    if cell == "cc+":
        w0 = 1
    elif cell == "acc-":
        w0 = -1
    else:
        # plain cells: 0 sits in one of the two sets and takes its winding
        w0 = w1 if S1.closure_has_zero else wk
    regions, windings, labels = [], [], []
    if not S1.empty:
        regions.append(S1), windings.append(w1), labels.append("S1")
    if not K.empty:
        regions.append(K), windings.append(wk), labels.append("zS2^-1")
    return make_spec(regions, windings, w0, margin, labels)


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------


def separation(spec: WindingSpec, around: StarSet | None = None) -> float:
    """Cylinder distance between data that must get different windings.

    With `around`, only its boxes are measured (each takes the winding of the
    region it sits in); otherwise every box with nonzero winding is.
    """
    items = [(b, m) for s, m in zip(spec.forbidden, spec.windings) for b in s.boxes]
    for b, m in items:
        if (b.reaches_zero and m != spec.zero_winding) or (b.reaches_inf and m != 0):
            return 0.0
    if around is None:
        targets = [(b, m) for b, m in items if m != 0]
    else:
        targets = [(b, next((m for x, m in items if x.box_distance(b) == 0), 0)) for b in around.boxes]
    best = math.inf
    for tb, tm in targets:
        for b, m in items:
            if m != tm:
                best = min(best, tb.box_distance(b))
        for p, req in spec.probes:
            if req != tm:
                best = min(best, float(tb.distance(math.log(abs(p)), float(np.angle(p)))))
    return best


def _sentinel_top(spec: WindingSpec, m: int, eps: float) -> float:
    others = [b.rho_lo for s, w in zip(spec.forbidden, spec.windings) if w != m for b in s.boxes]
    others += [math.log(abs(p)) for p, r in spec.probes if r != m]
    if [b for s, w in zip(spec.forbidden, spec.windings) if w != m for b in s.boxes]:
        return min(others) - eps
    own = [b.rho_hi for s, w in zip(spec.forbidden, spec.windings) if w == m for b in s.boxes]
    own = [r for r in own if math.isfinite(r)]
    top = max(own) + eps if own else math.log(eps)
    return min([top] + [r - eps for r in others])


def _dedup_angles(vals: list[float]) -> np.ndarray:
    a = np.sort(np.mod(np.asarray(vals + [0.0]), TWO_PI))
    keep = [a[0]]
    for x in a[1:]:
        if x - keep[-1] > 1e-12:
            keep.append(x)
    if TWO_PI - keep[-1] <= 1e-12 and len(keep) > 1:
        keep.pop()
    return np.array(keep)


def _loops_from_mask(filled: np.ndarray, below: bool):
    """Directed boundary edges of the filled cells, chained into closed loops.

    Vertices are (i, j) with i the rho break index and j the theta break index
    (periodic).  Edges keep the filled side on their left in the (rho, theta)
    plane, which exp maps conformally, so loops come out positively oriented.
    """
    nr, nt = filled.shape
    ext = np.zeros((nr + 2, nt), dtype=bool)
    ext[0] = below
    ext[1:-1] = filled
    edges = []  # (start (i,j), end (i,j), kind, sign)
    # theta-direction edges at rho level i, between ext rows i and i+1
    for i in range(nr + 1):
        lower, upper = ext[i], ext[i + 1]
        for j in np.nonzero(upper & ~lower)[0]:
            edges.append(((i, (j + 1) % nt), (i, j), "t", -1))
        for j in np.nonzero(lower & ~upper)[0]:
            edges.append(((i, j), (i, (j + 1) % nt), "t", 1))
    # radial edges at theta level j, between columns j-1 and j
    for j in range(nt):
        left, right = filled[:, (j - 1) % nt], filled[:, j]
        for i in np.nonzero(right & ~left)[0]:
            edges.append(((i, j), (i + 1, j), "r", 1))
        for i in np.nonzero(left & ~right)[0]:
            edges.append(((i + 1, j), (i, j), "r", -1))
    outgoing: dict[tuple[int, int], list[int]] = {}
    for k, e in enumerate(edges):
        outgoing.setdefault(e[0], []).append(k)
    used = [False] * len(edges)
    loops = []
    for k0 in range(len(edges)):
        if used[k0]:
            continue
        loop = []
        k = k0
        while True:
            used[k] = True
            loop.append(edges[k])
            if edges[k][1] == edges[k0][0]:
                break
            k = next(e for e in outgoing[edges[k][1]] if not used[e])
        loops.append(loop)
    return loops


def _merge(loop):
    """Join consecutive edges of the same kind and direction."""
    n = len(loop)
    start = 0
    for k in range(n):
        prev = loop[k - 1]
        if (prev[2], prev[3]) != (loop[k][2], loop[k][3]):
            start = k
            break
    loop = loop[start:] + loop[:start]
    runs = []
    for e in loop:
        if runs and (runs[-1][-1][2], runs[-1][-1][3]) == (e[2], e[3]):
            runs[-1].append(e)
        else:
            runs.append([e])
    return runs


def _loop_vertices(runs, rho, theta, arc_step) -> np.ndarray:
    nt = theta.size
    pts = []
    for run in runs:
        (i0, j0), kind, sign = run[0][0], run[0][2], run[0][3]
        t0 = theta[j0]
        if kind == "r":
            pts.append(np.exp(rho[i0] + 1j * t0))
            continue
        span = 0.0
        for (_, ja), (_, jb), _, _ in run:
            lo, hi = (ja, jb) if sign > 0 else (jb, ja)
            span += (theta[hi] - theta[lo]) % TWO_PI if nt > 1 else TWO_PI
        n = max(1, math.ceil(span / arc_step))
        ang = t0 + sign * span * np.arange(n) / n
        pts.extend(np.exp(rho[i0] + 1j * ang))
    return np.asarray(pts, dtype=complex)


def _build_cycle(spec: WindingSpec, eps: float, max_arc_step: float) -> Cycle:
    lo, hi = spec.window
    groups: dict[int, list[tuple[float, float, Arc]]] = {}
    for s, m in zip(spec.forbidden, spec.windings):
        if m == 0:
            continue
        for b in s.boxes:
            d = b.dilate(eps)
            r0, r1 = max(d.rho_lo, lo), min(d.rho_hi, hi)
            if r0 < r1:
                groups.setdefault(m, []).append((r0, r1, d.arc))
    tops: dict[int, float] = {}
    if spec.zero_winding != 0:
        tops[spec.zero_winding] = min(_sentinel_top(spec, spec.zero_winding, eps), hi)
        groups.setdefault(spec.zero_winding, [])
    arc_step = min(max_arc_step, math.sqrt(eps))
    terms: list[tuple[Path, int]] = []
    for m in sorted(groups):
        boxes = groups[m]
        top = tops.get(m)
        bottom = min([lo] + ([top] if top is not None else []))
        rho_breaks = sorted({bottom, hi, *(r for b in boxes for r in b[:2]), *([top] if top is not None else [])})
        rho = np.array(rho_breaks)
        theta = _dedup_angles([t for *_, a in boxes if not a.full for t in (a.theta_lo, a.theta_hi)])
        nr, nt = rho.size - 1, theta.size
        rc = 0.5 * (rho[:-1] + rho[1:])
        tnext = np.append(theta[1:], theta[0] + TWO_PI)
        tc = 0.5 * (theta + tnext)
        filled = np.zeros((nr, nt), dtype=bool)
        for r0, r1, arc in boxes:
            rows = (rc >= r0) & (rc <= r1)
            cols = np.asarray(arc.contains(tc), dtype=bool).reshape(nt)
            filled |= rows[:, None] & cols[None, :]
        below = top is not None
        if top is not None:
            filled |= (rc < top)[:, None]
        for loop in _loops_from_mask(filled, below):
            verts = _loop_vertices(_merge(loop), rho, theta, arc_step)
            if verts.size >= 3:
                terms.append((Path(verts), m))
    return Cycle(tuple(terms), eps)


def synthesize_cycle(
    spec: WindingSpec,
    around: StarSet | None = None,
    eps: float | None = None,
    max_arc_step: float = MAX_ARC_STEP,
) -> Cycle:
    """Cycle realizing `spec`: boundary of the eps-dilated regions, weighted by winding."""
    sep = separation(spec, around)
    if sep <= 0:
        raise NoMargin("regions that need different windings touch")
    if eps is None:
        eps = min(0.2, sep / 3)
    elif not 0 < eps < sep / 2:
        raise NoMargin(f"eps={eps:g} must be below half the separation {sep:.3g}")
    report = None
    for _ in range(3):
        c = _build_cycle(spec, eps, max_arc_step)
        report = certify(c, spec)
        if report.ok:
            return c
        eps /= 2
    raise SynthesisFailed(f"certification failed after two eps halvings: {report.violations[:3]}")


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CertifyReport:
    ok: bool
    violations: list
    n_probes: int


def _ring(box: LogPolarBox, offset: float, lo: float, hi: float, n: int = RING_PROBES) -> np.ndarray:
    r0 = min(max(box.rho_lo - offset, lo), hi)
    r1 = max(min(box.rho_hi + offset, hi), lo)
    if box.arc.full:
        half = n // 2
        t = TWO_PI * np.arange(half) / half
        return np.concatenate([np.exp(r0 + 1j * t), np.exp(r1 + 1j * t)])
    t0, t1 = box.arc.theta_lo - offset, box.arc.theta_hi + offset
    s = np.arange(n // 4) / (n // 4)
    rho = np.concatenate([r0 + (r1 - r0) * s, np.full(s.size, r1), r1 - (r1 - r0) * s, np.full(s.size, r0)])
    th = np.concatenate([np.full(s.size, t0), t0 + (t1 - t0) * s, np.full(s.size, t1), t1 - (t1 - t0) * s])
    return np.exp(rho + 1j * th)


def certify_probes(spec: WindingSpec) -> tuple[np.ndarray, np.ndarray]:
    pts = [p for p, _ in spec.probes]
    req = [r for _, r in spec.probes]
    lo, hi = spec.window
    for s, m in zip(spec.forbidden, spec.windings):
        for b in s.boxes:
            ring = _ring(b, spec.margin / 2, lo, hi)
            pts.extend(ring)
            req.extend([m] * ring.size)
    return np.asarray(pts, dtype=complex), np.asarray(req, dtype=np.int64)


def certify(c: Cycle, spec: WindingSpec) -> CertifyReport:
    pts, req = certify_probes(spec)
    try:
        got = winding_numbers(c, pts)
    except PointOnCycle as exc:
        return CertifyReport(False, [str(exc)], int(pts.size))
    bad = np.nonzero(got != req)[0]
    violations = [(complex(pts[k]), int(req[k]), int(got[k])) for k in bad]
    return CertifyReport(not violations, violations, int(pts.size))


def shared_cycle(
    S1: StarSet,
    S2: StarSet,
    K: StarSet,
    eps: float | None = None,
    margin: float = DEFAULT_MARGIN,
) -> Cycle:
    """One generalized Hadamard cycle valid for every z in the compact set K."""
    if K.empty or not K.compact:
        raise NoMargin("K must be a nonempty compact set of z values")
    spec = _spec_from_k(S1, S2, K, margin)
    return synthesize_cycle(spec, eps=eps)


def shared_winding_spec(S1: StarSet, S2: StarSet, K: StarSet, margin: float = DEFAULT_MARGIN) -> WindingSpec:
    if K.empty or not K.compact:
        raise NoMargin("K must be a nonempty compact set of z values")
    return _spec_from_k(S1, S2, K, margin)
