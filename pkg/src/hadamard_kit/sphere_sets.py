"""Riemann-sphere arithmetic and closed subsets of C* as log-polar box unions.

A closed set S in C* is stored as a finite union of boxes

    {z : rho_lo <= log|z| <= rho_hi, arg z in arc}

so multiplication of sets becomes interval addition in (log|z|, arg z).
Products, inverses and rotations-with-scaling are therefore exact.  Distances
are measured on the cylinder R x S^1 with the Chebyshev metric
max(|d rho|, |d theta|), which is the metric in which box dilation is exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from itertools import product as _pairs
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    IndeterminateProduct,
    UndefinedProduct,
    UnrepresentableSet,
)

TWO_PI = 2.0 * math.pi
ANGLE_TOL = 1e-12
DEFAULT_TOL = 1e-9

INF = math.inf


# ---------------------------------------------------------------------------
# Points of P^1
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpherePoint:
    """A point of P^1 = C u {oo}.  Infinity is a flag, never a big float."""

    value: complex = 0j
    infinite: bool = False

    @classmethod
    def finite(cls, value: complex) -> "SpherePoint":
        return cls(complex(value), False)

    @classmethod
    def infinity(cls) -> "SpherePoint":
        return cls(0j, True)

    @property
    def is_zero(self) -> bool:
        return not self.infinite and self.value == 0

    def __repr__(self) -> str:
        return "SpherePoint(oo)" if self.infinite else f"SpherePoint({self.value!r})"


INFINITY = SpherePoint.infinity()
ZERO = SpherePoint.finite(0)


def ext_mul(a: SpherePoint, b: SpherePoint) -> SpherePoint:
    """Multiplication extended continuously to P^1 minus {(0,oo),(oo,0)}."""
    if (a.is_zero and b.infinite) or (a.infinite and b.is_zero):
        raise UndefinedProduct(f"{a!r} * {b!r} is not in the domain of the extended product")
    if a.infinite or b.infinite:
        return INFINITY
    return SpherePoint.finite(a.value * b.value)


def sphere_inv(a: SpherePoint) -> SpherePoint:
    if a.infinite:
        return ZERO
    if a.is_zero:
        return INFINITY
    return SpherePoint.finite(1.0 / a.value)


# ---------------------------------------------------------------------------
# Arcs of the unit circle
# ---------------------------------------------------------------------------


def _wrap(theta):
    """Reduce angles to [0, 2 pi)."""
    t = np.mod(theta, TWO_PI)
    if np.ndim(t) == 0:
        t = float(t)
        return 0.0 if t >= TWO_PI - 1e-15 else t
    return np.where(t >= TWO_PI - 1e-15, 0.0, t)


@dataclass(frozen=True)
class Arc:
    """Closed arc [theta_lo, theta_lo + width] of the circle, or the full circle."""

    theta_lo: float = 0.0
    width: float = 0.0
    full: bool = False

    def __post_init__(self):
        if self.full:
            object.__setattr__(self, "theta_lo", 0.0)
            object.__setattr__(self, "width", TWO_PI)
            return
        if not (math.isfinite(self.theta_lo) and math.isfinite(self.width)):
            raise ValueError("arc parameters must be finite")
        if self.width < 0:
            raise ValueError(f"arc width must be >= 0, got {self.width}")
        if self.width >= TWO_PI:
            object.__setattr__(self, "full", True)
            object.__setattr__(self, "theta_lo", 0.0)
            object.__setattr__(self, "width", TWO_PI)
            return
        object.__setattr__(self, "theta_lo", _wrap(self.theta_lo))

    @classmethod
    def interval(cls, theta_lo: float, width: float) -> "Arc":
        return cls(theta_lo, width)

    @classmethod
    def point(cls, theta: float) -> "Arc":
        return cls(theta, 0.0)

    @property
    def theta_hi(self) -> float:
        return self.theta_lo + self.width

    def angular_distance(self, theta):
        """Distance on the circle from `theta` to the arc (0 inside)."""
        if self.full:
            return np.zeros_like(np.asarray(theta, dtype=float)) if np.ndim(theta) else 0.0
        d = np.mod(np.asarray(theta, dtype=float) - self.theta_lo, TWO_PI)
        # d in [0, 2pi): inside if d <= width, otherwise nearest endpoint
        out = np.where(d <= self.width, 0.0, np.minimum(d - self.width, TWO_PI - d))
        return float(out) if np.ndim(theta) == 0 else out

    def contains(self, theta, tol: float = ANGLE_TOL):
        res = np.asarray(self.angular_distance(theta)) <= tol
        return bool(res) if np.ndim(theta) == 0 else res

    def gap(self, other: "Arc") -> float:
        """Angular gap between two arcs (0 when they meet)."""
        if self.full or other.full:
            return 0.0
        d1 = (other.theta_lo - self.theta_lo) % TWO_PI
        d2 = (self.theta_lo - other.theta_lo) % TWO_PI
        if d1 <= self.width + ANGLE_TOL or d2 <= other.width + ANGLE_TOL:
            return 0.0
        return max(0.0, min(d1 - self.width, d2 - other.width))

    def __add__(self, other: "Arc") -> "Arc":
        if self.full or other.full:
            return FULL_ARC
        return Arc(self.theta_lo + other.theta_lo, self.width + other.width)

    def __neg__(self) -> "Arc":
        if self.full:
            return self
        return Arc(-self.theta_hi, self.width)

    def rotate(self, phi: float) -> "Arc":
        return self if self.full else Arc(self.theta_lo + phi, self.width)

    def dilate(self, delta: float) -> "Arc":
        return self if self.full else Arc(self.theta_lo - delta, self.width + 2 * delta)

    def same_as(self, other: "Arc", tol: float = ANGLE_TOL) -> bool:
        if self.full or other.full:
            return self.full and other.full
        dlo = abs((self.theta_lo - other.theta_lo + math.pi) % TWO_PI - math.pi)
        return dlo <= tol and abs(self.width - other.width) <= tol

    def subtract(self, other: "Arc") -> list["Arc"]:
        """Closure of self minus other, as a list of arcs."""
        if other.full:
            return []
        if self.full:
            if other.width <= 0:
                return [self]
            return [Arc(other.theta_hi, TWO_PI - other.width)]
        s = (other.theta_lo - self.theta_lo) % TWO_PI
        pieces = [(0.0, self.width)]
        for shift in (s - TWO_PI, s, s + TWO_PI):
            lo, hi = shift, shift + other.width
            nxt = []
            for a, b in pieces:
                if hi < a or lo > b:
                    nxt.append((a, b))
                    continue
                if lo > a:
                    nxt.append((a, lo))
                if hi < b:
                    nxt.append((hi, b))
            pieces = nxt
        keep_points = self.width <= 0
        return [
            Arc(self.theta_lo + a, b - a)
            for a, b in pieces
            if b - a > ANGLE_TOL or keep_points
        ]

    def to_record(self):
        return "full" if self.full else [self.theta_lo, self.width]

    def __repr__(self) -> str:
        return "Arc(full)" if self.full else f"Arc({self.theta_lo:.6g}, {self.width:.6g})"


FULL_ARC = Arc(full=True)


# ---------------------------------------------------------------------------
# Boxes and box unions
# ---------------------------------------------------------------------------


def _ext_add(a: float, b: float) -> float:
    if (a == -INF and b == INF) or (a == INF and b == -INF):
        raise IndeterminateProduct("0 * oo encountered while adding log-moduli")
    return a + b


def _interval_gap(a_lo, a_hi, b_lo, b_hi) -> float:
    if a_hi < b_lo:
        return b_lo - a_hi
    if b_hi < a_lo:
        return a_lo - b_hi
    return 0.0


@dataclass(frozen=True)
class LogPolarBox:
    rho_lo: float
    rho_hi: float
    arc: Arc = FULL_ARC

    def __post_init__(self):
        if math.isnan(self.rho_lo) or math.isnan(self.rho_hi):
            raise ValueError("rho bounds must not be NaN")
        if self.rho_lo == INF or self.rho_hi == -INF:
            raise ValueError("rho_lo must be < +inf and rho_hi > -inf")
        if self.rho_lo > self.rho_hi:
            raise ValueError(f"empty box: rho_lo={self.rho_lo} > rho_hi={self.rho_hi}")

    @property
    def reaches_zero(self) -> bool:
        return self.rho_lo == -INF

    @property
    def reaches_inf(self) -> bool:
        return self.rho_hi == INF

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.rho_lo) and math.isfinite(self.rho_hi)

    def distance(self, rho, theta):
        """Chebyshev cylinder distance from points (rho, theta) to the box."""
        rho = np.asarray(rho, dtype=float)
        below = np.where(rho < self.rho_lo, self.rho_lo - rho, 0.0)
        above = np.where(rho > self.rho_hi, rho - self.rho_hi, 0.0)
        d_rho = np.maximum(below, above)
        d_th = np.asarray(self.arc.angular_distance(theta), dtype=float)
        return np.maximum(d_rho, d_th)

    def box_distance(self, other: "LogPolarBox") -> float:
        d_rho = _interval_gap(self.rho_lo, self.rho_hi, other.rho_lo, other.rho_hi)
        return max(d_rho, self.arc.gap(other.arc))

    def __mul__(self, other: "LogPolarBox") -> "LogPolarBox":
        return LogPolarBox(
            _ext_add(self.rho_lo, other.rho_lo),
            _ext_add(self.rho_hi, other.rho_hi),
            self.arc + other.arc,
        )

    def inverse(self) -> "LogPolarBox":
        return LogPolarBox(-self.rho_hi, -self.rho_lo, -self.arc)

    def scale(self, z: complex) -> "LogPolarBox":
        shift = math.log(abs(z))
        return LogPolarBox(self.rho_lo + shift, self.rho_hi + shift, self.arc.rotate(np.angle(z)))

    def dilate(self, delta: float) -> "LogPolarBox":
        return LogPolarBox(self.rho_lo - delta, self.rho_hi + delta, self.arc.dilate(delta))

    def clip_rho(self, lo: float, hi: float) -> tuple[float, float]:
        return max(self.rho_lo, lo), min(self.rho_hi, hi)

    def to_record(self) -> dict:
        return {"rho": [_num_out(self.rho_lo), _num_out(self.rho_hi)], "arc": self.arc.to_record()}


@dataclass(frozen=True)
class StarSet:
    """Closed subset of C*: finite union of log-polar boxes."""

    boxes: tuple[LogPolarBox, ...] = ()
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "boxes", tuple(self.boxes))

    @property
    def empty(self) -> bool:
        return not self.boxes

    @property
    def closure_has_zero(self) -> bool:
        return any(b.reaches_zero for b in self.boxes)

    @property
    def closure_has_inf(self) -> bool:
        return any(b.reaches_inf for b in self.boxes)

    @property
    def compact(self) -> bool:
        return all(b.bounded for b in self.boxes)

    def distance(self, z) -> np.ndarray | float:
        """Cylinder distance from z (scalar or array, nonzero) to the set."""
        z = np.asarray(z, dtype=complex)
        if not self.boxes:
            out = np.full(z.shape, INF)
        else:
            rho, th = np.log(np.abs(z)), np.angle(z)
            out = np.min([b.distance(rho, th) for b in self.boxes], axis=0)
        return float(out) if out.ndim == 0 else out

    def contains(self, z, tol: float = DEFAULT_TOL):
        res = np.asarray(self.distance(z)) <= tol
        return bool(res) if res.ndim == 0 else res

    def finite_rhos(self) -> list[float]:
        return [r for b in self.boxes for r in (b.rho_lo, b.rho_hi) if math.isfinite(r)]

    def with_label(self, label: str) -> "StarSet":
        return StarSet(self.boxes, label)

    def __or__(self, other: "StarSet") -> "StarSet":
        return normalize(StarSet(self.boxes + other.boxes, _join_labels(self.label, other.label, "u")))

    def to_record(self) -> dict:
        return {"label": self.label, "boxes": [b.to_record() for b in self.boxes]}

    def __repr__(self) -> str:
        inner = ", ".join(f"[{b.rho_lo:.4g},{b.rho_hi:.4g}]x{b.arc!r}" for b in self.boxes)
        return f"StarSet({self.label!r}: {inner})"


EMPTY = StarSet((), "empty")


def _join_labels(a: str, b: str, op: str) -> str:
    if a and b:
        return f"({a}){op}({b})"
    return a or b


def normalize(s: StarSet) -> StarSet:
    """Merge boxes that share an arc and have overlapping rho ranges."""
    merged: list[LogPolarBox] = []
    for box in sorted(s.boxes, key=lambda b: (b.arc.full, b.arc.theta_lo, b.arc.width, b.rho_lo)):
        for i, m in enumerate(merged):
            if m.arc.same_as(box.arc) and _interval_gap(m.rho_lo, m.rho_hi, box.rho_lo, box.rho_hi) <= 0:
                merged[i] = LogPolarBox(min(m.rho_lo, box.rho_lo), max(m.rho_hi, box.rho_hi), m.arc)
                break
        else:
            merged.append(box)
    return StarSet(tuple(merged), s.label)


# ---------------------------------------------------------------------------
# Set operations
# ---------------------------------------------------------------------------


def set_product(s1: StarSet, s2: StarSet) -> StarSet:
    if s1.empty or s2.empty:
        return StarSet((), _join_labels(s1.label, s2.label, "*"))
    boxes = tuple(a * b for a, b in _pairs(s1.boxes, s2.boxes))
    return normalize(StarSet(boxes, _join_labels(s1.label, s2.label, "*")))


def set_inverse(s: StarSet) -> StarSet:
    return normalize(StarSet(tuple(b.inverse() for b in s.boxes), f"({s.label})^-1" if s.label else ""))


def set_scale(z: complex, s: StarSet) -> StarSet:
    if z == 0:
        raise ValueError("scale factor must be nonzero")
    label = f"{complex(z)!r}*({s.label})" if s.label else ""
    return normalize(StarSet(tuple(b.scale(z) for b in s.boxes), label))


def set_contains(s: StarSet, z, tol: float = DEFAULT_TOL):
    return s.contains(z, tol)


def set_distance(s: StarSet, z):
    return s.distance(z)


def set_separation(a: StarSet, b: StarSet) -> float:
    """Cylinder (Chebyshev) distance between two box unions."""
    if a.empty or b.empty:
        return INF
    return min(x.box_distance(y) for x, y in _pairs(a.boxes, b.boxes))


def thicken(s: StarSet, delta: float) -> StarSet:
    if delta <= 0:
        raise ValueError("delta must be > 0")
    label = f"thicken({s.label},{delta:g})" if s.label else ""
    return normalize(StarSet(tuple(b.dilate(delta) for b in s.boxes), label))


def _interval_subtract(a_lo, a_hi, b_lo, b_hi) -> list[tuple[float, float]]:
    if b_hi < a_lo or b_lo > a_hi:
        return [(a_lo, a_hi)]
    out = []
    if b_lo > a_lo:
        out.append((a_lo, b_lo))
    if b_hi < a_hi:
        out.append((b_hi, a_hi))
    degenerate_ok = a_lo == a_hi
    return [(lo, hi) for lo, hi in out if hi > lo or degenerate_ok]


def _box_subtract(a: LogPolarBox, b: LogPolarBox) -> list[LogPolarBox]:
    if a.box_distance(b) > 0:
        return [a]
    out = [LogPolarBox(lo, hi, a.arc) for lo, hi in _interval_subtract(a.rho_lo, a.rho_hi, b.rho_lo, b.rho_hi)]
    mid_lo, mid_hi = max(a.rho_lo, b.rho_lo), min(a.rho_hi, b.rho_hi)
    if mid_lo <= mid_hi:
        out.extend(LogPolarBox(mid_lo, mid_hi, arc) for arc in a.arc.subtract(b.arc))
    return out


def set_difference(a: StarSet, b: StarSet) -> StarSet:
    """Closure of a minus b (boxes split as needed)."""
    boxes = list(a.boxes)
    for cut in b.boxes:
        boxes = [piece for box in boxes for piece in _box_subtract(box, cut)]
    return normalize(StarSet(tuple(boxes), _join_labels(a.label, b.label, "\\")))


def _arcs_cover_circle(arcs: Iterable[Arc], tol: float = ANGLE_TOL) -> bool:
    spans = []
    for arc in arcs:
        if arc.full:
            return True
        lo, hi = arc.theta_lo, arc.theta_lo + arc.width
        if hi > TWO_PI:
            spans.append((lo, TWO_PI))
            spans.append((0.0, hi - TWO_PI))
        else:
            spans.append((lo, hi))
    if not spans:
        return False
    spans.sort()
    reach = 0.0
    for lo, hi in spans:
        if lo > reach + tol:
            return False
        reach = max(reach, hi)
    return reach >= TWO_PI - tol


def is_proper(s: StarSet) -> bool:
    """True iff the boxes leave part of the cylinder uncovered (exact slab sweep)."""
    if s.empty:
        return True
    cuts = sorted(set(s.finite_rhos()))
    # probe each open slab and each breakpoint level
    levels: list[tuple[float, float]] = []
    edges = [-INF] + cuts + [INF]
    for lo, hi in zip(edges[:-1], edges[1:]):
        levels.append((lo, hi))
    levels.extend((c, c) for c in cuts)
    for lo, hi in levels:
        arcs = [b.arc for b in s.boxes if b.rho_lo <= lo and b.rho_hi >= hi]
        if not _arcs_cover_circle(arcs):
            return True
    return False


def _m_condition(s1: StarSet, s2: StarSet) -> bool:
    """closure(S1) x closure(S2) avoids (0, oo) and (oo, 0)."""
    return not (
        (s1.closure_has_zero and s2.closure_has_inf) or (s1.closure_has_inf and s2.closure_has_zero)
    )


def star_eligible(s1: StarSet, s2: StarSet) -> bool:
    if not (is_proper(s1) and is_proper(s2) and _m_condition(s1, s2)):
        return False
    return is_proper(set_product(s1, s2))


def convolvable(s1: StarSet, s2: StarSet) -> bool:
    # S1 n K S2^-1 is unbounded for some compact K exactly when one set runs to 0
    # while the other runs to oo; any angular mismatch is absorbed by choosing K.
    return _m_condition(s1, s2)


def strongly_convolvable(s1: StarSet, s2: StarSet) -> bool:
    return convolvable(s1, s2) and star_eligible(s1, s2)


def clusters(s: StarSet, gap: float = 0.0) -> list[StarSet]:
    """Connected groups of boxes (boxes closer than `gap` are joined)."""
    n = len(s.boxes)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if s.boxes[i].box_distance(s.boxes[j]) <= gap + ANGLE_TOL:
                parent[find(i)] = find(j)
    groups: dict[int, list[LogPolarBox]] = {}
    for i, b in enumerate(s.boxes):
        groups.setdefault(find(i), []).append(b)
    return [StarSet(tuple(g), s.label) for g in groups.values()]


# ---------------------------------------------------------------------------
# Serialization and presets
# ---------------------------------------------------------------------------


def _num_out(x: float):
    if x == INF:
        return "+inf"
    if x == -INF:
        return "-inf"
    return x


def parse_extended(x) -> float:
    if isinstance(x, str):
        t = x.strip().lower()
        if t in ("+inf", "inf", "infinity", "+infinity"):
            return INF
        if t in ("-inf", "-infinity"):
            return -INF
        return _parse_number(t)
    v = float(x)
    if math.isnan(v):
        raise ValueError("NaN is not an extended real")
    return v


_PI_RE = re.compile(r"^\s*([+-]?)\s*(?:([0-9.eE+-]+)\s*\*\s*)?pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def _parse_number(text: str) -> float:
    """Float literal, optionally a rational multiple of pi ('pi', '-pi/2', '3*pi/4')."""
    m = _PI_RE.match(text)
    if m:
        sign, mult, div = m.groups()
        v = math.pi * (float(mult) if mult else 1.0) / (float(div) if div else 1.0)
        return -v if sign == "-" else v
    return float(text)


def box_from_record(rec: dict) -> LogPolarBox:
    lo, hi = (parse_extended(v) for v in rec["rho"])
    arc_rec = rec.get("arc", "full")
    if isinstance(arc_rec, str):
        if arc_rec.strip().lower() != "full":
            raise ValueError(f"arc must be 'full' or [theta_lo, width], got {arc_rec!r}")
        arc = FULL_ARC
    else:
        theta_lo, width = (_parse_number(v) if isinstance(v, str) else float(v) for v in arc_rec)
        arc = Arc(theta_lo, width)
    return LogPolarBox(lo, hi, arc)


_UNREPRESENTABLE = ("factorial", "discrete", "sequence")


def preset(text: str) -> StarSet:
    """Named presets: ray, segment0, point, disk_complement, punctured_disk."""
    m = re.match(r"^\s*([a-z_0-9]+)\s*\((.*)\)\s*$", text.strip(), re.IGNORECASE)
    if not m:
        name, args = text.strip(), []
    else:
        name = m.group(1)
        args = [_parse_number(a) for a in m.group(2).split(",") if a.strip()]
    key = name.lower()
    if any(key.startswith(bad) for bad in _UNREPRESENTABLE):
        raise UnrepresentableSet(
            f"{text!r}: sets with infinitely many components cannot be written as a finite "
            "box union; replace it by a finite truncation or a covering box"
        )
    try:
        if key == "ray":
            angle, r0 = args
            return StarSet((LogPolarBox(math.log(r0), INF, Arc.point(angle)),), text.strip())
        if key == "segment0":
            angle, r0 = args
            return StarSet((LogPolarBox(-INF, math.log(r0), Arc.point(angle)),), text.strip())
        if key == "point":
            re_, im_ = args
            z = complex(re_, im_)
            r = math.log(abs(z))
            return StarSet((LogPolarBox(r, r, Arc.point(np.angle(z))),), text.strip())
        if key == "disk_complement":
            (s,) = args
            return StarSet((LogPolarBox(math.log(s), INF, FULL_ARC),), text.strip())
        if key == "punctured_disk":
            (t,) = args
            return StarSet((LogPolarBox(-INF, math.log(t), FULL_ARC),), text.strip())
        if key == "empty":
            return StarSet((), "empty")
    except ValueError as exc:
        raise ValueError(f"bad arguments for preset {text!r}: {exc}") from None
    raise ValueError(f"unknown set preset {name!r}")


def starset_from_record(rec) -> StarSet:
    if isinstance(rec, str):
        return preset(rec[len("preset:"):] if rec.startswith("preset:") else rec)
    boxes = tuple(box_from_record(b) for b in rec.get("boxes", []))
    return StarSet(boxes, rec.get("label", ""))


def point_set(z: complex, label: str = "") -> StarSet:
    r = math.log(abs(z))
    return StarSet((LogPolarBox(r, r, Arc.point(float(np.angle(z)))),), label or repr(complex(z)))


def sample_box(box: LogPolarBox, n: int, rng: np.random.Generator, window: float = 8.0) -> np.ndarray:
    """Uniform samples in the box's parameter rectangle (infinite ends clipped)."""
    lo = box.rho_lo if math.isfinite(box.rho_lo) else min(box.rho_hi, 0.0) - window
    hi = box.rho_hi if math.isfinite(box.rho_hi) else max(box.rho_lo, 0.0) + window
    rho = rng.uniform(lo, hi, n) if hi > lo else np.full(n, lo)
    th = box.arc.theta_lo + rng.uniform(0.0, box.arc.width, n) if box.arc.width > 0 else np.full(n, box.arc.theta_lo)
    return np.exp(rho + 1j * th)


def sample_set(s: StarSet, n: int, rng: np.random.Generator, window: float = 8.0) -> np.ndarray:
    idx = rng.integers(0, len(s.boxes), n)
    out = np.empty(n, dtype=complex)
    for k, box in enumerate(s.boxes):
        mask = idx == k
        if mask.any():
            out[mask] = sample_box(box, int(mask.sum()), rng, window)
    return out


def bounding_rhos(sets: Sequence[StarSet], extra: Iterable[float] = ()) -> tuple[float, float]:
    vals = [r for s in sets for r in s.finite_rhos()] + [float(v) for v in extra]
    if not vals:
        return 0.0, 0.0
    return min(vals), max(vals)
