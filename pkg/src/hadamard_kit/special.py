"""Principal log(1+z) and dilogarithm, vectorized over complex arrays."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli

from .errors import BranchCut

PI2_6 = math.pi**2 / 6.0

_SERIES_TERMS = 64  # 2**-64 / 64**2 < 1e-17 on |z| <= 1/2
_N_BERN = 40
# coefficients B_n / (n+1)! of the expansion Li2 = sum B_n u^(n+1)/(n+1)!, u = -log(1-z)
_BERN_COEF = np.array(
    [b / math.factorial(n + 1) for n, b in enumerate(bernoulli(_N_BERN))], dtype=float
)


def log1p(w):
    """Principal log(1 + w), accurate for small |w|."""
    w = np.asarray(w, dtype=complex)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    small = np.abs(w) < 1e-4
    out = np.log(np.where(small, 1.0, 1.0 + w))
    if np.any(small):
        ws = w[small]
        # |w| < 1e-4: five terms leave an error below |w|^6/6
        acc = ws - ws**2 / 2 + ws**3 / 3 - ws**4 / 4 + ws**5 / 5
        out[small] = acc
    return out[0] if scalar else out


def li2_series(z):
    """sum_{n>=1} z^n / n^2; meant for |z| <= 1/2."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for n in range(_SERIES_TERMS, 0, -1):
        acc = z * (1.0 / n**2 + acc)
    return acc


def li2_bernoulli(z):
    """Bernoulli expansion in u = -log(1-z); meant for |z| <= 1, Re z <= 1/2."""
    z = np.asarray(z, dtype=complex)
    u = -log1p(-z)
    acc = np.zeros_like(u)
    for c in _BERN_COEF[::-1]:
        acc = acc * u + c
    return acc * u


def _li2_unit_disk(z):
    """Li2 on |z| <= 1 by series, Bernoulli expansion or reflection."""
    out = np.empty_like(z)
    a = np.abs(z) <= 0.5
    out[a] = li2_series(z[a])
    mid = ~a
    b = mid & (z.real <= 0.5)
    out[b] = li2_bernoulli(z[b])
    c = mid & ~b
    if np.any(c):
        zc = z[c]
        # reflection: Li2(z) = pi^2/6 - log z log(1-z) - Li2(1-z)
        out[c] = PI2_6 - np.log(zc) * log1p(-zc) - li2_bernoulli(1.0 - zc)
    return out


def li2(z):
    """Principal dilogarithm, holomorphic on C minus [1, oo)."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    inside = np.abs(z) <= 1.0
    out[inside] = _li2_unit_disk(z[inside])
    outside = ~inside
    if np.any(outside):
        zo = z[outside]
        # inversion: Li2(z) = -pi^2/6 - log(-z)^2 / 2 - Li2(1/z), z not in (0, 1]
        lg = np.log(-zo)
        out[outside] = -PI2_6 - 0.5 * lg * lg - _li2_unit_disk(1.0 / zo)
    return out[0] if scalar else out


def check_log_cut(w, tol: float):
    """Raise BranchCut if some w lies within tol (relative) of (-oo, 0]."""
    w = np.asarray(w, dtype=complex)
    bad = (w.real <= 0) & (np.abs(w.imag) <= tol * np.maximum(1.0, np.abs(w)))
    if np.any(bad):
        raise BranchCut(f"log argument on its principal cut at {w[bad].ravel()[0]!r}")


def check_li2_cut(w, tol: float):
    """Raise BranchCut if some w lies within tol (relative) of [1, oo)."""
    w = np.asarray(w, dtype=complex)
    bad = (w.real >= 1 - tol) & (np.abs(w.imag) <= tol * np.maximum(1.0, np.abs(w)))
    if np.any(bad):
        raise BranchCut(f"li2 argument on its principal cut at {w[bad].ravel()[0]!r}")
