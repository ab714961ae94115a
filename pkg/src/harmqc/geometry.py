"""Numerical certification of image curves: tracing, Jordan test, bounded turning, injectivity.

A closed curve ``C`` has bounded turning with constant ``K`` when, for any two
of its points, the smaller of the two complementary arcs has diameter at most
``K`` times their distance.  For Jordan curves this is equivalent to being a
quasicircle, so a finite, resolution-stable constant is used as the numerical
stand-in for quasicircularity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .domains import Circle
from .errors import NotJordan
from .harmonic import HarmonicMap

_EPS = 2.0 ** -53
_CCW_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS
STABILITY_TOL = 0.20


@dataclass(frozen=True)
class ClosedPolyline:
    """Implicitly closed polyline; ``params`` optionally records the curve parameter."""

    points: np.ndarray
    params: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self):
        p = np.asarray(self.points, dtype=complex).ravel()
        object.__setattr__(self, "points", p)
        if p.size < 3:
            raise ValueError("a closed polyline needs at least 3 points")
        if not np.all(np.isfinite(p)):
            raise ValueError("polyline has non-finite points")
        if np.any(p == np.roll(p, -1)):
            raise ValueError("consecutive polyline points coincide")

    def __len__(self):
        return self.points.size

    def transformed(self, a, b=0j) -> ClosedPolyline:
        return ClosedPolyline(a * self.points + b, self.params)


# exact predicates ----------------------------------------------------------

def _orient_exact(ax, ay, bx, by, cx, cy) -> int:
    F = Fraction
    det = (F(ax) - F(cx)) * (F(by) - F(cy)) - (F(ay) - F(cy)) * (F(bx) - F(cx))
    return (det > 0) - (det < 0)


def orient(a, b, c) -> np.ndarray:
    """Sign of the orientation determinant of ``(a, b, c)``, exact for float input.

    A floating-point filter settles most cases; the rest are redone in rational
    arithmetic.
    """
    a, b, c = np.broadcast_arrays(np.asarray(a, complex), np.asarray(b, complex), np.asarray(c, complex))
    scalar = a.ndim == 0
    a, b, c = np.atleast_1d(a), np.atleast_1d(b), np.atleast_1d(c)
    ax, ay, bx, by, cx, cy = a.real, a.imag, b.real, b.imag, c.real, c.imag
    left = (ax - cx) * (by - cy)
    right = (ay - cy) * (bx - cx)
    det = left - right
    bound = _CCW_ERRBOUND * (np.abs(left) + np.abs(right))
    sign = np.sign(det).astype(int)
    unsure = np.abs(det) <= bound
    for idx in zip(*np.nonzero(unsure)):
        sign[idx] = _orient_exact(ax[idx], ay[idx], bx[idx], by[idx], cx[idx], cy[idx])
    return int(sign[0]) if scalar else sign


def _on_segment(p, q, r):
    """For collinear ``p, q, r``: is ``r`` within the bounding box of ``pq``."""
    return ((np.minimum(p.real, q.real) <= r.real) & (r.real <= np.maximum(p.real, q.real))
            & (np.minimum(p.imag, q.imag) <= r.imag) & (r.imag <= np.maximum(p.imag, q.imag)))


def segments_intersect(p1, p2, p3, p4) -> np.ndarray:
    """Closed-segment intersection test for ``[p1, p2]`` vs ``[p3, p4]`` (vectorized)."""
    d1 = orient(p3, p4, p1)
    d2 = orient(p3, p4, p2)
    d3 = orient(p1, p2, p3)
    d4 = orient(p1, p2, p4)
    proper = (d1 * d2 < 0) & (d3 * d4 < 0)
    touch = ((d1 == 0) & _on_segment(p3, p4, p1)) | ((d2 == 0) & _on_segment(p3, p4, p2)) \
        | ((d3 == 0) & _on_segment(p1, p2, p3)) | ((d4 == 0) & _on_segment(p1, p2, p4))
    return proper | touch


# Jordan test ---------------------------------------------------------------

@dataclass
class JordanResult:
    jordan: bool
    witness: Optional[tuple] = None  # (i, j): segments [p_i, p_i+1] and [p_j, p_j+1]

    def __bool__(self):
        return self.jordan


def is_jordan(curve: ClosedPolyline, chunk: int = 256) -> JordanResult:
    """True iff no two non-adjacent segments meet and adjacent ones share only their vertex."""
    p = curve.points
    n = p.size
    a, b = p, np.roll(p, -1)
    c = np.roll(p, -2)

    # adjacent segments overlap only if the path folds back on itself
    col = orient(a, b, c) == 0
    for i in np.nonzero(col)[0]:
        u, v = a[i] - b[i], c[i] - b[i]
        dot = Fraction(u.real) * Fraction(v.real) + Fraction(u.imag) * Fraction(v.imag)
        if dot > 0:
            return JordanResult(False, (int(i), int((i + 1) % n)))

    xmin, xmax = np.minimum(a.real, b.real), np.maximum(a.real, b.real)
    ymin, ymax = np.minimum(a.imag, b.imag), np.maximum(a.imag, b.imag)
    for start in range(0, n, chunk):
        i = np.arange(start, min(start + chunk, n))[:, None]
        j = np.arange(n)[None, :]
        cand = (j > i + 1) & ~((i == 0) & (j == n - 1))
        cand &= (xmin[i] <= xmax[j]) & (xmin[j] <= xmax[i]) & (ymin[i] <= ymax[j]) & (ymin[j] <= ymax[i])
        ii, jj = np.nonzero(cand)
        if ii.size == 0:
            continue
        ii = ii + start
        hit = segments_intersect(a[ii], b[ii], a[jj], b[jj])
        if np.any(hit):
            k = int(np.argmax(hit))
            return JordanResult(False, (int(ii[k]), int(jj[k])))
    return JordanResult(True)


# bounded turning -----------------------------------------------------------

@dataclass
class TurningResult:
    constant: float
    pair: tuple


def bounded_turning_detail(curve: ClosedPolyline, check_jordan: bool = True) -> TurningResult:
    """Exact three-point constant over all vertex pairs.

    ``A[L, i]`` is the diameter of the arc ``p_i, ..., p_{i+L}`` (indices mod n),
    filled by ``A[L, i] = max(A[L-1, i], A[L-1, i+1], |p_i - p_{i+L}|)``; each
    pair ``(i, i+L)`` then needs only two table lookups.
    """
    if check_jordan:
        res = is_jordan(curve)
        if not res:
            raise NotJordan(f"curve is not Jordan; segments {res.witness} meet")
    p = curve.points
    n = p.size
    idx = np.arange(n)
    D = np.abs(p[:, None] - p[None, :])
    A = np.zeros((n + 1, n))
    for L in range(1, n + 1):
        A[L] = np.maximum(np.maximum(A[L - 1], np.roll(A[L - 1], -1)), D[idx, (idx + L) % n])
    best, pair = 1.0, (0, 1 % n)
    for L in range(1, n):
        j = (idx + L) % n
        ratio = np.minimum(A[L], A[n - L][j]) / D[idx, j]
        k = int(np.argmax(ratio))
        if ratio[k] > best:
            best, pair = float(ratio[k]), (k, int(j[k]))
    return TurningResult(best, pair)


def bounded_turning(curve: ClosedPolyline) -> float:
    """Bounded-turning constant (>= 1); raises :class:`NotJordan` for non-Jordan input."""
    return bounded_turning_detail(curve).constant


# tracing and certificates --------------------------------------------------

def trace_boundary(f: HarmonicMap, circle: Circle, n: int) -> ClosedPolyline:
    """``f`` sampled at ``n`` equally spaced points of a boundary circle (radial limits)."""
    theta = 2 * np.pi * np.arange(n) / n
    return ClosedPolyline(_trace_points(f, circle, n), theta)


@dataclass
class CurveCertificate:
    jordan: bool
    turning_constant: Optional[float]
    sample_count: int
    witness: Optional[tuple] = None
    turning_constants: tuple = ()
    sample_counts: tuple = ()
    stable: Optional[bool] = None

    @property
    def certified(self) -> bool:
        return bool(self.jordan and self.stable)


def certify_curves(coarse, fine) -> CurveCertificate:
    """Jordan test and bounded turning at two resolutions of the same curve.

    Accepts polylines or raw point arrays; an image with a repeated consecutive
    vertex is reported as non-Jordan with that vertex pair as witness.
    """
    curves = []
    for c in (coarse, fine):
        if isinstance(c, ClosedPolyline):
            curves.append(c)
            continue
        p = np.asarray(c, dtype=complex).ravel()
        rep = np.nonzero(p == np.roll(p, -1))[0]
        if rep.size:
            i = int(rep[0])
            return CurveCertificate(False, None, p.size, (i, (i + 1) % p.size), (), (), None)
        curves.append(ClosedPolyline(p))
    coarse, fine = curves
    counts = (len(coarse), len(fine))
    for c in (coarse, fine):
        res = is_jordan(c)
        if not res:
            return CurveCertificate(False, None, len(c), res.witness, (), counts, None)
    k1 = bounded_turning_detail(coarse, check_jordan=False).constant
    k2 = bounded_turning_detail(fine, check_jordan=False).constant
    stable = abs(k2 - k1) <= STABILITY_TOL * k1
    return CurveCertificate(True, k2, len(fine), None, (k1, k2), counts, stable)


def _trace_points(f: HarmonicMap, circle: Circle, n: int) -> np.ndarray:
    theta = 2 * np.pi * np.arange(n) / n
    return f(circle.center + circle.radius * np.exp(1j * theta), boundary=True)


def quasicircle_report(f: HarmonicMap, circle: Circle, n: int = 256) -> CurveCertificate:
    """Trace ``f`` on ``circle`` at ``n`` and ``2n`` samples and certify the image curve.

    The certificate flags instability when the two turning constants differ by
    more than 20%.
    """
    return certify_curves(_trace_points(f, circle, n), _trace_points(f, circle, 2 * n))


# injectivity ----------------------------------------------------------------

@dataclass
class InjectivityResult:
    passed: bool
    samples: int
    tol: float
    separation: float
    witness: Optional[tuple] = None  # (z1, z2)
    gap: Optional[float] = None  # |f(z1) - f(z2)|


_FORWARD = ((0, 0), (1, -1), (1, 0), (1, 1), (0, 1))


def close_pairs(w: np.ndarray, tol: float):
    """Index pairs ``(i, j)``, ``i < j``, with ``|w_i - w_j| < tol``, via a uniform spatial hash."""
    kx = np.floor(w.real / tol).astype(np.int64)
    ky = np.floor(w.imag / tol).astype(np.int64)
    buckets: dict = {}
    for i, key in enumerate(zip(kx.tolist(), ky.tolist())):
        buckets.setdefault(key, []).append(i)
    out_i, out_j = [], []
    for (cx, cy), members in buckets.items():
        for dx, dy in _FORWARD:
            other = members if (dx, dy) == (0, 0) else buckets.get((cx + dx, cy + dy))
            if other is None:
                continue
            mi = np.array(members)
            oj = np.array(other)
            d = np.abs(w[mi][:, None] - w[oj][None, :])
            ii, jj = np.nonzero(d < tol)
            if (dx, dy) == (0, 0):
                keep = ii < jj
                ii, jj = ii[keep], jj[keep]
            out_i.append(mi[ii])
            out_j.append(oj[jj])
    if not out_i:
        return np.empty(0, int), np.empty(0, int)
    a, b = np.concatenate(out_i), np.concatenate(out_j)
    return np.minimum(a, b), np.maximum(a, b)


def injectivity_params(f: HarmonicMap, w: np.ndarray, tol=None, separation=None):
    if tol is None:
        span = math.hypot(np.ptp(w.real), np.ptp(w.imag)) if w.size else 0.0
        tol = 1e-6 * span if span > 0 else 1e-12
    if separation is None:
        separation = 1e-2 * f.domain.diameter
    return tol, separation


def grid_injectivity(f: HarmonicMap, grid: int = 200, tol: Optional[float] = None,
                     separation: Optional[float] = None,
                     points: Optional[np.ndarray] = None) -> InjectivityResult:
    """Search the images of grid points for collisions.

    A witness is a pair with ``|f(z1) - f(z2)| < tol`` and ``|z1 - z2| > separation``;
    the closest such image pair is reported after recomputing both images
    pointwise.  ``points`` overrides the default ``grid x grid`` polar grid.
    """
    z = f.domain.sample_grid(grid, f.margin) if points is None else np.asarray(points, complex).ravel()
    w = f(z)
    tol, separation = injectivity_params(f, w, tol, separation)
    i, j = close_pairs(w, tol)
    far = np.abs(z[i] - z[j]) > separation
    i, j = i[far], j[far]
    if i.size:
        gaps = np.abs(w[i] - w[j])
        for k in np.lexsort((j, i, gaps)):
            z1, z2 = complex(z[i[k]]), complex(z[j[k]])
            gap = abs(complex(f(z1)) - complex(f(z2)))
            if gap < tol:
                return InjectivityResult(False, z.size, tol, separation, (z1, z2), gap)
    return InjectivityResult(True, z.size, tol, separation)
