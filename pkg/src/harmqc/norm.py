"""Estimating the Schwarzian norm ``sup_D |S_f| / lambda_D**2``.

The supremum is often approached only at the boundary (for ``z + conj(z**2)/2``
on the unit disk the pointwise quantity is ``1.5 |z|**2``), so the estimate
records a boundary trend instead of claiming convergence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domains import Annulus, CircleDomain, Disk, Domain
from .errors import UnsupportedPair
from .harmonic import HarmonicMap, schwarzian_array
from .hyperbolic import density_array

SATURATING = "saturating"
INCREASING = "increasing"


@dataclass(frozen=True)
class NormBudget:
    n_r: int = 64
    n_theta: int = 64
    max_refinements: int = 6
    rel_tol: float = 1e-3

    def __post_init__(self):
        if min(self.n_r, self.n_theta) < 2 or self.max_refinements < 0 or not self.rel_tol > 0:
            raise ValueError(f"invalid norm budget {self}")


@dataclass
class NormEstimate:
    value: float
    argmax: complex
    samples: int
    refinement_depth: int
    boundary_trend: str
    # (sup of lower, sup of upper) pointwise bounds; only for circle domains
    bounds: Optional[tuple] = None
    sample_z: np.ndarray = field(default=None, repr=False)
    sample_values: np.ndarray = field(default=None, repr=False)


def pointwise_norm(f: HarmonicMap, z):
    """``|S_f(z)| / lambda(z)**2`` with its lower/upper variants (equal unless circle domain)."""
    S = np.abs(schwarzian_array(f, z))
    lam, lo, hi = density_array(f.domain, z)
    return S / lam ** 2, S / hi ** 2, S / lo ** 2


class _Cells:
    """Leaf cells of the adaptive polar subdivision (normalized radius s, angle t)."""

    def __init__(self):
        self.s = np.empty(0)
        self.t = np.empty(0)
        self.ds = np.empty(0)
        self.dt = np.empty(0)
        self.val = np.empty(0)

    def extend(self, s, t, ds, dt, val):
        self.s = np.concatenate([self.s, s])
        self.t = np.concatenate([self.t, t])
        self.ds = np.concatenate([self.ds, ds])
        self.dt = np.concatenate([self.dt, dt])
        self.val = np.concatenate([self.val, val])

    def remove(self, idx):
        keep = np.ones(self.s.size, dtype=bool)
        keep[idx] = False
        for name in ("s", "t", "ds", "dt", "val"):
            setattr(self, name, getattr(self, name)[keep])


def _ring_s(domain: Domain, delta: float):
    if isinstance(domain, Annulus):
        return [delta, 1.0 - delta]
    return [1.0 - delta]


def schwarzian_norm(f: HarmonicMap, budget: NormBudget = NormBudget()) -> NormEstimate:
    """Adaptive sup of ``lambda**-2 |S_f|`` over ``f.domain``.

    Start from a cell-centered polar grid; each round splits the top decile of
    leaf cells in four and adds a ring of cells at a tenfold smaller distance
    from the boundary (floored at the map's margin).  Stops once the running
    max moves by less than ``rel_tol`` or the rounds run out.
    """
    domain = f.domain
    margin = f.margin
    zs, vals, los, his = [], [], [], []

    def evaluate(s, t):
        s = np.clip(s, margin, 1.0 - margin)
        z = domain.polar_point(s, t)
        ok = np.asarray(domain.contains(z), dtype=bool)
        ok &= domain.dist_to_boundary(z) >= margin * domain.scale * 0.5
        v = np.full(z.shape, -np.inf)
        if np.any(ok):
            mid, lo, hi = pointwise_norm(f, z[ok])
            v[ok] = mid
            zs.append(z[ok])
            vals.append(mid)
            los.append(lo)
            his.append(hi)
        return v

    cells = _Cells()
    n_r, n_t = budget.n_r, budget.n_theta
    s0 = (np.arange(n_r) + 0.5) / n_r
    t0 = 2 * np.pi * (np.arange(n_t) + 0.5) / n_t
    S, T = (a.ravel() for a in np.meshgrid(s0, t0, indexing="ij"))
    cells.extend(S, T, np.full(S.size, 1.0 / n_r), np.full(S.size, 2 * np.pi / n_t), evaluate(S, T))

    def running_max():
        return max((float(np.max(v)) for v in vals), default=0.0)

    ring_max = []
    best = running_max()
    delta = 0.5 / n_r
    depth = 0
    for depth in range(1, budget.max_refinements + 1):
        finite = np.isfinite(cells.val)
        k = max(1, int(np.ceil(0.1 * np.count_nonzero(finite))))
        order = np.argsort(np.where(finite, cells.val, -np.inf), kind="stable")[::-1][:k]
        order = order[np.isfinite(cells.val[order])]
        s, t, ds, dt = cells.s[order], cells.t[order], cells.ds[order], cells.dt[order]
        cells.remove(order)
        cs = np.concatenate([s - ds / 4, s - ds / 4, s + ds / 4, s + ds / 4])
        ct = np.concatenate([t - dt / 4, t + dt / 4, t - dt / 4, t + dt / 4])
        cds = np.tile(ds / 2, 4)
        cdt = np.tile(dt / 2, 4)
        cells.extend(cs, ct, cds, cdt, evaluate(cs, ct))

        delta = max(delta / 10, margin)
        rs = np.concatenate([np.full(n_t, x) for x in _ring_s(domain, delta)])
        rt = np.tile(t0, len(_ring_s(domain, delta)))
        if isinstance(domain, CircleDomain):
            rz = domain.ring(delta, n_t)
            rv = np.full(rz.size, -np.inf)
            if rz.size:
                mid, lo, hi = pointwise_norm(f, rz)
                rv = mid
                zs.append(rz)
                vals.append(mid)
                los.append(lo)
                his.append(hi)
            ring_max.append(float(np.max(rv)) if rv.size else 0.0)
        else:
            rv = evaluate(rs, rt)
            cells.extend(rs, rt, np.full(rs.size, delta), np.full(rs.size, 2 * np.pi / n_t), rv)
            ring_max.append(float(np.max(rv)))

        new = running_max()
        change = new - best
        best = new
        if change <= budget.rel_tol * max(abs(best), 1e-300):
            break

    z_all = np.concatenate(zs)
    v_all = np.concatenate(vals)
    i = int(np.argmax(v_all))
    value = float(v_all[i])
    trend = SATURATING
    if len(ring_max) >= 2 and value > 0:
        growing = ring_max[-1] > ring_max[-2] * (1 + 1e-9) + 1e-12
        at_edge = ring_max[-1] >= (1 - budget.rel_tol) * value
        if growing and at_edge:
            trend = INCREASING
    bounds = None
    if isinstance(domain, CircleDomain):
        bounds = (float(np.max(np.concatenate(los))), float(np.max(np.concatenate(his))))
    return NormEstimate(value, complex(z_all[i]), int(v_all.size), depth, trend, bounds,
                        z_all, v_all)


@dataclass
class MonotonicityReport:
    norm_sub: float
    norm_super: float
    tol: float
    passed: bool
    strict: bool


def monotonicity_check(f: HarmonicMap, sub: Domain, sup: Domain,
                       budget: NormBudget = NormBudget()) -> MonotonicityReport:
    """Check ``||S_f||_sub <= ||S_f||_sup`` for a nested pair of disks or annuli."""
    if isinstance(sub, CircleDomain) or isinstance(sup, CircleDomain):
        raise UnsupportedPair("inclusion of circle domains is not verified")
    if not (isinstance(sub, (Disk, Annulus)) and sub.is_subdomain_of(sup)):
        raise UnsupportedPair(f"cannot verify {sub} is contained in {sup}")
    f_sub = HarmonicMap(f.h, f.g, sub, f.margin, check=False)
    f_sup = f if f.domain == sup else HarmonicMap(f.h, f.g, sup, f.margin, check=f.check)
    a = schwarzian_norm(f_sub, budget).value
    b = schwarzian_norm(f_sup, budget).value
    tol = budget.rel_tol * b + 1e-12
    return MonotonicityReport(a, b, tol, a <= b + tol, a < b - tol)
