"""Planar harmonic maps ``f = h + conj(g)``.

With ``f_z = h'`` and ``f_zbar = conj(g')`` the Jacobian is
``J = |h'|**2 - |g'|**2`` and the (second complex) dilatation is
``omega = g'/h'``.  The harmonic Schwarzian is ``rho_zz - rho_z**2 / 2`` with
``rho = log J``.  Writing ``N = h'' conj(h') - g'' conj(g')`` and
``N_z = h''' conj(h') - g''' conj(g')`` one gets ``rho_z = N/J`` and
``rho_zz = N_z/J - (N/J)**2``, hence the closed form

    S = N_z / J - 1.5 * (N / J)**2

which :func:`schwarzian_fd` checks by finite differences of ``log J``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domains import DEFAULT_MARGIN, Domain
from .errors import (DegenerateDerivative, DilatationBoundError, NonPositiveJacobian,
                     OutOfValidity, StencilOutsideDomain)
from .series import LaurentSeries, series_contains

DERIV_TOL = 1e-12
VALIDATION_GRID = 32


@dataclass(frozen=True)
class HarmonicMap:
    """``f = h + conj(g)`` on ``domain``.

    On construction both series must cover the domain, and the dilatation is
    checked on a coarse polar grid plus near-boundary rings; ``sup |omega| >= 1``
    raises :class:`DilatationBoundError`.  Pass ``check=False`` to build a
    diagnostic object that skips the dilatation check (e.g. to exhibit a
    local-univalence failure).
    """

    h: LaurentSeries
    g: LaurentSeries
    domain: Domain
    margin: float = DEFAULT_MARGIN
    check: bool = field(default=True, compare=False)

    def __post_init__(self):
        for name, s in (("h", self.h), ("g", self.g)):
            if not series_contains(s, self.domain, self.margin):
                raise OutOfValidity(
                    f"series {name} with validity ({s.r_inner:g}, {s.r_outer:g}) "
                    f"does not cover the {self.domain.kind} sampling region")
        if self.check:
            z = validation_points(self.domain, VALIDATION_GRID, self.margin)
            hp = self.h.jets(z, 1)[1]
            gp = self.g.jets(z, 1)[1]
            ah, ag = np.abs(hp), np.abs(gp)
            bad = (ag >= ah) & (np.maximum(ah, ag) > DERIV_TOL)
            if np.any(bad):
                i = int(np.argmax(bad))
                raise DilatationBoundError(
                    f"|omega| = {ag[i] / ah[i] if ah[i] else math.inf:.6g} >= 1 on the "
                    "validation grid; f is not a sense-preserving harmonic map here",
                    where=z[i])

    def __call__(self, z, boundary: bool = False):
        return self.h(z, boundary) + np.conj(self.g(z, boundary))

    def derivatives(self, z, boundary: bool = False):
        """``(h-jets, g-jets)``, each a list ``[s, s', s'', s''']`` of arrays."""
        return self.h.jets(z, 3, boundary), self.g.jets(z, 3, boundary)


def validation_points(domain: Domain, n: int, margin: float = DEFAULT_MARGIN) -> np.ndarray:
    """Polar grid plus rings approaching the boundary down to ``margin``."""
    pts = [domain.sample_grid(n, margin)]
    delta = 0.5 / n
    while delta > margin:
        delta = max(delta / 10, margin)
        pts.append(domain.ring(delta, n))
    return np.concatenate(pts)


def affine_compose(f: HarmonicMap, alpha, beta, gamma=0j, check: bool = True) -> HarmonicMap:
    """``A o f`` for ``A(w) = alpha w + beta conj(w) + gamma`` with ``|alpha| > |beta|``."""
    alpha, beta, gamma = complex(alpha), complex(beta), complex(gamma)
    if not abs(alpha) > abs(beta):
        raise ValueError("affine post-composition needs |alpha| > |beta|")
    h = (alpha * f.h + beta * f.g).add_constant(gamma)
    g = alpha.conjugate() * f.g + beta.conjugate() * f.h
    return HarmonicMap(h, g, f.domain, f.margin, check)


def rotate_argument(f: HarmonicMap, theta: float) -> HarmonicMap:
    """``f(exp(i theta) z)``; the domain must be rotation invariant about 0."""
    return HarmonicMap(f.h.rotate_argument(theta), f.g.rotate_argument(theta),
                       f.domain, f.margin, f.check)


# pointwise quantities ----------------------------------------------------

def _first_bad(mask, z):
    z = np.atleast_1d(z)
    return z[int(np.argmax(np.atleast_1d(mask)))]


def jacobian_array(f: HarmonicMap, z, boundary: bool = False):
    hp = f.h.jets(z, 1, boundary)[1]
    gp = f.g.jets(z, 1, boundary)[1]
    return np.abs(hp) ** 2 - np.abs(gp) ** 2


def jacobian(f: HarmonicMap, z) -> float:
    """``|h'(z)|**2 - |g'(z)|**2``; raises if not positive."""
    J = float(jacobian_array(f, complex(z)))
    if not J > 0:
        raise NonPositiveJacobian(f"J_f = {J:.6g} <= 0", where=z)
    return J


def dilatation_array(f: HarmonicMap, z):
    hp = f.h.jets(z, 1)[1]
    gp = f.g.jets(z, 1)[1]
    small = np.abs(hp) < DERIV_TOL
    if np.any(small):
        raise DegenerateDerivative("h'(z) vanishes; dilatation undefined",
                                   where=_first_bad(small, z))
    return gp / hp


def dilatation(f: HarmonicMap, z) -> complex:
    """``g'(z)/h'(z)``, i.e. ``conj(f_zbar)/f_z``."""
    return complex(dilatation_array(f, complex(z)))


def schwarzian_array(f: HarmonicMap, z):
    """Closed-form harmonic Schwarzian at an array of points."""
    (_, h1, h2, h3), (_, g1, g2, g3) = f.derivatives(z)
    J = np.abs(h1) ** 2 - np.abs(g1) ** 2
    bad = ~(J > 0)
    if np.any(bad):
        w = _first_bad(bad, z)
        raise NonPositiveJacobian(f"J_f <= 0 where the Schwarzian was requested", where=w)
    N = h2 * np.conj(h1) - g2 * np.conj(g1)
    Nz = h3 * np.conj(h1) - g3 * np.conj(g1)
    q = N / J
    return Nz / J - 1.5 * q * q


def schwarzian(f: HarmonicMap, z) -> complex:
    return complex(schwarzian_array(f, complex(z)))


def classical_schwarzian(h: LaurentSeries, z):
    """``h'''/h' - 1.5 (h''/h')**2`` for analytic ``h``; complex for scalar ``z``."""
    zz = np.asarray(z, dtype=complex)
    _, h1, h2, h3 = h.jets(zz)
    s = h3 / h1 - 1.5 * (h2 / h1) ** 2
    return complex(s) if zz.ndim == 0 else s


# finite-difference oracle -------------------------------------------------

# 4th-order central first derivative on offsets -2h, -h, h, 2h
_FD_OFFSETS = np.array([-2.0, -1.0, 1.0, 2.0])
_FD_WEIGHTS = np.array([1.0, -8.0, 8.0, -1.0]) / 12.0


def _dz_stencil(step):
    """Offsets and weights of d/dz = (d/dx - i d/dy)/2 as a linear stencil."""
    offs = np.concatenate([_FD_OFFSETS * step, 1j * _FD_OFFSETS * step])
    wts = np.concatenate([_FD_WEIGHTS / step, -1j * _FD_WEIGHTS / step]) / 2
    return offs, wts


def default_fd_step(z) -> float:
    return max(1e-4, 1e-6 * max(1.0, abs(complex(z))))


def schwarzian_fd(f: HarmonicMap, z, step: Optional[float] = None) -> complex:
    """Harmonic Schwarzian from central differences of ``rho = log J``.

    ``rho_z`` and ``rho_zz`` come from applying a 4th-order difference
    approximation of ``d/dz`` once and twice; only values of ``J`` are used.
    """
    z = complex(z)
    step = default_fd_step(z) if step is None else float(step)
    offs, wts = _dz_stencil(step)
    pts1 = z + offs
    pts2 = pts1[:, None] + offs[None, :]
    stencil = np.concatenate([pts1, pts2.ravel()])
    inside = f.domain.contains(stencil)
    if not np.all(inside):
        raise StencilOutsideDomain(f"stencil of step {step:g} leaves the domain", where=z)
    try:
        J2 = jacobian_array(f, pts2)
    except OutOfValidity as exc:
        raise StencilOutsideDomain(str(exc), where=z) from exc
    if not np.all(J2 > 0):
        raise NonPositiveJacobian("J_f <= 0 on the difference stencil", where=z)
    rho2 = np.log(J2)
    rho_z_at = rho2 @ wts  # rho_z at each first-level stencil point
    rho_zz = rho_z_at @ wts
    rho_z = np.log(jacobian_array(f, pts1)) @ wts
    return complex(rho_zz - 0.5 * rho_z * rho_z)


# scans -------------------------------------------------------------------

@dataclass
class DilatationEstimate:
    value: float
    argmax: complex
    samples: int


def dilatation_sup(f: HarmonicMap, grid: int = 64, margin: Optional[float] = None) -> DilatationEstimate:
    """Sup of ``|omega|`` over a polar grid plus rings shrinking toward the boundary."""
    margin = f.margin if margin is None else margin
    z = validation_points(f.domain, grid, margin)
    a = np.abs(dilatation_array(f, z))
    i = int(np.argmax(a))
    return DilatationEstimate(float(a[i]), complex(z[i]), int(z.size))


@dataclass
class UnivalenceReport:
    passed: bool
    min_jacobian: float
    argmin: complex
    samples: int
    witness: Optional[complex] = None


def local_univalence_scan(f: HarmonicMap, grid: int = 64) -> UnivalenceReport:
    """Check ``J > 0`` on a polar grid; the first violating point is the witness."""
    z = f.domain.sample_grid(grid, f.margin)
    J = jacobian_array(f, z)
    i = int(np.argmin(J))
    bad = ~(J > 0)
    witness = complex(z[int(np.argmax(bad))]) if np.any(bad) else None
    return UnivalenceReport(not np.any(bad), float(J[i]), complex(z[i]), int(z.size), witness)
