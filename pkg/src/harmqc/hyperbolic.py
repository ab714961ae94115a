"""Hyperbolic metric densities.

Normalization: the unit disk carries ``|dz| / (1 - |z|**2)`` (curvature -4).
Disks and annuli have closed forms; the annulus formula is cross-checked
against an explicit universal covering map (:func:`covering_pullback`).  For
circle domains only two-sided bounds are available, obtained by comparing with
an inscribed disk (from above) and with the complement of each boundary circle
(from below).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .domains import Annulus, Circle, CircleDomain, Disk, Domain
from .errors import OutsideDomain


@dataclass(frozen=True)
class DensityValue:
    lam: float
    bounds: Optional[tuple] = None

    @property
    def exact(self) -> bool:
        return self.bounds is None


def _outside(z, what):
    z = np.asarray(z)
    return OutsideDomain(f"point not in {what}", where=complex(z.ravel()[0]) if z.size else None)


def density_disk(z, r: float = 1.0, c: complex = 0j):
    """``r / (r**2 - |z - c|**2)``; reduces to ``1/(1 - |z|**2)`` on the unit disk."""
    d2 = np.abs(np.asarray(z) - c) ** 2
    if np.any(d2 >= r * r):
        raise _outside(np.asarray(z)[np.asarray(d2 >= r * r)] if np.ndim(z) else z, f"disk |z-{c}|<{r}")
    out = r / (r * r - d2)
    return float(out) if np.ndim(out) == 0 else out


def density_annulus(z, R: float):
    """Density of ``1 < |z| < R``: ``(pi / (2 L)) / (|z| sin(pi log|z| / L))``, ``L = log R``."""
    rho = np.abs(np.asarray(z))
    bad = (rho <= 1.0) | (rho >= R)
    if np.any(bad):
        raise _outside(np.asarray(z)[bad] if np.ndim(z) else z, f"annulus 1<|z|<{R}")
    L = math.log(R)
    out = (math.pi / (2 * L)) / (rho * np.sin(math.pi * np.log(rho) / L))
    return float(out) if np.ndim(out) == 0 else out


def covering_pullback(w, R: float):
    """Universal covering ``pi`` of the annulus ``1 < |z| < R`` by the unit disk.

    The disk goes to the strip ``|Im t| < L/2`` by ``t = (L/pi) log((1 + i w)/(1 - i w))``,
    then to the annulus by ``z = exp(L/2 - i t)``.  ``pi(0) = sqrt(R)`` and real
    ``w`` land on the positive real axis.  Returns ``(pi(w), pi'(w))``.
    """
    w = np.asarray(w, dtype=complex)
    L = math.log(R)
    t = (L / math.pi) * np.log((1 + 1j * w) / (1 - 1j * w))
    z = np.exp(L / 2 - 1j * t)
    dz = z * (2 * L / math.pi) / (1 + w * w)
    if z.ndim == 0:
        return complex(z), complex(dz)
    return z, dz


def _exterior_density(z, c: Circle):
    # complement of the closed disk (a disk on the sphere)
    return c.radius / (np.abs(z - c.center) ** 2 - c.radius ** 2)


def density_bounds_circle_domain(z, D: CircleDomain):
    """Return ``(lower, upper)`` bounds on the density of ``D`` at ``z``.

    ``upper = 1/dist(z, dD)`` (inscribed disk), ``lower`` is the largest density
    among the superdomains bounded by a single boundary circle.
    """
    z = np.asarray(z, dtype=complex)
    inside = D.contains(z)
    if not np.all(inside):
        raise _outside(z[~inside] if z.ndim else z, "circle domain")
    upper = 1.0 / D.dist_to_boundary(z)
    o = D.outer
    lower = o.radius / (o.radius ** 2 - np.abs(z - o.center) ** 2)
    for c in D.inner:
        lower = np.maximum(lower, _exterior_density(z, c))
    if z.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


def density(domain: Domain, z) -> DensityValue:
    """Dispatch on the domain type; circle domains yield an interval."""
    if isinstance(domain, Disk):
        return DensityValue(density_disk(complex(z), domain.radius, domain.center))
    if isinstance(domain, Annulus):
        return DensityValue(density_annulus(complex(z), domain.R))
    if isinstance(domain, CircleDomain):
        lo, hi = density_bounds_circle_domain(complex(z), domain)
        return DensityValue(math.sqrt(lo * hi), (lo, hi))
    raise TypeError(f"unsupported domain {domain!r}")


def density_array(domain: Domain, z):
    """Vectorized density; returns ``(lam, lower, upper)`` arrays (bounds equal lam when exact)."""
    z = np.asarray(z, dtype=complex)
    if isinstance(domain, Disk):
        lam = np.asarray(density_disk(z, domain.radius, domain.center))
        return lam, lam, lam
    if isinstance(domain, Annulus):
        lam = np.asarray(density_annulus(z, domain.R))
        return lam, lam, lam
    if isinstance(domain, CircleDomain):
        lo, hi = density_bounds_circle_domain(z, domain)
        lo, hi = np.asarray(lo), np.asarray(hi)
        return np.sqrt(lo * hi), lo, hi
    raise TypeError(f"unsupported domain {domain!r}")
