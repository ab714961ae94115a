"""Planar domains supported by the library: disks, round annuli, circle domains.

Each domain knows its boundary circles, how far a point is from the boundary,
and how to lay down polar sampling grids that stay a relative ``margin`` inside.
Polar grids are parameterized by a normalized radial coordinate ``s`` in (0, 1)
and an angle; for a disk ``s`` is ``|z - c| / r``, for an annulus ``s`` runs
linearly from the inner to the outer circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidDomain, InvalidModulus

DEFAULT_MARGIN = 1e-6


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float

    def points(self, n: int, offset: float = 0.0) -> np.ndarray:
        theta = 2 * np.pi * (np.arange(n) + offset) / n
        return self.center + self.radius * np.exp(1j * theta)


class Domain:
    """Common interface; see the concrete classes."""

    kind = "domain"

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    def dist_to_boundary(self, z) -> np.ndarray:
        raise NotImplementedError

    def boundary_circles(self) -> list[Circle]:
        raise NotImplementedError

    def modulus_range(self) -> tuple[float, float]:
        """(min |z|, max |z|) over the closure."""
        raise NotImplementedError

    @property
    def scale(self) -> float:
        """Length used to turn relative margins into absolute ones."""
        raise NotImplementedError

    @property
    def diameter(self) -> float:
        raise NotImplementedError

    def polar_point(self, s, theta):
        raise NotImplementedError

    def polar_grid(self, n_r: int, n_theta: int) -> np.ndarray:
        """Cell-centered polar grid, shape ``(n_r, n_theta)``."""
        s = (np.arange(n_r) + 0.5) / n_r
        theta = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
        S, T = np.meshgrid(s, theta, indexing="ij")
        return self.polar_point(S, T)

    def sample_grid(self, n: int, margin: float = DEFAULT_MARGIN) -> np.ndarray:
        """Flat array of about ``n*n`` interior sample points."""
        return self.polar_grid(n, n).ravel()

    def ring(self, delta: float, n_theta: int) -> np.ndarray:
        """Points at relative distance ``delta`` from every boundary circle."""
        theta = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
        return self.polar_point(np.full(n_theta, 1.0 - delta), theta)


@dataclass(frozen=True)
class Disk(Domain):
    radius: float = 1.0
    center: complex = 0j

    kind = "disk"

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidDomain(f"disk radius must be positive, got {self.radius}")

    def contains(self, z):
        return np.abs(np.asarray(z) - self.center) < self.radius

    def dist_to_boundary(self, z):
        return self.radius - np.abs(np.asarray(z) - self.center)

    def boundary_circles(self):
        return [Circle(complex(self.center), float(self.radius))]

    def modulus_range(self):
        c = abs(self.center)
        return max(0.0, c - self.radius), c + self.radius

    @property
    def scale(self):
        return self.radius

    @property
    def diameter(self):
        return 2 * self.radius

    def polar_point(self, s, theta):
        return self.center + self.radius * np.asarray(s) * np.exp(1j * np.asarray(theta))

    def is_subdomain_of(self, other) -> bool:
        if isinstance(other, Disk):
            return abs(self.center - other.center) + self.radius <= other.radius
        if isinstance(other, Annulus):
            c = abs(self.center)
            return c - self.radius >= 1.0 and c + self.radius <= other.R
        return False


@dataclass(frozen=True)
class Annulus(Domain):
    """The round annulus ``1 < |z| < R``."""

    R: float = 2.0

    kind = "annulus"

    def __post_init__(self):
        if not (math.isfinite(self.R) and self.R > 1):
            raise InvalidModulus(f"annulus needs R > 1, got R = {self.R}")

    def contains(self, z):
        r = np.abs(np.asarray(z))
        return (r > 1.0) & (r < self.R)

    def dist_to_boundary(self, z):
        r = np.abs(np.asarray(z))
        return np.minimum(r - 1.0, self.R - r)

    def boundary_circles(self):
        return [Circle(0j, 1.0), Circle(0j, float(self.R))]

    def modulus_range(self):
        return 1.0, float(self.R)

    @property
    def scale(self):
        return self.R - 1.0

    @property
    def diameter(self):
        return 2 * self.R

    def polar_point(self, s, theta):
        r = 1.0 + (self.R - 1.0) * np.asarray(s)
        return r * np.exp(1j * np.asarray(theta))

    def is_subdomain_of(self, other) -> bool:
        return isinstance(other, Annulus) and self.R <= other.R

    def ring(self, delta, n_theta):
        theta = 2 * np.pi * (np.arange(n_theta) + 0.5) / n_theta
        s = np.concatenate([np.full(n_theta, delta), np.full(n_theta, 1.0 - delta)])
        return self.polar_point(s, np.concatenate([theta, theta]))


@dataclass(frozen=True)
class CircleDomain(Domain):
    """Finitely connected domain bounded by round circles.

    ``circles[0]`` is the outer circle; the domain is its interior minus the
    closed disks of the remaining circles.
    """

    circles: tuple

    kind = "circles"

    def __post_init__(self):
        circles = tuple(c if isinstance(c, Circle) else Circle(complex(c[0]), float(c[1]))
                        for c in self.circles)
        object.__setattr__(self, "circles", circles)
        if not circles:
            raise InvalidDomain("circle domain needs at least the outer circle")
        outer, inner = circles[0], circles[1:]
        for c in circles:
            if not c.radius > 0:
                raise InvalidDomain("circle radii must be positive")
        for i, c in enumerate(inner):
            if abs(c.center - outer.center) + c.radius >= outer.radius:
                raise InvalidDomain(f"inner circle {i + 1} is not inside the outer circle")
            for j, d in enumerate(inner[:i]):
                if abs(c.center - d.center) <= c.radius + d.radius:
                    raise InvalidDomain(f"inner circles {j + 1} and {i + 1} overlap")

    @property
    def outer(self) -> Circle:
        return self.circles[0]

    @property
    def inner(self) -> tuple:
        return self.circles[1:]

    def contains(self, z):
        z = np.asarray(z)
        ok = np.abs(z - self.outer.center) < self.outer.radius
        for c in self.inner:
            ok &= np.abs(z - c.center) > c.radius
        return ok

    def dist_to_boundary(self, z):
        z = np.asarray(z)
        d = self.outer.radius - np.abs(z - self.outer.center)
        for c in self.inner:
            d = np.minimum(d, np.abs(z - c.center) - c.radius)
        return d

    def boundary_circles(self):
        return list(self.circles)

    def modulus_range(self):
        hi = abs(self.outer.center) + self.outer.radius
        if bool(self.contains(0j)):
            return 0.0, hi
        for c in self.inner:
            if abs(c.center) <= c.radius:
                return c.radius - abs(c.center), hi
        return max(0.0, abs(self.outer.center) - self.outer.radius), hi

    @property
    def scale(self):
        return self.outer.radius

    @property
    def diameter(self):
        return 2 * self.outer.radius

    def polar_point(self, s, theta):
        # polar about the outer circle; points inside holes are filtered by callers
        return self.outer.center + self.outer.radius * np.asarray(s) * np.exp(1j * np.asarray(theta))

    def polar_grid(self, n_r, n_theta):
        z = super().polar_grid(n_r, n_theta)
        return np.where(self.contains(z), z, np.nan + 0j)

    def sample_grid(self, n, margin=DEFAULT_MARGIN):
        z = self.polar_grid(n, n).ravel()
        z = z[np.isfinite(z)]
        return z[self.dist_to_boundary(z) > margin * self.scale]

    def ring(self, delta, n_theta):
        e = np.exp(2j * np.pi * (np.arange(n_theta) + 0.5) / n_theta)
        d = delta * self.scale
        pts = [self.outer.center + (self.outer.radius - d) * e]
        pts += [c.center + (c.radius + d) * e for c in self.inner]
        z = np.concatenate(pts)
        return z[self.contains(z)]


def annulus_as_circle_domain(R: float) -> CircleDomain:
    return CircleDomain((Circle(0j, float(R)), Circle(0j, 1.0)))
