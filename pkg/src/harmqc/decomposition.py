"""Quasiconformal decomposition of the annulus ``1 < |z| < R`` into three sectors.

The pieces are the sectors ``0 < arg z < 4 pi/3`` and its rotations by
``2 pi/3`` and ``4 pi/3``.  Any two angles lie in a common closed arc of length
``4 pi/3`` among the three, which gives the covering property: every pair of
points of the annulus lies in the closure of one piece.

Only this two-boundary-component case is computed.  For ``n >= 3`` boundary
circles the construction passes through a conformal map onto a radial slit
domain, which is not implemented here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .domains import Annulus
from .errors import InvalidModulus, NotCovered, OutsideDomain
from .geometry import ClosedPolyline, CurveCertificate, InjectivityResult, certify_curves, grid_injectivity
from .harmonic import HarmonicMap

TWO_PI = 2 * math.pi
ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class SectorPiece:
    r_in: float
    r_out: float
    theta_start: float
    theta_end: float

    def __post_init__(self):
        if not self.r_in < self.r_out:
            raise ValueError("sector needs r_in < r_out")
        if not 0 < self.width < TWO_PI:
            raise ValueError("sector angular width must lie in (0, 2 pi)")

    @property
    def width(self) -> float:
        return self.theta_end - self.theta_start

    @property
    def theta_end_mod(self) -> float:
        return self.theta_end % TWO_PI

    def angle_in_closure(self, theta) -> np.ndarray:
        rel = np.mod(np.asarray(theta) - self.theta_start, TWO_PI)
        return (rel <= self.width + ANGLE_TOL) | (rel >= TWO_PI - ANGLE_TOL)

    def in_closure(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        radial = (r >= self.r_in * (1 - ANGLE_TOL)) & (r <= self.r_out * (1 + ANGLE_TOL))
        return radial & self.angle_in_closure(np.angle(z))

    def boundary(self, n: int = 256) -> ClosedPolyline:
        """Counter-clockwise boundary polyline with about ``n`` vertices.

        Inner arc, ray at ``theta_end``, outer arc back, ray at ``theta_start``.
        """
        m = max(2, n // 3)
        q = max(1, n // 6)
        k_arc = np.arange(m) / m
        k_ray = np.arange(q) / q
        a, b = self.theta_start, self.theta_end
        e_end, e_start = np.exp(1j * b), np.exp(1j * a)
        pts = np.concatenate([
            self.r_in * np.exp(1j * (a + self.width * k_arc)),
            (self.r_in + (self.r_out - self.r_in) * k_ray) * e_end,
            self.r_out * np.exp(1j * (b - self.width * k_arc)),
            (self.r_out - (self.r_out - self.r_in) * k_ray) * e_start,
        ])
        return ClosedPolyline(pts)

    def grid(self, n_r: int, n_theta: int) -> np.ndarray:
        """Cell-centered polar grid strictly inside the piece."""
        r = self.r_in + (self.r_out - self.r_in) * (np.arange(n_r) + 0.5) / n_r
        t = self.theta_start + self.width * (np.arange(n_theta) + 0.5) / n_theta
        R, T = np.meshgrid(r, t, indexing="ij")
        return (R * np.exp(1j * T)).ravel()

    def rotated(self, phi: float) -> SectorPiece:
        return SectorPiece(self.r_in, self.r_out, self.theta_start + phi, self.theta_end + phi)


@dataclass(frozen=True)
class Decomposition:
    pieces: tuple
    ambient: Annulus

    def membership(self, z) -> np.ndarray:
        """Boolean array ``(len(pieces),) + z.shape``: is z in each piece's closure."""
        return np.stack([p.in_closure(z) for p in self.pieces])


def sector_decomposition(R: float, starts: Sequence[float], width: float) -> Decomposition:
    """Sectors of common ``width`` starting at each angle in ``starts``, spanning ``1 < |z| < R``."""
    if not R > 1:
        raise InvalidModulus(f"annulus needs R > 1, got R = {R}")
    ambient = Annulus(float(R))
    return Decomposition(tuple(SectorPiece(1.0, float(R), s, s + width) for s in starts), ambient)


def annulus_decomposition(R: float) -> Decomposition:
    return sector_decomposition(R, [0.0, TWO_PI / 3, 2 * TWO_PI / 3], 2 * TWO_PI / 3)


def _in_ambient_closure(d: Decomposition, z) -> bool:
    r = abs(z)
    return 1.0 * (1 - ANGLE_TOL) <= r <= d.ambient.R * (1 + ANGLE_TOL)


def covering_check(d: Decomposition, z1: complex, z2: complex) -> int:
    """Index of the first piece whose closure holds both points."""
    for z in (z1, z2):
        if not _in_ambient_closure(d, z):
            raise OutsideDomain("point not in the closed annulus", where=z)
    both = d.membership(np.array([z1, z2])).all(axis=1)
    if not both.any():
        raise NotCovered(f"no piece contains both {z1} and {z2}", pair=(z1, z2))
    return int(np.argmax(both))


@dataclass
class CoveringResult:
    passed: bool
    trials: int
    witness: Optional[tuple] = None


def covering_sweep(d: Decomposition, trials: int, seed: int = 0) -> CoveringResult:
    """Random pairs in the closed annulus, all of which must be covered."""
    if trials <= 0:
        return CoveringResult(True, 0)
    rng = np.random.default_rng(seed)
    r = rng.uniform(1.0, d.ambient.R, size=(2, trials))
    t = rng.uniform(0.0, TWO_PI, size=(2, trials))
    z = r * np.exp(1j * t)
    m = d.membership(z)  # (pieces, 2, trials)
    ok = (m[:, 0, :] & m[:, 1, :]).any(axis=0)
    if ok.all():
        return CoveringResult(True, trials)
    k = int(np.argmin(ok))
    return CoveringResult(False, trials, (complex(z[0, k]), complex(z[1, k])))


def exhaustive_angle_check(d: Decomposition, step_deg: float = 1.0) -> CoveringResult:
    """Every pair of grid angles (both radii at the core circle) must share a piece."""
    n = int(round(360 / step_deg))
    theta = np.radians(step_deg * np.arange(n))
    r = math.sqrt(d.ambient.R)
    m = d.membership(r * np.exp(1j * theta)).astype(np.uint8)  # (pieces, n)
    covered = (m.T @ m) > 0  # (n, n)
    if covered.all():
        return CoveringResult(True, n * n)
    i, j = np.argwhere(~covered)[0]
    return CoveringResult(False, n * n, (complex(r * np.exp(1j * theta[i])), complex(r * np.exp(1j * theta[j]))))


@dataclass
class PieceReport:
    index: int
    piece: SectorPiece
    curve: CurveCertificate
    injectivity: InjectivityResult

    @property
    def certified(self) -> bool:
        return self.curve.certified and self.injectivity.passed


@dataclass
class DecompositionCertificate:
    pieces: list

    @property
    def certified(self) -> bool:
        return all(p.certified for p in self.pieces)


def decomposition_certificate(f: HarmonicMap, d: Decomposition, n: int = 192,
                              grid: int = 100) -> DecompositionCertificate:
    """Certify ``f(boundary of piece)`` as a quasicircle proxy and test ``f`` injective on each piece."""
    reports = []
    for k, piece in enumerate(d.pieces):
        b1, b2 = piece.boundary(n), piece.boundary(2 * n)
        w1 = f(b1.points, boundary=True)
        w2 = f(b2.points, boundary=True)
        cert = certify_curves(w1, w2)
        inj = grid_injectivity(f, points=piece.grid(grid, grid),
                               separation=1e-2 * d.ambient.diameter)
        reports.append(PieceReport(k, piece, cert, inj))
    return DecompositionCertificate(reports)
