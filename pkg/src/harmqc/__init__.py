"""Harmonic Schwarzian norms, hyperbolic densities and quasicircle certificates."""

__version__ = "0.1.0"

from .domains import Annulus, Circle, CircleDomain, Disk
from .series import Jet3, LaurentSeries, eval_jet, series_contains
from .harmonic import (HarmonicMap, affine_compose, dilatation, dilatation_sup, jacobian,
                       local_univalence_scan, schwarzian, schwarzian_fd)
from .hyperbolic import (covering_pullback, density, density_annulus,
                         density_bounds_circle_domain, density_disk)
from .norm import NormBudget, NormEstimate, monotonicity_check, schwarzian_norm
from .geometry import (ClosedPolyline, CurveCertificate, bounded_turning, grid_injectivity,
                       is_jordan, quasicircle_report, trace_boundary)
from .decomposition import (Decomposition, SectorPiece, annulus_decomposition,
                            covering_check, covering_sweep, decomposition_certificate)
