"""Finite Laurent series and their 3-jets.

A :class:`LaurentSeries` holds finitely many coefficients ``a_k`` with
``k_min <= k <= k_max`` and the annulus ``r_inner < |z| < r_outer`` on which
the caller asserts the series represents the intended function.  Evaluation is
direct term-by-term summation; terms are accumulated in ascending ``|k|`` with
Neumaier compensation on the real and imaginary parts separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple

import numpy as np

from .errors import OutOfValidity, SeriesDivergence

# relative size below which boundary-circle tail terms count as decayed
TAIL_DECAY_TOL = 1e-6


class Jet3(NamedTuple):
    """Value and first three derivatives at a point."""

    d0: complex
    d1: complex
    d2: complex
    d3: complex


def falling_factorial(k: int, m: int) -> int:
    """k (k-1) ... (k-m+1); the m-th derivative factor of z**k."""
    out = 1
    for j in range(m):
        out *= k - j
    return out


def _neumaier_add(s, c, x):
    t = s + x
    big = np.abs(s) >= np.abs(x)
    c = c + np.where(big, (s - t) + x, (x - t) + s)
    return t, c


class _CompensatedSum:
    """Neumaier accumulator for complex scalars or arrays."""

    def __init__(self, shape):
        self.re = np.zeros(shape)
        self.im = np.zeros(shape)
        self.cre = np.zeros(shape)
        self.cim = np.zeros(shape)

    def add(self, x):
        self.re, self.cre = _neumaier_add(self.re, self.cre, np.real(x))
        self.im, self.cim = _neumaier_add(self.im, self.cim, np.imag(x))

    def result(self):
        return (self.re + self.cre) + 1j * (self.im + self.cim)


@dataclass(frozen=True)
class LaurentSeries:
    """Finite Laurent series ``sum a_k z**k``.

    ``terms`` is a tuple of ``(k, a_k)`` pairs, stored sorted by ``(|k|, k)``
    and with zero coefficients dropped.  Use :meth:`from_triples` or
    :meth:`from_dict` rather than the raw constructor.
    """

    terms: tuple
    r_inner: float = 0.0
    r_outer: float = math.inf

    def __post_init__(self):
        merged: dict[int, complex] = {}
        for k, a in self.terms:
            if int(k) != k:
                raise ValueError(f"exponent {k!r} is not an integer")
            a = complex(a)
            if not (math.isfinite(a.real) and math.isfinite(a.imag)):
                raise ValueError(f"coefficient of z^{k} is not finite")
            merged[int(k)] = merged.get(int(k), 0j) + a
        terms = tuple(sorted(((k, a) for k, a in merged.items() if a != 0),
                             key=lambda t: (abs(t[0]), t[0])))
        object.__setattr__(self, "terms", terms)
        if not 0.0 <= self.r_inner < self.r_outer:
            raise ValueError("validity annulus needs 0 <= r_inner < r_outer")
        if self.k_min < 0 and self.r_inner <= 0.0:
            raise ValueError("negative exponents need r_inner > 0")

    @classmethod
    def from_dict(cls, coeffs: dict, r_inner=0.0, r_outer=math.inf):
        return cls(tuple(coeffs.items()), r_inner, r_outer)

    @classmethod
    def from_triples(cls, triples: Iterable, r_inner=0.0, r_outer=math.inf):
        """Build from ``(exponent, re, im)`` triples; repeated exponents add."""
        return cls(tuple((int(k), complex(re, im)) for k, re, im in triples),
                   r_inner, r_outer)

    @classmethod
    def zero(cls, r_inner=0.0, r_outer=math.inf):
        return cls((), r_inner, r_outer)

    @property
    def k_min(self) -> int:
        return min((k for k, _ in self.terms), default=0)

    @property
    def k_max(self) -> int:
        return max((k for k, _ in self.terms), default=0)

    @property
    def coeffs(self) -> dict:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # linear structure -------------------------------------------------
    def __add__(self, other: LaurentSeries) -> LaurentSeries:
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        return LaurentSeries(self.terms + other.terms,
                             max(self.r_inner, other.r_inner),
                             min(self.r_outer, other.r_outer))

    def __mul__(self, c) -> LaurentSeries:
        c = complex(c)
        return LaurentSeries(tuple((k, c * a) for k, a in self.terms),
                             self.r_inner, self.r_outer)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-other)

    def add_constant(self, c) -> LaurentSeries:
        return LaurentSeries(self.terms + ((0, complex(c)),),
                             self.r_inner, self.r_outer)

    def rotate_argument(self, theta: float) -> LaurentSeries:
        """Series of ``z -> s(exp(i theta) z)``."""
        return LaurentSeries(
            tuple((k, a * complex(math.cos(k * theta), math.sin(k * theta)))
                  for k, a in self.terms),
            self.r_inner, self.r_outer)

    # evaluation -------------------------------------------------------
    def _check(self, z, boundary: bool):
        r = np.abs(z)
        if boundary:
            ok = (r >= self.r_inner) & (r <= self.r_outer)
            if self.k_min < 0:
                ok &= r > 0
        elif self.r_inner == 0.0 and self.k_min >= 0:
            ok = r < self.r_outer  # Taylor series: the punctured center is removable
        else:
            ok = (r > self.r_inner) & (r < self.r_outer)
        if not np.all(ok):
            bad = np.asarray(z).ravel()[~np.asarray(ok).ravel()][0]
            raise OutOfValidity(
                f"|z| = {abs(bad):.6g} outside validity annulus "
                f"({self.r_inner:g}, {self.r_outer:g})", where=bad)
        if boundary:
            self._check_tail(r)

    def _check_tail(self, r):
        """On the validity boundary, require the extreme terms to have decayed."""
        r = np.atleast_1d(r)
        for edge, sign in ((self.r_outer, 1), (self.r_inner, -1)):
            on_edge = r[np.isclose(r, edge, rtol=1e-12, atol=0.0)] if math.isfinite(edge) else r[:0]
            if on_edge.size == 0 or edge == 0.0:
                continue
            rho = float(on_edge[0])
            ks = sorted((k for k, _ in self.terms if sign * k > 0), key=lambda k: sign * k)
            if len(ks) < 4:
                continue
            mags = {k: abs(a) * rho ** k for k, a in self.terms}
            tail = ks[-max(1, len(ks) // 4):]
            if max(mags[k] for k in tail) > TAIL_DECAY_TOL * max(mags.values()):
                raise SeriesDivergence(
                    f"coefficients do not decay on |z| = {rho:g}; "
                    "boundary values are not trustworthy")

    def jets(self, z, order: int = 3, boundary: bool = False):
        """Derivatives ``0..order`` at ``z`` (scalar or array), as a list of arrays.

        ``boundary=True`` admits points on the closed validity annulus (used for
        radial-limit boundary tracing) subject to a coefficient tail test.
        """
        z = np.asarray(z, dtype=complex)
        self._check(z, boundary)
        acc = [_CompensatedSum(z.shape) for _ in range(order + 1)]
        for k, a in self.terms:
            for m in range(order + 1):
                ff = falling_factorial(k, m)
                if ff == 0:
                    continue
                acc[m].add(a * ff * z ** (k - m))
        return [s.result() for s in acc]

    def __call__(self, z, boundary: bool = False):
        out = self.jets(z, order=0, boundary=boundary)[0]
        return complex(out) if out.ndim == 0 else out


def eval_jet(s: LaurentSeries, z: complex) -> Jet3:
    """Value and first three derivatives of ``s`` at a single point."""
    d = s.jets(complex(z))
    return Jet3(*(complex(x) for x in d))


def series_contains(s: LaurentSeries, domain, margin: float = 1e-6) -> bool:
    """True iff the closure of ``domain``'s sampling region lies in the validity annulus."""
    lo, hi = domain.modulus_range()
    m = margin * domain.scale
    return s.r_inner < lo + m and s.r_outer > hi - m
