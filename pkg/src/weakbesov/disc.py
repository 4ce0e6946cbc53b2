"""Geometry of the unit disc.

Points, arcs and the regions used throughout the package: dyadic annuli,
Stolz angles, pseudo-hyperbolic discs, Carleson boxes and the sectorial
domains T(I).  Every region exposes a vectorised ``contains`` whose
boundary handling follows the defining inequality exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class DiscPoint:
    """A point of the open unit disc.  Nothing is clamped."""

    value: complex

    def __post_init__(self):
        z = complex(self.value)
        if not abs(z) < 1.0:
            raise ValueError(f"|z| must be < 1, got |z| = {abs(z)!r}")
        object.__setattr__(self, "value", z)

    def __complex__(self):
        return self.value


def as_complex(z):
    """Unwrap DiscPoint / scalars / sequences into complex numpy data."""
    if isinstance(z, DiscPoint):
        return z.value
    if np.isscalar(z):
        return complex(z)
    return np.asarray(z, dtype=complex)


def check_in_disc(z):
    z = as_complex(z)
    if not np.all(np.abs(z) < 1.0):
        raise ValueError("points must satisfy |z| < 1")
    return z


def _wrap(angle):
    """Signed angular difference folded into (-pi, pi]."""
    return np.pi - np.mod(np.pi - angle, TWO_PI)


@dataclass(frozen=True)
class Arc:
    center_angle: float
    length: float

    def __post_init__(self):
        if not (0.0 < self.length <= TWO_PI):
            raise ValueError("arc length must lie in (0, 2*pi]")
        object.__setattr__(self, "center_angle", float(self.center_angle) % TWO_PI)

    def contains_angle(self, theta):
        if self.length >= TWO_PI:
            return np.ones_like(np.asarray(theta, dtype=float), dtype=bool)
        return np.abs(_wrap(np.asarray(theta, dtype=float) - self.center_angle)) <= 0.5 * self.length


@dataclass(frozen=True)
class FullDisc:
    def contains(self, z):
        z = as_complex(z)
        return np.abs(z) < 1.0


@dataclass(frozen=True)
class Annulus:
    """A_j = {2^-j < 1-|z| <= 2^(-j+1)}."""

    index: int

    def __post_init__(self):
        if int(self.index) < 1:
            raise ValueError("annulus index must be >= 1")

    @property
    def t_range(self):
        """(t_lo, t_hi] in the distance-to-boundary variable t = 1-|z|."""
        return 2.0 ** -self.index, 2.0 ** (1 - self.index)

    def contains(self, z):
        t = 1.0 - np.abs(as_complex(z))
        lo, hi = self.t_range
        return (lo < t) & (t <= hi)


@dataclass(frozen=True)
class StolzAngle:
    vertex_angle: float
    alpha: float = 2.0

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise ValueError("aperture alpha must exceed 1")

    def contains(self, z):
        z = as_complex(z)
        r = np.abs(z)
        return (r < 1.0) & (np.abs(z - np.exp(1j * self.vertex_angle)) <= self.alpha * (1.0 - r))


@dataclass(frozen=True)
class PseudoDisc:
    """Open pseudo-hyperbolic disc {|z - c| < m |1 - conj(z) c|}."""

    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", DiscPoint(self.center).value)
        if not (0.0 < self.radius < 1.0):
            raise ValueError("pseudo-hyperbolic radius must lie in (0, 1)")

    def contains(self, z):
        z = as_complex(z)
        c = self.center
        return (np.abs(z) < 1.0) & (np.abs(z - c) < self.radius * np.abs(1.0 - np.conj(z) * c))

    def sample(self, n, rng):
        """n points drawn by pushing uniform samples of |w| < m through the automorphism."""
        u = rng.random(n)
        phi = rng.random(n) * TWO_PI
        w = self.radius * np.sqrt(u) * np.exp(1j * phi)
        return mobius(self.center, w)


@dataclass(frozen=True)
class CarlesonBox:
    """Q = {z/|z| in I, 1-|z| <= l(Q)}.

    ``normalized`` selects the length convention for l(Q): arclength in
    radians (default) or arclength / 2*pi.
    """

    arc: Arc
    normalized: bool = False

    @property
    def side(self):
        return self.arc.length / TWO_PI if self.normalized else self.arc.length

    def contains(self, z):
        z = as_complex(z)
        r = np.abs(z)
        return (r < 1.0) & self.arc.contains_angle(np.angle(z)) & (1.0 - r <= self.side)

    def top_point(self):
        """z(Q): modulus 1 - l(Q) on the ray through the arc centre."""
        return (1.0 - self.side) * np.exp(1j * self.arc.center_angle)


@dataclass(frozen=True)
class SectorT:
    """T(I) = {z/|z| in I, 1-|z| <= |I| / (2 sqrt(alpha^2 - 1))}."""

    arc: Arc
    alpha: float = 2.0

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise ValueError("aperture alpha must exceed 1")

    @property
    def height(self):
        return self.arc.length / (2.0 * math.sqrt(self.alpha ** 2 - 1.0))

    def contains(self, z):
        z = as_complex(z)
        r = np.abs(z)
        return (r < 1.0) & self.arc.contains_angle(np.angle(z)) & (1.0 - r <= self.height)


def region_contains(region, z):
    """Exact membership predicate of ``region`` at ``z`` (scalar or array)."""
    out = region.contains(z)
    return bool(out) if np.ndim(out) == 0 else out


def mobius(c, z):
    """Disc automorphism phi_c(z) = (c - z) / (1 - conj(c) z); an involution."""
    return (c - z) / (1.0 - np.conj(c) * z)


def pseudo_distance(a, b):
    """rho(a, b) = |a - b| / |1 - conj(a) b|."""
    a = as_complex(a)
    b = as_complex(b)
    return np.abs(a - b) / np.abs(1.0 - np.conj(a) * b)


def annulus_index(z):
    """Unique j >= 1 with 2^-j < 1-|z| <= 2^(-j+1).

    Uses the binary exponent of t = 1-|z| so ties at powers of two land on
    the half-open side exactly.
    """
    z = as_complex(z)
    t = 1.0 - np.abs(z)
    if np.any(t <= 0.0):
        raise ValueError("points must satisfy |z| < 1")
    mant, expo = np.frexp(t)
    j = np.where(mant == 0.5, 2 - expo, 1 - expo)
    return int(j) if np.ndim(j) == 0 else j.astype(np.int64)


def pow_diff(a, b, q):
    """a**q - b**q for a >= b >= 0 without cancellation when a ~ b."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    safe_b = np.where(b > 0.0, b, 1.0)
    rel = -np.expm1(q * np.log(safe_b / a))
    return np.where(b > 0.0, a ** q * rel, a ** q)


def radial_mass(t_hi, t_lo, p):
    """Integral of t^(p-2) (1 - t) dt over [t_lo, t_hi], t = 1 - r.

    Equals int (1-r)^(p-2) r dr over the matching radial band; multiply by
    the angular width to obtain the mu_p mass of a polar cell.
    """
    if p <= 1.0:
        raise ValueError("mu_p requires p > 1")
    return pow_diff(t_hi, t_lo, p - 1.0) / (p - 1.0) - pow_diff(t_hi, t_lo, p) / p


def mu_p_closed_form(region, p):
    """mu_p(region) for FullDisc or Annulus, mu_p = (1-|z|)^(p-2) dA."""
    if p <= 1.0:
        raise ValueError("mu_p is infinite on the disc for p <= 1")
    if isinstance(region, FullDisc):
        return TWO_PI / (p * (p - 1.0))
    if isinstance(region, Annulus):
        lo, hi = region.t_range
        return TWO_PI * float(radial_mass(hi, lo, p))
    raise TypeError(f"no closed form for {type(region).__name__}")
