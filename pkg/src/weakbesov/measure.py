"""Deterministic measure and integration engine on the unit disc.

The disc is cut into dyadic radial layers 1-|z| in (2^-(l+1), 2^-l],
l = 0..L (layer 0 holds the inner disc, layer L runs out to the
circle).  Each layer is split into ``density`` equal sub-bands and then
into angular cells; a cell is halved in angle while the sampled quantity
varies across it, down to the layer's Whitney width 2*pi/(base*density*2^l).
Cell masses for mu_p = (1-|z|)^(p-2) dA are exact (closed-form radial
integral times angular width).

A cell is classified by its centre sample.  Its corner samples give a
bracket: cells whose samples all exceed a level count towards the lower
estimate, cells where any sample does count towards the upper one.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .disc import TWO_PI, FullDisc, radial_mass
from .errors import DepthLimit, EvaluationFailure

DEFAULT_MAX_DEPTH = 40


def _env_max_depth():
    raw = os.environ.get("BLASCHKE_MAX_DEPTH")
    return int(raw) if raw else DEFAULT_MAX_DEPTH


@dataclass(frozen=True)
class PolarGrid:
    depth: int = 12
    density: int = 1
    base: int = 8
    split_tol: float = 0.5
    max_depth: int | None = None
    max_cells: int = 2 ** 23

    def __post_init__(self):
        if self.max_depth is None:
            object.__setattr__(self, "max_depth", _env_max_depth())
        if self.depth < 0 or self.density < 1 or self.base < 1:
            raise ValueError("depth >= 0, density >= 1 and base >= 1 required")
        if self.depth > self.max_depth:
            raise DepthLimit(f"depth {self.depth} exceeds the cap {self.max_depth}")

    def refine(self):
        """Density doubled, one more dyadic layer."""
        if self.depth + 1 > self.max_depth:
            raise DepthLimit(f"cannot refine past depth {self.max_depth}")
        return replace(self, depth=self.depth + 1, density=2 * self.density)

    def bands(self):
        """Sub-band edges (t_hi, t_lo) and layer index, t = 1-|z|."""
        L, d = self.depth, self.density
        t_hi, t_lo, layer = [], [], []
        for l in range(L + 1):
            hi = 1.0 if l == 0 else 2.0 ** -l
            lo = 2.0 ** -(l + 1)
            edges = hi - (hi - lo) * np.arange(d + 1) / d
            # the last layer keeps regular sub-bands; only its final one reaches t = 0
            edges[-1] = 0.0 if l == L else lo
            t_hi.append(edges[:-1])
            t_lo.append(edges[1:])
            layer.append(np.full(d, l))
        return np.concatenate(t_hi), np.concatenate(t_lo), np.concatenate(layer)

    def cells(self, sampler, split=None, samples="corners"):
        """Build the adaptive cell set for ``sampler(z, t) -> real array``.

        ``split(s)`` receives the (n, 5) sample matrix (4 samples + centre)
        and returns which cells to halve.  ``samples`` is "corners" or
        "quarters" (interior quarter points, used for region membership).
        """
        t_hi, t_lo, layer = self.bands()
        n0 = self.base * self.density
        th = np.arange(n0) * (TWO_PI / n0)
        width = TWO_PI / n0
        # every sub-band starts with n0 cells
        a_thi = np.repeat(t_hi, n0)
        a_tlo = np.repeat(t_lo, n0)
        a_lay = np.repeat(layer, n0)
        a_th0 = np.tile(th, t_hi.size)
        a_w = np.full(a_th0.size, width)
        a_lvl = np.zeros(a_th0.size, dtype=np.int64)
        done = []
        kept = 0
        while a_th0.size:
            if kept + a_th0.size > self.max_cells:
                raise DepthLimit(f"cell budget {self.max_cells} exceeded; coarsen the grid")
            s = _sample(sampler, a_thi, a_tlo, a_th0, a_w, samples)
            if split is None:
                cut = np.zeros(a_th0.size, dtype=bool)
            else:
                cut = split(s) & (a_lvl < a_lay)
            keep = ~cut
            done.append((a_thi[keep], a_tlo[keep], a_th0[keep], a_w[keep], s[keep]))
            kept += int(np.count_nonzero(keep))
            if not np.any(cut):
                break
            a_thi = np.repeat(a_thi[cut], 2)
            a_tlo = np.repeat(a_tlo[cut], 2)
            a_lay = np.repeat(a_lay[cut], 2)
            a_lvl = np.repeat(a_lvl[cut] + 1, 2)
            half = 0.5 * a_w[cut]
            a_th0 = np.stack([a_th0[cut], a_th0[cut] + half], axis=1).ravel()
            a_w = np.repeat(half, 2)
        parts = list(zip(*done))
        return CellSet(*(np.concatenate(p) for p in parts), grid=self)


def _outer_sample_t(t_hi, t_lo):
    # the boundary sub-band reaches t = 0, where samples are not allowed
    return np.where(t_lo > 0.0, t_lo, 0.25 * t_hi)


def _centre_t(t_hi, t_lo):
    return 0.5 * (t_hi + t_lo)


_SAMPLE_CHUNK = 2 ** 16


def _sample(sampler, t_hi, t_lo, th0, w, mode):
    if t_hi.size > _SAMPLE_CHUNK:
        parts = [_sample(sampler, t_hi[i:i + _SAMPLE_CHUNK], t_lo[i:i + _SAMPLE_CHUNK],
                         th0[i:i + _SAMPLE_CHUNK], w[i:i + _SAMPLE_CHUNK], mode)
                 for i in range(0, t_hi.size, _SAMPLE_CHUNK)]
        return np.concatenate(parts)
    tc = _centre_t(t_hi, t_lo)
    thc = th0 + 0.5 * w
    if mode == "corners":
        to = _outer_sample_t(t_hi, t_lo)
        ts = [t_hi, t_hi, to, to, tc]
        ths = [th0, th0 + w, th0, th0 + w, thc]
    elif mode == "quarters":
        tq1 = t_hi - 0.25 * (t_hi - t_lo)
        tq3 = t_hi - 0.75 * (t_hi - t_lo)
        ts = [tq1, tq1, tq3, tq3, tc]
        ths = [th0 + 0.25 * w, th0 + 0.75 * w, th0 + 0.25 * w, th0 + 0.75 * w, thc]
    else:
        raise ValueError(mode)
    t = np.stack(ts, axis=1)
    theta = np.stack(ths, axis=1)
    z = (1.0 - t) * np.exp(1j * theta)
    out = np.asarray(sampler(z.ravel(), t.ravel()))
    if out.dtype != bool and not np.all(np.isfinite(out)):
        raise EvaluationFailure("function returned non-finite samples on the grid")
    return out.reshape(t.shape)


class CellSet:
    """Flat arrays describing the cells of one adaptive build."""

    def __init__(self, t_hi, t_lo, th0, width, samples, grid):
        self.t_hi = t_hi
        self.t_lo = t_lo
        self.th0 = th0
        self.width = width
        self.samples = samples
        self.grid = grid

    def __len__(self):
        return int(self.th0.size)

    def mass(self, p):
        return self.width * radial_mass(self.t_hi, self.t_lo, p)

    def centres(self):
        tc = _centre_t(self.t_hi, self.t_lo)
        return (1.0 - tc) * np.exp(1j * (self.th0 + 0.5 * self.width)), tc


def relative_spread_split(tol):
    """Split when the samples vary by more than a factor 1 + tol in angle.

    Corners are compared only against the corner at the same radius, so
    a purely radial trend (such as the 1/(1-|z|) weight) never forces
    angular splits.  The centre is compared with the geometric mean of the
    corners to catch a peak sitting strictly inside a cell.
    """

    def ratio(a, b):
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        return hi > lo * (1.0 + tol)

    def split(s):
        c = s[:, :4]
        with np.errstate(divide="ignore"):
            gm = np.exp(np.mean(np.log(c), axis=1))
        return ratio(s[:, 0], s[:, 1]) | ratio(s[:, 2], s[:, 3]) | ratio(s[:, 4], gm)

    return split


def _split_all(s):
    return np.ones(s.shape[0], dtype=bool)


@dataclass(frozen=True)
class MeasureEstimate:
    value: float
    lower: float
    upper: float
    depth: tuple

    def __post_init__(self):
        if not (self.lower <= self.value <= self.upper):
            raise ValueError("bracket must contain the value")

    @property
    def width(self):
        return self.upper - self.lower


class Distribution:
    """Distribution function lambda -> mass{h > lambda} of a sampled quantity.

    Keeps three copies (lower / centre / upper classification) so any number
    of levels and the exact sup of lambda * m(lambda)^e over an interval are
    cheap once the cells are built.
    """

    def __init__(self, lower, value, upper, mass, depth=None):
        self.depth = depth
        self.n_cells = int(mass.size)
        self.total = math.fsum(mass.tolist())
        self._tables = {}
        for key, vals in (("lower", lower), ("value", value), ("upper", upper)):
            order = np.argsort(vals, kind="stable")
            v = vals[order]
            m = mass[order]
            # suffix[i] = mass of entries i.. (values >= v[i]); suffix[n] = 0
            suffix = np.append(np.cumsum(m[::-1])[::-1], 0.0)
            self._tables[key] = (v, suffix)

    @classmethod
    def from_cells(cls, cells, p):
        s = cells.samples
        return cls(s.min(axis=1), s[:, 4], s.max(axis=1), cells.mass(p),
                   (cells.grid.depth, cells.grid.density))

    def measure(self, lam, which="value"):
        v, suffix = self._tables[which]
        idx = np.searchsorted(v, lam, side="right")
        return suffix[idx]

    def estimate(self, lam):
        lo = float(self.measure(lam, "lower"))
        hi = float(self.measure(lam, "upper"))
        # the three suffix sums run in different orders; absorb rounding
        hi = max(hi, lo)
        mid = min(max(float(self.measure(lam, "value")), lo), hi)
        return MeasureEstimate(mid, lo, hi, self.depth)

    def sup(self, exponent, lam_min, lam_max, which="upper"):
        """sup over lam in [lam_min, lam_max] of lam * m(lam)^exponent.

        Between breakpoints m is constant, so the sup is approached just below
        a sample value or attained at lam_max.  Returns (sup, lam_star, at_max).
        """
        v, suffix = self._tables[which]
        i0 = np.searchsorted(v, lam_min, side="right")
        i1 = np.searchsorted(v, lam_max, side="right")
        cand_v = v[i0:i1]
        cand = cand_v * suffix[i0:i1] ** exponent
        edge = lam_max * float(suffix[i1]) ** exponent
        if cand.size and cand.max() > edge:
            k = int(np.argmax(cand))
            return float(cand[k]), float(cand_v[k]), False
        return float(edge), float(lam_max), bool(suffix[i1] > 0.0)


def _modulus_sampler(f):
    def sampler(z, t):
        return np.abs(f(z))

    return sampler


def _weighted_sampler(f):
    def sampler(z, t):
        return np.abs(f(z)) / t

    return sampler


def _constant_or_callable(f):
    if callable(f):
        return f
    c = complex(f)
    return lambda z: np.full(np.shape(z), c)


def build_distribution(f, p, grid, weighted=False):
    """Adaptive cells for |f| (or |f|/(1-|z|) when ``weighted``) and their distribution."""
    f = _constant_or_callable(f)
    sampler = _weighted_sampler(f) if weighted else _modulus_sampler(f)
    split = relative_spread_split(grid.split_tol / grid.density)
    return Distribution.from_cells(grid.cells(sampler, split), p)


def level_set_measure(f, lam, p, grid):
    """mu_p({z : |f(z)| > lam}) with a corner-sample bracket."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return build_distribution(f, p, grid).estimate(lam)


def weighted_area_level_set(f, lam, grid):
    """Area{z : |f(z)| > lam (1-|z|)}."""
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return build_distribution(f, 2.0, grid, weighted=True).estimate(lam)


def integrate_region(g, region, p, grid, cells=None):
    """sum over cells of g(centre) * mu_p(cell) * (fraction of quarter samples in region).

    Cells are refined to the Whitney width of their layer.  The bracket
    counts cells with all / any quarter samples inside; it is a sampling
    bracket, not a rigorous enclosure.  ``g`` must be non-negative.  A prebuilt
    ``cells`` (quarter-sample build) may be shared across regions.
    """
    g = _constant_or_callable(g)
    if cells is None:
        if isinstance(region, FullDisc):
            cells = grid.cells(lambda z, t: np.ones(z.shape, dtype=bool), None, samples="quarters")
        else:
            # refine everywhere: a region narrower than a coarse cell can hide
            # between its quarter points and would never trigger a mixed split
            cells = grid.cells(lambda z, t: region.contains(z), _split_all, samples="quarters")
        inside = cells.samples
    else:
        inside = _quarter_membership(cells, region)
    mass = cells.mass(p)
    zc, _ = cells.centres()
    gv = np.real(np.asarray(g(zc))).astype(float)
    frac = inside[:, :4].mean(axis=1)
    full = inside[:, :4].all(axis=1)
    anyin = inside[:, :4].any(axis=1)
    w = gv * mass
    return MeasureEstimate(
        math.fsum((w * frac).tolist()),
        math.fsum(w[full].tolist()),
        math.fsum(w[anyin].tolist()),
        (grid.depth, grid.density),
    )


def _quarter_membership(cells, region):
    t_hi, t_lo, th0, w = cells.t_hi, cells.t_lo, cells.th0, cells.width
    return _sample(lambda z, t: region.contains(z), t_hi, t_lo, th0, w, "quarters")


def refine(grid):
    return grid.refine()


def write_distribution_csv(path, dist, lambdas):
    """CSV tabulation: lambda,measure_lower,measure,measure_upper."""
    tmp = f"{path}.tmp"
    with open(tmp, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["lambda", "measure_lower", "measure", "measure_upper"])
        for lam in lambdas:
            e = dist.estimate(float(lam))
            w.writerow([repr(float(lam)), repr(e.lower), repr(e.value), repr(e.upper)])
    os.replace(tmp, path)
