"""Membership diagnostics for weak and strong function spaces on the disc.

Each diagnostic is a sup of a refinement- or radius-dependent quantity.
Drivers record a trace of successive estimates and turn it into a
verdict: ``finite`` when the last two relative changes are at most tau,
``diverging`` when each of the last three steps grew by at least gamma,
``inconclusive`` otherwise.  These are finite-depth evidence, never proofs.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .disc import TWO_PI, Annulus, Arc, CarlesonBox, FullDisc, PseudoDisc, mu_p_closed_form
from .errors import DepthLimit, QuadratureStall, RangeTooNarrow
from .measure import Distribution, PolarGrid, build_distribution, integrate_region, relative_spread_split

TAU = 0.02
GAMMA = 0.25


@dataclass(frozen=True)
class LambdaGrid:
    lam_min: float = 0.1
    lam_max: float = 1e6
    points_per_decade: int = 16

    def __post_init__(self):
        if not (0.0 < self.lam_min < self.lam_max):
            raise ValueError("need 0 < lam_min < lam_max")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be >= 1")

    def values(self):
        decades = math.log10(self.lam_max / self.lam_min)
        n = max(2, int(math.ceil(decades * self.points_per_decade)) + 1)
        return np.logspace(math.log10(self.lam_min), math.log10(self.lam_max), n)


@dataclass
class NormEstimate:
    """A sup-type diagnostic with its refinement trace.

    ``value`` is the upper-bracket sup; ``value_lower`` and ``value_center``
    are the sups of the lower and centre classifications on the final step.
    """

    value: float
    lambda_star: float
    trace: list
    verdict: str
    value_lower: float = float("nan")
    value_center: float = float("nan")
    lambda_range: tuple = (float("nan"), float("nan"))
    extra: dict = field(default_factory=dict)

    def to_json(self):
        doc = {
            "value": self.value,
            "lambda_star": self.lambda_star,
            "verdict": self.verdict,
            "trace": [[d, v] for d, v in self.trace],
            "value_lower": self.value_lower,
            "value_center": self.value_center,
            "lambda_range": list(self.lambda_range),
        }
        doc.update(self.extra)
        return doc

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def verdict_from_trace(values, tau=TAU, gamma=GAMMA):
    """finite / diverging / inconclusive from a sequence of estimates."""
    v = [float(x) for x in values]
    if len(v) >= 4:
        last = v[-4:]
        if all(b >= (1.0 + gamma) * a and b > a for a, b in zip(last, last[1:])):
            return "diverging"
    if len(v) >= 3:
        last = v[-3:]
        changes = []
        for a, b in zip(last, last[1:]):
            scale = max(abs(a), abs(b))
            changes.append(0.0 if scale == 0.0 else abs(b - a) / scale)
        if max(changes) <= tau:
            return "finite"
    return "inconclusive"


def _deep_enough(grid, lam_hi, slack=3):
    """Grid whose boundary layer sits below the length scale 1/lam_hi.

    The last layer lumps (0, 2^-L] together, so level sets at lambda near
    2^L would be dominated by it.
    """
    need = int(math.ceil(math.log2(max(lam_hi, 1.0)))) + slack
    need = min(need, grid.max_depth)
    if need <= grid.depth:
        return grid
    return replace(grid, depth=need)


def _sup_driver(build, exponent, lam_grid, grid, ladder, max_steps, on_edge, extend_factor, tau, gamma):
    if on_edge not in ("extend", "raise", "ignore"):
        raise ValueError("on_edge is 'extend', 'raise' or 'ignore'")
    lam_lo, lam_hi = lam_grid.lam_min, lam_grid.lam_max
    ratio = lam_hi / lam_lo
    # log-doubling ladder towards lam_hi, so logarithmic growth shows up
    # as a constant factor per step
    rungs = [lam_lo * ratio ** (2.0 ** (k - ladder)) for k in range(ladder)]
    g = grid
    trace, verdict = [], "inconclusive"
    result = None
    stopped = None
    for step in range(max(max_steps, ladder + 1)):
        if step > 0:
            try:
                g = g.refine()
            except DepthLimit as exc:
                stopped = str(exc)
                break
        top = rungs[step] if step < ladder else lam_hi
        g_eff = _deep_enough(g, top)
        try:
            dist = build(g_eff)
        except DepthLimit as exc:
            if result is None:
                raise
            # out of cells: keep the trace gathered so far
            stopped = str(exc)
            break
        up, star, at_max = dist.sup(exponent, lam_lo, top, "upper")
        lo, _, _ = dist.sup(exponent, lam_lo, top, "lower")
        mid, _, _ = dist.sup(exponent, lam_lo, top, "value")
        trace.append((g.depth, up))
        result = (up, star, lo, mid, (lam_lo, top))
        verdict = verdict_from_trace([v for _, v in trace], tau, gamma)
        if step >= ladder and at_max and on_edge != "ignore":
            if on_edge == "raise":
                raise RangeTooNarrow(f"sup attained at lambda_max = {top:g}")
            lam_hi = top * extend_factor
        if step >= ladder and verdict != "inconclusive":
            break
    up, star, lo, mid, rng = result
    extra = {"stopped": stopped} if stopped else {}
    return NormEstimate(up, star, trace, verdict, lo, mid, rng, extra)


def weak_quasinorm_mu_p(f, p, lam_grid=None, grid=None, ladder=3, max_steps=8,
                        on_edge="extend", extend_factor=100.0, tau=TAU, gamma=GAMMA):
    """sup_lambda lambda * mu_p{|f| > lambda}^(1/p).

    The sup is exact over the continuous range [lam_min, lam_max] for the
    piecewise-constant distribution of the cell build.  ``ladder`` steps
    first climb towards lam_max, then the grid is refined at full range;
    ``on_edge`` decides what happens when the sup sits at lam_max.
    """
    if p <= 1:
        raise ValueError("p must exceed 1")
    lam_grid = lam_grid or LambdaGrid()
    grid = grid or PolarGrid(depth=8)
    return _sup_driver(lambda g: build_distribution(f, p, g), 1.0 / p, lam_grid, grid,
                       ladder, max_steps, on_edge, extend_factor, tau, gamma)


def tilde_L1w_norm(f, lam_grid=None, grid=None, ladder=3, max_steps=8,
                   on_edge="extend", extend_factor=100.0, tau=TAU, gamma=GAMMA):
    """sup_lambda lambda * Area{|f(z)| > lambda (1-|z|)}."""
    lam_grid = lam_grid or LambdaGrid()
    grid = grid or PolarGrid(depth=8)
    return _sup_driver(lambda g: build_distribution(f, 2.0, g, weighted=True), 1.0, lam_grid, grid,
                       ladder, max_steps, on_edge, extend_factor, tau, gamma)


def weak_norm_curve(f, p, lambdas, grid):
    """(lambda, lambda * mu_p{|f| > lambda}^(1/p)) on the centre classification."""
    g = _deep_enough(grid, float(np.max(lambdas)))
    dist = build_distribution(f, p, g)
    lambdas = np.asarray(lambdas, dtype=float)
    return lambdas, lambdas * dist.measure(lambdas) ** (1.0 / p)


# ---------------------------------------------------------------- circles

def periodic_mean(h, n0=64, tol=1e-8, n_max=2 ** 22):
    """(1/2pi) * integral of a periodic real function by trapezoid doubling.

    Stops when two successive rules agree to relative ``tol``.
    """
    n = n0
    theta = np.arange(n) * (TWO_PI / n)
    total = math.fsum(np.asarray(h(theta), float).tolist())
    prev = total / n
    while n < n_max:
        mid = theta + math.pi / n
        total = total + math.fsum(np.asarray(h(mid), float).tolist())
        n *= 2
        theta = np.arange(n) * (TWO_PI / n)
        cur = total / n
        if abs(cur - prev) <= tol * abs(cur) or cur == prev == 0.0:
            return cur
        prev = cur
    raise QuadratureStall(f"trapezoid rule did not settle within {n_max} nodes")


def hp_integral_mean(f, p, r, tol=1e-8, n_max=2 ** 22):
    """(1/2pi) int |f(r e^{i theta})|^p d theta."""
    if not (0.0 < p < math.inf):
        raise ValueError("p must lie in (0, inf)")
    if not (0.0 <= r < 1.0):
        raise ValueError("r must lie in [0, 1)")
    return periodic_mean(lambda th: np.abs(f(r * np.exp(1j * th))) ** p, tol=tol, n_max=n_max)


def _arc_split(tol):
    # ends against each other, midpoint against their geometric mean
    def ratio(a, b):
        return np.maximum(a, b) > np.minimum(a, b) * (1.0 + tol)

    def split(s):
        gm = np.sqrt(s[:, 0] * s[:, 2])
        return ratio(s[:, 0], s[:, 2]) | ratio(s[:, 1], gm)

    return split


def circle_distribution(f, r, n0=256, tol=0.05, resolution=8.0):
    """Adaptive angular cells on |z| = r for the modulus of f.

    A cell is halved while the samples at its ends and midpoint differ by
    more than ``tol`` relatively, down to width (1-r)/resolution.
    """
    t = 1.0 - r
    min_w = min(TWO_PI / n0, t / resolution)
    th0 = np.arange(n0) * (TWO_PI / n0)
    w = np.full(n0, TWO_PI / n0)
    split = _arc_split(tol)
    parts = []
    while th0.size:
        pts = np.stack([th0, th0 + 0.5 * w, th0 + w], axis=1)
        s = np.abs(f(r * np.exp(1j * pts.ravel()))).reshape(pts.shape)
        cut = split(s) & (0.5 * w >= min_w)
        keep = ~cut
        parts.append((s[keep], w[keep]))
        if not np.any(cut):
            break
        half = 0.5 * w[cut]
        th0 = np.stack([th0[cut], th0[cut] + half], axis=1).ravel()
        w = np.repeat(half, 2)
    s = np.concatenate([a for a, _ in parts])
    mass = np.concatenate([b for _, b in parts])
    return Distribution(s.min(axis=1), s[:, 1], s.max(axis=1), mass)


def hp_weak_norm(f, p, r, lam_grid=None, tol=0.05):
    """sup_lambda lambda * |{theta : |f(r e^{i theta})| > lambda}|^(1/p) (upper classification)."""
    if not (0.0 < p < math.inf):
        raise ValueError("p must lie in (0, inf)")
    if not (0.0 <= r < 1.0):
        raise ValueError("r must lie in [0, 1)")
    lam_grid = lam_grid or LambdaGrid()
    dist = circle_distribution(f, r, tol=tol)
    return dist.sup(1.0 / p, lam_grid.lam_min, lam_grid.lam_max, "upper")[0]


def dyadic_radii(k_max):
    """r_k = 1 - 2^-k for k = 1, 2, 4, ..., k_max (doubling k)."""
    ks, k = [], 1
    while k <= k_max:
        ks.append(k)
        k *= 2
    return ks


def _radius_trace(value_at, k_max, tau, gamma):
    trace, best = [], 0.0
    for k in dyadic_radii(k_max):
        # both Hardy quantities are sups over r, so keep the running max
        best = max(best, float(value_at(1.0 - 2.0 ** -k)))
        trace.append((k, best))
    verdict = verdict_from_trace([v for _, v in trace], tau, gamma)
    return NormEstimate(best, float("nan"), trace, verdict)


def hardy_norm(f, p=1.0, k_max=16, tau=TAU, gamma=GAMMA):
    """sup_k M_p(f, r_k)^(1/p) over r_k = 1 - 2^-k, k doubling up to k_max."""
    return _radius_trace(lambda r: hp_integral_mean(f, p, r) ** (1.0 / p), k_max, tau, gamma)


def hardy_weak_norm(f, p=1.0, lam_grid=None, k_max=16, tau=TAU, gamma=GAMMA):
    """sup_k of hp_weak_norm(f, p, r_k), k doubling up to k_max."""
    return _radius_trace(lambda r: hp_weak_norm(f, p, r, lam_grid), k_max, tau, gamma)


# ---------------------------------------------------------------- Kolmogorov

def default_family():
    """Full disc, annuli 1..6, Carleson boxes and pseudo-hyperbolic discs."""
    fam = [FullDisc()]
    fam += [Annulus(j) for j in range(1, 7)]
    for j in range(0, 6):
        for c in (0.0, math.pi):
            fam.append(CarlesonBox(Arc(c, 2.0 ** -j)))
    for centre in (0.0, 0.5, 0.875):
        for m in (0.25, 0.5, 0.75):
            fam.append(PseudoDisc(centre, m))
    return fam


def kolmogorov_constant(f, p, r, family=None, grid=None):
    """sup_E (int_E |f|^r dmu_p)^(1/r) / mu_p(E)^(1/r - 1/p)."""
    if not (0.0 < r < p):
        raise ValueError("need 0 < r < p")
    grid = grid or PolarGrid(depth=10, density=2)
    family = default_family() if family is None else family
    best = 0.0
    for region in family:
        if isinstance(region, (FullDisc, Annulus)):
            size = mu_p_closed_form(region, p)
        else:
            size = integrate_region(1.0, region, p, grid).value
        if size <= 0.0:
            warnings.warn(f"skipping {region!r}: zero measure on this grid", stacklevel=2)
            continue
        integral = integrate_region(lambda z: np.abs(f(z)) ** r, region, p, grid).value
        best = max(best, integral ** (1.0 / r) / size ** (1.0 / r - 1.0 / p))
    return best


# ---------------------------------------------------------------- pointwise

def nontangential_max(f, theta, alpha=2.0, depth=12, per_octave=4, per_row=17):
    """max |f| over samples of the Stolz angle at e^{i theta}, down to 1-|z| = 2^-depth.

    Rows sit at 1-|z| = 2^(-i/per_octave); each row samples ``per_row``
    angles across the angle's full width.  Rows never depend on ``depth``,
    so the result is non-decreasing in depth.
    """
    if alpha <= 1.0:
        raise ValueError("alpha must exceed 1")
    best = float(abs(f(np.zeros(1, dtype=complex))[0]))
    for i in range(1, per_octave * depth + 1):
        t = 2.0 ** (-i / per_octave)
        c = 1.0 - (alpha ** 2 - 1.0) * t ** 2 / (2.0 * (1.0 - t))
        half = math.pi if c <= -1.0 else math.acos(c)
        phi = theta + np.linspace(-half, half, per_row)
        z = (1.0 - t) * np.exp(1j * phi)
        best = max(best, float(np.max(np.abs(f(z)))))
    return best


def growth_norm(f, p, grid=None):
    """max of (1-|z|)^p |f(z)| over the samples of an adaptive cell build."""
    if p < 0:
        raise ValueError("p must be >= 0")
    grid = grid or PolarGrid(depth=12)
    cells = grid.cells(lambda z, t: t ** p * np.abs(f(z)),
                       relative_spread_split(grid.split_tol / grid.density))
    return float(cells.samples.max())


def growth_trace(f, p, grid=None, steps=4, tau=TAU, gamma=GAMMA):
    """growth_norm under successive refinements, with a verdict."""
    g = grid or PolarGrid(depth=8)
    trace = []
    for step in range(steps):
        if step:
            g = g.refine()
        trace.append((g.depth, growth_norm(f, p, g)))
    verdict = verdict_from_trace([v for _, v in trace], tau, gamma)
    return NormEstimate(trace[-1][1], float("nan"), trace, verdict)


def strong_lp_mu_p(f, p, grid=None):
    """(int |f|^p dmu_p)^(1/p) by centre sampling on an adaptive build."""
    grid = grid or PolarGrid(depth=12, density=2)
    return integrate_region(lambda z: np.abs(f(z)) ** p, FullDisc(), p, grid).value ** (1.0 / p)
