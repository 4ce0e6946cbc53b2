"""Combinatorial and metric analysis of zero sequences."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .disc import TWO_PI, Arc, CarlesonBox, annulus_index
from .errors import InconclusiveDepth


@dataclass(frozen=True)
class OccupancyProfile:
    counts: tuple
    depth: int

    def __post_init__(self):
        if len(self.counts) != self.depth:
            raise ValueError("counts must have one entry per annulus")


@dataclass(frozen=True)
class ClassificationVerdict:
    kind: str  # finite | exponential | non_exponential
    M: int | None
    delta: float
    carleson_sup: float
    depth: int

    def to_json(self):
        return {"kind": self.kind, "M": self.M, "delta": self.delta,
                "carleson_sup": self.carleson_sup, "depth": self.depth}

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)


def annuli_counts(seq, J):
    """N_j = zeros (with multiplicity) in A_j for j = 1..J."""
    if J < 1:
        raise ValueError("J must be >= 1")
    counts = np.zeros(J, dtype=np.int64)
    if len(seq):
        j = np.atleast_1d(annulus_index(seq.positions))
        keep = j <= J
        np.add.at(counts, j[keep] - 1, seq.multiplicities[keep])
    return OccupancyProfile(tuple(int(c) for c in counts), J)


def exponential_constant(profile):
    if not profile.counts:
        raise ValueError("empty profile")
    return max(profile.counts)


def separation_delta(seq, block=512):
    """inf_k prod_{n != k} rho(z_k, z_n), multiplicities expanded.

    A repeated zero gives a vanishing factor, hence 0.  A single zero gives
    the empty product 1.
    """
    if not seq.is_finite and seq.tail_mass > 0:
        raise ValueError("separation of an infinite law is not computable; use finite_part()")
    if np.any(seq.multiplicities > 1):
        return 0.0
    a = seq.positions
    n = a.size
    if n <= 1:
        return 1.0
    best = 1.0
    for start in range(0, n, block):
        ak = a[start:start + block]
        rho = np.abs(ak[:, None] - a[None, :]) / np.abs(1.0 - np.conj(ak)[:, None] * a[None, :])
        rho[np.arange(ak.size), np.arange(start, start + ak.size)] = 1.0
        best = min(best, float(np.min(np.prod(rho, axis=1))))
    return best


def carleson_ratio(seq, boxes):
    """sup over boxes of sum_{z_k in Q} m_k (1-|z_k|) / l(Q)."""
    boxes = list(boxes)
    if not boxes:
        raise ValueError("need at least one box")
    mass = seq.multiplicities * (1.0 - np.abs(seq.positions))
    best = 0.0
    for box in boxes:
        inside = box.contains(seq.positions) if len(seq) else np.zeros(0, bool)
        best = max(best, math.fsum(mass[inside].tolist()) / box.side)
    return best


def dyadic_boxes(J):
    """Boxes with l(Q) = 2^-j (radians), centres spaced l/2 around the circle.

    Half-overlapping centres make the family cover the circle at every
    scale; the count grows like 2^j so only use this for small J.
    """
    for j in range(1, J + 1):
        ell = 2.0 ** -j
        n = math.ceil(TWO_PI / (0.5 * ell))
        for i in range(n):
            yield CarlesonBox(Arc(i * 0.5 * ell, ell))


def dyadic_carleson_sup(seq, J):
    """carleson_ratio over boxes of length 2^-j centred at multiples of 2^-j / 2.

    Only boxes that hold zeros are visited, so deep J is cheap.  Centres are
    indexed on the signed angle, which duplicates a few boxes near -pi/pi.
    """
    if not len(seq):
        return 0.0
    t = 1.0 - np.abs(seq.positions)
    ang = np.angle(seq.positions)
    mass = seq.multiplicities * t
    best = 0.0
    for j in range(1, J + 1):
        ell = 2.0 ** -j
        h = 0.5 * ell
        sel = t <= ell
        if not np.any(sel):
            continue
        acc = {}
        for phi, m in zip(ang[sel], mass[sel]):
            lo = math.ceil((phi - 0.5 * ell) / h)
            hi = math.floor((phi + 0.5 * ell) / h)
            for i in range(lo, hi + 1):
                acc.setdefault(i, []).append(m)
        best = max(best, max(math.fsum(v) for v in acc.values()) / ell)
    return best


def classify(seq, J, boxes=None):
    """Finite-depth classification; evidence, not a certificate.

    non_exponential: the last three counts strictly increase and the last
    one exceeds everything before it.  exponential(M): otherwise, provided
    the last three annuli are all occupied; M is the largest count seen.
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    if boxes is None:
        csup = dyadic_carleson_sup(seq, J)
    else:
        csup = carleson_ratio(seq, boxes)
    delta = separation_delta(seq.finite_part())
    if seq.is_finite:
        return ClassificationVerdict("finite", exponential_constant(annuli_counts(seq, J)), delta, csup, J)
    counts = annuli_counts(seq, J).counts
    if J < 4:
        raise InconclusiveDepth("need at least 4 annuli to read a trend")
    tail = counts[-3:]
    if tail[0] < tail[1] < tail[2] and tail[2] > max(counts[:-1]):
        return ClassificationVerdict("non_exponential", None, delta, csup, J)
    if min(tail) >= 1:
        return ClassificationVerdict("exponential", max(counts), delta, csup, J)
    raise InconclusiveDepth(f"counts {counts[-6:]} over the last annuli do not settle")
