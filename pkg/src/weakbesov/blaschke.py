"""Blaschke products: zero sequences, evaluation, derivatives, generators.

Factor normalisation is b_a(z) = (|a|/a) (a - z) / (1 - conj(a) z) with
b_0(z) = z, so a product without a zero at the origin is positive at 0.
"""
from __future__ import annotations

import json
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import _kernels
from .disc import TWO_PI, DiscPoint, annulus_index, as_complex, check_in_disc
from .errors import IllConditioned, TailBudgetExceeded, ZeroOnRay

# evaluation points processed per kernel call
_CHUNK_POINTS = 1 << 16


@dataclass(frozen=True)
class Zero:
    position: complex
    multiplicity: int = 1

    def __post_init__(self):
        object.__setattr__(self, "position", DiscPoint(self.position).value)
        if int(self.multiplicity) < 1:
            raise ValueError("multiplicity must be >= 1")
        object.__setattr__(self, "multiplicity", int(self.multiplicity))


@dataclass(frozen=True, eq=False)
class ZeroSequence:
    """Materialised zeros plus an optional tag naming the infinite law.

    ``tail_mass`` bounds sum m_k (1 - |z_k|) over the zeros of the law that
    were *not* materialised; it is 0 for genuinely finite sequences.
    """

    positions: np.ndarray
    multiplicities: np.ndarray
    generator: str | None = None
    tail_mass: float = 0.0

    def __post_init__(self):
        pos = np.atleast_1d(np.array(self.positions, dtype=complex))
        mult = np.atleast_1d(np.array(self.multiplicities, dtype=np.int64))
        if pos.shape != mult.shape:
            raise ValueError("positions and multiplicities differ in length")
        if pos.size and not np.all(np.abs(pos) < 1.0):
            raise ValueError("all zeros must lie in the open unit disc")
        if np.any(mult < 1):
            raise ValueError("multiplicities must be >= 1")
        if self.tail_mass < 0:
            raise ValueError("tail_mass must be non-negative")
        pos.setflags(write=False)
        mult.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "multiplicities", mult)

    @classmethod
    def from_points(cls, points, multiplicities=None, generator=None, tail_mass=0.0):
        pts = np.atleast_1d(np.asarray(points, dtype=complex))
        mult = np.ones(pts.shape, dtype=np.int64) if multiplicities is None else multiplicities
        return cls(pts, mult, generator, tail_mass)

    @classmethod
    def from_zeros(cls, zeros, generator=None, tail_mass=0.0):
        zeros = list(zeros)
        return cls(
            np.array([z.position for z in zeros], dtype=complex),
            np.array([z.multiplicity for z in zeros], dtype=np.int64),
            generator,
            tail_mass,
        )

    @classmethod
    def empty(cls):
        return cls(np.zeros(0, dtype=complex), np.zeros(0, dtype=np.int64))

    @property
    def zeros(self):
        return [Zero(complex(a), int(m)) for a, m in zip(self.positions, self.multiplicities)]

    @property
    def is_finite(self):
        return self.generator is None

    def __len__(self):
        return int(self.positions.size)

    def count(self):
        """Number of zeros counted with multiplicity."""
        return int(self.multiplicities.sum())

    def expanded(self):
        """Positions repeated according to multiplicity."""
        return np.repeat(self.positions, self.multiplicities)

    def blaschke_sum(self):
        return math.fsum((self.multiplicities * (1.0 - np.abs(self.positions))).tolist())

    def finite_part(self):
        """The materialised zeros viewed as a finite Blaschke product."""
        return ZeroSequence(self.positions, self.multiplicities)

    def to_json(self):
        doc = {
            "zeros": [
                {"re": float(a.real), "im": float(a.imag), "mult": int(m)}
                for a, m in zip(self.positions, self.multiplicities)
            ]
        }
        if self.generator is not None:
            doc["generator"] = self.generator
        return doc

    @classmethod
    def from_json(cls, doc):
        if not isinstance(doc, dict) or "zeros" not in doc:
            raise ValueError("zero-sequence document needs a 'zeros' list")
        pts, mult = [], []
        for item in doc["zeros"]:
            re_, im_ = float(item["re"]), float(item["im"])
            if re_ * re_ + im_ * im_ >= 1.0:
                raise ValueError(f"zero ({re_}, {im_}) is not inside the unit disc")
            pts.append(complex(re_, im_))
            mult.append(int(item.get("mult", 1)))
        tag = doc.get("generator")
        tail = tail_mass_from_tag(tag) if tag else 0.0
        return cls(np.array(pts, dtype=complex), np.array(mult, dtype=np.int64), tag, tail)


def dump_zeros(seq, path):
    with open(path, "w") as fh:
        json.dump(seq.to_json(), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_zeros(path):
    with open(path) as fh:
        return ZeroSequence.from_json(json.load(fh))


# ---------------------------------------------------------------- generators

def _exponential_tail(M, J, placement):
    # radial: M zeros at 1.5*2^-j per annulus; jittered: at most 2^(1-j) each
    per = 1.5 if placement == "radial" else 2.0
    return per * M * 2.0 ** -J


def _growing_tail(s, J):
    total, j = [], J + 1
    while True:
        term = math.ceil(j ** s) * 1.5 * 2.0 ** -j
        total.append(term)
        if term < 1e-18 * max(1.0, sum(total)):
            break
        j += 1
    return math.fsum(total)


def tail_mass_from_tag(tag):
    """Recover the unmaterialised Blaschke mass from a generator tag."""
    m = re.fullmatch(r"exponential\(M=(\d+),J=(\d+),placement=(radial|jittered)(?:,seed=-?\d+|,seed=None)?\)", tag)
    if m:
        return _exponential_tail(int(m.group(1)), int(m.group(2)), m.group(3))
    m = re.fullmatch(r"growing_density\(s=([0-9.eE+-]+),J=(\d+)\)", tag)
    if m:
        return _growing_tail(float(m.group(1)), int(m.group(2)))
    raise ValueError(f"unknown generator tag {tag!r}")


def _ring(n, t):
    """n zeros equally rotated on |z| = 1 - t, first one on the positive axis."""
    return (1.0 - t) * np.exp(1j * TWO_PI * np.arange(n) / n)


def gen_exponential(M, J, placement="radial", seed=None):
    """Exactly M zeros in each annulus A_1..A_J.

    ``radial`` puts them at 1-|z| = 1.5 * 2^-j, equally rotated;
    ``jittered`` draws them uniformly (in area) from the annulus.
    """
    if M < 1 or J < 1:
        raise ValueError("M and J must be positive")
    if placement not in ("radial", "jittered"):
        raise ValueError("placement is 'radial' or 'jittered'")
    rng = np.random.default_rng(seed)
    pts = []
    for j in range(1, J + 1):
        if placement == "radial":
            pts.append(_ring(M, 1.5 * 2.0 ** -j))
            continue
        r_in, r_out = 1.0 - 2.0 ** (1 - j), 1.0 - 2.0 ** -j
        ring = np.empty(M, dtype=complex)
        k = 0
        while k < M:
            r = math.sqrt(r_in ** 2 + rng.random() * (r_out ** 2 - r_in ** 2))
            z = r * np.exp(1j * TWO_PI * rng.random())
            if annulus_index(z) == j:
                ring[k] = z
                k += 1
        pts.append(ring)
    tag = f"exponential(M={M},J={J},placement={placement}"
    tag += f",seed={seed})" if placement == "jittered" else ")"
    return ZeroSequence.from_points(np.concatenate(pts), generator=tag,
                                    tail_mass=_exponential_tail(M, J, placement))


def gen_growing_density(s, J):
    """ceil(j^s) zeros equally rotated at 1-|z| = 1.5 * 2^-j, j = 1..J."""
    if s < 1:
        raise ValueError("s must be >= 1")
    pts = [_ring(math.ceil(j ** s), 1.5 * 2.0 ** -j) for j in range(1, J + 1)]
    return ZeroSequence.from_points(np.concatenate(pts), generator=f"growing_density(s={s!r},J={J})",
                                    tail_mass=_growing_tail(s, J))


def gen_stacked_carleson(K, j):
    """K zeros on |z| = 1 - 2^-j, equally spaced inside the arc of length 2^-j at angle 0."""
    if K < 1:
        raise ValueError("K must be >= 1")
    ell = 2.0 ** -j
    theta = -0.5 * ell + (np.arange(K) + 0.5) * ell / K
    z = (1.0 - ell) * np.exp(1j * theta)
    # rounding of |z| may push a zero just below the box floor 1-|z| <= l
    for _ in range(8):
        low = 1.0 - np.abs(z) > ell
        if not np.any(low):
            break
        z[low] *= 1.0 + 2.0 ** -52
    return ZeroSequence.from_points(z)


def stacked_box(j):
    """The Carleson box that defines gen_stacked_carleson(K, j)."""
    from .disc import Arc, CarlesonBox

    return CarlesonBox(Arc(0.0, 2.0 ** -j))


# ---------------------------------------------------------------- evaluation

class Evaluation(NamedTuple):
    value: complex | np.ndarray
    error: float | np.ndarray


def blaschke_factor(a, z):
    """(|a|/a)(a - z)/(1 - conj(a) z), and z itself when a = 0."""
    a = as_complex(a)
    z = as_complex(z)
    if a == 0:
        return z * 1.0
    return _unimodular(a)[()] * (a - z) / (1.0 - np.conj(a) * z)


def _unimodular(a):
    """|a|/a with the a = 0 convention folded in (b_0 = z = -(0 - z))."""
    a = np.asarray(a, dtype=complex)
    # exact power-of-two rescaling keeps |a| accurate for subnormal a
    a = np.where(np.abs(a) < 2.0 ** -500, a * 2.0 ** 600, a)
    mod = np.abs(a)
    safe = np.where(mod > 0, mod, 1.0)
    u = a.real / safe - 1j * (a.imag / safe)
    return np.where(mod > 0, u, -1.0)


def truncation_depth(seq, z, eps):
    """Smallest N with sum_{k>N} m_k 2(1-|z_k|)/(1-|z|) <= eps.

    The sum includes the unmaterialised tail of a generator-backed sequence.
    Finite sequences always use every zero.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if seq.is_finite:
        return len(seq)
    t = 1.0 - abs(as_complex(z))
    masses = seq.multiplicities * (1.0 - np.abs(seq.positions))
    # after[N] = mass of materialised zeros with index >= N (0-based), plus the law's tail
    after = np.append(np.cumsum(masses[::-1])[::-1], 0.0) + seq.tail_mass
    ok = np.nonzero(2.0 * after / t <= eps)[0]
    if ok.size == 0:
        raise TailBudgetExceeded(
            f"{len(seq)} materialised zeros cannot reach eps={eps:g} at 1-|z|={t:g}")
    return int(ok[0])


class BlaschkeProduct:
    """Evaluator for the product over a ZeroSequence.

    Every zero in the list is used.  When the sequence is a truncation of an
    infinite law, the reported error bounds |B_inf - B_N| through the tail
    mass, and TailBudgetExceeded is raised where that bound exceeds
    ``tail_budget``.
    """

    def __init__(self, zeros, tail_budget=1e-8, workers=1):
        if not isinstance(zeros, ZeroSequence):
            zeros = ZeroSequence.from_points(zeros)
        self.zeros = zeros
        self.tail_budget = float(tail_budget)
        self.workers = int(workers)
        a = zeros.expanded()
        self._a = a
        self._abar = np.conj(a)
        self._u = _unimodular(a)
        self._d = np.abs(a) ** 2 - 1.0
        self._annulus_order = np.argsort(annulus_index(a), kind="stable") if a.size else np.zeros(0, int)

    def __repr__(self):
        return f"BlaschkeProduct(n_zeros={self._a.size}, generator={self.zeros.generator!r})"

    @property
    def degree(self):
        return int(self._a.size)

    # -- tail bookkeeping

    def _tail_error(self, z, order):
        tail = self.zeros.tail_mass
        t = 1.0 - np.abs(z)
        if tail == 0.0:
            return np.zeros_like(t)
        err = 2.0 * tail / t if order == 0 else 8.0 * tail / t ** 2
        mod_err = 2.0 * tail / t
        if np.any(mod_err > self.tail_budget):
            raise TailBudgetExceeded(
                f"tail bound {np.max(mod_err):.3g} exceeds budget {self.tail_budget:g}; "
                "materialise more zeros or use finite_part()")
        return err

    # -- chunked kernels

    def _map(self, kernel, z):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        step = _CHUNK_POINTS
        chunks = [flat[i:i + step] for i in range(0, flat.size, step)] or [flat]
        if self.workers > 1 and len(chunks) > 1:
            with ThreadPoolExecutor(self.workers) as ex:
                parts = list(ex.map(kernel, chunks))
        else:
            parts = [kernel(c) for c in chunks]
        return np.concatenate(parts).reshape(z.shape)

    def _value_kernel(self, z):
        return _kernels.product_values(z, self._a, self._abar, self._u)

    def _deriv_kernel(self, z):
        return _kernels.product_derivatives(z, self._a, self._abar, self._u, self._d)

    def _value_reference(self, z):
        """Pure numpy version of _value_kernel (same loop, vectorised over z)."""
        P = np.ones(z.shape, dtype=complex)
        for a, abar, u in zip(self._a, self._abar, self._u):
            P *= u * (a - z) / (1.0 - abar * z)
        return P

    def _deriv_reference(self, z):
        """Pure numpy version of _deriv_kernel."""
        P = np.ones(z.shape, dtype=complex)
        D = np.zeros(z.shape, dtype=complex)
        for a, abar, u, d in zip(self._a, self._abar, self._u, self._d):
            inv = 1.0 / (1.0 - abar * z)
            b = u * (a - z) * inv
            D = D * b + P * (u * d) * inv * inv
            P *= b
        return D

    # -- public API

    def __call__(self, z):
        return self.evaluate(z).value

    def evaluate(self, z):
        z = as_complex(z)
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(check_in_disc(z))
        err = self._tail_error(z, 0)
        val = self._map(self._value_kernel, z)
        return Evaluation(val[0], float(err[0])) if scalar else Evaluation(val, err)

    def derivative(self, z):
        """B'(z) by the leave-one-out product rule; exact at the zeros."""
        z = as_complex(z)
        scalar = np.ndim(z) == 0
        z = np.atleast_1d(check_in_disc(z))
        err = self._tail_error(z, 1)
        val = self._map(self._deriv_kernel, z)
        return Evaluation(val[0], float(err[0])) if scalar else Evaluation(val, err)

    def prime(self, z):
        """B'(z) values only, convenient as an integrand."""
        return self.derivative(z).value

    def boundary_derivative_modulus(self, xi, max_term=1e15):
        """|B'(xi)| = sum m_k (1-|z_k|^2)/|xi - z_k|^2 on the unit circle.

        Terms are added in ascending annulus order with exactly rounded
        summation, so results do not depend on how xi is batched.
        """
        if self.zeros.tail_mass > 0.0:
            raise TailBudgetExceeded("boundary sum of a truncated infinite law is not certified; "
                                     "use finite_part()")
        xi = as_complex(xi)
        scalar = np.ndim(xi) == 0
        xi = np.atleast_1d(xi)
        if not np.allclose(np.abs(xi), 1.0, atol=1e-12):
            raise ValueError("xi must lie on the unit circle")
        a = self._a[self._annulus_order]
        w = 1.0 - np.abs(a) ** 2
        out = np.empty(xi.shape, dtype=float)
        for i, x in enumerate(xi):
            terms = w / np.abs(x - a) ** 2
            if terms.size and not (np.all(np.isfinite(terms)) and terms.max() <= max_term):
                raise ZeroOnRay(f"term overflow at xi={x!r}")
            out[i] = math.fsum(terms.tolist())
        return float(out[0]) if scalar else out


def evaluate(B, z):
    return B.evaluate(z)


def derivative(B, z):
    return B.derivative(z)


def boundary_derivative_modulus(B, xi):
    return B.boundary_derivative_modulus(xi)


# ---------------------------------------------------------------- singular atom

@dataclass(frozen=True)
class SingularAtom:
    """S(z) = exp(c (z + sigma)/(z - sigma)), a zero-free inner function."""

    sigma: complex = 1.0
    mass: float = 1.0
    guard: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        if abs(abs(complex(self.sigma)) - 1.0) > 1e-12:
            raise ValueError("sigma must be unimodular")
        if self.mass <= 0:
            raise ValueError("mass must be positive")

    def _check(self, z):
        z = check_in_disc(z)
        if np.any(np.abs(z - self.sigma) < self.guard):
            raise IllConditioned("evaluation within 1e-12 of the atom")
        return z

    def __call__(self, z):
        z = self._check(as_complex(z))
        return np.exp(self.mass * (z + self.sigma) / (z - self.sigma))

    def derivative(self, z):
        z = self._check(as_complex(z))
        return self(z) * (-2.0 * self.mass * self.sigma) / (z - self.sigma) ** 2

    prime = derivative


def singular_atom_eval(S, z):
    return S(z)


def singular_atom_derivative(S, z):
    return S.derivative(z)
