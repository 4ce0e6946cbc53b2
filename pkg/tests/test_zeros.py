import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakbesov import (
    Arc,
    CarlesonBox,
    ZeroSequence,
    annuli_counts,
    carleson_ratio,
    classify,
    exponential_constant,
    gen_exponential,
    gen_growing_density,
    gen_stacked_carleson,
    separation_delta,
    stacked_box,
)
from weakbesov.errors import InconclusiveDepth
from weakbesov.zeros import dyadic_boxes, dyadic_carleson_sup


def brute_delta(a):
    best = 1.0
    for k in range(len(a)):
        prod = 1.0
        for n in range(len(a)):
            if n != k:
                prod *= abs(a[k] - a[n]) / abs(1 - a[k].conjugate() * a[n])
        best = min(best, prod)
    return best


@given(st.integers(0, 10_000), st.integers(2, 20))
@settings(max_examples=30, deadline=None)
def test_separation_matches_double_loop(seed, n):
    rng = np.random.default_rng(seed)
    a = 0.95 * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))
    seq = ZeroSequence.from_points(a)
    assert separation_delta(seq) == pytest.approx(brute_delta(list(a)), rel=1e-12, abs=1e-300)


def test_separation_edge_cases():
    assert separation_delta(ZeroSequence.from_points([0.3])) == 1.0
    assert separation_delta(ZeroSequence.empty()) == 1.0
    assert separation_delta(ZeroSequence.from_points([0.3], [2])) == 0.0
    assert separation_delta(ZeroSequence.from_points([0.5, -0.5])) == pytest.approx(0.8)
    with pytest.raises(ValueError):
        separation_delta(gen_exponential(1, 4))


def test_separation_blocks_agree():
    seq = gen_exponential(3, 9).finite_part()
    assert separation_delta(seq, block=4) == separation_delta(seq)


@given(st.integers(1, 4), st.integers(1, 25))
@settings(max_examples=30, deadline=None)
def test_exponential_counts(M, J):
    prof = annuli_counts(gen_exponential(M, J), J)
    assert prof.counts == (M,) * J
    assert exponential_constant(prof) == M


def test_jittered_counts():
    prof = annuli_counts(gen_exponential(3, 12, placement="jittered", seed=5), 12)
    assert prof.counts == (3,) * 12


def test_growing_counts_and_multiplicity():
    assert annuli_counts(gen_growing_density(1, 6), 6).counts == (1, 2, 3, 4, 5, 6)
    seq = ZeroSequence.from_points([0.6, 0.6j], [3, 1])
    assert annuli_counts(seq, 3).counts == (0, 4, 0)
    with pytest.raises(ValueError):
        annuli_counts(seq, 0)


def test_carleson_ratio_of_stack():
    for K in (10, 100, 1000):
        S = carleson_ratio(gen_stacked_carleson(K, 6), [stacked_box(6)])
        assert S == pytest.approx(K, rel=1e-12)
    with pytest.raises(ValueError):
        carleson_ratio(ZeroSequence.empty(), [])


def test_dyadic_sup_matches_explicit_family():
    seq = gen_exponential(2, 5, placement="jittered", seed=3).finite_part()
    explicit = carleson_ratio(seq, list(dyadic_boxes(5)))
    assert dyadic_carleson_sup(seq, 5) == pytest.approx(explicit, rel=1e-12)


def test_carleson_box_nesting():
    seq = gen_stacked_carleson(40, 5)
    small = CarlesonBox(Arc(0.0, 2 ** -5))
    big = CarlesonBox(Arc(0.0, 2 ** -3))
    mass_small = carleson_ratio(seq, [small]) * small.side
    mass_big = carleson_ratio(seq, [big]) * big.side
    assert mass_small <= mass_big + 1e-15


def test_classify_kinds():
    assert classify(ZeroSequence.from_points([0.1, 0.2]), 5).kind == "finite"
    v = classify(gen_exponential(2, 12), 12)
    assert (v.kind, v.M) == ("exponential", 2)
    assert classify(gen_growing_density(1, 12), 12).kind == "non_exponential"
    assert '"kind": "exponential"' in v.dumps()
    with pytest.raises(InconclusiveDepth):
        classify(gen_exponential(1, 3), 3)
    with pytest.raises(InconclusiveDepth):
        classify(gen_exponential(1, 4), 8)
