import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakbesov import (
    BlaschkeProduct,
    SingularAtom,
    Zero,
    ZeroSequence,
    blaschke_factor,
    boundary_derivative_modulus,
    derivative,
    dump_zeros,
    evaluate,
    gen_exponential,
    gen_growing_density,
    gen_stacked_carleson,
    load_zeros,
    pseudo_distance,
    stacked_box,
    truncation_depth,
)
from weakbesov.errors import IllConditioned, TailBudgetExceeded, ZeroOnRay
from weakbesov.norms import periodic_mean


def random_points(rng, n, r_max=0.9):
    r = r_max * np.sqrt(rng.random(n))
    return r * np.exp(2j * np.pi * rng.random(n))


zero_lists = st.lists(
    st.builds(lambda r, th: r * complex(math.cos(th), math.sin(th)),
              st.floats(0.0, 0.95), st.floats(0.0, 2 * math.pi)),
    min_size=1, max_size=12)


def test_factor_at_zero_is_identity():
    z = np.array([0.3, -0.2j])
    assert np.allclose(blaschke_factor(0.0, z), z)


def test_factor_normalisation():
    # (|a|/a) (a - z)/(1 - conj(a) z) equals |a| at z = 0
    a = 0.4 + 0.3j
    assert blaschke_factor(a, 0.0) == pytest.approx(abs(a))


@given(zero_lists)
@settings(max_examples=50, deadline=None)
def test_modulus_below_one_and_zeros_vanish(zs):
    B = BlaschkeProduct(zs)
    rng = np.random.default_rng(0)
    pts = random_points(rng, 64, 0.99)
    assert np.all(np.abs(B(pts)) <= 1.0 + 1e-12)
    assert np.all(np.abs(B(np.array(zs))) <= 1e-12)


@given(zero_lists)
@settings(max_examples=50, deadline=None)
def test_compiled_kernels_match_reference(zs):
    B = BlaschkeProduct(zs)
    pts = random_points(np.random.default_rng(1), 128, 0.995)
    assert np.allclose(B._value_kernel(pts), B._value_reference(pts), rtol=1e-12, atol=1e-14)
    assert np.allclose(B._deriv_kernel(pts), B._deriv_reference(pts), rtol=1e-10, atol=1e-12)


@given(zero_lists)
@settings(max_examples=40, deadline=None)
def test_separation_identity_at_zeros(zs):
    # (1-|z_k|^2)|B'(z_k)| equals the leave-one-out product of rho(z_k, z_n)
    a = np.array(zs)
    B = BlaschkeProduct(a)
    lhs = (1 - np.abs(a) ** 2) * np.abs(B.prime(a))
    for k in range(a.size):
        rho = [pseudo_distance(a[k], a[n]) for n in range(a.size) if n != k]
        assert lhs[k] == pytest.approx(math.prod(rho), rel=1e-9, abs=1e-13)


def test_two_point_example():
    B = BlaschkeProduct([0.5, -0.5])
    assert (1 - 0.25) * abs(B.prime(0.5)) == pytest.approx(0.8)
    assert B.prime(0.5) == pytest.approx(-16 / 15)


def test_empty_product_is_one():
    B = BlaschkeProduct(ZeroSequence.empty())
    z = np.array([0.1, 0.5j])
    assert np.allclose(B(z), 1.0)
    assert np.allclose(B.prime(z), 0.0)
    assert B.degree == 0


def test_multiplicity_expands():
    seq = ZeroSequence.from_zeros([Zero(0.5, 2)])
    B = BlaschkeProduct(seq)
    z = 0.1 + 0.2j
    assert B(z) == pytest.approx(blaschke_factor(0.5, z) ** 2)
    assert abs(B.prime(0.5)) < 1e-15
    with pytest.raises(ValueError):
        Zero(0.5, 0)


def test_scalar_and_array_agree():
    B = BlaschkeProduct([0.3, 0.6j, -0.2])
    z = np.array([0.1, 0.7j, -0.4 + 0.1j])
    arr = evaluate(B, z).value
    for i, zi in enumerate(z):
        assert evaluate(B, zi).value == arr[i]
    assert derivative(B, z[0]).value == B.prime(z)[0]


def test_chunking_does_not_change_results(monkeypatch):
    import weakbesov.blaschke as mod

    B = BlaschkeProduct(random_points(np.random.default_rng(3), 9))
    pts = random_points(np.random.default_rng(4), 1000, 0.99)
    full = B.prime(pts)
    monkeypatch.setattr(mod, "_CHUNK_POINTS", 37)
    assert np.array_equal(B.prime(pts), full)
    B4 = BlaschkeProduct(B.zeros, workers=4)
    assert np.array_equal(B4.prime(pts), full)


def test_rejects_points_outside_disc():
    B = BlaschkeProduct([0.5])
    with pytest.raises(ValueError):
        B(1.0)


@pytest.mark.parametrize("n", [1, 3, 7])
def test_boundary_modulus_poisson_mean(n):
    a = random_points(np.random.default_rng(n), n)
    B = BlaschkeProduct(a)
    mean = periodic_mean(lambda th: boundary_derivative_modulus(B, np.exp(1j * th)))
    assert mean == pytest.approx(n, rel=1e-8)


def test_boundary_modulus_matches_radial_limit():
    B = BlaschkeProduct([0.3 + 0.2j, -0.5])
    xi = np.exp(0.7j)
    assert abs(B.prime(0.999999 * xi)) == pytest.approx(B.boundary_derivative_modulus(xi), rel=1e-4)


def test_boundary_modulus_errors():
    B = BlaschkeProduct([0.5])
    with pytest.raises(ValueError):
        B.boundary_derivative_modulus(0.5)
    near = BlaschkeProduct([1 - 1e-17 + 0j]) if 1 - 1e-17 < 1 else None
    assert near is None  # 1 - 1e-17 rounds to 1 in double precision
    B2 = BlaschkeProduct([1 - 2 ** -52])
    with pytest.raises(ZeroOnRay):
        B2.boundary_derivative_modulus(1.0)
    law = gen_exponential(1, 5)
    with pytest.raises(TailBudgetExceeded):
        BlaschkeProduct(law).boundary_derivative_modulus(1.0)


def test_tail_bound_and_truncation_depth():
    law = gen_exponential(1, 30)
    assert law.tail_mass > 0
    B = BlaschkeProduct(law, tail_budget=1e-3)
    ev = B.evaluate(0.1)
    assert ev.error == pytest.approx(2 * law.tail_mass / 0.9)
    with pytest.raises(TailBudgetExceeded):
        B.evaluate(1 - 1e-12)
    fin = ZeroSequence.from_points([0.1, 0.2])
    assert truncation_depth(fin, 0.5, 1e-9) == 2
    with pytest.raises(TailBudgetExceeded):
        truncation_depth(gen_exponential(1, 3), 0.999, 1e-9)
    assert truncation_depth(law, 0.0, 1e-3) <= len(law)


def test_generators_shapes():
    e = gen_exponential(2, 6)
    assert len(e) == 12
    g = gen_growing_density(1, 5)
    assert len(g) == 1 + 2 + 3 + 4 + 5
    s = gen_stacked_carleson(50, 6)
    assert len(s) == 50
    assert np.all(stacked_box(6).contains(s.positions))
    j = gen_exponential(3, 8, placement="jittered", seed=7)
    assert np.array_equal(j.positions, gen_exponential(3, 8, placement="jittered", seed=7).positions)
    with pytest.raises(ValueError):
        gen_exponential(0, 3)
    with pytest.raises(ValueError):
        gen_growing_density(0.5, 3)


def test_json_round_trip(tmp_path):
    seq = gen_exponential(2, 4, placement="jittered", seed=1)
    path = tmp_path / "z.json"
    dump_zeros(seq, str(path))
    back = load_zeros(str(path))
    assert np.array_equal(back.positions, seq.positions)
    assert back.generator == seq.generator
    assert back.tail_mass == pytest.approx(seq.tail_mass)
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"zeros": [{"re": 1.0, "im": 0.0, "mult": 1}]}))
    with pytest.raises(ValueError):
        load_zeros(str(bad))


def test_singular_atom():
    S = SingularAtom(1.0, 1.0)
    assert abs(S(0.0)) == pytest.approx(math.exp(-1.0))
    r = np.array([0.9, 0.99, 0.999])
    assert np.all(np.diff(np.abs(S(r))) < 0)
    z, h = 0.3 + 0.4j, 1e-6
    fd = (S(z + h) - S(z - h)) / (2 * h)
    assert S.derivative(z) == pytest.approx(fd, rel=1e-7)
    with pytest.raises(IllConditioned):
        S(1 - 1e-13)
    with pytest.raises(ValueError):
        SingularAtom(0.5, 1.0)
