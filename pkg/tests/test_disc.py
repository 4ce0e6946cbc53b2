import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakbesov import (
    Annulus,
    Arc,
    CarlesonBox,
    DiscPoint,
    FullDisc,
    PseudoDisc,
    SectorT,
    StolzAngle,
    annulus_index,
    mobius,
    mu_p_closed_form,
    pseudo_distance,
    region_contains,
)
from weakbesov.disc import pow_diff, radial_mass


def disc_points(r_max=0.999):
    return st.builds(lambda r, th: r * complex(math.cos(th), math.sin(th)),
                     st.floats(0.0, r_max), st.floats(0.0, 2 * math.pi))


def test_disc_point_rejects_boundary():
    with pytest.raises(ValueError):
        DiscPoint(1.0)
    with pytest.raises(ValueError):
        DiscPoint(0.6 + 0.8j)
    assert complex(DiscPoint(0.5j)) == 0.5j


@given(disc_points(), disc_points())
def test_mobius_is_involution(c, z):
    assert abs(mobius(c, mobius(c, z)) - z) <= 1e-9 / (1 - abs(c)) ** 2


@given(disc_points(0.99), disc_points(0.99), disc_points(0.99))
def test_pseudo_distance_mobius_invariant(c, a, b):
    before = pseudo_distance(a, b)
    after = pseudo_distance(mobius(c, a), mobius(c, b))
    assert abs(after - before) <= 1e-8


@given(disc_points(), disc_points())
def test_pseudo_distance_symmetric_bounded(a, b):
    d = pseudo_distance(a, b)
    assert 0.0 <= d < 1.0 + 1e-15
    assert d == pytest.approx(pseudo_distance(b, a), abs=1e-15)


@given(st.floats(1e-12, 1.0, exclude_min=True))
def test_annulus_index_matches_definition(t):
    j = annulus_index(1.0 - t)
    tt = 1.0 - abs(1.0 - t)
    assert 2.0 ** -j < tt <= 2.0 ** (1 - j)


def test_annulus_ties_land_on_closed_side():
    for j in range(1, 40):
        z = 1.0 - 2.0 ** (1 - j)
        assert annulus_index(z) == j
        assert Annulus(j).contains(z)
        if j > 1:
            assert not Annulus(j - 1).contains(z)


def test_annulus_index_rejects_circle():
    with pytest.raises(ValueError):
        annulus_index(np.array([0.5, 1.0]))


def test_mu_p_full_disc_closed_form():
    for p in (1.5, 2.0, 3.0):
        assert mu_p_closed_form(FullDisc(), p) == pytest.approx(2 * math.pi / (p * (p - 1)))
    with pytest.raises(ValueError):
        mu_p_closed_form(FullDisc(), 1.0)


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0, 5.0])
def test_annuli_partition_the_disc(p):
    total = math.fsum(mu_p_closed_form(Annulus(j), p) for j in range(1, 400))
    assert total == pytest.approx(mu_p_closed_form(FullDisc(), p), rel=1e-12)


def test_area_of_annulus_p2():
    # mu_2 is area
    lo, hi = Annulus(3).t_range
    area = math.pi * ((1 - lo) ** 2 - (1 - hi) ** 2)
    assert mu_p_closed_form(Annulus(3), 2.0) == pytest.approx(area, rel=1e-13)


def test_pow_diff_no_cancellation():
    a, b = 1.0, 1.0 - 1e-12
    assert pow_diff(a, b, 2.0) == pytest.approx(2e-12, rel=1e-6)
    assert radial_mass(0.5, 0.0, 2.0) == pytest.approx(0.5 - 0.125)


def test_arc_wraps():
    arc = Arc(-0.1, 0.4)
    assert arc.contains_angle(0.05)
    assert arc.contains_angle(2 * math.pi - 0.25)
    assert not arc.contains_angle(0.2)
    with pytest.raises(ValueError):
        Arc(0.0, 0.0)


def test_carleson_box_membership():
    box = CarlesonBox(Arc(0.0, 0.25))
    assert region_contains(box, 0.8)
    assert not region_contains(box, 0.7)
    assert not region_contains(box, 0.9 * np.exp(0.2j))
    assert box.top_point() == pytest.approx(0.75)
    assert CarlesonBox(Arc(0.0, math.pi), normalized=True).side == pytest.approx(0.5)


def test_stolz_and_sector():
    s = StolzAngle(0.0, alpha=2.0)
    assert region_contains(s, 0.9)
    assert not region_contains(s, 0.9j)
    t = SectorT(Arc(0.0, 0.5))
    assert t.height == pytest.approx(0.5 / (2 * math.sqrt(3)))
    assert region_contains(t, 0.95)
    assert not region_contains(t, 0.8)
    with pytest.raises(ValueError):
        StolzAngle(0.0, alpha=1.0)


def test_pseudo_disc_samples_inside(rng):
    d = PseudoDisc(0.7 + 0.1j, 0.5)
    pts = d.sample(500, rng)
    assert np.all(pseudo_distance(d.center, pts) < 0.5 + 1e-12)
    assert d.contains(d.center)
    with pytest.raises(ValueError):
        PseudoDisc(0.0, 1.0)
