import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mantlelab.exact import QQi
from mantlelab.mobius import (
    AnnulusDomain,
    DegenerateDomainError,
    MalformedInputError,
    MobiusMap,
    annulus_form,
    compose,
    concentric_normalization,
    glue,
    image_of_unit_circle,
    in_mantle,
    normalize_domain,
    random_mantle,
    strict,
    symmetric_points,
)

ID = MobiusMap.identity()
HALF = MobiusMap.scaling(Fraction(1, 2))


def circumcircle(p1, p2, p3):
    """Exact center and squared radius through three Gaussian-rational points."""
    ax, ay, bx, by, cx, cy = p1.re, p1.im, p2.re, p2.im, p3.re, p3.im
    d = 2 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax**2 + ay**2) * (by - cy) + (bx**2 + by**2) * (cy - ay) + (cx**2 + cy**2) * (ay - by)) / d
    uy = ((ax**2 + ay**2) * (cx - bx) + (bx**2 + by**2) * (ax - cx) + (cx**2 + cy**2) * (bx - ax)) / d
    center = QQi(ux, uy)
    return center, (p1 - center).norm2()


def mantle_maps():
    seeds = st.integers(min_value=0, max_value=10**6)
    return seeds.map(lambda s: random_mantle(random.Random(s)))


def test_compose_identity():
    f = MobiusMap(QQi(2), QQi(1, 1), QQi(0), QQi(5))
    assert compose(ID, f) == f
    assert compose(f, ID) == f


def test_compose_halves():
    assert compose(HALF, HALF) == MobiusMap.scaling(Fraction(1, 4))


def test_degenerate_map_rejected():
    with pytest.raises(MalformedInputError):
        MobiusMap(QQi(1), QQi(2), QQi(2), QQi(4))


def test_canonical_form_is_projective():
    f = MobiusMap(QQi(2), QQi(4), QQi(0), QQi(6))
    g = MobiusMap(QQi(0, 1), QQi(0, 2), QQi(0), QQi(0, 3))
    assert f == g


@pytest.mark.parametrize(
    "f, expected",
    [
        (MobiusMap.scaling(Fraction(1, 2)), True),
        (MobiusMap.scaling(2), False),
        (MobiusMap.disk_automorphism(Fraction(1, 3)), True),
        (MobiusMap(QQi(1), QQi(0), QQi(1), QQi(Fraction(1, 2))), False),  # pole inside the disk
    ],
)
def test_in_mantle_examples(f, expected):
    assert in_mantle(f) is expected


def test_group_is_in_mantle_but_not_strict():
    f = MobiusMap.disk_automorphism(Fraction(1, 3))
    assert in_mantle(f) and not strict(f)


def test_image_circle_matches_three_point_oracle():
    rng = random.Random(5)
    for _ in range(50):
        f = random_mantle(rng)
        center, r2 = circumcircle(f(QQi(1)), f(QQi(0, 1)), f(QQi(-1)))
        img = image_of_unit_circle(f)
        assert img.center == center
        assert img.radius_sq == r2


def test_in_mantle_agrees_with_dense_sampling():
    rng = random.Random(11)
    for _ in range(100):
        a, b, c, d = (QQi(Fraction(rng.randint(-8, 8), 8), Fraction(rng.randint(-8, 8), 8)) for _ in range(4))
        try:
            f = MobiusMap(a, b, c, d)
        except MalformedInputError:
            continue
        if f.d.norm2() <= f.c.norm2():
            assert not in_mantle(f)
            continue
        m = max(abs(f.eval_float(cmath.exp(1j * t))) for t in [2 * math.pi * k / 4096 for k in range(4096)])
        if abs(m - 1) > 1e-6:
            assert in_mantle(f) == (m < 1)


@given(mantle_maps(), mantle_maps())
@settings(max_examples=100, deadline=None)
def test_mantle_closure(f, g):
    assert in_mantle(f) and in_mantle(g)
    assert in_mantle(compose(f, g))
    assert strict(compose(f, g))


@given(mantle_maps(), mantle_maps(), mantle_maps())
@settings(max_examples=40, deadline=None)
def test_exact_associativity(f, g, h):
    assert compose(compose(f, g), h) == compose(f, compose(g, h))


def test_annulus_form_scaling():
    r = Fraction(2, 5)
    k = annulus_form(MobiusMap.scaling(r))
    assert k.outer_circle.center == 0 and k.outer_circle.radius_sq == 1
    assert k.inner_circle.center == 0 and k.inner_circle.radius_sq == r * r
    assert k.inner_param == MobiusMap.scaling(r)


def test_annulus_form_rotated():
    u = QQi(Fraction(3, 5), Fraction(4, 5))
    r = Fraction(1, 3)
    k = annulus_form(MobiusMap.scaling(u * QQi(r)))
    assert k.inner_circle.radius_sq == r * r and k.inner_circle.center == 0
    assert k.inner_param(QQi(1)) == u * QQi(r)


def test_annulus_form_off_center():
    f = MobiusMap(QQi(Fraction(1, 2)), QQi(Fraction(1, 5)), QQi(Fraction(1, 10)), QQi(1))
    k = annulus_form(f)
    center, r2 = circumcircle(f(QQi(1)), f(QQi(0, 1)), f(QQi(-1)))
    assert k.inner_circle.center == center and k.inner_circle.radius_sq == r2


def test_annulus_form_degenerate():
    with pytest.raises(DegenerateDomainError):
        annulus_form(MobiusMap.disk_automorphism(Fraction(1, 3)))
    with pytest.raises(MalformedInputError):
        annulus_form(MobiusMap.scaling(2))


def test_normalize_already_normalized():
    f = MobiusMap(QQi(Fraction(1, 2)), QQi(Fraction(1, 5)), QQi(Fraction(1, 10)), QQi(1))
    t, g = normalize_domain(annulus_form(f))
    assert t == ID and g == f


def test_normalize_rotated_domain():
    u = QQi(Fraction(5, 13), Fraction(12, 13))
    f = random_mantle(random.Random(3))
    k = annulus_form(f).transform(MobiusMap.scaling(u))
    t, g = normalize_domain(k)
    assert t == MobiusMap.scaling(u.conj())
    assert g == f


def test_normalize_round_trip_after_moebius_transport():
    rng = random.Random(7)
    for _ in range(30):
        f = random_mantle(rng)
        w = compose(MobiusMap(QQi(2), QQi(Fraction(1, 3), 1), QQi(0), QQi(1)), MobiusMap.disk_automorphism(QQi(Fraction(1, 4), Fraction(-1, 5))))
        k = annulus_form(f).transform(w)
        t, g = normalize_domain(k)
        assert g == f
        assert k.transform(t) == annulus_form(g)


def test_symmetric_points_make_circles_concentric():
    c1, r1 = 0.3 + 0.1j, 2.0
    c2, r2 = 0.8 - 0.2j, 0.7
    a, b = symmetric_points(c1, r1, c2, r2)
    # oracle: both points symmetric with respect to both circles
    for c, r in ((c1, r1), (c2, r2)):
        assert abs((b - c) - r * r / (a - c).conjugate()) < 1e-12
    phi = lambda z: (z - a) / (z - b)
    for c, r in ((c1, r1), (c2, r2)):
        rad = [abs(phi(c + r * cmath.exp(1j * t))) for t in (0.1, 1.7, 3.3, 5.0)]
        assert max(rad) - min(rad) < 1e-12


def test_concentric_normalization():
    f = MobiusMap(QQi(Fraction(1, 2)), QQi(Fraction(1, 5)), QQi(Fraction(1, 10)), QQi(1))
    q = concentric_normalization(image_of_unit_circle(f))
    assert abs(q(1) - 1) < 1e-14
    inner = [abs(q(f.eval_float(cmath.exp(1j * t)))) for t in (0.0, 1.0, 2.0, 4.0)]
    assert max(inner) - min(inner) < 1e-13
    assert abs(inner[0] - math.exp(-q.modulus)) < 1e-13
    outer = [abs(q(cmath.exp(1j * t))) for t in (0.3, 2.2)]
    assert max(abs(x - 1) for x in outer) < 1e-14


def test_glue_halves():
    k = glue(annulus_form(HALF), annulus_form(HALF))
    assert normalize_domain(k)[1] == MobiusMap.scaling(Fraction(1, 4))


def test_glue_with_rotation_factor():
    u = QQi(Fraction(3, 5), Fraction(4, 5))
    rot = MobiusMap.scaling(u * QQi(Fraction(1, 2)))
    k = glue(annulus_form(rot), annulus_form(rot))
    assert normalize_domain(k)[1] == MobiusMap.scaling(u * u * QQi(Fraction(1, 4)))


def test_realization_equivalence_random_pairs():
    rng = random.Random(2024)
    for _ in range(100):
        f1, f2 = random_mantle(rng), random_mantle(rng)
        w1 = MobiusMap(QQi(3), QQi(1, 2), QQi(0), QQi(1))
        w2 = MobiusMap.disk_automorphism(QQi(Fraction(1, 2)), QQi(0, 1))
        k1 = annulus_form(f1).transform(w1)
        k2 = annulus_form(f2).transform(w2)
        assert normalize_domain(glue(k1, k2))[1] == compose(f1, f2)


def test_domain_requires_nesting():
    with pytest.raises(DegenerateDomainError):
        AnnulusDomain(ID, MobiusMap(QQi(Fraction(1, 2)), QQi(Fraction(1, 2)), QQi(0), QQi(1)))


def test_json_round_trip():
    f = random_mantle(random.Random(1))
    assert MobiusMap.from_json(f.to_json()) == f
    k = annulus_form(f)
    assert AnnulusDomain.from_json(k.to_json()) == k
