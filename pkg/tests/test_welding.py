import json
import math
import random

import numpy as np
import pytest

from mantlelab.mobius import compose
from mantlelab.welding import (
    AnnularTriple,
    CircleMap,
    GeometryError,
    NeretinElement,
    NumericError,
    WeldConfig,
    annulus_map,
    from_mobius,
    from_triple,
    multiply,
    random_element,
    random_weldable_mantle,
    split_count,
    to_triple,
)


@pytest.fixture(scope="module")
def triple_xyz():
    rng = np.random.default_rng(11)
    return tuple(random_element(rng) for _ in range(3))


def test_round_annuli_add_moduli():
    for s, t in [(0.3, 0.5), (0.05, 1.7), (1.0, 1.0)]:
        got = multiply(NeretinElement.round(s), NeretinElement.round(t))
        assert got.distance(NeretinElement.round(s + t)) < 1e-10


def test_concentric_circle_gives_identity():
    r = 0.4
    tri = AnnularTriple(CircleMap.identity(64), CircleMap.identity(64).scale(r))
    e = from_triple(tri)
    assert abs(e.t + math.log(r)) < 1e-12
    assert e.distance(NeretinElement.round(-math.log(r))) < 1e-12


def test_eccentric_circle_modulus():
    # a circle of radius r about c inside the unit disk has modulus
    # log(1 / rho) with rho the inner radius after the normalizing Mobius map
    c, r = 0.3, 0.2
    tri = AnnularTriple(CircleMap.identity(64), CircleMap(np.r_[np.zeros(64), c, r, np.zeros(63)]))
    Q = annulus_map(tri)
    # fixed points of reflection in both circles: z^2 - ((1 + c^2 - r^2)/c) z + 1 = 0
    b = (1 + c * c - r * r) / c
    a = (b - math.sqrt(b * b - 4)) / 2
    rho = abs((c + r - a) / (1 - a * (c + r)))
    assert abs(Q.t + math.log(rho)) < 1e-11


def test_mobius_products_match_closed_form():
    rng = random.Random(5)
    for _ in range(6):
        f, g = random_weldable_mantle(rng), random_weldable_mantle(rng)
        got = multiply(from_mobius(f), from_mobius(g))
        assert got.distance(from_mobius(compose(f, g))) < 1e-8


def test_associativity(triple_xyz):
    x, y, z = triple_xyz
    assert multiply(multiply(x, y), z).distance(multiply(x, multiply(y, z))) < 1e-6


def test_split_independence(triple_xyz):
    x, y, _ = triple_xyz
    n = split_count(x.q.compose(y.p), y.t)
    assert multiply(x, y, split=n).distance(multiply(x, y, split=2 * n)) < 1e-7


def test_round_trip_through_triples(triple_xyz):
    x = triple_xyz[0]
    assert from_triple(to_triple(x)).distance(x) < 1e-10
    rot = np.exp(0.7j)
    assert from_triple(to_triple(x, lambda z: rot * z)).distance(x) < 1e-10


def test_conformal_pushforward_is_invisible(triple_xyz):
    x = triple_xyz[1]
    a = 0.2 - 0.1j
    W = lambda z: 0.9 * (z - a) / (1 - np.conj(a) * z) + 0.03  # noqa: E731
    assert from_triple(to_triple(x, W)).distance(x) < 1e-8


def test_small_perturbation_moves_product_slightly(triple_xyz):
    x, y, _ = triple_xyz
    bump = np.zeros_like(y.q.coeffs)
    bump[y.q.M + 2] = 1e-6
    y2 = NeretinElement(y.p, y.t, CircleMap(y.q.coeffs + bump))
    d = multiply(x, y2).distance(multiply(x, y))
    assert 0 < d < 1e-5


def test_circle_map_inverse(triple_xyz):
    p = triple_xyz[0].p
    z = np.exp(1j * np.linspace(0, 6, 17))
    assert np.max(np.abs(p.inverse()(p(z)) - z)) < 1e-12


def test_json_round_trip(triple_xyz):
    x = triple_xyz[2]
    back = NeretinElement.from_json(json.loads(json.dumps(x.to_json())))
    assert back.distance(x) == 0
    bad = x.to_json()
    bad["M"] = 3
    with pytest.raises(ValueError):
        NeretinElement.from_json(bad)


def test_invalid_elements():
    with pytest.raises(GeometryError):
        NeretinElement.round(0.0)
    with pytest.raises(GeometryError):
        NeretinElement(CircleMap.identity(8).scale(1j), 0.5, CircleMap.identity(8))
    with pytest.raises(ValueError):
        CircleMap(np.zeros(4))


def test_touching_curves_rejected():
    tri = AnnularTriple(CircleMap.identity(32), CircleMap.identity(32).scale(0.9999))
    with pytest.raises(GeometryError):
        annulus_map(tri, WeldConfig(modes=32))


def test_underresolved_map_raises():
    # a Mobius boundary map with its pole at radius 1.05 cannot be continued
    # inward at 16 modes
    a = 1 / 1.05
    q = CircleMap.from_function(lambda z: (z - a) / (1 - a * z), 16)
    with pytest.raises(NumericError):
        multiply(NeretinElement(CircleMap.identity(16), 0.5, q), NeretinElement.round(2.0, 16), WeldConfig(modes=16))
