"""The mantle of PSL(2,R): disk-contracting Moebius maps and annuli with Moebius boundary parametrizations.

Two realizations are implemented. A :class:`MobiusMap` ``f`` with ``f(D) ⊂ D``
is an element under composition. An :class:`AnnulusDomain` is a doubly
connected region bounded by two circles, each carrying a fractional-linear
parametrization of the unit circle; these multiply by glueing. All arithmetic
is exact over the Gaussian rationals.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .exact import QQi, frac, fstr


class MalformedInputError(ValueError):
    pass


class DegenerateDomainError(ValueError):
    pass


@dataclass(frozen=True)
class MobiusMap:
    """z -> (a z + b) / (c z + d), stored with the first nonzero coefficient equal to 1."""

    a: QQi
    b: QQi
    c: QQi
    d: QQi

    def __post_init__(self):
        coeffs = [QQi.of(x) for x in (self.a, self.b, self.c, self.d)]
        if coeffs[0] * coeffs[3] - coeffs[1] * coeffs[2] == 0:
            raise MalformedInputError("Moebius map with vanishing determinant")
        lead = next(x for x in coeffs if x)
        coeffs = [x / lead for x in coeffs]
        for name, x in zip("abcd", coeffs):
            object.__setattr__(self, name, x)

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(QQi(1), QQi(0), QQi(0), QQi(1))

    @classmethod
    def scaling(cls, lam) -> "MobiusMap":
        return cls(QQi.of(lam), QQi(0), QQi(0), QQi(1))

    @classmethod
    def disk_automorphism(cls, a, rotation=QQi(1)) -> "MobiusMap":
        """z -> rotation * (z - a) / (1 - conj(a) z)."""
        a, u = QQi.of(a), QQi.of(rotation)
        return cls(u, -u * a, -a.conj(), QQi(1))

    @property
    def det(self) -> QQi:
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        z = QQi.of(z)
        den = self.c * z + self.d
        if den == 0:
            raise ZeroDivisionError("evaluation at the pole")
        return (self.a * z + self.b) / den

    def eval_float(self, z: complex) -> complex:
        a, b, c, d = map(complex, (self.a, self.b, self.c, self.d))
        return (a * z + b) / (c * z + d)

    def inverse(self) -> "MobiusMap":
        return MobiusMap(self.d, -self.b, -self.c, self.a)

    def matrix(self) -> tuple[tuple[QQi, QQi], tuple[QQi, QQi]]:
        return ((self.a, self.b), (self.c, self.d))

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in "abcd"}

    @classmethod
    def from_json(cls, obj: dict) -> "MobiusMap":
        try:
            return cls(*(QQi.from_json(obj[k]) for k in "abcd"))
        except KeyError as exc:
            raise MalformedInputError(f"missing Moebius coefficient {exc}") from None


def compose(f: MobiusMap, g: MobiusMap) -> MobiusMap:
    """f ∘ g."""
    return MobiusMap(
        f.a * g.a + f.b * g.c,
        f.a * g.b + f.b * g.d,
        f.c * g.a + f.d * g.c,
        f.c * g.b + f.d * g.d,
    )


@dataclass(frozen=True)
class Circle:
    """Circle with exact center and exact squared radius."""

    center: QQi
    radius_sq: Fraction

    @property
    def radius(self) -> float:
        return math.sqrt(self.radius_sq)

    def contains_point(self, z) -> bool:
        return (QQi.of(z) - self.center).norm2() == self.radius_sq

    def to_json(self) -> dict:
        return {"center": self.center.to_json(), "radius_sq": fstr(self.radius_sq), "radius": repr(self.radius)}

    @classmethod
    def from_json(cls, obj: dict) -> "Circle":
        if "radius_sq" in obj:
            r2 = frac(obj["radius_sq"])
        else:
            r2 = frac(obj["radius"]) ** 2
        return cls(QQi.from_json(obj["center"]), r2)


UNIT_CIRCLE = Circle(QQi(0), Fraction(1))


def image_of_unit_circle(f: MobiusMap) -> Circle:
    """Exact image circle f(S^1); requires the pole of f off the unit circle."""
    dc = f.d.norm2() - f.c.norm2()
    if dc == 0:
        raise DegenerateDomainError("pole on the unit circle: image is a line")
    center = (f.b * f.d.conj() - f.a * f.c.conj()) / QQi(dc)
    radius_sq = f.det.norm2() / (dc * dc)
    return Circle(center, radius_sq)


def _sqrt_sum_le(p: Fraction, q: Fraction, r: Fraction, strict: bool) -> bool:
    """Decide sqrt(p) + sqrt(q) <= sqrt(r) (or <) exactly, for p, q >= 0, r > 0."""
    p, q = p / r, q / r
    if strict:
        if p >= 1 or q >= 1:
            return False
        s = 1 + q - p
        return s > 0 and 4 * q < s * s
    if p > 1 or q > 1:
        return False
    s = 1 + q - p
    return s >= 0 and 4 * q <= s * s


def pole_outside_closed_disk(f: MobiusMap) -> bool:
    return f.d.norm2() > f.c.norm2()


def in_mantle(f: MobiusMap) -> bool:
    """f has no pole in the closed unit disk and maps it into itself (boundary contact allowed)."""
    if not pole_outside_closed_disk(f):
        return False
    img = image_of_unit_circle(f)
    return _sqrt_sum_le(img.center.norm2(), img.radius_sq, Fraction(1), strict=False)


def strict(f: MobiusMap) -> bool:
    """f maps the closed unit disk into the open unit disk."""
    if not pole_outside_closed_disk(f):
        return False
    img = image_of_unit_circle(f)
    return _sqrt_sum_le(img.center.norm2(), img.radius_sq, Fraction(1), strict=True)


def circle_strictly_inside(inner: Circle, outer: Circle) -> bool:
    return _sqrt_sum_le((inner.center - outer.center).norm2(), inner.radius_sq, outer.radius_sq, strict=True)


@dataclass(frozen=True)
class AnnulusDomain:
    """Region between two circles with Moebius parametrizations of both boundaries.

    The outer boundary is parametrized outgoing (domain on the left), the
    inner one ingoing (domain on the right); both parametrizations map the
    unit disk onto the disk bounded by their circle, which fixes these
    orientations.
    """

    outer_param: MobiusMap
    inner_param: MobiusMap

    outer_orientation = "outgoing"
    inner_orientation = "ingoing"

    def __post_init__(self):
        for name in ("outer_param", "inner_param"):
            if not pole_outside_closed_disk(getattr(self, name)):
                raise MalformedInputError(f"{name} does not map the unit disk onto a bounded disk")
        if not circle_strictly_inside(self.inner_circle, self.outer_circle):
            raise DegenerateDomainError("inner circle is not strictly inside the outer circle")

    @property
    def outer_circle(self) -> Circle:
        return image_of_unit_circle(self.outer_param)

    @property
    def inner_circle(self) -> Circle:
        return image_of_unit_circle(self.inner_param)

    def transform(self, w: MobiusMap) -> "AnnulusDomain":
        """Image of the domain under a Moebius map (parametrizations transported)."""
        return AnnulusDomain(compose(w, self.outer_param), compose(w, self.inner_param))

    def to_json(self) -> dict:
        return {
            "outer_param": self.outer_param.to_json(),
            "inner_param": self.inner_param.to_json(),
            "outer_circle": self.outer_circle.to_json(),
            "inner_circle": self.inner_circle.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AnnulusDomain":
        k = cls(MobiusMap.from_json(obj["outer_param"]), MobiusMap.from_json(obj["inner_param"]))
        for key in ("outer_circle", "inner_circle"):
            if key in obj and Circle.from_json(obj[key]) != getattr(k, key):
                raise MalformedInputError(f"{key} does not match its parametrization")
        return k


def annulus_form(f: MobiusMap) -> AnnulusDomain:
    """Unit disk minus the open image f(D), outer boundary with the standard parametrization."""
    if not in_mantle(f):
        raise MalformedInputError("map is not in the mantle")
    if not strict(f):
        raise DegenerateDomainError("image touches the unit circle; annulus is degenerate")
    return AnnulusDomain(MobiusMap.identity(), f)


def normalize_domain(k: AnnulusDomain) -> tuple[MobiusMap, MobiusMap]:
    """(T, f) with T(k) = annulus_form(f): T is the unique map making the outer boundary standard."""
    t = k.outer_param.inverse()
    return t, compose(t, k.inner_param)


def glue(k1: AnnulusDomain, k2: AnnulusDomain) -> AnnulusDomain:
    """Sew k2 into the hole of k1, identifying inner boundary of k1 with outer boundary of k2."""
    w = compose(k1.inner_param, k2.outer_param.inverse())
    try:
        return AnnulusDomain(k1.outer_param, compose(w, k2.inner_param))
    except DegenerateDomainError as exc:
        raise DegenerateDomainError(f"glued domain is degenerate: {exc}") from None


# ---------------------------------------------------------------------------
# concentric normalization (floating point; square roots are unavoidable)


def symmetric_points(c1: complex, r1: float, c2: complex, r2: float) -> tuple[complex, complex]:
    """The pair of points symmetric with respect to both circles (nested, non-concentric)."""
    d = c2 - c1
    if abs(d) == 0:
        raise ValueError("circles are concentric")
    u = d / abs(d)
    # scale so the first circle is the unit circle centred at 0
    dd, rr = abs(d) / r1, r2 / r1
    b = 1 + dd * dd - rr * rr
    disc = b * b - 4 * dd * dd
    s_in = (b - math.sqrt(disc)) / (2 * dd)
    s_out = (b + math.sqrt(disc)) / (2 * dd)
    return c1 + r1 * s_in * u, c1 + r1 * s_out * u


@dataclass(frozen=True)
class ConcentricNormalization:
    """Disk automorphism carrying the annulus between S^1 and an interior circle to e^{-t} <= |z| <= 1."""

    point: complex  # sent to 0
    rotation: complex  # fixes Q(1) = 1
    modulus: float

    def __call__(self, z):
        return self.rotation * (z - self.point) / (1 - self.point.conjugate() * z)

    def inverse(self, w):
        w = w / self.rotation
        return (w + self.point) / (1 + self.point.conjugate() * w)


def concentric_normalization(inner: Circle) -> ConcentricNormalization:
    """Normalize the annulus between the unit circle and ``inner`` (strictly inside)."""
    c, r = complex(inner.center), inner.radius
    if abs(c) < 1e-300:
        a = 0j
    else:
        a, _ = symmetric_points(0j, 1.0, c, r)
    rot = (1 - a.conjugate()) / (1 - a)
    q = ConcentricNormalization(a, rot, 0.0)
    radius = abs(q(c + r))
    return ConcentricNormalization(a, rot, -math.log(radius))


# ---------------------------------------------------------------------------
# sampling


def random_gaussian_rational(rng: random.Random, bound: Fraction, den: int = 64) -> QQi:
    """Uniform-ish Gaussian rational with |z| < bound."""
    while True:
        z = QQi(Fraction(rng.randint(-den, den), den), Fraction(rng.randint(-den, den), den))
        if z.norm2() < Fraction(1):
            return z * QQi(bound)


def random_unit_rational(rng: random.Random) -> QQi:
    """Rational point on the unit circle from a Pythagorean parametrization."""
    p, q = rng.randint(-12, 12), rng.randint(1, 12)
    n = p * p + q * q
    return QQi(Fraction(p * p - q * q, n), Fraction(2 * p * q, n))


def random_mantle(rng: random.Random) -> MobiusMap:
    """Strict mantle element: z -> s * u * (z - a)/(1 - conj(a) z) + b with s + |b| < 1."""
    a = random_gaussian_rational(rng, Fraction(3, 4))
    u = random_unit_rational(rng)
    s = Fraction(rng.randint(1, 15), 16)
    b = random_gaussian_rational(rng, (1 - s) * Fraction(7, 8))
    aut = MobiusMap.disk_automorphism(a, u)
    return compose(MobiusMap(QQi(s), b, QQi(0), QQi(1)), aut)


def to_complex_coeffs(f: MobiusMap) -> tuple[complex, complex, complex, complex]:
    return tuple(complex(x) for x in (f.a, f.b, f.c, f.d))

