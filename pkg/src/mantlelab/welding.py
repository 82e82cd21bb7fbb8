"""Annuli with parametrized boundaries and their product.

An element is a triple (p, t, q): two analytic diffeomorphisms of the unit
circle (stored as Fourier coefficients of p(e^{i theta}) for modes -M..M)
and a modulus t > 0. It stands for the round annulus e^{-t} <= |z| <= 1
whose outer boundary is parametrized by p^{-1} and inner boundary by
e^{-t} q. The product of (p1, t1, q1) and (p2, t2, q2) reduces the middle
word A(t1) r A(t2), r = q1 o p2, by mapping the region between the unit
circle and the curve e^{-t1} r(e^{-t2} z) conformally onto a round annulus.

The conformal map is Q(z) = (z - z0) exp(h(z)) with h a Laurent polynomial
in (z - z0), found by linear least squares on boundary collocation points:
log|Q| = 0 on the outer curve, log|Q| = -t' on the inner one, and
arg Q(outer(1)) = 0.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Callable

import numpy as np

from .exact import QQi
from .mobius import (
    MobiusMap,
    compose,
    concentric_normalization,
    image_of_unit_circle,
    random_gaussian_rational,
    random_unit_rational,
)


class WeldingError(RuntimeError):
    pass


class NumericError(WeldingError):
    def __init__(self, message: str, **diagnostics):
        super().__init__(message + (f" {diagnostics}" if diagnostics else ""))
        self.diagnostics = diagnostics


class GeometryError(WeldingError):
    pass


@dataclass(frozen=True)
class WeldConfig:
    modes: int = 64  # M: Fourier modes kept for every boundary map
    tol: float = 1e-9  # boundary residual certified by the conformal map solver
    max_iter: int = 50  # Newton iterations when inverting circle maps
    oversample: int = 4  # collocation points per boundary = oversample * M
    margin_safety: float = 0.25  # step-B pieces use at most this fraction of the analyticity margin
    min_separation: float = 1e-3  # reject curves closer than this to each other

    @property
    def points(self) -> int:
        return self.oversample * self.modes


def _grid(n: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(n) / n)


@dataclass(frozen=True)
class CircleMap:
    """Analytic map of the unit circle given by Fourier coefficients, modes -M..M."""

    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or len(c) % 2 != 1:
            raise ValueError("need an odd number of coefficients (modes -M..M)")
        object.__setattr__(self, "coeffs", c)

    @property
    def M(self) -> int:
        return len(self.coeffs) // 2

    @property
    def ks(self) -> np.ndarray:
        return np.arange(-self.M, self.M + 1)

    @classmethod
    def identity(cls, M: int) -> "CircleMap":
        c = np.zeros(2 * M + 1, complex)
        c[M + 1] = 1
        return cls(c)

    @classmethod
    def from_samples(cls, values: np.ndarray, M: int) -> "CircleMap":
        n = len(values)
        if n < 2 * M + 1:
            raise ValueError("not enough samples for the requested modes")
        f = np.fft.fft(values) / n
        ks = np.arange(-M, M + 1)
        return cls(f[ks % n])

    @classmethod
    def from_function(cls, fn: Callable, M: int, oversample: int = 4) -> "CircleMap":
        return cls.from_samples(fn(_grid(oversample * M)), M)

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, complex)
        for k, c in zip(self.ks, self.coeffs):
            if c != 0:
                out += c * z**k
        return out

    def derivative(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, complex)
        for k, c in zip(self.ks, self.coeffs):
            if c != 0 and k != 0:
                out += k * c * z ** (k - 1)
        return out

    def samples(self, n: int) -> np.ndarray:
        return self(_grid(n))

    def scale(self, a: complex) -> "CircleMap":
        return CircleMap(self.coeffs * a)

    def resize(self, M: int) -> "CircleMap":
        c = np.zeros(2 * M + 1, complex)
        m = min(M, self.M)
        c[M - m : M + m + 1] = self.coeffs[self.M - m : self.M + m + 1]
        return CircleMap(c)

    def compose(self, inner: "CircleMap", oversample: int = 4) -> "CircleMap":
        """self o inner, resampled with the modes of self."""
        return CircleMap.from_samples(self(inner.samples(oversample * self.M)), self.M)

    def margin(self, side: str = "inner", floor: float = 1e-12) -> float:
        """Estimated exponential decay rate of the coefficients.

        ``side="inner"`` looks at negative modes (what continuation into the
        disk needs), ``"outer"`` at positive modes, ``"both"`` at the slower.
        Only the leading run above ``floor`` is fitted, so aliasing and
        round-off plateaus do not flatten the estimate.
        """
        mags = np.abs(self.coeffs)
        scale = mags.max()
        sides = {"inner": [mags[: self.M][::-1]], "outer": [mags[self.M + 1 :]]}
        sides["both"] = sides["inner"] + sides["outer"]
        rates = []
        for arr in sides[side]:
            below = np.nonzero(arr < floor * scale)[0]
            stop = below[0] if len(below) else len(arr)
            if stop < 3:
                rates.append(math.inf)
                continue
            ks = np.arange(1, stop + 1)
            slope = np.polyfit(ks, np.log(arr[:stop]), 1)[0]
            rates.append(max(-slope, 0.0))
        return float(min(rates))

    def winding(self, n: int = 1024) -> int:
        w = self.samples(n)
        return int(round(np.sum(np.angle(np.roll(w, -1) / w)) / (2 * np.pi)))

    def check_diffeo(self, n: int = 2048, tol: float = 1e-6) -> None:
        z = _grid(n)
        w = self(z)
        if np.max(np.abs(np.abs(w) - 1)) > tol:
            raise GeometryError("map does not preserve the unit circle")
        if self.winding(n) != 1:
            raise GeometryError("map is not an orientation-preserving diffeomorphism")
        speed = np.real(z * self.derivative(z) / w)
        if speed.min() <= 0:
            raise GeometryError("derivative vanishes or changes sign on the circle")

    def inverse(self, max_iter: int = 50, tol: float = 1e-15, oversample: int = 4) -> "CircleMap":
        """Inverse of a circle diffeomorphism (uses only arg of the values)."""
        n = oversample * self.M
        theta = 2 * np.pi * np.arange(n) / n
        z = np.exp(1j * theta)
        w = self(z)
        phi = np.unwrap(np.angle(w))
        # solve phi(x) = psi (mod 2 pi) for psi on the grid, starting from interpolation
        target = phi[0] + np.mod(theta - phi[0], 2 * np.pi)
        ext_phi = np.concatenate([phi - 2 * np.pi, phi, phi + 2 * np.pi])
        ext_theta = np.concatenate([theta - 2 * np.pi, theta, theta + 2 * np.pi])
        x = np.interp(target, ext_phi, ext_theta)
        for _ in range(max_iter):
            zx = np.exp(1j * x)
            wx = self(zx)
            step = np.angle(wx * np.exp(-1j * theta)) / np.real(zx * self.derivative(zx) / wx)
            x = x - step
            if np.max(np.abs(step)) < tol:
                break
        else:
            raise NumericError("circle map inversion did not converge", residual=float(np.max(np.abs(step))))
        return CircleMap.from_samples(np.exp(1j * x), self.M)

    def to_json(self) -> list:
        return [[float(c.real), float(c.imag)] for c in self.coeffs]

    @classmethod
    def from_json(cls, obj) -> "CircleMap":
        return cls(np.array([complex(a, b) for a, b in obj]))


@dataclass(frozen=True)
class NeretinElement:
    p: CircleMap
    t: float
    q: CircleMap

    def __post_init__(self):
        if not self.t > 0:
            raise GeometryError("modulus must be positive")
        if abs(self.p(np.array([1.0]))[0] - 1) > 1e-6:
            raise GeometryError("normal form needs p(1) = 1")

    @classmethod
    def round(cls, t: float, M: int = 64) -> "NeretinElement":
        return cls(CircleMap.identity(M), t, CircleMap.identity(M))

    @property
    def M(self) -> int:
        return self.p.M

    def distance(self, other: "NeretinElement") -> float:
        """Sup-norm distance of Fourier coefficients (and moduli)."""
        m = min(self.M, other.M)
        return float(
            max(
                np.max(np.abs(self.p.resize(m).coeffs - other.p.resize(m).coeffs)),
                np.max(np.abs(self.q.resize(m).coeffs - other.q.resize(m).coeffs)),
                abs(self.t - other.t),
            )
        )

    def to_json(self) -> dict:
        return {"p": self.p.to_json(), "t": float(self.t), "q": self.q.to_json(), "M": self.M}

    @classmethod
    def from_json(cls, obj) -> "NeretinElement":
        el = cls(CircleMap.from_json(obj["p"]), float(obj["t"]), CircleMap.from_json(obj["q"]))
        if "M" in obj and int(obj["M"]) != el.M:
            raise ValueError("declared M does not match coefficient count")
        return el


@dataclass(frozen=True)
class AnnularTriple:
    """Region between two Jordan curves, each parametrized from the unit circle."""

    outer: CircleMap
    inner: CircleMap


@dataclass(frozen=True)
class AnnulusMap:
    """Q(z) = (z - z0) exp(sum_k h_k (z - z0)^k) onto e^{-t} <= |w| <= 1."""

    z0: complex
    h: np.ndarray
    K: int
    t: float
    residual: float

    def log_q(self, w) -> np.ndarray:
        w = np.asarray(w, dtype=complex) - self.z0
        out = np.log(w)
        for k, c in zip(range(-self.K, self.K + 1), self.h):
            out = out + c * w**k
        return out

    def __call__(self, w) -> np.ndarray:
        return np.exp(self.log_q(w))


def _check_geometry(outer_w: np.ndarray, inner_w: np.ndarray, z0: complex, sep: float) -> None:
    d = np.min(np.abs(outer_w[:, None] - inner_w[None, :]))
    if d < sep:
        raise GeometryError(f"boundary curves are {d:.2e} apart (threshold {sep:.0e})")
    ang = np.unwrap(np.angle(inner_w - z0))
    if not np.all(np.diff(ang) > 0) or abs(ang[-1] - ang[0] + np.angle((inner_w[0] - z0) / (inner_w[-1] - z0)) - 2 * np.pi) > 1e-6:
        raise GeometryError("inner curve is not star-shaped about its centroid")
    # inner curve must lie inside the outer one
    rel = outer_w[None, :] - inner_w[:: max(1, len(inner_w) // 64), None]
    wind = np.sum(np.angle(np.roll(rel, -1, axis=1) / rel), axis=1) / (2 * np.pi)
    if np.any(np.abs(wind - 1) > 1e-6):
        raise GeometryError("inner curve is not enclosed by the outer curve")


def _solve_annulus(ow, iw, outer_one, z0, K, n):
    ks = np.arange(-K, K + 1)

    def basis(w):
        return (w[:, None] - z0) ** ks[None, :]

    bo, bi, one = basis(ow), basis(iw), basis(np.array([outer_one]))
    nk = len(ks)
    rows = np.zeros((2 * n + 1, 2 * nk + 1))
    rhs = np.zeros(2 * n + 1)
    rows[:n, :nk], rows[:n, nk : 2 * nk] = bo.real, -bo.imag
    rhs[:n] = -np.log(np.abs(ow - z0))
    rows[n : 2 * n, :nk], rows[n : 2 * n, nk : 2 * nk] = bi.real, -bi.imag
    rows[n : 2 * n, 2 * nk] = 1.0
    rhs[n : 2 * n] = -np.log(np.abs(iw - z0))
    # arg Q(outer(1)) = 0, weighted to act as a constraint
    rows[2 * n, :nk], rows[2 * n, nk : 2 * nk] = one.imag[0], one.real[0]
    rhs[2 * n] = -np.angle(outer_one - z0)
    rows[2 * n] *= n
    rhs[2 * n] *= n
    scale = np.max(np.abs(rows), axis=0)
    scale[scale == 0] = 1
    sol = np.linalg.lstsq(rows / scale, rhs, rcond=None)[0] / scale
    return AnnulusMap(z0, sol[:nk] + 1j * sol[nk : 2 * nk], K, float(sol[2 * nk]), 0.0)


def _inside(curve: np.ndarray, z: complex) -> bool:
    rel = curve - z
    return abs(np.sum(np.angle(np.roll(rel, -1) / rel)) / (2 * np.pi) - 1) < 1e-6


def annulus_map(triple: AnnularTriple, cfg: WeldConfig = WeldConfig(), recentre: int = 6) -> AnnulusMap:
    """Conformal map of the region between the curves onto a round annulus, Q(outer(1)) = 1.

    The expansion centre z0 starts at the centroid of the inner curve and is
    moved by -h_{-1} (which cancels the dipole term of h) while that lowers
    the certified boundary residual.
    """
    n, K = cfg.points, cfg.modes
    z = _grid(n)
    ow, iw = triple.outer(z), triple.inner(z)
    z0 = complex(np.mean(iw))
    _check_geometry(ow, iw, z0, cfg.min_separation)
    outer_one = complex(triple.outer(np.array([1.0 + 0j]))[0])
    zc = z * np.exp(1j * np.pi / n)
    oc, ic = triple.outer(zc), triple.inner(zc)
    best = None
    for _ in range(recentre):
        Q = _solve_annulus(ow, iw, outer_one, z0, K, n)
        res = max(np.max(np.abs(Q.log_q(oc).real)), np.max(np.abs(Q.log_q(ic).real + Q.t)))
        if best is None or res < best.residual:
            best = replace(Q, residual=float(res))
        if res < cfg.tol * 1e-2:
            break
        nxt = z0 - Q.h[K - 1]
        if not _inside(iw, nxt):
            break
        z0 = nxt
    if not best.residual < cfg.tol:
        raise NumericError("annulus map boundary residual too large", residual=best.residual, modes=K, t=best.t)
    if best.t <= 0:
        raise GeometryError("computed modulus is not positive")
    return best


def from_triple(triple: AnnularTriple, cfg: WeldConfig = WeldConfig()) -> NeretinElement:
    Q = annulus_map(triple, cfg)
    M, os_ = cfg.modes, cfg.oversample
    qo = CircleMap.from_function(lambda z: Q(triple.outer(z)), M, os_)
    p = qo.inverse(cfg.max_iter, oversample=os_)
    q = CircleMap.from_function(lambda z: math.exp(Q.t) * Q(triple.inner(z)), M, os_)
    return NeretinElement(p, Q.t, q)


def to_triple(e: NeretinElement, W: Callable | None = None, cfg: WeldConfig = WeldConfig()) -> AnnularTriple:
    """Round-annulus representative, optionally pushed forward by a conformal map W."""
    outer = e.p.inverse(cfg.max_iter, oversample=cfg.oversample)
    inner = e.q.scale(math.exp(-e.t))
    if W is None:
        return AnnularTriple(outer, inner)
    M = cfg.modes
    return AnnularTriple(
        CircleMap.from_function(lambda z: W(outer(z)), M, cfg.oversample),
        CircleMap.from_function(lambda z: W(inner(z)), M, cfg.oversample),
    )


def _evaluate_inside(r: CircleMap, radius: float, floor: float = 1e-14) -> np.ndarray:
    """Coefficients of z -> r(radius z).

    Negative modes past the first one below the float noise floor are
    dropped first; otherwise round-off in them is amplified by radius^-|k|.
    Raises when the continued series does not decay.
    """
    c = r.coeffs.copy()
    neg = np.abs(c[: r.M][::-1]) < floor * np.abs(c).max()
    if neg.any():
        c[: r.M - int(np.argmax(neg))] = 0
    c = c * radius ** r.ks.astype(float)
    big = np.abs(c).max()
    tail = np.abs(c[: r.M // 4]).max()
    if tail > 1e-8 * big:
        raise NumericError("insufficient analyticity margin for this step", tail=float(tail / big), radius=radius)
    return c


def step_a(T: float, r: CircleMap, s: float, cfg: WeldConfig = WeldConfig()) -> NeretinElement:
    """A(T) r A(s) as p' A(t') q'."""
    g = CircleMap(_evaluate_inside(r, math.exp(-s)) * math.exp(-T))
    return from_triple(AnnularTriple(CircleMap.identity(r.M), g), cfg)


def split_count(r: CircleMap, t: float, cfg: WeldConfig = WeldConfig()) -> int:
    """Number of step-B pieces so that each piece stays inside the analyticity margin."""
    margin = r.margin("inner")
    if math.isinf(margin):
        return 1
    if margin == 0:
        raise NumericError("boundary map has no measurable analyticity margin")
    return max(1, math.ceil(t / (cfg.margin_safety * margin)))


def multiply(a: NeretinElement, b: NeretinElement, cfg: WeldConfig = WeldConfig(), split: int | None = None) -> NeretinElement:
    """Product (a.p A(a.t) a.q)(b.p A(b.t) b.q) in normal form.

    Intermediate maps are carried with twice the requested modes and the
    result is truncated back, which keeps aliasing out of the continuation.
    """
    M, os_ = cfg.modes, cfg.oversample
    work = replace(cfg, modes=2 * M)
    W = work.modes
    r = a.q.resize(W).compose(b.p.resize(W), os_)
    n = split_count(r, b.t, work) if split is None else split
    P, T = CircleMap.identity(W), a.t
    s = b.t / n
    for _ in range(n):
        e = step_a(T, r, s, work)
        P = P.compose(e.p, os_)
        T, r = e.t, e.q
    p = a.p.resize(W).compose(P, os_).resize(M)
    q = r.compose(b.q.resize(W), os_).resize(M)
    return NeretinElement(p, T, q)


# ---------------------------------------------------------------------------
# Mobius elements and test family


def from_mobius(f: MobiusMap, M: int = 64, oversample: int = 4) -> NeretinElement:
    """Closed-form normal form of a mantle element via concentric normalization."""
    C = concentric_normalization(image_of_unit_circle(f))
    a, b, c, d = (complex(x) for x in (f.a, f.b, f.c, f.d))

    def fz(z):
        return (a * z + b) / (c * z + d)

    p = CircleMap.from_function(lambda z: C.inverse(z), M, oversample)
    t = C.modulus
    q = CircleMap.from_function(lambda z: math.exp(t) * C(fz(z)), M, oversample)
    return NeretinElement(p, t, q)


def random_weldable_mantle(rng: random.Random) -> MobiusMap:
    """Strict mantle element whose normal form is resolved to about 1e-12 at 64 modes.

    Same shape as ``random_mantle`` but with |a| <= 1/2 and a wider annulus,
    so the pole of the boundary maps stays at radius >= 2.
    """
    a = random_gaussian_rational(rng, Fraction(1, 2))
    u = random_unit_rational(rng)
    s = Fraction(rng.randint(4, 12), 16)
    b = random_gaussian_rational(rng, (1 - s) / 2)
    return compose(MobiusMap(QQi(s), b, QQi(0), QQi(1)), MobiusMap.disk_automorphism(a, u))


def random_diffeo(rng: np.random.Generator, M: int = 64, rho: float = 0.5, amplitude: float = 0.3, degree: int | None = None) -> CircleMap:
    """z exp(i (psi(theta) - psi(0))) with psi real-analytic, coefficients ~ rho^|k|."""
    degree = M if degree is None else degree
    ks = np.arange(1, degree + 1)
    a = (rng.normal(size=degree) + 1j * rng.normal(size=degree)) * rho**ks
    bound = np.sum(2 * ks * np.abs(a))
    a *= amplitude / bound

    def fn(z):
        theta = np.angle(z)
        psi = 2 * np.real(np.exp(1j * np.outer(theta, ks)) @ a)
        psi0 = 2 * np.real(np.sum(a))
        return z * np.exp(1j * (psi - psi0))

    out = CircleMap.from_function(fn, M)
    out.check_diffeo()
    return out


def random_element(rng: np.random.Generator, M: int = 64, t_range=(0.3, 0.8), **kw) -> NeretinElement:
    return NeretinElement(random_diffeo(rng, M, **kw), float(rng.uniform(*t_range)), random_diffeo(rng, M, **kw))
