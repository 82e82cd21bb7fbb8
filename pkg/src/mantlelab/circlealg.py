"""Vector fields on the circle, the Virasoro extension and the Gelfand-Fuchs cocycles.

A field is stored by its Fourier modes: ``{k: a_k}`` stands for
``sum_k a_k e^{ikt} d/dt`` with exact Gaussian-rational ``a_k``. The
bracket is ``[v d/dt, u d/dt] = (v u' - v' u) d/dt``; on modes this is
``[E_j, E_k] = i (k - j) E_{j+k}`` with ``E_k = e^{ikt} d/dt``, so the
complex basis ``e_k = i E_k`` satisfies ``[e_j, e_k] = (j - k) e_{j+k}``.

The Gelfand-Fuchs cocycles are integrals over ``[0, 2pi]`` of trigonometric
polynomials; they are returned as the exact coefficient of ``2*pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import numpy as np

from .exact import I, QQi, frac, fstr, rref

# omega_vir(x, y) = GF_TO_VIRASORO * gf_cocycle2(x, y) + COBOUNDARY_E0 * a_0([x, y])
# where a_0 is the E_0 mode; the second term is the coboundary of the
# functional E_0 -> COBOUNDARY_E0, i.e. e_0 -> -1/24.
GF_TO_VIRASORO = QQi(0, Fraction(1, 12))
COBOUNDARY_E0 = QQi(0, Fraction(1, 24))


def _clean(modes: Mapping[int, QQi]) -> dict[int, QQi]:
    return {int(k): QQi.of(v) for k, v in sorted(modes.items()) if v}


@dataclass(frozen=True)
class TrigVectorField:
    modes: Mapping[int, QQi] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "modes", _clean(self.modes))

    # constructors -----------------------------------------------------
    @classmethod
    def E(cls, k: int, coeff=QQi(1)) -> "TrigVectorField":
        return cls({k: QQi.of(coeff)})

    @classmethod
    def e(cls, k: int) -> "TrigVectorField":
        """e_k = i e^{ikt} d/dt."""
        return cls({k: I})

    @classmethod
    def h(cls) -> "TrigVectorField":
        return cls({0: QQi(1)})

    @classmethod
    def s(cls, n: int) -> "TrigVectorField":
        """sin(nt) d/dt."""
        if n == 0:
            return cls()
        return cls({n: QQi(0, Fraction(-1, 2)), -n: QQi(0, Fraction(1, 2))})

    @classmethod
    def c(cls, n: int) -> "TrigVectorField":
        """cos(nt) d/dt; c_0 = h."""
        if n == 0:
            return cls.h()
        return cls({n: QQi(Fraction(1, 2)), -n: QQi(Fraction(1, 2))})

    # vector space -------------------------------------------------------
    def __add__(self, other: "TrigVectorField") -> "TrigVectorField":
        out = dict(self.modes)
        for k, v in other.modes.items():
            out[k] = out.get(k, QQi(0)) + v
        return TrigVectorField(out)

    def __neg__(self):
        return TrigVectorField({k: -v for k, v in self.modes.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "TrigVectorField":
        a = QQi.of(a)
        return TrigVectorField({k: a * v for k, v in self.modes.items()})

    def __rmul__(self, a):
        return self.scale(a)

    def __bool__(self):
        return bool(self.modes)

    @property
    def degree(self) -> int:
        return max((abs(k) for k in self.modes), default=0)

    def coeff(self, k: int) -> QQi:
        return self.modes.get(k, QQi(0))

    def e_coords(self) -> dict[int, QQi]:
        """Coordinates in the basis e_k = i E_k."""
        return {k: v / I for k, v in self.modes.items()}

    def is_real(self) -> bool:
        return all(self.coeff(-k) == v.conj() for k, v in self.modes.items())

    def real_coords(self) -> dict[str, Fraction]:
        """Coordinates on h, s_n, c_n of a real field."""
        if not self.is_real():
            raise ValueError("field is not real")
        out = {}
        a0 = self.coeff(0)
        if a0:
            out["h"] = a0.re
        for n in range(1, self.degree + 1):
            cn = self.coeff(n) + self.coeff(-n)
            sn = I * (self.coeff(n) - self.coeff(-n))
            if cn:
                out[f"c{n}"] = cn.re
            if sn:
                out[f"s{n}"] = sn.re
        return out

    # evaluation -----------------------------------------------------------
    def derivative_samples(self, order: int, t: np.ndarray) -> np.ndarray:
        """Samples of the order-th derivative of the coefficient function."""
        out = np.zeros_like(t, dtype=complex)
        for k, v in self.modes.items():
            out += complex(v) * (1j * k) ** order * np.exp(1j * k * t)
        return out

    def to_json(self) -> dict:
        return {"modes": {str(k): v.to_json() for k, v in self.modes.items()}}

    @classmethod
    def from_json(cls, obj) -> "TrigVectorField":
        return cls({int(k): QQi.from_json(v) for k, v in obj["modes"].items()})


def bracket(v: TrigVectorField, u: TrigVectorField) -> TrigVectorField:
    """[v d/dt, u d/dt] = (v u' - v' u) d/dt."""
    out: dict[int, QQi] = {}
    for j, a in v.modes.items():
        for k, b in u.modes.items():
            if j == k:
                continue
            out[j + k] = out.get(j + k, QQi(0)) + a * b * QQi(0, k - j)
    return TrigVectorField(out)


@dataclass(frozen=True)
class VirasoroElement:
    field: TrigVectorField = field(default_factory=TrigVectorField)
    central: QQi = QQi(0)

    def __post_init__(self):
        object.__setattr__(self, "central", QQi.of(self.central))

    @classmethod
    def e(cls, k: int) -> "VirasoroElement":
        return cls(TrigVectorField.e(k))

    @classmethod
    def c(cls) -> "VirasoroElement":
        return cls(TrigVectorField(), QQi(1))

    def __add__(self, other: "VirasoroElement") -> "VirasoroElement":
        return VirasoroElement(self.field + other.field, self.central + other.central)

    def __neg__(self):
        return VirasoroElement(-self.field, -self.central)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a) -> "VirasoroElement":
        return VirasoroElement(self.field.scale(a), QQi.of(a) * self.central)

    def __bool__(self):
        return bool(self.field) or bool(self.central)

    def to_json(self) -> dict:
        c = self.central
        central = fstr(c.re) if c.im == 0 else c.to_json()
        return {**self.field.to_json(), "central": central}

    @classmethod
    def from_json(cls, obj) -> "VirasoroElement":
        central = obj.get("central", "0")
        return cls(TrigVectorField.from_json(obj), QQi.from_json(central))


def virasoro_cocycle(x: TrigVectorField, y: TrigVectorField) -> QQi:
    """omega(e_j, e_k) = delta_{j+k,0} (j^3 - j)/12."""
    xe, ye = x.e_coords(), y.e_coords()
    total = QQi(0)
    for j, a in xe.items():
        b = ye.get(-j)
        if b:
            total = total + a * b * QQi(Fraction(j**3 - j, 12))
    return total


def virasoro_bracket(x: VirasoroElement, y: VirasoroElement) -> VirasoroElement:
    return VirasoroElement(bracket(x.field, y.field), virasoro_cocycle(x.field, y.field))


def jacobi_check(x: VirasoroElement, y: VirasoroElement, z: VirasoroElement) -> VirasoroElement:
    """[x,[y,z]] + [y,[z,x]] + [z,[x,y]]; zero in a Lie algebra."""
    vb = virasoro_bracket
    return vb(x, vb(y, z)) + vb(y, vb(z, x)) + vb(z, vb(x, y))


# ---------------------------------------------------------------------------
# Gelfand-Fuchs cocycles


def gf_cocycle2(u: TrigVectorField, v: TrigVectorField) -> QQi:
    """c(u, v) = int_0^{2pi} v'(t) u''(t) dt, returned as the exact coefficient of 2*pi."""
    total = QQi(0)
    for j, a in u.modes.items():
        b = v.modes.get(-j)
        if b:
            # v' = (-ij) b e^{-ijt},  u'' = -j^2 a e^{ijt}
            total = total + a * b * QQi(0, j**3)
    return total


def gf_cocycle3(u: TrigVectorField, v: TrigVectorField, w: TrigVectorField) -> QQi:
    """int det[[u',v',w'],[u'',v'',w''],[u''',v''',w''']] dt as the exact coefficient of 2*pi."""
    total = QQi(0)
    for j, a in u.modes.items():
        for k, b in v.modes.items():
            l = -j - k
            c = w.modes.get(l)
            if not c:
                continue
            # i^6 * jkl * Vandermonde(j, k, l)
            vdm = -(j * k * l) * (k - j) * (l - j) * (l - k)
            if vdm:
                total = total + a * b * c * QQi(vdm)
    return total


def to_complex(coeff_of_2pi: QQi) -> complex:
    return 2 * math.pi * complex(coeff_of_2pi)


def quadrature_cocycle2(u: TrigVectorField, v: TrigVectorField, nodes: int = 2048) -> complex:
    """Trapezoidal quadrature of int v' du' (independent of the mode formula)."""
    t = 2 * np.pi * np.arange(nodes) / nodes
    integrand = v.derivative_samples(1, t) * u.derivative_samples(2, t)
    return complex(integrand.mean() * 2 * np.pi)


def quadrature_cocycle3(u, v, w, nodes: int = 2048) -> complex:
    t = 2 * np.pi * np.arange(nodes) / nodes
    rows = [[f.derivative_samples(order, t) for f in (u, v, w)] for order in (1, 2, 3)]
    b = np.array(rows).transpose(2, 0, 1)
    return complex(np.linalg.det(b).mean() * 2 * np.pi)


def coboundary_decomposition(jmax: int = 8) -> tuple[QQi, QQi]:
    """Solve (j^3 - j)/12 = lam * gf(e_j, e_{-j}) + mu * j for all 1 <= j <= jmax.

    Returns (lam, mu); the mu*j part is the coboundary of a functional on e_0.
    Raises if the overdetermined system is inconsistent.
    """
    rows = []
    for j in range(1, jmax + 1):
        g = gf_cocycle2(TrigVectorField.e(j), TrigVectorField.e(-j))
        rows.append([g, QQi(j), QQi(Fraction(j**3 - j, 12))])
    m, piv = rref(rows, 3)
    if 2 in piv:
        raise ArithmeticError("Virasoro normalization is not a multiple of Gelfand-Fuchs plus a coboundary")
    return m[0][2], m[1][2]


def sl2_embedding(n: int) -> tuple[VirasoroElement, VirasoroElement, VirasoroElement]:
    """(h, s_n, c_n) lifted to vir so that they close: [s,c] = -n h, [h,s] = n c, [h,c] = -n s."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    s = VirasoroElement(TrigVectorField.s(n))
    c = VirasoroElement(TrigVectorField.c(n))
    sc = virasoro_bracket(s, c)
    h = VirasoroElement(TrigVectorField.h(), sc.central / QQi(-n))
    return h, s, c


def _coords(x: VirasoroElement, basis) -> list[QQi]:
    """Coordinates of x in a basis of VirasoroElements (exact linear solve)."""
    keys = sorted({k for b in basis for k in b.field.modes} | set(x.field.modes))
    rows = []
    for k in keys:
        rows.append([b.field.coeff(k) for b in basis] + [x.field.coeff(k)])
    rows.append([b.central for b in basis] + [x.central])
    m, piv = rref(rows, len(basis) + 1)
    if len(basis) in piv:
        raise ValueError("element is not in the span")
    out = [QQi(0)] * len(basis)
    for r, p in enumerate(piv):
        out[p] = m[r][len(basis)]
    return out


def killing_form(basis) -> list[list[QQi]]:
    """Killing form tr(ad a ad b) of a Lie algebra spanned (and closed) by ``basis``."""
    ad = []
    for a in basis:
        cols = [_coords(virasoro_bracket(a, b), basis) for b in basis]
        ad.append([[cols[j][i] for j in range(len(basis))] for i in range(len(basis))])
    n = len(basis)
    return [
        [sum((ad[a][i][k] * ad[b][k][i] for i in range(n) for k in range(n)), QQi(0)) for b in range(n)]
        for a in range(n)
    ]


def signature(form) -> tuple[int, int]:
    """(positive, negative) eigenvalue counts of a real symmetric form."""
    m = np.array([[float(x.re) for x in row] for row in form])
    ev = np.linalg.eigvalsh(m)
    tol = 1e-9 * max(1.0, np.abs(ev).max())
    return int((ev > tol).sum()), int((ev < -tol).sum())


# ---------------------------------------------------------------------------
# the printed sin/cos table


def _sgn(x: int) -> int:
    return (x > 0) - (x < 0)


def _basis(name: str, n: int) -> TrigVectorField:
    return {"s": TrigVectorField.s, "c": TrigVectorField.c}[name](n)


def printed_table(kind: str, n: int, m: int = 0) -> TrigVectorField:
    """Right-hand sides of the published sin/cos commutation table."""
    half = QQi(Fraction(1, 2))
    s, c, h = TrigVectorField.s, TrigVectorField.c, TrigVectorField.h
    if kind == "ss":
        return (s(m + n).scale(m - n) + s(abs(n - m)).scale(_sgn(n - m) * (n + m))).scale(half)
    if kind == "cc":
        return (s(n + m).scale(n - m) + s(abs(n - m)).scale(_sgn(n - m) * (n + m))).scale(half)
    if kind == "sc":
        return (c(n + m).scale(m - n) - c(abs(n - m)).scale(n + m)).scale(half) - h().scale(n * (n == m))
    if kind == "hs":
        return c(n).scale(n)
    if kind == "hc":
        return s(n).scale(n)
    raise ValueError(kind)


def engine_table(kind: str, n: int, m: int = 0) -> TrigVectorField:
    h = TrigVectorField.h()
    if kind == "hs":
        return bracket(h, TrigVectorField.s(n))
    if kind == "hc":
        return bracket(h, TrigVectorField.c(n))
    a, b = kind
    return bracket(_basis(a, n), _basis(b, m))


@dataclass(frozen=True)
class TableEntry:
    kind: str
    n: int
    m: int
    matches: bool
    engine: dict
    printed: dict


def commutation_table(nmax: int = 8) -> list[TableEntry]:
    """Compare the bracket engine with the printed table entry by entry."""
    out = []
    for kind in ("ss", "cc", "sc"):
        for n in range(1, nmax + 1):
            for m in range(1, nmax + 1):
                if kind != "sc" and n == m:
                    continue
                e, p = engine_table(kind, n, m), printed_table(kind, n, m)
                out.append(TableEntry(kind, n, m, e == p, e.real_coords(), p.real_coords()))
    for kind in ("hs", "hc"):
        for n in range(1, nmax + 1):
            e, p = engine_table(kind, n), printed_table(kind, n)
            out.append(TableEntry(kind, n, 0, e == p, e.real_coords(), p.real_coords()))
    return out


def format_coords(coords: dict) -> str:
    return " + ".join(f"{fstr(v)}*{k}" for k, v in coords.items()) or "0"


def parse_field(name: str) -> TrigVectorField:
    """Parse names like 'e3', 'e-2', 's4', 'c1', 'h'."""
    name = name.strip()
    if name == "h":
        return TrigVectorField.h()
    kind, idx = name[0], int(name[1:])
    if kind == "e":
        return TrigVectorField.e(idx)
    if kind in "sc":
        return _basis(kind, idx)
    raise ValueError(f"unknown field {name!r}")


__all__ = [
    "TrigVectorField",
    "VirasoroElement",
    "bracket",
    "virasoro_bracket",
    "virasoro_cocycle",
    "jacobi_check",
    "gf_cocycle2",
    "gf_cocycle3",
    "sl2_embedding",
    "killing_form",
    "signature",
    "commutation_table",
    "coboundary_decomposition",
    "frac",
]
