"""Truncated Verma modules over sl2 and Virasoro, with Shapovalov forms.

Basis vectors are partitions ``lam = (l1 >= l2 >= ...)`` standing for
``L_{-l1} L_{-l2} ... v``. The sl2 module is the special case where only
parts equal to 1 occur and only modes -1, 0, 1 act. Modes obey
``[L_n, L_m] = (n - m) L_{n+m} + delta_{n+m,0} (n^3 - n)/12 c``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Mapping

from .exact import frac, fstr, ldl, poly_roots_rational, solve_upper_unit_transpose

Partition = tuple[int, ...]


def partitions(n: int, largest: int | None = None) -> list[Partition]:
    """Partitions of n with parts <= largest, decreasing parts."""
    largest = n if largest is None else largest
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, largest), 0, -1):
        out.extend((first,) + rest for rest in partitions(n - first, first))
    return out


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class VermaModule:
    algebra: str  # "sl2" or "vir"
    h: Fraction
    c: Fraction = Fraction(0)
    N: int = 6
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.algebra not in ("sl2", "vir"):
            raise ValueError(f"algebra must be 'sl2' or 'vir', got {self.algebra!r}")
        object.__setattr__(self, "h", frac(self.h))
        object.__setattr__(self, "c", frac(self.c) if self.algebra == "vir" else Fraction(0))
        if self.N < 0:
            raise ValueError("truncation level must be nonnegative")

    @classmethod
    def sl2(cls, h, N: int = 8) -> "VermaModule":
        return cls("sl2", h, 0, N)

    @classmethod
    def vir(cls, h, c, N: int = 6) -> "VermaModule":
        return cls("vir", h, c, N)

    # basis ------------------------------------------------------------------
    def level_basis(self, d: int) -> list[Partition]:
        if self.algebra == "sl2":
            return [(1,) * d]
        return sorted(partitions(d))

    @cached_property
    def basis(self) -> list[Partition]:
        return [lam for d in range(self.N + 1) for lam in self.level_basis(d)]

    def index(self, lam: Partition) -> int:
        return self.basis.index(lam)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def truncate(self, n: int) -> "VermaModule":
        if n > self.N:
            raise TruncationError(f"cannot raise truncation level from {self.N} to {n}")
        if n == self.N:
            return self
        return VermaModule(self.algebra, self.h, self.c, n)

    def vacuum(self) -> "GradedVector":
        return GradedVector(self, {(): Fraction(1)})

    def vector(self, lam: Partition, coeff=1) -> "GradedVector":
        lam = tuple(lam)
        if list(lam) != sorted(lam, reverse=True) or any(p < 1 for p in lam):
            raise ValueError(f"{lam} is not a partition with decreasing parts")
        if self.algebra == "sl2" and any(p != 1 for p in lam):
            raise ValueError("sl2 basis vectors only use L_{-1}")
        if sum(lam) > self.N:
            raise TruncationError(f"level {sum(lam)} exceeds truncation {self.N}")
        return GradedVector(self, {lam: frac(coeff)})

    # action -----------------------------------------------------------------
    def _check_mode(self, n: int):
        if self.algebra == "sl2" and abs(n) > 1:
            raise ValueError(f"sl2 has modes -1, 0, 1 only; got {n}")

    def _act_basis(self, n: int, lam: Partition) -> dict[Partition, Fraction]:
        key = (n, lam)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if n == 0:
            out = {lam: self.h + sum(lam)}
        elif not lam:
            out = {} if n > 0 else {(-n,): Fraction(1)}
        elif n < 0 and -n >= lam[0]:
            out = {(-n,) + lam: Fraction(1)}
        else:
            # L_n L_{-m} rest = L_{-m} L_n rest + [L_n, L_{-m}] rest
            m, rest = lam[0], lam[1:]
            out: dict[Partition, Fraction] = {}
            for mu, a in self._act_basis(n, rest).items():
                for nu, b in self._act_basis(-m, mu).items():
                    out[nu] = out.get(nu, 0) + a * b
            if n + m:
                for mu, a in self._act_basis(n - m, rest).items():
                    out[mu] = out.get(mu, 0) + (n + m) * a
            if n == m:
                central = Fraction(n**3 - n, 12) * self.c
                if central:
                    out[rest] = out.get(rest, 0) + central
            out = {k: v for k, v in out.items() if v}
        self._cache[key] = out
        return out

    def act(self, n: int, x: "GradedVector") -> "GradedVector":
        self._check_mode(n)
        out: dict[Partition, Fraction] = {}
        truncated = x.truncated
        for lam, a in x.coeffs.items():
            if sum(lam) - n > self.N:
                truncated = True
                continue
            for mu, b in self._act_basis(n, lam).items():
                out[mu] = out.get(mu, 0) + a * b
        return GradedVector(self, out, truncated)

    def act_word(self, modes, x: "GradedVector") -> "GradedVector":
        """Apply modes right-to-left, i.e. ``modes = (n1, n2)`` gives L_{n1} L_{n2} x."""
        for n in reversed(tuple(modes)):
            x = self.act(n, x)
        return x

    def mode_matrix(self, n: int) -> list[list[Fraction]]:
        """Matrix of L_n on the truncated basis (columns = inputs); overflow dropped."""
        idx = {lam: i for i, lam in enumerate(self.basis)}
        cols = []
        for lam in self.basis:
            y = self.act(n, self.vector(lam))
            col = [Fraction(0)] * self.dim
            for mu, a in y.coeffs.items():
                col[idx[mu]] = a
            cols.append(col)
        return [[cols[j][i] for j in range(self.dim)] for i in range(self.dim)]

    # forms ----------------------------------------------------------------------
    def pairing(self, lam: Partition, mu: Partition) -> Fraction:
        """<L_{-lam} v, L_{-mu} v> with L_k^dagger = L_{-k} and <v, v> = 1."""
        if sum(lam) != sum(mu):
            return Fraction(0)
        coeffs = {mu: Fraction(1)}
        for part in lam:
            nxt: dict[Partition, Fraction] = {}
            for nu, a in coeffs.items():
                for rho, b in self._act_basis(part, nu).items():
                    nxt[rho] = nxt.get(rho, 0) + a * b
            coeffs = nxt
        return coeffs.get((), Fraction(0))

    def gram(self, d: int) -> list[list[Fraction]]:
        if d > self.N:
            raise TruncationError(f"level {d} exceeds truncation {self.N}")
        b = self.level_basis(d)
        return [[self.pairing(x, y) for y in b] for x in b]

    def to_json(self) -> dict:
        return {"algebra": self.algebra, "h": fstr(self.h), "c": fstr(self.c), "N": self.N}

    @classmethod
    def from_json(cls, obj) -> "VermaModule":
        return cls(obj["algebra"], frac(obj["h"]), frac(obj.get("c", "0")), int(obj["N"]))


shapovalov_gram = VermaModule.gram


@dataclass(frozen=True)
class GradedVector:
    module: VermaModule
    coeffs: Mapping[Partition, Fraction]
    truncated: bool = False

    def __post_init__(self):
        clean = {tuple(k): frac(v) for k, v in self.coeffs.items() if v}
        object.__setattr__(self, "coeffs", dict(sorted(clean.items(), key=lambda kv: (sum(kv[0]), kv[0]))))

    def __add__(self, other: "GradedVector") -> "GradedVector":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return GradedVector(self.module, out, self.truncated or other.truncated)

    def scale(self, a) -> "GradedVector":
        a = frac(a)
        return GradedVector(self.module, {k: a * v for k, v in self.coeffs.items()}, self.truncated)

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        return isinstance(other, GradedVector) and self.coeffs == other.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def levels(self) -> set[int]:
        return {sum(k) for k in self.coeffs}

    def to_json(self) -> dict:
        return {
            "coeffs": {",".join(map(str, k)): fstr(v) for k, v in self.coeffs.items()},
            "truncated": self.truncated,
        }


@dataclass(frozen=True)
class UnitarityResult:
    unitarizable: bool
    level: int | None = None
    witness: GradedVector | None = None
    norm: Fraction | None = None

    def __bool__(self):
        return self.unitarizable


def is_unitarizable(module: VermaModule, up_to_level: int | None = None) -> UnitarityResult:
    """Positive definiteness of every Gram block up to ``up_to_level``.

    On failure the witness is a level vector x with <x, x> <= 0.
    """
    top = module.N if up_to_level is None else up_to_level
    for d in range(top + 1):
        g = module.gram(d)
        L, D, k = ldl(g)
        if k is not None:
            x = solve_upper_unit_transpose(L, k)
            b = module.level_basis(d)
            w = GradedVector(module, {b[i]: x[i] for i in range(k + 1)})
            return UnitarityResult(False, d, w, D[k])
    return UnitarityResult(True)


def action_defects(module: VermaModule, jmax: int = 4) -> list[tuple[int, int, Partition]]:
    """(j, k, lam) where [L_j, L_k] acts differently from its bracket on a basis vector."""
    bad = []
    lim = 1 if module.algebra == "sl2" else jmax
    for j in range(-lim, lim + 1):
        for k in range(-lim, lim + 1):
            top = module.N - abs(j) - abs(k)
            for lam in module.basis:
                if sum(lam) > top:
                    continue
                x = module.vector(lam)
                lhs = module.act(j, module.act(k, x)) - module.act(k, module.act(j, x))
                rhs = module.act(j + k, x).scale(j - k) if j != k else x.scale(0)
                if j + k == 0:
                    rhs = rhs + x.scale(Fraction(j**3 - j, 12) * module.c)
                if lhs != rhs:
                    bad.append((j, k, lam))
    return bad


def gram_det_polynomial(c, level: int, algebra: str = "vir") -> list[Fraction]:
    """det Gram(level) as a polynomial in h, low-to-high coefficients, by exact interpolation."""
    c = frac(c)
    probe = VermaModule(algebra, 0, c, level)
    deg = sum(len(lam) for lam in probe.level_basis(level))
    xs = [Fraction(k) for k in range(deg + 1)]
    from .exact import det

    ys = [frac(det(VermaModule(algebra, x, c, level).gram(level))) for x in xs]
    # Newton divided differences, then expand
    coef = list(ys)
    for j in range(1, len(xs)):
        for i in range(len(xs) - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - j])
    poly = [Fraction(0)] * (deg + 1)
    basis = [Fraction(1)]
    for i, a in enumerate(coef):
        for k, b in enumerate(basis):
            poly[k] += a * b
        nxt = [Fraction(0)] * (len(basis) + 1)
        for k, b in enumerate(basis):
            nxt[k + 1] += b
            nxt[k] -= xs[i] * b
        basis = nxt
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def gram_det_roots(c, level: int = 2) -> list[Fraction]:
    """Rational h-roots (with multiplicity) of the level Gram determinant at central charge c."""
    return poly_roots_rational(gram_det_polynomial(c, level))
