"""Exact arithmetic: Gaussian rationals, rational parsing, small linear algebra over Q."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

Number = "int | Fraction | QQi"


def frac(x) -> Fraction:
    """Parse ``x`` (int, Fraction, "p/q" string) into a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted in exact arithmetic; pass a 'p/q' string")
    raise TypeError(f"cannot convert {x!r} to a rational")


def fstr(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class QQi:
    """Gaussian rational re + i*im with Fraction parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", frac(self.re))
        object.__setattr__(self, "im", frac(self.im))

    @classmethod
    def of(cls, x) -> "QQi":
        if isinstance(x, QQi):
            return x
        if isinstance(x, complex):
            raise TypeError("complex floats are not accepted in exact arithmetic")
        return cls(frac(x), Fraction(0))

    # arithmetic
    def __add__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return QQi(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def __sub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return QQi(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return QQi(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        n = o.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return self * o.conj() * QQi(1 / n)

    def __rtruediv__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers are exact")
        if k < 0:
            return QQi(1) / (self ** (-k))
        out, base = QQi(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        o = _coerce(other)
        if o is NotImplemented:
            return False
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def conj(self) -> "QQi":
        return QQi(self.re, -self.im)

    def norm2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if self.im == 0:
            return f"QQi({fstr(self.re)})"
        return f"QQi({fstr(self.re)}, {fstr(self.im)})"

    def to_json(self) -> list[str]:
        return [fstr(self.re), fstr(self.im)]

    @classmethod
    def from_json(cls, v) -> "QQi":
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValueError(f"complex rational must be [re, im], got {v!r}")
            return cls(frac(v[0]), frac(v[1]))
        return cls(frac(v))


I = QQi(0, 1)


def _coerce(x):
    if isinstance(x, QQi):
        return x
    if isinstance(x, (int, Fraction)):
        return QQi(Fraction(x))
    return NotImplemented


def is_zero(x) -> bool:
    return not x


# ---------------------------------------------------------------------------
# linear algebra over an exact field (Fraction or QQi entries)


def _sparse_rref(rows: Sequence[Sequence], ncols: int):
    """Gauss-Jordan elimination on dict rows; returns (pivot rows, pivot columns)."""
    pending = [{c: x for c, x in enumerate(r) if x} for r in rows]
    pivots: dict[int, dict] = {}
    for row in pending:
        for c, prow in pivots.items():
            f = row.get(c)
            if f:
                for k, v in prow.items():
                    nv = row.get(k, 0) - f * v
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        live = [c for c in row if c < ncols]
        if not live:
            continue
        c = min(live)
        inv = 1 / row[c] if not isinstance(row[c], int) else Fraction(1, row[c])
        row = {k: v * inv for k, v in row.items()}
        for prow in pivots.values():
            f = prow.get(c)
            if f:
                for k, v in row.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivots[c] = row
    order = sorted(pivots)
    return [pivots[c] for c in order], order


def rref(rows: Sequence[Sequence], ncols: int | None = None):
    """Reduced row echelon form. Returns (matrix, pivot column list)."""
    if not rows:
        return [], []
    width = len(rows[0])
    ncols = width if ncols is None else ncols
    sparse, pivots = _sparse_rref(rows, ncols)
    zero = Fraction(0)
    return [[r.get(c, zero) for c in range(width)] for r in sparse], pivots


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list]:
    """Basis of the right null space of an exact matrix with ``ncols`` columns."""
    if not rows:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    sparse, pivots = _sparse_rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in (c for c in range(ncols) if c not in pivset):
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, p in zip(sparse, pivots):
            if f in r:
                v[p] = -r[f]
        basis.append(v)
    return basis


def rank(rows: Sequence[Sequence], ncols: int | None = None) -> int:
    return len(rref(rows, ncols)[1])


def det(mat: Sequence[Sequence]):
    """Exact determinant by fraction-preserving elimination."""
    a = [list(map(lambda x: x if isinstance(x, QQi) else Fraction(x), r)) for r in mat]
    n = len(a)
    sign, out = 1, Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        out = out * a[c][c]
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] / a[c][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return out * sign


def ldl(mat: Sequence[Sequence[Fraction]]):
    """Exact LDL^T of a symmetric rational matrix without pivoting.

    Returns (L, D, k) where k is the first index with a nonpositive pivot
    (or None). Factorization stops at k.
    """
    n = len(mat)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = Fraction(mat[j][j]) - sum(L[j][k] ** 2 * D[k] for k in range(j))
        if D[j] <= 0:
            return L, D, j
        for i in range(j + 1, n):
            L[i][j] = (Fraction(mat[i][j]) - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / D[j]
    return L, D, None


def solve_upper_unit_transpose(L, k: int) -> list[Fraction]:
    """Solve L^T x = e_k for unit-lower-triangular L restricted to the leading (k+1) block."""
    x = [Fraction(0)] * (k + 1)
    x[k] = Fraction(1)
    for i in range(k - 1, -1, -1):
        x[i] = -sum(L[j][i] * x[j] for j in range(i + 1, k + 1))
    return x


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> list[list]:
    bt = list(zip(*b))
    return [[sum((x * y for x, y in zip(r, c)), Fraction(0)) for c in bt] for r in a]


def poly_roots_rational(coeffs: Iterable[Fraction]) -> list[Fraction]:
    """Rational roots (with multiplicity) of a polynomial given low-to-high coefficients."""
    import sympy

    x = sympy.Symbol("x")
    p = sum(sympy.Rational(c.numerator, c.denominator) * x**i for i, c in enumerate(map(Fraction, coeffs)))
    roots = sympy.roots(sympy.Poly(p, x), filter="Q")
    out = []
    for r, mult in roots.items():
        out.extend([Fraction(int(r.p), int(r.q))] * mult)
    return sorted(out)
