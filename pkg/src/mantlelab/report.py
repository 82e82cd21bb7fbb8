"""Run configuration and the conformance suite.

Each check returns a residual and a status: "pass", "flag" (a known and
reported discrepancy, such as a sign difference with a published table) or
"fail". Reports are plain JSON with sorted keys and no timestamps, so a
fixed configuration always produces the same bytes.
"""

from __future__ import annotations

import itertools
import math
import platform
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import metadata
from typing import Callable

import numpy as np

from . import circlealg as ca
from . import mobius as mb
from . import qpft, train, verma, welding
from .exact import QQi, fstr

SCHEMA = "1"


@dataclass(frozen=True)
class RunConfig:
    N: int = 6
    M: int = 64
    tol_weld: float = 1e-9
    tol_assoc: float = 1e-6
    tol_split: float = 1e-7
    tol_mobius: float = 1e-8
    seed: int = 0
    exact: bool = True
    points: int = 20
    out: str | None = None

    def __post_init__(self):
        for name in ("tol_weld", "tol_assoc", "tol_split", "tol_mobius"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.N < 2:
            raise ValueError("truncation level must be at least 2")
        if self.M < 8:
            raise ValueError("need at least 8 Fourier modes")

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("out")
        return d


@dataclass(frozen=True)
class CheckResult:
    name: str
    anchor: str
    residual: str | float
    status: str
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "anchor": self.anchor, "residual": self.residual, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class ConformanceReport:
    config: RunConfig
    checks: tuple[CheckResult, ...]

    @property
    def flags(self) -> list[str]:
        return [c.name for c in self.checks if c.status == "flag"]

    @property
    def failures(self) -> list[str]:
        return [c.name for c in self.checks if c.status == "fail"]

    @property
    def exit_code(self) -> int:
        return 1 if self.flags or self.failures else 0

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "command": "conformance",
            "config": self.config.to_json(),
            "environment": environment(),
            "checks": [c.to_json() for c in self.checks],
            "summary": {
                "total": len(self.checks),
                "pass": sum(c.status == "pass" for c in self.checks),
                "flags": self.flags,
                "failures": self.failures,
            },
        }


def environment() -> dict:
    def ver(pkg):
        try:
            return metadata.version(pkg)
        except metadata.PackageNotFoundError:
            return None

    return {
        "python": platform.python_version(),
        "numpy": np.__version__,
        "sympy": ver("sympy"),
        "gmpy2": ver("gmpy2"),
        "package": ver("artifact"),
    }


def _exact(x) -> str:
    if isinstance(x, QQi):
        return fstr(x.re) if x.im == 0 else f"{fstr(x.re)}{'+' if x.im >= 0 else '-'}{fstr(abs(x.im))}i"
    return fstr(Fraction(x))


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# ---------------------------------------------------------------------------
# individual checks


def check_mobius(cfg: RunConfig) -> list[CheckResult]:
    rng = random.Random(cfg.seed)
    bad_assoc = bad_glue = 0
    for _ in range(100):
        f, g, h = (mb.random_mantle(rng) for _ in range(3))
        bad_assoc += mb.compose(mb.compose(f, g), h) != mb.compose(f, mb.compose(g, h))
        bad_glue += mb.normalize_domain(mb.glue(mb.annulus_form(f), mb.annulus_form(g)))[1] != mb.compose(f, g)
    return [
        CheckResult("mobius.associativity", "composition of mantle maps", str(bad_assoc), _status(not bad_assoc), {"triples": 100}),
        CheckResult("mobius.glue", "normalize(glue(K1, K2)) = f1 o f2", str(bad_glue), _status(not bad_glue), {"pairs": 100}),
    ]


def check_circle_algebra(cfg: RunConfig) -> list[CheckResult]:
    out = []
    table = ca.commutation_table(8)
    sincos = [e for e in table if e.kind in ("ss", "cc")]
    out.append(CheckResult("algebra.table.sin_cos", "[s_n, s_m] and [c_n, c_m]", str(sum(not e.matches for e in sincos)), _status(all(e.matches for e in sincos)), {"entries": len(sincos)}))
    for kind, anchor in (("hc", "[h, c_n] sign"), ("sc", "[s_n, c_m] diagonal")):
        mism = [e for e in table if e.kind == kind and not e.matches]
        out.append(
            CheckResult(
                f"algebra.table.{kind}",
                anchor,
                str(len(mism)),
                "flag" if mism else "pass",
                {"mismatches": [{"n": e.n, "m": e.m, "engine": ca.format_coords(e.engine), "printed": ca.format_coords(e.printed)} for e in mism]},
            )
        )
    basis = [ca.VirasoroElement.e(k) for k in range(-8, 9)] + [ca.VirasoroElement.c()]
    bad = sum(bool(ca.jacobi_check(x, y, z)) for x, y, z in itertools.combinations(basis, 3))
    out.append(CheckResult("algebra.virasoro_jacobi", "Jacobi identity with central term", str(bad), _status(not bad), {"triples": math.comb(len(basis), 3)}))
    T = ca.TrigVectorField
    support = sum(bool(ca.gf_cocycle2(T.e(j), T.e(k))) for j in range(-8, 9) for k in range(-8, 9) if j + k)
    out.append(CheckResult("algebra.gf2_support", "c(e_j, e_k) = 0 off the diagonal", str(support), _status(not support)))
    exact_err = max((ca.gf_cocycle2(T.e(j), T.e(-j)) - QQi(0, -(j**3))).norm2() for j in range(1, 9))
    quad_err = max(abs(ca.to_complex(ca.gf_cocycle2(T.e(j), T.e(-j))) - ca.quadrature_cocycle2(T.e(j), T.e(-j), 2048)) for j in range(1, 9))
    out.append(CheckResult("algebra.gf2_value", "c(e_j, e_-j) = -2 pi i j^3", float(quad_err), _status(not exact_err and quad_err < 1e-9), {"nodes": 2048}))
    modes = [T.e(k) for k in range(-4, 5)]
    ident = 0
    for u, v, w in itertools.combinations(modes, 3):
        total = ca.gf_cocycle2(ca.bracket(u, v), w) + ca.gf_cocycle2(ca.bracket(v, w), u) + ca.gf_cocycle2(ca.bracket(w, u), v)
        ident += bool(total)
    out.append(CheckResult("algebra.gf2_cocycle_identity", "2-cocycle identity", str(ident), _status(not ident)))
    small = [T.e(k) for k in range(-3, 4)]
    bad3 = 0
    for x in itertools.combinations(small, 4):
        total = QQi(0)
        for i, j in itertools.combinations(range(4), 2):
            k, l = (m for m in range(4) if m not in (i, j))
            total = total + QQi((-1) ** (i + j)) * ca.gf_cocycle3(ca.bracket(x[i], x[j]), x[k], x[l])
        bad3 += bool(total)
    out.append(CheckResult("algebra.gf3_cocycle_identity", "3-cocycle identity", str(bad3), _status(not bad3)))
    lam, mu = ca.coboundary_decomposition(12)
    out.append(
        CheckResult(
            "algebra.virasoro_vs_gf",
            "Virasoro cocycle = lambda * GF + coboundary",
            "0",
            _status(lam == ca.GF_TO_VIRASORO),
            {"lambda": _exact(lam), "mu": _exact(mu)},
        )
    )
    return out


def check_verma(cfg: RunConfig) -> list[CheckResult]:
    out = []
    bad = 0
    for h in (Fraction(1), Fraction(3, 2), Fraction(7)):
        S = verma.VermaModule.sl2(h, N=8)
        for m in range(9):
            want = math.factorial(m) * math.prod((2 * h + k for k in range(m)), start=Fraction(1))
            bad += S.gram(m) != [[want]]
    out.append(CheckResult("verma.sl2_norms", "||L_-1^m v||^2 = m! (2h)_m", str(bad), _status(not bad), {"m_max": 8}))
    roots = verma.gram_det_roots(Fraction(1, 2))
    out.append(
        CheckResult(
            "verma.kac_level2",
            "level-2 Gram determinant roots at c = 1/2",
            "0",
            _status(set(roots) == {0, Fraction(1, 2), Fraction(1, 16)}),
            {"roots": [fstr(r) for r in roots]},
        )
    )
    defects = verma.action_defects(verma.VermaModule.vir(Fraction(-2, 7), Fraction(5, 3), N=cfg.N))
    out.append(CheckResult("verma.action", "mode action respects the Virasoro bracket", str(len(defects)), _status(not defects)))
    return out


def check_qpft(cfg: RunConfig) -> list[CheckResult]:
    out = []
    rng = random.Random(cfg.seed)
    worst, dims, skipped = 0, [], 0

    def rat():
        return Fraction(rng.randint(-30, 30), rng.randint(1, 6))

    for _ in range(20):
        mu, h1, h2 = rat(), rat(), rat()
        if not (qpft.is_generic_weight(h1, cfg.N) and qpft.is_generic_weight(h2, cfg.N)):
            skipped += 1
            continue
        d = qpft.primary_dimension(mu, h1, h2, cfg.N)
        dims.append(d)
        if d == 1:
            worst = max(worst, sum(qpft.solve_primary(mu, h1, h2, cfg.N).residuals().values()))
    ok = not worst and all(d <= 1 for d in dims)
    out.append(CheckResult("qpft.primary_fields", "solution space dim <= 1, constraints exact", str(worst), _status(ok), {"dimensions": dims, "degenerate_skipped": skipped}))
    for h in (Fraction(1), Fraction(3, 2)):
        alg = qpft.build_V(h, S=2, N=cfg.N, with_stress=False)
        for r in qpft.all_axioms(alg, n_points=cfg.points, seed=cfg.seed):
            out.append(CheckResult(f"qpft.axiom.{r.name}[h={fstr(h)}]", r.name, fstr(r.max_residual), _status(r.ok), {"cells": r.cells_checked, "points": r.points}))
    qs = {fstr(h): qpft.build_V(h, S=2, N=2, with_stress=False).q_R for h in (Fraction(1), Fraction(3, 2), Fraction(5, 4))}
    products_ok = all(q * (2 * Fraction(h) - 1) == 1 for h, q in qs.items())
    try:
        qpft.build_V(Fraction(1, 2))
        rejected = False
    except qpft.ParameterError:
        rejected = True
    out.append(CheckResult("qpft.quantization", "q_R (2h - 1) = 1, h = 1/2 rejected", "0", _status(products_ok and rejected), {"q_R": {h: fstr(q) for h, q in qs.items()}}))
    rep = qpft.stress_tensor(1, cfg.N)
    out.append(CheckResult("qpft.stress_tensor", "spin-2 field modes on V_1 (reported)", "0", _status(rep.sl2_modes_match), rep.to_json()))
    return out


def check_welding(cfg: RunConfig) -> list[CheckResult]:
    wc = welding.WeldConfig(modes=cfg.M, tol=cfg.tol_weld)
    out = []
    aa = welding.multiply(welding.NeretinElement.round(0.3, cfg.M), welding.NeretinElement.round(0.5, cfg.M), wc).distance(welding.NeretinElement.round(0.8, cfg.M))
    out.append(CheckResult("weld.round_annuli", "A(s) A(t) = A(s + t)", float(aa), _status(aa < 1e-10)))
    rng = random.Random(cfg.seed)
    err = 0.0
    for _ in range(3):
        f, g = welding.random_weldable_mantle(rng), welding.random_weldable_mantle(rng)
        prod = welding.multiply(welding.from_mobius(f, cfg.M), welding.from_mobius(g, cfg.M), wc)
        err = max(err, prod.distance(welding.from_mobius(mb.compose(f, g), cfg.M)))
    out.append(CheckResult("weld.mobius", "welding product = Mobius composition", float(err), _status(err < cfg.tol_mobius), {"pairs": 3, "modes": cfg.M}))
    nrng = np.random.default_rng(cfg.seed)
    x, y, z = (welding.random_element(nrng, cfg.M) for _ in range(3))
    assoc = welding.multiply(welding.multiply(x, y, wc), z, wc).distance(welding.multiply(x, welding.multiply(y, z, wc), wc))
    out.append(CheckResult("weld.associativity", "(xy)z = x(yz)", float(assoc), _status(assoc < cfg.tol_assoc)))
    n = welding.split_count(x.q.compose(y.p), y.t, wc)
    split = welding.multiply(x, y, wc, split=n).distance(welding.multiply(x, y, wc, split=2 * n))
    out.append(CheckResult("weld.split", "product independent of step-B subdivision", float(split), _status(split < cfg.tol_split), {"pieces": [n, 2 * n]}))
    return out


def _borel(lam, c) -> mb.MobiusMap:
    return mb.MobiusMap(QQi.of(lam), QQi(0), QQi.of(-c), QQi(1))


def check_train(cfg: RunConfig) -> list[CheckResult]:
    out = []
    rng = random.Random(cfg.seed)
    bad = 0
    for _ in range(200):
        w = train.random_word(rng, layers=rng.randint(1, 7))
        m = train.parse_word(w)
        bad += (m.genus, m.components) != train.cycle_rank_genus(w)
    out.append(CheckResult("train.genus", "genus bookkeeping = dual-graph cycle rank", str(bad), _status(not bad), {"words": 200}))
    pairs = [
        (_borel(Fraction(1, 2), Fraction(1, 4)), _borel(Fraction(2, 3), Fraction(-1, 5))),
        (_borel(QQi(Fraction(1, 3), Fraction(1, 5)), QQi(Fraction(-1, 5), Fraction(1, 7))), _borel(Fraction(3, 4), Fraction(1, 8))),
    ]
    nonzero = 0
    for f, g in pairs:
        F = train.FunctorData(N=min(cfg.N, 4), annuli={"f": train.AnnulusParams.from_mobius(f), "g": train.AnnulusParams.from_mobius(g)}, exact=True)
        nonzero += not train.defect(F, train.annulus("f"), train.annulus("g")).exact_zero
    out.append(CheckResult("train.projective_defect", "Mobius annuli fixing 0: defect = 0 up to scalar", str(nonzero), _status(not nonzero), {"pairs": len(pairs)}))
    tails = []
    for N in (4, 6, 8):
        p = train.defect(train.FunctorData(N=N), train.trinion(), train.antitrinion())
        tails.append(p.at(N // 2))
    mono = tails[0] > tails[1] > tails[2]
    out.append(CheckResult("train.tail_trend", "mid-level defect decreases with truncation", float(tails[-1]), _status(mono), {"N": [4, 6, 8], "tails": tails}))
    f = mb.MobiusMap(QQi(Fraction(1, 2)), QQi(Fraction(1, 4)), QQi(0), QQi(1))
    F = train.FunctorData(N=2, annuli={"a": train.AnnulusParams.from_mobius(f), "b": train.AnnulusParams.from_mobius(pairs[0][0])}, exact=True)
    u = train.defect(F, train.union(train.annulus("a"), train.identity()), train.union(train.identity(), train.annulus("b")))
    out.append(CheckResult("train.union_defect", "disjoint union pair: defect exactly 0", "0" if u.exact_zero else "nonzero", _status(bool(u.exact_zero))))
    return out


SUITE: tuple[tuple[str, Callable[[RunConfig], list[CheckResult]]], ...] = (
    ("mobius", check_mobius),
    ("algebra", check_circle_algebra),
    ("verma", check_verma),
    ("qpft", check_qpft),
    ("weld", check_welding),
    ("train", check_train),
)


def conformance(cfg: RunConfig, only: set[str] | None = None) -> ConformanceReport:
    checks: list[CheckResult] = []
    for group, fn in SUITE:
        if only is None or group in only:
            checks.extend(fn(cfg))
    names = [c.name for c in checks]
    if len(names) != len(set(names)):
        raise RuntimeError("duplicate check names in the conformance suite")
    return ConformanceReport(cfg, tuple(checks))
