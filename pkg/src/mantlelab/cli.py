"""Command-line entry point: ``mantlelab <command> ...``.

Every command prints one JSON document ({"schema": "1", "command": ...,
"result": ...}) to stdout or to ``--out``. Exit status is 0 when all
checks pass, 1 when something is flagged or fails, and 2 on input or
numerical errors (reported as JSON on stderr).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import circlealg as ca
from . import mobius as mb
from . import qpft, train, verma, welding
from .exact import QQi, fstr
from .report import SCHEMA, RunConfig, conformance


class InputError(Exception):
    pass


def _load(path: str):
    text = sys.stdin.read() if path == "-" else _read(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _payload(obj):
    """Accept either a bare object or a previous command's output envelope."""
    if isinstance(obj, dict) and "schema" in obj and "result" in obj:
        return obj["result"]
    return obj


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _frac(s: str) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {s!r}") from None


def _mobius(path: str) -> mb.MobiusMap:
    obj = _payload(_load(path))
    try:
        return mb.MobiusMap.from_json(obj)
    except (mb.MalformedInputError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _element(path: str) -> welding.NeretinElement:
    try:
        return welding.NeretinElement.from_json(_payload(_load(path)))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _word(path: str) -> train.TrainMorphism:
    try:
        return train.parse_word(_load(path))
    except train.WordError as exc:
        raise InputError(f"{path}: {exc}") from None


def _functor(args) -> train.FunctorData:
    data = _load(args.functor) if args.functor else {}
    try:
        annuli = {}
        for name, a in data.get("annuli", {}).items():
            if "mobius" in a:
                annuli[name] = train.AnnulusParams.from_mobius(mb.MobiusMap.from_json(a["mobius"]))
            else:
                annuli[name] = train.AnnulusParams(*(_number(a.get(k, "0")) for k in ("lam", "c", "a")))
        return train.FunctorData(
            N=int(data.get("N", args.N)),
            h=Fraction(data.get("h", "1")),
            S=int(data.get("S", 2)),
            x=Fraction(data.get("x", "1/2")),
            collar=Fraction(data.get("collar", "1/2")),
            annuli=annuli,
            N_int=data.get("N_int"),
            exact=bool(data.get("exact", args.exact)),
        )
    except (KeyError, TypeError, ValueError, mb.MalformedInputError) as exc:
        raise InputError(f"{args.functor}: {exc}") from None


def _number(v):
    if isinstance(v, list):
        x = QQi.from_json(v)
        return x.re if x.im == 0 else x
    return Fraction(v)


def _matrix_json(a: np.ndarray) -> list:
    def cell(x):
        if isinstance(x, Fraction):
            return fstr(x)
        if hasattr(x, "denominator") and not isinstance(x, (int, float)):
            return fstr(Fraction(int(x.numerator), int(x.denominator)))
        if hasattr(x, "to_json"):
            return x.to_json()
        if isinstance(x, complex) or np.iscomplexobj(x):
            return [float(np.real(x)), float(np.imag(x))]
        return float(x)

    return [[cell(x) for x in row] for row in a]


# ---------------------------------------------------------------------------
# commands; each returns (result, exit_code)


def cmd_mobius(args, cfg):
    if args.action == "compose":
        f, g = _mobius(args.files[0]), _mobius(args.files[1])
        h = mb.compose(f, g)
        return {"composite": h.to_json(), "in_mantle": mb.in_mantle(h), "strict": mb.strict(h)}, 0
    f = _mobius(args.files[0])
    res = {"map": f.to_json(), "in_mantle": mb.in_mantle(f), "strict": mb.strict(f)}
    if mb.strict(f):
        k = mb.annulus_form(f)
        T, g = mb.normalize_domain(k)
        res.update(annulus=k.to_json(), normalizer=T.to_json(), normal_form=g.to_json())
    return res, 0


def cmd_algebra(args, cfg):
    if args.action == "table":
        table = ca.commutation_table(args.nmax)
        rows = [
            {"kind": e.kind, "n": e.n, "m": e.m, "matches": e.matches, "engine": ca.format_coords(e.engine), "printed": ca.format_coords(e.printed)}
            for e in table
        ]
        flags = [r for r in rows if not r["matches"]]
        return {"entries": rows, "flags": len(flags)}, 1 if flags else 0
    fields = [ca.parse_field(s) for s in args.fields]
    if args.action == "bracket":
        if len(fields) != 2:
            raise InputError("bracket takes two fields")
        x, y = (ca.VirasoroElement(f) for f in fields)
        return ca.virasoro_bracket(x, y).to_json(), 0
    if len(fields) == 2:
        value = ca.gf_cocycle2(*fields)
    elif len(fields) == 3:
        value = ca.gf_cocycle3(*fields)
    else:
        raise InputError("cocycle takes two or three fields")
    return {"coefficient_of_2pi": value.to_json(), "value": [ca.to_complex(value).real, ca.to_complex(value).imag]}, 0


def cmd_verma(args, cfg):
    if args.action == "roots":
        return {"c": fstr(args.c), "level": args.level, "roots": [fstr(r) for r in verma.gram_det_roots(args.c, args.level)]}, 0
    M = verma.VermaModule(args.algebra, args.h, args.c, args.level)
    if args.action == "gram":
        return {"module": M.to_json(), "basis": [list(p) for p in M.level_basis(args.level)], "gram": [[fstr(x) for x in r] for r in M.gram(args.level)]}, 0
    r = verma.is_unitarizable(M)
    res = {"module": M.to_json(), "unitarizable": r.unitarizable}
    if not r:
        res.update(level=r.level, norm=fstr(r.norm), witness=r.witness.to_json())
    return res, 0


def cmd_qpft(args, cfg):
    if args.action == "primary":
        mu, h1, h2 = args.weights
        try:
            return qpft.solve_primary(mu, h1, h2, cfg.N).to_json(), 0
        except qpft.NoSolution as exc:
            return {"dimension": exc.dimension, "level": exc.level, "message": str(exc)}, 1
    alg = qpft.build_V(args.h, S=args.S, N=cfg.N, with_stress=args.action == "stress")
    if args.action == "stress":
        return alg.stress.to_json(), 0
    results = qpft.all_axioms(alg, n_points=cfg.points, seed=cfg.seed)
    return {"algebra": {"h": fstr(alg.h), "S": alg.S, "N": alg.N, "q_R": fstr(alg.q_R)}, "axioms": [r.to_json() for r in results]}, 0 if all(r.ok for r in results) else 1


def cmd_weld(args, cfg):
    wc = welding.WeldConfig(modes=cfg.M, tol=cfg.tol_weld)
    if args.action == "mul":
        a, b = (_element(p) for p in args.files)
        return welding.multiply(a, b, wc).to_json(), 0
    if args.action == "mobius":
        return welding.from_mobius(_mobius(args.files[0]), cfg.M).to_json(), 0
    return welding.random_element(np.random.default_rng(cfg.seed), cfg.M).to_json(), 0


def cmd_train(args, cfg):
    if args.action == "genus":
        m = _word(args.files[0])
        return {"genus": m.genus, "components": m.components, "source": m.source.n, "target": m.target.n}, 0
    F = _functor(args)
    if args.action == "eval":
        m = _word(args.files[0])
        ev = train.evaluate(F, m)
        res = {"functor": F.to_json(), "genus": m.genus, "scale": _matrix_json(np.array([[ev.scale]]))[0][0], "profile": train.polycompact_score(F, ev).to_json()}
        if args.operator:
            res["operator"] = _matrix_json(ev.operator)
        return res, 0
    f1, f2 = _word(args.files[0]), _word(args.files[1])
    try:
        p = train.defect(F, f1, f2)
    except train.CompositionError as exc:
        raise InputError(str(exc)) from None
    return {"functor": F.to_json(), "defect": p.to_json()}, 0


def cmd_conformance(args, cfg):
    rep = conformance(cfg, set(args.only) if args.only else None)
    return rep.to_json(), rep.exit_code


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--N", type=int, default=6, help="truncation level")
    common.add_argument("--M", type=int, default=64, help="Fourier modes for welding")
    common.add_argument("--tol-weld", type=float, default=1e-9)
    common.add_argument("--tol-assoc", type=float, default=1e-6)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--points", type=int, default=20, help="random points for axiom checks")
    common.add_argument("--exact", action=argparse.BooleanOptionalAction, default=False, help="exact arithmetic in train evaluation")
    common.add_argument("--out", help="write the JSON report here instead of stdout")

    p = argparse.ArgumentParser(prog="mantlelab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mobius", parents=[common], help="mantle maps")
    s.add_argument("action", choices=["compose", "check"])
    s.add_argument("files", nargs="+")

    s = sub.add_parser("algebra", parents=[common], help="vector fields on the circle")
    s.add_argument("action", choices=["table", "bracket", "cocycle"])
    s.add_argument("fields", nargs="*", help="e.g. e-2 s3 c1 h")
    s.add_argument("--nmax", type=int, default=8)

    s = sub.add_parser("verma", parents=[common], help="Verma modules")
    s.add_argument("action", choices=["gram", "roots", "unitarity"])
    s.add_argument("--algebra", choices=["sl2", "vir"], default="vir")
    s.add_argument("--h", type=_frac, default=Fraction(0))
    s.add_argument("--c", type=_frac, default=Fraction(0))
    s.add_argument("--level", type=int, default=2)

    s = sub.add_parser("qpft", parents=[common], help="primary fields and field algebras")
    s.add_argument("action", choices=["primary", "axioms", "stress"])
    s.add_argument("weights", nargs="*", type=_frac, help="mu h1 h2 for 'primary'")
    s.add_argument("--h", type=_frac, default=Fraction(1))
    s.add_argument("--S", type=int, default=2)

    s = sub.add_parser("weld", parents=[common], help="annuli with parametrized boundaries")
    s.add_argument("action", choices=["mul", "mobius", "random"])
    s.add_argument("files", nargs="*")

    s = sub.add_parser("train", parents=[common], help="sewing words")
    s.add_argument("action", choices=["eval", "defect", "genus"])
    s.add_argument("files", nargs="+")
    s.add_argument("--functor", help="JSON functor data")
    s.add_argument("--operator", action="store_true", help="include the evaluated matrix")

    s = sub.add_parser("conformance", parents=[common], help="run the full identity suite")
    s.add_argument("--level", type=int, dest="N", default=6)
    s.add_argument("--only", nargs="*", choices=["mobius", "algebra", "verma", "qpft", "weld", "train"])
    return p


COMMANDS = {
    "mobius": cmd_mobius,
    "algebra": cmd_algebra,
    "verma": cmd_verma,
    "qpft": cmd_qpft,
    "weld": cmd_weld,
    "train": cmd_train,
    "conformance": cmd_conformance,
}

_ARITY = {("mobius", "compose"): 2, ("mobius", "check"): 1, ("weld", "mul"): 2, ("weld", "mobius"): 1, ("train", "eval"): 1, ("train", "genus"): 1, ("train", "defect"): 2, ("qpft", "primary"): 3}


def run(argv: list[str] | None = None) -> tuple[dict, int, str | None]:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(N=args.N, M=args.M, tol_weld=args.tol_weld, tol_assoc=args.tol_assoc, seed=args.seed, exact=args.exact, points=args.points, out=args.out)
    action = getattr(args, "action", None)
    want = _ARITY.get((args.command, action))
    got = len(getattr(args, "weights", None) or getattr(args, "files", None) or [])
    if want is not None and got != want:
        raise InputError(f"{args.command} {action} takes {want} argument(s), got {got}")
    result, code = COMMANDS[args.command](args, cfg)
    if args.command != "conformance":
        result = {"schema": SCHEMA, "command": " ".join(x for x in (args.command, action) if x), "config": cfg.to_json(), "result": result}
    return result, code, args.out


def main(argv: list[str] | None = None) -> int:
    try:
        result, code, out = run(argv)
    except (InputError, welding.WeldingError, qpft.ParameterError, qpft.ConstructionError, train.WordError, train.CompositionError, ValueError, ArithmeticError) as exc:
        err = {"schema": SCHEMA, "error": type(exc).__name__, "message": str(exc)}
        diag = getattr(exc, "diagnostics", None)
        if diag:
            err["diagnostics"] = diag
        print(json.dumps(err, sort_keys=True), file=sys.stderr)
        return 2
    text = json.dumps(result, sort_keys=True, indent=2) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
