"""Sewing words for boundary-parametrized surfaces and their truncated evaluation.

A morphism m -> n is a word of generators composed left to right:

    "annulus:<id>"   1 -> 1, genus 0, operator looked up in the functor data
    "id"             1 -> 1, the trivial cylinder
    "trinion"        2 -> 1, pair of pants
    "antitrinion"    1 -> 2
    {"perm": p}      n -> n, input strand j becomes output strand p[j]
    {"id": n}        n -> n
    {"union": [w1, w2, ...]}   disjoint union of sub-words (or single letters)

Topology is tracked through Euler characteristics: sewing along circles
leaves chi additive, so a component with Euler characteristic chi and b
boundary circles has genus (2 - chi - b) / 2.

Operators act on tensor powers of the truncated algebra V = C.1 + V_1 + ... + V_S.
Words are contracted at an internal truncation N_int and the result is
compressed to levels <= N; the difference between compressing before and
after a product is the truncation defect whose decay is profiled below.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Mapping, Sequence

import numpy as np

from .exact import QQi, frac, fstr
from .mobius import MobiusMap
from .qpft import build_V


class CompositionError(ValueError):
    pass


class WordError(ValueError):
    """Malformed sewing word; ``path`` locates the offending letter."""

    def __init__(self, message: str, path: tuple = ()):
        super().__init__(f"{message} at {list(path)}")
        self.path = path


@dataclass(frozen=True)
class TrainObject:
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("object size must be nonnegative")

    @property
    def labels(self) -> range:
        return range(self.n)


# ---------------------------------------------------------------------------
# morphisms


@dataclass(frozen=True)
class TrainMorphism:
    """A sewing word with cached topology.

    ``inputs[i]`` and ``outputs[j]`` are the component carrying each boundary
    circle; ``chi[c]`` is the Euler characteristic of component c.
    """

    word: tuple
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]
    chi: tuple[int, ...]

    def __post_init__(self):
        for g in self.component_genera:
            if g < 0:
                raise CompositionError("inconsistent Euler characteristic bookkeeping")

    @property
    def source(self) -> TrainObject:
        return TrainObject(len(self.inputs))

    @property
    def target(self) -> TrainObject:
        return TrainObject(len(self.outputs))

    @property
    def components(self) -> int:
        return len(self.chi)

    @cached_property
    def component_genera(self) -> tuple[int, ...]:
        out = []
        for c, x in enumerate(self.chi):
            b = self.inputs.count(c) + self.outputs.count(c)
            twice = 2 - x - b
            if twice % 2:
                raise CompositionError("odd 2 - chi - b")
            out.append(twice // 2)
        return tuple(out)

    @property
    def genus(self) -> int:
        return sum(self.component_genera)

    def to_json(self) -> list:
        return _word_json(self.word)

    def __str__(self) -> str:
        return json.dumps(self.to_json())


def _word_json(word) -> list:
    return json.loads(json.dumps(list(word)))


def _canonical(inputs, outputs, chi_of: Mapping[int, int]) -> tuple:
    order: dict[int, int] = {}
    for c in list(inputs) + list(outputs) + sorted(chi_of):
        order.setdefault(c, len(order))
    chi = [0] * len(order)
    for c, x in chi_of.items():
        chi[order[c]] += x
    return tuple(order[c] for c in inputs), tuple(order[c] for c in outputs), tuple(chi)


def _generator(word, n_in: int, n_out: int, chi: int) -> TrainMorphism:
    return TrainMorphism(tuple(word), (0,) * n_in, (0,) * n_out, (chi,))


def identity(n: int = 1) -> TrainMorphism:
    return TrainMorphism(({"id": n},), tuple(range(n)), tuple(range(n)), (0,) * n)


def annulus(name: str) -> TrainMorphism:
    return _generator([f"annulus:{name}"], 1, 1, 0)


def trinion() -> TrainMorphism:
    return _generator(["trinion"], 2, 1, -1)


def antitrinion() -> TrainMorphism:
    return _generator(["antitrinion"], 1, 2, -1)


def permutation(p: Sequence[int]) -> TrainMorphism:
    p = list(p)
    if sorted(p) != list(range(len(p))):
        raise WordError(f"{p} is not a permutation")
    inv = [0] * len(p)
    for j, pj in enumerate(p):
        inv[pj] = j
    return TrainMorphism(({"perm": p},), tuple(range(len(p))), tuple(inv), (0,) * len(p))


def sew(f1: TrainMorphism, f2: TrainMorphism) -> TrainMorphism:
    """f1 followed by f2, sewn along the outputs of f1 = inputs of f2."""
    if f1.target != f2.source:
        raise CompositionError(f"cannot sew {f1.target.n} outgoing circles to {f2.source.n} incoming")
    off = f1.components
    parent = list(range(off + f2.components))

    def find(c):
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    for a, b in zip(f1.outputs, f2.inputs):
        ra, rb = find(a), find(b + off)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    chi_of: dict[int, int] = {}
    for c, x in enumerate(f1.chi + f2.chi):
        r = find(c)
        chi_of[r] = chi_of.get(r, 0) + x
    ins = [find(c) for c in f1.inputs]
    outs = [find(c + off) for c in f2.outputs]
    return TrainMorphism(f1.word + f2.word, *_canonical(ins, outs, chi_of))


def union(*fs: TrainMorphism) -> TrainMorphism:
    ins, outs, chi_of, off = [], [], {}, 0
    for f in fs:
        ins += [c + off for c in f.inputs]
        outs += [c + off for c in f.outputs]
        chi_of.update({c + off: x for c, x in enumerate(f.chi)})
        off += f.components
    word = ({"union": [_word_json(f.word) for f in fs]},)
    return TrainMorphism(word, *_canonical(ins, outs, chi_of))


def genus_additive(f1: TrainMorphism, f2: TrainMorphism) -> bool:
    return sew(f1, f2).genus == f1.genus + f2.genus


def parse_letter(letter, path: tuple = ()) -> TrainMorphism:
    if isinstance(letter, str):
        if letter == "trinion":
            return trinion()
        if letter == "antitrinion":
            return antitrinion()
        if letter == "id":
            return identity(1)
        if letter.startswith("annulus:") and len(letter) > len("annulus:"):
            return annulus(letter[len("annulus:") :])
        raise WordError(f"unknown generator {letter!r}", path)
    if isinstance(letter, dict) and len(letter) == 1:
        (key, val), = letter.items()
        if key == "perm" and isinstance(val, list) and all(isinstance(v, int) for v in val):
            try:
                return permutation(val)
            except WordError as exc:
                raise WordError(f"{val} is not a permutation", path) from exc
        if key == "id" and isinstance(val, int) and val >= 0:
            return identity(val)
        if key == "union" and isinstance(val, list) and val:
            return union(*(parse_word(w, path + (key, i)) for i, w in enumerate(val)))
    raise WordError(f"malformed letter {letter!r}", path)


def parse_word(word, path: tuple = ()) -> TrainMorphism:
    """A letter or a list of letters composed left to right."""
    if not isinstance(word, list):
        return parse_letter(word, path)
    if not word:
        raise WordError("empty word", path)
    out = parse_letter(word[0], path + (0,))
    for i, letter in enumerate(word[1:], 1):
        try:
            out = sew(out, parse_letter(letter, path + (i,)))
        except CompositionError as exc:
            raise WordError(str(exc), path + (i,)) from None
    return out


def random_word(rng, layers: int = 5, max_width: int = 4, annuli: Sequence[str] = ("a", "b")) -> list:
    """Random composable word; ``rng`` is a ``random.Random``."""
    width = rng.randint(1, min(3, max_width))
    word = []
    for _ in range(layers):
        if width > 1 and rng.random() < 0.2:
            p = list(range(width))
            rng.shuffle(p)
            word.append({"perm": p})
            continue
        blocks, i, out = [], 0, 0
        while i < width:
            if i + 1 < width and rng.random() < 0.5:
                blocks.append(rng.choice(["trinion", {"perm": [1, 0]}, {"id": 2}]))
                out += 1 if blocks[-1] == "trinion" else 2
                i += 2
            else:
                grow = out + (width - i) < max_width
                choices = ["id", *(f"annulus:{a}" for a in annuli)] + (["antitrinion"] if grow else [])
                blocks.append(rng.choice(choices))
                out += 2 if blocks[-1] == "antitrinion" else 1
                i += 1
        word.append(blocks[0] if len(blocks) == 1 else {"union": blocks})
        width = out
    return word


def cycle_rank_genus(word) -> tuple[int, int]:
    """(genus, components) from the dual graph of a word, without Euler characteristics.

    Every generator is a genus-0 piece (a vertex) and every sewn circle an
    edge, so the genus is the cycle rank E - V + C of that graph.
    """
    count = 0
    edges: list[tuple[int, int]] = []

    def new(k: int) -> list[int]:
        nonlocal count
        count += k
        return list(range(count - k, count))

    def build(w) -> tuple[list[int], list[int]]:
        if isinstance(w, (list, tuple)):
            ins, outs = build(w[0])
            for letter in w[1:]:
                i2, o2 = build(letter)
                edges.extend(zip(outs, i2))
                outs = o2
            return ins, outs
        if isinstance(w, str):
            (v,) = new(1)
            return ([v, v], [v]) if w == "trinion" else ([v], [v, v]) if w == "antitrinion" else ([v], [v])
        (key, val), = w.items()
        if key == "id":
            vs = new(val)
            return vs, vs
        if key == "perm":
            vs = new(len(val))
            outs = [0] * len(val)
            for j, pj in enumerate(val):
                outs[pj] = vs[j]
            return vs, outs
        ins, outs = [], []
        for sub in val:
            a, b = build(sub)
            ins, outs = ins + a, outs + b
        return ins, outs

    build(list(word))
    parent = list(range(count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(a)] = find(b)
    comps = len({find(v) for v in range(count)})
    return len(edges) - count + comps, comps


# ---------------------------------------------------------------------------
# functor data


@dataclass(frozen=True)
class AnnulusParams:
    """z -> a + lam z / (1 - c z); operator e^{a L_-1} lam^{L_0} e^{c L_1}."""

    lam: Any
    c: Any = Fraction(0)
    a: Any = Fraction(0)

    @classmethod
    def from_mobius(cls, f: MobiusMap) -> "AnnulusParams":
        if not f.d:
            raise ValueError("annulus map has its pole at 0")
        return cls(_simplify(f.det / (f.d * f.d)), _simplify(-f.c / f.d), _simplify(f.b / f.d))

    @property
    def fixes_zero(self) -> bool:
        return not self.a

    def to_json(self) -> dict:
        return {k: _num_json(getattr(self, k)) for k in ("lam", "c", "a")}


def _simplify(x):
    x = QQi.of(x)
    return x.re if x.im == 0 else x


def _num_json(x):
    return x.to_json() if isinstance(x, QQi) else fstr(frac(x))


def _to_exact(x):
    return Fraction(int(x.numerator), int(x.denominator))


@dataclass(frozen=True)
class FunctorData:
    """Truncated functor on the algebra V (spins <= S, weight h) at levels <= N.

    Generators are built at level N_int (default 2N). The trinion is the
    product m_x with collars collar^{L_0} on all three legs; the antitrinion
    is its transpose for the Shapovalov form. ``exact`` keeps rational
    (or Gaussian rational) entries in the level basis, otherwise floats in
    the Shapovalov-orthonormal basis are used.
    """

    N: int = 6
    h: Fraction = Fraction(1)
    S: int = 2
    x: Fraction = Fraction(1, 2)
    collar: Fraction = Fraction(1, 2)
    annuli: Mapping[str, AnnulusParams] = field(default_factory=dict)
    N_int: int | None = None
    exact: bool = False
    max_dim: int = 20000
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("truncation level must be positive")
        if self.N_int is not None and self.N_int < self.N:
            raise ValueError("internal truncation below the external one")

    @property
    def n_int(self) -> int:
        return 2 * self.N if self.N_int is None else self.N_int

    @cached_property
    def algebra(self):
        return build_V(self.h, self.S, self.n_int, with_stress=False)

    @cached_property
    def levels(self) -> np.ndarray:
        return np.array([k for _, k in self.algebra.labels])

    @cached_property
    def gram(self) -> list[Fraction]:
        out = []
        for n, k in self.algebra.labels:
            out.append(Fraction(1) if n == 0 else Fraction(math.factorial(k) * math.prod(2 * n + j for j in range(k))))
        return out

    @cached_property
    def _sqrt_gram(self) -> np.ndarray:
        return np.sqrt(np.array([float(g) for g in self.gram]))

    def _mat(self, a: np.ndarray) -> np.ndarray:
        return np.vectorize(_to_exact, otypes=[object])(a)

    def _finish(self, exact: np.ndarray, rows: int, cols: int) -> np.ndarray:
        """Convert a level-basis operator between tensor powers to the working basis."""
        if self.exact:
            return exact
        s = self._sqrt_gram
        so, si = _kron_power(s, rows), _kron_power(s, cols)
        return _to_float(exact) * so[:, None] / si[None, :]

    def _weights_power(self, z) -> np.ndarray:
        return np.array([z ** int(self.algebra.weight(i)) for i in range(self.algebra.dim)], dtype=object)

    def annulus_operator(self, name: str) -> np.ndarray:
        key = ("annulus", name)
        if key not in self._cache:
            try:
                p = self.annuli[name]
            except KeyError:
                raise WordError(f"no annulus named {name!r} in the functor data") from None
            alg = self.algebra
            lam = self._weights_power(p.lam)
            op = _exp_nilpotent(self._mat(alg.sl2(1)), p.c) * lam[:, None]
            if p.a:
                op = _exp_nilpotent(self._mat(alg.sl2(-1)), p.a).dot(op)
            self._cache[key] = self._finish(op, 1, 1)
        return self._cache[key]

    @property
    def trinion_operator(self) -> np.ndarray:
        """V (x) V -> V, a (x) b -> q^{L0} l_x(q^{L0} a) q^{L0} b."""
        if "trinion" not in self._cache:
            alg, d = self.algebra, self.algebra.dim
            T = self._mat(alg.left_tensor(self.x))  # [i, out, in]
            B = np.transpose(T, (1, 0, 2)).reshape(d, d * d)
            q = self._weights_power(self.collar)
            B = B * q[:, None] * np.kron(q, q)[None, :]
            self._cache["trinion"] = (B, self._finish(B, 1, 2))
        return self._cache["trinion"][1]

    @property
    def antitrinion_operator(self) -> np.ndarray:
        if "antitrinion" not in self._cache:
            B = self.trinion_operator
            if self.exact:
                g = np.array(self.gram, dtype=object)
                g2 = np.kron(g, g)
                A = B.T * g[None, :] / g2[:, None]
            else:
                A = B.T.copy()
            self._cache["antitrinion"] = A
        return self._cache["antitrinion"]

    def identity_operator(self, n: int) -> np.ndarray:
        d = self.algebra.dim ** n
        if self.exact:
            out = np.zeros((d, d), dtype=object)
            out[...] = Fraction(0)
            for i in range(d):
                out[i, i] = Fraction(1)
            return out
        return np.identity(d)

    def permutation_operator(self, p: Sequence[int]) -> np.ndarray:
        n, d = len(p), self.algebra.dim
        idx = np.arange(d**n).reshape((d,) * n)
        # input strand j lands in output slot p[j]
        inv = [0] * n
        for j, pj in enumerate(p):
            inv[pj] = j
        src = np.transpose(idx, inv).ravel()
        out = self.identity_operator(n)
        return out[src, :].copy()

    def compression(self, n: int) -> np.ndarray:
        keep = self.levels <= self.N
        return _kron_bool_power(keep, n)

    def tensor_levels(self, n: int, compressed: bool = True) -> np.ndarray:
        lv = self.levels
        out = np.zeros(1, dtype=int)
        for _ in range(n):
            out = np.maximum.outer(out, lv).ravel()
        return out[self.compression(n)] if compressed else out

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "N_int": self.n_int,
            "h": fstr(frac(self.h)),
            "S": self.S,
            "x": fstr(frac(self.x)),
            "collar": fstr(frac(self.collar)),
            "exact": self.exact,
            "annuli": {k: v.to_json() for k, v in sorted(self.annuli.items())},
        }


def _kron_power(v: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1)
    for _ in range(n):
        out = np.kron(out, v)
    return out


def _kron_bool_power(v: np.ndarray, n: int) -> np.ndarray:
    out = np.ones(1, dtype=bool)
    for _ in range(n):
        out = np.logical_and.outer(out, v).ravel()
    return out


def _to_float(a: np.ndarray) -> np.ndarray:
    if a.dtype != object:
        return a
    if any(isinstance(x, QQi) for x in a.flat):
        return np.vectorize(complex, otypes=[complex])(a)
    return np.vectorize(float, otypes=[float])(a)


def _exp_nilpotent(m: np.ndarray, t) -> np.ndarray:
    n = m.shape[0]
    out = np.zeros((n, n), dtype=object)
    out[...] = Fraction(0)
    for i in range(n):
        out[i, i] = Fraction(1)
    if not t:
        return out
    term = out.copy()
    for k in range(1, n + 1):
        term = term.dot(m) * (Fraction(1, k) * t)
        if not any(term.flat):
            break
        out = out + term
    return out


# ---------------------------------------------------------------------------
# evaluation


@dataclass(frozen=True)
class Evaluation:
    operator: np.ndarray
    scale: Any
    n_in: int
    n_out: int


def _eval_word(F: FunctorData, word, path=()) -> tuple[np.ndarray, int, int]:
    if isinstance(word, list):
        op, n_in, n_out = _eval_word(F, word[0], path + (0,))
        for i, letter in enumerate(word[1:], 1):
            nxt, a, b = _eval_word(F, letter, path + (i,))
            op = nxt.dot(op)
            n_out = b
        return op, n_in, n_out
    if isinstance(word, tuple):  # frozen word of a TrainMorphism
        return _eval_word(F, list(word), path)
    if isinstance(word, str):
        if word == "trinion":
            return F.trinion_operator, 2, 1
        if word == "antitrinion":
            return F.antitrinion_operator, 1, 2
        if word == "id":
            return F.identity_operator(1), 1, 1
        return F.annulus_operator(word[len("annulus:") :]), 1, 1
    (key, val), = word.items()
    if key == "perm":
        return F.permutation_operator(val), len(val), len(val)
    if key == "id":
        return F.identity_operator(val), val, val
    parts = [_eval_word(F, w, path + (key, i)) for i, w in enumerate(val)]
    op = parts[0][0]
    for p in parts[1:]:
        op = np.kron(op, p[0])
    return op, sum(p[1] for p in parts), sum(p[2] for p in parts)


def _check_size(F: FunctorData, m: TrainMorphism) -> None:
    d = F.algebra.dim
    widths = [m.source.n, m.target.n]
    if max(d**w for w in widths) > F.max_dim:
        raise ValueError(f"tensor power too large for evaluation (dim {d}, width {max(widths)})")


def projective_normalize(op: np.ndarray):
    """Divide by the entry of largest magnitude (first such entry in row-major order)."""
    flat = op.ravel()
    if op.dtype == object:
        mags = [x.norm2() if isinstance(x, QQi) else x * x for x in flat]
        best = max(range(len(mags)), key=lambda i: (mags[i], -i))
    else:
        mags = np.abs(flat)
        best = int(np.argmax(mags))
    s = flat[best]
    if not s:
        return op, s
    return op / s, s


def evaluate(F: FunctorData, m: TrainMorphism, normalize: bool = True) -> Evaluation:
    """Contract the word at level N_int, compress to levels <= N, normalize projectively."""
    _check_size(F, m)
    op, n_in, n_out = _eval_word(F, list(m.word))
    op = op[np.ix_(F.compression(n_out), F.compression(n_in))]
    scale = 1
    if normalize:
        op, scale = projective_normalize(op)
    return Evaluation(op, scale, n_in, n_out)


# ---------------------------------------------------------------------------
# tail profiles


def _spec_norm(a: np.ndarray) -> float:
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2)) if a.ndim == 2 and min(a.shape) > 0 else float(np.linalg.norm(a))


@dataclass(frozen=True)
class TailProfile:
    """Per-level tail norms: input side ||A (I - P_L)||, output side ||(I - P_L) A||."""

    levels: tuple[int, ...]
    input_tails: tuple[float, ...]
    output_tails: tuple[float, ...]
    exact_zero: bool | None = None
    genus_additive: bool | None = None
    slots: Mapping[str, tuple[float, ...]] = field(default_factory=dict)

    @property
    def tails(self) -> tuple[float, ...]:
        return tuple(max(a, b) for a, b in zip(self.input_tails, self.output_tails))

    def at(self, level: int) -> float:
        return self.tails[self.levels.index(level)]

    @property
    def non_compact_like(self) -> bool:
        t = self.tails
        return len(t) > 1 and t[0] > 0 and t[-2] >= 0.5 * t[0]

    def non_increasing(self) -> bool:
        return all(b <= a for a, b in zip(self.input_tails, self.input_tails[1:])) and all(
            b <= a for a, b in zip(self.output_tails, self.output_tails[1:])
        )

    def to_json(self) -> dict:
        out = {
            "levels": list(self.levels),
            "input_tails": [float(x) for x in self.input_tails],
            "output_tails": [float(x) for x in self.output_tails],
            "non_compact_like": self.non_compact_like,
        }
        if self.exact_zero is not None:
            out["exact_zero"] = self.exact_zero
        if self.genus_additive is not None:
            out["genus_additive"] = self.genus_additive
        if self.slots:
            out["slots"] = {k: [float(x) for x in v] for k, v in self.slots.items()}
        return out


def _orthonormal(F: FunctorData, op: np.ndarray, n_in: int, n_out: int) -> np.ndarray:
    if not F.exact:
        return np.asarray(op)
    s = F._sqrt_gram
    so = _kron_power(s, n_out)[F.compression(n_out)]
    si = _kron_power(s, n_in)[F.compression(n_in)]
    return _to_float(op) * so[:, None] / si[None, :]


def tail_profile(op: np.ndarray, in_levels: np.ndarray, out_levels: np.ndarray, N: int, **extra) -> TailProfile:
    ins, outs = [], []
    for L in range(N + 1):
        ins.append(_spec_norm(op[:, in_levels > L]))
        outs.append(_spec_norm(op[out_levels > L, :]))
    return TailProfile(tuple(range(N + 1)), tuple(ins), tuple(outs), **extra)


def operator_profile(F: FunctorData, ev: Evaluation) -> TailProfile:
    A = _orthonormal(F, ev.operator, ev.n_in, ev.n_out)
    return tail_profile(A, F.tensor_levels(ev.n_in), F.tensor_levels(ev.n_out), F.N)


def defect(F: FunctorData, f1: TrainMorphism, f2: TrainMorphism) -> TailProfile:
    """Profile of evaluate(sew(f1, f2)) - evaluate(f2) evaluate(f1), both projectively normalized."""
    whole = evaluate(F, sew(f1, f2), normalize=False)
    e1 = evaluate(F, f1, normalize=False)
    e2 = evaluate(F, f2, normalize=False)
    a, _ = projective_normalize(whole.operator)
    b, _ = projective_normalize(e2.operator.dot(e1.operator))
    D = a - b
    exact_zero = (not any(D.flat)) if F.exact else None
    D = _orthonormal(F, D, whole.n_in, whole.n_out)
    return tail_profile(
        D,
        F.tensor_levels(whole.n_in),
        F.tensor_levels(whole.n_out),
        F.N,
        exact_zero=exact_zero,
        genus_additive=genus_additive(f1, f2),
    )


def polycompact_score(F: FunctorData, ev: Evaluation, samples: int = 3, seed: int = 0) -> TailProfile:
    """Tail profile of partial substitutions into each input and pairings with each output.

    With one input and one output this is the profile of the operator itself.
    Otherwise, for each input slot i a sampled unit vector x is substituted
    (giving an operator on the remaining inputs) and for each output slot j
    the output is paired with a sampled y; the score is the largest tail.
    """
    A = _orthonormal(F, ev.operator, ev.n_in, ev.n_out)
    if ev.n_in <= 1 and ev.n_out <= 1:
        return operator_profile(F, ev)
    keep = F.levels <= F.N
    lv = F.levels[keep]
    d = int(keep.sum())
    rng = np.random.default_rng(seed)
    T = A.reshape((d,) * ev.n_out + (d,) * ev.n_in)
    slots: dict[str, list[float]] = {}
    for s in range(samples):
        v = rng.normal(size=d) * 0.5 ** lv
        v /= np.linalg.norm(v)
        for i in range(ev.n_in):
            B = np.tensordot(T, v, axes=([ev.n_out + i], [0]))
            prof = _slot_profile(F, B, ev.n_out, ev.n_in - 1)
            _merge(slots, f"in{i}", prof)
        for j in range(ev.n_out):
            B = np.tensordot(v.conj(), T, axes=([0], [j]))
            prof = _slot_profile(F, B, ev.n_out - 1, ev.n_in)
            _merge(slots, f"out{j}", prof)
    agg = [max(v[L] for v in slots.values()) for L in range(F.N + 1)]
    return TailProfile(tuple(range(F.N + 1)), tuple(agg), tuple(agg), slots={k: tuple(v) for k, v in slots.items()})


def _slot_profile(F: FunctorData, B: np.ndarray, n_out: int, n_in: int) -> list[float]:
    d_out, d_in = int(np.prod(B.shape[:n_out])), int(np.prod(B.shape[n_out:]))
    M = B.reshape(d_out, d_in)
    p = tail_profile(M, F.tensor_levels(n_in), F.tensor_levels(n_out), F.N)
    return list(p.tails)


def _merge(slots: dict, key: str, prof: list[float]) -> None:
    if key in slots:
        slots[key] = [max(a, b) for a, b in zip(slots[key], prof)]
    else:
        slots[key] = prof
