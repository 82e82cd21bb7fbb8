import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mantlelab.exact import QQi
from mantlelab.mobius import MobiusMap, compose, strict
from mantlelab.train import (
    AnnulusParams,
    CompositionError,
    FunctorData,
    WordError,
    annulus,
    antitrinion,
    defect,
    evaluate,
    identity,
    operator_profile,
    parse_word,
    permutation,
    polycompact_score,
    random_word,
    sew,
    tail_profile,
    trinion,
    union,
)


def dual_graph(word):
    """(vertices, edges, inputs, outputs): one vertex per genus-0 piece, one edge per sewn circle."""
    count = [0]

    def new():
        count[0] += 1
        return count[0] - 1

    def build(w):
        if isinstance(w, list):
            ins, outs, edges = build(w[0])
            for letter in w[1:]:
                i2, o2, e2 = build(letter)
                edges = edges + e2 + list(zip(outs, i2))
                outs = o2
            return ins, outs, edges
        if w == "trinion":
            v = new()
            return [v, v], [v], []
        if w == "antitrinion":
            v = new()
            return [v], [v, v], []
        if isinstance(w, str):
            v = new()
            return [v], [v], []
        (key, val), = w.items()
        if key == "id":
            vs = [new() for _ in range(val)]
            return vs, vs, []
        if key == "perm":
            vs = [new() for _ in val]
            outs = [None] * len(val)
            for j, pj in enumerate(val):
                outs[pj] = vs[j]
            return vs, outs, []
        ins, outs, edges = [], [], []
        for sub in val:
            a, b, c = build(sub)
            ins, outs, edges = ins + a, outs + b, edges + c
        return ins, outs, edges

    ins, outs, edges = build(word)
    return count[0], edges, ins, outs


def oracle_genus(word):
    V, edges, _, _ = dual_graph(word)
    parent = list(range(V))

    def find(a):
        while parent[a] != a:
            a = parent[a]
        return a

    for a, b in edges:
        parent[find(a)] = find(b)
    C = len({find(v) for v in range(V)})
    return len(edges) - V + C, C


def test_examples():
    assert sew(annulus("a"), annulus("b")).genus == 0
    veil = parse_word(["antitrinion", {"perm": [0, 1]}, "trinion"])
    assert (veil.genus, veil.source.n, veil.target.n) == (1, 1, 1)
    u = union(veil, trinion())
    assert (u.genus, u.components, u.source.n, u.target.n) == (1, 2, 3, 2)


def test_euler_oracle_on_random_words():
    rng = random.Random(0)
    for _ in range(200):
        w = random_word(rng, layers=rng.randint(1, 7))
        m = parse_word(w)
        assert (m.genus, m.components) == oracle_genus(w)


@given(st.integers(0, 10**6), st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_sewing_connected_surfaces(s1, s2):
    # g(f1 o f2) = g1 + g2 + k - 1 when both are connected
    f1 = parse_word(random_word(random.Random(s1), layers=4))
    f2 = parse_word(random_word(random.Random(s2), layers=4))
    if f1.components != 1 or f2.components != 1:
        return
    k = f1.target.n
    glue = permutation(list(range(k)))
    if f2.source.n != k:
        return
    assert sew(sew(f1, glue), f2).genus == f1.genus + f2.genus + k - 1


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_sew_associative_and_json(seed):
    rng = random.Random(seed)
    w = random_word(rng, layers=6)
    m = parse_word(w)
    assert parse_word(m.to_json()) == m
    parts = [parse_word([letter]) for letter in w]
    if len(parts) >= 3:
        left = sew(sew(parts[0], parts[1]), parts[2])
        right = sew(parts[0], sew(parts[1], parts[2]))
        assert left == right


def test_composition_and_parse_errors():
    with pytest.raises(CompositionError):
        sew(trinion(), trinion())
    with pytest.raises(WordError) as exc:
        parse_word(["trinion", "antitrinion", {"perm": [0, 0]}])
    assert exc.value.path == (2,)
    with pytest.raises(WordError):
        parse_word(["pants"])
    with pytest.raises(WordError) as exc:
        parse_word([{"union": ["id", "trinion"]}, "trinion", "trinion"])
    assert exc.value.path == (2,)


# --- evaluation -------------------------------------------------------------


def borel(lam, c):
    """Mantle map z -> lam z / (1 - c z) fixing 0."""
    return MobiusMap(QQi.of(lam), QQi(0), QQi.of(-c), QQi(1))


def test_identity_and_single_letters():
    F = FunctorData(N=3)
    e = evaluate(F, identity())
    assert np.array_equal(e.operator, np.identity(e.operator.shape[0]))
    t = evaluate(F, trinion(), normalize=False).operator
    keep = F.compression(1)
    assert np.array_equal(t, F.trinion_operator[np.ix_(keep, F.compression(2))])


def test_antitrinion_is_shapovalov_adjoint():
    F = FunctorData(N=2, exact=True)
    B, A = F.trinion_operator, F.antitrinion_operator
    g = np.array(F.gram, dtype=object)
    g2 = np.kron(g, g)
    assert ((B.T * g[None, :]) == (g2[:, None] * A)).all()


def test_mobius_annuli_compose_exactly():
    f1, f2 = borel(Fraction(1, 2), Fraction(1, 4)), borel(QQi(Fraction(1, 3), Fraction(1, 5)), QQi(Fraction(-1, 5), Fraction(1, 7)))
    ann = {k: AnnulusParams.from_mobius(f) for k, f in {"a": f1, "b": f2, "ba": compose(f2, f1)}.items()}
    F = FunctorData(N=3, annuli=ann, exact=True)
    p = defect(F, annulus("a"), annulus("b"))
    assert p.exact_zero and p.genus_additive
    got = evaluate(F, sew(annulus("a"), annulus("b"))).operator
    assert (got == evaluate(F, annulus("ba")).operator).all()


small = st.fractions(min_value=Fraction(-1, 3), max_value=Fraction(1, 3), max_denominator=9)


@given(small, small, small, small)
@settings(max_examples=10, deadline=None)
def test_projective_subcategory_defect_is_exactly_zero(l1, c1, l2, c2):
    maps = [borel(Fraction(1, 2) + l1, c1), borel(Fraction(1, 2) + l2, c2)]
    if not all(strict(f) for f in maps):
        return
    F = FunctorData(N=2, annuli={"a": AnnulusParams.from_mobius(maps[0]), "b": AnnulusParams.from_mobius(maps[1])}, exact=True)
    assert defect(F, annulus("a"), annulus("b")).exact_zero


def test_translation_part_leaks_through_truncation():
    f = MobiusMap(QQi(Fraction(1, 2)), QQi(Fraction(1, 4)), QQi(0), QQi(1))
    g = borel(Fraction(1, 2), Fraction(1, 3))
    F = FunctorData(N=2, annuli={"a": AnnulusParams.from_mobius(f), "b": AnnulusParams.from_mobius(g)}, exact=True)
    assert not defect(F, annulus("a"), annulus("b")).exact_zero


def test_disjoint_union_is_kronecker():
    f = MobiusMap(QQi(Fraction(1, 2)), QQi(Fraction(1, 4)), QQi(0), QQi(1))
    g = borel(Fraction(1, 2), Fraction(1, 3))
    F = FunctorData(N=2, annuli={"a": AnnulusParams.from_mobius(f), "b": AnnulusParams.from_mobius(g)}, exact=True)
    ea = evaluate(F, annulus("a"), normalize=False).operator
    eb = evaluate(F, annulus("b"), normalize=False).operator
    eu = evaluate(F, union(annulus("a"), annulus("b")), normalize=False).operator
    assert (eu == np.kron(ea, eb)).all()
    p = defect(F, union(annulus("a"), identity()), union(identity(), annulus("b")))
    assert p.exact_zero


def test_permutation_swaps_factors():
    F = FunctorData(N=1)
    d = F.algebra.dim
    P = F.permutation_operator([1, 0])
    u, v = np.arange(d) + 1.0, np.arange(d) ** 2 + 0.5
    assert np.allclose(P @ np.kron(u, v), np.kron(v, u))
    Q = F.permutation_operator([1, 2, 0])
    w = np.linspace(1, 2, d)
    # input strand j lands in slot p[j]
    assert np.allclose(Q @ np.kron(np.kron(u, v), w), np.kron(np.kron(w, u), v))


def test_tail_defect_decreases_with_truncation():
    tails = []
    for N in (4, 6, 8):
        p = defect(FunctorData(N=N), trinion(), antitrinion())
        assert p.genus_additive and p.non_increasing()
        tails.append(p.at(N // 2))
    assert tails[0] > tails[1] > tails[2] > 0


def test_bracketings_converge_with_truncation():
    # two words for a sphere with three inputs; each converges as N grows
    words = [[{"union": ["trinion", "id"]}, "trinion"], [{"union": ["id", "trinion"]}, "trinion"]]
    for w in words:
        m = parse_word(w)
        small_ev = evaluate(FunctorData(N=3), m, normalize=False).operator
        big = FunctorData(N=5)
        big_ev = evaluate(big, m, normalize=False).operator
        rows = big.tensor_levels(1) <= 3
        cols = big.tensor_levels(3) <= 3
        assert np.max(np.abs(big_ev[np.ix_(rows, cols)] - small_ev)) < 1e-3 * np.max(np.abs(small_ev))


def test_polycompact_examples():
    F = FunctorData(N=5)
    keep = F.compression(1)
    lv = F.tensor_levels(1)
    A = np.zeros((keep.sum(), keep.sum()))
    A[np.ix_(lv <= 2, lv <= 2)] = np.random.default_rng(0).normal(size=((lv <= 2).sum(),) * 2)
    prof = tail_profile(A, lv, lv, F.N)
    assert all(t == 0 for t in prof.tails[2:])
    ident = operator_profile(F, evaluate(F, identity()))
    assert ident.non_compact_like and ident.tails[:-1] == (1.0,) * F.N
    tri = polycompact_score(F, evaluate(F, trinion()))
    assert tri.non_increasing() and not tri.non_compact_like
    assert set(tri.slots) == {"in0", "in1", "out0"}


def test_functor_validation():
    with pytest.raises(ValueError):
        FunctorData(N=4, N_int=3)
    F = FunctorData(N=2)
    with pytest.raises(WordError):
        evaluate(F, annulus("missing"))
    with pytest.raises(ValueError):
        evaluate(FunctorData(N=8, max_dim=100), union(identity(), identity()))
