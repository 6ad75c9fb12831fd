import math
from collections import Counter

import pytest
from scipy.stats import chisquare
from sympy.combinatorics import PermutationGroup

from grouporder.errors import NotSolvableInput
from grouporder.field import ff_make
from grouporder.groups import matrix_group, perm_group
from grouporder.names import Alternating, Cyclic, name_order
from grouporder.oracles import (
    babai_beals_filtration,
    composition_series,
    factor_multiset,
    is_normal_in,
    is_solvable,
    sampler_init,
    sampler_next,
    solvable_membership,
    solvable_order,
)

from conftest import CORPUS, bfs, code, corpus_group, is_perm, sym, sym_group

# |Rad|, |Soc*|, |Pker|, k from standard structure: solvable groups collapse,
# A_n simple, S_n = A_n.2, A5xZ2 has radical Z2, GL(3,2) is simple of order 168
NONSOLVABLE_FILTRATION = {
    "a5": (1, 60, 60, 1),
    "s5": (1, 60, 120, 1),
    "a6": (1, 360, 360, 1),
    "s6": (1, 360, 720, 1),
    "a5xz2": (2, 120, 120, 1),
    "gl3_2": (1, 168, 168, 1),
}
NONSOLVABLE_FACTORS = {"a5": [60], "s5": [2, 60], "a6": [360], "s6": [2, 360], "a5xz2": [2, 60]}


def test_sampler_examples():
    Z2 = perm_group(2, ["(1 2)"])
    st = sampler_init(Z2.generators, Z2, seed=1)
    assert {sampler_next(st) for _ in range(100)} <= {Z2.identity, Z2.generators[0]}

    S4 = corpus_group("s4")
    st = sampler_init(S4.generators, S4, burn_in=200, seed=7)
    counts = Counter(sampler_next(st) for _ in range(10_000))
    elems = bfs(S4, S4.generators)
    assert set(counts) <= elems
    observed = [counts.get(e, 0) for e in sorted(elems)]
    assert chisquare(observed).pvalue >= 0.001

    a = sampler_init(S4.generators, S4, seed=3)
    b = sampler_init(S4.generators, S4, seed=3)
    assert [sampler_next(a) for _ in range(50)] == [sampler_next(b) for _ in range(50)]


def test_sampler_slots_generate_same_group():
    G = corpus_group("a4")
    st = sampler_init(G.generators, G, seed=11)
    for _ in range(20):
        sampler_next(st)
    assert bfs(G, st.slots) == bfs(G, G.generators)


def test_is_solvable_examples():
    assert is_solvable(corpus_group("s4").generators, corpus_group("s4"))
    A5 = corpus_group("a5")
    assert not is_solvable(A5.generators, A5)
    T = corpus_group("trivial")
    assert is_solvable(T.generators, T)


def test_q8_in_sl23():
    F = ff_make(3, 1)
    i = [[0, -1], [1, 0]]
    j = [[1, 1], [1, -1]]
    Q = matrix_group(F, 2, [i, j])
    assert solvable_order(Q.generators, Q) == 8
    minus_i = Q.encode([[2, 0], [0, 2]])
    ij = Q.mul(*Q.generators)
    assert Q.mul(ij, ij) == minus_i
    assert solvable_membership(Q.generators, minus_i, Q)
    A5 = corpus_group("a5")
    with pytest.raises(NotSolvableInput):
        solvable_order(A5.generators, A5)
    with pytest.raises(NotSolvableInput):
        solvable_membership(A5.generators, A5.identity, A5)


def test_is_normal_examples():
    S3 = perm_group(3, ["(1 2)", "(1 2 3)"])
    assert is_normal_in([code(S3, "(1 2 3)")], S3.generators, S3)
    assert not is_normal_in([code(S3, "(1 2)")], S3.generators, S3)
    assert is_normal_in([S3.identity], S3.generators, S3)


@pytest.mark.parametrize("name", CORPUS)
def test_filtration(name):
    G = corpus_group(name)
    f = babai_beals_filtration(G.generators, G)
    whole = bfs(G, G.generators)
    assert f.rad <= f.socstar <= f.pker <= whole
    assert f.k == 0 or f.k <= math.log(len(whole)) / math.log(60)
    expected = NONSOLVABLE_FILTRATION.get(name, (len(whole), len(whole), len(whole), 0))
    assert (len(f.rad), len(f.socstar), len(f.pker), f.k) == expected
    if is_perm(G):
        full = sym_group(G)
        rad = PermutationGroup([sym(G, x) for x in f.rad])
        assert rad.is_solvable and rad.is_normal(full)
        # maximality: any element outside Rad has a non-solvable normal closure over Rad
        for x in sorted(whole - f.rad)[:20]:
            N = full.normal_closure(PermutationGroup([sym(G, y) for y in f.rad] + [sym(G, x)]))
            assert not N.is_solvable
        for S in (f.socstar, f.pker):
            assert PermutationGroup([sym(G, x) for x in S]).is_normal(full)


def test_filtration_s4_a5():
    S4 = corpus_group("s4")
    f = babai_beals_filtration(S4.generators, S4)
    assert len(f.pker) == 24 and f.k == 0
    V4 = perm_group(4, ["(1 2)(3 4)", "(1 3)(2 4)"])
    A5 = corpus_group("a5")
    g = babai_beals_filtration(A5.generators, A5)
    assert len(g.rad) == 1 and len(g.socstar) == len(g.pker) == 60 and g.k == 1
    # S4's Klein four group is the last non-trivial term of its derived series
    assert bfs(V4, V4.generators) < f.rad


@pytest.mark.parametrize("name", [n for n in CORPUS if is_perm(corpus_group(n))])
def test_composition_factors_match_sympy(name):
    G = corpus_group(name)
    ours = sorted(name_order(z) for z in composition_series(G.generators, G).factor_names) \
        if len(bfs(G, G.generators)) > 1 else []
    full = sym_group(G)
    if full.is_solvable:
        series = full.composition_series()
        theirs = sorted(a.order() // b.order() for a, b in zip(series, series[1:]))
    else:
        theirs = NONSOLVABLE_FACTORS[name]
    assert ours == theirs


def test_composition_examples():
    S4 = corpus_group("s4")
    assert factor_multiset(S4.generators, S4) == sorted([Cyclic(2)] * 3 + [Cyclic(3)])
    A5 = corpus_group("a5")
    assert factor_multiset(A5.generators, A5) == [Alternating(5)]
    Z6 = corpus_group("z6")
    assert factor_multiset(Z6.generators, Z6) == [Cyclic(2), Cyclic(3)]


@pytest.mark.parametrize("name", CORPUS)
def test_jordan_holder(name):
    G = corpus_group(name)
    if len(bfs(G, G.generators)) == 1:
        return
    a = sorted(composition_series(G.generators, G, seed=1).factor_names)
    b = sorted(composition_series(G.generators, G, seed=2).factor_names)
    assert a == b == factor_multiset(G.generators, G)
