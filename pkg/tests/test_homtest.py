import itertools
import random
from fractions import Fraction

import pytest

from grouporder.errors import NotInValidSet, PreconditionViolated
from grouporder.groups import perm_group
from grouporder.homtest import (
    ConstructiveMembershipOracle,
    HomTestParams,
    IsoWitness,
    all_homomorphisms,
    f_lambda,
    find_isomorphism_images,
    g_lambda,
    good_fraction,
    hom_test_statistic,
    iso_check,
    iso_witness_generate,
    maj,
    nearest_homomorphism_distance,
    reference_oracle,
    tokens_equal,
)
from grouporder.names import Alternating
from grouporder.slp import mem_cert_generate, slp_eval

from conftest import bfs, code, corpus_group


@pytest.fixture(scope="module")
def a5_oracle():
    return reference_oracle(Alternating(5))


def _extend(S, T, images):
    """The homomorphism S -> T sending S's generators to ``images``, by BFS."""
    phi = {S.identity: T.identity}
    frontier = [S.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for s, t in zip(S.generators, images):
                y = S.mul(x, s)
                if y not in phi:
                    phi[y] = T.mul(phi[x], t)
                    nxt.append(y)
        frontier = nxt
    return phi


def test_reference_generators(a5_oracle):
    S = a5_oracle.reference
    assert [S.describe(s) for s in S.generators] == ["(1 4)(2 5)", "(1 2 3)"]
    assert a5_oracle.order == 60


def test_g_lambda_examples(a5_oracle):
    S = a5_oracle.reference
    s1, s2 = S.generators
    G = corpus_group("a5")
    images = (G.generators[0], G.generators[1])
    lam = 0
    assert tuple(a5_oracle.lookup(s1, lam)) == (("G", 0),)
    assert g_lambda(s1, lam, images, a5_oracle, G) == images[0]
    x = code(S, "(1 3 2)")
    assert x == S.inv(s2)
    assert tuple(a5_oracle.lookup(x, lam)) == (("G", 1), ("I", 0))
    assert g_lambda(x, lam, images, a5_oracle, G) == G.inv(images[1])
    with pytest.raises(NotInValidSet):
        a5_oracle.lookup(x, a5_oracle.seed_space)
    bad = next(iter(a5_oracle.failures))
    y, lam_bad = a5_oracle.elements[bad % 60], bad // 60
    with pytest.raises(NotInValidSet):
        g_lambda(y, lam_bad, images, a5_oracle, G)


def test_lookup_evaluates_to_element(a5_oracle):
    S = a5_oracle.reference
    for lam in range(30):
        for x in a5_oracle.elements:
            if a5_oracle.is_valid(x, lam):
                assert slp_eval(a5_oracle.lookup(x, lam), S.generators, S) == x


def test_f_lambda_examples(a5_oracle):
    S = a5_oracle.reference
    bad = next(iter(a5_oracle.failures))
    y, lam_bad = a5_oracle.elements[bad % 60], bad // 60
    G = S
    images = S.generators
    assert f_lambda(y, lam_bad, images, a5_oracle, G) == G.identity
    assert f_lambda(S.generators[0], 5, images, a5_oracle, G) == images[0]
    # coset equality is decided through L-membership
    A5xZ2 = corpus_group("a5xz2")
    L = bfs(A5xZ2, [code(A5xZ2, "(6 7)")])
    a = code(A5xZ2, "(1 2 3)")
    b = A5xZ2.mul(a, code(A5xZ2, "(6 7)"))
    assert tokens_equal(A5xZ2, a, b, L.__contains__)
    assert not tokens_equal(A5xZ2, a, A5xZ2.identity, L.__contains__)


def test_substitution_law_in_quotient(a5_oracle):
    G = corpus_group("a5xz2")
    L_gens = (code(G, "(6 7)"),)
    L = bfs(G, L_gens)
    images = find_isomorphism_images(G, G.generators, L_gens, a5_oracle)
    phi = _extend(a5_oracle.reference, G, images)
    for lam in range(20):
        for x in a5_oracle.elements:
            if a5_oracle.is_valid(x, lam):
                tok = f_lambda(x, lam, images, a5_oracle, G)
                assert tokens_equal(G, tok, phi[x], L.__contains__)


def test_iso_check_honest(a5_oracle):
    G = corpus_group("a5")
    w = iso_witness_generate(G, G.generators, (), a5_oracle)
    accepted = sum(iso_check(G, w, (), G.generators, a5_oracle, seed=s).accepted for s in range(100))
    assert accepted >= 67


def test_iso_check_k_equals_l(a5_oracle):
    G = corpus_group("a5")
    e = G.identity
    c = mem_cert_generate(e, (e, e), G)
    w = IsoWitness((e, e), (c, c), (c, c))
    for s in range(30):
        res = iso_check(G, w, (), (e, e), a5_oracle, seed=s)
        assert not res.accepted


def test_iso_check_z2_quotient_rejected(a5_oracle):
    S3 = perm_group(3, ["(1 2)", "(1 2 3)"])
    L_gens = (code(S3, "(1 2 3)"),)
    K_gens = (code(S3, "(1 2)"),)
    rng = random.Random(5)
    elems = sorted(bfs(S3, S3.generators))
    odd = sorted(set(elems) - bfs(S3, L_gens))
    rejected = 0
    for s in range(100):
        # one odd image keeps the generation certificates valid
        images = (rng.choice(odd), rng.choice(elems))
        if rng.random() < 0.5:
            images = images[::-1]
        w = iso_witness_generate(S3, K_gens, L_gens, a5_oracle, images=images)
        rejected += not iso_check(S3, w, L_gens, K_gens, a5_oracle, seed=s).accepted
    assert rejected >= 67


def test_iso_check_preconditions(a5_oracle):
    S3 = perm_group(3, ["(1 2)", "(1 2 3)"])
    w = IsoWitness((), (), ())
    with pytest.raises(PreconditionViolated):
        iso_check(S3, w, (code(S3, "(1 2)"),), S3.generators, a5_oracle)
    A5 = corpus_group("a5")
    with pytest.raises(PreconditionViolated):
        iso_check(A5, w, A5.generators, A5.generators, a5_oracle)


def test_iso_check_deterministic(a5_oracle):
    G = corpus_group("a5")
    w = iso_witness_generate(G, G.generators, (), a5_oracle)
    a = iso_check(G, w, (), G.generators, a5_oracle, seed=9)
    b = iso_check(G, w, (), G.generators, a5_oracle, seed=9)
    assert (a.accepted, a.lam, a.steps, a.reason) == (b.accepted, b.lam, b.steps, b.reason)


def test_maj_examples(a5_oracle):
    G = corpus_group("a5")
    images = find_isomorphism_images(G, G.generators, (), a5_oracle)
    s1 = a5_oracle.reference.generators[0]
    in_L = {G.identity}.__contains__
    hits = sum(maj(s1, s, images, a5_oracle, G, in_L, random.Random(s)) == images[0] for s in range(100))
    assert hits >= 95
    e = G.identity
    tok = maj(s1, 0, (e, e), a5_oracle, G, in_L, random.Random(0))
    assert in_L(tok)


def test_maj_corrects_partial_map():
    # a fifth of (lambda, x) pairs invalid: f agrees with the true map on about 8/10 of S
    oracle = reference_oracle(Alternating(5), seed_space=16, failure_fraction=0.2, failure_seed=3)
    G = corpus_group("a5")
    images = find_isomorphism_images(G, G.generators, (), oracle)
    phi = _extend(oracle.reference, G, images)
    in_L = {G.identity}.__contains__
    agree = [sum(f_lambda(x, lam, images, oracle, G) == phi[x] for x in oracle.elements) / 60 for lam in range(16)]
    assert 0.7 <= sum(agree) / 16 <= 0.9
    rng = random.Random(1)
    hits = 0
    for run in range(100):
        x = oracle.sample(rng)
        hits += maj(x, run % 16, images, oracle, G, in_L, random.Random(run)) == phi[x]
    assert hits >= 90


def test_params_defaults():
    p = HomTestParams()
    assert (p.outer_iterations, p.maj_trials, p.hom_threshold) == (12, 50, Fraction(9, 10))
    assert not p.overridden and HomTestParams(maj_trials=10).overridden


def _cyclic(n):
    return perm_group(n, ["(" + " ".join(str(i) for i in range(1, n + 1)) + ")"])


def _brute_statistic(f, S):
    elems = sorted(f)
    good = sum(1 for a in elems for b in elems if f[S.mul(a, b)] == S.mul(f[a], f[b]))
    return Fraction(good, len(elems) ** 2)


def test_statistic_examples():
    Z5 = _cyclic(5)
    x = Z5.generators[0]
    powers = [Z5.power(x, i) for i in range(5)]
    ident = {g: g for g in powers}
    assert hom_test_statistic(ident, Z5).value == 1
    for c in range(5):
        for d in range(5):
            if d == c:
                continue
            f = dict(ident)
            f[powers[c]] = powers[d]
            stat = hom_test_statistic(f, Z5)
            assert stat.exact and stat.value == _brute_statistic(f, Z5)
    # corrupting one non-identity point breaks 10 of the 25 pairs
    f = dict(ident)
    f[powers[1]] = powers[2]
    assert hom_test_statistic(f, Z5).value == Fraction(15, 25)
    Z2 = _cyclic(2)
    e, t = Z2.identity, Z2.generators[0]
    flip = {e: t, t: e}
    assert hom_test_statistic(flip, Z2).value == _brute_statistic(flip, Z2) == 0


@pytest.mark.parametrize("n", [2, 3, 5])
def test_statistic_implies_close_to_homomorphism(n):
    S = _cyclic(n)
    elems = sorted(bfs(S, S.generators))
    assert len(all_homomorphisms(S, S)) == n
    for values in itertools.product(elems, repeat=n):
        f = dict(zip(elems, values))
        if hom_test_statistic(f, S).value >= Fraction(9, 10):
            assert nearest_homomorphism_distance(f, S) <= Fraction(1, 10)


def test_good_fraction(a5_oracle):
    n = a5_oracle.order
    bad_seeds = {f // n for f in a5_oracle.failures}
    assert len(a5_oracle.failures) == round(1e-7 * a5_oracle.seed_space * n)
    expected = Fraction(a5_oracle.seed_space - len(bad_seeds), a5_oracle.seed_space)
    assert good_fraction(a5_oracle) == expected >= Fraction(99, 100)
    heavy = ConstructiveMembershipOracle(a5_oracle.reference, seed_space=1000, failure_fraction=0.01)
    bad = {f // n for f in heavy.failures}
    assert good_fraction(heavy) == Fraction(1000 - len(bad), 1000) < 1
