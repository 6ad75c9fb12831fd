import math
import random

import pytest
from sympy.combinatorics import PermutationGroup

from grouporder.errors import IndexOutOfRange, NotAMember, NotNormal, NotSolvable
from grouporder.groups import perm_group
from grouporder.slp import (
    Gen,
    Inv,
    LineReader,
    MembershipCertificate,
    Mul,
    cert_bound,
    format_norm_block,
    format_slp_block,
    format_sol_block,
    mem_cert_generate,
    mem_cert_verify,
    norm_cert_generate,
    norm_cert_verify,
    padded_beyond_bound,
    parse_norm_block,
    parse_slp_block,
    parse_sol_block,
    slp_eval,
    sol_cert_generate,
    sol_cert_verify,
)

from conftest import CORPUS, bfs, code, corpus_group, is_perm, sym, sym_group

SOLVABLE = [n for n in CORPUS if n not in ("a5", "s5", "a6", "s6", "a5xz2", "gl3_2")]


def test_slp_eval_examples():
    G = perm_group(6, ["(1 2 3 4 5 6)"])
    x = G.generators[0]
    assert slp_eval([Gen(0)], [x], G) == x
    assert slp_eval([Gen(0), Mul(0, 0), Mul(1, 1)], [x], G) == G.power(x, 4)
    with pytest.raises(IndexOutOfRange):
        slp_eval([Mul(0, 5)], [x], G)
    with pytest.raises(IndexOutOfRange):
        slp_eval([Gen(1)], [x], G)


@pytest.mark.parametrize("N,expected", [(2, 4), (64, 49), (60, 48)])
def test_cert_bound(N, expected):
    assert cert_bound(N) == expected == math.ceil((1 + math.log2(N)) ** 2)


def test_identity_certificate():
    G = perm_group(4, ["(1 2 3)", "(1 2)(3 4)"])
    cert = mem_cert_generate(G.identity, G.generators, G)
    assert tuple(cert.slp) == (Gen(0), Inv(0), Mul(0, 1))
    assert mem_cert_verify(cert, G.generators, G)


def test_a4_membership():
    G = perm_group(4, ["(1 2 3)", "(1 2)(3 4)"], order_bound=24)
    t = code(G, "(1 3)(2 4)")
    cert = mem_cert_generate(t, G.generators, G)
    assert len(cert.slp) <= cert_bound(24)
    assert slp_eval(cert.slp, G.generators, G) == t
    assert mem_cert_verify(cert, G.generators, G)
    other = MembershipCertificate(cert.slp, code(G, "(1 2 3)"))
    assert not mem_cert_verify(other, G.generators, G)
    with pytest.raises(NotAMember):
        mem_cert_generate(code(G, "(1 2)"), G.generators, G)
    assert not sym_group(G).contains(sym(G, code(G, "(1 2)")))


def test_padded_certificate_rejected():
    G = perm_group(4, ["(1 2 3)", "(1 2)(3 4)"])
    cert = mem_cert_generate(code(G, "(1 3)(2 4)"), G.generators, G)
    bad = padded_beyond_bound(cert, G)
    assert slp_eval(bad.slp, G.generators, G) == cert.target
    assert len(bad.slp) > cert_bound(G.order_bound)
    assert not mem_cert_verify(bad, G.generators, G)


def test_normality_examples():
    S3 = perm_group(3, ["(1 2)", "(1 2 3)"])
    A3 = [code(S3, "(1 2 3)")]
    cert = norm_cert_generate(A3, S3.generators, S3)
    assert len(cert.grid) == 1 and len(cert.grid[0]) == 2
    assert norm_cert_verify(cert, A3, S3.generators, S3)
    with pytest.raises(NotNormal):
        norm_cert_generate([code(S3, "(1 2)")], S3.generators, S3)
    whole = norm_cert_generate(S3.generators, S3.generators, S3)
    assert norm_cert_verify(whole, S3.generators, S3.generators, S3)


def test_solvability_examples():
    Z6 = perm_group(6, ["(1 2 3 4 5 6)"])
    x = Z6.generators[0]
    cert, m = sol_cert_generate(Z6.generators, Z6)
    assert m == 6 and cert.primes == (3, 2) and cert.chain == (Z6.power(x, 2), x)
    assert sol_cert_verify(cert, Z6.generators, Z6, 6)
    assert not sol_cert_verify(cert, Z6.generators, Z6, 12)

    S3 = perm_group(3, ["(1 2)", "(1 2 3)"])
    cert, m = sol_cert_generate(S3.generators, S3)
    assert m == 6 and cert.primes == (3, 2)
    g1, g2 = cert.chain
    assert S3.element_order(g1) == 3 and S3.element_order(g2) == 2
    assert sol_cert_verify(cert, S3.generators, S3, 6)

    A5 = perm_group(5, ["(1 2 3 4 5)", "(3 4 5)"])
    with pytest.raises(NotSolvable):
        sol_cert_generate(A5.generators, A5)


@pytest.mark.parametrize("name", CORPUS)
def test_membership_round_trip_and_bound(name):
    G = corpus_group(name)
    rng = random.Random(name)
    elems = sorted(bfs(G, G.generators))
    bound = cert_bound(G.order_bound)
    for _ in range(100):
        t = rng.choice(elems)
        cert = mem_cert_generate(t, G.generators, G)
        assert len(cert.slp) <= bound
        assert mem_cert_verify(cert, G.generators, G)


@pytest.mark.parametrize("name", SOLVABLE)
def test_solvability_soundness(name):
    G = corpus_group(name)
    order = len(bfs(G, G.generators))
    cert, m = sol_cert_generate(G.generators, G)
    assert m == order
    assert sol_cert_verify(cert, G.generators, G, m)
    # mutations: every accepted variant must still certify a divisor
    rng = random.Random(name)
    for _ in range(20):
        primes = list(cert.primes)
        if primes:
            primes[rng.randrange(len(primes))] = rng.choice([2, 3, 5, 7])
        chain = list(cert.chain)
        if chain and rng.random() < 0.5:
            chain[rng.randrange(len(chain))] = rng.choice(sorted(bfs(G, G.generators)))
        mutated = type(cert)(tuple(primes), tuple(chain), cert.member_certs, cert.normality_certs,
                             cert.power_certs, cert.cover_certs)
        mm = math.prod(primes)
        if sol_cert_verify(mutated, G.generators, G, mm):
            assert mm % order == 0


@pytest.mark.parametrize("name", [n for n in CORPUS if is_perm(corpus_group(n))])
def test_normality_matches_sympy(name):
    G = corpus_group(name)
    rng = random.Random(name)
    elems = sorted(bfs(G, G.generators))
    full = sym_group(G)
    for _ in range(15):
        H = [rng.choice(elems) for _ in range(rng.randint(1, 2))]
        expected = PermutationGroup([sym(G, h) for h in H]).is_normal(full)
        try:
            cert = norm_cert_generate(H, G.generators, G)
        except NotNormal:
            assert not expected
            continue
        assert expected and norm_cert_verify(cert, H, G.generators, G)


def test_block_round_trips():
    S4 = corpus_group("s4")
    c = mem_cert_generate(code(S4, "(1 3)(2 4)"), S4.generators, S4)
    assert parse_slp_block(LineReader.from_text("\n".join(format_slp_block(c)))) == c
    V = [code(S4, "(1 2)(3 4)"), code(S4, "(1 3)(2 4)")]
    n = norm_cert_generate(V, S4.generators, S4)
    assert parse_norm_block(LineReader.from_text("\n".join(format_norm_block(n)))) == n
    s, _ = sol_cert_generate(S4.generators, S4)
    assert parse_sol_block(LineReader.from_text("\n".join(format_sol_block(s)))) == s
