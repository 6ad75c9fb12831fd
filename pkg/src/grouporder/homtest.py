"""Homomorphism-test isomorphism check against an enumerable simple reference group.

The reference group S comes with fixed generators sigma_1..sigma_k and a
constructive-membership oracle: for a seed lambda and an element x of S it
returns a straight-line program over the sigmas reaching x, unless the pair
(lambda, x) falls in the oracle's failure set.  Substituting Merlin's images
g_i for sigma_i turns such a program into the map g_lambda, and IsoCheck tests
that the induced map S -> K/L is an isomorphism.
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotInValidSet, PreconditionViolated, UnsupportedFactor, UnsupportedName
from .groups import GroupHandle, perm_group
from .names import Alternating, StandardName, concrete_generators
from .slp import (
    Gen,
    Inv,
    Mul,
    StraightLineProgram,
    mem_cert_check,
    mem_cert_generate,
    slp_eval,
)
from .subgroups import DEFAULT_CAP, Quotient, closure, is_normalized_by, solvable_set

DEFAULT_SEED_SPACE = 2**18
DEFAULT_FAILURE_FRACTION = 1e-7
GOOD_VALID_FRACTION = 1 - 1e-5

# A5 reference generators: an involution and sigma_2 = (1 2 3)
A5_REFERENCE = ("(1 4)(2 5)", "(1 2 3)")


@dataclass(frozen=True)
class HomTestParams:
    outer_iterations: int = 12
    maj_trials: int = 50
    hom_threshold: Fraction = Fraction(9, 10)

    @property
    def overridden(self) -> bool:
        return self != HomTestParams()


class ConstructiveMembershipOracle:
    """Shortest-word SLP tables for an enumerable reference group.

    The seed picks an ordering of the letters sigma_i^{+-1}, which changes
    how breadth-first search breaks ties and hence which program is returned.
    A fixed fraction of (seed, element) pairs, chosen with ``failure_seed``,
    is declared invalid.
    """

    def __init__(self, reference: GroupHandle, seed_space: int = DEFAULT_SEED_SPACE,
                 failure_fraction: float = DEFAULT_FAILURE_FRACTION, failure_seed: int = 0):
        self.reference = reference
        self.sigma = tuple(reference.generators)
        self.elements = tuple(sorted(closure(reference, self.sigma)))
        self.index = {x: i for i, x in enumerate(self.elements)}
        self.seed_space = seed_space
        self.failure_fraction = failure_fraction
        total = seed_space * len(self.elements)
        n_fail = round(failure_fraction * total)
        rng = random.Random(failure_seed)
        self.failures = frozenset(rng.sample(range(total), n_fail)) if n_fail else frozenset()
        letters = [(i, True) for i in range(len(self.sigma))] + [(i, False) for i in range(len(self.sigma))]
        self.orderings = list(itertools.permutations(letters))
        self._tables: dict = {}

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_valid(self, x: bytes, lam: int) -> bool:
        return lam * len(self.elements) + self.index[x] not in self.failures

    def valid_count(self, lam: int) -> int:
        n = len(self.elements)
        return n - sum(1 for f in self.failures if f // n == lam)

    def _table(self, k: int) -> dict:
        if k not in self._tables:
            S = self.reference
            words = {S.identity: ()}
            frontier = [S.identity]
            inv = [S.inv(s) for s in self.sigma]
            while frontier:
                nxt = []
                for x in frontier:
                    for i, pos in self.orderings[k]:
                        y = S.mul(x, self.sigma[i] if pos else inv[i])
                        if y not in words:
                            words[y] = words[x] + ((i, pos),)
                            nxt.append(y)
                frontier = nxt
            self._tables[k] = {x: _word_to_slp(w) for x, w in words.items()}
        return self._tables[k]

    def lookup(self, x: bytes, lam: int) -> StraightLineProgram:
        if x not in self.index:
            raise NotInValidSet("element is not in the reference group")
        if not 0 <= lam < self.seed_space or not self.is_valid(x, lam):
            raise NotInValidSet("element is outside Valid(lambda)")
        return self._table(lam % len(self.orderings))[x]

    def sample(self, rng: random.Random) -> bytes:
        return self.elements[rng.randrange(len(self.elements))]


def _word_to_slp(word) -> StraightLineProgram:
    ins: list = []
    slot: dict = {}

    def letter(i, pos):
        if (i, True) not in slot:
            slot[(i, True)] = len(ins)
            ins.append(Gen(i))
        if pos:
            return slot[(i, True)]
        if (i, False) not in slot:
            slot[(i, False)] = len(ins)
            ins.append(Inv(slot[(i, True)]))
        return slot[(i, False)]

    acc = None
    for i, pos in word:
        j = letter(i, pos)
        if acc is None:
            acc = j
        else:
            ins.append(Mul(acc, j))
            acc = len(ins) - 1
    if acc is not None and acc != len(ins) - 1:
        # result sits earlier in the program; two inversions bring it to the end
        ins.append(Inv(acc))
        ins.append(Inv(len(ins) - 1))
    return StraightLineProgram(tuple(ins))


def reference_group(z: StandardName) -> GroupHandle:
    """Permutation realization of ``z`` whose generators serve as sigma_1..sigma_k."""
    if z == Alternating(5):
        return perm_group(5, list(A5_REFERENCE))
    try:
        degree, gens = concrete_generators(z)
    except UnsupportedName as exc:
        raise UnsupportedFactor(f"no enumerable reference for {z}") from exc
    return perm_group(degree, list(gens))


def reference_oracle(z: StandardName, **kw) -> ConstructiveMembershipOracle:
    return ConstructiveMembershipOracle(reference_group(z), **kw)


# -- the substitution maps


def g_lambda(x: bytes, lam: int, images, oracle: ConstructiveMembershipOracle, G: GroupHandle) -> bytes:
    return slp_eval(oracle.lookup(x, lam), list(images), G)


def f_lambda(x: bytes, lam: int, images, oracle: ConstructiveMembershipOracle, G: GroupHandle) -> bytes:
    """Coset token of f_lambda(x): a representative code, identity when x is not valid."""
    if not oracle.is_valid(x, lam):
        return G.identity
    return g_lambda(x, lam, images, oracle, G)


def tokens_equal(G: GroupHandle, a: bytes, b: bytes, in_L) -> bool:
    return in_L(G.invmul(a, b))


def maj(x: bytes, lam: int, images, oracle: ConstructiveMembershipOracle, G: GroupHandle, in_L,
        rng: random.Random, params: HomTestParams = HomTestParams()) -> bytes:
    """Most frequent coset among g(x r) g(r^-1); ties go to the least representative."""
    S = oracle.reference
    classes: list = []  # [representative, count]
    for _ in range(params.maj_trials):
        r = oracle.sample(rng)
        h = G.mul(f_lambda(S.mul(x, r), lam, images, oracle, G), f_lambda(S.inv(r), lam, images, oracle, G))
        for cls in classes:
            if tokens_equal(G, cls[0], h, in_L):
                cls[1] += 1
                cls[0] = min(cls[0], h)
                break
        else:
            classes.append([h, 1])
    best = max(c for _, c in classes)
    return min(rep for rep, c in classes if c == best)


# -- witness and check


@dataclass(frozen=True)
class IsoWitness:
    """Images g_1..g_k with ``membership_certs`` (g_i in K) and
    ``generation_certs`` (each K-generator in <g_1..g_k, L>)."""

    images: tuple
    membership_certs: tuple
    generation_certs: tuple


@dataclass
class IsoCheckResult:
    accepted: bool
    lam: int
    steps: list = field(default_factory=list)
    reason: str = "ok"


def find_isomorphism_images(G: GroupHandle, K_gens, L_gens, oracle: ConstructiveMembershipOracle,
                            cap: int = DEFAULT_CAP):
    """Images g_i in K with sigma_i -> g_i L extending to an isomorphism S -> K/L, or None."""
    L = closure(G, L_gens, cap)
    K = closure(G, tuple(L_gens) + tuple(K_gens), cap)
    Q = Quotient(G, K, L)
    S = oracle.reference
    if Q.order != oracle.order:
        return None
    sig = oracle.sigma
    s_ord = [S.element_order(s) for s in sig]
    q_ord = {q: Q.elem_order(q) for q in range(Q.order)}
    cands = [[q for q in range(Q.order) if q_ord[q] == o] for o in s_ord]

    def extends(assign):
        phi = {S.identity: Q.identity}
        frontier = [S.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s, q in zip(sig, assign):
                    y, v = S.mul(x, s), Q.mul(phi[x], q)
                    if y in phi:
                        if phi[y] != v:
                            return False
                    else:
                        phi[y] = v
                        nxt.append(y)
            frontier = nxt
        return len(set(phi.values())) == Q.order

    for assign in itertools.product(*cands):
        if extends(assign):
            return tuple(Q.reps[q] for q in assign)
    return None


def iso_witness_generate(G: GroupHandle, K_gens, L_gens, oracle: ConstructiveMembershipOracle, images=None,
                         cap: int = DEFAULT_CAP) -> IsoWitness:
    K_gens, L_gens = tuple(K_gens), tuple(L_gens)
    if images is None:
        images = find_isomorphism_images(G, K_gens, L_gens, oracle, cap)
        if images is None:
            raise UnsupportedFactor("K/L is not isomorphic to the reference group")
    member = tuple(mem_cert_generate(g, K_gens + L_gens, G, cap) for g in images)
    gen = tuple(mem_cert_generate(k, tuple(images) + L_gens, G, cap) for k in K_gens)
    return IsoWitness(tuple(images), member, gen)


def iso_check(G: GroupHandle, witness: IsoWitness, L_gens, K_gens, oracle: ConstructiveMembershipOracle,
              params: HomTestParams = HomTestParams(), seed: int = 0, in_L=None,
              cap: int = DEFAULT_CAP) -> IsoCheckResult:
    """Decide whether K/L is isomorphic to the reference group, with K = <K_gens, L>.

    ``K_gens`` plays the role of (beta, gamma).  ``in_L`` decides membership
    in L; by default it is the enumeration stand-in for the solvable-group
    membership oracle.
    """
    K_gens, L_gens = tuple(K_gens), tuple(L_gens)
    L = closure(G, L_gens, cap)
    if not solvable_set(G, L_gens or (G.identity,), cap):
        raise PreconditionViolated("L is not solvable")
    if not is_normalized_by(G, L, K_gens + L_gens):
        raise PreconditionViolated("L is not normal in K")
    if in_L is None:
        in_L = L.__contains__
    rng = random.Random(seed)
    lam = rng.randrange(oracle.seed_space)
    res = IsoCheckResult(False, lam)
    images = tuple(witness.images)
    if len(images) != len(oracle.sigma):
        res.reason = "wrong number of images"
        return res
    S = oracle.reference
    for it in range(params.outer_iterations):
        r1, r2 = oracle.sample(rng), oracle.sample(rng)
        a = f_lambda(S.mul(r1, r2), lam, images, oracle, G)
        b = f_lambda(r2, lam, images, oracle, G)
        c = f_lambda(r1, lam, images, oracle, G)
        val = G.mul(G.mul(a, G.inv(b)), G.inv(c))
        ok = in_L(val)
        res.steps.append(("hom", it, ok))
        if not ok:
            res.reason = f"homomorphism test failed at iteration {it}"
            return res
    if all(in_L(k) for k in K_gens):
        res.reason = "K equals L"
        return res
    over_K = K_gens + L_gens
    if len(witness.membership_certs) != len(images) or len(witness.generation_certs) != len(K_gens):
        res.reason = "certificate lists have the wrong length"
        return res
    for g, c in zip(images, witness.membership_certs):
        if bytes(c.target) != bytes(g) or not mem_cert_check(c, over_K, G)[0]:
            res.reason = "image membership certificate rejected"
            return res
    over_images = images + L_gens
    for k, c in zip(K_gens, witness.generation_certs):
        if bytes(c.target) != bytes(k) or not mem_cert_check(c, over_images, G)[0]:
            res.reason = "generation certificate rejected"
            return res
    for i, (s, g) in enumerate(zip(oracle.sigma, images)):
        tok = maj(s, lam, images, oracle, G, in_L, rng, params)
        ok = tokens_equal(G, tok, g, in_L)
        res.steps.append(("maj", i, ok))
        if not ok:
            res.reason = f"Maj(sigma_{i + 1}) differs from the claimed image"
            return res
    res.accepted = True
    return res


# -- the homomorphism-test statistic


@dataclass(frozen=True)
class HomStatistic:
    value: Fraction
    exact: bool


def hom_test_statistic(f: dict, S: GroupHandle, T: GroupHandle | None = None, samples: int = 100_000,
                       seed: int = 0, exact_limit: int = 10_000) -> HomStatistic:
    """Probability over (r1, r2) in S^2 that f(r1 r2) = f(r1) f(r2).

    Exact by enumerating pairs when |S| <= ``exact_limit``; sampled otherwise.
    """
    T = S if T is None else T
    elems = sorted(f)
    if len(elems) <= exact_limit:
        good = sum(1 for a in elems for b in elems if f[S.mul(a, b)] == T.mul(f[a], f[b]))
        return HomStatistic(Fraction(good, len(elems) ** 2), True)
    rng = random.Random(seed)
    good = 0
    for _ in range(samples):
        a, b = rng.choice(elems), rng.choice(elems)
        good += f[S.mul(a, b)] == T.mul(f[a], f[b])
    return HomStatistic(Fraction(good, samples), False)


def all_homomorphisms(S: GroupHandle, T: GroupHandle):
    """Every homomorphism S -> T as a dict, by extending generator images (tiny S and T only)."""
    s_elems = sorted(closure(S, S.generators))
    t_elems = sorted(closure(T, T.generators))
    gens = list(S.generators)
    out = []
    for assign in itertools.product(t_elems, repeat=len(gens)):
        phi = {S.identity: T.identity}
        frontier, ok = [S.identity], True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for s, t in zip(gens, assign):
                    y, v = S.mul(x, s), T.mul(phi[x], t)
                    if y in phi:
                        if phi[y] != v:
                            ok = False
                            break
                    else:
                        phi[y] = v
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if ok and len(phi) == len(s_elems):
            out.append(phi)
    return out


def nearest_homomorphism_distance(f: dict, S: GroupHandle, T: GroupHandle | None = None) -> Fraction:
    """Least fraction of S on which f disagrees with some homomorphism S -> T."""
    T = S if T is None else T
    best = len(f)
    for phi in all_homomorphisms(S, T):
        best = min(best, sum(1 for x in f if f[x] != phi[x]))
    return Fraction(best, len(f))


# -- Good-set counting


def good_fraction(oracle: ConstructiveMembershipOracle, threshold: float = GOOD_VALID_FRACTION) -> Fraction:
    """Exact fraction of seeds whose Valid set covers at least ``threshold`` of S."""
    n = oracle.order
    fails = Counter(f // n for f in oracle.failures)
    good = 0
    for lam in range(oracle.seed_space):
        if (n - fails.get(lam, 0)) >= threshold * n:
            good += 1
    return Fraction(good, oracle.seed_space)
