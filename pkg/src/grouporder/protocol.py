"""The order-verification protocol: nice decompositions, both halves, and reductions.

Lower half: Merlin proves m | |G| by exhibiting a subgroup of each prime-power
order.  Upper half: Merlin proves |G| | m through the permutation kernel,
a nice decomposition of it, and certificates (i)-(vii); Arthur runs checks
(1)-(10).  Steps that stand in for quantum subroutines are brute force here
and marked ``trusted`` in the transcript.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

from .errors import GroupError, NotAMember, PreconditionViolated, UnsupportedFactor, UnsupportedName
from .field import factorize, is_prime
from .groups import GroupHandle, direct_product
from .homtest import (
    DEFAULT_FAILURE_FRACTION,
    DEFAULT_SEED_SPACE,
    HomTestParams,
    IsoWitness,
    iso_check,
    iso_witness_generate,
    reference_oracle,
)
from .names import (
    FactorChainWitness,
    IsoPresentationWitness,
    StandardName,
    composition_chain,
    factors_multiset_check,
    factors_multiset_generate,
    identify_quotient,
    iso_presentation_generate,
    iso_via_presentation_check,
    name_order,
)
from .oracles import babai_beals_filtration, is_solvable, solvable_order
from .slp import (
    MembershipCertificate,
    NormalityCertificate,
    SolvabilityCertificate,
    mem_cert_check,
    mem_cert_generate,
    norm_cert_check,
    norm_cert_generate,
    sol_cert_check,
    sol_cert_generate,
)
from .subgroups import (
    DEFAULT_CAP,
    closure,
    is_normalized_by,
    maximal_normal_over,
    normal_subgroups,
    quotient_solvable,
    small_generators,
    solvable_set,
)

# -- transcripts


@dataclass(frozen=True)
class CheckRecord:
    name: str
    trusted: bool
    passed: bool
    detail: str = ""


@dataclass
class ProtocolTranscript:
    seed: int
    records: list = field(default_factory=list)
    verdict: bool | None = None

    def add(self, name: str, passed: bool, trusted: bool = False, detail: str = "") -> bool:
        self.records.append(CheckRecord(name, trusted, bool(passed), detail))
        return bool(passed)

    def extend(self, other: "ProtocolTranscript", prefix: str = "") -> None:
        for r in other.records:
            self.records.append(CheckRecord(prefix + r.name, r.trusted, r.passed, r.detail))

    def finish(self, verdict: bool) -> bool:
        self.verdict = bool(verdict)
        return self.verdict

    @property
    def failed(self):
        return next((r for r in self.records if not r.passed), None)

    def lines(self) -> list:
        out = [f"{i} {r.name} {'trusted' if r.trusted else 'certified'} {'pass' if r.passed else 'fail'}"
               for i, r in enumerate(self.records, 1)]
        out.append(f"verdict {'accept' if self.verdict else 'reject'}")
        return out

    def text(self) -> str:
        return "\n".join(self.lines()) + "\n"


def witness_size_cap(G: GroupHandle) -> int:
    return 4 * max(1, math.ceil(math.log2(max(2, G.order_bound))))


# -- nice decompositions


@dataclass(frozen=True)
class NiceDecomposition:
    H0_gens: tuple
    pairs: tuple
    P_gens: tuple

    @property
    def s(self) -> int:
        return len(self.pairs)

    def level_gens(self, i: int) -> tuple:
        """Generators of H_i = <H_0, beta_1..beta_i, gamma_1..gamma_i>."""
        out = tuple(self.H0_gens)
        for b, c in self.pairs[:i]:
            out += (b, c)
        return out

    def chain(self, G: GroupHandle, cap: int = DEFAULT_CAP) -> list:
        return [closure(G, self.level_gens(i), cap) for i in range(self.s + 1)]


def _two_generators(G: GroupHandle, T: frozenset, base: frozenset, rng=None, cap=DEFAULT_CAP):
    """A pair (a, b) with <base, a, b> = T; deterministic unless ``rng`` is given."""
    bg = small_generators(G, base)
    pool = sorted(T - base)
    if rng is not None:
        while True:
            a, b = rng.choice(pool), rng.choice(pool)
            if len(closure(G, bg + (a, b), cap)) == len(T):
                return a, b
    ranked = sorted(pool, key=lambda g: (-G.element_order(g), g))
    for a in ranked:
        for b in ranked:
            if len(closure(G, bg + (a, b), cap)) == len(T):
                return a, b
    raise ValueError("factor is not 2-generated over the base")


def nice_decomposition(G_gens, G: GroupHandle, cap: int = DEFAULT_CAP, rng=None) -> NiceDecomposition:
    """Decomposition of Pker(G): H_0 = Rad, one generating pair per simple factor of Soc*/Rad."""
    f = babai_beals_filtration(G_gens, G, cap)
    pairs = tuple(_two_generators(G, T, f.rad, rng, cap) for T in f.factors)
    d = NiceDecomposition(tuple(f.rad_gens), pairs, tuple(f.pker_gens))
    ok, why = check_nice(d, G, cap)
    assert ok, why
    assert all(a == b for a, b, _ in (divisibility_of_factor(d, i, G, cap) for i in range(1, d.s + 1))), "(star) fails"
    return d


def check_nice(d: NiceDecomposition, G: GroupHandle, cap: int = DEFAULT_CAP) -> tuple:
    """(C1)-(C3) by brute force; returns ``(ok, reason)``."""
    P = closure(G, d.P_gens, cap)
    chain = d.chain(G, cap)
    H0 = chain[0]
    if not solvable_set(G, d.H0_gens or (G.identity,), cap):
        return False, "H_0 is not solvable"
    for i, (lo, hi) in enumerate(zip(chain, chain[1:]), 1):
        if not lo <= hi or not is_normalized_by(G, lo, d.level_gens(i)):
            return False, f"H_{i - 1} is not normal in H_{i}"
    if not chain[-1] <= P or not is_normalized_by(G, chain[-1], d.P_gens):
        return False, "H_s is not normal in P"
    if not quotient_solvable(G, d.P_gens or (G.identity,), chain[-1], cap):
        return False, "P/H_s is not solvable"
    for i, (b, c) in enumerate(d.pairs, 1):
        gens = tuple(d.H0_gens) + (b, c)
        X = closure(G, gens, cap)
        if not is_normalized_by(G, H0, gens) or X == H0:
            return False, f"<H_0, beta_{i}, gamma_{i}>/H_0 is not a nontrivial quotient"
        if maximal_normal_over(G, small_generators(G, X), H0, cap) != [H0]:
            return False, f"<H_0, beta_{i}, gamma_{i}>/H_0 is not simple"
    return True, "ok"


def divisibility_of_factor(d: NiceDecomposition, i: int, G: GroupHandle, cap: int = DEFAULT_CAP) -> tuple:
    """``(|H_i/H_{i-1}|, |<H_0, beta_i, gamma_i>/H_0|, divides)`` for 1 <= i <= s."""
    lo = len(closure(G, d.level_gens(i - 1), cap))
    hi = len(closure(G, d.level_gens(i), cap))
    h0 = len(closure(G, d.H0_gens, cap))
    x = len(closure(G, tuple(d.H0_gens) + tuple(d.pairs[i - 1]), cap))
    a, b = hi // lo, x // h0
    return a, b, b % a == 0


def perturbed_decomposition(G_gens, G: GroupHandle, rng: random.Random, cap: int = DEFAULT_CAP,
                            max_tries: int = 200) -> NiceDecomposition:
    """A random decomposition of Pker(G) satisfying (C1)-(C3), not necessarily (star).

    H_0 is a random solvable normal subgroup of Pker and the pairs are random
    elements, so a level may span several factors at once.
    """
    f = babai_beals_filtration(G_gens, G, cap)
    P_gens = tuple(f.pker_gens)
    P = f.pker
    solv = [N for N in normal_subgroups(G, P_gens or (G.identity,), cap)
            if solvable_set(G, small_generators(G, N) or (G.identity,), cap)]
    pool = sorted(P)
    for _ in range(max_tries):
        H0 = rng.choice(solv)
        h0 = small_generators(G, H0)
        pairs: list = []
        cur = H0
        for _ in range(12):
            if rng.random() < 0.15:
                break
            b, c = rng.choice(pool), rng.choice(pool)
            gens = h0 + (b, c)
            X = closure(G, gens, cap)
            nxt_gens = tuple(small_generators(G, cur)) + (b, c)
            nxt = closure(G, nxt_gens, cap)
            if X == H0 or nxt == cur or not is_normalized_by(G, H0, gens):
                continue
            if not is_normalized_by(G, cur, nxt_gens):
                continue
            if maximal_normal_over(G, small_generators(G, X), H0, cap) != [H0]:
                continue
            pairs.append((b, c))
            cur = nxt
        d = NiceDecomposition(h0, tuple(pairs), P_gens)
        if check_nice(d, G, cap)[0]:
            return d
    raise RuntimeError("no perturbed decomposition found")


# -- lower half: m divides |G|


@dataclass(frozen=True)
class PrimePowerClaim:
    p: int
    t: int
    gens: tuple
    certs: tuple


@dataclass(frozen=True)
class OrderWitnessDivides:
    factors: tuple = ()


def p_subgroup(G: GroupHandle, G_gens, p: int, t: int, cap: int = DEFAULT_CAP) -> frozenset:
    """A subgroup of order p^t, grown one factor of p at a time inside normalizers."""
    whole = sorted(closure(G, G_gens, cap))
    P = frozenset([G.identity])
    target = p**t
    while len(P) < target:
        pg = small_generators(G, P)
        for x in whole:
            if x in P or G.power(x, p) not in P:
                continue
            if all(G.conj(x, h) in P for h in pg):
                P = closure(G, pg + (x,), cap)
                break
        else:
            raise NotAMember(f"no subgroup of order {target}")
    return P


def witness_divides_generate(G_gens, G: GroupHandle, m: int, cap: int = DEFAULT_CAP) -> OrderWitnessDivides:
    G_gens = tuple(G_gens)
    n = len(closure(G, G_gens, cap))
    if m < 1 or n % m:
        raise PreconditionViolated(f"{m} does not divide the group order")
    out = []
    for p, t in (factorize(m) if m > 1 else []):
        P = p_subgroup(G, G_gens, p, t, cap)
        gens = small_generators(G, P)
        out.append(PrimePowerClaim(p, t, gens, tuple(mem_cert_generate(g, G_gens, G, cap) for g in gens)))
    return OrderWitnessDivides(tuple(out))


def witness_divides_verify(G_gens, G: GroupHandle, m: int, w: OrderWitnessDivides, cap: int = DEFAULT_CAP,
                           transcript: ProtocolTranscript | None = None) -> bool:
    tr = transcript if transcript is not None else ProtocolTranscript(0)
    G_gens = tuple(G_gens)
    primes = [c.p for c in w.factors]
    ok = (isinstance(m, int) and m >= 1 and len(set(primes)) == len(primes)
          and all(is_prime(c.p) and c.t >= 1 for c in w.factors)
          and math.prod(c.p**c.t for c in w.factors) == m)
    if not tr.add("lower.i.factorization", ok):
        return False
    for c in w.factors:
        if len(c.certs) != len(c.gens) or len(c.gens) > witness_size_cap(G):
            return tr.add("lower.ii.membership", False, detail="certificate list mismatch")
        for g, cert in zip(c.gens, c.certs):
            if bytes(cert.target) != bytes(g):
                return tr.add("lower.ii.membership", False, detail="wrong target")
            good, why = mem_cert_check(cert, G_gens, G)
            if not good:
                return tr.add("lower.ii.membership", False, detail=why)
    tr.add("lower.ii.membership", True)
    for c in w.factors:
        try:
            good = is_solvable(c.gens, G, cap) and solvable_order(c.gens, G, cap) == c.p**c.t
        except GroupError:
            good = False
        if not good:
            return tr.add("lower.iii.prime-power-orders", False, True, f"|G_i| != {c.p}^{c.t}")
    return tr.add("lower.iii.prime-power-orders", True, True)


# -- upper half: |G| divides m


HOMTEST = "homtest"
PRESENTATION = "presentation"


@dataclass(frozen=True)
class FactorClaim:
    name: StandardName
    mode: str
    witness: object


@dataclass(frozen=True)
class OrderWitnessDividedBy:
    m1: int
    h: tuple
    k: tuple
    beta: tuple
    gamma: tuple
    member_certs: tuple
    norm_K: NormalityCertificate
    norm_Hs: NormalityCertificate
    norm_links: tuple
    sol: SolvabilityCertificate
    multiset: tuple
    factor_chain: FactorChainWitness
    factors: tuple

    @property
    def s(self) -> int:
        return len(self.beta)

    def level_gens(self, i: int) -> tuple:
        out = tuple(self.h)
        for b, c in zip(self.beta[:i], self.gamma[:i]):
            out += (b, c)
        return out


def _oracle_for(z: StandardName, params: dict):
    key = ("oracle", z, params.get("seed_space", DEFAULT_SEED_SPACE), params.get("failure_fraction", DEFAULT_FAILURE_FRACTION))
    hit = _ORACLES.get(key)
    if hit is None:
        hit = reference_oracle(z, seed_space=key[2], failure_fraction=key[3])
        _ORACLES[key] = hit
    return hit


_ORACLES: dict = {}


def witness_ub_generate(G_gens, G: GroupHandle, cap: int = DEFAULT_CAP, route: str = PRESENTATION,
                        params: dict | None = None, decomposition: NiceDecomposition | None = None):
    """Honest upper-half witness; returns ``(witness, m)`` with m = |G|.

    ``route`` selects how the simple factors z_i are certified: by
    presentation or by the homomorphism test.  Ree names always use the
    homomorphism test.
    """
    params = params or {}
    G_gens = tuple(G_gens)
    d = decomposition or nice_decomposition(G_gens, G, cap)
    k = tuple(d.P_gens)
    h = tuple(d.H0_gens)
    beta = tuple(b for b, _ in d.pairs)
    gamma = tuple(c for _, c in d.pairs)
    member = tuple(mem_cert_generate(g, k, G, cap) for g in h + beta + gamma)
    norm_K = norm_cert_generate(k, G_gens, G, cap)
    Hs = d.level_gens(d.s)
    norm_Hs = norm_cert_generate(Hs, k, G, cap)
    links = tuple(norm_cert_generate(d.level_gens(i - 1), d.level_gens(i), G, cap) for i in range(1, d.s + 1))
    sol, m1 = sol_cert_generate(k, G, cap, base=Hs)
    multiset, chain_w = factors_multiset_generate(G, G_gens, base=k, cap=cap)
    factors = []
    H0 = closure(G, h, cap)
    for b, c in d.pairs:
        z = identify_quotient(G, (b, c), H0, cap)
        mode = HOMTEST if (route == HOMTEST or z.family == "Ree") else PRESENTATION
        if mode == HOMTEST:
            w = iso_witness_generate(G, (b, c), h, _oracle_for(z, params), cap=cap)
        else:
            w = iso_presentation_generate(G, (b, c), z, h, cap)
        factors.append(FactorClaim(z, mode, w))
    wit = OrderWitnessDividedBy(m1, h, k, beta, gamma, member, norm_K, norm_Hs, links, sol,
                                tuple(multiset), chain_w, tuple(factors))
    m = len(H0) * math.prod(name_order(f.name) for f in factors) * m1 * (len(closure(G, G_gens, cap)) // len(closure(G, k, cap)))
    return wit, m


@dataclass
class VerifierView:
    """What Arthur computes locally before looking at the witness."""

    pker: frozenset
    pker_gens: tuple
    m2: int
    top_factors: list


def verifier_view(G_gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> VerifierView:
    G_gens = tuple(G_gens)
    key = ("verifier-view", frozenset(G_gens))
    hit = G.cache.get(key)
    if hit is None:
        f = babai_beals_filtration(G_gens, G, cap)
        series = composition_chain(G, G_gens, f.pker_gens, cap)
        names = sorted(identify_quotient(G, small_generators(G, hi), lo, cap) for lo, hi in zip(series, series[1:]))
        hit = VerifierView(f.pker, tuple(f.pker_gens), f.order // len(f.pker), names)
        G.cache[key] = hit
    return hit


def witness_ub_verify(G_gens, G: GroupHandle, m: int, w: OrderWitnessDividedBy, seed: int = 0,
                      cap: int = DEFAULT_CAP, params: dict | None = None,
                      transcript: ProtocolTranscript | None = None) -> bool:
    tr = transcript if transcript is not None else ProtocolTranscript(seed)
    try:
        return _ub_verify(tuple(G_gens), G, m, w, seed, cap, params or {}, tr)
    except (GroupError, ValueError, TypeError, IndexError, AttributeError) as exc:
        return tr.add("upper.malformed", False, detail=str(exc))


def _ub_verify(G_gens, G, m, w, seed, cap, params, tr) -> bool:
    limit = witness_size_cap(G)
    s = len(w.beta)
    shape = (isinstance(m, int) and m >= 1 and isinstance(w.m1, int) and w.m1 >= 1
             and len(w.gamma) == s and len(w.factors) == s and len(w.norm_links) == s
             and max(len(w.h), len(w.k), s) <= limit
             and len(w.member_certs) == len(w.h) + 2 * s)
    if not tr.add("upper.0.structure", shape):
        return False
    view = verifier_view(G_gens, G, cap)
    H0 = closure(G, w.h, cap)
    ok = (H0 <= view.pker and is_normalized_by(G, H0, view.pker_gens)
          and solvable_set(G, tuple(w.h) or (G.identity,), cap))
    if not tr.add("upper.1.h0-solvable-normal-in-pker", ok, True):
        return False
    if not tr.add("upper.2.k-in-pker", all(G.check(g) in view.pker for g in w.k), True):
        return False
    if not tr.add("upper.3.multiset-matches", sorted(w.multiset) == view.top_factors, True):
        return False
    for g, c in zip(tuple(w.h) + tuple(w.beta) + tuple(w.gamma), w.member_certs):
        if bytes(c.target) != bytes(g):
            return tr.add("upper.4.membership", False, detail="wrong target")
        good, why = mem_cert_check(c, w.k, G)
        if not good:
            return tr.add("upper.4.membership", False, detail=why)
    tr.add("upper.4.membership", True)
    Hs = w.level_gens(s)
    checks = [norm_cert_check(w.norm_K, w.k, G_gens, G), norm_cert_check(w.norm_Hs, Hs, w.k, G)]
    checks += [norm_cert_check(w.norm_links[i - 1], w.level_gens(i - 1), w.level_gens(i), G) for i in range(1, s + 1)]
    bad = next((why for good, why in checks if not good), None)
    if not tr.add("upper.5.normality", bad is None, detail=bad or ""):
        return False
    good, why = sol_cert_check(w.sol, w.k, G, w.m1, base=Hs)
    if not tr.add("upper.6.solvability", good, detail=why):
        return False
    res = factors_multiset_check(G, G_gens, w.multiset, w.factor_chain, base=w.k, cap=cap)
    if not tr.add("upper.7.factor-multiset", res.ok, res.trusted, res.reason):
        return False
    pres_trusted = False
    for i, fc in enumerate(w.factors):
        if fc.mode != PRESENTATION:
            continue
        if fc.name.family == "Ree" or not isinstance(fc.witness, IsoPresentationWitness):
            return tr.add("upper.8.presentation-iso", False, detail=f"factor {i}: wrong mode")
        res = iso_via_presentation_check(G, (w.beta[i], w.gamma[i]), fc.name, fc.witness, w.h, cap=cap)
        pres_trusted = pres_trusted or res.trusted
        if not res.ok:
            return tr.add("upper.8.presentation-iso", False, res.trusted, f"factor {i}: {res.reason}")
    tr.add("upper.8.presentation-iso", True, pres_trusted)
    hp = HomTestParams(**{k: v for k, v in params.items() if k in ("outer_iterations", "maj_trials", "hom_threshold")})
    rng = random.Random(seed)
    used_homtest = False
    for i, fc in enumerate(w.factors):
        if fc.mode == PRESENTATION:
            continue
        used_homtest = True
        if fc.mode != HOMTEST or not isinstance(fc.witness, IsoWitness):
            return tr.add("upper.9.iso-check", False, True, f"factor {i}: unknown mode")
        try:
            oracle = _oracle_for(fc.name, params)
            r = iso_check(G, fc.witness, w.h, (w.beta[i], w.gamma[i]), oracle, hp, rng.getrandbits(64), cap=cap)
        except (UnsupportedFactor, UnsupportedName, PreconditionViolated) as exc:
            return tr.add("upper.9.iso-check", False, True, f"factor {i}: {exc}")
        if not r.accepted:
            return tr.add("upper.9.iso-check", False, True, f"factor {i}: {r.reason}")
    tr.add("upper.9.iso-check", True, used_homtest)
    h0 = solvable_order(w.h, G, cap) if w.h else 1
    product = h0 * math.prod(name_order(f.name) for f in w.factors) * w.m1 * view.m2
    return tr.add("upper.10.product-divides-m", m % product == 0, True, f"product {product}")


# -- the full protocol


def order_verify(G_gens, G: GroupHandle, m: int, w_lower: OrderWitnessDivides, w_upper: OrderWitnessDividedBy,
                 seed: int = 0, cap: int = DEFAULT_CAP, params: dict | None = None) -> tuple:
    """``(accepted, transcript)``: accept iff both halves verify."""
    tr = ProtocolTranscript(seed)
    ok = witness_divides_verify(G_gens, G, m, w_lower, cap, tr)
    if ok:
        ok = witness_ub_verify(G_gens, G, m, w_upper, seed, cap, params, tr)
    return tr.finish(ok), tr


@dataclass(frozen=True)
class OrderClaim:
    m: int
    lower: OrderWitnessDivides
    upper: OrderWitnessDividedBy


def order_prove(G_gens, G: GroupHandle, cap: int = DEFAULT_CAP, route: str = PRESENTATION,
                params: dict | None = None) -> OrderClaim:
    upper, m = witness_ub_generate(G_gens, G, cap, route, params)
    return OrderClaim(m, witness_divides_generate(G_gens, G, m, cap), upper)


def claim_verify(G_gens, G, claim: OrderClaim, seed=0, cap=DEFAULT_CAP, params=None) -> tuple:
    return order_verify(G_gens, G, claim.m, claim.lower, claim.upper, seed, cap, params)


# -- reductions


@dataclass(frozen=True)
class NonMembershipWitness:
    without_h: OrderClaim
    with_h: OrderClaim


def non_membership_generate(G_gens, h: bytes, G: GroupHandle, cap: int = DEFAULT_CAP) -> NonMembershipWitness:
    G_gens = tuple(G_gens)
    return NonMembershipWitness(order_prove(G_gens, G, cap), order_prove(G_gens + (h,), G, cap))


def non_membership_verify(G_gens, h: bytes, G: GroupHandle, w: NonMembershipWitness, seed: int = 0,
                          cap: int = DEFAULT_CAP) -> tuple:
    """Accept iff both orders verify and differ, which happens exactly when h is not in G."""
    G_gens = tuple(G_gens)
    tr = ProtocolTranscript(seed)
    a, t1 = claim_verify(G_gens, G, w.without_h, seed, cap)
    tr.extend(t1, "G:")
    ok = a
    if ok:
        b, t2 = claim_verify(G_gens + (h,), G, w.with_h, seed + 1, cap)
        tr.extend(t2, "Gh:")
        ok = b and tr.add("orders-differ", w.without_h.m != w.with_h.m)
    return tr.finish(ok), tr


@dataclass(frozen=True)
class GroupIsoWitness:
    images: tuple
    image_certs: tuple
    generation_certs: tuple
    claim_G: OrderClaim
    claim_H: OrderClaim
    claim_K: OrderClaim


def _graph_handle(G: GroupHandle, G_gens, H: GroupHandle, images):
    return direct_product(G, H, list(zip(G_gens, images)))


def group_iso_generate(G_gens, G: GroupHandle, H_gens, H: GroupHandle, images, cap: int = DEFAULT_CAP) -> GroupIsoWitness:
    """Honest witness given the images h'_i of the G-generators under an isomorphism."""
    G_gens, H_gens, images = tuple(G_gens), tuple(H_gens), tuple(images)
    P = _graph_handle(G, G_gens, H, images)
    return GroupIsoWitness(
        images,
        tuple(mem_cert_generate(x, H_gens, H, cap) for x in images),
        tuple(mem_cert_generate(x, images, H, cap) for x in H_gens),
        order_prove(G_gens, G, cap), order_prove(H_gens, H, cap), order_prove(P.generators, P, cap),
    )


def find_iso_images(G_gens, G: GroupHandle, H_gens, H: GroupHandle, cap: int = DEFAULT_CAP):
    """Brute-force images of G_gens defining an isomorphism onto <H_gens>, or None."""
    import itertools

    G_gens, H_gens = tuple(G_gens), tuple(H_gens)
    Gs, Hs = closure(G, G_gens, cap), closure(H, H_gens, cap)
    if len(Gs) != len(Hs):
        return None
    cands = [[y for y in sorted(Hs) if H.element_order(y) == G.element_order(g)] for g in G_gens]
    for imgs in itertools.product(*cands):
        P = _graph_handle(G, G_gens, H, imgs)
        if len(closure(P, P.generators, cap)) == len(Gs) and len(closure(H, imgs, cap)) == len(Hs):
            return imgs
    return None


def group_iso_verify(G_gens, G: GroupHandle, H_gens, H: GroupHandle, w: GroupIsoWitness, seed: int = 0,
                     cap: int = DEFAULT_CAP) -> tuple:
    G_gens, H_gens = tuple(G_gens), tuple(H_gens)
    tr = ProtocolTranscript(seed)
    images = tuple(w.images)
    shape = len(images) == len(G_gens) == len(w.image_certs) and len(w.generation_certs) == len(H_gens)
    if not tr.add("iso.structure", shape):
        return tr.finish(False), tr
    try:
        certs = all(bytes(c.target) == bytes(x) and mem_cert_check(c, H_gens, H)[0] for x, c in zip(images, w.image_certs))
        certs = certs and all(bytes(c.target) == bytes(x) and mem_cert_check(c, images, H)[0]
                              for x, c in zip(H_gens, w.generation_certs))
        P = _graph_handle(G, G_gens, H, images)
    except GroupError as exc:
        tr.add("iso.equality-certs", False, detail=str(exc))
        return tr.finish(False), tr
    if not tr.add("iso.equality-certs", certs):
        return tr.finish(False), tr
    m = w.claim_G.m
    if not tr.add("iso.same-m", w.claim_H.m == m and w.claim_K.m == m):
        return tr.finish(False), tr
    for tag, gens, grp, claim, sd in (("G:", G_gens, G, w.claim_G, seed), ("H:", H_gens, H, w.claim_H, seed + 1),
                                      ("K:", P.generators, P, w.claim_K, seed + 2)):
        ok, sub = claim_verify(gens, grp, claim, sd, cap)
        tr.extend(sub, tag)
        if not ok:
            return tr.finish(False), tr
    return tr.finish(True), tr


@dataclass(frozen=True)
class ProperSubgroupWitness:
    h_certs: tuple
    a: bytes
    a_cert: MembershipCertificate
    non_membership: NonMembershipWitness


def proper_subgroup_generate(G_gens, H_gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> ProperSubgroupWitness:
    G_gens, H_gens = tuple(G_gens), tuple(H_gens)
    Hs = closure(G, H_gens, cap)
    outside = [g for g in sorted(closure(G, G_gens, cap)) if g not in Hs]
    if not outside:
        raise PreconditionViolated("H is not a proper subgroup")
    a = outside[0]
    return ProperSubgroupWitness(
        tuple(mem_cert_generate(x, G_gens, G, cap) for x in H_gens), a, mem_cert_generate(a, G_gens, G, cap),
        non_membership_generate(H_gens, a, G, cap),
    )


def proper_subgroup_verify(G_gens, H_gens, G: GroupHandle, w: ProperSubgroupWitness, seed: int = 0,
                           cap: int = DEFAULT_CAP) -> tuple:
    G_gens, H_gens = tuple(G_gens), tuple(H_gens)
    tr = ProtocolTranscript(seed)
    ok = len(w.h_certs) == len(H_gens) and all(
        bytes(c.target) == bytes(x) and mem_cert_check(c, G_gens, G)[0] for x, c in zip(H_gens, w.h_certs))
    ok = ok and bytes(w.a_cert.target) == bytes(w.a) and mem_cert_check(w.a_cert, G_gens, G)[0]
    if not tr.add("proper.membership", ok):
        return tr.finish(False), tr
    acc, sub = non_membership_verify(H_gens, w.a, G, w.non_membership, seed, cap)
    tr.extend(sub, "nonmem:")
    return tr.finish(acc), tr


def simple_group_verify(G_gens, G: GroupHandle, z: StandardName, w: IsoPresentationWitness, seed: int = 0,
                        cap: int = DEFAULT_CAP) -> tuple:
    tr = ProtocolTranscript(seed)
    res = iso_via_presentation_check(G, tuple(G_gens), z, w, (), cap=cap)
    tr.add("simple.presentation-iso", res.ok, res.trusted, res.reason)
    return tr.finish(res.ok), tr
