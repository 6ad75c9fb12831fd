"""Adversarial Merlin: catalogued cheating witnesses for the order protocol.

Each kind returns ``(m, w_lower, w_upper)``.  Kinds that need structure the
target lacks fall back to a related cheat; the returned ``Attack`` records
which kind was actually built.  The attacker never sees the verifier's
filtration, only what an honest prover would compute for itself.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace

from .errors import GroupError, UnsupportedKind
from .field import factorize, is_prime
from .groups import GroupHandle
from .homtest import IsoWitness, iso_witness_generate
from .names import (
    Cyclic,
    IsoPresentationWitness,
    StandardName,
    iso_presentation_generate,
    factors_multiset_generate,
    name_order,
    name_presentation,
    supported_names,
)
from .protocol import (
    HOMTEST,
    PRESENTATION,
    FactorClaim,
    OrderWitnessDivides,
    PrimePowerClaim,
    _oracle_for,
    p_subgroup,
    witness_divides_generate,
    witness_ub_generate,
)
from .slp import (
    MembershipCertificate,
    NormalityCertificate,
    SolvabilityCertificate,
    identity_slp,
    mem_cert_generate,
    norm_cert_generate,
    padded_beyond_bound,
    sol_cert_generate,
)
from .subgroups import DEFAULT_CAP, closure, is_normalized_by, normal_subgroups, small_generators

KINDS = ("honest", "wrong-name", "non-normal-link", "forged-pker", "pad-slp", "inflate-m1",
         "iso-images", "order-lie-up", "order-lie-down")


@dataclass(frozen=True)
class Attack:
    kind: str
    built: str
    m: int
    lower: OrderWitnessDivides
    upper: object
    note: str = ""


# -- helpers


def _cert(target, gens, G, cap):
    """Honest certificate if one exists, otherwise a forged one that names the target."""
    try:
        return mem_cert_generate(target, gens, G, cap)
    except GroupError:
        return MembershipCertificate(identity_slp(len(tuple(gens))), G.check(target))


def _norm(H_gens, G_gens, G, cap):
    H_gens, G_gens = tuple(H_gens), tuple(G_gens)
    try:
        return norm_cert_generate(H_gens, G_gens, G, cap)
    except GroupError:
        return NormalityCertificate(tuple(tuple(_cert(G.conj(g, h), H_gens, G, cap) for g in G_gens) for h in H_gens))


def _honest(G_gens, G, cap, route=PRESENTATION):
    key = ("honest-upper", tuple(G_gens), route)
    hit = G.cache.get(key)
    if hit is None:
        hit = witness_ub_generate(G_gens, G, cap, route)
        G.cache[key] = hit
    return hit


def _lower_for(G_gens, G, m, cap):
    """Honest lower witness when m divides |G|; else the best forgery (true subgroups, inflated exponents)."""
    n = len(closure(G, G_gens, cap))
    if n % m == 0:
        return witness_divides_generate(G_gens, G, m, cap)
    out = []
    for p, t in factorize(m) if m > 1 else []:
        t_true = next((e for q, e in factorize(n) if q == p), 0) if n > 1 else 0
        P = p_subgroup(G, G_gens, p, min(t, t_true), cap) if t_true else frozenset([G.identity])
        gens = small_generators(G, P)
        out.append(PrimePowerClaim(p, t, gens, tuple(_cert(g, G_gens, G, cap) for g in gens)))
    return OrderWitnessDivides(tuple(out))


def _rechain(G, w, h, pairs, cap):
    """Rebuild the items that depend on h and the pairs, honestly where possible."""
    beta = tuple(b for b, _ in pairs)
    gamma = tuple(c for _, c in pairs)
    member = tuple(_cert(g, w.k, G, cap) for g in tuple(h) + beta + gamma)

    def level(i):
        out = tuple(h)
        for b, c in pairs[:i]:
            out += (b, c)
        return out

    links = tuple(_norm(level(i - 1), level(i), G, cap) for i in range(1, len(pairs) + 1))
    top = level(len(pairs))
    norm_Hs = _norm(top, w.k, G, cap)
    try:
        sol, _ = sol_cert_generate(w.k, G, cap, base=top)
    except GroupError:
        sol = w.sol
    return replace(w, h=tuple(h), beta=beta, gamma=gamma, member_certs=member, norm_links=links,
                   norm_Hs=norm_Hs, sol=sol)


def _forged_presentation(G, X_gens, z, base, cap):
    """Presentation witness for the wrong name: plausible images, relators left to the verifier."""
    pres = name_presentation(z)
    X_gens, base = tuple(X_gens), tuple(base)
    images = tuple(X_gens[i % len(X_gens)] for i in range(pres.num_generators))
    return IsoPresentationWitness(
        images,
        tuple(_cert(g, base + X_gens, G, cap) for g in images),
        tuple(_cert(g, base + images, G, cap) for g in X_gens),
        tuple(None for _ in pres.relators),
    )


def _other_name(z: StandardName, rng: random.Random) -> StandardName:
    if z.family == "Cyclic":
        primes = [p for p in (2, 3, 5, 7) if p != z.params[0]]
        return Cyclic(rng.choice(primes))
    pool = [y for y in supported_names() if y != z and y.family != "Ree" and name_order(y) != name_order(z)]
    return rng.choice(pool)


def _peel_cyclic(G, w, cap):
    """Split a prime-order top layer off H_0: returns (M_gens, x, p) or None."""
    H0 = closure(G, w.h, cap)
    if len(H0) == 1:
        return None
    for M in sorted(normal_subgroups(G, w.k, cap), key=len, reverse=True):
        if M < H0 and is_prime(len(H0) // len(M)):
            x = min(H0 - M)
            return small_generators(G, M), x, len(H0) // len(M)
    return None


# -- the kinds


def _wrong_name(G_gens, G, cap, rng):
    w, m = _honest(G_gens, G, cap)
    if w.s:
        i = rng.randrange(w.s)
        z = w.factors[i].name
        z2 = _other_name(z, rng)
        fc = FactorClaim(z2, PRESENTATION, _forged_presentation(G, (w.beta[i], w.gamma[i]), z2, w.h, cap))
        factors = w.factors[:i] + (fc,) + w.factors[i + 1:]
        bad = replace(w, factors=factors)
        note = f"factor {i}: {z} renamed {z2}"
    else:
        peel = _peel_cyclic(G, w, cap)
        if peel is None:
            return None
        M_gens, x, p = peel
        z, z2 = Cyclic(p), _other_name(Cyclic(p), rng)
        bad = _rechain(G, w, M_gens, ((x, x),), cap)
        fc = FactorClaim(z2, PRESENTATION, _forged_presentation(G, (x, x), z2, M_gens, cap))
        bad = replace(bad, factors=(fc,))
        note = f"top layer {z} of H_0 split off and named {z2}"
    m2 = m // name_order(z) * name_order(z2)
    return m2, _lower_for(G_gens, G, m2, cap), bad, note


def _non_normal_link(G_gens, G, cap, rng):
    """Insert a genuine prime-order level whose subgroup is not normal in the next one."""
    w, m = _honest(G_gens, G, cap)
    K = closure(G, w.k, cap)
    H0 = closure(G, w.h, cap)
    honest_pairs = tuple(zip(w.beta, w.gamma))
    nxt = w.level_gens(w.s) if w.s else tuple(w.k)
    # the base may shrink to a smaller normal subgroup when H_0 is already all of K
    bases = [H0] + sorted((M for M in normal_subgroups(G, w.k, cap) if M < H0), key=len, reverse=True)
    for M in bases:
        h = tuple(w.h) if M == H0 else small_generators(G, M)
        pool = sorted(K - M)
        rng.shuffle(pool)
        for t in pool:
            low = closure(G, h + (t,), cap)
            p = len(low) // len(M)
            if not is_prime(p) or is_normalized_by(G, low, nxt):
                continue
            bad = _rechain(G, w, h, ((t, t),) + honest_pairs, cap)
            fc = FactorClaim(Cyclic(p), PRESENTATION, iso_presentation_generate(G, (t, t), Cyclic(p), h, cap))
            bad = replace(bad, factors=(fc,) + w.factors)
            m2 = m * p
            return m2, _lower_for(G_gens, G, m2, cap), bad, f"level of order {p} not normal in the next level"
    return None


def _forged_pker(G_gens, G, cap, rng):
    """K a proper subgroup of Pker normal in G, with the multiset of G/K claimed for G/Pker."""
    w, m = _honest(G_gens, G, cap)
    Hs = closure(G, w.level_gens(w.s), cap)
    K = closure(G, w.k, cap)
    cands = [N for N in normal_subgroups(G, tuple(G_gens), cap) if Hs <= N < K]
    if not cands:
        return None
    N = rng.choice(cands)
    k2 = small_generators(G, N)
    sol, m1 = sol_cert_generate(k2, G, cap, base=w.level_gens(w.s))
    names, chain = factors_multiset_generate(G, tuple(G_gens), base=k2, cap=cap)
    bad = replace(w, k=k2, m1=m1, sol=sol, multiset=tuple(names), factor_chain=chain,
                  norm_K=_norm(k2, G_gens, G, cap), norm_Hs=_norm(w.level_gens(w.s), k2, G, cap))
    bad = _rechain(G, bad, bad.h, tuple(zip(bad.beta, bad.gamma)), cap)
    m2 = m // (len(K) // len(N))
    return m2, _lower_for(G_gens, G, m2, cap), bad, f"K of index {len(K) // len(N)} in Pker"


def _pad_slp(G_gens, G, cap, rng):
    w, m = _honest(G_gens, G, cap)
    lower = witness_divides_generate(G_gens, G, m, cap)
    if w.member_certs:
        i = rng.randrange(len(w.member_certs))
        certs = list(w.member_certs)
        certs[i] = padded_beyond_bound(certs[i], G)
        return m, lower, replace(w, member_certs=tuple(certs)), f"upper membership certificate {i} padded"
    grid = [list(row) for row in w.norm_K.grid]
    if grid and grid[0]:
        grid[0][0] = padded_beyond_bound(grid[0][0], G)
        return m, lower, replace(w, norm_K=NormalityCertificate(tuple(map(tuple, grid)))), "normality cell padded"
    claims = [c for c in lower.factors if c.certs]
    if claims:
        c = claims[0]
        c2 = replace(c, certs=(padded_beyond_bound(c.certs[0], G),) + c.certs[1:])
        facs = tuple(c2 if x is c else x for x in lower.factors)
        return m, OrderWitnessDivides(facs), w, "lower membership certificate padded"
    return None


def _inflate_m1(G_gens, G, cap, rng):
    """Append a redundant prime to the solvability chain: check (6) still holds, m grows."""
    w, m = _honest(G_gens, G, cap)
    p = rng.choice([2, 3, 5, 7])
    base = w.level_gens(w.s)
    sol = w.sol
    lower_gens = base + tuple(sol.chain)
    g = G.identity
    norm = _norm(lower_gens, lower_gens + (g,), G, cap)
    sol2 = SolvabilityCertificate(
        sol.primes + (p,), sol.chain + (g,),
        sol.member_certs + (_cert(g, tuple(w.k), G, cap),),
        sol.normality_certs + (norm,),
        sol.power_certs + (_cert(G.power(g, p), lower_gens, G, cap),),
        sol.cover_certs,
    )
    m2 = m * p
    return m2, _lower_for(G_gens, G, m2, cap), replace(w, m1=w.m1 * p, sol=sol2), f"m1 multiplied by {p}"


def _iso_images(G_gens, G, cap, rng):
    """A homomorphism-test factor whose images do not define a homomorphism."""
    w, m = _honest(G_gens, G, cap, HOMTEST)
    if not w.s:
        return None
    i = rng.randrange(w.s)
    fc = w.factors[i]
    imgs = tuple(fc.witness.images)
    K_gens = (w.beta[i], w.gamma[i])
    if len(imgs) >= 2:
        bad_imgs = (imgs[1], imgs[0]) + imgs[2:]
    else:
        bad_imgs = (G.identity,)
    oracle = _oracle_for(fc.name, {})
    try:
        iw = iso_witness_generate(G, K_gens, w.h, oracle, images=bad_imgs, cap=cap)
    except GroupError:
        iw = IsoWitness(bad_imgs, tuple(_cert(g, K_gens + w.h, G, cap) for g in bad_imgs),
                        tuple(_cert(k, bad_imgs + w.h, G, cap) for k in K_gens))
    factors = w.factors[:i] + (FactorClaim(fc.name, HOMTEST, iw),) + w.factors[i + 1:]
    return m, witness_divides_generate(G_gens, G, m, cap), replace(w, factors=factors), f"factor {i} images swapped"


def _order_lie_up(G_gens, G, cap, rng):
    w, m = _honest(G_gens, G, cap)
    p = rng.choice([2, 3, 5])
    return m * p, _lower_for(G_gens, G, m * p, cap), w, f"claimed {m * p}"


def _order_lie_down(G_gens, G, cap, rng):
    w, m = _honest(G_gens, G, cap)
    if m == 1:
        return None
    p = rng.choice([q for q, _ in factorize(m)])
    return m // p, witness_divides_generate(G_gens, G, m // p, cap), w, f"claimed {m // p}"


def _honest_kind(G_gens, G, cap, rng):
    w, m = _honest(G_gens, G, cap)
    return m, witness_divides_generate(G_gens, G, m, cap), w, "honest"


_BUILDERS = {
    "honest": _honest_kind,
    "wrong-name": _wrong_name,
    "non-normal-link": _non_normal_link,
    "forged-pker": _forged_pker,
    "pad-slp": _pad_slp,
    "inflate-m1": _inflate_m1,
    "iso-images": _iso_images,
    "order-lie-up": _order_lie_up,
    "order-lie-down": _order_lie_down,
}

_FALLBACK = {
    "wrong-name": "order-lie-up",
    "non-normal-link": "wrong-name",
    "forged-pker": "wrong-name",
    "pad-slp": "order-lie-up",
    "iso-images": "wrong-name",
    "order-lie-down": "order-lie-up",
}


def attack_suite(kind: str, G_gens, G: GroupHandle, seed: int = 0, cap: int = DEFAULT_CAP) -> Attack:
    """Build the cheating witness of the given kind for the instance ``<G_gens>``."""
    if kind not in _BUILDERS:
        raise UnsupportedKind(f"unknown attack kind {kind!r}; choose from {', '.join(KINDS)}")
    G_gens = tuple(G_gens)
    rng = random.Random(f"{kind}:{seed}")
    built = kind
    while True:
        res = _BUILDERS[built](G_gens, G, cap, rng)
        if res is not None:
            m, lower, upper, note = res
            return Attack(kind, built, m, lower, upper, note)
        built = _FALLBACK[built]


def is_false_claim(att: Attack, G_gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> bool:
    return att.m != len(closure(G, tuple(G_gens), cap))


