"""Standard names of finite simple groups, their orders and short presentations.

Also hosts the two certificate checks built on presentations: "this group
(or quotient) is isomorphic to the named simple group" and "these are the
composition factors".  Both work relative to a *base* subgroup B, so the same
code checks a subgroup X (B trivial) or a quotient X/B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

from .errors import (
    AmbiguousOrder,
    InvalidCode,
    NotSimple,
    UnknownFactor,
    UnknownOrder,
    UnsupportedName,
)
from .field import factorize, is_prime
from .groups import GroupHandle
from .slp import (
    NormalityCertificate,
    mem_cert_check,
    mem_cert_generate,
    norm_cert_check,
    norm_cert_generate,
)
from .subgroups import (
    DEFAULT_CAP,
    Quotient,
    closure,
    is_abelian_quotient,
    maximal_normal_over,
    normal_subgroups,
    small_generators,
)

FAMILIES = ("Cyclic", "Alternating", "PSL2", "Ree")
PRESENTATION_CAP = 4096
MAX_CYCLIC = 997
COLLISION_ORDER = 20160  # A8 and PSL(3,4)


@dataclass(frozen=True, order=True)
class StandardName:
    family: str
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(int(x) for x in self.params))
        f, p = self.family, self.params
        if f not in FAMILIES:
            raise UnsupportedName(f"unknown family {f!r}")
        if len(p) != 1:
            raise UnsupportedName(f"{f} takes one parameter")
        n = p[0]
        if f == "Cyclic" and not is_prime(n):
            raise UnsupportedName(f"Cyclic({n}) needs a prime")
        if f == "Alternating" and n < 5:
            raise UnsupportedName(f"Alternating({n}) is not simple")
        if f == "PSL2":
            fac = factorize(n) if n > 1 else []
            if len(fac) != 1 or n < 4:
                raise UnsupportedName(f"PSL2({n}) needs a prime power q >= 4")
        if f == "Ree":
            fac = factorize(n) if n > 1 else []
            if len(fac) != 1 or fac[0][0] != 3 or fac[0][1] % 2 == 0 or fac[0][1] < 3:
                raise UnsupportedName(f"Ree({n}) needs q = 3^(2a+1) with a >= 1")

    def __str__(self):
        return f"{self.family}({', '.join(map(str, self.params))})"

    @property
    def abelian(self) -> bool:
        return self.family == "Cyclic"


def Cyclic(p):
    return StandardName("Cyclic", (p,))


def Alternating(n):
    return StandardName("Alternating", (n,))


def PSL2(q):
    return StandardName("PSL2", (q,))


def Ree(q):
    return StandardName("Ree", (q,))


def format_name(z: StandardName) -> str:
    return f"name {z.family} " + " ".join(map(str, z.params))


def parse_name(tokens) -> StandardName:
    tokens = list(tokens)
    if tokens and tokens[0] == "name":
        tokens = tokens[1:]
    if len(tokens) < 2:
        raise UnsupportedName(f"malformed name {' '.join(tokens)!r}")
    return StandardName(tokens[0], tuple(int(t) for t in tokens[1:]))


def name_order(z: StandardName) -> int:
    n = z.params[0]
    if z.family == "Cyclic":
        return n
    if z.family == "Alternating":
        return math.factorial(n) // 2
    if z.family == "PSL2":
        return n * (n * n - 1) // math.gcd(2, n - 1)
    if z.family == "Ree":
        return n**3 * (n**3 + 1) * (n - 1)
    raise UnsupportedName(str(z))


# -- presentations


@dataclass(frozen=True)
class PresentationSpec:
    num_generators: int
    relators: tuple

    def __post_init__(self):
        letters = "abcdefghijklmnopqrstuvwxyz"[: self.num_generators]
        for r in self.relators:
            if not r or any(ch.lower() not in letters for ch in r):
                raise ValueError(f"relator {r!r} uses unknown symbols")
        if self.length > PRESENTATION_CAP:
            raise ValueError("presentation exceeds the length cap")

    @property
    def length(self) -> int:
        return sum(len(r) for r in self.relators)


@lru_cache(maxsize=None)
def _table():
    out = {}
    text = resources.files("grouporder").joinpath("data/presentations.txt").read_text()
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, ngens, rels, degree, concrete = (part.strip() for part in line.split("|"))
        family, param = head.split()
        z = StandardName(family, (int(param),))
        pres = PresentationSpec(int(ngens), tuple(rels.split()))
        gens = tuple(c.strip() for c in concrete.split(";"))
        out[z] = (pres, int(degree), gens)
    return out


def supported_names() -> list:
    """Non-abelian names that carry a presentation, in table order."""
    return list(_table())


def is_supported(z: StandardName) -> bool:
    if z.family == "Cyclic":
        return z.params[0] <= MAX_CYCLIC
    return z in _table()


def name_presentation(z: StandardName) -> PresentationSpec:
    if z.family == "Cyclic":
        p = z.params[0]
        if p > MAX_CYCLIC:
            raise UnsupportedName(f"{z} is beyond the cyclic table")
        return PresentationSpec(1, ("a" * p,))
    if z.family == "Ree":
        raise UnsupportedName(f"{z} has no short presentation in the table")
    try:
        return _table()[z][0]
    except KeyError:
        raise UnsupportedName(f"{z} is not in the presentation table") from None


def concrete_generators(z: StandardName):
    """``(degree, cycle strings)`` of permutations realizing the presentation."""
    if z.family == "Cyclic":
        p = z.params[0]
        return p, ("(" + " ".join(str(i) for i in range(1, p + 1)) + ")",)
    name_presentation(z)
    _, degree, gens = _table()[z]
    return degree, gens


def eval_word(G: GroupHandle, word: str, images) -> bytes:
    x = G.identity
    inverses: dict = {}
    for ch in word:
        i = ord(ch.lower()) - ord("a")
        if ch.islower():
            x = G.mul(x, images[i])
        else:
            if i not in inverses:
                inverses[i] = G.inv(images[i])
            x = G.mul(x, inverses[i])
    return x


# -- naming


def _name_for(order: int, abelian: bool) -> StandardName:
    if abelian:
        if not is_prime(order):
            raise NotSimple(f"abelian group of order {order} is not simple")
        return Cyclic(order)
    if order >= COLLISION_ORDER:
        raise AmbiguousOrder(f"order {order} lies in the collision zone")
    hits = sorted({z for z in _table() if name_order(z) == order}, key=lambda z: (z.family != "Alternating", z))
    if not hits:
        raise UnknownOrder(f"no non-abelian simple group of order {order} in the table")
    # orders 60 and 360 have two names each for one group; prefer Alternating
    return hits[0]


def identify_simple(gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> StandardName:
    X = closure(G, gens, cap)
    if len(X) == 1:
        raise NotSimple("trivial group")
    kg = small_generators(G, X)
    if [len(N) for N in normal_subgroups(G, kg, cap)] != [1, len(X)]:
        raise NotSimple("group has a proper non-trivial normal subgroup")
    return _name_for(len(X), is_abelian_quotient(G, kg, frozenset([G.identity])))


def identify_quotient(G: GroupHandle, X_gens, B: frozenset, cap: int = DEFAULT_CAP) -> StandardName:
    """Name of the simple quotient ``<X_gens, B>/B`` (simplicity is checked)."""
    X = closure(G, tuple(X_gens) + tuple(small_generators(G, B)), cap)
    kg = small_generators(G, X)
    if len(X) == len(B) or maximal_normal_over(G, kg, B, cap) != [B]:
        raise NotSimple("quotient is not simple")
    return _name_for(len(X) // len(B), is_abelian_quotient(G, kg, B))


# -- isomorphism with a named simple group via its presentation


@dataclass(frozen=True)
class Check:
    ok: bool
    reason: str = "ok"
    trusted: bool = False

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class IsoPresentationWitness:
    """Images of the presentation generators plus the certificates tying them to X/B.

    ``relator_certs[r]`` puts the value of relator ``r`` into ``<base>``; a
    ``None`` entry asks the verifier to decide that membership itself.
    """

    images: tuple
    image_certs: tuple
    generation_certs: tuple
    relator_certs: tuple


def find_presentation_images(G: GroupHandle, X_gens, base, pres: PresentationSpec, cap: int = DEFAULT_CAP):
    """Backtracking search for images in X/B satisfying ``pres`` and generating X/B."""
    B = closure(G, base, cap)
    X = closure(G, tuple(base) + tuple(X_gens), cap)
    Q = Quotient(G, X, B)
    s = pres.num_generators
    letters = [[(ord(ch.lower()) - 97, ch.islower()) for ch in r] for r in pres.relators]
    power_of = {}
    for r in pres.relators:
        if len(set(r)) == 1 and r[0].islower():
            power_of[ord(r[0]) - 97] = len(r)
    orders = {i: Q.elem_order(i) for i in range(Q.order)}
    cands = []
    for i in range(s):
        n = power_of.get(i)
        cands.append([q for q in range(Q.order) if q != Q.identity and (n is None or n % orders[q] == 0)])
    # first generator only up to conjugacy in X/B
    xg = [Q.of(g) for g in X_gens]
    reps, seen = [], set()
    for q in cands[0]:
        if q in seen:
            continue
        reps.append(q)
        orbit, frontier = {q}, [q]
        while frontier:
            nxt = []
            for y in frontier:
                for k in xg:
                    z = Q.mul(Q.mul(k, y), Q.inv(k))
                    if z not in orbit:
                        orbit.add(z)
                        nxt.append(z)
            frontier = nxt
        seen |= orbit
    cands[0] = reps
    by_last = [[] for _ in range(s)]
    for w in letters:
        by_last[max(i for i, _ in w)].append(w)
    inv_cache: dict = {}

    def q_inv(q):
        if q not in inv_cache:
            inv_cache[q] = Q.inv(q)
        return inv_cache[q]

    def holds(w, assign):
        x = Q.identity
        for i, pos in w:
            x = Q.mul(x, assign[i] if pos else q_inv(assign[i]))
        return x == Q.identity

    assign = [None] * s

    def rec(i):
        if i == s:
            return Q.generated(assign) == Q.order
        for q in cands[i]:
            assign[i] = q
            if all(holds(w, assign) for w in by_last[i]) and rec(i + 1):
                return True
        assign[i] = None
        return False

    if not rec(0):
        return None
    return tuple(Q.reps[q] for q in assign)


def iso_presentation_generate(G: GroupHandle, X_gens, z: StandardName, base=(), cap: int = DEFAULT_CAP,
                              images=None) -> IsoPresentationWitness:
    pres = name_presentation(z)
    base, X_gens = tuple(base), tuple(X_gens)
    if images is None:
        images = find_presentation_images(G, X_gens, base, pres, cap)
        if images is None:
            raise UnknownFactor(f"no images satisfy the presentation of {z}")
    full = base + X_gens
    image_certs = tuple(mem_cert_generate(g, full, G, cap) for g in images)
    gen_certs = tuple(mem_cert_generate(g, base + tuple(images), G, cap) for g in X_gens)
    rel_certs = tuple(mem_cert_generate(eval_word(G, r, images), base, G, cap) for r in pres.relators)
    return IsoPresentationWitness(tuple(images), image_certs, gen_certs, rel_certs)


def _enumeration_member(G, base, cap):
    B = closure(G, base, cap)
    return lambda g: g in B


def iso_via_presentation_check(G: GroupHandle, X_gens, z: StandardName, w: IsoPresentationWitness, base=(),
                               member=None, cap: int = DEFAULT_CAP) -> Check:
    """Check that ``<base, X_gens>/<base>`` is isomorphic to the simple group named ``z``.

    ``member`` decides membership in ``<base>`` when the witness omits a
    relator certificate and for the non-triviality test; it defaults to
    enumeration.  Any use of it marks the result as trusted.
    """
    base, X_gens = tuple(base), tuple(X_gens)
    try:
        pres = name_presentation(z)
    except UnsupportedName as exc:
        return Check(False, str(exc))
    trusted = False
    try:
        if len(w.images) != pres.num_generators:
            return Check(False, "wrong number of images")
        if len(w.image_certs) != len(w.images) or len(w.generation_certs) != len(X_gens):
            return Check(False, "certificate lists have the wrong length")
        if len(w.relator_certs) != len(pres.relators):
            return Check(False, "relator certificate list has the wrong length")
        # non-triviality of X/B
        if base:
            if member is None:
                member = _enumeration_member(G, base, cap)
            trusted = True
            if all(member(g) for g in X_gens):
                return Check(False, "quotient is trivial", trusted)
        elif all(g == G.identity for g in X_gens):
            return Check(False, "group is trivial")
        full = base + X_gens
        for i, (g, c) in enumerate(zip(w.images, w.image_certs)):
            if bytes(c.target) != bytes(g):
                return Check(False, f"image certificate {i} has the wrong target", trusted)
            ok, why = mem_cert_check(c, full, G)
            if not ok:
                return Check(False, f"image {i}: {why}", trusted)
        over = base + tuple(w.images)
        for j, (g, c) in enumerate(zip(X_gens, w.generation_certs)):
            if bytes(c.target) != bytes(g):
                return Check(False, f"generation certificate {j} has the wrong target", trusted)
            ok, why = mem_cert_check(c, over, G)
            if not ok:
                return Check(False, f"generation {j}: {why}", trusted)
        for r, c in zip(pres.relators, w.relator_certs):
            val = eval_word(G, r, w.images)
            if c is None:
                if member is None:
                    member = _enumeration_member(G, base, cap)
                trusted = True
                if not member(val):
                    return Check(False, f"relator {r[:12]} fails", trusted)
                continue
            if bytes(c.target) != val:
                return Check(False, f"relator {r[:12]} certificate has the wrong target", trusted)
            ok, why = mem_cert_check(c, base, G)
            if not ok:
                return Check(False, f"relator {r[:12]}: {why}", trusted)
    except InvalidCode as exc:
        return Check(False, str(exc), trusted)
    return Check(True, "ok", trusted)


def iso_via_presentation_verify(G: GroupHandle, G_gens, z: StandardName, witness: IsoPresentationWitness,
                                base=(), member=None) -> bool:
    return iso_via_presentation_check(G, G_gens, z, witness, base, member).ok


# -- composition factor multisets


@dataclass(frozen=True)
class FactorLevel:
    extra: tuple
    name: StandardName
    normality: NormalityCertificate
    iso: IsoPresentationWitness


@dataclass(frozen=True)
class FactorChainWitness:
    """Chain B = N_0 < N_1 < ... < N_t with N_j = <N_{j-1}, extra_j>.

    ``top_certs`` put each group generator into N_t; ``extra_certs`` put every
    ``extra`` element (flattened, level order) into the group.
    """

    levels: tuple = ()
    top_certs: tuple = ()
    extra_certs: tuple = ()


def composition_chain(G: GroupHandle, top_gens, base=(), cap: int = DEFAULT_CAP) -> list:
    """Subgroups from ``<base>`` up to ``<base, top_gens>``, by maximal-normal descent.

    Tie-break: the candidate whose sorted code list is least.
    """
    K = closure(G, tuple(base) + tuple(top_gens), cap)
    B = closure(G, base, cap)
    series = [K]
    while series[-1] != B:
        maxes = maximal_normal_over(G, small_generators(G, series[-1]), B, cap)
        series.append(min(maxes, key=sorted))
    return series[::-1]


def factors_multiset_generate(G: GroupHandle, G_gens, base=(), cap: int = DEFAULT_CAP):
    """Honest ``(multiset, witness)`` for the composition factors of ``<base, G_gens>/<base>``."""
    base, G_gens = tuple(base), tuple(G_gens)
    chain = composition_chain(G, G_gens, base, cap)
    levels = []
    gens_so_far = base
    for lower, upper in zip(chain, chain[1:]):
        extra = []
        cur = lower
        for g in sorted(upper - lower, key=lambda x: (-G.element_order(x), x)):
            if g in cur:
                continue
            extra.append(g)
            cur = closure(G, gens_so_far + tuple(extra), cap)
            if cur == upper:
                break
        extra = tuple(extra)
        z = identify_quotient(G, extra, lower, cap)
        upper_gens = gens_so_far + extra
        norm = norm_cert_generate(gens_so_far, upper_gens, G, cap)
        iso = iso_presentation_generate(G, extra, z, gens_so_far, cap)
        levels.append(FactorLevel(extra, z, norm, iso))
        gens_so_far = upper_gens
    top = tuple(mem_cert_generate(g, gens_so_far, G, cap) for g in G_gens)
    flat = [g for lv in levels for g in lv.extra]
    extra_certs = tuple(mem_cert_generate(g, base + G_gens, G, cap) for g in flat)
    names = sorted(lv.name for lv in levels)
    return names, FactorChainWitness(tuple(levels), top, extra_certs)


def factors_multiset_check(G: GroupHandle, G_gens, S, w: FactorChainWitness, base=(), member=None,
                           cap: int = DEFAULT_CAP) -> Check:
    base, G_gens = tuple(base), tuple(G_gens)
    trusted = False
    if sorted(lv.name for lv in w.levels) != sorted(S):
        return Check(False, "claimed names differ from the multiset")
    if len(w.top_certs) != len(G_gens):
        return Check(False, "missing top certificates")
    flat = [g for lv in w.levels for g in lv.extra]
    if len(w.extra_certs) != len(flat):
        return Check(False, "missing chain membership certificates")
    gens_so_far = base
    try:
        for j, lv in enumerate(w.levels):
            upper = gens_so_far + tuple(lv.extra)
            ok, why = norm_cert_check(lv.normality, gens_so_far, upper, G)
            if not ok:
                return Check(False, f"level {j} normality: {why}", trusted)
            lvl_member = member(gens_so_far) if member is not None else None
            res = iso_via_presentation_check(G, lv.extra, lv.name, lv.iso, gens_so_far, lvl_member, cap)
            trusted = trusted or res.trusted
            if not res.ok:
                return Check(False, f"level {j} ({lv.name}): {res.reason}", trusted)
            gens_so_far = upper
        for i, (g, c) in enumerate(zip(G_gens, w.top_certs)):
            if bytes(c.target) != bytes(g):
                return Check(False, f"top certificate {i} has the wrong target", trusted)
            ok, why = mem_cert_check(c, gens_so_far, G)
            if not ok:
                return Check(False, f"top {i}: {why}", trusted)
        for i, (g, c) in enumerate(zip(flat, w.extra_certs)):
            if bytes(c.target) != bytes(g):
                return Check(False, f"chain certificate {i} has the wrong target", trusted)
            ok, why = mem_cert_check(c, base + G_gens, G)
            if not ok:
                return Check(False, f"chain {i}: {why}", trusted)
    except InvalidCode as exc:
        return Check(False, str(exc), trusted)
    return Check(True, "ok", trusted)


def factors_multiset_verify(G: GroupHandle, G_gens, S, witness: FactorChainWitness, base=()) -> bool:
    return factors_multiset_check(G, G_gens, S, witness, base).ok
