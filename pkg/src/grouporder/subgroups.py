"""Brute-force subgroup machinery for desk-scale groups.

Subgroups are materialized as ``frozenset`` of element codes.  Results are
memoized on the owning handle's ``cache`` dict, keyed by the frozen inputs,
so repeated protocol runs on the same group do not redo enumeration.
"""

from __future__ import annotations

from .errors import CapExceeded
from .groups import GroupHandle

DEFAULT_CAP = 10**6


def _memo(G: GroupHandle, key, fn):
    hit = G.cache.get(key)
    if hit is None:
        hit = fn()
        G.cache[key] = hit
    return hit


def closure(G: GroupHandle, gens, cap: int = DEFAULT_CAP) -> frozenset:
    """All elements of ``<gens>``; raises CapExceeded past ``cap`` elements."""
    gens = tuple(dict.fromkeys(G.check(g) for g in gens))
    key = ("closure", frozenset(gens))
    hit = G.cache.get(key)
    if hit is not None:
        if len(hit) > cap:
            raise CapExceeded(f"subgroup has more than {cap} elements")
        return hit
    mul = G._mul
    seen = {G.identity}
    used: list = []
    # add generators one at a time, skipping redundant ones
    for g in gens:
        if g in seen:
            continue
        used.append(g)
        frontier = []
        for x in list(seen):
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                frontier.append(y)
        while frontier:
            nxt = []
            for x in frontier:
                for s in used:
                    y = mul(x, s)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            if len(seen) > cap:
                raise CapExceeded(f"subgroup has more than {cap} elements")
            frontier = nxt
    out = frozenset(seen)
    G.cache[key] = out
    G.cache.setdefault(("gens_of", out), tuple(used))
    return out


def group_order(G: GroupHandle, gens, cap: int = DEFAULT_CAP) -> int:
    return len(closure(G, gens, cap))


def join(G: GroupHandle, *subs, cap: int = DEFAULT_CAP) -> frozenset:
    gens = []
    for S in subs:
        gens.extend(small_generators(G, S))
    return closure(G, gens, cap)


def small_generators(G: GroupHandle, S: frozenset) -> tuple:
    """A short generating tuple for the subgroup ``S`` (at most log2 |S| elements).

    Greedy in sorted code order, so the result is deterministic.
    """
    key = ("smallgens", S)

    def build():
        if len(S) == 1:
            return ()
        known = G.cache.get(("gens_of", S))
        if known is not None and len(known) <= 3:
            return tuple(g for g in known if g != G.identity)
        gens: list = []
        current = frozenset([G.identity])
        # prefer high-order elements first; ties by code
        ranked = sorted(S, key=lambda g: (-G.element_order(g), g)) if len(S) <= 2000 else sorted(S)
        for g in ranked:
            if g in current:
                continue
            gens.append(g)
            current = closure(G, gens)
            if len(current) == len(S):
                break
        return _prune(G, tuple(gens), len(S))

    return _memo(G, key, build)


def _prune(G, gens, target_size):
    out = list(gens)
    i = 0
    while i < len(out) and len(out) > 1:
        trial = out[:i] + out[i + 1 :]
        if len(closure(G, trial)) == target_size:
            out = trial
        else:
            i += 1
    return tuple(out)


def conjugacy_class(G: GroupHandle, x: bytes, K_gens) -> frozenset:
    seen = {x}
    frontier = [x]
    while frontier:
        nxt = []
        for y in frontier:
            for k in K_gens:
                z = G.conj(k, y)
                if z not in seen:
                    seen.add(z)
                    nxt.append(z)
        frontier = nxt
    return frozenset(seen)


def conjugacy_classes(G: GroupHandle, K_gens, cap: int = DEFAULT_CAP) -> list:
    K = closure(G, K_gens, cap)
    key = ("classes", K)

    def build():
        left = set(K)
        out = []
        for x in sorted(K):
            if x in left:
                cls = conjugacy_class(G, x, K_gens)
                left -= cls
                out.append(cls)
        return tuple(out)

    return list(_memo(G, key, build))


def normal_closure(G: GroupHandle, elems, K_gens, cap: int = DEFAULT_CAP) -> frozenset:
    """Smallest subgroup containing ``elems`` normalized by ``<K_gens>``."""
    gens = set()
    for x in elems:
        gens |= conjugacy_class(G, x, K_gens)
    N = closure(G, sorted(gens), cap)
    # closing conjugacy classes of generators already gives a normal subgroup
    return N


def is_normalized_by(G: GroupHandle, H: frozenset, K_gens) -> bool:
    hg = small_generators(G, H)
    return all(G.conj(k, h) in H for k in K_gens for h in hg)


def is_subnormal_pair(G: GroupHandle, H_gens, K_gens, cap: int = DEFAULT_CAP) -> bool:
    """``<H_gens> <= <K_gens>`` and normal in it."""
    H = closure(G, H_gens, cap)
    K = closure(G, K_gens, cap)
    return H <= K and all(G.conj(k, h) in H for k in K_gens for h in H_gens)


def normal_subgroups(G: GroupHandle, K_gens, cap: int = DEFAULT_CAP) -> list:
    """All normal subgroups of ``<K_gens>``, sorted by (size, sorted codes)."""
    K = closure(G, K_gens, cap)
    key = ("normals", K)

    def build():
        kg = small_generators(G, K) or (G.identity,)
        atoms = {frozenset([G.identity])}
        for cls in conjugacy_classes(G, kg, cap):
            atoms.add(closure(G, sorted(cls), cap))
        found = set(atoms)
        frontier = list(atoms)
        while frontier:
            nxt = []
            for A in frontier:
                for B in list(found):
                    if A <= B or B <= A:
                        continue
                    J = join(G, A, B, cap=cap)
                    if J not in found:
                        found.add(J)
                        nxt.append(J)
            frontier = nxt
        return tuple(sorted(found, key=lambda S: (len(S), sorted(S))))

    return list(_memo(G, key, build))


def normal_between(G: GroupHandle, K_gens, L: frozenset, cap: int = DEFAULT_CAP) -> list:
    """Normal subgroups N of K with L <= N."""
    return [N for N in normal_subgroups(G, K_gens, cap) if L <= N]


def maximal_normal_over(G: GroupHandle, K_gens, L: frozenset, cap: int = DEFAULT_CAP) -> list:
    """Maximal proper normal subgroups of K that contain L (L assumed normal in K)."""
    K = closure(G, K_gens, cap)
    cands = [N for N in normal_between(G, K_gens, L, cap) if N != K]
    return [N for N in cands if not any(N < M for M in cands)]


def minimal_normal_over(G: GroupHandle, K_gens, L: frozenset, cap: int = DEFAULT_CAP) -> list:
    """Normal subgroups of K minimal among those strictly containing L."""
    cands = [N for N in normal_between(G, K_gens, L, cap) if N != L]
    return [N for N in cands if not any(M < N for M in cands)]


def quotient_is_simple(G: GroupHandle, K_gens, L: frozenset, cap: int = DEFAULT_CAP) -> bool:
    K = closure(G, K_gens, cap)
    if not L < K or not is_normalized_by(G, L, K_gens):
        return False
    return maximal_normal_over(G, K_gens, L, cap) == [L]


def lex_key(S: frozenset) -> list:
    return sorted(S)


def derived_subgroup(G: GroupHandle, K_gens, cap: int = DEFAULT_CAP) -> frozenset:
    comms = [G.commutator(a, b) for a in K_gens for b in K_gens]
    return normal_closure(G, comms, K_gens, cap)


def derived_series(G: GroupHandle, K_gens, cap: int = DEFAULT_CAP) -> list:
    K = closure(G, K_gens, cap)
    key = ("derived", K)

    def build():
        series = [K]
        cur_gens = small_generators(G, K)
        while True:
            D = derived_subgroup(G, cur_gens, cap) if cur_gens else frozenset([G.identity])
            if D == series[-1]:
                break
            series.append(D)
            cur_gens = small_generators(G, D)
        return tuple(series)

    return list(_memo(G, key, build))


def solvable_set(G: GroupHandle, K_gens, cap: int = DEFAULT_CAP) -> bool:
    return len(derived_series(G, K_gens, cap)[-1]) == 1


def quotient_solvable(G: GroupHandle, K_gens, N: frozenset, cap: int = DEFAULT_CAP) -> bool:
    """Is K/N solvable?  (N normal in K assumed.)  The derived series of K must enter N."""
    return derived_series(G, K_gens, cap)[-1] <= N


def is_abelian_quotient(G: GroupHandle, K_gens, N: frozenset) -> bool:
    return all(G.commutator(a, b) in N for a in K_gens for b in K_gens)


def cosets(G: GroupHandle, K: frozenset, N: frozenset) -> dict:
    """Map each element of K to the index of its left coset xN (indices follow sorted reps)."""
    key = ("cosets", K, N)

    def build():
        index = {}
        nlist = sorted(N)
        reps = []
        for x in sorted(K):
            if x in index:
                continue
            i = len(reps)
            reps.append(x)
            for n in nlist:
                index[G._mul(x, n)] = i
        return index, tuple(reps)

    return _memo(G, key, build)


class Quotient:
    """Concrete quotient K/N with integer-labelled cosets."""

    def __init__(self, G: GroupHandle, K: frozenset, N: frozenset):
        self.G, self.K, self.N = G, K, N
        self.index, self.reps = cosets(G, K, N)
        self.order = len(self.reps)
        self.identity = self.index[G.identity]
        self._table: dict = {}

    def of(self, g: bytes) -> int:
        return self.index[g]

    def mul(self, i: int, j: int) -> int:
        key = (i, j)
        hit = self._table.get(key)
        if hit is None:
            hit = self.index[self.G._mul(self.reps[i], self.reps[j])]
            self._table[key] = hit
        return hit

    def inv(self, i: int) -> int:
        return self.index[self.G._inv(self.reps[i])]

    def power(self, i: int, e: int) -> int:
        if e < 0:
            i, e = self.inv(i), -e
        acc = self.identity
        while e:
            if e & 1:
                acc = self.mul(acc, i)
            i = self.mul(i, i)
            e >>= 1
        return acc

    def elem_order(self, i: int) -> int:
        n, x = 1, i
        while x != self.identity:
            x = self.mul(x, i)
            n += 1
        return n

    def generated(self, ids) -> int:
        """Size of the subgroup of the quotient generated by ``ids``."""
        seen = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for s in ids:
                    y = self.mul(x, s)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return len(seen)
