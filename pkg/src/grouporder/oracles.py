"""Classical stand-ins for the sampling, solvability and structure oracles.

Everything here is exact brute force at desk scale.  Results that replace a
quantum subroutine are marked ``trusted`` where they feed a transcript.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import AmbiguousOrder, NotSimple, NotSolvableInput, UnknownFactor, UnknownOrder
from .groups import GroupHandle
from .names import identify_quotient
from .subgroups import (
    DEFAULT_CAP,
    closure,
    is_normalized_by,
    join,
    maximal_normal_over,
    minimal_normal_over,
    normal_subgroups,
    quotient_solvable,
    small_generators,
    solvable_set,
)

DEFAULT_EPSILON = Fraction(1, 1024)

# -- sampling


@dataclass
class SamplerState:
    G: GroupHandle
    slots: list
    rng: random.Random
    steps_taken: int = 0
    epsilon_target: Fraction = DEFAULT_EPSILON
    stride: int = 1


def burn_in_for(r: int, epsilon=DEFAULT_EPSILON) -> int:
    """Burn-in length for a target ``epsilon``; ``2^-10`` gives the usual 100·r moves."""
    return max(1, math.ceil(10 * r * math.log2(1 / float(epsilon))))


def _move(state: SamplerState) -> None:
    r = len(state.slots)
    i, j = state.rng.sample(range(r), 2)
    G = state.G
    other = state.slots[j] if state.rng.random() < 0.5 else G.inv(state.slots[j])
    state.slots[i] = G.mul(state.slots[i], other)
    state.steps_taken += 1


def sampler_init(gens, G: GroupHandle, r: int | None = None, burn_in: int | None = None, seed: int = 0,
                 epsilon=DEFAULT_EPSILON, stride: int | None = None) -> SamplerState:
    """Product-replacement sampler over ``<gens>``.

    ``stride`` moves are made before each output (default ``r``); a single
    move leaves consecutive outputs visibly correlated.
    """
    gens = [G.check(g) for g in gens]
    low = max(10, len(gens) + 2)
    r = low if r is None else r
    if r < low:
        raise ValueError(f"need at least {low} slots")
    slots = [gens[i % len(gens)] if gens else G.identity for i in range(r)]
    state = SamplerState(G, slots, random.Random(seed), 0, Fraction(epsilon), r if stride is None else stride)
    if burn_in is None:
        burn_in = burn_in_for(r, epsilon)
    for _ in range(burn_in):
        _move(state)
    return state


def sampler_next(state: SamplerState) -> bytes:
    for _ in range(state.stride):
        _move(state)
    return state.slots[state.rng.randrange(len(state.slots))]


# -- solvable-group oracles


def is_solvable(gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> bool:
    return solvable_set(G, tuple(gens), cap)


def _require_solvable(gens, G, cap):
    if not is_solvable(gens, G, cap):
        raise NotSolvableInput("input group is not solvable")


def solvable_order(gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> int:
    _require_solvable(gens, G, cap)
    return len(closure(G, gens, cap))


def solvable_membership(gens, g: bytes, G: GroupHandle, cap: int = DEFAULT_CAP) -> bool:
    _require_solvable(gens, G, cap)
    return G.check(g) in closure(G, gens, cap)


def is_normal_in(H_gens, G_gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> bool:
    H = closure(G, H_gens, cap)
    closure(G, G_gens, cap)
    return all(G.conj(k, h) in H for k in G_gens for h in H_gens)


# -- filtration


@dataclass
class FiltrationResult:
    rad: frozenset
    socstar: frozenset
    pker: frozenset
    factors: list
    rad_gens: tuple
    socstar_gens: tuple
    pker_gens: tuple
    simple_factors: list
    perm_rep: dict
    order: int

    @property
    def k(self) -> int:
        return len(self.factors)


def _solvable_radical(G, gens, cap):
    rad = frozenset([G.identity])
    for N in normal_subgroups(G, gens, cap):
        if solvable_set(G, small_generators(G, N), cap) and not N <= rad:
            rad = join(G, rad, N, cap=cap)
    return rad


def babai_beals_filtration(G_gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> FiltrationResult:
    G_gens = tuple(G_gens)
    whole = closure(G, G_gens, cap)
    gens = small_generators(G, whole)
    rad = _solvable_radical(G, gens, cap)
    soc = rad
    for M in minimal_normal_over(G, gens, rad, cap):
        soc = join(G, soc, M, cap=cap)
    if soc == rad:
        factors = []
    else:
        factors = minimal_normal_over(G, small_generators(G, soc), rad, cap)
        factors.sort(key=sorted)
    witness = [min(T - rad) for T in factors]

    def action(g):
        out = []
        for x in witness:
            y = G.conj(g, x)
            out.append(next(j for j, T in enumerate(factors) if y in T))
        return tuple(out)

    perm_rep = {g: action(g) for g in G_gens}
    fixed = tuple(range(len(factors)))
    pker = frozenset(g for g in whole if action(g) == fixed)
    res = FiltrationResult(
        rad, soc, pker, factors,
        small_generators(G, rad), small_generators(G, soc), small_generators(G, pker),
        [small_generators(G, T) for T in factors], perm_rep, len(whole),
    )
    check_filtration(G, G_gens, res, cap)
    return res


def check_filtration(G: GroupHandle, G_gens, res: FiltrationResult, cap: int = DEFAULT_CAP) -> None:
    """Assert the containments, normality and the four structural properties."""
    whole = closure(G, G_gens, cap)
    chain = [res.rad, res.socstar, res.pker, whole]
    for lo, hi in zip(chain, chain[1:]):
        assert lo <= hi, "filtration is not a chain"
    for N in chain:
        assert is_normalized_by(G, N, G_gens), "filtration member is not normal"
    # (a) Rad solvable
    assert solvable_set(G, res.rad_gens or (G.identity,), cap)
    # (b) Soc*/Rad is the direct product of the T_i/Rad, each non-abelian simple
    prod = len(res.rad)
    for T in res.factors:
        tg = small_generators(G, T)
        assert maximal_normal_over(G, tg, res.rad, cap) == [res.rad], "factor is not simple"
        assert not quotient_solvable(G, tg, res.rad, cap), "factor is abelian"
        prod *= len(T) // len(res.rad)
    assert prod == len(res.socstar), "factors do not multiply out to Soc*"
    # (c) Pker/Soc* solvable
    assert quotient_solvable(G, res.pker_gens or (G.identity,), res.socstar, cap)
    # (d) k <= log|G| / log 60
    assert res.k == 0 or res.k <= math.log(len(whole)) / math.log(60) + 1e-9


# -- composition series


@dataclass
class CompositionSeries:
    chain: list
    factor_names: list
    subgroups: list = field(repr=False, default_factory=list)


def composition_series(G_gens, G: GroupHandle, cap: int = DEFAULT_CAP, seed: int | None = None) -> CompositionSeries:
    """Maximal-normal descent from G to {e}, returned bottom-up.

    With ``seed=None`` ties go to the least sorted code list; otherwise a
    seeded random choice is made (used to exercise Jordan-Hölder).
    """
    rng = random.Random(seed) if seed is not None else None
    top = closure(G, G_gens, cap)
    trivial = frozenset([G.identity])
    series = [top]
    while series[-1] != trivial:
        maxes = maximal_normal_over(G, small_generators(G, series[-1]), trivial, cap)
        maxes.sort(key=sorted)
        series.append(maxes[0] if rng is None else rng.choice(maxes))
    series.reverse()
    names = []
    for lo, hi in zip(series, series[1:]):
        try:
            names.append(identify_quotient(G, small_generators(G, hi), lo, cap))
        except (AmbiguousOrder, UnknownOrder, NotSimple) as exc:
            raise UnknownFactor(str(exc)) from None
    return CompositionSeries([small_generators(G, H) for H in series], names, series)


def factor_multiset(G_gens, G: GroupHandle, cap: int = DEFAULT_CAP) -> list:
    return sorted(composition_series(G_gens, G, cap).factor_names)
