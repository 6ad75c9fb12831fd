"""Straight-line programs and the membership / normality / solvability certificates.

An instruction is a tuple: ``("G", i)`` fetches generator ``i``, ``("I", j)``
inverts the element computed at position ``j``, ``("M", j, k)`` multiplies
positions ``j`` and ``k``.  References always point strictly backwards.  The
empty program evaluates to the identity.

Honest membership certificates come from a cube construction: grow cubes
``C = {z_1^e1 ... z_k^ek}`` until ``C^-1 C`` covers the subgroup, where each
new ``z`` is a cheap element of ``C^-1 C`` times a generator.  Every element
is then ``c^-1 c'`` for two cube words.  A plain word search is also tried and
the shorter program is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import BoundUnreachable, CapExceeded, IndexOutOfRange, InvalidCode, NotAMember, NotNormal, NotSolvable
from .field import is_prime
from .groups import GroupHandle
from .subgroups import DEFAULT_CAP, closure, is_normalized_by, maximal_normal_over, small_generators

LOG_BASE = 2


def Gen(i: int):
    return ("G", i)


def Inv(j: int):
    return ("I", j)


def Mul(j: int, k: int):
    return ("M", j, k)


@dataclass(frozen=True)
class StraightLineProgram:
    instructions: tuple = ()

    def __len__(self):
        return len(self.instructions)

    def __iter__(self):
        return iter(self.instructions)


def _as_slp(slp) -> StraightLineProgram:
    if isinstance(slp, StraightLineProgram):
        return slp
    return StraightLineProgram(tuple(tuple(ins) for ins in slp))


def slp_eval(slp, gens, G: GroupHandle) -> bytes:
    """Evaluate ``slp`` over ``gens``; returns the last computed element."""
    slp = _as_slp(slp)
    vals: list = []
    for pos, ins in enumerate(slp.instructions):
        op = ins[0]
        if op == "G":
            if not 0 <= ins[1] < len(gens):
                raise IndexOutOfRange(f"instruction {pos}: generator {ins[1]} of {len(gens)}")
            vals.append(G.check(gens[ins[1]]))
        elif op == "I":
            if not 0 <= ins[1] < pos:
                raise IndexOutOfRange(f"instruction {pos}: reference {ins[1]}")
            vals.append(G._inv(vals[ins[1]]))
        elif op == "M":
            if not (0 <= ins[1] < pos and 0 <= ins[2] < pos):
                raise IndexOutOfRange(f"instruction {pos}: reference {ins[1:]}")
            vals.append(G._mul(vals[ins[1]], vals[ins[2]]))
        else:
            raise IndexOutOfRange(f"instruction {pos}: unknown opcode {op!r}")
    return vals[-1] if vals else G.identity


def cert_bound(N: int) -> int:
    """``ceil((1 + log N)^2)`` with the logarithm in base :data:`LOG_BASE`."""
    if N < 1:
        raise ValueError("N must be positive")
    return math.ceil((1 + math.log(N, LOG_BASE)) ** 2 - 1e-9)


# -- certificates


@dataclass(frozen=True)
class MembershipCertificate:
    slp: StraightLineProgram
    target: bytes
    generator_list_id: str = ""


@dataclass(frozen=True)
class NormalityCertificate:
    """``grid[i][j]`` certifies ``g_j h_i g_j^-1`` in ``<h>``."""

    grid: tuple = ()


@dataclass(frozen=True)
class SolvabilityCertificate:
    """Certifies that ``<base, G_gens> / <base>`` is solvable of order dividing ``prod(primes)``.

    ``cover_certs`` put each generator of the group into ``<base, chain>``;
    without them the chain could describe a proper subgroup.
    """

    primes: tuple = ()
    chain: tuple = ()
    member_certs: tuple = ()
    normality_certs: tuple = ()
    power_certs: tuple = ()
    cover_certs: tuple = ()


# -- honest generation


class _Reach:
    """Cube data for one generator list, shared by all targets."""

    def __init__(self, G: GroupHandle, gens: tuple, cap: int):
        self.G, self.gens = G, gens
        self.elements = closure(G, gens, cap)
        mul, inv = G._mul, G._inv
        e = G.identity
        # z_j = D[y] * gens[s]; stored as (m1, m2, s)
        self.z: list = []
        self.zval: list = []
        D = {e: (0, 0)}
        while len(D) < len(self.elements):
            best = None
            for y, (m1, m2) in D.items():
                cost = bin(m1).count("1") + bin(m2).count("1")
                if best is not None and cost >= best[0]:
                    continue
                for s, g in enumerate(gens):
                    if mul(y, g) not in D:
                        best = (cost, y, m1, m2, s)
                        break
            _, y, m1, m2, s = best
            zv = mul(y, gens[s])
            bit = 1 << len(self.z)
            self.z.append((m1, m2, s))
            self.zval.append(zv)
            zi = inv(zv)
            new = {}
            for x, (a, b) in D.items():
                # (c1 z)^-1 c2 = z^-1 x ; c1^-1 (c2 z) = x z ; (c1 z)^-1 (c2 z)
                xz = mul(x, zv)
                for val, masks in ((mul(zi, x), (a | bit, b)), (xz, (a, b | bit)), (mul(zi, xz), (a | bit, b | bit))):
                    if val not in D and val not in new:
                        new[val] = masks
            D.update(new)
        self.D = D
        self._words = None

    def words(self):
        """Shortest words over gens and their inverses (BFS), as parent pointers."""
        if self._words is None:
            G = self.G
            letters = [(i, False) for i in range(len(self.gens))] + [(i, True) for i in range(len(self.gens))]
            vals = [self.gens[i] if not neg else G._inv(self.gens[i]) for i, neg in letters]
            parent = {G.identity: None}
            frontier = [G.identity]
            while frontier:
                nxt = []
                for x in frontier:
                    for li, v in enumerate(vals):
                        y = G._mul(x, v)
                        if y not in parent:
                            parent[y] = (x, letters[li])
                            nxt.append(y)
                frontier = nxt
            self._words = parent
        return self._words


class _Builder:
    def __init__(self, reach: _Reach):
        self.r = reach
        self.ins: list = []
        self.memo: dict = {}

    def emit(self, key, ins):
        if key in self.memo:
            return self.memo[key]
        self.ins.append(ins)
        self.memo[key] = len(self.ins) - 1
        return self.memo[key]

    def gen(self, i):
        return self.emit(("gen", i), Gen(i))

    def inv(self, slot):
        return self.emit(("inv", slot), Inv(slot))

    def mul(self, a, b):
        return self.emit(("mul", a, b), Mul(a, b))

    def zslot(self, j):
        if ("z", j) in self.memo:
            return self.memo[("z", j)]
        m1, m2, s = self.r.z[j]
        g = self.gen(s)
        y = self.dslot(m1, m2)
        slot = g if y is None else self.mul(y, g)
        self.memo[("z", j)] = slot
        return slot

    def cslot(self, mask):
        if mask == 0:
            return None
        if ("c", mask) in self.memo:
            return self.memo[("c", mask)]
        hi = mask.bit_length() - 1
        rest = mask & ~(1 << hi)
        z = self.zslot(hi)
        slot = z if rest == 0 else self.mul(self.cslot(rest), z)
        self.memo[("c", mask)] = slot
        return slot

    def dslot(self, m1, m2):
        # strip a shared prefix: (P A)^-1 (P B) = A^-1 B
        while m1 and m2 and (m1 & -m1) == (m2 & -m2):
            low = m1 & -m1
            m1 &= ~low
            m2 &= ~low
        if not m1 and not m2:
            return None
        if not m1:
            return self.cslot(m2)
        a = self.inv(self.cslot(m1))
        if not m2:
            return a
        return self.mul(a, self.cslot(m2))


def _cube_slp(reach: _Reach, target: bytes) -> list:
    b = _Builder(reach)
    m1, m2 = reach.D[target]
    slot = b.dslot(m1, m2)
    if slot != len(b.ins) - 1:
        # result was an intermediate; invert twice so it ends the program
        b.ins.append(Inv(slot))
        b.ins.append(Inv(len(b.ins) - 1))
    return b.ins


def _word_slp(reach: _Reach, target: bytes) -> list:
    parent = reach.words()
    letters = []
    x = target
    while parent[x] is not None:
        x, letter = parent[x]
        letters.append(letter)
    letters.reverse()
    ins: list = []
    slots: dict = {}
    acc = None
    for i, neg in letters:
        if (i, False) not in slots:
            ins.append(Gen(i))
            slots[(i, False)] = len(ins) - 1
        if neg and (i, True) not in slots:
            ins.append(Inv(slots[(i, False)]))
            slots[(i, True)] = len(ins) - 1
        cur = slots[(i, neg)]
        if acc is None:
            acc = cur
        else:
            ins.append(Mul(acc, cur))
            acc = len(ins) - 1
    return ins


def _reach(G: GroupHandle, gens: tuple, cap: int) -> _Reach:
    key = ("reach", gens)
    hit = G.cache.get(key)
    if hit is None:
        hit = _Reach(G, gens, cap)
        G.cache[key] = hit
    elif len(hit.elements) > cap:
        raise CapExceeded(f"subgroup has more than {cap} elements")
    return hit


def identity_slp(ngens: int) -> StraightLineProgram:
    if ngens == 0:
        return StraightLineProgram(())
    return StraightLineProgram((Gen(0), Inv(0), Mul(0, 1)))


def mem_cert_generate(target: bytes, gens, G: GroupHandle, size_cap: int = DEFAULT_CAP,
                      generator_list_id: str = "") -> MembershipCertificate:
    """Honest membership certificate for ``target`` in ``<gens>``."""
    gens = tuple(G.check(g) for g in gens)
    target = G.check(target)
    if target == G.identity:
        slp = identity_slp(len(gens))
        if len(slp) > cert_bound(G.order_bound):
            slp = StraightLineProgram(())  # N = 1: the empty program reaches e
        return MembershipCertificate(slp, target, generator_list_id)
    reach = _reach(G, gens, size_cap)
    if target not in reach.elements:
        raise NotAMember(f"{G.describe(target)} is not in the generated subgroup")
    cube = _cube_slp(reach, target)
    best = cube
    if len(reach.elements) <= 20000:
        word = _word_slp(reach, target)
        if len(word) < len(cube):
            best = word
    bound = cert_bound(G.order_bound)
    if len(best) > bound:
        raise BoundUnreachable(f"certificate of length {len(best)} exceeds bound {bound}")
    return MembershipCertificate(StraightLineProgram(tuple(best)), target, generator_list_id)


def mem_cert_check(cert: MembershipCertificate, gens, G: GroupHandle) -> tuple:
    """``(ok, reason)``; never raises."""
    try:
        slp = _as_slp(cert.slp)
        bound = cert_bound(G.order_bound)
        if len(slp) > bound:
            return False, f"length {len(slp)} exceeds bound {bound}"
        if not isinstance(cert.target, (bytes, bytearray)) or not G.is_valid(bytes(cert.target)):
            return False, "target is not a valid code"
        value = slp_eval(slp, list(gens), G)
    except (IndexOutOfRange, InvalidCode) as exc:
        return False, str(exc)
    except (TypeError, ValueError, IndexError) as exc:
        return False, f"malformed certificate: {exc}"
    if value != bytes(cert.target):
        return False, "program does not reach the target"
    return True, "ok"


def mem_cert_verify(cert: MembershipCertificate, gens, G: GroupHandle) -> bool:
    return mem_cert_check(cert, gens, G)[0]


def norm_cert_generate(H_gens, G_gens, G: GroupHandle, size_cap: int = DEFAULT_CAP) -> NormalityCertificate:
    H_gens = tuple(H_gens)
    H = closure(G, H_gens, size_cap)
    grid = []
    for h in H_gens:
        row = []
        for g in G_gens:
            c = G.conj(g, h)
            if c not in H:
                raise NotNormal(f"{G.describe(g)} conjugates {G.describe(h)} outside the subgroup")
            row.append(mem_cert_generate(c, H_gens, G, size_cap))
        grid.append(tuple(row))
    return NormalityCertificate(tuple(grid))


def norm_cert_check(cert: NormalityCertificate, H_gens, G_gens, G: GroupHandle) -> tuple:
    grid = cert.grid
    if len(grid) != len(H_gens) or any(len(row) != len(G_gens) for row in grid):
        return False, "grid shape does not match generator lists"
    for i, h in enumerate(H_gens):
        for j, g in enumerate(G_gens):
            cell = grid[i][j]
            try:
                expect = G.conj(g, h)
            except InvalidCode as exc:
                return False, str(exc)
            if bytes(cell.target) != expect:
                return False, f"cell ({i},{j}) certifies the wrong conjugate"
            ok, why = mem_cert_check(cell, H_gens, G)
            if not ok:
                return False, f"cell ({i},{j}): {why}"
    return True, "ok"


def norm_cert_verify(cert: NormalityCertificate, H_gens, G_gens, G: GroupHandle) -> bool:
    return norm_cert_check(cert, H_gens, G_gens, G)[0]


def sol_cert_generate(G_gens, G: GroupHandle, size_cap: int = DEFAULT_CAP, base=()) -> tuple:
    """Honest certificate that ``<base, G_gens>/<base>`` is solvable; returns ``(cert, m)``.

    ``m`` is the exact quotient order.  The chain follows a composition
    series obtained by maximal-normal descent with lexicographic tie-break.
    """
    base = tuple(base)
    G_gens = tuple(G_gens)
    K = closure(G, base + G_gens, size_cap)
    B = closure(G, base, size_cap)
    if not B <= K or not is_normalized_by(G, B, base + G_gens):
        raise NotNormal("base subgroup is not normal in the group")
    series = [K]
    while series[-1] != B:
        top = series[-1]
        maxes = maximal_normal_over(G, small_generators(G, top), B, size_cap)
        nxt = min(maxes, key=sorted)
        series.append(nxt)
    primes, chain = [], []
    for upper, lower in zip(reversed(series[:-1]), reversed(series[1:])):
        p = len(upper) // len(lower)
        if not is_prime(p):
            raise NotSolvable(f"composition factor of order {p} is not cyclic of prime order")
        primes.append(p)
        chain.append(min(upper - lower))
    member = tuple(mem_cert_generate(g, base + G_gens, G, size_cap) for g in chain)
    norms, powers = [], []
    for i, (p, g) in enumerate(zip(primes, chain)):
        lower = base + tuple(chain[:i])
        norms.append(norm_cert_generate(lower, lower + (g,), G, size_cap))
        powers.append(mem_cert_generate(G.power(g, p), lower, G, size_cap))
    full = base + tuple(chain)
    cover = tuple(mem_cert_generate(g, full, G, size_cap) for g in G_gens)
    m = math.prod(primes)
    cert = SolvabilityCertificate(tuple(primes), tuple(chain), member, tuple(norms), tuple(powers), cover)
    return cert, m


def sol_cert_check(cert: SolvabilityCertificate, G_gens, G: GroupHandle, m: int, base=()) -> tuple:
    base = tuple(base)
    G_gens = tuple(G_gens)
    primes, chain = tuple(cert.primes), tuple(cert.chain)
    if any(not is_prime(p) for p in primes):
        return False, "non-prime in prime list"
    if math.prod(primes) != m:
        return False, f"primes multiply to {math.prod(primes)}, not {m}"
    s = len(primes)
    if not (len(chain) == len(cert.member_certs) == len(cert.normality_certs) == len(cert.power_certs) == s):
        return False, "certificate lists have inconsistent lengths"
    if len(cert.cover_certs) != len(G_gens):
        return False, "missing cover certificates"
    full_gens = base + G_gens
    try:
        for i, g in enumerate(chain):
            mc = cert.member_certs[i]
            if bytes(mc.target) != bytes(g):
                return False, f"membership certificate {i} has the wrong target"
            ok, why = mem_cert_check(mc, full_gens, G)
            if not ok:
                return False, f"membership {i}: {why}"
            lower = base + chain[:i]
            ok, why = norm_cert_check(cert.normality_certs[i], lower, lower + (g,), G)
            if not ok:
                return False, f"normality {i}: {why}"
            pc = cert.power_certs[i]
            if bytes(pc.target) != G.power(g, primes[i]):
                return False, f"power certificate {i} has the wrong target"
            ok, why = mem_cert_check(pc, lower, G)
            if not ok:
                return False, f"power {i}: {why}"
        for j, g in enumerate(G_gens):
            cc = cert.cover_certs[j]
            if bytes(cc.target) != bytes(g):
                return False, f"cover certificate {j} has the wrong target"
            ok, why = mem_cert_check(cc, base + chain, G)
            if not ok:
                return False, f"cover {j}: {why}"
    except InvalidCode as exc:
        return False, str(exc)
    return True, "ok"


def sol_cert_verify(cert: SolvabilityCertificate, G_gens, G: GroupHandle, m: int, base=()) -> bool:
    return sol_cert_check(cert, G_gens, G, m, base)[0]


# -- attacks on certificates


def pad_slp(slp, extra_pairs: int) -> StraightLineProgram:
    """Append identity-producing pairs, then return to the original value.

    Each pair is ``Inv(0), Mul(0, inv)`` (generator times its inverse).  The
    padded program still evaluates to the original target.
    """
    ins = list(_as_slp(slp).instructions)
    if not ins:
        ins = [Gen(0)]
        result_slot = None
    else:
        result_slot = len(ins) - 1
    for _ in range(extra_pairs):
        ins.append(Inv(0))
        ins.append(Mul(0, len(ins) - 1))
    if result_slot is None:
        ins.append(Mul(len(ins) - 1, len(ins) - 1))
    else:
        ins.append(Mul(result_slot, len(ins) - 1))
    return StraightLineProgram(tuple(ins))


def padded_beyond_bound(cert: MembershipCertificate, G: GroupHandle) -> MembershipCertificate:
    bound = cert_bound(G.order_bound)
    pairs = max(1, (bound - len(cert.slp)) // 2 + 1)
    return MembershipCertificate(pad_slp(cert.slp, pairs), cert.target, cert.generator_list_id)


# -- text serialization


def format_slp_block(cert: MembershipCertificate) -> list:
    lines = [f"[slp] {len(cert.slp)}"]
    for ins in cert.slp:
        lines.append(" ".join(str(x) for x in ins))
    lines.append(f"target {bytes(cert.target).hex()}")
    return lines


def format_norm_block(cert: NormalityCertificate) -> list:
    rows = len(cert.grid)
    cols = len(cert.grid[0]) if rows else 0
    lines = [f"[norm] {rows} {cols}"]
    for i, row in enumerate(cert.grid):
        for j, cell in enumerate(row):
            lines.append(f"[cell {i} {j}]")
            lines += format_slp_block(cell)
    return lines


def format_sol_block(cert: SolvabilityCertificate) -> list:
    lines = [f"[sol] {len(cert.primes)} {len(cert.cover_certs)}"]
    lines.append("primes " + " ".join(str(p) for p in cert.primes))
    lines.append("chain " + " ".join(bytes(g).hex() for g in cert.chain))
    for i in range(len(cert.primes)):
        lines.append(f"[member {i}]")
        lines += format_slp_block(cert.member_certs[i])
        lines.append(f"[normal {i}]")
        lines += format_norm_block(cert.normality_certs[i])
        lines.append(f"[power {i}]")
        lines += format_slp_block(cert.power_certs[i])
    for j, c in enumerate(cert.cover_certs):
        lines.append(f"[cover {j}]")
        lines += format_slp_block(c)
    return lines


@dataclass
class LineReader:
    """Cursor over non-blank, comment-free lines."""

    lines: list
    pos: int = 0
    offsets: list = field(default_factory=list)

    @classmethod
    def from_text(cls, text: str) -> "LineReader":
        kept, offs = [], []
        for n, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if line:
                kept.append(line)
                offs.append(n)
        return cls(kept, 0, offs)

    def peek(self):
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def next(self) -> str:
        if self.pos >= len(self.lines):
            raise ValueError("unexpected end of input")
        self.pos += 1
        return self.lines[self.pos - 1]

    def expect(self, head: str) -> list:
        line = self.next()
        parts = line.split()
        if parts[0] != head:
            raise ValueError(f"line {self.lineno()}: expected {head!r}, got {line!r}")
        return parts[1:]

    def lineno(self) -> int:
        return self.offsets[self.pos - 1] if self.offsets and self.pos else 0


def parse_slp_block(rd: LineReader) -> MembershipCertificate:
    (n,) = rd.expect("[slp]")
    ins = []
    for _ in range(int(n)):
        parts = rd.next().split()
        op, args = parts[0], tuple(int(x) for x in parts[1:])
        if op not in ("G", "I", "M") or len(args) != (2 if op == "M" else 1):
            raise ValueError(f"line {rd.lineno()}: bad instruction")
        ins.append((op,) + args)
    (hexcode,) = rd.expect("target")
    return MembershipCertificate(StraightLineProgram(tuple(ins)), bytes.fromhex(hexcode))


def parse_norm_block(rd: LineReader) -> NormalityCertificate:
    rows, cols = (int(x) for x in rd.expect("[norm]"))
    grid = []
    for i in range(rows):
        row = []
        for j in range(cols):
            rd.expect("[cell")
            row.append(parse_slp_block(rd))
        grid.append(tuple(row))
    return NormalityCertificate(tuple(grid))


def parse_sol_block(rd: LineReader) -> SolvabilityCertificate:
    s, c = (int(x) for x in rd.expect("[sol]"))
    primes = tuple(int(p) for p in rd.expect("primes"))
    chain = tuple(bytes.fromhex(h) for h in rd.expect("chain"))
    member, norms, powers, cover = [], [], [], []
    for _ in range(s):
        rd.expect("[member")
        member.append(parse_slp_block(rd))
        rd.expect("[normal")
        norms.append(parse_norm_block(rd))
        rd.expect("[power")
        powers.append(parse_slp_block(rd))
    for _ in range(c):
        rd.expect("[cover")
        cover.append(parse_slp_block(rd))
    return SolvabilityCertificate(primes, chain, tuple(member), tuple(norms), tuple(powers), tuple(cover))
