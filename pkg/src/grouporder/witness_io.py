"""Sectioned text format for order witnesses.

Element codes are hex.  Certificates reuse the ``[slp]``, ``[norm]`` and
``[sol]`` blocks; a list of them is introduced by ``[certs <label> <n>]`` and a
missing relator certificate is written ``none``.
"""

from __future__ import annotations

from .errors import WitnessFormatError
from .homtest import IsoWitness
from .names import FactorChainWitness, FactorLevel, IsoPresentationWitness, format_name, parse_name
from .protocol import (
    HOMTEST,
    PRESENTATION,
    FactorClaim,
    OrderWitnessDividedBy,
    OrderWitnessDivides,
    PrimePowerClaim,
)
from .slp import (
    LineReader,
    format_norm_block,
    format_slp_block,
    format_sol_block,
    parse_norm_block,
    parse_slp_block,
    parse_sol_block,
)

LOWER_HEADER = "grouporder-witness lower 1"
UPPER_HEADER = "grouporder-witness upper 1"


def _codes(label, codes) -> list:
    return [" ".join([label] + [bytes(g).hex() for g in codes])]


def _read_codes(rd: LineReader, label: str) -> tuple:
    return tuple(bytes.fromhex(h) for h in rd.expect(label))


def _certs(label, certs) -> list:
    lines = [f"[certs {label} {len(certs)}]"]
    for c in certs:
        lines += ["none"] if c is None else format_slp_block(c)
    return lines


def _read_certs(rd: LineReader, label: str) -> tuple:
    head = rd.expect("[certs")
    if not head or head[0] != label:
        raise ValueError(f"line {rd.lineno()}: expected certificate list {label!r}")
    n = int(head[1].rstrip("]"))
    out = []
    for _ in range(n):
        if rd.peek() == "none":
            rd.next()
            out.append(None)
        else:
            out.append(parse_slp_block(rd))
    return tuple(out)


def _presentation_lines(w: IsoPresentationWitness) -> list:
    return (_codes("images", w.images) + _certs("image", w.image_certs)
            + _certs("generation", w.generation_certs) + _certs("relator", w.relator_certs))


def _read_presentation(rd: LineReader) -> IsoPresentationWitness:
    return IsoPresentationWitness(_read_codes(rd, "images"), _read_certs(rd, "image"),
                                  _read_certs(rd, "generation"), _read_certs(rd, "relator"))


def _homtest_lines(w: IsoWitness) -> list:
    return _codes("images", w.images) + _certs("image", w.membership_certs) + _certs("generation", w.generation_certs)


def _read_homtest(rd: LineReader) -> IsoWitness:
    return IsoWitness(_read_codes(rd, "images"), _read_certs(rd, "image"), _read_certs(rd, "generation"))


# -- lower half


def format_lower(m: int, w: OrderWitnessDivides) -> str:
    lines = [LOWER_HEADER, f"m {m}", f"[factors] {len(w.factors)}"]
    for c in w.factors:
        lines.append(f"[prime {c.p} {c.t}]")
        lines += _codes("gens", c.gens)
        lines += _certs("member", c.certs)
    return "\n".join(lines) + "\n"


def parse_lower(text: str) -> tuple:
    """``(m, OrderWitnessDivides)``."""
    rd = LineReader.from_text(text)
    try:
        if rd.next() != LOWER_HEADER:
            raise ValueError("line 1: not a lower witness")
        (m,) = rd.expect("m")
        (n,) = rd.expect("[factors]")
        out = []
        for _ in range(int(n)):
            p, t = rd.expect("[prime")
            gens = _read_codes(rd, "gens")
            out.append(PrimePowerClaim(int(p), int(t.rstrip("]")), gens, _read_certs(rd, "member")))
        return int(m), OrderWitnessDivides(tuple(out))
    except Exception as exc:  # any parse failure is a format error
        raise WitnessFormatError(f"lower witness: {exc}") from None


# -- upper half


def format_upper(m: int, w: OrderWitnessDividedBy) -> str:
    lines = [UPPER_HEADER, f"m {m}", f"m1 {w.m1}"]
    lines += _codes("h", w.h) + _codes("k", w.k) + _codes("beta", w.beta) + _codes("gamma", w.gamma)
    lines.append("[i membership]")
    lines += _certs("member", w.member_certs)
    lines.append("[ii normality]")
    lines += format_norm_block(w.norm_K) + format_norm_block(w.norm_Hs)
    lines.append(f"[links] {len(w.norm_links)}")
    for c in w.norm_links:
        lines += format_norm_block(c)
    lines.append("[iii solvability]")
    lines += format_sol_block(w.sol)
    lines.append(f"[iv multiset] {len(w.multiset)}")
    lines += [format_name(z) for z in w.multiset]
    fc = w.factor_chain
    lines.append(f"[chain] {len(fc.levels)}")
    for lv in fc.levels:
        lines.append(format_name(lv.name))
        lines += _codes("extra", lv.extra)
        lines += format_norm_block(lv.normality)
        lines += _presentation_lines(lv.iso)
    lines += _certs("top", fc.top_certs) + _certs("chainmember", fc.extra_certs)
    lines.append(f"[v names] {len(w.factors)}")
    for f in w.factors:
        lines.append(format_name(f.name))
        lines.append(f"mode {f.mode}")
        lines += _presentation_lines(f.witness) if f.mode == PRESENTATION else _homtest_lines(f.witness)
    return "\n".join(lines) + "\n"


def parse_upper(text: str) -> tuple:
    """``(m, OrderWitnessDividedBy)``."""
    rd = LineReader.from_text(text)
    try:
        if rd.next() != UPPER_HEADER:
            raise ValueError("line 1: not an upper witness")
        (m,) = rd.expect("m")
        (m1,) = rd.expect("m1")
        h, k = _read_codes(rd, "h"), _read_codes(rd, "k")
        beta, gamma = _read_codes(rd, "beta"), _read_codes(rd, "gamma")
        rd.expect("[i")
        member = _read_certs(rd, "member")
        rd.expect("[ii")
        norm_K, norm_Hs = parse_norm_block(rd), parse_norm_block(rd)
        (n,) = rd.expect("[links]")
        links = tuple(parse_norm_block(rd) for _ in range(int(n)))
        rd.expect("[iii")
        sol = parse_sol_block(rd)
        n = int(rd.expect("[iv")[-1])
        multiset = tuple(parse_name(rd.next().split()) for _ in range(n))
        (n,) = rd.expect("[chain]")
        levels = []
        for _ in range(int(n)):
            name = parse_name(rd.next().split())
            extra = _read_codes(rd, "extra")
            levels.append(FactorLevel(extra, name, parse_norm_block(rd), _read_presentation(rd)))
        chain = FactorChainWitness(tuple(levels), _read_certs(rd, "top"), _read_certs(rd, "chainmember"))
        n = int(rd.expect("[v")[-1])
        factors = []
        for _ in range(n):
            name = parse_name(rd.next().split())
            (mode,) = rd.expect("mode")
            if mode == PRESENTATION:
                wit = _read_presentation(rd)
            elif mode == HOMTEST:
                wit = _read_homtest(rd)
            else:
                raise ValueError(f"line {rd.lineno()}: unknown mode {mode!r}")
            factors.append(FactorClaim(name, mode, wit))
        if rd.peek() is not None:
            raise ValueError(f"line {rd.lineno() + 1}: trailing content")
        w = OrderWitnessDividedBy(int(m1), h, k, beta, gamma, member, norm_K, norm_Hs, links, sol,
                                  multiset, chain, tuple(factors))
        return int(m), w
    except WitnessFormatError:
        raise
    except Exception as exc:  # any parse failure is a format error
        raise WitnessFormatError(f"upper witness: {exc}") from None
