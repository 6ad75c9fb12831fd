"""Command-line front end: prove, verify, attack, demo.

Exit codes: 0 accept, 1 reject, 2 usage or parse error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from fractions import Fraction
from importlib import resources

from .attacks import KINDS, attack_suite
from .errors import (
    BoundUnreachable,
    CapExceeded,
    FieldTooLarge,
    GroupError,
    PreconditionViolated,
    SpecParseError,
    UnsupportedKind,
    WitnessFormatError,
)
from .groups import load_group_spec, mat_inv, mat_mul, mat_pow, ree_generators
from .names import Ree, name_order
from .oracles import babai_beals_filtration
from .protocol import (
    HOMTEST,
    PRESENTATION,
    nice_decomposition,
    order_verify,
    witness_divides_generate,
    witness_ub_generate,
)
from .subgroups import DEFAULT_CAP, closure
from .witness_io import format_lower, format_upper, parse_lower, parse_upper

EXIT_ACCEPT, EXIT_REJECT, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3
THRESHOLD = Fraction(2, 3)
PARAM_KEYS = {
    "outer_iterations": int,
    "maj_trials": int,
    "hom_threshold": Fraction,
    "seed_space": int,
    "failure_fraction": float,
    "route": str,
}


class UsageError(Exception):
    pass


def parse_params(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, val = item.partition("=")
        if not sep or key not in PARAM_KEYS:
            raise UsageError(f"bad --params entry {item!r}; keys: {', '.join(PARAM_KEYS)}")
        try:
            out[key] = PARAM_KEYS[key](val)
        except ValueError:
            raise UsageError(f"bad value for {key}: {val!r}") from None
    if out.get("route", PRESENTATION) not in (PRESENTATION, HOMTEST):
        raise UsageError("route must be presentation or homtest")
    return out


def _load(path):
    if not os.path.exists(path):
        raise UsageError(f"no such group spec: {path}")
    return load_group_spec(path)


def _check_cap(G, cap):
    # closure raises CapExceeded once the group outgrows the cap
    return len(closure(G, G.generators, cap))


# -- commands


def cmd_prove(args) -> int:
    G = _load(args.group)
    params = parse_params(args.params)
    n = _check_cap(G, args.cap)
    m = n if args.m is None else args.m
    if n % m:
        print(f"no honest witness: {m} does not divide the group order", file=sys.stderr)
        return EXIT_REJECT
    upper, _ = witness_ub_generate(G.generators, G, args.cap, params.get("route", PRESENTATION), params)
    lower = witness_divides_generate(G.generators, G, m, args.cap)
    os.makedirs(args.out, exist_ok=True)
    with open(os.path.join(args.out, "lower.wit"), "w") as fh:
        fh.write(format_lower(m, lower))
    with open(os.path.join(args.out, "upper.wit"), "w") as fh:
        fh.write(format_upper(m, upper))
    print(f"m={m}")
    return EXIT_ACCEPT


def _read_witnesses(args):
    with open(args.lower) as fh:
        m_lo, lower = parse_lower(fh.read())
    with open(args.upper) as fh:
        m_up, upper = parse_upper(fh.read())
    if args.m is None and m_lo != m_up:
        raise UsageError(f"witness files claim different orders ({m_lo}, {m_up}); pass --m")
    return (m_lo if args.m is None else args.m), lower, upper


def cmd_verify(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    G = _load(args.group)
    params = parse_params(args.params)
    m, lower, upper = _read_witnesses(args)
    accepted = 0
    for r in range(args.reps):
        ok, tr = order_verify(G.generators, G, m, lower, upper, args.seed + r, args.cap, params)
        accepted += ok
        if args.out:
            os.makedirs(args.out, exist_ok=True)
            with open(os.path.join(args.out, f"transcript_{r:04d}.txt"), "w") as fh:
                fh.write(tr.text())
        if args.verbose:
            print(f"rep {r} seed {args.seed + r} {'accept' if ok else 'reject'}")
            if not ok:
                print("  failed: " + tr.failed.name + (f" ({tr.failed.detail})" if tr.failed.detail else ""))
    frac = Fraction(accepted, args.reps)
    print(f"m={m} accepted {accepted}/{args.reps} fraction {float(frac):.4f}")
    return EXIT_ACCEPT if frac >= THRESHOLD else EXIT_REJECT


def cmd_attack(args) -> int:
    if args.reps < 1:
        raise UsageError("--reps must be at least 1")
    kinds = list(KINDS) if "all" in args.kind else args.kind
    for k in kinds:
        if k not in KINDS:
            raise UnsupportedKind(f"unknown attack kind {k!r}; choose from {', '.join(KINDS)}")
    G = _load(args.group)
    params = parse_params(args.params)
    _check_cap(G, args.cap)
    code = EXIT_ACCEPT
    for k in kinds:
        rejected = 0
        built = set()
        for r in range(args.reps):
            att = attack_suite(k, G.generators, G, args.seed + r, args.cap)
            built.add(att.built)
            ok, _ = order_verify(G.generators, G, att.m, att.lower, att.upper, args.seed + r, args.cap, params)
            rejected += not ok
        frac = Fraction(rejected, args.reps)
        via = "" if built == {k} else f" (built as {', '.join(sorted(built))})"
        if k == "honest":
            print(f"{k}: accepted {args.reps - rejected}/{args.reps} fraction {float(1 - frac):.4f}{via}")
        else:
            print(f"{k}: rejected {rejected}/{args.reps} fraction {float(frac):.4f}{via}")
            if frac < THRESHOLD:
                code = EXIT_REJECT
    return code


def _data_group(name):
    return resources.files("grouporder").joinpath("data", "groups", f"{name}.grp")


def _demo_one(label, G, seed, cap, params, out):
    t0 = time.perf_counter()
    out(f"== {label}")
    f = babai_beals_filtration(G.generators, G, cap)
    out(f"|G| = {f.order}, |Rad| = {len(f.rad)}, |Soc*| = {len(f.socstar)}, |Pker| = {len(f.pker)}, k = {f.k}")
    d = nice_decomposition(G.generators, G, cap)
    out(f"nice decomposition: |H_0| = {len(closure(G, d.H0_gens, cap))}, s = {d.s}")
    route = params.get("route", PRESENTATION)
    upper, m = witness_ub_generate(G.generators, G, cap, route, params)
    lower = witness_divides_generate(G.generators, G, m, cap)
    names = ", ".join(str(fc.name) for fc in upper.factors) or "none"
    out(f"witness: m = {m}, m1 = {upper.m1}, names = {names}, multiset G/Pker = "
        + (", ".join(str(z) for z in upper.multiset) or "empty"))
    out("prime powers: " + (", ".join(f"{c.p}^{c.t}" for c in lower.factors) or "none"))
    ok, tr = order_verify(G.generators, G, m, lower, upper, seed, cap, params)
    for line in tr.lines():
        out("  " + line)
    out(f"({time.perf_counter() - t0:.2f} s)")
    return ok


def _ree_facts(out):
    F, (g1, g2, g3) = ree_generators(1)
    eye = mat_pow(F, g1, 0)
    out("== Ree(27) generators over GF(27)")
    out(f"G2^2 = I: {mat_mul(F, g2, g2) == eye}")
    out(f"G1^9 = I: {mat_pow(F, g1, 9) == eye}; G1^3 = I: {mat_pow(F, g1, 3) == eye}")
    inv_ok = all(mat_mul(F, g, mat_inv(F, g)) == eye for g in (g1, g2, g3))
    out(f"all generators invertible: {inv_ok}")
    out(f"|{Ree(27)}| = {name_order(Ree(27))}")


def cmd_demo(args) -> int:
    params = parse_params(args.params)
    out = print
    ok = True
    if args.group:
        ok = _demo_one(args.group, _load(args.group), args.seed, args.cap, params, out)
    else:
        for name, label in (("a5", "A5"), ("s5", "S5")):
            with resources.as_file(_data_group(name)) as p:
                G = load_group_spec(p)
            ok = _demo_one(label, G, args.seed, args.cap, params, out) and ok
    _ree_facts(out)
    return EXIT_ACCEPT if ok else EXIT_REJECT


# -- argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="grouporder", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest group the brute-force stand-ins enumerate")
    common.add_argument("--params", action="append", metavar="K=V",
                        help="override: " + ", ".join(PARAM_KEYS))
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", parents=[common], help="write honest lower and upper witnesses")
    p.add_argument("group")
    p.add_argument("--m", type=int)
    p.add_argument("--out", default=".")
    p.set_defaults(func=cmd_prove)

    p = sub.add_parser("verify", parents=[common], help="run repeated verifications of a claimed order")
    p.add_argument("group")
    p.add_argument("--m", type=int)
    p.add_argument("--lower", required=True)
    p.add_argument("--upper", required=True)
    p.add_argument("--reps", type=int, default=1)
    p.add_argument("--out", help="directory for transcripts")
    p.add_argument("-v", "--verbose", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("attack", parents=[common], help="measure rejection of cheating witnesses")
    p.add_argument("group")
    p.add_argument("--kind", action="append", default=None, help="attack kind or 'all' (repeatable)")
    p.add_argument("--reps", type=int, default=50)
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("demo", parents=[common], help="walk through the protocol on A5 and S5")
    p.add_argument("--group", help="run the walkthrough on this spec instead")
    p.set_defaults(func=cmd_demo)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_ACCEPT
    if args.command == "attack" and not args.kind:
        args.kind = ["all"]
    try:
        return args.func(args)
    except (UsageError, UnsupportedKind, WitnessFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SpecParseError as exc:
        print(f"error: {args.group}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CapExceeded, FieldTooLarge, BoundUnreachable) as exc:
        print(f"error: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (PreconditionViolated, GroupError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECT


if __name__ == "__main__":
    sys.exit(main())
