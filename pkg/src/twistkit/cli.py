"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 resource bound.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .cache import Cache, green_from_json, green_to_json
from .commmonoid import Int, MonoidError, Nat, parse_monoid
from .diagrams import FAMILIES, PartitionError, enumerate_family
from .eggbox import layout, render
from .matrices import MatrixError
from .product import (ProductError, TwistedProduct, check_stability_transfer, crosscheck_biorder,
                      crosscheck_green, crosscheck_group_h, crosscheck_idempotents, crosscheck_regular,
                      crosscheck_schutzenberger, ig_closure_windowed, ig_predict, omega_idempotents,
                      parse_product_spec, phi_of_dclasses, predict_regular)
from .semigroup import ResourceBoundError, SemigroupError, schutz_group
from .twistings import (TwistingError, parse_base, parse_twisting, verify_cocycle, verify_consequences,
                        verify_star_symmetry, verify_tight)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BOUND = 0, 1, 2, 3

log = logging.getLogger("twistkit")


class UsageError(Exception):
    pass


def _base_label(args) -> str:
    if args.family == "Mat":
        if args.p is None:
            raise UsageError("--family Mat needs --p")
        return f"Mat:{args.n}:{args.p}"
    if args.family == "Eq":
        return f"Eq:{args.n}"
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}")
    return f"{args.family}:{args.n}"


def _print_witness(report, out):
    if report.witness:
        out.write(f"  witness: {json.dumps(report.witness, default=str)}\n")


def cmd_enumerate(args, out, cache):
    if args.family not in FAMILIES:
        raise UsageError(f"unknown family {args.family!r}")
    els = enumerate_family(args.family, args.n)
    if args.json:
        out.write(json.dumps([x.to_json() for x in els]) + "\n")
    else:
        out.write(f"{args.family}_{args.n}: {len(els)} elements\n")
        for x in els:
            out.write(f"{x.to_text() if hasattr(x, 'to_text') else x}\n")
    return EXIT_OK


def cmd_verify(args, out, cache):
    base = parse_base(_base_label(args))
    tw = parse_twisting(args.twisting, base)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    failed = False
    tight = None
    for check in checks:
        if check == "cocycle":
            rep = verify_cocycle(tw)
            out.write(rep.line() + "\n")
            _print_witness(rep, out)
            failed |= rep.passed is False
        elif check == "tight":
            ra, rb = verify_tight(tw)
            tight = bool(ra.passed and rb.passed)
            out.write(f"tight: {ra.status}/{rb.status}\n")
            for rep in (ra, rb):
                _print_witness(rep, out)
            failed |= not tight
        elif check == "star":
            if base.star is None:
                out.write("star: SKIPPED (no involution)\n")
                continue
            rep = verify_star_symmetry(tw)
            out.write(rep.line() + "\n")
            _print_witness(rep, out)
            failed |= rep.passed is False
        elif check == "consequences":
            for rep in verify_consequences(tw, tight=tight):
                out.write(rep.line() + "\n")
                _print_witness(rep, out)
                failed |= rep.passed is False
        else:
            raise UsageError(f"unknown check {check!r}")
    return EXIT_FAIL if failed else EXIT_OK


def _load_product(spec: str, cache: Cache) -> TwistedProduct:
    T = parse_product_spec(spec)
    if T._S is not None:
        key = f"green|{spec}"
        hit = cache.load(key)
        if hit is not None and len(hit["classes"]["r"]) == len(T.materialized):
            T._G = green_from_json(hit)
        else:
            cache.store(key, green_to_json(T.green))
    return T


def cmd_product(args, out, cache):
    T = _load_product(args.spec, cache)
    P = T.materialized
    G = T.green
    out.write(f"{args.spec}: {len(P)} elements, twisting {'tight' if T.tight else 'loose'}\n")
    reports = []
    if args.green:
        out.write(f"J-classes: {G.num('j')}, D-classes: {G.num('d')}, H-classes: {G.num('h')}\n")
        out.write(f"J covers: {G.j_cover}\n")
        if args.crosscheck:
            reports.append(crosscheck_green(T))
    if args.idempotents:
        out.write(f"idempotents: {len(G.idempotents)}\n")
        if T.tight:
            for i, e, p in omega_idempotents(T):
                out.write(f"  eps({T.M.format(i)},{T.S.elements[e]}) = ({T.M.format(p)},{T.S.elements[e]})\n")
            if args.crosscheck:
                reports.append(crosscheck_idempotents(T))
        else:
            out.write("  predictor skipped (loose)\n")
    if args.regular:
        out.write(f"regular elements: {len(G.regular)} of {len(P)}\n")
        if T.tight:
            phiD = phi_of_dclasses(T)
            out.write(f"Phi(D) by D-class of S: {dict(sorted(phiD.items()))}\n")
            _, _, is_reg = predict_regular(T)
            out.write(f"predicted regular: {is_reg}\n")
            if args.crosscheck:
                reports.append(crosscheck_regular(T))
        else:
            out.write("  predictor skipped (loose)\n")
    if args.schutz:
        for h in sorted(G.h_members):
            g = schutz_group(P, G, h)
            out.write(f"H{h} {P.elements[G.h_members[h][0]]}: order {g.order}, orders {list(g.element_orders)}\n")
        if args.crosscheck and T.tight:
            reports += [crosscheck_schutzenberger(T), crosscheck_group_h(T)]
    if args.biorder:
        if T.tight:
            reports.append(crosscheck_biorder(T))
        else:
            out.write("biorder: predictor skipped (loose)\n")
    if args.stability:
        reports.append(check_stability_transfer(T))
    failed = False
    for rep in reports:
        out.write(rep.line() + "\n")
        _print_witness(rep, out)
        failed |= rep.passed is False
    return EXIT_FAIL if failed else EXIT_OK


def cmd_eggbox(args, out, cache):
    if args.spec:
        T = _load_product(args.spec, cache)
        P = T.materialized
        eb = layout(T.green, lambda x: str(P.elements[x]),
                    lambda x: T.M.format(T.coords(x)[0]) if T.M.kind == "zeroinf" else "none")
    elif args.family and args.n:
        base = parse_base(_base_label(args))
        eb = layout(base.green, lambda x: str(base.S.elements[x]))
    else:
        raise UsageError("eggbox needs --spec or --family with --n")
    text = render(eb, args.format)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def cmd_ig(args, out, cache):
    parts = args.spec.split("|")
    M = parse_monoid(parts[0]) if parts else None
    if isinstance(M, (Nat, Int)):
        if len(parts) != 4 or not parts[1].startswith("q="):
            raise UsageError(f"malformed product spec {args.spec!r}")
        base = parse_base(parts[2])
        tw = parse_twisting(parts[3], base)
        res = ig_closure_windowed(base, tw, M, args.window, q=int(parts[1][2:]))
        out.write(f"window {res.window}, inner {res.inner}: {len(res.found)} found, "
                  f"{len(res.predicted)} predicted\n")
        out.write(f"verdict: {res.verdict}\n")
        if res.missing:
            out.write(f"  missing: {sorted(res.missing)[:10]}\n")
        if res.unexpected:
            out.write(f"  unexpected: {sorted(res.unexpected)[:10]}\n")
        return EXIT_FAIL if res.verdict == "refuted" else EXIT_OK
    T = _load_product(args.spec, cache)
    predicted, rep = ig_predict(T)
    out.write(rep.line() + "\n")
    _print_witness(rep, out)
    return EXIT_FAIL if rep.passed is False else EXIT_OK


def cmd_cache(args, out, cache):
    if args.clear:
        out.write(f"removed {cache.clear()} entries\n")
    else:
        out.write(json.dumps(cache.stats()) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twistkit", description="Twisted products of monoids.")
    p.add_argument("--cache-dir", default=None)
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("enumerate", help="list a diagram family")
    e.add_argument("--family", required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_enumerate)

    v = sub.add_parser("verify", help="check twisting axioms")
    v.add_argument("--family", required=True, help="diagram family, Mat (with --p) or Eq")
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--p", type=int, default=None)
    v.add_argument("--twisting", required=True)
    v.add_argument("--checks", default="cocycle,tight,star,consequences")
    v.set_defaults(func=cmd_verify)

    pr = sub.add_parser("product", help="analyse a twisted product")
    pr.add_argument("--spec", required=True)
    for flag in ("green", "idempotents", "regular", "schutz", "biorder", "stability", "crosscheck"):
        pr.add_argument(f"--{flag}", action="store_true")
    pr.set_defaults(func=cmd_product)

    eg = sub.add_parser("eggbox", help="render egg-box diagrams")
    eg.add_argument("--spec")
    eg.add_argument("--family")
    eg.add_argument("--n", type=int)
    eg.add_argument("--p", type=int, default=None)
    eg.add_argument("--format", choices=("dot", "ascii", "json"), default="ascii")
    eg.add_argument("--out")
    eg.set_defaults(func=cmd_eggbox)

    ig = sub.add_parser("ig", help="idempotent-generated submonoid")
    ig.add_argument("--spec", required=True)
    ig.add_argument("--window", type=int, default=4)
    ig.set_defaults(func=cmd_ig)

    c = sub.add_parser("cache", help="inspect or clear the cache")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--clear", action="store_true")
    g.add_argument("--stats", action="store_true")
    c.set_defaults(func=cmd_cache)
    return p


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    cache = Cache(args.cache_dir)
    try:
        return args.func(args, out, cache)
    except ResourceBoundError as exc:
        err.write(f"resource bound: {exc}\n")
        return EXIT_BOUND
    except (UsageError, ProductError, TwistingError, MonoidError, PartitionError, MatrixError,
            SemigroupError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE


def main():
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
