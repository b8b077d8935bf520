"""Command-line front end.

Exit codes: 0 success, 1 a condition/decode check failed or the search found
nothing, 2 usage or precondition error, 3 search budget exceeded.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from .arrays import CachingArray, DeliveryArray, Epda, verify_caching_array, \
    verify_delivery_array, verify_epda
from .constructions import (DEFAULT_SEARCH_BUDGET, generalized_construct, lemma1_construct,
                            optimal_construct, search_epda)
from .errors import MaccError, ParameterError, SearchBudgetError
from .formats import emit_report, read_array, write_array
from .grid import NetworkParams, as_fraction
from .scheme import compute_ndt, run_trials

OK, FAILED, USAGE, BUDGET = 0, 1, 2, 3


def _seed(text: str) -> int:
    if not text.isdigit():
        raise argparse.ArgumentTypeError(f"seed must be an unsigned integer, got {text!r}")
    return int(text)


def _params(args) -> NetworkParams:
    return NetworkParams(args.k1, args.k2, args.r, args.l, as_fraction(args.mu))


def _lemma1_epda(p: NetworkParams, budget: int) -> Epda:
    """Smallest-F EPDA with K1 K2 / r^2 columns and Z/F = r^2 M/N found by search."""
    if p.k1 % p.r or p.k2 % p.r:
        raise ParameterError(
            f"lemma1 construction requires r|K1 and r|K2 (got r={p.r}, K1={p.k1}, K2={p.k2})")
    k = p.n_users // p.r ** 2
    ratio = p.r ** 2 * p.mu
    if ratio > 1:
        raise ParameterError(f"r^2 M/N = {ratio} exceeds 1")
    f = ratio.denominator
    while k * f <= budget:
        z = int(ratio * f)
        a = search_epda(k, p.l, f, z, k * (f - z), budget=budget)
        if a is not None:
            return a
        f += ratio.denominator
    raise SearchBudgetError(f"no ({k}, {p.l}, F, Z, S) EPDA with Z/F = {ratio} "
                            f"and K*F <= {budget}; pass --epda or raise --budget")


def cmd_build(args) -> int:
    p = _params(args)
    if args.method == "optimal":
        c, b = optimal_construct(p)
    elif args.method == "generalized":
        c, b = generalized_construct(p)
    else:
        if p.k1 % p.r or p.k2 % p.r:
            raise ParameterError(
                f"lemma1 construction requires r|K1 and r|K2 (got r={p.r}, K1={p.k1}, "
                f"K2={p.k2})")
        if args.epda:
            a = read_array(args.epda)
            if not isinstance(a, Epda):
                raise ParameterError(f"{args.epda} is not an EPDA document")
            rep = verify_epda(a)
            if not rep.passed:
                print(emit_report({"epda": rep}))
                return FAILED
        else:
            a = _lemma1_epda(p, args.budget)
        c, b = lemma1_construct(a, p)
    write_array(c, args.caching_out)
    write_array(b, args.delivery_out)
    rc, rd = verify_caching_array(c), verify_delivery_array(b, c)
    print(emit_report({"caching": rc, "delivery": rd, "ndt": compute_ndt(b, p, c),
                       "files": {"caching": args.caching_out, "delivery": args.delivery_out}}))
    return OK if rc.passed and rd.passed else FAILED


def _load_pair(args):
    c = read_array(args.caching)
    b = read_array(args.delivery)
    if not isinstance(c, CachingArray):
        raise ParameterError(f"{args.caching} is not a CACHING document")
    if not isinstance(b, DeliveryArray):
        raise ParameterError(f"{args.delivery} is not a DELIVERY document")
    return c, b


def cmd_verify(args) -> int:
    a = read_array(args.path)
    if isinstance(a, DeliveryArray):
        if not args.caching:
            raise ParameterError("verifying a delivery array needs --caching")
        c = read_array(args.caching)
        if not isinstance(c, CachingArray):
            raise ParameterError(f"{args.caching} is not a CACHING document")
        rep = verify_delivery_array(a, c)
    elif isinstance(a, CachingArray):
        rep = verify_caching_array(a)
    else:
        rep = verify_epda(a)
    print(emit_report(rep))
    return OK if rep.passed else FAILED


def _parse_demand(text):
    if text in ("distinct", "random"):
        return text
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ParameterError(f"--demand must be 'distinct', 'random' or a comma list, "
                             f"got {text!r}") from None


def cmd_simulate(args) -> int:
    c, b = _load_pair(args)
    rep = verify_delivery_array(b, c)
    if not rep.passed:
        print(emit_report({"verification": rep}))
        return FAILED
    summary = run_trials(c, b, n_files=args.n_files, trials=args.trials, seed=args.seed,
                         demand=_parse_demand(args.demand))
    print(emit_report(summary))
    return OK if summary["ok"] else FAILED


def cmd_ndt(args) -> int:
    c, b = _load_pair(args)
    mu = as_fraction(args.mu) if args.mu else Fraction(c.z, c.f)
    p = NetworkParams(b.k1, b.k2, b.r, b.l, mu)
    rep = verify_delivery_array(b, c)
    out = {"verification": rep}
    if rep.passed:
        out["ndt"] = compute_ndt(b, p, c)
    print(emit_report(out))
    return OK if rep.passed else FAILED


def cmd_search(args) -> int:
    a = search_epda(args.k, args.l, args.f, args.z, args.s_max, budget=args.budget)
    if a is None:
        print(emit_report({"found": False}))
        return FAILED
    if args.out:
        write_array(a, args.out)
    print(emit_report({"found": True, "S": a.s, "verification": verify_epda(a)}))
    return OK


def _network_flags(p):
    p.add_argument("--k1", type=int, required=True)
    p.add_argument("--k2", type=int, required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--mu", required=True, help="M/N as an exact rational, e.g. 1/9")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macc2d", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="construct a caching/delivery array pair")
    p.add_argument("--method", choices=("optimal", "generalized", "lemma1"), required=True)
    _network_flags(p)
    p.add_argument("--epda", help="EPDA document to lift (lemma1 only)")
    p.add_argument("--budget", type=int, default=DEFAULT_SEARCH_BUDGET)
    p.add_argument("--caching-out", default="caching.txt")
    p.add_argument("--delivery-out", default="delivery.txt")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check the defining conditions of an array document")
    p.add_argument("path")
    p.add_argument("--caching", help="caching array for a delivery document")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="Monte-Carlo zero-forcing delivery and decoding")
    p.add_argument("--caching", required=True)
    p.add_argument("--delivery", required=True)
    p.add_argument("--n-files", type=int, default=None)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--demand", default="distinct")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ndt", help="exact NDT next to the closed forms and the lower bound")
    p.add_argument("--caching", required=True)
    p.add_argument("--delivery", required=True)
    p.add_argument("--mu", help="expected M/N; must agree with the caching array")
    p.set_defaults(func=cmd_ndt)

    p = sub.add_parser("search", help="exhaustive minimal-S EPDA search")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--f", type=int, required=True)
    p.add_argument("--z", type=int, required=True)
    p.add_argument("--s-max", type=int, required=True)
    p.add_argument("--budget", type=int, default=DEFAULT_SEARCH_BUDGET)
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SearchBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BUDGET
    except (MaccError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
