"""Command-line interface.

Subcommands:

  classify     membership of a weight, a triple slice, or a full measure
  embed        construct an embedding certificate (ay | chw | ui-matrix |
               minimal | hall)
  verify       check a stopping matrix against a target measure
  exact-law    exact stopped law of a rule file
  simulate     Monte Carlo run of a rule file
  set          approximate the embeddable-weight set by its contraction system
  potential    tabulate the potential and barycenter of a measure

Measures are JSON objects {"atoms": {"-2": "11/32", ...}}; rationals are
"p/q" strings; rules are JSON {"kind": ..., "payload": ...} as produced by
the embed subcommand.

Exit status: 0 on success, 2 on invalid input, 3 when the answer is an
honest "unknown"/"undecided" rather than a verdict.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .classic import (
    ChwStatus,
    azema_yor_check,
    chw_search,
    hall_rule,
    minimal_certificate,
)
from .matrices import StoppingMatrix, search_matrix, verify_matrix
from .measures import IntegerMeasure, MeasureError, barycenter, potential
from .rational import format_rational, parse_rational
from .rules import (
    ExitCompositionRule,
    MaxThresholdRule,
    MinimalRule,
    PathCountMatrixRule,
    RandomizedPairRule,
    rule_from_json,
    rule_to_json,
)
from .sim import exact_law, simulate
from .uiset import (
    classify_triple,
    classify_weight,
    ifs_approximate,
    ifs_membership,
    weight_set_system,
)

OK, INVALID, UNDECIDED = 0, 2, 3


def _load_measure(text: str) -> IntegerMeasure:
    return IntegerMeasure.from_json_dict(json.loads(text))


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as f:
        return f.read()


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True))


def cmd_classify(args) -> int:
    if args.weight is not None:
        v = classify_weight(parse_rational(args.weight))
        _emit({"member": v.member, "halfWeight": format_rational(v.half_weight)})
        return OK
    if args.triple is not None:
        parts = [parse_rational(p) for p in args.triple.split(",")]
        if len(parts) != 3:
            print("triple must be three comma-separated rationals", file=sys.stderr)
            return INVALID
        v = classify_triple(*parts)
        _emit({"member": v.member, "reason": v.reason})
        return OK
    mu = _load_measure(_read(args.measure))
    out = {}
    ay = azema_yor_check(mu)
    out["azemaYor"] = ay.member
    chw = chw_search(mu, max_depth=args.depth)
    out["chaconWalsh"] = {
        ChwStatus.MEMBER: "member",
        ChwStatus.NON_MEMBER_UP_TO_DEPTH: "nonMemberUpToDepth",
        ChwStatus.UNKNOWN: "unknown",
    }[chw.status]
    sm = search_matrix(mu, max_stage=args.depth)
    out["uiMatrix"] = sm.status
    out["minimal"] = mu.is_centered()
    _emit(out)
    return OK


def cmd_embed(args) -> int:
    mu = _load_measure(_read(args.measure))
    if args.method == "ay":
        ay = azema_yor_check(mu)
        if not ay.member:
            _emit({"member": False, "witnessSite": ay.witness_site,
                   "witnessValue": format_rational(ay.witness_value)})
            return UNDECIDED
        rule = MaxThresholdRule(tuple(sorted(ay.thresholds.items())))
    elif args.method == "chw":
        res = chw_search(mu, max_depth=args.depth)
        if res.status is ChwStatus.NON_MEMBER_UP_TO_DEPTH:
            _emit({"member": False, "depthSearched": res.depth_searched})
            return UNDECIDED
        if res.status is ChwStatus.UNKNOWN:
            _emit({"member": "unknown"})
            return UNDECIDED
        rule = ExitCompositionRule(res.steps)
    elif args.method == "ui-matrix":
        res = search_matrix(mu, max_stage=args.depth)
        if res.status != "member":
            _emit({"member": "unknown"})
            return UNDECIDED
        rule = PathCountMatrixRule(res.matrix)
    elif args.method == "minimal":
        rule = MinimalRule(minimal_certificate(mu))
    elif args.method == "hall":
        rr = hall_rule(mu)
        _emit(json.loads(rule_to_json_randomized(rr)))
        return OK
    else:  # pragma: no cover - argparse restricts choices
        return INVALID
    print(rule_to_json(rule))
    return OK


def rule_to_json_randomized(rr) -> str:
    return json.dumps(
        {
            "kind": "randomizedRule",
            "payload": [
                {"u": u, "v": v, "w": format_rational(w)}
                for u, v, w in rr.joint_law
            ],
        },
        sort_keys=True,
    )


def _load_rule(text: str):
    data = json.loads(text)
    if data.get("kind") == "randomizedRule":
        from .classic import RandomizedRule

        return RandomizedRule(
            tuple((int(e["u"]), int(e["v"]), parse_rational(e["w"]))
                  for e in data["payload"])
        )
    return rule_from_json(text)


def cmd_verify(args) -> int:
    mu = _load_measure(_read(args.measure))
    matrix = StoppingMatrix.from_json_dict(json.loads(_read(args.matrix)))
    res = verify_matrix(matrix, mu)
    _emit({"status": res.status, "site": res.site, "stage": res.stage,
           "detail": res.detail})
    return OK if res.valid else (UNDECIDED if res.status == "inconclusive"
                                 else INVALID)


def cmd_exact_law(args) -> int:
    rule = _load_rule(_read(args.rule))
    el = exact_law(rule, max_stage=args.max_stage)
    print(el.to_json())
    return OK


def cmd_simulate(args) -> int:
    rule = _load_rule(_read(args.rule))
    rep = simulate(rule, trials=args.trials, seed=args.seed,
                   max_steps=args.max_steps, backend=args.backend)
    print(rep.to_json())
    return OK


def cmd_set(args) -> int:
    if args.point is not None:
        verdict = ifs_membership(parse_rational(args.point), depth=args.depth)
        _emit({"point": args.point, "verdict": verdict})
        return UNDECIDED if verdict == "undecidedAtDepth" else OK
    cover = ifs_approximate(weight_set_system(), depth=args.depth)
    _emit({
        "depth": args.depth,
        "measure": format_rational(cover.measure()),
        "intervals": [[format_rational(a), format_rational(b)]
                      for a, b in cover.intervals],
    })
    return OK


def cmd_potential(args) -> int:
    mu = _load_measure(_read(args.measure))
    u = potential(mu)
    out = {
        "lo": u.lo,
        "hi": u.hi,
        "mean": format_rational(u.mean),
        "values": {str(k): format_rational(u.value_at(k))
                   for k in range(u.lo, u.hi + 1)},
    }
    if mu.is_centered():
        psi = barycenter(mu)
        out["barycenter"] = {str(k): format_rational(psi.value_at(k))
                             for k in range(psi.lo, psi.hi + 1)}
    _emit(out)
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="walkembed", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="class membership of weights/measures")
    g = c.add_mutually_exclusive_group(required=True)
    g.add_argument("--weight", help="rational p: is p delta_0 + ... embeddable")
    g.add_argument("--triple", help="p-,p0,p+ comma-separated rationals")
    g.add_argument("--measure", help="path to a measure JSON file (- for stdin)")
    c.add_argument("--depth", type=int, default=8)
    c.set_defaults(fn=cmd_classify)

    e = sub.add_parser("embed", help="construct an embedding certificate")
    e.add_argument("method", choices=["ay", "chw", "ui-matrix", "minimal", "hall"])
    e.add_argument("measure", help="path to a measure JSON file (- for stdin)")
    e.add_argument("--depth", type=int, default=8)
    e.set_defaults(fn=cmd_embed)

    v = sub.add_parser("verify", help="verify a stopping matrix against a measure")
    v.add_argument("matrix", help="path to a matrix JSON file (- for stdin)")
    v.add_argument("measure", help="path to a measure JSON file")
    v.set_defaults(fn=cmd_verify)

    x = sub.add_parser("exact-law", help="exact stopped law of a rule")
    x.add_argument("rule", help="path to a rule JSON file (- for stdin)")
    x.add_argument("--max-stage", type=int, default=64)
    x.set_defaults(fn=cmd_exact_law)

    s = sub.add_parser("simulate", help="Monte Carlo run of a rule")
    s.add_argument("rule", help="path to a rule JSON file (- for stdin)")
    s.add_argument("--trials", type=int, default=100_000)
    s.add_argument("--seed", type=int,
                   default=int(os.environ.get("WALKEMBED_SEED", "0")))
    s.add_argument("--max-steps", type=int, default=1_000_000)
    s.add_argument("--backend", choices=["auto", "numba", "numpy"], default=None)
    s.set_defaults(fn=cmd_simulate)

    w = sub.add_parser("set", help="the embeddable-weight fractal set")
    w.add_argument("--depth", type=int, default=12)
    w.add_argument("--point", help="test one rational for membership")
    w.set_defaults(fn=cmd_set)

    q = sub.add_parser("potential", help="potential/barycenter tables")
    q.add_argument("measure", help="path to a measure JSON file (- for stdin)")
    q.set_defaults(fn=cmd_potential)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (MeasureError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return INVALID


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
