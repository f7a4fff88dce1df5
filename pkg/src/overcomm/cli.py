"""Command line interface: ``overcomm <subcommand> ...``.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import re
import sys
from typing import Any, Optional, Sequence

from . import partitions as P
from . import rewrite as R
from . import varieties as V
from .errors import ValidationError
from .verify import SUITES, run_suite
from .words import enumerate_transversal, format_word, parse_word


def _partition_arg(text: str) -> P.Partition:
    try:
        return P.parse_partition(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _word_arg(text: str):
    try:
        return parse_word(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


_TERM = re.compile(r"""\s*(?:
      (?P<sem>SEM)
    | W\((?P<w>[\d,\s]+)\)
    | S\((?P<s>[\d,\s]+)\)(?:\^(?P<k>\d+))?
    | X\((?P<xn>\d+)\s*(?:,\s*(?P<xm>\d+)\s*(?:;(?P<xl>[\d,\s]+))?)?\)
    )\s*$""", re.X)


def parse_variety(expr: str, bound: int) -> V.VarietyPresentation:
    """Meet of terms joined by ``&``: SEM, W(2,1), S(2,2), S(2,2)^1, X(3), X(3,2), X(4,2;3,1)."""
    terms = []
    for raw in expr.split("&"):
        m = _TERM.match(raw)
        if not m:
            raise ValidationError(f"cannot parse variety term {raw.strip()!r}")
        if m["sem"]:
            terms.append(V.empty_presentation())
        elif m["w"]:
            terms.append(V.w_variety(P.parse_partition(m["w"])))
        elif m["s"]:
            lam = P.parse_partition(m["s"])
            terms.append(V.s_variety(lam) if m["k"] is None
                         else V.s_variety_truncated(lam, int(m["k"])))
        elif m["xl"]:
            terms.append(V.legacy_variety("Xnml", int(m["xn"]), int(m["xm"]),
                                          P.parse_partition(m["xl"]), bound))
        elif m["xm"]:
            terms.append(V.legacy_variety("Xnm", int(m["xn"]), int(m["xm"]), bound=bound))
        else:
            terms.append(V.legacy_variety("Xn", int(m["xn"]), bound=bound))
    return V.meet(terms)


def _fmt_part(lam: P.Partition) -> str:
    return str(lam)


def _fmt_parts(ps) -> list[str]:
    return [str(p) for p in P.sort_partitions(ps)]


def _emit(args, data: dict, lines: Sequence[str]) -> None:
    if args.format == "structured":
        sys.stdout.write(json.dumps(data, sort_keys=True, indent=1) + "\n")
    else:
        for line in lines:
            print(line)


def _load_system(args) -> R.IdentitySystem:
    system = R.IdentitySystem()
    if args.system:
        with open(args.system, encoding="utf-8") as fh:
            system = system | R.parse_system(fh.read())
    for text in args.identity or []:
        system = system | R.parse_system(text)
    return system


def cmd_partition(args) -> int:
    lam = args.partition
    st = P.stats(lam)
    ext = {str(k): _fmt_part(P.extend(lam, k)) for k in args.extend}
    data = {"partition": _fmt_part(lam), "total": lam.total, "parts": lam.parts,
            "q": st.q, "r": st.r, "delta": st.delta, "s": st.s, "extend": ext}
    lines = [f"partition {lam}", f"total {lam.total}", f"parts {lam.parts}",
             f"q {st.q}", f"r {st.r}", f"delta {st.delta}", f"s {st.s}"]
    lines += [f"extend {k} {v}" for k, v in ext.items()]
    _emit(args, data, lines)
    return 0


def cmd_order(args) -> int:
    ps = args.partitions
    mode = args.mode
    if mode in ("preceq", "unlhd"):
        if len(ps) != 2:
            raise _Usage(f"{mode} takes exactly two partitions")
        verdict = (P.preceq if mode == "preceq" else P.unlhd)(ps[0], ps[1])
        _emit(args, {"mode": mode, "left": str(ps[0]), "right": str(ps[1]), "result": verdict},
              [str(verdict).lower()])
        return 0
    if mode == "downset":
        if len(ps) != 1:
            raise _Usage("downset takes exactly one partition")
        result = P.down_set(ps[0])
    else:
        result = P.minimal_elements(ps)
    listing = _fmt_parts(result)
    _emit(args, {"mode": mode, "result": listing}, listing)
    return 0


def cmd_transversal(args) -> int:
    words = enumerate_transversal(args.partition)
    style = args.style
    listing = [format_word(w, style) for w in words]
    _emit(args, {"partition": str(args.partition), "size": len(words), "words": listing},
          listing)
    return 0


def cmd_derive(args) -> int:
    system = _load_system(args)
    trace = R.derivable(args.u, args.v, system)
    if trace is None:
        _emit(args, {"derivable": False}, ["NOT-DERIVABLE"])
        return 0
    records = R.trace_records(trace, system)
    data: dict[str, Any] = {"derivable": True, "length": len(trace)}
    lines = [f"DERIVABLE length {len(trace)}"]
    if args.trace:
        data["trace"] = records
        lines += [json.dumps(r, sort_keys=True, separators=(",", ":")) for r in records]
    _emit(args, data, lines)
    return 0


def _presentation(args) -> V.VarietyPresentation:
    if args.variety and args.system:
        raise _Usage("give either a variety expression or --system, not both")
    if args.system:
        with open(args.system, encoding="utf-8") as fh:
            return V.load_presentation(fh.read())
    if not args.variety:
        raise _Usage("a variety expression or --system is required")
    return parse_variety(args.variety, args.bound)


def cmd_classes(args) -> int:
    if args.variety:
        system = parse_variety(args.variety, args.bound).system
    else:
        system = _load_system(args)
    classes = R.component_classes(args.partition, system)
    listing = [[format_word(w, args.style) for w in sorted(c)] for c in classes]
    _emit(args, {"partition": str(args.partition), "classes": listing},
          [" | ".join(c) for c in listing])
    return 0


def cmd_variety(args) -> int:
    p = _presentation(args)
    action = args.action
    if action == "build":
        text = V.dump_presentation(p)
        if args.format == "structured":
            _emit(args, {"presentation": text}, [])
        else:
            sys.stdout.write(text)
        return 0
    if action in ("reduces", "collapses"):
        if args.at is None:
            raise _Usage(f"{action} needs --at PARTITION")
        verdict = (V.reduces if action == "reduces" else V.collapses)(p, args.at)
        _emit(args, {"action": action, "partition": str(args.at), "result": verdict},
              [str(verdict).lower()])
        return 0
    if action == "greedy":
        rep = V.greedy_report(p, args.bound)
        data = {
            "bound": rep.bound,
            "greedy_up_to_bound": rep.greedy_up_to_bound,
            "verdicts": [{"partition": str(v.partition), "reduces": v.reduces,
                          "collapses": v.collapses} for v in rep.verdicts],
            "witnesses": [str(w) for w in rep.witnesses],
        }
        lines = [f"{v.partition} reduces={str(v.reduces).lower()} "
                 f"collapses={str(v.collapses).lower()}" for v in rep.verdicts]
        lines.append(f"greedy_up_to_bound {str(rep.greedy_up_to_bound).lower()}")
        if rep.witnesses:
            lines.append("witnesses " + " ".join(map(str, rep.witnesses)))
        _emit(args, data, lines)
        return 0
    res = V.decompose(p, args.bound)
    data = {
        "bound": res.bound,
        "gamma": _fmt_parts(res.gamma),
        "gamma_prime": _fmt_parts(res.gamma_prime),
        "indeterminate": _fmt_parts(res.indeterminate),
        "reconstruction_ok": res.reconstruction_ok,
        "mismatches": [str(m) for m in res.mismatches],
    }
    lines = [f"gamma {' '.join(data['gamma'])}",
             f"gamma_prime {' '.join(data['gamma_prime'])}",
             f"indeterminate {' '.join(data['indeterminate'])}",
             f"reconstruction_ok {str(res.reconstruction_ok).lower()}"]
    _emit(args, data, lines)
    return 0


def cmd_verify(args) -> int:
    cases = run_suite(args.suite, args.bound)
    ok = all(c.passed for c in cases)
    data = {"suite": args.suite, "bound": args.bound, "passed": ok,
            "cases": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in cases]}
    lines = [f"{'PASS' if c.passed else 'FAIL'} {c.name}" + (f"  {c.detail}" if not c.passed and c.detail else "")
             for c in cases]
    lines.append(f"{args.suite}: {'pass' if ok else 'FAIL'} ({sum(c.passed for c in cases)}/{len(cases)})")
    _emit(args, data, lines)
    return 0 if ok else 1


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--bound", type=int, default=6)

    parser = argparse.ArgumentParser(prog="overcomm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("partition", parents=[common], help="statistics q, r, delta, s and extensions")
    sp.add_argument("partition", type=_partition_arg)
    sp.add_argument("--extend", type=int, action="append", default=[], metavar="K")
    sp.set_defaults(func=cmd_partition)

    sp = sub.add_parser("order", parents=[common], help="compare partitions")
    sp.add_argument("mode", choices=("preceq", "unlhd", "downset", "minimize"))
    sp.add_argument("partitions", type=_partition_arg, nargs="+")
    sp.set_defaults(func=cmd_order)

    sp = sub.add_parser("transversal", parents=[common], help="list W_lambda")
    sp.add_argument("partition", type=_partition_arg)
    sp.add_argument("--style", choices=("tokens", "compact"), default="tokens")
    sp.set_defaults(func=cmd_transversal)

    sp = sub.add_parser("derive", parents=[common], help="decide u = v from a system")
    sp.add_argument("u", type=_word_arg)
    sp.add_argument("v", type=_word_arg)
    sp.add_argument("--system", metavar="PATH")
    sp.add_argument("--identity", action="append", metavar="'lhs = rhs'")
    sp.add_argument("--trace", action="store_true")
    sp.set_defaults(func=cmd_derive)

    sp = sub.add_parser("classes", parents=[common], help="classes of W_lambda under a system")
    sp.add_argument("partition", type=_partition_arg)
    sp.add_argument("--system", metavar="PATH")
    sp.add_argument("--identity", action="append", metavar="'lhs = rhs'")
    sp.add_argument("--variety", metavar="EXPR")
    sp.add_argument("--style", choices=("tokens", "compact"), default="tokens")
    sp.set_defaults(func=cmd_classes)

    sp = sub.add_parser("variety", parents=[common], help="build and analyse presentations")
    sp.add_argument("action", choices=("build", "greedy", "reduces", "collapses", "decompose"))
    sp.add_argument("variety", nargs="?", metavar="EXPR",
                    help="e.g. 'S(2,2) & S(3,1)', 'W(2,1)', 'X(3,2)', 'SEM'")
    sp.add_argument("--system", metavar="PATH", help="presentation file instead of EXPR")
    sp.add_argument("--at", type=_partition_arg, metavar="PARTITION")
    sp.set_defaults(func=cmd_variety)

    sp = sub.add_parser("verify", parents=[common], help="run an instance suite")
    sp.add_argument("suite", help=", ".join(SUITES))
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.bound < 2:
        parser.error("--bound must be at least 2")
    if args.command == "verify" and args.suite not in SUITES:
        parser.error(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    try:
        return args.func(args)
    except _Usage as exc:
        parser.error(str(exc))
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
