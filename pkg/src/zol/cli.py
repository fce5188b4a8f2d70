"""Command-line surface.

Exit codes: 0 success, 1 validation or parse problem, 2 a budget
refused the computation, 3 `zol verify` found a broken property.
"""

import argparse
import sys

from . import __version__
from .classes import (amalgamate_triple, builtin_class, class_names,
                      check_accepts_substitution,
                      check_admits_substitution,
                      check_disjoint_amalgamation, condition_star,
                      enumerate_members)
from .colouring import (build_colour_link, build_palette, class_sizes,
                        multichromatic_subset_count,
                        multichromatic_tuple_count, rainbow_subset_count,
                        rainbow_tuple_count)
from .errors import AgreementError, BudgetExceeded, ParseError
from .events import catalogue
from .experiment import (ExperimentConfig, parse_config, parse_sizes,
                         run_experiment)
from .pregeometry import parse_geometry
from .structures import (canonical_form, parse_structure,
                         serialize_structure)


class _Parser(argparse.ArgumentParser):
    # argparse exits on error; surface a ParseError instead so the
    # top-level handler owns the exit code
    def error(self, message):
        raise ParseError(message)


def _build_parser():
    p = _Parser(prog="zol", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version",
                   version=f"zol-lab {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("enumerate", help="list the members on [n]")
    q.add_argument("--class", dest="class_name", required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--canonical", action="store_true",
                   help="one representative per isomorphism class")
    q.add_argument("--count", action="store_true",
                   help="print only the number of members")

    q = sub.add_parser("check-star",
                       help="look for a removable-tuple witness")
    q.add_argument("--class", dest="class_name", required=True)

    q = sub.add_parser("check-admit",
                       help="substitution closure up to a size bound")
    q.add_argument("--class", dest="class_name", required=True)
    q.add_argument("--a", required=True, help="replacement structure file")
    q.add_argument("--b", required=True, help="replaced structure file")
    q.add_argument("--max-n", type=int, default=6)

    q = sub.add_parser("check-accept",
                       help="substitution acceptance up to a size bound")
    q.add_argument("--class", dest="class_name", required=True)
    q.add_argument("--geom", default="trivial")
    q.add_argument("--a", required=True)
    q.add_argument("--b", required=True)
    q.add_argument("--max-n", type=int, default=6)

    q = sub.add_parser("check-amalg",
                       help="disjoint amalgamation up to a size bound")
    q.add_argument("--class", dest="class_name", required=True)
    q.add_argument("--geom", default="trivial")
    q.add_argument("--max-n", type=int, default=6)
    q.add_argument("--independent", action="store_true",
                   help="require an independent base")

    q = sub.add_parser("gadgets",
                       help="build and print the colour gadgets")
    q.add_argument("--l", type=int, required=True)
    q.add_argument("--r", type=int, default=2, help="relation arity")
    q.add_argument("--strong", action="store_true")

    q = sub.add_parser("count", help="closed-form colour counts")
    q.add_argument("--mode", required=True,
                   choices=("multichromatic-tuples",
                            "multichromatic-subsets", "rainbow-tuples",
                            "rainbow-subsets"))
    q.add_argument("--p", required=True,
                   help="comma-separated colour class sizes")
    q.add_argument("--m", type=int, required=True,
                   help="tuple or subset size")

    q = sub.add_parser("prob", help="event probability over a size range")
    q.add_argument("--class", dest="class_name", required=True)
    q.add_argument("--geom", default="trivial")
    q.add_argument("--measure", default="uniform",
                   choices=("uniform", "delta"))
    q.add_argument("--event", required=True, action="append",
                   help="named event; repeatable")
    q.add_argument("--n", required=True,
                   help="size range: 7, 3..7, or 8,10,12")
    mode = q.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", default=True)
    mode.add_argument("--mc", type=int, metavar="TRIALS")
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--fractions", action="store_true",
                   help="render exact values as reduced fractions")
    q.add_argument("--out", help="write the CSV here instead of stdout")

    q = sub.add_parser("experiment", help="run a config-file sweep")
    q.add_argument("--config", required=True)

    sub.add_parser("list-events", help="name every supported event")
    sub.add_parser("list-classes", help="name every bundled class")
    sub.add_parser("verify", help="run the full acceptance suite")
    return p


def _load_structure(path: str, vocab):
    with open(path) as fh:
        return parse_structure(fh.read(), vocab)


def _cmd_enumerate(args) -> int:
    c = builtin_class(args.class_name)
    members = list(enumerate_members(c, args.n))
    if args.canonical:
        reps = {}
        for m in members:
            reps.setdefault(canonical_form(m).rels, m)
        members = list(reps.values())
    print(len(members))
    if not args.count:
        for i, m in enumerate(members):
            sys.stdout.write(serialize_structure(m, name=f"m{i}"))
    return 0


def _cmd_check_star(args) -> int:
    c = builtin_class(args.class_name)
    members = getattr(c.rule, "members", None)
    if members is None:
        raise ValueError("the class has no forbidden members")
    w = condition_star(members)
    if w is None:
        print("no removable tuple: every forbidden member stays "
              "forbidden under tuple removal")
    else:
        print(f"witness: remove {w.symbol}{w.tup} from the member below")
        sys.stdout.write(serialize_structure(w.structure, name="member"))
    return 0


def _print_verdict(v) -> int:
    print(f"status: {v.status}")
    if v.bound is not None:
        print(f"checked exhaustively up to n = {v.bound}")
    if v.counterexample is not None:
        print(f"counterexample: {v.counterexample}")
    return 0


def _cmd_check_admit(args) -> int:
    c = builtin_class(args.class_name)
    a = _load_structure(args.a, c.vocab)
    b = _load_structure(args.b, c.vocab)
    return _print_verdict(check_admits_substitution(c, a, b, args.max_n))


def _cmd_check_accept(args) -> int:
    c = builtin_class(args.class_name)
    g = parse_geometry(args.geom)
    a = _load_structure(args.a, c.vocab)
    b = _load_structure(args.b, c.vocab)
    return _print_verdict(
        check_accepts_substitution(c, g, a, b, args.max_n))


def _cmd_check_amalg(args) -> int:
    c = builtin_class(args.class_name)
    g = parse_geometry(args.geom)
    v = check_disjoint_amalgamation(c, g, args.max_n,
                                    independent=args.independent)
    return _print_verdict(v)


def _cmd_gadgets(args) -> int:
    from .structures import vocabulary
    vocab = vocabulary(("R", args.r))
    link = build_colour_link(vocab, args.l, args.strong)
    pal = build_palette(vocab, args.l, args.strong)
    print(f"colour link (ends {link.a} and {link.b}):")
    sys.stdout.write(serialize_structure(link.structure, name="link"))
    print("palette:")
    sys.stdout.write(serialize_structure(pal.structure, name="palette"))
    print(f"palette colouring: {pal.colouring}")
    print(f"same-colour anchor pairs: {sorted(map(sorted, pal.same_pairs))}")
    return 0


def _cmd_count(args) -> int:
    try:
        sizes = tuple(int(x) for x in args.p.split(","))
    except ValueError:
        raise ValueError(f"--p: cannot parse sizes {args.p!r}") from None
    fn = {
        "multichromatic-tuples": multichromatic_tuple_count,
        "multichromatic-subsets": multichromatic_subset_count,
        "rainbow-tuples": rainbow_tuple_count,
        "rainbow-subsets": rainbow_subset_count,
    }[args.mode]
    print(fn(sizes, args.m))
    return 0


def _cmd_prob(args) -> int:
    cfg = ExperimentConfig(
        class_name=args.class_name,
        geometry=args.geom,
        measure=args.measure,
        ns=parse_sizes(args.n),
        events=tuple(args.event),
        mode="mc" if args.mc is not None else "exact",
        trials=1000 if args.mc is None else args.mc,
        seed=args.seed,
        out=args.out,
        fractions=args.fractions,
    )
    text = run_experiment(cfg)
    if not args.out:
        sys.stdout.write(text)
    return 0


def _cmd_experiment(args) -> int:
    with open(args.config) as fh:
        cfg = parse_config(fh.read())
    text = run_experiment(cfg)
    if not cfg.out:
        sys.stdout.write(text)
    return 0


def _cmd_list_events(args) -> int:
    for name, description in catalogue():
        print(f"{name}  {description}")
    return 0


def _cmd_list_classes(args) -> int:
    for name in class_names():
        print(name)
    return 0


def _cmd_verify(args) -> int:
    from .acceptance import format_report, run_all
    results = run_all()
    print(format_report(results))
    return 0 if all(r.passed for r in results) else 3


_COMMANDS = {
    "enumerate": _cmd_enumerate,
    "check-star": _cmd_check_star,
    "check-admit": _cmd_check_admit,
    "check-accept": _cmd_check_accept,
    "check-amalg": _cmd_check_amalg,
    "gadgets": _cmd_gadgets,
    "count": _cmd_count,
    "prob": _cmd_prob,
    "experiment": _cmd_experiment,
    "list-events": _cmd_list_events,
    "list-classes": _cmd_list_classes,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (ParseError, AgreementError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except BudgetExceeded as e:
        print(f"budget: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
