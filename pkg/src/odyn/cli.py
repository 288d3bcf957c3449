"""Command line entry point: ``odyn <command> <file.odf> [options]``.

Exit status is 0 on success, 1 when the file fails to parse or validate,
and 2 on usage errors.
"""

import argparse
import sys
from pathlib import Path

from ._ids import render, sorted_ids
from .family_gen import (
    HeapBudgetExceeded,
    DEFAULT_HEAP_BUDGET,
    family_connective_structure,
    flexible_heaps,
    functional_heaps,
    generate,
    validate_family,
)
from .odf import ParseError, parse_family, serialize_open_dynamics
from .open_dyn import enumerate_open_realizations

EXIT_OK, EXIT_INVALID, EXIT_USAGE = 0, 1, 2


class _Usage(Exception):
    pass


def format_subsets(subsets) -> str:
    return " ".join("{" + ",".join(render(x) for x in sorted_ids(J)) + "}" for J in subsets)


def cmd_validate(doc, args):
    diags = validate_family(doc.family)
    if diags:
        return EXIT_INVALID, "".join(d + "\n" for d in diags)
    return EXIT_OK, "OK\n"


def cmd_realizations(doc, args):
    if args.component not in doc.components:
        raise _Usage(f"unknown component {args.component!r}")
    A = doc.family.components[args.component]
    return EXIT_OK, "".join(f"{render(r.param)} {render(r.assignment)}\n" for r in enumerate_open_realizations(A))


def cmd_generate(doc, args):
    i0 = doc.sync_index
    did = doc.components[i0]
    d = generate(doc.family, args.mode, strict_edge=args.strict_edge, budget=args.budget)
    text = serialize_open_dynamics(d, name=f"{doc.name}_{args.mode}",
                                   graph_name=doc.graph_of[did], clock_name=doc.clock_of[did])
    return EXIT_OK, text


def cmd_heaps(doc, args):
    fn = functional_heaps if args.mode == "f" else flexible_heaps
    heaps = fn(doc.family, budget=args.budget)
    return EXIT_OK, "".join(f"{render(i)}: {render(heaps[i])}\n" for i in doc.family.sorted_index())


def cmd_connective(doc, args):
    return EXIT_OK, format_subsets(family_connective_structure(doc.family, args.include_empty)) + "\n"


def build_parser():
    p = argparse.ArgumentParser(prog="odyn", description="Open graphic dynamics and the dynamics generated by families of them.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("path", help="family description (.odf)")
        sp.add_argument("--out", help="write output here instead of standard output")
        sp.set_defaults(func=fn)
        return sp

    add("validate", cmd_validate, "check a family file")
    sp = add("realizations", cmd_realizations, "list the open realizations of one component")
    sp.add_argument("--component", required=True)
    sp = add("generate", cmd_generate, "write a generated open dynamics")
    sp.add_argument("--mode", choices=["p", "f", "s", "m"], required=True)
    sp.add_argument("--strict-edge", action="store_true",
                    help="require component successions along the synchronized edge")
    sp.add_argument("--budget", type=int, default=DEFAULT_HEAP_BUDGET, help="heap computation budget")
    sp = add("heaps", cmd_heaps, "functional or flexible parameter heaps")
    sp.add_argument("--mode", choices=["f", "s"], required=True)
    sp.add_argument("--budget", type=int, default=DEFAULT_HEAP_BUDGET, help="heap computation budget")
    sp = add("connective", cmd_connective, "connective structure of the interaction")
    sp.add_argument("--include-empty", action="store_true")
    return p


def _write(text, out, stream):
    if out:
        Path(out).write_bytes(text.encode("utf-8"))
    else:
        stream.write(text)


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        text = Path(args.path).read_bytes().decode("utf-8")
    except OSError as exc:
        stderr.write(f"odyn: cannot read {args.path}: {exc.strerror}\n")
        return EXIT_USAGE
    try:
        doc = parse_family(text)
    except ParseError as exc:
        loc = f"{args.path}:{exc.line}" if exc.line is not None else args.path
        stderr.write(f"{loc}: {exc.message}\n")
        return EXIT_INVALID
    if args.command != "validate":
        diags = validate_family(doc.family)
        if diags:
            stderr.write("".join(d + "\n" for d in diags))
            return EXIT_INVALID
    try:
        code, text = args.func(doc, args)
    except _Usage as exc:
        stderr.write(f"odyn: {exc}\n")
        return EXIT_USAGE
    except HeapBudgetExceeded as exc:
        stderr.write(f"odyn: {exc}\n")
        return EXIT_INVALID
    _write(text, args.out, stdout)
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
