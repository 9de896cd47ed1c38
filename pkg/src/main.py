"""Command line front-end: `burniat <command> ...`. Exit status 0 pass, 1 verified failure, 2 input error."""

from __future__ import annotations

import argparse
from collections.abc import Callable, Sequence
from pathlib import Path
import sys

from rich.console import Console
from rich.table import Table

from config import MAX_WORKERS
from lib.burniat import AMBIENTS, BurniatConfiguration, builtin_configuration, get_ambient, load_configuration
from lib.errors import BurniatError
from lib.exact.containment import check_containment
from lib.exact.linalg import format_rational
from lib.exact.polytope import HPolytope
from lib.exact.textformat import format_constraint, format_point, load_polytope
from lib.exact.vertices import affine_dim, enumerate_vertices, with_implicit_equalities
from lib.exact.volume import normalized_volume
from lib.lc_stability import is_lc, is_lc_at, lc_at_point_via_polytope
from lib.matroid import load_arrangement, matroid_polytope_from_arrangement
from lib.snc import adjoint_report, check_triple_point_formula, load_fiber
from lib.surface_lattice import (
    burniat_cover_data,
    check_fundamental_relations,
    cover_k_squared,
    effective_neg_two_curves,
    enumerate_neg_curves,
    nef_ample_report,
    picard_lattice,
    Positivity,
)
from lib.tiling import format_tiling, load_table, restrict_tiling
from lib.tiling_verifier import check_cover_and_disjoint, write_report
from lib.utils.logger import get_logger

logger = get_logger()
stderr = Console(stderr=True)

# Burniat data by number of blown-up points
BURNIAT_BY_K = {3: "d6", 4: "d5", 5: "d4-nodal", 6: "d3"}


def _polytope(argument: str) -> HPolytope:
    """An ambient name (bur5, ...) or a polytope file."""
    if argument in AMBIENTS:
        return get_ambient(argument).polytope
    return load_polytope(argument)


def _configuration(argument: str) -> BurniatConfiguration:
    if Path(argument).is_file():
        return load_configuration(argument)
    return builtin_configuration(argument)


# ------ Commands ------ #
def cmd_info(args: argparse.Namespace) -> int:
    polytope = _polytope(args.polytope)
    hull = with_implicit_equalities(polytope)
    dim = affine_dim(hull)
    print(f"vars {' '.join(polytope.vars)}")
    print(f"constraints {len(polytope.constraints)}")
    print(f"dim {dim}")
    if dim >= 0:
        print(f"vertices {len(enumerate_vertices(hull))}")
    print(f"volume {format_rational(normalized_volume(hull))}")
    return 0


def cmd_volume(args: argparse.Namespace) -> int:
    print(format_rational(normalized_volume(with_implicit_equalities(_polytope(args.polytope)))))
    return 0


def cmd_contains(args: argparse.Namespace) -> int:
    inner = _polytope(args.inner)
    result = check_containment(inner, _polytope(args.outer))
    if result:
        print("CONTAINED")
        return 0
    print(f"NOT-CONTAINED {format_constraint(result.violated, inner.vars)} at {format_point(result.witness, inner.vars)}")
    return 1


def cmd_verify_tiling(args: argparse.Namespace) -> int:
    tilings = load_table(args.file, args.ambient)
    reports = []
    for tiling in tilings:
        report = check_cover_and_disjoint(tiling, workers=args.workers, oracle=args.oracle)
        print(report.format())
        print()
        reports.append(report)
    passed = sum(1 for r in reports if r.passed)
    print(f"SUMMARY tilings={len(reports)} passed={passed}")
    if args.json or args.csv:
        write_report(reports, args.json, args.csv)

    table = Table(title=str(args.file))
    for column in ("tiling", "ambient", "pieces", "total", "verdict"):
        table.add_column(column)
    for report in reports:
        style = "green" if report.passed else "red"
        table.add_row(report.tiling.name, report.tiling.ambient_name, str(len(report.tiling.pieces)),
                      f"{format_rational(report.total)}/{format_rational(report.ambient_volume)}",
                      f"[{style}]{report.verdict.kind}[/{style}]")
    stderr.print(table)
    return 0 if passed == len(reports) else 1


def cmd_restrict(args: argparse.Namespace) -> int:
    target = get_ambient(args.to)
    blocks = []
    for tiling in load_table(args.file, getattr(args, "from")):
        if args.tiling and tiling.name not in args.tiling:
            continue
        restriction = restrict_tiling(tiling, target)
        drops = restriction.format_drops(tiling)
        comment = "".join(f"# {line}\n" for line in drops.splitlines())
        blocks.append(comment + format_tiling(restriction.tiling))
    text = "\n".join(blocks)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        logger.info(f"wrote {len(blocks)} restricted tilings to {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_lc(args: argparse.Namespace) -> int:
    arrangement = load_arrangement(args.file)
    verdict = is_lc(arrangement, arrangement.weight.b)
    print(verdict.format(arrangement))
    if args.points:
        polytope = matroid_polytope_from_arrangement(arrangement)
        for point in arrangement.multiple_points():
            direct = is_lc_at(arrangement, arrangement.weight.b, point)
            try:
                via = "yes" if lc_at_point_via_polytope(arrangement, polytope, point) else "no"
            except BurniatError as exc:
                via = f"n/a ({exc})"
            print(f"point {arrangement.label(point)} lc={'yes' if direct else 'no'} polytope={via}")
    return 0 if verdict else 1


def cmd_k2(args: argparse.Namespace) -> int:
    if args.burniat is not None:
        if args.burniat not in BURNIAT_BY_K:
            raise BurniatError(f"no Burniat configuration with {args.burniat} blown-up points")
        configuration = builtin_configuration(BURNIAT_BY_K[args.burniat])
    else:
        configuration = _configuration(args.config)
    cover = burniat_cover_data(configuration)
    print(f"K^2 = {format_rational(cover_k_squared(cover, args.cover_degree))}")
    relations = check_fundamental_relations(cover)
    if not relations.ok:
        print(f"OBSTRUCTION {relations.obstruction}")
        return 1
    for index, cls in enumerate(relations.classes, start=1):
        print(f"L_chi{index} = {cls.format()}")
    return 0


def cmd_nef(args: argparse.Namespace) -> int:
    if args.burniat_config is not None:
        configuration = _configuration(args.burniat_config)
        k, effective = configuration.k, effective_neg_two_curves(configuration)
    else:
        k, effective = args.k, []
    lattice = picard_lattice(k)
    divisor = lattice.parse(args.divisor) if args.divisor else -lattice.K
    report = nef_ample_report(k, divisor, effective)
    print(report.format())
    return 1 if report.kind is Positivity.NOT_NEF else 0


def cmd_snc(args: argparse.Namespace) -> int:
    fiber = load_fiber(args.file)
    checks = check_triple_point_formula(fiber)
    for check in checks:
        print(check.format())
    for component, name, degree in adjoint_report(fiber):
        print(f"adjoint {component}:{name} {format_rational(degree)}")
    return 0 if all(c.ok for c in checks) else 1


def cmd_neg_curves(args: argparse.Namespace) -> int:
    classes = enumerate_neg_curves(args.k, args.self_int)
    for cls in classes:
        print(cls.format())
    print(f"{len(classes)} classes")
    return 0


COMMANDS: dict[str, tuple[Callable[[argparse.Namespace], int], str]] = {
    "info": (cmd_info, "dimension, vertex count and normalized volume"),
    "volume": (cmd_volume, "normalized volume in the affine hull"),
    "contains": (cmd_contains, "exact containment of two polytopes"),
    "verify-tiling": (cmd_verify_tiling, "verify the tilings of a table file"),
    "restrict": (cmd_restrict, "restrict tilings to a smaller Burniat ambient"),
    "lc": (cmd_lc, "log canonicity of a weighted arrangement"),
    "k2": (cmd_k2, "K^2 and fundamental relations of a Burniat cover"),
    "nef": (cmd_nef, "nef/ample test of a class on a blown-up plane"),
    "snc": (cmd_snc, "triple point formula and adjoint degrees of an SNC fiber"),
    "neg-curves": (cmd_neg_curves, "(-1)- or (-2)-classes on Bl_k P^2"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="burniat", description="Exact verification of Burniat matroid tilings.")
    sub = parser.add_subparsers(dest="command", required=True)
    parsers = {name: sub.add_parser(name, help=text) for name, (_, text) in COMMANDS.items()}

    for name in ("info", "volume"):
        parsers[name].add_argument("polytope", help="polytope file or ambient name")
    parsers["contains"].add_argument("inner")
    parsers["contains"].add_argument("outer")

    verify = parsers["verify-tiling"]
    verify.add_argument("file")
    verify.add_argument("--ambient", choices=list(AMBIENTS), help="override the ambient of every tiling")
    verify.add_argument("--json", help="write the report frame as JSON")
    verify.add_argument("--csv", help="write the report frame as CSV")
    verify.add_argument("--workers", type=int, default=MAX_WORKERS)
    verify.add_argument("--oracle", action="store_true", help="cross-check with the chamber oracle (dim <= 4)")

    restrict = parsers["restrict"]
    restrict.add_argument("file")
    restrict.add_argument("--from", choices=list(AMBIENTS), help="ambient of the input tilings")
    restrict.add_argument("--to", choices=list(AMBIENTS), required=True)
    restrict.add_argument("--tiling", action="append", help="restrict only the named tiling(s)")
    restrict.add_argument("--output", help="output file (default stdout)")

    lc = parsers["lc"]
    lc.add_argument("file", help="arrangement file")
    lc.add_argument("--points", action="store_true", help="also compare the polytope criterion at every multiple point")

    k2 = parsers["k2"].add_mutually_exclusive_group(required=True)
    k2.add_argument("--burniat", type=int, metavar="K", help="number of blown-up points (3..6)")
    k2.add_argument("--config", help="configuration name or file")
    parsers["k2"].add_argument("--cover-degree", type=int, default=4)

    nef = parsers["nef"].add_mutually_exclusive_group(required=True)
    nef.add_argument("--burniat-config", help="configuration name or file")
    nef.add_argument("--k", type=int, help="general points")
    parsers["nef"].add_argument("--divisor", help="class '(d;m1,...,mk)', default -K")

    parsers["snc"].add_argument("file", help="fiber file")

    neg = parsers["neg-curves"]
    neg.add_argument("k", type=int)
    neg.add_argument("--self-int", type=int, choices=[-1, -2], default=-1)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    handler, _ = COMMANDS[args.command]
    try:
        return handler(args)
    except (BurniatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
