"""Command line front end.

Exit codes: 0 when every requested check passes, 1 when a verification fails
(the report names a witness), 2 for usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .automorphisms import check_family_preserving, check_spherically_symmetric
from .decomposition import (
    DecompositionError,
    antitree_closed_form,
    reconcile,
    tree_cs_closed_form,
    tridiagonalize,
)
from .fixtures import DEFAULT_RAY_LENGTH, FIGURES, load_figure, vertex_label
from .graph import OPERATOR_KINDS, GraphError, LayeredGraph, build_antitree, build_tree_complete_spheres, compress_operator
from .jacobi import PeriodicJacobi, bands_periodic, detect_eventually_periodic, spectrum_union
from .lgf import LGFError, read_lgf, serialize_lgf
from .paths import check_commuting_families, check_path_commuting, check_strongly_path_commuting
from .sequences import SequenceExhausted, SequenceSpec, parse_sequence, parse_tree_spec

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

CHECKS = ("path-commuting", "strong", "family-preserving", "spherical-symmetry", "commuting-family")


class UsageError(Exception):
    pass


@dataclass
class Source:
    graph: LayeredGraph
    name: str
    antitree: SequenceSpec | None = None
    tree_cs: tuple[SequenceSpec, SequenceSpec] | None = None


def _add_source(p: argparse.ArgumentParser, required: bool = True) -> None:
    grp = p.add_mutually_exclusive_group(required=required)
    grp.add_argument("--fixture", choices=FIGURES, help="builtin example graph")
    grp.add_argument("--lgf", type=Path, help="read a layered graph file")
    grp.add_argument("--antitree", metavar="P;T", help='sphere sizes as "prefix;tail", e.g. "1;2,3"')
    grp.add_argument("--tree-cs", metavar="K|G", help='tree with complete spheres, e.g. "2|1"')
    p.add_argument("--depth", type=int, help="ball radius for generated graphs")
    p.add_argument("--ray-length", type=int, default=DEFAULT_RAY_LENGTH, help="length of the rays continuing fixtures")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", type=Path, help="directory for report files")


def _load(args) -> Source:
    if args.fixture:
        if args.ray_length < 0:
            raise UsageError("--ray-length must be >= 0")
        return Source(load_figure(args.fixture, args.ray_length), args.fixture)
    if args.lgf:
        return Source(read_lgf(args.lgf), str(args.lgf))
    if args.depth is None or args.depth < 0:
        raise UsageError("--depth >= 0 is required for generated graphs")
    if args.antitree:
        s = parse_sequence(args.antitree)
        return Source(build_antitree(s, args.depth), f"antitree {args.antitree}", antitree=s)
    k, gamma = parse_tree_spec(args.tree_cs)
    return Source(build_tree_complete_spheres(k, gamma, args.depth), f"tree-cs {args.tree_cs}", tree_cs=(k, gamma))


def _emit(args, filename: str, text: str) -> None:
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        (args.out / filename).write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _label(src: Source, v) -> str:
    return vertex_label(src.name, v) if src.name in FIGURES else f"({v.sphere},{v.index})"


# -- subcommands ---------------------------------------------------------------

def cmd_build(args) -> int:
    src = _load(args)
    _emit(args, "graph.lgf", serialize_lgf(src.graph))
    return EXIT_OK


def _path_lines(src, report, title) -> list[str]:
    lines = [f"{title}: {report.verdict} (n_max={report.tested_n_max}, k_max={report.tested_k_max})"]
    for v in report.violations[:10]:
        lhs, rhs = v.species()
        lines.append(
            f"  witness n={v.n} {v.kind} k={v.k} l={v.l} x={_label(src, v.x)} y={_label(src, v.y)} "
            f"{lhs.kind}={v.count_lhs} {rhs.kind}={v.count_rhs}"
        )
    if len(report.violations) > 10:
        lines.append(f"  ... {len(report.violations) - 10} more")
    for d in report.degree_violations:
        lines.append(f"  degree n={d.n} deg({_label(src, d.x)})={d.deg_x} deg({_label(src, d.y)})={d.deg_y}")
    lines += [f"  note: {w}" for w in report.warnings]
    return lines


def cmd_verify(args) -> int:
    src = _load(args)
    g = src.graph
    n_max = max(0, g.depth - 1) if args.n_max is None else args.n_max
    k_max = min(3, g.depth) if args.k_max is None else args.k_max
    if n_max < 0 or k_max < 0:
        raise UsageError("--n-max and --k-max must be >= 0")
    checks = CHECKS if args.check == "all" else (args.check,)
    lines = [f"graph: {src.name}, depth {g.depth}, {g.size} vertices"]
    rows = [("check", "verdict", "witness")]
    failed = False
    for check in checks:
        if check in ("path-commuting", "strong"):
            fn = check_path_commuting if check == "path-commuting" else check_strongly_path_commuting
            rep = fn(g, n_max, k_max)
            lines += _path_lines(src, rep, check)
            witness = ""
            if rep.violations:
                v = rep.violations[0]
                witness = f"n={v.n} {v.kind} k={v.k} l={v.l} {_label(src, v.x)} {_label(src, v.y)} {v.count_lhs} {v.count_rhs}"
            elif rep.degree_violations:
                d = rep.degree_violations[0]
                witness = f"degree n={d.n} {_label(src, d.x)}={d.deg_x} {_label(src, d.y)}={d.deg_y}"
            verdict = rep.verdict
        elif check == "spherical-symmetry":
            rep = check_spherically_symmetric(g)
            verdict = rep.verdict
            witness = ""
            lines.append(f"spherical-symmetry: {verdict} ({rep.label})")
            for s in rep.splits:
                witness = f"n={s.n} {_label(src, s.representative)} -/-> {_label(src, s.other)}"
                lines.append(f"  no automorphism takes {_label(src, s.representative)} to {_label(src, s.other)} (sphere {s.n})")
        elif check == "family-preserving":
            rep = check_family_preserving(g, n_max)
            verdict = rep.verdict
            witness = ""
            per = ", ".join(f"({c}) {v}" for c, v in rep.verdicts.items())
            lines.append(f"family-preserving: {verdict} [{per}] ({rep.label})")
            for c in rep.counterexamples[:10]:
                lines.append(f"  condition ({c.condition}): no admissible automorphism for x={_label(src, c.x)} y={_label(src, c.y)}")
            if rep.counterexamples:
                c = rep.counterexamples[0]
                witness = f"({c.condition}) {_label(src, c.x)} {_label(src, c.y)}"
            lines += [f"  note: {w}" for w in rep.warnings]
        else:
            reps = check_commuting_families(g, n_max, k_max, kind=args.kind if args.kind != "normalized" else "laplacian")
            bad = [r for r in reps if r.verdict != "pass"]
            verdict = "fail" if bad else "pass"
            witness = ""
            lines.append(f"commuting-family: {verdict} (n <= {n_max}, j <= {k_max})")
            for r in bad[:5]:
                for a, b, norm in r.failures()[:3]:
                    lines.append(f"  n={r.n}: |[{a}, {b}]|_max = {norm}")
            if bad:
                a, b, norm = bad[0].failures()[0]
                witness = f"n={bad[0].n} [{a},{b}]={norm}"
        failed |= verdict != "pass"
        rows.append((check, verdict, witness))
    if args.format == "csv":
        _emit(args, "verify.csv", _csv(rows))
    else:
        _emit(args, "verify.txt", "\n".join(lines) + "\n")
    return EXIT_FAIL if failed else EXIT_OK


def _csv(rows) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerows(rows)
    return buf.getvalue()


def _closed_form(src: Source, kind: str):
    if src.antitree is not None:
        return antitree_closed_form(src.antitree, src.graph.depth, kind)
    if src.tree_cs is not None:
        if kind != "laplacian":
            raise UsageError("the tree-cs closed form is available for the laplacian only")
        return tree_cs_closed_form(*src.tree_cs, src.graph.depth)
    raise UsageError("closed forms need --antitree or --tree-cs")


def _decomposition_text(d) -> str:
    lines = [f"{d.operator_kind} decomposition, depth {d.depth}, {len(d.blocks)} distinct blocks, dimension {d.total_dimension}"]
    for i, blk in enumerate(d.blocks):
        a = " ".join(f"{x:.10g}" for x in blk.a[:6]) + (" ..." if len(blk.a) > 6 else "")
        b = " ".join(f"{x:.10g}" for x in blk.b[:6]) + (" ..." if len(blk.b) > 6 else "")
        lines.append(f"  block {i}: start {blk.start_sphere}, mult {blk.multiplicity}, length {blk.length}; a = [{a}]; b = [{b}]")
    return "\n".join(lines) + "\n"


def _write_decomposition(args, d, tag: str) -> None:
    if args.format == "csv":
        _emit(args, f"{tag}blocks.csv", d.blocks_csv())
        _emit(args, f"{tag}coefficients.csv", d.coefficients_csv())
    else:
        _emit(args, f"{tag}decomposition.txt", _decomposition_text(d))


def cmd_decompose(args) -> int:
    src = _load(args)
    if args.method in ("closed-form", "both"):
        closed = _closed_form(src, args.kind)
    try:
        generic = tridiagonalize(src.graph, args.kind, args.tol) if args.method in ("generic", "both") else None
    except DecompositionError as exc:
        sys.stdout.write(f"tridiagonalize: fail: {exc}\n")
        return EXIT_FAIL
    if args.method == "generic":
        _write_decomposition(args, generic, "")
        return EXIT_OK
    if args.method == "closed-form":
        _write_decomposition(args, closed, "")
        return EXIT_OK
    _write_decomposition(args, generic, "generic_")
    _write_decomposition(args, closed, "closed_")
    rep = reconcile(generic, closed, args.tol)
    msg = f"reconcile: {rep.verdict} at tol {args.tol:g}: {rep.message}\n"
    if args.format == "csv":
        sys.stdout.write(msg)
    else:
        _emit(args, "reconcile.txt", msg)
    return EXIT_OK if rep else EXIT_FAIL


def cmd_spectrum(args) -> int:
    src = _load(args)
    try:
        d = _closed_form(src, args.kind) if (src.antitree or src.tree_cs) else tridiagonalize(src.graph, args.kind)
    except DecompositionError as exc:
        sys.stdout.write(f"tridiagonalize: fail: {exc}\n")
        return EXIT_FAIL
    union = spectrum_union(d).values()
    dense = np.linalg.eigvalsh(compress_operator(src.graph, args.kind))
    dev = np.abs(union - dense)
    worst = float(dev.max()) if dev.size else 0.0
    rows = [("index", "union", "compressed", "deviation")]
    rows += [(i, f"{u:.15g}", f"{c:.15g}", f"{e:.3g}") for i, (u, c, e) in enumerate(zip(union, dense, dev))]
    passed = worst < args.match_tol
    summary = f"spectrum: {'pass' if passed else 'fail'}: max deviation {worst:.3g} over {len(union)} eigenvalues (tol {args.match_tol:g})\n"
    if args.format == "csv":
        _emit(args, "spectrum.csv", _csv(rows))
        sys.stdout.write(summary)
    else:
        _emit(args, "spectrum.txt", "\n".join(f"{r[0]:>6} {r[1]:>22} {r[2]:>22} {r[3]:>10}" for r in rows) + "\n" + summary)
    return EXIT_OK if passed else EXIT_FAIL


def _periodic_from(f, start: int, q: int) -> tuple[list[float], list[float]]:
    return [f(n) for n in range(start)], [f(n) for n in range(start, start + q)]


def _periodic_operator(args) -> PeriodicJacobi:
    if args.a or args.b:
        if not (args.a and args.b):
            raise UsageError("--a and --b go together")
        a, b = parse_sequence(args.a), parse_sequence(args.b)
        if not a.tail or not b.tail:
            raise UsageError("periodic coefficients need a nonempty tail")
        start = max(len(a.prefix), len(b.prefix))
        q = math.lcm(len(a.tail), len(b.tail))
        pa, ta = _periodic_from(lambda n: float(a.value_at(n)), start, q)
        pb, tb = _periodic_from(lambda n: float(b.value_at(n)), start, q)
        return PeriodicJacobi(ta, tb, pa, pb)
    if args.antitree:
        s = parse_sequence(args.antitree)
        if not s.tail:
            raise UsageError("the antitree needs a periodic tail")
        start, q = len(s.prefix) + 1, len(s.tail)
        sv = lambda n: s.value_at(n) if n >= 0 else 0
        pa, ta = _periodic_from(lambda n: math.sqrt(sv(n) * sv(n + 1)), start, q)
        pb, tb = _periodic_from(lambda n: float(sv(n - 1) + sv(n + 1)), start, q)
        return PeriodicJacobi(ta, tb, pa, pb)
    if args.tree_cs:
        k, _ = parse_tree_spec(args.tree_cs)
        if not k.tail:
            raise UsageError("the branching sequence needs a periodic tail")
        start, q = len(k.prefix) + 1, len(k.tail)
        pa, ta = _periodic_from(lambda n: math.sqrt(k.value_at(n + 1)), start, q)
        pb, tb = _periodic_from(lambda n: float(k.value_at(1) if n == 0 else k.value_at(n + 1) + 1), start, q)
        return PeriodicJacobi(ta, tb, pa, pb)
    raise UsageError("give --a/--b, --antitree or --tree-cs")


def cmd_bands(args) -> int:
    pj = _periodic_operator(args)
    bs = bands_periodic(pj, args.tol)
    if args.format == "csv":
        _emit(args, "bands.csv", bs.to_csv())
    else:
        lines = [f"period {pj.period}, {len(bs.bands)} band(s)"]
        lines += [f"  [{b.lo:.12g}, {b.hi:.12g}]" for b in bs.bands]
        _emit(args, "bands.txt", "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_detect_period(args) -> int:
    if args.values:
        try:
            seq = [float(x) for x in args.values.replace(";", ",").split(",") if x.strip()]
        except ValueError as exc:
            raise UsageError(f"bad --values: {exc}") from None
    elif args.antitree:
        seq = parse_sequence(args.antitree).values(0, args.length)
    else:
        raise UsageError("give --values or --antitree")
    res = detect_eventually_periodic(seq, args.max_period, args.min_repeats)
    text = "none detected\n" if res is None else f"N={res.N} q={res.q}\n"
    if args.format == "csv":
        text = "N,q\n" + ("" if res is None else f"{res.N},{res.q}\n")
    _emit(args, "period." + ("csv" if args.format == "csv" else "txt"), text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectral-layers", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="emit a graph as LGF")
    _add_source(p)
    _add_output(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="path-commuting, symmetry and family-preserving checks")
    _add_source(p)
    _add_output(p)
    p.add_argument("--check", choices=CHECKS + ("all",), default="all")
    p.add_argument("--n-max", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--kind", choices=("adjacency", "laplacian"), default="adjacency",
                   help="diagonal blocks used by the commuting-family check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("decompose", help="Jacobi block decomposition")
    _add_source(p)
    _add_output(p)
    p.add_argument("--kind", choices=OPERATOR_KINDS, default="laplacian")
    p.add_argument("--method", choices=("generic", "closed-form", "both"), default="generic")
    p.add_argument("--tol", type=float, default=1e-10)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("spectrum", help="direct-sum spectrum against the compressed operator")
    _add_source(p)
    _add_output(p)
    p.add_argument("--kind", choices=OPERATOR_KINDS, default="laplacian")
    p.add_argument("--match-tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("bands", help="bands of a periodic Jacobi matrix")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--antitree", metavar="P;T")
    grp.add_argument("--tree-cs", metavar="K|G", help="bands of the spherically symmetric block")
    grp.add_argument("--a", metavar="P;T", help="off-diagonal coefficients")
    p.add_argument("--b", metavar="P;T", help="diagonal coefficients")
    p.add_argument("--tol", type=float, default=1e-10)
    _add_output(p)
    p.set_defaults(func=cmd_bands)

    p = sub.add_parser("detect-period", help="eventual periodicity of a finite sequence")
    grp = p.add_mutually_exclusive_group(required=True)
    grp.add_argument("--values", help="comma separated numbers")
    grp.add_argument("--antitree", metavar="P;T")
    p.add_argument("--length", type=int, default=60)
    p.add_argument("--max-period", type=int, default=8)
    p.add_argument("--min-repeats", type=int, default=3)
    _add_output(p)
    p.set_defaults(func=cmd_detect_period)
    return parser


def _check_positive(args) -> None:
    for name in ("tol", "match_tol"):
        val = getattr(args, name, None)
        if val is not None and not val > 0:
            raise UsageError(f"--{name.replace('_', '-')} must be positive")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        _check_positive(args)
        return args.func(args)
    except (UsageError, LGFError, GraphError, SequenceExhausted, ValueError, OSError) as exc:
        sys.stderr.write(f"spectral-layers: error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
