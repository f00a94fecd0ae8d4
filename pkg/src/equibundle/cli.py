"""Command-line interface: one input document per run, deterministic reports.

Exit codes: 0 = success (a mathematical "no" is still a successful run),
2 = document parse error, 3 = invalid object (failed validation), 1 = an
internal cross-check failed.
"""

from __future__ import annotations

import argparse
import sys

from equibundle import filtered, graded, hensel, projline, topospace
from equibundle.io import (
    Document,
    GradedAlgebraDoc,
    LaurentMatrixDoc,
    ParseError,
    parse_document,
    parse_field,
    render_eps,
    render_field,
    render_laurent_matrix,
    render_matrix,
    render_polynomial,
    render_scalar,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_PARSE = 2
EXIT_INVALID = 3


class CommandError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _load(path: str, expected_kinds) -> Document:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise CommandError(f"cannot read {path}: {exc}", EXIT_PARSE) from exc
    try:
        doc = parse_document(text)
    except ParseError as exc:
        raise CommandError(f"parse error in {path}: {exc}", EXIT_PARSE) from exc
    except ValueError as exc:
        raise CommandError(f"invalid object in {path}: {exc}", EXIT_INVALID) from exc
    if doc.kind not in expected_kinds:
        raise CommandError(
            f"{path}: expected kind in {expected_kinds}, got {doc.kind!r}", EXIT_PARSE)
    return doc


def _emit(lines):
    sys.stdout.write("\n".join(lines) + "\n")


def _yesno(flag: bool) -> str:
    return "yes" if flag else "no"


# ---------------------------------------------------------------------------
# projline commands
# ---------------------------------------------------------------------------


def cmd_classify_p1(args) -> int:
    doc = _load(args.file, ("laurent_matrix",))
    bundle = projline.BundleOnP1(doc.matrix)
    factorization = projline.birkhoff_factorize(bundle)
    stype = projline.splitting_type(bundle)
    w, c = doc.matrix.det_unit_exponent()
    window = args.twist_window
    lines = [
        "report = classify-p1",
        f"rank = {bundle.rank}",
        f"field = {render_field(bundle.field)}",
        f"splitting type = ({', '.join(str(d) for d in stype)})",
        f"determinant = {render_scalar(c)} * t^{w}",
        f"degree check = {_yesno(stype.degree == -w)}",
        f"birkhoff A = {render_laurent_matrix(factorization.A)}",
        f"birkhoff D = {render_laurent_matrix(factorization.D)}",
        f"birkhoff B = {render_laurent_matrix(factorization.B)}",
        "factorization exact = yes",
    ]
    for m in range(-window, window + 1):
        lines.append(f"h0 twist {m} = {projline.h0_dimension(bundle, m)}")
    if args.verify:
        agree = all(
            projline.h0_dimension(bundle, m)
            == sum(max(0, d + m + 1) for d in stype)
            for m in range(-window, window + 1)
        )
        if not agree:
            raise CommandError("h0 oracle disagrees with the splitting type",
                               EXIT_INTERNAL)
        lines.append("h0 oracle agreement = yes")
    _emit(lines)
    return EXIT_OK


def cmd_birkhoff(args) -> int:
    doc = _load(args.file, ("laurent_matrix",))
    factorization = projline.birkhoff_factorize(projline.BundleOnP1(doc.matrix))
    _emit([
        "report = birkhoff",
        f"A = {render_laurent_matrix(factorization.A)}",
        f"D = {render_laurent_matrix(factorization.D)}",
        f"B = {render_laurent_matrix(factorization.B)}",
        f"exponents = {', '.join(str(k) for k in factorization.exponents)}",
        "exact = yes",
    ])
    return EXIT_OK


def cmd_cochar_to_bundle(args) -> int:
    doc = _load(args.file, ("splitting_type",))
    try:
        field = parse_field(args.field)
    except ParseError as exc:
        raise CommandError(str(exc), EXIT_PARSE) from exc
    bundle = projline.cocharacter_to_bundle(doc.degrees, field)
    _emit([LaurentMatrixDoc(field=field, matrix=bundle.matrix).render().rstrip("\n")])
    return EXIT_OK


def cmd_h0(args) -> int:
    doc = _load(args.file, ("laurent_matrix",))
    bundle = projline.BundleOnP1(doc.matrix)
    window = args.twist_window
    lines = ["report = h0", f"rank = {bundle.rank}"]
    for m in range(-window, window + 1):
        lines.append(f"h0 twist {m} = {projline.h0_dimension(bundle, m)}")
    _emit(lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# filtered commands
# ---------------------------------------------------------------------------


def _graded_ranks_line(ranks: dict) -> str:
    inner = ", ".join(f"{d}: {r}" for d, r in sorted(ranks.items()))
    return "{" + inner + "}"


def cmd_split_filtration(args) -> int:
    doc = _load(args.file, ("filtered_module",))
    module = doc.module
    report = filtered.validate_filtered(module)
    if not report:
        raise CommandError(f"invalid filtered module: {report.reason}", EXIT_INVALID)
    splitting = filtered.split_filtration(module)
    stype = filtered.iso_class_filtered(module)
    ring = module.ring
    basis_rows = [
        [splitting.basis[c][r] for c in range(len(splitting.basis))]
        for r in range(len(splitting.basis))
    ]
    lines = [
        "report = split-filtration",
        f"graded ranks = {_graded_ranks_line(splitting.graded_ranks)}",
        f"degrees by column = {', '.join(str(d) for d in splitting.degrees_by_column)}",
        f"splitting basis = {render_matrix(basis_rows, lambda v: render_eps(v, ring))}",
        f"splitting type = ({', '.join(str(d) for d in stype)})",
    ]
    if args.verify:
        filtered.verify_splitting(module, splitting)
    lines.append("exact = yes")
    _emit(lines)
    return EXIT_OK


def cmd_assoc_graded(args) -> int:
    doc = _load(args.file, ("filtered_module",))
    report = filtered.validate_filtered(doc.module)
    if not report:
        raise CommandError(f"invalid filtered module: {report.reason}", EXIT_INVALID)
    ranks = filtered.associated_graded(doc.module)
    _emit([
        "report = assoc-graded",
        f"graded ranks = {_graded_ranks_line(ranks)}",
        f"total rank = {sum(ranks.values())}",
    ])
    return EXIT_OK


# ---------------------------------------------------------------------------
# graded commands
# ---------------------------------------------------------------------------


def cmd_nakayama(args) -> int:
    doc = _load(args.file, ("graded_module",))
    module = doc.module
    try:
        result = graded.nakayama_zero_test(module)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    lines = ["report = nakayama", f"module is zero = {_yesno(result.is_zero)}"]
    variables = module.algebra.variables
    if result.is_zero:
        witness = result.witness
        lines.append(f"witness order = {witness.nilpotency_order}")
        lines.append("witness matrix = " + render_matrix(
            witness.coefficient_matrix, lambda p: render_polynomial(p, variables)))
        lines.append("witness combination = " + render_matrix(
            witness.combination, render_scalar))
        lines.append("unit constant = 1")
    else:
        lines.append(f"surviving degree = {result.surviving_degree}")
    if args.verify:
        bound = args.degree_bound
        if bound is None:
            bound = module.default_degree_bound()
        lo = min(module.generator_degrees, default=0)
        brute = all(module.component_dimension(d) == 0 for d in range(lo, bound + 1))
        if brute != result.is_zero:
            raise CommandError("verdict disagrees with component enumeration",
                               EXIT_INTERNAL)
        lines.append(f"component enumeration up to degree {bound} = agrees")
    _emit(lines)
    return EXIT_OK


def cmd_lift_map(args) -> int:
    doc = _load(args.file, ("graded_module",))
    if doc.target_degrees is None or doc.matrix is None:
        raise CommandError(
            "document must carry target_generators and matrix", EXIT_PARSE)
    module = doc.module
    variables = module.algebra.variables
    scalars = []
    for row in doc.matrix:
        scalar_row = []
        for entry in row:
            if not entry.is_constant():
                raise CommandError(
                    "matrix entries must be scalars over the residue field",
                    EXIT_INVALID)
            scalar_row.append(entry.constant_term)
        scalars.append(scalar_row)
    try:
        lifted = graded.lift_graded_map(scalars, module, doc.target_degrees)
        is_iso = graded.graded_iso_test(lifted, module, doc.target_degrees)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    _emit([
        "report = lift-map",
        "lifted matrix = " + render_matrix(
            lifted, lambda p: render_polynomial(p, variables)),
        f"reduction is bijective = {_yesno(is_iso)}",
        f"lift is isomorphism = {_yesno(is_iso)}",
    ])
    return EXIT_OK


# ---------------------------------------------------------------------------
# hensel commands
# ---------------------------------------------------------------------------


def cmd_hensel_check(args) -> int:
    doc = _load(args.file, ("graded_algebra", "findim_algebra"))
    if isinstance(doc, GradedAlgebraDoc):
        verdict = hensel.trivially_henselian(doc.algebra)
        _emit([
            "report = hensel-check",
            f"trivially henselian = {_yesno(verdict)}",
        ])
        return EXIT_OK
    try:
        algebra = doc.build()
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    radical = hensel.jacobson_radical(algebra)
    verdict = hensel.is_henselian_pair(algebra)
    _emit([
        "report = hensel-check",
        f"dimension = {algebra.dim}",
        f"radical dimension = {len(radical)}",
        f"henselian pair = {_yesno(verdict)}",
    ])
    return EXIT_OK


def cmd_lift_idempotent(args) -> int:
    doc = _load(args.file, ("findim_algebra",))
    try:
        algebra = doc.build()
        candidate = doc.idempotent_vector(algebra)
    except ParseError as exc:
        raise CommandError(str(exc), EXIT_PARSE) from exc
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    try:
        lift = hensel.lift_idempotent(algebra, candidate)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    _emit([
        "report = lift-idempotent",
        f"iterations = {lift.iterations}",
        "idempotent = [" + ", ".join(render_scalar(v) for v in lift.element) + "]",
        "exact = yes",
    ])
    return EXIT_OK


# ---------------------------------------------------------------------------
# topospace commands
# ---------------------------------------------------------------------------


def _render_subset(subset) -> str:
    return "{" + ", ".join(str(x) for x in sorted(subset)) + "}"


def cmd_pi0(args) -> int:
    doc = _load(args.file, ("poset",))
    data = topospace.pi0(doc.poset)
    lines = ["report = pi0", f"components = {data.count}"]
    for i, part in enumerate(data.components):
        lines.append(f"component {i} = {_render_subset(part)}")
    _emit(lines)
    return EXIT_OK


def cmd_clopen(args) -> int:
    doc = _load(args.file, ("poset",))
    sets = topospace.clopen_sets(doc.poset)
    lines = ["report = clopen", f"count = {len(sets)}"]
    for i, subset in enumerate(sets):
        lines.append(f"clopen {i} = {_render_subset(subset)}")
    _emit(lines)
    return EXIT_OK


def cmd_lemma_b2(args) -> int:
    doc = _load(args.file, ("poset",))
    verdict = topospace.lemma_b2_verify(doc.poset)
    _emit([
        "report = lemma-b2",
        f"bijections hold = {_yesno(verdict)}",
    ])
    return EXIT_OK


def cmd_prop_b3(args) -> int:
    doc = _load(args.file, ("monotone_map",))
    report = topospace.prop_b3_check(doc.map)
    _emit([
        "report = prop-b3",
        f"clopen bijection = {_yesno(report.clopen_bijection)}",
        f"pi0 bijective = {_yesno(report.pi0_bijective)}",
        f"pi0 homeomorphism = {_yesno(report.pi0_homeomorphism)}",
        f"equivalence holds = {_yesno(report.all_equivalent)}",
    ])
    return EXIT_OK


def cmd_homeo_check(args) -> int:
    doc = _load(args.file, ("monotone_map",))
    try:
        verdict = topospace.homeo_criterion(doc.map)
    except ValueError as exc:
        raise CommandError(str(exc), EXIT_INVALID) from exc
    _emit([
        "report = homeo-check",
        f"homeomorphism = {_yesno(verdict)}",
    ])
    return EXIT_OK


# ---------------------------------------------------------------------------


COMMANDS = {
    "classify-p1": cmd_classify_p1,
    "birkhoff": cmd_birkhoff,
    "cochar-to-bundle": cmd_cochar_to_bundle,
    "h0": cmd_h0,
    "split-filtration": cmd_split_filtration,
    "assoc-graded": cmd_assoc_graded,
    "nakayama": cmd_nakayama,
    "lift-map": cmd_lift_map,
    "hensel-check": cmd_hensel_check,
    "lift-idempotent": cmd_lift_idempotent,
    "pi0": cmd_pi0,
    "clopen": cmd_clopen,
    "lemma-b2": cmd_lemma_b2,
    "prop-b3": cmd_prop_b3,
    "homeo-check": cmd_homeo_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="equibundle",
        description="Exact bundle classification, graded lifting, filtration "
                    "splitting, henselian predicates, and finite spectral spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("file", help="input document")
        cmd.add_argument("--field", default="Q",
                         help="base field for generated objects (Q or F<p>)")
        cmd.add_argument("--twist-window", type=int, default=3,
                         help="half-width of the twist window for h0 tables")
        cmd.add_argument("--degree-bound", type=int, default=None,
                         help="override the graded component enumeration bound")
        cmd.add_argument("--verify", action="store_true",
                         help="force the independent oracle re-check")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler = COMMANDS[args.command]
    try:
        return handler(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AssertionError as exc:
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
