"""Document formats: one UTF-8 text document describes one object.

A document is a list of `key = value` lines; blank lines and lines starting
with `#` are skipped on parse and never printed.  The first key must be
`kind`.  Canonical printing uses a fixed key order per kind, single spaces
around `=` and after commas, and normalizes scalars as follows: rationals as
`p/q` with the `/q` omitted when q = 1, prime-field residues as bare
integers in [0, p) (the field header carries p; the standalone form
`p mod N` is accepted on parse), Laurent terms as `c*t^e` with the exponent
always written, truncated-polynomial entries as `c` or `c*e^j` with ascending
j, multivariate terms as `c` or `c*x^a*y^b` with the variables in declared
order.  Signs live in the ` + ` / ` - ` joiners.  Posets are given by their
size and generating specialization pairs `i<j`.

parse(render(doc)) == doc and render(parse(text)) is a fixed point: the
grammar round-trips byte-exactly after one normalization pass.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from equibundle.exact_core import (
    Field,
    FpElement,
    GF,
    LaurentMatrix,
    LaurentPoly,
    PrimeField,
    QQ,
    RationalField,
    Scalar,
)
from equibundle.filtered import EpsRing, FilteredModule
from equibundle.graded import GradedAlgebra, GradedModulePresentation, Polynomial
from equibundle.hensel import FiniteDimAlgebra, from_univariate_quotient
from equibundle.projline import SplittingType
from equibundle.topospace import FinitePoset, MonotoneMap


class ParseError(ValueError):
    """Malformed document text (reserved exit code 2 in the CLI)."""


KINDS = (
    "laurent_matrix",
    "splitting_type",
    "graded_algebra",
    "graded_module",
    "filtered_module",
    "findim_algebra",
    "poset",
    "monotone_map",
)


# ---------------------------------------------------------------------------
# Scalars
# ---------------------------------------------------------------------------


def render_field(field: Field) -> str:
    return "Q" if isinstance(field, RationalField) else f"F{field.p}"


def parse_field(text: str) -> Field:
    text = text.strip()
    if text == "Q":
        return QQ
    if text.startswith("F"):
        try:
            return GF(int(text[1:]))
        except ValueError as exc:
            raise ParseError(f"bad field {text!r}: {exc}") from exc
    raise ParseError(f"unknown field {text!r}")


def render_scalar(value: Scalar) -> str:
    if isinstance(value, FpElement):
        return str(value.residue)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_scalar(text: str, field: Field) -> Scalar:
    text = text.strip()
    if " mod " in text:
        left, right = text.split(" mod ", 1)
        try:
            residue, modulus = int(left), int(right)
        except ValueError as exc:
            raise ParseError(f"bad scalar {text!r}") from exc
        if not isinstance(field, PrimeField) or field.p != modulus:
            raise ParseError(f"scalar {text!r} does not match the field header")
        return field(residue)
    try:
        return field(Fraction(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad scalar {text!r}: {exc}") from exc


def _scalar_magnitude(value: Scalar) -> tuple[bool, str]:
    """(negative?, printed magnitude); prime-field residues are never negative."""
    if isinstance(value, FpElement):
        return False, str(value.residue)
    return value < 0, render_scalar(-value if value < 0 else value)


def _join_terms(parts: Sequence[tuple[bool, str]]) -> str:
    out = []
    for i, (negative, body) in enumerate(parts):
        if i == 0:
            out.append(f"-{body}" if negative else body)
        else:
            out.append(f" - {body}" if negative else f" + {body}")
    return "".join(out)


def _split_terms(text: str) -> list[str]:
    """Split on top-level + and -, keeping the sign with each term."""
    terms = []
    current = ""
    sign = "+"
    for idx, ch in enumerate(text):
        if ch in "+-" and current.strip():
            # a sign directly after '^', 'e', or '*' belongs to an exponent
            prev = current.rstrip()[-1:]
            if prev in "^*/":
                current += ch
                continue
            terms.append((sign, current.strip()))
            sign, current = ch, ""
        elif ch in "+-" and not current.strip():
            if current.strip() == "" and not terms and idx == 0:
                sign = ch
            else:
                current += ch
        else:
            current += ch
    if current.strip():
        terms.append((sign, current.strip()))
    if not terms:
        raise ParseError(f"empty term list in {text!r}")
    return [f"{s}{body}" for s, body in terms]


# ---------------------------------------------------------------------------
# Laurent polynomials / matrices
# ---------------------------------------------------------------------------


def render_laurent(poly: LaurentPoly) -> str:
    if poly.is_zero:
        return "0"
    parts = []
    for exp, coeff in sorted(poly.terms(), reverse=True):
        negative, body = _scalar_magnitude(coeff)
        parts.append((negative, f"{body}*t^{exp}"))
    return _join_terms(parts)


def parse_laurent(text: str, field: Field) -> LaurentPoly:
    text = text.strip()
    if text == "0":
        return LaurentPoly.zero(field)
    poly = LaurentPoly.zero(field)
    for term in _split_terms(text):
        sign = 1
        if term.startswith("-"):
            sign, term = -1, term[1:]
        elif term.startswith("+"):
            term = term[1:]
        if "*t^" in term:
            coeff_text, exp_text = term.split("*t^", 1)
        elif term.startswith("t^"):
            coeff_text, exp_text = "1", term[2:]
        else:
            coeff_text, exp_text = term, "0"
        try:
            exp = int(exp_text)
        except ValueError as exc:
            raise ParseError(f"bad exponent in term {term!r}") from exc
        coeff = parse_scalar(coeff_text, field)
        if sign < 0:
            coeff = -coeff
        poly = poly + LaurentPoly.monomial(field, coeff, exp)
    return poly


def _split_bracket_list(text: str) -> list[str]:
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError(f"expected a bracketed list, got {text!r}")
    inner = text[1:-1]
    items = []
    depth = 0
    current = ""
    for ch in inner:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
            if depth < 0:
                raise ParseError(f"unbalanced brackets in {text!r}")
        if ch == "," and depth == 0:
            items.append(current)
            current = ""
        else:
            current += ch
    if depth != 0:
        raise ParseError(f"unbalanced brackets in {text!r}")
    if current.strip():
        items.append(current)
    elif current and items:
        raise ParseError(f"trailing comma in {text!r}")
    return [item.strip() for item in items]


def render_matrix(rows, render_entry) -> str:
    return "[" + ", ".join(
        "[" + ", ".join(render_entry(entry) for entry in row) + "]" for row in rows
    ) + "]"


def parse_matrix(text: str, parse_entry) -> list[list]:
    rows = []
    for row_text in _split_bracket_list(text):
        entries = _split_bracket_list(row_text) if row_text.strip() != "[]" else []
        rows.append([parse_entry(e) for e in entries])
    return rows


def render_laurent_matrix(matrix: LaurentMatrix) -> str:
    return render_matrix(matrix.rows, render_laurent)


# ---------------------------------------------------------------------------
# Multivariate polynomials
# ---------------------------------------------------------------------------


def render_polynomial(poly: Polynomial, variables: Sequence[str]) -> str:
    if poly.is_zero:
        return "0"
    parts = []
    for mono, coeff in poly.terms():
        negative, body = _scalar_magnitude(coeff)
        factors = [f"{variables[i]}^{e}" for i, e in enumerate(mono) if e]
        parts.append((negative, "*".join([body] + factors)))
    return _join_terms(parts)


def parse_polynomial(text: str, field: Field, variables: Sequence[str]) -> Polynomial:
    text = text.strip()
    nvars = len(variables)
    index = {name: i for i, name in enumerate(variables)}
    if text == "0":
        return Polynomial.zero(field, nvars)
    poly = Polynomial.zero(field, nvars)
    for term in _split_terms(text):
        sign = 1
        if term.startswith("-"):
            sign, term = -1, term[1:]
        elif term.startswith("+"):
            term = term[1:]
        factors = term.split("*")
        coeff_text = factors[0]
        mono = [0] * nvars
        start = 1
        if "^" in coeff_text:  # term like x^2 with implicit coefficient 1
            coeff_text = "1"
            start = 0
        coeff = parse_scalar(coeff_text, field)
        for factor in factors[start:]:
            if "^" not in factor:
                raise ParseError(f"bad monomial factor {factor!r}")
            name, exp_text = factor.split("^", 1)
            if name not in index:
                raise ParseError(f"unknown variable {name!r}")
            try:
                mono[index[name]] += int(exp_text)
            except ValueError as exc:
                raise ParseError(f"bad exponent in {factor!r}") from exc
        if sign < 0:
            coeff = -coeff
        poly = poly + Polynomial.monomial(field, nvars, tuple(mono), coeff)
    return poly


# ---------------------------------------------------------------------------
# Truncated-polynomial ring elements
# ---------------------------------------------------------------------------


def render_eps(value: tuple, ring: EpsRing) -> str:
    nonzero = [(j, c) for j, c in enumerate(value) if c]
    if not nonzero:
        return "0"
    parts = []
    for j, coeff in nonzero:
        negative, body = _scalar_magnitude(coeff)
        parts.append((negative, body if j == 0 else f"{body}*e^{j}"))
    return _join_terms(parts)


def parse_eps(text: str, ring: EpsRing) -> tuple:
    text = text.strip()
    if text == "0":
        return ring.zero
    coeffs = [ring.field.zero] * ring.order
    for term in _split_terms(text):
        sign = 1
        if term.startswith("-"):
            sign, term = -1, term[1:]
        elif term.startswith("+"):
            term = term[1:]
        if "*e^" in term:
            coeff_text, exp_text = term.split("*e^", 1)
        elif term.startswith("e^"):
            coeff_text, exp_text = "1", term[2:]
        else:
            coeff_text, exp_text = term, "0"
        try:
            j = int(exp_text)
        except ValueError as exc:
            raise ParseError(f"bad eps exponent in {term!r}") from exc
        if not 0 <= j < ring.order:
            raise ParseError(f"eps exponent {j} outside truncation order {ring.order}")
        coeff = parse_scalar(coeff_text, ring.field)
        coeffs[j] = coeffs[j] + (-coeff if sign < 0 else coeff)
    return tuple(coeffs)


# ---------------------------------------------------------------------------
# Documents
# ---------------------------------------------------------------------------


def _parse_lines(text: str) -> list[tuple[str, str]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = line.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    if not pairs:
        raise ParseError("empty document")
    return pairs


def _int_list(text: str) -> list[int]:
    text = text.strip()
    if not text:
        return []
    try:
        return [int(part.strip()) for part in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad integer list {text!r}") from exc


def _render_int_list(values) -> str:
    return ", ".join(str(v) for v in values)


@dataclass(frozen=True)
class LaurentMatrixDoc:
    kind = "laurent_matrix"
    field: Field
    matrix: LaurentMatrix

    def render(self) -> str:
        return (
            f"kind = {self.kind}\n"
            f"field = {render_field(self.field)}\n"
            f"matrix = {render_laurent_matrix(self.matrix)}\n"
        )


@dataclass(frozen=True)
class SplittingTypeDoc:
    kind = "splitting_type"
    degrees: SplittingType

    def render(self) -> str:
        return (
            f"kind = {self.kind}\n"
            f"degrees = {_render_int_list(self.degrees.degrees)}\n"
        )


def _algebra_lines(alg: GradedAlgebra) -> list[str]:
    lines = []
    if alg.variables:
        lines.append(f"variables = {', '.join(alg.variables)}")
        lines.append(f"degrees = {_render_int_list(alg.degrees)}")
    for rel in alg.relations:
        lines.append(f"relation = {render_polynomial(rel, alg.variables)}")
    return lines


@dataclass(frozen=True)
class GradedAlgebraDoc:
    kind = "graded_algebra"
    algebra: GradedAlgebra

    def render(self) -> str:
        alg = self.algebra
        lines = [f"kind = {self.kind}", f"field = {render_field(alg.field)}"]
        lines.extend(_algebra_lines(alg))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class GradedModuleDoc:
    kind = "graded_module"
    module: GradedModulePresentation
    target_degrees: Optional[tuple[int, ...]] = None
    matrix: Optional[tuple[tuple[Polynomial, ...], ...]] = None

    def render(self) -> str:
        alg = self.module.algebra
        lines = [f"kind = {self.kind}", f"field = {render_field(alg.field)}"]
        lines.extend(_algebra_lines(alg))
        lines.append(f"generators = {_render_int_list(self.module.generator_degrees)}")
        for col in self.module.relations:
            body = ", ".join(render_polynomial(p, alg.variables) for p in col)
            lines.append(f"module_relation = [{body}]")
        if self.target_degrees is not None:
            lines.append(f"target_generators = {_render_int_list(self.target_degrees)}")
        if self.matrix is not None:
            lines.append("matrix = " + render_matrix(
                self.matrix, lambda p: render_polynomial(p, alg.variables)))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FilteredModuleDoc:
    kind = "filtered_module"
    module: FilteredModule

    def render(self) -> str:
        f = self.module
        lines = [
            f"kind = {self.kind}",
            f"field = {render_field(f.ring.field)}",
        ]
        if f.ring.order != 1:
            lines.append(f"epsilon_power = {f.ring.order}")
        lines.append(f"window = {f.lo}, {f.hi}")
        lines.append(f"ranks = {_render_int_list(f.ranks)}")
        for step, mat in enumerate(f.maps):
            body = render_matrix(mat, lambda v: render_eps(v, f.ring))
            lines.append(f"map {f.lo + step} = {body}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class FinDimAlgebraDoc:
    kind = "findim_algebra"
    field: Field
    quotient: Polynomial          # univariate, variable "x", monic
    ideal: tuple[Polynomial, ...]
    idempotent: Optional[Polynomial] = None

    _VARS = ("x",)

    def render(self) -> str:
        lines = [
            f"kind = {self.kind}",
            f"field = {render_field(self.field)}",
            f"quotient = {render_polynomial(self.quotient, self._VARS)}",
            "ideal = [" + ", ".join(
                render_polynomial(p, self._VARS) for p in self.ideal) + "]",
        ]
        if self.idempotent is not None:
            lines.append(f"idempotent = {render_polynomial(self.idempotent, self._VARS)}")
        return "\n".join(lines) + "\n"

    def _poly_coeffs(self, poly: Polynomial) -> list:
        degree = max((m[0] for m, _ in poly.terms()), default=0)
        return [poly.coeff((i,)) for i in range(degree + 1)]

    def build(self) -> FiniteDimAlgebra:
        return from_univariate_quotient(
            self.field,
            self._poly_coeffs(self.quotient),
            [self._poly_coeffs(p) for p in self.ideal],
        )

    def idempotent_vector(self, algebra: FiniteDimAlgebra):
        if self.idempotent is None:
            raise ParseError("document carries no idempotent")
        coeffs = self._poly_coeffs(self.idempotent)
        if len(coeffs) > algebra.dim:
            raise ParseError("idempotent degree exceeds the algebra dimension")
        coeffs += [self.field.zero] * (algebra.dim - len(coeffs))
        return tuple(coeffs)


@dataclass(frozen=True)
class PosetDoc:
    kind = "poset"
    poset: FinitePoset
    generators: tuple[tuple[int, int], ...]

    def render(self) -> str:
        lines = [f"kind = {self.kind}", f"n = {self.poset.size}"]
        for x, y in self.generators:
            lines.append(f"rel = {x}<{y}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class MonotoneMapDoc:
    kind = "monotone_map"
    map: MonotoneMap
    source_generators: tuple[tuple[int, int], ...]
    target_generators: tuple[tuple[int, int], ...]

    def render(self) -> str:
        lines = [
            f"kind = {self.kind}",
            f"source_n = {self.map.source.size}",
        ]
        for x, y in self.source_generators:
            lines.append(f"source_rel = {x}<{y}")
        lines.append(f"target_n = {self.map.target.size}")
        for x, y in self.target_generators:
            lines.append(f"target_rel = {x}<{y}")
        lines.append(f"map = {_render_int_list(self.map.mapping)}")
        return "\n".join(lines) + "\n"


Document = Union[
    LaurentMatrixDoc,
    SplittingTypeDoc,
    GradedAlgebraDoc,
    GradedModuleDoc,
    FilteredModuleDoc,
    FinDimAlgebraDoc,
    PosetDoc,
    MonotoneMapDoc,
]


def _parse_relation_pair(text: str) -> tuple[int, int]:
    if "<" not in text:
        raise ParseError(f"bad relation pair {text!r}")
    left, right = text.split("<", 1)
    try:
        return int(left.strip()), int(right.strip())
    except ValueError as exc:
        raise ParseError(f"bad relation pair {text!r}") from exc


class _Fields:
    """Cursor over parsed key/value pairs with single-use and repeat access."""

    def __init__(self, pairs):
        self.pairs = list(pairs)

    def take(self, key: str, required: bool = True) -> Optional[str]:
        for i, (k, v) in enumerate(self.pairs):
            if k == key:
                del self.pairs[i]
                return v
        if required:
            raise ParseError(f"missing field {key!r}")
        return None

    def take_all(self, key: str) -> list[str]:
        found = [v for k, v in self.pairs if k == key]
        self.pairs = [(k, v) for k, v in self.pairs if k != key]
        return found

    def finish(self):
        if self.pairs:
            raise ParseError(f"unexpected field {self.pairs[0][0]!r}")


def parse_document(text: str) -> Document:
    pairs = _parse_lines(text)
    if pairs[0][0] != "kind":
        raise ParseError("first field must be 'kind'")
    kind = pairs[0][1]
    fields = _Fields(pairs[1:])
    if kind == "laurent_matrix":
        field = parse_field(fields.take("field"))
        rows = parse_matrix(fields.take("matrix"), lambda t: parse_laurent(t, field))
        fields.finish()
        return LaurentMatrixDoc(field=field, matrix=LaurentMatrix(field, rows))
    if kind == "splitting_type":
        degrees = _int_list(fields.take("degrees"))
        fields.finish()
        return SplittingTypeDoc(degrees=SplittingType(tuple(degrees)))
    if kind == "graded_algebra":
        algebra = _parse_algebra(fields)
        fields.finish()
        return GradedAlgebraDoc(algebra=algebra)
    if kind == "graded_module":
        algebra = _parse_algebra(fields)
        generators = tuple(_int_list(fields.take("generators")))
        columns = []
        for column_text in fields.take_all("module_relation"):
            entries = _split_bracket_list(column_text)
            columns.append(tuple(
                parse_polynomial(e, algebra.field, algebra.variables) for e in entries))
        target_text = fields.take("target_generators", required=False)
        matrix_text = fields.take("matrix", required=False)
        fields.finish()
        module = GradedModulePresentation(algebra, generators, tuple(columns))
        target = tuple(_int_list(target_text)) if target_text is not None else None
        matrix = None
        if matrix_text is not None:
            matrix = tuple(
                tuple(row) for row in parse_matrix(
                    matrix_text,
                    lambda t: parse_polynomial(t, algebra.field, algebra.variables),
                )
            )
        return GradedModuleDoc(module=module, target_degrees=target, matrix=matrix)
    if kind == "filtered_module":
        field = parse_field(fields.take("field"))
        order_text = fields.take("epsilon_power", required=False)
        try:
            order = int(order_text) if order_text is not None else 1
        except ValueError as exc:
            raise ParseError(f"bad epsilon power {order_text!r}") from exc
        ring = EpsRing(field, order)
        window = _int_list(fields.take("window"))
        if len(window) != 2:
            raise ParseError("window must be 'lo, hi'")
        lo, hi = window
        ranks = tuple(_int_list(fields.take("ranks")))
        maps = []
        for index in range(lo, hi):
            text_map = fields.take(f"map {index}")
            maps.append(tuple(
                tuple(row) for row in parse_matrix(
                    text_map, lambda t: parse_eps(t, ring))
            ))
        fields.finish()
        # shape/validation problems are object-level errors, not parse errors
        module = FilteredModule(ring=ring, lo=lo, hi=hi, ranks=ranks,
                                maps=tuple(maps))
        return FilteredModuleDoc(module=module)
    if kind == "findim_algebra":
        field = parse_field(fields.take("field"))
        variables = ("x",)
        quotient = parse_polynomial(fields.take("quotient"), field, variables)
        ideal_items = _split_bracket_list(fields.take("ideal"))
        ideal = tuple(parse_polynomial(t, field, variables) for t in ideal_items)
        idem_text = fields.take("idempotent", required=False)
        idempotent = (parse_polynomial(idem_text, field, variables)
                      if idem_text is not None else None)
        fields.finish()
        return FinDimAlgebraDoc(field=field, quotient=quotient, ideal=ideal,
                                idempotent=idempotent)
    if kind == "poset":
        size_text = fields.take("n")
        try:
            size = int(size_text)
        except ValueError as exc:
            raise ParseError(f"bad poset size {size_text!r}") from exc
        generators = tuple(_parse_relation_pair(t) for t in fields.take_all("rel"))
        fields.finish()
        return PosetDoc(poset=FinitePoset.from_relations(size, generators),
                        generators=generators)
    if kind == "monotone_map":
        try:
            source_n = int(fields.take("source_n"))
        except ValueError as exc:
            raise ParseError(f"bad source size: {exc}") from exc
        source_rel = tuple(_parse_relation_pair(t) for t in fields.take_all("source_rel"))
        try:
            target_n = int(fields.take("target_n"))
        except ValueError as exc:
            raise ParseError(f"bad target size: {exc}") from exc
        target_rel = tuple(_parse_relation_pair(t) for t in fields.take_all("target_rel"))
        mapping = tuple(_int_list(fields.take("map")))
        fields.finish()
        source = FinitePoset.from_relations(source_n, source_rel)
        target = FinitePoset.from_relations(target_n, target_rel)
        return MonotoneMapDoc(map=MonotoneMap(source, target, mapping),
                              source_generators=source_rel,
                              target_generators=target_rel)
    raise ParseError(f"unknown kind {kind!r}")


def _parse_algebra(fields: _Fields) -> GradedAlgebra:
    field = parse_field(fields.take("field"))
    variables_text = fields.take("variables", required=False)
    if variables_text is None or not variables_text.strip():
        variables: tuple[str, ...] = ()
    else:
        variables = tuple(v.strip() for v in variables_text.split(","))
    degrees_text = fields.take("degrees", required=False)
    degrees = tuple(_int_list(degrees_text)) if degrees_text is not None else ()
    relations = tuple(
        parse_polynomial(t, field, variables) for t in fields.take_all("relation"))
    return GradedAlgebra(field, variables, degrees, relations)
