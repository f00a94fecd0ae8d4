"""Rank-n vector bundles on the projective line via transition matrices.

Conventions, fixed once for the whole package:

* charts U0 = Spec k[t] and Uinf = Spec k[s] with s = 1/t;
* a bundle is an invertible Laurent matrix g on the chart overlap;
* a global section is a pair (f, h) with f a polynomial vector in t,
  h a polynomial vector in s, and h = g*f on the overlap;
* the line bundle O(d) is the 1x1 matrix t^(-d).

Under these conventions O(1) has two independent sections (1, s) and (t, 1),
which pins the sign of the splitting type.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

from equibundle.exact_core import (
    Field,
    LaurentMatrix,
    LaurentPoly,
    QQ,
    Scalar,
    nullspace,
)

#: Marker for the point at infinity on the projective line.
INFINITY = object()


@dataclass(frozen=True)
class SplittingType:
    """Weakly decreasing integer tuple (d_1 >= ... >= d_n).

    Simultaneously the isomorphism class of a direct sum O(d_1)+...+O(d_n)
    and a conjugacy class of cocharacters of GL_n.
    """

    degrees: tuple[int, ...]

    def __post_init__(self):
        degrees = tuple(int(d) for d in self.degrees)
        if any(degrees[i] < degrees[i + 1] for i in range(len(degrees) - 1)):
            raise ValueError(f"degrees must be weakly decreasing, got {degrees}")
        object.__setattr__(self, "degrees", degrees)

    @property
    def rank(self) -> int:
        return len(self.degrees)

    @property
    def degree(self) -> int:
        return sum(self.degrees)

    def __iter__(self):
        return iter(self.degrees)

    def __len__(self):
        return len(self.degrees)


class BundleOnP1:
    """A rank-n bundle presented by its transition matrix on the overlap."""

    __slots__ = ("matrix",)

    def __init__(self, matrix: LaurentMatrix):
        self.matrix = matrix

    @property
    def rank(self) -> int:
        return self.matrix.n

    @property
    def field(self) -> Field:
        return self.matrix.field

    def __eq__(self, other):
        if not isinstance(other, BundleOnP1):
            return NotImplemented
        return self.matrix == other.matrix

    def __repr__(self):
        return f"BundleOnP1(rank={self.rank})"


@dataclass(frozen=True)
class BirkhoffFactorization:
    """Exact factorization g = A * D * B.

    A is invertible over k[1/t], B over k[t] (both with constant nonzero
    determinant), and D = diag(t^k_1, ..., t^k_n).  The exponents are kept
    in the column order the reduction produced; the splitting type is the
    sorted view d_i = -k_i.
    """

    A: LaurentMatrix
    D: LaurentMatrix
    B: LaurentMatrix
    exponents: tuple[int, ...]


def cocharacter_to_bundle(d: SplittingType, field: Field = QQ) -> BundleOnP1:
    """Transition matrix diag(t^-d_1, ..., t^-d_n) of O(d_1)+...+O(d_n)."""
    return BundleOnP1(LaurentMatrix.monomial_diagonal(field, [-di for di in d.degrees]))


def _top_data(column: Sequence[LaurentPoly]) -> tuple[int, list[Scalar]]:
    """Top degree of a nonzero column and its vector of t^top coefficients."""
    field = column[0].field
    top = max(entry.max_exp() for entry in column if not entry.is_zero)
    return top, [entry.coeff(top) for entry in column]


def _column_reduce(g: LaurentMatrix):
    """Right-reduce g over k[t] until the top-coefficient matrix is invertible.

    Returns (columns, tops, w) with g = C * W exactly, where C has the given
    columns, W is invertible over k[t] with constant determinant, and the
    top-coefficient vectors of the columns of C are linearly independent.
    """
    field = g.field
    n = g.n
    cols = [[g.entry(i, j) for i in range(n)] for j in range(n)]
    one = LaurentPoly.one(field)
    zero = LaurentPoly.zero(field)
    w = [[one if i == j else zero for j in range(n)] for i in range(n)]

    while True:
        tops = []
        tcs = []
        for col in cols:
            top, tc = _top_data(col)
            tops.append(top)
            tcs.append(tc)
        # Columns of the scalar matrix are the top-coefficient vectors.
        kernel = nullspace(field, [[tcs[j][i] for j in range(n)] for i in range(n)], n)
        if not kernel:
            return cols, tops, w
        lam = kernel[0]
        support = [j for j in range(n) if lam[j]]
        pivot = max(support, key=lambda j: (tops[j], j))
        # New pivot column: sum of lam_j * t^(top_pivot - top_j) * col_j.
        # This kills the t^top_pivot coefficient vector, so the total top
        # degree strictly decreases; it is a unimodular operation over k[t].
        new_col = [zero] * n
        shifts = {}
        for j in support:
            shift = tops[pivot] - tops[j]
            shifts[j] = shift
            for i in range(n):
                if not cols[j][i].is_zero:
                    new_col[i] = new_col[i] + cols[j][i].scaled(lam[j]).shifted(shift)
        cols[pivot] = new_col
        # Maintain g = C * W: the inverse operation acts on the rows of W.
        inv_pivot = field.inv(lam[pivot])
        w[pivot] = [entry.scaled(inv_pivot) for entry in w[pivot]]
        for j in support:
            if j == pivot:
                continue
            factor = lam[j]
            shift = shifts[j]
            w[j] = [
                wj - wp.scaled(factor).shifted(shift)
                for wj, wp in zip(w[j], w[pivot])
            ]


def birkhoff_factorize(bundle: BundleOnP1) -> BirkhoffFactorization:
    """Factor the transition matrix as A * D * B with D = diag(t^k_i).

    The factorization is verified by exact multiplication before returning.
    """
    g = bundle.matrix
    field = g.field
    n = g.n
    cols, tops, w = _column_reduce(g)

    # A = C * D^(-1): strip t^top from each column; entries land in k[1/t].
    a_rows = [[cols[j][i].shifted(-tops[j]) for j in range(n)] for i in range(n)]
    A = LaurentMatrix(field, a_rows)
    D = LaurentMatrix.monomial_diagonal(field, tops)
    B = LaurentMatrix(field, w)

    if not A.entries_in_inverse_poly_ring():
        raise AssertionError("left factor escaped k[1/t]")
    if not B.entries_in_poly_ring():
        raise AssertionError("right factor escaped k[t]")
    if A.det_unit_exponent()[0] != 0 or B.det_unit_exponent()[0] != 0:
        raise AssertionError("outer factor determinant is not constant")
    if (A @ D) @ B != g:
        raise AssertionError("factorization residual is nonzero")
    return BirkhoffFactorization(A=A, D=D, B=B, exponents=tuple(tops))


def splitting_type(bundle: BundleOnP1) -> SplittingType:
    """Splitting type of the bundle: d_i = -k_i, weakly decreasing."""
    factorization = birkhoff_factorize(bundle)
    return SplittingType(tuple(sorted((-k for k in factorization.exponents), reverse=True)))


# ---------------------------------------------------------------------------
# Section-count oracle
# ---------------------------------------------------------------------------


def _sections_dimension(g: LaurentMatrix, twist: int, bound: int) -> int:
    """dim of {f in k[t]^n, deg <= bound : t^(-twist) * g * f has no positive exponent}.

    Sparse elimination over the exact field; variables are the coefficients
    f[j, d] for 0 <= d <= bound.
    """
    field = g.field
    n = g.n
    nvars = n * (bound + 1)

    # rows[e_i] : dict var -> coeff, one row per (output coordinate, exponent >= 1)
    rows: list[dict[int, Scalar]] = []
    for i in range(n):
        entries = [g.entry(i, j) for j in range(n)]
        max_e = max(
            (entry.max_exp() - twist + bound for entry in entries if not entry.is_zero),
            default=0,
        )
        for e in range(1, max_e + 1):
            row: dict[int, Scalar] = {}
            for j, entry in enumerate(entries):
                if entry.is_zero:
                    continue
                for exp, coeff in entry.terms():
                    d = e - (exp - twist)
                    if 0 <= d <= bound:
                        var = j * (bound + 1) + d
                        acc = row.get(var, field.zero) + coeff
                        if acc:
                            row[var] = acc
                        else:
                            row.pop(var, None)
            if row:
                rows.append(row)

    # Sparse Gaussian elimination.  Rank = number of pivots.
    var_rows: dict[int, set[int]] = {}
    for idx, row in enumerate(rows):
        for var in row:
            var_rows.setdefault(var, set()).add(idx)
    active = set(range(len(rows)))
    rank = 0

    # Phase 1: a singleton row forces its variable to zero, so eliminating it
    # from other rows is pure deletion; this resolves diagonal-shaped systems
    # in linear time and shrinks the rest.
    queue = [idx for idx in active if len(rows[idx]) == 1]
    while queue:
        idx = queue.pop()
        if idx not in active:
            continue
        row = rows[idx]
        if len(row) != 1:
            continue
        active.discard(idx)
        rank += 1
        var = next(iter(row))
        for other_idx in var_rows.pop(var, ()):
            if other_idx == idx or other_idx not in active:
                continue
            other = rows[other_idx]
            other.pop(var, None)
            if len(other) == 1:
                queue.append(other_idx)
            elif not other:
                active.discard(other_idx)

    # Phase 2: general elimination on whatever is left.
    while active:
        idx = min(active, key=lambda i: (len(rows[i]), i))
        row = rows[idx]
        active.discard(idx)
        if not row:
            continue
        rank += 1
        pivot = min(row, key=lambda v: (len(var_rows.get(v, ())), v))
        inv = field.inv(row[pivot])
        row = {v: inv * c for v, c in row.items()}
        rows[idx] = row
        for other_idx in list(var_rows.get(pivot, ())):
            if other_idx == idx or other_idx not in active:
                continue
            other = rows[other_idx]
            factor = other.get(pivot)
            if factor is None:
                continue
            for v, c in row.items():
                acc = other.get(v, field.zero) - factor * c
                if acc:
                    if v not in other:
                        var_rows.setdefault(v, set()).add(other_idx)
                    other[v] = acc
                else:
                    if v in other:
                        del other[v]
                        var_rows[v].discard(other_idx)
        var_rows.pop(pivot, None)
    return nvars - rank


def h0_dimension(bundle: BundleOnP1, twist: int = 0) -> int:
    """Dimension of the space of global sections of the twisted bundle.

    Computed by exact linear algebra on Laurent coefficients with the degree
    bound n*(e_max - e_min) + |twist| + 1, where the exponent window of the
    transition matrix is normalized to contain 0 (otherwise monomial
    diagonals t^-d would get a window of width zero and sections of degree d
    would be truncated).  Stability is verified by recomputing at bound + 1.
    """
    g = bundle.matrix
    e_min, e_max = g.exponent_range()
    e_min, e_max = min(e_min, 0), max(e_max, 0)
    bound = g.n * (e_max - e_min) + abs(twist) + 1
    dim = _sections_dimension(g, twist, bound)
    recheck = _sections_dimension(g, twist, bound + 1)
    if recheck != dim:
        raise ArithmeticError(
            f"section space not stable at degree bound {bound} "
            f"({dim} vs {recheck}); the bound is too small for this input"
        )
    return dim


# ---------------------------------------------------------------------------
# Fibers at rational points
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FiberReport:
    """Trivialized fiber at a rational point of the projective line.

    For GL_n the fiber is always trivial of rank n; away from 0 and infinity
    the report carries the evaluated transition matrix gluing the two chart
    trivializations (invertible since det g = c * t^w).
    """

    rank: int
    chart: str
    is_trivial: bool
    transition_value: Optional[tuple[tuple[Scalar, ...], ...]]


def fiber_at_point(bundle: BundleOnP1, point: Union[Scalar, int, object]) -> FiberReport:
    """Fiber of the bundle at a k-rational point (use INFINITY for s = 0)."""
    g = bundle.matrix
    if point is INFINITY:
        return FiberReport(rank=g.n, chart="Uinf", is_trivial=True, transition_value=None)
    value = g.field(point)
    if not value:
        return FiberReport(rank=g.n, chart="U0", is_trivial=True, transition_value=None)
    evaluated = tuple(
        tuple(g.entry(i, j).evaluate(value) for j in range(g.n)) for i in range(g.n)
    )
    return FiberReport(rank=g.n, chart="U0", is_trivial=True, transition_value=evaluated)
