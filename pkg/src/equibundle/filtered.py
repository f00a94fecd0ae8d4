"""Filtered modules: the bundle model on the quotient of the line by scaling.

A bundle datum is a finite window of free modules E_lo, ..., E_hi over the
base ring together with transition maps T: E_i -> E_{i+1}, each a split
injection (injective with free cokernel); below the window everything is
zero, above it T is an isomorphism.  The colimit E_inf = E_hi then carries a
filtration by direct summands, the associated graded records the cokernel
ranks, and a splitting is a grading of E_inf whose partial sums reproduce the
filtration exactly.

Base rings are exact fields or truncated polynomial rings k[eps]/(eps^m); a
field is the case m = 1.  Degrees increase along the window; the classical
decreasing-filtration picture is this one read through i -> -i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from equibundle.exact_core import Field, Scalar
from equibundle.projline import SplittingType


@dataclass(frozen=True)
class EpsRing:
    """Truncated polynomial ring k[eps]/(eps^order); order 1 is the field itself.

    Elements are coefficient tuples of length `order`; all arithmetic is
    exact and units are exactly the elements with invertible constant term.
    """

    field: Field
    order: int = 1

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("truncation order must be at least 1")

    def __call__(self, value) -> tuple[Scalar, ...]:
        if isinstance(value, tuple):
            if len(value) != self.order:
                raise ValueError(f"expected {self.order} coefficients, got {len(value)}")
            return tuple(self.field(v) for v in value)
        return (self.field(value),) + (self.field.zero,) * (self.order - 1)

    @property
    def zero(self):
        return (self.field.zero,) * self.order

    @property
    def one(self):
        return (self.field.one,) + (self.field.zero,) * (self.order - 1)

    @property
    def eps(self):
        if self.order < 2:
            raise ValueError("eps vanishes at truncation order 1")
        coeffs = [self.field.zero] * self.order
        coeffs[1] = self.field.one
        return tuple(coeffs)

    def add(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a, b):
        return tuple(x - y for x, y in zip(a, b))

    def neg(self, a):
        return tuple(-x for x in a)

    def mul(self, a, b):
        out = [self.field.zero] * self.order
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if i + j >= self.order:
                    break
                if y:
                    out[i + j] = out[i + j] + x * y
        return tuple(out)

    def is_unit(self, a) -> bool:
        return bool(a[0])

    def inv(self, a):
        if not a[0]:
            raise ZeroDivisionError("element with nilpotent constant term is not a unit")
        c0_inv = self.field.inv(a[0])
        out = [c0_inv] + [self.field.zero] * (self.order - 1)
        # Newton correction degree by degree: out * a = 1 + O(eps^k).
        for k in range(1, self.order):
            acc = self.field.zero
            for i in range(1, k + 1):
                acc = acc + a[i] * out[k - i]
            out[k] = -c0_inv * acc
        return tuple(out)

    def is_zero(self, a) -> bool:
        return not any(a)

    def residue(self, a) -> Scalar:
        return a[0]


Matrix = list  # list of rows; rows are lists of ring elements


def _mat(ring: EpsRing, rows: Sequence[Sequence]) -> Matrix:
    return [[ring(v) for v in row] for row in rows]


def mat_identity(ring: EpsRing, n: int) -> Matrix:
    return [[ring.one if i == j else ring.zero for j in range(n)] for i in range(n)]


def mat_mul(ring: EpsRing, a: Matrix, b: Matrix) -> Matrix:
    if a and b and len(a[0]) != len(b):
        raise ValueError("matrix dimensions do not match")
    inner = len(b)
    cols = len(b[0]) if b else 0
    out = []
    for row in a:
        new_row = []
        for j in range(cols):
            acc = ring.zero
            for l in range(inner):
                if not ring.is_zero(row[l]) and not ring.is_zero(b[l][j]):
                    acc = ring.add(acc, ring.mul(row[l], b[l][j]))
            new_row.append(acc)
        out.append(new_row)
    return out


def mat_equal(ring: EpsRing, a: Matrix, b: Matrix) -> bool:
    return len(a) == len(b) and all(
        len(ra) == len(rb) and all(x == y for x, y in zip(ra, rb))
        for ra, rb in zip(a, b)
    )


def _row_reduce_local(ring: EpsRing, mat: Matrix):
    """Gauss-Jordan over the local ring using unit pivots only.

    Returns (reduced matrix, pivot (row, col) list).  A column whose remaining
    entries are all non-units is skipped; for split-injectivity checks a skip
    means failure.
    """
    mat = [row[:] for row in mat]
    nrows = len(mat)
    ncols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = next(
            (i for i in range(r, nrows) if ring.is_unit(mat[i][c])), None)
        if pivot_row is None:
            continue
        mat[r], mat[pivot_row] = mat[pivot_row], mat[r]
        inv = ring.inv(mat[r][c])
        mat[r] = [ring.mul(inv, v) for v in mat[r]]
        for i in range(nrows):
            if i != r and not ring.is_zero(mat[i][c]):
                factor = mat[i][c]
                mat[i] = [ring.sub(a, ring.mul(factor, b))
                          for a, b in zip(mat[i], mat[r])]
        pivots.append((r, c))
        r += 1
        if r == nrows:
            break
    return mat, pivots


def split_injection_retraction(ring: EpsRing, t: Matrix) -> Optional[Matrix]:
    """A retraction R with R*T = identity, or None if T is not split injective.

    Over the local base a map of free modules is split injective exactly when
    its residue matrix has full column rank, which is what unit-pivot
    elimination detects.
    """
    if not t:
        return []
    nrows, ncols = len(t), len(t[0])
    if ncols == 0:
        return []
    aug = [row[:] + [ring.one if i == j else ring.zero for j in range(nrows)]
           for i, row in enumerate(t)]
    reduced, pivots = _row_reduce_local(ring, aug)
    pivot_cols = [c for _, c in pivots if c < ncols]
    if pivot_cols != list(range(ncols)):
        return None
    # Rows 0..ncols-1 of the recorded transform now satisfy P*T = [I; 0].
    return [row[ncols:] for row in reduced[:ncols]]


def solve_columns(ring: EpsRing, t: Matrix, rhs: Matrix) -> Optional[Matrix]:
    """Solve T*X = RHS when T is split injective; None if any column fails."""
    retraction = split_injection_retraction(ring, t)
    if retraction is None:
        raise ValueError("coefficient matrix is not split injective")
    candidate = mat_mul(ring, retraction, rhs)
    if mat_equal(ring, mat_mul(ring, t, candidate), rhs):
        return candidate
    return None


@dataclass(frozen=True)
class FilteredModule:
    """Window of free modules with split-injective transitions.

    ranks[i] is the rank of E_{lo + i}; maps[i] is the matrix of
    T: E_{lo+i} -> E_{lo+i+1} with shape ranks[i+1] x ranks[i].  Outside the
    window: zero below, identity above.
    """

    ring: EpsRing
    lo: int
    hi: int
    ranks: tuple[int, ...]
    maps: tuple[tuple[tuple, ...], ...]

    def __post_init__(self):
        if self.hi < self.lo:
            raise ValueError("window must satisfy lo <= hi")
        if len(self.ranks) != self.hi - self.lo + 1:
            raise ValueError("one rank per window index required")
        if any(r < 0 for r in self.ranks):
            raise ValueError("ranks must be nonnegative")
        if len(self.maps) != max(0, self.hi - self.lo):
            raise ValueError("one transition map per window step required")
        frozen = []
        for step, mat in enumerate(self.maps):
            a, b = self.ranks[step], self.ranks[step + 1]
            if len(mat) != b or any(len(row) != a for row in mat):
                raise ValueError(
                    f"map {step} must be {b} x {a} (target rank x source rank)")
            frozen.append(tuple(tuple(self.ring(v) for v in row) for row in mat))
        object.__setattr__(self, "maps", tuple(frozen))

    def rank(self, index: int) -> int:
        if index < self.lo:
            return 0
        if index > self.hi:
            return self.ranks[-1]
        return self.ranks[index - self.lo]

    def map_at(self, index: int) -> Matrix:
        """Transition matrix out of E_index (identity above the window)."""
        if index < self.lo or index >= self.hi:
            raise IndexError("transition outside the stored window")
        return [list(row) for row in self.maps[index - self.lo]]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


def validate_filtered(f: FilteredModule) -> ValidationReport:
    """Check the bundle conditions; failures are reported, not raised."""
    for step in range(len(f.maps)):
        t = [list(row) for row in f.maps[step]]
        if f.ranks[step] > f.ranks[step + 1]:
            return ValidationReport(False, f"rank drops at step {f.lo + step}")
        if f.ranks[step] == 0:
            continue
        if split_injection_retraction(f.ring, t) is None:
            return ValidationReport(
                False,
                f"transition at index {f.lo + step} is not a split injection",
            )
    return ValidationReport(True)


def colimit_module(f: FilteredModule):
    """(rank of E_inf, list of (index, basis matrix of the image of E_i)).

    The image of E_i in E_inf = E_hi is spanned by the columns of the
    composite of the transitions; each is a direct summand.
    """
    report = validate_filtered(f)
    if not report:
        raise ValueError(f"invalid filtered module: {report.reason}")
    top_rank = f.ranks[-1]
    steps = []
    composite = mat_identity(f.ring, top_rank)
    # walk downward: composite holds T_{hi-1} ... T_i
    steps.append((f.hi, composite))
    for step in range(len(f.maps) - 1, -1, -1):
        composite = mat_mul(f.ring, composite, [list(r) for r in f.maps[step]])
        steps.append((f.lo + step, composite))
    steps.reverse()
    return top_rank, steps


def associated_graded(f: FilteredModule) -> dict[int, int]:
    """Degree -> rank of the graded piece (cokernel ranks of the transitions).

    Degree i carries rank(E_i) - rank(E_{i-1}); only nonzero entries are kept.
    Total rank is preserved.
    """
    report = validate_filtered(f)
    if not report:
        raise ValueError(f"invalid filtered module: {report.reason}")
    out: dict[int, int] = {}
    previous = 0
    for offset, rank in enumerate(f.ranks):
        jump = rank - previous
        if jump:
            out[f.lo + offset] = jump
        previous = rank
    return out


def graded_to_splitting_type(graded: dict[int, int]) -> SplittingType:
    degrees: list[int] = []
    for degree, rank in sorted(graded.items(), reverse=True):
        degrees.extend([degree] * rank)
    return SplittingType(tuple(degrees))


@dataclass(frozen=True)
class FiltrationSplitting:
    """A grading of E_inf whose partial sums equal the filtration exactly.

    basis columns are grouped by degree: block for degree d spans the new
    directions appearing at filtration index d.
    """

    graded_ranks: dict[int, int]
    basis: tuple[tuple[tuple, ...], ...]  # square matrix over the ring, by columns
    degrees_by_column: tuple[int, ...]


def split_filtration(f: FilteredModule) -> FiltrationSplitting:
    """Split the filtration by a grading, constructively.

    Over the residue field one completes bases step by step; over a truncated
    polynomial ring the same unit-pivot selection performs the nilpotent
    correction automatically (a candidate column is accepted exactly when it
    completes a basis mod eps, and exactness of the partial sums is verified
    at the end).
    """
    ring = f.ring
    report = validate_filtered(f)
    if not report:
        raise ValueError(f"invalid filtered module: {report.reason}")
    top_rank, steps = colimit_module(f)
    chosen: list[list] = []   # columns of the splitting basis, in degree order
    degrees: list[int] = []
    for index, basis_matrix in steps:
        target = f.rank(index)
        if target == len(chosen):
            continue
        for col_idx in range(len(basis_matrix[0]) if basis_matrix else 0):
            if len(chosen) == target:
                break
            candidate = [basis_matrix[r][col_idx] for r in range(top_rank)]
            trial = [list(col) for col in chosen] + [candidate]
            trial_matrix = [[trial[c][r] for c in range(len(trial))] for r in range(top_rank)]
            if split_injection_retraction(ring, trial_matrix) is not None:
                chosen.append(candidate)
                degrees.append(index)
        if len(chosen) != target:
            raise AssertionError(
                f"could not complete the splitting basis at index {index}")
    basis_matrix = [[chosen[c][r] for c in range(top_rank)] for r in range(top_rank)]
    graded: dict[int, int] = {}
    for d in degrees:
        graded[d] = graded.get(d, 0) + 1
    splitting = FiltrationSplitting(
        graded_ranks=graded,
        basis=tuple(tuple(col) for col in _columns(basis_matrix)),
        degrees_by_column=tuple(degrees),
    )
    verify_splitting(f, splitting)
    return splitting


def _columns(matrix: Matrix):
    if not matrix:
        return []
    return [[matrix[r][c] for r in range(len(matrix))] for c in range(len(matrix[0]))]


def verify_splitting(f: FilteredModule, splitting: FiltrationSplitting) -> None:
    """Exact check that partial sums of the grading equal the filtration."""
    ring = f.ring
    top_rank, steps = colimit_module(f)
    columns = [list(col) for col in splitting.basis]
    for index, image in steps:
        sub = [columns[c] for c in range(len(columns))
               if splitting.degrees_by_column[c] <= index]
        expected_rank = f.rank(index)
        if len(sub) != expected_rank:
            raise AssertionError("partial sum has the wrong rank")
        if expected_rank == 0:
            continue
        sub_matrix = [[sub[c][r] for c in range(len(sub))] for r in range(top_rank)]
        # mutual containment of column spans, solved exactly
        if solve_columns(ring, sub_matrix, image) is None:
            raise AssertionError("filtration step escapes the partial sum")
        if solve_columns(ring, image, sub_matrix) is None:
            raise AssertionError("partial sum escapes the filtration step")


def iso_class_filtered(f: FilteredModule) -> SplittingType:
    """Complete isomorphism invariant: degrees with graded multiplicities."""
    return graded_to_splitting_type(associated_graded(f))
