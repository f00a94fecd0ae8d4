"""Henselian-pair predicates for finite-dimensional commutative algebras.

The decidable class: a commutative unital algebra given by structure
constants over an exact field, with a distinguished ideal given by a spanning
set.  For such (artinian) algebras "henselian pair" is equivalent to the
ideal lying in the Jacobson radical (= nilradical), the executable face of
which is idempotent lifting along nilpotent ideals.  Graded algebras that are
concentrated in nonnegative or nonpositive degrees form trivially henselian
pairs with their irrelevant ideal; that predicate is purely combinatorial.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from equibundle.exact_core import (
    Field,
    PrimeField,
    RationalField,
    Scalar,
    matrix_rank,
    nullspace,
    row_reduce,
)
from equibundle.graded import GradedAlgebra

Vector = tuple[Scalar, ...]


def trivially_henselian(algebra: GradedAlgebra) -> bool:
    """True iff all variable degrees have one sign.

    Then the irrelevant ideal has zero degree-zero part, so the degree-zero
    pair is henselian for free.
    """
    degrees = algebra.degrees
    return all(d > 0 for d in degrees) or all(d < 0 for d in degrees)


@dataclass(frozen=True)
class FiniteDimAlgebra:
    """Commutative unital algebra by structure constants; basis vector 0 is 1.

    structure[i][j] is the coordinate vector of e_i * e_j.  Commutativity,
    associativity, unitality, and closure of the distinguished ideal under
    multiplication are all checked at construction.
    """

    field: Field
    dim: int
    structure: tuple[tuple[Vector, ...], ...]
    ideal: tuple[Vector, ...] = ()
    basis_names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        d = self.dim
        if d < 1:
            raise ValueError("algebra dimension must be at least 1")
        table = tuple(
            tuple(tuple(self.field(v) for v in vec) for vec in row)
            for row in self.structure
        )
        if len(table) != d or any(len(row) != d for row in table) or any(
            len(vec) != d for row in table for vec in row
        ):
            raise ValueError("structure constants must form a d x d x d array")
        object.__setattr__(self, "structure", table)
        for i in range(d):
            for j in range(i):
                if table[i][j] != table[j][i]:
                    raise ValueError(f"structure constants not commutative at ({i},{j})")
        for j in range(d):
            if table[0][j] != self.unit_vector(j):
                raise ValueError("basis vector 0 does not act as the unit")
        for i in range(d):
            for j in range(d):
                for l in range(d):
                    left = self.mul(table[i][j], self.unit_vector(l))
                    right = self.mul(self.unit_vector(i), table[j][l])
                    if left != right:
                        raise ValueError(
                            f"structure constants not associative at ({i},{j},{l})")
        ideal = tuple(tuple(self.field(v) for v in vec) for vec in self.ideal)
        object.__setattr__(self, "ideal", ideal)
        for vec in ideal:
            for i in range(d):
                if not self.in_span(self.mul(self.unit_vector(i), vec), ideal):
                    raise ValueError("ideal is not closed under multiplication")

    # -- element helpers -----------------------------------------------------

    def unit_vector(self, index: int) -> Vector:
        return tuple(self.field.one if i == index else self.field.zero
                     for i in range(self.dim))

    @property
    def one(self) -> Vector:
        return self.unit_vector(0)

    @property
    def zero(self) -> Vector:
        return (self.field.zero,) * self.dim

    def coerce(self, coords) -> Vector:
        vec = tuple(self.field(v) for v in coords)
        if len(vec) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates")
        return vec

    def add(self, a: Vector, b: Vector) -> Vector:
        return tuple(x + y for x, y in zip(a, b))

    def sub(self, a: Vector, b: Vector) -> Vector:
        return tuple(x - y for x, y in zip(a, b))

    def scale(self, c, a: Vector) -> Vector:
        c = self.field(c)
        return tuple(c * x for x in a)

    def mul(self, a: Vector, b: Vector) -> Vector:
        out = [self.field.zero] * self.dim
        for i, x in enumerate(a):
            if not x:
                continue
            for j, y in enumerate(b):
                if not y:
                    continue
                coeff = x * y
                for l, s in enumerate(self.structure[i][j]):
                    if s:
                        out[l] = out[l] + coeff * s
        return tuple(out)

    def power(self, a: Vector, exponent: int) -> Vector:
        out = self.one
        base = a
        e = exponent
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    def is_nilpotent(self, a: Vector) -> bool:
        """Nilpotency test by powering up to the algebra dimension."""
        return not any(self.power(a, self.dim))

    def in_span(self, vec: Vector, spanning: Sequence[Vector]) -> bool:
        if not any(vec):
            return True
        if not spanning:
            return False
        rows = [list(v) for v in spanning]
        return matrix_rank(self.field, rows) == matrix_rank(self.field, rows + [list(vec)])

    def ideal_power_is_zero(self, spanning: Sequence[Vector]) -> Optional[int]:
        """Smallest s with (span)^s = 0, or None if the ideal is not nilpotent."""
        current = [list(v) for v in spanning]
        for s in range(1, self.dim + 2):
            if not current or all(not any(row) for row in current):
                return s
            nxt = []
            for v in current:
                for w in spanning:
                    nxt.append(list(self.mul(tuple(v), tuple(w))))
            reduced, pivots = row_reduce(self.field, nxt)
            current = [reduced[r] for r in range(len(pivots))]
        return None


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def from_univariate_quotient(field: Field, monic_coeffs: Sequence,
                             ideal_generators: Sequence[Sequence] = ()) -> FiniteDimAlgebra:
    """k[x]/(f) for monic f, with basis 1, x, ..., x^(deg-1).

    monic_coeffs lists f's coefficients from the constant up, ending with 1.
    Ideal generators are polynomials in x given the same way (any length).
    """
    coeffs = [field(c) for c in monic_coeffs]
    if not coeffs or coeffs[-1] != field.one:
        raise ValueError("quotient polynomial must be monic")
    d = len(coeffs) - 1
    if d < 1:
        raise ValueError("quotient polynomial must have positive degree")

    def reduce_poly(vec):
        vec = list(vec)
        for top in range(len(vec) - 1, d - 1, -1):
            lead = vec[top]
            if lead:
                for i in range(d + 1):
                    vec[top - d + i] = vec[top - d + i] - lead * coeffs[i]
            vec.pop()
        return tuple(vec + [field.zero] * (d - len(vec)))

    structure = []
    for i in range(d):
        row = []
        for j in range(d):
            prod = [field.zero] * (i + j + 1)
            prod[i + j] = field.one
            row.append(reduce_poly(prod))
        structure.append(tuple(row))

    ideal_vectors = []
    for gen in ideal_generators:
        base = reduce_poly([field(c) for c in gen])
        for shift in range(d):
            shifted = reduce_poly([field.zero] * shift + list(base))
            if any(shifted):
                ideal_vectors.append(shifted)
    if ideal_vectors:
        reduced, pivots = row_reduce(field, [list(v) for v in ideal_vectors])
        ideal_vectors = [tuple(reduced[r]) for r in range(len(pivots))]
    names = tuple("1" if i == 0 else f"x^{i}" for i in range(d))
    return FiniteDimAlgebra(field=field, dim=d, structure=tuple(structure),
                            ideal=tuple(ideal_vectors), basis_names=names)


def dual_numbers_extension(algebra: FiniteDimAlgebra) -> FiniteDimAlgebra:
    """A[eps]/(eps^2): doubled basis (a, a*eps); the ideal extends by eps*A."""
    d = algebra.dim
    field = algebra.field
    zero = field.zero

    def embed(vec, shifted):
        out = [zero] * (2 * d)
        for i, v in enumerate(vec):
            out[i + (d if shifted else 0)] = v
        return tuple(out)

    structure = []
    for i in range(2 * d):
        row = []
        for j in range(2 * d):
            ii, i_eps = i % d, i >= d
            jj, j_eps = j % d, j >= d
            base = algebra.structure[ii][jj]
            if i_eps and j_eps:
                row.append((zero,) * (2 * d))
            else:
                row.append(embed(base, i_eps or j_eps))
        structure.append(tuple(row))
    ideal = [embed(vec, False) for vec in algebra.ideal]
    ideal += [embed(algebra.unit_vector(i), True) for i in range(d)]
    return FiniteDimAlgebra(field=field, dim=2 * d, structure=tuple(structure),
                            ideal=tuple(ideal))


# ---------------------------------------------------------------------------
# Radical, henselian pairs, idempotent lifting
# ---------------------------------------------------------------------------


def jacobson_radical(algebra: FiniteDimAlgebra) -> list[Vector]:
    """Basis of the nilradical (= Jacobson radical in the artinian case).

    Over the rationals this is the kernel of the trace form; over a prime
    field the kernel of the (linear) iterated Frobenius.  Every basis vector
    of the result is certified nilpotent by explicit powering.
    """
    d = algebra.dim
    field = algebra.field
    if isinstance(field, RationalField):
        # trace form: (u, v) -> trace of multiplication by u*v
        gram = []
        for i in range(d):
            row = []
            for j in range(d):
                prod = algebra.structure[i][j]
                trace = field.zero
                for l in range(d):
                    if prod[l]:
                        trace = trace + prod[l] * _mult_trace_coeff(algebra, l)
                row.append(trace)
            gram.append(row)
        basis = nullspace(field, gram, d)
    elif isinstance(field, PrimeField):
        e = 1
        while field.p**e < d:
            e += 1
        images = [algebra.power(algebra.unit_vector(i), field.p**e) for i in range(d)]
        rows = [[images[j][i] for j in range(d)] for i in range(d)]
        basis = nullspace(field, rows, d)
    else:  # pragma: no cover - only two field kinds exist
        raise TypeError(f"unsupported field {field!r}")
    for vec in basis:
        if not algebra.is_nilpotent(vec):
            raise AssertionError("radical computation produced a non-nilpotent element")
    return [tuple(v) for v in basis]


def _mult_trace_coeff(algebra: FiniteDimAlgebra, index: int) -> Scalar:
    # trace of multiplication by basis vector e_index
    return sum(
        (algebra.structure[index][j][j] for j in range(algebra.dim)),
        algebra.field.zero,
    )


def is_henselian_pair(algebra: FiniteDimAlgebra,
                      ideal: Optional[Sequence[Vector]] = None) -> bool:
    """True iff the ideal lies in the Jacobson radical.

    For artinian commutative algebras this characterizes henselian pairs (a
    finite product of henselian local rings), and it matches the topological
    criterion on the finite spectrum.
    """
    ideal = algebra.ideal if ideal is None else tuple(algebra.coerce(v) for v in ideal)
    radical = jacobson_radical(algebra)
    return all(algebra.in_span(vec, radical) for vec in ideal)


@dataclass(frozen=True)
class IdempotentLift:
    element: Vector
    iterations: int


def lift_idempotent(algebra: FiniteDimAlgebra, candidate,
                    ideal: Optional[Sequence[Vector]] = None) -> IdempotentLift:
    """Lift an idempotent of A/I along a nilpotent ideal I, exactly.

    `candidate` is any representative with candidate^2 - candidate in I.  The
    iteration e <- 3e^2 - 2e^3 squares the defect ideal each round, so it
    reaches an exact idempotent in at most ceil(log2(nilpotency index)) + 1
    steps; both e^2 = e and e = candidate mod I are verified before returning.
    """
    ideal = algebra.ideal if ideal is None else tuple(algebra.coerce(v) for v in ideal)
    candidate = algebra.coerce(candidate)
    nilpotency = algebra.ideal_power_is_zero(ideal)
    if nilpotency is None:
        raise ValueError("ideal is not nilpotent")
    defect = algebra.sub(algebra.mul(candidate, candidate), candidate)
    if not algebra.in_span(defect, ideal):
        raise ValueError("candidate is not idempotent modulo the ideal")

    e = candidate
    iterations = 0
    max_iterations = max(1, nilpotency).bit_length() + 1
    while True:
        square = algebra.mul(e, e)
        if square == e:
            break
        if iterations >= max_iterations:
            raise AssertionError("idempotent iteration failed to converge")
        cube = algebra.mul(square, e)
        e = algebra.sub(algebra.scale(3, square), algebra.scale(2, cube))
        iterations += 1
    if not algebra.in_span(algebra.sub(e, candidate), ideal):
        raise AssertionError("lift drifted away from its residue class")
    return IdempotentLift(element=e, iterations=iterations)


def idempotents_modulo(algebra: FiniteDimAlgebra, ideal: Sequence[Vector],
                       search_space: Sequence[Vector]) -> list[Vector]:
    """Representatives from `search_space` that are idempotent mod the ideal."""
    out = []
    for vec in search_space:
        vec = algebra.coerce(vec)
        defect = algebra.sub(algebra.mul(vec, vec), vec)
        if algebra.in_span(defect, ideal):
            out.append(vec)
    return out
