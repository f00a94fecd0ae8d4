from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from equibundle.exact_core import (
    GF,
    QQ,
    FieldMismatchError,
    LaurentMatrix,
    LaurentPoly,
    UnitDeterminantError,
    invert_matrix,
    matrix_rank,
    nullspace,
)

F5 = GF(5)


def lp(field, *terms):
    """Laurent poly from (coeff, exp) pairs."""
    out = LaurentPoly.zero(field)
    for coeff, exp in terms:
        out = out + LaurentPoly.monomial(field, coeff, exp)
    return out


class TestFieldOps:
    def test_rational_add(self):
        assert Fraction(1, 2) + Fraction(1, 3) == Fraction(5, 6)

    def test_prime_field_inverse(self):
        assert F5(2).inverse() == F5(3)

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            F5(0).inverse()
        with pytest.raises(ZeroDivisionError):
            QQ.inv(Fraction(0))

    def test_field_mismatch(self):
        with pytest.raises(FieldMismatchError):
            F5(1) + GF(7)(1)
        with pytest.raises(FieldMismatchError):
            Fraction(1) + F5(1)

    def test_non_prime_modulus_rejected(self):
        with pytest.raises(ValueError):
            GF(6)
        with pytest.raises(ValueError):
            GF(2**31 + 11)

    def test_rational_coercion_into_fp(self):
        assert F5(Fraction(1, 2)) == F5(3)


class TestLaurentPoly:
    def test_difference_of_squares(self):
        f = lp(QQ, (1, 1), (1, -1))   # t + 1/t
        g = lp(QQ, (1, 1), (-1, -1))  # t - 1/t
        assert f * g == lp(QQ, (1, 2), (-1, -2))

    def test_one_is_identity(self):
        f = lp(QQ, (Fraction(2, 3), 4), (1, 0), (-2, -5))
        assert f * LaurentPoly.one(QQ) == f

    def test_zero_absorbs(self):
        g = lp(F5, (3, 2), (1, -1))
        assert (LaurentPoly.zero(F5) * g).is_zero

    def test_zero_poly_extremal_exponents_signal(self):
        with pytest.raises(ValueError):
            LaurentPoly.zero(QQ).min_exp()
        with pytest.raises(ValueError):
            LaurentPoly.zero(QQ).max_exp()

    def test_no_zero_coefficients_stored(self):
        f = lp(QQ, (1, 2), (-1, 2))
        assert f.is_zero and f.support == ()

    def test_mixed_field_rejected(self):
        with pytest.raises(FieldMismatchError):
            lp(QQ, (1, 0)) + lp(F5, (1, 0))


def poly_strategy(field, coeffs):
    term = st.tuples(coeffs, st.integers(min_value=-4, max_value=4))
    return st.lists(term, max_size=4).map(lambda ts: lp(field, *ts))


rational_polys = poly_strategy(
    QQ,
    st.builds(Fraction, st.integers(min_value=-9, max_value=9),
              st.integers(min_value=1, max_value=4)),
)
fp_polys = poly_strategy(F5, st.integers(min_value=0, max_value=4))


@settings(max_examples=60, deadline=None)
@given(rational_polys, rational_polys, rational_polys)
def test_ring_axioms_rational(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f + g == g + f
    assert f * g == g * f


@settings(max_examples=60, deadline=None)
@given(fp_polys, fp_polys, fp_polys)
def test_ring_axioms_prime_field(f, g, h):
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


class TestLaurentMatrix:
    def test_identity_det(self):
        assert LaurentMatrix.identity(QQ, 2).det_unit_exponent() == (0, Fraction(1))

    def test_diagonal_det(self):
        m = LaurentMatrix.monomial_diagonal(QQ, [2, -1])
        assert m.det_unit_exponent() == (1, Fraction(1))

    def test_upper_triangular_det(self):
        t = lp(QQ, (1, 1))
        one = LaurentPoly.one(QQ)
        zero = LaurentPoly.zero(QQ)
        tinv = lp(QQ, (1, -1))
        m = LaurentMatrix(QQ, [[t, one], [zero, tinv]])
        assert m.det_unit_exponent() == (0, Fraction(1))

    def test_non_unit_determinant_rejected(self):
        t = lp(QQ, (1, 1))
        one = LaurentPoly.one(QQ)
        # det = t^2 - 1 has two terms
        with pytest.raises(UnitDeterminantError):
            LaurentMatrix(QQ, [[t, one], [one, t]])

    def test_singular_rejected(self):
        one = LaurentPoly.one(QQ)
        with pytest.raises(UnitDeterminantError):
            LaurentMatrix(QQ, [[one, one], [one, one]])

    def test_det_exponent_additive(self, rng):
        for _ in range(25):
            m = random_unit_matrix(rng, QQ, 3)
            n = random_unit_matrix(rng, QQ, 3)
            wm, _ = m.det_unit_exponent()
            wn, _ = n.det_unit_exponent()
            wmn, _ = (m @ n).det_unit_exponent()
            assert wmn == wm + wn


def random_unit_matrix(rng, field, n):
    """Random product of monomial-diagonal and elementary matrices."""
    exps = [rng.randint(-2, 2) for _ in range(n)]
    m = LaurentMatrix.monomial_diagonal(field, exps)
    for _ in range(rng.randint(1, 3)):
        i, j = rng.sample(range(n), 2)
        rows = [[LaurentPoly.one(field) if a == b else LaurentPoly.zero(field)
                 for b in range(n)] for a in range(n)]
        rows[i][j] = lp(field, (rng.randint(-2, 2), rng.randint(-2, 2)))
        m = m @ LaurentMatrix(field, rows)
    return m


class TestLinearAlgebra:
    def test_rank_and_nullspace(self):
        rows = [[Fraction(1), Fraction(2), Fraction(3)],
                [Fraction(2), Fraction(4), Fraction(6)]]
        assert matrix_rank(QQ, rows) == 1
        basis = nullspace(QQ, rows, 3)
        assert len(basis) == 2
        for vec in basis:
            assert sum(a * b for a, b in zip(rows[0], vec)) == 0

    def test_invert(self):
        rows = [[F5(2), F5(1)], [F5(1), F5(1)]]
        inv = invert_matrix(F5, rows)
        prod = [[sum((rows[i][k] * inv[k][j] for k in range(2)), F5(0))
                 for j in range(2)] for i in range(2)]
        assert prod == [[F5(1), F5(0)], [F5(0), F5(1)]]

    def test_invert_singular(self):
        rows = [[Fraction(1), Fraction(1)], [Fraction(1), Fraction(1)]]
        assert invert_matrix(QQ, rows) is None
