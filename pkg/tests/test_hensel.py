from fractions import Fraction

import pytest

from equibundle.exact_core import GF, QQ
from equibundle.graded import GradedAlgebra
from equibundle.hensel import (
    dual_numbers_extension,
    from_univariate_quotient,
    idempotents_modulo,
    is_henselian_pair,
    jacobson_radical,
    lift_idempotent,
    trivially_henselian,
)

F5 = GF(5)


def graded(field, degrees):
    return GradedAlgebra(field, tuple(f"x{i}" for i in range(len(degrees))),
                         tuple(degrees))


class TestTriviallyHenselian:
    def test_nonnegative_degrees(self):
        assert trivially_henselian(graded(QQ, (1, 2)))

    def test_nonpositive_degrees(self):
        assert trivially_henselian(graded(QQ, (-1, -2)))

    def test_mixed_degrees(self):
        assert not trivially_henselian(graded(QQ, (1, -1)))

    def test_agrees_with_fixed_point_ideal(self):
        # trivially henselian iff no degree-zero monomial mixes the variables
        from equibundle.graded import fixed_point_ideal

        for degrees in [(1, 2), (-1, -2), (1, -1), (2, -3)]:
            alg = graded(QQ, degrees)
            data = fixed_point_ideal(alg, exponent_cutoff=6)
            assert trivially_henselian(alg) == (data.killed_monomials == ())


class TestJacobsonRadical:
    def test_product_of_fields(self):
        alg = from_univariate_quotient(QQ, [0, -1, 1])  # x^2 - x
        assert jacobson_radical(alg) == []

    def test_dual_numbers(self):
        alg = from_univariate_quotient(QQ, [0, 0, 1])  # x^2
        rad = jacobson_radical(alg)
        assert len(rad) == 1
        assert alg.is_nilpotent(rad[0])

    def test_cusp_quotient(self):
        # Q[x]/(x^3 - x^2): radical is spanned by x^2 - x (dimension 1)
        alg = from_univariate_quotient(QQ, [0, 0, -1, 1])
        rad = jacobson_radical(alg)
        assert len(rad) == 1
        target = (Fraction(0), Fraction(-1), Fraction(1))  # x^2 - x
        assert alg.in_span(target, rad)
        assert alg.is_nilpotent(target)

    def test_prime_field_radical(self):
        alg = from_univariate_quotient(F5, [0, 0, 1])  # x^2 over F5
        rad = jacobson_radical(alg)
        assert len(rad) == 1

    def test_frobenius_handles_etale_case(self):
        # F5[x]/(x^2 - x) is split etale; radical must be zero even though
        # trace arguments degenerate in small characteristic
        alg = from_univariate_quotient(F5, [0, -1, 1])
        assert jacobson_radical(alg) == []


class TestHenselianPair:
    def test_nilpotent_ideal(self):
        alg = from_univariate_quotient(QQ, [0, 0, 1], ideal_generators=[[0, 1]])
        assert is_henselian_pair(alg)

    def test_split_idempotent_ideal(self):
        # (k x k, k x 0): the ideal contains an idempotent, not henselian
        alg = from_univariate_quotient(QQ, [0, -1, 1], ideal_generators=[[0, 1]])
        assert not is_henselian_pair(alg)

    def test_zero_ideal(self):
        alg = from_univariate_quotient(QQ, [0, -1, 1])
        assert is_henselian_pair(alg, ideal=[])


class TestLiftIdempotent:
    def test_one_lifts_to_one(self):
        alg = from_univariate_quotient(QQ, [0, 0, 1], ideal_generators=[[0, 1]])
        lift = lift_idempotent(alg, alg.one)
        assert lift.element == alg.one

    def test_zero_lifts_to_zero(self):
        alg = from_univariate_quotient(QQ, [0, 0, 1], ideal_generators=[[0, 1]])
        lift = lift_idempotent(alg, alg.zero)
        assert lift.element == alg.zero

    def test_perturbed_idempotent_in_dual_extension(self):
        # A = Q[x]/(x^2 - x); A' = A[eps]/(eps^2); candidate x + x*eps is
        # idempotent mod (eps) and the iteration returns an exact idempotent.
        base = from_univariate_quotient(QQ, [0, -1, 1])
        alg = dual_numbers_extension(base)
        candidate = [0, 1, 0, 1]  # x + x*eps
        lift = lift_idempotent(alg, candidate)
        e = lift.element
        assert alg.mul(e, e) == e
        assert lift.iterations <= 3
        assert alg.in_span(alg.sub(e, alg.coerce(candidate)), alg.ideal)

    def test_non_nilpotent_ideal_rejected(self):
        alg = from_univariate_quotient(QQ, [0, -1, 1], ideal_generators=[[0, 1]])
        with pytest.raises(ValueError):
            lift_idempotent(alg, alg.one)

    def test_non_idempotent_candidate_rejected(self):
        alg = from_univariate_quotient(QQ, [0, 0, 1], ideal_generators=[[0, 1]])
        with pytest.raises(ValueError):
            lift_idempotent(alg, [2, 0])

    def test_randomized_exactness(self, rng):
        for _ in range(20):
            field = QQ if rng.random() < 0.5 else F5
            alg, candidate = random_nilpotent_instance(rng, field)
            lift = lift_idempotent(alg, candidate)
            e = lift.element
            assert alg.mul(e, e) == e
            assert alg.in_span(alg.sub(e, candidate), alg.ideal)


class TestIdempotentSearch:
    def test_henselian_implies_liftable(self):
        alg = from_univariate_quotient(QQ, [0, 0, 1], ideal_generators=[[0, 1]])
        assert is_henselian_pair(alg)
        space = [alg.zero, alg.one, (Fraction(1), Fraction(2))]
        for vec in idempotents_modulo(alg, alg.ideal, space):
            lift = lift_idempotent(alg, vec)
            assert alg.mul(lift.element, lift.element) == lift.element

    def test_exhaustive_search_over_f5(self):
        # every residue idempotent of a henselian pair lifts; the whole
        # algebra is searched (5^dim elements)
        from itertools import product

        alg = from_univariate_quotient(F5, [0, 0, 0, 1], ideal_generators=[[0, 1]])
        assert is_henselian_pair(alg)
        space = [tuple(F5(c) for c in coords)
                 for coords in product(range(5), repeat=alg.dim)]
        candidates = idempotents_modulo(alg, alg.ideal, space)
        assert len(candidates) > 2  # not just 0 and 1: the ideal is nontrivial
        for vec in candidates:
            lift = lift_idempotent(alg, vec)
            assert alg.mul(lift.element, lift.element) == lift.element
            assert alg.in_span(alg.sub(lift.element, vec), alg.ideal)


def random_nilpotent_instance(rng, field):
    """Algebra with roots of multiplicity >= 1 and a nilpotent ideal.

    Built as k[x] / prod (x - a_i)^(e_i); the radical part is generated by
    prod (x - a_i), and an idempotent residue is perturbed by an ideal element.
    """
    if field == QQ:
        roots = rng.sample([-2, -1, 0, 1, 2], rng.randint(1, 2))
    else:
        roots = rng.sample(range(5), rng.randint(1, 2))
    mults = [rng.randint(1, 3) for _ in roots]

    def poly_mul(a, b):
        out = [field.zero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                out[i + j] = out[i + j] + x * y
        return out

    quotient = [field.one]
    radical_gen = [field.one]
    for root, mult in zip(roots, mults):
        linear = [field(-root), field.one]
        radical_gen = poly_mul(radical_gen, linear)
        for _ in range(mult):
            quotient = poly_mul(quotient, linear)
    d = len(quotient) - 1
    # the spanning set for I = (prod (x - a_i)) is nilpotent mod the quotient
    alg = from_univariate_quotient(field, quotient, ideal_generators=[radical_gen])
    # candidate: CRT idempotent (1 on a random subset of roots) + ideal noise
    subset = [r for r in roots if rng.random() < 0.5]
    candidate = crt_idempotent(field, roots, mults, subset, d)
    if alg.ideal and rng.random() < 0.8:
        noise = alg.scale(field(rng.randint(1, 3)), alg.ideal[rng.randrange(len(alg.ideal))])
        candidate = alg.add(candidate, noise)
    return alg, candidate


def crt_idempotent(field, roots, mults, subset, dim):
    """Evaluate-and-interpolate an element that is 1 at subset roots, 0 elsewhere."""
    # Lagrange interpolation on the distinct roots, padded to the algebra dim
    coeffs = [field.zero] * dim
    for r in subset:
        others = [s for s in roots if s != r]
        num = [field.one]
        denom = field.one
        for s in others:
            new = [field.zero] * (len(num) + 1)
            for i, c in enumerate(num):
                new[i] = new[i] + c * field(-s)
                new[i + 1] = new[i + 1] + c
            num = new
            denom = denom * (field(r) - field(s))
        inv = field.inv(denom)
        for i, c in enumerate(num):
            coeffs[i] = coeffs[i] + c * inv
    return tuple(coeffs)
