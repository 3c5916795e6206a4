import random
from fractions import Fraction

import numpy as np
import pytest

from sparsestab import (
    CapabilityError,
    ExactMatrix,
    Permutation,
    SingularMatrixError,
    SparsityPattern,
    all_permutations,
    char_poly,
    char_poly_via_minors,
    determinant,
    inverse,
    jacobi_residual,
    leading_principal_minors,
    p_sigma,
    spectral_abscissa,
    variety_membership_sample,
)
from sparsestab.numerics import conjugate_by_permutation, random_pattern_matrix

from conftest import FIG2_LEFT

A_COUNTER = ExactMatrix([[0, -1], [2, -1]])  # stable but det_1 = 0


def random_exact(n, rng, bound=50):
    return ExactMatrix(
        [[rng.randint(-bound, bound) for _ in range(n)] for _ in range(n)]
    )


def random_perm(n, rng):
    order = list(range(1, n + 1))
    rng.shuffle(order)
    return Permutation(tuple(order))


class TestExactMatrix:
    def test_immutable(self):
        A = ExactMatrix.identity(2)
        with pytest.raises(AttributeError):
            A.n = 3

    def test_from_floats_is_exact(self):
        A = ExactMatrix.from_floats(np.array([[0.5, -1.25], [3.0, 0.1]]))
        assert A.entry(1, 1) == Fraction(1, 2)
        assert A.entry(1, 2) == Fraction(-5, 4)
        # 0.1 is not a dyadic rational; rationalization must keep the float bits
        assert float(A.entry(2, 2)) == 0.1

    def test_matmul_against_numpy(self):
        rng = random.Random(1)
        for _ in range(10):
            A, B = random_exact(4, rng), random_exact(4, rng)
            expected = A.to_floats() @ B.to_floats()
            assert np.array_equal(A.matmul(B).to_floats(), expected)

    def test_pattern_support_enforced(self):
        with pytest.raises(ValueError):
            ExactMatrix.from_pattern(SparsityPattern.diagonal(2), {(1, 2): 5})

    def test_determinant_bareiss_matches_gauss(self):
        rng = random.Random(2)
        for _ in range(20):
            n = rng.randint(1, 5)
            A = random_exact(n, rng)
            # divide by 3 to force the Fraction path, then compare scaled
            B = ExactMatrix([[x / Fraction(3) for x in row] for row in A.rows])
            assert determinant(B) * Fraction(3) ** n == determinant(A)

    def test_inverse_round_trip(self):
        rng = random.Random(3)
        done = 0
        while done < 15:
            A = random_exact(4, rng)
            if determinant(A) == 0:
                continue
            done += 1
            assert A.matmul(inverse(A)) == ExactMatrix.identity(4)

    def test_inverse_singular_raises(self):
        with pytest.raises(SingularMatrixError):
            inverse(ExactMatrix([[1, 1], [1, 1]]))


class TestLeadingMinors:
    def test_counterexample_matrix(self):
        assert leading_principal_minors(A_COUNTER) == [0, 2]

    def test_identity(self):
        assert leading_principal_minors(ExactMatrix.identity(4)) == [1, 1, 1, 1]

    def test_diagonal_products(self):
        assert leading_principal_minors(ExactMatrix([[2, 0], [0, 4]])) == [2, 8]


class TestPSigma:
    def test_identity_matrix_any_sigma(self):
        I3 = ExactMatrix.identity(3)
        for sigma in all_permutations(3):
            assert p_sigma(I3, sigma) == 1

    def test_counterexample_identity_sigma(self):
        assert p_sigma(A_COUNTER, Permutation((1, 2))) == 0

    def test_counterexample_swap_sigma(self):
        swap = Permutation((2, 1))
        assert conjugate_by_permutation(A_COUNTER, swap) == ExactMatrix([[-1, 2], [-1, 0]])
        assert p_sigma(A_COUNTER, swap) == -1

    def test_transpose_invariance(self):
        rng = random.Random(5)
        for _ in range(10):
            A = random_exact(4, rng)
            for sigma in all_permutations(4):
                assert p_sigma(A, sigma) == p_sigma(A.transpose(), sigma)

    def test_conjugation_composition(self):
        rng = random.Random(7)
        A = random_exact(3, rng)
        for sigma in all_permutations(3):
            for tau in all_permutations(3):
                lhs = p_sigma(conjugate_by_permutation(A, sigma), tau)
                assert lhs == p_sigma(A, tau.compose(sigma))

    def test_diagonal_scaling_preserves_zero_set(self):
        rng = random.Random(9)
        for _ in range(10):
            A = random_exact(3, rng)
            diag = [rng.choice([-3, -1, 2, 5]) for _ in range(3)]
            D = ExactMatrix([[diag[i] if i == j else 0 for j in range(3)] for i in range(3)])
            DA = D.matmul(A)
            for sigma in all_permutations(3):
                factor = Fraction(1)
                for m in leading_principal_minors(conjugate_by_permutation(D, sigma))[:2]:
                    factor *= m
                assert p_sigma(DA, sigma) == factor * p_sigma(A, sigma)


class TestCharPoly:
    def test_counterexample(self):
        assert char_poly(A_COUNTER).coefficients == (Fraction(1), Fraction(2))

    def test_identity_2(self):
        assert char_poly(ExactMatrix.identity(2)).coefficients == (Fraction(-2), Fraction(1))

    def test_zero_diagonal_pattern_kills_trace(self):
        rng = random.Random(11)
        p = SparsityPattern(4, frozenset((i, j) for i in range(1, 5) for j in range(1, 5) if i != j))
        A = random_pattern_matrix(p, rng)
        assert char_poly(A).coefficients[0] == 0

    def test_head_and_tail_coefficients(self):
        rng = random.Random(13)
        for _ in range(10):
            n = rng.randint(1, 5)
            A = random_exact(n, rng)
            coeffs = char_poly(A).coefficients
            assert coeffs[0] == -A.trace()
            assert coeffs[-1] == (-1) ** n * determinant(A)

    def test_matches_principal_minor_sums(self):
        rng = random.Random(17)
        for trial in range(100):
            n = trial % 6 + 1
            A = random_exact(n, rng, bound=20)
            assert char_poly(A) == char_poly_via_minors(A)

    def test_capability_cap(self):
        with pytest.raises(CapabilityError):
            char_poly(ExactMatrix.identity(65))


class TestSpectralAbscissa:
    def test_negative_diagonal(self):
        report = spectral_abscissa(np.diag([-1.0, -2.0]))
        assert report.abscissa == pytest.approx(-1.0) and report.hurwitz

    def test_counterexample_half(self):
        report = spectral_abscissa(np.array([[0.0, -1.0], [2.0, -1.0]]))
        assert report.abscissa == pytest.approx(-0.5) and report.hurwitz

    def test_symmetric_flip(self):
        report = spectral_abscissa(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert report.abscissa == pytest.approx(1.0) and not report.hurwitz

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            spectral_abscissa(np.zeros((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            spectral_abscissa(np.array([[np.nan, 0.0], [0.0, 1.0]]))


class TestVarietySampling:
    def test_full_two_by_two_escapes(self):
        out = variety_membership_sample(SparsityPattern.full(2), 1, seed=4)
        assert not out.generic_member
        # the witness must re-verify
        assert p_sigma(out.witness_matrix, out.witness_sigma) == out.witness_value != 0

    def test_unstable_pattern_stays_inside(self):
        out = variety_membership_sample(FIG2_LEFT, 50, seed=0)
        assert out.generic_member

    def test_zero_pattern_trivially_inside(self):
        out = variety_membership_sample(SparsityPattern.empty(3), 3, seed=0)
        assert out.generic_member

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError):
            variety_membership_sample(SparsityPattern.full(2), 0, seed=0)

    def test_capability_cap(self):
        with pytest.raises(CapabilityError):
            variety_membership_sample(SparsityPattern.full(9), 1, seed=0)


class TestJacobi:
    def test_diagonal_example(self):
        assert jacobi_residual(ExactMatrix([[2, 0], [0, 4]]), {1}) == 0

    def test_identity_all_subsets(self):
        import itertools

        I4 = ExactMatrix.identity(4)
        for r in range(5):
            for idx in itertools.combinations(range(1, 5), r):
                assert jacobi_residual(I4, idx) == 0

    def test_singular_rejected(self):
        with pytest.raises(SingularMatrixError):
            jacobi_residual(ExactMatrix([[1, 2], [2, 4]]), {1})

    def test_random_invertible(self):
        rng = random.Random(19)
        done = 0
        while done < 30:
            B = random_exact(4, rng, bound=9)
            if determinant(B) == 0:
                continue
            done += 1
            subset = frozenset(v for v in range(1, 5) if rng.random() < 0.5)
            assert jacobi_residual(B, subset) == 0

    def test_inverse_inherits_vanishing_complement(self):
        # force det_k = 0 by duplicating a row inside the leading block,
        # keep the whole matrix invertible, then the complementary minor of
        # the inverse must vanish exactly
        rng = random.Random(21)
        done = 0
        while done < 20:
            n, k = 4, rng.randint(1, 3)
            rows = [[Fraction(rng.randint(-9, 9)) for _ in range(n)] for _ in range(n)]
            if k == 1:
                rows[0][0] = Fraction(0)
            else:
                for j in range(k):
                    rows[k - 1][j] = rows[0][j]
            A = ExactMatrix(rows)
            if determinant(A) == 0:
                continue
            assert determinant(A.principal_submatrix(range(1, k + 1))) == 0
            done += 1
            comp = range(k + 1, n + 1)
            assert determinant(inverse(A).principal_submatrix(comp)) == 0
