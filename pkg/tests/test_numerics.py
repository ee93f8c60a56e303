import random
import unittest
from fractions import Fraction

import numpy as np

from nctest.fixtures import ququart_diagonal_gpt
from nctest.numerics import (
    Arithmetic,
    ArithmeticEnum,
    NumericsException,
    format_scalar,
    inverse,
    matmul,
    rank,
    row_space_basis,
    rref,
    split_idempotent,
    span_residual,
    to_jsonable,
    transpose,
)


EXACT = Arithmetic(ArithmeticEnum.ARITHMETIC_EXACT)
FLOAT = Arithmetic(ArithmeticEnum.ARITHMETIC_FLOAT)


class TestArithmetic(unittest.TestCase):
    def test_exact_scalars(self) -> None:
        self.assertEqual(EXACT.scalar(3), Fraction(3))
        self.assertEqual(EXACT.scalar("1/2"), Fraction(1, 2))
        self.assertEqual(EXACT.scalar(" -3/4 "), Fraction(-3, 4))
        self.assertEqual(EXACT.scalar(0.1), Fraction(1, 10))
        self.assertEqual(EXACT.scalar(Fraction(2, 6)), Fraction(1, 3))

    def test_float_scalars(self) -> None:
        self.assertEqual(FLOAT.scalar("1/4"), 0.25)
        self.assertEqual(FLOAT.scalar(Fraction(1, 2)), 0.5)
        self.assertEqual(FLOAT.scalar(2), 2.0)

    def test_bad_scalars(self) -> None:
        for arith in [EXACT, FLOAT]:
            with self.assertRaises(NumericsException):
                arith.scalar(True)
            with self.assertRaises(NumericsException):
                arith.scalar("one half")
            with self.assertRaises(NumericsException):
                arith.scalar("1/0")
            with self.assertRaises(NumericsException):
                arith.scalar(float("nan"))
            with self.assertRaises(NumericsException):
                arith.scalar([1])

    def test_bad_tolerance(self) -> None:
        with self.assertRaises(NumericsException):
            Arithmetic(ArithmeticEnum.ARITHMETIC_FLOAT, 0.0)
        with self.assertRaises(NumericsException):
            Arithmetic(ArithmeticEnum.ARITHMETIC_FLOAT, float("inf"))

    def test_comparisons(self) -> None:
        self.assertTrue(FLOAT.is_zero(1e-12))
        self.assertFalse(FLOAT.is_negative(-1e-12))
        self.assertTrue(FLOAT.is_negative(-1e-6))
        self.assertFalse(EXACT.is_zero(Fraction(1, 10 ** 30)))
        self.assertTrue(EXACT.is_positive(Fraction(1, 10 ** 30)))

    def test_matrix_shapes(self) -> None:
        m = EXACT.matrix([[1, "1/2"], [0, 3]])
        self.assertEqual(m.shape, (2, 2))
        self.assertEqual(m[0, 1], Fraction(1, 2))
        self.assertEqual(EXACT.matrix([], cols=3).shape, (0, 3))
        with self.assertRaises(NumericsException):
            EXACT.matrix([[1, 2], [3]])
        with self.assertRaises(NumericsException):
            EXACT.matrix([[1, 2]], cols=3)

    def test_clean(self) -> None:
        cleaned = FLOAT.clean(np.array([1e-12, -1e-11, 0.5]))
        self.assertEqual(cleaned.tolist(), [0.0, 0.0, 0.5])


class TestRowSpaceBasis(unittest.TestCase):
    def assertSameRowSpace(self, basis: np.ndarray, v: np.ndarray) -> None:
        self.assertEqual(basis.shape[0], rank(EXACT, v))
        self.assertEqual(rank(EXACT, np.concatenate([basis, v], axis=0)), basis.shape[0])

    def test_identity(self) -> None:
        basis = row_space_basis(EXACT, EXACT.identity(3))
        self.assertTrue((basis == EXACT.identity(3)).all())

    def test_zero(self) -> None:
        self.assertEqual(row_space_basis(EXACT, EXACT.zeros(3, 4)).shape, (0, 4))

    def test_ququart_effects(self) -> None:
        doc = ququart_diagonal_gpt()
        assert doc.gpt is not None
        effects = EXACT.matrix(doc.gpt.effects)
        basis = row_space_basis(EXACT, effects)
        self.assertEqual(basis.shape, (3, effects.shape[1]))
        self.assertSameRowSpace(basis, effects)

    def test_random_rank_two(self) -> None:
        rng = random.Random(12)
        checked = 0
        while checked < 100:
            left = EXACT.matrix([[rng.randint(-3, 3) for _ in range(2)] for _ in range(4)])
            right = EXACT.matrix([[rng.randint(-3, 3) for _ in range(6)] for _ in range(2)])
            v = matmul(EXACT, left, right)
            if rank(EXACT, v) != 2:
                continue
            checked += 1

            basis = row_space_basis(EXACT, v)
            self.assertEqual(basis.shape, (2, 6))
            self.assertSameRowSpace(basis, v)
            # Every row of v is a combination of the basis rows.
            inclusion, projection = split_idempotent(EXACT, v, 6)
            for row in v:
                self.assertEqual(span_residual(EXACT, inclusion, projection, row), 0)
            # Applying it twice changes nothing.
            self.assertTrue((row_space_basis(EXACT, basis) == basis).all())

            approximate = row_space_basis(FLOAT, v.astype(np.float64))
            np.testing.assert_allclose(approximate, basis.astype(np.float64), atol=1e-9)


class TestLinearAlgebra(unittest.TestCase):
    def test_rref_exact(self) -> None:
        m = EXACT.matrix([[2, 4, 2], [1, 2, 3], [3, 6, 5]])
        reduced, pivots = rref(EXACT, m)
        self.assertEqual(pivots, [0, 2])
        self.assertEqual(reduced[0].tolist(), [1, 2, 0])
        self.assertEqual(reduced[1].tolist(), [0, 0, 1])
        self.assertEqual(reduced[2].tolist(), [0, 0, 0])

    def test_rank(self) -> None:
        m = [[1, 0, 1], [0, 1, 1], [1, 1, 2]]
        self.assertEqual(rank(EXACT, EXACT.matrix(m)), 2)
        self.assertEqual(rank(FLOAT, FLOAT.matrix(m)), 2)
        self.assertEqual(rank(EXACT, EXACT.zeros(0, 3)), 0)

    def test_inverse(self) -> None:
        m = EXACT.matrix([[2, 1], [1, 1]])
        inv = inverse(EXACT, m)
        self.assertEqual(inv.tolist(), [[1, -1], [-1, 2]])
        self.assertTrue((matmul(EXACT, m, inv) == EXACT.identity(2)).all())

        with self.assertRaises(NumericsException):
            inverse(EXACT, EXACT.matrix([[1, 2], [2, 4]]))
        with self.assertRaises(NumericsException):
            inverse(EXACT, EXACT.matrix([[1, 2, 3]]))

    def test_split_idempotent_exact(self) -> None:
        v = EXACT.matrix([[1, 1, 0], [2, 2, 0], [0, 1, 1]])
        inclusion, projection = split_idempotent(EXACT, v, 3)
        self.assertEqual(inclusion.shape, (3, 2))
        self.assertEqual(projection.shape, (2, 3))
        self.assertTrue((matmul(EXACT, projection, inclusion) == EXACT.identity(2)).all())

        # The composite is the orthogonal projector onto the span.
        projector = matmul(EXACT, inclusion, projection)
        self.assertTrue((projector == transpose(projector)).all())
        self.assertTrue((matmul(EXACT, projector, projector) == projector).all())
        for row in v:
            self.assertEqual(span_residual(EXACT, inclusion, projection, row), 0)
        self.assertGreater(span_residual(EXACT, inclusion, projection, EXACT.vector([1, 0, 0])), 0)

    def test_split_idempotent_float(self) -> None:
        rng = np.random.default_rng(7)
        v = rng.normal(size=(2, 5)) @ rng.normal(size=(5, 5))
        v = np.concatenate([v, v[:1] + v[1:]], axis=0)
        inclusion, projection = split_idempotent(FLOAT, v, 5)
        self.assertEqual(inclusion.shape, (5, 2))
        np.testing.assert_allclose(projection @ inclusion, np.eye(2), atol=1e-9)
        self.assertLess(span_residual(FLOAT, inclusion, projection, v), 1e-9)

    def test_split_idempotent_empty(self) -> None:
        inclusion, projection = split_idempotent(EXACT, EXACT.zeros(2, 3), 3)
        self.assertEqual(inclusion.shape, (3, 0))
        self.assertEqual(projection.shape, (0, 3))

    def test_json_formatting(self) -> None:
        self.assertEqual(format_scalar(Fraction(1, 2)), "1/2")
        self.assertEqual(format_scalar(Fraction(-3)), "-3")
        self.assertEqual(format_scalar(0.25), 0.25)
        self.assertEqual(to_jsonable(EXACT.matrix([[1, "1/3"]])), [["1", "1/3"]])
        self.assertEqual(to_jsonable(FLOAT.vector([1, 2])), [1.0, 2.0])


if __name__ == '__main__':
    unittest.main()
