import random
import unittest
from fractions import Fraction
from typing import List, Optional, Set, Tuple

import numpy as np
from scipy.optimize import linprog

from nctest.cone import ConeException, ConeGenerators, cone_contains, dual_rays
from nctest.fixtures import BOXWORLD_H_EFFECTS
from nctest.lp import LinearProgram, solve_lp
from nctest.numerics import Arithmetic, ArithmeticEnum, Matrix, rank


EXACT = Arithmetic(ArithmeticEnum.ARITHMETIC_EXACT)
FLOAT = Arithmetic(ArithmeticEnum.ARITHMETIC_FLOAT)


def rows_of(m: Matrix) -> List[Tuple[Fraction, ...]]:
    return [tuple(row) for row in m.tolist()]


def random_generators(rng: random.Random, dimension: int) -> Matrix:
    while True:
        count = rng.randint(dimension, dimension + 4)
        rows = [[rng.randint(-3, 3) for _ in range(dimension)] for _ in range(count)]
        gens = EXACT.matrix(rows)
        if rank(EXACT, gens) == dimension:
            return gens


def exact_membership(gens: Matrix, v: Matrix) -> bool:
    lp = LinearProgram(EXACT, EXACT.vector([0] * gens.shape[0]), gens.T.copy(), v)
    return solve_lp(lp).feasible


def scipy_membership(gens: Matrix, v: Matrix) -> bool:
    result = linprog(
        np.zeros(gens.shape[0]),
        A_eq=gens.T.astype(np.float64),
        b_eq=v.astype(np.float64),
        bounds=(0, None),
        method="highs",
    )
    return bool(result.status == 0)


class TestDualRays(unittest.TestCase):
    def test_square_cone(self) -> None:
        gens = ConeGenerators(EXACT, EXACT.matrix([[1, 0, 1], [1, 0, -1], [1, 1, 0], [1, -1, 0]]))
        rays = dual_rays(EXACT, gens)
        self.assertEqual(
            rows_of(rays),
            [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)],
        )

    def test_scaling_and_interior_generators(self) -> None:
        # Rescaled generators, an interior point and a zero row change nothing.
        gens = ConeGenerators(EXACT, EXACT.matrix([
            ["1/2", 0, "1/2"],
            ["1/2", 0, "-1/2"],
            ["1/2", "1/2", 0],
            ["1/2", "-1/2", 0],
            [1, 0, 0],
            [0, 0, 0],
        ]))
        self.assertEqual(gens.count, 5)
        rays = dual_rays(EXACT, gens)
        self.assertEqual(
            rows_of(rays),
            [(1, 1, 1), (1, 1, -1), (1, -1, 1), (1, -1, -1)],
        )

    def test_square_pyramid_effects(self) -> None:
        gens = ConeGenerators(EXACT, EXACT.matrix([
            ["1/2", "-1/2", "-1/2"],
            ["1/2", "1/2", "-1/2"],
            ["1/2", "1/2", "1/2"],
            ["1/2", "-1/2", "1/2"],
            [1, 0, 0],
        ]))
        rays = dual_rays(EXACT, gens)
        self.assertEqual(set(rows_of(rays)), {tuple(Fraction(x) for x in row) for row in BOXWORLD_H_EFFECTS})
        self.assertEqual(rows_of(rays), sorted(rows_of(rays), reverse=True))

    def test_whole_space(self) -> None:
        gens = ConeGenerators(EXACT, EXACT.matrix([[1, 0], [-1, 0], [0, 1], [0, -1]]))
        self.assertEqual(dual_rays(EXACT, gens).shape, (0, 2))

    def test_half_space(self) -> None:
        gens = ConeGenerators(EXACT, EXACT.matrix([[1, 0], [-1, 0], [0, 3]]))
        self.assertEqual(rows_of(dual_rays(EXACT, gens)), [(0, 1)])

    def test_float_rays_are_unit_vectors(self) -> None:
        gens = ConeGenerators(FLOAT, FLOAT.matrix([[1, 0, 1], [1, 0, -1], [1, 1, 0], [1, -1, 0]]))
        rays = dual_rays(FLOAT, gens)
        self.assertEqual(rays.shape, (4, 3))
        np.testing.assert_allclose(np.linalg.norm(rays, axis=1), np.ones(4), atol=1e-12)
        np.testing.assert_allclose(rays[0], np.ones(3) / np.sqrt(3), atol=1e-12)

    def test_bad_generators(self) -> None:
        with self.assertRaises(ConeException):
            ConeGenerators(EXACT, EXACT.zeros(3, 2))
        with self.assertRaises(ConeException):
            ConeGenerators(EXACT, EXACT.matrix([[1, 0, 0], [0, 1, 0]]))
        with self.assertRaises(ConeException):
            cone_contains(EXACT, EXACT.matrix([[1, 0]]), EXACT.vector([1, 0, 0]))

    def test_random_cones(self) -> None:
        rng = random.Random(1234)
        for trial in range(500):
            dimension = rng.randint(2, 4)
            gens = random_generators(rng, dimension)
            rays = dual_rays(EXACT, ConeGenerators(EXACT, gens))

            seen: Set[Tuple[Fraction, ...]] = set()
            for ray in rays:
                # Primitive integer vectors, valid for every generator, and
                # tight on exactly a ridge's worth of generators.
                self.assertTrue(all(x.denominator == 1 for x in ray))
                values = gens @ ray
                self.assertTrue(all(x >= 0 for x in values), f"trial {trial}")
                tight = [g for g, value in zip(gens, values) if value == 0]
                self.assertEqual(rank(EXACT, EXACT.matrix(tight, cols=dimension)), dimension - 1, f"trial {trial}")
                self.assertNotIn(tuple(ray), seen)
                seen.add(tuple(ray))
            self.assertEqual(rows_of(rays), sorted(rows_of(rays), reverse=True))

            # Membership through the facets agrees with solving for a
            # nonnegative combination of the generators.
            for _ in range(3):
                v = EXACT.vector([rng.randint(-4, 4) for _ in range(dimension)])
                inside = cone_contains(EXACT, rays, v)
                self.assertEqual(inside, exact_membership(gens, v), f"trial {trial}")
                if all(x != 0 for x in rays @ v):
                    self.assertEqual(inside, scipy_membership(gens, v), f"trial {trial}")

    def test_every_facet_is_needed(self) -> None:
        rng = random.Random(4321)
        for trial in range(100):
            dimension = rng.randint(2, 4)
            gens = random_generators(rng, dimension)
            rays = dual_rays(EXACT, ConeGenerators(EXACT, gens))
            for k in range(rays.shape[0]):
                others = np.delete(rays, k, axis=0)
                witness = self.escaping_vector(others, rays[k])
                self.assertIsNotNone(witness, f"trial {trial}, facet {k}")
                assert witness is not None
                self.assertTrue(cone_contains(EXACT, others, witness), f"trial {trial}, facet {k}")
                self.assertLess(rays[k] @ witness, 0, f"trial {trial}, facet {k}")

    @staticmethod
    def escaping_vector(others: Matrix, dropped: Matrix) -> Optional[Matrix]:
        # Some v with others . v >= 0 but dropped . v = -1, written as
        # v = p - q with p, q >= 0 and slacks s = others . v.
        count, dimension = others.shape
        constraints = EXACT.zeros(count + 1, 2 * dimension + count)
        constraints[:count, :dimension] = others
        constraints[:count, dimension:2 * dimension] = -others
        constraints[:count, 2 * dimension:] = -EXACT.identity(count)
        constraints[count, :dimension] = dropped
        constraints[count, dimension:2 * dimension] = -dropped
        rhs = EXACT.vector([0] * count + [-1])
        result = solve_lp(LinearProgram(EXACT, EXACT.vector([0] * (2 * dimension + count)), constraints, rhs))
        if not result.feasible or result.assignment is None:
            return None
        return result.assignment[:dimension] - result.assignment[dimension:2 * dimension]

    def test_float_matches_exact(self) -> None:
        rng = random.Random(99)
        for trial in range(50):
            dimension = rng.randint(2, 4)
            gens = random_generators(rng, dimension)
            exact = dual_rays(EXACT, ConeGenerators(EXACT, gens))
            approximate = dual_rays(FLOAT, ConeGenerators(FLOAT, FLOAT.convert(gens)))

            self.assertEqual(exact.shape, approximate.shape, f"trial {trial}")
            expected = sorted(
                (tuple(np.round(row / np.linalg.norm(row), 8)) for row in exact.astype(np.float64)),
                reverse=True,
            )
            actual = sorted((tuple(np.round(row, 8)) for row in approximate), reverse=True)
            np.testing.assert_allclose(np.array(actual), np.array(expected), atol=1e-7)


if __name__ == '__main__':
    unittest.main()
