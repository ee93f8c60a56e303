import math
import unittest

import numpy as np

from nctest.fragment import MaxMixedSourceEnum
from nctest.numerics import matmul, transpose
from nctest.quantum import (
    HermitianBasis,
    HermitianOperator,
    QuantumException,
    born,
    dephasing_channel,
    from_vector,
    hermitian_basis,
    quantum_to_gpt,
    to_vector,
)


def random_density(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_effect(rng: np.random.Generator, dim: int) -> np.ndarray:
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    e = a @ a.conj().T
    return e / np.max(np.linalg.eigvalsh(e))


class TestHermitianBasis(unittest.TestCase):
    def test_qubit_basis(self) -> None:
        basis = hermitian_basis(2)
        h = 1 / math.sqrt(2)
        expected = [
            [[h, 0], [0, h]],
            [[0, h], [h, 0]],
            [[0, -1j * h], [1j * h, 0]],
            [[h, 0], [0, -h]],
        ]
        self.assertEqual(len(basis), 4)
        np.testing.assert_allclose(basis.elements, np.array(expected), atol=1e-12)

    def test_orthonormal(self) -> None:
        for dim in [1, 2, 3, 4, 5]:
            basis = hermitian_basis(dim)
            self.assertEqual(len(basis), dim * dim)
            gram = np.einsum("aij,bji->ab", basis.elements, basis.elements)
            np.testing.assert_allclose(gram, np.eye(dim * dim), atol=1e-12)

    def test_cached(self) -> None:
        self.assertIs(hermitian_basis(3), hermitian_basis(3))

    def test_bad_basis(self) -> None:
        with self.assertRaises(QuantumException):
            hermitian_basis(0)
        with self.assertRaises(QuantumException):
            HermitianBasis(2, [np.eye(2)])
        # Orthonormal but with the identity direction last.
        h = 1 / math.sqrt(2)
        with self.assertRaises(QuantumException):
            HermitianBasis(2, [
                [[h, 0], [0, -h]],
                [[0, h], [h, 0]],
                [[0, -1j * h], [1j * h, 0]],
                [[h, 0], [0, h]],
            ])
        with self.assertRaises(QuantumException):
            HermitianBasis(2, [np.eye(2), np.eye(2), np.eye(2), np.eye(2)])


class TestOperators(unittest.TestCase):
    def test_not_hermitian(self) -> None:
        with self.assertRaises(QuantumException):
            HermitianOperator([[1, 1], [0, 1]])
        with self.assertRaises(QuantumException):
            HermitianOperator([[1, 0, 0], [0, 1, 0]])
        with self.assertRaises(QuantumException):
            HermitianOperator(np.zeros((0, 0)))

    def test_vector_round_trip_and_born(self) -> None:
        rng = np.random.default_rng(11)
        for dim in [2, 3]:
            basis = hermitian_basis(dim)
            for _ in range(5):
                rho = HermitianOperator(random_density(rng, dim))
                effect = HermitianOperator(random_effect(rng, dim))
                s = to_vector(rho, basis)
                e = to_vector(effect, basis)
                self.assertAlmostEqual(float(s @ e), born(rho, effect), places=10)
                np.testing.assert_allclose(from_vector(s, basis).matrix, rho.matrix, atol=1e-12)

    def test_dimension_mismatch(self) -> None:
        with self.assertRaises(QuantumException):
            to_vector(HermitianOperator(np.eye(3)), hermitian_basis(2))
        with self.assertRaises(QuantumException):
            born(HermitianOperator(np.eye(2) / 2), HermitianOperator(np.eye(3)))


class TestDephasing(unittest.TestCase):
    def test_qubit(self) -> None:
        channel = dephasing_channel(hermitian_basis(2))
        np.testing.assert_allclose(channel, np.diag([1.0, 0.0, 0.0, 1.0]), atol=1e-12)

    def test_matches_dropping_coherences(self) -> None:
        rng = np.random.default_rng(11)
        for dim in [2, 3, 4]:
            basis = hermitian_basis(dim)
            channel = dephasing_channel(basis)
            np.testing.assert_allclose(channel @ channel, channel, atol=1e-12)
            self.assertEqual(int(round(float(np.trace(channel)))), dim)
            for _ in range(5):
                rho = HermitianOperator(random_density(rng, dim))
                dephased = HermitianOperator(np.diag(np.diag(rho.matrix)))
                np.testing.assert_allclose(channel @ to_vector(rho, basis), to_vector(dephased, basis), atol=1e-12)

    def test_carried_by_fragment(self) -> None:
        rho = HermitianOperator(np.eye(3) / 3)
        frag = quantum_to_gpt([rho], [HermitianOperator(np.eye(3))])
        assert frag.dephasing is not None
        np.testing.assert_allclose(frag.dephasing, dephasing_channel(hermitian_basis(3)), atol=1e-9)


class TestQuantumToGpt(unittest.TestCase):
    def test_qubit_axes(self) -> None:
        h = 1 / math.sqrt(2)
        kets = [np.array([1, 0]), np.array([0, 1]), np.array([h, h]), np.array([h, -h])]
        projectors = [HermitianOperator(np.outer(k, k.conj())) for k in kets]
        effects = [*projectors, HermitianOperator(np.eye(2)), HermitianOperator(np.zeros((2, 2)))]
        frag = quantum_to_gpt(projectors, effects)

        self.assertFalse(frag.arith.exact)
        self.assertEqual(frag.dimension, 4)
        self.assertEqual(frag.max_mixed_source, MaxMixedSourceEnum.SOURCE_IDENTITY)
        np.testing.assert_allclose(frag.unit, [math.sqrt(2), 0, 0, 0], atol=1e-12)

        # Dot products reproduce the Born rule for every pair.
        probabilities = matmul(frag.arith, frag.effects, transpose(frag.states))
        for j, effect in enumerate(effects):
            for i, state in enumerate(projectors):
                self.assertAlmostEqual(float(probabilities[j, i]), born(state, effect), places=12)

    def test_validation(self) -> None:
        good = HermitianOperator(np.eye(2) / 2)
        with self.assertRaises(QuantumException):
            quantum_to_gpt([HermitianOperator(np.diag([1.5, -0.5]))], [good])
        with self.assertRaises(QuantumException):
            quantum_to_gpt([HermitianOperator(np.eye(2))], [good])
        with self.assertRaises(QuantumException):
            quantum_to_gpt([good], [HermitianOperator(np.eye(2) * 2)])
        with self.assertRaises(QuantumException):
            quantum_to_gpt([good], [HermitianOperator(np.eye(3))])
        with self.assertRaises(QuantumException):
            quantum_to_gpt([], [good])

        # Subnormalized states are fine, and validation can be skipped.
        quantum_to_gpt([HermitianOperator(np.eye(2) / 4)], [good])
        quantum_to_gpt([HermitianOperator(np.diag([1.5, -0.5]))], [good], validate=False)


if __name__ == '__main__':
    unittest.main()
