import unittest
from fractions import Fraction
from typing import Optional, Tuple

from nctest.document import InputDocument
from nctest.embedding import (
    EmbeddingException,
    ModelReport,
    OntologicalModel,
    SimplexEmbedding,
    SimplicialConeEmbedding,
    embedding_from_certificate,
    ontological_model,
    to_simplex,
    verify_model,
)
from nctest.fixtures import QUBIT_AXES_SIGMA, boxworld_gpt, ququart_diagonal_gpt
from nctest.fragment import AccessibleFragment, GptFragment, accessible, depolarizing_channel, depolarizing_rule
from nctest.lp import EmbeddingCertificate, check_classicality, robustness
from nctest.numerics import Arithmetic, ArithmeticEnum, Matrix, matmul, transpose


EXACT = Arithmetic(ArithmeticEnum.ARITHMETIC_EXACT)
FLOAT = Arithmetic(ArithmeticEnum.ARITHMETIC_FLOAT)


def from_document(arith: Arithmetic, doc: InputDocument) -> GptFragment:
    assert doc.gpt is not None
    return GptFragment(
        arith,
        arith.matrix(doc.gpt.states),
        arith.matrix(doc.gpt.effects),
        arith.vector(doc.gpt.unit_effect),
        None if doc.gpt.max_mixed_state is None else arith.vector(doc.gpt.max_mixed_state),
    )


def qubit_axes(arith: Arithmetic) -> GptFragment:
    return GptFragment(
        arith,
        arith.matrix([[1, 0, 1], [1, 0, -1], [1, 1, 0], [1, -1, 0]]),
        arith.matrix([["1/2", 0, "1/2"], ["1/2", 0, "-1/2"], ["1/2", "1/2", 0], ["1/2", "-1/2", 0], [1, 0, 0], [0, 0, 0]]),
        arith.vector([1, 0, 0]),
    )


def classical_model(frag: GptFragment) -> Tuple[AccessibleFragment, SimplexEmbedding, OntologicalModel]:
    acc = accessible(frag)
    cert = check_classicality(acc)
    assert cert is not None
    sce = to_simplex(frag.arith, embedding_from_certificate(acc, cert), acc.unit)
    return acc, sce, ontological_model(sce, acc, cert.r)


def robust_model(frag: GptFragment) -> Tuple[AccessibleFragment, OntologicalModel, Matrix]:
    acc = accessible(frag)
    result = robustness(acc, depolarizing_rule(acc, frag))
    assert result.certificate is not None
    sce = to_simplex(frag.arith, embedding_from_certificate(acc, result.certificate), acc.unit)
    return acc, ontological_model(sce, acc, result.certificate.r), depolarizing_channel(frag)


class TestEmbedding(unittest.TestCase):
    def test_qubit_axes(self) -> None:
        frag = qubit_axes(EXACT)
        acc, sce, model = classical_model(frag)

        self.assertTrue(sce.simplex)
        self.assertLessEqual(sce.ontic_count, 4)
        self.assertTrue((sce.product(EXACT) == acc.rule).all())
        self.assertEqual(model.noise, 0)
        for row in model.epistemic_states:
            self.assertEqual(sum(row), 1)
        self.assertEqual(model.response_support(EXACT), sce.ontic_count)

        report = verify_model(EXACT, model, frag)
        self.assertTrue(report.valid, report.violations)
        self.assertEqual(report.max_residual, 0)

        # The ambient-space maps agree with the accessible ones on the fragment.
        state_map, effect_map = sce.fragment_maps(EXACT, acc)
        self.assertEqual(state_map.shape, (sce.ontic_count, 3))
        self.assertEqual(effect_map.shape, (sce.ontic_count, 3))
        self.assertTrue((matmul(EXACT, frag.states, transpose(state_map)) == model.epistemic_states).all())
        self.assertTrue((matmul(EXACT, frag.effects, transpose(effect_map)) == model.response_functions).all())

    def test_ququart_diagonal(self) -> None:
        frag = from_document(EXACT, ququart_diagonal_gpt())
        _, sce, model = classical_model(frag)
        self.assertLessEqual(sce.ontic_count, 4)
        report = verify_model(EXACT, model, frag)
        self.assertTrue(report.valid, report.violations)
        self.assertEqual(report.max_residual, 0)

    def test_boxworld_at_half_noise(self) -> None:
        frag = from_document(EXACT, boxworld_gpt())
        _, model, channel = robust_model(frag)
        self.assertEqual(model.noise, Fraction(1, 2))
        self.assertTrue(model.simplex)

        report = verify_model(EXACT, model, frag, channel)
        self.assertTrue(report.valid, report.violations)
        self.assertEqual(report.max_residual, 0)
        for row in model.response_functions[4]:
            self.assertEqual(row, 1)

        # The same model does not reproduce the noiseless statistics.
        noiseless = verify_model(EXACT, model, frag)
        self.assertFalse(noiseless.valid)
        self.assertEqual(noiseless.max_residual, Fraction(1, 4))

    def test_boxworld_float(self) -> None:
        frag = from_document(FLOAT, boxworld_gpt())
        _, model, channel = robust_model(frag)
        report = verify_model(FLOAT, model, frag, channel)
        self.assertTrue(report.valid, report.violations)
        self.assertLess(float(report.max_residual), 1e-6)

    def test_unverified_certificate(self) -> None:
        acc = accessible(qubit_axes(EXACT))
        bogus = EmbeddingCertificate(EXACT.matrix(QUBIT_AXES_SIGMA) * 2, Fraction(0), acc.rule, Fraction(0), True)
        with self.assertRaises(EmbeddingException):
            embedding_from_certificate(acc, bogus)


class TestToSimplex(unittest.TestCase):
    unit = EXACT.vector([1, 0, 0])

    def test_negative_weight(self) -> None:
        sce = SimplicialConeEmbedding(EXACT.matrix([[1, 0, 0]]), EXACT.matrix([[-1, 0, 0]]))
        with self.assertRaises(EmbeddingException):
            to_simplex(EXACT, sce, self.unit)

    def test_empty_support(self) -> None:
        sce = SimplicialConeEmbedding(EXACT.matrix([[1, 0, 0]]), EXACT.matrix([[0, 1, 0]]))
        with self.assertRaises(EmbeddingException):
            to_simplex(EXACT, sce, self.unit)

        empty = to_simplex(EXACT, SimplicialConeEmbedding(EXACT.matrix([[1, 0, 0]]), EXACT.zeros(1, 3)), self.unit)
        self.assertEqual(empty.ontic_count, 0)
        self.assertEqual(empty.support, [])

    def test_dropped_states_change_rule(self) -> None:
        sce = SimplicialConeEmbedding(
            EXACT.matrix([[1, 0, 0], [0, 1, 0]]),
            EXACT.matrix([[1, 0, 0], [0, 1, 0]]),
        )
        with self.assertRaises(EmbeddingException):
            to_simplex(EXACT, sce, self.unit)

    def test_rescales_support(self) -> None:
        sce = SimplicialConeEmbedding(
            EXACT.matrix([[1, 1, 0], [1, -1, 0]]),
            EXACT.matrix([["1/4", "1/4", 0], ["1/2", "-1/2", 0]]),
        )
        simplex = to_simplex(EXACT, sce, self.unit)
        self.assertEqual(simplex.support, [0, 1])
        self.assertEqual(simplex.tau_states.tolist(), [[Fraction(1, 4), Fraction(1, 4), 0], [Fraction(1, 2), Fraction(-1, 2), 0]])
        self.assertEqual(matmul(EXACT, simplex.tau_effects, self.unit).tolist(), [1, 1])
        self.assertTrue((simplex.product(EXACT) == sce.product(EXACT)).all())

    def test_mismatched_maps(self) -> None:
        with self.assertRaises(EmbeddingException):
            SimplicialConeEmbedding(EXACT.matrix([[1, 0, 0]]), EXACT.zeros(2, 3))


class TestModelChecks(unittest.TestCase):
    def test_negative_epistemic_state(self) -> None:
        acc = accessible(qubit_axes(EXACT))
        sce = SimplicialConeEmbedding(-acc.state_facets, acc.effect_facets)
        with self.assertRaises(EmbeddingException):
            ontological_model(sce, acc, Fraction(0))

    def test_violations_are_listed(self) -> None:
        frag = qubit_axes(EXACT)
        _, _, model = classical_model(frag)
        mu = model.epistemic_states.copy()
        mu[0, 0] = mu[0, 0] - 2
        broken = OntologicalModel(mu, model.response_functions, model.noise, True)

        report = verify_model(EXACT, broken, frag)
        self.assertFalse(report.valid)
        self.assertTrue(any("negative" in v for v in report.violations))
        self.assertTrue(any("sums to" in v for v in report.violations))

    def test_count_mismatch(self) -> None:
        frag = qubit_axes(EXACT)
        _, _, model = classical_model(frag)
        truncated = OntologicalModel(model.epistemic_states[:2], model.response_functions, model.noise, True)
        with self.assertRaises(EmbeddingException):
            verify_model(EXACT, truncated, frag)
        with self.assertRaises(EmbeddingException):
            OntologicalModel(EXACT.zeros(4, 2), EXACT.zeros(6, 3), Fraction(0), True)

    def test_report_validity(self) -> None:
        self.assertTrue(ModelReport(Fraction(0), []).valid)
        self.assertFalse(ModelReport(Fraction(1), ["effect 0 on state 0 predicts 1 instead of 0"]).valid)

    def test_optional_channel(self) -> None:
        frag = qubit_axes(EXACT)
        _, _, model = classical_model(frag)
        channel: Optional[Matrix] = depolarizing_channel(frag)
        # At zero noise the channel makes no difference.
        self.assertTrue(verify_model(EXACT, model, frag, channel).valid)


if __name__ == '__main__':
    unittest.main()
