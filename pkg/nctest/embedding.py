from typing import List, Optional

import numpy as np

from nctest.fragment import AccessibleFragment, GptFragment, noisy_targets, unit_targets
from nctest.lp import EmbeddingCertificate, LPException, residual_tolerance, verify_certificate
from nctest.numerics import Arithmetic, Matrix, Scalar, matmul, max_abs, transpose


class EmbeddingException(Exception):
    pass


class SimplicialConeEmbedding:
    # Maps sending accessible states and effects to entrywise nonnegative
    # vectors over the ontic states whose pairing reproduces the target rule.

    def __init__(self, tau_states: Matrix, tau_effects: Matrix) -> None:
        if tau_states.shape[0] != tau_effects.shape[0]:
            raise EmbeddingException(
                f"State map has {tau_states.shape[0]} ontic states but effect map has {tau_effects.shape[0]}!"
            )
        self.tau_states = tau_states
        self.tau_effects = tau_effects

    def __repr__(self) -> str:
        return f"{type(self).__name__}(ontic_count={self.ontic_count})"

    @property
    def ontic_count(self) -> int:
        return self.tau_states.shape[0]

    @property
    def simplex(self) -> bool:
        return False

    def product(self, arith: Arithmetic) -> Matrix:
        return matmul(arith, transpose(self.tau_effects), self.tau_states)

    def fragment_maps(self, arith: Arithmetic, acc: AccessibleFragment) -> List[Matrix]:
        # The same maps acting on raw ambient vectors, through the projections.
        return [
            arith.clean(matmul(arith, self.tau_states, acc.state_projection)),
            arith.clean(matmul(arith, self.tau_effects, acc.effect_projection)),
        ]


class SimplexEmbedding(SimplicialConeEmbedding):
    # A simplicial-cone embedding whose effect map sends the unit effect to
    # the all-ones vector. support lists the ontic states kept from the cone
    # embedding it was built from.

    def __init__(self, tau_states: Matrix, tau_effects: Matrix, support: List[int]) -> None:
        super().__init__(tau_states, tau_effects)
        self.support = support

    @property
    def simplex(self) -> bool:
        return True


class OntologicalModel:
    def __init__(self, epistemic_states: Matrix, response_functions: Matrix, noise: Scalar, simplex: bool) -> None:
        if epistemic_states.shape[1] != response_functions.shape[1]:
            raise EmbeddingException("Epistemic states and response functions range over different ontic states!")
        self.epistemic_states = epistemic_states
        self.response_functions = response_functions
        self.noise = noise
        self.simplex = simplex

    def __repr__(self) -> str:
        return (
            f"OntologicalModel(ontic_count={self.ontic_count}, states={self.epistemic_states.shape[0]}, "
            f"effects={self.response_functions.shape[0]}, simplex={self.simplex})"
        )

    @property
    def ontic_count(self) -> int:
        return self.epistemic_states.shape[1]

    def response_support(self, arith: Arithmetic) -> int:
        # Ontic states on which some effect responds.
        return sum(
            1 for column in transpose(self.response_functions)
            if any(not arith.is_zero(x) for x in column)
        )


class ModelReport:
    def __init__(self, max_residual: Scalar, violations: List[str]) -> None:
        self.max_residual = max_residual
        self.violations = violations

    def __repr__(self) -> str:
        return f"ModelReport(max_residual={self.max_residual!r}, violations={len(self.violations)})"

    @property
    def valid(self) -> bool:
        return not self.violations


def embedding_from_certificate(acc: AccessibleFragment, cert: EmbeddingCertificate) -> SimplicialConeEmbedding:
    """
    Split a certificate into a simplicial-cone embedding with one ontic state
    per state facet: tau_S = H_S and tau_E = sigma^T H_E, so that
    tau_E^T tau_S = H_E^T sigma H_S is the certified rule.
    """
    try:
        verify_certificate(acc, cert.sigma, cert.target)
    except LPException as e:
        raise EmbeddingException(f"Refusing to build an embedding from an unverified certificate: {e}")

    arith = acc.arith
    return SimplicialConeEmbedding(
        acc.state_facets.copy(),
        arith.clean(matmul(arith, transpose(cert.sigma), acc.effect_facets)),
    )


def to_simplex(arith: Arithmetic, sce: SimplicialConeEmbedding, unit: Matrix) -> SimplexEmbedding:
    weights = matmul(arith, sce.tau_effects, unit)
    for i, weight in enumerate(weights):
        if arith.is_negative(weight):
            raise EmbeddingException(
                f"Unit effect has weight {weight} on ontic state {i}, it is outside of the effect cone!"
            )

    support = [i for i, weight in enumerate(weights) if arith.is_positive(weight)]
    product = sce.product(arith)
    if not support and any(not arith.is_zero(x) for x in product.flat):
        raise EmbeddingException("Unit effect vanishes on every ontic state but the probability rule does not!")

    if support:
        scale = weights[support].reshape(-1, 1)
        tau_states = arith.clean(sce.tau_states[support] * scale)
        tau_effects = arith.clean(sce.tau_effects[support] / scale)
    else:
        tau_states = arith.zeros(0, sce.tau_states.shape[1])
        tau_effects = arith.zeros(0, sce.tau_effects.shape[1])
    embedding = SimplexEmbedding(tau_states, tau_effects, support)

    if max_abs(embedding.product(arith) - product) > residual_tolerance(arith):
        raise EmbeddingException(
            "Dropping ontic states the unit effect ignores changed the probability rule, "
            "some effect lacks its complement in the fragment!"
        )
    return embedding


def ontological_model(
    sce: SimplicialConeEmbedding,
    acc: AccessibleFragment,
    r: Scalar,
) -> OntologicalModel:
    arith = acc.arith
    mu = arith.clean(matmul(arith, acc.states, transpose(sce.tau_states)))
    xi = arith.clean(matmul(arith, acc.effects, transpose(sce.tau_effects)))

    if any(arith.is_negative(x) for x in mu.flat):
        raise EmbeddingException("Embedding produced an epistemic state with negative weight!")
    if any(arith.is_negative(x) for x in xi.flat):
        raise EmbeddingException("Embedding produced a negative response function!")
    if sce.simplex and any(arith.is_positive(x - 1) for x in xi.flat):
        raise EmbeddingException("Embedding produced a response function exceeding one!")

    return OntologicalModel(mu, xi, r, sce.simplex)


def verify_model(
    arith: Arithmetic,
    model: OntologicalModel,
    frag: GptFragment,
    channel: Optional[Matrix] = None,
) -> ModelReport:
    """
    Check a model against a fragment's own statistics, noisy at the model's
    level when a noise channel is given. Every pair, positivity and, for
    simplex models, response bounds, the all-ones unit response and state
    normalization are checked, and every failure is listed.
    """
    mu = model.epistemic_states
    xi = model.response_functions
    if mu.shape[0] != frag.state_count:
        raise EmbeddingException(f"Model has {mu.shape[0]} epistemic states for {frag.state_count} states!")
    if xi.shape[0] != frag.effect_count:
        raise EmbeddingException(f"Model has {xi.shape[0]} response functions for {frag.effect_count} effects!")

    tolerance = residual_tolerance(arith)
    violations: List[str] = []

    for (i, k), value in np.ndenumerate(mu):
        if arith.is_negative(value):
            violations.append(f"epistemic state {i} has negative weight {value} on ontic state {k}")
    for (j, k), value in np.ndenumerate(xi):
        if arith.is_negative(value):
            violations.append(f"response function {j} is negative ({value}) on ontic state {k}")
        elif model.simplex and arith.is_positive(value - 1):
            violations.append(f"response function {j} exceeds one ({value}) on ontic state {k}")

    targets = noisy_targets(frag, model.noise, channel)
    predicted = matmul(arith, xi, transpose(mu))
    max_residual = max_abs(predicted - targets)
    for (j, i), value in np.ndenumerate(predicted):
        deviation = abs(value - targets[j, i])
        if deviation > tolerance:
            violations.append(f"effect {j} on state {i} predicts {value} instead of {targets[j, i]}")

    if model.simplex:
        for j, effect in enumerate(frag.effects):
            if max_abs(effect - frag.unit) > tolerance:
                continue
            for k, value in enumerate(xi[j]):
                if not arith.equal(value, 1):
                    violations.append(f"unit effect {j} responds {value} instead of 1 on ontic state {k}")

        normalization = unit_targets(frag, model.noise, channel)
        for i, row in enumerate(mu):
            total = row.sum() if row.shape[0] else arith.scalar(0)
            if abs(total - normalization[i]) > tolerance:
                violations.append(f"epistemic state {i} sums to {total} instead of {normalization[i]}")

    return ModelReport(max_residual, violations)
