import threading
from enum import Enum
from typing import List, Optional, Tuple

from nctest.cone import ConeGenerators, cone_contains, dual_rays
from nctest.log import warn
from nctest.numerics import (
    Arithmetic,
    Matrix,
    Scalar,
    matmul,
    outer,
    span_residual,
    split_idempotent,
    transpose,
)


class FragmentException(Exception):
    pass


class NoiseEnum(Enum):
    NOISE_DEPOLARIZING = "depolarizing"
    NOISE_DEPHASING = "dephasing"
    NOISE_CUSTOM = "custom"


class MaxMixedSourceEnum(Enum):
    SOURCE_INPUT = "input"
    SOURCE_IDENTITY = "identity_over_dimension"
    SOURCE_OVERRIDE = "override"
    SOURCE_UNIFORM_MIXTURE = "uniform_mixture_of_states"


class GptFragment:
    # Raw states and effects of one experiment as rows of vectors in an
    # ambient real space, together with the unit effect and optionally the
    # state playing the role of the maximally mixed state.

    def __init__(
        self,
        arith: Arithmetic,
        states: Matrix,
        effects: Matrix,
        unit: Matrix,
        max_mixed: Optional[Matrix] = None,
        *,
        max_mixed_source: Optional[MaxMixedSourceEnum] = None,
        dephasing: Optional[Matrix] = None,
    ) -> None:
        if states.ndim != 2 or effects.ndim != 2:
            raise FragmentException("States and effects must be given as the rows of a matrix!")
        if states.shape[0] == 0:
            raise FragmentException("A fragment needs at least one state!")
        if effects.shape[0] == 0:
            raise FragmentException("A fragment needs at least one effect!")

        dimension = states.shape[1]
        if dimension == 0:
            raise FragmentException("States must have at least one coordinate!")
        if effects.shape[1] != dimension:
            raise FragmentException(
                f"States have {dimension} coordinates but effects have {effects.shape[1]} coordinates!"
            )
        if unit.shape != (dimension,):
            raise FragmentException(f"Unit effect must have {dimension} coordinates, got {unit.shape[0]}!")
        if max_mixed is not None and max_mixed.shape != (dimension,):
            raise FragmentException(
                f"Maximally mixed state must have {dimension} coordinates, got {max_mixed.shape[0]}!"
            )
        if dephasing is not None and dephasing.shape != (dimension, dimension):
            raise FragmentException(
                f"Dephasing channel must be {dimension}x{dimension}, got {dephasing.shape[0]}x{dephasing.shape[1]}!"
            )

        for i, state in enumerate(states):
            weight = unit @ state
            if arith.is_negative(weight) or arith.is_positive(weight - 1):
                raise FragmentException(
                    f"State {i} has normalization {weight}, which is outside of [0, 1]!"
                )

        self.arith = arith
        self.states = states
        self.effects = effects
        self.unit = unit
        self.max_mixed = max_mixed
        # Only quantum fragments know which channel dephases them.
        self.dephasing = dephasing
        if max_mixed is None:
            self.max_mixed_source: Optional[MaxMixedSourceEnum] = None
        else:
            self.max_mixed_source = max_mixed_source or MaxMixedSourceEnum.SOURCE_INPUT

    def __repr__(self) -> str:
        return (
            f"GptFragment(dimension={self.dimension}, states={self.state_count}, "
            f"effects={self.effect_count}, arith={self.arith!r})"
        )

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    @property
    def state_count(self) -> int:
        return self.states.shape[0]

    @property
    def effect_count(self) -> int:
        return self.effects.shape[0]


class AccessibleFragment:
    # A fragment rewritten in the coordinates of the spans its states and
    # effects actually occupy. The facet matrices are the expensive part, so
    # they are computed on first use and shared between threads.

    def __init__(
        self,
        arith: Arithmetic,
        *,
        state_inclusion: Matrix,
        state_projection: Matrix,
        effect_inclusion: Matrix,
        effect_projection: Matrix,
        states: Matrix,
        effects: Matrix,
        unit: Matrix,
        unit_in_span: bool,
        warnings: List[str],
    ) -> None:
        self.arith = arith
        self.state_inclusion = state_inclusion
        self.state_projection = state_projection
        self.effect_inclusion = effect_inclusion
        self.effect_projection = effect_projection
        self.states = states
        self.effects = effects
        self.unit = unit
        self.unit_in_span = unit_in_span
        self.warnings = warnings
        self.rule = matmul(arith, transpose(effect_inclusion), state_inclusion)

        self.__lock: threading.Lock = threading.Lock()
        self.__state_facets: Optional[Matrix] = None
        self.__effect_facets: Optional[Matrix] = None

    def __repr__(self) -> str:
        return (
            f"AccessibleFragment(state_dimension={self.state_dimension}, "
            f"effect_dimension={self.effect_dimension}, unit_in_span={self.unit_in_span})"
        )

    @property
    def ambient_dimension(self) -> int:
        return self.state_inclusion.shape[0]

    @property
    def state_dimension(self) -> int:
        return self.state_inclusion.shape[1]

    @property
    def effect_dimension(self) -> int:
        return self.effect_inclusion.shape[1]

    @property
    def state_facets(self) -> Matrix:
        with self.__lock:
            if self.__state_facets is None:
                self.__state_facets = dual_rays(self.arith, ConeGenerators(self.arith, self.states))
            return self.__state_facets

    @property
    def effect_facets(self) -> Matrix:
        with self.__lock:
            if self.__effect_facets is None:
                self.__effect_facets = dual_rays(self.arith, ConeGenerators(self.arith, self.effects))
            return self.__effect_facets


def accessible(frag: GptFragment) -> AccessibleFragment:
    arith = frag.arith
    warnings: List[str] = []

    state_inclusion, state_projection = split_idempotent(arith, frag.states, frag.dimension)
    if state_inclusion.shape[1] == 0:
        raise FragmentException("States span a zero-dimensional space!")
    effect_inclusion, effect_projection = split_idempotent(arith, frag.effects, frag.dimension)
    if effect_inclusion.shape[1] == 0:
        raise FragmentException("Effects span a zero-dimensional space!")

    unit_in_span = arith.is_zero(span_residual(arith, effect_inclusion, effect_projection, frag.unit))
    if not unit_in_span:
        msg = "Unit effect is not in the span of the effects, the ontological model will not be normalized!"
        warn(msg)
        warnings.append(msg)

    return AccessibleFragment(
        arith,
        state_inclusion=state_inclusion,
        state_projection=state_projection,
        effect_inclusion=effect_inclusion,
        effect_projection=effect_projection,
        states=arith.clean(matmul(arith, frag.states, transpose(state_projection))),
        effects=arith.clean(matmul(arith, frag.effects, transpose(effect_projection))),
        unit=arith.clean(matmul(arith, effect_projection, frag.unit)),
        unit_in_span=unit_in_span,
        warnings=warnings,
    )


def uniform_mixture(frag: GptFragment) -> Matrix:
    return frag.arith.clean(frag.states.sum(axis=0) / frag.state_count)


def state_span_contains(acc: AccessibleFragment, vector: Matrix) -> bool:
    arith = acc.arith
    return bool(arith.is_zero(span_residual(arith, acc.state_inclusion, acc.state_projection, vector)))


def max_mixed_state(
    frag: GptFragment,
    acc: Optional[AccessibleFragment] = None,
) -> Tuple[Matrix, MaxMixedSourceEnum]:
    """
    The state depolarizing noise mixes towards, and where it came from. An
    input or override state is used as given. The identity over the
    dimension of a quantum fragment is only used when the accessible
    fragment, if given, has it in its state span, otherwise this falls back
    to the uniform mixture of the states, which always is.
    """
    if frag.max_mixed is not None and frag.max_mixed_source is not None:
        if (
            frag.max_mixed_source != MaxMixedSourceEnum.SOURCE_IDENTITY or
            acc is None or
            state_span_contains(acc, frag.max_mixed)
        ):
            return frag.max_mixed, frag.max_mixed_source
    return uniform_mixture(frag), MaxMixedSourceEnum.SOURCE_UNIFORM_MIXTURE


def depolarizing_channel(frag: GptFragment, max_mixed: Optional[Matrix] = None) -> Matrix:
    # The ambient map s -> m (u . s), which replaces every state by the
    # maximally mixed state while keeping its normalization.
    if max_mixed is None:
        max_mixed, _ = max_mixed_state(frag)
    return outer(frag.arith, max_mixed, frag.unit)


def depolarizing_rule(acc: AccessibleFragment, frag: GptFragment, max_mixed: Optional[Matrix] = None) -> Matrix:
    arith = acc.arith
    if max_mixed is None:
        max_mixed, _ = max_mixed_state(frag, acc)
    if max_mixed.shape != (acc.ambient_dimension,):
        raise FragmentException(
            f"Maximally mixed state must have {acc.ambient_dimension} coordinates, got {max_mixed.shape[0]}!"
        )
    if not state_span_contains(acc, max_mixed):
        raise FragmentException("Maximally mixed state is not in the span of the states!")

    return outer(
        arith,
        matmul(arith, transpose(acc.effect_inclusion), max_mixed),
        matmul(arith, transpose(acc.state_inclusion), frag.unit),
    )


def noisy_rule(arith: Arithmetic, rule: Matrix, noise: Matrix, r: Scalar) -> Matrix:
    if rule.shape != noise.shape:
        raise FragmentException(
            f"Noise rule has shape {noise.shape[0]}x{noise.shape[1]} but the probability rule "
            f"has shape {rule.shape[0]}x{rule.shape[1]}!"
        )
    if arith.is_negative(r) or arith.is_positive(r - 1):
        raise FragmentException(f"Noise level {r} is outside of [0, 1]!")
    return noise * r + rule * (1 - r)


def custom_noise_rule(acc: AccessibleFragment, channel: Matrix) -> Matrix:
    dimension = acc.ambient_dimension
    if channel.shape != (dimension, dimension):
        raise FragmentException(
            f"Noise matrix must be {dimension}x{dimension}, got {channel.shape[0]}x{channel.shape[1]}!"
        )
    return matmul(
        acc.arith,
        matmul(acc.arith, transpose(acc.effect_inclusion), channel),
        acc.state_inclusion,
    )


def pairwise_probabilities(frag: GptFragment) -> Matrix:
    # Row j, column i is the probability of effect j on state i.
    return matmul(frag.arith, frag.effects, transpose(frag.states))


def noisy_targets(frag: GptFragment, r: Scalar, channel: Optional[Matrix] = None) -> Matrix:
    # Probabilities after mixing every state with its image under the noise
    # channel at rate r. Without a channel this is the noiseless table.
    clean = pairwise_probabilities(frag)
    if channel is None:
        return clean
    noisy = matmul(frag.arith, frag.effects, matmul(frag.arith, channel, transpose(frag.states)))
    return noisy * r + clean * (1 - r)


def unit_targets(frag: GptFragment, r: Scalar, channel: Optional[Matrix] = None) -> Matrix:
    # The same as noisy_targets, for the unit effect alone.
    clean = matmul(frag.arith, frag.states, frag.unit)
    if channel is None:
        return clean
    noisy = matmul(frag.arith, frag.states, matmul(frag.arith, transpose(channel), frag.unit))
    return noisy * r + clean * (1 - r)


def missing_complements(acc: AccessibleFragment) -> List[int]:
    # Effects e for which u - e is not in the cone of the fragment's effects.
    if not acc.unit_in_span:
        return []
    facets = acc.effect_facets
    return [
        j for j, effect in enumerate(acc.effects)
        if not cone_contains(acc.arith, facets, acc.unit - effect)
    ]
