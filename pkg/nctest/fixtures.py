import math
from typing import Callable, Dict, List, Optional

from nctest.document import ComplexEntry, DocumentOptions, FormatEnum, GptPayload, InputDocument, QuantumPayload, RawScalar


# Worked examples with known answers, shipped so that the command line tool
# can be smoke tested without writing any input files.


def _gpt(
    states: List[List[RawScalar]],
    effects: List[List[RawScalar]],
    unit: List[RawScalar],
    max_mixed: Optional[List[RawScalar]] = None,
) -> InputDocument:
    return InputDocument(
        FormatEnum.FORMAT_GPT,
        gpt=GptPayload(states, effects, unit, max_mixed),
        options=DocumentOptions(),
    )


def _pad(row: List[RawScalar], dimension: int) -> List[RawScalar]:
    return [*row, *([0] * (dimension - len(row)))]


def qubit_axes_gpt() -> InputDocument:
    # Eigenstates of Z and X in the {1, X, Z} coordinates of the qubit, with
    # their projectors, the identity and the zero effect.
    return _gpt(
        [[1, 0, 1], [1, 0, -1], [1, 1, 0], [1, -1, 0]],
        [
            ["1/2", 0, "1/2"],
            ["1/2", 0, "-1/2"],
            ["1/2", "1/2", 0],
            ["1/2", "-1/2", 0],
            [1, 0, 0],
            [0, 0, 0],
        ],
        [1, 0, 0],
    )


def _projector(ket: List[complex]) -> List[List[ComplexEntry]]:
    return [[((a * b.conjugate()).real, (a * b.conjugate()).imag) for b in ket] for a in ket]


def qubit_axes_quantum() -> InputDocument:
    h = 1 / math.sqrt(2)
    kets: List[List[complex]] = [[1, 0], [0, 1], [h, h], [h, -h]]
    projectors = [_projector(ket) for ket in kets]
    return InputDocument(
        FormatEnum.FORMAT_QUANTUM,
        quantum=QuantumPayload(
            2,
            projectors,
            [*projectors, _diagonal([1.0, 1.0]), _diagonal([0.0, 0.0])],
        ),
        options=DocumentOptions(),
    )


# Rows in the basis {1, P0+P1-P2-P3, -P0+P1+P2-P3, P0-P1+P2-P3} of diagonal
# operators on a ququart, padded with zeros to the sixteen coordinates of the
# full operator space.
QUQUART_DIMENSION: int = 16


def ququart_diagonal_gpt() -> InputDocument:
    d = QUQUART_DIMENSION
    return _gpt(
        [
            _pad([1, 1, -1, 1], d),
            _pad([1, 1, 1, -1], d),
            _pad([1, -1, 1, 1], d),
            _pad([1, -1, -1, -1], d),
        ],
        [
            _pad(["1/2", "1/2", 0, 0], d),
            _pad(["1/2", 0, "1/2", 0], d),
            _pad(["1/2", "-1/2", 0, 0], d),
            _pad(["1/2", 0, "-1/2", 0], d),
            _pad([1], d),
            _pad([0], d),
        ],
        _pad([1], d),
    )


def _diagonal(values: List[float]) -> List[List[ComplexEntry]]:
    n = len(values)
    return [[(values[i] if i == j else 0.0, 0.0) for j in range(n)] for i in range(n)]


def ququart_diagonal_quantum() -> InputDocument:
    states = [_diagonal([1.0 if k == i else 0.0 for k in range(4)]) for i in range(4)]
    effects = [
        _diagonal([1.0, 1.0, 0.0, 0.0]),
        _diagonal([0.0, 1.0, 1.0, 0.0]),
        _diagonal([0.0, 0.0, 1.0, 1.0]),
        _diagonal([1.0, 0.0, 0.0, 1.0]),
        _diagonal([1.0, 1.0, 1.0, 1.0]),
        _diagonal([0.0, 0.0, 0.0, 0.0]),
    ]
    return InputDocument(
        FormatEnum.FORMAT_QUANTUM,
        quantum=QuantumPayload(4, states, effects),
        options=DocumentOptions(),
    )


def boxworld_gpt() -> InputDocument:
    # The gbit: a square state space with its four extremal effects.
    return _gpt(
        [[1, 1, 0], [1, 0, 1], [1, -1, 0], [1, 0, -1]],
        [
            ["1/2", "-1/2", "-1/2"],
            ["1/2", "1/2", "-1/2"],
            ["1/2", "1/2", "1/2"],
            ["1/2", "-1/2", "1/2"],
            [1, 0, 0],
            [0, 0, 0],
        ],
        [1, 0, 0],
        [1, 0, 0],
    )


FIXTURES: Dict[str, Callable[[], InputDocument]] = {
    'qubit_axes_gpt': qubit_axes_gpt,
    'qubit_axes_quantum': qubit_axes_quantum,
    'ququart_diagonal_gpt': ququart_diagonal_gpt,
    'ququart_diagonal_quantum': ququart_diagonal_quantum,
    'boxworld_gpt': boxworld_gpt,
}


# Known certificates and facet matrices, as rows of "p/q" strings or numbers.

QUBIT_AXES_SIGMA: List[List[RawScalar]] = [
    ["1/4" if i == j else 0 for j in range(4)] for i in range(4)
]

QUQUART_H_STATES: List[List[RawScalar]] = [
    [1, 1, 1, -1],
    [1, 1, -1, 1],
    [1, -1, 1, 1],
    [1, -1, -1, -1],
]

QUQUART_H_EFFECTS: List[List[RawScalar]] = [
    [1, 1, 1],
    [1, 1, -1],
    [1, -1, 1],
    [1, -1, -1],
]

BOXWORLD_H_EFFECTS: List[List[RawScalar]] = [
    [1, 0, 1],
    [1, 0, -1],
    [1, 1, 0],
    [1, -1, 0],
]

BOXWORLD_H_STATES: List[List[RawScalar]] = [
    [1, 1, 1],
    [1, 1, -1],
    [1, -1, 1],
    [1, -1, -1],
]

BOXWORLD_SIGMA: List[List[RawScalar]] = [
    ["1/8", 0, "1/8", 0],
    [0, "1/8", 0, "1/8"],
    ["1/8", "1/8", 0, 0],
    [0, 0, "1/8", "1/8"],
]

BOXWORLD_TARGET: List[List[RawScalar]] = [
    [1, 0, 0],
    [0, "1/2", 0],
    [0, 0, "1/2"],
]

BOXWORLD_ROBUSTNESS: str = "1/2"
