import json
import numbers
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

from nctest.fragment import NoiseEnum
from nctest.numerics import ArithmeticEnum


# A raw GPT entry as it appeared in the document, a JSON number or a "p/q" string.
RawScalar = Union[int, float, str]


class InputParseException(Exception):
    def __init__(self, msg: str, context: List[str]) -> None:
        super().__init__(msg)
        self.context = context

    def __str__(self) -> str:
        location = ".".join(self.context)
        msg = super().__str__()
        return f"{location}: {msg}" if location else msg


class FormatEnum(Enum):
    FORMAT_QUANTUM = "quantum"
    FORMAT_GPT = "gpt"


def _enum_value(enumcls: Any, value: Any, key: str, context: List[str]) -> Any:
    if not isinstance(value, str):
        raise InputParseException(f"\"{key}\" key in JSON has invalid data \"{value}\"!", context)
    for member in enumcls:
        if member.value == value:
            return member
    choices = ", ".join(member.value for member in enumcls)
    raise InputParseException(f"\"{key}\" key in JSON has invalid data \"{value}\", expected one of {choices}!", context)


def _raw_scalar(value: Any, context: List[str]) -> RawScalar:
    if isinstance(value, bool) or not isinstance(value, (numbers.Real, str)):
        raise InputParseException(f"Entry has invalid data \"{value}\", expected a number or a \"p/q\" string!", context)
    if isinstance(value, str):
        try:
            Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputParseException(f"Entry has invalid data \"{value}\", expected a \"p/q\" string!", context)
    return value


def _raw_row(value: Any, key: str, context: List[str]) -> List[RawScalar]:
    if not isinstance(value, list):
        raise InputParseException(f"\"{key}\" key in JSON has invalid data \"{value}\", expected a list!", context)
    return [_raw_scalar(entry, [*context, str(i)]) for i, entry in enumerate(value)]


def _raw_rows(value: Any, key: str, context: List[str]) -> List[List[RawScalar]]:
    if not isinstance(value, list):
        raise InputParseException(f"\"{key}\" key in JSON has invalid data \"{value}\", expected a list of rows!", context)
    if not value:
        raise InputParseException(f"\"{key}\" key in JSON must not be empty!", context)
    rows = [_raw_row(row, str(i), [*context, str(i)]) for i, row in enumerate(value)]
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise InputParseException(
                f"Row has {len(row)} entries but the first row has {width} entries!", [*context, str(i)]
            )
    return rows


class DocumentOptions:
    # Per-document overrides. Anything left as None falls through to the
    # environment, the config file and the defaults, in that order.

    def __init__(
        self,
        *,
        arithmetic: Optional[ArithmeticEnum] = None,
        tolerance: Optional[float] = None,
        noise: Optional[NoiseEnum] = None,
        noise_matrix: Optional[List[List[RawScalar]]] = None,
    ) -> None:
        self.arithmetic = arithmetic
        self.tolerance = tolerance
        self.noise = noise
        self.noise_matrix = noise_matrix

    @staticmethod
    def from_json(jsondict: Any, context: List[str]) -> "DocumentOptions":
        if jsondict is None:
            return DocumentOptions()
        if not isinstance(jsondict, dict):
            raise InputParseException(f"\"options\" key in JSON has invalid data \"{jsondict}\"!", context)

        arithmetic = None
        if jsondict.get('arithmetic') is not None:
            arithmetic = _enum_value(ArithmeticEnum, jsondict['arithmetic'], 'arithmetic', context)

        tolerance = jsondict.get('tolerance')
        if tolerance is not None:
            if isinstance(tolerance, bool) or not isinstance(tolerance, numbers.Real) or not (tolerance > 0):
                raise InputParseException(f"\"tolerance\" key in JSON has invalid data \"{tolerance}\"!", context)
            tolerance = float(tolerance)

        noise = None
        if jsondict.get('noise') is not None:
            noise = _enum_value(NoiseEnum, jsondict['noise'], 'noise', context)

        noise_matrix = None
        if jsondict.get('noise_matrix') is not None:
            noise_matrix = _raw_rows(jsondict['noise_matrix'], 'noise_matrix', [*context, 'noise_matrix'])

        return DocumentOptions(arithmetic=arithmetic, tolerance=tolerance, noise=noise, noise_matrix=noise_matrix)

    def to_json(self) -> Dict[str, Any]:
        jsondict: Dict[str, Any] = {}
        if self.arithmetic is not None:
            jsondict['arithmetic'] = self.arithmetic.value
        if self.tolerance is not None:
            jsondict['tolerance'] = self.tolerance
        if self.noise is not None:
            jsondict['noise'] = self.noise.value
        if self.noise_matrix is not None:
            jsondict['noise_matrix'] = self.noise_matrix
        return jsondict


# One complex matrix entry, stored as (re, im).
ComplexEntry = Tuple[float, float]


def _complex_entry(value: Any, context: List[str]) -> ComplexEntry:
    if isinstance(value, bool):
        raise InputParseException(f"Entry has invalid data \"{value}\", expected [re, im]!", context)
    if isinstance(value, numbers.Real):
        return (float(value), 0.0)
    if (
        isinstance(value, list) and len(value) == 2 and
        all(isinstance(part, numbers.Real) and not isinstance(part, bool) for part in value)
    ):
        return (float(value[0]), float(value[1]))
    raise InputParseException(f"Entry has invalid data \"{value}\", expected [re, im]!", context)


def _operators(value: Any, key: str, dimension: int, context: List[str]) -> List[List[List[ComplexEntry]]]:
    if not isinstance(value, list):
        raise InputParseException(f"\"{key}\" key in JSON has invalid data \"{value}\", expected a list of matrices!", context)
    if not value:
        raise InputParseException(f"\"{key}\" key in JSON must not be empty!", context)

    operators: List[List[List[ComplexEntry]]] = []
    for i, matrix in enumerate(value):
        where = [*context, str(i)]
        if not isinstance(matrix, list) or len(matrix) != dimension:
            raise InputParseException(f"Operator is not a {dimension}x{dimension} matrix!", where)
        rows: List[List[ComplexEntry]] = []
        for j, row in enumerate(matrix):
            if not isinstance(row, list) or len(row) != dimension:
                raise InputParseException(f"Operator is not a {dimension}x{dimension} matrix!", [*where, str(j)])
            rows.append([_complex_entry(entry, [*where, str(j), str(k)]) for k, entry in enumerate(row)])
        operators.append(rows)
    return operators


class QuantumPayload:
    def __init__(
        self,
        dimension: int,
        states: List[List[List[ComplexEntry]]],
        effects: List[List[List[ComplexEntry]]],
    ) -> None:
        self.dimension = dimension
        self.states = states
        self.effects = effects

    @staticmethod
    def from_json(jsondict: Any, context: List[str]) -> "QuantumPayload":
        if not isinstance(jsondict, dict):
            raise InputParseException(f"\"quantum\" key in JSON has invalid data \"{jsondict}\"!", context)

        dimension = jsondict.get('dimension')
        if isinstance(dimension, bool) or not isinstance(dimension, int) or dimension < 1:
            raise InputParseException(f"\"dimension\" key in JSON has invalid data \"{dimension}\"!", context)

        states = _operators(jsondict.get('states'), 'states', dimension, [*context, 'states'])
        effects = _operators(jsondict.get('effects'), 'effects', dimension, [*context, 'effects'])
        return QuantumPayload(dimension, states, effects)

    def complex_matrices(self, operators: List[List[List[ComplexEntry]]]) -> List[List[List[complex]]]:
        return [[[complex(re, im) for (re, im) in row] for row in op] for op in operators]

    def to_json(self) -> Dict[str, Any]:
        def encode(operators: List[List[List[ComplexEntry]]]) -> List[Any]:
            return [[[[re, im] for (re, im) in row] for row in op] for op in operators]

        return {
            'dimension': self.dimension,
            'states': encode(self.states),
            'effects': encode(self.effects),
        }


class GptPayload:
    def __init__(
        self,
        states: List[List[RawScalar]],
        effects: List[List[RawScalar]],
        unit_effect: List[RawScalar],
        max_mixed_state: Optional[List[RawScalar]] = None,
    ) -> None:
        self.states = states
        self.effects = effects
        self.unit_effect = unit_effect
        self.max_mixed_state = max_mixed_state

    @property
    def dimension(self) -> int:
        return len(self.states[0])

    @staticmethod
    def from_json(jsondict: Any, context: List[str]) -> "GptPayload":
        if not isinstance(jsondict, dict):
            raise InputParseException(f"\"gpt\" key in JSON has invalid data \"{jsondict}\"!", context)

        states = _raw_rows(jsondict.get('states'), 'states', [*context, 'states'])
        effects = _raw_rows(jsondict.get('effects'), 'effects', [*context, 'effects'])
        unit_effect = _raw_row(jsondict.get('unit_effect'), 'unit_effect', [*context, 'unit_effect'])

        dimension = len(states[0])
        if dimension == 0:
            raise InputParseException("States must have at least one coordinate!", [*context, 'states'])
        if len(effects[0]) != dimension:
            raise InputParseException(
                f"Effects have {len(effects[0])} coordinates but states have {dimension}!", [*context, 'effects']
            )
        if len(unit_effect) != dimension:
            raise InputParseException(
                f"Unit effect has {len(unit_effect)} coordinates but states have {dimension}!",
                [*context, 'unit_effect'],
            )

        max_mixed_state = None
        if jsondict.get('max_mixed_state') is not None:
            max_mixed_state = _raw_row(jsondict['max_mixed_state'], 'max_mixed_state', [*context, 'max_mixed_state'])
            if len(max_mixed_state) != dimension:
                raise InputParseException(
                    f"Maximally mixed state has {len(max_mixed_state)} coordinates but states have {dimension}!",
                    [*context, 'max_mixed_state'],
                )

        return GptPayload(states, effects, unit_effect, max_mixed_state)

    def to_json(self) -> Dict[str, Any]:
        jsondict: Dict[str, Any] = {
            'states': self.states,
            'effects': self.effects,
            'unit_effect': self.unit_effect,
        }
        if self.max_mixed_state is not None:
            jsondict['max_mixed_state'] = self.max_mixed_state
        return jsondict


class InputDocument:
    def __init__(
        self,
        fmt: FormatEnum,
        *,
        quantum: Optional[QuantumPayload] = None,
        gpt: Optional[GptPayload] = None,
        options: Optional[DocumentOptions] = None,
    ) -> None:
        if fmt == FormatEnum.FORMAT_QUANTUM and (quantum is None or gpt is not None):
            raise InputParseException("A quantum document needs exactly the quantum payload!", [])
        if fmt == FormatEnum.FORMAT_GPT and (gpt is None or quantum is not None):
            raise InputParseException("A gpt document needs exactly the gpt payload!", [])
        self.format = fmt
        self.quantum = quantum
        self.gpt = gpt
        self.options = options or DocumentOptions()

    @staticmethod
    def from_json(jsondict: Any, context: List[str]) -> "InputDocument":
        if not isinstance(jsondict, dict):
            raise InputParseException(f"Document has invalid data \"{jsondict}\", expected an object!", context)

        fmt = _enum_value(FormatEnum, jsondict.get('format'), 'format', context)
        options = DocumentOptions.from_json(jsondict.get('options'), [*context, 'options'])

        if fmt == FormatEnum.FORMAT_QUANTUM:
            if jsondict.get('gpt') is not None:
                raise InputParseException("A quantum document must not carry a \"gpt\" payload!", context)
            quantum = QuantumPayload.from_json(jsondict.get('quantum'), [*context, 'quantum'])
            return InputDocument(fmt, quantum=quantum, options=options)

        if jsondict.get('quantum') is not None:
            raise InputParseException("A gpt document must not carry a \"quantum\" payload!", context)
        gpt = GptPayload.from_json(jsondict.get('gpt'), [*context, 'gpt'])
        return InputDocument(fmt, gpt=gpt, options=options)

    def to_json(self) -> Dict[str, Any]:
        jsondict: Dict[str, Any] = {'format': self.format.value}
        if self.quantum is not None:
            jsondict['quantum'] = self.quantum.to_json()
        if self.gpt is not None:
            jsondict['gpt'] = self.gpt.to_json()
        options = self.options.to_json()
        if options:
            jsondict['options'] = options
        return jsondict

    def __str__(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def __repr__(self) -> str:
        return str(self)


def load_documents(data: str) -> Tuple[List[InputDocument], bool]:
    """
    Parse the contents of an input file. A single JSON object is one
    document, a JSON list is a batch. Returns the documents and whether the
    input was a batch, so the output can take the same shape.
    """
    try:
        jsondata = json.loads(data)
    except json.JSONDecodeError as e:
        raise InputParseException(f"Input is not valid JSON: {e.msg} at line {e.lineno} column {e.colno}!", [])

    if isinstance(jsondata, list):
        if not jsondata:
            raise InputParseException("Batch input must contain at least one document!", [])
        return [InputDocument.from_json(doc, [str(i)]) for i, doc in enumerate(jsondata)], True
    return [InputDocument.from_json(jsondata, [])], False
