import math
import threading
from typing import Any, List, Optional, Sequence

import numpy as np
from cachetools import LRUCache, cached

from nctest.fragment import GptFragment, MaxMixedSourceEnum
from nctest.numerics import DEFAULT_TOLERANCE, Arithmetic, ArithmeticEnum, Matrix


class QuantumException(Exception):
    pass


class HermitianOperator:
    # A d x d complex matrix equal to its conjugate transpose within tolerance.

    def __init__(self, entries: Any, tolerance: float = DEFAULT_TOLERANCE) -> None:
        matrix = np.array(entries, dtype=np.complex128)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise QuantumException(f"Operator must be a square matrix, got shape {matrix.shape}!")
        if matrix.shape[0] == 0:
            raise QuantumException("Operator must act on a space of dimension at least 1!")

        deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
        if deviation > tolerance:
            raise QuantumException(f"Operator is not Hermitian, deviation {deviation} exceeds {tolerance}!")

        self.matrix = (matrix + matrix.conj().T) / 2
        self.matrix.flags.writeable = False

    def __repr__(self) -> str:
        return f"HermitianOperator(dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


class HermitianBasis:
    # An orthonormal basis of the d*d dimensional real space of Hermitian
    # operators under the trace inner product, with the identity direction
    # first so the first coordinate of a state is its trace over sqrt(d).

    def __init__(self, dim: int, elements: Sequence[Any], tolerance: float = DEFAULT_TOLERANCE) -> None:
        if dim < 1:
            raise QuantumException(f"Hilbert space dimension must be at least 1, got {dim}!")
        if len(elements) != dim * dim:
            raise QuantumException(f"A basis for dimension {dim} needs {dim * dim} elements, got {len(elements)}!")

        stack = np.stack([HermitianOperator(e, tolerance).matrix for e in elements])
        if stack.shape[1:] != (dim, dim):
            raise QuantumException(f"Basis elements must all be {dim}x{dim}!")

        gram = np.einsum("aij,bji->ab", stack, stack)
        if float(np.max(np.abs(gram - np.eye(dim * dim)))) > tolerance:
            raise QuantumException("Basis elements are not orthonormal under the trace inner product!")
        identity_overlap = np.trace(stack[0]).real / math.sqrt(dim)
        if abs(abs(identity_overlap) - 1.0) > tolerance:
            raise QuantumException("First basis element must be proportional to the identity!")

        self.dim = dim
        self.elements = stack
        self.elements.flags.writeable = False

    def __repr__(self) -> str:
        return f"HermitianBasis(dim={self.dim})"

    def __len__(self) -> int:
        return self.elements.shape[0]


@cached(cache=LRUCache(maxsize=16), lock=threading.Lock())
def hermitian_basis(dim: int) -> HermitianBasis:
    """
    The generalized Gell-Mann basis normalized to unit trace norm, ordered as
    the identity, then the symmetric off-diagonal elements, then the
    antisymmetric off-diagonal elements, then the diagonal elements. For a
    qubit this is {I, X, Y, Z} / sqrt(2).
    """
    if dim < 1:
        raise QuantumException(f"Hilbert space dimension must be at least 1, got {dim}!")

    elements: List[np.ndarray] = [np.eye(dim, dtype=np.complex128) / math.sqrt(dim)]
    pairs = [(j, k) for j in range(dim) for k in range(j + 1, dim)]
    for j, k in pairs:
        element = np.zeros((dim, dim), dtype=np.complex128)
        element[j, k] = 1.0
        element[k, j] = 1.0
        elements.append(element / math.sqrt(2))
    for j, k in pairs:
        element = np.zeros((dim, dim), dtype=np.complex128)
        element[j, k] = -1.0j
        element[k, j] = 1.0j
        elements.append(element / math.sqrt(2))
    for level in range(1, dim):
        element = np.zeros((dim, dim), dtype=np.complex128)
        for j in range(level):
            element[j, j] = 1.0
        element[level, level] = -level
        elements.append(element / math.sqrt(level * (level + 1)))

    return HermitianBasis(dim, elements)


def dephasing_channel(basis: HermitianBasis, tolerance: float = DEFAULT_TOLERANCE) -> Matrix:
    """
    The completely dephasing channel, which drops every off-diagonal entry
    in the computational basis, written as a matrix on basis coordinates:
    entry (a, b) is tr(G_a diag(G_b)).
    """
    diagonals = np.stack([np.diag(np.diag(element)) for element in basis.elements])
    channel = np.einsum("aij,bji->ab", basis.elements, diagonals)
    if float(np.max(np.abs(channel.imag))) > tolerance:
        raise QuantumException("Dephasing channel has complex coordinates, the basis is not Hermitian!")
    return np.array(channel.real, dtype=np.float64)


def _real(value: complex, tolerance: float, what: str) -> float:
    if abs(value.imag) > tolerance:
        raise QuantumException(f"{what} has imaginary part {value.imag}, the operator is not Hermitian!")
    return float(value.real)


def to_vector(op: HermitianOperator, basis: HermitianBasis, tolerance: float = DEFAULT_TOLERANCE) -> Matrix:
    if op.dim != basis.dim:
        raise QuantumException(f"Cannot expand a {op.dim}x{op.dim} operator in a basis for dimension {basis.dim}!")
    coordinates = np.einsum("kij,ji->k", basis.elements, op.matrix)
    return np.array([_real(c, tolerance, "Coordinate") for c in coordinates], dtype=np.float64)


def from_vector(vec: Matrix, basis: HermitianBasis) -> HermitianOperator:
    if vec.shape != (len(basis),):
        raise QuantumException(f"Expected {len(basis)} coordinates, got {vec.shape[0]}!")
    return HermitianOperator(np.einsum("k,kij->ij", vec.astype(np.float64), basis.elements))


def born(state: HermitianOperator, effect: HermitianOperator, tolerance: float = DEFAULT_TOLERANCE) -> float:
    if state.dim != effect.dim:
        raise QuantumException(f"Cannot pair a {state.dim}x{state.dim} state with a {effect.dim}x{effect.dim} effect!")
    return _real(complex(np.trace(state.matrix @ effect.matrix)), tolerance, "Probability")


def _validate_state(i: int, state: HermitianOperator, tolerance: float) -> None:
    smallest = float(np.min(np.linalg.eigvalsh(state.matrix)))
    if smallest < -tolerance:
        raise QuantumException(f"State {i} is not positive semidefinite, it has eigenvalue {smallest}!")
    trace = float(np.trace(state.matrix).real)
    if not (tolerance < trace <= 1.0 + tolerance):
        raise QuantumException(f"State {i} has trace {trace}, which is outside of (0, 1]!")


def _validate_effect(j: int, effect: HermitianOperator, tolerance: float) -> None:
    eigenvalues = np.linalg.eigvalsh(effect.matrix)
    smallest = float(np.min(eigenvalues))
    largest = float(np.max(eigenvalues))
    if smallest < -tolerance:
        raise QuantumException(f"Effect {j} is not positive semidefinite, it has eigenvalue {smallest}!")
    if largest > 1.0 + tolerance:
        raise QuantumException(f"Effect {j} exceeds the identity, it has eigenvalue {largest}!")


def quantum_to_gpt(
    states: Sequence[HermitianOperator],
    effects: Sequence[HermitianOperator],
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    validate: bool = True,
    basis: Optional[HermitianBasis] = None,
) -> GptFragment:
    """
    Convert density matrices and POVM elements to a float GptFragment in the
    coordinates of an orthonormal Hermitian basis, so that trace pairings
    become dot products. The unit effect is the image of the identity and
    the maximally mixed state the image of the identity over d. The
    fragment also carries the dephasing channel in the same coordinates.
    """
    if not states:
        raise QuantumException("A quantum fragment needs at least one state!")
    if not effects:
        raise QuantumException("A quantum fragment needs at least one effect!")

    dim = states[0].dim
    for i, state in enumerate(states):
        if state.dim != dim:
            raise QuantumException(f"State {i} has dimension {state.dim}, expected {dim}!")
    for j, effect in enumerate(effects):
        if effect.dim != dim:
            raise QuantumException(f"Effect {j} has dimension {effect.dim}, expected {dim}!")

    if validate:
        for i, state in enumerate(states):
            _validate_state(i, state, tolerance)
        for j, effect in enumerate(effects):
            _validate_effect(j, effect, tolerance)

    if basis is None:
        basis = hermitian_basis(dim)
    elif basis.dim != dim:
        raise QuantumException(f"Basis is for dimension {basis.dim}, operators have dimension {dim}!")

    identity = HermitianOperator(np.eye(dim))
    arith = Arithmetic(ArithmeticEnum.ARITHMETIC_FLOAT, tolerance)
    return GptFragment(
        arith,
        arith.clean(np.stack([to_vector(s, basis, tolerance) for s in states])),
        arith.clean(np.stack([to_vector(e, basis, tolerance) for e in effects])),
        arith.clean(to_vector(identity, basis, tolerance)),
        arith.clean(to_vector(identity, basis, tolerance) / dim),
        max_mixed_source=MaxMixedSourceEnum.SOURCE_IDENTITY,
        dephasing=arith.clean(dephasing_channel(basis, tolerance)),
    )
