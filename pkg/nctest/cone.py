import math
from fractions import Fraction
from functools import reduce
from typing import FrozenSet, List, Optional, Tuple

import numpy as np

from nctest.numerics import Arithmetic, Matrix, inverse, matmul, rank


class ConeException(Exception):
    pass


class ConeGenerators:
    # A finite generating set for a polyhedral cone in R^k, one generator per
    # row. Zero rows are dropped on construction and the survivors must span
    # the whole space, which upstream guarantees by working in span coordinates.

    def __init__(self, arith: Arithmetic, rows: Matrix) -> None:
        if rows.ndim != 2:
            raise ConeException("Cone generators must be given as the rows of a matrix!")

        self.dimension = rows.shape[1]
        kept = [row for row in rows if any(not arith.is_zero(x) for x in row)]
        if not kept:
            raise ConeException("Cannot compute the dual of a cone with no nonzero generators!")

        self.rows = np.stack(kept)
        if rank(arith, self.rows) != self.dimension:
            raise ConeException(
                f"Cone generators span a {rank(arith, self.rows)}-dimensional subspace of "
                f"R^{self.dimension}, so the dual cone has no extreme rays!"
            )

    def __repr__(self) -> str:
        return f"ConeGenerators(dimension={self.dimension}, count={self.count})"

    @property
    def count(self) -> int:
        return self.rows.shape[0]


# A ray of the cone under construction, along with the indices of the
# generator inequalities it satisfies with equality.
_Ray = Tuple[Matrix, FrozenSet[int]]


def _normalize(arith: Arithmetic, vec: Matrix) -> Optional[Matrix]:
    if all(arith.is_zero(x) for x in vec):
        return None

    if arith.exact:
        # Scale by a positive rational to the primitive integer vector.
        denominators = [x.denominator for x in vec if x != 0]
        numerators = [abs(x.numerator) for x in vec if x != 0]
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), denominators, 1)
        gcd = reduce(math.gcd, numerators)
        return vec * Fraction(lcm, gcd)

    out = vec / np.linalg.norm(vec)
    out[np.abs(out) <= arith.tolerance] = 0.0
    return out


def _sort_key(vec: Matrix) -> Tuple[float, ...]:
    return tuple(vec.tolist())


def _initial_basis(arith: Arithmetic, rows: List[Matrix], dimension: int) -> List[int]:
    basis: List[int] = []
    for i, row in enumerate(rows):
        candidate = np.stack([rows[j] for j in basis] + [row])
        if rank(arith, candidate) == len(basis) + 1:
            basis.append(i)
            if len(basis) == dimension:
                break
    if len(basis) != dimension:
        raise ConeException("Cone generators do not span the ambient space!")
    return basis


def _adjacent(
    arith: Arithmetic,
    rows: List[Matrix],
    dimension: int,
    rays: List[_Ray],
    first: int,
    second: int,
) -> bool:
    common = rays[first][1] & rays[second][1]
    if len(common) < dimension - 2:
        return False

    combinatorial = not any(
        common <= zeros
        for i, (_, zeros) in enumerate(rays)
        if i != first and i != second
    )

    if arith.exact:
        if common:
            tight = rank(arith, np.stack([rows[i] for i in sorted(common)]))
        else:
            tight = 0
        if combinatorial != (tight == dimension - 2):
            raise ConeException("Combinatorial and algebraic adjacency tests disagree!")

    return combinatorial


def _insert(
    arith: Arithmetic,
    rows: List[Matrix],
    dimension: int,
    rays: List[_Ray],
    index: int,
) -> List[_Ray]:
    # Intersect the current cone with the half-space row . h >= 0.
    row = rows[index]
    values = [row @ vec for vec, _ in rays]

    positive = [i for i, v in enumerate(values) if arith.is_positive(v)]
    negative = [i for i, v in enumerate(values) if arith.is_negative(v)]

    updated: List[_Ray] = []
    for i, (vec, zeros) in enumerate(rays):
        if i in positive:
            updated.append((vec, zeros))
        elif i not in negative:
            updated.append((vec, zeros | {index}))

    for p in positive:
        for n in negative:
            if not _adjacent(arith, rows, dimension, rays, p, n):
                continue
            combined = _normalize(arith, values[p] * rays[n][0] - values[n] * rays[p][0])
            if combined is None:
                continue
            updated.append((combined, (rays[p][1] & rays[n][1]) | {index}))

    return updated


def dual_rays(arith: Arithmetic, gens: ConeGenerators) -> Matrix:
    """
    Compute the extreme rays of the dual cone {h : h . g >= 0 for every
    generator g} using the double description method. The result has one
    normalized ray per row, sorted in descending lexicographic order. In
    exact mode every ray is a primitive integer vector, in float mode a unit
    vector. A cone equal to the whole space returns a matrix with no rows.
    """
    dimension = gens.dimension
    rows = sorted(gens.rows, key=_sort_key)
    basis = _initial_basis(arith, rows, dimension)

    # The simplicial cone of the initial generators is spanned by the columns
    # of the inverse of their matrix.
    inv = inverse(arith, np.stack([rows[i] for i in basis]))
    rays: List[_Ray] = []
    for j in range(dimension):
        vec = _normalize(arith, inv[:, j].copy())
        if vec is None:
            raise ConeException("Initial simplicial cone is degenerate!")
        rays.append((vec, frozenset(basis[i] for i in range(dimension) if i != j)))

    inserted = set(basis)
    for index in range(len(rows)):
        if index in inserted:
            continue
        rays = _insert(arith, rows, dimension, rays, index)
        inserted.add(index)

    vectors: List[Matrix] = []
    for vec, _ in rays:
        if arith.exact:
            if any((vec == other).all() for other in vectors):
                continue
        elif any(np.max(np.abs(vec - other)) <= arith.tolerance for other in vectors):
            continue
        vectors.append(vec)

    vectors.sort(key=_sort_key, reverse=True)
    if not vectors:
        return arith.zeros(0, dimension)
    return arith.matrix(vectors, cols=dimension)


def cone_contains(arith: Arithmetic, facets: Matrix, v: Matrix) -> bool:
    if facets.shape[1] != v.shape[0]:
        raise ConeException(
            f"Cannot test a vector of length {v.shape[0]} against facets of a cone in R^{facets.shape[1]}!"
        )
    return all(arith.is_nonnegative(x) for x in matmul(arith, facets, v))
