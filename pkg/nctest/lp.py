from enum import Enum
from typing import Dict, List, Optional

import numpy as np

from nctest.fragment import AccessibleFragment, noisy_rule
from nctest.numerics import (
    Arithmetic,
    Matrix,
    Scalar,
    matmul,
    max_abs,
    nonzero_count,
    rref,
    transpose,
)


class LPException(Exception):
    pass


class LPUnboundedException(LPException):
    pass


class LPStatusEnum(Enum):
    STATUS_OPTIMAL = "optimal"
    STATUS_INFEASIBLE = "infeasible"


class RobustnessStatusEnum(Enum):
    STATUS_SOLVED = "solved"
    STATUS_INFEASIBLE = "infeasible at r=1"


class LinearProgram:
    # minimize c . x subject to A x = b, x >= 0, and x_j <= upper_bounds[j]
    # for the variables that carry an upper bound.

    def __init__(
        self,
        arith: Arithmetic,
        objective: Matrix,
        constraints: Matrix,
        rhs: Matrix,
        upper_bounds: Optional[Dict[int, Scalar]] = None,
    ) -> None:
        if constraints.ndim != 2:
            raise LPException("Constraints must be given as a matrix!")
        rows, variables = constraints.shape
        if objective.shape != (variables,):
            raise LPException(f"Objective has {objective.shape[0]} entries but there are {variables} variables!")
        if rhs.shape != (rows,):
            raise LPException(f"Right hand side has {rhs.shape[0]} entries but there are {rows} constraints!")
        for var, bound in (upper_bounds or {}).items():
            if var < 0 or var >= variables:
                raise LPException(f"Upper bound given for nonexistent variable {var}!")
            if arith.is_negative(bound):
                raise LPException(f"Upper bound {bound} for variable {var} is negative!")

        self.arith = arith
        self.objective = objective
        self.constraints = constraints
        self.rhs = rhs
        self.upper_bounds: Dict[int, Scalar] = dict(upper_bounds or {})

    def __repr__(self) -> str:
        return (
            f"LinearProgram(variables={self.variable_count}, constraints={self.constraints.shape[0]}, "
            f"bounds={len(self.upper_bounds)})"
        )

    @property
    def variable_count(self) -> int:
        return self.constraints.shape[1]

    def standard_form(self) -> "LinearProgram":
        # Each upper bound x_j <= u becomes the row x_j + s = u with a fresh
        # slack s >= 0, appended after the original variables.
        if not self.upper_bounds:
            return self

        arith = self.arith
        rows, variables = self.constraints.shape
        bounded = sorted(self.upper_bounds)
        constraints = arith.zeros(rows + len(bounded), variables + len(bounded))
        constraints[:rows, :variables] = self.constraints
        rhs = np.concatenate([self.rhs, arith.vector([self.upper_bounds[v] for v in bounded])])
        for i, var in enumerate(bounded):
            constraints[rows + i, var] = arith.scalar(1)
            constraints[rows + i, variables + i] = arith.scalar(1)
        objective = np.concatenate([self.objective, arith.vector([0] * len(bounded))])
        return LinearProgram(arith, objective, constraints, rhs)


class LPResult:
    def __init__(
        self,
        status: LPStatusEnum,
        *,
        assignment: Optional[Matrix] = None,
        objective: Optional[Scalar] = None,
        farkas: Optional[Matrix] = None,
        basis: Optional[List[int]] = None,
    ) -> None:
        self.status = status
        self.assignment = assignment
        self.objective = objective
        # Over the standard form rows, so bound rows are included.
        self.farkas = farkas
        self.basis = basis or []

    def __repr__(self) -> str:
        return f"LPResult(status={self.status.value!r}, objective={self.objective!r})"

    @property
    def feasible(self) -> bool:
        return self.status == LPStatusEnum.STATUS_OPTIMAL


# Float tableaus are rebuilt from their original rows after this many pivots.
REFACTOR_INTERVAL = 32


class _Tableau:
    # Dense simplex tableau in canonical form with respect to the basis: the
    # basic columns form an identity matrix. The rows the tableau started from
    # are kept alongside, so a float tableau can be refactored from scratch
    # once rounding has built up.

    def __init__(self, arith: Arithmetic, body: Matrix, rhs: Matrix, basis: List[int]) -> None:
        self.arith = arith
        self.body = body
        self.rhs = rhs
        self.basis = basis
        self.origin_body = body.copy()
        self.origin_rhs = rhs.copy()
        self.pivots = 0

    def pivot(self, row: int, col: int) -> None:
        pivot = self.body[row, col]
        self.body[row] = self.body[row] / pivot
        self.rhs[row] = self.rhs[row] / pivot
        for i in range(self.body.shape[0]):
            if i == row:
                continue
            factor = self.body[i, col]
            if factor != 0:
                self.body[i] = self.body[i] - factor * self.body[row]
                self.rhs[i] = self.rhs[i] - factor * self.rhs[row]
        self.basis[row] = col
        self.pivots += 1
        if self.pivots % REFACTOR_INTERVAL == 0:
            self.refactor()

    def delete_row(self, row: int) -> None:
        self.body = np.delete(self.body, row, axis=0)
        self.rhs = np.delete(self.rhs, row, axis=0)
        self.origin_body = np.delete(self.origin_body, row, axis=0)
        self.origin_rhs = np.delete(self.origin_rhs, row, axis=0)
        del self.basis[row]

    def keep_columns(self, count: int) -> None:
        self.body = self.body[:, :count].copy()
        self.origin_body = self.origin_body[:, :count].copy()

    def refactor(self) -> None:
        # Recompute B^-1 [A | b] from the original rows. Exact tableaus never
        # drift, so this only touches float ones.
        if self.arith.exact or not self.basis:
            return
        try:
            solved = np.linalg.solve(
                self.origin_body[:, self.basis],
                np.column_stack([self.origin_body, self.origin_rhs]),
            )
        except np.linalg.LinAlgError:
            return
        self.body = solved[:, :-1]
        self.rhs = solved[:, -1]
        for i, var in enumerate(self.basis):
            self.body[:, var] = 0.0
            self.body[i, var] = 1.0

    def settle(self) -> None:
        """
        Refactor a float tableau and snap basic values that rounding pushed
        just below zero back onto zero. What counts as just below zero scales
        with the largest entry of the original rows. A basic value further
        below zero than that means the basis is not actually feasible.
        """
        if self.arith.exact:
            return
        self.refactor()
        scale = max(
            1.0,
            float(np.max(np.abs(self.origin_body), initial=0.0)),
            float(np.max(np.abs(self.origin_rhs), initial=0.0)),
        )
        threshold = self.arith.tolerance * scale
        for i, value in enumerate(self.rhs):
            if value < -threshold:
                raise LPException(f"Basic variable {self.basis[i]} is negative ({value}) after refactoring!")
            if value < 0.0:
                self.rhs[i] = 0.0

    def duals(self, cost: Matrix, columns: List[int]) -> Matrix:
        # y = c_B B^-1, read off the columns that started as the identity.
        return matmul(self.arith, cost[self.basis].reshape(1, -1), self.body[:, columns]).reshape(-1)

    def reduced_costs(self, cost: Matrix) -> Matrix:
        if not self.basis:
            return cost.copy()
        return cost - matmul(self.arith, cost[self.basis].reshape(1, -1), self.body).reshape(-1)

    def run(self, cost: Matrix, allowed: List[int]) -> bool:
        # Bland's rule: the lowest indexed improving column enters, and ratio
        # ties leave by lowest basic variable. Returns False when unbounded.
        arith = self.arith
        while True:
            reduced = self.reduced_costs(cost)
            basic = set(self.basis)
            entering = next(
                (j for j in allowed if j not in basic and arith.is_negative(reduced[j])),
                None,
            )
            if entering is None:
                return True

            leaving: Optional[int] = None
            best: Optional[Scalar] = None
            for i in range(self.body.shape[0]):
                coefficient = self.body[i, entering]
                if not arith.is_positive(coefficient):
                    continue
                # Rounding can leave a float basic value a hair below zero.
                level = self.rhs[i] if arith.exact else max(self.rhs[i], 0.0)
                ratio = level / coefficient
                if leaving is None or best is None:
                    leaving, best = i, ratio
                elif arith.equal(ratio, best):
                    if self.basis[i] < self.basis[leaving]:
                        leaving, best = i, ratio
                elif ratio < best:
                    leaving, best = i, ratio
            if leaving is None:
                return False
            self.pivot(leaving, entering)

    def value(self, count: int) -> Matrix:
        out = self.arith.vector([0] * count)
        for i, var in enumerate(self.basis):
            if var < count:
                out[var] = self.rhs[i]
        return out


def _independent_rows(arith: Arithmetic, constraints: Matrix, rhs: Matrix) -> List[int]:
    if constraints.shape[0] == 0:
        return []
    augmented = np.concatenate([constraints, rhs.reshape(-1, 1)], axis=1)
    _, pivots = rref(arith, transpose(augmented))
    return pivots


def solve_lp(lp: LinearProgram) -> LPResult:
    """
    Two-phase primal simplex with Bland's rule. Returns an optimal basic
    solution, or a Farkas certificate y with y . A <= 0 on every column and
    y . b > 0 when the constraints have no nonnegative solution. Raises
    LPUnboundedException when the objective is unbounded below.
    """
    arith = lp.arith
    standard = lp.standard_form()
    variables = standard.variable_count
    total_rows = standard.constraints.shape[0]

    # Flip rows so the right hand side is nonnegative, then drop rows that are
    # combinations of others.
    signs = [-1 if arith.is_negative(b) else 1 for b in standard.rhs]
    constraints = standard.constraints.copy()
    rhs = standard.rhs.copy()
    for i, sign in enumerate(signs):
        if sign < 0:
            constraints[i] = -constraints[i]
            rhs[i] = -rhs[i]
    kept = _independent_rows(arith, constraints, rhs)
    constraints = constraints[kept]
    rhs = rhs[kept]
    rows = len(kept)

    # Phase one, with one artificial variable per row starting in the basis.
    body = np.concatenate([constraints, arith.identity(rows)], axis=1)
    tableau = _Tableau(arith, body, rhs.copy(), [variables + i for i in range(rows)])
    artificial_cost = np.concatenate([arith.vector([0] * variables), arith.vector([1] * rows)])
    tableau.run(artificial_cost, list(range(variables + rows)))
    tableau.refactor()

    infeasibility = sum((tableau.rhs[i] for i, var in enumerate(tableau.basis) if var >= variables), arith.scalar(0))
    if arith.is_positive(infeasibility):
        duals = tableau.duals(artificial_cost, [variables + i for i in range(rows)])
        farkas = arith.vector([0] * total_rows)
        for position, row in enumerate(kept):
            farkas[row] = duals[position] * signs[row]
        return LPResult(LPStatusEnum.STATUS_INFEASIBLE, farkas=arith.clean(farkas))

    # Drive artificial variables out of the basis; a row with nothing left
    # to pivot on is redundant and goes away.
    row = 0
    while row < len(tableau.basis):
        if tableau.basis[row] < variables:
            row += 1
            continue
        candidates = [j for j in range(variables) if not arith.is_zero(tableau.body[row, j])]
        col: Optional[int] = None
        if candidates:
            # Float tableaus pivot on the largest entry on offer.
            col = candidates[0] if arith.exact else max(candidates, key=lambda j: abs(tableau.body[row, j]))
        if col is None:
            tableau.delete_row(row)
            continue
        tableau.pivot(row, col)
        row += 1

    # Phase two over the real variables only.
    tableau.keep_columns(variables)
    if not tableau.run(standard.objective, list(range(variables))):
        raise LPUnboundedException("Linear program objective is unbounded below!")
    tableau.settle()

    assignment = tableau.value(variables)
    original = assignment[:lp.variable_count].copy()
    return LPResult(
        LPStatusEnum.STATUS_OPTIMAL,
        assignment=original,
        objective=lp.objective @ original if lp.variable_count else arith.scalar(0),
        basis=sorted(var for var in tableau.basis if var < lp.variable_count),
    )


def verify_farkas(lp: LinearProgram, farkas: Matrix) -> bool:
    # True when y proves that the standard form constraints are infeasible.
    arith = lp.arith
    standard = lp.standard_form()
    if farkas.shape != (standard.constraints.shape[0],):
        return False
    combined = matmul(arith, farkas.reshape(1, -1), standard.constraints).reshape(-1)
    return all(not arith.is_positive(x) for x in combined) and arith.is_positive(farkas @ standard.rhs)


class EmbeddingCertificate:
    # A nonnegative sigma with H_E^T sigma H_S equal to the target rule, where
    # the target is the noisy rule at level r.

    def __init__(self, sigma: Matrix, r: Scalar, target: Matrix, residual: Scalar, basic: bool) -> None:
        self.sigma = sigma
        self.r = r
        self.target = target
        self.residual = residual
        self.basic = basic

    def __repr__(self) -> str:
        return f"EmbeddingCertificate(shape={self.sigma.shape}, r={self.r!r}, residual={self.residual!r})"

    def nonzero_count(self, arith: Arithmetic) -> int:
        return nonzero_count(arith, self.sigma)


class RobustnessResult:
    def __init__(
        self,
        status: RobustnessStatusEnum,
        certificate: Optional[EmbeddingCertificate] = None,
        farkas: Optional[Matrix] = None,
    ) -> None:
        self.status = status
        self.certificate = certificate
        self.farkas = farkas

    def __repr__(self) -> str:
        return f"RobustnessResult(status={self.status.value!r}, certificate={self.certificate!r})"

    @property
    def r(self) -> Optional[Scalar]:
        return None if self.certificate is None else self.certificate.r


def residual_tolerance(arith: Arithmetic) -> float:
    # Accumulated rounding across a solve is allowed a little more slack than
    # a single comparison.
    return 0.0 if arith.exact else 10 * arith.tolerance


def certificate_residual(
    arith: Arithmetic,
    effect_facets: Matrix,
    state_facets: Matrix,
    sigma: Matrix,
    target: Matrix,
) -> Scalar:
    if sigma.shape != (effect_facets.shape[0], state_facets.shape[0]):
        raise LPException(
            f"Certificate must be {effect_facets.shape[0]}x{state_facets.shape[0]}, "
            f"got {sigma.shape[0]}x{sigma.shape[1]}!"
        )
    product = matmul(arith, matmul(arith, transpose(effect_facets), sigma), state_facets)
    if product.shape != target.shape:
        raise LPException("Certificate product and target rule have different shapes!")
    return max_abs(product - target)


def verify_certificate(acc: AccessibleFragment, sigma: Matrix, target: Matrix) -> Scalar:
    """
    Check sigma against an accessible fragment's facets and return the
    largest deviation of H_E^T sigma H_S from the target rule. Raises when
    sigma has a negative entry or the deviation exceeds the residual
    tolerance.
    """
    arith = acc.arith
    if any(arith.is_negative(x) for x in sigma.flat):
        raise LPException("Certificate has a negative entry!")
    residual = certificate_residual(arith, acc.effect_facets, acc.state_facets, sigma, target)
    if residual > residual_tolerance(arith):
        raise LPException(f"Certificate fails verification with residual {residual}!")
    return residual


def _facet_products(arith: Arithmetic, effect_facets: Matrix, state_facets: Matrix) -> Matrix:
    # Column i * n + j holds the coefficients of sigma[i, j] in H_E^T sigma H_S,
    # flattened row-major over the rule's entries.
    m, effect_dimension = effect_facets.shape
    n, state_dimension = state_facets.shape
    if m == 0 or n == 0:
        return arith.zeros(effect_dimension * state_dimension, m * n)
    products = np.multiply.outer(transpose(effect_facets), transpose(state_facets))
    return products.transpose(0, 2, 1, 3).reshape(effect_dimension * state_dimension, m * n).copy()


def check_classicality(acc: AccessibleFragment) -> Optional[EmbeddingCertificate]:
    """
    Decide whether there is a nonnegative sigma with H_E^T sigma H_S = B.
    Returns the verified certificate when there is, or None.
    """
    arith = acc.arith
    m = acc.effect_facets.shape[0]
    n = acc.state_facets.shape[0]

    lp = LinearProgram(
        arith,
        arith.vector([0] * (m * n)),
        _facet_products(arith, acc.effect_facets, acc.state_facets),
        acc.rule.reshape(-1).copy(),
    )
    result = solve_lp(lp)
    if not result.feasible or result.assignment is None:
        return None

    sigma = result.assignment.reshape(m, n).copy()
    residual = verify_certificate(acc, sigma, acc.rule)
    return EmbeddingCertificate(sigma, arith.scalar(0), acc.rule, residual, basic=True)


def robustness(acc: AccessibleFragment, noise: Matrix) -> RobustnessResult:
    """
    Minimize r over [0, 1] subject to r N + (1 - r) B = H_E^T sigma H_S with
    sigma nonnegative, where N is the noise rule. When even r = 1 admits no
    sigma the result says so instead of carrying a certificate.
    """
    arith = acc.arith
    if noise.shape != acc.rule.shape:
        raise LPException(
            f"Noise rule has shape {noise.shape[0]}x{noise.shape[1]} but the probability rule "
            f"has shape {acc.rule.shape[0]}x{acc.rule.shape[1]}!"
        )
    m = acc.effect_facets.shape[0]
    n = acc.state_facets.shape[0]

    # H_E^T sigma H_S + r (B - N) = B, with r the last variable.
    constraints = np.concatenate(
        [
            _facet_products(arith, acc.effect_facets, acc.state_facets),
            (acc.rule - noise).reshape(-1, 1),
        ],
        axis=1,
    )
    objective = np.concatenate([arith.vector([0] * (m * n)), arith.vector([1])])
    lp = LinearProgram(arith, objective, constraints, acc.rule.reshape(-1).copy(), {m * n: 1})
    result = solve_lp(lp)
    if not result.feasible or result.assignment is None:
        return RobustnessResult(RobustnessStatusEnum.STATUS_INFEASIBLE, farkas=result.farkas)

    sigma = result.assignment[:m * n].reshape(m, n).copy()
    r = result.assignment[m * n]
    if not arith.exact:
        r = min(float(r), 1.0)
    target = noisy_rule(arith, acc.rule, noise, r)
    residual = verify_certificate(acc, sigma, target)
    return RobustnessResult(
        RobustnessStatusEnum.STATUS_SOLVED,
        EmbeddingCertificate(sigma, r, target, residual, basic=True),
    )
