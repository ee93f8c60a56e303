import json
from enum import Enum
from typing import Any, Dict, List, Optional

from nctest.numerics import Matrix, Scalar, format_scalar, to_jsonable


class VerdictEnum(Enum):
    VERDICT_CLASSICAL = "classical"
    VERDICT_NONCLASSICAL = "nonclassical"


class ModelSection:
    def __init__(
        self,
        *,
        ontic_count: int,
        epistemic_states: Matrix,
        response_functions: Matrix,
        simplex: bool,
        noise: Scalar,
    ) -> None:
        self.ontic_count = ontic_count
        self.epistemic_states = epistemic_states
        self.response_functions = response_functions
        self.simplex = simplex
        self.noise = noise

    def to_json(self) -> Dict[str, Any]:
        return {
            'ontic_count': self.ontic_count,
            'epistemic_states': to_jsonable(self.epistemic_states),
            'response_functions': to_jsonable(self.response_functions),
            'simplex': self.simplex,
            'noise': format_scalar(self.noise),
        }


class EmbeddingSection:
    # The embedding maps at both levels: acting on span coordinates, and
    # acting on raw fragment vectors.

    def __init__(
        self,
        *,
        tau_states: Matrix,
        tau_effects: Matrix,
        fragment_tau_states: Matrix,
        fragment_tau_effects: Matrix,
        simplex: bool,
    ) -> None:
        self.tau_states = tau_states
        self.tau_effects = tau_effects
        self.fragment_tau_states = fragment_tau_states
        self.fragment_tau_effects = fragment_tau_effects
        self.simplex = simplex

    def to_json(self) -> Dict[str, Any]:
        return {
            'accessible': {
                'tau_states': to_jsonable(self.tau_states),
                'tau_effects': to_jsonable(self.tau_effects),
            },
            'fragment': {
                'tau_states': to_jsonable(self.fragment_tau_states),
                'tau_effects': to_jsonable(self.fragment_tau_effects),
            },
            'simplex': self.simplex,
        }


class Diagnostics:
    def __init__(
        self,
        *,
        arithmetic: str,
        tolerance: float,
        max_mixed_source: Optional[str] = None,
        ontic_bound: Optional[Dict[str, int]] = None,
        residuals: Optional[Dict[str, Scalar]] = None,
        warnings: Optional[List[str]] = None,
        missing_complements: Optional[List[int]] = None,
    ) -> None:
        self.arithmetic = arithmetic
        self.tolerance = tolerance
        self.max_mixed_source = max_mixed_source
        self.ontic_bound = ontic_bound or {}
        self.residuals = residuals if residuals is not None else {}
        self.warnings = warnings if warnings is not None else []
        self.missing_complements = missing_complements or []

    def to_json(self) -> Dict[str, Any]:
        jsondict: Dict[str, Any] = {
            'arithmetic': self.arithmetic,
            'tolerance': self.tolerance,
            'residuals': {key: format_scalar(value) for key, value in self.residuals.items()},
            'warnings': list(self.warnings),
        }
        if self.max_mixed_source is not None:
            jsondict['max_mixed_source'] = self.max_mixed_source
        if self.ontic_bound:
            jsondict['ontic_bound'] = dict(self.ontic_bound)
        if self.missing_complements:
            jsondict['missing_complements'] = list(self.missing_complements)
        return jsondict


class OutputReport:
    # Everything one run of the pipeline learned about one document. Fields a
    # stage never reached stay None and are left out of the JSON.

    def __init__(
        self,
        verdict: VerdictEnum,
        diagnostics: Diagnostics,
        *,
        robustness: Optional[Scalar] = None,
        robustness_status: Optional[str] = None,
        sigma: Optional[Matrix] = None,
        inclusion: Optional[Dict[str, Matrix]] = None,
        projection: Optional[Dict[str, Matrix]] = None,
        h_states: Optional[Matrix] = None,
        h_effects: Optional[Matrix] = None,
        effective_rule: Optional[Matrix] = None,
        embedding: Optional[EmbeddingSection] = None,
        model: Optional[ModelSection] = None,
    ) -> None:
        self.verdict = verdict
        self.diagnostics = diagnostics
        self.robustness = robustness
        self.robustness_status = robustness_status
        self.sigma = sigma
        self.inclusion = inclusion
        self.projection = projection
        self.h_states = h_states
        self.h_effects = h_effects
        self.effective_rule = effective_rule
        self.embedding = embedding
        self.model = model

    @property
    def classical(self) -> bool:
        return self.verdict == VerdictEnum.VERDICT_CLASSICAL

    def to_json(self, *, quiet: bool = False) -> Dict[str, Any]:
        jsondict: Dict[str, Any] = {'verdict': self.verdict.value}
        if self.robustness is not None or self.robustness_status is not None:
            jsondict['robustness'] = None if self.robustness is None else format_scalar(self.robustness)
        if quiet:
            return jsondict

        if self.robustness_status is not None:
            jsondict['robustness_status'] = self.robustness_status
        if self.sigma is not None:
            jsondict['sigma'] = to_jsonable(self.sigma)
        if self.inclusion is not None:
            jsondict['inclusion'] = {key: to_jsonable(value) for key, value in self.inclusion.items()}
        if self.projection is not None:
            jsondict['projection'] = {key: to_jsonable(value) for key, value in self.projection.items()}
        if self.h_states is not None:
            jsondict['H_states'] = to_jsonable(self.h_states)
        if self.h_effects is not None:
            jsondict['H_effects'] = to_jsonable(self.h_effects)
        if self.effective_rule is not None:
            jsondict['effective_rule'] = to_jsonable(self.effective_rule)
        if self.embedding is not None:
            jsondict['embedding'] = self.embedding.to_json()
        if self.model is not None:
            jsondict['model'] = self.model.to_json()
        jsondict['diagnostics'] = self.diagnostics.to_json()
        return jsondict

    def __str__(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def __repr__(self) -> str:
        return f"OutputReport(verdict={self.verdict.value!r}, robustness={self.robustness!r})"
