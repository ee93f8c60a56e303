from nctest.numerics import Arithmetic, ArithmeticEnum, NumericsException
from nctest.quantum import HermitianOperator, HermitianBasis, QuantumException, dephasing_channel, hermitian_basis, quantum_to_gpt
from nctest.cone import ConeException, ConeGenerators, dual_rays, cone_contains
from nctest.fragment import (
    AccessibleFragment,
    FragmentException,
    GptFragment,
    MaxMixedSourceEnum,
    NoiseEnum,
    accessible,
    custom_noise_rule,
    depolarizing_rule,
    noisy_rule,
)
from nctest.lp import (
    EmbeddingCertificate,
    LinearProgram,
    LPException,
    LPResult,
    LPUnboundedException,
    RobustnessResult,
    RobustnessStatusEnum,
    check_classicality,
    robustness,
    solve_lp,
)
from nctest.embedding import (
    EmbeddingException,
    OntologicalModel,
    SimplexEmbedding,
    SimplicialConeEmbedding,
    embedding_from_certificate,
    ontological_model,
    to_simplex,
    verify_model,
)
from nctest.document import InputDocument, InputParseException, load_documents
from nctest.config import Config, ConfigException, RunOptions, resolve_options
from nctest.report import OutputReport, VerdictEnum
from nctest.pipeline import StageEnum, run_batch, run_document

__all__ = [
    "Arithmetic",
    "ArithmeticEnum",
    "NumericsException",
    "HermitianOperator",
    "HermitianBasis",
    "QuantumException",
    "dephasing_channel",
    "hermitian_basis",
    "quantum_to_gpt",
    "ConeException",
    "ConeGenerators",
    "dual_rays",
    "cone_contains",
    "AccessibleFragment",
    "FragmentException",
    "GptFragment",
    "MaxMixedSourceEnum",
    "NoiseEnum",
    "accessible",
    "custom_noise_rule",
    "depolarizing_rule",
    "noisy_rule",
    "EmbeddingCertificate",
    "LinearProgram",
    "LPException",
    "LPResult",
    "LPUnboundedException",
    "RobustnessResult",
    "RobustnessStatusEnum",
    "check_classicality",
    "robustness",
    "solve_lp",
    "EmbeddingException",
    "OntologicalModel",
    "SimplexEmbedding",
    "SimplicialConeEmbedding",
    "embedding_from_certificate",
    "ontological_model",
    "to_simplex",
    "verify_model",
    "InputDocument",
    "InputParseException",
    "load_documents",
    "Config",
    "ConfigException",
    "RunOptions",
    "resolve_options",
    "OutputReport",
    "VerdictEnum",
    "StageEnum",
    "run_batch",
    "run_document",
]
