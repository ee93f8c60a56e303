import multiprocessing
from enum import Enum
from functools import partial
from typing import List, Optional, Tuple

from nctest.config import RunOptions
from nctest.document import FormatEnum, InputDocument, InputParseException
from nctest.embedding import (
    EmbeddingException,
    SimplicialConeEmbedding,
    embedding_from_certificate,
    ontological_model,
    to_simplex,
    verify_model,
)
from nctest.fragment import (
    AccessibleFragment,
    GptFragment,
    MaxMixedSourceEnum,
    NoiseEnum,
    accessible,
    custom_noise_rule,
    depolarizing_channel,
    depolarizing_rule,
    max_mixed_state,
    missing_complements,
)
from nctest.log import log, warn
from nctest.lp import EmbeddingCertificate, check_classicality, robustness
from nctest.numerics import Arithmetic, ArithmeticEnum, Matrix, NumericsException, Scalar
from nctest.quantum import HermitianOperator, quantum_to_gpt
from nctest.report import Diagnostics, EmbeddingSection, ModelSection, OutputReport, VerdictEnum


class StageEnum(Enum):
    STAGE_CHECK = "check"
    STAGE_ROBUSTNESS = "robustness"
    STAGE_REPORT = "report"


class _Run:
    # Per-document state shared between the stages: where to log, and the
    # warnings collected so far for the diagnostics.

    def __init__(self, options: RunOptions, index: Optional[int] = None) -> None:
        self.options = options
        self.index = index
        self.warnings: List[str] = []

    def log(self, msg: str) -> None:
        if not self.options.quiet:
            log(msg, document=self.index)

    def warn(self, msg: str) -> None:
        warn(msg, document=self.index)
        self.warnings.append(msg)


def build_fragment(doc: InputDocument, options: RunOptions, run: Optional[_Run] = None) -> GptFragment:
    """
    Turn a parsed document into a GptFragment under the arithmetic the
    options ask for. Quantum input always runs in float arithmetic since its
    operator basis coordinates are irrational in general. GPT input defaults
    to exact arithmetic.
    """
    run = run or _Run(options)

    if doc.format == FormatEnum.FORMAT_QUANTUM:
        if doc.quantum is None:
            raise InputParseException("A quantum document needs the quantum payload!", ['quantum'])
        if options.arithmetic == ArithmeticEnum.ARITHMETIC_EXACT:
            run.warn("Exact arithmetic is not available for quantum input, using float arithmetic instead!")
        state_ops = [HermitianOperator(m, options.tolerance) for m in doc.quantum.complex_matrices(doc.quantum.states)]
        effect_ops = [HermitianOperator(m, options.tolerance) for m in doc.quantum.complex_matrices(doc.quantum.effects)]
        frag = quantum_to_gpt(state_ops, effect_ops, tolerance=options.tolerance, validate=options.validate)
    else:
        if doc.gpt is None:
            raise InputParseException("A gpt document needs the gpt payload!", ['gpt'])
        try:
            arith = Arithmetic(options.arithmetic or ArithmeticEnum.ARITHMETIC_EXACT, options.tolerance)
            dimension = doc.gpt.dimension
            states = arith.matrix(doc.gpt.states, cols=dimension)
            effects = arith.matrix(doc.gpt.effects, cols=dimension)
            unit = arith.vector(doc.gpt.unit_effect)
            max_mixed = None
            if doc.gpt.max_mixed_state is not None:
                max_mixed = arith.vector(doc.gpt.max_mixed_state)
        except NumericsException as e:
            raise InputParseException(str(e), ['gpt'])
        frag = GptFragment(arith, states, effects, unit, max_mixed)

    if options.max_mixed is not None:
        try:
            override = frag.arith.vector(options.max_mixed)
        except NumericsException as e:
            raise InputParseException(str(e), ['--max-mixed'])
        frag = GptFragment(
            frag.arith,
            frag.states,
            frag.effects,
            frag.unit,
            override,
            max_mixed_source=MaxMixedSourceEnum.SOURCE_OVERRIDE,
            dephasing=frag.dephasing,
        )
    return frag


def noise_for(
    frag: GptFragment,
    acc: AccessibleFragment,
    options: RunOptions,
) -> Tuple[Matrix, Matrix, Optional[MaxMixedSourceEnum]]:
    # Returns the ambient noise channel, its rule on the accessible spans and
    # where the maximally mixed state came from (depolarizing noise only).
    # Quantum input falls back to the uniform mixture of its states when
    # the identity over the dimension is outside of their span.
    if options.noise == NoiseEnum.NOISE_CUSTOM:
        if options.noise_matrix is None:
            raise InputParseException("Custom noise requires a noise matrix!", ['options', 'noise_matrix'])
        try:
            channel = frag.arith.matrix(options.noise_matrix)
        except NumericsException as e:
            raise InputParseException(str(e), ['options', 'noise_matrix'])
        return channel, custom_noise_rule(acc, channel), None

    if options.noise == NoiseEnum.NOISE_DEPHASING:
        if frag.dephasing is None:
            raise InputParseException("Dephasing noise is only defined for quantum input!", ['options', 'noise'])
        return frag.dephasing, custom_noise_rule(acc, frag.dephasing), None

    max_mixed, source = max_mixed_state(frag, acc)
    return depolarizing_channel(frag, max_mixed), depolarizing_rule(acc, frag, max_mixed), source


def _model(
    run: _Run,
    frag: GptFragment,
    acc: AccessibleFragment,
    cert: EmbeddingCertificate,
    channel: Optional[Matrix],
) -> Tuple[SimplicialConeEmbedding, ModelSection, Scalar]:
    arith = acc.arith
    cone = embedding_from_certificate(acc, cert)

    sce = cone
    if acc.unit_in_span:
        try:
            sce = to_simplex(arith, cone, acc.unit)
        except EmbeddingException as e:
            run.warn(f"Falling back to a simplicial-cone model, {e}")
    else:
        run.warn("Unit effect is outside of the effect span, reporting a simplicial-cone model!")

    try:
        model = ontological_model(sce, acc, cert.r)
    except EmbeddingException as e:
        if not sce.simplex:
            raise
        run.warn(f"Falling back to a simplicial-cone model, {e}")
        sce = cone
        model = ontological_model(sce, acc, cert.r)

    checked = verify_model(arith, model, frag, channel)
    if not checked.valid:
        raise EmbeddingException(f"Ontological model fails its own checks: {'; '.join(checked.violations)}!")

    section = ModelSection(
        ontic_count=model.ontic_count,
        epistemic_states=model.epistemic_states,
        response_functions=model.response_functions,
        simplex=model.simplex,
        noise=model.noise,
    )
    return sce, section, checked.max_residual


def run_document(
    doc: InputDocument,
    options: RunOptions,
    stage: StageEnum,
    index: Optional[int] = None,
) -> OutputReport:
    # The index only labels log lines, for documents that are part of a batch.
    run = _Run(options, index)

    run.log("Building fragment...")
    frag = build_fragment(doc, options, run)
    arith = frag.arith

    run.log(f"Computing accessible fragment of {frag.state_count} states and {frag.effect_count} effects...")
    acc = accessible(frag)
    run.warnings.extend(acc.warnings)

    run.log("Enumerating facets of the state and effect cones...")
    h_states = acc.state_facets
    h_effects = acc.effect_facets

    missing: List[int] = []
    if stage == StageEnum.STAGE_REPORT:
        missing = missing_complements(acc)
        if missing:
            run.warn(
                f"Effects {', '.join(str(j) for j in missing)} have no complement in the effect cone, "
                "a simplex embedding may not exist!"
            )

    diagnostics = Diagnostics(
        arithmetic=arith.mode.value,
        tolerance=arith.tolerance,
        ontic_bound={
            'state_facets': h_states.shape[0],
            'effect_facets': h_effects.shape[0],
            'support_bound': acc.state_dimension * acc.effect_dimension,
        },
        warnings=run.warnings,
        missing_complements=missing,
    )

    if stage == StageEnum.STAGE_CHECK:
        run.log("Solving classicality linear program...")
        cert = check_classicality(acc)
        if cert is None:
            return OutputReport(VerdictEnum.VERDICT_NONCLASSICAL, diagnostics)
        diagnostics.residuals['certificate'] = cert.residual
        return OutputReport(
            VerdictEnum.VERDICT_CLASSICAL,
            diagnostics,
            robustness=cert.r,
            sigma=cert.sigma,
        )

    channel, noise, source = noise_for(frag, acc, options)
    if source is not None:
        diagnostics.max_mixed_source = source.value
        if frag.max_mixed_source == MaxMixedSourceEnum.SOURCE_IDENTITY and source != frag.max_mixed_source:
            run.warn("Identity over the dimension is outside of the state span, depolarizing towards the uniform mixture of the states instead!")

    run.log(f"Minimizing {options.noise.value} noise robustness...")
    result = robustness(acc, noise)

    report = OutputReport(
        VerdictEnum.VERDICT_NONCLASSICAL,
        diagnostics,
        robustness_status=result.status.value,
    )
    if stage == StageEnum.STAGE_REPORT:
        report.inclusion = {'states': acc.state_inclusion, 'effects': acc.effect_inclusion}
        report.projection = {'states': acc.state_projection, 'effects': acc.effect_projection}
        report.h_states = h_states
        report.h_effects = h_effects

    cert = result.certificate
    if cert is None:
        run.warn("Even complete noise does not make the scenario classical!")
        return report

    report.robustness = cert.r
    report.sigma = cert.sigma
    if arith.is_zero(cert.r):
        report.verdict = VerdictEnum.VERDICT_CLASSICAL
    diagnostics.residuals['certificate'] = cert.residual
    diagnostics.ontic_bound['sigma_nonzero'] = cert.nonzero_count(arith)

    run.log("Building ontological model...")
    sce, model, residual = _model(run, frag, acc, cert, channel)
    report.model = model
    diagnostics.residuals['model'] = residual
    diagnostics.ontic_bound['ontic_count'] = model.ontic_count

    if stage == StageEnum.STAGE_REPORT:
        report.effective_rule = arith.clean(sce.product(arith))
        fragment_states, fragment_effects = sce.fragment_maps(arith, acc)
        report.embedding = EmbeddingSection(
            tau_states=sce.tau_states,
            tau_effects=sce.tau_effects,
            fragment_tau_states=fragment_states,
            fragment_tau_effects=fragment_effects,
            simplex=sce.simplex,
        )
    return report


def run_batch(
    docs: List[InputDocument],
    options: List[RunOptions],
    stage: StageEnum,
    jobs: int = 1,
) -> List[OutputReport]:
    # Documents are independent, results come back in input order.
    if len(docs) != len(options):
        raise Exception("Logic error, every document needs its own options!")
    if len(docs) <= 1:
        return [run_document(doc, opts, stage) for doc, opts in zip(docs, options)]
    if jobs <= 1:
        return [run_document(doc, opts, stage, i) for i, (doc, opts) in enumerate(zip(docs, options))]

    worker = partial(_run_indexed, stage=stage)
    with multiprocessing.Pool(min(jobs, len(docs))) as pool:
        return pool.map(worker, list(enumerate(zip(docs, options))))


def _run_indexed(item: Tuple[int, Tuple[InputDocument, RunOptions]], stage: StageEnum) -> OutputReport:
    index, (doc, options) = item
    return run_document(doc, options, stage, index)
