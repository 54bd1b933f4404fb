"""Statutes as analyzable programs.

A small tax-code excerpt is parsed into a provision tree and treated the
way a compiler treats source: deterministic evaluation with per-provision
coverage, substitution passes that rewrite cross-references into explicit
text, mutation testing with kill-checking, metamorphic property searches
with shrinking, and a pluggable reasoner boundary for comparing an
external model's answers against the built-in oracle.

Money is exact integer dollars throughout; the cost-of-living ratio is an
exact rational. Figure rendering lives in `statutelab.figures` and is
imported lazily so the core stays matplotlib-free.
"""

from .cli import RunConfig, dispatch, main
from .data import (
    load_default_cpi,
    load_default_statute,
    load_example_facts,
    read_data_text,
)
from .engine import (
    BASIC_SLOT_HOH,
    BASIC_SLOT_OTHER,
    AgeConvention,
    CoverageReport,
    CoverageStatus,
    ElidedFormula,
    EngineError,
    EvalResult,
    Evaluator,
    ItemizerUnsupported,
    MalformedProvision,
    MissingCpiYear,
    RoundingMode,
    UnsupportedYear,
    additional_standard_deduction,
    adjusted_basic_amount,
    adjustment_gate_year,
    attained_age,
    basic_standard_deduction,
    cola,
    format_percent,
    round_increase,
    special_rule_window,
    standard_deduction,
    taxable_income,
)
from .facts import (
    SPOUSE_STATUSES,
    BadDate,
    BadValue,
    CpiTable,
    CpiValue,
    FactsError,
    FilingStatus,
    InconsistentSpouse,
    MissingKey,
    TaxpayerFacts,
    UnknownKey,
    WrongCount,
    ccpiu_annual_average,
    load_cpi_table,
    load_facts,
    render_facts,
)
from .model import (
    DollarAmount,
    Label,
    LabelKind,
    Literal,
    LiteralKind,
    ModelError,
    ProvisionId,
    ProvisionNode,
    RefPhrase,
    Statute,
    TextSegment,
    build_id,
    dollar_amounts,
    extract_literals,
    normalize_quotes,
    parse_citation,
    render_id,
    validate_section,
)
from .parser import (
    CrossRef,
    StatuteParseError,
    parse_statute,
    render_statute,
    resolve_cross_refs,
)
from .pbt import (
    FIXED_PROPERTY_NAMES,
    PROPERTY_NAMES,
    CaseVerdict,
    Exhausted,
    FalsificationReport,
    MonotonicityCase,
    PropertyError,
    PropertyResult,
    UnknownProperty,
    check_case,
    check_fixed_property,
    falsify,
    generate_case,
    shrink_case,
)
from .reasoner import (
    AgreementScore,
    EvaluateAnswer,
    HttpConfig,
    HttpReasoner,
    OracleReasoner,
    ReasonerError,
    ReasonerParseError,
    ReasonerRequest,
    ReasonerResponse,
    Task,
    TranscriptMiss,
    TranscriptReasoner,
    append_transcript,
    load_transcript,
    make_coverage_request,
    make_evaluate_request,
    make_inline_request,
    make_propose_request,
    run_task,
    score_agreement,
)
from .synth import (
    Condition,
    GeneratorConfig,
    Predicate,
    PredicateError,
    SynthResult,
    parse_predicate,
    random_facts,
    synthesize_example,
)
from .transform import (
    InlinePlan,
    InlineResult,
    InlineStep,
    KillVerdict,
    LiteralMismatch,
    Mutation,
    MutationKind,
    MutationSearchResult,
    SpanMismatch,
    StepKind,
    TargetMissing,
    TransformError,
    apply_inline_step,
    apply_mutation,
    edit_provision,
    inline,
    kill_check,
    load_mutations,
    make_mutation,
    mutation_search,
    plan_inlining,
    remove_provision,
)

__version__ = "0.1.0"

__all__ = [
    "AgeConvention",
    "AgreementScore",
    "BadDate",
    "BadValue",
    "BASIC_SLOT_HOH",
    "BASIC_SLOT_OTHER",
    "CaseVerdict",
    "ccpiu_annual_average",
    "Condition",
    "CoverageReport",
    "CoverageStatus",
    "CpiTable",
    "CpiValue",
    "CrossRef",
    "DollarAmount",
    "ElidedFormula",
    "EngineError",
    "EvalResult",
    "EvaluateAnswer",
    "Evaluator",
    "Exhausted",
    "FactsError",
    "FalsificationReport",
    "FilingStatus",
    "FIXED_PROPERTY_NAMES",
    "GeneratorConfig",
    "HttpConfig",
    "HttpReasoner",
    "InconsistentSpouse",
    "InlinePlan",
    "InlineResult",
    "InlineStep",
    "ItemizerUnsupported",
    "KillVerdict",
    "Label",
    "LabelKind",
    "Literal",
    "LiteralKind",
    "LiteralMismatch",
    "MalformedProvision",
    "MissingCpiYear",
    "MissingKey",
    "ModelError",
    "MonotonicityCase",
    "Mutation",
    "MutationKind",
    "MutationSearchResult",
    "OracleReasoner",
    "Predicate",
    "PredicateError",
    "PropertyError",
    "PropertyResult",
    "PROPERTY_NAMES",
    "ProvisionId",
    "ProvisionNode",
    "ReasonerError",
    "ReasonerParseError",
    "ReasonerRequest",
    "ReasonerResponse",
    "RefPhrase",
    "RoundingMode",
    "RunConfig",
    "SpanMismatch",
    "SPOUSE_STATUSES",
    "Statute",
    "StatuteParseError",
    "StepKind",
    "SynthResult",
    "TargetMissing",
    "Task",
    "TaxpayerFacts",
    "TextSegment",
    "TranscriptMiss",
    "TranscriptReasoner",
    "TransformError",
    "UnknownKey",
    "UnknownProperty",
    "UnsupportedYear",
    "WrongCount",
    "additional_standard_deduction",
    "adjusted_basic_amount",
    "adjustment_gate_year",
    "append_transcript",
    "apply_inline_step",
    "apply_mutation",
    "attained_age",
    "basic_standard_deduction",
    "build_id",
    "check_case",
    "check_fixed_property",
    "cola",
    "dispatch",
    "dollar_amounts",
    "edit_provision",
    "extract_literals",
    "falsify",
    "format_percent",
    "generate_case",
    "inline",
    "kill_check",
    "load_cpi_table",
    "load_default_cpi",
    "load_default_statute",
    "load_example_facts",
    "load_facts",
    "load_mutations",
    "load_transcript",
    "main",
    "make_coverage_request",
    "make_evaluate_request",
    "make_inline_request",
    "make_mutation",
    "make_propose_request",
    "mutation_search",
    "normalize_quotes",
    "parse_citation",
    "parse_predicate",
    "parse_statute",
    "plan_inlining",
    "random_facts",
    "read_data_text",
    "remove_provision",
    "render_facts",
    "render_id",
    "render_statute",
    "resolve_cross_refs",
    "round_increase",
    "run_task",
    "score_agreement",
    "shrink_case",
    "special_rule_window",
    "standard_deduction",
    "synthesize_example",
    "taxable_income",
    "validate_section",
]
