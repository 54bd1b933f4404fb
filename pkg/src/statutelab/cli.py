"""Command-line front end.

One executable, seven subcommands: parse/render, evaluation, coverage,
example synthesis, mutation campaigns, step-by-step inlining, and property
searches. Randomized commands require an explicit --seed and echo it, so
any reported finding can be replayed. Machine format emits stable
tab-separated rows; --figures renders PNG summaries next to that output.

Exit status: 0 when the run completed (findings included), 1 when an
--expect-hold/--expect-falsify expectation was violated, 2 on usage or
data errors.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import random
import sys
from dataclasses import dataclass

from . import data
from .engine import (
    AgeConvention,
    EngineError,
    EvalResult,
    Evaluator,
    RoundingMode,
    format_percent,
)
from .facts import (
    CpiTable,
    FactsError,
    TaxpayerFacts,
    load_cpi_table,
    load_facts,
    render_facts,
)
from .model import ModelError, Statute, dollar_amounts
from .parser import (
    StatuteParseError,
    parse_statute,
    render_statute,
    resolve_cross_refs,
)
from .pbt import (
    PROPERTY_NAMES,
    FalsificationReport,
    PropertyError,
    check_fixed_property,
    falsify,
)
from .reasoner import (
    HttpConfig,
    HttpReasoner,
    OracleReasoner,
    ReasonerError,
    ReasonerRequest,
    TranscriptReasoner,
    make_coverage_request,
    make_evaluate_request,
    make_inline_request,
    make_propose_request,
    run_task,
    score_agreement,
)
from .synth import PredicateError, parse_predicate, synthesize_example
from .transform import (
    TransformError,
    apply_inline_step,
    apply_mutation,
    inline,
    kill_check,
    load_mutations,
    mutation_search,
    plan_inlining,
)

EXIT_OK = 0
EXIT_FINDINGS = 1
EXIT_USAGE = 2


class CliError(Exception):
    """Usage or data failure; printed to stderr with exit status 2."""


@dataclass(frozen=True)
class RunConfig:
    """Run settings shared across subcommands. Paths default to the
    bundled corpus; modes default to the statute-literal reading."""

    statute_path: str | None = None
    cpi_path: str | None = None
    rounding: RoundingMode = RoundingMode.FLOOR50
    age_convention: AgeConvention = AgeConvention.ANNIVERSARY
    seed: int | None = None
    iterations: int | None = None
    reasoner: str = "oracle"
    out_format: str = "human"

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> RunConfig:
        return cls(
            statute_path=args.statute,
            cpi_path=args.cpi,
            rounding=RoundingMode(args.rounding),
            age_convention=AgeConvention(args.age_convention),
            seed=getattr(args, "seed", None),
            iterations=getattr(args, "iterations", None),
            reasoner=getattr(args, "reasoner", "oracle"),
            out_format=args.format,
        )

    @property
    def machine(self) -> bool:
        return self.out_format == "machine"


def _read_file(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}")


def _load_statute(cfg: RunConfig) -> Statute:
    if cfg.statute_path is None:
        return data.load_default_statute()
    return parse_statute(_read_file(cfg.statute_path))


def _load_cpi(cfg: RunConfig) -> CpiTable:
    if cfg.cpi_path is None:
        return data.load_default_cpi()
    return load_cpi_table(_read_file(cfg.cpi_path))


def _load_facts_file(path: str) -> tuple[TaxpayerFacts, str]:
    text = _read_file(path)
    return load_facts(text), text


def _statute_text(cfg: RunConfig) -> str:
    if cfg.statute_path is None:
        return data.read_data_text("irc_excerpt.txt")
    return _read_file(cfg.statute_path)


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _print_block(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _figure_path(directory: str, name: str) -> str:
    os.makedirs(directory, exist_ok=True)
    return os.path.join(directory, name)


# -- reasoner plumbing -----------------------------------------------------


def _make_reasoner(args: argparse.Namespace, cfg: RunConfig):
    if cfg.reasoner == "oracle":
        return OracleReasoner(cfg.rounding, cfg.age_convention)
    if cfg.reasoner == "mock":
        if not args.transcript:
            raise CliError("--transcript is required with --reasoner mock")
        return TranscriptReasoner.from_text(_read_file(args.transcript))
    if not args.endpoint:
        raise CliError("--endpoint is required with --reasoner external")
    if not args.model:
        raise CliError(
            "--model (or the STATUTELAB_MODEL variable) is required "
            "with --reasoner external"
        )
    return HttpReasoner(
        HttpConfig(endpoint=args.endpoint, model=args.model),
        transcript_path=args.transcript,
    )


def _delegated(
    args: argparse.Namespace, cfg: RunConfig, request: ReasonerRequest
) -> tuple[list[str], object]:
    """Run a request on the selected backend and score it against the
    built-in oracle. Returns output lines plus the parsed response."""
    backend = _make_reasoner(args, cfg)
    response = run_task(backend, request)
    oracle = OracleReasoner(cfg.rounding, cfg.age_convention)
    reference = oracle.complete(request)
    score = score_agreement(request.task, reference, response.raw)
    out: list[str] = []
    if cfg.machine:
        out.append(f"reasoner\t{cfg.reasoner}")
        out.append(f"request\t{request.request_hash}")
    else:
        out.append(f"reasoner: {cfg.reasoner}")
        out.append(f"request: {request.request_hash}")
        out.append("reply:")
        out.append(response.raw.rstrip("\n"))
        out.append("")
    if cfg.machine:
        out.append(f"agreement_exact\t{str(score.exact_match).lower()}")
        out.append(f"agreement_similarity\t{score.text_similarity:.4f}")
        for diff in score.field_diffs:
            out.append(f"agreement_diff\t{diff}")
    else:
        word = "exact" if score.exact_match else "differs"
        out.append(f"agreement: {word} (similarity {score.text_similarity:.4f})")
        for diff in score.field_diffs:
            out.append(f"  diff: {diff}")
    return out, response


# -- parse -----------------------------------------------------------------


def _cmd_parse(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    statute = _load_statute(cfg)
    if args.render:
        _print_block(render_statute(statute))
        return EXIT_OK
    out: list[str] = []
    rendered = render_statute(statute)
    nodes = list(statute.walk())
    if cfg.machine:
        for node in nodes:
            kind = node.id.path[-1].kind.value
            flag = "elided" if node.elided else "text"
            out.append(f"provision\t{node.id.render()}\t{kind}\t{flag}")
        for sec in statute.sections:
            amounts = ",".join(str(v) for v in sorted(dollar_amounts(sec)))
            out.append(f"dollars\t{sec.id.render()}\t{amounts}")
        out.append(f"statute_sha256\t{_sha256(rendered)}")
    else:
        for node in nodes:
            indent = "  " * node.id.depth
            suffix = " [elided]" if node.elided else ""
            heading = f" {node.heading}" if node.heading else ""
            out.append(f"{indent}{node.id.render()}{heading}{suffix}")
        elided = sum(1 for n in nodes if n.elided)
        out.append("")
        out.append(f"{len(nodes)} provisions ({elided} elided)")
        for sec in statute.sections:
            amounts = ", ".join(f"${v:,}" for v in sorted(dollar_amounts(sec)))
            out.append(f"{sec.id.render()} dollar amounts: {amounts}")
    if args.refs:
        refs = resolve_cross_refs(statute)
        if cfg.machine:
            for ref in refs:
                target = ref.target.render() if ref.target is not None else "?"
                status = "ok" if ref.resolved else (ref.reason or "unresolved")
                out.append(f"ref\t{ref.source.render()}\t{ref.raw}\t{target}\t{status}")
        else:
            out.append("")
            out.append(f"{len(refs)} cross-references:")
            for ref in refs:
                target = ref.target.render() if ref.target is not None else "?"
                note = "" if ref.resolved else f" [{ref.reason or 'unresolved'}]"
                out.append(f"  {ref.source.render()} -> {target} ({ref.raw}){note}")
    _print_block("\n".join(out))
    return EXIT_OK


# -- eval / coverage -------------------------------------------------------


def _result_rows(cfg: RunConfig, facts: TaxpayerFacts, result: EvalResult) -> list[str]:
    pairs = [
        ("taxable_year", facts.taxable_year),
        ("filing_status", facts.filing_status.value),
        ("rounding", cfg.rounding.value),
        ("age_convention", cfg.age_convention.value),
        ("basic", result.basic),
        ("additional", result.additional),
        ("standard_deduction", result.standard_deduction),
        ("agi", facts.agi),
        ("taxable_income", result.taxable_income),
    ]
    if result.cola_ratio is not None:
        pairs.append(("cola", format_percent(result.cola_ratio)))
    sep = "\t" if cfg.machine else ": "
    rows = [f"{key}{sep}{value}" for key, value in pairs]
    for note in result.notes:
        rows.append(f"note{sep}{note}")
    return rows


def _coverage_rows(cfg: RunConfig, result: EvalResult) -> list[str]:
    cov = result.coverage
    out: list[str] = []
    if cfg.machine:
        for pid in cov.document_order:
            out.append(f"coverage\t{pid.render()}\t{cov.status_of(pid).value}")
        for i, pid in enumerate(cov.applied_order, start=1):
            out.append(f"applied_order\t{i}\t{pid.render()}")
    else:
        width = max(len(pid.render()) for pid in cov.document_order) + 2
        out.append("")
        for pid in cov.document_order:
            out.append(f"{pid.render().ljust(width)}{cov.status_of(pid).value}")
        out.append("")
        ordered = ", ".join(pid.render() for pid in cov.applied_order)
        out.append(f"applied order: {ordered}")
    return out


def _cmd_eval(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    statute = _load_statute(cfg)
    cpi = _load_cpi(cfg)
    facts, facts_text = _load_facts_file(args.facts)
    if cfg.reasoner != "oracle":
        request = make_evaluate_request(statute, facts_text, cpi)
        lines, response = _delegated(args, cfg, request)
        answer = response.evaluate
        sep = "\t" if cfg.machine else ": "
        for name in ("taxable_income", "standard_deduction", "basic", "additional"):
            value = getattr(answer, name) if answer is not None else None
            if value is not None:
                lines.append(f"{name}{sep}{value}")
        _print_block("\n".join(lines))
        return EXIT_OK
    ev = Evaluator(statute, cpi, cfg.rounding, cfg.age_convention)
    result = ev.evaluate(facts)
    out = _result_rows(cfg, facts, result)
    if args.figures:
        from .figures import coverage_figure

        path = _figure_path(args.figures, "coverage.png")
        coverage_figure(result.coverage, path)
        sep = "\t" if cfg.machine else ": "
        out.append(f"figure{sep}{path}")
    _print_block("\n".join(out))
    return EXIT_OK


def _cmd_coverage(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    statute = _load_statute(cfg)
    cpi = _load_cpi(cfg)
    facts, facts_text = _load_facts_file(args.facts)
    if cfg.reasoner != "oracle":
        request = make_coverage_request(statute, facts_text, cpi)
        lines, response = _delegated(args, cfg, request)
        sep = "\t" if cfg.machine else ": "
        for citation in response.citations or ():
            lines.append(f"cited{sep}{citation}")
        _print_block("\n".join(lines))
        return EXIT_OK
    ev = Evaluator(statute, cpi, cfg.rounding, cfg.age_convention)
    result = ev.evaluate(facts)
    sep = "\t" if cfg.machine else ": "
    out = [f"taxable_income{sep}{result.taxable_income}"]
    out.extend(_coverage_rows(cfg, result))
    if args.figures:
        from .figures import coverage_figure

        path = _figure_path(args.figures, "coverage.png")
        coverage_figure(result.coverage, path)
        out.append(f"figure{sep}{path}")
    _print_block("\n".join(out))
    return EXIT_OK


# -- synth -----------------------------------------------------------------


def _cmd_synth(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    statute = _load_statute(cfg)
    cpi = _load_cpi(cfg)
    predicate = parse_predicate(args.predicate)
    iterations = cfg.iterations if cfg.iterations is not None else 1000
    if cfg.reasoner != "oracle":
        request = make_propose_request(statute, predicate, cpi)
        lines, response = _delegated(args, cfg, request)
        sep = "\t" if cfg.machine else ": "
        verified = False
        if response.facts_text is not None:
            try:
                proposed = load_facts(response.facts_text)
                ev = Evaluator(statute, cpi, cfg.rounding, cfg.age_convention)
                verified = predicate.matches(ev.evaluate(proposed).coverage)
            except (FactsError, EngineError):
                verified = False
        lines.append(f"verified{sep}{str(verified).lower()}")
        _print_block("\n".join(lines))
        return EXIT_OK
    ev = Evaluator(statute, cpi, cfg.rounding, cfg.age_convention)
    rng = random.Random(cfg.seed)
    result = synthesize_example(ev, predicate, rng, iterations=iterations)
    sep = "\t" if cfg.machine else ": "
    out = [
        f"predicate{sep}{predicate.render()}",
        f"seed{sep}{cfg.seed}",
        f"cases_tried{sep}{result.cases_tried}",
        f"cases_rejected{sep}{result.cases_rejected}",
        f"found{sep}{str(result.found).lower()}",
    ]
    if result.facts is not None:
        if cfg.machine:
            for line in render_facts(result.facts).splitlines():
                key, _, value = line.partition(": ")
                out.append(f"fact\t{key}\t{value}")
        else:
            out.append("")
            out.append(render_facts(result.facts).rstrip("\n"))
    _print_block("\n".join(out))
    return EXIT_OK


# -- mutate ----------------------------------------------------------------


def _scenario_line(facts: TaxpayerFacts) -> str:
    return "; ".join(render_facts(facts).splitlines())


def _cmd_mutate(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    statute = _load_statute(cfg)
    cpi = _load_cpi(cfg)
    mutations = load_mutations(statute, _read_file(args.mutations))
    searching = args.facts is None
    if searching and cfg.seed is None:
        raise CliError("--seed is required when searching for killing scenarios")
    facts = None
    if not searching:
        facts, _ = _load_facts_file(args.facts)
    sep = "\t" if cfg.machine else ": "
    out: list[str] = []
    if searching:
        out.append(f"seed{sep}{cfg.seed}")
        out.append(f"budget{sep}{args.budget}")
    for mutation in mutations:
        mutant = apply_mutation(statute, mutation)
        out.append(f"mutation{sep}{mutation.label}")
        if not searching:
            try:
                verdict = kill_check(
                    statute, mutant, facts, cpi, cfg.rounding, cfg.age_convention
                )
            except EngineError as exc:
                out.append(f"error{sep}{exc}")
                continue
            out.append(f"killed{sep}{str(verdict.killed).lower()}")
            out.append(f"reason{sep}{verdict.describe()}")
            continue
        found = mutation_search(
            statute,
            mutant,
            budget=args.budget,
            seed=cfg.seed,
            cpi=cpi,
            rounding=cfg.rounding,
            age_convention=cfg.age_convention,
        )
        out.append(f"killed{sep}{str(found.found).lower()}")
        out.append(f"cases_tried{sep}{found.cases_tried}")
        out.append(f"cases_skipped{sep}{found.cases_skipped}")
        if found.found:
            out.append(f"reason{sep}{found.verdict.describe()}")
            out.append(f"scenario{sep}{_scenario_line(found.facts)}")
    _print_block("\n".join(out))
    return EXIT_OK


# -- inline ----------------------------------------------------------------


def _cmd_inline(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    statute = _load_statute(cfg)
    if cfg.reasoner != "oracle":
        if args.step is not None:
            raise CliError("--step works with the built-in engine only")
        request = make_inline_request(statute, args.year)
        lines, response = _delegated(args, cfg, request)
        if response.statute_text is not None and (args.render or not cfg.machine):
            lines.append("")
            lines.append(response.statute_text.rstrip("\n"))
        _print_block("\n".join(lines))
        return EXIT_OK
    plan = plan_inlining(statute, args.year)
    if args.step is not None:
        if not 0 <= args.step <= len(plan):
            raise CliError(
                f"--step must be between 0 and {len(plan)} for year {args.year}"
            )
        tree = statute
        for step in list(plan)[: args.step]:
            tree = apply_inline_step(tree, step)
        _print_block(render_statute(tree))
        return EXIT_OK
    result = inline(statute, args.year)
    rendered = render_statute(result.statute)
    if cfg.machine:
        out = [f"year\t{args.year}", f"steps\t{len(result.steps)}"]
        for i, step in enumerate(result.steps, start=1):
            out.append(f"step\t{i}\t{step.describe()}")
        out.append(f"statute_sha256\t{_sha256(rendered)}")
        if args.render:
            out.append("")
            out.append(rendered.rstrip("\n"))
    else:
        out = [f"inlining plan for {args.year} ({len(result.steps)} steps):"]
        for i, step in enumerate(result.steps, start=1):
            out.append(f"  {i}. {step.describe()}")
        out.append("")
        out.append(rendered.rstrip("\n"))
    _print_block("\n".join(out))
    return EXIT_OK


# -- pbt -------------------------------------------------------------------


def _case_rows(prefix: str, case, verdict, sep: str) -> list[str]:
    return [
        f"{prefix}_x{sep}{case.x}",
        f"{prefix}_ix{sep}{case.ix}",
        f"{prefix}_y{sep}{case.y}",
        f"{prefix}_iy{sep}{case.iy}",
        f"{prefix}_dx{sep}{verdict.dx}",
        f"{prefix}_dy{sep}{verdict.dy}",
    ]


def _cmd_pbt(args: argparse.Namespace) -> int:
    cfg = RunConfig.from_args(args)
    statute = _load_statute(cfg)
    cpi = _load_cpi(cfg) if args.cpi else None
    sep = "\t" if cfg.machine else ": "
    out = [
        f"property{sep}{args.property}",
        f"seed{sep}{cfg.seed}",
        f"rounding{sep}{cfg.rounding.value}",
    ]
    if args.property == "monotonicity":
        iterations = cfg.iterations if cfg.iterations is not None else 10_000
        result = falsify(
            statute,
            iterations=iterations,
            seed=cfg.seed,
            rounding=cfg.rounding,
            cpi=cpi,
        )
        falsified = isinstance(result, FalsificationReport)
        out.append(f"iterations_run{sep}{result.iterations_run}")
        out.append(f"outcome{sep}{'falsified' if falsified else 'exhausted'}")
        if falsified:
            out.extend(
                _case_rows("first", result.first_violation, result.first_verdict, sep)
            )
            out.extend(
                _case_rows(
                    "shrunk", result.shrunk_violation, result.shrunk_verdict, sep
                )
            )
        if not cfg.machine:
            out.append("")
            out.append(result.summary())
        violated_expectation = (args.expect_hold and falsified) or (
            args.expect_falsify and not falsified
        )
    else:
        samples = cfg.iterations if cfg.iterations is not None else 1000
        result = check_fixed_property(
            statute,
            args.property,
            samples=samples,
            seed=cfg.seed,
            rounding=cfg.rounding,
            cpi=cpi,
        )
        out.append(f"samples_run{sep}{result.samples_run}")
        out.append(f"outcome{sep}{'pass' if result.passed else 'fail'}")
        for witness in result.witnesses:
            out.append(f"witness{sep}{witness}")
        if not cfg.machine:
            out.append("")
            out.append(result.summary())
        violated_expectation = (args.expect_hold and not result.passed) or (
            args.expect_falsify and result.passed
        )
    if args.figures:
        from .figures import property_figure

        path = _figure_path(args.figures, "property.png")
        property_figure(result, path)
        out.append(f"figure{sep}{path}")
    _print_block("\n".join(out))
    return EXIT_FINDINGS if violated_expectation else EXIT_OK


# -- argument wiring -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--statute", help="statute corpus file (default: bundled)")
    shared.add_argument("--cpi", help="CPI table file (default: bundled)")
    shared.add_argument(
        "--rounding",
        choices=[m.value for m in RoundingMode],
        default=RoundingMode.FLOOR50.value,
        help="rounding mode for inflation increases",
    )
    shared.add_argument(
        "--age-convention",
        choices=[c.value for c in AgeConvention],
        default=AgeConvention.ANNIVERSARY.value,
        help="when a birthday counts as attained",
    )
    shared.add_argument(
        "--format",
        choices=["human", "machine"],
        default="human",
        help="machine format is stable tab-separated rows",
    )

    reasoner = argparse.ArgumentParser(add_help=False)
    reasoner.add_argument(
        "--reasoner",
        choices=["oracle", "external", "mock"],
        default="oracle",
        help="oracle runs in-process; external posts to an endpoint; "
        "mock replays a transcript",
    )
    reasoner.add_argument(
        "--transcript",
        help="transcript file: replay source for mock, recording "
        "target for external",
    )
    reasoner.add_argument("--endpoint", help="chat endpoint URL for --reasoner external")
    reasoner.add_argument(
        "--model",
        default=os.environ.get("STATUTELAB_MODEL", ""),
        help="model identifier for --reasoner external "
        "(default: STATUTELAB_MODEL)",
    )

    parser = argparse.ArgumentParser(
        prog="statutelab",
        description="Statute-as-code analyses over the bundled tax corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[shared], help="parse and summarize a corpus")
    p.add_argument("--refs", action="store_true", help="list cross-references")
    p.add_argument("--render", action="store_true", help="print the canonical text")
    p.set_defaults(handler=_cmd_parse)

    p = sub.add_parser("eval", parents=[shared, reasoner], help="compute taxable income")
    p.add_argument("--facts", required=True, help="scenario file of key: value lines")
    p.add_argument("--figures", metavar="DIR", help="write coverage.png to DIR")
    p.set_defaults(handler=_cmd_eval)

    p = sub.add_parser(
        "coverage", parents=[shared, reasoner], help="report per-provision coverage"
    )
    p.add_argument("--facts", required=True, help="scenario file of key: value lines")
    p.add_argument("--figures", metavar="DIR", help="write coverage.png to DIR")
    p.set_defaults(handler=_cmd_coverage)

    p = sub.add_parser(
        "synth",
        parents=[shared, reasoner],
        help="search for facts matching a coverage predicate",
    )
    p.add_argument(
        "--predicate",
        required=True,
        help='e.g. "§63(f)(1)(B)=applied & §63(c)(4)!=applied"',
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--iterations", type=int, help="search budget (default 1000)")
    p.set_defaults(handler=_cmd_synth)

    p = sub.add_parser(
        "mutate", parents=[shared], help="apply mutations and check for kills"
    )
    p.add_argument("--mutations", required=True, help="mutation spec file")
    p.add_argument(
        "--facts", help="check this one scenario instead of searching for one"
    )
    p.add_argument("--seed", type=int, help="search seed (required without --facts)")
    p.add_argument("--budget", type=int, default=10_000, help="search budget per mutant")
    p.set_defaults(handler=_cmd_mutate)

    p = sub.add_parser(
        "inline",
        parents=[shared, reasoner],
        help="rewrite substitutions into explicit text",
    )
    p.add_argument("--year", type=int, required=True, help="taxable year to inline for")
    p.add_argument(
        "--step",
        type=int,
        help="emit the statute text after this many plan steps",
    )
    p.add_argument(
        "--render",
        action="store_true",
        help="include the full rewritten text in machine output",
    )
    p.set_defaults(handler=_cmd_inline)

    p = sub.add_parser(
        "pbt", parents=[shared], help="falsify or confirm a named property"
    )
    p.add_argument(
        "--property",
        choices=list(PROPERTY_NAMES),
        default="monotonicity",
        help="monotonicity is expected to falsify; the rest should hold",
    )
    p.add_argument("--seed", type=int, required=True)
    p.add_argument(
        "--iterations",
        "--budget",
        dest="iterations",
        type=int,
        help="case budget (default 10000 for monotonicity, 1000 otherwise)",
    )
    p.add_argument(
        "--expect-hold",
        action="store_true",
        help="exit 1 if the property is falsified",
    )
    p.add_argument(
        "--expect-falsify",
        action="store_true",
        help="exit 1 if no counterexample is found",
    )
    p.add_argument("--figures", metavar="DIR", help="write property.png to DIR")
    p.set_defaults(handler=_cmd_pbt)

    return parser


def dispatch(argv: list[str]) -> int:
    """Parse arguments, run the subcommand, map failures to exit codes."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "expect_hold", False) and getattr(args, "expect_falsify", False):
        print("error: --expect-hold and --expect-falsify conflict", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.handler(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (
        FactsError,
        StatuteParseError,
        ModelError,
        EngineError,
        TransformError,
        PredicateError,
        PropertyError,
        ReasonerError,
    ) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
