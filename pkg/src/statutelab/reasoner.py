"""A pluggable boundary for delegating reading tasks to a language model.

Requests are built from prompt templates shipped as package data; every
request carries a content hash over its task, inputs, and template so an
exchange can be replayed byte-for-byte later. Three backends share one
interface: a local oracle that computes answers with this package's own
machinery, a transcript player that replays recorded exchanges by request
hash, and an HTTP client for a live chat-completion endpoint. Responses
are parsed leniently; models answer in prose, and the fields we need are
fished out rather than demanded as strict syntax.
"""

from __future__ import annotations

import difflib
import hashlib
import json
import os
import random
import re
import urllib.error
import urllib.request
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .engine import AgeConvention, EngineError, Evaluator, RoundingMode
from .facts import CpiTable, FactsError, load_cpi_table, load_facts, render_facts
from .model import Statute
from .parser import StatuteParseError, parse_statute, render_statute
from .synth import Predicate, synthesize_example
from .transform import TransformError, inline


class ReasonerError(ValueError):
    """Base class for reasoner failures."""


class TranscriptMiss(ReasonerError):
    """The transcript has no exchange for this request hash."""


class ReasonerParseError(ReasonerError):
    """A response that does not contain the fields the task needs."""


class ReasonerHttpError(ReasonerError):
    """The live endpoint could not be reached or answered garbage."""


class Task(Enum):
    EVALUATE = "evaluate"
    LIST_COVERAGE = "list_coverage"
    PROPOSE_EXAMPLE = "propose_example"
    INLINE_ONE_STEP = "inline_one_step"


_TEMPLATE_FILES = {
    Task.EVALUATE: "evaluate.txt",
    Task.LIST_COVERAGE: "list_coverage.txt",
    Task.PROPOSE_EXAMPLE: "propose_example.txt",
    Task.INLINE_ONE_STEP: "inline_one_step.txt",
}

_SLOT_RE = re.compile(r"\{\{(\w+)\}\}")


def load_template(task: Task) -> str:
    name = _TEMPLATE_FILES[task]
    return (
        resources.files("statutelab").joinpath("templates", name).read_text("utf-8")
    )


def template_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def fill_template(template: str, **slots: str) -> str:
    def sub(m: re.Match) -> str:
        key = m.group(1)
        if key not in slots:
            raise ReasonerError(f"template slot {{{{{key}}}}} has no value")
        return slots[key]

    return _SLOT_RE.sub(sub, template)


@dataclass(frozen=True)
class ReasonerRequest:
    """One task instance; hashable by content so transcripts can replay it."""

    task: Task
    statute_text: str
    facts_text: str
    instruction: str
    template_name: str
    template_digest: str
    prompt: str

    @property
    def request_hash(self) -> str:
        canon = json.dumps(
            {
                "task": self.task.value,
                "statute_text": self.statute_text,
                "facts_text": self.facts_text,
                "instruction": self.instruction,
                "template_digest": self.template_digest,
            },
            sort_keys=True,
            separators=(",", ":"),
        )
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()


def _build(task: Task, statute_text: str, facts_text: str, instruction: str, **extra) -> ReasonerRequest:
    template = load_template(task)
    slots = {"statute": statute_text, "facts": facts_text, "instruction": instruction}
    slots.update(extra)
    prompt = fill_template(template, **slots)
    return ReasonerRequest(
        task=task,
        statute_text=statute_text,
        facts_text=facts_text,
        instruction=instruction,
        template_name=_TEMPLATE_FILES[task],
        template_digest=template_hash(template),
        prompt=prompt,
    )


def _cpi_instruction(cpi: CpiTable) -> str:
    return "Use these chained CPI annual averages:\n" + cpi.render()


def make_evaluate_request(statute: Statute, facts_text: str, cpi: CpiTable) -> ReasonerRequest:
    return _build(Task.EVALUATE, render_statute(statute), facts_text, _cpi_instruction(cpi))


def make_coverage_request(statute: Statute, facts_text: str, cpi: CpiTable) -> ReasonerRequest:
    return _build(Task.LIST_COVERAGE, render_statute(statute), facts_text, _cpi_instruction(cpi))


def make_propose_request(statute: Statute, predicate: Predicate, cpi: CpiTable) -> ReasonerRequest:
    # The predicate must sit in a hashed field, not only in the prompt.
    instruction = "Predicate: " + predicate.render() + "\n" + cpi.render()
    return _build(
        Task.PROPOSE_EXAMPLE,
        render_statute(statute),
        "",
        instruction,
        predicate=predicate.render(),
    )


def make_inline_request(statute: Statute, taxable_year: int) -> ReasonerRequest:
    return _build(
        Task.INLINE_ONE_STEP,
        render_statute(statute),
        "",
        f"Taxable year: {taxable_year}",
    )


# -- lenient response parsing -------------------------------------------------

_MONEY_RE = re.compile(r"-?\$-?\d[\d,]*")
_CITATION_RE = re.compile(r"§\s?\d+(?:\([0-9a-zA-Z]+\))*")
_FENCE_RE = re.compile(r"```[^\n]*\n(.*?)```", re.DOTALL)
_CPI_ROW_RE = re.compile(r"^\d{4}\t", re.MULTILINE)


def parse_money(token: str) -> int:
    return int(token.replace("$", "").replace(",", ""))


def _labeled_amount(raw: str, label: str) -> int | None:
    m = re.search(label + r"[^$\n]*?(-?\$-?\d[\d,]*)", raw, re.IGNORECASE)
    return parse_money(m.group(1)) if m else None


@dataclass(frozen=True)
class EvaluateAnswer:
    taxable_income: int
    standard_deduction: int | None = None
    basic: int | None = None
    additional: int | None = None


def parse_evaluate_answer(raw: str) -> EvaluateAnswer:
    """Fish the amounts out of a prose answer. The taxable income is the
    labeled amount if one exists, else the last dollar amount mentioned."""
    ti = _labeled_amount(raw, r"taxable income")
    if ti is None:
        tokens = _MONEY_RE.findall(raw)
        if not tokens:
            raise ReasonerParseError("no dollar amount in the response")
        ti = parse_money(tokens[-1])
    return EvaluateAnswer(
        taxable_income=ti,
        standard_deduction=_labeled_amount(raw, r"standard deduction"),
        basic=_labeled_amount(raw, r"\bbasic\b"),
        additional=_labeled_amount(raw, r"\badditional\b"),
    )


def parse_citations(raw: str) -> tuple[str, ...]:
    seen = []
    for m in _CITATION_RE.finditer(raw):
        cite = m.group(0).replace("§ ", "§")
        if cite not in seen:
            seen.append(cite)
    return tuple(seen)


def extract_fenced(raw: str) -> str | None:
    m = _FENCE_RE.search(raw)
    return m.group(1) if m else None


@dataclass(frozen=True)
class ReasonerResponse:
    """A raw exchange plus whatever typed fields the task could extract."""

    request_hash: str
    raw: str
    evaluate: EvaluateAnswer | None = None
    citations: tuple[str, ...] | None = None
    facts_text: str | None = None
    statute_text: str | None = None

    @property
    def parse_ok(self) -> bool:
        return any(
            v is not None
            for v in (self.evaluate, self.citations, self.facts_text, self.statute_text)
        )


def parse_response(task: Task, request_hash: str, raw: str) -> ReasonerResponse:
    if task is Task.EVALUATE:
        return ReasonerResponse(request_hash, raw, evaluate=parse_evaluate_answer(raw))
    if task is Task.LIST_COVERAGE:
        return ReasonerResponse(request_hash, raw, citations=parse_citations(raw))
    if task is Task.PROPOSE_EXAMPLE:
        return ReasonerResponse(request_hash, raw, facts_text=extract_fenced(raw))
    return ReasonerResponse(request_hash, raw, statute_text=extract_fenced(raw))


# -- backends ------------------------------------------------------------------


class OracleReasoner:
    """Answers with this package's own evaluation, in the canonical
    phrasing the parsers accept. Useful as a baseline and for tests."""

    def __init__(
        self,
        rounding: RoundingMode = RoundingMode.FLOOR50,
        age_convention: AgeConvention = AgeConvention.ANNIVERSARY,
        synth_iterations: int = 2000,
    ):
        self.rounding = rounding
        self.age_convention = age_convention
        self.synth_iterations = synth_iterations

    def complete(self, request: ReasonerRequest) -> str:
        try:
            statute = parse_statute(request.statute_text)
        except StatuteParseError as exc:
            return f"Cannot read the statute text: {exc}"
        if request.task is Task.EVALUATE:
            return self._evaluate(statute, request)
        if request.task is Task.LIST_COVERAGE:
            return self._coverage(statute, request)
        if request.task is Task.PROPOSE_EXAMPLE:
            return self._propose(statute, request)
        return self._inline(statute, request)

    def _cpi(self, request: ReasonerRequest) -> CpiTable:
        rows = [
            line
            for line in request.instruction.splitlines()
            if _CPI_ROW_RE.match(line)
        ]
        return load_cpi_table("\n".join(rows))

    def _result(self, statute: Statute, request: ReasonerRequest):
        facts = load_facts(request.facts_text)
        ev = Evaluator(statute, self._cpi(request), self.rounding, self.age_convention)
        return ev.evaluate(facts)

    @staticmethod
    def _dollars(value: int) -> str:
        return f"-${-value:,}" if value < 0 else f"${value:,}"

    def _evaluate(self, statute: Statute, request: ReasonerRequest) -> str:
        try:
            result = self._result(statute, request)
        except (EngineError, FactsError) as exc:
            return f"Cannot evaluate: {exc}"
        d = self._dollars
        return (
            f"Standard deduction: {d(result.standard_deduction)} "
            f"(basic {d(result.basic)}, additional {d(result.additional)}).\n"
            f"Taxable income: {d(result.taxable_income)}."
        )

    def _coverage(self, statute: Statute, request: ReasonerRequest) -> str:
        try:
            result = self._result(statute, request)
        except (EngineError, FactsError) as exc:
            return f"Cannot evaluate: {exc}"
        applied = result.coverage.applied_set()
        cites = [
            str(pid) for pid in result.coverage.document_order if pid in applied
        ]
        return "Applied provisions: " + ", ".join(cites)

    def _propose(self, statute: Statute, request: ReasonerRequest) -> str:
        from .synth import parse_predicate

        first_line = request.instruction.splitlines()[0] if request.instruction else ""
        if not first_line.startswith("Predicate: "):
            return "Cannot find the predicate in the request."
        try:
            predicate = parse_predicate(first_line[len("Predicate: ") :])
        except ValueError as exc:
            return f"Cannot read the predicate: {exc}"
        ev = Evaluator(statute, self._cpi(request), self.rounding, self.age_convention)
        rng = random.Random(int(request.request_hash[:8], 16))
        outcome = synthesize_example(ev, predicate, rng, self.synth_iterations)
        if outcome.facts is None:
            return (
                f"No example found within {outcome.cases_tried} cases."
            )
        return "Proposed facts:\n```\n" + render_facts(outcome.facts) + "```"

    def _inline(self, statute: Statute, request: ReasonerRequest) -> str:
        m = re.search(r"Taxable year:\s*(\d{4})", request.instruction)
        if m is None:
            return "Cannot find the taxable year in the request."
        try:
            result = inline(statute, int(m.group(1)), upto=1)
        except (EngineError, TransformError) as exc:
            return f"No rewrite applies: {exc}"
        if not result.steps:
            return "No rewrite applies: the plan is empty."
        return (
            f"Step: {result.steps[0].describe()}\n```\n"
            + render_statute(result.statute)
            + "```"
        )


class TranscriptReasoner:
    """Replays recorded exchanges keyed by request hash."""

    def __init__(self, exchanges: dict[str, str]):
        self.exchanges = dict(exchanges)

    @classmethod
    def from_text(cls, text: str) -> TranscriptReasoner:
        return cls(load_transcript(text))

    def complete(self, request: ReasonerRequest) -> str:
        raw = self.exchanges.get(request.request_hash)
        if raw is None:
            raise TranscriptMiss(
                f"transcript has no exchange for request {request.request_hash[:12]}"
            )
        return raw


@dataclass(frozen=True)
class HttpConfig:
    """Where and how to reach a chat-completion endpoint. The credential
    is named by environment variable, never stored."""

    endpoint: str
    model: str
    credential_env: str = "STATUTELAB_API_TOKEN"
    timeout: float = 60.0


class HttpReasoner:
    """Posts the prompt to a chat-completion endpoint. Exchanges are
    appended to a transcript file before any parsing, so a later run can
    replay them without the network."""

    def __init__(self, config: HttpConfig, transcript_path: str | None = None):
        self.config = config
        self.transcript_path = transcript_path

    def complete(self, request: ReasonerRequest) -> str:
        token = os.environ.get(self.config.credential_env, "")
        body = json.dumps(
            {
                "model": self.config.model,
                "messages": [{"role": "user", "content": request.prompt}],
            }
        ).encode("utf-8")
        headers = {"Content-Type": "application/json"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        http_request = urllib.request.Request(
            self.config.endpoint, data=body, headers=headers, method="POST"
        )
        try:
            with urllib.request.urlopen(http_request, timeout=self.config.timeout) as resp:
                payload = json.load(resp)
        except urllib.error.URLError as exc:
            raise ReasonerHttpError(f"endpoint unreachable: {exc}") from exc
        except (json.JSONDecodeError, ValueError) as exc:
            raise ReasonerHttpError(f"endpoint returned non-JSON: {exc}") from exc
        try:
            raw = payload["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ReasonerHttpError(
                "endpoint response lacks choices[0].message.content"
            ) from exc
        if not isinstance(raw, str):
            raise ReasonerHttpError("endpoint returned a non-string message")
        if self.transcript_path:
            append_transcript(self.transcript_path, request, raw)
        return raw


def load_transcript(text: str) -> dict[str, str]:
    """Parse a transcript: one JSON object per line with request_hash,
    prompt, and raw fields."""
    exchanges: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            entry = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ReasonerError(f"transcript line {line_no}: {exc}") from exc
        if "request_hash" not in entry or "raw" not in entry:
            raise ReasonerError(
                f"transcript line {line_no}: needs request_hash and raw fields"
            )
        exchanges[entry["request_hash"]] = entry["raw"]
    return exchanges


def append_transcript(path: str, request: ReasonerRequest, raw: str) -> None:
    entry = {
        "request_hash": request.request_hash,
        "task": request.task.value,
        "prompt": request.prompt,
        "raw": raw,
    }
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(entry) + "\n")


def run_task(reasoner, request: ReasonerRequest) -> ReasonerResponse:
    raw = reasoner.complete(request)
    return parse_response(request.task, request.request_hash, raw)


# -- agreement scoring ---------------------------------------------------------


@dataclass(frozen=True)
class AgreementScore:
    task: Task
    exact_match: bool
    field_diffs: tuple[str, ...]
    text_similarity: float


def _facts_or_none(text: str | None):
    if text is None:
        return None
    try:
        return load_facts(text)
    except FactsError:
        return None


def score_agreement(task: Task, reference_raw: str, candidate_raw: str) -> AgreementScore:
    """Compare two responses to the same request, field by field where the
    task defines fields. For one-step rewrites the similarity is computed
    over the extracted statute texts; full agreement always scores 1.0."""
    diffs: list[str] = []
    try:
        ref = parse_response(task, "", reference_raw)
    except ReasonerParseError as exc:
        return AgreementScore(
            task=task,
            exact_match=False,
            field_diffs=(f"reference unparseable: {exc}",),
            text_similarity=_similarity(reference_raw, candidate_raw),
        )
    try:
        cand = parse_response(task, "", candidate_raw)
    except ReasonerParseError as exc:
        return AgreementScore(
            task=task,
            exact_match=False,
            field_diffs=(f"unparseable: {exc}",),
            text_similarity=_similarity(reference_raw, candidate_raw),
        )
    if task is Task.EVALUATE:
        for name in ("taxable_income", "standard_deduction", "basic", "additional"):
            a = getattr(ref.evaluate, name)
            b = getattr(cand.evaluate, name)
            if a is not None and b is not None and a != b:
                diffs.append(f"{name}: {a} != {b}")
            elif (a is None) != (b is None):
                diffs.append(f"{name}: stated on one side only")
    elif task is Task.LIST_COVERAGE:
        a, b = set(ref.citations or ()), set(cand.citations or ())
        for cite in sorted(a - b):
            diffs.append(f"missing: {cite}")
        for cite in sorted(b - a):
            diffs.append(f"extra: {cite}")
    elif task is Task.PROPOSE_EXAMPLE:
        fa, fb = _facts_or_none(ref.facts_text), _facts_or_none(cand.facts_text)
        if (fa is None) != (fb is None):
            diffs.append("facts: proposed on one side only")
        elif fa != fb:
            diffs.append("facts: differ")
    if task is Task.INLINE_ONE_STEP:
        a = (ref.statute_text or "").strip()
        b = (cand.statute_text or "").strip()
        if a != b:
            diffs.append("statute text: differs")
        similarity = _similarity(a, b)
    else:
        similarity = 1.0 if not diffs else _similarity(reference_raw, candidate_raw)
    return AgreementScore(
        task=task,
        exact_match=not diffs,
        field_diffs=tuple(diffs),
        text_similarity=similarity,
    )


def _similarity(a: str, b: str) -> float:
    return difflib.SequenceMatcher(None, a, b).ratio()
