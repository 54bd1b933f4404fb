"""Tree surgery: inlining the special-rule substitutions, and mutations.

Inlining rewrites the statute so the text itself states what the special
rules would make a reader do: delete the overridden inflation paragraph,
substitute the increased dollar amounts, substitute the base year, and
rewrite the index clause onto the chained series. Each step records the
provision that justifies it. Evaluating the rewritten tree must produce the
same money results as evaluating the original.

Mutations are small adversarial edits (delete a conjunct, replace an
amount) used to probe whether evaluation actually reads the text it claims
to read. A mutation is validated against a concrete statute at construction
and fails loudly if its target or literal is gone.
"""

from __future__ import annotations

import dataclasses
import enum
import random
import re
import shlex
from dataclasses import dataclass

from .engine import (
    AgeConvention,
    EngineError,
    Evaluator,
    RoundingMode,
    UnsupportedYear,
)
from .facts import CpiTable, TaxpayerFacts
from .model import (
    LiteralKind,
    ProvisionId,
    ProvisionNode,
    Statute,
    TextSegment,
    build_id,
    normalize_quotes,
    parse_citation,
)


class TransformError(ValueError):
    """Base class for inlining and mutation failures."""


class TargetMissing(TransformError):
    """The provision a step or mutation names is not in the tree."""


class LiteralMismatch(TransformError):
    """The text an inline step replaces does not occur at its target."""


class SpanMismatch(TransformError):
    """A mutation's span (conjunct or literal) is absent from its target,
    or deleting it would not leave a well-formed sentence."""


# -- generic tree editing ----------------------------------------------------


def _rebuild(node: ProvisionNode, target: ProvisionId, edit) -> ProvisionNode | None:
    """Rebuild the path from `node` down to `target`, applying `edit` (a
    node -> node | None function) at the target. Untouched subtrees are
    shared. Returns None if the node itself was deleted."""
    if node.id == target:
        return edit(node)
    if target.path[: len(node.id.path)] != node.id.path:
        return node
    new_children = []
    hit = False
    for child in node.children:
        if child.id.path == target.path[: len(child.id.path)]:
            hit = True
            replaced = _rebuild(child, target, edit)
            if replaced is not None:
                new_children.append(replaced)
        else:
            new_children.append(child)
    if not hit:
        raise TargetMissing(f"no provision {target} in the tree")
    return dataclasses.replace(node, children=tuple(new_children))


def edit_provision(statute: Statute, target: ProvisionId, edit) -> Statute:
    sections = []
    hit = False
    for sec in statute.sections:
        if sec.id.path == target.path[: len(sec.id.path)]:
            hit = True
            replaced = _rebuild(sec, target, edit)
            if replaced is not None:
                sections.append(replaced)
        else:
            sections.append(sec)
    if not hit:
        raise TargetMissing(f"no provision {target} in the tree")
    return Statute(sections=tuple(sections))


def remove_provision(statute: Statute, target: ProvisionId) -> Statute:
    return edit_provision(statute, target, lambda node: None)


def _splice_first(
    node: ProvisionNode, kind: LiteralKind, old_value: int, replacement: str
) -> ProvisionNode:
    """Replace the first literal of `kind` with value `old_value` in the
    node's own text (lead body first, then flush tail)."""
    body = list(node.body)
    tail = list(node.tail)
    for segs in (body, tail):
        for i, seg in enumerate(segs):
            for lit in seg.literals:
                if lit.kind is kind and lit.value == old_value:
                    segs[i] = seg.splice(lit, replacement)
                    return dataclasses.replace(
                        node, body=tuple(body), tail=tuple(tail)
                    )
    raise LiteralMismatch(
        f"{node.id} does not contain the {kind.name.lower()} literal "
        f"{replacement!r} would replace"
    )


def _format_dollars(value: int) -> str:
    return f"${value:,}"


# -- inlining ----------------------------------------------------------------


class StepKind(enum.Enum):
    REMOVE_PROVISION = "remove_provision"
    SUBSTITUTE_AMOUNT = "substitute_amount"
    SUBSTITUTE_YEAR = "substitute_year"
    REWRITE_CLAUSE = "rewrite_clause"


@dataclass(frozen=True)
class InlineStep:
    """One rewrite, with the provision whose rule justifies it."""

    kind: StepKind
    target: ProvisionId
    justification: ProvisionId
    old: str | None = None
    new: str | None = None
    phase: int = 1

    def describe(self) -> str:
        if self.kind is StepKind.REMOVE_PROVISION:
            action = f"remove {self.target}"
        elif self.kind is StepKind.SUBSTITUTE_AMOUNT:
            action = f'substitute "{self.new}" for "{self.old}" in {self.target}'
        elif self.kind is StepKind.SUBSTITUTE_YEAR:
            action = f'substitute "{self.new}" for "{self.old}" in {self.target}'
        else:
            action = f'rewrite {self.target} to "{self.new}"'
        return f"{action} (per {self.justification})"


@dataclass(frozen=True)
class InlinePlan:
    """The ordered rewrites one taxable year prescribes."""

    taxable_year: int
    steps: tuple[InlineStep, ...]

    def __iter__(self):
        return iter(self.steps)

    def __len__(self) -> int:
        return len(self.steps)

    def describe(self) -> str:
        lines = [f"Plan for taxable year {self.taxable_year} ({len(self.steps)} steps):"]
        for n, step in enumerate(self.steps, start=1):
            lines.append(f"  {n}. {step.describe()}")
        return "\n".join(lines)


@dataclass(frozen=True)
class InlineResult:
    statute: Statute
    steps: tuple[InlineStep, ...]


_ID_63C2B = build_id("63", "c", "2", "B")
_ID_63C2C = build_id("63", "c", "2", "C")
_ID_63C4 = build_id("63", "c", "4")
_ID_63C7 = build_id("63", "c", "7")
_ID_63C7AI = build_id("63", "c", "7", "A", "i")
_ID_63C7AII = build_id("63", "c", "7", "A", "ii")
_ID_63C7BI = build_id("63", "c", "7", "B", "i")
_ID_63C7BII = build_id("63", "c", "7", "B", "ii")
_ID_63C7BII_II = build_id("63", "c", "7", "B", "ii", "II")
_ID_1F3AII = build_id("1", "f", "3", "A", "ii")
_ID_1F3C = build_id("1", "f", "3", "C")

_SUB_AMOUNT_RE = re.compile(r'substituting "\$([\d,]+)" for "\$([\d,]+)"')
_SUB_YEAR_RE = re.compile(r'substituting "(\d{4})" for "(\d{4})"')
_SUB_PREFIX_RE = re.compile(r'substituting "([^"]+)" for "([^"]+)" and all that follows')


def _node_text(node: ProvisionNode) -> str:
    return normalize_quotes(" ".join(seg.raw for seg in node.segments()))


def _first_literal(node: ProvisionNode, kind: LiteralKind) -> int | None:
    for seg in node.body:
        for lit in seg.literals:
            if lit.kind is kind:
                return lit.value
    return None


def _lead_years(node: ProvisionNode) -> list[int]:
    return [
        lit.value
        for seg in node.body
        for lit in seg.literals
        if lit.kind is LiteralKind.YEAR
    ]


def plan_inlining(statute: Statute, taxable_year: int) -> InlinePlan:
    """The ordered rewrites the special rules prescribe for `taxable_year`."""
    p7 = statute.find(_ID_63C7)
    if p7 is None:
        raise UnsupportedYear("no special-rule window in this statute")
    window = _lead_years(p7)
    if len(window) < 2:
        raise TransformError(f"{_ID_63C7} no longer states its year window")
    lo, hi = window[0], window[1]
    if not (lo < taxable_year < hi):
        raise UnsupportedYear(
            f"taxable year {taxable_year} outside the supported window "
            f"({lo + 1}-{hi - 1})"
        )

    steps: list[InlineStep] = []

    # Phase 1: the general inflation paragraph is switched off for the
    # amounts we carry, so the rewritten text simply drops it.
    if statute.find(_ID_63C4) is not None and statute.find(_ID_63C7BI) is not None:
        steps.append(
            InlineStep(
                kind=StepKind.REMOVE_PROVISION,
                target=_ID_63C4,
                justification=_ID_63C7BI,
                phase=1,
            )
        )

    # Phase 2: write the increased amounts into the slots they replace.
    for sub_id, slot in ((_ID_63C7AI, _ID_63C2B), (_ID_63C7AII, _ID_63C2C)):
        sub_node = statute.find(sub_id)
        slot_node = statute.find(slot)
        if sub_node is None or slot_node is None:
            continue
        m = _SUB_AMOUNT_RE.search(_node_text(sub_node))
        if m is None:
            continue
        new, old = (int(g.replace(",", "")) for g in m.groups())
        if _first_literal(slot_node, LiteralKind.DOLLAR) == old:
            steps.append(
                InlineStep(
                    kind=StepKind.SUBSTITUTE_AMOUNT,
                    target=slot,
                    justification=sub_id,
                    old=_format_dollars(old),
                    new=_format_dollars(new),
                    phase=2,
                )
            )

    pbii = statute.find(_ID_63C7BII)
    gate_years = _lead_years(pbii) if pbii is not None else []
    if not gate_years or taxable_year <= gate_years[0]:
        return InlinePlan(taxable_year=taxable_year, steps=tuple(steps))

    # Phase 3: the inflation cross-reference carries a base-year
    # substitution; write the new year into the index clause.
    pII = statute.find(_ID_63C7BII_II)
    clause = statute.find(_ID_1F3AII)
    year_pair: tuple[int, int] | None = None
    if pII is not None and clause is not None:
        m = _SUB_YEAR_RE.search(_node_text(pII))
        if m is not None:
            new_year, old_year = int(m.group(1)), int(m.group(2))
            if _first_literal(clause, LiteralKind.YEAR) == old_year:
                year_pair = (new_year, old_year)
                steps.append(
                    InlineStep(
                        kind=StepKind.SUBSTITUTE_YEAR,
                        target=_ID_1F3AII,
                        justification=_ID_63C7BII_II,
                        old=str(old_year),
                        new=str(new_year),
                        phase=3,
                    )
                )

    # Phase 4: with a post-2016 base year in place, the index clause is
    # read against the chained series; rewrite it so the text says so.
    special = statute.find(_ID_1F3C)
    if year_pair is not None and special is not None and "C-CPI-U" not in _node_text(clause):
        m = _SUB_PREFIX_RE.search(_node_text(special))
        if m is not None:
            new_base, old_base = m.group(1), m.group(2)
            new_year, old_year = year_pair
            old_prefix = old_base.replace(str(old_year), str(new_year))
            new_text = new_base.replace(str(old_year), str(new_year))
            steps.append(
                InlineStep(
                    kind=StepKind.REWRITE_CLAUSE,
                    target=_ID_1F3AII,
                    justification=_ID_1F3C,
                    old=old_prefix,
                    new=new_text + ".",
                    phase=4,
                )
            )
    return InlinePlan(taxable_year=taxable_year, steps=tuple(steps))


def apply_inline_step(statute: Statute, step: InlineStep) -> Statute:
    if step.kind is StepKind.REMOVE_PROVISION:
        return remove_provision(statute, step.target)
    if step.kind is StepKind.SUBSTITUTE_AMOUNT:
        old = int(step.old.replace("$", "").replace(",", ""))

        def sub_amount(node: ProvisionNode) -> ProvisionNode:
            return _splice_first(node, LiteralKind.DOLLAR, old, step.new)

        return edit_provision(statute, step.target, sub_amount)
    if step.kind is StepKind.SUBSTITUTE_YEAR:
        old = int(step.old)

        def sub_year(node: ProvisionNode) -> ProvisionNode:
            return _splice_first(node, LiteralKind.YEAR, old, step.new)

        return edit_provision(statute, step.target, sub_year)

    def rewrite(node: ProvisionNode) -> ProvisionNode:
        text = normalize_quotes(" ".join(seg.raw for seg in node.body))
        if not text.startswith(step.old):
            raise LiteralMismatch(
                f"{node.id} does not begin with the text the rewrite replaces"
            )
        return dataclasses.replace(
            node, body=(TextSegment.from_raw(step.new),), tail=()
        )

    return edit_provision(statute, step.target, rewrite)


def inline(statute: Statute, taxable_year: int, upto: int | None = None) -> InlineResult:
    """Apply the full rewrite plan (or its first `upto` steps)."""
    plan = plan_inlining(statute, taxable_year)
    steps = plan.steps
    if upto is not None:
        if not 0 <= upto <= len(steps):
            raise TransformError(
                f"step {upto} out of range; the plan has {len(steps)} steps"
            )
        steps = steps[:upto]
    current = statute
    for step in steps:
        current = apply_inline_step(current, step)
    return InlineResult(statute=current, steps=tuple(steps))


# -- mutations ---------------------------------------------------------------


class MutationKind(enum.Enum):
    DELETE_CONJUNCT = "DeleteConjunct"
    REPLACE_AMOUNT = "ReplaceAmount"
    REPLACE_YEAR = "ReplaceYear"
    DELETE_PROVISION = "DeleteProvision"


_CONJUNCT_OPENERS = ("and ", "or ", "if ")


@dataclass(frozen=True)
class Mutation:
    """A validated edit; `apply` cannot silently no-op."""

    kind: MutationKind
    target: ProvisionId
    payload: str = ""
    old: int | None = None
    new: int | None = None
    label: str = ""

    def describe(self) -> str:
        if self.kind is MutationKind.DELETE_CONJUNCT:
            return f'{self.kind.value} {self.target} "{self.payload}"'
        if self.kind is MutationKind.DELETE_PROVISION:
            return f"{self.kind.value} {self.target}"
        return f"{self.kind.value} {self.target} {self.old} {self.new}"


def make_mutation(
    statute: Statute,
    kind: MutationKind,
    target: ProvisionId,
    payload: str = "",
    old: int | None = None,
    new: int | None = None,
    label: str = "",
) -> Mutation:
    """Build a mutation, checking it can actually act on `statute`."""
    node = statute.find(target)
    if node is None:
        raise TargetMissing(f"no provision {target} in the tree")
    if kind is MutationKind.DELETE_CONJUNCT:
        if not payload.startswith(_CONJUNCT_OPENERS):
            raise SpanMismatch(
                f"conjunct must open with one of {', '.join(_CONJUNCT_OPENERS)!s}"
            )
        _locate_conjunct(node, payload)
    elif kind is MutationKind.REPLACE_AMOUNT:
        if old is None or new is None or old < 0 or new < 0:
            raise TransformError("ReplaceAmount needs non-negative old and new amounts")
        _require_literal(node, LiteralKind.DOLLAR, old)
    elif kind is MutationKind.REPLACE_YEAR:
        if old is None or new is None or not (1900 <= new <= 2099):
            raise TransformError("ReplaceYear needs an old year and a 1900-2099 new year")
        _require_literal(node, LiteralKind.YEAR, old)
    if not label:
        label = f"{kind.value} {target}"
    return Mutation(kind=kind, target=target, payload=payload, old=old, new=new, label=label)


def _require_literal(node: ProvisionNode, kind: LiteralKind, value: int) -> None:
    for seg in node.segments():
        for lit in seg.literals:
            if lit.kind is kind and lit.value == value:
                return
    raise SpanMismatch(
        f"{node.id} does not contain the {kind.name.lower()} literal {value}"
    )


def _locate_conjunct(node: ProvisionNode, payload: str) -> tuple[bool, int, int]:
    """Find ` payload` in the node's text; returns (in_body, segment index,
    char offset of the preceding space)."""
    needle = " " + normalize_quotes(payload)
    for in_body, segs in ((True, node.body), (False, node.tail)):
        for i, seg in enumerate(segs):
            at = normalize_quotes(seg.raw).find(needle)
            if at < 0:
                continue
            after = seg.raw[at + len(needle) :]
            if after and after[0] not in ".,;: ":
                raise SpanMismatch(
                    f"deleting the conjunct would split a word in {node.id}"
                )
            if not (seg.raw[:at] + after).strip():
                raise SpanMismatch(f"conjunct is the whole text of {node.id}")
            return in_body, i, at
    raise SpanMismatch(f"{node.id} does not contain the conjunct {payload!r}")


def apply_mutation(statute: Statute, mutation: Mutation) -> Statute:
    if mutation.kind is MutationKind.DELETE_PROVISION:
        return remove_provision(statute, mutation.target)
    if mutation.kind is MutationKind.REPLACE_AMOUNT:

        def replace_amount(node: ProvisionNode) -> ProvisionNode:
            try:
                return _splice_first(
                    node, LiteralKind.DOLLAR, mutation.old, _format_dollars(mutation.new)
                )
            except LiteralMismatch as exc:
                raise SpanMismatch(str(exc)) from exc

        return edit_provision(statute, mutation.target, replace_amount)
    if mutation.kind is MutationKind.REPLACE_YEAR:

        def replace_year(node: ProvisionNode) -> ProvisionNode:
            try:
                return _splice_first(
                    node, LiteralKind.YEAR, mutation.old, str(mutation.new)
                )
            except LiteralMismatch as exc:
                raise SpanMismatch(str(exc)) from exc

        return edit_provision(statute, mutation.target, replace_year)

    def delete_conjunct(node: ProvisionNode) -> ProvisionNode:
        in_body, i, at = _locate_conjunct(node, mutation.payload)
        segs = list(node.body if in_body else node.tail)
        seg = segs[i]
        raw = seg.raw[:at] + seg.raw[at + 1 + len(mutation.payload) :]
        segs[i] = TextSegment.from_raw(raw)
        if in_body:
            return dataclasses.replace(node, body=tuple(segs))
        return dataclasses.replace(node, tail=tuple(segs))

    return edit_provision(statute, mutation.target, delete_conjunct)


def load_mutations(statute: Statute, text: str) -> list[Mutation]:
    """Parse a mutation spec: one `Kind §target payload...` per line,
    `#` comments allowed. Each line is validated against `statute`."""
    kinds = {k.value: k for k in MutationKind}
    out: list[Mutation] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            parts = shlex.split(line)
        except ValueError as exc:
            raise TransformError(f"mutation line {line_no}: {exc}") from exc
        if len(parts) < 2 or parts[0] not in kinds:
            raise TransformError(
                f"mutation line {line_no}: expected one of "
                f"{sorted(kinds)} followed by a citation"
            )
        kind = kinds[parts[0]]
        target = parse_citation(parts[1])
        try:
            if kind is MutationKind.DELETE_PROVISION:
                if len(parts) != 2:
                    raise TransformError("DeleteProvision takes no payload")
                out.append(make_mutation(statute, kind, target))
            elif kind is MutationKind.DELETE_CONJUNCT:
                if len(parts) != 3:
                    raise TransformError("DeleteConjunct takes one quoted conjunct")
                out.append(make_mutation(statute, kind, target, payload=parts[2]))
            else:
                if len(parts) != 4:
                    raise TransformError(f"{kind.value} takes old and new values")
                out.append(
                    make_mutation(
                        statute, kind, target, old=int(parts[2]), new=int(parts[3])
                    )
                )
        except TransformError as exc:
            raise TransformError(f"mutation line {line_no}: {exc}") from exc
    return out


# -- kill checking -----------------------------------------------------------


@dataclass(frozen=True)
class KillVerdict:
    """Whether one scenario distinguishes mutant from original.

    `differences` holds (field, original value, mutant value) rows: the
    money fields by name, and citations for provisions whose applied
    status flipped.
    """

    killed: bool
    differences: tuple[tuple[str, object, object], ...] = ()

    def describe(self) -> str:
        if not self.killed:
            return "Survived"
        rows = "; ".join(f"{f}: {a} vs {b}" for f, a, b in self.differences)
        return f"Killed ({rows})"


def _compare_results(base, mut) -> KillVerdict:
    names = ("taxable_income", "standard_deduction", "basic", "additional")
    diffs: list[tuple[str, object, object]] = [
        (n, b, m)
        for n, b, m in zip(names, base.money_fields(), mut.money_fields())
        if b != m
    ]
    base_applied = base.coverage.applied_set()
    mut_applied = mut.coverage.applied_set()
    for pid in sorted(base_applied ^ mut_applied, key=str):
        was = "applied" if pid in base_applied else "not applied"
        now = "applied" if pid in mut_applied else "not applied"
        diffs.append((str(pid), was, now))
    return KillVerdict(killed=bool(diffs), differences=tuple(diffs))


def kill_check(
    original: Statute,
    mutant: Statute,
    facts: TaxpayerFacts,
    cpi: CpiTable,
    rounding: RoundingMode = RoundingMode.FLOOR50,
    age_convention: AgeConvention = AgeConvention.ANNIVERSARY,
) -> KillVerdict:
    """Evaluate one scenario on both trees and report every differing
    field. Evaluation errors propagate; a scenario neither tree can
    evaluate proves nothing."""
    base = Evaluator(original, cpi, rounding, age_convention).evaluate(facts)
    mut = Evaluator(mutant, cpi, rounding, age_convention).evaluate(facts)
    return _compare_results(base, mut)


@dataclass(frozen=True)
class MutationSearchResult:
    """First killing scenario found, or None with the budget spent."""

    facts: TaxpayerFacts | None
    verdict: KillVerdict | None
    cases_tried: int
    cases_skipped: int
    seed: int

    @property
    def found(self) -> bool:
        return self.facts is not None


def mutation_search(
    original: Statute,
    mutant: Statute,
    config=None,
    budget: int = 10_000,
    seed: int = 0,
    cpi: CpiTable | None = None,
    rounding: RoundingMode = RoundingMode.FLOOR50,
    age_convention: AgeConvention = AgeConvention.ANNIVERSARY,
) -> MutationSearchResult:
    """Generate random scenarios until one kills the mutant. Scenarios
    either tree rejects are skipped; they distinguish nothing."""
    from .synth import GeneratorConfig, random_facts

    config = config if config is not None else GeneratorConfig()
    cpi_table = cpi if cpi is not None else CpiTable()
    base_ev = Evaluator(original, cpi_table, rounding, age_convention)
    mut_ev = Evaluator(mutant, cpi_table, rounding, age_convention)
    rng = random.Random(seed)
    skipped = 0
    for tried in range(1, budget + 1):
        facts = random_facts(rng, config)
        try:
            base = base_ev.evaluate(facts)
            mut = mut_ev.evaluate(facts)
        except EngineError:
            skipped += 1
            continue
        verdict = _compare_results(base, mut)
        if verdict.killed:
            return MutationSearchResult(
                facts=facts,
                verdict=verdict,
                cases_tried=tried,
                cases_skipped=skipped,
                seed=seed,
            )
    return MutationSearchResult(
        facts=None, verdict=None, cases_tried=budget, cases_skipped=skipped, seed=seed
    )
