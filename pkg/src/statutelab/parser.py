"""Parse statute text into provision trees and render trees back to text.

The source format mirrors how compiled tax statutes are printed:

* a section starts at column zero with "§63. Taxable income defined";
* enumerated provisions open with "(b)", "(1)", "(A)", "(i)", "(I)" at the
  start of a line, nesting by indentation (a child is indented strictly
  deeper than its parent enumerator; exact columns are not significant);
* a line containing only "..." marks elided source text;
* any other line is a text paragraph of the nearest enclosing provision.

Text on an enumerator line is a heading when it starts with a capital
letter and does not end in sentence punctuation ("(c) Standard deduction");
otherwise it is the first body paragraph ("(C) $3,000 in any other case.").
Paragraphs that appear after a provision's children are kept as flush
`tail` text so rendering preserves document order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import (
    KIND_CHAIN,
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
    child_kind,
    elided_label,
    fits_any_kind,
    label_value,
    make_label,
    validate_section,
)


class StatuteParseError(ValueError):
    def __init__(self, message: str, line_no: int | None = None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class MalformedEnumerator(StatuteParseError):
    """An enumerator label that belongs to no label alphabet."""


class IndentationJump(StatuteParseError):
    """An enumerator whose label kind does not fit one level below its parent."""


class DuplicateSibling(StatuteParseError):
    """Two siblings with the same enumerator label."""


class NonMonotonicSibling(StatuteParseError):
    """A sibling label that does not increase over the one before it."""


_SECTION_RE = re.compile(r"^§\s*(\d+)\.\s+(\S.*)$")
_ENUM_RE = re.compile(r"^(\s*)\(([0-9a-zA-Z]+)\)(?:\s+(\S.*))?$")
_HEADING_RE = re.compile(r"^[A-Z]")
_ELISION_MARKS = {"...", "…"}


def _is_heading(rest: str) -> bool:
    return bool(_HEADING_RE.match(rest)) and rest[-1] not in ",.;:—-"


@dataclass
class _Builder:
    """Mutable node under construction."""

    indent: int
    label: Label
    path: tuple[Label, ...]
    heading: str | None = None
    body: list[TextSegment] = field(default_factory=list)
    children: list["_Builder"] = field(default_factory=list)
    tail: list[TextSegment] = field(default_factory=list)
    elided: bool = False
    elided_count: int = 0

    def add_text(self, segment: TextSegment) -> None:
        if self.children:
            self.tail.append(segment)
        else:
            self.body.append(segment)

    def freeze(self) -> ProvisionNode:
        return ProvisionNode(
            id=ProvisionId(self.path),
            heading=self.heading,
            body=tuple(self.body),
            children=tuple(kid.freeze() for kid in self.children),
            tail=tuple(self.tail),
            elided=self.elided,
        )


def parse_statute(source: str) -> Statute:
    """Parse statute text into a tree of provisions, one root per section."""
    sections: list[_Builder] = []
    stack: list[_Builder] = []

    def attach_child(parent: _Builder, kid: _Builder) -> None:
        parent.children.append(kid)

    for line_no, raw_line in enumerate(source.splitlines(), start=1):
        line = raw_line.replace("﻿", "").expandtabs(4).rstrip()
        if not line.strip():
            continue

        m = _SECTION_RE.match(line)
        if m is not None:
            label = make_label(LabelKind.SECTION, m.group(1))
            root = _Builder(indent=-1, label=label, path=(label,), heading=m.group(2))
            sections.append(root)
            stack = [root]
            continue

        if not stack:
            raise StatuteParseError("text before any section header", line_no)

        indent = len(line) - len(line.lstrip())
        stripped = line.strip()

        if stripped in _ELISION_MARKS:
            while len(stack) > 1 and stack[-1].indent >= indent:
                stack.pop()
            parent = stack[-1]
            parent.elided_count += 1
            label = elided_label(parent.elided_count)
            kid = _Builder(
                indent=indent, label=label, path=parent.path + (label,), elided=True
            )
            attach_child(parent, kid)
            continue

        m = _ENUM_RE.match(line)
        if m is not None:
            label_text = m.group(2)
            rest = m.group(3) or ""
            while len(stack) > 1 and stack[-1].indent >= indent:
                stack.pop()
            parent = stack[-1]
            expected = child_kind(parent.label.kind)
            if expected is None:
                raise IndentationJump(
                    f"({label_text}) nests below {ProvisionId(parent.path)}, which "
                    "cannot have enumerated children",
                    line_no,
                )
            if label_value(expected, label_text) is None:
                if fits_any_kind(label_text):
                    raise IndentationJump(
                        f"({label_text}) is not a {expected.value} label; it skips "
                        f"or repeats a nesting level under {ProvisionId(parent.path)}",
                        line_no,
                    )
                raise MalformedEnumerator(
                    f"({label_text}) is not a valid enumerator label", line_no
                )
            label = make_label(expected, label_text)
            for sib in parent.children:
                if sib.label.kind is label.kind and sib.label.value == label.value:
                    raise DuplicateSibling(
                        f"({label_text}) duplicates an earlier sibling under "
                        f"{ProvisionId(parent.path)}",
                        line_no,
                    )
            last = next(
                (
                    sib.label.value
                    for sib in reversed(parent.children)
                    if sib.label.kind is label.kind
                ),
                None,
            )
            if last is not None and label.value < last:
                raise NonMonotonicSibling(
                    f"({label_text}) goes backwards after an earlier sibling", line_no
                )
            kid = _Builder(indent=indent, label=label, path=parent.path + (label,))
            if rest:
                if _is_heading(rest):
                    kid.heading = rest
                else:
                    kid.body.append(TextSegment.from_raw(rest))
            attach_child(parent, kid)
            stack.append(kid)
            continue

        # Plain text paragraph: attach to the deepest provision whose
        # enumerator sits left of this line.
        owner = None
        for builder in reversed(stack):
            if builder.indent < indent:
                owner = builder
                break
        if owner is None:
            owner = stack[0]
        owner.add_text(TextSegment.from_raw(stripped))

    if not sections:
        raise StatuteParseError("no section headers found")
    roots = tuple(sec.freeze() for sec in sections)
    for root in roots:
        validate_section(root)
    return Statute(sections=roots)


def _render_node(node: ProvisionNode, depth: int, out: list[str]) -> None:
    indent = "    " * depth
    if node.elided:
        out.append(indent + "...")
        return
    enum = f"({node.label.text})"
    body = list(node.body)
    if node.heading is not None:
        out.append(f"{indent}{enum} {node.heading}")
    elif body:
        out.append(f"{indent}{enum} {body.pop(0).raw}")
    else:
        out.append(indent + enum)
    deeper = "    " * (depth + 1)
    for seg in body:
        out.append(deeper + seg.raw)
    for kid in node.children:
        _render_node(kid, depth + 1, out)
    for seg in node.tail:
        out.append(deeper + seg.raw)


def render_statute(statute: Statute) -> str:
    """Canonical text: four spaces per depth, one blank line between blocks."""
    blocks: list[str] = []
    for sec in statute.sections:
        blocks.append(f"§{sec.id.section}. {sec.heading}")
        for seg in sec.body:
            blocks.append("    " + seg.raw)
        for kid in sec.children:
            kid_blocks: list[str] = []
            _render_node(kid, 1, kid_blocks)
            blocks.extend(kid_blocks)
        for seg in sec.tail:
            blocks.append("    " + seg.raw)
    return "\n\n".join(blocks) + "\n"


@dataclass(frozen=True)
class CrossRef:
    """A cross-reference found in provision text, resolved when possible."""

    source: ProvisionId
    target: ProvisionId | None
    raw: str
    resolved: bool
    reason: str | None = None


_KEYWORD_KINDS = {
    "section": LabelKind.SECTION,
    "subsection": LabelKind.SUBSECTION,
    "paragraph": LabelKind.PARAGRAPH,
    "subparagraph": LabelKind.SUBPARAGRAPH,
    "clause": LabelKind.CLAUSE,
}


def _extend_path(base: tuple[Label, ...], labels: tuple[str, ...]) -> tuple[Label, ...]:
    path = base
    for text in labels:
        depth = len(path)
        if depth >= len(KIND_CHAIN):
            raise ModelError("reference nests deeper than the model allows")
        path = path + (make_label(KIND_CHAIN[depth], text),)
    return path


def _resolve_phrase(
    phrase: RefPhrase,
    source: ProvisionId,
    last_target: ProvisionId | None,
) -> tuple[ProvisionId | None, str | None]:
    """Build the absolute target of one reference phrase.

    Relative references resolve against the source provision's ancestry;
    "... thereof" resolves against the previous reference in the same
    sentence. Returns (target, failure reason).
    """
    if phrase.keyword.startswith("this "):
        kind_name = phrase.keyword.split(" ", 1)[1]
        if kind_name in ("title", "subtitle"):
            kind = LabelKind.SUBSECTION
        else:
            kind = _KEYWORD_KINDS[kind_name]
        anchor = source.ancestor_of_kind(kind)
        if anchor is None:
            return source, None
        return anchor, None

    if phrase.thereof and last_target is not None:
        try:
            return ProvisionId(_extend_path(last_target.path, phrase.labels)), None
        except ModelError as exc:
            return None, str(exc)

    if phrase.keyword == "section":
        assert phrase.section is not None
        try:
            base = (make_label(LabelKind.SECTION, phrase.section),)
            return ProvisionId(_extend_path(base, phrase.labels)), None
        except ModelError as exc:
            return None, str(exc)

    kind = _KEYWORD_KINDS[phrase.keyword]
    anchor_kind_idx = KIND_CHAIN.index(kind) - 1
    anchor = source.ancestor_of_kind(KIND_CHAIN[anchor_kind_idx])
    if anchor is None:
        return None, f"no enclosing {KIND_CHAIN[anchor_kind_idx].value} to anchor {phrase.keyword!r}"
    try:
        return ProvisionId(_extend_path(anchor.path, phrase.labels)), None
    except ModelError as exc:
        return None, str(exc)


def resolve_cross_refs(statute: Statute) -> list[CrossRef]:
    """Resolve every cross-reference literal in the statute, in document
    order. Targets outside the corpus are flagged unresolved, not dropped."""
    results: list[CrossRef] = []
    for node in statute.walk():
        for seg in node.segments():
            last_target: ProvisionId | None = None
            for lit in seg.literals:
                if lit.kind is not LiteralKind.CROSS_REF:
                    continue
                phrase = lit.ref
                assert phrase is not None
                raw = _phrase_raw(seg, lit, phrase)
                target, reason = _resolve_phrase(phrase, node.id, last_target)
                if target is not None and statute.find(target) is None:
                    results.append(
                        CrossRef(node.id, target, raw, False, "no such provision in corpus")
                    )
                    last_target = target
                    continue
                if target is None:
                    results.append(CrossRef(node.id, None, raw, False, reason))
                    continue
                results.append(CrossRef(node.id, target, raw, True))
                last_target = target
    return results


def _phrase_raw(seg: TextSegment, lit: Literal, phrase: RefPhrase) -> str:
    if phrase.keyword.startswith("this "):
        return seg.raw[lit.start : lit.end]
    text = seg.raw[lit.start : lit.end]
    suffix = " thereof" if phrase.thereof else ""
    return f"{phrase.keyword} {text}{suffix}"
