"""Statute tree model: provision identifiers, provision nodes, and the
literals (dollar amounts, years, percentages, cross-references) extracted
from provision text."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field


class ModelError(ValueError):
    """Raised when a label, citation, or tree violates the model invariants."""


class LabelKind(enum.Enum):
    SECTION = "section"
    SUBSECTION = "subsection"        # (a) (b) ... lowercase letters
    PARAGRAPH = "paragraph"          # (1) (2) ... digits
    SUBPARAGRAPH = "subparagraph"    # (A) (B) ... capital letters
    CLAUSE = "clause"                # (i) (ii) ... lowercase roman
    SUBCLAUSE = "subclause"          # (I) (II) ... capital roman
    ELIDED = "elided"                # "..." placeholder for omitted text


# Nesting order as the corpus uses it: a section contains lettered
# subsections, which contain numbered paragraphs, then capital
# subparagraphs, then roman clauses, then capital-roman subclauses.
KIND_CHAIN = (
    LabelKind.SECTION,
    LabelKind.SUBSECTION,
    LabelKind.PARAGRAPH,
    LabelKind.SUBPARAGRAPH,
    LabelKind.CLAUSE,
    LabelKind.SUBCLAUSE,
)


def child_kind(kind: LabelKind) -> LabelKind | None:
    """The label kind expected one nesting level below `kind`."""
    idx = KIND_CHAIN.index(kind)
    if idx + 1 < len(KIND_CHAIN):
        return KIND_CHAIN[idx + 1]
    return None


_ROMAN_VALUES = {"i": 1, "v": 5, "x": 10, "l": 50, "c": 100, "d": 500, "m": 1000}


def parse_roman(text: str) -> int | None:
    """Value of a lowercase roman numeral, or None if `text` is not one."""
    if not text or any(ch not in _ROMAN_VALUES for ch in text):
        return None
    total = 0
    prev = 0
    for ch in reversed(text):
        val = _ROMAN_VALUES[ch]
        if val < prev:
            total -= val
        else:
            total += val
            prev = val
    return total if total > 0 else None


def alpha_value(text: str) -> int | None:
    """Ordinal of a letter label: a=1 .. z=26, aa=27, ab=28, ..."""
    if not text or not text.isalpha():
        return None
    total = 0
    for ch in text.lower():
        total = total * 26 + (ord(ch) - ord("a") + 1)
    return total


def label_value(kind: LabelKind, text: str) -> int | None:
    """Sibling-ordering value of `text` read as a `kind` label, or None."""
    if kind in (LabelKind.SECTION, LabelKind.PARAGRAPH):
        return int(text) if text.isdigit() else None
    if kind is LabelKind.SUBSECTION:
        return alpha_value(text) if text.islower() else None
    if kind is LabelKind.SUBPARAGRAPH:
        return alpha_value(text) if text.isupper() else None
    if kind is LabelKind.CLAUSE:
        return parse_roman(text) if text.islower() else None
    if kind is LabelKind.SUBCLAUSE:
        return parse_roman(text.lower()) if text.isupper() else None
    return None


def fits_any_kind(text: str) -> bool:
    """True if `text` is a well-formed enumerator label of any kind."""
    return any(label_value(kind, text) is not None for kind in KIND_CHAIN)


@dataclass(frozen=True)
class Label:
    """One path component of a provision identifier."""

    kind: LabelKind
    text: str
    value: int  # ordinal used for sibling ordering

    def render(self) -> str:
        return "…" if self.kind is LabelKind.ELIDED else self.text


def make_label(kind: LabelKind, text: str) -> Label:
    value = label_value(kind, text)
    if value is None:
        raise ModelError(f"label {text!r} is not a valid {kind.value} label")
    return Label(kind, text, value)


def elided_label(ordinal: int) -> Label:
    return Label(LabelKind.ELIDED, "…", ordinal)


@dataclass(frozen=True)
class ProvisionId:
    """Path of labels from a section root down to one provision."""

    path: tuple[Label, ...]

    def __post_init__(self) -> None:
        if not self.path or self.path[0].kind is not LabelKind.SECTION:
            raise ModelError("a provision id must start at a section")

    def render(self) -> str:
        head = f"§{self.path[0].text}"
        return head + "".join(f"({lab.render()})" for lab in self.path[1:])

    def __str__(self) -> str:
        return self.render()

    @property
    def depth(self) -> int:
        return len(self.path) - 1

    @property
    def section(self) -> str:
        return self.path[0].text

    def parent(self) -> ProvisionId | None:
        if len(self.path) == 1:
            return None
        return ProvisionId(self.path[:-1])

    def child(self, label: Label) -> ProvisionId:
        return ProvisionId(self.path + (label,))

    def ancestor_of_kind(self, kind: LabelKind) -> ProvisionId | None:
        """Nearest ancestor-or-self whose last label has `kind`."""
        for cut in range(len(self.path), 0, -1):
            if self.path[cut - 1].kind is kind:
                return ProvisionId(self.path[:cut])
        return None

    def is_ancestor_of(self, other: ProvisionId) -> bool:
        return (
            len(self.path) < len(other.path)
            and other.path[: len(self.path)] == self.path
        )


_CITATION_RE = re.compile(r"§\s*(\d+)((?:\([0-9a-zA-Z]+\))*)$")
_CITATION_PART_RE = re.compile(r"\(([0-9a-zA-Z]+)\)")


def parse_citation(text: str) -> ProvisionId:
    """Parse a rendered citation such as "§63(c)(2)(C)" back to an id.

    Label kinds are assigned by nesting depth, so an ambiguous label like
    "i" reads as a letter at subsection depth and a roman at clause depth.
    """
    m = _CITATION_RE.match(text.strip())
    if m is None:
        raise ModelError(f"not a provision citation: {text!r}")
    labels = [make_label(LabelKind.SECTION, m.group(1))]
    for i, part in enumerate(_CITATION_PART_RE.findall(m.group(2))):
        depth = i + 1
        if depth >= len(KIND_CHAIN):
            raise ModelError(f"citation {text!r} nests deeper than the model allows")
        labels.append(make_label(KIND_CHAIN[depth], part))
    return ProvisionId(tuple(labels))


def build_id(section: str, *parts: str) -> ProvisionId:
    """Convenience constructor: build_id("63", "c", "2", "C")."""
    return parse_citation(f"§{section}" + "".join(f"({p})" for p in parts))


def render_id(pid: ProvisionId) -> str:
    """Canonical citation text for an id: §63(c)(2)(C)."""
    return pid.render()


# Whole signed dollars. Money stays in exact integer arithmetic end to end;
# fractions appear only transiently inside the cost-of-living ratio.
DollarAmount = int


class LiteralKind(enum.Enum):
    DOLLAR = "dollar"
    YEAR = "year"
    PERCENTAGE = "percentage"
    CROSS_REF = "cross_ref"


@dataclass(frozen=True)
class RefPhrase:
    """Un-resolved payload of a cross-reference literal.

    `keyword` is the singular reference word as written ("section",
    "paragraph", "this subsection", ...). For section references `section`
    holds the section number; `labels` holds the parenthesized parts.
    """

    keyword: str
    section: str | None
    labels: tuple[str, ...]
    thereof: bool


@dataclass(frozen=True)
class Literal:
    """A literal extracted from a text segment, located by character span."""

    kind: LiteralKind
    start: int
    end: int
    value: int | None = None
    ref: RefPhrase | None = None


def normalize_quotes(text: str) -> str:
    """Map curly quotes to straight ones; the mapping preserves length, so
    spans computed on normalized text are valid on the raw text."""
    return (
        text.replace("“", '"')
        .replace("”", '"')
        .replace("‘", "'")
        .replace("’", "'")
    )


_DOLLAR_RE = re.compile(r"\$(\d{1,3}(?:,\d{3})*)(?!\d)")
_YEAR_RE = re.compile(r"(?<![0-9$,.])((?:19|20)\d{2})(?![0-9])")
_PERCENT_RE = re.compile(r"(\d+) percent\b")
_REF_KEYWORD_RE = re.compile(
    r"\b([Ss]ections?|[Ss]ubsections?|[Pp]aragraphs?|[Ss]ubparagraphs?|[Cc]lauses?)\b"
)
_REF_PART = r"\((?:[0-9]+|[a-z]{1,2}|[A-Z]{1,2}|[ivxlc]+|[IVXLC]+)\)"
_REF_ITEM_RE = re.compile(r"\s+((?:" + _REF_PART + r")+)")
_REF_SECTION_ITEM_RE = re.compile(r"\s+(\d+(?:" + _REF_PART + r")*)")
_REF_CONTINUE_RE = re.compile(
    r"(?:,\s*(?:and\s+|or\s+)?|\s+(?:and|or)\s+)((?:" + _REF_PART + r")+)"
)
_REF_THEREOF_RE = re.compile(r"\s+thereof\b")
_THIS_REF_RE = re.compile(
    r"\bthis (section|subsection|subtitle|title|paragraph|subparagraph|clause)\b"
)
_SECTION_NUM_RE = re.compile(r"(\d+)((?:" + _REF_PART + r")*)")


def _extract_cross_refs(text: str) -> list[Literal]:
    refs: list[Literal] = []
    for m in _REF_KEYWORD_RE.finditer(text):
        keyword = m.group(1).lower().rstrip("s")
        item_re = _REF_SECTION_ITEM_RE if keyword == "section" else _REF_ITEM_RE
        item = item_re.match(text, m.end())
        if item is None:
            continue
        pos = item.end()
        items = [(item.start(1), item.end(1), item.group(1))]
        while True:
            cont = _REF_CONTINUE_RE.match(text, pos)
            if cont is None:
                break
            items.append((cont.start(1), cont.end(1), cont.group(1)))
            pos = cont.end()
        for start, end, raw_item in items:
            thereof = _REF_THEREOF_RE.match(text, end) is not None
            if keyword == "section":
                sec = _SECTION_NUM_RE.match(raw_item)
                assert sec is not None
                labels = tuple(_CITATION_PART_RE.findall(sec.group(2)))
                phrase = RefPhrase(keyword, sec.group(1), labels, thereof)
            else:
                labels = tuple(_CITATION_PART_RE.findall(raw_item))
                phrase = RefPhrase(keyword, None, labels, thereof)
            refs.append(Literal(LiteralKind.CROSS_REF, start, end, ref=phrase))
    for m in _THIS_REF_RE.finditer(text):
        phrase = RefPhrase("this " + m.group(1), None, (), False)
        refs.append(Literal(LiteralKind.CROSS_REF, m.start(), m.end(), ref=phrase))
    return refs


def extract_literals(raw: str) -> tuple[Literal, ...]:
    """All literals of `raw`, sorted by span start; spans never overlap."""
    text = normalize_quotes(raw)
    found: list[Literal] = []
    for m in _DOLLAR_RE.finditer(text):
        value = int(m.group(1).replace(",", ""))
        found.append(Literal(LiteralKind.DOLLAR, m.start(), m.end(), value))
    for m in _PERCENT_RE.finditer(text):
        found.append(Literal(LiteralKind.PERCENTAGE, m.start(1), m.end(1), int(m.group(1))))
    for m in _YEAR_RE.finditer(text):
        found.append(Literal(LiteralKind.YEAR, m.start(1), m.end(1), int(m.group(1))))
    found.extend(_extract_cross_refs(text))
    found.sort(key=lambda lit: (lit.start, lit.end))
    prev_end = -1
    for lit in found:
        if lit.start < prev_end:
            raise ModelError(f"overlapping literal spans in {raw!r}")
        prev_end = lit.end
    return tuple(found)


@dataclass(frozen=True)
class TextSegment:
    """One paragraph of provision text plus the literals found in it."""

    raw: str
    literals: tuple[Literal, ...] = field(default_factory=tuple)

    @classmethod
    def from_raw(cls, raw: str) -> TextSegment:
        return cls(raw=raw, literals=extract_literals(raw))

    def literal_text(self, lit: Literal) -> str:
        return self.raw[lit.start : lit.end]

    def splice(self, lit: Literal, replacement: str) -> TextSegment:
        """New segment with `lit`'s span replaced; literals re-extracted."""
        return TextSegment.from_raw(self.raw[: lit.start] + replacement + self.raw[lit.end :])


@dataclass(frozen=True)
class ProvisionNode:
    """One provision: identifier, optional heading, text, children.

    `body` holds the paragraphs that precede any children; `tail` holds
    flush continuation paragraphs that follow the children (for example a
    rounding sentence after the last subclause). An elided node stands for
    omitted source text and carries no text or children of its own.
    """

    id: ProvisionId
    heading: str | None = None
    body: tuple[TextSegment, ...] = ()
    children: tuple[ProvisionNode, ...] = ()
    tail: tuple[TextSegment, ...] = ()
    elided: bool = False

    @property
    def label(self) -> Label:
        return self.id.path[-1]

    def walk(self):
        yield self
        for kid in self.children:
            yield from kid.walk()

    def find(self, target: ProvisionId) -> ProvisionNode | None:
        if target == self.id:
            return self
        for kid in self.children:
            if kid.id == target or kid.id.is_ancestor_of(target):
                return kid.find(target)
        return None

    def segments(self) -> tuple[TextSegment, ...]:
        return self.body + self.tail


@dataclass(frozen=True)
class Statute:
    """A parsed corpus: one root node per section, in document order."""

    sections: tuple[ProvisionNode, ...]

    def walk(self):
        for sec in self.sections:
            yield from sec.walk()

    def find(self, target: ProvisionId) -> ProvisionNode | None:
        for sec in self.sections:
            if sec.id == target or sec.id.is_ancestor_of(target):
                return sec.find(target)
        return None

    def require(self, target: ProvisionId) -> ProvisionNode:
        node = self.find(target)
        if node is None:
            raise ModelError(f"no provision {target} in this statute")
        return node


def validate_section(root: ProvisionNode) -> None:
    """Check the structural invariants of one section tree."""
    if root.id.depth != 0:
        raise ModelError(f"section root {root.id} has a nested id")
    for node in root.walk():
        if node.elided and (node.body or node.children or node.heading or node.tail):
            raise ModelError(f"elided node {node.id} must be empty")
        seen: dict[tuple[LabelKind, int], ProvisionId] = {}
        last_value: int | None = None
        for kid in node.children:
            if kid.id.parent() != node.id or len(kid.id.path) != len(node.id.path) + 1:
                raise ModelError(f"{kid.id} does not extend {node.id} by one label")
            lab = kid.label
            if lab.kind is LabelKind.ELIDED:
                continue
            expected = child_kind(node.label.kind)
            if expected is not None and lab.kind is not expected:
                raise ModelError(f"{kid.id}: expected a {expected.value} label")
            key = (lab.kind, lab.value)
            if key in seen:
                raise ModelError(f"duplicate sibling label {kid.id}")
            seen[key] = kid.id
            if last_value is not None and lab.value <= last_value:
                raise ModelError(f"sibling labels not increasing at {kid.id}")
            last_value = lab.value


def dollar_amounts(node: ProvisionNode) -> set[int]:
    """Distinct dollar amounts stated by the provisions under `node`.

    Counts the lead body text of each provision, where operative amounts
    live; flush continuation text (procedural sentences such as rounding
    instructions) is not part of the census.
    """
    amounts: set[int] = set()
    for n in node.walk():
        for seg in n.body:
            for lit in seg.literals:
                if lit.kind is LiteralKind.DOLLAR:
                    amounts.add(lit.value)
    return amounts
