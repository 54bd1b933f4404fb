"""Deterministic evaluation of taxable income over the statute tree.

The engine is literal-driven: dollar amounts, year windows, substitution
pairs, and condition phrases are read from the provision text at each
evaluation, never hard-coded. Editing the tree (inlining a substitution,
deleting a conjunct, replacing an amount) therefore changes the result the
way a careful human reader would expect.

All money arithmetic is exact: dollar amounts are ints and the
cost-of-living ratio is a `fractions.Fraction` over CPI tenths.
"""

from __future__ import annotations

import datetime
import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .facts import CpiTable, FactsError, FilingStatus, TaxpayerFacts
from .model import (
    LiteralKind,
    ProvisionId,
    ProvisionNode,
    Statute,
    build_id,
    normalize_quotes,
)


class EngineError(ValueError):
    """Base class for evaluation failures."""


class UnsupportedYear(EngineError):
    """The taxable year falls outside the special-rule window the statute
    defines (or the window itself is gone)."""


class MissingCpiYear(EngineError):
    """The CPI table lacks a year the adjustment needs."""


class ItemizerUnsupported(EngineError):
    """Itemized deductions are out of scope; only the standard deduction
    path is modeled."""


class ElidedFormula(EngineError):
    """Evaluation would need text the corpus elides."""


class MalformedProvision(EngineError):
    """A provision no longer carries a literal the evaluation must read."""


class RoundingMode(enum.Enum):
    """How a non-multiple-of-$50 increase is brought to a multiple of $50.

    FLOOR50 follows the statute text ("rounded to the next lowest multiple
    of $50"). NEAREST50 rounds to the closest multiple, ties upward.
    """

    FLOOR50 = "floor50"
    NEAREST50 = "nearest50"


class AgeConvention(enum.Enum):
    """When a person "attains" an age: on the birthday itself, or the day
    before it (the common-law rule some agencies apply)."""

    ANNIVERSARY = "anniversary"
    DAY_BEFORE_BIRTHDAY = "day-before"


class CoverageStatus(enum.Enum):
    APPLIED = "applied"
    EVALUATED_NOT_APPLICABLE = "evaluated_not_applicable"
    OVERRIDDEN = "overridden"
    NOT_REACHED = "not_reached"


@dataclass
class CoverageReport:
    """Per-provision outcome of one evaluation.

    Every non-elided provision of the statute gets exactly one status;
    provisions the evaluation never consulted stay NOT_REACHED.
    `applied_order` lists provisions in the order their rules were applied.
    """

    statuses: dict[ProvisionId, CoverageStatus]
    applied_order: list[ProvisionId] = field(default_factory=list)
    document_order: list[ProvisionId] = field(default_factory=list)

    @classmethod
    def fresh(cls, statute: Statute) -> CoverageReport:
        statuses = {}
        order = []
        for node in statute.walk():
            if node.elided:
                continue
            statuses[node.id] = CoverageStatus.NOT_REACHED
            order.append(node.id)
        return cls(statuses=statuses, document_order=order)

    def mark_applied(self, pid: ProvisionId) -> None:
        if self.statuses.get(pid) is CoverageStatus.APPLIED:
            return
        self.statuses[pid] = CoverageStatus.APPLIED
        self.applied_order.append(pid)

    def mark(self, pid: ProvisionId, status: CoverageStatus) -> None:
        if status is CoverageStatus.APPLIED:
            self.mark_applied(pid)
            return
        # APPLIED is sticky: a rule that fired for one spouse stays applied
        # even if it later fails for the other.
        if self.statuses.get(pid) is CoverageStatus.APPLIED:
            return
        self.statuses[pid] = status

    def status_of(self, citation: str | ProvisionId) -> CoverageStatus:
        pid = citation if isinstance(citation, ProvisionId) else _parse(citation)
        return self.statuses.get(pid, CoverageStatus.NOT_REACHED)

    def applied_set(self) -> set[ProvisionId]:
        return {p for p, s in self.statuses.items() if s is CoverageStatus.APPLIED}


def _parse(citation: str) -> ProvisionId:
    from .model import parse_citation

    return parse_citation(citation)


@dataclass(frozen=True)
class EvalResult:
    """Outcome of one full taxable-income evaluation."""

    taxable_income: int
    standard_deduction: int
    basic: int
    additional: int
    coverage: CoverageReport
    cola_ratio: Fraction | None = None
    notes: tuple[str, ...] = ()

    def money_fields(self) -> tuple[int, int, int, int]:
        return (self.taxable_income, self.standard_deduction, self.basic, self.additional)


def round_increase(amount: Fraction, mode: RoundingMode) -> int:
    """Bring an exact increase to a multiple of $50 under `mode`."""
    if mode is RoundingMode.FLOOR50:
        return 50 * int(amount // 50)
    # Nearest multiple of 50, ties upward.
    return 50 * int((amount / 50 + Fraction(1, 2)).__floor__())


def attained_age(
    birth: datetime.date,
    age: int,
    taxable_year: int,
    convention: AgeConvention = AgeConvention.ANNIVERSARY,
) -> bool:
    """Has the person attained `age` before the close of `taxable_year`?

    ANNIVERSARY: the age is attained on the birthday. DAY_BEFORE_BIRTHDAY:
    one day earlier, which matters only for January 1 birthdays here.
    """
    target_year = birth.year + age
    try:
        birthday = birth.replace(year=target_year)
    except ValueError:
        # Feb 29 birthday in a non-leap year: anniversary falls on Mar 1.
        birthday = datetime.date(target_year, 3, 1)
    attain_date = birthday
    if convention is AgeConvention.DAY_BEFORE_BIRTHDAY:
        attain_date = birthday - datetime.timedelta(days=1)
    return attain_date <= datetime.date(taxable_year, 12, 31)


def cola(cpi: CpiTable, taxable_year: int, base_year: int) -> Fraction:
    """Cost-of-living ratio: how much the CPI for the year preceding
    `taxable_year` exceeds the CPI for `base_year`, clamped at zero.

    Exact over integer tenths; (2025, base 2017) with the bundled table is
    (1725 - 1382) / 1382 == Fraction(343, 1382).
    """
    if base_year <= 2016:
        raise UnsupportedYear(
            f"base year {base_year}: pre-2017 base years need the unchained "
            "CPI series, which is not modeled"
        )
    preceding = cpi.get(taxable_year - 1)
    if preceding is None:
        raise MissingCpiYear(f"no CPI value for calendar year {taxable_year - 1}")
    base = cpi.get(base_year)
    if base is None:
        raise MissingCpiYear(f"no CPI value for base calendar year {base_year}")
    if base.tenths == 0:
        raise MalformedProvision("CPI base value of zero")
    ratio = Fraction(preceding.tenths - base.tenths, base.tenths)
    return ratio if ratio > 0 else Fraction(0)


def format_percent(ratio: Fraction) -> str:
    """Display a ratio as a percentage truncated (not rounded) to two
    decimals: Fraction(343, 1382) -> "24.81%"."""
    hundredths = (ratio * 10000).__floor__()
    sign = "-" if hundredths < 0 else ""
    hundredths = abs(hundredths)
    return f"{sign}{hundredths // 100}.{hundredths % 100:02d}%"


_ID_63 = build_id("63")
_ID_63B = build_id("63", "b")
_ID_63B1 = build_id("63", "b", "1")
_ID_63C = build_id("63", "c")
_ID_63C1 = build_id("63", "c", "1")
_ID_63C1A = build_id("63", "c", "1", "A")
_ID_63C1B = build_id("63", "c", "1", "B")
_ID_63C2 = build_id("63", "c", "2")
_ID_63C2A = build_id("63", "c", "2", "A")
_ID_63C2AI = build_id("63", "c", "2", "A", "i")
_ID_63C2AII = build_id("63", "c", "2", "A", "ii")
_ID_63C2B = build_id("63", "c", "2", "B")
_ID_63C2C = build_id("63", "c", "2", "C")
_ID_63C3 = build_id("63", "c", "3")
_ID_63C4 = build_id("63", "c", "4")
_ID_63C7 = build_id("63", "c", "7")
_ID_63C7A = build_id("63", "c", "7", "A")
_ID_63C7AI = build_id("63", "c", "7", "A", "i")
_ID_63C7AII = build_id("63", "c", "7", "A", "ii")
_ID_63C7B = build_id("63", "c", "7", "B")
_ID_63C7BI = build_id("63", "c", "7", "B", "i")
_ID_63C7BII = build_id("63", "c", "7", "B", "ii")
_ID_63C7BII_I = build_id("63", "c", "7", "B", "ii", "I")
_ID_63C7BII_II = build_id("63", "c", "7", "B", "ii", "II")
_ID_63F = build_id("63", "f")
_ID_63F1 = build_id("63", "f", "1")
_ID_63F1A = build_id("63", "f", "1", "A")
_ID_63F1B = build_id("63", "f", "1", "B")
_ID_1 = build_id("1")
_ID_1F = build_id("1", "f")
_ID_1F3 = build_id("1", "f", "3")
_ID_1F3A = build_id("1", "f", "3", "A")
_ID_1F3AI = build_id("1", "f", "3", "A", "i")
_ID_1F3AII = build_id("1", "f", "3", "A", "ii")
_ID_1F3B = build_id("1", "f", "3", "B")
_ID_1F3BI = build_id("1", "f", "3", "B", "i")
_ID_1F3BII = build_id("1", "f", "3", "B", "ii")
_ID_1F3C = build_id("1", "f", "3", "C")
_ID_151 = build_id("151")
_ID_151B = build_id("151", "b")

# Which basic-amount slot each filing status reads, and whether the
# 200-percent multiplier of §63(c)(2)(A) applies.
_DOUBLED_STATUSES = frozenset({FilingStatus.JOINT, FilingStatus.SURVIVING_SPOUSE})

_SUB_AMOUNT_RE = re.compile(r'substituting "\$([\d,]+)" for "\$([\d,]+)"')
_SUB_YEAR_RE = re.compile(r'substituting "(\d{4})" for "(\d{4})"')
_AGE_PHRASE_RE = re.compile(r"attained age (\d+)")


def _node_text(node: ProvisionNode, with_tail: bool = False) -> str:
    segs = node.segments() if with_tail else node.body
    return normalize_quotes(" ".join(seg.raw for seg in segs))


def _lead_literal(node: ProvisionNode, kind: LiteralKind) -> int | None:
    for seg in node.body:
        for lit in seg.literals:
            if lit.kind is kind:
                return lit.value
    return None


def _lead_years(node: ProvisionNode) -> list[int]:
    years = []
    for seg in node.body:
        for lit in seg.literals:
            if lit.kind is LiteralKind.YEAR:
                years.append(lit.value)
    return years


class Evaluator:
    """Evaluates fact scenarios against one statute tree.

    The tree is indexed once; every `evaluate` call produces a fresh
    coverage report.
    """

    def __init__(
        self,
        statute: Statute,
        cpi: CpiTable,
        rounding: RoundingMode = RoundingMode.FLOOR50,
        age_convention: AgeConvention = AgeConvention.ANNIVERSARY,
    ):
        self.statute = statute
        self.cpi = cpi
        self.rounding = rounding
        self.age_convention = age_convention
        self._index: dict[ProvisionId, ProvisionNode] = {
            node.id: node for node in statute.walk()
        }

    def _get(self, pid: ProvisionId) -> ProvisionNode | None:
        return self._index.get(pid)

    # -- basic standard deduction ------------------------------------------

    def adjusted_basic_amount(
        self, taxable_year: int, slot: ProvisionId, cov: CoverageReport | None = None
    ) -> tuple[int, Fraction | None]:
        """The dollar amount in effect under `slot` (§63(c)(2)(B) or (C))
        for `taxable_year`: the special-rule substitution plus, after 2018,
        the rounded inflation increase."""
        cov = cov if cov is not None else CoverageReport.fresh(self.statute)
        p7 = self._get(_ID_63C7)
        if p7 is None:
            raise UnsupportedYear(
                "no special-rule window in this statute; only years it "
                "names are supported"
            )
        window = _lead_years(p7)
        if len(window) < 2:
            raise MalformedProvision(f"{_ID_63C7} no longer states its year window")
        lo, hi = window[0], window[1]
        if not (lo < taxable_year < hi):
            raise UnsupportedYear(
                f"taxable year {taxable_year} outside the supported window "
                f"({lo + 1}-{hi - 1})"
            )
        cov.mark_applied(_ID_63C7)

        slot_node = self._get(slot)
        if slot_node is None:
            raise MalformedProvision(f"no basic-amount provision {slot}")
        amount = _lead_literal(slot_node, LiteralKind.DOLLAR)
        if amount is None:
            raise MalformedProvision(f"{slot} no longer states a dollar amount")

        # Substitution of the increased amounts, read from the rule text.
        sub_id = _ID_63C7AI if slot == _ID_63C2B else _ID_63C7AII
        other_sub = _ID_63C7AII if sub_id == _ID_63C7AI else _ID_63C7AI
        pa = self._get(_ID_63C7A)
        if pa is not None:
            cov.mark_applied(_ID_63C7A)
            sub_node = self._get(sub_id)
            if sub_node is not None:
                m = _SUB_AMOUNT_RE.search(_node_text(sub_node))
                if m is not None:
                    new, old = (int(g.replace(",", "")) for g in m.groups())
                    if amount == old:
                        amount = new
                        cov.mark_applied(sub_id)
                    else:
                        # The substitution replaces a literal the slot no
                        # longer contains; it reads as a no-op.
                        cov.mark(sub_id, CoverageStatus.EVALUATED_NOT_APPLICABLE)
                else:
                    cov.mark(sub_id, CoverageStatus.EVALUATED_NOT_APPLICABLE)
            if self._get(other_sub) is not None:
                cov.mark(other_sub, CoverageStatus.EVALUATED_NOT_APPLICABLE)

        # The general inflation formula is switched off for these amounts.
        p4 = self._get(_ID_63C4)
        pbi = self._get(_ID_63C7BI)
        if self._get(_ID_63C7B) is not None:
            cov.mark_applied(_ID_63C7B)
        if p4 is not None:
            if pbi is None:
                raise ElidedFormula(
                    f"{_ID_63C4} would govern but its formula is elided and "
                    f"nothing overrides it"
                )
            cov.mark_applied(_ID_63C7BI)
            cov.mark(_ID_63C4, CoverageStatus.OVERRIDDEN)
        elif pbi is not None:
            cov.mark(_ID_63C7BI, CoverageStatus.EVALUATED_NOT_APPLICABLE)

        ratio: Fraction | None = None
        pbii = self._get(_ID_63C7BII)
        if pbii is not None and pa is not None:
            gate_years = _lead_years(pbii)
            if not gate_years:
                raise MalformedProvision(f"{_ID_63C7BII} no longer states its gate year")
            if taxable_year > gate_years[0]:
                cov.mark_applied(_ID_63C7BII)
                if self._get(_ID_63C7BII_I) is not None:
                    cov.mark_applied(_ID_63C7BII_I)
                ratio = self._cost_of_living_ratio(taxable_year, cov)
                increase = round_increase(amount * ratio, self.rounding)
                amount += increase
            else:
                cov.mark(_ID_63C7BII, CoverageStatus.EVALUATED_NOT_APPLICABLE)
        return amount, ratio

    def _cost_of_living_ratio(self, taxable_year: int, cov: CoverageReport) -> Fraction:
        """Resolve the base year through the substitution instruction, then
        compute the ratio from the chained CPI table."""
        pII = self._get(_ID_63C7BII_II)
        if pII is None:
            raise MalformedProvision(
                f"{_ID_63C7BII_II} (the cost-of-living cross-reference) is missing"
            )
        cov.mark_applied(_ID_63C7BII_II)
        f3 = self._get(_ID_1F3)
        if f3 is None:
            raise MalformedProvision(f"the adjustment rule {_ID_1F3} is missing")
        clause = self._get(_ID_1F3AII)
        if clause is None:
            raise MalformedProvision(f"the base-year clause {_ID_1F3AII} is missing")

        clause_years = _lead_years(clause)
        if not clause_years:
            raise MalformedProvision(f"{_ID_1F3AII} no longer names a base year")
        base_year = clause_years[0]
        m = _SUB_YEAR_RE.search(_node_text(pII))
        if m is not None:
            new_year, old_year = int(m.group(1)), int(m.group(2))
            if base_year == old_year:
                base_year = new_year

        for pid in (_ID_1, _ID_1F, _ID_1F3, _ID_1F3A, _ID_1F3AI, _ID_1F3AII):
            if self._get(pid) is not None:
                cov.mark_applied(pid)

        clause_text = _node_text(clause)
        if "C-CPI-U" not in clause_text:
            # The clause still reads against the unchained CPI; the special
            # base-year rule rewrites it to the chained series.
            fc = self._get(_ID_1F3C)
            if fc is None:
                raise UnsupportedYear(
                    "the base-year special rule is missing, and unchained "
                    "CPI comparisons are not modeled"
                )
            cov.mark_applied(_ID_1F3C)
            if self._get(_ID_1F3B) is not None:
                cov.mark(_ID_1F3B, CoverageStatus.OVERRIDDEN)
        return cola(self.cpi, taxable_year, base_year)

    def basic_standard_deduction(
        self, facts: TaxpayerFacts, cov: CoverageReport | None = None
    ) -> tuple[int, Fraction | None]:
        cov = cov if cov is not None else CoverageReport.fresh(self.statute)
        c2 = self._get(_ID_63C2)
        if c2 is None:
            raise MalformedProvision(f"no basic standard deduction rule {_ID_63C2}")
        cov.mark_applied(_ID_63C2)

        status = facts.filing_status
        doubled = status in _DOUBLED_STATUSES
        if doubled:
            slot = _ID_63C2C
            cov.mark_applied(_ID_63C2A)
            cov.mark(
                _ID_63C2AI,
                CoverageStatus.APPLIED
                if status is FilingStatus.JOINT
                else CoverageStatus.EVALUATED_NOT_APPLICABLE,
            )
            cov.mark(
                _ID_63C2AII,
                CoverageStatus.APPLIED
                if status is FilingStatus.SURVIVING_SPOUSE
                else CoverageStatus.EVALUATED_NOT_APPLICABLE,
            )
            cov.mark(_ID_63C2B, CoverageStatus.EVALUATED_NOT_APPLICABLE)
        elif status is FilingStatus.HEAD_OF_HOUSEHOLD:
            slot = _ID_63C2B
            for pid in (_ID_63C2A, _ID_63C2AI, _ID_63C2AII, _ID_63C2C):
                cov.mark(pid, CoverageStatus.EVALUATED_NOT_APPLICABLE)
        else:
            slot = _ID_63C2C
            for pid in (_ID_63C2A, _ID_63C2AI, _ID_63C2AII, _ID_63C2B):
                cov.mark(pid, CoverageStatus.EVALUATED_NOT_APPLICABLE)
        cov.mark_applied(slot)

        amount, ratio = self.adjusted_basic_amount(facts.taxable_year, slot, cov)
        if doubled:
            a_node = self._get(_ID_63C2A)
            percent = _lead_literal(a_node, LiteralKind.PERCENTAGE) if a_node else None
            if percent is None:
                raise MalformedProvision(f"{_ID_63C2A} no longer states its percentage")
            scaled = Fraction(amount * percent, 100)
            if scaled.denominator != 1:
                raise MalformedProvision(
                    f"{percent} percent of ${amount} is not a whole dollar amount"
                )
            amount = int(scaled)
        return amount, ratio

    # -- additional standard deduction -------------------------------------

    def additional_standard_deduction(
        self, facts: TaxpayerFacts, cov: CoverageReport | None = None
    ) -> tuple[int, list[str]]:
        cov = cov if cov is not None else CoverageReport.fresh(self.statute)
        notes: list[str] = []
        c3 = self._get(_ID_63C3)
        f_node = self._get(_ID_63F)
        f1 = self._get(_ID_63F1)
        if c3 is None or f1 is None:
            for pid, node in ((_ID_63C3, c3), (_ID_63F, f_node), (_ID_63F1, f1)):
                if node is not None:
                    cov.mark(pid, CoverageStatus.EVALUATED_NOT_APPLICABLE)
            return 0, notes

        amount = _lead_literal(f1, LiteralKind.DOLLAR)
        if amount is None:
            raise MalformedProvision(f"{_ID_63F1} no longer states its dollar amount")

        # On a joint return both spouses are taxpayers of the return, so
        # each can earn the self amount; on a separate return only the
        # filer is the taxpayer.
        pairs: list[tuple[datetime.date, datetime.date | None]]
        if facts.filing_status is FilingStatus.JOINT:
            assert facts.spouse_birth is not None
            pairs = [
                (facts.taxpayer_birth, facts.spouse_birth),
                (facts.spouse_birth, facts.taxpayer_birth),
            ]
        elif facts.filing_status is FilingStatus.MARRIED_SEPARATE:
            pairs = [(facts.taxpayer_birth, facts.spouse_birth)]
        else:
            pairs = [(facts.taxpayer_birth, None)]

        pa = self._get(_ID_63F1A)
        pb = self._get(_ID_63F1B)
        total = 0
        for self_birth, spouse_birth in pairs:
            if pa is not None:
                if self._age_test(pa, self_birth, facts.taxable_year):
                    total += amount
                    cov.mark_applied(_ID_63F1A)
                else:
                    cov.mark(_ID_63F1A, CoverageStatus.EVALUATED_NOT_APPLICABLE)
            if pb is not None:
                granted = self._spouse_amount_applies(pb, spouse_birth, facts, cov)
                if granted:
                    total += amount
                    cov.mark_applied(_ID_63F1B)
                else:
                    cov.mark(_ID_63F1B, CoverageStatus.EVALUATED_NOT_APPLICABLE)

        if total > 0 and self._get(_ID_63C4) is not None:
            notes.append(
                f"inflation adjustment of the {_ID_63F} amounts is stated by "
                f"{_ID_63C4}, whose formula is elided; no adjustment applied"
            )
        outcome = (
            CoverageStatus.APPLIED if total > 0 else CoverageStatus.EVALUATED_NOT_APPLICABLE
        )
        cov.mark(_ID_63C3, outcome)
        cov.mark(_ID_63F1, outcome)
        if f_node is not None:
            cov.mark(_ID_63F, outcome)
        return total, notes

    def _age_test(self, node: ProvisionNode, birth: datetime.date, year: int) -> bool:
        """Apply the node's "attained age N" condition; a node whose text
        no longer states one imposes no age requirement."""
        m = _AGE_PHRASE_RE.search(_node_text(node, with_tail=True))
        if m is None:
            return True
        return attained_age(birth, int(m.group(1)), year, self.age_convention)

    def _spouse_amount_applies(
        self,
        node: ProvisionNode,
        spouse_birth: datetime.date | None,
        facts: TaxpayerFacts,
        cov: CoverageReport,
    ) -> bool:
        if spouse_birth is None:
            return False
        if not self._age_test(node, spouse_birth, facts.taxable_year):
            return False
        text = _node_text(node, with_tail=True)
        if "section 151(b)" in text:
            return self._exemption_allowable(facts, cov)
        # The exemption conjunct is gone; the age test alone controls.
        return True

    def _exemption_allowable(self, facts: TaxpayerFacts, cov: CoverageReport) -> bool:
        """Is an exemption for the spouse allowable to the taxpayer? The
        conditions are read from the exemption rule's own text."""
        node = self._get(_ID_151B)
        if node is None:
            return False
        text = _node_text(node, with_tail=True)
        ok = True
        if "a joint return is not made" in text:
            ok = ok and facts.filing_status is not FilingStatus.JOINT
        if "no gross income" in text:
            ok = ok and facts.spouse_gross_income == 0
        if "not the dependent of another taxpayer" in text:
            ok = ok and not facts.spouse_is_dependent_of_another
        status = (
            CoverageStatus.APPLIED if ok else CoverageStatus.EVALUATED_NOT_APPLICABLE
        )
        cov.mark(_ID_151B, status)
        if self._get(_ID_151) is not None:
            cov.mark(_ID_151, status)
        return ok

    # -- the full computation ----------------------------------------------

    def standard_deduction(
        self, facts: TaxpayerFacts, cov: CoverageReport | None = None
    ) -> tuple[int, int, int, Fraction | None, list[str]]:
        """Returns (standard deduction, basic, additional, ratio, notes)."""
        cov = cov if cov is not None else CoverageReport.fresh(self.statute)
        if facts.itemizes:
            raise ItemizerUnsupported(
                "itemized deductions are not modeled; only non-itemizing "
                "scenarios can be evaluated"
            )
        if self._get(_ID_63C) is not None:
            cov.mark_applied(_ID_63C)
        c1 = self._get(_ID_63C1)
        if c1 is None:
            raise MalformedProvision(f"no standard deduction sum rule {_ID_63C1}")
        cov.mark_applied(_ID_63C1)
        if self._get(_ID_63C1A) is not None:
            cov.mark_applied(_ID_63C1A)
        basic, ratio = self.basic_standard_deduction(facts, cov)
        additional, notes = self.additional_standard_deduction(facts, cov)
        if self._get(_ID_63C1B) is not None:
            cov.mark(
                _ID_63C1B,
                CoverageStatus.APPLIED
                if additional > 0
                else CoverageStatus.EVALUATED_NOT_APPLICABLE,
            )
        return basic + additional, basic, additional, ratio, notes

    def evaluate(self, facts: TaxpayerFacts) -> EvalResult:
        """Taxable income for a non-itemizing scenario; may be negative."""
        cov = CoverageReport.fresh(self.statute)
        if facts.itemizes:
            raise ItemizerUnsupported(
                "itemized deductions are not modeled; only non-itemizing "
                "scenarios can be evaluated"
            )
        if self._get(_ID_63) is not None:
            cov.mark_applied(_ID_63)
        b = self._get(_ID_63B)
        if b is None:
            raise MalformedProvision(f"no taxable-income rule {_ID_63B} for non-itemizers")
        cov.mark_applied(_ID_63B)
        sd, basic, additional, ratio, notes = self.standard_deduction(facts, cov)
        if self._get(_ID_63B1) is not None:
            cov.mark_applied(_ID_63B1)
        return EvalResult(
            taxable_income=facts.agi - sd,
            standard_deduction=sd,
            basic=basic,
            additional=additional,
            coverage=cov,
            cola_ratio=ratio,
            notes=tuple(notes),
        )


def special_rule_window(statute: Statute) -> tuple[int, int]:
    """First and last taxable years the special rules cover, read from the
    rule's own text."""
    p7 = statute.find(_ID_63C7)
    if p7 is None:
        raise UnsupportedYear("no special-rule window in this statute")
    years = _lead_years(p7)
    if len(years) < 2:
        raise MalformedProvision(f"{_ID_63C7} no longer states its year window")
    return years[0] + 1, years[1] - 1


def adjustment_gate_year(statute: Statute) -> int:
    """Last taxable year that takes the increased amounts unadjusted."""
    node = statute.find(_ID_63C7BII)
    if node is None:
        raise MalformedProvision(f"{_ID_63C7BII} is missing")
    years = _lead_years(node)
    if not years:
        raise MalformedProvision(f"{_ID_63C7BII} no longer states its gate year")
    return years[0]


# -- module-level helpers mirroring the evaluator's operations --------------


def adjusted_basic_amount(
    statute: Statute,
    taxable_year: int,
    slot: ProvisionId,
    cpi: CpiTable,
    rounding: RoundingMode = RoundingMode.FLOOR50,
) -> int:
    ev = Evaluator(statute, cpi, rounding)
    amount, _ = ev.adjusted_basic_amount(taxable_year, slot)
    return amount


def basic_standard_deduction(
    statute: Statute,
    facts: TaxpayerFacts,
    cpi: CpiTable,
    rounding: RoundingMode = RoundingMode.FLOOR50,
    age_convention: AgeConvention = AgeConvention.ANNIVERSARY,
) -> int:
    ev = Evaluator(statute, cpi, rounding, age_convention)
    amount, _ = ev.basic_standard_deduction(facts)
    return amount


def additional_standard_deduction(
    statute: Statute,
    facts: TaxpayerFacts,
    age_convention: AgeConvention = AgeConvention.ANNIVERSARY,
) -> int:
    ev = Evaluator(statute, CpiTable(), RoundingMode.FLOOR50, age_convention)
    amount, _ = ev.additional_standard_deduction(facts)
    return amount


def standard_deduction(
    statute: Statute,
    facts: TaxpayerFacts,
    cpi: CpiTable,
    rounding: RoundingMode = RoundingMode.FLOOR50,
    age_convention: AgeConvention = AgeConvention.ANNIVERSARY,
) -> int:
    ev = Evaluator(statute, cpi, rounding, age_convention)
    sd, _, _, _, _ = ev.standard_deduction(facts)
    return sd


def taxable_income(
    statute: Statute,
    facts: TaxpayerFacts,
    cpi: CpiTable,
    rounding: RoundingMode = RoundingMode.FLOOR50,
    age_convention: AgeConvention = AgeConvention.ANNIVERSARY,
) -> EvalResult:
    return Evaluator(statute, cpi, rounding, age_convention).evaluate(facts)


BASIC_SLOT_HOH = _ID_63C2B
BASIC_SLOT_OTHER = _ID_63C2C
