"""Fact scenarios (who is filing, when, with what income) and the chained
CPI table the inflation adjustment reads from."""

from __future__ import annotations

import datetime
import enum
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction


class FactsError(ValueError):
    """Base class for scenario and CPI data errors."""


class MissingKey(FactsError):
    pass


class UnknownKey(FactsError):
    pass


class BadDate(FactsError):
    pass


class BadValue(FactsError):
    pass


class InconsistentSpouse(FactsError):
    """Spouse fields present or absent in the wrong filing status."""


class WrongCount(FactsError):
    """An annual average needs exactly twelve monthly values."""


class FilingStatus(enum.Enum):
    JOINT = "joint"
    SURVIVING_SPOUSE = "surviving_spouse"
    HEAD_OF_HOUSEHOLD = "head_of_household"
    SINGLE = "single"
    MARRIED_SEPARATE = "married_separate"

    @classmethod
    def from_text(cls, text: str) -> FilingStatus:
        try:
            return cls(text.strip().lower())
        except ValueError:
            names = ", ".join(s.value for s in cls)
            raise BadValue(f"unknown filing status {text!r} (expected one of: {names})")


# Statuses whose return includes a spouse of the filer.
SPOUSE_STATUSES = frozenset({FilingStatus.JOINT, FilingStatus.MARRIED_SEPARATE})


@dataclass(frozen=True)
class CpiValue:
    """A chained CPI index value, stored in integer tenths so arithmetic
    stays exact: CpiValue.parse("138.2").tenths == 1382."""

    tenths: int

    def __post_init__(self) -> None:
        if self.tenths < 0:
            raise BadValue("CPI values are non-negative")

    @classmethod
    def parse(cls, text: str) -> CpiValue:
        m = re.fullmatch(r"(\d+)\.(\d)", text.strip())
        if m is None:
            raise BadValue(f"CPI value {text!r} must have exactly one decimal place")
        return cls(int(m.group(1)) * 10 + int(m.group(2)))

    @classmethod
    def from_tenths(cls, tenths: int) -> CpiValue:
        return cls(tenths)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.tenths, 10)

    def __str__(self) -> str:
        return f"{self.tenths // 10}.{self.tenths % 10}"


@dataclass(frozen=True)
class CpiTable:
    """Annual average chained CPI by calendar year."""

    values: dict[int, CpiValue] = field(default_factory=dict)

    def get(self, year: int) -> CpiValue | None:
        return self.values.get(year)

    def with_value(self, year: int, value: CpiValue) -> CpiTable:
        merged = dict(self.values)
        merged[year] = value
        return CpiTable(merged)

    def render(self) -> str:
        return "".join(f"{year}\t{self.values[year]}\n" for year in sorted(self.values))


def load_cpi_table(text: str) -> CpiTable:
    """Parse "YYYY<TAB>value" lines (one decimal place) into a table."""
    values: dict[int, CpiValue] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2 or not parts[0].isdigit():
            raise BadValue(f"CPI line {line_no}: expected 'YYYY<TAB>value', got {line!r}")
        year = int(parts[0])
        if year in values:
            raise BadValue(f"CPI line {line_no}: duplicate year {year}")
        values[year] = CpiValue.parse(parts[1])
    return CpiTable(values)


def ccpiu_annual_average(monthly: list[CpiValue]) -> CpiValue:
    """Annual index from the twelve monthly values for the 12-month period
    ending on August 31 (September of the prior year through August).

    The mean is rounded half-up to one decimal place.
    """
    if len(monthly) != 12:
        raise WrongCount(f"need 12 monthly values, got {len(monthly)}")
    total = sum(v.tenths for v in monthly)
    # Half-up on tenths is floor(mean + 1/2); values are non-negative.
    return CpiValue(int(Fraction(total, 12) + Fraction(1, 2)))


@dataclass(frozen=True)
class TaxpayerFacts:
    """One filing scenario, sufficient to evaluate taxable income."""

    taxable_year: int
    filing_status: FilingStatus
    taxpayer_birth: datetime.date
    agi: int
    itemizes: bool = False
    spouse_birth: datetime.date | None = None
    spouse_gross_income: int = 0
    spouse_is_dependent_of_another: bool = False

    def __post_init__(self) -> None:
        if self.agi < 0:
            raise BadValue("adjusted gross income cannot be negative")
        if self.spouse_gross_income < 0:
            raise BadValue("spouse gross income cannot be negative")
        has_spouse = self.filing_status in SPOUSE_STATUSES
        if has_spouse and self.spouse_birth is None:
            raise InconsistentSpouse(
                f"{self.filing_status.value} returns need spouse_birth"
            )
        if not has_spouse and self.spouse_birth is not None:
            raise InconsistentSpouse(
                f"{self.filing_status.value} returns must not carry spouse_birth"
            )

    def replace(self, **changes) -> TaxpayerFacts:
        return replace(self, **changes)


_REQUIRED_KEYS = ("taxable_year", "filing_status", "taxpayer_birth", "agi", "itemizes")
_ALL_KEYS = _REQUIRED_KEYS + (
    "spouse_birth",
    "spouse_gross_income",
    "spouse_is_dependent_of_another",
)


def _parse_date(key: str, text: str) -> datetime.date:
    try:
        return datetime.date.fromisoformat(text.strip())
    except ValueError:
        raise BadDate(f"{key}: {text!r} is not a YYYY-MM-DD date")


def _parse_bool(key: str, text: str) -> bool:
    t = text.strip().lower()
    if t in ("true", "yes", "1"):
        return True
    if t in ("false", "no", "0"):
        return False
    raise BadValue(f"{key}: expected true or false, got {text!r}")


def _parse_int(key: str, text: str) -> int:
    t = text.strip().replace(",", "")
    if t.startswith("$"):
        t = t[1:]
    try:
        return int(t)
    except ValueError:
        raise BadValue(f"{key}: expected an integer, got {text!r}")


def load_facts(text: str) -> TaxpayerFacts:
    """Parse "key: value" lines into a scenario.

    Blank lines and '#' comments are skipped. Dates are YYYY-MM-DD; money
    is whole dollars. spouse_birth is required exactly when the filing
    status is joint or married_separate.
    """
    fields: dict[str, str] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if ":" not in line:
            raise BadValue(f"line {line_no}: expected 'key: value', got {line!r}")
        key, _, value = line.partition(":")
        key = key.strip()
        if key not in _ALL_KEYS:
            raise UnknownKey(f"line {line_no}: unknown key {key!r}")
        if key in fields:
            raise BadValue(f"line {line_no}: duplicate key {key!r}")
        fields[key] = value.strip()

    for key in _REQUIRED_KEYS:
        if key not in fields:
            raise MissingKey(f"missing required key {key!r}")

    status = FilingStatus.from_text(fields["filing_status"])
    spouse_birth = None
    if status in SPOUSE_STATUSES:
        if "spouse_birth" not in fields:
            raise MissingKey(f"{status.value} returns need spouse_birth")
        spouse_birth = _parse_date("spouse_birth", fields["spouse_birth"])
    elif "spouse_birth" in fields:
        raise InconsistentSpouse(
            f"{status.value} returns must not carry spouse_birth"
        )

    return TaxpayerFacts(
        taxable_year=_parse_int("taxable_year", fields["taxable_year"]),
        filing_status=status,
        taxpayer_birth=_parse_date("taxpayer_birth", fields["taxpayer_birth"]),
        agi=_parse_int("agi", fields["agi"]),
        itemizes=_parse_bool("itemizes", fields["itemizes"]),
        spouse_birth=spouse_birth,
        spouse_gross_income=_parse_int(
            "spouse_gross_income", fields.get("spouse_gross_income", "0")
        ),
        spouse_is_dependent_of_another=_parse_bool(
            "spouse_is_dependent_of_another",
            fields.get("spouse_is_dependent_of_another", "false"),
        ),
    )


def render_facts(facts: TaxpayerFacts) -> str:
    """Canonical "key: value" text; load_facts(render_facts(f)) == f."""
    lines = [
        f"taxable_year: {facts.taxable_year}",
        f"filing_status: {facts.filing_status.value}",
        f"taxpayer_birth: {facts.taxpayer_birth.isoformat()}",
    ]
    if facts.spouse_birth is not None:
        lines.append(f"spouse_birth: {facts.spouse_birth.isoformat()}")
    lines.extend(
        [
            f"agi: {facts.agi}",
            f"itemizes: {str(facts.itemizes).lower()}",
            f"spouse_gross_income: {facts.spouse_gross_income}",
            "spouse_is_dependent_of_another: "
            + str(facts.spouse_is_dependent_of_another).lower(),
        ]
    )
    return "\n".join(lines) + "\n"
