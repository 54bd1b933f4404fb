"""Property checks over the evaluation, with seeded search and shrinking.

The headline property is cross-year monotonicity: with the statute fixed,
does the single-filer basic standard deduction ever fall from one taxable
year to a later one? Each case pins hypothetical index values for the two
years' lookups (the base year keeps its published value) and compares the
two deductions. The property is genuinely falsifiable: the statute measures
each year against the base year, not against the prior year, so a dip in
the index between two years drags the later deduction below the earlier
one. The harness searches for such a case and shrinks any hit to a tight
one: adjacent years, the smallest earlier index and the largest later
index that still violate.

Three named fixed properties are expected to hold and give the searcher
something it should fail to falsify.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, replace
from typing import Callable

from .engine import (
    BASIC_SLOT_OTHER,
    EngineError,
    Evaluator,
    RoundingMode,
    adjustment_gate_year,
    special_rule_window,
)
from .facts import CpiTable, CpiValue
from .model import LiteralKind, Statute, build_id, normalize_quotes

FIXED_PROPERTY_NAMES = (
    "cpi-monotone-within-year",
    "floor-bound",
    "decomposition",
)
PROPERTY_NAMES = ("monotonicity",) + FIXED_PROPERTY_NAMES

# Hypothetical index values range over [100.0, 200.0] in tenths.
TENTHS_LO = 1000
TENTHS_HI = 2000


class PropertyError(ValueError):
    """A search setup that makes no sense (empty budget, missing clause)."""


class UnknownProperty(PropertyError):
    """A property name the harness does not define."""


@dataclass(frozen=True)
class MonotonicityCase:
    """Two taxable years with pinned index values for their lookups.

    `ix` and `iy` are the index values for calendar years x-1 and y-1. A
    pin that would land on the base year itself is ignored, so a
    first-supported-year x (which performs no lookup) keeps its meaning.
    """

    x: int
    y: int
    ix: CpiValue
    iy: CpiValue

    def render(self) -> str:
        return f"x={self.x} (index {self.ix}), y={self.y} (index {self.iy})"


@dataclass(frozen=True)
class CaseVerdict:
    """Holds or Violated, with both deductions. Violated iff dy < dx."""

    dx: int
    dy: int

    @property
    def violated(self) -> bool:
        return self.dy < self.dx

    @property
    def holds(self) -> bool:
        return not self.violated

    def render(self) -> str:
        word = "Violated" if self.violated else "Holds"
        return f"{word} (dx={self.dx}, dy={self.dy})"


def _base_year_and_value(statute: Statute, cpi: CpiTable) -> tuple[int, CpiValue]:
    """The base calendar year the index clause resolves to (after the
    special rules' year substitution) and its published value."""
    clause = statute.find(build_id("1", "f", "3", "A", "ii"))
    if clause is None:
        raise PropertyError("the index clause is missing; nothing to test")
    years = [
        lit.value
        for seg in clause.body
        for lit in seg.literals
        if lit.kind is LiteralKind.YEAR
    ]
    if not years:
        raise PropertyError("the index clause no longer names a base year")
    base = years[0]
    node = statute.find(build_id("63", "c", "7", "B", "ii", "II"))
    if node is not None:
        text = normalize_quotes(" ".join(seg.raw for seg in node.segments()))
        m = re.search(r'substituting "(\d{4})" for "(\d{4})"', text)
        if m is not None and base == int(m.group(2)):
            base = int(m.group(1))
    published = cpi.get(base)
    if published is None:
        raise PropertyError(f"no published index value for base year {base}")
    return base, published


def check_case(
    statute: Statute,
    case: MonotonicityCase,
    rounding: RoundingMode = RoundingMode.FLOOR50,
    cpi: CpiTable | None = None,
) -> CaseVerdict:
    """Both single-filer basic amounts under the case's pinned values.

    `cpi` supplies the base year's published value; the bundled table is
    used when omitted.
    """
    if cpi is None:
        from .data import load_default_cpi

        cpi = load_default_cpi()
    base, published = _base_year_and_value(statute, cpi)
    values = {base: published}
    if case.x - 1 != base:
        values[case.x - 1] = case.ix
    if case.y - 1 != base:
        values[case.y - 1] = case.iy
    ev = Evaluator(statute, CpiTable(values), rounding)
    dx, _ = ev.adjusted_basic_amount(case.x, BASIC_SLOT_OTHER)
    dy, _ = ev.adjusted_basic_amount(case.y, BASIC_SLOT_OTHER)
    return CaseVerdict(dx=dx, dy=dy)


def generate_case(
    rng: random.Random, year_range: tuple[int, int] = (2018, 2025)
) -> MonotonicityCase:
    """A uniform ordered year pair with uniform index tenths."""
    lo, hi = year_range
    pairs = [(x, y) for x in range(lo, hi + 1) for y in range(x + 1, hi + 1)]
    if not pairs:
        raise PropertyError(f"year range {year_range} admits no ordered pairs")
    x, y = rng.choice(pairs)
    return MonotonicityCase(
        x=x,
        y=y,
        ix=CpiValue(rng.randint(TENTHS_LO, TENTHS_HI)),
        iy=CpiValue(rng.randint(TENTHS_LO, TENTHS_HI)),
    )


def shrink_case(
    prop: Callable[[MonotonicityCase], CaseVerdict], case: MonotonicityCase
) -> MonotonicityCase:
    """Deterministically tighten a violating case while it keeps violating:
    pull the years adjacent, then walk ix down and iy up one tenth at a
    time to the violation boundary."""

    def violated(c: MonotonicityCase) -> bool:
        try:
            return prop(c).violated
        except EngineError:
            return False

    current = case
    while current.y - current.x > 1:
        narrowed = replace(current, y=current.y - 1)
        if violated(narrowed):
            current = narrowed
            continue
        narrowed = replace(current, x=current.x + 1)
        if violated(narrowed):
            current = narrowed
            continue
        break
    while current.ix.tenths > TENTHS_LO:
        lowered = replace(current, ix=CpiValue(current.ix.tenths - 1))
        if not violated(lowered):
            break
        current = lowered
    while current.iy.tenths < TENTHS_HI:
        raised = replace(current, iy=CpiValue(current.iy.tenths + 1))
        if not violated(raised):
            break
        current = raised
    return current


@dataclass(frozen=True)
class FalsificationReport:
    """A found violation: the raw first hit and its shrunk form, both
    re-checked."""

    seed: int
    iterations_run: int
    first_violation: MonotonicityCase
    first_verdict: CaseVerdict
    shrunk_violation: MonotonicityCase
    shrunk_verdict: CaseVerdict
    rounding: RoundingMode

    def summary(self) -> str:
        return (
            f"monotonicity violated (seed {self.seed}, case "
            f"{self.iterations_run}): first {self.first_violation.render()} "
            f"gave {self.first_verdict.render()}; shrunk to "
            f"{self.shrunk_violation.render()} giving "
            f"{self.shrunk_verdict.render()}"
        )


@dataclass(frozen=True)
class Exhausted:
    """No violating case within the budget."""

    seed: int
    iterations_run: int
    rounding: RoundingMode

    def summary(self) -> str:
        return (
            f"no counterexample in {self.iterations_run} cases "
            f"(seed {self.seed})"
        )


def falsify(
    statute: Statute,
    prop: Callable[[MonotonicityCase], CaseVerdict] | None = None,
    iterations: int = 10_000,
    seed: int = 0,
    rounding: RoundingMode = RoundingMode.FLOOR50,
    cpi: CpiTable | None = None,
) -> FalsificationReport | Exhausted:
    """Search for a case `prop` marks Violated; shrink the first hit.

    `prop` defaults to the cross-year monotonicity check against
    `statute`. Cases the evaluation rejects outright are drawn against the
    budget but prove nothing.
    """
    if iterations < 1:
        raise PropertyError("iterations must be at least 1")
    if prop is None:

        def prop(case: MonotonicityCase) -> CaseVerdict:
            return check_case(statute, case, rounding, cpi)

    year_range = special_rule_window(statute)
    rng = random.Random(seed)
    for i in range(1, iterations + 1):
        case = generate_case(rng, year_range)
        try:
            verdict = prop(case)
        except EngineError:
            continue
        if verdict.violated:
            shrunk = shrink_case(prop, case)
            return FalsificationReport(
                seed=seed,
                iterations_run=i,
                first_violation=case,
                first_verdict=verdict,
                shrunk_violation=shrunk,
                shrunk_verdict=prop(shrunk),
                rounding=rounding,
            )
    return Exhausted(seed=seed, iterations_run=iterations, rounding=rounding)


@dataclass(frozen=True)
class PropertyResult:
    """Outcome of a fixed-property suite run."""

    name: str
    seed: int
    samples_run: int
    passed: bool
    witnesses: tuple[str, ...] = ()

    def summary(self) -> str:
        if self.passed:
            return (
                f"{self.name}: pass over {self.samples_run} samples "
                f"(seed {self.seed})"
            )
        return f"{self.name}: FAIL: {'; '.join(self.witnesses)}"


def _sample_cpi_monotone(
    statute: Statute, cpi: CpiTable, rng: random.Random, rounding: RoundingMode
) -> str | None:
    """For a fixed year, a larger preceding-year index value must never
    shrink the deduction."""
    _, last = special_rule_window(statute)
    gate = adjustment_gate_year(statute)
    if gate + 1 > last:
        return None
    year = rng.randint(gate + 1, last)
    base, published = _base_year_and_value(statute, cpi)
    if year - 1 == base:
        return None
    c1 = rng.randint(TENTHS_LO, TENTHS_HI)
    c2 = rng.randint(c1, TENTHS_HI)
    d = []
    for c in (c1, c2):
        ev = Evaluator(
            statute, CpiTable({base: published, year - 1: CpiValue(c)}), rounding
        )
        d.append(ev.adjusted_basic_amount(year, BASIC_SLOT_OTHER)[0])
    if d[0] > d[1]:
        return (
            f"year {year}: index {CpiValue(c1)} gives {d[0]} but larger "
            f"index {CpiValue(c2)} gives {d[1]}"
        )
    return None


def _sample_floor_bound(
    statute: Statute, cpi: CpiTable, rng: random.Random, rounding: RoundingMode
) -> str | None:
    """The adjusted amount never falls below the substituted base amount
    (the ratio clamps at zero)."""
    first, last = special_rule_window(statute)
    base, published = _base_year_and_value(statute, cpi)
    bound, _ = Evaluator(statute, CpiTable(), rounding).adjusted_basic_amount(
        first, BASIC_SLOT_OTHER
    )
    year = rng.randint(first, last)
    values = {base: published}
    if year - 1 != base:
        values[year - 1] = CpiValue(rng.randint(TENTHS_LO, TENTHS_HI))
    ev = Evaluator(statute, CpiTable(values), rounding)
    amount, _ = ev.adjusted_basic_amount(year, BASIC_SLOT_OTHER)
    if amount < bound:
        return f"year {year}: deduction {amount} fell below the floor {bound}"
    return None


def _sample_decomposition(
    statute: Statute, cpi: CpiTable, rng: random.Random, rounding: RoundingMode
) -> str | None:
    """The standard deduction is exactly basic plus additional."""
    from .synth import random_facts

    facts = random_facts(rng)
    try:
        result = Evaluator(statute, cpi, rounding).evaluate(facts)
    except EngineError:
        return None
    if result.standard_deduction != result.basic + result.additional:
        return (
            f"{result.standard_deduction} != {result.basic} + "
            f"{result.additional} for year {facts.taxable_year}, "
            f"{facts.filing_status.value}"
        )
    return None


_FIXED_SAMPLERS = {
    "cpi-monotone-within-year": _sample_cpi_monotone,
    "floor-bound": _sample_floor_bound,
    "decomposition": _sample_decomposition,
}


def check_fixed_property(
    statute: Statute,
    name: str,
    samples: int = 1000,
    seed: int = 0,
    rounding: RoundingMode = RoundingMode.FLOOR50,
    cpi: CpiTable | None = None,
) -> PropertyResult:
    """Run a named always-expected-to-hold property over random samples;
    the first witness fails the suite."""
    sampler = _FIXED_SAMPLERS.get(name)
    if sampler is None:
        raise UnknownProperty(
            f"unknown property {name!r}; expected one of "
            f"{', '.join(FIXED_PROPERTY_NAMES)}"
        )
    if samples < 1:
        raise PropertyError("samples must be at least 1")
    if cpi is None:
        from .data import load_default_cpi

        cpi = load_default_cpi()
    rng = random.Random(seed)
    for i in range(1, samples + 1):
        try:
            witness = sampler(statute, cpi, rng, rounding)
        except EngineError:
            continue
        if witness is not None:
            return PropertyResult(
                name=name, seed=seed, samples_run=i, passed=False, witnesses=(witness,)
            )
    return PropertyResult(name=name, seed=seed, samples_run=samples, passed=True)
