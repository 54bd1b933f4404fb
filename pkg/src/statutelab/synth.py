"""Search for fact scenarios whose evaluation hits chosen provisions.

A predicate names provisions and the coverage status each must end with,
e.g. `§63(f)(1)(A)=applied & §63(f)(1)(B)!=applied`. The searcher draws
random scenarios from a seeded generator and returns the first one whose
coverage report satisfies every condition. Finding nothing within the
budget is a reported outcome, not an error.
"""

from __future__ import annotations

import datetime
import random
from dataclasses import dataclass

from .engine import CoverageReport, CoverageStatus, EngineError, Evaluator
from .facts import SPOUSE_STATUSES, FilingStatus, TaxpayerFacts
from .model import ProvisionId, parse_citation


class PredicateError(ValueError):
    """A coverage predicate that cannot be parsed."""


@dataclass(frozen=True)
class Condition:
    target: ProvisionId
    status: CoverageStatus
    negated: bool = False

    def holds(self, coverage: CoverageReport) -> bool:
        actual = coverage.status_of(self.target)
        return (actual is not self.status) if self.negated else (actual is self.status)

    def render(self) -> str:
        op = "!=" if self.negated else "="
        return f"{self.target}{op}{self.status.value}"


@dataclass(frozen=True)
class Predicate:
    conditions: tuple[Condition, ...]

    def matches(self, coverage: CoverageReport) -> bool:
        return all(c.holds(coverage) for c in self.conditions)

    def render(self) -> str:
        return " & ".join(c.render() for c in self.conditions)


_STATUS_NAMES = {s.value: s for s in CoverageStatus}


def parse_predicate(text: str) -> Predicate:
    conditions = []
    for part in text.split("&"):
        part = part.strip()
        if not part:
            raise PredicateError("empty condition in predicate")
        negated = "!=" in part
        op = "!=" if negated else "="
        left, sep, right = part.partition(op)
        if not sep:
            raise PredicateError(
                f"condition {part!r} lacks an operator (= or !=)"
            )
        status_name = right.strip()
        if status_name not in _STATUS_NAMES:
            raise PredicateError(
                f"unknown status {status_name!r}; expected one of "
                f"{', '.join(sorted(_STATUS_NAMES))}"
            )
        try:
            target = parse_citation(left.strip())
        except ValueError as exc:
            raise PredicateError(f"bad citation in condition {part!r}: {exc}") from exc
        conditions.append(
            Condition(target=target, status=_STATUS_NAMES[status_name], negated=negated)
        )
    if not conditions:
        raise PredicateError("predicate has no conditions")
    return Predicate(conditions=tuple(conditions))


@dataclass(frozen=True)
class GeneratorConfig:
    """Ranges the random scenario generator draws from."""

    year_lo: int = 2018
    year_hi: int = 2025
    birth_year_lo: int = 1930
    birth_year_hi: int = 2000
    agi_max: int = 500_000
    spouse_income_max: int = 100_000
    spouse_income_zero_rate: float = 0.5
    dependent_rate: float = 0.1


def _random_birth(rng: random.Random, config: GeneratorConfig) -> datetime.date:
    # Day capped at 28 so every month works.
    return datetime.date(
        rng.randint(config.birth_year_lo, config.birth_year_hi),
        rng.randint(1, 12),
        rng.randint(1, 28),
    )


def random_facts(
    rng: random.Random, config: GeneratorConfig = GeneratorConfig()
) -> TaxpayerFacts:
    """One random non-itemizing scenario. Money comes in $50 steps so
    generated cases land on the same grid the statute rounds to."""
    status = rng.choice(list(FilingStatus))
    spouse_birth = None
    spouse_gross = 0
    dependent = False
    if status in SPOUSE_STATUSES:
        spouse_birth = _random_birth(rng, config)
        if rng.random() >= config.spouse_income_zero_rate:
            spouse_gross = rng.randrange(0, config.spouse_income_max + 1, 50)
        dependent = rng.random() < config.dependent_rate
    return TaxpayerFacts(
        taxable_year=rng.randint(config.year_lo, config.year_hi),
        filing_status=status,
        taxpayer_birth=_random_birth(rng, config),
        agi=rng.randrange(0, config.agi_max + 1, 50),
        itemizes=False,
        spouse_birth=spouse_birth,
        spouse_gross_income=spouse_gross,
        spouse_is_dependent_of_another=dependent,
    )


@dataclass(frozen=True)
class SynthResult:
    """Outcome of a predicate search; `facts` is None when the budget ran
    out without a hit."""

    predicate: Predicate
    facts: TaxpayerFacts | None
    cases_tried: int
    cases_rejected: int

    @property
    def found(self) -> bool:
        return self.facts is not None


def synthesize_example(
    evaluator: Evaluator,
    predicate: Predicate,
    rng: random.Random,
    iterations: int = 1000,
    config: GeneratorConfig = GeneratorConfig(),
) -> SynthResult:
    """Draw scenarios until one's coverage satisfies `predicate`.

    Scenarios the evaluator rejects (years outside the window, for
    instance) count as rejected draws, not matches or errors.
    """
    rejected = 0
    for tried in range(1, iterations + 1):
        facts = random_facts(rng, config)
        try:
            result = evaluator.evaluate(facts)
        except EngineError:
            rejected += 1
            continue
        if predicate.matches(result.coverage):
            return SynthResult(
                predicate=predicate,
                facts=facts,
                cases_tried=tried,
                cases_rejected=rejected,
            )
    return SynthResult(
        predicate=predicate,
        facts=None,
        cases_tried=iterations,
        cases_rejected=rejected,
    )
