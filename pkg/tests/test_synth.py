import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from statutelab import (
    CoverageStatus,
    Evaluator,
    FilingStatus,
    GeneratorConfig,
    PredicateError,
    SPOUSE_STATUSES,
    build_id,
    parse_predicate,
    random_facts,
    synthesize_example,
)


def test_parse_predicate_two_conditions():
    pred = parse_predicate("§63(f)(1)(A)=applied & §63(f)(1)(B)!=applied")
    assert len(pred.conditions) == 2
    first, second = pred.conditions
    assert first.target == build_id("63", "f", "1", "A")
    assert first.status is CoverageStatus.APPLIED
    assert not first.negated
    assert second.negated
    assert pred.render() == "§63(f)(1)(A)=applied & §63(f)(1)(B)!=applied"


def test_parse_predicate_whitespace_tolerant():
    pred = parse_predicate("  §63(c)(4) = overridden ")
    assert pred.conditions[0].status is CoverageStatus.OVERRIDDEN


def test_parse_predicate_errors():
    with pytest.raises(PredicateError):
        parse_predicate("")
    with pytest.raises(PredicateError):
        parse_predicate("§63(b)=applied & ")
    with pytest.raises(PredicateError):
        parse_predicate("§63(b)")
    with pytest.raises(PredicateError):
        parse_predicate("§63(b)=sideways")
    with pytest.raises(PredicateError):
        parse_predicate("63b=applied")


def test_random_facts_deterministic():
    a = random_facts(random.Random(11))
    b = random_facts(random.Random(11))
    assert a == b


@given(st.integers(min_value=0, max_value=2**32))
def test_random_facts_well_formed(seed):
    facts = random_facts(random.Random(seed))
    assert 2018 <= facts.taxable_year <= 2025
    assert facts.agi % 50 == 0
    assert facts.spouse_gross_income % 50 == 0
    assert not facts.itemizes
    has_spouse = facts.filing_status in SPOUSE_STATUSES
    assert (facts.spouse_birth is not None) == has_spouse


def test_random_facts_honors_config():
    config = GeneratorConfig(year_lo=2020, year_hi=2020, agi_max=100)
    rng = random.Random(0)
    for _ in range(25):
        facts = random_facts(rng, config)
        assert facts.taxable_year == 2020
        assert facts.agi <= 100


def test_synthesize_finds_aged_taxpayer(statute, cpi):
    ev = Evaluator(statute, cpi)
    pred = parse_predicate("§63(f)(1)(A)=applied")
    result = synthesize_example(ev, pred, random.Random(5), iterations=500)
    assert result.found
    assert result.cases_tried >= 1
    check = ev.evaluate(result.facts)
    assert pred.matches(check.coverage)


def test_synthesize_negated_condition(statute, cpi):
    ev = Evaluator(statute, cpi)
    pred = parse_predicate("§63(f)(1)(A)=applied & §63(f)(1)(B)!=applied")
    result = synthesize_example(ev, pred, random.Random(7), iterations=500)
    assert result.found
    cov = ev.evaluate(result.facts).coverage
    assert cov.status_of("§63(f)(1)(A)") is CoverageStatus.APPLIED
    assert cov.status_of("§63(f)(1)(B)") is not CoverageStatus.APPLIED


def test_synthesize_exhausts_budget_on_impossible(statute, cpi):
    # §63(b) is applied by every successful evaluation; failures are
    # rejected draws, so this predicate can never match.
    ev = Evaluator(statute, cpi)
    pred = parse_predicate("§63(b)=not_reached")
    result = synthesize_example(ev, pred, random.Random(1), iterations=120)
    assert not result.found
    assert result.facts is None
    assert result.cases_tried == 120


def test_synthesize_counts_rejections(statute, cpi):
    ev = Evaluator(statute, cpi)
    pred = parse_predicate("§63(b)=applied")
    config = GeneratorConfig(year_lo=2000, year_hi=2010)
    result = synthesize_example(ev, pred, random.Random(2), iterations=50, config=config)
    assert not result.found
    assert result.cases_rejected == 50


def test_married_separate_spouse_status(statute, cpi):
    # The generator must be able to reach the spousal clause.
    ev = Evaluator(statute, cpi)
    pred = parse_predicate("§63(f)(1)(B)=applied")
    result = synthesize_example(ev, pred, random.Random(3), iterations=2000)
    assert result.found
    assert result.facts.filing_status is FilingStatus.MARRIED_SEPARATE
