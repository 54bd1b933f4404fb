"""End-to-end checks of the package's headline behaviors.

Each test is one criterion. Run with `pytest tests/test_acceptance.py -v`
to get a single pass/fail line per criterion. Derived amounts are
recomputed here with independent Fraction arithmetic before they are
compared against the engine.
"""

import dataclasses
import random
from fractions import Fraction

from statutelab import (
    Evaluator,
    FalsificationReport,
    FilingStatus,
    GeneratorConfig,
    MonotonicityCase,
    RoundingMode,
    apply_mutation,
    build_id,
    check_case,
    check_fixed_property,
    dollar_amounts,
    falsify,
    format_percent,
    inline,
    kill_check,
    load_mutations,
    mutation_search,
    parse_statute,
    random_facts,
    read_data_text,
    render_statute,
)
from statutelab.cli import dispatch
from statutelab.engine import CoverageStatus
from statutelab.facts import CpiValue


def _floor50(increase: Fraction) -> int:
    return int(increase // 50) * 50


def _nearest50(increase: Fraction) -> int:
    # ties round up
    return int((increase / 50 + Fraction(1, 2)) // 1) * 50


def test_criterion_01_example1_taxable_income_exact(statute, cpi, examples):
    expected = 216350 - 2 * 12000
    result = Evaluator(statute, cpi).evaluate(examples["example1"])
    assert result.taxable_income == expected == 192350


def test_criterion_02_example2_negative_taxable_income(statute, cpi, examples):
    # joint return, both spouses aged: 20000 - (24000 + 2 * 600)
    expected = 20000 - (24000 + 2 * 600)
    result = Evaluator(statute, cpi).evaluate(examples["example2"])
    assert result.taxable_income < 0
    assert result.taxable_income == expected == -5200


def test_criterion_03_2025_adjusted_amounts_both_roundings(statute, cpi, examples):
    # independent arithmetic from the published index values
    base = Fraction(1382, 10)  # 2017 annual average 138.2
    latest = Fraction(1725, 10)  # 2024 annual average 172.5
    cola = (latest - base) / base
    increase = 12000 * cola
    single_floor = 12000 + _floor50(increase)
    single_nearest = 12000 + _nearest50(increase)
    assert (single_floor, single_nearest) == (14950, 15000)

    for mode, single, joint in (
        (RoundingMode.NEAREST50, single_nearest, 2 * single_nearest),
        (RoundingMode.FLOOR50, single_floor, 2 * single_floor),
    ):
        ev = Evaluator(statute, cpi, mode)
        res_joint = ev.evaluate(examples["example3"])
        assert res_joint.basic == joint
        single_facts = dataclasses.replace(
            examples["example3"],
            filing_status=FilingStatus.SINGLE,
            spouse_birth=None,
            spouse_gross_income=0,
            spouse_is_dependent_of_another=False,
        )
        res_single = ev.evaluate(single_facts)
        assert res_single.basic == single
        assert res_single.cola_ratio == cola
        assert format_percent(res_single.cola_ratio) == "24.81%"
    assert (latest - base) / base == Fraction(343, 1382)
    assert (10000 * Fraction(343, 1382)) // 1 == 2481  # truncated display


def test_criterion_04_inline_step_texts(capsys):
    assert dispatch(["inline", "--year", "2025", "--step", "3"]) == 0
    after_substitution = capsys.readouterr().out
    assert "$12,000 in any other case" in after_substitution
    assert "$3,000 in any other case" not in after_substitution

    assert dispatch(["inline", "--year", "2025", "--step", "5"]) == 0
    fully_inlined = capsys.readouterr().out
    assert "the C-CPI-U for calendar year 2017" in fully_inlined


def test_criterion_05_inline_evaluate_equivalence(statute, cpi):
    rng = random.Random(20250816)
    config = GeneratorConfig(year_lo=2019, year_hi=2025)
    inlined = {
        year: inline(statute, year).statute for year in range(2019, 2026)
    }
    original = Evaluator(statute, cpi)
    rewritten = {
        year: Evaluator(tree, cpi) for year, tree in inlined.items()
    }
    mismatches = 0
    for _ in range(1000):
        facts = random_facts(rng, config)
        a = original.evaluate(facts)
        b = rewritten[facts.taxable_year].evaluate(facts)
        if a.money_fields() != b.money_fields() or a.cola_ratio != b.cola_ratio:
            mismatches += 1
    assert mismatches == 0


def test_criterion_06_example1_coverage_statuses(statute, cpi, examples):
    coverage = Evaluator(statute, cpi).evaluate(examples["example1"]).coverage
    for parts in (("63", "b"), ("63", "c", "1"), ("63", "c", "2"), ("63", "c", "7")):
        assert coverage.status_of(build_id(*parts)) is CoverageStatus.APPLIED
    assert coverage.status_of(build_id("63", "c", "4")) is CoverageStatus.OVERRIDDEN


def test_criterion_07_conjunct_mutant_kill_and_search(statute, cpi, examples):
    spec_text = read_data_text("mutations/aged_spouse.mut")
    mutation = load_mutations(statute, spec_text)[0]
    mutant = apply_mutation(statute, mutation)

    killer = kill_check(statute, mutant, examples["example5"], cpi)
    assert killer.killed
    assert ("additional", 0, 600) in killer.differences

    survivor = kill_check(statute, mutant, examples["example1"], cpi)
    assert not survivor.killed

    search = mutation_search(statute, mutant, budget=10_000, seed=3, cpi=cpi)
    assert search.found
    assert search.verdict.killed
    recheck = kill_check(statute, mutant, search.facts, cpi)
    assert recheck.killed


def test_criterion_08_metamorphic_falsification(statute):
    # independent arithmetic for the pinned index values
    base = Fraction(1382, 10)

    def by_hand(tenths: int, mode) -> int:
        increase = 12000 * (Fraction(tenths, 10) - base) / base
        return 12000 + mode(increase)

    assert (by_hand(1681, _nearest50), by_hand(1670, _nearest50)) == (14600, 14500)
    assert (by_hand(1681, _floor50), by_hand(1670, _floor50)) == (14550, 14500)

    case = MonotonicityCase(
        x=2024, y=2025, ix=CpiValue.parse("168.1"), iy=CpiValue.parse("167.0")
    )
    nearest = check_case(statute, case, RoundingMode.NEAREST50)
    assert nearest.violated and (nearest.dx, nearest.dy) == (14600, 14500)
    floor = check_case(statute, case, RoundingMode.FLOOR50)
    assert floor.violated and (floor.dx, floor.dy) == (14550, 14500)

    report = falsify(statute, iterations=10_000, seed=7, rounding=RoundingMode.NEAREST50)
    assert isinstance(report, FalsificationReport)
    shrunk = check_case(statute, report.shrunk_violation, RoundingMode.NEAREST50)
    assert shrunk.violated


def test_criterion_09_fixed_properties_hold(statute):
    for name in ("cpi-monotone-within-year", "floor-bound", "decomposition"):
        result = check_fixed_property(statute, name, samples=1000, seed=0)
        assert result.passed, result.summary()
        assert result.samples_run == 1000
        assert result.witnesses == ()


def test_criterion_10_parser_round_trip_and_dollar_census(statute):
    text = read_data_text("irc_excerpt.txt")
    first = parse_statute(text)
    rendered = render_statute(first)
    second = parse_statute(rendered)
    assert second == first == statute
    assert render_statute(second) == rendered
    assert dollar_amounts(first.sections[0]) == {3000, 4400, 18000, 12000, 600}
