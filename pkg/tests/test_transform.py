import random

import pytest

from statutelab import (
    CpiTable,
    Evaluator,
    GeneratorConfig,
    MutationKind,
    StepKind,
    TargetMissing,
    TransformError,
    UnsupportedYear,
    apply_inline_step,
    apply_mutation,
    build_id,
    inline,
    kill_check,
    load_mutations,
    make_mutation,
    mutation_search,
    plan_inlining,
    random_facts,
    read_data_text,
    remove_provision,
)
from statutelab.transform import SpanMismatch


def _body_text(statute, *parts):
    node = statute.require(build_id(*parts))
    return " ".join(seg.raw for seg in node.body)


def test_plan_2025_shape(statute):
    plan = plan_inlining(statute, 2025)
    assert plan.taxable_year == 2025
    assert [s.kind for s in plan.steps] == [
        StepKind.REMOVE_PROVISION,
        StepKind.SUBSTITUTE_AMOUNT,
        StepKind.SUBSTITUTE_AMOUNT,
        StepKind.SUBSTITUTE_YEAR,
        StepKind.REWRITE_CLAUSE,
    ]
    assert [str(s.target) for s in plan.steps] == [
        "§63(c)(4)",
        "§63(c)(2)(B)",
        "§63(c)(2)(C)",
        "§1(f)(3)(A)(ii)",
        "§1(f)(3)(A)(ii)",
    ]
    assert [str(s.justification) for s in plan.steps] == [
        "§63(c)(7)(B)(i)",
        "§63(c)(7)(A)(i)",
        "§63(c)(7)(A)(ii)",
        "§63(c)(7)(B)(ii)(II)",
        "§1(f)(3)(C)",
    ]


def test_plan_descriptions(statute):
    plan = plan_inlining(statute, 2025)
    assert plan.steps[0].describe() == "remove §63(c)(4) (per §63(c)(7)(B)(i))"
    assert plan.steps[2].describe() == (
        'substitute "$12,000" for "$3,000" in §63(c)(2)(C) (per §63(c)(7)(A)(ii))'
    )
    assert plan.steps[4].describe() == (
        'rewrite §1(f)(3)(A)(ii) to "the C-CPI-U for calendar year 2017." '
        "(per §1(f)(3)(C))"
    )
    assert plan.describe().splitlines()[0] == "Plan for taxable year 2025 (5 steps):"


def test_plan_2018_stops_before_adjustment(statute):
    # 2018 amounts apply unadjusted, so the index clause is never touched.
    plan = plan_inlining(statute, 2018)
    assert [s.kind for s in plan.steps] == [
        StepKind.REMOVE_PROVISION,
        StepKind.SUBSTITUTE_AMOUNT,
        StepKind.SUBSTITUTE_AMOUNT,
    ]


def test_plan_outside_window(statute):
    for year in (2017, 2026):
        with pytest.raises(UnsupportedYear):
            plan_inlining(statute, year)


def test_inline_upto_bounds(statute):
    assert inline(statute, 2025, upto=0).statute == statute
    with pytest.raises(TransformError):
        inline(statute, 2025, upto=6)
    with pytest.raises(TransformError):
        inline(statute, 2025, upto=-1)


def test_inline_steps_rewrite_text(statute):
    after1 = inline(statute, 2025, upto=1).statute
    assert after1.find(build_id("63", "c", "4")) is None

    after3 = inline(statute, 2025, upto=3).statute
    assert _body_text(after3, "63", "c", "2", "C") == "$12,000 in any other case."
    assert _body_text(after3, "63", "c", "2", "B").startswith("$18,000 in the case")

    after4 = inline(statute, 2025, upto=4).statute
    assert "the CPI for calendar year 2017," in _body_text(after4, "1", "f", "3", "A", "ii")

    full = inline(statute, 2025).statute
    assert _body_text(full, "1", "f", "3", "A", "ii") == "the C-CPI-U for calendar year 2017."


def test_inline_result_records_steps(statute):
    result = inline(statute, 2025, upto=2)
    assert len(result.steps) == 2
    assert result.steps == plan_inlining(statute, 2025).steps[:2]


def test_inline_is_exhaustive(statute):
    # Nothing is left for a second pass to do.
    full = inline(statute, 2025).statute
    assert len(plan_inlining(full, 2025)) == 0


def test_inline_preserves_evaluation(statute, cpi):
    full = inline(statute, 2025).statute
    base = Evaluator(statute, cpi)
    flat = Evaluator(full, cpi)
    rng = random.Random(99)
    config = GeneratorConfig(year_lo=2025, year_hi=2025)
    for _ in range(100):
        facts = random_facts(rng, config)
        a = base.evaluate(facts)
        b = flat.evaluate(facts)
        assert a.money_fields() == b.money_fields()
        assert a.cola_ratio == b.cola_ratio


def test_apply_step_rejects_stale_target(statute):
    plan = plan_inlining(statute, 2025)
    once = apply_inline_step(statute, plan.steps[0])
    with pytest.raises(TargetMissing):
        apply_inline_step(once, plan.steps[0])


def test_remove_provision_deep(statute):
    pruned = remove_provision(statute, build_id("1", "f", "3", "C"))
    assert pruned.find(build_id("1", "f", "3", "C")) is None
    assert pruned.find(build_id("1", "f", "3", "B")) is not None
    assert pruned.find(build_id("63", "c", "7")) is not None
    assert statute.find(build_id("1", "f", "3", "C")) is not None


def test_load_bundled_mutations(statute):
    aged = load_mutations(statute, read_data_text("mutations/aged_spouse.mut"))
    assert len(aged) == 1
    assert aged[0].kind is MutationKind.DELETE_CONJUNCT
    assert aged[0].target == build_id("63", "f", "1", "B")

    amounts = load_mutations(statute, read_data_text("mutations/amounts.mut"))
    assert [(m.kind, m.old, m.new) for m in amounts] == [
        (MutationKind.REPLACE_AMOUNT, 12000, 13000),
        (MutationKind.REPLACE_AMOUNT, 3000, 5000),
        (MutationKind.REPLACE_AMOUNT, 600, 700),
    ]


def test_load_mutations_errors(statute):
    with pytest.raises(TransformError):
        load_mutations(statute, "Zap §63(b)\n")
    with pytest.raises(TransformError):
        load_mutations(statute, "DeleteProvision §63(c)(4) extra\n")
    with pytest.raises(TransformError):
        load_mutations(statute, "ReplaceAmount §63(f)(1) 600\n")
    with pytest.raises(TransformError):
        load_mutations(statute, 'DeleteConjunct §63(f)(1)(B) "unclosed\n')


def test_make_mutation_validates(statute):
    with pytest.raises(TargetMissing):
        make_mutation(statute, MutationKind.DELETE_PROVISION, build_id("63", "z"))
    with pytest.raises(SpanMismatch):
        make_mutation(
            statute, MutationKind.REPLACE_AMOUNT, build_id("63", "f", "1"), old=601, new=700
        )
    with pytest.raises(SpanMismatch):
        make_mutation(
            statute,
            MutationKind.DELETE_CONJUNCT,
            build_id("63", "f", "1", "B"),
            payload="the spouse has attained age 65",
        )
    with pytest.raises(SpanMismatch):
        make_mutation(
            statute,
            MutationKind.DELETE_CONJUNCT,
            build_id("63", "c", "7"),
            payload="and before January 1, 202",
        )


def test_delete_conjunct_splices_cleanly(statute):
    mutation = load_mutations(statute, read_data_text("mutations/aged_spouse.mut"))[0]
    mutant = apply_mutation(statute, mutation)
    text = _body_text(mutant, "63", "f", "1", "B")
    assert text.endswith("before the close of the taxable year.")
    assert "151(b)" not in text


def test_replace_amount_changes_outcome(statute, cpi, examples):
    mutation = make_mutation(
        statute, MutationKind.REPLACE_AMOUNT, build_id("63", "f", "1"), old=600, new=700
    )
    mutant = apply_mutation(statute, mutation)
    result = Evaluator(mutant, cpi).evaluate(examples["example4"])
    assert result.additional == 700


def test_replace_amount_formats_commas(statute):
    mutation = make_mutation(
        statute,
        MutationKind.REPLACE_AMOUNT,
        build_id("63", "c", "2", "C"),
        old=3000,
        new=12345678,
    )
    mutant = apply_mutation(statute, mutation)
    assert "$12,345,678" in _body_text(mutant, "63", "c", "2", "C")


def test_replace_year_moves_window(statute, cpi, examples):
    mutation = make_mutation(
        statute, MutationKind.REPLACE_YEAR, build_id("63", "c", "7"), old=2017, new=2019
    )
    mutant = apply_mutation(statute, mutation)
    with pytest.raises(UnsupportedYear):
        Evaluator(mutant, cpi).evaluate(examples["example1"])


def test_delete_provision_breaks_support(statute, cpi, examples):
    mutation = make_mutation(statute, MutationKind.DELETE_PROVISION, build_id("63", "c", "7"))
    mutant = apply_mutation(statute, mutation)
    with pytest.raises(UnsupportedYear):
        Evaluator(mutant, cpi).evaluate(examples["example1"])


def test_kill_check_aged_spouse(statute, cpi, examples):
    mutation = load_mutations(statute, read_data_text("mutations/aged_spouse.mut"))[0]
    mutant = apply_mutation(statute, mutation)

    verdict = kill_check(statute, mutant, examples["example5"], cpi)
    assert verdict.killed
    assert ("additional", 0, 600) in verdict.differences
    assert verdict.describe().startswith("Killed (")

    verdict = kill_check(statute, mutant, examples["example1"], cpi)
    assert not verdict.killed
    assert verdict.describe() == "Survived"


def test_kill_check_propagates_errors(statute, cpi, examples):
    mutant = remove_provision(statute, build_id("63", "c", "7"))
    with pytest.raises(UnsupportedYear):
        kill_check(statute, mutant, examples["example1"], cpi)


def test_mutation_search_finds_killer(statute, cpi):
    mutation = load_mutations(statute, read_data_text("mutations/aged_spouse.mut"))[0]
    mutant = apply_mutation(statute, mutation)
    result = mutation_search(statute, mutant, seed=3, cpi=cpi)
    assert result.found
    assert result.verdict.killed
    assert kill_check(statute, mutant, result.facts, cpi).killed
    assert result.seed == 3


def test_mutation_search_skips_unusable_years(statute):
    # Without an index table every post-2018 draw fails and is skipped.
    mutation = make_mutation(
        statute, MutationKind.REPLACE_AMOUNT, build_id("63", "f", "1"), old=600, new=700
    )
    mutant = apply_mutation(statute, mutation)
    result = mutation_search(statute, mutant, budget=200, seed=0, cpi=CpiTable())
    assert result.cases_skipped > 0


def test_mutation_search_identity_mutant_survives(statute, cpi):
    mutation = make_mutation(
        statute, MutationKind.REPLACE_AMOUNT, build_id("63", "f", "1"), old=600, new=600
    )
    mutant = apply_mutation(statute, mutation)
    result = mutation_search(statute, mutant, budget=150, seed=0, cpi=cpi)
    assert not result.found
    assert result.facts is None and result.verdict is None
    assert result.cases_tried == 150
