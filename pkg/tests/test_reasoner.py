import dataclasses
import http.server
import json
import socket
import threading

import pytest
from hypothesis import given
from hypothesis import strategies as st

from statutelab import (
    Evaluator,
    HttpConfig,
    HttpReasoner,
    OracleReasoner,
    ReasonerError,
    ReasonerParseError,
    ReasonerRequest,
    Task,
    TranscriptMiss,
    TranscriptReasoner,
    append_transcript,
    inline,
    load_facts,
    load_transcript,
    make_coverage_request,
    make_evaluate_request,
    make_inline_request,
    make_propose_request,
    parse_predicate,
    render_facts,
    render_statute,
    run_task,
    score_agreement,
)
from statutelab.reasoner import (
    ReasonerHttpError,
    extract_fenced,
    fill_template,
    load_template,
    parse_citations,
    parse_evaluate_answer,
    parse_money,
    parse_response,
    template_hash,
)


# -- templates -----------------------------------------------------------------


def test_templates_declare_their_slots():
    for task in Task:
        assert "{{statute}}" in load_template(task)
    assert "{{facts}}" in load_template(Task.EVALUATE)
    assert "{{instruction}}" in load_template(Task.EVALUATE)
    assert "{{facts}}" in load_template(Task.LIST_COVERAGE)
    assert "{{predicate}}" in load_template(Task.PROPOSE_EXAMPLE)


def test_fill_template_substitutes_and_rejects_missing():
    filled = fill_template("a {{x}} b {{y}}", x="1", y="2")
    assert filled == "a 1 b 2"
    with pytest.raises(ReasonerError, match=r"\{\{y\}\} has no value"):
        fill_template("a {{x}} b {{y}}", x="1")
    # extra slots are harmless
    assert fill_template("{{x}}", x="1", z="9") == "1"


def test_template_hash_is_sha256_hex():
    h = template_hash("anything")
    assert len(h) == 64 and set(h) <= set("0123456789abcdef")
    assert h != template_hash("anything else")


# -- request construction -------------------------------------------------------


def test_request_hash_stable_and_content_sensitive(statute, cpi, examples):
    facts_text = render_facts(examples["example1"])
    a = make_evaluate_request(statute, facts_text, cpi)
    b = make_evaluate_request(statute, facts_text, cpi)
    assert a.request_hash == b.request_hash
    assert len(a.request_hash) == 64

    other = make_evaluate_request(statute, render_facts(examples["example5"]), cpi)
    assert other.request_hash != a.request_hash

    # same inputs, different task
    cov = make_coverage_request(statute, facts_text, cpi)
    assert cov.request_hash != a.request_hash


def test_prompt_embeds_statute_facts_and_cpi(statute, cpi, examples):
    facts_text = render_facts(examples["example1"])
    request = make_evaluate_request(statute, facts_text, cpi)
    assert render_statute(statute) in request.prompt
    assert facts_text in request.prompt
    assert "Use these chained CPI annual averages:" in request.instruction
    assert "2024\t172.5" in request.instruction
    assert request.template_name == "evaluate.txt"
    assert request.template_digest == template_hash(load_template(Task.EVALUATE))


def test_propose_request_hash_covers_predicate(statute, cpi):
    a = make_propose_request(statute, parse_predicate("§63(f)=applied"), cpi)
    b = make_propose_request(statute, parse_predicate("§63(b)=applied"), cpi)
    assert a.request_hash != b.request_hash
    assert "§63(f)=applied" in a.prompt
    assert a.facts_text == ""


def test_inline_request_carries_year(statute):
    request = make_inline_request(statute, 2025)
    assert request.instruction == "Taxable year: 2025"
    assert request.facts_text == ""
    assert "Taxable year: 2025" in request.prompt


# -- response parsing -----------------------------------------------------------


def test_parse_money():
    assert parse_money("$1,200") == 1200
    assert parse_money("-$5,200") == -5200
    assert parse_money("$216,350") == 216350


def test_parse_evaluate_answer_labeled():
    raw = (
        "Standard deduction: $25,200 (basic $24,000, additional $1,200).\n"
        "Taxable income: -$5,200."
    )
    ans = parse_evaluate_answer(raw)
    assert ans.taxable_income == -5200
    assert ans.standard_deduction == 25200
    assert ans.basic == 24000
    assert ans.additional == 1200


def test_parse_evaluate_answer_falls_back_to_last_amount():
    ans = parse_evaluate_answer("AGI was $80,000, so we end at $65,400 overall.")
    assert ans.taxable_income == 65400
    assert ans.standard_deduction is None
    assert ans.basic is None
    assert ans.additional is None


def test_parse_evaluate_answer_without_amounts_raises():
    with pytest.raises(ReasonerParseError, match="no dollar amount"):
        parse_evaluate_answer("I could not work this out.")


def test_parse_citations_dedupes_and_normalizes():
    raw = "Applied §63(b), then §63(c)(1), § 1(f)(3), and §63(b) again."
    assert parse_citations(raw) == ("§63(b)", "§63(c)(1)", "§1(f)(3)")
    assert parse_citations("no citations here") == ()


def test_extract_fenced_takes_first_block():
    raw = "before\n```\nfirst\n```\nmiddle\n```\nsecond\n```"
    assert extract_fenced(raw) == "first\n"
    assert extract_fenced("no fences") is None
    # a language tag on the fence line is skipped
    assert extract_fenced("```text\nbody\n```") == "body\n"


def test_parse_response_fields_by_task():
    ev = parse_response(Task.EVALUATE, "h", "Taxable income: $5.")
    assert ev.evaluate.taxable_income == 5 and ev.parse_ok

    cov = parse_response(Task.LIST_COVERAGE, "h", "nothing applied")
    assert cov.citations == () and cov.parse_ok

    prop = parse_response(Task.PROPOSE_EXAMPLE, "h", "no fence")
    assert prop.facts_text is None and not prop.parse_ok

    inl = parse_response(Task.INLINE_ONE_STEP, "h", "Step: x\n```\ntext\n```")
    assert inl.statute_text == "text\n" and inl.parse_ok


# -- oracle backend -------------------------------------------------------------


def test_oracle_evaluates_in_canonical_phrasing(statute, cpi, examples):
    request = make_evaluate_request(statute, render_facts(examples["example1"]), cpi)
    raw = OracleReasoner().complete(request)
    assert raw == (
        "Standard deduction: $24,000 (basic $24,000, additional $0).\n"
        "Taxable income: $192,350."
    )
    response = run_task(OracleReasoner(), request)
    assert response.request_hash == request.request_hash
    assert response.evaluate.taxable_income == 192350
    assert response.evaluate.standard_deduction == 24000


def test_oracle_evaluate_negative_income(statute, cpi, examples):
    request = make_evaluate_request(statute, render_facts(examples["example2"]), cpi)
    raw = OracleReasoner().complete(request)
    assert raw == (
        "Standard deduction: $25,200 (basic $24,000, additional $1,200).\n"
        "Taxable income: -$5,200."
    )
    assert parse_evaluate_answer(raw).taxable_income == -5200


def test_oracle_coverage_lists_applied_in_document_order(statute, cpi, examples):
    facts = examples["example1"]
    request = make_coverage_request(statute, render_facts(facts), cpi)
    response = run_task(OracleReasoner(), request)

    result = Evaluator(statute, cpi).evaluate(facts)
    applied = result.coverage.applied_set()
    expected = tuple(
        str(pid) for pid in result.coverage.document_order if pid in applied
    )
    assert response.citations == expected
    assert response.citations[0] == "§63"
    assert "§63(b)" in response.citations
    assert "§63(c)(4)" not in response.citations  # overridden, not applied


def test_oracle_proposes_facts_satisfying_predicate(statute, cpi):
    predicate = parse_predicate("§63(f)=applied")
    request = make_propose_request(statute, predicate, cpi)
    response = run_task(OracleReasoner(), request)
    assert response.raw.startswith("Proposed facts:")
    facts = load_facts(response.facts_text)
    result = Evaluator(statute, cpi).evaluate(facts)
    assert predicate.matches(result.coverage)


def test_oracle_inline_reports_first_rewrite(statute):
    request = make_inline_request(statute, 2025)
    response = run_task(OracleReasoner(), request)
    assert response.raw.startswith("Step: remove §63(c)(4)")
    expected = render_statute(inline(statute, 2025, upto=1).statute)
    assert response.statute_text.strip() == expected.strip()


def test_oracle_degrades_politely_on_bad_input(statute):
    broken = ReasonerRequest(
        task=Task.EVALUATE,
        statute_text="not a statute",
        facts_text="",
        instruction="",
        template_name="evaluate.txt",
        template_digest="0" * 64,
        prompt="",
    )
    assert OracleReasoner().complete(broken).startswith("Cannot read the statute text:")

    no_year = dataclasses.replace(
        make_inline_request(statute, 2025), instruction="no year given"
    )
    assert OracleReasoner().complete(no_year) == (
        "Cannot find the taxable year in the request."
    )


def test_oracle_evaluate_reports_engine_errors(statute, cpi, examples):
    facts = dataclasses.replace(examples["example1"], taxable_year=2030)
    request = make_evaluate_request(statute, render_facts(facts), cpi)
    raw = OracleReasoner().complete(request)
    assert raw.startswith("Cannot evaluate:")
    assert "2030" in raw


# -- transcripts ----------------------------------------------------------------


def test_transcript_records_and_replays(tmp_path, statute, cpi, examples):
    path = tmp_path / "exchanges.jsonl"
    oracle = OracleReasoner()
    requests = [
        make_evaluate_request(statute, render_facts(examples["example1"]), cpi),
        make_coverage_request(statute, render_facts(examples["example1"]), cpi),
        make_inline_request(statute, 2025),
    ]
    for request in requests:
        append_transcript(str(path), request, oracle.complete(request))

    lines = path.read_text().splitlines()
    assert len(lines) == 3
    entry = json.loads(lines[0])
    assert set(entry) == {"request_hash", "task", "prompt", "raw"}
    assert entry["task"] == "evaluate"

    replay = TranscriptReasoner.from_text(path.read_text())
    for request in requests:
        assert replay.complete(request) == oracle.complete(request)

    response = run_task(replay, requests[0])
    assert response.evaluate.taxable_income == 192350


def test_transcript_miss_names_the_hash(statute, cpi, examples):
    request = make_evaluate_request(statute, render_facts(examples["example1"]), cpi)
    empty = TranscriptReasoner({})
    with pytest.raises(TranscriptMiss, match=request.request_hash[:12]):
        empty.complete(request)


def test_load_transcript_error_shapes():
    with pytest.raises(ReasonerError, match="transcript line 1"):
        load_transcript("not json")
    with pytest.raises(ReasonerError, match="needs request_hash and raw"):
        load_transcript('{"request_hash": "abc"}')
    # blank lines are skipped; a repeated hash keeps the latest raw
    text = '{"request_hash": "h", "raw": "old"}\n\n{"request_hash": "h", "raw": "new"}\n'
    assert load_transcript(text) == {"h": "new"}


# -- live endpoint --------------------------------------------------------------


class _StubHandler(http.server.BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = self.rfile.read(length)
        self.server.captured.append(
            {"body": body, "authorization": self.headers.get("Authorization")}
        )
        payload = self.server.canned
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_endpoint():
    server = http.server.HTTPServer(("127.0.0.1", 0), _StubHandler)
    server.captured = []
    server.canned = b"{}"
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server, f"http://127.0.0.1:{server.server_port}/v1/chat/completions"
    finally:
        server.shutdown()
        server.server_close()


def test_http_reasoner_round_trip(stub_endpoint, tmp_path, monkeypatch, statute, cpi, examples):
    server, endpoint = stub_endpoint
    answer = "Taxable income: $192,350."
    server.canned = json.dumps(
        {"choices": [{"message": {"content": answer}}]}
    ).encode("utf-8")
    monkeypatch.setenv("STATUTELAB_API_TOKEN", "sk-test")

    transcript = tmp_path / "live.jsonl"
    reasoner = HttpReasoner(
        HttpConfig(endpoint=endpoint, model="demo-model"), str(transcript)
    )
    request = make_evaluate_request(statute, render_facts(examples["example1"]), cpi)
    response = run_task(reasoner, request)
    assert response.raw == answer
    assert response.evaluate.taxable_income == 192350

    sent = json.loads(server.captured[0]["body"])
    assert sent["model"] == "demo-model"
    assert sent["messages"] == [{"role": "user", "content": request.prompt}]
    assert server.captured[0]["authorization"] == "Bearer sk-test"

    # the exchange was persisted before parsing, so a replay needs no network
    replay = TranscriptReasoner.from_text(transcript.read_text())
    assert replay.complete(request) == answer


def test_http_reasoner_omits_auth_without_token(stub_endpoint, monkeypatch, statute):
    server, endpoint = stub_endpoint
    server.canned = json.dumps(
        {"choices": [{"message": {"content": "ok"}}]}
    ).encode("utf-8")
    monkeypatch.delenv("STATUTELAB_API_TOKEN", raising=False)
    reasoner = HttpReasoner(HttpConfig(endpoint=endpoint, model="demo-model"))
    assert reasoner.complete(make_inline_request(statute, 2025)) == "ok"
    assert server.captured[0]["authorization"] is None


def test_http_reasoner_rejects_malformed_payloads(stub_endpoint, statute):
    server, endpoint = stub_endpoint
    reasoner = HttpReasoner(HttpConfig(endpoint=endpoint, model="demo-model"))
    request = make_inline_request(statute, 2025)

    server.canned = json.dumps({"answer": "no choices"}).encode("utf-8")
    with pytest.raises(ReasonerHttpError, match=r"choices\[0\].message.content"):
        reasoner.complete(request)

    server.canned = json.dumps(
        {"choices": [{"message": {"content": 42}}]}
    ).encode("utf-8")
    with pytest.raises(ReasonerHttpError, match="non-string"):
        reasoner.complete(request)

    server.canned = b"this is not json"
    with pytest.raises(ReasonerHttpError, match="non-JSON"):
        reasoner.complete(request)


def test_http_reasoner_unreachable_endpoint(statute):
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    reasoner = HttpReasoner(
        HttpConfig(endpoint=f"http://127.0.0.1:{port}/v1", model="demo", timeout=2.0)
    )
    with pytest.raises(ReasonerHttpError, match="unreachable"):
        reasoner.complete(make_inline_request(statute, 2025))


# -- agreement scoring ----------------------------------------------------------


def test_oracle_agrees_with_itself(statute, cpi, examples):
    oracle = OracleReasoner()
    facts_text = render_facts(examples["example1"])
    requests = {
        Task.EVALUATE: make_evaluate_request(statute, facts_text, cpi),
        Task.LIST_COVERAGE: make_coverage_request(statute, facts_text, cpi),
        Task.PROPOSE_EXAMPLE: make_propose_request(
            statute, parse_predicate("§63(b)=applied"), cpi
        ),
        Task.INLINE_ONE_STEP: make_inline_request(statute, 2025),
    }
    for task, request in requests.items():
        raw = oracle.complete(request)
        score = score_agreement(task, raw, raw)
        assert score.exact_match
        assert score.field_diffs == ()
        assert score.text_similarity == 1.0


def test_score_evaluate_diffs_name_the_fields():
    ref = "Standard deduction: $24,000.\nTaxable income: $100."
    cand = "Taxable income: $200."
    score = score_agreement(Task.EVALUATE, ref, cand)
    assert not score.exact_match
    assert "taxable_income: 100 != 200" in score.field_diffs
    assert "standard_deduction: stated on one side only" in score.field_diffs
    assert score.text_similarity < 1.0


def test_score_coverage_reports_missing_and_extra():
    ref = "Applied provisions: §63, §63(b)"
    cand = "Applied provisions: §63, §63(c)(1)"
    score = score_agreement(Task.LIST_COVERAGE, ref, cand)
    assert score.field_diffs == ("missing: §63(b)", "extra: §63(c)(1)")
    assert not score.exact_match


def test_score_propose_compares_parsed_facts(examples):
    body = render_facts(examples["example5"])
    fenced = "Proposed facts:\n```\n" + body + "```"
    # prose and comments differ, parsed facts agree
    same = "Here you go.\n```\n# a scenario\n" + body + "```"
    assert score_agreement(Task.PROPOSE_EXAMPLE, fenced, same).exact_match

    other = "Proposed facts:\n```\n" + render_facts(examples["single2024"]) + "```"
    assert score_agreement(Task.PROPOSE_EXAMPLE, fenced, other).field_diffs == (
        "facts: differ",
    )
    assert score_agreement(Task.PROPOSE_EXAMPLE, fenced, "no fence").field_diffs == (
        "facts: proposed on one side only",
    )


def test_score_inline_compares_extracted_statutes():
    same_body = "Step: first\n```\nSEC. 63. TEXT\n```"
    different_prose = "After one rewrite:\n```\nSEC. 63. TEXT\n```"
    score = score_agreement(Task.INLINE_ONE_STEP, same_body, different_prose)
    assert score.exact_match and score.text_similarity == 1.0

    other_body = "Step: first\n```\nSEC. 63. OTHER WORDS\n```"
    score = score_agreement(Task.INLINE_ONE_STEP, same_body, other_body)
    assert score.field_diffs == ("statute text: differs",)
    assert 0.0 < score.text_similarity < 1.0


def test_score_unparseable_sides_are_flagged():
    score = score_agreement(Task.EVALUATE, "no amounts at all", "Taxable income: $1.")
    assert not score.exact_match
    assert score.field_diffs[0].startswith("reference unparseable:")

    score = score_agreement(Task.EVALUATE, "Taxable income: $1.", "still nothing")
    assert score.field_diffs[0].startswith("unparseable:")


_CITE_POOL = ("§63", "§63(b)", "§63(c)(1)", "§63(c)(2)(A)", "§1(f)(3)", "§151(b)")


@given(
    st.lists(st.sampled_from(_CITE_POOL), unique=True, max_size=6),
    st.lists(st.sampled_from(_CITE_POOL), unique=True, max_size=6),
)
def test_coverage_agreement_matches_set_equality(ref_cites, cand_cites):
    ref = "Applied provisions: " + ", ".join(ref_cites)
    cand = "Applied provisions: " + ", ".join(cand_cites)
    score = score_agreement(Task.LIST_COVERAGE, ref, cand)
    assert score.exact_match == (set(ref_cites) == set(cand_cites))
    if score.exact_match:
        assert score.field_diffs == ()
        assert score.text_similarity == 1.0
