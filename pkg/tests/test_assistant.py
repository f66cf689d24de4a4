import json

import httpx

from tablescout.assistant import AssistantTurn, LlmConfig, route_intent
from tablescout.tables import QueryMode

CASE_STUDY = "Find unionable tables containing students with an average grade above 80"


class TestRuleBasedRouting:
    def test_case_study_sentence(self):
        turn = route_intent(CASE_STUDY)
        assert turn.detected_intent == "discovery"
        assert turn.extracted.mode is QueryMode.UNION
        assert turn.extracted.condition == CASE_STUDY

    def test_joinable_request(self):
        turn = route_intent("search for joinable tables with flight delays on column flight_id")
        assert turn.detected_intent == "discovery"
        assert turn.extracted.mode is QueryMode.JOIN
        assert turn.extracted.key_column == "flight_id"

    def test_plain_find_is_nl_only(self):
        turn = route_intent("find tables about weather in oslo")
        assert turn.detected_intent == "discovery"
        assert turn.extracted.mode is QueryMode.NL_ONLY

    def test_analysis_question(self):
        turn = route_intent("what's the mean of column math?")
        assert turn.detected_intent == "analysis"
        assert turn.extracted is None

    def test_other_gets_help_reply(self):
        turn = route_intent("hello there")
        assert turn.detected_intent == "other"
        assert "Find unionable tables" in turn.reply

    def test_pure_function_determinism(self):
        a = route_intent(CASE_STUDY)
        b = route_intent(CASE_STUDY)
        assert (a.detected_intent, a.extracted.mode, a.extracted.condition) == (
            b.detected_intent,
            b.extracted.mode,
            b.extracted.condition,
        )


def llm_route(handler, text=CASE_STUDY):
    cfg = LlmConfig(endpoint="http://llm.local/v1/chat/completions", api_key="k")
    return route_intent(text, cfg, transport=httpx.MockTransport(handler))


class TestLlmRouting:
    def test_structured_output_used(self):
        def handler(request):
            body = json.loads(request.content)
            assert body["messages"][1]["content"] == CASE_STUDY
            content = json.dumps(
                {"intent": "discovery", "mode": "nlc_join", "condition": "student grades", "key_column": "id"}
            )
            return httpx.Response(200, json={"choices": [{"message": {"content": content}}]})

        turn = llm_route(handler)
        assert turn.extracted.mode is QueryMode.JOIN
        assert turn.extracted.condition == "student grades"
        assert turn.extracted.key_column == "id"

    def test_malformed_output_falls_back_to_rules(self):
        def handler(request):
            return httpx.Response(200, json={"choices": [{"message": {"content": "not json at all"}}]})

        turn = llm_route(handler)
        assert turn.detected_intent == "discovery"  # rule-based fallback
        assert turn.extracted.mode is QueryMode.UNION

    def test_http_error_falls_back(self):
        turn = llm_route(lambda request: httpx.Response(500))
        assert turn.detected_intent == "discovery"
        assert turn.extracted.condition == CASE_STUDY

    def test_unreachable_falls_back(self):
        def handler(request):
            raise httpx.ConnectTimeout("slow")

        turn = llm_route(handler)
        assert isinstance(turn, AssistantTurn)
        assert turn.detected_intent == "discovery"
