import json

import pytest

from speakeval import llm_client
from speakeval.errors import (
    AuthError,
    MalformedResponse,
    MissingKey,
    NoJsonFound,
    ProviderUnavailable,
    ScoreNotInteger,
    ScoreOutOfRange,
)
from speakeval.llm_client import EvaluationResult, ProviderConfig


PARSE_CASES = [
    ('{"score": 4, "reason": "strong opener"}', 4, "strong opener"),
    ('```json\n{"score": 4, "reason": "strong opener"}\n```', 4, "strong opener"),
    ('```\n{"score": 0, "reason": "none"}\n```', 0, "none"),
    ('Sure! {"score": 2, "reason": "some summary"} Hope this helps.', 2, "some summary"),
    ('Result:\n\n{"score": 3, "reason": "clear thesis"}', 3, "clear thesis"),
    ('{"reason": "order swapped", "score": 1}', 1, "order swapped"),
    ('prefix {"noise": true} then {"score": 2, "reason": "second object"}', 2, "second object"),
    ('{"score": 3, "reason": "nested {braces} inside"}', 3, "nested {braces} inside"),
    ('```json\n{"score": 2, "reason": "fenced with prose"}\n```\ntrailing words', 2,
     "fenced with prose"),
    ('[{"ignored": 1}] {"score": 4, "reason": "after array"}', 4, "after array"),
    ('{"score": 2, "reason": "unicode ✓ et al"}', 2, "unicode ✓ et al"),
]


class TestParseEvaluation:
    @pytest.mark.parametrize("text,score,reason", PARSE_CASES)
    def test_parses(self, text, score, reason):
        assert llm_client.parse_evaluation(text) == (score, reason)

    def test_out_of_range_errors_never_clamps(self):
        with pytest.raises(ScoreOutOfRange):
            llm_client.parse_evaluation('{"score": 5, "reason": "x"}')
        with pytest.raises(ScoreOutOfRange):
            llm_client.parse_evaluation('{"score": -1, "reason": "x"}')

    def test_non_integer_score(self):
        with pytest.raises(ScoreNotInteger):
            llm_client.parse_evaluation('{"score": 3.5, "reason": "x"}')
        with pytest.raises(ScoreNotInteger):
            llm_client.parse_evaluation('{"score": "3", "reason": "x"}')
        with pytest.raises(ScoreNotInteger):
            llm_client.parse_evaluation('{"score": true, "reason": "x"}')

    def test_no_json(self):
        with pytest.raises(NoJsonFound):
            llm_client.parse_evaluation("I cannot evaluate this.")

    def test_missing_key(self):
        with pytest.raises(MissingKey):
            llm_client.parse_evaluation('{"score": 3}')
        with pytest.raises(MissingKey):
            llm_client.parse_evaluation('{"score": 3, "reason": ""}')


class TestMock:
    def _prompt(self, n_words):
        return "Instructions here.\n\nData:\n" + " ".join(f"w{i}" for i in range(n_words))

    def test_word_count_rule(self):
        result = llm_client.mock_evaluate(self._prompt(24))
        assert result.score == 4
        assert result.reason == "mock: 24 words"
        assert result.attempt_count == 1

    def test_empty_data_section(self):
        assert llm_client.mock_evaluate(self._prompt(0)).score == 0

    def test_deterministic(self):
        prompt = self._prompt(17)
        a = llm_client.mock_evaluate(prompt)
        b = llm_client.mock_evaluate(prompt)
        assert (a.score, a.reason, a.raw_response) == (b.score, b.reason, b.raw_response)


class ScriptedTransport:
    """Yields canned responses or exceptions in order."""

    def __init__(self, script):
        self.script = list(script)
        self.calls = 0

    def __call__(self, prompt, config):
        self.calls += 1
        item = self.script.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


class TestEvaluateRetry:
    CONFIG = ProviderConfig(provider_id="fake", max_retries=3)

    def test_retries_bad_score_then_succeeds(self):
        transport = ScriptedTransport([
            '{"score": 7, "reason": "x"}',
            '{"score": 7, "reason": "x"}',
            '{"score": 2, "reason": "ok"}',
        ])
        delays = []
        result = llm_client.evaluate("p", self.CONFIG, transport=transport,
                                     sleep=delays.append)
        assert result.score == 2
        assert result.attempt_count == 3
        assert delays == [1.0, 2.0]

    def test_backoff_is_monotone(self):
        transport = ScriptedTransport([ProviderUnavailable("down")] * 3
                                      + ['{"score": 1, "reason": "up"}'])
        delays = []
        result = llm_client.evaluate("p", self.CONFIG, transport=transport,
                                     sleep=delays.append)
        assert result.attempt_count == 4
        assert delays == [1.0, 2.0, 4.0]
        assert delays == sorted(delays)

    def test_exhaustion_raises_provider_unavailable(self):
        transport = ScriptedTransport([ProviderUnavailable("down")] * 4)
        with pytest.raises(ProviderUnavailable):
            llm_client.evaluate("p", self.CONFIG, transport=transport, sleep=lambda s: None)
        assert transport.calls == 4

    def test_exhaustion_raises_malformed(self):
        transport = ScriptedTransport(["garbage"] * 4)
        with pytest.raises(MalformedResponse):
            llm_client.evaluate("p", self.CONFIG, transport=transport, sleep=lambda s: None)

    def test_auth_error_not_retried(self):
        transport = ScriptedTransport([AuthError("bad key")])
        with pytest.raises(AuthError):
            llm_client.evaluate("p", self.CONFIG, transport=transport, sleep=lambda s: None)
        assert transport.calls == 1


class TestResultInvariants:
    def test_out_of_range_unconstructible(self):
        with pytest.raises(ScoreOutOfRange):
            EvaluationResult(session_id="s", rubric_id=1, provider_id="mock",
                             score=5, reason="x", raw_response="", attempt_count=1)

    def test_jsonl_round_trip(self):
        result = llm_client.mock_evaluate("Data:\na b c")
        line = llm_client.result_to_json(result)
        assert llm_client.result_from_json(line) == result

    def test_no_raw_omits_response(self):
        result = llm_client.mock_evaluate("Data:\na b c")
        obj = json.loads(llm_client.result_to_json(result, include_raw=False))
        assert "raw_response" not in obj

    def test_credentials_never_serialized(self, monkeypatch):
        monkeypatch.setenv("FAKE_API_KEY", "sk-SECRET-VALUE")
        result = llm_client.mock_evaluate("Data:\na b c")
        assert "sk-SECRET-VALUE" not in llm_client.result_to_json(result)
