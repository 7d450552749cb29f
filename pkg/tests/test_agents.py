from __future__ import annotations

import json
import random

import httpx
import pytest
from hypothesis import given, settings, strategies as st

from stratharness.agents import (
    AgentKind,
    AgentSpec,
    CassetteClient,
    ChatClient,
    EndpointSpec,
    GroundingPolicy,
    GroundingResult,
    PromptBundle,
    RandomAgent,
    RateLimiter,
    RemoteAgent,
    ScriptedAgent,
    extract_object,
    ground,
    load_template,
    make_agent,
    match_legal,
    parse_response,
    prompt_digest,
    render_prompt,
)
from stratharness.agents.prompts import parse_template, validate_template
from stratharness.core.types import Decision, Observation
from stratharness.errors import AgentFailure, ConfigError, ResponseParseError, TemplateError
from stratharness.games.stratego import StrategoEnv
from stratharness.games.werewolf import WerewolfEnv

RECORDED_STRATEGO = """{
    'reasoning': "Moving the Captain 'R(5)' from position '4,0' to '5,0' keeps it safe.",
    'move': '4 0 5 0'
}"""

RECORDED_WEREWOLF = """{
    'reasoning': "Isaac seems to be more directly involved in the accusations.",
    '<remove & protect & investigate & debate & vote>': 'Isaac'
}"""


def obs(legal=("a", "b"), **extras) -> Observation:
    return Observation("p", 0, "view", tuple(legal), "play", extras=dict(extras))


# -- parsing --------------------------------------------------------------------

def test_recorded_stratego_response():
    d = parse_response(RECORDED_STRATEGO, "stratego")
    assert d.actions == ("4 0 5 0",)
    assert "Captain" in d.reasoning


def test_recorded_werewolf_removal():
    d = parse_response(RECORDED_WEREWOLF, "werewolf_remove")
    assert d.actions == ("remove Isaac",)


def test_fenced_and_prose_wrapped():
    text = 'Sure, here you go:\n```json\n{"reasoning": "x", "move": "6 0 5 0"}\n```\nGood luck!'
    assert parse_response(text, "stratego").actions == ("6 0 5 0",)
    assert parse_response('I pick {"vote": "Sam"} today.', "werewolf_vote").actions == ("vote Sam",)


def test_debate_accepts_say_key():
    d = parse_response('{"say": "I trust Derek"}', "werewolf_debate")
    assert d.actions == ("say I trust Derek",)
    assert parse_response('{"debate": ""}', "werewolf_debate").actions == ("say",)


def test_composite_and_action_lists():
    d = parse_response('{"moves": ["6 0 5 0", "5 0 4 0"]}', "stratego")
    assert d.actions == ("6 0 5 0", "5 0 4 0")
    assert parse_response('{"actions": "build"}', "actions").actions == ("build",)


def test_apostrophe_in_reasoning_does_not_break_extraction():
    text = '{"reasoning": "the enemy\'s flank", "move": "1 1 2 1"}'
    assert extract_object(text)["move"] == "1 1 2 1"


@pytest.mark.parametrize(
    "text,fmt",
    [
        ("", "stratego"),
        ("   ", "actions"),
        ("no json at all", "stratego"),
        ('{"reasoning": "x"}', "stratego"),
        ('{"vote": "Sam"}', "werewolf_remove"),
        ('{"remove": ""}', "werewolf_remove"),
        ('{"actions": []}', "actions"),
        ('{"move": "1 1 2 1"}', "bogus_format"),
        ('{"x": 1}', "werewolf_dance"),
    ],
)
def test_parse_errors(text, fmt):
    with pytest.raises(ResponseParseError):
        parse_response(text, fmt)


@given(st.text(max_size=200))
def test_parser_never_crashes_unexpectedly(text):
    for fmt in ("stratego", "actions", "werewolf_vote"):
        try:
            parse_response(text, fmt)
        except ResponseParseError:
            pass


# -- prompts ---------------------------------------------------------------------

def test_stratego_prompt_lists_exactly_the_legal_moves():
    env = StrategoEnv({}, seed=3)
    o = env.observe("red", 0)
    bundle = render_prompt("stratego", o)
    assert bundle.expected_format == "stratego"
    section = bundle.user_text.split("## Valid moves:")[1].split("## History")[0]
    listed = set()
    for line in section.strip().splitlines():
        r, c = line.split("position '")[1].split("'")[0].split(",")
        for target in line.split(":")[-1].split(","):
            x, y = target.split()
            listed.add(f"{r} {c} {x} {y}")
    assert listed == set(o.legal_actions)
    assert "Red" in bundle.system_text


def test_werewolf_seer_prompt_mentions_investigation():
    env = WerewolfEnv({"fixed_roles": {"Tyler": "Seer", "Isaac": "Werewolf", "Sam": "Werewolf"}}, seed=0)
    for wolf in ("Isaac", "Sam"):
        env.step(wolf, "remove Derek")
    env.step(env.current_seat(), env.legal_actions(env.current_seat())[0])
    assert env.current_seat() == "Tyler"
    o = env.observe("Tyler", 3)
    bundle = render_prompt("werewolf", o)
    assert bundle.expected_format == "werewolf_investigate"
    assert "investigate" in bundle.user_text
    assert '"investigate"' in bundle.user_text
    assert "Seer" in bundle.system_text


def test_render_is_pure_and_feedback_appended():
    o = StrategoEnv({}, seed=1).observe("blue", 0)
    assert render_prompt("stratego", o) == render_prompt("stratego", o)
    retry = render_prompt("stratego", o, feedback="try again")
    assert retry.user_text.endswith("try again")


def test_template_validation_catches_unknown_placeholder():
    t = parse_template("[system]\nhi {nope}\n[user]\n{text_view}", "x", "stratego")
    with pytest.raises(TemplateError, match="nope"):
        validate_template(t)
    with pytest.raises(TemplateError):
        parse_template("[user]\nonly user", "y", "stratego")
    with pytest.raises(TemplateError):
        load_template("no-such-template")


def test_template_from_file(tmp_path):
    path = tmp_path / "mine.txt"
    path.write_text("# comment\n[system]\nPlay {side}.\n[user]\n{text_view}\n", encoding="utf-8")
    t = load_template(str(path), "stratego")
    o = StrategoEnv({}, seed=1).observe("red", 0)
    assert render_prompt(t, o).system_text == "Play Red."


# -- grounding --------------------------------------------------------------------

def test_valid_first_action():
    r = ground(Decision.single("b"), ["a", "b"])
    assert (r.attempts, r.succeeded, r.final_action, r.fallback_used) == (1, True, "b", False)


def test_two_invalid_then_valid():
    answers = iter([Decision.single("zz"), Decision.single("a")])
    r = ground(Decision.single("x"), ["a", "b"], requery=lambda fb: next(answers))
    assert (r.attempts, r.succeeded, r.final_action) == (3, True, "a")


def test_exhausted_retries_fall_back():
    r = ground(Decision.single("x"), ["a", "b"], requery=lambda fb: None, rng=random.Random(4))
    assert r.attempts == 3 and not r.succeeded and r.fallback_used
    assert r.final_action in ("a", "b")


def test_reject_policy_raises():
    with pytest.raises(AgentFailure):
        ground(Decision.single("x"), ["a"], GroundingPolicy.REJECT)
    assert ground(Decision.single("a"), ["a"], "reject").succeeded


def test_matcher_canonicalises():
    assert match_legal("VOTE sam", ["vote Sam"], lambda a, b: a.lower() == b.lower()) == "vote Sam"
    assert match_legal("x", ["a"]) is None


def test_grounding_result_invariants():
    with pytest.raises(ValueError):
        GroundingResult(0, True, "a", False)
    with pytest.raises(ValueError):
        GroundingResult(1, False, "a", False)


@settings(max_examples=200)
@given(
    first_valid=st.one_of(st.none(), st.integers(0, 6)),
    max_retries=st.integers(0, 4),
    seed=st.integers(0, 1000),
)
def test_attempts_bound_and_legality(first_valid, max_retries, seed):
    legal = ["m1", "m2", "m3"]
    outputs = [Decision.single("m2" if i == first_valid else "bad") for i in range(10)]
    it = iter(outputs[1:])
    r = ground(outputs[0], legal, requery=lambda fb: next(it), max_retries=max_retries,
               rng=random.Random(seed))
    assert 1 <= r.attempts <= max_retries + 1
    assert r.final_action in legal
    if first_valid is not None and first_valid <= max_retries:
        assert r.succeeded and r.attempts == first_valid + 1
    else:
        assert not r.succeeded and r.fallback_used and r.attempts == max_retries + 1


# -- agents ----------------------------------------------------------------------

def test_random_agent_forced_move_and_seeding():
    assert RandomAgent(1).decide(obs(["only"])).actions == ("only",)
    picks1 = [RandomAgent(9).decide(obs(list("abcdef"))).actions[0] for _ in range(3)]
    picks2 = [RandomAgent(9).decide(obs(list("abcdef"))).actions[0] for _ in range(3)]
    assert picks1 == picks2
    with pytest.raises(AgentFailure):
        RandomAgent(1).decide(obs([]))


def test_scripted_agent_sequence():
    agent = ScriptedAgent(["m1", ["m2", "m3"]])
    assert agent.decide(obs()).actions == ("m1",)
    assert agent.decide(obs()).actions == ("m2", "m3")
    assert agent.decide(obs(["z", "y"])).actions == ("z",)


def test_agent_seed_depends_on_seat_and_run():
    spec = AgentSpec(AgentKind.RANDOM)
    legal = [str(i) for i in range(1000)]

    def pick(seat, run):
        return make_agent(spec, "stratego", seat, 5, run).decide(obs(legal)).actions[0]

    assert pick("red", 0) == pick("red", 0)
    assert len({pick("red", 0), pick("blue", 0), pick("red", 1)}) == 3


def test_remote_agent_with_cassette():
    o = StrategoEnv({}, seed=1).observe("red", 0)
    bundle = render_prompt("stratego", o)
    cassette = CassetteClient(responses={prompt_digest(bundle): RECORDED_STRATEGO})
    agent = RemoteAgent(cassette, load_template("stratego"))
    d = agent.decide(o)
    assert d.actions == ("4 0 5 0",)
    assert agent.last_response == RECORDED_STRATEGO
    assert "## Valid moves:" in agent.last_prompt
    with pytest.raises(AgentFailure, match="no recorded response"):
        agent.decide(o, feedback="again")


def test_cassette_record_and_save(tmp_path):
    class Echo:
        calls = 0

        def complete(self, bundle, temperature):
            Echo.calls += 1
            return '{"move": "1 1 2 1"}'

    bundle = PromptBundle("s", "u", "stratego")
    recorder = CassetteClient(tmp_path / "c.json", record_from=Echo())
    assert recorder.complete(bundle, 0.2) == '{"move": "1 1 2 1"}'
    recorder.save()
    replay = CassetteClient(tmp_path / "c.json")
    assert replay.complete(bundle, 0.9) == '{"move": "1 1 2 1"}'
    assert Echo.calls == 1
    (tmp_path / "bad.json").write_text("[1]", encoding="utf-8")
    with pytest.raises(ConfigError):
        CassetteClient(tmp_path / "bad.json")


def test_prompt_digest_ignores_format_only():
    a = PromptBundle("s", "u", "stratego")
    assert prompt_digest(a) == prompt_digest(PromptBundle("s", "u", "actions"))
    assert prompt_digest(a) != prompt_digest(PromptBundle("s", "u2", "stratego"))
    assert prompt_digest(PromptBundle("ab", "c", "x")) != prompt_digest(PromptBundle("a", "bc", "x"))


# -- chat client ------------------------------------------------------------------

def completion(text: str) -> dict:
    return {"choices": [{"message": {"role": "assistant", "content": text}}]}


def client_with(handler, monkeypatch, **endpoint) -> ChatClient:
    monkeypatch.setenv("TEST_KEY", "sekret")
    spec = EndpointSpec("http://model.test/v1", "m", api_key_ref="TEST_KEY", **endpoint)
    return ChatClient(spec, transport=httpx.MockTransport(handler), limiter=RateLimiter(),
                      sleep=lambda s: None)


def test_chat_client_request_shape(monkeypatch):
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["auth"] = request.headers.get("authorization")
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json=completion("hello"))

    with client_with(handler, monkeypatch) as client:
        assert client.complete(PromptBundle("sys", "usr", "actions"), 0.2) == "hello"
    assert seen["url"] == "http://model.test/v1/chat/completions"
    assert seen["auth"] == "Bearer sekret"
    assert seen["body"] == {
        "model": "m",
        "messages": [{"role": "system", "content": "sys"}, {"role": "user", "content": "usr"}],
        "temperature": 0.2,
    }


def test_chat_client_retries_transient_errors(monkeypatch):
    statuses = iter([503, 429])

    def handler(request):
        status = next(statuses, 200)
        if status != 200:
            return httpx.Response(status)
        return httpx.Response(200, json=completion("ok"))

    client = client_with(handler, monkeypatch)
    assert client.complete(PromptBundle("s", "u", "x"), 0.2) == "ok"


def test_chat_client_gives_up(monkeypatch):
    calls = []

    def handler(request):
        calls.append(1)
        raise httpx.ConnectError("refused", request=request)

    client = client_with(handler, monkeypatch, max_retries=1)
    with pytest.raises(AgentFailure, match="2 attempt"):
        client.complete(PromptBundle("s", "u", "x"), 0.2)
    assert len(calls) == 2


def test_chat_client_client_error_is_not_retried(monkeypatch):
    calls = []

    def handler(request):
        calls.append(1)
        return httpx.Response(401)

    with pytest.raises(AgentFailure, match="401"):
        client_with(handler, monkeypatch).complete(PromptBundle("s", "u", "x"), 0.2)
    assert len(calls) == 1


def test_missing_api_key_is_config_error(monkeypatch):
    monkeypatch.delenv("ABSENT_KEY", raising=False)
    with pytest.raises(ConfigError, match="ABSENT_KEY"):
        ChatClient(EndpointSpec("http://x", "m", api_key_ref="ABSENT_KEY"))


def test_rate_limiter_rejects_nonpositive():
    with pytest.raises(ConfigError):
        RateLimiter(0)


# -- specs ------------------------------------------------------------------------

def test_agent_spec_validation():
    with pytest.raises(ConfigError):
        AgentSpec.from_dict({"kind": "remote"})
    with pytest.raises(ConfigError):
        AgentSpec.from_dict({"kind": "random", "temperature": 3})
    with pytest.raises(ConfigError):
        AgentSpec.from_dict({"kind": "oracle"})
    with pytest.raises(ConfigError):
        AgentSpec.from_dict({"kind": "random", "colour": "red"})
    spec = AgentSpec.from_dict({"kind": "remote", "endpoint": {"base_url": "http://x", "model_name": "m"}})
    assert spec.temperature == 0.2
    assert AgentSpec.from_dict(spec.to_dict()) == spec
