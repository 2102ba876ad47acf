import json

import httpx
import pytest

from minifrag.prompts import PromptBundle
from minifrag.llm import (
    AmbiguousBlocks,
    AuthError,
    Completion,
    MalformedResponse,
    NetworkError,
    NoCodeBlock,
    ProviderConfig,
    RateLimited,
    UnsupportedAudio,
    extract_code,
    make_provider,
)

# -- extract_code --


def test_extract_single_block():
    text = "Here you go:\n```glsl\nvoid main(){ gl_FragColor = vec4(1.0); }\n```\n"
    assert extract_code(text) == "void main(){ gl_FragColor = vec4(1.0); }\n"


def test_extract_prefers_block_with_main():
    text = (
        "```glsl\nfloat helper;\n```\nand then\n"
        "```\nvoid main(){ }\n```\n"
    )
    assert extract_code(text) == "void main(){ }\n"


def test_extract_single_block_without_main():
    assert extract_code("```\nfloat x;\n```") == "float x;\n"


def test_extract_no_blocks():
    with pytest.raises(NoCodeBlock):
        extract_code("I am sorry, I cannot write shaders today.")


def test_extract_ambiguous():
    with pytest.raises(AmbiguousBlocks):
        extract_code("```\na;\n```\n```\nb;\n```")


def test_extract_is_total_over_weird_text():
    for junk in ("", "``` unclosed", "````\n````", "text ``` more"):
        try:
            extract_code(junk)
        except (NoCodeBlock, AmbiguousBlocks):
            pass


# -- provider config --


def test_mock_requires_fixtures():
    with pytest.raises(ValueError):
        ProviderConfig(kind="mock")


def test_temperature_range():
    with pytest.raises(ValueError):
        ProviderConfig(temperature=3.0)


def test_api_key_not_in_repr():
    cfg = ProviderConfig(api_key="sk-secret-123")
    assert "sk-secret-123" not in repr(cfg)


# -- mock provider --


def test_mock_sequence(mock_fixture_dir):
    fixdir = mock_fixture_dir("first response", "second response")
    provider = make_provider(ProviderConfig(kind="mock", fixtures=fixdir))
    session = provider.open_session()
    assert session.complete(PromptBundle("s", "u")).text == "first response"
    assert session.complete(PromptBundle("s", "u")).text == "second response"


def test_mock_sessions_are_independent(mock_fixture_dir):
    fixdir = mock_fixture_dir("A", "B")
    provider = make_provider(ProviderConfig(kind="mock", fixtures=fixdir))
    s1, s2 = provider.open_session(), provider.open_session()
    assert s1.complete(PromptBundle("s", "u")).text == "A"
    assert s2.complete(PromptBundle("s", "u")).text == "A"


def test_mock_exhaustion(mock_fixture_dir):
    fixdir = mock_fixture_dir("only one")
    session = make_provider(ProviderConfig(kind="mock", fixtures=fixdir)).open_session()
    session.complete(PromptBundle("s", "u"))
    with pytest.raises(MalformedResponse):
        session.complete(PromptBundle("s", "u"))


def test_mock_transcribe(mock_fixture_dir, mock_wav):
    fixdir = mock_fixture_dir("resp", transcript="make the world blue")
    session = make_provider(ProviderConfig(kind="mock", fixtures=fixdir)).open_session()
    assert session.transcribe(mock_wav) == "make the world blue"


def test_transcribe_rejects_empty_and_garbage(mock_fixture_dir):
    fixdir = mock_fixture_dir("resp")
    session = make_provider(ProviderConfig(kind="mock", fixtures=fixdir)).open_session()
    with pytest.raises(UnsupportedAudio):
        session.transcribe(b"")
    with pytest.raises(UnsupportedAudio):
        session.transcribe(b"not a wav at all")


# -- openai-compatible provider over a mock transport --


def _provider_with(handler):
    transport = httpx.MockTransport(handler)
    cfg = ProviderConfig(endpoint="https://llm.example/v1", api_key="sk-test")
    return make_provider(cfg, transport=transport)


def test_openai_request_shape_and_response():
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["auth"] = request.headers.get("authorization")
        seen["body"] = json.loads(request.content)
        return httpx.Response(
            200,
            json={"choices": [{"message": {"role": "assistant", "content": "hi"}}]},
        )

    completion = _provider_with(handler).open_session().complete(PromptBundle("SYS", "USR"))
    assert isinstance(completion, Completion)
    assert completion.text == "hi"
    assert completion.latency_ms >= 0
    assert seen["url"].endswith("/v1/chat/completions")
    assert seen["auth"] == "Bearer sk-test"
    messages = seen["body"]["messages"]
    assert [m["role"] for m in messages] == ["system", "user"]
    assert messages[0]["content"] == "SYS"
    assert seen["body"]["temperature"] == 0.2


def test_http_401_is_auth_error():
    handler = lambda request: httpx.Response(401, json={})
    with pytest.raises(AuthError):
        _provider_with(handler).open_session().complete(PromptBundle("s", "u"))


def test_http_429_is_rate_limited_with_retry_after():
    handler = lambda request: httpx.Response(429, headers={"retry-after": "2.5"}, json={})
    with pytest.raises(RateLimited) as exc:
        _provider_with(handler).open_session().complete(PromptBundle("s", "u"))
    assert exc.value.retry_after == 2.5


def test_http_500_is_network_error():
    handler = lambda request: httpx.Response(500, text="boom")
    with pytest.raises(NetworkError):
        _provider_with(handler).open_session().complete(PromptBundle("s", "u"))


def test_missing_choices_is_malformed():
    handler = lambda request: httpx.Response(200, json={"unexpected": True})
    with pytest.raises(MalformedResponse):
        _provider_with(handler).open_session().complete(PromptBundle("s", "u"))


def test_timeout_is_network_error():
    def handler(request):
        raise httpx.ConnectTimeout("too slow")

    with pytest.raises(NetworkError):
        _provider_with(handler).open_session().complete(PromptBundle("s", "u"))


def test_transcription_upload(mock_wav):
    def handler(request: httpx.Request) -> httpx.Response:
        assert request.url.path.endswith("/audio/transcriptions")
        assert b"speech.wav" in request.content
        return httpx.Response(200, json={"text": "heat vision please"})

    assert _provider_with(handler).open_session().transcribe(mock_wav) == "heat vision please"
