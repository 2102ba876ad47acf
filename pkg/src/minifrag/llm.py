"""Transport to a chat-completion endpoint plus response post-processing.

Two provider kinds: "openai-compatible" speaks the standard chat JSON over
HTTP; "mock" replays numbered fixture files (001.txt, 002.txt, ...) in
order, which is what makes the whole pipeline testable offline.  Sessions
carry per-job state: each generation job opens its own, so mock fixture
sequences never interleave between jobs.

The API key is held in a repr-suppressed field and is never serialized
with jobs or artifacts.
"""

from __future__ import annotations

import io
import re
import time
import wave
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING

import httpx

if TYPE_CHECKING:  # annotation only; avoids importing the prompt machinery
    from .prompts import PromptBundle


class LlmError(Exception):
    pass


class NetworkError(LlmError):
    pass


class AuthError(LlmError):
    pass


class RateLimited(LlmError):
    def __init__(self, message: str, retry_after: float | None = None):
        super().__init__(message)
        self.retry_after = retry_after


class MalformedResponse(LlmError):
    pass


class NoCodeBlock(LlmError):
    pass


class AmbiguousBlocks(LlmError):
    pass


class UnsupportedAudio(LlmError):
    pass


@dataclass
class ProviderConfig:
    kind: str = "openai-compatible"  # or "mock"
    endpoint: str = "https://api.openai.com/v1"
    model: str = "o3-mini"
    api_key: str = field(default="", repr=False)
    temperature: float = 0.2
    timeout: float = 60.0
    fixtures: Path | None = None  # mock only

    def __post_init__(self):
        if self.kind not in ("openai-compatible", "mock"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")
        if self.kind == "mock" and self.fixtures is None:
            raise ValueError("mock provider requires a fixtures directory")


@dataclass(frozen=True)
class Completion:
    text: str
    latency_ms: int
    provider_id: str


def make_provider(cfg: ProviderConfig, transport: httpx.BaseTransport | None = None):
    if cfg.kind == "mock":
        return MockProvider(cfg)
    return OpenAiCompatProvider(cfg, transport=transport)


class OpenAiCompatProvider:
    """Plain two-message chat completion against any OpenAI-style endpoint."""

    def __init__(self, cfg: ProviderConfig, transport: httpx.BaseTransport | None = None):
        self.cfg = cfg
        self._transport = transport

    def open_session(self) -> "OpenAiSession":
        return OpenAiSession(self.cfg, self._transport)


class OpenAiSession:
    def __init__(self, cfg: ProviderConfig, transport: httpx.BaseTransport | None):
        self.cfg = cfg
        self._transport = transport

    def _client(self) -> httpx.Client:
        headers = {}
        if self.cfg.api_key:
            headers["Authorization"] = f"Bearer {self.cfg.api_key}"
        return httpx.Client(
            timeout=self.cfg.timeout, headers=headers, transport=self._transport
        )

    def complete(self, bundle: "PromptBundle") -> Completion:
        payload = {
            "model": self.cfg.model,
            "temperature": self.cfg.temperature,
            "messages": [
                {"role": "system", "content": bundle.system},
                {"role": "user", "content": bundle.user},
            ],
        }
        url = self.cfg.endpoint.rstrip("/") + "/chat/completions"
        started = time.perf_counter()
        try:
            with self._client() as client:
                response = client.post(url, json=payload)
        except httpx.HTTPError as err:
            raise NetworkError(f"chat completion request failed: {err}") from err
        latency = int((time.perf_counter() - started) * 1000)

        _raise_for_status(response)
        try:
            body = response.json()
            text = body["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as err:
            raise MalformedResponse(f"response has no choices: {err}") from err
        return Completion(text=text, latency_ms=latency, provider_id=self.cfg.model)

    def transcribe(self, audio: bytes) -> str:
        _require_wav(audio)
        url = self.cfg.endpoint.rstrip("/") + "/audio/transcriptions"
        files = {"file": ("speech.wav", audio, "audio/wav")}
        data = {"model": "whisper-1"}
        try:
            with self._client() as client:
                response = client.post(url, files=files, data=data)
        except httpx.HTTPError as err:
            raise NetworkError(f"transcription request failed: {err}") from err
        _raise_for_status(response)
        try:
            return response.json()["text"]
        except (ValueError, LookupError, TypeError) as err:
            raise MalformedResponse(f"transcription response has no text: {err}") from err


class MockProvider:
    """Replays fixture responses; deterministic substitute for a real model."""

    def __init__(self, cfg: ProviderConfig):
        self.cfg = cfg
        self.fixtures = Path(cfg.fixtures)
        if not self.fixtures.is_dir():
            raise ValueError(f"fixture directory not found: {self.fixtures}")

    def open_session(self) -> "MockSession":
        return MockSession(self.fixtures)


class MockSession:
    def __init__(self, fixtures: Path):
        self.fixtures = fixtures
        self._responses = sorted(
            p for p in fixtures.iterdir() if re.fullmatch(r"\d+\.txt", p.name)
        )
        self._cursor = 0

    def complete(self, bundle: "PromptBundle") -> Completion:
        if self._cursor >= len(self._responses):
            raise MalformedResponse(
                f"mock fixtures exhausted after {self._cursor} responses"
            )
        path = self._responses[self._cursor]
        self._cursor += 1
        return Completion(text=path.read_text(), latency_ms=0, provider_id="mock")

    def transcribe(self, audio: bytes) -> str:
        _require_wav(audio)
        transcript = self.fixtures / "transcript.txt"
        if transcript.exists():
            return transcript.read_text().strip()
        return "passthrough"


def complete(bundle: "PromptBundle", cfg: ProviderConfig) -> Completion:
    """One-shot completion with a throwaway session."""
    return make_provider(cfg).open_session().complete(bundle)


def transcribe(audio: bytes, cfg: ProviderConfig) -> str:
    return make_provider(cfg).open_session().transcribe(audio)


def _raise_for_status(response: httpx.Response) -> None:
    code = response.status_code
    if code in (401, 403):
        raise AuthError(f"endpoint rejected credentials (HTTP {code})")
    if code == 429:
        retry_after = None
        raw = response.headers.get("retry-after")
        if raw is not None:
            try:
                retry_after = float(raw)
            except ValueError:
                pass
        raise RateLimited("rate limited (HTTP 429)", retry_after=retry_after)
    if code >= 400:
        raise NetworkError(f"endpoint returned HTTP {code}")


def _require_wav(audio: bytes) -> None:
    if not audio:
        raise UnsupportedAudio("empty audio payload")
    try:
        with wave.open(io.BytesIO(audio)) as wav:
            if wav.getsampwidth() != 2:
                raise UnsupportedAudio("expected 16-bit PCM WAV")
            if wav.getnchannels() not in (1, 2):
                raise UnsupportedAudio("expected mono or stereo WAV")
    except wave.Error as err:
        raise UnsupportedAudio(f"not a PCM WAV file: {err}") from err
    except EOFError as err:
        raise UnsupportedAudio("truncated WAV file") from err


_FENCE_RE = re.compile(
    r"```[ \t]*(?P<tag>[A-Za-z0-9_+-]*)[ \t]*\r?\n(?P<body>.*?)```",
    re.DOTALL,
)
_SHADER_TAGS = {"", "glsl", "hlsl", "shader", "frag", "c", "cpp"}


def extract_code(response: str) -> str:
    """Pull the shader source out of a model response.

    Fenced blocks are collected; the first one containing "void main" wins.
    If none mentions main but exactly one block exists, that block is taken.
    """
    blocks = [
        m.group("body")
        for m in _FENCE_RE.finditer(response)
        if m.group("tag").lower() in _SHADER_TAGS
    ]
    if not blocks:
        raise NoCodeBlock("response contains no fenced code block")
    for body in blocks:
        if "void main" in body:
            return body.strip("\n") + "\n"
    if len(blocks) == 1:
        return blocks[0].strip("\n") + "\n"
    raise AmbiguousBlocks(
        f"response contains {len(blocks)} code blocks and none defines main"
    )
