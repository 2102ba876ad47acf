import numpy as np
import pytest

from minifrag.effects import effect_source, make_test_card
from minifrag.lang import validate


@pytest.fixture(scope="session")
def test_card():
    return make_test_card()


@pytest.fixture(scope="session")
def library_shaders():
    """name -> ValidatedShader for every catalog entry."""
    from minifrag.effects import list_effects

    shaders = {}
    for name in list_effects():
        result = validate(effect_source(name))
        assert result.ok, (name, [str(d) for d in result.diagnostics])
        shaders[name] = result.shader
    return shaders


@pytest.fixture
def mock_fixture_dir(tmp_path):
    """Build a numbered-response fixture directory for the mock provider."""

    def build(*responses, transcript=None):
        fixdir = tmp_path / "fixtures"
        fixdir.mkdir(exist_ok=True)
        for i, text in enumerate(responses, start=1):
            (fixdir / f"{i:03d}.txt").write_text(text)
        if transcript is not None:
            (fixdir / "transcript.txt").write_text(transcript)
        return fixdir

    return build


def fenced(source: str, tag: str = "glsl", prose: str = "") -> str:
    body = f"```{tag}\n{source.rstrip()}\n```\n"
    return f"{prose}\n{body}" if prose else body


@pytest.fixture
def mock_wav():
    """Minimal valid 16-bit mono PCM WAV."""
    import io
    import wave

    buf = io.BytesIO()
    with wave.open(buf, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(16000)
        wav.writeframes(np.zeros(1600, dtype=np.int16).tobytes())
    return buf.getvalue()
