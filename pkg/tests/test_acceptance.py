"""Acceptance suite: one test per exit criterion, each printing a
PASS/FAIL line (run with -s to see them).  Everything here is offline:
loopback only, mock provider, no GPU."""

import json
import re
import time
from collections import Counter
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest
from fastapi.testclient import TestClient

from minifrag.cli import ExitStatus, main as cli_main
from minifrag.config import AppConfig
from minifrag.effects import effect_source, list_effects, make_test_card, oracle_render
from minifrag.eval import Image, render_frame
from minifrag.lang import CODE_CATALOG, validate
from minifrag.llm import ProviderConfig, make_provider
from minifrag.server import create_app
from minifrag.store import ArtifactStore
from minifrag.jobs import DONE, GenerationFailed, GenerationJob, JobRunner, run_job

from conftest import fenced
from mutants import generate_mutants

BROKEN = "void main(){ gl_FragColor = vec4(col, 1.0); }"


@contextmanager
def criterion(name):
    try:
        yield
    except BaseException:
        print(f"\nACCEPTANCE FAIL: {name}")
        raise
    print(f"\nACCEPTANCE PASS: {name}")


def synthetic_photo(width=640, height=480) -> Image:
    """Deterministic photo-like frame: gradients plus a disc, alpha 255."""
    y, x = np.mgrid[0:height, 0:width]
    arr = np.empty((height, width, 4), dtype=np.uint8)
    arr[..., 0] = (x * 255 // (width - 1)).astype(np.uint8)
    arr[..., 1] = (y * 255 // (height - 1)).astype(np.uint8)
    disc = ((x - width / 2) ** 2 + (y - height / 2) ** 2) < (height / 3) ** 2
    arr[..., 2] = np.where(disc, 220, 40).astype(np.uint8)
    arr[..., 3] = 255
    return Image.from_array(arr)


def test_oracle_equivalence_on_card(library_shaders, test_card):
    with criterion("oracle equivalence (7 effects x t in {0, 1.7}, <=1 byte, <5s)"):
        started = time.perf_counter()
        for name, shader in library_shaders.items():
            for t in (0.0, 1.7):
                mine = render_frame(shader, test_card, t).to_array().astype(int)
                ref = oracle_render(name, test_card, t).to_array().astype(int)
                delta = int(np.abs(mine - ref).max())
                assert delta <= 1, (name, t, delta)
        elapsed = time.perf_counter() - started
        assert elapsed < 5.0, f"took {elapsed:.2f}s"


def test_passthrough_identity_on_three_images(library_shaders, tmp_path):
    with criterion("passthrough identity (1x1, 64x64 card, 640x480 photo)"):
        shader = library_shaders["passthrough"]
        images = {
            "1x1": Image.filled(1, 1, (137, 42, 200, 255)),
            "card": make_test_card(),
            "photo": synthetic_photo(),
        }
        for label, image in images.items():
            png = tmp_path / f"{label}.png"
            image.save_png(png)
            loaded = Image.load_png(png)
            assert loaded.data == image.data, f"PNG round-trip broke {label}"
            out = render_frame(shader, loaded)
            assert out.data == loaded.data, f"identity failed on {label}"


def test_pitfall_corpus_and_no_false_rejections(library_shaders):
    with criterion("pitfall corpus rejected precisely; library + 100 mutants accepted"):
        corpus = sorted((Path(__file__).parent / "fixtures" / "pitfalls").glob("*.frag"))
        assert len(corpus) >= 20
        header = re.compile(r"// expect: (E\d{3}) @ (\d+):(\d+)")
        counts = Counter()
        for path in corpus:
            source = path.read_text()
            code, line, col = header.match(source).groups()
            counts[code] += 1
            result = validate(source)
            assert not result.ok, path.name
            hits = [d for d in result.diagnostics if d.code == code]
            assert hits, (path.name, result.diagnostics)
            assert any((d.line, d.col) == (int(line), int(col)) for d in hits), path.name
            source_lines = source.splitlines()
            for d in hits:
                assert 1 <= d.col <= len(source_lines[d.line - 1]) + 1
        for code in CODE_CATALOG:
            assert counts[code] >= 2, f"{code} under-covered"

        for name in list_effects():
            assert validate(effect_source(name)).ok, name
        mutants = generate_mutants(100)
        assert len(mutants) == 100
        for source in mutants:
            assert validate(source).ok


def test_repair_loop_behavior(tmp_path):
    with criterion("repair loop: E003 -> repair prompt -> success; exhaustion fails"):
        store = ArtifactStore(tmp_path / "store")

        fixdir = tmp_path / "fix-repair"
        fixdir.mkdir()
        (fixdir / "001.txt").write_text(fenced(BROKEN))
        (fixdir / "002.txt").write_text(fenced(effect_source("grayscale")))
        provider = make_provider(ProviderConfig(kind="mock", fixtures=fixdir))
        session = provider.open_session()
        seen_requests = []
        original = session.complete

        def recording(bundle):
            seen_requests.append(bundle.user)
            return original(bundle)

        session.complete = recording
        job = GenerationJob(intent="fixable")
        artifact = run_job(job, session, store)
        assert job.status == DONE
        assert artifact.attempts_used == 2
        diag_string = "[E003] undeclared identifier 'col'"
        assert diag_string in seen_requests[1]

        fixdir2 = tmp_path / "fix-exhaust"
        fixdir2.mkdir()
        for i in (1, 2, 3):
            (fixdir2 / f"00{i}.txt").write_text(fenced(BROKEN))
        provider2 = make_provider(ProviderConfig(kind="mock", fixtures=fixdir2))
        job2 = GenerationJob(intent="hopeless", max_attempts=3)
        with pytest.raises(GenerationFailed) as exc:
            run_job(job2, provider2.open_session(), store)
        assert exc.value.diagnostics and exc.value.diagnostics[0].code == "E003"


def test_end_to_end_offline_keep_green(tmp_path, capsys):
    with criterion('offline e2e: generate "grayscale except green" + render vs oracle'):
        fixdir = tmp_path / "fix"
        fixdir.mkdir()
        (fixdir / "001.txt").write_text(fenced(effect_source("keep_green")))
        store_dir = tmp_path / "store"

        started = time.perf_counter()
        code = cli_main([
            "--json", "generate", "grayscale except green",
            "--mock", str(fixdir), "--store", str(store_dir),
        ])
        elapsed = time.perf_counter() - started
        assert code == ExitStatus.OK
        assert elapsed < 1.0, f"generate took {elapsed:.2f}s"
        payload = json.loads(capsys.readouterr().out)
        artifact_id = payload["artifact_id"]

        # manifest round-trips
        store = ArtifactStore(store_dir)
        loaded = store.load(artifact_id)
        assert loaded.intent == "grayscale except green"
        manifest = json.loads((store_dir / artifact_id / "manifest.json").read_text())
        assert manifest == loaded.manifest()

        card = make_test_card()
        card_png = tmp_path / "card.png"
        card.save_png(card_png)
        out_png = tmp_path / "out.png"
        code = cli_main([
            "render", "--id", artifact_id, "--store", str(store_dir),
            "--in", str(card_png), "--out", str(out_png),
        ])
        assert code == ExitStatus.OK

        rendered = Image.load_png(out_png).to_array().astype(int)
        ref = oracle_render("keep_green", card).to_array().astype(int)
        assert np.abs(rendered - ref).max() <= 1

        original = card.to_array().astype(int)
        red = rendered[:16, :16]     # red patch -> desaturated gray
        assert (red[..., 0] == red[..., 1]).all() and (red[..., 1] == red[..., 2]).all()
        assert abs(int(red[0, 0, 0]) - 54) <= 1
        green = rendered[:16, 16:32]  # green patch -> untouched
        assert (green == original[:16, 16:32]).all()


def test_api_contract_walk(tmp_path, test_card, mock_wav):
    with criterion("API contract: route walk, error schema, exact SSE sequence"):
        fixdir = tmp_path / "fix"
        fixdir.mkdir()
        (fixdir / "001.txt").write_text(fenced(BROKEN))
        (fixdir / "002.txt").write_text(fenced(effect_source("keep_green")))
        (fixdir / "transcript.txt").write_text("underwater world")
        cfg = AppConfig(provider=ProviderConfig(kind="mock", fixtures=fixdir),
                        store_dir=tmp_path / "store")

        def check_error(response, status, code=None):
            assert response.status_code == status
            body = response.json()
            assert set(body) == {"status", "code", "message"}
            assert body["status"] == status
            if code:
                assert body["code"] == code

        with TestClient(create_app(cfg)) as client:
            # generate: valid -> 202, then the exact SSE transition sequence
            job_id = client.post(
                "/api/generate", json={"intent": "grayscale except green"}
            ).json()["job_id"]
            statuses = []
            with client.stream("GET", f"/api/jobs/{job_id}/events") as stream:
                for line in stream.iter_lines():
                    if line.startswith("data: "):
                        snap = json.loads(line[6:])
                        statuses.append(snap["status"])
                        if snap["status"] in ("done", "failed"):
                            break
            assert statuses == ["generating", "validating", "repairing",
                                "generating", "validating", "done"]

            check_error(client.post("/api/generate", json={"intent": " "}),
                        400, "blank_intent")
            check_error(client.get("/api/jobs/missing"), 404, "not_found")

            snap = client.get(f"/api/jobs/{job_id}").json()
            artifact_id = snap["artifact_id"]
            assert snap["status"] == "done" and artifact_id

            listing = client.get("/api/shaders").json()["shaders"]
            assert artifact_id in [s["id"] for s in listing]
            assert client.get(f"/api/shaders/{artifact_id}").status_code == 200
            assert client.post(f"/api/shaders/{artifact_id}/save").json()["saved"] is True
            check_error(client.post("/api/shaders/zzz/save"), 404, "not_found")

            ok = client.post("/api/validate",
                             json={"source": effect_source("passthrough")})
            assert ok.json() == {"diagnostics": []}
            bad = client.post("/api/validate", json={"source": BROKEN})
            assert [d["code"] for d in bad.json()["diagnostics"]] == ["E003"]
            check_error(
                client.post("/api/validate",
                            json={"source": "x" * (300 * 1024)}),
                413, "payload_too_large",
            )

            files = {"image": ("c.png", test_card.to_png_bytes(), "image/png")}
            render_ok = client.post(
                "/api/render", files=files,
                data={"source": effect_source("grayscale"), "time": "0"},
            )
            assert render_ok.status_code == 200
            mine = Image.from_png_bytes(render_ok.content).to_array().astype(int)
            ref = oracle_render("grayscale", test_card).to_array().astype(int)
            assert np.abs(mine - ref).max() <= 1
            check_error(
                client.post("/api/render", files=files, data={"source": BROKEN}),
                422, "shader_invalid",
            )
            check_error(
                client.post(
                    "/api/render",
                    files={"image": ("x.png", b"junk", "image/png")},
                    data={"source": effect_source("passthrough")},
                ),
                400, "invalid_png",
            )
            check_error(
                client.post("/api/render", files=files, data={"shader_id": "zzz"}),
                404, "not_found",
            )

            ok = client.post("/api/transcribe",
                             files={"audio": ("v.wav", mock_wav, "audio/wav")})
            assert ok.json() == {"text": "underwater world"}
            check_error(
                client.post("/api/transcribe",
                            files={"audio": ("v.wav", b"", "audio/wav")}),
                400, "empty_audio",
            )

            assert client.delete(f"/api/shaders/{artifact_id}").status_code == 200
            check_error(client.get(f"/api/shaders/{artifact_id}"), 404, "not_found")


def test_determinism_and_concurrency(tmp_path, test_card, library_shaders):
    with criterion("determinism: threads byte-identical; concurrent jobs independent"):
        for name, shader in library_shaders.items():
            one = render_frame(shader, test_card, 1.7, threads=1)
            many = render_frame(shader, test_card, 1.7, threads=4)
            assert one.data == many.data, name

        fixdir = tmp_path / "fix"
        fixdir.mkdir()
        (fixdir / "001.txt").write_text(fenced(effect_source("invert")))
        provider = make_provider(ProviderConfig(kind="mock", fixtures=fixdir))
        store = ArtifactStore(tmp_path / "store")
        runner = JobRunner(provider, store, workers=2)
        jobs = [runner.submit("negative world"), runner.submit("upside down colors")]
        for job in jobs:
            events = job.subscribe()
            while True:
                snap = events.get(timeout=10)
                if snap["status"] in ("done", "failed"):
                    break
        runner.shutdown()
        assert all(job.status == DONE for job in jobs)
        artifacts = [store.load(job.artifact_id) for job in jobs]
        assert {a.intent for a in artifacts} == {"negative world", "upside down colors"}
        assert artifacts[0].id != artifacts[1].id
        for artifact in artifacts:
            assert validate(artifact.source).ok
