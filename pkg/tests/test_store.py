import json
import time

import pytest

from minifrag.effects import effect_source
from minifrag.store import (
    ArtifactStore,
    NotFound,
    ShaderArtifact,
    StoreCorrupt,
    derive_title,
)


@pytest.fixture
def store(tmp_path):
    return ArtifactStore(tmp_path / "store")


def make_artifact(intent="make it gray", name="grayscale", attempts=1):
    return ShaderArtifact.create(intent, effect_source(name), attempts)


def test_save_load_round_trip(store):
    artifact = make_artifact()
    store.save(artifact)
    assert store.load(artifact.id) == artifact


def test_manifest_fields_exact(store):
    artifact = make_artifact()
    store.save(artifact)
    manifest = json.loads((store.root / artifact.id / "manifest.json").read_text())
    assert set(manifest) == {"id", "intent", "title", "created_at", "attempts_used", "saved"}
    assert manifest["id"] == artifact.id
    assert manifest["created_at"].startswith(artifact.created_at.date().isoformat())
    source = (store.root / artifact.id / "shader.frag").read_text()
    assert source == artifact.source


def test_load_unknown_id(store):
    with pytest.raises(NotFound):
        store.load("no-such-id")
    with pytest.raises(NotFound):
        store.load("../escape")


def test_tampered_source_is_corrupt(store):
    artifact = make_artifact()
    store.save(artifact)
    frag = store.root / artifact.id / "shader.frag"
    frag.write_text(frag.read_text().replace("gl_FragColor", "gl_Fragcolor"))
    with pytest.raises(StoreCorrupt):
        store.load(artifact.id)


def test_unreadable_manifest_is_corrupt(store):
    artifact = make_artifact()
    store.save(artifact)
    (store.root / artifact.id / "manifest.json").write_text("{not json")
    with pytest.raises(StoreCorrupt):
        store.load(artifact.id)


def test_list_newest_first(store):
    first = make_artifact(intent="first")
    store.save(first)
    time.sleep(0.01)
    second = make_artifact(intent="second")
    store.save(second)
    listing = store.list()
    assert [s.title for s in listing] == ["second", "first"]
    assert [s.saved for s in listing] == [False, False]
    # stable across repeated listings
    assert store.list() == listing


def test_set_saved(store):
    artifact = make_artifact()
    store.save(artifact)
    updated = store.set_saved(artifact.id)
    assert updated.saved is True
    assert store.load(artifact.id).saved is True


def test_delete(store):
    artifact = make_artifact()
    store.save(artifact)
    store.delete(artifact.id)
    with pytest.raises(NotFound):
        store.load(artifact.id)
    with pytest.raises(NotFound):
        store.delete(artifact.id)


def test_title_derivation():
    assert derive_title("  make   the world\nblue  ") == "make the world blue"
    long = "x" * 100
    assert len(derive_title(long)) == 60


def test_store_survives_reopen(tmp_path):
    artifact = make_artifact()
    ArtifactStore(tmp_path / "s").save(artifact)
    reopened = ArtifactStore(tmp_path / "s")
    assert reopened.load(artifact.id) == artifact
