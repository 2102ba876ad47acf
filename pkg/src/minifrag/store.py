"""Artifact store: one directory per generated shader.

Layout is deliberately inspectable: `<id>/manifest.json` with the metadata
and `<id>/shader.frag` with the bare source.  Loading re-validates the
source, so a tampered or rotted artifact surfaces as StoreCorrupt instead
of reaching the renderer.
"""

from __future__ import annotations

import json
import re
import shutil
import threading
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .lang import validate

_MANIFEST_FIELDS = ("id", "intent", "title", "created_at", "attempts_used", "saved")

TITLE_MAX_CHARS = 60


class StoreError(Exception):
    pass


class NotFound(StoreError):
    pass


class StoreCorrupt(StoreError):
    pass


def derive_title(intent: str) -> str:
    return " ".join(intent.split())[:TITLE_MAX_CHARS]


@dataclass(frozen=True)
class ShaderArtifact:
    id: str
    intent: str
    source: str
    created_at: datetime
    attempts_used: int
    saved: bool = False

    @property
    def title(self) -> str:
        return derive_title(self.intent)

    @classmethod
    def create(cls, intent: str, source: str, attempts_used: int) -> "ShaderArtifact":
        return cls(
            id=str(uuid.uuid4()),
            intent=intent,
            source=source,
            created_at=datetime.now(timezone.utc),
            attempts_used=attempts_used,
        )

    def manifest(self) -> dict:
        return {
            "id": self.id,
            "intent": self.intent,
            "title": self.title,
            "created_at": self.created_at.isoformat(),
            "attempts_used": self.attempts_used,
            "saved": self.saved,
        }


@dataclass(frozen=True)
class ArtifactSummary:
    id: str
    title: str
    created_at: datetime
    saved: bool


class ArtifactStore:
    """Directory-backed store; writes are serialized with a lock."""

    def __init__(self, root: Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _dir(self, artifact_id: str) -> Path:
        if not re.fullmatch(r"[A-Za-z0-9-]+", artifact_id):
            raise NotFound(f"no artifact {artifact_id!r}")
        return self.root / artifact_id

    def save(self, artifact: ShaderArtifact) -> str:
        with self._lock:
            target = self._dir(artifact.id)
            target.mkdir(parents=True, exist_ok=True)
            (target / "shader.frag").write_text(artifact.source)
            (target / "manifest.json").write_text(
                json.dumps(artifact.manifest(), indent=2) + "\n"
            )
        return artifact.id

    def load(self, artifact_id: str) -> ShaderArtifact:
        target = self._dir(artifact_id)
        manifest_path = target / "manifest.json"
        source_path = target / "shader.frag"
        if not manifest_path.exists() or not source_path.exists():
            raise NotFound(f"no artifact {artifact_id!r}")
        try:
            manifest = json.loads(manifest_path.read_text())
            created_at = datetime.fromisoformat(manifest["created_at"])
            artifact = ShaderArtifact(
                id=manifest["id"],
                intent=manifest["intent"],
                source=source_path.read_text(),
                created_at=created_at,
                attempts_used=int(manifest["attempts_used"]),
                saved=bool(manifest["saved"]),
            )
        except (ValueError, KeyError, TypeError) as err:
            raise StoreCorrupt(f"artifact {artifact_id}: unreadable manifest: {err}") from err
        result = validate(artifact.source)
        if not result.ok:
            raise StoreCorrupt(
                f"artifact {artifact_id}: stored source no longer validates "
                f"({result.diagnostics[0]})"
            )
        return artifact

    def list(self) -> list:
        summaries = []
        for entry in self.root.iterdir():
            if not (entry / "manifest.json").exists():
                continue
            try:
                manifest = json.loads((entry / "manifest.json").read_text())
                summaries.append(
                    ArtifactSummary(
                        id=manifest["id"],
                        title=manifest["title"],
                        created_at=datetime.fromisoformat(manifest["created_at"]),
                        saved=bool(manifest["saved"]),
                    )
                )
            except (ValueError, KeyError, TypeError) as err:
                raise StoreCorrupt(f"artifact {entry.name}: unreadable manifest: {err}") from err
        summaries.sort(key=lambda s: (s.created_at, s.id), reverse=True)
        return summaries

    def set_saved(self, artifact_id: str, saved: bool = True) -> ShaderArtifact:
        artifact = self.load(artifact_id)
        updated = replace(artifact, saved=saved)
        self.save(updated)
        return updated

    def delete(self, artifact_id: str) -> None:
        with self._lock:
            target = self._dir(artifact_id)
            if not target.exists():
                raise NotFound(f"no artifact {artifact_id!r}")
            shutil.rmtree(target)
