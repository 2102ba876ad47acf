"""Generation jobs: intent -> prompt -> completion -> validation -> repair
loop -> stored artifact.

A job is a small state machine (pending -> generating -> validating ->
(repairing -> generating)* -> done|failed) whose transitions are observable:
every status change is appended to an event log that server-sent-events
subscribers replay and follow.  The model is consulted at most max_attempts
times; repair prompts carry only the latest source and diagnostics.
"""

from __future__ import annotations

import queue
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .lang import Diagnostic, validate
from .llm import AmbiguousBlocks, LlmError, NoCodeBlock, extract_code
from .prompts import PromptBundle, build_repair_prompt, build_system_prompt, build_user_prompt
from .store import ArtifactStore, ShaderArtifact

PENDING = "pending"
GENERATING = "generating"
VALIDATING = "validating"
REPAIRING = "repairing"
DONE = "done"
FAILED = "failed"

TERMINAL = (DONE, FAILED)

DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_WORKERS = 2


class GenerationFailed(Exception):
    def __init__(self, message: str, diagnostics: list | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


@dataclass
class GenerationJob:
    intent: str
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    id: str = field(default_factory=lambda: str(uuid.uuid4()))
    status: str = PENDING
    attempt: int = 0
    diagnostics: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    artifact_id: str | None = None
    error: str | None = None

    def __post_init__(self):
        self._lock = threading.Lock()
        self._events: list[dict] = []
        self._subscribers: list[queue.SimpleQueue] = []

    def snapshot(self) -> dict:
        with self._lock:
            return {
                "id": self.id,
                "intent": self.intent,
                "status": self.status,
                "attempt": self.attempt,
                "max_attempts": self.max_attempts,
                "diagnostics": [d.to_dict() for d in self.diagnostics],
                "timings": {k: round(v, 3) for k, v in self.timings.items()},
                "artifact_id": self.artifact_id,
                "error": self.error,
            }

    def transition(self, status: str, **updates) -> None:
        with self._lock:
            self.status = status
            for key, value in updates.items():
                setattr(self, key, value)
        snap = self.snapshot()
        with self._lock:
            self._events.append(snap)
            subscribers = list(self._subscribers)
        for sub in subscribers:
            sub.put(snap)

    def subscribe(self) -> queue.SimpleQueue:
        """Event queue preloaded with all past transitions; a terminal
        status marks the end of the stream."""
        sub: queue.SimpleQueue = queue.SimpleQueue()
        with self._lock:
            past = list(self._events)
            self._subscribers.append(sub)
        for snap in past:
            sub.put(snap)
        return sub

    def unsubscribe(self, sub: queue.SimpleQueue) -> None:
        with self._lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    @property
    def is_terminal(self) -> bool:
        return self.status in TERMINAL


class _StageClock:
    """Accumulates per-stage wall time so the stages sum to the total."""

    def __init__(self, timings: dict):
        self.timings = timings
        self.started = time.perf_counter()

    def stage(self, name: str):
        return _StageTimer(self.timings, name)

    def finish(self) -> None:
        self.timings["total"] = (time.perf_counter() - self.started) * 1000.0


class _StageTimer:
    def __init__(self, timings: dict, name: str):
        self.timings = timings
        self.name = name

    def __enter__(self):
        self._t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        elapsed = (time.perf_counter() - self._t0) * 1000.0
        self.timings[self.name] = self.timings.get(self.name, 0.0) + elapsed
        return False


def run_job(job: GenerationJob, session, store: ArtifactStore,
            template_dir=None) -> ShaderArtifact:
    """Drive one job to done/failed.  `session` is a provider session
    (per-job, so mock fixtures replay deterministically)."""
    clock = _StageClock(job.timings)
    with clock.stage("prepare"):
        system = build_system_prompt(template_dir=template_dir)
        user = build_user_prompt(job.intent, template_dir=template_dir)

    last_diagnostics: list = []
    try:
        for attempt in range(1, job.max_attempts + 1):
            job.transition(GENERATING, attempt=attempt)
            with clock.stage("generate"):
                completion = session.complete(PromptBundle(system, user, attempt))

            job.transition(VALIDATING)
            with clock.stage("validate"):
                try:
                    source = extract_code(completion.text)
                    result = validate(source)
                    ok, diagnostics = result.ok, result.diagnostics
                except (NoCodeBlock, AmbiguousBlocks) as err:
                    source = ""
                    ok = False
                    diagnostics = [Diagnostic("E010", f"unusable response: {err}", 1, 1)]

            if ok:
                with clock.stage("store"):
                    artifact = ShaderArtifact.create(job.intent, source, attempts_used=attempt)
                    store.save(artifact)
                clock.finish()
                job.transition(DONE, artifact_id=artifact.id, diagnostics=[])
                return artifact

            last_diagnostics = diagnostics
            if attempt < job.max_attempts:
                job.transition(REPAIRING, diagnostics=diagnostics)
                with clock.stage("repair"):
                    user = build_repair_prompt(source or completion.text, diagnostics,
                                               template_dir=template_dir)

        clock.finish()
        job.transition(FAILED, diagnostics=last_diagnostics,
                       error=f"no valid shader after {job.max_attempts} attempts")
        raise GenerationFailed(
            f"no valid shader after {job.max_attempts} attempts", last_diagnostics
        )
    except LlmError as err:
        clock.finish()
        job.transition(FAILED, error=str(err))
        raise


class JobRunner:
    """Bounded worker pool plus job registry; the server's backbone."""

    def __init__(self, provider, store: ArtifactStore,
                 max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                 workers: int = DEFAULT_WORKERS,
                 template_dir=None):
        self.provider = provider
        self.store = store
        self.max_attempts = max_attempts
        self.template_dir = template_dir
        self._pool = ThreadPoolExecutor(max_workers=workers)
        self._jobs: dict[str, GenerationJob] = {}
        self._lock = threading.Lock()

    def submit(self, intent: str) -> GenerationJob:
        job = GenerationJob(intent=intent, max_attempts=self.max_attempts)
        with self._lock:
            self._jobs[job.id] = job
        self._pool.submit(self._run, job)
        return job

    def _run(self, job: GenerationJob) -> None:
        session = self.provider.open_session()
        try:
            run_job(job, session, self.store, template_dir=self.template_dir)
        except (GenerationFailed, LlmError):
            pass  # recorded on the job itself

    def get(self, job_id: str) -> GenerationJob | None:
        with self._lock:
            return self._jobs.get(job_id)

    def pending_count(self) -> int:
        with self._lock:
            return sum(1 for job in self._jobs.values() if not job.is_terminal)

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)


def generate_shader(intent: str, provider, store: ArtifactStore,
                    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
                    template_dir=None) -> ShaderArtifact:
    """Synchronous one-shot generation; the CLI path."""
    job = GenerationJob(intent=intent, max_attempts=max_attempts)
    session = provider.open_session()
    return run_job(job, session, store, template_dir=template_dir)
