"""Operator command line: generate shaders, validate and render files,
manage the artifact store, launch the server.

Exit codes are stable: 0 success, 1 validation failed, 2 generation
failed, 3 I/O error, 4 bad arguments.  With --json the only stdout is one
JSON document; everything meant for humans goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from enum import IntEnum
from pathlib import Path

from .config import AppConfig, ConfigError, load_config
from .effects import UnknownEffect, effect_source, get_effect, list_effects
from .eval import EvaluatorError, Image, render_frame
from .jobs import GenerationFailed, generate_shader
from .lang import validate
from .llm import LlmError, ProviderConfig, make_provider
from .store import ArtifactStore, NotFound, StoreCorrupt


class ExitStatus(IntEnum):
    OK = 0
    VALIDATION_FAILED = 1
    GENERATION_FAILED = 2
    IO_ERROR = 3
    BAD_ARGS = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(ExitStatus.BAD_ARGS)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="minifrag", description=__doc__)
    parser.add_argument("--json", action="store_true", help="machine-readable stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="turn an intent into a stored shader")
    p.add_argument("intent")
    p.add_argument("--config", type=Path)
    p.add_argument("--store", type=Path)
    p.add_argument("--mock", type=Path, metavar="FIXDIR",
                   help="use fixture responses instead of a live model")
    p.add_argument("--max-attempts", type=int, default=None)

    p = sub.add_parser("validate", help="run the compile gate over a .frag file")
    p.add_argument("file", type=Path)

    for name in ("render", "render-seq"):
        p = sub.add_parser(name, help="apply a shader to a PNG")
        p.add_argument("shader", nargs="?", type=Path, help="a .frag file")
        p.add_argument("--id", help="render a stored artifact instead of a file")
        p.add_argument("--in", dest="input", type=Path, required=True)
        p.add_argument("--store", type=Path)
        p.add_argument("--threads", type=int, default=1)
        if name == "render":
            p.add_argument("--out", type=Path, required=True)
            p.add_argument("--time", type=float, default=0.0)
        else:
            p.add_argument("--out-dir", type=Path, required=True)
            p.add_argument("--frames", type=int, required=True)
            p.add_argument("--fps", type=float, required=True)

    p = sub.add_parser("effects", help="the built-in effect catalog")
    effects_sub = p.add_subparsers(dest="effects_command", required=True)
    effects_sub.add_parser("list")
    pe = effects_sub.add_parser("emit")
    pe.add_argument("name")

    p = sub.add_parser("store", help="manage stored artifacts")
    store_sub = p.add_subparsers(dest="store_command", required=True)
    for cmd in ("list", "save", "rm"):
        ps = store_sub.add_parser(cmd)
        ps.add_argument("--store", type=Path)
        if cmd != "list":
            ps.add_argument("id")

    p = sub.add_parser("serve", help="run the local HTTP service")
    p.add_argument("--config", type=Path)
    p.add_argument("--store", type=Path)
    p.add_argument("--host")
    p.add_argument("--port", type=int)
    p.add_argument("--static", type=Path)
    p.add_argument("--mock", type=Path, metavar="FIXDIR")

    return parser


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2))
        if human:
            print(human, file=sys.stderr)
    elif human:
        print(human)


def _resolve_config(args) -> AppConfig:
    cfg = load_config(getattr(args, "config", None))
    if getattr(args, "store", None):
        cfg.store_dir = args.store
    if getattr(args, "mock", None):
        cfg.provider = ProviderConfig(kind="mock", fixtures=args.mock)
    if getattr(args, "max_attempts", None):
        cfg.max_attempts = args.max_attempts
    return cfg


def cmd_generate(args) -> int:
    cfg = _resolve_config(args)
    store = ArtifactStore(cfg.store_dir)
    try:
        provider = make_provider(cfg.provider)
        artifact = generate_shader(args.intent, provider, store,
                                   max_attempts=cfg.max_attempts,
                                   template_dir=cfg.template_dir)
    except GenerationFailed as err:
        for diag in err.diagnostics:
            print(str(diag), file=sys.stderr)
        print(f"generation failed: {err}", file=sys.stderr)
        return ExitStatus.GENERATION_FAILED
    except (LlmError, ValueError) as err:
        print(f"generation failed: {err}", file=sys.stderr)
        return ExitStatus.GENERATION_FAILED

    source_path = store.root / artifact.id / "shader.frag"
    _emit(
        args,
        {
            "artifact_id": artifact.id,
            "source_path": str(source_path),
            "attempts_used": artifact.attempts_used,
            "title": artifact.title,
        },
        f"{artifact.id}\n{source_path}",
    )
    return ExitStatus.OK


def cmd_validate(args) -> int:
    try:
        source = args.file.read_text()
    except OSError as err:
        print(f"cannot read {args.file}: {err}", file=sys.stderr)
        return ExitStatus.IO_ERROR
    result = validate(source)
    if args.json:
        print(json.dumps({"ok": result.ok,
                          "diagnostics": [d.to_dict() for d in result.diagnostics]}))
    elif result.ok:
        print("OK")
    else:
        print(f"{'LINE':>4} {'COL':>4} CODE  MESSAGE")
        for d in result.diagnostics:
            print(f"{d.line:>4} {d.col:>4} {d.code}  {d.message}")
    return ExitStatus.OK if result.ok else ExitStatus.VALIDATION_FAILED


def _load_shader_for_render(args):
    """Returns (shader, exit_code); exit_code is None on success."""
    if (args.shader is None) == (args.id is None):
        print("error: provide a .frag file or --id, not both", file=sys.stderr)
        return None, ExitStatus.BAD_ARGS
    if args.id is not None:
        cfg = _resolve_config(args)
        try:
            artifact = ArtifactStore(cfg.store_dir).load(args.id)
        except (NotFound, StoreCorrupt) as err:
            print(str(err), file=sys.stderr)
            return None, ExitStatus.IO_ERROR
        source = artifact.source
    else:
        try:
            source = args.shader.read_text()
        except OSError as err:
            print(f"cannot read {args.shader}: {err}", file=sys.stderr)
            return None, ExitStatus.IO_ERROR
    result = validate(source)
    if not result.ok:
        for d in result.diagnostics:
            print(str(d), file=sys.stderr)
        return None, ExitStatus.VALIDATION_FAILED
    return result.shader, None


def cmd_render(args) -> int:
    shader, failure = _load_shader_for_render(args)
    if failure is not None:
        return failure
    try:
        frame = Image.load_png(args.input)
    except OSError as err:
        print(f"cannot read {args.input}: {err}", file=sys.stderr)
        return ExitStatus.IO_ERROR
    try:
        out = render_frame(shader, frame, args.time, threads=args.threads)
    except EvaluatorError as err:
        print(f"render failed: {err}", file=sys.stderr)
        return ExitStatus.VALIDATION_FAILED
    try:
        out.save_png(args.out)
    except OSError as err:
        print(f"cannot write {args.out}: {err}", file=sys.stderr)
        return ExitStatus.IO_ERROR
    _emit(args, {"out": str(args.out), "width": out.width, "height": out.height},
          f"wrote {args.out}")
    return ExitStatus.OK


def cmd_render_seq(args) -> int:
    shader, failure = _load_shader_for_render(args)
    if failure is not None:
        return failure
    try:
        frame = Image.load_png(args.input)
    except OSError as err:
        print(f"cannot read {args.input}: {err}", file=sys.stderr)
        return ExitStatus.IO_ERROR
    if args.frames < 1 or args.fps <= 0:
        print("error: --frames must be >= 1 and --fps > 0", file=sys.stderr)
        return ExitStatus.BAD_ARGS
    try:
        args.out_dir.mkdir(parents=True, exist_ok=True)
        written = []
        for index in range(args.frames):
            t = index / args.fps
            out = render_frame(shader, frame, t, threads=args.threads)
            path = args.out_dir / f"frame_{index:05d}.png"
            out.save_png(path)
            written.append(str(path))
    except OSError as err:
        print(f"cannot write frames: {err}", file=sys.stderr)
        return ExitStatus.IO_ERROR
    _emit(args, {"frames": written}, f"wrote {len(written)} frames to {args.out_dir}")
    return ExitStatus.OK


def cmd_effects(args) -> int:
    if args.effects_command == "list":
        entries = [get_effect(name) for name in list_effects()]
        _emit(
            args,
            {"effects": [{"name": e.name, "title": e.title, "tags": list(e.tags)}
                         for e in entries]},
            "\n".join(f"{e.name:<14}{e.title}" for e in entries),
        )
        return ExitStatus.OK
    try:
        source = effect_source(args.name)
    except UnknownEffect:
        print(f"unknown effect {args.name!r}; try 'minifrag effects list'", file=sys.stderr)
        return ExitStatus.IO_ERROR
    if args.json:
        print(json.dumps({"name": args.name, "source": source}))
    else:
        print(source, end="")
    return ExitStatus.OK


def cmd_store(args) -> int:
    cfg = _resolve_config(args)
    store = ArtifactStore(cfg.store_dir)
    try:
        if args.store_command == "list":
            rows = store.list()
            _emit(
                args,
                {"shaders": [{"id": s.id, "title": s.title,
                              "created_at": s.created_at.isoformat(), "saved": s.saved}
                             for s in rows]},
                "\n".join(f"{s.id}  {'saved' if s.saved else '     '}  "
                          f"{s.created_at.isoformat()}  {s.title}" for s in rows),
            )
        elif args.store_command == "save":
            artifact = store.set_saved(args.id, True)
            _emit(args, artifact.manifest(), f"saved {artifact.id}")
        else:
            store.delete(args.id)
            _emit(args, {"id": args.id, "deleted": True}, f"deleted {args.id}")
    except (NotFound, StoreCorrupt) as err:
        print(str(err), file=sys.stderr)
        return ExitStatus.IO_ERROR
    return ExitStatus.OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    cfg = _resolve_config(args)
    if args.host:
        cfg.host = args.host
    if args.port:
        cfg.port = args.port
    if args.static:
        cfg.static_dir = args.static
    app = create_app(cfg)
    print(f"serving on http://{cfg.host}:{cfg.port} (store: {cfg.store_dir})",
          file=sys.stderr)
    uvicorn.run(app, host=cfg.host, port=cfg.port, log_level="warning")
    return ExitStatus.OK


_COMMANDS = {
    "generate": cmd_generate,
    "validate": cmd_validate,
    "render": cmd_render,
    "render-seq": cmd_render_seq,
    "effects": cmd_effects,
    "store": cmd_store,
    "serve": cmd_serve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code) if err.code is not None else ExitStatus.BAD_ARGS
    try:
        return int(_COMMANDS[args.command](args))
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return ExitStatus.BAD_ARGS


if __name__ == "__main__":
    sys.exit(main())
