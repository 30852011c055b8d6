"""Command line entry points: process, serve, simulate, evaluate-reid."""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import PipelineError

DEFAULT_ROOT = "sessions"


def _root_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--root",
        default=os.environ.get("PIPELINE_ROOT", DEFAULT_ROOT),
        help="session store directory (env PIPELINE_ROOT)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pipeline",
        description="Multimodal session analytics: process sessions, serve "
        "timelines, generate synthetic fixtures, score tracking.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("process", help="run the full pipeline on a session manifest")
    p.add_argument("manifest", help="path to manifest.json")
    _root_arg(p)

    p = sub.add_parser("serve", help="serve processed sessions over HTTP")
    _root_arg(p)
    p.add_argument("--bind", default="127.0.0.1:8000", help="addr:port to bind")
    p.add_argument("--ui", default=None, help="directory of built UI assets to mount at /ui")

    p = sub.add_parser("simulate", help="generate a synthetic session fixture")
    p.add_argument(
        "scenario",
        help="scenario.json path, or a builtin name (golden, metrics-demo)",
    )
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--out", required=True, help="output fixture directory")

    p = sub.add_parser(
        "evaluate-reid",
        help="score tracking on generated fixtures or the bundled benchmark",
    )
    p.add_argument(
        "fixtures",
        nargs="?",
        default=None,
        help="fixture directory (or a directory of fixture subdirectories)",
    )
    p.add_argument(
        "--benchmark",
        action="store_true",
        help="run the bundled 20-scenario benchmark suite",
    )
    p.add_argument("--out", default=None, help="where to generate benchmark fixtures")
    return parser


def _cmd_process(args) -> int:
    from .pipeline import process_session

    out = process_session(args.manifest, args.root)
    print(f"processed -> {out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .pipeline import SessionStore
    from .server import create_app

    host, _, port = args.bind.rpartition(":")
    app = create_app(SessionStore(args.root), ui_dir=args.ui)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
    return 0


def _cmd_simulate(args) -> int:
    import dataclasses

    from .fixtures import BUILTIN_SCENARIOS
    from .scenario import generate, load_scenario

    if args.scenario in BUILTIN_SCENARIOS:
        spec = BUILTIN_SCENARIOS[args.scenario]()
    else:
        spec = load_scenario(args.scenario)
    if args.seed is not None:
        spec = dataclasses.replace(spec, seed=args.seed)
    fixture = generate(spec, args.out)
    print(f"generated {spec.name} -> {fixture.directory}")
    return 0


def _cmd_evaluate_reid(args) -> int:
    import tempfile

    from .benchmark import evaluate_fixture_dir, run_benchmark

    if args.benchmark:
        out = args.out or tempfile.mkdtemp(prefix="reid-benchmark-")
        result = run_benchmark(out)
        for name, rate in result.per_scenario:
            print(f"{name}: {rate:.4f}")
        print(
            f"pooled: {result.pooled_rate:.4f} over {result.total_detections} "
            f"detections in {result.elapsed_seconds:.2f}s"
        )
        return 0
    if not args.fixtures:
        print("evaluate-reid: provide a fixture directory or --benchmark", file=sys.stderr)
        return 2
    target = Path(args.fixtures)
    if (target / "ground_truth.json").is_file():
        dirs = [target]
    else:
        dirs = sorted(
            p for p in target.iterdir() if (p / "ground_truth.json").is_file()
        )
    if not dirs:
        print(f"no fixtures under {target}", file=sys.stderr)
        return 2
    for d in dirs:
        rate = evaluate_fixture_dir(d)
        print(f"{d.name}: {rate:.4f}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "process":
            return _cmd_process(args)
        if args.command == "serve":
            return _cmd_serve(args)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "evaluate-reid":
            return _cmd_evaluate_reid(args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
