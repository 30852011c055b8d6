"""Bundled 20-scenario tracking benchmark.

Each scenario scripts 2-7 students holding classroom positions, walking to
shuffled positions (crossing paths in image space), and dropping out for up
to two seconds at a time, with 3 px Gaussian center noise. Seeds are fixed,
so the suite is fully deterministic.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from .ingest import parse_detections
from .reid import TrackerParams, evaluate_tracking, group_by_frame, run_tracker
from .scene import Box, SceneModel
from .scenario import AgentSpec, ScenarioSpec, generate, ground_truth_by_frame

BENCHMARK_SIZE = 20
BENCHMARK_NOISE_PX = 3.0
BENCHMARK_DURATION = 40.0


def _benchmark_scene() -> SceneModel:
    return SceneModel(
        static_oois=(Box("screen", (-2.0, -0.8, 5.4), (2.0, 0.8, 5.6)),),
        floor_y=1.5,
    )


def benchmark_scenario(index: int) -> ScenarioSpec:
    """Scenario `index` of the suite (0-based)."""
    rng = random.Random(9000 + index)
    n = 2 + index % 6  # student counts cycle 2..7
    duration = BENCHMARK_DURATION

    xs = [-2.0 + 4.0 * i / max(n - 1, 1) for i in range(n)]
    students = []
    for i in range(n):
        x0 = xs[i] + rng.uniform(-0.15, 0.15)
        x1 = xs[n - 1 - i] + rng.uniform(-0.15, 0.15)  # swap ends: crossings
        y = -0.25 + 0.5 * ((i * 3) % n) / max(n, 1) + rng.uniform(-0.03, 0.03)
        z = 2.6 + 1.8 * ((i * 7) % n) / max(n, 1) + rng.uniform(-0.1, 0.1)
        hold = 8.0 + rng.uniform(0.0, 3.0)
        arrive = hold + 8.0 + rng.uniform(0.0, 2.0)
        back = arrive + 6.0 + rng.uniform(0.0, 2.0)
        waypoints = (
            (0.0, (x0, y, z)),
            (hold, (x0, y, z)),
            (arrive, (x1, y, z)),
            (back, (x1, y, z)),
            (back + 8.0, (x0, y, z)),
            (duration, (x0, y, z)),
        )
        # One or two occlusions, each at most 2 s.
        gaps = []
        for _ in range(rng.randint(1, 2)):
            start = rng.uniform(4.0, duration - 5.0)
            gaps.append((start, start + rng.uniform(0.4, 2.0)))
        gaps.sort()
        presence = []
        cursor = 0.0
        for g0, g1 in gaps:
            if g0 > cursor:
                presence.append((cursor, g0))
            cursor = max(cursor, g1)
        if cursor < duration:
            presence.append((cursor, duration))
        students.append(
            AgentSpec(
                student_id=f"s{i + 1}",
                waypoints=waypoints,
                affect=((0.0, duration, 0.0, 0.0),),
                presence=tuple(presence),
            )
        )

    return ScenarioSpec(
        name=f"bench-{index:02d}",
        seed=9000 + index,
        duration=duration,
        students=tuple(students),
        scene=_benchmark_scene(),
        noise_sigma_px=BENCHMARK_NOISE_PX,
    )


@dataclass(frozen=True)
class BenchmarkResult:
    per_scenario: tuple[tuple[str, float], ...]
    pooled_rate: float
    total_detections: int
    elapsed_seconds: float


def evaluate_fixture_dir(fixture_dir, params: TrackerParams | None = None) -> float:
    """reid success rate for one generated fixture directory."""
    import json
    from pathlib import Path

    from .ingest import load_manifest

    fixture_dir = Path(fixture_dir)
    manifest = load_manifest(fixture_dir / "manifest.json")
    gt = json.loads((fixture_dir / "ground_truth.json").read_text(encoding="utf-8"))
    spec = manifest.streams[0]
    records = list(
        parse_detections(
            (fixture_dir / Path(spec.detections_path).name).read_text(encoding="utf-8"),
            spec,
        )
    )
    tracks = run_tracker(group_by_frame(records), params or TrackerParams())
    return evaluate_tracking(tracks, ground_truth_by_frame(gt))


def run_benchmark(
    out_dir, params: TrackerParams | None = None
) -> BenchmarkResult:
    """Generate and score the whole suite; rates are pooled over detections."""
    from pathlib import Path

    out_dir = Path(out_dir)
    params = params or TrackerParams()
    t0 = time.perf_counter()
    per = []
    correct_weight = 0.0
    total = 0
    for i in range(BENCHMARK_SIZE):
        spec = benchmark_scenario(i)
        fixture = generate(spec, out_dir / spec.name)
        records = parse_detections(
            (fixture.directory / f"detections_{spec.stream_id}.csv").read_text(
                encoding="utf-8"
            ),
            None,
        )
        tracks = run_tracker(group_by_frame(records), params)
        gt = ground_truth_by_frame(fixture.ground_truth)
        rate = evaluate_tracking(tracks, gt)
        n = sum(len(v) for v in gt.values())
        per.append((spec.name, rate))
        correct_weight += rate * n
        total += n
    elapsed = time.perf_counter() - t0
    return BenchmarkResult(
        per_scenario=tuple(per),
        pooled_rate=correct_weight / total if total else 0.0,
        total_detections=total,
        elapsed_seconds=elapsed,
    )
