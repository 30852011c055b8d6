"""Bundled scenarios: a fully featured demo session and a metrics script.

The golden session drives the end-to-end round-trip and golden-file tests:
three students with scripted gaze (screen, desk, each other, looking away),
affect covering delight/confusion/frustration/boredom plus occlusion-driven
NotFound and NoDominantEmotion windows, and a log exercising valid, invalid,
and failed transitions under a day/night switch.
"""

from __future__ import annotations

from .scene import Box, SceneModel
from .scenario import AgentSpec, ScenarioSpec


def demo_scene() -> SceneModel:
    return SceneModel(
        static_oois=(
            Box("screen", (-1.5, -0.6, 5.4), (1.5, 0.6, 5.6)),
            Box("teacher_desk", (2.2, 0.8, 3.8), (3.0, 1.5, 4.6)),
        ),
        floor_y=1.5,
        person_width=0.5,
        head_margin=0.15,
    )


def _log_event(t, kind, sid=None, **payload):
    doc = {"t": t, "kind": kind}
    if sid is not None:
        doc["sid"] = sid
    doc.update(payload)
    return doc


def _golden_log() -> tuple[dict, ...]:
    e = _log_event
    return (
        # rose: one clean cycle (carbon_dioxide -> sugar -> carbon_dioxide)
        e(2.0, "avatar_change", "rose", molecule="carbon_dioxide"),
        e(5.0, "zone_enter", "rose", zone="chloroplast"),
        e(12.0, "transition_attempt", "rose",
          from_molecule="carbon_dioxide", to_molecule="sugar", success=True),
        e(20.0, "zone_enter", "rose", zone="mouse"),
        e(30.0, "transition_attempt", "rose",
          from_molecule="sugar", to_molecule="carbon_dioxide", success=True),
        # taylor: two valid successes, then a night-time violation, a
        # wrong-target violation, and one flat failure
        e(3.0, "avatar_change", "taylor", molecule="water"),
        e(6.0, "zone_enter", "taylor", zone="chloroplast"),
        e(9.0, "transition_attempt", "taylor",
          from_molecule="water", to_molecule="oxygen", success=True),
        e(12.0, "zone_enter", "taylor", zone="mouse"),
        e(15.0, "transition_attempt", "taylor",
          from_molecule="oxygen", to_molecule="water", success=True),
        e(33.0, "zone_enter", "taylor", zone="chloroplast"),
        e(35.0, "transition_attempt", "taylor",
          from_molecule="water", to_molecule="oxygen", success=True),  # night
        e(40.0, "zone_enter", "taylor", zone="mouse"),
        e(44.0, "transition_attempt", "taylor",
          from_molecule="oxygen", to_molecule="sugar", success=True),  # wrong target
        e(50.0, "transition_attempt", "taylor",
          from_molecule="sugar", to_molecule="carbon_dioxide", success=False),
        # dapaw: long hesitation, then one valid success after daybreak
        e(4.0, "avatar_change", "dapaw", molecule="carbon_dioxide"),
        e(8.0, "zone_enter", "dapaw", zone="chloroplast"),
        e(48.0, "transition_attempt", "dapaw",
          from_molecule="carbon_dioxide", to_molecule="sugar", success=True),
        # light state: day 0-30, night 30-45, day 45-60
        e(30.0, "sim_state", state="night"),
        e(45.0, "sim_state", state="day"),
    )


def golden_scenario(seed: int = 7) -> ScenarioSpec:
    rose = AgentSpec(
        student_id="rose",
        waypoints=((0.0, (-1.0, 0.0, 3.0)),),
        affect=(
            (0.0, 10.0, 0.5, 0.6),      # Delight
            (10.0, 40.0, 0.0, 0.0),     # Engagement
            (40.0, 50.0, -0.5, 0.62),   # Frustration
            (50.0, 60.0, 0.05, -0.05),  # Engagement (neutral disk)
        ),
        gaze=(
            (0.0, 20.0, "screen"),
            (20.0, 25.0, "person:taylor"),
            (25.0, 60.0, "screen"),
        ),
    )
    taylor = AgentSpec(
        student_id="taylor",
        waypoints=((0.0, (1.0, 0.0, 3.5)),),
        affect=((0.0, 60.0, 0.0, 0.0),),
        gaze=((0.0, 60.0, "screen"),),
    )
    dapaw = AgentSpec(
        student_id="dapaw",
        waypoints=((0.0, (0.0, 0.1, 4.0)),),
        affect=(
            (0.0, 30.0, -0.3, 0.2),     # Confusion
            (30.0, 50.0, -0.4, -0.3),   # Boredom
            (50.0, 60.0, 0.0, 0.0),     # Engagement
        ),
        gaze=(
            (0.0, 30.0, "screen"),
            (30.0, 35.0, None),          # looking away, no gaze data
            (35.0, 60.0, "teacher_desk"),
        ),
        # Two occlusions: 0.8 s (re-acquired in memory) and 2.6 s
        # (dominating one 5 s window -> NotFound).
        presence=((0.0, 20.0), (20.8, 35.0), (37.6, 60.0)),
    )

    expected_affect = {
        "rose": [
            [0.0, 10.0, "Delight"],
            [10.0, 40.0, "Engagement"],
            [40.0, 50.0, "Frustration"],
            [50.0, 60.0, "Engagement"],
        ],
        "taylor": [[0.0, 60.0, "Engagement"]],
        "dapaw": [
            [0.0, 20.0, "Confusion"],
            [20.0, 25.0, "NoDominantEmotion"],  # 24 occluded frames
            [25.0, 30.0, "Confusion"],
            [30.0, 35.0, "Boredom"],
            [35.0, 40.0, "NotFound"],            # 78 occluded frames
            [40.0, 50.0, "Boredom"],
            [50.0, 60.0, "Engagement"],
        ],
    }

    expected_metrics = {
        "rose": {
            "first_transition_latency": 10.0,
            "successful_transitions": 2,
            "cycles_completed": 1,
            "mean_transition_interval": 18.0,
            # Shares cover [2, 30): carbon_dioxide 10 s, sugar 18 s.
            "time_share_per_molecule": {
                "carbon_dioxide": 10.0 / 28.0,
                "sugar": 18.0 / 28.0,
            },
        },
        "taylor": {
            "first_transition_latency": 6.0,
            "successful_transitions": 2,
            "cycles_completed": 0,
            "mean_transition_interval": 6.0,
            # No completed cycle: full session [3, 60).
            "time_share_per_molecule": {
                "water": 26.0 / 57.0,
                "oxygen": 15.0 / 57.0,
                "sugar": 16.0 / 57.0,
            },
        },
        "dapaw": {
            "first_transition_latency": 44.0,
            "successful_transitions": 1,
            "cycles_completed": 0,
            "mean_transition_interval": None,
            "time_share_per_molecule": {
                "carbon_dioxide": 44.0 / 56.0,
                "sugar": 12.0 / 56.0,
            },
        },
    }

    return ScenarioSpec(
        name="golden",
        seed=seed,
        duration=60.0,
        students=(rose, taylor, dapaw),
        scene=demo_scene(),
        log_events=_golden_log(),
        expected_metrics=expected_metrics,
        expected_affect=expected_affect,
        # Long enough memory to coast through dapaw's 2.6 s occlusion.
        manifest_extra={"tracker": {"memory_frames": 90}},
        with_video_stub=True,
    )


def _transition_run(
    sid: str,
    avatar_time: float,
    first_success: float,
    cycles: int,
    total_successes: int,
    gap: float,
) -> list[dict]:
    """A student's log: `cycles` carbon-dioxide loops, then water loops.

    Each loop is two valid successes (chloroplast by day, then mouse), so
    cycle and success counts can be scripted independently.
    """
    e = _log_event
    events = [e(avatar_time, "avatar_change", sid, molecule="carbon_dioxide")]
    t = first_success
    done = 0
    state = "carbon_dioxide"
    for _ in range(2 * cycles):
        if state == "carbon_dioxide":
            events.append(e(t - 1.0, "zone_enter", sid, zone="chloroplast"))
            events.append(
                e(t, "transition_attempt", sid,
                  from_molecule="carbon_dioxide", to_molecule="sugar", success=True)
            )
            state = "sugar"
        else:
            events.append(e(t - 1.0, "zone_enter", sid, zone="mouse"))
            events.append(
                e(t, "transition_attempt", sid,
                  from_molecule="sugar", to_molecule="carbon_dioxide", success=True)
            )
            state = "carbon_dioxide"
        done += 1
        t += gap
    if done < total_successes:
        events.append(e(t - 0.5, "avatar_change", sid, molecule="water"))
        state = "water"
        while done < total_successes:
            if state == "water":
                events.append(e(t - 0.4, "zone_enter", sid, zone="chloroplast"))
                events.append(
                    e(t, "transition_attempt", sid,
                      from_molecule="water", to_molecule="oxygen", success=True)
                )
                state = "oxygen"
            else:
                events.append(e(t - 0.4, "zone_enter", sid, zone="mouse"))
                events.append(
                    e(t, "transition_attempt", sid,
                      from_molecule="oxygen", to_molecule="water", success=True)
                )
                state = "water"
            done += 1
            t += gap
    return events


def metrics_scenario() -> ScenarioSpec:
    """Log-only session with hand-scripted aggregate outcomes.

    taylor: first success 12 s after embodiment, 8 cycles, 44 successes;
    rose: 120 s, 3 cycles, 15; dapaw: 300 s, 1 cycle, 7.
    """
    events: list[dict] = []
    events += _transition_run("taylor", 5.0, 17.0, cycles=8, total_successes=44, gap=15.0)
    events += _transition_run("rose", 10.0, 130.0, cycles=3, total_successes=15, gap=20.0)
    events += _transition_run("dapaw", 20.0, 320.0, cycles=1, total_successes=7, gap=20.0)
    expected = {
        "taylor": {
            "first_transition_latency": 12.0,
            "cycles_completed": 8,
            "successful_transitions": 44,
        },
        "rose": {
            "first_transition_latency": 120.0,
            "cycles_completed": 3,
            "successful_transitions": 15,
        },
        "dapaw": {
            "first_transition_latency": 300.0,
            "cycles_completed": 1,
            "successful_transitions": 7,
        },
    }
    return ScenarioSpec(
        name="metrics-demo",
        seed=0,
        duration=700.0,
        students=(),
        scene=demo_scene(),
        log_events=tuple(events),
        expected_metrics=expected,
    )


BUILTIN_SCENARIOS = {
    "golden": golden_scenario,
    "metrics-demo": metrics_scenario,
}
