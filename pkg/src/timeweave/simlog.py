"""Simulation-log interpretation: embodied-state intervals, rule-checked
transition outcomes, the day/night lane, and per-student learning metrics.

The transformation rule table is configuration, not code: a rule says which
molecule a student becomes when they attempt a transition at a zone, with an
optional required light state. The log's success flag stays authoritative
for state; rule checking only classifies each attempt.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import MalformedEvent, MissingFile, NoStateData, SchemaViolation, UnknownKind

EVENT_KINDS = ("avatar_change", "zone_enter", "transition_attempt", "sim_state")

DEFAULT_MODEL = {
    "molecules": ["oxygen", "water", "sugar", "carbon_dioxide"],
    "zones": ["chloroplast", "roots", "mouse"],
    "cycle_start": "carbon_dioxide",
    "rules": [
        {"from_molecule": "carbon_dioxide", "zone": "chloroplast",
         "requires_state": "day", "to_molecule": "sugar"},
        {"from_molecule": "water", "zone": "chloroplast",
         "requires_state": "day", "to_molecule": "oxygen"},
        {"from_molecule": "sugar", "zone": "mouse", "to_molecule": "carbon_dioxide"},
        {"from_molecule": "oxygen", "zone": "mouse", "to_molecule": "water"},
        {"from_molecule": "water", "zone": "roots", "to_molecule": "water"},
    ],
}


@dataclass(frozen=True)
class LogEvent:
    time: float
    kind: str
    student_id: str | None = None
    molecule: str | None = None          # avatar_change
    zone: str | None = None              # zone_enter
    from_molecule: str | None = None     # transition_attempt
    to_molecule: str | None = None
    success: bool | None = None
    sim_state: str | None = None         # sim_state: "day" | "night"


@dataclass(frozen=True)
class TransitionRule:
    from_molecule: str
    zone: str
    to_molecule: str
    requires_state: str | None = None  # None: either light state


@dataclass(frozen=True)
class ModelSpec:
    molecules: frozenset[str]
    zones: frozenset[str]
    rules: tuple[TransitionRule, ...]
    cycle_start: str

    def __post_init__(self):
        for r in self.rules:
            if r.from_molecule not in self.molecules:
                raise SchemaViolation("rules", f"unknown molecule {r.from_molecule!r}")
            if r.to_molecule not in self.molecules:
                raise SchemaViolation("rules", f"unknown molecule {r.to_molecule!r}")
            if r.zone not in self.zones:
                raise SchemaViolation("rules", f"unknown zone {r.zone!r}")
        if self.cycle_start not in self.molecules:
            raise SchemaViolation("cycle_start", f"unknown molecule {self.cycle_start!r}")


def model_from_dict(doc: dict) -> ModelSpec:
    try:
        return ModelSpec(
            molecules=frozenset(doc["molecules"]),
            zones=frozenset(doc["zones"]),
            rules=tuple(
                TransitionRule(
                    from_molecule=r["from_molecule"],
                    zone=r["zone"],
                    to_molecule=r["to_molecule"],
                    requires_state=r.get("requires_state"),
                )
                for r in doc["rules"]
            ),
            cycle_start=doc["cycle_start"],
        )
    except (KeyError, TypeError) as exc:
        raise SchemaViolation("model", f"bad model spec: {exc}") from exc


def default_model() -> ModelSpec:
    return model_from_dict(DEFAULT_MODEL)


def load_model(path: str | Path) -> ModelSpec:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    return model_from_dict(json.loads(path.read_text(encoding="utf-8")))


def _event_from_dict(doc: dict, line: int) -> LogEvent:
    if not isinstance(doc, dict):
        raise MalformedEvent(line, "event must be a JSON object")
    kind = doc.get("kind")
    if kind not in EVENT_KINDS:
        raise UnknownKind(line, str(kind))
    try:
        time = float(doc["t"])
    except (KeyError, TypeError, ValueError):
        raise MalformedEvent(line, "numeric field 't' is required") from None
    if time < 0 or not math.isfinite(time):
        raise MalformedEvent(line, "t must be finite and >= 0")
    sid = doc.get("sid")
    if kind == "sim_state":
        if sid is not None:
            raise MalformedEvent(line, "sim_state events carry no student id")
        state = doc.get("state")
        if state not in ("day", "night"):
            raise MalformedEvent(line, f"bad sim_state {state!r}")
        return LogEvent(time=time, kind=kind, sim_state=state)
    if not isinstance(sid, str):
        raise MalformedEvent(line, f"{kind} requires string field 'sid'")
    if kind == "avatar_change":
        molecule = doc.get("molecule")
        if not isinstance(molecule, str):
            raise MalformedEvent(line, "avatar_change requires 'molecule'")
        return LogEvent(time=time, kind=kind, student_id=sid, molecule=molecule)
    if kind == "zone_enter":
        zone = doc.get("zone")
        if not isinstance(zone, str):
            raise MalformedEvent(line, "zone_enter requires 'zone'")
        return LogEvent(time=time, kind=kind, student_id=sid, zone=zone)
    # transition_attempt
    frm, to = doc.get("from_molecule"), doc.get("to_molecule")
    success = doc.get("success")
    if not isinstance(frm, str) or not isinstance(to, str):
        raise MalformedEvent(line, "transition_attempt requires from/to molecules")
    if not isinstance(success, bool):
        raise MalformedEvent(line, "transition_attempt requires boolean 'success'")
    return LogEvent(
        time=time, kind=kind, student_id=sid,
        from_molecule=frm, to_molecule=to, success=success,
    )


def event_to_dict(e: LogEvent) -> dict:
    doc: dict = {"t": e.time, "kind": e.kind}
    if e.student_id is not None:
        doc["sid"] = e.student_id
    if e.kind == "avatar_change":
        doc["molecule"] = e.molecule
    elif e.kind == "zone_enter":
        doc["zone"] = e.zone
    elif e.kind == "transition_attempt":
        doc["from_molecule"] = e.from_molecule
        doc["to_molecule"] = e.to_molecule
        doc["success"] = e.success
    elif e.kind == "sim_state":
        doc["state"] = e.sim_state
    return doc


def parse_log(stream) -> list[LogEvent]:
    """Parse JSON Lines events; output is stably sorted by time."""
    if isinstance(stream, (bytes, bytearray)):
        stream = io.StringIO(stream.decode("utf-8"))
    elif isinstance(stream, str):
        stream = io.StringIO(stream)
    events = []
    for line_no, line in enumerate(stream, start=1):
        if isinstance(line, bytes):
            line = line.decode("utf-8")
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedEvent(line_no, f"invalid JSON: {exc}") from exc
        events.append(_event_from_dict(doc, line_no))
    events.sort(key=lambda e: e.time)  # stable: equal-time order preserved
    return events


def load_log(path: str | Path) -> list[LogEvent]:
    path = Path(path)
    if not path.is_file():
        raise MissingFile(str(path))
    with open(path, "r", encoding="utf-8") as fh:
        return parse_log(fh)


def session_end(events: Sequence[LogEvent]) -> float:
    return max((e.time for e in events), default=0.0)


def state_intervals(
    events: Sequence[LogEvent],
    student_id: str,
    end: float | None = None,
) -> list[tuple[float, float, str]]:
    """Molecule intervals tiling [first avatar_change, session end].

    Successful transition attempts change state too (the log's success flag
    is authoritative). Students with no avatar_change yield no intervals.
    """
    if end is None:
        end = session_end(events)
    changes: list[tuple[float, str]] = []
    for e in events:
        if e.student_id != student_id:
            continue
        if e.kind == "avatar_change":
            changes.append((e.time, e.molecule))
        elif e.kind == "transition_attempt" and e.success:
            if changes:  # state only exists after the first avatar_change
                changes.append((e.time, e.to_molecule))
    if not changes:
        return []
    intervals = []
    for i, (start, molecule) in enumerate(changes):
        stop = changes[i + 1][0] if i + 1 < len(changes) else end
        if stop > start:
            intervals.append((start, stop, molecule))
    return intervals


@dataclass(frozen=True)
class TransitionOutcome:
    time: float
    student_id: str
    from_molecule: str
    to_molecule: str
    outcome: str  # valid_success | invalid_marked_success | failure
    reason: str | None = None


def validate_transitions(
    events: Sequence[LogEvent], model: ModelSpec
) -> list[TransitionOutcome]:
    """Classify every transition attempt against the rule table.

    Context per student: their current molecule (avatar changes + successful
    attempts) and the last zone entered; plus the global light state. The
    check asks whether some rule maps (current molecule, zone, light) to the
    attempted target.
    """
    molecule: dict[str, str | None] = {}
    zone: dict[str, str | None] = {}
    sim_state = "day"
    outcomes = []
    for e in events:
        if e.kind == "sim_state":
            sim_state = e.sim_state
            continue
        sid = e.student_id
        if e.kind == "avatar_change":
            molecule[sid] = e.molecule
            continue
        if e.kind == "zone_enter":
            zone[sid] = e.zone
            continue
        # transition_attempt
        current = molecule.get(sid)
        at_zone = zone.get(sid)
        if not e.success:
            outcomes.append(
                TransitionOutcome(e.time, sid, e.from_molecule, e.to_molecule, "failure")
            )
            continue
        reason = _match_rule(model, current, at_zone, sim_state, e.to_molecule)
        if reason is None:
            outcomes.append(
                TransitionOutcome(
                    e.time, sid, e.from_molecule, e.to_molecule, "valid_success"
                )
            )
        else:
            outcomes.append(
                TransitionOutcome(
                    e.time, sid, e.from_molecule, e.to_molecule,
                    "invalid_marked_success", reason,
                )
            )
        molecule[sid] = e.to_molecule  # log is authoritative for state
    return outcomes


def _match_rule(
    model: ModelSpec,
    current: str | None,
    at_zone: str | None,
    sim_state: str,
    target: str,
) -> str | None:
    """None when a rule licenses the transition, else the failure reason."""
    if current is None:
        return "no embodied molecule"
    if at_zone is None:
        return "no zone entered"
    near_miss = None
    for r in model.rules:
        if r.from_molecule != current or r.zone != at_zone:
            continue
        if r.to_molecule != target:
            near_miss = f"rule at {at_zone} maps {current} to {r.to_molecule}, not {target}"
            continue
        if r.requires_state is not None and r.requires_state != sim_state:
            near_miss = f"rule requires {r.requires_state}, simulation is {sim_state}"
            continue
        return None
    return near_miss or f"no rule for {current} at {at_zone}"


def system_state_lane(
    events: Sequence[LogEvent], end: float | None = None
) -> list[tuple[float, float, str]]:
    """Day/night intervals tiling [0, end]; sessions start in day."""
    if end is None:
        end = session_end(events)
    changes: list[tuple[float, str]] = [(0.0, "day")]
    for e in events:
        if e.kind == "sim_state":
            changes.append((e.time, e.sim_state))
    intervals = []
    for i, (start, state) in enumerate(changes):
        stop = changes[i + 1][0] if i + 1 < len(changes) else end
        if stop > start:
            intervals.append((start, stop, state))
    if not intervals and end > 0:
        intervals.append((0.0, end, "day"))
    return intervals


@dataclass(frozen=True)
class StudentMetrics:
    first_transition_latency: float | None
    successful_transitions: int
    cycles_completed: int
    time_share_per_molecule: dict[str, float]
    mean_transition_interval: float | None

    def to_dict(self) -> dict:
        return {
            "first_transition_latency": self.first_transition_latency,
            "successful_transitions": self.successful_transitions,
            "cycles_completed": self.cycles_completed,
            "time_share_per_molecule": dict(sorted(self.time_share_per_molecule.items())),
            "mean_transition_interval": self.mean_transition_interval,
        }


def compute_metrics(
    intervals: Sequence[tuple[float, float, str]],
    outcomes: Sequence[TransitionOutcome],
    model: ModelSpec,
    share_window: str = "before_first_cycle",
) -> StudentMetrics:
    """Aggregate one student's learning metrics.

    Valid successes drive every count. A cycle completes each time a valid
    success enters the model's cycle-start molecule from a different one.
    Time shares cover the window up to the first completed cycle (falling
    back to the whole session when none completes) or the full session,
    per `share_window`.
    """
    if share_window not in ("before_first_cycle", "full"):
        raise SchemaViolation("share_window", f"unknown mode {share_window!r}")
    if not intervals:
        raise NoStateData("student has no state intervals")
    start_time = intervals[0][0]

    valid = [o for o in outcomes if o.outcome == "valid_success"]
    valid.sort(key=lambda o: o.time)

    latency = valid[0].time - start_time if valid else None

    cycles = 0
    first_cycle_time = None
    for o in valid:
        if o.to_molecule == model.cycle_start and o.from_molecule != model.cycle_start:
            cycles += 1
            if first_cycle_time is None:
                first_cycle_time = o.time

    if len(valid) >= 2:
        gaps = [b.time - a.time for a, b in zip(valid, valid[1:])]
        mean_interval = sum(gaps) / len(gaps)
    else:
        mean_interval = None

    cutoff = intervals[-1][1]
    if share_window == "before_first_cycle" and first_cycle_time is not None:
        cutoff = first_cycle_time
    durations: dict[str, float] = {}
    for start, stop, molecule in intervals:
        stop = min(stop, cutoff)
        if stop > start:
            durations[molecule] = durations.get(molecule, 0.0) + (stop - start)
    total = sum(durations.values())
    shares = (
        {m: d / total for m, d in durations.items()} if total > 0 else {}
    )

    return StudentMetrics(
        first_transition_latency=latency,
        successful_transitions=len(valid),
        cycles_completed=cycles,
        time_share_per_molecule=shares,
        mean_transition_interval=mean_interval,
    )


def students_in(events: Iterable[LogEvent]) -> list[str]:
    seen: dict[str, None] = {}
    for e in events:
        if e.student_id is not None:
            seen.setdefault(e.student_id, None)
    return list(seen)
