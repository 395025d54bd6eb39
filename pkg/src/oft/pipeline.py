"""Offline monitoring runs, end-to-end reports, and reproducibility helpers.

The offline monitor replays recorded streams (beats, pupil, activity ticks,
optionally demand counts) through the same fusion used online and writes
the per-second workload states, the regulation events, and a summary
report. The end-to-end path runs the microworld, then checks how well the
fused level tracks the scripted latent load and the periodic self-ratings
by Spearman rank correlation.

Output manifests carry the command, its arguments, and input digests, and
deliberately no timestamps, so rerunning a command writes byte-identical
files.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from scipy.stats import rankdata

from . import physio
from .errors import DataError
from .fusion import MwlNetwork, MwlState, SoftEvidence, fuse, fuzzify, write_states_jsonl
from .jsonl import dump_jsonl
from .microworld import RunResult, ScenarioConfig, run_scenario
from .regulation import (
    COST_ORIENTED,
    PERFORMANCE_ORIENTED,
    ActivityTracker,
    write_events_jsonl,
)
from .taskload import ConstraintFrame, discretize, task_difficulty


def spearman(a: Sequence[float], b: Sequence[float]) -> float:
    """Spearman rank correlation with average ranks for ties.

    Raises DataError when either series is constant (the ranks carry no
    order, so the coefficient is undefined) or when lengths differ.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.ndim != 1 or x.shape != y.shape:
        raise DataError("correlation needs two equal-length 1-d series")
    if len(x) < 3:
        raise DataError("correlation needs at least three observations")
    rx = rankdata(x)
    ry = rankdata(y)
    if np.ptp(rx) == 0 or np.ptp(ry) == 0:
        raise DataError("correlation undefined: a series has no rank variation")
    return float(np.corrcoef(rx, ry)[0, 1])


def file_sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path: str | Path, command: str, args: dict,
                   inputs: Sequence[str | Path] = ()) -> None:
    """Reproducibility sidecar: command, arguments, input digests. No clock."""
    from . import __version__

    manifest = {
        "command": command,
        "args": {k: args[k] for k in sorted(args)},
        "inputs": [
            {"path": Path(p).name, "sha256": file_sha256(p)} for p in inputs
        ],
        "package_version": __version__,
    }
    with open(path, "w", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# offline monitor


def read_demand_csv(path: str | Path) -> dict:
    """Demand counts per second: t_s,n1,n2,entropy -> {t: ConstraintFrame}."""
    import csv

    frames = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        need = {"t_s", "n1", "n2", "entropy"}
        if reader.fieldnames is None or not need <= set(reader.fieldnames):
            raise DataError(f"stream 'demand' ({path}): expected columns t_s,n1,n2,entropy")
        for row in reader:
            try:
                t = int(float(row["t_s"]))
                frames[t] = ConstraintFrame(
                    t=t, n1=int(row["n1"]), n2=int(row["n2"]), entropy=float(row["entropy"])
                )
            except (TypeError, ValueError) as exc:
                raise DataError(f"stream 'demand' ({path}): bad row {row!r}") from exc
    return frames


@dataclass
class MonitorResult:
    states: list  # MwlState per tick
    events: list  # RegulationEvent
    compliance: float
    report: dict
    meta: dict = field(default_factory=dict)


def monitor_offline(
    beats: physio.RRSeries,
    pupil: physio.PupilSeries,
    ticks,  # iterable of (TaskTick, perf)
    demand: Optional[dict] = None,
    net: Optional[MwlNetwork] = None,
    normalization: str = "session",
    reference: Optional[tuple] = None,
    behaviour_window_s: float = 30.0,
    effort_smooth_s: int = 5,
) -> MonitorResult:
    """Fuse recorded streams into per-second workload states.

    Physiology is framed per second first; each activity tick then pulls
    the frame at its own second. Ticks must be contiguous integers. Demand
    counts are optional; without them the difficulty channel stays out of
    the fusion.
    """
    if net is None:
        net = MwlNetwork.default()
    framed = physio.per_second_frames(
        beats, pupil, normalization=normalization, reference=reference
    )
    by_second = {f.t: f for f in framed.frames}
    tracker = ActivityTracker()
    states: list[MwlState] = []
    recent_z: list[float] = []
    last_z = 0.0
    overlap = 0
    for tick, perf in ticks:
        snap, _event = tracker.ingest(tick, perf)
        t = tick.t
        frame = by_second.get(t)
        if frame is not None:
            overlap += 1
            if frame.pupil_z is not None:
                last_z = frame.pupil_z
        recent_z.append(last_z)
        if len(recent_z) > effort_smooth_s:
            recent_z.pop(0)
        z_smooth = sum(recent_z) / len(recent_z)

        behaviour = "none"
        for ev in reversed(tracker.events):
            if ev.t < t - behaviour_window_s:
                break
            if ev.kind in COST_ORIENTED:
                behaviour = "cost_oriented"
                break
            if ev.kind in PERFORMANCE_ORIENTED and behaviour == "none":
                behaviour = "performance_oriented"

        evidence = [
            SoftEvidence.hard("behaviour", behaviour),
            fuzzify(perf, net.partitions["performance"]),
            fuzzify(z_smooth, net.partitions["effort"]),
        ]
        if demand is not None:
            d = demand.get(t)
            if d is not None:
                td = task_difficulty(discretize(d))
                evidence.insert(0, SoftEvidence.hard("constraint", f"td{td}"))
        states.append(fuse(net, t, evidence))

    if not states:
        raise DataError("stream 'ticks': no activity ticks")
    if overlap == 0:
        raise DataError(
            "stream 'ticks': no tick second overlaps the physiological frames; "
            "streams must share t=0"
        )
    levels = np.asarray([s.level for s in states])
    compliance = tracker.compliance_rate()
    event_counts: dict = {}
    for ev in tracker.events:
        event_counts[ev.kind.value] = event_counts.get(ev.kind.value, 0) + 1
    report = {
        "ticks": len(states),
        "compliance": round(compliance, 6),
        "mean_level": round(float(levels.mean()), 6),
        "level_counts": {str(k): int((levels == k).sum()) for k in range(1, 6)},
        "seconds_at_or_above_4": int((levels >= 4).sum()),
        "regulation_events": event_counts,
        "normalization": framed.meta.get("normalization"),
    }
    return MonitorResult(
        states=states,
        events=list(tracker.events),
        compliance=compliance,
        report=report,
        meta=framed.meta,
    )


def write_monitor_outputs(result: MonitorResult, out_dir: str | Path) -> dict:
    """Write mwl.jsonl, events.jsonl, report.json under out_dir; returns paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "mwl": out / "mwl.jsonl",
        "events": out / "events.jsonl",
        "report": out / "report.json",
    }
    write_states_jsonl(result.states, paths["mwl"])
    write_events_jsonl(result.events, paths["events"])
    with open(paths["report"], "w", newline="\n") as fh:
        json.dump(result.report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


# ---------------------------------------------------------------------------
# simulation logs and end-to-end reports


def write_run_log(result: RunResult, path: str | Path) -> None:
    dump_jsonl(result.records, path)


def endtoend_report(config: ScenarioConfig, net: Optional[MwlNetwork] = None) -> dict:
    """Run the microworld and score how well the fused level tracks load.

    Correlates the per-second level against the scripted latent load, and
    the level at self-rating instants against the 1..5 ratings. Raises
    DataError when a series is constant and the correlation is undefined.
    """
    result = run_scenario(config, net=net)
    rho_latent = spearman(result.levels, result.latent)
    if len(result.isa) >= 2:
        ratings = [r for (_t, r, _lvl) in result.isa]
        at_isa = [lvl for (_t, _r, lvl) in result.isa]
        rho_isa = spearman(at_isa, ratings)
    else:
        raise DataError("run too short: need at least two self-rating instants")
    report = {
        "operator": config.operator,
        "seed": config.seed,
        "duration_s": config.duration_s,
        "dfa": config.dfa,
        "spearman_level_vs_latent": round(rho_latent, 6),
        "spearman_level_vs_isa": round(rho_isa, 6),
        "compliance": round(result.compliance, 6),
        "summary": {k: v for k, v in result.summary.items() if k != "record"},
    }
    _validate_report(report)
    return report


def report_schema() -> dict:
    from importlib.resources import files

    with files("oft.data").joinpath("report_schema.json").open() as fh:
        return json.load(fh)


def _validate_report(report: dict) -> None:
    try:
        import jsonschema
    except ImportError:
        return
    jsonschema.validate(report, report_schema())
