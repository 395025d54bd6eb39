"""Deterministic surveillance microworld with a closed monitoring loop.

A 20-minute session in two halves: a calm first half and a busier second
half where message and vehicle arrivals speed up. Two Poisson streams feed
the scene: intel messages that should each be answered with a search zone
within two minutes, and suspect vehicles that go hidden -> detected ->
inspected -> neutralized. The operator is a single server working
earliest-deadline-first on six task kinds, with a scripted latent load that
slows service and, for some scripts, makes jobs slip entirely.

Every run is reproducible: all randomness flows from numpy Generators
derived from the scenario seed, and the log writer sorts keys, so the same
seed gives byte-identical logs.

Per second the run emits activity counts (which tasks are engaged, which
were handled per their prescription), demand numbers, a windowed
performance score, synthetic heart-beat and pupil channels driven by the
latent load, the fused workload level, and, when adaptation is on, the
assistance directives switched by that level. A self-rating on a 1..5
scale is logged every isa_period_s seconds for external comparison.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .adapt import DEFAULT_RULES, AdaptationEngine
from .errors import ConfigError
from .fusion import MwlNetwork, SoftEvidence, fuzzify, mwl_level, posterior
from .regulation import COST_ORIENTED, PERFORMANCE_ORIENTED, ActivityTracker, TaskSpec, TaskTick
from .taskload import ConstraintFrame, discretize, performance_index, spatial_entropy, task_difficulty

TASKS = (
    "ReadMessage",
    "DrawZone",
    "ManageEmptyZone",
    "DetectVehicle",
    "InspectLock",
    "Neutralize",
)

TASK_BUDGET_S = {
    "ReadMessage": 120.0,
    "DrawZone": 120.0,
    "ManageEmptyZone": 60.0,
    "DetectVehicle": 90.0,
    "InspectLock": 60.0,
    "Neutralize": 90.0,
}

BASE_SERVICE_S = {
    "ReadMessage": 2.0,
    "DrawZone": 2.5,
    "ManageEmptyZone": 2.0,
    "DetectVehicle": 3.0,
    "InspectLock": 2.5,
    "Neutralize": 2.5,
}

# what a load-shedding operator abandons first
SHED_ORDER = ("ManageEmptyZone", "DrawZone", "ReadMessage", "DetectVehicle", "InspectLock", "Neutralize")

PRESCRIPTIONS = {
    "ReadMessage": "open the oldest unread banner first",
    "DrawZone": "zone the reported coordinates",
    "ManageEmptyZone": "send the nearest idle drone",
    "DetectVehicle": "sweep the active zones",
    "InspectLock": "lock on first sighting",
    "Neutralize": "neutralize the closest locked vehicle",
}


def six_tasks() -> tuple:
    """The six surveillance tasks with prescriptions and time budgets."""
    return tuple(
        TaskSpec(id=name, prescribed_strategy=PRESCRIPTIONS[name], time_budget_s=TASK_BUDGET_S[name])
        for name in TASKS
    )


@dataclass(frozen=True)
class ScenarioConfig:
    duration_s: int = 1200
    phase_split_s: int = 600
    calm_rate_per_s: float = 1.0 / 60.0
    busy_rate_per_s: float = 1.0 / 20.0
    seed: int = 0
    operator: str = "diligent"
    dfa: bool = False
    isa_period_s: int = 90
    hold_s: float = 5.0
    pupil_ref_mm: float = 3.45
    pupil_ref_sd: float = 0.45
    t_ref_s: float = 180.0
    message_budget_s: float = 120.0
    perf_window_s: float = 300.0
    behaviour_window_s: float = 30.0
    effort_smooth_s: int = 5

    def __post_init__(self):
        if self.duration_s < 1 or not 0 < self.phase_split_s <= self.duration_s:
            raise ConfigError("scenario: need 0 < phase_split_s <= duration_s")
        if self.calm_rate_per_s < 0 or self.busy_rate_per_s < 0:
            raise ConfigError("scenario: arrival rates must be >= 0")
        if self.isa_period_s < 1:
            raise ConfigError("scenario: isa_period_s must be >= 1")


@dataclass(frozen=True)
class OperatorScript:
    """How the simulated operator behaves and how loaded they feel.

    load(t) is the latent load trace in [0,1]. service_factor scales base
    service times. slip_probability is the chance a newly arrived job is
    never noticed (it then times out). shed_threshold, when set, makes the
    operator abandon low-priority pending jobs once the queue grows past it.
    """

    name: str
    load: Callable[[float], float]
    service_factor: Callable[[float], float]
    slip_probability: Callable[[float], float]
    shed_threshold: Optional[int] = None


def _two_ramp(a0: float, a1: float, b0: float, b1: float, split: float, duration: float):
    def load(t: float) -> float:
        if t < split:
            return a0 + (a1 - a0) * (t / split)
        tail = max(duration - split, 1.0)
        return b0 + (b1 - b0) * ((t - split) / tail)

    return load


def operator_script(name: str, duration_s: int = 1200, phase_split_s: int = 600) -> OperatorScript:
    """Built-in operator behaviours: diligent, prioritizer, degrading-overload, flat."""
    split, dur = float(phase_split_s), float(duration_s)
    if name == "diligent":
        return OperatorScript(
            name=name,
            load=_two_ramp(0.15, 0.20, 0.30, 0.45, split, dur),
            service_factor=lambda L: 1.0 + 0.5 * L,
            slip_probability=lambda L: 0.0,
        )
    if name == "flat":
        return OperatorScript(
            name=name,
            load=lambda t: 0.25,
            service_factor=lambda L: 1.0 + 0.5 * L,
            slip_probability=lambda L: 0.0,
        )
    if name == "prioritizer":
        return OperatorScript(
            name=name,
            load=_two_ramp(0.15, 0.20, 0.30, 0.45, split, dur),
            service_factor=lambda L: 1.0 + 0.5 * L,
            slip_probability=lambda L: 0.0,
            shed_threshold=4,
        )
    if name == "degrading-overload":
        return OperatorScript(
            name=name,
            load=_two_ramp(0.15, 0.25, 0.45, 0.95, split, dur),
            service_factor=lambda L: 1.0 + 3.0 * L,
            slip_probability=lambda L: max(0.0, L - 0.65) * 0.8,
        )
    raise ConfigError(
        f"unknown operator script {name!r}; choose from diligent, prioritizer, "
        "degrading-overload, flat"
    )


# ---------------------------------------------------------------------------
# world objects


@dataclass
class Message:
    id: int
    arrive_t: float
    read_t: Optional[float] = None
    zone_t: Optional[float] = None


@dataclass
class Vehicle:
    id: int
    spawn_t: float
    x: float
    y: float
    detect_t: Optional[float] = None
    inspect_t: Optional[float] = None
    neutralize_t: Optional[float] = None

    @property
    def state(self) -> str:
        if self.neutralize_t is not None:
            return "neutralized"
        if self.inspect_t is not None:
            return "inspected"
        if self.detect_t is not None:
            return "detected"
        return "hidden"


@dataclass
class Zone:
    id: int
    created_t: float
    has_drone: bool = False


@dataclass
class Job:
    id: int
    task: str
    created_t: float
    deadline_t: float
    remaining_s: Optional[float] = None  # set when first picked up
    slipped: bool = False
    message: Optional[Message] = None
    vehicle: Optional[Vehicle] = None
    zone: Optional[Zone] = None


class World:
    """Scene state plus the operator queue. One tick is one second."""

    def __init__(self, config: ScenarioConfig, script: OperatorScript,
                 rng_spawn: np.random.Generator, rng_operator: np.random.Generator):
        self.config = config
        self.script = script
        self.rng_spawn = rng_spawn
        self.rng_operator = rng_operator
        self.messages: list[Message] = []
        self.vehicles: list[Vehicle] = []
        self.zones: list[Zone] = []
        self.queue: list[Job] = []
        self.ot_flags = {task: 1 for task in TASKS}
        self.miss_counts = {task: 0 for task in TASKS}
        self.machine_done = {task: 0 for task in TASKS}
        self.spawns_enabled = True
        self._next_id = 0

    # -- plumbing ----------------------------------------------------------

    def _new_id(self) -> int:
        self._next_id += 1
        return self._next_id

    def arrival_rate(self, t: float) -> float:
        if t < self.config.phase_split_s:
            return self.config.calm_rate_per_s
        return self.config.busy_rate_per_s

    def add_job(self, task: str, t: float, deadline_t: float, *,
                message: Optional[Message] = None, vehicle: Optional[Vehicle] = None,
                zone: Optional[Zone] = None) -> Job:
        if task not in TASKS:
            raise ConfigError(f"unknown task {task!r}")
        job = Job(id=self._new_id(), task=task, created_t=t, deadline_t=deadline_t,
                  message=message, vehicle=vehicle, zone=zone)
        load = self.script.load(t)
        if self.rng_operator.random() < self.script.slip_probability(load):
            job.slipped = True
        self.queue.append(job)
        return job

    # -- per-tick phases ----------------------------------------------------

    def _expire(self, t: float):
        kept = []
        for job in self.queue:
            if job.deadline_t <= t:
                self.ot_flags[job.task] = 0
                self.miss_counts[job.task] += 1
            else:
                kept.append(job)
        self.queue = kept

    def _shed(self, t: float):
        threshold = self.script.shed_threshold
        if threshold is None or len(self.queue) <= threshold:
            return
        for task in SHED_ORDER:
            if len(self.queue) <= threshold:
                break
            keep, dropped = [], 0
            for job in self.queue:
                if job.task == task and len(self.queue) - dropped > threshold:
                    self.ot_flags[task] = 0
                    self.miss_counts[task] += 1
                    dropped += 1
                else:
                    keep.append(job)
            self.queue = keep

    def _spawn(self, t: float):
        if not self.spawns_enabled:
            return
        rate = self.arrival_rate(t)
        for _ in range(int(self.rng_spawn.poisson(rate))):
            msg = Message(id=self._new_id(), arrive_t=t)
            self.messages.append(msg)
            self.add_job("ReadMessage", t, t + TASK_BUDGET_S["ReadMessage"], message=msg)
        for _ in range(int(self.rng_spawn.poisson(rate))):
            x, y = self.rng_spawn.random(2)
            veh = Vehicle(id=self._new_id(), spawn_t=t, x=float(x), y=float(y))
            self.vehicles.append(veh)
            self.add_job("DetectVehicle", t, t + TASK_BUDGET_S["DetectVehicle"], vehicle=veh)

    def _machine_pass(self, t: float, directives: frozenset, completed: set):
        takeovers = (
            ("auto_transfer_drones", "ManageEmptyZone"),
            ("auto_inspect", "InspectLock"),
        )
        for directive, task in takeovers:
            if directive not in directives:
                continue
            for _ in range(2):  # the automation handles up to two items a second
                candidates = [j for j in self.queue if j.task == task]
                if not candidates:
                    break
                job = min(candidates, key=lambda j: (j.deadline_t, j.id))
                self.queue.remove(job)
                self.machine_done[task] += 1
                self._complete(job, t, completed)

    def _service_multiplier(self, task: str, directives: frozenset) -> float:
        mult = 1.0
        if task == "ReadMessage" and "highlight_messages" in directives:
            mult *= 0.6
        if task == "ManageEmptyZone" and "highlight_empty_zones" in directives:
            mult *= 0.6
        if task == "ManageEmptyZone" and "auto_judge_zone_useful" in directives:
            mult *= 0.5
        if task == "DetectVehicle" and "annotate_message_coords" in directives:
            mult *= 0.5
        return mult

    def _serve(self, t: float, directives: frozenset, completed: set):
        budget = 1.0
        load = self.script.load(t)
        factor = self.script.service_factor(load)
        while budget > 1e-9:
            live = [j for j in self.queue if not j.slipped]
            if not live:
                break
            job = min(live, key=lambda j: (j.deadline_t, j.id))
            if job.remaining_s is None:
                job.remaining_s = BASE_SERVICE_S[job.task] * factor * self._service_multiplier(job.task, directives)
            spend = min(budget, job.remaining_s)
            job.remaining_s -= spend
            budget -= spend
            if job.remaining_s <= 1e-9:
                self.queue.remove(job)
                self._complete(job, t, completed)

    def _complete(self, job: Job, t: float, completed: set):
        self.ot_flags[job.task] = 1
        completed.add(job.task)
        if job.task == "ReadMessage" and job.message is not None:
            job.message.read_t = t
            self.add_job("DrawZone", t, job.message.arrive_t + self.config.message_budget_s,
                         message=job.message)
        elif job.task == "DrawZone" and job.message is not None:
            job.message.zone_t = t
            zone = Zone(id=self._new_id(), created_t=t)
            self.zones.append(zone)
            self.add_job("ManageEmptyZone", t, t + TASK_BUDGET_S["ManageEmptyZone"], zone=zone)
        elif job.task == "ManageEmptyZone" and job.zone is not None:
            job.zone.has_drone = True
        elif job.task == "DetectVehicle" and job.vehicle is not None:
            job.vehicle.detect_t = t
            self.add_job("InspectLock", t, t + TASK_BUDGET_S["InspectLock"], vehicle=job.vehicle)
        elif job.task == "InspectLock" and job.vehicle is not None:
            job.vehicle.inspect_t = t
            self.add_job("Neutralize", t, t + TASK_BUDGET_S["Neutralize"], vehicle=job.vehicle)
        elif job.task == "Neutralize" and job.vehicle is not None:
            job.vehicle.neutralize_t = t

    def tick(self, t: int, directives: frozenset = frozenset()) -> TaskTick:
        """Advance one second; returns the activity tick for regulation."""
        seen = {job.task for job in self.queue}
        completed: set = set()
        self._expire(t)
        self._shed(t)
        self._spawn(t)
        seen |= {job.task for job in self.queue}
        self._machine_pass(t, directives, completed)
        self._serve(t, directives, completed)
        seen |= completed
        at = {task: (1 if task in seen else 0) for task in TASKS}
        ot = {task: self.ot_flags[task] for task in TASKS if at[task] == 1}
        return TaskTick(t=t, at=at, ot=ot)

    # -- observables --------------------------------------------------------

    def demand(self, t: float) -> ConstraintFrame:
        active = [v for v in self.vehicles if v.neutralize_t is None]
        pending_msgs = sum(
            1 for m in self.messages
            if m.read_t is None and t <= m.arrive_t + self.config.message_budget_s
        )
        entropy = spatial_entropy([(v.x, v.y) for v in active], bounds=(1.0, 1.0))
        return ConstraintFrame(t=int(t), n1=len(active), n2=pending_msgs, entropy=entropy)

    def windowed_performance(self, t: float) -> float:
        """Blend of recent neutralization speed and message answering.

        Vehicles detected but still open past the reference time count as
        zero-score entries so an overload shows up while it is happening.
        """
        cfg = self.config
        lo = t - cfg.perf_window_s
        neutralizations = []
        for v in self.vehicles:
            if v.detect_t is None or v.detect_t < lo:
                continue
            if v.neutralize_t is not None:
                neutralizations.append((v.detect_t, v.neutralize_t))
            elif t - v.detect_t >= cfg.t_ref_s:
                neutralizations.append((v.detect_t, v.detect_t + cfg.t_ref_s))
        messages = []
        for m in self.messages:
            if m.arrive_t < lo:
                continue
            if m.zone_t is not None:
                messages.append((m.arrive_t, m.zone_t))
            elif t > m.arrive_t + cfg.message_budget_s:
                messages.append((m.arrive_t, None))
        return performance_index(
            neutralizations, messages, t_ref_s=cfg.t_ref_s,
            message_budget_s=cfg.message_budget_s,
        ).overall

    def final_performance(self):
        neutralizations = [
            (v.detect_t, v.neutralize_t)
            for v in self.vehicles
            if v.detect_t is not None and v.neutralize_t is not None
        ]
        messages = [(m.arrive_t, m.zone_t) for m in self.messages]
        return performance_index(
            neutralizations, messages,
            t_ref_s=self.config.t_ref_s, message_budget_s=self.config.message_budget_s,
        )


# ---------------------------------------------------------------------------
# physiological channels


def generate_beats(load: Callable[[float], float], duration_s: float,
                   rng: np.random.Generator) -> tuple:
    """Simulated beat times and beat-to-beat intervals under a load trace.

    The mean interval shortens with load: 800 * (1 - 0.2 * L) ms, with 3%
    multiplicative jitter, clipped to a physiological band.
    """
    times, intervals = [], []
    t = 0.0
    while t < duration_s:
        L = load(t)
        rr = 800.0 * (1.0 - 0.2 * L) * (1.0 + 0.03 * rng.standard_normal())
        rr = float(min(max(rr, 300.0), 2000.0))
        times.append(t)
        intervals.append(rr)
        t += rr / 1000.0
    return np.asarray(times), np.asarray(intervals)


def generate_pupil(load: Callable[[float], float], duration_s: float,
                   rng: np.random.Generator, hz: float = 4.0,
                   blink_p: float = 0.005) -> tuple:
    """4 Hz pupil trace: 3.0 + 1.5 * L mm, noise 0.1 mm, occasional blink zeros."""
    n = int(duration_s * hz)
    ts = np.arange(n) / hz
    base = np.asarray([3.0 + 1.5 * load(float(t)) for t in ts])
    values = base + 0.1 * rng.standard_normal(n)
    blinks = rng.random(n) < blink_p
    values[blinks] = 0.0
    return ts, values


class _RollingSdnn:
    """Beat-fed rolling spread of the last `span` intervals."""

    def __init__(self, times: np.ndarray, intervals: np.ndarray, span: int = 100):
        self.times = times
        self.intervals = intervals
        self.span = span
        self._idx = 0
        self._window: list[float] = []

    def at(self, t: float):
        while self._idx < len(self.times) and self.times[self._idx] < t + 1.0:
            self._window.append(float(self.intervals[self._idx]))
            if len(self._window) > self.span:
                self._window.pop(0)
            self._idx += 1
        if len(self._window) < 2:
            return None, True
        sdnn = float(np.std(self._window, ddof=1))
        return sdnn, len(self._window) < self.span


class _PupilPerSecond:
    """Mean of in-range samples per second, z-scored against a reference."""

    def __init__(self, ts: np.ndarray, values: np.ndarray, center: float, scale: float):
        self.ts = ts
        self.values = values
        self.center = center
        self.scale = scale
        self._idx = 0
        self._last_z = 0.0

    def at(self, t: float) -> float:
        acc, count = 0.0, 0
        while self._idx < len(self.ts) and self.ts[self._idx] < t + 1.0:
            v = float(self.values[self._idx])
            if 2.0 <= v <= 8.0:
                acc += v
                count += 1
            self._idx += 1
        if count:
            self._last_z = (acc / count - self.center) / self.scale
        return self._last_z


# ---------------------------------------------------------------------------
# closed-loop run


@dataclass
class RunResult:
    config: ScenarioConfig
    records: list  # chronological JSONL-ready dicts
    levels: np.ndarray  # per-second fused level
    latent: np.ndarray  # per-second scripted load
    isa: list  # (t, rating, level) triples
    compliance: float
    summary: dict

    @property
    def activations(self) -> list:
        return [r for r in self.records if r.get("record") == "assistance"]


def run_scenario(config: ScenarioConfig, net: Optional[MwlNetwork] = None,
                 rules=DEFAULT_RULES) -> RunResult:
    """Run the microworld end to end and fuse workload each second."""
    if net is None:
        net = MwlNetwork.default()
    for var in ("performance", "effort"):
        if var not in net.partitions:
            raise ConfigError(f"fusion model must carry a partition for {var!r}")
    script = operator_script(config.operator, config.duration_s, config.phase_split_s)
    ss = np.random.SeedSequence(config.seed)
    child = ss.spawn(3)
    world = World(config, script,
                  rng_spawn=np.random.default_rng(child[0]),
                  rng_operator=np.random.default_rng(child[1]))
    rng_physio = np.random.default_rng(child[2])
    beat_times, beat_intervals = generate_beats(script.load, config.duration_s, rng_physio)
    pupil_ts, pupil_values = generate_pupil(script.load, config.duration_s, rng_physio)
    sdnn = _RollingSdnn(beat_times, beat_intervals)
    pupil = _PupilPerSecond(pupil_ts, pupil_values, config.pupil_ref_mm, config.pupil_ref_sd)

    tracker = ActivityTracker()
    engine = AdaptationEngine(rules=rules, hold_s=config.hold_s)
    directives: frozenset = frozenset()
    records: list[dict] = [{
        "record": "config",
        "duration_s": config.duration_s,
        "phase_split_s": config.phase_split_s,
        "calm_rate_per_s": round(config.calm_rate_per_s, 9),
        "busy_rate_per_s": round(config.busy_rate_per_s, 9),
        "seed": config.seed,
        "operator": config.operator,
        "dfa": config.dfa,
        "isa_period_s": config.isa_period_s,
    }]
    levels = np.zeros(config.duration_s, dtype=int)
    latent = np.zeros(config.duration_s, dtype=float)
    isa: list[tuple] = []
    recent_z: list[float] = []

    for t in range(config.duration_s):
        load = script.load(float(t))
        latent[t] = load
        task_tick = world.tick(t, directives)
        perf = world.windowed_performance(float(t))
        snap, event = tracker.ingest(task_tick, perf)
        if event is not None:
            records.append({"record": "regulation", "t": t, "kind": event.kind.name})

        frame = world.demand(float(t))
        td = task_difficulty(discretize(frame))
        hrv, warmup = sdnn.at(float(t))
        z = pupil.at(float(t))
        recent_z.append(z)
        if len(recent_z) > config.effort_smooth_s:
            recent_z.pop(0)
        z_smooth = sum(recent_z) / len(recent_z)

        behaviour = "none"
        for ev in reversed(tracker.events):
            if ev.t < t - config.behaviour_window_s:
                break
            if ev.kind in COST_ORIENTED:
                behaviour = "cost_oriented"
                break
            if ev.kind in PERFORMANCE_ORIENTED and behaviour == "none":
                behaviour = "performance_oriented"

        evidence = [
            SoftEvidence.hard("constraint", f"td{td}"),
            SoftEvidence.hard("behaviour", behaviour),
            fuzzify(perf, net.partitions["performance"]),
            fuzzify(z_smooth, net.partitions["effort"]),
        ]
        post = posterior(net, evidence)
        level = mwl_level(post)
        levels[t] = level

        if config.dfa:
            for cmd in engine.step(float(t), level):
                records.append({
                    "record": "assistance", "t": t, "directive": cmd.directive,
                    "task": cmd.task, "active": cmd.active, "level": level,
                })
            directives = engine.active

        records.append({
            "record": "tick",
            "t": t,
            "latent": round(load, 6),
            "nps": snap.nps,
            "cps": snap.cps,
            "perf": round(perf, 6),
            "n1": frame.n1,
            "n2": frame.n2,
            "entropy": round(frame.entropy, 6),
            "td": td,
            "hrv_sdnn_ms": None if hrv is None else round(hrv, 6),
            "hrv_warmup": warmup,
            "pupil_z": round(z_smooth, 6),
            "behaviour": behaviour,
            "level": level,
            "posterior": [round(float(p), 9) for p in post],
        })

        if t > 0 and t % config.isa_period_s == 0:
            rating = min(5, 1 + int(5.0 * load))
            isa.append((t, rating, level))
            records.append({"record": "isa", "t": t, "rating": rating, "level": level})

    final = world.final_performance()
    compliance = tracker.compliance_rate()
    summary = {
        "record": "summary",
        "compliance": round(compliance, 6),
        "p1": round(final.p1, 6),
        "p2": round(final.p2, 6),
        "performance": round(final.overall, 6),
        "messages": len(world.messages),
        "messages_zoned_in_time": sum(
            1 for m in world.messages
            if m.zone_t is not None and m.zone_t - m.arrive_t <= config.message_budget_s
        ),
        "vehicles": len(world.vehicles),
        "neutralized": sum(1 for v in world.vehicles if v.neutralize_t is not None),
        "misses": dict(world.miss_counts),
        "machine_done": dict(world.machine_done),
        "regulation_events": len(tracker.events),
        "assistance_commands": sum(1 for r in records if r.get("record") == "assistance"),
    }
    records.append(summary)
    return RunResult(
        config=config,
        records=records,
        levels=levels,
        latent=latent,
        isa=isa,
        compliance=compliance,
        summary=summary,
    )


def compare_compliance(seeds: Sequence[int], base: Optional[ScenarioConfig] = None) -> dict:
    """Median compliance over seeds, adaptation off vs on, same worlds."""
    if base is None:
        base = ScenarioConfig(operator="degrading-overload")
    off, on = [], []
    for seed in seeds:
        off.append(run_scenario(replace(base, seed=seed, dfa=False)).compliance)
        on.append(run_scenario(replace(base, seed=seed, dfa=True)).compliance)
    return {
        "seeds": list(seeds),
        "compliance_off": off,
        "compliance_on": on,
        "median_off": float(np.median(off)),
        "median_on": float(np.median(on)),
    }
