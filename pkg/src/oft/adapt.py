"""Workload-triggered assistance rules with hysteresis.

Each rule names a directive, the task it helps with, the cognitive stage it
intervenes at (gathering, analysis, decision, action), and the workload
level that switches it on. A directive is active at level L when its
trigger level is <= L, so aids gained at level 4 stay on at level 5.

The engine is edge-triggered: feeding it a timestamped level yields only
the activate/deactivate commands for directives whose state changed.
Deactivation is held back until the level has stayed below the trigger for
hold_s seconds, which stops a level bouncing on a boundary from toggling
aids every tick.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import ConfigError, SequencingError

STAGES = ("gathering", "analysis", "decision", "action")


@dataclass(frozen=True)
class AssistanceRule:
    directive: str
    task: str
    stage: str
    trigger_level: int

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ConfigError(f"rule {self.directive}: unknown stage {self.stage!r}")
        if not 1 <= self.trigger_level <= 5:
            raise ConfigError(f"rule {self.directive}: trigger level must be 1..5")


DEFAULT_RULES = (
    AssistanceRule("highlight_messages", "ReadMessage", "gathering", 4),
    AssistanceRule("highlight_empty_zones", "ManageEmptyZone", "gathering", 4),
    AssistanceRule("annotate_message_coords", "DetectVehicle", "analysis", 5),
    AssistanceRule("auto_judge_zone_useful", "ManageEmptyZone", "decision", 5),
    AssistanceRule("auto_transfer_drones", "ManageEmptyZone", "action", 5),
    AssistanceRule("auto_inspect", "InspectLock", "action", 5),
)


def assistance_for_level(level: int, rules: Sequence[AssistanceRule] = DEFAULT_RULES) -> tuple:
    """Directives that should be on at a workload level, in rule order."""
    if not 1 <= level <= 5:
        raise ConfigError(f"workload level must be 1..5, got {level}")
    return tuple(r.directive for r in rules if r.trigger_level <= level)


@dataclass(frozen=True)
class AssistanceCommand:
    """One switching edge; streams serialize as {t, directive, task, active}."""

    t: float
    directive: str
    task: str
    active: bool


@dataclass
class AdaptationEngine:
    """Turns a level stream into activation edges, with release hysteresis."""

    rules: Sequence[AssistanceRule] = DEFAULT_RULES
    hold_s: float = 5.0
    _active: set = field(default_factory=set)
    _last_high: dict = field(default_factory=dict)  # directive -> last t at/above trigger
    _last_t: Optional[float] = None

    def __post_init__(self):
        if self.hold_s < 0:
            raise ConfigError("hold_s must be >= 0")
        names = [r.directive for r in self.rules]
        if len(set(names)) != len(names):
            raise ConfigError("duplicate assistance directives")

    @property
    def active(self) -> frozenset:
        return frozenset(self._active)

    def step(self, t: float, level: int) -> list:
        if not 1 <= level <= 5:
            raise ConfigError(f"workload level must be 1..5, got {level}")
        if self._last_t is not None and t <= self._last_t:
            raise SequencingError(f"time went backwards: {t} after {self._last_t}")
        self._last_t = t
        commands = []
        for rule in self.rules:
            name = rule.directive
            if level >= rule.trigger_level:
                self._last_high[name] = t
                if name not in self._active:
                    self._active.add(name)
                    commands.append(
                        AssistanceCommand(t=t, directive=name, task=rule.task, active=True)
                    )
            elif name in self._active:
                since = self._last_high.get(name)
                if since is None or t - since > self.hold_s:
                    self._active.discard(name)
                    commands.append(
                        AssistanceCommand(t=t, directive=name, task=rule.task, active=False)
                    )
        return commands


def replay(levels, rules: Sequence[AssistanceRule] = DEFAULT_RULES, hold_s: float = 5.0) -> list:
    """Run a whole (t, level) stream through a fresh engine."""
    engine = AdaptationEngine(rules=rules, hold_s=hold_s)
    commands = []
    for t, level in levels:
        commands.extend(engine.step(t, level))
    return commands


def active_after(commands) -> frozenset:
    """Reconstruct the active-directive set from a command stream."""
    state: set = set()
    for cmd in commands:
        if cmd.active:
            state.add(cmd.directive)
        else:
            state.discard(cmd.directive)
    return frozenset(state)


def write_commands_jsonl(commands, path) -> None:
    from .jsonl import dump_jsonl

    dump_jsonl(
        (
            {"t": c.t, "directive": c.directive, "task": c.task, "active": c.active}
            for c in commands
        ),
        path,
    )
