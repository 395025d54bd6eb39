"""Function-allocation planning over situation-dependent couple statuses.

A model declares functions, resources, and the allocatable couples
(function-resource pairs). Every elementary situation assigns each couple a
status: expected (must be covered there), optional (may help), or
impossible (ruled out there); couples not listed in a situation are
impossible in it. A compound situation is a set of elementary ids.

    min_config: couples expected in at least one member situation. Couples
                that share a declared exactly-one group enter as a single
                one-of requirement.
    pot:        couples that are not impossible in any member situation,
                annotated with their conditional prerequisites.
    feasible:   every requirement can be met from the pot.
    optimize:   cheapest subset S with requirements met, min_config-style
                coverage, S inside the pot, and all constraints satisfied.

The solver enumerates subsets of the pot exhaustively (instances are small
by construction) and breaks cost ties by the lexicographically smallest
couple-id tuple, so results are deterministic.

Constraint kinds: "binary" (a couple forced out via allowed=false),
"disjunctive" (at least one of a set), "exclusive" (at most one of a set),
"capacity" (per-resource limit on allocated couples), "conditional" (a
couple drags prerequisites in), and "antecedence" (a couple is admissible
only after its antecedents were allocated in an earlier step of a scenario
sequence).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ConfigError, DataError, InfeasibleError

EXPECTED, OPTIONAL, IMPOSSIBLE = "expected", "optional", "impossible"

MAX_POT_FOR_EXHAUSTIVE = 20


@dataclass(frozen=True)
class Couple:
    """One allocatable function-resource pair, e.g. F1-H."""

    function: str
    resource: str

    @property
    def id(self) -> str:
        return f"{self.function}-{self.resource}"


@dataclass(frozen=True)
class Requirement:
    """Cover obligation: one couple, or exactly one of several."""

    couples: tuple

    def __str__(self):
        return " xor ".join(self.couples)


@dataclass(frozen=True)
class PotEntry:
    couple: str
    conditions: tuple = ()

    def __str__(self):
        if self.conditions:
            return f"{self.couple} if " + " and ".join(self.conditions)
        return self.couple


@dataclass(frozen=True)
class PotResult:
    entries: tuple
    eliminated: dict  # couple id -> tuple of situations where it is impossible

    @property
    def couples(self) -> tuple:
        return tuple(e.couple for e in self.entries)


@dataclass(frozen=True)
class Conflict:
    requirement: Requirement
    eliminated: dict  # couple id -> situations that ruled it out

    def __str__(self):
        parts = []
        for couple in self.requirement.couples:
            where = ", ".join(self.eliminated.get(couple, ()))
            parts.append(f"{couple} impossible in {{{where}}}" if where else couple)
        return f"requirement {self.requirement} unsatisfiable: " + "; ".join(parts)


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    conflicts: tuple


@dataclass(frozen=True)
class Solution:
    couples: tuple  # sorted couple ids
    cost: float


@dataclass(frozen=True)
class ConstraintSpec:
    kind: str
    couples: tuple = ()
    couple: Optional[str] = None
    requires: tuple = ()
    after: tuple = ()
    resource: Optional[str] = None
    max_functions: Optional[int] = None
    allowed: bool = True

    def __str__(self):
        if self.kind == "binary":
            state = "allowed" if self.allowed else "forbidden"
            return f"binary: {self.couple} {state}"
        if self.kind == "disjunctive":
            return "disjunctive: at least one of {" + ", ".join(self.couples) + "}"
        if self.kind == "exclusive":
            return "exclusive: at most one of {" + ", ".join(self.couples) + "}"
        if self.kind == "capacity":
            return f"capacity: {self.resource} <= {self.max_functions} function(s)"
        if self.kind == "conditional":
            return f"conditional: {self.couple} requires " + " and ".join(self.requires)
        if self.kind == "antecedence":
            return f"antecedence: {self.couple} after " + " and ".join(self.after)
        return self.kind


@dataclass
class AllocationModel:
    functions: tuple
    resources: tuple
    couples: tuple  # of Couple, in declaration order
    situations: dict  # situation id -> {couple id: status}; unlisted couples impossible
    xor_groups: tuple = ()
    constraints: tuple = ()
    costs: dict = field(default_factory=dict)  # criterion -> {couple id: cost}

    def __post_init__(self):
        ids = [c.id for c in self.couples]
        if len(set(ids)) != len(ids):
            raise ConfigError("model: duplicate couples")
        known = set(ids)
        for c in self.couples:
            if c.function not in self.functions or c.resource not in self.resources:
                raise ConfigError(f"model: couple {c.id} uses undeclared function or resource")
        for sid, statuses in self.situations.items():
            for cid, status in statuses.items():
                if cid not in known:
                    raise ConfigError(f"situation {sid}: unknown couple {cid}")
                if status not in (EXPECTED, OPTIONAL, IMPOSSIBLE):
                    raise ConfigError(f"situation {sid}: bad status {status!r} for {cid}")
        seen_in_group = set()
        for group in self.xor_groups:
            if len(group) < 2:
                raise ConfigError("model: one-of groups need at least 2 couples")
            for cid in group:
                if cid not in known:
                    raise ConfigError(f"one-of group: unknown couple {cid}")
                if cid in seen_in_group:
                    raise ConfigError(f"one-of groups must be disjoint, {cid} repeats")
                seen_in_group.add(cid)
        for con in self.constraints:
            for cid in (*con.couples, con.couple, *con.requires, *con.after):
                if cid is not None and cid not in known:
                    raise ConfigError(f"constraint {con}: unknown couple {cid}")
            if con.kind == "capacity":
                if con.resource not in self.resources or con.max_functions is None:
                    raise ConfigError(f"constraint {con}: bad capacity spec")
        for criterion, table in self.costs.items():
            for cid, value in table.items():
                if cid not in known:
                    raise ConfigError(f"costs[{criterion}]: unknown couple {cid}")
                if not math.isfinite(value):
                    raise ConfigError(f"costs[{criterion}]: cost of {cid} must be finite")

    # -- helpers ----------------------------------------------------------

    @property
    def couple_ids(self) -> tuple:
        return tuple(c.id for c in self.couples)

    def status(self, situation_id: str, couple_id: str) -> str:
        return self.situations[situation_id].get(couple_id, IMPOSSIBLE)

    def _check_situations(self, situation_ids: Sequence[str]) -> tuple:
        sids = tuple(situation_ids)
        unknown = [s for s in sids if s not in self.situations]
        if unknown:
            raise DataError(f"unknown situation(s): {', '.join(unknown)}")
        return sids

    def group_of(self, couple_id: str) -> Optional[tuple]:
        for group in self.xor_groups:
            if couple_id in group:
                return tuple(group)
        return None

    # -- core operations ---------------------------------------------------

    def min_config(self, situation_ids: Sequence[str]) -> tuple:
        """Requirements from couples expected in any member situation."""
        sids = self._check_situations(situation_ids)
        expected = [
            cid
            for cid in self.couple_ids
            if any(self.status(s, cid) == EXPECTED for s in sids)
        ]
        requirements = []
        grouped = set()
        for cid in expected:
            group = self.group_of(cid)
            if group is None:
                requirements.append(Requirement(couples=(cid,)))
            elif group not in grouped:
                grouped.add(group)
                requirements.append(Requirement(couples=group))
        return tuple(requirements)

    def pot(self, situation_ids: Sequence[str]) -> PotResult:
        """Couples not impossible anywhere, plus who eliminated the rest."""
        sids = self._check_situations(situation_ids)
        conditions = {}
        for con in self.constraints:
            if con.kind == "conditional":
                conditions.setdefault(con.couple, []).extend(con.requires)
        entries = []
        eliminated = {}
        for cid in self.couple_ids:
            ruled_out = tuple(s for s in sids if self.status(s, cid) == IMPOSSIBLE)
            if ruled_out:
                eliminated[cid] = ruled_out
            else:
                entries.append(PotEntry(couple=cid, conditions=tuple(conditions.get(cid, ()))))
        return PotResult(entries=tuple(entries), eliminated=eliminated)

    def check(self, situation_ids: Sequence[str]) -> FeasibilityReport:
        return check_feasible(self.min_config(situation_ids), self.pot(situation_ids))

    def solve(
        self,
        situation_ids: Sequence[str],
        criterion: str,
        history: Optional[Iterable[str]] = None,
    ) -> Solution:
        if criterion not in self.costs:
            raise ConfigError(
                f"unknown cost criterion {criterion!r}; model defines {sorted(self.costs)}"
            )
        constraints = list(self.constraints)
        for group in self.xor_groups:
            constraints.append(ConstraintSpec(kind="exclusive", couples=tuple(group)))
        return optimize(
            self.min_config(situation_ids),
            self.pot(situation_ids),
            tuple(constraints),
            self.costs[criterion],
            history=history,
        )

    def solve_sequence(self, steps: Sequence[Sequence[str]], criterion: str) -> list:
        """Solve a scenario step by step, honouring antecedence constraints."""
        history: set = set()
        solutions = []
        for step in steps:
            solution = self.solve(step, criterion, history=frozenset(history))
            solutions.append(solution)
            history.update(solution.couples)
        return solutions


def check_feasible(min_config: Sequence[Requirement], pot: PotResult) -> FeasibilityReport:
    """Every requirement needs at least one of its couples in the pot."""
    available = set(pot.couples)
    conflicts = []
    for req in min_config:
        if not any(c in available for c in req.couples):
            conflicts.append(
                Conflict(
                    requirement=req,
                    eliminated={c: pot.eliminated.get(c, ()) for c in req.couples},
                )
            )
    return FeasibilityReport(feasible=not conflicts, conflicts=tuple(conflicts))


def _admissible(con: ConstraintSpec, chosen: frozenset, history: Optional[frozenset]) -> bool:
    if con.kind == "binary":
        return con.allowed or con.couple not in chosen
    if con.kind == "disjunctive":
        return any(c in chosen for c in con.couples)
    if con.kind == "exclusive":
        return sum(1 for c in con.couples if c in chosen) <= 1
    if con.kind == "capacity":
        # couple ids are FUNCTION-RESOURCE with a dash-free function part
        used = sum(1 for c in chosen if c.split("-", 1)[1] == con.resource)
        return used <= con.max_functions
    if con.kind == "conditional":
        return con.couple not in chosen or all(r in chosen for r in con.requires)
    if con.kind == "antecedence":
        if history is None:
            return True  # screened out earlier with a warning
        return con.couple not in chosen or all(a in history for a in con.after)
    raise ConfigError(f"unknown constraint kind {con.kind!r}")


def _requirements_met(min_config: Sequence[Requirement], chosen: frozenset) -> bool:
    for req in min_config:
        hits = sum(1 for c in req.couples if c in chosen)
        if len(req.couples) == 1:
            if hits != 1:
                return False
        elif hits != 1:  # one-of groups want exactly one
            return False
    return True


def optimize(
    min_config: Sequence[Requirement],
    pot: PotResult,
    constraints: Sequence[ConstraintSpec],
    costs: Mapping[str, float],
    history: Optional[Iterable[str]] = None,
) -> Solution:
    """Cheapest admissible subset of the pot covering all requirements.

    Exhaustive over subsets of the pot; ties broken by the smallest sorted
    couple-id tuple. Raises InfeasibleError with a minimal unsatisfiable
    core when nothing passes.
    """
    pot_couples = pot.couples
    if len(pot_couples) > MAX_POT_FOR_EXHAUSTIVE:
        raise ConfigError(
            f"pot has {len(pot_couples)} couples; exhaustive search capped at "
            f"{MAX_POT_FOR_EXHAUSTIVE}"
        )
    active = []
    for con in constraints:
        if con.kind == "antecedence" and history is None:
            warnings.warn(
                f"ignoring antecedence constraint on {con.couple}: no scenario history",
                stacklevel=2,
            )
            continue
        active.append(con)
    hist = None if history is None else frozenset(history)

    best: Optional[tuple[float, tuple]] = None
    n = len(pot_couples)
    for mask in range(1 << n):
        chosen = frozenset(pot_couples[i] for i in range(n) if mask >> i & 1)
        if not _requirements_met(min_config, chosen):
            continue
        if not all(_admissible(con, chosen, hist) for con in active):
            continue
        key = tuple(sorted(chosen))
        cost = sum(costs.get(c, 0.0) for c in key)
        if best is None or cost < best[0] or (cost == best[0] and key < best[1]):
            best = (cost, key)
    if best is None:
        core = _unsat_core(min_config, pot, active, hist)
        raise InfeasibleError(
            "no allocation satisfies the requirements and constraints",
            report={"core": [str(item) for item in core]},
        )
    return Solution(couples=best[1], cost=best[0])


def _exists_solution(min_config, pot_couples, constraints, history) -> bool:
    n = len(pot_couples)
    for mask in range(1 << n):
        chosen = frozenset(pot_couples[i] for i in range(n) if mask >> i & 1)
        if _requirements_met(min_config, chosen) and all(
            _admissible(con, chosen, history) for con in constraints
        ):
            return True
    return False


def _unsat_core(min_config, pot, constraints, history) -> list:
    """Greedy minimal subset of requirements and constraints that still conflicts."""
    items = [("req", r) for r in min_config] + [("con", c) for c in constraints]
    keep = list(items)
    for item in items:
        trial = [it for it in keep if it is not item]
        reqs = [r for tag, r in trial if tag == "req"]
        cons = [c for tag, c in trial if tag == "con"]
        if not _exists_solution(reqs, pot.couples, cons, history):
            keep = trial
    return [obj for _, obj in keep]


# ---------------------------------------------------------------------------
# model files


def load_model(path: str | Path) -> AllocationModel:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"allocation model {path}: {exc}") from exc
    return model_from_dict(raw)


def model_from_dict(raw: Mapping) -> AllocationModel:
    try:
        couples = []
        for cid in raw["couples"]:
            function, _, resource = cid.partition("-")
            if not function or not resource:
                raise ConfigError(f"couple id {cid!r} must look like FUNCTION-RESOURCE")
            couples.append(Couple(function=function, resource=resource))
        situations = {}
        for sid, spec in raw["situations"].items():
            statuses = {}
            for cid in spec.get("expected", []):
                statuses[cid] = EXPECTED
            for cid in spec.get("optional", []):
                if cid in statuses:
                    raise ConfigError(f"situation {sid}: {cid} both expected and optional")
                statuses[cid] = OPTIONAL
            situations[sid] = statuses
        constraints = []
        for c in raw.get("constraints", []):
            constraints.append(
                ConstraintSpec(
                    kind=c["kind"],
                    couples=tuple(c.get("couples", ())),
                    couple=c.get("couple"),
                    requires=tuple(c.get("requires", ())),
                    after=tuple(c.get("after", ())),
                    resource=c.get("resource"),
                    max_functions=c.get("max_functions"),
                    allowed=bool(c.get("allowed", True)),
                )
            )
        model = AllocationModel(
            functions=tuple(raw["functions"]),
            resources=tuple(raw["resources"]),
            couples=tuple(couples),
            situations=situations,
            xor_groups=tuple(tuple(g) for g in raw.get("xor_groups", [])),
            constraints=tuple(constraints),
            costs={
                criterion: {cid: float(v) for cid, v in table.items()}
                for criterion, table in raw.get("costs", {}).items()
            },
        )
    except KeyError as exc:
        raise ConfigError(f"allocation model: missing key {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"allocation model: {exc}") from exc
    return model


def default_bike_model() -> AllocationModel:
    from importlib.resources import files

    with files("oft.data").joinpath("bike.json").open() as fh:
        return model_from_dict(json.load(fh))
