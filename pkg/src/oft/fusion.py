"""Workload fusion: fuzzy discretization of continuous indicators plus a
small naive-fusion network over a five-level workload variable.

The network has one root (workload level 1..5) and independent child
indicators, each a labelled discrete variable with a conditional table
P(label | level). Observations enter as soft evidence (a non-negative
likelihood per label, not necessarily normalized); the posterior is exact:

    post(k)  proportional to  prior(k) * prod_children sum_l lik(l) * cpt[k, l]

Children without evidence drop out (their labels marginalize to 1).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .jsonl import dump_jsonl

N_LEVELS = 5


@dataclass(frozen=True)
class FuzzyPartition:
    """Trapezoidal partition of a real interval into ordered labels.

    Labels are listed in ascending order of the variable. Between adjacent
    labels sits an overlap interval [lo, hi] where membership crossfades
    linearly; outside the overlaps exactly one label holds with weight 1.
    Memberships therefore always sum to 1 on the domain.
    """

    variable: str
    labels: tuple
    domain: tuple
    overlaps: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        overlaps = tuple((float(lo), float(hi)) for lo, hi in self.overlaps)
        lo_dom, hi_dom = float(self.domain[0]), float(self.domain[1])
        if len(set(labels)) != len(labels) or not labels:
            raise ConfigError(f"partition {self.variable}: labels must be unique and non-empty")
        if len(overlaps) != len(labels) - 1:
            raise ConfigError(
                f"partition {self.variable}: need {len(labels) - 1} overlaps, got {len(overlaps)}"
            )
        if lo_dom >= hi_dom:
            raise ConfigError(f"partition {self.variable}: empty domain")
        cursor = lo_dom
        for lo, hi in overlaps:
            if not (cursor <= lo < hi <= hi_dom):
                raise ConfigError(
                    f"partition {self.variable}: overlaps must be increasing and inside the domain"
                )
            cursor = hi
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "domain", (lo_dom, hi_dom))
        object.__setattr__(self, "overlaps", overlaps)

    def membership(self, x: float) -> dict:
        lo_dom, hi_dom = self.domain
        if x < lo_dom or x > hi_dom:
            warnings.warn(
                f"partition {self.variable}: {x} outside domain, clamped", stacklevel=2
            )
            x = min(max(x, lo_dom), hi_dom)
        weights = {label: 0.0 for label in self.labels}
        for i, (lo, hi) in enumerate(self.overlaps):
            if x <= lo:
                weights[self.labels[i]] = 1.0
                return weights
            if x < hi:
                up = (x - lo) / (hi - lo)
                weights[self.labels[i]] = 1.0 - up
                weights[self.labels[i + 1]] = up
                return weights
        weights[self.labels[-1]] = 1.0
        return weights


@dataclass(frozen=True)
class SoftEvidence:
    """Likelihood weights over one child variable's labels."""

    variable: str
    likelihood: Mapping[str, float]

    def __post_init__(self):
        lik = {str(k): float(v) for k, v in self.likelihood.items()}
        if not lik:
            raise DataError(f"evidence for {self.variable}: empty likelihood")
        if any(v < 0 for v in lik.values()):
            raise DataError(f"evidence for {self.variable}: negative likelihood")
        if all(v == 0 for v in lik.values()):
            raise DataError(f"evidence for {self.variable}: all-zero likelihood")
        object.__setattr__(self, "likelihood", lik)

    @classmethod
    def hard(cls, variable: str, label: str) -> "SoftEvidence":
        return cls(variable, {label: 1.0})


def fuzzify(x: float, partition: FuzzyPartition) -> SoftEvidence:
    """Turn a continuous reading into soft evidence via the partition."""
    return SoftEvidence(partition.variable, partition.membership(x))


@dataclass(frozen=True)
class MwlNetwork:
    """Five-level workload root with independent labelled child indicators."""

    prior: np.ndarray
    children: dict  # name -> (labels tuple, cpt ndarray of shape (5, len(labels)))
    partitions: dict = field(default_factory=dict)  # variable -> FuzzyPartition

    def __post_init__(self):
        prior = np.asarray(self.prior, dtype=float)
        if prior.shape != (N_LEVELS,):
            raise ConfigError(f"prior must have {N_LEVELS} entries")
        if np.any(prior < 0) or abs(prior.sum() - 1.0) > 1e-9:
            raise ConfigError("prior must be a distribution (non-negative, sums to 1)")
        children = {}
        for name, (labels, cpt) in self.children.items():
            labels = tuple(labels)
            cpt = np.asarray(cpt, dtype=float)
            if len(set(labels)) != len(labels) or not labels:
                raise ConfigError(f"child {name}: labels must be unique and non-empty")
            if cpt.shape != (N_LEVELS, len(labels)):
                raise ConfigError(
                    f"child {name}: table must be {N_LEVELS}x{len(labels)}, got {cpt.shape}"
                )
            if np.any(cpt < 0) or np.any(np.abs(cpt.sum(axis=1) - 1.0) > 1e-9):
                raise ConfigError(f"child {name}: every row must be a distribution")
            children[name] = (labels, cpt)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "children", children)

    @classmethod
    def from_dict(cls, raw: Mapping) -> "MwlNetwork":
        try:
            children = {
                name: (tuple(spec["labels"]), np.asarray(spec["cpt"], dtype=float))
                for name, spec in raw["children"].items()
            }
            partitions = {
                var: FuzzyPartition(
                    variable=var,
                    labels=tuple(spec["labels"]),
                    domain=tuple(spec["domain"]),
                    overlaps=tuple(tuple(o) for o in spec["overlaps"]),
                )
                for var, spec in raw.get("partitions", {}).items()
            }
            prior = np.asarray(raw["prior"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"workload network config: {exc}") from exc
        return cls(prior=prior, children=children, partitions=partitions)

    @classmethod
    def load(cls, path: str | Path) -> "MwlNetwork":
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"workload network config {path}: {exc}") from exc
        return cls.from_dict(raw)

    @classmethod
    def default(cls) -> "MwlNetwork":
        from importlib.resources import files

        with files("oft.data").joinpath("mwl_net.json").open() as fh:
            return cls.from_dict(json.load(fh))


def posterior(net: MwlNetwork, evidence: Iterable[SoftEvidence]) -> np.ndarray:
    """Exact posterior over the five levels given soft evidence.

    Invariant under evidence order and under positive scaling of any
    likelihood vector. Raises if two pieces of evidence target one variable
    or if the combined evidence has zero mass under the model.
    """
    seen = set()
    post = net.prior.copy()
    for ev in evidence:
        if ev.variable in seen:
            raise DataError(f"duplicate evidence for variable {ev.variable!r}")
        seen.add(ev.variable)
        if ev.variable not in net.children:
            raise DataError(f"evidence for unknown variable {ev.variable!r}")
        labels, cpt = net.children[ev.variable]
        unknown = set(ev.likelihood) - set(labels)
        if unknown:
            raise DataError(
                f"evidence for {ev.variable!r} names unknown labels {sorted(unknown)}"
            )
        lik = np.array([ev.likelihood.get(label, 0.0) for label in labels])
        post = post * (cpt @ lik)
    total = post.sum()
    if total <= 0.0:
        raise DataError("evidence has zero probability under the model")
    return post / total


def mwl_level(post: Sequence[float]) -> int:
    """Level 1..5 with the highest posterior; exact ties go to the higher level."""
    p = np.asarray(post, dtype=float)
    if p.shape != (N_LEVELS,):
        raise ValueError(f"posterior must have {N_LEVELS} entries")
    best = p.max()
    for k in range(N_LEVELS - 1, -1, -1):
        if p[k] == best:
            return k + 1
    raise ValueError("posterior has no maximum")  # unreachable


@dataclass(frozen=True)
class MwlState:
    """Fused workload at one second."""

    t: int
    posterior: tuple
    level: int
    evidence: dict = field(default_factory=dict)  # variable -> likelihood dict


def fuse(net: MwlNetwork, t: int, evidence: Sequence[SoftEvidence]) -> MwlState:
    post = posterior(net, evidence)
    return MwlState(
        t=t,
        posterior=tuple(float(v) for v in post),
        level=mwl_level(post),
        evidence={ev.variable: dict(ev.likelihood) for ev in evidence},
    )


def write_states_jsonl(states: Iterable[MwlState], path: str | Path) -> None:
    dump_jsonl(
        (
            {"t": s.t, "level": s.level, "posterior": list(s.posterior)}
            for s in states
        ),
        path,
    )
