"""Command line front end.

Subcommands cover the whole chain: physio (per-second feature frames),
monitor (offline fusion of recorded streams), classify (effort classifier
training, prediction, cross-validation), cocom (control-mode coding and
transition counts), dfa (function-allocation checks and solving), simulate
(the deterministic microworld), and endtoend (simulate, fuse, and score the
fused level against the scripted load and the periodic self-ratings).

Exit codes: 0 on success, 2 for configuration or argument problems, 3 for
bad input data, 4 when an allocation problem is infeasible.

A settings JSON (via --config or the OFT_CONFIG environment variable) may
supply defaults: {"fusion_net": path, "pupil_reference": [mean_mm, sd_mm],
"hold_s": seconds}.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from importlib.resources import as_file, files
from pathlib import Path

import numpy as np

from . import __version__, physio
from .cocom import read_roster_csv, read_trace_csv, transitions, write_coded_csv, code_mode
from .dfaplan import check_feasible, default_bike_model, load_model as load_alloc_model
from .effortclass import (
    binarize,
    cross_validate,
    fit_model,
    load_model,
    read_dataset_csv,
    save_model,
)
from .errors import ConfigError, DataError, InfeasibleError
from .fusion import MwlNetwork
from .microworld import ScenarioConfig, run_scenario
from .pipeline import (
    endtoend_report,
    monitor_offline,
    read_demand_csv,
    write_manifest,
    write_monitor_outputs,
    write_run_log,
)
from .regulation import read_ticks_jsonl


def _settings(args) -> dict:
    path = args.config or os.environ.get("OFT_CONFIG")
    if not path:
        return {}
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"settings file {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"settings file {path}: expected a JSON object")
    return raw


def _network(settings: dict) -> MwlNetwork:
    if "fusion_net" in settings:
        return MwlNetwork.load(settings["fusion_net"])
    return MwlNetwork.default()


def _reference(args, settings):
    if getattr(args, "reference", None):
        return tuple(args.reference)
    if "pupil_reference" in settings:
        ref = settings["pupil_reference"]
        if not (isinstance(ref, (list, tuple)) and len(ref) == 2):
            raise ConfigError("settings: pupil_reference must be [mean_mm, sd_mm]")
        return (float(ref[0]), float(ref[1]))
    return None


# ---------------------------------------------------------------------------
# handlers


def _cmd_physio(args) -> int:
    settings = _settings(args)
    beats = physio.read_beats_csv(args.beats)
    pupil = physio.read_pupil_csv(args.pupil)
    framed = physio.per_second_frames(
        beats,
        pupil,
        span=args.span,
        normalization=args.normalization,
        window=tuple(args.window) if args.window else None,
        reference=_reference(args, settings),
    )
    physio.write_frames_csv(framed, args.out)
    if args.jsonl:
        physio.write_frames_jsonl(framed, args.jsonl)
    if args.manifest:
        write_manifest(
            args.manifest,
            "physio",
            {
                "beats": args.beats,
                "pupil": args.pupil,
                "normalization": args.normalization,
                "span": args.span,
            },
            inputs=[args.beats, args.pupil],
        )
    print(f"framed {len(framed.frames)} seconds -> {args.out}")
    return 0


def _cmd_monitor(args) -> int:
    settings = _settings(args)
    beats = physio.read_beats_csv(args.beats)
    pupil = physio.read_pupil_csv(args.pupil)
    ticks = list(read_ticks_jsonl(args.ticks))
    demand = read_demand_csv(args.demand) if args.demand else None
    result = monitor_offline(
        beats,
        pupil,
        ticks,
        demand=demand,
        net=_network(settings),
        normalization=args.normalization,
        reference=_reference(args, settings),
    )
    paths = write_monitor_outputs(result, args.out_dir)
    inputs = [args.beats, args.pupil, args.ticks] + ([args.demand] if args.demand else [])
    write_manifest(
        Path(args.out_dir) / "manifest.json",
        "monitor",
        {"normalization": args.normalization, "demand": bool(args.demand)},
        inputs=inputs,
    )
    print(
        f"monitored {result.report['ticks']} s: mean level "
        f"{result.report['mean_level']}, compliance {result.report['compliance']} "
        f"-> {paths['report']}"
    )
    return 0


def _model_spec(args) -> dict:
    if args.kind == "knn":
        return {"kind": "knn", "k": args.k, "metric": args.metric}
    return {"kind": "rf", "trees": args.trees, "seed": args.seed}


def _dataset_arrays(frames, raw_labels: bool):
    X = np.asarray([f.features for f in frames], dtype=float)
    y = np.asarray([f.label for f in frames], dtype=int)
    if not raw_labels:
        y = binarize(y)
    return X, y


def _cmd_classify_train(args) -> int:
    frames = read_dataset_csv(args.data)
    if not frames:
        raise DataError(f"dataset {args.data}: no rows")
    X, y = _dataset_arrays(frames, args.raw_labels)
    model = fit_model(_model_spec(args), X, y)
    save_model(model, args.model_out)
    print(f"trained {args.kind} on {len(frames)} rows -> {args.model_out}")
    return 0


def _cmd_classify_predict(args) -> int:
    import csv

    model = load_model(args.model)
    frames = read_dataset_csv(args.data)
    if not frames:
        raise DataError(f"dataset {args.data}: no rows")
    X = np.asarray([f.features for f in frames], dtype=float)
    labels = model.predict(X)
    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["row", "subject", "label"])
        for i, (frame, label) in enumerate(zip(frames, labels)):
            writer.writerow([i, frame.subject, int(label)])
    print(f"predicted {len(frames)} rows -> {args.out}")
    return 0


def _cmd_classify_cv(args) -> int:
    frames = read_dataset_csv(args.data)
    if not args.raw_labels:
        frames = [
            type(f)(subject=f.subject, features=f.features, label=int(binarize(f.label)))
            for f in frames
        ]
    test_subjects = args.test_subjects.split(",") if args.test_subjects else None
    report = cross_validate(
        frames, args.scheme, _model_spec(args), seed=args.seed, test_subjects=test_subjects
    )
    payload = {
        "scheme": report.split,
        "accuracy": round(report.global_accuracy, 6),
        "per_class": {str(k): round(v, 6) for k, v in report.per_class.items()},
        "n_train": report.n_train,
        "n_test": report.n_test,
        "model": _model_spec(args),
    }
    if args.report:
        with open(args.report, "w", newline="\n") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(
        f"{args.scheme}: accuracy {payload['accuracy']} "
        f"({report.n_train} train / {report.n_test} test)"
    )
    return 0


def _cmd_cocom_code(args) -> int:
    traces = read_trace_csv(args.trace)
    coded = [(period, code_mode(trace)) for period, trace in sorted(traces.items())]
    write_coded_csv(coded, args.out)
    for period, mode in coded:
        print(f"{period}: {mode.name}")
    return 0


def _cmd_cocom_transitions(args) -> int:
    if args.roster:
        rows = read_roster_csv(args.roster)
    else:
        with as_file(files("oft.data").joinpath("cocom_roster.csv")) as p:
            rows = read_roster_csv(p)
    tm = transitions((low, high) for _name, low, high in rows)
    payload = {
        "participants": len(rows),
        "counts": tm.counts.tolist(),
        "first_period_marginals": tm.first_period_marginals.tolist(),
        "second_period_marginals": tm.second_period_marginals.tolist(),
        "adjacency_fraction": round(tm.adjacency_fraction, 6),
    }
    with open(args.out, "w", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"{len(rows)} participants, adjacency fraction "
        f"{payload['adjacency_fraction']} -> {args.out}"
    )
    return 0


def _alloc_model(args):
    if args.model:
        return load_alloc_model(args.model)
    return default_bike_model()


def _situations(text: str) -> list:
    ids = [s.strip() for s in text.split(",") if s.strip()]
    if not ids:
        raise ConfigError("--situations must name at least one situation")
    return ids


def _cmd_dfa_check(args) -> int:
    model = _alloc_model(args)
    sids = _situations(args.situations)
    min_config = model.min_config(sids)
    pot = model.pot(sids)
    report = check_feasible(min_config, pot)
    print("min config:")
    for req in min_config:
        print(f"  {req}")
    if not min_config:
        print("  (empty)")
    print("pot:")
    for entry in pot.entries:
        print(f"  {entry}")
    if report.feasible:
        print("feasible: yes")
        return 0
    print("feasible: no")
    for conflict in report.conflicts:
        print(f"  {conflict}")
    return 4


def _cmd_dfa_solve(args) -> int:
    model = _alloc_model(args)
    if not args.steps and not args.situations:
        raise ConfigError("dfa solve needs --situations or --steps")
    if args.steps:
        steps = [_situations(chunk) for chunk in args.steps.split(";") if chunk.strip()]
        solutions = model.solve_sequence(steps, args.criterion)
        for i, sol in enumerate(solutions, start=1):
            print(f"step {i}: {' '.join(sol.couples)} (cost {sol.cost:g})")
        return 0
    sol = model.solve(_situations(args.situations), args.criterion)
    print(f"solution: {' '.join(sol.couples)} (cost {sol.cost:g})")
    return 0


def _scenario_config(args, settings) -> ScenarioConfig:
    kwargs = {
        "seed": args.seed,
        "operator": args.operator,
        "dfa": args.dfa == "on",
        "duration_s": args.duration,
        "phase_split_s": max(1, args.duration // 2),
    }
    if "hold_s" in settings:
        kwargs["hold_s"] = float(settings["hold_s"])
    return ScenarioConfig(**kwargs)


def _cmd_simulate(args) -> int:
    settings = _settings(args)
    config = _scenario_config(args, settings)
    result = run_scenario(config, net=_network(settings))
    write_run_log(result, args.log)
    if args.manifest:
        write_manifest(
            args.manifest,
            "simulate",
            {
                "seed": args.seed,
                "operator": args.operator,
                "dfa": args.dfa,
                "duration": args.duration,
            },
        )
    s = result.summary
    print(
        f"simulated {config.duration_s} s ({config.operator}, seed {config.seed}): "
        f"compliance {s['compliance']}, performance {s['performance']}, "
        f"{s['neutralized']}/{s['vehicles']} vehicles neutralized -> {args.log}"
    )
    return 0


def _cmd_endtoend(args) -> int:
    settings = _settings(args)
    config = _scenario_config(args, settings)
    report = endtoend_report(config, net=_network(settings))
    if args.report:
        with open(args.report, "w", newline="\n") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(
        f"level vs latent load: spearman {report['spearman_level_vs_latent']}; "
        f"level vs self-rating: spearman {report['spearman_level_vs_isa']}"
    )
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oft",
        description="operator functional-state monitoring and adaptive assistance",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--config",
        help="settings JSON; overrides the OFT_CONFIG environment variable",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("physio", help="frame beat and pupil streams into per-second features")
    p.add_argument("--beats", required=True, help="CSV t_s,rr_ms")
    p.add_argument("--pupil", required=True, help="CSV t_s,pupil_mm,valid")
    p.add_argument("--out", required=True, help="frames CSV to write")
    p.add_argument("--jsonl", help="also write frames JSONL with run metadata")
    p.add_argument(
        "--normalization", default="session", choices=("session", "window", "reference")
    )
    p.add_argument("--window", nargs=2, type=float, metavar=("START", "END"))
    p.add_argument("--reference", nargs=2, type=float, metavar=("MEAN_MM", "SD_MM"))
    p.add_argument("--span", type=int, default=physio.SDNN_SPAN)
    p.add_argument("--manifest", help="write a reproducibility manifest JSON")
    p.set_defaults(func=_cmd_physio)

    p = sub.add_parser("monitor", help="fuse recorded streams into workload levels")
    p.add_argument("--beats", required=True)
    p.add_argument("--pupil", required=True)
    p.add_argument("--ticks", required=True, help="activity JSONL: t, at, ot, perf")
    p.add_argument("--demand", help="optional CSV t_s,n1,n2,entropy")
    p.add_argument("--out-dir", required=True)
    p.add_argument(
        "--normalization", default="session", choices=("session", "window", "reference")
    )
    p.add_argument("--reference", nargs=2, type=float, metavar=("MEAN_MM", "SD_MM"))
    p.set_defaults(func=_cmd_monitor)

    p = sub.add_parser("classify", help="effort classifiers over feature frames")
    csub = p.add_subparsers(dest="classify_command", required=True)

    def _classifier_args(q):
        q.add_argument("--kind", default="knn", choices=("knn", "rf"))
        q.add_argument("--k", type=int, default=5, help="neighbours (knn)")
        q.add_argument(
            "--metric",
            default="euclidean",
            choices=("euclidean", "squared_euclidean", "manhattan", "chebyshev"),
        )
        q.add_argument("--trees", type=int, default=23, help="trees (rf)")
        q.add_argument("--seed", type=int, default=0)
        q.add_argument(
            "--raw-labels",
            action="store_true",
            help="keep 3-level labels instead of folding to low/high",
        )

    q = csub.add_parser("train", help="fit on a whole dataset and save the model")
    q.add_argument("--data", required=True, help="CSV subject,t_s,hrv,pupil_z,td")
    q.add_argument("--model-out", required=True)
    _classifier_args(q)
    q.set_defaults(func=_cmd_classify_train)

    q = csub.add_parser("predict", help="apply a saved model to a dataset")
    q.add_argument("--model", required=True)
    q.add_argument("--data", required=True)
    q.add_argument("--out", required=True, help="CSV row,subject,label")
    q.set_defaults(func=_cmd_classify_predict)

    q = csub.add_parser("cv", help="held-out accuracy under a split scheme")
    q.add_argument("--data", required=True)
    q.add_argument(
        "--scheme", default="per-subject-75-25", choices=("per-subject-75-25", "leave-subjects-out")
    )
    q.add_argument("--test-subjects", help="comma-separated held-out subjects")
    q.add_argument("--report", help="write the accuracy report JSON here")
    _classifier_args(q)
    q.set_defaults(func=_cmd_classify_cv)

    p = sub.add_parser("cocom", help="control-mode coding from tank traces")
    csub = p.add_subparsers(dest="cocom_command", required=True)
    q = csub.add_parser("code", help="code each period of a trace CSV")
    q.add_argument("--trace", required=True, help="CSV t_s,tank_a,tank_b,period")
    q.add_argument("--out", required=True, help="CSV period,mode")
    q.set_defaults(func=_cmd_cocom_code)
    q = csub.add_parser("transitions", help="mode transition counts between two periods")
    q.add_argument("--roster", help="CSV participant,mode_low,mode_high (default: bundled)")
    q.add_argument("--out", required=True, help="JSON with counts and marginals")
    q.set_defaults(func=_cmd_cocom_transitions)

    p = sub.add_parser("dfa", help="situation-dependent function allocation")
    dsub = p.add_subparsers(dest="dfa_command", required=True)
    q = dsub.add_parser("check", help="min config, pot, and feasibility")
    q.add_argument("--model", help="allocation model JSON (default: bundled bicycle model)")
    q.add_argument("--situations", required=True, help="comma-separated situation ids")
    q.set_defaults(func=_cmd_dfa_check)
    q = dsub.add_parser("solve", help="cheapest admissible allocation")
    q.add_argument("--model", help="allocation model JSON (default: bundled bicycle model)")
    q.add_argument("--situations", help="comma-separated situation ids")
    q.add_argument("--criterion", required=True, help="cost table name from the model")
    q.add_argument(
        "--steps",
        help="scenario as semicolon-separated steps, e.g. 'S1,S4;S2' (enables antecedence)",
    )
    q.set_defaults(func=_cmd_dfa_solve)

    def _scenario_args(q, default_operator):
        q.add_argument("--seed", type=int, default=0)
        q.add_argument(
            "--operator",
            default=default_operator,
            choices=("diligent", "prioritizer", "degrading-overload", "flat"),
        )
        q.add_argument(
            "--dfa", choices=("on", "off"), default="off",
            help="close the loop with workload-triggered assistance",
        )
        q.add_argument("--duration", type=int, default=1200)

    p = sub.add_parser("simulate", help="run the deterministic microworld")
    _scenario_args(p, "diligent")
    p.add_argument("--log", required=True, help="run log JSONL to write")
    p.add_argument("--manifest", help="write a reproducibility manifest JSON")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("endtoend", help="simulate, fuse, and score level tracking")
    _scenario_args(p, "degrading-overload")
    p.add_argument("--report", help="write the report JSON here")
    p.set_defaults(func=_cmd_endtoend)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args) or 0)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        for line in (exc.report or {}).get("core", []):
            print(f"  core: {line}", file=sys.stderr)
        return 4
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
