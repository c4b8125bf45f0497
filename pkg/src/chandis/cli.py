"""Command-line harness: subcommands, config merging, CSV + manifest output.

Every run writes its tables as CSV (header row, stable column order) into
--output-dir together with a manifest.json recording the merged config,
the library version, wall time, and a sha256 per output file.  A JSON
config file can preset any flag; explicit flags win; unknown config keys
are rejected.  CHANDIS_THREADS caps the BLAS pool.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__, analysis, channels as ch_mod, diamond as dm
from . import ksvm, vardisc, vclass
from .qcore import ContractError, ShapeError


class ConfigError(Exception):
    pass


def _apply_thread_cap() -> None:
    cap = os.environ.get("CHANDIS_THREADS")
    if not cap:
        return
    try:
        n = int(cap)
        if n < 1:
            raise ValueError
    except ValueError:
        raise ConfigError(f"CHANDIS_THREADS must be a positive integer, got {cap!r}")
    try:
        import threadpoolctl
        threadpoolctl.threadpool_limits(n)
    except ImportError:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                    "MKL_NUM_THREADS"):
            os.environ[var] = str(n)


def parse_channel(text: str):
    """Channel from a short spec string: eb-A, eb-B, identity[:q], dep:<alpha>."""
    if text == "eb-A":
        return ch_mod.eb_channel_A()
    if text == "eb-B":
        return ch_mod.eb_channel_B()
    if text == "identity":
        return ch_mod.identity_channel(2)
    if text.startswith("identity:"):
        return ch_mod.identity_channel(2 ** int(text.split(":", 1)[1]))
    if text.startswith("dep:"):
        text = text.split(":", 1)[1]
    try:
        alpha = float(text)
    except ValueError:
        raise ConfigError(f"unknown channel spec {text!r}")
    return ch_mod.depolarizing(alpha)


# flag name -> (type, default, help); default None means required
_SUBCOMMANDS = {
    "discriminate": {
        "channel-a": (str, None, "first channel (eb-A, eb-B, identity, dep:<alpha>)"),
        "channel-b": (str, None, "second channel"),
        "strategy": (str, "sequential", "parallel or sequential"),
        "p": (int, 1, "channel copies"),
        "r": (int, 0, "ancilla qubits"),
        "l": (int, 1, "ansatz layers"),
        "restarts": (int, 10, "optimizer restarts"),
        "seed": (int, 0, "master RNG seed"),
        "output-dir": (str, ".", "directory for CSV + manifest"),
    },
    "sweep": {
        "strategy": (str, "sequential", "parallel or sequential"),
        "p": (int, 2, "channel copies"),
        "r": (int, 3, "ancilla qubits"),
        "l": (int, 14, "ansatz layers"),
        "restarts": (int, 1, "optimizer restarts per pair"),
        "seed": (int, 0, "master RNG seed"),
        "no-warm-start": (bool, False, "disable warm starts along the chain"),
        "output-dir": (str, ".", "directory for CSV + manifest"),
    },
    "diamond": {
        "channel-a": (str, None, "first channel"),
        "channel-b": (str, None, "second channel"),
        "p": (int, 1, "channel copies"),
        "restarts": (int, 20, "maximization restarts"),
        "seed": (int, 0, "master RNG seed"),
        "output-dir": (str, ".", "directory for CSV + manifest"),
    },
    "classify-var": {
        "ansatz": (str, "U2", "U1, U2, or U3"),
        "alpha0": (float, None, "class-0 depolarizing strength"),
        "alpha1": (float, None, "class-1 depolarizing strength"),
        "n-train": (int, 1000, "training set size"),
        "n-test": (int, 1000, "test set size"),
        "restarts": (int, 5, "optimizer restarts"),
        "seed": (int, 0, "master RNG seed"),
        "output-dir": (str, ".", "directory for CSV + manifest"),
    },
    "classify-kernel": {
        "intervals": (str, "i1", "i1..i4 or neg:lo,hi;pos:lo,hi"),
        "input-policy": (str, "plus", "plus or random-mixed"),
        "n-copies": (int, 1, "kernel copy exponent"),
        "n-train": (int, 100, "training set size"),
        "n-test": (int, 1000, "test set size"),
        "C": (float, ksvm.DEFAULT_C, "box constraint"),
        "seed": (int, 0, "master RNG seed"),
        "output-dir": (str, ".", "directory for CSV + manifest"),
    },
    "analyze": {
        "grid": (str, "0.0,0.25,0.5,0.75,1.0", "comma-separated alpha grid"),
        "p": (int, 2, "channel copies for the diamond map"),
        "restarts": (int, 10, "diamond maximization restarts"),
        "seed": (int, 0, "master RNG seed"),
        "output-dir": (str, ".", "directory for CSV + manifest"),
    },
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chandis",
        description="Binary quantum channel discrimination experiments.")
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="subcommand")
    for name, flags in _SUBCOMMANDS.items():
        sp = subs.add_parser(name)
        sp.add_argument("--config", type=str, default=None,
                        help="JSON config file; flags override its values")
        for flag, (ftype, _default, helptext) in flags.items():
            if ftype is bool:
                sp.add_argument(f"--{flag}", action="store_const", const=True,
                                default=None, help=helptext)
            else:
                sp.add_argument(f"--{flag}", type=ftype, default=None,
                                help=helptext)
    return parser


def load_config(path: str, subcommand: str) -> dict:
    """JSON config keyed by flag names; unknown keys are rejected."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError("config file must hold a JSON object")
    allowed = _SUBCOMMANDS[subcommand]
    merged = {}
    for key, value in raw.items():
        if key not in allowed:
            raise ConfigError(f"unknown config key {key!r} for {subcommand}")
        ftype = allowed[key][0]
        try:
            merged[key] = ftype(value) if not isinstance(value, ftype) else value
        except (TypeError, ValueError):
            raise ConfigError(f"config key {key!r}: cannot coerce {value!r}")
    return merged


def _merge(args: argparse.Namespace, subcommand: str) -> dict:
    cfg = {}
    for flag, (_t, default, _h) in _SUBCOMMANDS[subcommand].items():
        cfg[flag] = default
    if args.config is not None:
        cfg.update(load_config(args.config, subcommand))
    for flag in _SUBCOMMANDS[subcommand]:
        val = getattr(args, flag.replace("-", "_"))
        if val is not None:
            cfg[flag] = val
    missing = [k for k, v in cfg.items() if v is None]
    if missing:
        raise ConfigError("missing required flag(s): "
                          + ", ".join(f"--{m}" for m in missing))
    return cfg


def _write_csv(path: str, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _write_manifest(out_dir: str, subcommand: str, cfg: dict,
                    wall_time: float, outputs) -> None:
    checksums = {}
    for name in outputs:
        with open(os.path.join(out_dir, name), "rb") as fh:
            checksums[name] = hashlib.sha256(fh.read()).hexdigest()
    manifest = {"subcommand": subcommand, "config": cfg,
                "version": __version__,
                "wall_time_seconds": round(wall_time, 3),
                "outputs": checksums}
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def _run_discriminate(cfg: dict) -> list:
    phi0 = parse_channel(cfg["channel-a"])
    phi1 = parse_channel(cfg["channel-b"])
    spec = vardisc.StrategySpec(cfg["strategy"], p=cfg["p"], r=cfg["r"],
                                l=cfg["l"], restarts=cfg["restarts"],
                                seed=cfg["seed"])
    report = vardisc.train(phi0, phi1, spec)
    def alpha_or_name(text):
        stripped = text.split(":", 1)[1] if text.startswith("dep:") else text
        try:
            return _fmt(float(stripped))
        except ValueError:
            return text

    a0 = alpha_or_name(cfg["channel-a"])
    a1 = alpha_or_name(cfg["channel-b"])
    rows = [(spec.strategy, spec.p, spec.r, spec.l, a0, a1, i,
             _fmt(entry["value"]), entry["iters"], _fmt(entry["seconds"]))
            for i, entry in enumerate(report.per_restart)]
    _write_csv(os.path.join(cfg["output-dir"], "discriminate.csv"),
               ("strategy", "p", "r", "l", "alpha0", "alpha1", "restart",
                "best_value", "iters", "seconds"), rows)
    print(f"best success probability: {report.best_value:.6f} "
          f"({spec.restarts} restarts, {report.wall_time:.1f}s)")
    return ["discriminate.csv"]


def _run_sweep(cfg: dict) -> list:
    spec = vardisc.StrategySpec(cfg["strategy"], p=cfg["p"], r=cfg["r"],
                                l=cfg["l"], restarts=cfg["restarts"],
                                seed=cfg["seed"])
    results = vardisc.sweep_depolarizing(
        spec, warm_start=not cfg["no-warm-start"])
    rows = []
    for report in results:
        a0, a1 = report.alpha_pair
        for i, entry in enumerate(report.per_restart):
            rows.append((spec.strategy, spec.p, spec.r, spec.l, _fmt(a0),
                         _fmt(a1), i, _fmt(entry["value"]), entry["iters"],
                         _fmt(entry["seconds"])))
        print(f"({a0:.2f}, {a1:.2f}): p_s = {report.best_value:.6f}")
    _write_csv(os.path.join(cfg["output-dir"], "sweep.csv"),
               ("strategy", "p", "r", "l", "alpha0", "alpha1", "restart",
                "best_value", "iters", "seconds"), rows)
    return ["sweep.csv"]


def _run_diamond(cfg: dict) -> list:
    phi0 = parse_channel(cfg["channel-a"])
    phi1 = parse_channel(cfg["channel-b"])
    rng = np.random.default_rng(np.random.SeedSequence([cfg["seed"]]))
    est = dm.diamond_norm(ch_mod.tensor_channels(phi0, cfg["p"]),
                          ch_mod.tensor_channels(phi1, cfg["p"]),
                          restarts=cfg["restarts"], rng=rng)
    p_d = 0.5 + 0.25 * est.value
    spread = max(est.per_restart_values) - min(est.per_restart_values)
    print(f"diamond norm: {est.value:.6f}")
    print(f"choi lower bound: {est.choi_lower_bound:.6f}")
    print(f"p_diamond: {p_d:.6f}")
    print(f"per-restart spread: {spread:.3e}")
    rows = [(i, _fmt(v)) for i, v in enumerate(est.per_restart_values)]
    _write_csv(os.path.join(cfg["output-dir"], "diamond.csv"),
               ("restart", "value"), rows)
    return ["diamond.csv"]


def _run_classify_var(cfg: dict) -> list:
    if cfg["ansatz"] not in vclass.ANSATZE:
        raise ConfigError(f"unknown ansatz {cfg['ansatz']!r}")
    rng = np.random.default_rng(np.random.SeedSequence([cfg["seed"]]))
    summary = vclass.run_cell(cfg["ansatz"], cfg["alpha0"], cfg["alpha1"],
                              n_train=cfg["n-train"], n_test=cfg["n-test"],
                              rng=rng, restarts=cfg["restarts"])
    row = (cfg["ansatz"], _fmt(cfg["alpha0"]), _fmt(cfg["alpha1"]),
           _fmt(summary["train_acc"]), _fmt(summary["test_acc"]),
           _fmt(summary["b"]), _fmt(summary["seconds"]))
    _write_csv(os.path.join(cfg["output-dir"], "classify_var.csv"),
               ("ansatz", "alpha0", "alpha1", "train_acc", "test_acc", "b",
                "seconds"), [row])
    print(f"train accuracy: {summary['train_acc']:.4f}  "
          f"test accuracy: {summary['test_acc']:.4f}")
    return ["classify_var.csv"]


def _parse_intervals(text: str) -> ksvm.IntervalSpec:
    t = text.lower()
    if t in ("i1", "i2", "i3", "i4"):
        return ksvm.intervals_I(int(t[1]))
    neg, pos = [], []
    for part in text.split(";"):
        part = part.strip()
        if ":" not in part:
            raise ConfigError(f"bad interval clause {part!r}")
        label, bounds = part.split(":", 1)
        try:
            lo, hi = (float(b) for b in bounds.split(","))
        except ValueError:
            raise ConfigError(f"bad interval bounds {bounds!r}")
        if label == "neg":
            neg.append((lo, hi, True))
        elif label == "pos":
            pos.append((lo, hi, True))
        else:
            raise ConfigError(f"interval label must be neg or pos, got {label!r}")
    if not neg or not pos:
        raise ConfigError("explicit intervals need at least one neg and one pos")
    return ksvm.IntervalSpec(neg=neg, pos=pos)


def _run_classify_kernel(cfg: dict) -> list:
    spec = _parse_intervals(cfg["intervals"])
    result = ksvm.run_experiment(spec, cfg["input-policy"], cfg["n-copies"],
                                 n_train=cfg["n-train"], n_test=cfg["n-test"],
                                 seed=cfg["seed"], C=cfg["C"])
    rows = [(_fmt(rec["alpha"]), rec["true_label"], _fmt(rec["score"]),
             rec["pred_label"]) for rec in result["records"]]
    rows.append(("summary", "", _fmt(result["accuracy"]), ""))
    _write_csv(os.path.join(cfg["output-dir"], "classify_kernel.csv"),
               ("alpha", "true_label", "score", "pred_label"), rows)
    print(f"test accuracy: {result['accuracy']:.4f}  "
          f"converged: {result['converged']}")
    return ["classify_kernel.csv"]


def _run_analyze(cfg: dict) -> list:
    try:
        grid = [float(a) for a in cfg["grid"].split(",")]
    except ValueError:
        raise ConfigError(f"bad alpha grid {cfg['grid']!r}")
    tmap, dmap = analysis.grid_maps(grid, p=cfg["p"],
                                    restarts=cfg["restarts"],
                                    seed=cfg["seed"])
    header = ("alpha",) + tuple(_fmt(a) for a in grid)
    outputs = []
    for name, mat in (("trace_map.csv", tmap), ("diamond_map.csv", dmap)):
        rows = [(_fmt(a),) + tuple(_fmt(v) for v in mat[i])
                for i, a in enumerate(grid)]
        _write_csv(os.path.join(cfg["output-dir"], name), header, rows)
        outputs.append(name)
    print(f"wrote {len(grid)}x{len(grid)} trace and diamond maps")
    return outputs


_RUNNERS = {
    "discriminate": _run_discriminate,
    "sweep": _run_sweep,
    "diamond": _run_diamond,
    "classify-var": _run_classify_var,
    "classify-kernel": _run_classify_kernel,
    "analyze": _run_analyze,
}


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.subcommand is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        _apply_thread_cap()
        cfg = _merge(args, args.subcommand)
        os.makedirs(cfg["output-dir"], exist_ok=True)
        start = time.perf_counter()
        outputs = _RUNNERS[args.subcommand](cfg)
        _write_manifest(cfg["output-dir"], args.subcommand, cfg,
                        time.perf_counter() - start, outputs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ContractError, ShapeError, ValueError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
