"""Experiment orchestration: sweeps, persistence, analysis, oracle checks.

Subcommands
-----------
run          sweep (L, alpha, gamma) cells from a YAML config, write CSV/JSON
norms        boundary-norm scaling series with fitted exponents, as CSV
analyze      crossing / bkt / powerlaw / cft fits over result files
oracle-check Gaussian-vs-dense equivalence report for a small chain

Exit codes: 0 success, 2 config/usage error, 3 partial failure (some sweep
cells failed; completed cells are still written).  Outputs are byte-stable:
rows are sorted, floats go through repr-style %.17g, and no wall-clock data
is recorded.  A run can be interrupted and resumed (--resume) because every
trajectory lands in a checkpoint file keyed by (cell, trajectory_id).
"""

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import dataclass, field
from itertools import product
from pathlib import Path

import numpy as np
import yaml
from joblib import Parallel, delayed

from . import __version__
from .model import LatticeSpec, build_hopping_matrix
from .trajectory import (
    ObservablePlan,
    TrajectoryConfig,
    run_trajectory,
)
from . import bounds
from . import scaling as sc
from . import observables as obs
from . import oracle


class ConfigError(Exception):
    pass


def fmt(x) -> str:
    """Floats with 17 significant digits: lossless, diff-friendly."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


# ----------------------------------------------------------------- config --

@dataclass(frozen=True)
class SweepCell:
    L: int
    alpha: float
    gamma: float
    index: int

    def key(self) -> list:
        return [self.L, self.alpha, self.gamma]


@dataclass
class ExperimentConfig:
    """Parsed and validated sweep configuration plus its identity hash."""

    raw: dict
    seed: int
    sizes: list
    alphas: list
    gammas: list
    n_traj: int
    dt_sample: float
    t_burn: float = None
    t_burn_per_site: float = None
    t_sample: float = None
    t_sample_per_site: float = None
    method: str = "eigh"
    workers: int = 1
    out_dir: str = "results"
    observables: dict = field(default_factory=dict)
    save_jump_records: bool = False
    config_hash: str = ""

    def cells(self) -> list:
        combos = sorted(product(self.sizes, self.alphas, self.gammas))
        return [SweepCell(L=int(L), alpha=float(a), gamma=float(g), index=i)
                for i, (L, a, g) in enumerate(combos)]

    def trajectory_config(self, cell: SweepCell) -> TrajectoryConfig:
        t_burn = (self.t_burn if self.t_burn is not None
                  else self.t_burn_per_site * cell.L)
        t_sample = (self.t_sample if self.t_sample is not None
                    else self.t_sample_per_site * cell.L)
        return TrajectoryConfig(
            spec=LatticeSpec(L=cell.L, alpha=cell.alpha),
            gamma=cell.gamma, t_burn=t_burn, t_sample=t_sample,
            dt_sample=self.dt_sample, seed=self.seed, n_traj=self.n_traj)

    def plan_for(self, L: int) -> ObservablePlan:
        o = self.observables
        ells = ()
        window = o.get("profile_window")
        if window:
            lo, hi = window
            ells = tuple(range(int(np.ceil(lo * L)), int(hi * L) + 1))
        return ObservablePlan(
            s_half=o.get("s_half", True),
            profile_ells=ells,
            mi_quarters=o.get("mi_quarters", L % 8 == 0) and L % 8 == 0,
            mi_far=o.get("mi_far", True))


def _hash_config(raw: dict) -> str:
    canon = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    raw = yaml.safe_load(path.read_text())
    if not isinstance(raw, dict):
        raise ConfigError("config must be a YAML mapping")
    try:
        if "seed" not in raw:
            raise ConfigError("config must set an explicit seed "
                              "(no wall-clock default)")
        model = raw["model"]
        traj = raw["trajectory"]
        cfg = ExperimentConfig(
            raw=raw,
            seed=int(raw["seed"]),
            sizes=[int(x) for x in model["L"]],
            alphas=[float(x) for x in model["alpha"]],
            gammas=[float(x) for x in model["gamma"]],
            n_traj=int(traj["n_traj"]),
            dt_sample=float(traj["dt_sample"]),
            t_burn=(float(traj["t_burn"]) if "t_burn" in traj else None),
            t_burn_per_site=(float(traj["t_burn_per_site"])
                             if "t_burn_per_site" in traj else None),
            t_sample=(float(traj["t_sample"]) if "t_sample" in traj else None),
            t_sample_per_site=(float(traj["t_sample_per_site"])
                               if "t_sample_per_site" in traj else None),
            method=raw.get("method", "eigh"),
            workers=int(raw.get("workers", 1)),
            out_dir=raw.get("out_dir", "results"),
            observables=raw.get("observables", {}),
            save_jump_records=bool(raw.get("save_jump_records", False)),
            config_hash=_hash_config(raw),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc!r}") from exc
    if not cfg.sizes or not cfg.alphas or not cfg.gammas:
        raise ConfigError("model.L, model.alpha and model.gamma must be "
                          "nonempty lists")
    if (cfg.t_burn is None) == (cfg.t_burn_per_site is None):
        raise ConfigError("set exactly one of trajectory.t_burn / "
                          "trajectory.t_burn_per_site")
    if (cfg.t_sample is None) == (cfg.t_sample_per_site is None):
        raise ConfigError("set exactly one of trajectory.t_sample / "
                          "trajectory.t_sample_per_site")
    if cfg.method not in ("eigh", "rank1"):
        raise ConfigError(f"method must be 'eigh' or 'rank1', got {cfg.method}")
    if cfg.n_traj < 2:
        raise ConfigError("trajectory.n_traj must be at least 2")
    return cfg


# -------------------------------------------------------------------- run --

def _traj_task(cfg: ExperimentConfig, cell: SweepCell, tid: int):
    """One (cell, trajectory) work item; exceptions become error markers so a
    failing cell does not abort the sweep."""
    try:
        tc = cfg.trajectory_config(cell)
        plan = cfg.plan_for(cell.L)
        h = build_hopping_matrix(tc.spec)
        res = run_trajectory(tc, h, tid, plan, cfg.method,
                             cell_key=(cell.index,))
        means = {}
        for name, val in res.time_means().items():
            if name == "profile":
                for k, ell in enumerate(plan.profile_ells):
                    means[f"S_ell_{ell}"] = float(val[k])
            else:
                means[name] = float(val)
        entry = {
            "cell": cell.key(), "trajectory_id": tid, "means": means,
            "n_jumps": res.n_jumps,
            "trace_dev": res.max_trace_dev, "orth_dev": res.max_orth_dev,
            "config_hash": cfg.config_hash,
        }
        if cfg.save_jump_records:
            entry["events"] = [[t, s] for t, s in res.record.events]
        return entry
    except Exception as exc:  # noqa: BLE001 - marker consumed by the writer
        return {"cell": cell.key(), "trajectory_id": tid, "error": repr(exc)}


def _load_checkpoint(path: Path, config_hash: str) -> dict:
    """Completed trajectories of a previous run of the SAME config; entries
    from a different config are ignored rather than silently mixed in."""
    done = {}
    if path.exists():
        with path.open() as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                if entry.get("config_hash") != config_hash:
                    continue
                key = (tuple(entry["cell"]), entry["trajectory_id"])
                done[key] = entry
    return done


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    if args.workers:
        cfg.workers = args.workers
    if args.out:
        cfg.out_dir = args.out
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ckpt_path = out / "checkpoint.jsonl"
    done = _load_checkpoint(ckpt_path, cfg.config_hash) if args.resume else {}
    if not args.resume and ckpt_path.exists():
        ckpt_path.unlink()

    cells = cfg.cells()
    tasks = [(cell, tid) for cell in cells for tid in range(cfg.n_traj)
             if (tuple(cell.key()), tid) not in done]
    if tasks:
        with ckpt_path.open("a") as ckpt:
            if cfg.workers > 1:
                stream = Parallel(n_jobs=cfg.workers,
                                  return_as="generator")(
                    delayed(_traj_task)(cfg, cell, tid) for cell, tid in tasks)
            else:
                stream = (_traj_task(cfg, cell, tid) for cell, tid in tasks)
            for entry in stream:
                ckpt.write(json.dumps(entry, sort_keys=True) + "\n")
                ckpt.flush()
                done[(tuple(entry["cell"]), entry["trajectory_id"])] = entry

    result_set = ResultSet.build(cfg, cells, done)
    result_set.write(out)
    if result_set.failures:
        print(f"{len(result_set.failures)} sweep cell(s) failed: "
              f"{result_set.failures}", file=sys.stderr)
        return 3
    return 0


@dataclass
class ResultSet:
    """Aggregated sweep estimates plus provenance.

    Every emitted row carries the config hash that produced it; the metadata
    records the code version and the seed-derivation scheme, which together
    with the raw config pin every per-trajectory stream.
    """

    config_hash: str
    code_version: str
    raw_config: dict
    cells: list
    agg_rows: list     # (L, alpha, gamma, observable, mean, stderr, n)
    traj_rows: list    # (L, alpha, gamma, trajectory_id, observable, value)
    record_lines: list
    failures: list
    save_jump_records: bool = False

    @classmethod
    def build(cls, cfg: ExperimentConfig, cells, done: dict) -> "ResultSet":
        failures, agg_rows, traj_rows, record_lines = [], [], [], []
        for cell in cells:
            entries = [done[(tuple(cell.key()), tid)]
                       for tid in range(cfg.n_traj)
                       if (tuple(cell.key()), tid) in done]
            if len(entries) < cfg.n_traj or any("error" in e for e in entries):
                failures.append(tuple(cell.key()))
                continue
            entries.sort(key=lambda e: e["trajectory_id"])
            names = sorted(entries[0]["means"])
            for name in names:
                vals = np.array([e["means"][name] for e in entries])
                agg_rows.append((cell.L, cell.alpha, cell.gamma, name,
                                 vals.mean(),
                                 vals.std(ddof=1) / np.sqrt(len(vals)),
                                 len(vals)))
                for e in entries:
                    traj_rows.append((cell.L, cell.alpha, cell.gamma,
                                      e["trajectory_id"], name,
                                      e["means"][name]))
            for extra in ("n_jumps", "trace_dev", "orth_dev"):
                vals = np.array([float(e[extra]) for e in entries])
                agg_rows.append((cell.L, cell.alpha, cell.gamma, extra,
                                 vals.mean(),
                                 vals.std(ddof=1) / np.sqrt(len(vals)),
                                 len(vals)))
            if cfg.save_jump_records:
                for e in entries:
                    record_lines.append(json.dumps(
                        {"cell": e["cell"],
                         "trajectory_id": e["trajectory_id"],
                         "seed": cfg.seed, "events": e["events"]},
                        sort_keys=True))
        return cls(config_hash=cfg.config_hash, code_version=__version__,
                   raw_config=cfg.raw, cells=[c.key() for c in cells],
                   agg_rows=agg_rows, traj_rows=traj_rows,
                   record_lines=record_lines, failures=failures,
                   save_jump_records=cfg.save_jump_records)

    def write(self, out: Path):
        with (out / "results.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["L", "alpha", "gamma", "observable", "mean",
                             "stderr", "n_traj", "config_hash"])
            for L, alpha, gamma, name, mean, err, n in sorted(
                    self.agg_rows, key=lambda r: (r[0], r[1], r[2], r[3])):
                writer.writerow([L, fmt(alpha), fmt(gamma), name, fmt(mean),
                                 fmt(err), n, self.config_hash])
        with (out / "trajectories.csv").open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["L", "alpha", "gamma", "trajectory_id",
                             "observable", "value", "config_hash"])
            for L, alpha, gamma, tid, name, val in sorted(
                    self.traj_rows,
                    key=lambda r: (r[0], r[1], r[2], r[4], r[3])):
                writer.writerow([L, fmt(alpha), fmt(gamma), tid, name,
                                 fmt(val), self.config_hash])
        if self.save_jump_records:
            (out / "jump_records.jsonl").write_text(
                "".join(line + "\n" for line in sorted(self.record_lines)))
        meta = {
            "config": self.raw_config,
            "config_hash": self.config_hash,
            "code_version": self.code_version,
            "seed_scheme": "SeedSequence(entropy=seed, "
                           "spawn_key=(cell_index, trajectory_id))",
            "cells": self.cells,
            "failures": [list(f) for f in self.failures],
        }
        (out / "run_meta.json").write_text(
            json.dumps(meta, sort_keys=True, indent=1) + "\n")


# ------------------------------------------------------------------ norms --

def cmd_norms(args) -> int:
    try:
        alphas = [float(x) for x in args.alpha.split(",") if x]
        sizes = [int(x) for x in args.sizes.split(",") if x]
        if not alphas or not sizes:
            raise ValueError("empty list")
    except ValueError as exc:
        print(f"config error: bad --alpha/--sizes: {exc}", file=sys.stderr)
        return 2
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    fits = {}
    for alpha in sorted(alphas):
        series = bounds.norm_scaling_series(alpha, sizes)
        for L, norm in zip(series.sizes, series.norms):
            rows.append((alpha, int(L), norm, series.classification))
        entry = {"classification": series.classification,
                 "tail_ratio": series.tail_ratio}
        if series.power is not None:
            entry["power"] = {"a": series.power.a, "mu": series.power.mu,
                              "b": series.power.b,
                              "residual": series.power.residual}
        if series.log is not None:
            entry["log"] = {"p": series.log.p, "q": series.log.q,
                            "residual": series.log.residual}
        fits[fmt(alpha)] = entry
    with (out / "norms.csv").open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["alpha", "L", "norm", "classification"])
        for alpha, L, norm, cls in rows:
            writer.writerow([fmt(alpha), L, fmt(norm), cls])
    (out / "norms_fits.json").write_text(
        json.dumps(fits, sort_keys=True, indent=1) + "\n")
    return 0


# ---------------------------------------------------------------- analyze --

def _read_results(paths) -> list:
    rows = []
    for path in paths:
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                rows.append(row)
    return rows


def _curve_family(rows, observable: str, alpha: float = None) -> sc.CurveFamily:
    data = {}
    for row in rows:
        if row["observable"] != observable:
            continue
        if alpha is not None and abs(float(row["alpha"]) - alpha) > 1e-12:
            continue
        key = int(row["L"])
        data.setdefault(key, []).append(
            (float(row["gamma"]), float(row["mean"]), float(row["stderr"])))
    curves = []
    for L, pts in sorted(data.items()):
        pts.sort()
        curves.append(sc.Curve(
            L=L, gammas=np.array([p[0] for p in pts]),
            values=np.array([p[1] for p in pts]),
            stderr=np.array([p[2] for p in pts])))
    return sc.CurveFamily(curves=curves)


def _traj_matrix(paths, observable: str, L: int, alpha: float):
    """(gammas, matrix[trajectory, gamma]) read back from trajectories.csv."""
    cells = {}
    for path in paths:
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                if row["observable"] != observable:
                    continue
                if int(row["L"]) != L:
                    continue
                if abs(float(row["alpha"]) - alpha) > 1e-12:
                    continue
                cells.setdefault(float(row["gamma"]), {})[
                    int(row["trajectory_id"])] = float(row["value"])
    gammas = sorted(cells)
    if not gammas:
        raise ConfigError(f"no trajectory rows for {observable} at "
                          f"L={L}, alpha={alpha}")
    tids = sorted(cells[gammas[0]])
    mat = np.array([[cells[g][t] for g in gammas] for t in tids])
    return np.array(gammas), mat


def cmd_analyze(args) -> int:
    paths = args.results
    if not paths:
        print("usage error: no result files given", file=sys.stderr)
        return 2
    try:
        rows = _read_results(paths)
        if not rows:
            raise ConfigError("result files contain no rows")
        report = {"mode": args.mode, "inputs": [str(p) for p in paths]}
        alpha = args.alpha
        if alpha is None:
            seen = sorted({float(r["alpha"]) for r in rows})
            if len(seen) == 1:
                alpha = seen[0]
            elif args.mode != "cft":
                raise ConfigError(f"results mix alphas {seen}; pass --alpha")
        if args.mode == "crossing":
            fam = _curve_family(rows, args.observable, alpha)
            sizes = fam.sizes()
            if len(sizes) < 2:
                raise ConfigError("crossing needs two sizes")
            L1, L2 = (args.pair if args.pair else sizes[-2:])
            res = sc.detect_crossing(fam, L1, L2)
            report["pair"] = [L1, L2]
            report["crossing"] = (None if res is None else
                                  {"gamma": res.gamma,
                                   "ambiguous": res.ambiguous})
            if args.trajectories and res is not None:
                g1, m1 = _traj_matrix(args.trajectories, args.observable,
                                      L1, alpha)
                g2, m2 = _traj_matrix(args.trajectories, args.observable,
                                      L2, alpha)
                boot = sc.crossing_bootstrap(g1, m1, m2,
                                             n_boot=args.n_boot,
                                             seed=args.boot_seed)
                report["bootstrap"] = {
                    "fraction_crossed": boot.fraction_crossed,
                    "ci_low": boot.ci_low, "ci_high": boot.ci_high,
                    "n_boot": boot.n_boot}
        elif args.mode == "bkt":
            fam = _curve_family(rows, args.observable, alpha)
            fit = sc.bkt_collapse_fit(fam)
            report["fit"] = {"gamma_c": fit.gamma_c, "nu": fit.nu,
                             "residual": fit.residual, "flags": fit.flags}
        elif args.mode == "powerlaw":
            fam = _curve_family(rows, args.observable, alpha)
            fit = sc.power_law_collapse_fit(fam)
            report["fit"] = {"gamma_p": fit.gamma_c, "nu": fit.nu,
                             "beta": fit.extra["beta"],
                             "residual": fit.residual, "flags": fit.flags}
        elif args.mode == "cft":
            profile = _profile_from_rows(rows, args.L, alpha, args.gamma)
            window = tuple(args.window) if args.window else None
            c_eff, const, r2 = obs.cft_fit(profile, window)
            report["fit"] = {"c_eff": c_eff, "const": const,
                             "r_squared": r2,
                             "window": list(window) if window else
                             list(obs.default_fit_window(profile.L))}
        else:
            raise ConfigError(f"unknown mode {args.mode}")
    except (ConfigError, KeyError, ValueError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, sort_keys=True, indent=1)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return 0


def _profile_from_rows(rows, L, alpha, gamma) -> obs.EntanglementProfile:
    ells, values, errs = [], [], []
    for row in rows:
        name = row["observable"]
        if not name.startswith("S_ell_"):
            continue
        if L is not None and int(row["L"]) != L:
            continue
        if alpha is not None and abs(float(row["alpha"]) - alpha) > 1e-12:
            continue
        if gamma is not None and abs(float(row["gamma"]) - gamma) > 1e-12:
            continue
        ells.append(int(name.removeprefix("S_ell_")))
        values.append(float(row["mean"]))
        errs.append(float(row["stderr"]))
    if not ells:
        raise ConfigError("no profile rows matched the given cell")
    sizes = {int(r["L"]) for r in rows if r["observable"].startswith("S_ell_")
             and (L is None or int(r["L"]) == L)}
    if len(sizes) != 1:
        raise ConfigError(f"profile cell ambiguous over sizes {sorted(sizes)}; "
                          "pass --L")
    order = np.argsort(ells)
    return obs.EntanglementProfile(
        L=sizes.pop(), ells=np.array(ells)[order],
        values=np.array(values)[order], stderr=np.array(errs)[order])


# ----------------------------------------------------------- oracle-check --

def cmd_oracle_check(args) -> int:
    if args.L > 8:
        print("config error: oracle check is limited to L <= 8",
              file=sys.stderr)
        return 2
    spec = LatticeSpec(L=args.L, alpha=args.alpha)
    cfg = TrajectoryConfig(spec=spec, gamma=args.gamma, t_burn=0.0,
                           t_sample=args.t_sample, dt_sample=0.5,
                           seed=args.seed, n_traj=2)
    plan = ObservablePlan(
        s_half=True,
        profile_ells=tuple(range(1, spec.L // 2 + 1)),
        mi_quarters=spec.L % 8 == 0, mi_far=True, correlations=True)
    res = run_trajectory(cfg, trajectory_id=0, plan=plan, method=args.method)
    if args.corrupt:
        res.series["corr"][len(res.series["corr"]) // 2] += 1e-5
    _, dense_series = oracle.dense_trajectory_replay(res.record, cfg, plan)
    devs = {}
    for name, vals in res.series.items():
        devs[name] = float(np.abs(np.asarray(vals)
                                  - np.asarray(dense_series[name])).max())
    passed = all(v < args.tol for v in devs.values())
    report = {
        "L": spec.L, "alpha": spec.alpha, "gamma": cfg.gamma,
        "seed": cfg.seed, "method": args.method, "n_jumps": res.n_jumps,
        "tolerance": args.tol,
        "max_deviations": devs,
        "max_trace_dev": res.max_trace_dev,
        "max_orth_dev": res.max_orth_dev,
        "passed": bool(passed),
    }
    text = json.dumps(report, sort_keys=True, indent=1)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "oracle_check.json").write_text(text + "\n")
    print(text)
    return 0 if passed else 1


# ------------------------------------------------------------------- main --

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lrmipt",
        description="Monitored long-range fermion chains: sweeps and analysis")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a sweep from a YAML config")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--workers", type=int, default=0,
                       help="override config worker count")
    p_run.add_argument("--out", default=None, help="override output directory")
    p_run.add_argument("--resume", action="store_true",
                       help="reuse completed trajectories from the checkpoint")
    p_run.set_defaults(func=cmd_run)

    p_norms = sub.add_parser("norms", help="boundary-norm scaling series")
    p_norms.add_argument("--alpha", required=True,
                         help="comma-separated decay exponents")
    p_norms.add_argument("--sizes", required=True,
                         help="comma-separated chain sizes")
    p_norms.add_argument("--out", default="results")
    p_norms.set_defaults(func=cmd_norms)

    p_an = sub.add_parser("analyze", help="fit reports over result CSVs")
    p_an.add_argument("--mode", required=True,
                      choices=["crossing", "bkt", "powerlaw", "cft"])
    p_an.add_argument("--results", nargs="*", default=[])
    p_an.add_argument("--trajectories", nargs="*", default=[],
                      help="trajectories.csv files for the crossing bootstrap")
    p_an.add_argument("--observable", default="mi_quarters")
    p_an.add_argument("--alpha", type=float, default=None)
    p_an.add_argument("--gamma", type=float, default=None)
    p_an.add_argument("--L", type=int, default=None)
    p_an.add_argument("--pair", type=int, nargs=2, default=None)
    p_an.add_argument("--window", type=int, nargs=2, default=None)
    p_an.add_argument("--n-boot", type=int, default=1000)
    p_an.add_argument("--boot-seed", type=int, default=0)
    p_an.add_argument("--out", default=None)
    p_an.set_defaults(func=cmd_analyze)

    p_oc = sub.add_parser("oracle-check",
                          help="Gaussian vs dense equivalence report")
    p_oc.add_argument("--L", type=int, default=6)
    p_oc.add_argument("--alpha", type=float, default=1.5)
    p_oc.add_argument("--gamma", type=float, default=1.0)
    p_oc.add_argument("--t-sample", type=float, default=30.0)
    p_oc.add_argument("--seed", type=int, default=7)
    p_oc.add_argument("--method", choices=["eigh", "rank1"], default="eigh")
    p_oc.add_argument("--tol", type=float, default=1e-8)
    p_oc.add_argument("--corrupt", action="store_true",
                      help="test hook: perturb the engine output, the check "
                           "must then fail")
    p_oc.add_argument("--out", default=None)
    p_oc.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
