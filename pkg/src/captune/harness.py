"""Experiment runner: config files in, deterministic CSV results out.

Executes policy x workload x constraint x start x repetition matrices against
the simulator, derives power caps from achievable-power percentiles and
starting configurations from latency bands, runs the single-axis sweeps, and
aggregates result rows for plotting.  Result CSV bodies are byte-identical
across reruns with the same master seed; wall-clock decision overhead goes to
a separate timings file so it cannot break that.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .controller import (
    BoPolicy,
    OfflinePolicy,
    OraclePolicy,
    Policy,
    PolicyKind,
    RaplLikePolicy,
    ScopeNoOperatorPolicy,
    ScopePolicy,
    StageOptPolicy,
    StaticPolicy,
)
from .metrics import summarize_run
from .model import Dataset, GaussianProcess, GridKernel, ModelKind, ModelParams
from .sim import (
    SurfaceTable,
    WorkloadSpec,
    default_space,
    default_suite,
    oracle_configuration,
    profile_workload,
    run_experiment,
    scenario_generator,
    static_seconds_grid,
    workload_from_dict,
)
from .space import ConfigSpace, Configuration, ParamSpec, build_grid

__all__ = [
    "SCHEMA_VERSION",
    "RESULT_COLUMNS",
    "PolicySettings",
    "ExperimentConfig",
    "ResultRow",
    "load_config",
    "default_config",
    "percentile_value",
    "derive_constraints",
    "derive_start_configs",
    "run_matrix",
    "sweep",
    "read_result_rows",
    "aggregate_rows",
    "write_aggregate_csv",
    "best_intervals",
]

log = logging.getLogger("captune.harness")

SCHEMA_VERSION = "1"

RESULT_COLUMNS = [
    "schema_version", "policy", "workload", "percentile", "constraint_watts",
    "start_id", "gamma", "model", "stage1_len", "offline_fraction",
    "interval_sec", "rep", "run_seed", "speedup", "violation_rate",
    "violation_magnitude", "poc", "coverage", "avm", "run_length_sec",
]

TIMING_COLUMNS = [
    "policy", "workload", "percentile", "start_id", "interval_sec", "rep",
    "mean_decision_sec", "n_decisions",
]

METRIC_COLUMNS = [
    "speedup", "violation_rate", "violation_magnitude",
    "poc", "coverage", "avm", "run_length_sec",
]

DYNAMIC_POLICIES = ("offline", "rapl-like", "bo", "stageopt", "scope-no", "scope")


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolicySettings:
    """Tunable parameters of one policy entry in the experiment config."""

    gamma: float = 1.0
    model: str = "gaussian-process"
    length_scale: float = 0.5
    noise_var: float = 1e-4
    stage1_fraction: float = 0.25
    beta: float = 2.0
    offline_fraction: float = 0.5

    def model_params(self) -> ModelParams:
        return ModelParams(length_scale=self.length_scale, noise_var=self.noise_var)


@dataclass
class ExperimentConfig:
    space: ConfigSpace
    workloads: list[WorkloadSpec]
    policies: list[str] = field(default_factory=lambda: [
        "static", "offline", "rapl-like", "bo", "stageopt",
        "scope-no", "scope", "oracle",
    ])
    settings: dict[str, PolicySettings] = field(default_factory=dict)
    constraint_percentiles: list[float] = field(
        default_factory=lambda: [40.0, 50.0, 60.0, 70.0, 80.0])
    start_rule: str | list[int] = "fast-slow"
    starts_per_band: int = 5
    interval_sec: int = 20
    measurements_per_interval: int = 0  # 0 means one per second of the interval
    repetitions: int = 1
    master_seed: int = 2024
    output_dir: Path = Path("results")
    trace_mode: str = "none"  # none | first | all
    gamma_sweep: list[float] = field(default_factory=lambda: [0.0, 0.5, 1.0, 1.5, 2.0, 4.0])
    interval_sweep: list[int] = field(default_factory=lambda: [5, 10, 20, 30])
    model_sweep: list[str] = field(default_factory=lambda: ["gaussian-process", "linear"])
    offline_fraction_sweep: list[float] = field(default_factory=lambda: [0.25, 0.5, 0.75, 1.0])

    def __post_init__(self) -> None:
        for p in self.constraint_percentiles:
            if not 0 < p < 100:
                raise ValueError("constraint percentiles must lie in (0, 100)")
        if not self.constraint_percentiles:
            raise ValueError("at least one constraint percentile is required")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        unknown = set(self.policies) - {k.value for k in PolicyKind}
        if unknown:
            raise ValueError(f"unknown policies: {sorted(unknown)}")
        if self.trace_mode not in ("none", "first", "all"):
            raise ValueError("trace_mode must be none, first, or all")

    def policy_settings(self, kind: str) -> PolicySettings:
        return self.settings.get(kind, PolicySettings())

    def n_measurements(self) -> int:
        return self.measurements_per_interval or self.interval_sec


def default_config(**overrides) -> ExperimentConfig:
    """Paper-shaped default: canonical grid, twelve-workload suite."""
    space = overrides.pop("space", None) or default_space()
    workloads = overrides.pop("workloads", None) or default_suite(space)
    return ExperimentConfig(space=space, workloads=workloads, **overrides)


def _space_from_config(section: dict | None) -> ConfigSpace:
    if not section or "params" not in section:
        return default_space()
    specs = []
    for entry in section["params"]:
        name = entry["name"]
        if "values" in entry:
            specs.append(ParamSpec(name, tuple(float(v) for v in entry["values"])))
        else:
            specs.append(ParamSpec.linspace(
                name, float(entry["min"]), float(entry["max"]), int(entry["steps"])))
    return build_grid(specs)


def _workloads_from_config(section: dict | None, space: ConfigSpace,
                           master_seed: int) -> list[WorkloadSpec]:
    if not section:
        return default_suite(space)
    if "explicit" in section:
        return [workload_from_dict(d) for d in section["explicit"]]
    if "scenario" in section:
        seed = int(section.get("scenario_seed", master_seed))
        margin = float(section.get("margin", 0.25))
        out = scenario_generator(section["scenario"], seed, space, margin=margin)
        return list(out) if isinstance(out, tuple) else [out]
    suite_seed = int(section.get("suite_seed", 2024))
    return default_suite(space, master_seed=suite_seed)


def load_config(path: str | Path) -> ExperimentConfig:
    """Parse a TOML experiment file into a fully resolved configuration."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    master_seed = int(doc.get("master_seed", 2024))
    space = _space_from_config(doc.get("space"))
    workloads = _workloads_from_config(doc.get("workloads"), space, master_seed)
    run = doc.get("run", {})
    settings = {
        kind: PolicySettings(**vals) for kind, vals in doc.get("policy", {}).items()
    }
    sweeps = doc.get("sweeps", {})
    kwargs = {}
    if "policies" in run:
        kwargs["policies"] = list(run["policies"])
    if "constraint_percentiles" in run:
        kwargs["constraint_percentiles"] = [float(p) for p in run["constraint_percentiles"]]
    if "start_ids" in run:
        kwargs["start_rule"] = [int(i) for i in run["start_ids"]]
    if "starts_per_band" in run:
        kwargs["starts_per_band"] = int(run["starts_per_band"])
    if "interval_sec" in run:
        kwargs["interval_sec"] = int(run["interval_sec"])
    if "measurements_per_interval" in run:
        kwargs["measurements_per_interval"] = int(run["measurements_per_interval"])
    if "repetitions" in run:
        kwargs["repetitions"] = int(run["repetitions"])
    if "trace_mode" in run:
        kwargs["trace_mode"] = str(run["trace_mode"])
    if "gamma" in sweeps:
        kwargs["gamma_sweep"] = [float(v) for v in sweeps["gamma"]]
    if "interval" in sweeps:
        kwargs["interval_sweep"] = [int(v) for v in sweeps["interval"]]
    if "model" in sweeps:
        kwargs["model_sweep"] = [str(v) for v in sweeps["model"]]
    if "offline_fraction" in sweeps:
        kwargs["offline_fraction_sweep"] = [float(v) for v in sweeps["offline_fraction"]]
    return ExperimentConfig(
        space=space,
        workloads=workloads,
        settings=settings,
        master_seed=master_seed,
        output_dir=Path(doc.get("output_dir", "results")),
        **kwargs,
    )


# ---------------------------------------------------------------------------
# constraint and start derivation
# ---------------------------------------------------------------------------


def percentile_value(values: Sequence[float], p: float) -> float:
    """Nearest-rank percentile: smallest element with at least p% of the data
    at or below it (p=0 gives the minimum, p=100 the maximum)."""
    arr = np.sort(np.asarray(values, dtype=float))
    n = arr.shape[0]
    if n == 0:
        raise ValueError("empty sample")
    k = min(max(int(math.ceil(p / 100.0 * n)), 1), n)
    return float(arr[k - 1])


def derive_constraints(
    space: ConfigSpace,
    w: WorkloadSpec,
    percentiles: Sequence[float],
    surfaces: SurfaceTable | None = None,
) -> list[float]:
    """Power caps at the requested percentiles of the distribution of true
    worst-case (max over phases) power across the grid."""
    surfaces = surfaces or SurfaceTable(w, space)
    return [percentile_value(surfaces.max_power, p) for p in percentiles]


def derive_start_configs(
    space: ConfigSpace,
    w: WorkloadSpec,
    P: float,
    rule: str | Sequence[int],
    seed: int,
    per_band: int = 5,
    surfaces: SurfaceTable | None = None,
) -> list[Configuration]:
    """Safe starting configurations: fast (below the p35 latency band) and
    slow (above p65), sampled with the given seed; or explicit grid ids."""
    if not isinstance(rule, str):
        return [space.config(int(i)) for i in rule]
    if rule != "fast-slow":
        raise ValueError(f"unknown start rule {rule!r}")
    surfaces = surfaces or SurfaceTable(w, space)
    safe_ids = np.nonzero(surfaces.max_power < P)[0]
    if safe_ids.size == 0:
        raise ValueError(f"no safe configuration under P={P}")
    latencies = static_seconds_grid(w, surfaces)[safe_ids]
    p35 = percentile_value(latencies, 35)
    p65 = percentile_value(latencies, 65)
    order = np.argsort(latencies, kind="stable")
    fast_band = safe_ids[latencies < p35]
    slow_band = safe_ids[latencies > p65]
    if fast_band.size == 0:
        # Heavy latency ties can empty the strict band; fall back to rank order.
        fast_band = safe_ids[order[:per_band]]
        log.warning("fast band empty for %s at P=%.1f; using lowest-latency configs",
                    w.name, P)
    if slow_band.size == 0:
        slow_band = safe_ids[order[-per_band:]]
        log.warning("slow band empty for %s at P=%.1f; using highest-latency configs",
                    w.name, P)
    rng = np.random.default_rng(seed)

    def pick(band: np.ndarray) -> list[int]:
        band = np.sort(band)
        if band.size <= per_band:
            if band.size < per_band:
                log.warning("only %d of %d starts available for %s at P=%.1f",
                            band.size, per_band, w.name, P)
            return [int(i) for i in band]
        return sorted(int(i) for i in rng.choice(band, size=per_band, replace=False))

    return [space.config(i) for i in pick(fast_band) + pick(slow_band)]


# ---------------------------------------------------------------------------
# matrix execution
# ---------------------------------------------------------------------------


def stable_seed(*parts) -> int:
    """Platform-stable 63-bit seed from a composite key."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


@dataclass(frozen=True)
class RowTask:
    policy: str
    workload: str
    percentile: float
    constraint_watts: float
    start_id: int
    rep: int
    run_seed: int
    interval_sec: int
    n_measurements: int
    settings: PolicySettings
    trace_path: str | None = None


@dataclass(frozen=True)
class ResultRow:
    policy: str
    workload: str
    percentile: float
    constraint_watts: float
    start_id: int
    gamma: float | None
    model: str | None
    stage1_len: int | None
    offline_fraction: float | None
    interval_sec: int
    rep: int
    run_seed: int
    speedup: float
    violation_rate: float
    violation_magnitude: float
    poc: float | None
    coverage: float | None
    avm: float | None
    run_length_sec: int
    mean_decision_sec: float
    n_decisions: int

    def csv_values(self) -> list[str]:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, float):
                return "" if math.isnan(v) else repr(v)
            return str(v)

        return [
            SCHEMA_VERSION, self.policy, self.workload, fmt(self.percentile),
            fmt(self.constraint_watts), str(self.start_id), fmt(self.gamma),
            self.model or "", fmt(self.stage1_len), fmt(self.offline_fraction),
            str(self.interval_sec), str(self.rep), str(self.run_seed),
            fmt(self.speedup), fmt(self.violation_rate),
            fmt(self.violation_magnitude), fmt(self.poc), fmt(self.coverage),
            fmt(self.avm), str(self.run_length_sec),
        ]

    def timing_values(self) -> list[str]:
        return [
            self.policy, self.workload, repr(self.percentile), str(self.start_id),
            str(self.interval_sec), str(self.rep),
            repr(self.mean_decision_sec), str(self.n_decisions),
        ]


class MatrixContext:
    """Shared per-process caches: surfaces, kernels, oracle/offline choices."""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.space = cfg.space
        self.workloads = {w.name: w for w in cfg.workloads}
        self.surfaces = {w.name: SurfaceTable(w, cfg.space) for w in cfg.workloads}
        self._kern: dict[float, GridKernel] = {}
        self._static: dict[str, np.ndarray] = {}
        self._oracle: dict[tuple[str, float], Configuration] = {}
        self._offline: dict[tuple[str, float, int], tuple[np.ndarray, np.ndarray]] = {}

    def kern(self, length_scale: float) -> GridKernel:
        if length_scale not in self._kern:
            self._kern[length_scale] = GridKernel(self.space.norm_grid, length_scale)
        return self._kern[length_scale]

    def static_seconds(self, workload: str) -> np.ndarray:
        if workload not in self._static:
            self._static[workload] = static_seconds_grid(
                self.workloads[workload], self.surfaces[workload])
        return self._static[workload]

    def oracle(self, workload: str, P: float) -> Configuration:
        key = (workload, P)
        if key not in self._oracle:
            self._oracle[key] = oracle_configuration(
                self.workloads[workload], self.space, P, self.surfaces[workload])
        return self._oracle[key]

    def offline_predictions(self, workload: str, fraction: float, rep: int,
                            settings: PolicySettings):
        key = (workload, fraction, rep)
        if key not in self._offline:
            w = self.workloads[workload]
            seed = stable_seed(self.cfg.master_seed, "profile", workload, fraction, rep)
            prof = profile_workload(w, self.space, fraction, seed,
                                    self.surfaces[workload])
            params = settings.model_params()
            kern = self.kern(params.length_scale)
            X = self.space.norm_grid[prof.ids]
            gram = kern.block(prof.ids, prof.ids)
            f_y = GaussianProcess(Dataset(X, prof.power), params, gram=gram)
            f_z = GaussianProcess(Dataset(X, prof.work_rate), params, gram=gram)
            all_ids = np.arange(len(self.space))
            cross = kern.block(all_ids, prof.ids)
            mu_y, _ = f_y.predict_gram(cross)
            mu_z, _ = f_z.predict_gram(cross)
            self._offline[key] = (mu_y, mu_z)
        return self._offline[key]

    def make_policy(self, task: RowTask) -> tuple[Policy, int | None]:
        """Build the policy for one run; returns (policy, stage1_len or None)."""
        s = task.settings
        kind = task.policy
        params = s.model_params()
        use_gp = ModelKind(s.model) is ModelKind.GAUSSIAN_PROCESS
        kern = self.kern(params.length_scale) if use_gp else None
        if kind == "static":
            return StaticPolicy(), None
        if kind == "scope":
            return ScopePolicy(s.gamma, s.model, params, kern=kern), None
        if kind == "scope-no":
            return ScopeNoOperatorPolicy(s.model, params, kern=kern), None
        if kind == "stageopt":
            est_sec = int(self.static_seconds(task.workload)[task.start_id])
            est_intervals = max(int(math.ceil(est_sec / task.interval_sec)), 1)
            stage1 = max(int(round(s.stage1_fraction * est_intervals)), 1)
            return StageOptPolicy(stage1, s.beta, s.model, params, kern=kern), stage1
        if kind == "bo":
            gp_kern = self.kern(params.length_scale)
            return BoPolicy(params, kern=gp_kern), None
        if kind == "rapl-like":
            return RaplLikePolicy(), None
        if kind == "oracle":
            return OraclePolicy(self.oracle(task.workload, task.constraint_watts)), None
        if kind == "offline":
            mu_y, mu_z = self.offline_predictions(
                task.workload, s.offline_fraction, task.rep, s)
            return OfflinePolicy(mu_y, mu_z), None
        raise ValueError(f"unknown policy kind {kind!r}")

    def run_task(self, task: RowTask) -> ResultRow:
        w = self.workloads[task.workload]
        surf = self.surfaces[task.workload]
        x0 = self.space.config(task.start_id)
        policy, stage1 = self.make_policy(task)
        trace = run_experiment(
            policy, w, self.space, task.constraint_watts, task.interval_sec,
            task.n_measurements, x0, task.run_seed, surfaces=surf,
        )
        if task.trace_path:
            Path(task.trace_path).parent.mkdir(parents=True, exist_ok=True)
            trace.write_csv(task.trace_path)
        l_static = int(self.static_seconds(task.workload)[task.start_id])
        report = summarize_run(trace, w, self.space, task.constraint_watts,
                               l_static, surfaces=surf)
        s = task.settings
        is_scope = task.policy in ("scope", "scope-no")
        uses_model = task.policy in ("scope", "scope-no", "stageopt", "bo", "offline")
        n_dec = len(trace.decision_seconds)
        return ResultRow(
            policy=task.policy,
            workload=task.workload,
            percentile=task.percentile,
            constraint_watts=task.constraint_watts,
            start_id=task.start_id,
            gamma=(s.gamma if task.policy == "scope" else
                   (math.inf if task.policy == "scope-no" else None)),
            model=(s.model if uses_model else None),
            stage1_len=stage1,
            offline_fraction=(s.offline_fraction if task.policy == "offline" else None),
            interval_sec=task.interval_sec,
            rep=task.rep,
            run_seed=task.run_seed,
            speedup=report.speedup,
            violation_rate=report.violation_rate,
            violation_magnitude=report.violation_magnitude,
            poc=report.poc if is_scope else None,
            coverage=report.coverage if is_scope else None,
            avm=report.avm if is_scope else None,
            run_length_sec=report.run_length_sec,
            mean_decision_sec=(sum(trace.decision_seconds) / n_dec if n_dec else 0.0),
            n_decisions=n_dec,
        )


_WORKER_CTX: MatrixContext | None = None


def _worker_init(cfg: ExperimentConfig) -> None:
    global _WORKER_CTX
    _WORKER_CTX = MatrixContext(cfg)


def _worker_run(task: RowTask) -> ResultRow:
    assert _WORKER_CTX is not None
    return _WORKER_CTX.run_task(task)


def build_tasks(
    cfg: ExperimentConfig,
    ctx: MatrixContext,
    policies: Sequence[str] | None = None,
    settings_override: dict[str, PolicySettings] | None = None,
    interval_sec: int | None = None,
) -> list[RowTask]:
    """Enumerate the run matrix in deterministic order."""
    policies = list(policies if policies is not None else cfg.policies)
    interval = interval_sec if interval_sec is not None else cfg.interval_sec
    n_meas = cfg.measurements_per_interval or interval
    tasks: list[RowTask] = []
    mid_pct = cfg.constraint_percentiles[len(cfg.constraint_percentiles) // 2]
    for policy in policies:
        settings = (settings_override or {}).get(policy, cfg.policy_settings(policy))
        for w in cfg.workloads:
            caps = derive_constraints(cfg.space, w, cfg.constraint_percentiles,
                                      ctx.surfaces[w.name])
            for pct, P in zip(cfg.constraint_percentiles, caps):
                starts = derive_start_configs(
                    cfg.space, w, P, cfg.start_rule,
                    stable_seed(cfg.master_seed, "starts", w.name, pct),
                    cfg.starts_per_band, ctx.surfaces[w.name],
                )
                for si, x0 in enumerate(starts):
                    for rep in range(cfg.repetitions):
                        run_seed = stable_seed(
                            cfg.master_seed, w.name, pct, x0.id, rep)
                        trace_path = None
                        if cfg.trace_mode == "all" or (
                            cfg.trace_mode == "first"
                            and rep == 0 and si == 0 and pct == mid_pct
                        ):
                            trace_path = str(
                                cfg.output_dir / "traces" /
                                f"{policy}_{w.name}_p{pct:g}_s{x0.id}_r{rep}"
                                f"_i{interval}.csv")
                        tasks.append(RowTask(
                            policy=policy,
                            workload=w.name,
                            percentile=pct,
                            constraint_watts=P,
                            start_id=x0.id,
                            rep=rep,
                            run_seed=run_seed,
                            interval_sec=interval,
                            n_measurements=n_meas,
                            settings=settings,
                            trace_path=trace_path,
                        ))
    return tasks


def execute_tasks(
    cfg: ExperimentConfig,
    ctx: MatrixContext,
    tasks: Sequence[RowTask],
    out_name: str,
    jobs: int = 1,
) -> list[ResultRow]:
    """Run tasks (optionally on a process pool) and stream CSVs in task order."""
    out_dir = cfg.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    rows: list[ResultRow] = []
    results_path = out_dir / out_name
    timings_path = out_dir / f"timings_{out_name}"
    with open(results_path, "w", newline="") as rf, \
            open(timings_path, "w", newline="") as tf:
        rw = csv.writer(rf, lineterminator="\r\n")
        tw = csv.writer(tf, lineterminator="\r\n")
        rw.writerow(RESULT_COLUMNS)
        tw.writerow(TIMING_COLUMNS)
        if jobs > 1:
            with ProcessPoolExecutor(
                max_workers=jobs, initializer=_worker_init, initargs=(cfg,)
            ) as pool:
                for row in pool.map(_worker_run, tasks, chunksize=8):
                    rows.append(row)
                    rw.writerow(row.csv_values())
                    tw.writerow(row.timing_values())
        else:
            for task in tasks:
                row = ctx.run_task(task)
                rows.append(row)
                rw.writerow(row.csv_values())
                tw.writerow(row.timing_values())
    log.info("wrote %d rows to %s", len(rows), results_path)
    return rows


def _write_manifest(cfg: ExperimentConfig, name: str, extra: dict | None = None) -> None:
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "master_seed": cfg.master_seed,
        "policies": cfg.policies,
        "policy_settings": {k: vars(v) for k, v in sorted(cfg.settings.items())},
        "default_policy_settings": vars(PolicySettings()),
        "constraint_percentiles": cfg.constraint_percentiles,
        "starts_per_band": cfg.starts_per_band,
        "interval_sec": cfg.interval_sec,
        "repetitions": cfg.repetitions,
        "workloads": [
            {"name": w.name, "seed": w.seed, "phases": len(w.phases)}
            for w in cfg.workloads
        ],
        "space": [
            {"name": p.name, "levels": len(p.values)} for p in cfg.space.params
        ],
        "grid_points": len(cfg.space),
    }
    if extra:
        manifest.update(extra)
    with open(cfg.output_dir / name, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_matrix(cfg: ExperimentConfig, jobs: int = 1) -> list[ResultRow]:
    """Execute the full default matrix and write results.csv / timings."""
    ctx = MatrixContext(cfg)
    tasks = build_tasks(cfg, ctx)
    _write_manifest(cfg, "manifest.json")
    return execute_tasks(cfg, ctx, tasks, "results.csv", jobs=jobs)


def sweep(kind: str, cfg: ExperimentConfig, jobs: int = 1) -> list[ResultRow]:
    """Vary one axis, holding everything else at the config defaults."""
    ctx = MatrixContext(cfg)
    tasks: list[RowTask] = []
    if kind == "gamma":
        base = cfg.policy_settings("scope")
        for g in cfg.gamma_sweep:
            tasks += build_tasks(cfg, ctx, policies=["scope"],
                                 settings_override={"scope": replace(base, gamma=g)})
    elif kind == "interval":
        policies = [p for p in cfg.policies if p in DYNAMIC_POLICIES]
        for iv in cfg.interval_sweep:
            tasks += build_tasks(cfg, ctx, policies=policies, interval_sec=iv)
    elif kind == "model":
        base = cfg.policy_settings("scope")
        for m in cfg.model_sweep:
            tasks += build_tasks(cfg, ctx, policies=["scope"],
                                 settings_override={"scope": replace(base, model=m)})
    elif kind == "offline-fraction":
        base = cfg.policy_settings("offline")
        for f in cfg.offline_fraction_sweep:
            tasks += build_tasks(
                cfg, ctx, policies=["offline"],
                settings_override={"offline": replace(base, offline_fraction=f)})
    else:
        raise ValueError(f"unknown sweep kind {kind!r}")
    _write_manifest(cfg, f"manifest_sweep_{kind}.json", {"sweep": kind})
    return execute_tasks(cfg, ctx, tasks, f"sweep_{kind}.csv", jobs=jobs)


# ---------------------------------------------------------------------------
# aggregation (the report-data interface)
# ---------------------------------------------------------------------------


def read_result_rows(path: str | Path) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def aggregate_rows(rows: Sequence[dict[str, str]], group_by: Sequence[str]) -> list[dict]:
    """Group result rows and average each metric.

    Magnitude-style metrics additionally get a nonzero-only mean, since a 0
    records "no violation" rather than a zero-magnitude violation.  Groups
    keep first-occurrence order; means are computed in row order.
    """
    for key in group_by:
        if rows and key not in rows[0]:
            raise KeyError(f"unknown group-by column {key!r}")
    groups: dict[tuple, list[dict]] = {}
    for row in rows:
        groups.setdefault(tuple(row[k] for k in group_by), []).append(row)
    out = []
    for key, members in groups.items():
        agg: dict[str, object] = dict(zip(group_by, key))
        agg["n_runs"] = len(members)
        for col in METRIC_COLUMNS:
            vals = [float(r[col]) for r in members if r.get(col, "") != ""]
            agg[f"mean_{col}"] = float(np.mean(vals)) if vals else ""
        for col in ("violation_magnitude", "avm"):
            vals = [float(r[col]) for r in members
                    if r.get(col, "") != "" and float(r[col]) > 0.0]
            agg[f"mean_{col}_nonzero"] = float(np.mean(vals)) if vals else ""
        out.append(agg)
    return out


def write_aggregate_csv(aggregates: Sequence[dict], group_by: Sequence[str],
                        out) -> None:
    cols = list(group_by) + ["n_runs"] + [f"mean_{c}" for c in METRIC_COLUMNS] + [
        "mean_violation_magnitude_nonzero", "mean_avm_nonzero"]
    writer = csv.writer(out, lineterminator="\r\n")
    writer.writerow(cols)
    for agg in aggregates:
        writer.writerow([
            repr(v) if isinstance(v, float) else str(v) for v in
            (agg[c] for c in cols)
        ])


def best_intervals(rows: Sequence[dict[str, str]]) -> dict[str, int]:
    """Per policy, the interval with the lowest mean violation rate (ties go
    to the shorter interval).  Pure post-processing over result rows."""
    byp: dict[str, dict[int, list[float]]] = {}
    for r in rows:
        byp.setdefault(r["policy"], {}).setdefault(
            int(r["interval_sec"]), []).append(float(r["violation_rate"]))
    return {
        policy: min(ivs, key=lambda iv: (float(np.mean(ivs[iv])), iv))
        for policy, ivs in byp.items()
    }
