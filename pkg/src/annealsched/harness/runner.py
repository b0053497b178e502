from __future__ import annotations

import csv
import hashlib
import io
import logging
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from itertools import groupby
from pathlib import Path
from typing import Iterable, Sequence

from ..dynamics import EvalCounter, EvolutionConfig, ScheduleEvaluator
from ..optimizers import (
    ConvergenceRule,
    linear_baseline,
    mcts_optimize,
    multistart_bfgs,
)
from ..problems import (
    CnfInstance,
    CutGraph,
    ProblemError,
    generate_hard_sat,
    maxcut_hamiltonian,
    parse_dimacs,
    parse_graph,
    sample_cubic_graph,
    sat_hamiltonian,
)
from ..schedule import ActionGrid
from .config import ConfigError, ExperimentConfig, GeneratorSpec, OptimizerSettings

log = logging.getLogger(__name__)

RESULT_COLUMNS = ("instance_id", "method", "M", "T", "fidelity", "energy", "n_fev",
                  "termination", "wall_time_s", "seed")
SUMMARY_COLUMNS = ("method", "M", "T", "mean_fidelity", "std_fidelity", "mean_nfev", "count")


class InstanceError(ConfigError):
    pass


@dataclass(frozen=True)
class Instance:
    instance_id: str
    kind: str
    problem: CnfInstance | CutGraph

    def hamiltonian(self):
        if self.kind == "sat3":
            return sat_hamiltonian(self.problem)
        return maxcut_hamiltonian(self.problem)


@dataclass
class ResultRow:
    instance_id: str
    method: str
    M: int
    T: float
    fidelity: float
    energy: float
    n_fev: int
    termination: str
    wall_time_s: float
    seed: int

    @property
    def failed(self) -> bool:
        return self.termination == "failed"


@dataclass
class SummaryRow:
    method: str
    M: int
    T: float
    mean_fidelity: float
    std_fidelity: float
    mean_nfev: float
    count: int


def detect_kind(path) -> str:
    return "sat3" if Path(path).suffix.lower() in (".cnf", ".dimacs") else "maxcut"


def read_instance(path, kind: str | None = None) -> Instance:
    path = Path(path)
    kind = kind or detect_kind(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InstanceError(f"cannot read instance file {path}: {exc}") from None
    try:
        problem = parse_dimacs(text) if kind == "sat3" else parse_graph(text)
    except ProblemError as exc:
        raise InstanceError(f"{path}: {exc}") from None
    return Instance(path.stem, kind, problem)


def load_instances(cfg: ExperimentConfig) -> list[Instance]:
    """Read or generate every instance up front, so bad inputs fail before any run."""
    out = []
    for src in cfg.instance_sources:
        if isinstance(src, GeneratorSpec):
            for seed in src.seeds():
                if cfg.problem_kind == "sat3":
                    problem = generate_hard_sat(src.n, seed)
                else:
                    problem = sample_cubic_graph(src.n, seed)
                out.append(Instance(f"{cfg.problem_kind}-n{src.n}-s{seed}", cfg.problem_kind,
                                    problem))
        else:
            out.append(read_instance(src, cfg.problem_kind))
    ids = [inst.instance_id for inst in out]
    dupes = sorted({i for i in ids if ids.count(i) > 1})
    if dupes:
        raise InstanceError(f"duplicate instance ids: {dupes}")
    return out


def task_seed(master_seed: int, instance_id: str, method: str, M: int, T: float) -> int:
    """Seed that depends only on the master seed and the task coordinates."""
    key = f"{master_seed}|{instance_id}|{method}|{M}|{float(T)!r}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:4], "little")


def optimize(method: str, evaluator, M: int, settings: OptimizerSettings, seed: int):
    if method == "linear":
        return linear_baseline(evaluator)
    if method == "bfgs":
        return multistart_bfgs(evaluator, M, num_starts=settings.num_starts,
                               noise_scale=settings.noise_scale, seed=seed,
                               fd_step=settings.fd_step, gtol=settings.gtol,
                               max_fev=settings.bfgs_max_fev)
    if method == "mcts":
        grid = ActionGrid(settings.grid_size, settings.grid_lo, settings.grid_hi)
        rule = ConvergenceRule(settings.target_fidelity, settings.stall_window,
                               settings.stall_tolerance)
        return mcts_optimize(evaluator, M, grid, settings.mcts_budget, rule, seed=seed,
                             exploration=settings.uct_constant)
    raise ValueError(f"unknown method {method!r}")


def run_task(instance: Instance, method: str, M: int, T: float, seed: int,
             settings: OptimizerSettings, evolution: EvolutionConfig) -> ResultRow:
    """One (instance, method, M, T) cell; exceptions become a failed row."""
    start = time.perf_counter()
    try:
        counter = EvalCounter()
        evaluator = ScheduleEvaluator(instance.hamiltonian(), T, evolution, counter=counter)
        res = optimize(method, evaluator, M, settings, seed)
        if res.n_fev != counter.count:
            raise RuntimeError(f"optimizer reported {res.n_fev} evaluations, "
                               f"counter saw {counter.count}")
        return ResultRow(instance.instance_id, method, M, float(T), res.best_fidelity,
                         res.best_energy, res.n_fev, str(res.termination),
                         time.perf_counter() - start, seed)
    except Exception:
        log.exception("task failed: %s %s M=%s T=%s", instance.instance_id, method, M, T)
        return ResultRow(instance.instance_id, method, M, float(T), math.nan, math.nan, 0,
                         "failed", time.perf_counter() - start, seed)


def _run_packed(args):
    return run_task(*args)


def run_experiment(cfg: ExperimentConfig, threads: int | None = None) -> list[ResultRow]:
    """One row per (instance, method, M, T), in sorted order regardless of scheduling."""
    instances = load_instances(cfg)
    evolution = EvolutionConfig(dt=cfg.dt, driver_sign=cfg.driver_sign)
    jobs = []
    for inst in sorted(instances, key=lambda i: i.instance_id):
        for method in sorted(cfg.methods):
            for M in sorted(cfg.M_values):
                for T in sorted(cfg.T_grid):
                    seed = task_seed(cfg.master_seed, inst.instance_id, method, M, T)
                    jobs.append((inst, method, M, T, seed, cfg.optimizer, evolution))
    workers = threads or cfg.threads
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_packed, jobs))
    else:
        rows = []
        for k, job in enumerate(jobs, 1):
            rows.append(run_task(*job))
            log.info("[%d/%d] %s %s M=%d T=%g fidelity=%.4f n_fev=%d", k, len(jobs),
                     job[0].instance_id, job[1], job[2], job[3], rows[-1].fidelity,
                     rows[-1].n_fev)
    return rows


# -- aggregation and CSV -----------------------------------------------------


def aggregate(rows: Iterable[ResultRow]) -> list[SummaryRow]:
    """Mean, population std of fidelity and mean n_fev per (method, M, T); failed rows dropped."""
    good = sorted((r for r in rows if not r.failed), key=lambda r: (r.method, r.M, r.T))
    out = []
    for (method, M, T), group in groupby(good, key=lambda r: (r.method, r.M, r.T)):
        group = list(group)
        fids = [r.fidelity for r in group]
        out.append(SummaryRow(method, M, T, statistics.fmean(fids), statistics.pstdev(fids),
                              statistics.fmean(r.n_fev for r in group), len(group)))
    return out


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_csv(columns, records, handle) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow(_fmt(v) for v in astuple(rec))


def format_results_csv(rows: Sequence[ResultRow]) -> str:
    buf = io.StringIO()
    _write_csv(RESULT_COLUMNS, rows, buf)
    return buf.getvalue()


def write_results_csv(rows: Sequence[ResultRow], path) -> None:
    Path(path).write_text(format_results_csv(rows))


def write_summary_csv(summary: Sequence[SummaryRow], path) -> None:
    buf = io.StringIO()
    _write_csv(SUMMARY_COLUMNS, summary, buf)
    Path(path).write_text(buf.getvalue())


def read_results_csv(path) -> list[ResultRow]:
    types = {f.name: f.type for f in fields(ResultRow)}
    conv = {"int": int, "float": float, "str": str}
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RESULT_COLUMNS:
            raise ValueError(f"{path}: unexpected results header {reader.fieldnames}")
        for rec in reader:
            rows.append(ResultRow(**{k: conv[types[k]](v) for k, v in rec.items()}))
    return rows


def write_outputs(cfg: ExperimentConfig, rows: Sequence[ResultRow], outdir=None) -> Path:
    """Write results.csv, summary.csv and the fully-defaulted config.json."""
    outdir = Path(outdir) if outdir is not None else cfg.output_dir()
    outdir.mkdir(parents=True, exist_ok=True)
    write_results_csv(rows, outdir / "results.csv")
    write_summary_csv(aggregate(rows), outdir / "summary.csv")
    (outdir / "config.json").write_text(cfg.to_json())
    return outdir
