"""Config-driven experiment runs: YAML documents in, CSV series and a JSON summary out."""

from __future__ import annotations

import copy
import csv
import io
import json
import logging
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .greedy import (CSV_COLUMNS, DEFAULT_GAMMAS, ControlSet, GreedyConfig, greedy_distill,
                     replay_path, timekeeping_robustness)
from .operators import ModelSpec
from .quantum import base_label, log_base, von_neumann_entropy
from .system import ControlledSystem

log = logging.getLogger(__name__)

MODES = ("distill", "bound", "replay", "sweep", "timekeeping", "random_dt")
SWEEP_AXES = ("beta", "J", "U")


class ConfigError(ValueError):
    """Malformed experiment configuration; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class NumericalError(RuntimeError):
    def __init__(self, operation: str, cause: Exception):
        self.operation = operation
        super().__init__(f"{operation} failed: {cause}")


@dataclass
class ExperimentConfig:
    name: str
    mode: str
    model: ModelSpec
    beta: float
    controls: ControlSet
    greedy: GreedyConfig
    search_beta: float | None = None
    sweep_axis: str | None = None
    sweep_values: list[float] = field(default_factory=list)
    sigmas: list[float] = field(default_factory=list)
    budget_seconds: float | None = None
    out_dir: str | None = None


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------

def _to_python(node, lines: dict, path: tuple):
    lines.setdefault(path, node.start_mark.line + 1)
    if isinstance(node, yaml.MappingNode):
        out = {}
        for k, v in node.value:
            key = k.value
            if key in out:
                raise ConfigError(f"duplicate key {key!r}", k.start_mark.line + 1)
            lines[path + (key,)] = k.start_mark.line + 1
            out[key] = _to_python(v, lines, path + (key,))
        return out
    if isinstance(node, yaml.SequenceNode):
        return [_to_python(v, lines, path + (i,)) for i, v in enumerate(node.value)]
    return yaml.SafeLoader(io.StringIO("")).construct_object(node, deep=True)


def load_document(text: str) -> tuple[dict, dict]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark else None
        raise ConfigError(exc.problem or str(exc), line) from None
    if node is None or not isinstance(node, yaml.MappingNode):
        raise ConfigError("config must be a mapping", 1)
    lines: dict = {}
    return _to_python(node, lines, ()), lines


class _Reader:
    def __init__(self, doc: dict, lines: dict):
        self.doc = doc
        self.lines = lines

    def line(self, *path) -> int | None:
        while path and path not in self.lines:
            path = path[:-1]
        return self.lines.get(path)

    def get(self, *path, default=..., kind=None):
        cur = self.doc
        for i, key in enumerate(path):
            if isinstance(cur, list) and isinstance(key, int) and 0 <= key < len(cur):
                cur = cur[key]
                continue
            if not isinstance(cur, dict) or key not in cur:
                if default is ...:
                    raise ConfigError(f"missing required key {'.'.join(map(str, path))!r}", self.line(*path[:i]))
                return default
            cur = cur[key]
        if kind is not None and cur is not None:
            try:
                if kind is float and isinstance(cur, str):
                    raise ValueError
                if kind is int and (isinstance(cur, bool) or (isinstance(cur, float) and not cur.is_integer())):
                    raise ValueError
                cur = kind(cur)
            except (TypeError, ValueError):
                raise ConfigError(f"{'.'.join(map(str, path))} must be {kind.__name__}, got {cur!r}",
                                  self.line(*path)) from None
        return cur


def parse_config(doc: dict, lines: dict | None = None, name: str = "experiment") -> ExperimentConfig:
    r = _Reader(doc, lines or {})
    known = {"name", "mode", "model", "beta", "controls", "greedy", "seed", "replay", "sweep",
             "timekeeping", "output", "budget_seconds"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"unknown key {key!r}", r.line(key))
    mode = r.get("mode", kind=str)
    if mode not in MODES:
        raise ConfigError(f"mode must be one of {', '.join(MODES)}, got {mode!r}", r.line("mode"))
    kind = r.get("model", "kind", default="bose_hubbard", kind=str)
    try:
        model = ModelSpec(kind=kind, L=r.get("model", "L", kind=int), l_A=r.get("model", "l_A", kind=int),
                          J=r.get("model", "J", default=1.0, kind=float),
                          U=r.get("model", "U", default=1.0, kind=float),
                          N=r.get("model", "N", default=0, kind=int))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        culprit = next((k for k in ("l_A", "L", "J", "U", "N", "kind") if k in str(exc)), None)
        raise ConfigError(str(exc), r.line("model", culprit) if culprit else r.line("model")) from None
    if model.kind == "bose_hubbard" and "N" not in doc.get("model", {}):
        raise ConfigError("model.N is required for bose_hubbard", r.line("model"))

    controls = r.get("controls", default=list(DEFAULT_GAMMAS))
    try:
        cset = ControlSet(tuple(float(c) for c in controls))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"controls: {exc}", r.line("controls")) from None

    dt = r.get("greedy", "dt", default=0.1, kind=float)
    n_steps = r.get("greedy", "n_steps", default=None, kind=int)
    total = r.get("greedy", "total_time", default=None, kind=float)
    if n_steps is None:
        if total is None:
            raise ConfigError("greedy needs n_steps or total_time", r.line("greedy"))
        n_steps = int(round(total / dt)) if dt > 0 else 0
    base = str(r.get("greedy", "base", default="nat"))
    try:
        log_base(base)
        cfg = GreedyConfig(dt=dt, n_steps=n_steps,
                           objective=r.get("greedy", "objective", default="entropy", kind=str),
                           tie_epsilon=r.get("greedy", "tie_epsilon", default=1e-12, kind=float),
                           base=base_label(base),
                           seed=r.get("seed", default=0, kind=int),
                           dt_sigma=r.get("greedy", "dt_sigma", default=0.0, kind=float))
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), r.line("greedy")) from None

    beta = r.get("beta", kind=float)
    if not beta >= 0:
        raise ConfigError("beta must be non-negative", r.line("beta"))
    cfg_obj = ExperimentConfig(name=str(r.get("name", default=name)), mode=mode, model=model, beta=beta,
                               controls=cset, greedy=cfg,
                               budget_seconds=r.get("budget_seconds", default=None, kind=float),
                               out_dir=r.get("output", "dir", default=None, kind=str))
    if mode == "replay":
        cfg_obj.search_beta = r.get("replay", "search_beta", kind=float)
    if mode == "sweep":
        axis = r.get("sweep", "axis", kind=str)
        if axis not in SWEEP_AXES:
            raise ConfigError(f"sweep.axis must be one of {', '.join(SWEEP_AXES)}", r.line("sweep", "axis"))
        values = r.get("sweep", "values")
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values must be a non-empty list", r.line("sweep", "values"))
        cfg_obj.sweep_axis = axis
        cfg_obj.sweep_values = [r.get("sweep", "values", i, kind=float) for i in range(len(values))]
    if mode == "timekeeping":
        sig = r.get("timekeeping", "sigmas")
        if not isinstance(sig, list) or not sig:
            raise ConfigError("timekeeping.sigmas must be a non-empty list", r.line("timekeeping", "sigmas"))
        cfg_obj.sigmas = [r.get("timekeeping", "sigmas", i, kind=float) for i in range(len(sig))]
        if any(s < 0 for s in cfg_obj.sigmas):
            raise ConfigError("timekeeping sigmas must be non-negative", r.line("timekeeping", "sigmas"))
    if mode == "random_dt" and cfg.dt_sigma <= 0:
        raise ConfigError("random_dt mode needs greedy.dt_sigma > 0", r.line("greedy"))
    return cfg_obj


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    text = Path(path).read_text(encoding="utf-8")
    doc, lines = load_document(text)
    return parse_config(doc, lines, name=Path(path).stem)


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------

def fmt(x: float) -> str:
    return f"{x:.12g}"


def atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def record_csv(rec) -> str:
    return csv_text(CSV_COLUMNS, rec.rows())


def path_csv(path) -> str:
    return csv_text(("step", "gamma", "dt"), ((i + 1, float(g), float(d)) for i, (g, d) in enumerate(path.steps)))


# ---------------------------------------------------------------------------
# running
# ---------------------------------------------------------------------------

@dataclass
class RunResult:
    summary: dict
    files: dict[str, str]


def _summary(rec, cfg: ExperimentConfig, steps: int, **extra) -> dict:
    out = {
        "final_entropy": rec.final_entropy,
        "bound": rec.bound,
        "difference": rec.difference,
        "final_n_B": rec.final_n_B if np.isfinite(rec.final_n_B) else None,
        "total_time_steps": steps,
        "delta_t": cfg.greedy.dt,
        "objective": cfg.greedy.objective,
        "log_base": cfg.greedy.base,
    }
    out.update(extra)
    return out


def _guard(operation: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except (np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        raise NumericalError(operation, exc) from exc


def _distill(cfg: ExperimentConfig, model: ModelSpec | None = None, beta: float | None = None):
    system = ControlledSystem(model or cfg.model)
    b = cfg.beta if beta is None else beta
    rho0 = _guard("thermal_state", system.thermal, b)
    path, rec = _guard("greedy_distill", greedy_distill, rho0, system, cfg.controls, cfg.greedy, b)
    return system, rho0, path, rec


def _run_distill(cfg):
    _, _, path, rec = _distill(cfg)
    return _summary(rec, cfg, len(path)), {"timeseries.csv": record_csv(rec), "path.csv": path_csv(path)}


def _run_bound(cfg):
    system = ControlledSystem(cfg.model)
    rho0 = _guard("thermal_state", system.thermal, cfg.beta)
    rep = _guard("lower_bound", system.bound, rho0, cfg.greedy.base)
    s_b = von_neumann_entropy(system.reduce(rho0, "B"), cfg.greedy.base)
    n_b = system.n_B(rho0)
    summary = {
        "final_entropy": s_b, "bound": rep.bound_entropy, "difference": s_b - rep.bound_entropy,
        "final_n_B": n_b if np.isfinite(n_b) else None, "total_time_steps": 0,
        "delta_t": cfg.greedy.dt, "objective": cfg.greedy.objective, "log_base": cfg.greedy.base,
        "entropy_AB": von_neumann_entropy(rho0, cfg.greedy.base),
        "optimal_n_B": rep.optimal_nB if np.isfinite(rep.optimal_nB) else None,
    }
    q_rows = ((k, j, float(v)) for k, qs in enumerate(rep.q_values) for j, v in enumerate(qs))
    return summary, {"q_values.csv": csv_text(("sector", "b", "q"), q_rows)}


def _run_replay(cfg):
    system, _, path, search = _distill(cfg, beta=cfg.search_beta)
    rho = _guard("thermal_state", system.thermal, cfg.beta)
    rec = _guard("replay_path", replay_path, rho, path, system, cfg.greedy.base)
    summary = _summary(rec, cfg, len(path), search_beta=cfg.search_beta,
                       search_final_entropy=search.final_entropy, search_bound=search.bound)
    return summary, {"timeseries.csv": record_csv(rec), "search_timeseries.csv": record_csv(search),
                     "path.csv": path_csv(path)}


def _sweep_point(cfg: ExperimentConfig, value: float):
    model, beta = cfg.model, cfg.beta
    if cfg.sweep_axis == "beta":
        beta = value
    else:
        model = replace(model, **{cfg.sweep_axis: value})
    _, _, _, rec = _distill(cfg, model, beta)
    return (value, float(rec.S_B[0]), rec.final_entropy, rec.bound, rec.difference,
            float(rec.n_B[0]), rec.final_n_B)


def _run_sweep(cfg, threads: int = 1):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda v: _sweep_point(cfg, v), cfg.sweep_values))
    else:
        rows = [_sweep_point(cfg, v) for v in cfg.sweep_values]
    header = (cfg.sweep_axis, "initial_S_B", "final_S_B", "bound", "difference", "initial_n_B", "final_n_B")
    cols = list(zip(*rows))
    summary = {
        "final_entropy": list(cols[2]), "bound": list(cols[3]), "difference": list(cols[4]),
        "final_n_B": [v if np.isfinite(v) else None for v in cols[6]],
        "total_time_steps": cfg.greedy.n_steps, "delta_t": cfg.greedy.dt,
        "objective": cfg.greedy.objective, "log_base": cfg.greedy.base,
        "sweep_axis": cfg.sweep_axis, "sweep_values": cfg.sweep_values,
    }
    return summary, {"sweep.csv": csv_text(header, rows)}


def _run_timekeeping(cfg):
    system, rho0, path, rec = _distill(cfg)
    table = _guard("timekeeping_robustness", timekeeping_robustness, path, rho0, system, cfg.sigmas,
                   cfg.greedy.base)
    summary = _summary(rec, cfg, len(path), timekeeping={fmt(s): e for s, e in table})
    return summary, {"timeseries.csv": record_csv(rec), "path.csv": path_csv(path),
                     "timekeeping.csv": csv_text(("sigma", "relative_error"), table)}


def run(cfg: ExperimentConfig, out_dir: str | os.PathLike | None = None, seed: int | None = None,
        base: str | None = None, threads: int = 1) -> RunResult:
    """Execute one experiment and write its files atomically into ``out_dir``."""
    if seed is not None or base is not None:
        g = cfg.greedy
        cfg = replace(cfg, greedy=replace(g, seed=g.seed if seed is None else seed,
                                          base=g.base if base is None else base_label(base)))
    start = time.perf_counter()
    log.info("running %s (%s)", cfg.name, cfg.mode)
    if cfg.mode in ("distill", "random_dt"):
        summary, files = _run_distill(cfg)
    elif cfg.mode == "bound":
        summary, files = _run_bound(cfg)
    elif cfg.mode == "replay":
        summary, files = _run_replay(cfg)
    elif cfg.mode == "sweep":
        summary, files = _run_sweep(cfg, threads)
    else:
        summary, files = _run_timekeeping(cfg)
    summary = {"name": cfg.name, "mode": cfg.mode, **summary,
               "wall_seconds": time.perf_counter() - start}
    files["summary.json"] = json.dumps(summary, indent=2, default=float) + "\n"
    target = out_dir if out_dir is not None else cfg.out_dir
    if target is not None:
        for fname, text in files.items():
            atomic_write(Path(target) / fname, text)
    return RunResult(summary, files)


def config_from_dict(doc: dict, name: str = "experiment") -> ExperimentConfig:
    return parse_config(copy.deepcopy(doc), None, name)


def dump_config(doc: dict) -> str:
    return yaml.safe_dump(doc, sort_keys=False)
