"""Greedy bang-bang schedule search for subsystem entropy minimisation.

At every step each control value is tried for one step of length dt; the
value whose successor state has the lowest B entropy (or highest B purity)
wins, and near-ties go to the largest gamma.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .operators import ModelSpec
from .quantum import (entropy_from_probabilities, imperfect_timekeeping_evolve,
                      purity, von_neumann_entropy)
from .system import ControlledSystem

DEFAULT_GAMMAS = (1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0)

CSV_COLUMNS = ("t", "S_B", "S_A", "S_AB", "I_AB", "P_B", "n_B", "gamma")


@dataclass(frozen=True)
class ControlSet:
    values: tuple[float, ...] = DEFAULT_GAMMAS

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("control set is empty")
        if len(set(vals)) != len(vals):
            raise ValueError(f"control set has duplicates: {vals}")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class GreedyConfig:
    dt: float = 0.1
    n_steps: int = 300
    objective: str = "entropy"
    tie_epsilon: float = 1e-12
    base: str = "nat"
    seed: int = 0
    dt_sigma: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.n_steps < 0:
            raise ValueError("n_steps must be non-negative")
        if self.tie_epsilon < 0:
            raise ValueError("tie_epsilon must be non-negative")
        if self.dt_sigma < 0:
            raise ValueError("dt_sigma must be non-negative")
        if self.objective not in ("entropy", "purity"):
            raise ValueError(f"objective must be 'entropy' or 'purity', got {self.objective!r}")


@dataclass
class ControlPath:
    gammas: list[float]
    dts: list[float]
    spec: ModelSpec
    beta: float | None = None
    config: GreedyConfig | None = None

    @property
    def steps(self) -> list[tuple[float, float]]:
        return list(zip(self.gammas, self.dts))

    def __len__(self):
        return len(self.gammas)


@dataclass
class ExperimentRecord:
    t: np.ndarray
    S_B: np.ndarray
    S_A: np.ndarray
    S_AB: np.ndarray
    I_AB: np.ndarray
    P_B: np.ndarray
    n_B: np.ndarray
    n_A: np.ndarray
    gamma: np.ndarray
    bound: float
    base: str
    objective_values: list[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def final_entropy(self) -> float:
        return float(self.S_B[-1])

    @property
    def difference(self) -> float:
        return self.final_entropy - self.bound

    @property
    def final_n_B(self) -> float:
        return float(self.n_B[-1])

    def rows(self) -> Iterable[tuple[float, ...]]:
        cols = [getattr(self, c) for c in CSV_COLUMNS]
        return zip(*cols)


class _Recorder:
    def __init__(self, system: ControlledSystem, base: str):
        self.system = system
        self.base = base
        self.cols: dict[str, list[float]] = {c: [] for c in CSV_COLUMNS}
        self.cols["n_A"] = []

    def add(self, t: float, rho: np.ndarray, rho_B: np.ndarray, gamma: float) -> None:
        sys = self.system
        s_b = von_neumann_entropy(rho_B, self.base)
        s_a = von_neumann_entropy(sys.reduce(rho, "A"), self.base)
        s_ab = sys.entropy(rho, self.base)
        for key, value in (("t", t), ("S_B", s_b), ("S_A", s_a), ("S_AB", s_ab),
                           ("I_AB", s_a + s_b - s_ab), ("P_B", purity(rho_B)),
                           ("n_B", sys.n_B(rho)), ("n_A", sys.n_A(rho)), ("gamma", gamma)):
            self.cols[key].append(float(value))

    def finish(self, bound: float, objective_values=None) -> ExperimentRecord:
        arr = {k: np.asarray(v) for k, v in self.cols.items()}
        return ExperimentRecord(**arr, bound=bound, base=self.base, objective_values=objective_values or [])


def _objective(rho_B: np.ndarray, kind: str) -> float:
    if kind == "entropy":
        # base-independent ranking; natural log is enough to compare
        return entropy_from_probabilities(np.linalg.eigvalsh(rho_B))
    return -purity(rho_B)


def select(values: Sequence[float], gammas: Sequence[float], tie_epsilon: float) -> int:
    """Index of the smallest objective; candidates within tie_epsilon of it go to the largest gamma."""
    values = np.asarray(values)
    best = values.min()
    tied = np.flatnonzero(values <= best + tie_epsilon)
    return int(max(tied, key=lambda k: (gammas[k], -k)))


def greedy_distill(rho0: np.ndarray, system: ControlledSystem, cset: ControlSet | None = None,
                   cfg: GreedyConfig | None = None, beta: float | None = None
                   ) -> tuple[ControlPath, ExperimentRecord]:
    """Run the one-step-ahead greedy search from ``rho0``.

    With ``cfg.dt_sigma > 0`` every step draws its duration from a Gaussian of
    mean ``cfg.dt``, clipped below at dt/100, using ``cfg.seed``.
    """
    cset = cset or ControlSet()
    cfg = cfg or GreedyConfig()
    if rho0.shape != (system.dim, system.dim):
        raise ValueError("initial state does not match the system dimension")
    gammas = list(cset)
    rng = np.random.default_rng(cfg.seed) if cfg.dt_sigma > 0 else None
    bound = system.bound(rho0, cfg.base).bound_entropy

    rec = _Recorder(system, cfg.base)
    rho = rho0
    rec.add(0.0, rho, system.reduce(rho, "B"), float("nan"))
    path_g, path_dt, objectives = [], [], []
    t = 0.0
    for _ in range(cfg.n_steps):
        if rng is None:
            dt = cfg.dt
        else:
            dt = max(float(rng.normal(cfg.dt, cfg.dt_sigma)), cfg.dt / 100)
        fixed = rng is None
        trials = []
        for g in gammas:
            nxt = system.evolve(rho, g, dt, cache=fixed)
            rb = system.reduce(nxt, "B")
            trials.append((nxt, rb, _objective(rb, cfg.objective)))
        vals = np.array([tr[2] for tr in trials])
        k = select(vals, gammas, cfg.tie_epsilon)
        rho, rho_B = trials[k][0], trials[k][1]
        t += dt
        path_g.append(gammas[k])
        path_dt.append(dt)
        objectives.append(vals)
        rec.add(t, rho, rho_B, gammas[k])
    path = ControlPath(path_g, path_dt, system.spec, beta, cfg)
    return path, rec.finish(bound, objectives)


def greedy_distill_random_dt(rho0, system, cset=None, cfg: GreedyConfig | None = None,
                             dt_mean: float | None = None, dt_sigma: float = 0.0, seed: int = 0,
                             beta: float | None = None):
    cfg = cfg or GreedyConfig()
    cfg = GreedyConfig(dt=dt_mean if dt_mean is not None else cfg.dt, n_steps=cfg.n_steps,
                       objective=cfg.objective, tie_epsilon=cfg.tie_epsilon, base=cfg.base,
                       seed=seed, dt_sigma=dt_sigma)
    return greedy_distill(rho0, system, cset, cfg, beta)


def _check_path(path: ControlPath, system: ControlledSystem) -> None:
    if path.spec != system.spec:
        raise ValueError(f"path was found on {path.spec}, cannot replay on {system.spec}")


def replay_path(rho0: np.ndarray, path: ControlPath, system: ControlledSystem, base="nat") -> ExperimentRecord:
    """Apply a recorded schedule without searching."""
    _check_path(path, system)
    rec = _Recorder(system, base)
    rho, t = rho0, 0.0
    fixed = path.config is None or path.config.dt_sigma == 0
    rec.add(t, rho, system.reduce(rho, "B"), float("nan"))
    for g, dt in path.steps:
        rho = system.evolve(rho, g, dt, cache=fixed)
        t += dt
        rec.add(t, rho, system.reduce(rho, "B"), g)
    return rec.finish(system.bound(rho0, base).bound_entropy)


def replay_with_timekeeping(rho0: np.ndarray, path: ControlPath, system: ControlledSystem, sigma: float,
                            points: int = 51) -> np.ndarray:
    """Final state when every step's duration is Gaussian-smeared with width sigma."""
    _check_path(path, system)
    rho = rho0
    for g, dt in path.steps:
        rho = imperfect_timekeeping_evolve(rho, None, dt, sigma, points, spectrum=system.spectrum(g))
    return rho


def timekeeping_robustness(path: ControlPath, rho0: np.ndarray, system: ControlledSystem,
                           sigmas: Sequence[float], base="nat", points: int = 51) -> list[tuple[float, float]]:
    """Relative error of the final S_B under imperfect timekeeping, one entry per sigma."""
    perfect = replay_path(rho0, path, system, base).final_entropy
    out = []
    for sigma in sigmas:
        if sigma < 0:
            raise ValueError("sigma must be non-negative")
        rho = replay_with_timekeeping(rho0, path, system, sigma, points)
        s = von_neumann_entropy(system.reduce(rho, "B"), base)
        out.append((float(sigma), abs(s - perfect) / abs(perfect) if perfect else abs(s - perfect)))
    return out
