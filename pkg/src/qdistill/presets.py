"""Built-in experiment configurations.

Every preset reports entropies in bits. Step lengths that are free
parameters of an experiment are fixed here and noted next to each entry.
"""

from __future__ import annotations

import copy

from .experiments import ExperimentConfig, config_from_dict

BH_CONTROLS = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.0]
ISING_CONTROLS = [1.0, 0.5, 0.3, 0.2, 0.1, 0.0]


def _bh(name, mode, L, N, l_A, beta, dt, total, budget, objective="entropy", **extra):
    doc = {
        "name": name, "mode": mode,
        "model": {"kind": "bose_hubbard", "L": L, "N": N, "l_A": l_A, "J": 1.0, "U": 1.0},
        "beta": beta, "controls": list(BH_CONTROLS),
        "greedy": {"dt": dt, "total_time": total, "objective": objective, "base": "2"},
        "seed": 0, "budget_seconds": budget,
    }
    doc.update(extra)
    return doc


def _ising(name, L, dt, total, budget, mode="distill", **extra):
    doc = {
        "name": name, "mode": mode,
        "model": {"kind": "ising", "L": L, "l_A": 1, "J": 1.0},
        "beta": 1.0, "controls": list(ISING_CONTROLS),
        "greedy": {"dt": dt, "total_time": total, "base": "2"},
        "seed": 0, "budget_seconds": budget,
    }
    doc.update(extra)
    return doc


_PRESETS: dict[str, dict] = {}


def _add(doc):
    _PRESETS[doc["name"]] = doc


# convergence rows table1_{N}_{L}: l_A = 1, beta = 1; dt picked per row
_add(_bh("table1_1_3", "distill", 3, 1, 1, 1.0, 0.3, 20, 120))
_add(_bh("table1_2_3", "distill", 3, 2, 1, 1.0, 0.1, 100, 120))
_add(_bh("table1_3_3", "distill", 3, 3, 1, 1.0, 1.55, 30, 120))  # best step found for T = 30
_add(_bh("table1_2_4", "distill", 4, 2, 1, 1.0, 0.1, 30, 120))
_add(_bh("table1_3_4", "distill", 4, 3, 1, 1.0, 0.1, 50, 120))
_add(_bh("table1_4_4", "distill", 4, 4, 1, 1.0, 0.1, 40, 120))

# single-site subsystem, L = 4, N = 2
_add(_bh("fig2a", "distill", 4, 2, 1, 1.0, 0.1, 30, 60))
_add(_bh("fig2b", "sweep", 4, 2, 1, 1.0, 0.1, 30, 300,
         sweep={"axis": "beta", "values": [round(0.2 * k, 10) for k in range(1, 26)]}))
_add(_bh("fig2c", "replay", 4, 2, 1, 5.0, 0.1, 30, 60, replay={"search_beta": 1.0}))
_add(_bh("fig2d", "sweep", 4, 2, 1, 1.0, 0.1, 30, 60, sweep={"axis": "beta", "values": [1.0, 2.0, 5.0]}))
_add(_bh("fig2e", "distill", 4, 2, 1, 1.0, 0.1, 30, 60))

# two-site subsystem
_add(_bh("fig3a", "distill", 5, 2, 2, 2.0, 0.6, 200, 120))
_add(_bh("fig3b", "distill", 6, 3, 2, 2.0, 0.5, 200, 300))
_add(_bh("fig3c", "replay", 5, 2, 2, 1.0, 0.6, 200, 120, replay={"search_beta": 2.0}))
_add(_bh("fig3d", "replay", 6, 3, 2, 1.0, 0.5, 200, 300, replay={"search_beta": 2.0}))

# transverse-field Ising chains, one-qubit subsystem; dt is the best of a coarse
# scan over {0.1, 0.2, 0.3, 0.5, 1.0} at the given total time
_add(_ising("ising_table_s2_4", 4, 0.2, 30, 60))
_add(_ising("ising_table_s2_5", 5, 0.2, 500, 120))
_add(_ising("ising_table_s2_6", 6, 0.2, 300, 300))
_add(_ising("ising_table_s2_7", 7, 0.3, 420, 300))
_add(_ising("ising_table_s2_8", 8, 1.0, 500, 600))
_add(_ising("ising_table_s2_10", 10, 1.0, 220, 1800))

# imperfect timekeeping
_add(_bh("timekeeping_bh", "timekeeping", 4, 2, 1, 1.0, 0.1, 30, 120,
         timekeeping={"sigmas": [0.0, 0.01, 0.02, 0.05, 0.1]}))
_add(_ising("timekeeping_ising", 6, 0.5, 300, 600, mode="timekeeping",
            timekeeping={"sigmas": [0.0, 0.01, 0.02, 0.03, 0.05]}))

# purity objective on the single- and two-site presets
_add(_bh("purity_fig2a", "distill", 4, 2, 1, 1.0, 0.1, 30, 60, objective="purity"))
_add(_bh("purity_fig3a", "distill", 5, 2, 2, 2.0, 0.8, 200, 120, objective="purity"))
_add(_bh("purity_fig3b", "distill", 6, 3, 2, 2.0, 0.5, 200, 300, objective="purity"))

# stochastic step lengths around the fig2a schedule
_add(_bh("random_dt_bh", "random_dt", 4, 2, 1, 1.0, 0.1, 30, 60))
_PRESETS["random_dt_bh"]["greedy"]["dt_sigma"] = 0.05

BUNDLES: dict[str, tuple[str, ...]] = {
    "purity_variants": ("purity_fig2a", "purity_fig3a", "purity_fig3b"),
}


def list_presets() -> list[str]:
    return sorted(list(_PRESETS) + list(BUNDLES))


def preset_document(name: str) -> dict:
    if name not in _PRESETS:
        raise KeyError(f"unknown preset {name!r}; see list-presets")
    return copy.deepcopy(_PRESETS[name])


def get_preset(name: str) -> ExperimentConfig:
    return config_from_dict(preset_document(name), name)


def expand(name: str) -> list[str]:
    """Preset names a (possibly bundled) name stands for."""
    if name in BUNDLES:
        return list(BUNDLES[name])
    if name in _PRESETS:
        return [name]
    raise KeyError(f"unknown preset {name!r}; see list-presets")
