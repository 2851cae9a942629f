"""Exact-diagonalisation toolkit for active quantum distillation on bosonic and spin chains."""

from .bound import (BoundReport, SectorPlan, lower_bound, lower_bound_nonconserving,
                    lower_bound_qubits, plan_sectors)
from .fock import (BipartiteSplit, FockBasis, enumerate_basis, sector_blocks_for_nonconserving,
                   split)
from .greedy import (ControlPath, ControlSet, ExperimentRecord, GreedyConfig, greedy_distill,
                     greedy_distill_random_dt, replay_path, timekeeping_robustness)
from .operators import (ModelSpec, build_bose_hubbard, build_control, build_ising,
                        build_ising_control, build_number_ops)
from .quantum import (QubitSplit, evolve, expected_nB, imperfect_timekeeping_evolve,
                      mutual_information, partial_trace, propagator, purity, thermal_state,
                      von_neumann_entropy)
from .system import ControlledSystem

__version__ = "0.1.0"
