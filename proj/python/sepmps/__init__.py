"""Spin-chain ground energies over partially separable states.

A variational MPS solver with per-bond dimension profiles: forcing unit
bonds across partition cuts restricts the search to states separable under
that partition. Exact-diagonalization oracles are included for
verification.
"""

from ._core import (
    ConfigError,
    ConvergenceError,
    Hamiltonian,
    MinimizeResult,
    NumericalError,
    PartitionSpec,
    ShapeError,
    SweepReport,
    blbq,
    block_oracle_energy,
    constrained_energy,
    dense_ground_energy,
    dimerised_heisenberg,
    krylov_ground_energy,
    minimize_energy,
    p_step_partition,
    parse_partition,
    run_experiment_file,
)

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "Hamiltonian",
    "MinimizeResult",
    "NumericalError",
    "PartitionSpec",
    "ShapeError",
    "SweepReport",
    "blbq",
    "block_oracle_energy",
    "constrained_energy",
    "dense_ground_energy",
    "dimerised_heisenberg",
    "krylov_ground_energy",
    "minimize_energy",
    "p_step_partition",
    "parse_partition",
    "run_experiment_file",
]
