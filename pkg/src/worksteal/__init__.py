"""worksteal: a discrete-time work-stealing scheduler simulator.

Simulates decentralized list scheduling of unit tasks, weighted tasks
and precedence DAGs on m identical processors; instruments the
load-imbalance potentials that drive its makespan analysis; computes
the analysis constants and makespan bounds; and reproduces the
experimental campaign (overhead slopes, extreme-value fits, cooperative
steal savings).
"""

from . import bounds, harness, potential, protocols, stats, verify, workloads
from .engine import (
    ConfigError,
    RunResult,
    SimConfig,
    Simulation,
    StepTelemetry,
    WorkerState,
    accounting_identity_holds,
    run,
)
from .protocols import ProtocolOptions
from .rng import SplitMix64, derive_seed
from .workloads import (
    AllOnZero,
    BallsAndBins,
    DagSpec,
    DagTasks,
    ExplicitInit,
    UnitTasks,
    WeightedTasks,
    critical_path,
    dag_for_work,
    generate_layered_dag,
)

__version__ = "0.1.0"

__all__ = [
    "AllOnZero", "BallsAndBins", "ConfigError", "DagSpec", "DagTasks",
    "ExplicitInit", "ProtocolOptions", "RunResult", "SimConfig", "Simulation",
    "SplitMix64", "StepTelemetry", "UnitTasks", "WeightedTasks", "WorkerState",
    "accounting_identity_holds", "bounds", "critical_path", "dag_for_work",
    "derive_seed", "generate_layered_dag", "harness", "potential", "protocols",
    "run", "stats", "verify", "workloads",
]
