"""Topology-aware task and gate placement via QUBO annealing.

Workflow: parse a task graph or circuit plus an architecture, level the
graph into a schedule, assemble a QUBO whose ground states are exactly
the constraint-valid placements, minimize it with one of the bundled
engines, then decode and score the winning bitvector.
"""

from .errors import (
    CapacityError,
    ConfigError,
    ConnectivityError,
    CycleError,
    DimensionError,
    InvalidAssignmentError,
    IsingMapError,
    ParseError,
    PipelineOrderError,
    ProblemTooLargeError,
    RangeError,
    SolveQualityError,
    UnknownReferenceError,
)
from .graphs import (
    CLASSICAL,
    CONTINUITY,
    DATA,
    GATE_PAIR,
    QUANTUM,
    Architecture,
    Edge,
    LevelSchedule,
    Link,
    Task,
    TaskGraph,
    Unit,
    compute_levels,
    mesh_architecture,
    parse_arch,
    parse_circuit,
    parse_tcg,
    serialize_tcg,
)
from .interpret import (
    Assignment,
    CostReport,
    FidelityReport,
    Violation,
    decode,
    encode,
    mtom_classical,
    mtom_quantum,
    validate,
)
from .partition import (
    PipelineResult,
    SubProblem,
    build_subqubo,
    partition_levels,
    run_pipeline,
)
from .qubo import (
    QuboProblem,
    WeightConfig,
    build_classical_qubo,
    build_quantum_qubo,
    energy,
    export_qmasm,
    export_qubo,
    normalize_for_hardware,
)
from .solvers import (
    HAVE_COMPILED_KERNELS,
    Solution,
    SolverParams,
    format_solution,
    import_solution,
    kernel_backend,
    solve,
    solve_anneal,
    solve_exact,
    solve_tabu,
)
from .woa import WoaConfig, WoaResult, optimize_pref

__version__ = "0.1.0"

__all__ = [
    "Architecture", "Assignment", "CLASSICAL", "CONTINUITY", "CapacityError",
    "ConfigError", "ConnectivityError", "CostReport", "CycleError", "DATA",
    "DimensionError", "Edge", "FidelityReport", "GATE_PAIR",
    "HAVE_COMPILED_KERNELS", "InvalidAssignmentError", "IsingMapError",
    "Link", "LevelSchedule", "ParseError", "PipelineOrderError",
    "PipelineResult", "ProblemTooLargeError", "QUANTUM", "QuboProblem",
    "RangeError", "Solution", "SolveQualityError", "SolverParams",
    "SubProblem", "Task", "TaskGraph", "Unit", "UnknownReferenceError",
    "Violation", "WeightConfig", "WoaConfig", "WoaResult", "build_subqubo",
    "build_classical_qubo", "build_quantum_qubo", "compute_levels", "decode",
    "encode", "energy", "export_qmasm", "export_qubo", "format_solution",
    "import_solution", "kernel_backend", "mesh_architecture",
    "mtom_classical", "mtom_quantum", "normalize_for_hardware",
    "optimize_pref", "parse_arch", "parse_circuit", "parse_tcg",
    "partition_levels", "run_pipeline", "serialize_tcg", "solve",
    "solve_anneal", "solve_exact", "solve_tabu", "validate",
]
