"""Crowdsourced training-market toolkit.

A marketplace backbone for renting out model training to a crowd of
workers: score candidates from their track record, recruit the best
group under hard constraints, drive every state change through an
append-only event ledger, and keep artifacts in a content-addressed
blob store.  A simulation harness generates populations with known
latent behavior so recruitment policies can be compared end to end.

Selection searches run on a compiled kernel when the extension built,
with a pure-Python twin that produces bit-identical results otherwise;
``crowdmarket._kernels.BACKEND`` names the active one.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .allocation import (
    AllocationError,
    EmptyDomain,
    NoModels,
    OfferResponse,
    PoolExhausted,
    RankedEntry,
    SelectionReport,
    allocate_models,
    allocate_with_retraction,
    eligible_pool,
    greedy_select,
    rank_entries,
    score_pool,
)
from .core import (
    ComputeProfile,
    MarketError,
    ModelRecord,
    PerfCounters,
    TaskSpec,
    TaskStatus,
    TaskType,
    WorkerProfile,
    WorkerRegistry,
    WorkerStatus,
)
from .ledger import (
    Ledger,
    LedgerEvent,
    LedgerState,
    ReplayDivergence,
    log_digest,
    read_log,
    replay,
    write_log,
)
from .metaheuristics import (
    ACOConfig,
    GAConfig,
    OptimizerConfig,
    PSOConfig,
    aco_select,
    cpu_select,
    ga_select,
    greedy_pick,
    pso_select,
    random_select,
    reputation_select,
)
from .scoring import (
    ScoreBreakdown,
    SimilarityWeights,
    commitment_rate,
    completion_rate,
    compute_capability,
    expertise,
    model_similarity,
    rating,
    reputation,
    sharing_qos,
    training_qos,
)
from .simharness import (
    LatentBehavior,
    PopulationSpec,
    TaskStreamSpec,
    generate_population,
    generate_task_stream,
    run_baseline_benchmark,
    run_lifecycle,
    run_optimizer_benchmark,
)
from .store import BlobStore, NotFound, StorageFailure, cid_for

__version__ = "0.1.0"

__all__ = [
    "ACOConfig",
    "AllocationError",
    "BlobStore",
    "ComputeProfile",
    "EmptyDomain",
    "GAConfig",
    "KERNEL_BACKEND",
    "LatentBehavior",
    "Ledger",
    "LedgerEvent",
    "LedgerState",
    "MarketError",
    "ModelRecord",
    "NoModels",
    "OfferResponse",
    "OptimizerConfig",
    "PSOConfig",
    "PerfCounters",
    "PoolExhausted",
    "PopulationSpec",
    "RankedEntry",
    "ReplayDivergence",
    "ScoreBreakdown",
    "SelectionReport",
    "SimilarityWeights",
    "TaskSpec",
    "TaskStatus",
    "TaskStreamSpec",
    "TaskType",
    "WorkerProfile",
    "WorkerRegistry",
    "WorkerStatus",
    "aco_select",
    "allocate_models",
    "allocate_with_retraction",
    "cid_for",
    "commitment_rate",
    "completion_rate",
    "compute_capability",
    "cpu_select",
    "eligible_pool",
    "expertise",
    "ga_select",
    "generate_population",
    "generate_task_stream",
    "greedy_pick",
    "greedy_select",
    "log_digest",
    "model_similarity",
    "pso_select",
    "random_select",
    "rank_entries",
    "rating",
    "read_log",
    "replay",
    "reputation",
    "reputation_select",
    "run_baseline_benchmark",
    "run_lifecycle",
    "run_optimizer_benchmark",
    "score_pool",
    "sharing_qos",
    "training_qos",
    "write_log",
    "NotFound",
    "StorageFailure",
]
