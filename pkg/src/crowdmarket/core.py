"""Domain model and in-memory registries for the marketplace engine.

A worker advertises the application domains it covers, a compute profile, and
per-(domain, task type) performance counters accumulated from its history on
the platform.  A task carries the requester's floors and requirements; a model
record describes a shared pre-trained model.  Everything serializes to plain
JSON dicts with snake_case field names (see ``schemas/``).

Counters are kept as exact integers; ratings are integer points on a 0..100
scale so no information is lost in the ledger.  Derived scores (commitment,
completion, reputation, rating) are computed from counters on demand by the
scoring module.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Mapping

# Rating reviews are integers in [0, RATING_SCALE]; the normalized rating is
# rating_sum / (RATING_SCALE * rating_count).
RATING_SCALE = 100

# Identifiers are 20-byte lowercase hex strings, address-like but with no
# cryptographic derivation behind them.
ID_HEX_LENGTH = 40


class MarketError(Exception):
    """Base class for every error raised by this package."""


class DuplicateId(MarketError):
    pass


class InvalidProfile(MarketError):
    pass


class UnknownWorker(MarketError):
    pass


class CounterOrderViolation(MarketError):
    """An outcome event would break completed <= accepted <= assigned."""


class TaskType(enum.IntEnum):
    """The two task kinds the marketplace supports."""

    TRAINING = 0
    MODEL_SHARING = 1


class WorkerStatus(str, enum.Enum):
    ACTIVE = "active"
    IDLE = "idle"


class TaskStatus(str, enum.Enum):
    PENDING = "pending"
    ALLOCATED = "allocated"
    COMPLETED = "completed"
    FAILED = "failed"


class OutcomeKind(str, enum.Enum):
    """Counter events recorded against a worker's (domain, kind) history."""

    ASSIGNED = "assigned"
    ACCEPTED = "accepted"
    COMPLETED = "completed"
    RATED = "rated"


def is_valid_id(value: str) -> bool:
    """True if ``value`` is a 20-byte lowercase hex identifier."""
    if len(value) != ID_HEX_LENGTH:
        return False
    return all(c in "0123456789abcdef" for c in value)


@dataclass
class ComputeProfile:
    """CPU core count, RAM in GB, and the GPU brand+series token (if any)."""

    cpu_cores: int = 0
    ram_gb: int = 0
    gpu_series: str | None = None

    def validate(self) -> None:
        if self.cpu_cores < 0 or self.ram_gb < 0:
            raise InvalidProfile(
                f"negative compute profile: cpu={self.cpu_cores} ram={self.ram_gb}"
            )

    def to_dict(self) -> dict:
        return {
            "cpu_cores": self.cpu_cores,
            "ram_gb": self.ram_gb,
            "gpu_series": self.gpu_series,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ComputeProfile":
        return cls(
            cpu_cores=int(d["cpu_cores"]),
            ram_gb=int(d["ram_gb"]),
            gpu_series=d.get("gpu_series"),
        )


@dataclass
class PerfCounters:
    """Per-(domain, task type) history counters.

    Invariants: 0 <= completed <= accepted <= assigned, rating_count <=
    completed, and rating_sum <= rating_count * RATING_SCALE.
    """

    assigned: int = 0
    accepted: int = 0
    completed: int = 0
    rating_sum: int = 0
    rating_count: int = 0

    def validate(self) -> None:
        ok = (
            0 <= self.completed <= self.accepted <= self.assigned
            and 0 <= self.rating_count <= self.completed
            and 0 <= self.rating_sum <= self.rating_count * RATING_SCALE
        )
        if not ok:
            raise InvalidProfile(f"inconsistent counters: {self}")

    def to_dict(self) -> dict:
        return {
            "assigned": self.assigned,
            "accepted": self.accepted,
            "completed": self.completed,
            "rating_sum": self.rating_sum,
            "rating_count": self.rating_count,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "PerfCounters":
        return cls(
            assigned=int(d["assigned"]),
            accepted=int(d["accepted"]),
            completed=int(d["completed"]),
            rating_sum=int(d["rating_sum"]),
            rating_count=int(d["rating_count"]),
        )


@dataclass
class WorkerProfile:
    """A registered worker: identity, covered domains, compute, history."""

    worker_id: str
    domains: frozenset[int]
    compute: ComputeProfile = field(default_factory=ComputeProfile)
    stats: dict[tuple[int, TaskType], PerfCounters] = field(default_factory=dict)
    status: WorkerStatus = WorkerStatus.IDLE

    def validate(self) -> None:
        if not is_valid_id(self.worker_id):
            raise InvalidProfile(f"bad worker_id {self.worker_id!r}")
        if not self.domains:
            raise InvalidProfile(f"worker {self.worker_id} covers no domain")
        if any(d < 0 for d in self.domains):
            raise InvalidProfile("negative domain code")
        self.compute.validate()
        for (dom, _kind), counters in self.stats.items():
            if dom not in self.domains:
                raise InvalidProfile(
                    f"stats keyed by uncovered domain {dom} for worker {self.worker_id}"
                )
            counters.validate()

    def counters(self, domain: int, kind: TaskType) -> PerfCounters:
        """The counter cell for (domain, kind), creating a zeroed one."""
        key = (domain, TaskType(kind))
        cell = self.stats.get(key)
        if cell is None:
            cell = PerfCounters()
            self.stats[key] = cell
        return cell

    def peek_counters(self, domain: int, kind: TaskType) -> PerfCounters:
        """Read-only counter lookup; a zeroed cell when none is stored."""
        return self.stats.get((domain, TaskType(kind))) or PerfCounters()

    def to_dict(self) -> dict:
        rows = [
            {"domain": dom, "kind": int(kind), **cell.to_dict()}
            for (dom, kind), cell in sorted(
                self.stats.items(), key=lambda kv: (kv[0][0], int(kv[0][1]))
            )
        ]
        return {
            "worker_id": self.worker_id,
            "domains": sorted(self.domains),
            "compute": self.compute.to_dict(),
            "stats": rows,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "WorkerProfile":
        stats = {}
        for row in d.get("stats", []):
            key = (int(row["domain"]), TaskType(int(row["kind"])))
            stats[key] = PerfCounters.from_dict(row)
        return cls(
            worker_id=d["worker_id"],
            domains=frozenset(int(x) for x in d["domains"]),
            compute=ComputeProfile.from_dict(d["compute"]),
            stats=stats,
            status=WorkerStatus(d.get("status", "idle")),
        )

    def copy(self) -> "WorkerProfile":
        return replace(
            self,
            compute=replace(self.compute),
            stats={k: replace(v) for k, v in self.stats.items()},
        )


@dataclass
class TaskSpec:
    """A requester's task: kind, domain, floors, and kind-specific extras.

    ``compute_req`` is required for training tasks and must be absent for
    sharing tasks; ``env_features`` is the mirror image.
    """

    task_id: str
    requester_id: str
    kind: TaskType
    domain: int
    description: str = ""
    num_workers: int = 1
    min_reputation: float = 0.0
    min_rating: float = 0.0
    time_constraint: float = 100.0
    compute_req: ComputeProfile | None = None
    env_features: tuple[float, ...] | None = None
    status: TaskStatus = TaskStatus.PENDING

    def validate(self) -> None:
        if not is_valid_id(self.task_id):
            raise InvalidProfile(f"bad task_id {self.task_id!r}")
        if self.num_workers < 1:
            raise InvalidProfile("num_workers must be >= 1")
        if not (0.0 <= self.min_reputation <= 1.0 and 0.0 <= self.min_rating <= 1.0):
            raise InvalidProfile("reputation/rating floors must lie in [0, 1]")
        if self.time_constraint <= 0:
            raise InvalidProfile("time_constraint must be positive")
        if self.kind == TaskType.TRAINING:
            if self.compute_req is None:
                raise InvalidProfile("training task needs compute_req")
            if self.env_features is not None:
                raise InvalidProfile("training task must not carry env_features")
            self.compute_req.validate()
        else:
            if self.env_features is None:
                raise InvalidProfile("sharing task needs env_features")
            if self.compute_req is not None:
                raise InvalidProfile("sharing task must not carry compute_req")

    def to_dict(self) -> dict:
        return {
            "task_id": self.task_id,
            "requester_id": self.requester_id,
            "kind": int(self.kind),
            "domain": self.domain,
            "description": self.description,
            "num_workers": self.num_workers,
            "min_reputation": self.min_reputation,
            "min_rating": self.min_rating,
            "time_constraint": self.time_constraint,
            "compute_req": self.compute_req.to_dict() if self.compute_req else None,
            "env_features": list(self.env_features) if self.env_features else None,
            "status": self.status.value,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TaskSpec":
        compute_req = d.get("compute_req")
        env = d.get("env_features")
        return cls(
            task_id=d["task_id"],
            requester_id=d["requester_id"],
            kind=TaskType(int(d["kind"])),
            domain=int(d["domain"]),
            description=d.get("description", ""),
            num_workers=int(d.get("num_workers", 1)),
            min_reputation=float(d.get("min_reputation", 0.0)),
            min_rating=float(d.get("min_rating", 0.0)),
            time_constraint=float(d.get("time_constraint", 100.0)),
            compute_req=ComputeProfile.from_dict(compute_req) if compute_req else None,
            env_features=tuple(float(x) for x in env) if env is not None else None,
            status=TaskStatus(d.get("status", "pending")),
        )


@dataclass
class ModelRecord:
    """A shared pre-trained model: owner, content id, domain, environment."""

    owner_id: str
    cid: str
    domain: int
    description: str = ""
    env_features: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {
            "owner_id": self.owner_id,
            "cid": self.cid,
            "domain": self.domain,
            "description": self.description,
            "env_features": list(self.env_features),
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "ModelRecord":
        return cls(
            owner_id=d["owner_id"],
            cid=d["cid"],
            domain=int(d["domain"]),
            description=d.get("description", ""),
            env_features=tuple(float(x) for x in d.get("env_features", [])),
        )


class WorkerRegistry:
    """In-memory worker registry with a per-domain index.

    Single-writer: all mutation is expected to flow through the ledger's
    event application; concurrent reads are safe when nothing writes.
    """

    def __init__(self) -> None:
        self._workers: dict[str, WorkerProfile] = {}
        self._by_domain: dict[int, set[str]] = {}

    def __len__(self) -> int:
        return len(self._workers)

    def __contains__(self, worker_id: str) -> bool:
        return worker_id in self._workers

    def __iter__(self) -> Iterator[WorkerProfile]:
        return iter(self._workers.values())

    def ids(self) -> list[str]:
        return sorted(self._workers)

    def register(self, profile: WorkerProfile) -> None:
        """Store a copy of the worker: status reset to idle, any missing
        counter cells zero-filled, declared history kept."""
        profile.validate()
        if profile.worker_id in self._workers:
            raise DuplicateId(f"worker {profile.worker_id} already registered")
        stored = profile.copy()
        stored.status = WorkerStatus.IDLE
        for dom in stored.domains:
            for kind in TaskType:
                stored.stats.setdefault((dom, kind), PerfCounters())
        self._workers[stored.worker_id] = stored
        for dom in stored.domains:
            self._by_domain.setdefault(dom, set()).add(stored.worker_id)

    def get(self, worker_id: str) -> WorkerProfile:
        try:
            return self._workers[worker_id]
        except KeyError:
            raise UnknownWorker(f"no worker {worker_id}") from None

    def workers_in_domain(self, domain: int, active_only: bool = False) -> list[WorkerProfile]:
        """Workers whose covered domains contain ``domain``, id-sorted."""
        ids = sorted(self._by_domain.get(domain, ()))
        found = [self._workers[i] for i in ids]
        if active_only:
            found = [w for w in found if w.status == WorkerStatus.ACTIVE]
        return found

    def set_status(self, worker_id: str, status: WorkerStatus) -> None:
        self.get(worker_id).status = WorkerStatus(status)

    def update_info(
        self,
        worker_id: str,
        compute: ComputeProfile | None = None,
        domains: Iterable[int] | None = None,
    ) -> None:
        """Replace a worker's compute profile and/or extend their domains.

        Domains can only grow; dropping one would orphan its counter
        history, so a shrinking set is refused.
        """
        worker = self.get(worker_id)
        if compute is not None:
            compute.validate()
            worker.compute = compute
        if domains is not None:
            new = frozenset(int(d) for d in domains)
            if not new >= worker.domains:
                raise InvalidProfile(
                    f"domains of {worker_id} can only be extended"
                )
            for dom in new - worker.domains:
                for kind in TaskType:
                    worker.stats.setdefault((dom, kind), PerfCounters())
                self._by_domain.setdefault(dom, set()).add(worker_id)
            worker.domains = new

    def record_outcome(
        self,
        worker_id: str,
        domain: int,
        kind: TaskType,
        event: OutcomeKind,
        points: int | None = None,
    ) -> None:
        """Apply one counter event, refusing anything that breaks ordering.

        ``points`` is required for RATED events and must lie in
        [0, RATING_SCALE].
        """
        worker = self.get(worker_id)
        if domain not in worker.domains:
            raise CounterOrderViolation(
                f"worker {worker_id} does not cover domain {domain}"
            )
        cell = worker.counters(domain, kind)
        event = OutcomeKind(event)
        if event == OutcomeKind.ASSIGNED:
            cell.assigned += 1
        elif event == OutcomeKind.ACCEPTED:
            if cell.accepted + 1 > cell.assigned:
                raise CounterOrderViolation(
                    f"accepted would exceed assigned for {worker_id}"
                )
            cell.accepted += 1
        elif event == OutcomeKind.COMPLETED:
            if cell.completed + 1 > cell.accepted:
                raise CounterOrderViolation(
                    f"completed would exceed accepted for {worker_id}"
                )
            cell.completed += 1
        else:
            if points is None or not 0 <= points <= RATING_SCALE:
                raise CounterOrderViolation(
                    f"rating points must lie in [0, {RATING_SCALE}], got {points}"
                )
            if cell.rating_count + 1 > cell.completed:
                raise CounterOrderViolation(
                    f"rating without a completed task for {worker_id}"
                )
            cell.rating_sum += int(points)
            cell.rating_count += 1

    def to_dict(self) -> dict:
        return {"workers": [self._workers[i].to_dict() for i in sorted(self._workers)]}

    @classmethod
    def from_profiles(cls, profiles: Iterable[WorkerProfile]) -> "WorkerRegistry":
        """Bulk-load a population snapshot, keeping declared statuses."""
        reg = cls()
        for p in profiles:
            reg.register(p)
            reg.set_status(p.worker_id, p.status)
        return reg
