"""Append-only event ledger driving all marketplace state.

Every mutation of the marketplace (worker onboarding, task lifecycle,
model sharing, feedback, payment) is an event with a gapless sequence
number.  State is a deterministic fold over the event list, so replaying
a log reproduces the exact same state and the same digest on any
platform.  This stands in for the three manager contracts a chain
deployment would host: the worker book, the task book and the model book
are sub-states of one machine.

Validation happens when an event is submitted; a failing call is still
appended, flagged rejected with a reason, and never touches domain state.
Replay trusts the recorded flag instead of re-running context-dependent
checks (blob presence is checked against a store only at submit time), so
a log replays identically even without the store at hand.

Each accepted call also bills an abstract operation cost: the number of
state cells it read plus wrote, with ranking work billed per comparison
(two cell touches each).  Allocating over an eligible pool of size R
therefore costs Theta(R log R), which is the property the complexity
check in the acceptance suite measures.

Log file format: one record per event, 4-byte big-endian length prefix
followed by the event's canonical JSON bytes.  The log digest is SHA-256
over the concatenated canonical bytes (prefixes excluded).
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator

from . import allocation
from .core import (
    DuplicateId,
    InvalidProfile,
    MarketError,
    ModelRecord,
    OutcomeKind,
    TaskSpec,
    TaskStatus,
    TaskType,
    UnknownWorker,
    WorkerProfile,
    WorkerRegistry,
    WorkerStatus,
)
from .scoring import DEFAULT_RATING_PRIOR, DEFAULT_W1
from .serialize import canon_bytes, sha256_hex
from .store import BlobStore, parse_cid

CALLS = (
    "AddWorker",
    "AddRequester",
    "UpdateStatus",
    "UpdateInfo",
    "AddTask",
    "AllocateTask",
    "UpdateTaskStatus",
    "SubmitOutcome",
    "AddModel",
    "AllocateModel",
    "SubmitFeedback",
    "Pay",
)


class LedgerError(MarketError):
    """Base class for ledger protocol failures."""


class SequenceGap(LedgerError):
    """Event sequence numbers must be gapless from 1."""


class ReplayDivergence(LedgerError):
    """An event recorded as accepted fails validation on replay."""


class UnknownTask(LedgerError):
    pass


class WrongStatus(LedgerError):
    pass


class NotSelectedWorker(LedgerError):
    pass


class UnknownCid(LedgerError):
    pass


class UnknownOwner(LedgerError):
    pass


class WrongTaskType(LedgerError):
    pass


class DuplicateFeedback(LedgerError):
    pass


class NotParticipant(LedgerError):
    pass


@dataclass
class LedgerEvent:
    """One appended call: immutable once written."""

    seq: int
    timestamp: int
    actor: str
    call: str
    payload: dict
    rejected: bool = False
    reason: str | None = None

    def to_dict(self) -> dict:
        return {
            "seq": self.seq,
            "timestamp": self.timestamp,
            "actor": self.actor,
            "call": self.call,
            "payload": self.payload,
            "rejected": self.rejected,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LedgerEvent":
        return cls(
            seq=int(d["seq"]),
            timestamp=int(d["timestamp"]),
            actor=d["actor"],
            call=d["call"],
            payload=d["payload"],
            rejected=bool(d.get("rejected", False)),
            reason=d.get("reason"),
        )

    def canonical_bytes(self) -> bytes:
        return canon_bytes(self.to_dict())


@dataclass
class TaskState:
    """Ledger-side view of one task's lifecycle."""

    spec: TaskSpec
    status: TaskStatus = TaskStatus.PENDING
    selected: list[str] = field(default_factory=list)
    selected_models: list[tuple[str, str]] | None = None
    submitted: dict[str, str] = field(default_factory=dict)
    feedback: dict[str, int] = field(default_factory=dict)
    paid: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "status": self.status.value,
            "selected": list(self.selected),
            "selected_models": (
                None
                if self.selected_models is None
                else [[w, c] for w, c in self.selected_models]
            ),
            "submitted": {k: self.submitted[k] for k in sorted(self.submitted)},
            "feedback": {k: self.feedback[k] for k in sorted(self.feedback)},
            "paid": {k: self.paid[k] for k in sorted(self.paid)},
        }


def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length() if n >= 1 else 0


def _ranking_cost(ranked: int, rejected: int, selected: int, extra_writes: int) -> int:
    # reads: the task cell, every screened profile; ranking billed as
    # 2 cell touches per comparison over the eligible pool
    reads = 1 + ranked + rejected + 2 * ranked * _ceil_log2(ranked)
    writes = 1 + selected + extra_writes
    return reads + writes


class LedgerState:
    """Mutable fold target; a pure function of the applied event sequence."""

    def __init__(self) -> None:
        self.workers = WorkerRegistry()
        self.requesters: set[str] = set()
        self.tasks: dict[str, TaskState] = {}
        self.models: list[ModelRecord] = []
        self.op_costs: dict[str, int] = {}
        self.rejections: list[tuple[int, str]] = []
        self.last_seq = 0
        self._model_keys: set[tuple[str, str]] = set()

    # -- fold ------------------------------------------------------------

    def apply(self, event: LedgerEvent, store: BlobStore | None = None) -> None:
        """Fold one event into the state.

        Rejected events only extend the rejection log.  For accepted
        events the call's validator runs again (minus store-dependent
        checks when ``store`` is None); a failure here means the log
        was tampered with and raises :class:`ReplayDivergence`.
        """
        if event.seq != self.last_seq + 1:
            raise SequenceGap(
                f"event seq {event.seq} after {self.last_seq}"
            )
        if event.call not in _HANDLERS:
            raise LedgerError(f"unknown call {event.call!r}")
        self.last_seq = event.seq
        if event.rejected:
            self.rejections.append((event.seq, event.reason or ""))
            return
        try:
            _VALIDATORS[event.call](self, event, store)
        except MarketError as exc:
            raise ReplayDivergence(
                f"accepted event {event.seq} ({event.call}) fails validation: {exc}"
            ) from exc
        cost = _HANDLERS[event.call](self, event)
        self.op_costs[event.call] = self.op_costs.get(event.call, 0) + cost

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "workers": self.workers.to_dict(),
            "requesters": sorted(self.requesters),
            "tasks": {
                tid: self.tasks[tid].to_dict() for tid in sorted(self.tasks)
            },
            "models": [m.to_dict() for m in self.models],
            "op_costs": {k: self.op_costs[k] for k in sorted(self.op_costs)},
            "rejections": [[seq, reason] for seq, reason in self.rejections],
            "last_seq": self.last_seq,
        }

    def state_digest(self) -> bytes:
        """32-byte digest of the canonical state serialization."""
        return hashlib.sha256(canon_bytes(self.to_dict())).digest()

    def state_digest_hex(self) -> str:
        return self.state_digest().hex()

    # -- queries ---------------------------------------------------------

    def task(self, task_id: str) -> TaskState:
        try:
            return self.tasks[task_id]
        except KeyError:
            raise UnknownTask(f"no task {task_id}") from None

    def models_in_domain(self, domain: int) -> list[ModelRecord]:
        return [m for m in self.models if m.domain == domain]


# -- validators (raise MarketError subclasses; no state mutation) --------


def _get_task(state: LedgerState, payload: dict) -> TaskState:
    task_id = payload.get("task_id")
    if task_id not in state.tasks:
        raise UnknownTask(f"no task {task_id}")
    return state.tasks[task_id]


def _check_cid(cid: str, store: BlobStore | None) -> None:
    parse_cid(cid)
    if store is not None and not store.has(cid):
        raise UnknownCid(f"{cid} not in store")


def _v_add_worker(state: LedgerState, event: LedgerEvent, store) -> None:
    profile = WorkerProfile.from_dict(event.payload["profile"])
    profile.validate()
    if profile.worker_id in state.workers:
        raise DuplicateId(f"worker {profile.worker_id} already registered")


def _v_add_requester(state: LedgerState, event: LedgerEvent, store) -> None:
    rid = event.payload["requester_id"]
    if not isinstance(rid, str) or not rid:
        raise InvalidProfile("requester_id must be a non-empty string")
    if rid in state.requesters:
        raise DuplicateId(f"requester {rid} already registered")


def _v_update_status(state: LedgerState, event: LedgerEvent, store) -> None:
    if event.payload["worker_id"] not in state.workers:
        raise UnknownWorker(f"no worker {event.payload['worker_id']}")
    try:
        WorkerStatus(event.payload["status"])
    except ValueError:
        raise InvalidProfile(
            f"bad status {event.payload['status']!r}"
        ) from None


def _v_update_info(state: LedgerState, event: LedgerEvent, store) -> None:
    payload = event.payload
    worker_id = payload["worker_id"]
    if worker_id not in state.workers:
        raise UnknownWorker(f"no worker {worker_id}")
    compute = payload.get("compute")
    domains = payload.get("domains")
    if compute is None and domains is None:
        raise InvalidProfile("update carries no change")
    if compute is not None:
        from .core import ComputeProfile

        ComputeProfile.from_dict(compute).validate()
    if domains is not None:
        new = frozenset(int(d) for d in domains)
        if not new >= state.workers.get(worker_id).domains:
            raise InvalidProfile("domains can only be extended")


def _v_add_task(state: LedgerState, event: LedgerEvent, store) -> None:
    task = TaskSpec.from_dict(event.payload["task"])
    task.validate()
    if task.requester_id not in state.requesters:
        raise UnknownOwner(f"requester {task.requester_id} not registered")
    if task.task_id in state.tasks:
        raise DuplicateId(f"task {task.task_id} already added")
    if task.status is not TaskStatus.PENDING:
        raise WrongStatus("new tasks must be pending")


def _v_allocate_common(state: LedgerState, event: LedgerEvent) -> TaskState:
    ts = _get_task(state, event.payload)
    if ts.status is not TaskStatus.PENDING:
        raise WrongStatus(f"task {ts.spec.task_id} is {ts.status.value}")
    report = event.payload["report"]
    if report["task_id"] != ts.spec.task_id:
        raise WrongStatus("report does not match task")
    if not report["selected"]:
        raise WrongStatus("empty selection")
    for worker_id in report["selected"]:
        if worker_id not in state.workers:
            raise UnknownWorker(f"selected worker {worker_id} unregistered")
    return ts


def _v_allocate_task(state: LedgerState, event: LedgerEvent, store) -> None:
    ts = _v_allocate_common(state, event)
    if ts.spec.kind is not TaskType.TRAINING:
        raise WrongTaskType("allocate_task handles training tasks")


def _v_allocate_model(state: LedgerState, event: LedgerEvent, store) -> None:
    ts = _v_allocate_common(state, event)
    if ts.spec.kind is not TaskType.MODEL_SHARING:
        raise WrongTaskType("allocate_model handles model-sharing tasks")
    if not event.payload["report"].get("selected_models"):
        raise WrongStatus("no model pairs selected")


_FORWARD = {
    TaskStatus.PENDING: {TaskStatus.FAILED},
    TaskStatus.ALLOCATED: {TaskStatus.COMPLETED, TaskStatus.FAILED},
    TaskStatus.COMPLETED: set(),
    TaskStatus.FAILED: set(),
}


def _v_update_task_status(state: LedgerState, event: LedgerEvent, store) -> None:
    ts = _get_task(state, event.payload)
    try:
        new = TaskStatus(event.payload["status"])
    except ValueError:
        raise WrongStatus(
            f"bad status {event.payload['status']!r}"
        ) from None
    if new not in _FORWARD[ts.status]:
        raise WrongStatus(
            f"cannot move task {ts.spec.task_id} {ts.status.value} -> {new.value}"
        )
    if new is TaskStatus.COMPLETED and set(ts.submitted) < set(ts.selected):
        raise WrongStatus("outcomes still missing")


def _v_submit_outcome(state: LedgerState, event: LedgerEvent, store) -> None:
    ts = _get_task(state, event.payload)
    worker_id = event.payload["worker_id"]
    if ts.status is not TaskStatus.ALLOCATED:
        raise WrongStatus(f"task {ts.spec.task_id} is {ts.status.value}")
    if worker_id not in ts.selected:
        raise NotSelectedWorker(f"{worker_id} not selected for {ts.spec.task_id}")
    if worker_id in ts.submitted:
        raise WrongStatus(f"{worker_id} already submitted")
    _check_cid(event.payload["cid"], store)


def _v_add_model(state: LedgerState, event: LedgerEvent, store) -> None:
    model = ModelRecord.from_dict(event.payload["model"])
    if model.owner_id not in state.workers:
        raise UnknownOwner(f"owner {model.owner_id} not registered")
    if model.domain not in state.workers.get(model.owner_id).domains:
        raise InvalidProfile(
            f"owner {model.owner_id} does not cover domain {model.domain}"
        )
    if not model.env_features:
        raise InvalidProfile("model lacks environment features")
    if (model.owner_id, model.cid) in state._model_keys:
        raise DuplicateId(f"model {model.cid} already shared by this owner")
    _check_cid(model.cid, store)


def _v_submit_feedback(state: LedgerState, event: LedgerEvent, store) -> None:
    ts = _get_task(state, event.payload)
    worker_id = event.payload["worker_id"]
    points = event.payload["points"]
    if ts.status is not TaskStatus.COMPLETED:
        raise WrongStatus(f"task {ts.spec.task_id} is {ts.status.value}")
    if worker_id not in ts.selected or worker_id not in ts.submitted:
        raise NotParticipant(f"{worker_id} did not deliver {ts.spec.task_id}")
    if worker_id in ts.feedback:
        raise DuplicateFeedback(
            f"{worker_id} already rated for {ts.spec.task_id}"
        )
    if not isinstance(points, int) or not 0 <= points <= 100:
        raise InvalidProfile(f"rating points must lie in [0, 100], got {points}")


def _v_pay(state: LedgerState, event: LedgerEvent, store) -> None:
    ts = _get_task(state, event.payload)
    worker_id = event.payload["worker_id"]
    amount = event.payload["amount"]
    if ts.status is not TaskStatus.COMPLETED:
        raise WrongStatus(f"task {ts.spec.task_id} is {ts.status.value}")
    if worker_id not in ts.selected:
        raise NotParticipant(f"{worker_id} was not recruited for {ts.spec.task_id}")
    if not isinstance(amount, (int, float)) or amount < 0:
        raise InvalidProfile("amount must be non-negative")


# -- handlers (mutate state, return abstract cost) -----------------------


def _h_add_worker(state: LedgerState, event: LedgerEvent) -> int:
    profile = WorkerProfile.from_dict(event.payload["profile"])
    state.workers.register(profile)
    return 2 + len(profile.domains)


def _h_add_requester(state: LedgerState, event: LedgerEvent) -> int:
    state.requesters.add(event.payload["requester_id"])
    return 2


def _h_update_status(state: LedgerState, event: LedgerEvent) -> int:
    state.workers.set_status(
        event.payload["worker_id"], WorkerStatus(event.payload["status"])
    )
    return 2


def _h_update_info(state: LedgerState, event: LedgerEvent) -> int:
    from .core import ComputeProfile

    payload = event.payload
    compute = payload.get("compute")
    domains = payload.get("domains")
    state.workers.update_info(
        payload["worker_id"],
        compute=None if compute is None else ComputeProfile.from_dict(compute),
        domains=domains,
    )
    return 2 + (0 if domains is None else len(domains))


def _h_add_task(state: LedgerState, event: LedgerEvent) -> int:
    task = TaskSpec.from_dict(event.payload["task"])
    state.tasks[task.task_id] = TaskState(spec=task)
    return 3


def _apply_offer_counters(
    state: LedgerState, ts: TaskState, report: dict
) -> tuple[int, int]:
    domain = ts.spec.domain
    kind = ts.spec.kind
    selected = report["selected"]
    retractions = report.get("retractions", [])
    for worker_id, _reason in retractions:
        state.workers.record_outcome(worker_id, domain, kind, OutcomeKind.ASSIGNED)
    for worker_id in selected:
        state.workers.record_outcome(worker_id, domain, kind, OutcomeKind.ASSIGNED)
        state.workers.record_outcome(worker_id, domain, kind, OutcomeKind.ACCEPTED)
    return len(selected), len(retractions)


def _h_allocate_task(state: LedgerState, event: LedgerEvent) -> int:
    ts = state.tasks[event.payload["task_id"]]
    report = event.payload["report"]
    n_sel, n_ret = _apply_offer_counters(state, ts, report)
    ts.selected = list(report["selected"])
    ts.status = TaskStatus.ALLOCATED
    return _ranking_cost(
        len(report["ranked"]), len(report["rejected"]), n_sel, n_ret
    )


def _h_allocate_model(state: LedgerState, event: LedgerEvent) -> int:
    ts = state.tasks[event.payload["task_id"]]
    report = event.payload["report"]
    n_sel, _ = _apply_offer_counters(state, ts, report)
    ts.selected = list(report["selected"])
    ts.selected_models = [(w, c) for w, c in report["selected_models"]]
    ts.status = TaskStatus.ALLOCATED
    in_domain = len(state.models_in_domain(ts.spec.domain))
    return _ranking_cost(
        len(report["ranked"]), len(report["rejected"]), n_sel, n_sel
    ) + in_domain


def _h_update_task_status(state: LedgerState, event: LedgerEvent) -> int:
    ts = state.tasks[event.payload["task_id"]]
    ts.status = TaskStatus(event.payload["status"])
    return 2


def _h_submit_outcome(state: LedgerState, event: LedgerEvent) -> int:
    ts = state.tasks[event.payload["task_id"]]
    worker_id = event.payload["worker_id"]
    ts.submitted[worker_id] = event.payload["cid"]
    state.workers.record_outcome(
        worker_id, ts.spec.domain, ts.spec.kind, OutcomeKind.COMPLETED
    )
    cost = 4
    if set(ts.submitted) >= set(ts.selected):
        ts.status = TaskStatus.COMPLETED
        cost += 1
    return cost


def _h_add_model(state: LedgerState, event: LedgerEvent) -> int:
    model = ModelRecord.from_dict(event.payload["model"])
    state.models.append(model)
    state._model_keys.add((model.owner_id, model.cid))
    return 3


def _h_submit_feedback(state: LedgerState, event: LedgerEvent) -> int:
    ts = state.tasks[event.payload["task_id"]]
    worker_id = event.payload["worker_id"]
    points = int(event.payload["points"])
    ts.feedback[worker_id] = points
    state.workers.record_outcome(
        worker_id, ts.spec.domain, ts.spec.kind, OutcomeKind.RATED, points=points
    )
    return 4


def _h_pay(state: LedgerState, event: LedgerEvent) -> int:
    ts = state.tasks[event.payload["task_id"]]
    ts.paid[event.payload["worker_id"]] = float(event.payload["amount"])
    return 2


_VALIDATORS: dict[str, Callable] = {
    "AddWorker": _v_add_worker,
    "AddRequester": _v_add_requester,
    "UpdateStatus": _v_update_status,
    "UpdateInfo": _v_update_info,
    "AddTask": _v_add_task,
    "AllocateTask": _v_allocate_task,
    "UpdateTaskStatus": _v_update_task_status,
    "SubmitOutcome": _v_submit_outcome,
    "AddModel": _v_add_model,
    "AllocateModel": _v_allocate_model,
    "SubmitFeedback": _v_submit_feedback,
    "Pay": _v_pay,
}

_HANDLERS: dict[str, Callable] = {
    "AddWorker": _h_add_worker,
    "AddRequester": _h_add_requester,
    "UpdateStatus": _h_update_status,
    "UpdateInfo": _h_update_info,
    "AddTask": _h_add_task,
    "AllocateTask": _h_allocate_task,
    "UpdateTaskStatus": _h_update_task_status,
    "SubmitOutcome": _h_submit_outcome,
    "AddModel": _h_add_model,
    "AllocateModel": _h_allocate_model,
    "SubmitFeedback": _h_submit_feedback,
    "Pay": _h_pay,
}


# -- log file I/O --------------------------------------------------------

_LEN = struct.Struct(">I")


def write_log(path: str | Path, events: Iterable[LedgerEvent]) -> None:
    """Write a length-prefixed canonical record per event."""
    with open(path, "wb") as fh:
        for event in events:
            record = event.canonical_bytes()
            fh.write(_LEN.pack(len(record)))
            fh.write(record)


def iter_log(path: str | Path) -> Iterator[LedgerEvent]:
    with open(path, "rb") as fh:
        while True:
            head = fh.read(4)
            if not head:
                return
            if len(head) < 4:
                raise LedgerError("truncated record length")
            (length,) = _LEN.unpack(head)
            body = fh.read(length)
            if len(body) < length:
                raise LedgerError("truncated record body")
            try:
                d = json.loads(body.decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise LedgerError(f"corrupt record: {exc}") from exc
            try:
                event = LedgerEvent.from_dict(d)
            except (KeyError, TypeError, ValueError) as exc:
                raise LedgerError(f"corrupt record: {exc!r}") from exc
            yield event


def read_log(path: str | Path) -> list[LedgerEvent]:
    return list(iter_log(path))


def log_digest(events: Iterable[LedgerEvent]) -> str:
    """Hex SHA-256 over the concatenated canonical event bytes."""
    h = hashlib.sha256()
    for event in events:
        h.update(event.canonical_bytes())
    return h.hexdigest()


def replay(
    events: Iterable[LedgerEvent], store: BlobStore | None = None
) -> LedgerState:
    """Fold a gapless event sequence from genesis."""
    state = LedgerState()
    for event in events:
        state.apply(event, store=store)
    return state


class Ledger:
    """Single-writer front end: validates, appends, folds.

    ``store`` enables blob existence checks on submit.  The platform
    screening knobs (accepted GPU list, capability curvature, rating
    prior) are fixed per ledger so every allocation uses one policy.
    """

    def __init__(
        self,
        store: BlobStore | None = None,
        *,
        accepted_gpus: frozenset[str] = frozenset(),
        w1: float = DEFAULT_W1,
        rating_prior: float = DEFAULT_RATING_PRIOR,
    ) -> None:
        self.store = store
        self.accepted_gpus = frozenset(accepted_gpus)
        self.w1 = w1
        self.rating_prior = rating_prior
        self.state = LedgerState()
        self.events: list[LedgerEvent] = []

    @classmethod
    def from_log(
        cls, path: str | Path, store: BlobStore | None = None, **kwargs
    ) -> "Ledger":
        ledger = cls(store, **kwargs)
        for event in iter_log(path):
            ledger.state.apply(event, store=None)
            ledger.events.append(event)
        return ledger

    # -- core append -----------------------------------------------------

    def submit(
        self, call: str, actor: str, payload: dict, timestamp: int = 0
    ) -> LedgerEvent:
        """Validate and append one call; failures become rejected events."""
        if call not in _VALIDATORS:
            raise LedgerError(f"unknown call {call!r}")
        event = LedgerEvent(
            seq=self.state.last_seq + 1,
            timestamp=int(timestamp),
            actor=actor,
            call=call,
            payload=payload,
        )
        try:
            _VALIDATORS[call](self.state, event, self.store)
        except MarketError as exc:
            event.rejected = True
            event.reason = f"{type(exc).__name__}: {exc}"
        self.state.apply(event, store=self.store)
        self.events.append(event)
        return event

    # -- digests and persistence ----------------------------------------

    def state_digest(self) -> bytes:
        return self.state.state_digest()

    def log_digest(self) -> str:
        return log_digest(self.events)

    def save_log(self, path: str | Path) -> None:
        write_log(path, self.events)

    def snapshot(self) -> dict:
        """Deep, JSON-safe copy of the current state for readers."""
        return self.state.to_dict()

    # -- call wrappers ---------------------------------------------------

    def add_worker(self, profile: WorkerProfile, timestamp: int = 0) -> LedgerEvent:
        return self.submit(
            "AddWorker", profile.worker_id, {"profile": profile.to_dict()}, timestamp
        )

    def add_requester(self, requester_id: str, timestamp: int = 0) -> LedgerEvent:
        return self.submit(
            "AddRequester", requester_id, {"requester_id": requester_id}, timestamp
        )

    def update_status(
        self, worker_id: str, status: WorkerStatus | str, timestamp: int = 0
    ) -> LedgerEvent:
        value = status.value if isinstance(status, WorkerStatus) else str(status)
        return self.submit(
            "UpdateStatus", worker_id, {"worker_id": worker_id, "status": value},
            timestamp,
        )

    def update_info(
        self,
        worker_id: str,
        compute=None,
        domains: Iterable[int] | None = None,
        timestamp: int = 0,
    ) -> LedgerEvent:
        payload: dict = {"worker_id": worker_id}
        payload["compute"] = None if compute is None else compute.to_dict()
        payload["domains"] = None if domains is None else sorted(int(d) for d in domains)
        return self.submit("UpdateInfo", worker_id, payload, timestamp)

    def add_task(self, task: TaskSpec, timestamp: int = 0) -> LedgerEvent:
        return self.submit(
            "AddTask", task.requester_id, {"task": task.to_dict()}, timestamp
        )

    def allocate_task(
        self,
        task_id: str,
        oracle: allocation.OfferOracle | None = None,
        acceptance_window: float | None = None,
        timestamp: int = 0,
    ) -> tuple[LedgerEvent, allocation.SelectionReport]:
        """Recruit for a pending training task and log the result.

        Runs the ranking and offer walk against current state, then
        appends an event that echoes the full selection report; replay
        applies the echo instead of re-running the search.  Allocation
        failures (nobody eligible, offers exhausted) are logged as
        rejected events and re-raised for the caller to handle.
        """
        ts = self.state.task(task_id)
        oracle = oracle or (lambda _w, _t, _win: allocation.OfferResponse.ACCEPT)
        try:
            report = allocation.allocate_with_retraction(
                self.state.workers,
                ts.spec,
                oracle,
                accepted_gpus=self.accepted_gpus,
                w1=self.w1,
                rating_prior=self.rating_prior,
                acceptance_window=acceptance_window,
            )
        except allocation.AllocationError as exc:
            payload: dict = {"task_id": task_id, "report": None}
            if isinstance(exc, allocation.PoolExhausted):
                payload["report"] = exc.report.to_dict()
            event = LedgerEvent(
                seq=self.state.last_seq + 1,
                timestamp=int(timestamp),
                actor=ts.spec.requester_id,
                call="AllocateTask",
                payload=payload,
                rejected=True,
                reason=f"{type(exc).__name__}: {exc}",
            )
            self.state.apply(event, store=self.store)
            self.events.append(event)
            raise
        event = self.submit(
            "AllocateTask",
            ts.spec.requester_id,
            {"task_id": task_id, "report": report.to_dict()},
            timestamp,
        )
        return event, report

    def update_task_status(
        self, task_id: str, status: TaskStatus | str, timestamp: int = 0
    ) -> LedgerEvent:
        value = status.value if isinstance(status, TaskStatus) else str(status)
        actor = (
            self.state.tasks[task_id].spec.requester_id
            if task_id in self.state.tasks
            else task_id
        )
        return self.submit(
            "UpdateTaskStatus", actor, {"task_id": task_id, "status": value},
            timestamp,
        )

    def submit_outcome(
        self, task_id: str, worker_id: str, cid: str, timestamp: int = 0
    ) -> LedgerEvent:
        return self.submit(
            "SubmitOutcome", worker_id,
            {"task_id": task_id, "worker_id": worker_id, "cid": cid},
            timestamp,
        )

    def add_model(self, model: ModelRecord, timestamp: int = 0) -> LedgerEvent:
        return self.submit(
            "AddModel", model.owner_id, {"model": model.to_dict()}, timestamp
        )

    def allocate_model(
        self,
        task_id: str,
        weights=None,
        timestamp: int = 0,
    ) -> tuple[LedgerEvent, allocation.SelectionReport]:
        """Pick shared models for a pending sharing task and log the result."""
        ts = self.state.task(task_id)
        try:
            report = allocation.allocate_models(
                self.state.workers,
                ts.spec,
                self.state.models_in_domain(ts.spec.domain),
                weights=weights,
                rating_prior=self.rating_prior,
            )
        except allocation.AllocationError as exc:
            event = LedgerEvent(
                seq=self.state.last_seq + 1,
                timestamp=int(timestamp),
                actor=ts.spec.requester_id,
                call="AllocateModel",
                payload={"task_id": task_id, "report": None},
                rejected=True,
                reason=f"{type(exc).__name__}: {exc}",
            )
            self.state.apply(event, store=self.store)
            self.events.append(event)
            raise
        event = self.submit(
            "AllocateModel",
            ts.spec.requester_id,
            {"task_id": task_id, "report": report.to_dict()},
            timestamp,
        )
        return event, report

    def submit_feedback(
        self, task_id: str, worker_id: str, points: int, timestamp: int = 0
    ) -> LedgerEvent:
        actor = (
            self.state.tasks[task_id].spec.requester_id
            if task_id in self.state.tasks
            else worker_id
        )
        return self.submit(
            "SubmitFeedback", actor,
            {"task_id": task_id, "worker_id": worker_id, "points": int(points)},
            timestamp,
        )

    def pay(
        self, task_id: str, worker_id: str, amount: float, timestamp: int = 0
    ) -> LedgerEvent:
        actor = (
            self.state.tasks[task_id].spec.requester_id
            if task_id in self.state.tasks
            else worker_id
        )
        return self.submit(
            "Pay", actor,
            {"task_id": task_id, "worker_id": worker_id, "amount": float(amount)},
            timestamp,
        )
