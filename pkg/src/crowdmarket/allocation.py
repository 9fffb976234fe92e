"""Worker recruitment: filtering, ranking and allocation.

The recruitment pipeline is the same for every selection method:

1. ``eligible_pool`` screens every registered worker against the task's
   hard constraints and records per-worker violation labels.
2. ``score_pool`` computes a quality-of-service breakdown per eligible
   worker (training tasks; model sharing is ranked per model pair).
3. A selector picks the requested group size.  ``greedy_select`` takes the
   top of the ranking, which is exact for a mean-of-scores objective; the
   metaheuristic selectors live in :mod:`crowdmarket.metaheuristics`.
4. ``allocate_with_retraction`` additionally walks the ranking with real
   offers, replacing every decliner or no-show with the next candidate.

Every selector returns a :class:`SelectionReport`, a self-contained audit
record that serializes canonically and exports to CSV.
"""

from __future__ import annotations

import csv
import enum
import io
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .core import (
    MarketError,
    ModelRecord,
    OutcomeKind,
    TaskSpec,
    TaskType,
    WorkerProfile,
    WorkerRegistry,
    WorkerStatus,
)
from .scoring import (
    DEFAULT_RATING_PRIOR,
    DEFAULT_W1,
    ScoreBreakdown,
    SimilarityWeights,
    model_similarity,
    sharing_breakdown,
    sharing_constraints_ok,
    training_breakdown,
    training_constraints_ok,
)
from .serialize import canon_bytes, sha256_hex


class AllocationError(MarketError):
    """Base class for recruitment failures."""


class EmptyDomain(AllocationError):
    """No registered worker passes the task's constraints."""


class PoolExhausted(AllocationError):
    """Offers ran out of candidates before the group was filled.

    Carries the partial :class:`SelectionReport` in ``report``.
    """

    def __init__(self, message: str, report: "SelectionReport") -> None:
        super().__init__(message)
        self.report = report


class NoModels(AllocationError):
    """No shareable model from an eligible owner matches the task."""


class OfferResponse(enum.Enum):
    """A worker's reaction to a task offer."""

    ACCEPT = "accept"
    DECLINE = "decline"
    TIMEOUT = "timeout"


# oracle args: worker id, task, acceptance window
OfferOracle = Callable[[str, TaskSpec, float], OfferResponse]


@dataclass
class RankedEntry:
    """One scored candidate; ``cid`` set when ranking (owner, model) pairs."""

    worker_id: str
    breakdown: ScoreBreakdown
    cid: str | None = None

    def to_dict(self) -> dict:
        d = {"worker_id": self.worker_id, "breakdown": self.breakdown.to_dict()}
        if self.cid is not None:
            d["cid"] = self.cid
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RankedEntry":
        return cls(
            worker_id=d["worker_id"],
            breakdown=ScoreBreakdown.from_dict(d["breakdown"]),
            cid=d.get("cid"),
        )


@dataclass
class SelectionReport:
    """Audit record of one allocation round.

    ``ranked`` lists every eligible candidate best first, ``selected`` the
    recruited workers in recruitment order, ``rejected`` the screened-out
    workers with their violation labels, and ``retractions`` the offers
    that were declined or timed out.  ``shortfall`` marks a group smaller
    than requested.
    """

    task_id: str
    method: str
    ranked: list[RankedEntry] = field(default_factory=list)
    selected: list[str] = field(default_factory=list)
    rejected: list[tuple[str, tuple[str, ...]]] = field(default_factory=list)
    retractions: list[tuple[str, str]] = field(default_factory=list)
    selected_models: list[tuple[str, str]] | None = None
    shortfall: bool = False

    def to_dict(self) -> dict:
        d = {
            "task_id": self.task_id,
            "method": self.method,
            "ranked": [e.to_dict() for e in self.ranked],
            "selected": list(self.selected),
            "rejected": [[w, list(v)] for w, v in self.rejected],
            "retractions": [[w, r] for w, r in self.retractions],
            "shortfall": self.shortfall,
        }
        if self.selected_models is not None:
            d["selected_models"] = [[w, c] for w, c in self.selected_models]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SelectionReport":
        models = d.get("selected_models")
        return cls(
            task_id=d["task_id"],
            method=d["method"],
            ranked=[RankedEntry.from_dict(e) for e in d["ranked"]],
            selected=list(d["selected"]),
            rejected=[(w, tuple(v)) for w, v in d["rejected"]],
            retractions=[(w, r) for w, r in d["retractions"]],
            selected_models=None if models is None else [(w, c) for w, c in models],
            shortfall=d["shortfall"],
        )

    def canonical_bytes(self) -> bytes:
        return canon_bytes(self.to_dict())

    def digest(self) -> str:
        return sha256_hex(self.canonical_bytes())

    def write_csv(self, dest) -> None:
        """One row per candidate, eligible first, then the screened-out.

        ``dest`` is a text file object or a path.
        """
        if not hasattr(dest, "write"):
            with open(dest, "w", newline="", encoding="utf-8") as fh:
                self.write_csv(fh)
            return
        writer = csv.writer(dest)
        writer.writerow([
            "rank", "worker_id", "cid", "qos", "expertise", "reputation",
            "rating", "compute_capability", "similarity", "outcome", "detail",
        ])
        retracted = dict(self.retractions)
        chosen = set(self.selected)
        if self.selected_models is not None:
            chosen_pairs = set(self.selected_models)
        for rank, e in enumerate(self.ranked, start=1):
            b = e.breakdown
            if self.selected_models is not None:
                picked = (e.worker_id, e.cid) in chosen_pairs
            else:
                picked = e.worker_id in chosen
            if picked:
                outcome, detail = "selected", ""
            elif e.worker_id in retracted:
                outcome, detail = "retracted", retracted[e.worker_id]
            else:
                outcome, detail = "ranked", ""
            writer.writerow([
                rank, e.worker_id, e.cid or "",
                repr(b.qos), repr(b.expertise), repr(b.reputation),
                repr(b.rating),
                "" if b.compute_capability is None else repr(b.compute_capability),
                "" if b.similarity is None else repr(b.similarity),
                outcome, detail,
            ])
        for worker_id, violations in self.rejected:
            writer.writerow([
                "", worker_id, "", "", "", "", "", "", "",
                "rejected", "|".join(violations),
            ])

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def eligible_pool(
    registry: WorkerRegistry,
    task: TaskSpec,
    *,
    accepted_gpus: frozenset[str] = frozenset(),
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> tuple[list[WorkerProfile], list[tuple[str, tuple[str, ...]]]]:
    """Screen all registered workers against the task's hard constraints.

    Returns the eligible workers and the rejected ``(worker_id, labels)``
    pairs, both ordered by worker id.  Inactive workers are rejected with
    the label ``"status"`` ahead of any metric violations.
    """
    pool = []
    rejected = []
    for worker in registry:
        labels: list[str] = []
        if worker.status is not WorkerStatus.ACTIVE:
            labels.append("status")
        if task.kind is TaskType.TRAINING:
            _, violations = training_constraints_ok(
                worker, task, accepted_gpus=accepted_gpus, rating_prior=rating_prior
            )
        else:
            _, violations = sharing_constraints_ok(
                worker, task, rating_prior=rating_prior
            )
        labels.extend(violations)
        if labels:
            rejected.append((worker.worker_id, tuple(labels)))
        else:
            pool.append(worker)
    pool.sort(key=lambda w: w.worker_id)
    rejected.sort(key=lambda pair: pair[0])
    return pool, rejected


def pool_max_completed(pool: Iterable[WorkerProfile], task: TaskSpec) -> int:
    """Largest completed-task count in the pool for the task's domain/kind."""
    best = 0
    for worker in pool:
        done = worker.peek_counters(task.domain, task.kind).completed
        if done > best:
            best = done
    return best


def score_pool(
    task: TaskSpec,
    pool: Sequence[WorkerProfile],
    *,
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> list[ScoreBreakdown]:
    """Training-task score breakdowns aligned with ``pool`` order."""
    if task.kind is not TaskType.TRAINING:
        raise AllocationError("score_pool handles training tasks only")
    top = pool_max_completed(pool, task)
    return [
        training_breakdown(w, task, top, w1=w1, rating_prior=rating_prior)
        for w in pool
    ]


def rank_entries(
    pool: Sequence[WorkerProfile], scores: Sequence[ScoreBreakdown]
) -> list[RankedEntry]:
    """Candidates ordered best first; ties broken by worker id."""
    entries = [
        RankedEntry(worker_id=w.worker_id, breakdown=b)
        for w, b in zip(pool, scores)
    ]
    entries.sort(key=lambda e: (-e.breakdown.qos, e.worker_id))
    return entries


def greedy_select(
    registry: WorkerRegistry,
    task: TaskSpec,
    *,
    nw: int | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> SelectionReport:
    """Pick the top scorers outright.

    For an objective that is the mean of per-worker scores the sorted
    prefix is the exact optimum, so this is the reference selector the
    metaheuristics are judged against.  Raises :class:`EmptyDomain` when
    nobody is eligible; a pool smaller than the group size yields a
    shortfall report rather than an error.
    """
    group = task.num_workers if nw is None else nw
    if group < 1:
        raise AllocationError("group size must be >= 1")
    pool, rejected = eligible_pool(
        registry, task, accepted_gpus=accepted_gpus, rating_prior=rating_prior
    )
    if not pool:
        raise EmptyDomain(f"no eligible workers for task {task.task_id}")
    scores = score_pool(task, pool, w1=w1, rating_prior=rating_prior)
    ranked = rank_entries(pool, scores)
    chosen = [e.worker_id for e in ranked[:group]]
    return SelectionReport(
        task_id=task.task_id,
        method="greedy",
        ranked=ranked,
        selected=chosen,
        rejected=rejected,
        shortfall=len(chosen) < group,
    )


def default_acceptance_window(task: TaskSpec) -> float:
    """Offer response deadline: a tenth of the task's time budget."""
    return task.time_constraint / 10.0


def allocate_with_retraction(
    registry: WorkerRegistry,
    task: TaskSpec,
    oracle: OfferOracle,
    *,
    nw: int | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
    acceptance_window: float | None = None,
    apply_counters: bool = False,
) -> SelectionReport:
    """Offer slots down the ranking until the group is filled.

    Each candidate in ranking order receives an offer and answers through
    ``oracle``; decliners and no-shows are retracted and the next
    candidate is tried.  With ``apply_counters`` every offer bumps the
    worker's assigned counter and every acceptance its accepted counter
    (callers that log the report into the event ledger leave this off and
    let replay apply the counters).  Raises :class:`EmptyDomain` when
    nobody is eligible and :class:`PoolExhausted` (carrying the partial
    report) when offers run out before the group is filled.
    """
    group = task.num_workers if nw is None else nw
    if group < 1:
        raise AllocationError("group size must be >= 1")
    window = (
        default_acceptance_window(task)
        if acceptance_window is None
        else acceptance_window
    )
    pool, rejected = eligible_pool(
        registry, task, accepted_gpus=accepted_gpus, rating_prior=rating_prior
    )
    if not pool:
        raise EmptyDomain(f"no eligible workers for task {task.task_id}")
    scores = score_pool(task, pool, w1=w1, rating_prior=rating_prior)
    ranked = rank_entries(pool, scores)

    selected: list[str] = []
    retractions: list[tuple[str, str]] = []
    for entry in ranked:
        if len(selected) == group:
            break
        response = oracle(entry.worker_id, task, window)
        if apply_counters:
            registry.record_outcome(
                entry.worker_id, task.domain, task.kind, OutcomeKind.ASSIGNED
            )
        if response is OfferResponse.ACCEPT:
            selected.append(entry.worker_id)
            if apply_counters:
                registry.record_outcome(
                    entry.worker_id, task.domain, task.kind, OutcomeKind.ACCEPTED
                )
        elif response is OfferResponse.DECLINE:
            retractions.append((entry.worker_id, "declined"))
        else:
            retractions.append((entry.worker_id, "timeout"))

    report = SelectionReport(
        task_id=task.task_id,
        method="greedy-retraction",
        ranked=ranked,
        selected=selected,
        rejected=rejected,
        retractions=retractions,
        shortfall=len(selected) < group,
    )
    if report.shortfall:
        raise PoolExhausted(
            f"task {task.task_id}: {len(selected)} of {group} slots filled",
            report,
        )
    return report


def allocate_models(
    registry: WorkerRegistry,
    task: TaskSpec,
    models: Sequence[ModelRecord],
    *,
    nw: int | None = None,
    weights: SimilarityWeights | None = None,
    rating_prior: float = DEFAULT_RATING_PRIOR,
    one_per_owner: bool = True,
    apply_counters: bool = False,
) -> SelectionReport:
    """Rank shared models by owner quality and environment similarity.

    Each in-domain model of an eligible, registered owner becomes a
    candidate pair; pairs are ranked by the sharing score, which shrinks
    as the model's environment drifts from the task's.  By default an
    owner contributes only their best pair.  Raises :class:`NoModels`
    when no rankable pair exists.
    """
    if task.kind is not TaskType.MODEL_SHARING:
        raise AllocationError("allocate_models handles model-sharing tasks only")
    group = task.num_workers if nw is None else nw
    if group < 1:
        raise AllocationError("group size must be >= 1")
    if task.env_features is None:
        raise AllocationError("task lacks environment features")
    sim_weights = (
        SimilarityWeights.uniform(len(task.env_features))
        if weights is None
        else weights
    )

    _, rejected = eligible_pool(registry, task, rating_prior=rating_prior)
    rejected_ids = {w for w, _ in rejected}
    candidates: list[tuple[WorkerProfile, ModelRecord]] = []
    for model in models:
        if model.domain != task.domain:
            continue
        try:
            owner = registry.get(model.owner_id)
        except MarketError:
            continue
        if owner.worker_id in rejected_ids:
            continue
        candidates.append((owner, model))
    if not candidates:
        raise NoModels(f"no eligible shared model for task {task.task_id}")

    owners = {w.worker_id: w for w, _ in candidates}
    top = pool_max_completed(owners.values(), task)
    entries = []
    for owner, model in candidates:
        sim = model_similarity(model.env_features, task.env_features, sim_weights)
        breakdown = sharing_breakdown(
            owner, task, top, sim, rating_prior=rating_prior
        )
        entries.append(
            RankedEntry(worker_id=owner.worker_id, breakdown=breakdown, cid=model.cid)
        )
    entries.sort(key=lambda e: (-e.breakdown.qos, e.worker_id, e.cid))

    chosen: list[tuple[str, str]] = []
    seen_owner: set[str] = set()
    for e in entries:
        if len(chosen) == group:
            break
        if one_per_owner and e.worker_id in seen_owner:
            continue
        chosen.append((e.worker_id, e.cid or ""))
        seen_owner.add(e.worker_id)

    if apply_counters:
        for worker_id, _cid in chosen:
            registry.record_outcome(
                worker_id, task.domain, task.kind, OutcomeKind.ASSIGNED
            )
            registry.record_outcome(
                worker_id, task.domain, task.kind, OutcomeKind.ACCEPTED
            )

    return SelectionReport(
        task_id=task.task_id,
        method="greedy-models",
        ranked=entries,
        selected=[w for w, _ in chosen],
        rejected=rejected,
        selected_models=chosen,
        shortfall=len(chosen) < group,
    )
