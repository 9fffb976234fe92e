"""Recruitment metrics and constraint predicates.

All functions here are pure and stateless.  For a training task a candidate's
quality-of-service score is the product of four normalized attributes:
expertise (completed tasks relative to the candidate pool's best), reputation
(geometric mean of commitment and completion rates), the averaged review
rating, and a saturating arctangent transform of the CPU core count.  For a
model-sharing task the compute factor is replaced by dividing through
``1 + similarity``, where similarity is a weighted absolute difference over
environment feature vectors (0 means identical environments, lower is more
similar).

Cold-start rules: a metric whose denominator would be zero evaluates to 1
(vacuous commitment/completion, empty expertise pool), and a worker with no
reviews gets the configurable ``rating_prior`` (default 0.5) rather than a
hard exclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .core import (
    RATING_SCALE,
    MarketError,
    PerfCounters,
    TaskSpec,
    TaskType,
    WorkerProfile,
)

# Stretch of the arctangent compute-capability curve.  Low values keep the
# curve differentiating between workers with many cores, which is the regime
# heavy training tasks care about.
DEFAULT_W1 = 0.1

# Normalized rating assumed for a worker that has never been reviewed.
DEFAULT_RATING_PRIOR = 0.5


class BoundViolation(MarketError):
    pass


class DimensionMismatch(MarketError):
    pass


def expertise(worker_completed: int, pool_max_completed: int) -> float:
    """Completed-task count normalized by the candidate pool's maximum.

    When nobody in the pool has completed anything the pool carries no
    signal, so everyone scores 1.0.
    """
    if worker_completed < 0 or pool_max_completed < 0:
        raise BoundViolation("counts must be non-negative")
    if pool_max_completed == 0:
        return 1.0
    return worker_completed / pool_max_completed


def commitment_rate(accepted: int, assigned: int) -> float:
    """Fraction of assigned tasks the worker accepted; 1.0 with no history."""
    if accepted < 0 or assigned < 0 or accepted > assigned:
        raise BoundViolation(f"need 0 <= accepted <= assigned, got {accepted}/{assigned}")
    if assigned == 0:
        return 1.0
    return accepted / assigned


def completion_rate(completed: int, accepted: int) -> float:
    """Fraction of accepted tasks the worker completed; 1.0 with no history."""
    if completed < 0 or accepted < 0 or completed > accepted:
        raise BoundViolation(f"need 0 <= completed <= accepted, got {completed}/{accepted}")
    if accepted == 0:
        return 1.0
    return completed / accepted


def reputation(cm: float, cp: float) -> float:
    """Geometric mean of commitment and completion rates."""
    if not (0.0 <= cm <= 1.0 and 0.0 <= cp <= 1.0):
        raise BoundViolation(f"rates must lie in [0, 1], got cm={cm} cp={cp}")
    return math.sqrt(cm * cp)


def rating(counters_sum: int, counters_count: int, prior: float = DEFAULT_RATING_PRIOR) -> float:
    """Average review rating normalized to [0, 1]; ``prior`` with no reviews."""
    if counters_count == 0:
        return prior
    return counters_sum / (RATING_SCALE * counters_count)


def compute_capability(cpu_cores: int, w1: float = DEFAULT_W1) -> float:
    """Saturating arctangent transform of the CPU core count, in [0, 1)."""
    if cpu_cores < 0:
        raise BoundViolation("cpu_cores must be non-negative")
    if w1 <= 0:
        raise BoundViolation("w1 must be positive")
    return (2.0 / math.pi) * math.atan(w1 * cpu_cores)


def training_qos(exp: float, rep: float, rat: float, cc: float) -> float:
    """Product of the four training attributes, each in [0, 1]."""
    for name, v in (("expertise", exp), ("reputation", rep), ("rating", rat), ("compute", cc)):
        if not 0.0 <= v <= 1.0:
            raise BoundViolation(f"{name} out of [0, 1]: {v}")
    return exp * rep * rat * cc


@dataclass(frozen=True)
class SimilarityWeights:
    """Non-negative per-feature weights summing to 1."""

    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(w < 0 for w in self.weights):
            raise BoundViolation("similarity weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise BoundViolation(f"similarity weights must sum to 1, got {sum(self.weights)}")

    @classmethod
    def uniform(cls, d: int) -> "SimilarityWeights":
        if d < 1:
            raise BoundViolation("need at least one feature")
        return cls(tuple(1.0 / d for _ in range(d)))


def model_similarity(
    model_features: Sequence[float],
    task_features: Sequence[float],
    weights: SimilarityWeights,
) -> float:
    """Weighted sum of absolute feature differences; 0 means identical."""
    if len(model_features) != len(task_features) or len(model_features) != len(weights.weights):
        raise DimensionMismatch(
            f"feature dimensions differ: model={len(model_features)} "
            f"task={len(task_features)} weights={len(weights.weights)}"
        )
    total = 0.0
    for w, fm, ft in zip(weights.weights, model_features, task_features):
        total += w * abs(fm - ft)
    return total


def sharing_qos(exp: float, rep: float, rat: float, similarity: float) -> float:
    """Expertise x reputation x rating, damped by 1 + environment distance."""
    for name, v in (("expertise", exp), ("reputation", rep), ("rating", rat)):
        if not 0.0 <= v <= 1.0:
            raise BoundViolation(f"{name} out of [0, 1]: {v}")
    if similarity < 0:
        raise BoundViolation(f"similarity must be non-negative, got {similarity}")
    return (exp * rep * rat) / (1.0 + similarity)


@dataclass
class ScoreBreakdown:
    """Per-candidate component scores plus the combined QoS.

    Exactly one of ``compute_capability`` (training) and ``similarity``
    (model sharing) is set.
    """

    expertise: float
    reputation: float
    rating: float
    compute_capability: float | None = None
    similarity: float | None = None
    qos: float = 0.0

    def recombine(self) -> float:
        """Recompute qos from the components (consistency check)."""
        if self.compute_capability is not None:
            return self.expertise * self.reputation * self.rating * self.compute_capability
        assert self.similarity is not None
        return (self.expertise * self.reputation * self.rating) / (1.0 + self.similarity)

    def to_dict(self) -> dict:
        return {
            "expertise": self.expertise,
            "reputation": self.reputation,
            "rating": self.rating,
            "compute_capability": self.compute_capability,
            "similarity": self.similarity,
            "qos": self.qos,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ScoreBreakdown":
        return cls(
            expertise=d["expertise"],
            reputation=d["reputation"],
            rating=d["rating"],
            compute_capability=d.get("compute_capability"),
            similarity=d.get("similarity"),
            qos=d["qos"],
        )


def derived_rates(counters: PerfCounters, prior: float = DEFAULT_RATING_PRIOR):
    """(cm, cp, rep, rating) derived from one counter cell."""
    cm = commitment_rate(counters.accepted, counters.assigned)
    cp = completion_rate(counters.completed, counters.accepted)
    rep = reputation(cm, cp)
    rat = rating(counters.rating_sum, counters.rating_count, prior)
    return cm, cp, rep, rat


def training_breakdown(
    worker: WorkerProfile,
    task: TaskSpec,
    pool_max_completed: int,
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> ScoreBreakdown:
    """Full training-task score for one worker against one task."""
    cell = worker.peek_counters(task.domain, TaskType.TRAINING)
    _, _, rep, rat = derived_rates(cell, rating_prior)
    exp = expertise(cell.completed, pool_max_completed)
    cc = compute_capability(worker.compute.cpu_cores, w1)
    return ScoreBreakdown(
        expertise=exp,
        reputation=rep,
        rating=rat,
        compute_capability=cc,
        qos=training_qos(exp, rep, rat, cc),
    )


def sharing_breakdown(
    worker: WorkerProfile,
    task: TaskSpec,
    pool_max_completed: int,
    similarity: float,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> ScoreBreakdown:
    """Full sharing-task score for one (worker, model) pair."""
    cell = worker.peek_counters(task.domain, TaskType.MODEL_SHARING)
    _, _, rep, rat = derived_rates(cell, rating_prior)
    exp = expertise(cell.completed, pool_max_completed)
    return ScoreBreakdown(
        expertise=exp,
        reputation=rep,
        rating=rat,
        similarity=similarity,
        qos=sharing_qos(exp, rep, rat, similarity),
    )


def training_constraints_ok(
    worker: WorkerProfile,
    task: TaskSpec,
    accepted_gpus: frozenset[str] | set[str],
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> tuple[bool, list[str]]:
    """Check the training-task constraint list; floors are inclusive.

    Returns (ok, violations) with one short label per failed predicate:
    "reputation", "rating", "domain", "cpu", "ram", "gpu".  An empty
    ``accepted_gpus`` set means the platform imposes no GPU requirement.
    """
    violations = []
    cell = worker.peek_counters(task.domain, TaskType.TRAINING)
    _, _, rep, rat = derived_rates(cell, rating_prior)
    if rep < task.min_reputation:
        violations.append("reputation")
    if rat < task.min_rating:
        violations.append("rating")
    if task.domain not in worker.domains:
        violations.append("domain")
    req = task.compute_req
    if req is not None:
        if worker.compute.cpu_cores < req.cpu_cores:
            violations.append("cpu")
        if worker.compute.ram_gb < req.ram_gb:
            violations.append("ram")
    if accepted_gpus:
        if worker.compute.gpu_series is None or worker.compute.gpu_series not in accepted_gpus:
            violations.append("gpu")
    return (not violations, violations)


def sharing_constraints_ok(
    worker: WorkerProfile,
    task: TaskSpec,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> tuple[bool, list[str]]:
    """Check the sharing-task constraints: reputation, rating, domain."""
    violations = []
    cell = worker.peek_counters(task.domain, TaskType.MODEL_SHARING)
    _, _, rep, rat = derived_rates(cell, rating_prior)
    if rep < task.min_reputation:
        violations.append("reputation")
    if rat < task.min_rating:
        violations.append("rating")
    if task.domain not in worker.domains:
        violations.append("domain")
    return (not violations, violations)
