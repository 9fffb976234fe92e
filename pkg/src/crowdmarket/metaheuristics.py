"""Metaheuristic and baseline selectors.

The greedy ranking in :mod:`crowdmarket.allocation` is exact for the
mean-score objective, so the population-based searches here exist as
comparison subjects and as templates for richer objectives.  Each selector
comes in two layers:

* a pick-level function (``ga_pick``, ``pso_pick``, ``aco_pick``,
  ``greedy_pick``) that operates on a prepared score vector and returns
  candidate indices; benchmarks time exactly this stage so the shared
  screening and scoring work cancels out of method comparisons;
* a registry-level wrapper (``ga_select`` and friends) that screens and
  scores like greedy does and wraps the result in a
  :class:`~crowdmarket.allocation.SelectionReport`.

Search budgets and operator knobs live in config dataclasses and are
never hard-coded; identical config and seed give an identical run on
either kernel backend.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .allocation import (
    EmptyDomain,
    RankedEntry,
    SelectionReport,
    eligible_pool,
    score_pool,
)
from .core import MarketError, TaskSpec, WorkerProfile, WorkerRegistry
from .scoring import DEFAULT_RATING_PRIOR, DEFAULT_W1, ScoreBreakdown


class ConfigInvalid(MarketError):
    """An optimizer config field is out of range."""


@dataclass(frozen=True)
class OptimizerConfig:
    """Search budget shared by every population-based method."""

    population_size: int = 50
    iterations: int = 200
    seed: int = 0

    def __post_init__(self) -> None:
        if self.population_size < 2:
            raise ConfigInvalid("population_size must be >= 2")
        if self.iterations < 1:
            raise ConfigInvalid("iterations must be >= 1")


def _check_rate(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise ConfigInvalid(f"{name} must lie in [0, 1], got {value}")


@dataclass(frozen=True)
class GAConfig(OptimizerConfig):
    """Genetic algorithm knobs; tournament size and elitism stay small."""

    crossover_rate: float = 0.9
    mutation_rate: float = 0.5
    tournament_k: int = 3
    elitism: int = 1

    def __post_init__(self) -> None:
        super().__post_init__()
        _check_rate("crossover_rate", self.crossover_rate)
        _check_rate("mutation_rate", self.mutation_rate)
        if self.tournament_k < 1:
            raise ConfigInvalid("tournament_k must be >= 1")
        if not 0 <= self.elitism < self.population_size:
            raise ConfigInvalid("elitism must lie in [0, population_size)")


@dataclass(frozen=True)
class PSOConfig(OptimizerConfig):
    """Particle swarm coefficients (inertia, personal pull, global pull).

    The continuous-position decode makes this the noisiest of the three
    searches, so its default budget runs longer than the shared one.
    """

    iterations: int = 300
    inertia: float = 0.7
    cognitive: float = 1.5
    social: float = 1.5

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.inertia < 0.0 or self.cognitive < 0.0 or self.social < 0.0:
            raise ConfigInvalid("PSO coefficients must be non-negative")


@dataclass(frozen=True)
class ACOConfig(OptimizerConfig):
    """Ant colony knobs; pheromone sits on candidates, not edges."""

    evaporation: float = 0.1
    deposit: float = 1.0
    alpha: float = 1.0
    beta: float = 2.0

    def __post_init__(self) -> None:
        super().__post_init__()
        _check_rate("evaporation", self.evaporation)
        if self.evaporation >= 1.0:
            raise ConfigInvalid("evaporation must be < 1")
        if self.deposit < 0.0 or self.alpha < 0.0 or self.beta < 0.0:
            raise ConfigInvalid("deposit, alpha and beta must be non-negative")


METAHEURISTICS = ("ga", "pso", "aco")
BASELINES = ("reputation", "cpu", "random")
ALL_METHODS = ("greedy",) + METAHEURISTICS + BASELINES


def default_config(method: str) -> OptimizerConfig:
    if method == "ga":
        return GAConfig()
    if method == "pso":
        return PSOConfig()
    if method == "aco":
        return ACOConfig()
    raise ConfigInvalid(f"no optimizer config for method {method!r}")


def greedy_pick(qos: Sequence[float], nw: int) -> list[int]:
    """Indices of the ``nw`` best scores, ties to the lower index."""
    n = len(qos)
    if nw >= n:
        return list(range(n))
    # stable reverse sort: equal scores keep ascending index order
    order = sorted(range(n), key=qos.__getitem__, reverse=True)
    head = order[:nw]
    head.sort()
    return head


def _full_set(qos: Sequence[float]) -> tuple[list[int], float, list[float]]:
    # the only feasible group: no search to run
    idx = list(range(len(qos)))
    fit = sum(qos[i] for i in idx) / len(idx) if idx else 0.0
    return idx, fit, [fit]


def ga_pick(
    qos: Sequence[float], nw: int, config: GAConfig | None = None
) -> tuple[list[int], float, list[float]]:
    cfg = GAConfig() if config is None else config
    if nw >= len(qos):
        return _full_set(qos)
    try:
        return _kernels.ga_evolve(
            qos, nw, cfg.population_size, cfg.iterations,
            cfg.crossover_rate, cfg.mutation_rate,
            cfg.tournament_k, cfg.elitism, cfg.seed,
        )
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from None


def pso_pick(
    qos: Sequence[float], nw: int, config: PSOConfig | None = None
) -> tuple[list[int], float, list[float]]:
    cfg = PSOConfig() if config is None else config
    if nw >= len(qos):
        return _full_set(qos)
    try:
        return _kernels.pso_evolve(
            qos, nw, cfg.population_size, cfg.iterations,
            cfg.inertia, cfg.cognitive, cfg.social, cfg.seed,
        )
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from None


def aco_pick(
    qos: Sequence[float], nw: int, config: ACOConfig | None = None
) -> tuple[list[int], float, list[float]]:
    cfg = ACOConfig() if config is None else config
    if nw >= len(qos):
        return _full_set(qos)
    try:
        return _kernels.aco_evolve(
            qos, nw, cfg.population_size, cfg.iterations,
            cfg.evaporation, cfg.deposit, cfg.alpha, cfg.beta, cfg.seed,
        )
    except ValueError as exc:
        raise ConfigInvalid(str(exc)) from None


def _prepare(
    registry: WorkerRegistry,
    task: TaskSpec,
    nw: int | None,
    accepted_gpus: frozenset[str],
    w1: float,
    rating_prior: float,
) -> tuple[list[WorkerProfile], list, list[ScoreBreakdown], int]:
    group = task.num_workers if nw is None else nw
    if group < 1:
        raise ConfigInvalid("group size must be >= 1")
    pool, rejected = eligible_pool(
        registry, task, accepted_gpus=accepted_gpus, rating_prior=rating_prior
    )
    if not pool:
        raise EmptyDomain(f"no eligible workers for task {task.task_id}")
    scores = score_pool(task, pool, w1=w1, rating_prior=rating_prior)
    return pool, rejected, scores, group


def _report_from_indices(
    task: TaskSpec,
    method: str,
    pool: Sequence[WorkerProfile],
    scores: Sequence[ScoreBreakdown],
    rejected,
    chosen_idx: Sequence[int],
    group: int,
) -> SelectionReport:
    entries = [
        RankedEntry(worker_id=w.worker_id, breakdown=b)
        for w, b in zip(pool, scores)
    ]
    by_id = {e.worker_id: e for e in entries}
    ranked = sorted(entries, key=lambda e: (-e.breakdown.qos, e.worker_id))
    chosen = [pool[i].worker_id for i in chosen_idx]
    chosen.sort(key=lambda w: (-by_id[w].breakdown.qos, w))
    return SelectionReport(
        task_id=task.task_id,
        method=method,
        ranked=ranked,
        selected=chosen,
        rejected=rejected,
        shortfall=len(chosen) < group,
    )


def _kernel_select(
    method: str,
    pick,
    registry: WorkerRegistry,
    task: TaskSpec,
    config,
    nw,
    accepted_gpus,
    w1,
    rating_prior,
) -> tuple[SelectionReport, list[float]]:
    pool, rejected, scores, group = _prepare(
        registry, task, nw, accepted_gpus, w1, rating_prior
    )
    qos = [b.qos for b in scores]
    idx, _fit, trajectory = pick(qos, min(group, len(pool)), config)
    report = _report_from_indices(
        task, method, pool, scores, rejected, idx, group
    )
    return report, trajectory


def ga_select(
    registry: WorkerRegistry,
    task: TaskSpec,
    *,
    config: GAConfig | None = None,
    nw: int | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> tuple[SelectionReport, list[float]]:
    """Genetic-search selection; returns the report and the fitness trace."""
    return _kernel_select(
        "ga", ga_pick, registry, task, config, nw, accepted_gpus, w1, rating_prior
    )


def pso_select(
    registry: WorkerRegistry,
    task: TaskSpec,
    *,
    config: PSOConfig | None = None,
    nw: int | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> tuple[SelectionReport, list[float]]:
    """Particle-swarm selection; returns the report and the fitness trace."""
    return _kernel_select(
        "pso", pso_pick, registry, task, config, nw, accepted_gpus, w1, rating_prior
    )


def aco_select(
    registry: WorkerRegistry,
    task: TaskSpec,
    *,
    config: ACOConfig | None = None,
    nw: int | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> tuple[SelectionReport, list[float]]:
    """Ant-colony selection; returns the report and the fitness trace."""
    return _kernel_select(
        "aco", aco_pick, registry, task, config, nw, accepted_gpus, w1, rating_prior
    )


def _attribute_select(
    method: str,
    key,
    registry: WorkerRegistry,
    task: TaskSpec,
    nw,
    accepted_gpus,
    w1,
    rating_prior,
) -> SelectionReport:
    pool, rejected, scores, group = _prepare(
        registry, task, nw, accepted_gpus, w1, rating_prior
    )
    order = sorted(range(len(pool)), key=lambda i: key(pool[i], scores[i]))
    return _report_from_indices(
        task, method, pool, scores, rejected, order[:group], group
    )


def reputation_select(
    registry: WorkerRegistry,
    task: TaskSpec,
    *,
    nw: int | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> SelectionReport:
    """Baseline: rank by reputation alone, ignore the rest of the score."""
    return _attribute_select(
        "reputation",
        lambda w, b: (-b.reputation, w.worker_id),
        registry, task, nw, accepted_gpus, w1, rating_prior,
    )


def cpu_select(
    registry: WorkerRegistry,
    task: TaskSpec,
    *,
    nw: int | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> SelectionReport:
    """Baseline: rank by raw CPU core count alone."""
    return _attribute_select(
        "cpu",
        lambda w, b: (-w.compute.cpu_cores, w.worker_id),
        registry, task, nw, accepted_gpus, w1, rating_prior,
    )


def random_select(
    registry: WorkerRegistry,
    task: TaskSpec,
    *,
    seed: int = 0,
    nw: int | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    w1: float = DEFAULT_W1,
    rating_prior: float = DEFAULT_RATING_PRIOR,
) -> SelectionReport:
    """Baseline: uniform draw from the eligible pool, seeded."""
    pool, rejected, scores, group = _prepare(
        registry, task, nw, accepted_gpus, w1, rating_prior
    )
    take = min(group, len(pool))
    idx = random.Random(seed).sample(range(len(pool)), take)
    return _report_from_indices(
        task, "random", pool, scores, rejected, idx, group
    )
