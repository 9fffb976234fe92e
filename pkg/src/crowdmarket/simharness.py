"""Synthetic populations, lifecycle simulation and experiment runners.

Workers here are generated, not observed: each one carries latent
propensities (accept, complete, quality) that drive the offer oracle and
the ratings during simulation, and their performance counters are seeded
with binomial draws from those same propensities so the observable
history approximates the latent behavior from the start.

The lifecycle runner feeds a task stream through a real ledger with a
real blob store: tasks arrive on ticks, recruitment runs with retraction,
outcomes land as blobs, requesters rate and pay, and anything unfinished
at its deadline fails.  Everything draws from one seeded generator, so a
(population, stream, seed) triple reproduces the exact same event log
and digests.

The benchmark runners reproduce the selection-method comparisons: mean
group score and wall time per method per group size, written as CSV with
the header ``group_size,method,mean_qos,wall_ms,seed``.  Timings cover
the pick stage only; screening and scoring are identical across methods
and would only dilute the ratios.
"""

from __future__ import annotations

import dataclasses
import json
import statistics
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import metaheuristics as mh
from .allocation import OfferResponse
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
from .ledger import Ledger
from .scoring import derived_rates
from .store import BlobStore

RESULT_HEADER = ("group_size", "method", "mean_qos", "wall_ms", "seed")


@dataclass(frozen=True)
class PopulationSpec:
    """Uniform attribute ranges for a synthetic worker population."""

    n_workers: int = 600
    seed: int = 42
    cpu_cores_range: tuple[int, int] = (1, 32)
    ram_gb_range: tuple[int, int] = (4, 128)
    gpu_presence: float = 0.5
    gpu_series_pool: tuple[str, ...] = ("gtx1080", "rtx2080", "rtx3090", "a100")
    domain_universe: int = 4
    domains_per_worker: tuple[int, int] = (1, 3)
    propensity_range: tuple[float, float] = (0.3, 1.0)
    quality_noise: float = 0.1
    prior_assigned_range: tuple[int, int] = (0, 40)

    def validate(self) -> None:
        if self.n_workers < 0:
            raise MarketError("n_workers must be non-negative")
        if not 0.0 <= self.gpu_presence <= 1.0:
            raise MarketError("gpu_presence must lie in [0, 1]")
        lo, hi = self.propensity_range
        if not 0.0 <= lo <= hi <= 1.0:
            raise MarketError("propensity_range must lie in [0, 1]")
        if self.domain_universe < 1:
            raise MarketError("domain_universe must be >= 1")
        dlo, dhi = self.domains_per_worker
        if not 1 <= dlo <= dhi <= self.domain_universe:
            raise MarketError("domains_per_worker out of range")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "PopulationSpec":
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name not in d:
                continue
            value = d[f.name]
            if isinstance(value, list):
                value = tuple(value)
            kwargs[f.name] = value
        return cls(**kwargs)


@dataclass(frozen=True)
class LatentBehavior:
    """Hidden propensities that generate a worker's observable behavior."""

    p_accept: float
    p_complete: float
    quality_mean: float
    quality_noise: float = 0.1

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "LatentBehavior":
        return cls(
            p_accept=float(d["p_accept"]),
            p_complete=float(d["p_complete"]),
            quality_mean=float(d["quality_mean"]),
            quality_noise=float(d.get("quality_noise", 0.1)),
        )


def _draw_rating_points(rng: np.random.Generator, latent: LatentBehavior) -> int:
    value = rng.normal(latent.quality_mean, latent.quality_noise)
    return int(round(100.0 * min(1.0, max(0.0, value))))


def generate_population(
    spec: PopulationSpec,
) -> tuple[list[WorkerProfile], dict[str, LatentBehavior]]:
    """Draw a seeded worker population with matching latent behaviors.

    Counters are seeded per (domain, kind) with binomial draws from the
    latents over a uniform prior offer count, so empirical commitment and
    completion rates start near their latent values.
    """
    spec.validate()
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    profiles: list[WorkerProfile] = []
    latents: dict[str, LatentBehavior] = {}
    lo, hi = spec.propensity_range
    for _ in range(spec.n_workers):
        worker_id = rng.bytes(20).hex()
        cpu = int(rng.integers(spec.cpu_cores_range[0], spec.cpu_cores_range[1],
                               endpoint=True))
        ram = int(rng.integers(spec.ram_gb_range[0], spec.ram_gb_range[1],
                               endpoint=True))
        gpu = None
        if rng.random() < spec.gpu_presence:
            gpu = spec.gpu_series_pool[
                int(rng.integers(0, len(spec.gpu_series_pool)))
            ]
        n_domains = int(rng.integers(spec.domains_per_worker[0],
                                     spec.domains_per_worker[1], endpoint=True))
        domains = frozenset(
            int(d) for d in rng.choice(spec.domain_universe, size=n_domains,
                                       replace=False)
        )
        latent = LatentBehavior(
            p_accept=float(rng.uniform(lo, hi)),
            p_complete=float(rng.uniform(lo, hi)),
            quality_mean=float(rng.uniform(lo, hi)),
            quality_noise=spec.quality_noise,
        )
        stats = {}
        for domain in sorted(domains):
            for kind in TaskType:
                assigned = int(rng.integers(spec.prior_assigned_range[0],
                                            spec.prior_assigned_range[1],
                                            endpoint=True))
                accepted = int(rng.binomial(assigned, latent.p_accept))
                completed = int(rng.binomial(accepted, latent.p_complete))
                rating_sum = 0
                for _r in range(completed):
                    rating_sum += _draw_rating_points(rng, latent)
                stats[(domain, kind)] = PerfCounters(
                    assigned=assigned,
                    accepted=accepted,
                    completed=completed,
                    rating_sum=rating_sum,
                    rating_count=completed,
                )
        # generated crowds are available for work out of the box; ledger
        # registration still resets status and re-activates via events
        profiles.append(
            WorkerProfile(
                worker_id=worker_id,
                domains=domains,
                compute=ComputeProfile(cpu_cores=cpu, ram_gb=ram, gpu_series=gpu),
                stats=stats,
                status=WorkerStatus.ACTIVE,
            )
        )
        latents[worker_id] = latent
    return profiles, latents


def population_to_dict(
    spec: PopulationSpec,
    profiles: Sequence[WorkerProfile],
    latents: Mapping[str, LatentBehavior],
) -> dict:
    return {
        "spec": spec.to_dict(),
        "workers": [p.to_dict() for p in profiles],
        "latents": {wid: latents[wid].to_dict() for wid in sorted(latents)},
    }


def population_from_dict(
    d: Mapping,
) -> tuple[PopulationSpec, list[WorkerProfile], dict[str, LatentBehavior]]:
    spec = PopulationSpec.from_dict(d.get("spec", {}))
    profiles = [WorkerProfile.from_dict(w) for w in d["workers"]]
    latents = {
        wid: LatentBehavior.from_dict(lat) for wid, lat in d["latents"].items()
    }
    return spec, profiles, latents


@dataclass(frozen=True)
class TaskStreamSpec:
    """Parameters for a random task arrival stream."""

    n_tasks: int = 60
    seed: int = 7
    ticks: int = 60
    sharing_fraction: float = 0.25
    n_requesters: int = 5
    group_range: tuple[int, int] = (1, 5)
    min_reputation_range: tuple[float, float] = (0.0, 0.5)
    min_rating_range: tuple[float, float] = (0.0, 0.5)
    cpu_req_range: tuple[int, int] = (1, 8)
    ram_req_range: tuple[int, int] = (4, 32)
    time_constraint_range: tuple[int, int] = (5, 25)
    env_dim: int = 3
    domain_universe: int = 4

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: Mapping) -> "TaskStreamSpec":
        kwargs = {}
        for f in dataclasses.fields(cls):
            if f.name not in d:
                continue
            value = d[f.name]
            if isinstance(value, list):
                value = tuple(value)
            kwargs[f.name] = value
        return cls(**kwargs)


def generate_task_stream(spec: TaskStreamSpec) -> list[tuple[int, TaskSpec]]:
    """Seeded (arrival_tick, task) list sorted by arrival then id."""
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    requesters = [rng.bytes(20).hex() for _ in range(spec.n_requesters)]
    stream: list[tuple[int, TaskSpec]] = []
    for _ in range(spec.n_tasks):
        arrival = int(rng.integers(0, max(1, spec.ticks)))
        task_id = rng.bytes(20).hex()
        requester = requesters[int(rng.integers(0, len(requesters)))]
        domain = int(rng.integers(0, spec.domain_universe))
        sharing = bool(rng.random() < spec.sharing_fraction)
        group = int(rng.integers(spec.group_range[0], spec.group_range[1],
                                 endpoint=True))
        min_rep = float(rng.uniform(*spec.min_reputation_range))
        min_rat = float(rng.uniform(*spec.min_rating_range))
        tc = float(rng.integers(spec.time_constraint_range[0],
                                spec.time_constraint_range[1], endpoint=True))
        if sharing:
            env = tuple(float(x) for x in rng.uniform(0.0, 1.0, size=spec.env_dim))
            task = TaskSpec(
                task_id=task_id, requester_id=requester,
                kind=TaskType.MODEL_SHARING, domain=domain,
                description="sharing request", num_workers=group,
                min_reputation=min_rep, min_rating=min_rat,
                time_constraint=tc, env_features=env,
            )
        else:
            req = ComputeProfile(
                cpu_cores=int(rng.integers(spec.cpu_req_range[0],
                                           spec.cpu_req_range[1], endpoint=True)),
                ram_gb=int(rng.integers(spec.ram_req_range[0],
                                        spec.ram_req_range[1], endpoint=True)),
                gpu_series=None,
            )
            task = TaskSpec(
                task_id=task_id, requester_id=requester,
                kind=TaskType.TRAINING, domain=domain,
                description="training request", num_workers=group,
                min_reputation=min_rep, min_rating=min_rat,
                time_constraint=tc, compute_req=req,
            )
        stream.append((arrival, task))
    stream.sort(key=lambda pair: (pair[0], pair[1].task_id))
    return stream


def stream_to_dict(stream: Sequence[tuple[int, TaskSpec]]) -> dict:
    return {
        "stream": [
            {"arrival": tick, "task": task.to_dict()} for tick, task in stream
        ]
    }


def stream_from_dict(d: Mapping) -> list[tuple[int, TaskSpec]]:
    return [
        (int(row["arrival"]), TaskSpec.from_dict(row["task"]))
        for row in d["stream"]
    ]


@dataclass
class MetricsRow:
    """One observation of a worker's standing after a touch."""

    tick: int
    worker_id: str
    domain: int
    kind: int
    commitment: float
    completion: float
    reputation: float
    rating: float

    def as_csv_row(self) -> list:
        return [
            self.tick, self.worker_id, self.domain, self.kind,
            repr(self.commitment), repr(self.completion),
            repr(self.reputation), repr(self.rating),
        ]


METRICS_HEADER = (
    "tick", "worker_id", "domain", "kind",
    "commitment", "completion", "reputation", "rating",
)


@dataclass
class LifecycleResult:
    """Everything a lifecycle run produced."""

    ledger: Ledger
    store: BlobStore
    metrics: list[MetricsRow]
    ticks_run: int
    tasks_completed: int = 0
    tasks_failed: int = 0

    def state_digest_hex(self) -> str:
        return self.ledger.state.state_digest_hex()


def run_lifecycle(
    profiles: Sequence[WorkerProfile],
    latents: Mapping[str, LatentBehavior],
    stream: Sequence[tuple[int, TaskSpec]],
    *,
    ticks: int | None = None,
    seed: int = 0,
    store: BlobStore | None = None,
    accepted_gpus: frozenset[str] = frozenset(),
    model_share_fraction: float = 0.3,
    pay_per_worker: float = 1.0,
) -> LifecycleResult:
    """Feed a task stream through a ledger with latent-driven behavior.

    Per tick: arriving tasks are added and allocated (training with the
    offer walk, sharing from the model book), previously scheduled
    outcomes land as blobs, completed tasks collect ratings and payment,
    and overdue tasks fail.  Allocation failures are logged and the task
    fails; nothing is fatal.  Same inputs, same digests.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    if store is None:
        store = BlobStore(tempfile.mkdtemp(prefix="crowdmarket-"))
    ledger = Ledger(store, accepted_gpus=accepted_gpus)
    metrics: list[MetricsRow] = []

    for profile in profiles:
        ledger.add_worker(profile, timestamp=0)
        ledger.update_status(profile.worker_id, WorkerStatus.ACTIVE, timestamp=0)
    for requester in sorted({task.requester_id for _, task in stream}):
        ledger.add_requester(requester, timestamp=0)

    env_dim = max(
        [len(t.env_features) for _, t in stream if t.env_features] or [3]
    )
    for profile in profiles:
        for domain in sorted(profile.domains):
            if rng.random() >= model_share_fraction:
                continue
            blob = f"model:{profile.worker_id}:{domain}".encode()
            cid = store.put(blob)
            env = tuple(float(x) for x in rng.uniform(0.0, 1.0, size=env_dim))
            ledger.add_model(
                ModelRecord(
                    owner_id=profile.worker_id, cid=cid, domain=domain,
                    description="shared pretrained model", env_features=env,
                ),
                timestamp=0,
            )

    if ticks is None:
        horizon = 0
        for arrival, task in stream:
            horizon = max(horizon, arrival + int(task.time_constraint) + 2)
        ticks = horizon

    def offer_oracle(worker_id: str, _task: TaskSpec, _window: float) -> OfferResponse:
        latent = latents[worker_id]
        if rng.random() < latent.p_accept:
            return OfferResponse.ACCEPT
        return OfferResponse.DECLINE if rng.random() < 0.5 else OfferResponse.TIMEOUT

    def touch(tick: int, worker_id: str, domain: int, kind: TaskType) -> None:
        cell = ledger.state.workers.get(worker_id).peek_counters(domain, kind)
        cm, cp, rep, rat = derived_rates(cell, ledger.rating_prior)
        metrics.append(
            MetricsRow(
                tick=tick, worker_id=worker_id, domain=domain, kind=int(kind),
                commitment=cm, completion=cp, reputation=rep, rating=rat,
            )
        )

    pending = list(stream)
    outcomes_due: dict[int, list[tuple[str, str, bytes | str]]] = {}
    deadlines: dict[int, list[str]] = {}
    completed = failed = 0

    def fail_task(task_id: str, tick: int) -> None:
        nonlocal failed
        status = ledger.state.tasks[task_id].status
        if status in (TaskStatus.PENDING, TaskStatus.ALLOCATED):
            ledger.update_task_status(task_id, TaskStatus.FAILED, timestamp=tick)
            failed += 1

    def finish_if_complete(task_id: str, tick: int) -> None:
        nonlocal completed
        ts = ledger.state.tasks[task_id]
        if ts.status is not TaskStatus.COMPLETED:
            return
        completed += 1
        for worker_id in sorted(ts.submitted):
            points = _draw_rating_points(rng, latents[worker_id])
            ledger.submit_feedback(task_id, worker_id, points, timestamp=tick)
            ledger.pay(task_id, worker_id, pay_per_worker, timestamp=tick)
            touch(tick, worker_id, ts.spec.domain, ts.spec.kind)

    for tick in range(ticks + 1):
        while pending and pending[0][0] <= tick:
            _, task = pending.pop(0)
            ledger.add_task(task, timestamp=tick)
            deadlines.setdefault(
                tick + int(task.time_constraint), []
            ).append(task.task_id)
            try:
                if task.kind is TaskType.TRAINING:
                    _, report = ledger.allocate_task(
                        task.task_id, offer_oracle, timestamp=tick
                    )
                else:
                    _, report = ledger.allocate_model(task.task_id, timestamp=tick)
            except MarketError:
                # recruitment problems fail the task, never the run
                fail_task(task.task_id, tick)
                continue
            for worker_id, _reason in report.retractions:
                touch(tick, worker_id, task.domain, task.kind)
            if task.kind is TaskType.TRAINING:
                horizon = max(1, int(task.time_constraint) - 1)
                for worker_id in report.selected:
                    touch(tick, worker_id, task.domain, task.kind)
                    if rng.random() < latents[worker_id].p_complete:
                        due = tick + int(rng.integers(1, horizon, endpoint=True))
                        outcomes_due.setdefault(due, []).append(
                            (task.task_id, worker_id,
                             f"outcome:{task.task_id}:{worker_id}".encode())
                        )
            else:
                for worker_id, cid in report.selected_models or []:
                    touch(tick, worker_id, task.domain, task.kind)
                    if rng.random() < latents[worker_id].p_complete:
                        outcomes_due.setdefault(tick + 1, []).append(
                            (task.task_id, worker_id, cid)
                        )

        for task_id, worker_id, payload in outcomes_due.pop(tick, []):
            ts = ledger.state.tasks[task_id]
            if ts.status is not TaskStatus.ALLOCATED:
                continue
            cid = store.put(payload) if isinstance(payload, bytes) else payload
            event = ledger.submit_outcome(task_id, worker_id, cid, timestamp=tick)
            if not event.rejected:
                touch(tick, worker_id, ts.spec.domain, ts.spec.kind)
                finish_if_complete(task_id, tick)

        for task_id in deadlines.pop(tick, []):
            fail_task(task_id, tick)

    return LifecycleResult(
        ledger=ledger,
        store=store,
        metrics=metrics,
        ticks_run=ticks,
        tasks_completed=completed,
        tasks_failed=failed,
    )


def write_metrics_csv(rows: Iterable[MetricsRow], path: str | Path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_HEADER)
        for row in rows:
            writer.writerow(row.as_csv_row())


# -- benchmark runners ---------------------------------------------------


@dataclass(frozen=True)
class BenchRow:
    """One aggregated benchmark observation."""

    group_size: int
    method: str
    mean_qos: float
    wall_ms: float
    seed: int

    def as_csv_row(self) -> list:
        return [
            self.group_size, self.method,
            repr(self.mean_qos), repr(self.wall_ms), self.seed,
        ]


def write_results_csv(rows: Iterable[BenchRow], path: str | Path) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_HEADER)
        for row in rows:
            writer.writerow(row.as_csv_row())


def results_to_json(rows: Iterable[BenchRow]) -> str:
    return json.dumps(
        [dataclasses.asdict(row) for row in rows], indent=2, sort_keys=True
    )


def _bench_registry(profiles: Sequence[WorkerProfile]) -> WorkerRegistry:
    registry = WorkerRegistry.from_profiles(profiles)
    for worker_id in registry.ids():
        registry.set_status(worker_id, WorkerStatus.ACTIVE)
    return registry


def dominant_domain(profiles: Sequence[WorkerProfile]) -> int:
    """The domain covered by the most workers (ties to the smallest)."""
    counts: dict[int, int] = {}
    for profile in profiles:
        for domain in profile.domains:
            counts[domain] = counts.get(domain, 0) + 1
    if not counts:
        raise MarketError("population has no domains")
    return min(counts, key=lambda d: (-counts[d], d))


def benchmark_task(domain: int, group_size: int) -> TaskSpec:
    """A floor-free training task so the whole domain is eligible."""
    return TaskSpec(
        task_id="be" * 20,
        requester_id="bf" * 20,
        kind=TaskType.TRAINING,
        domain=domain,
        description="benchmark instance",
        num_workers=group_size,
        min_reputation=0.0,
        min_rating=0.0,
        compute_req=ComputeProfile(cpu_cores=1, ram_gb=1, gpu_series=None),
    )


def _bench_pool(
    profiles: Sequence[WorkerProfile], domain: int | None
) -> tuple[WorkerRegistry, int, list, list[float]]:
    from .allocation import eligible_pool, score_pool

    registry = _bench_registry(profiles)
    if domain is None:
        domain = dominant_domain(profiles)
    task = benchmark_task(domain, 1)
    pool, _rejected = eligible_pool(registry, task)
    if not pool:
        raise MarketError(f"no eligible workers in domain {domain}")
    scores = score_pool(task, pool)
    return registry, domain, pool, [b.qos for b in scores]


def _timed_ms(fn, repetitions: int) -> tuple[list, float]:
    times = []
    result = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        result = fn()
        times.append((time.perf_counter() - t0) * 1000.0)
    return result, statistics.median(times)


def run_optimizer_benchmark(
    profiles: Sequence[WorkerProfile],
    *,
    group_sizes: Sequence[int] = (5, 10, 15, 20, 25, 30),
    configs: Mapping[str, mh.OptimizerConfig] | None = None,
    repetitions: int = 30,
    seed: int = 0,
    domain: int | None = None,
) -> list[BenchRow]:
    """Greedy vs the three searches on one prepared instance per size.

    Each repetition reseeds the search (base seed + repetition index);
    the reported score is the mean over repetitions and the wall time the
    median pick-stage time.
    """
    configs = dict(configs or {})
    _registry, _domain, pool, qos = _bench_pool(profiles, domain)
    rows: list[BenchRow] = []
    for size in group_sizes:
        nw = min(size, len(pool))
        _, greedy_ms = _timed_ms(lambda: mh.greedy_pick(qos, nw), repetitions)
        greedy_idx = mh.greedy_pick(qos, nw)
        greedy_mean = sum(qos[i] for i in greedy_idx) / nw
        rows.append(BenchRow(size, "greedy", greedy_mean, greedy_ms, seed))
        for method, pick in (
            ("ga", mh.ga_pick), ("pso", mh.pso_pick), ("aco", mh.aco_pick)
        ):
            base = configs.get(method, mh.default_config(method))
            fits = []
            times = []
            for rep in range(repetitions):
                cfg = dataclasses.replace(base, seed=seed + rep)
                t0 = time.perf_counter()
                _idx, fit, _traj = pick(qos, nw, cfg)
                times.append((time.perf_counter() - t0) * 1000.0)
                fits.append(fit)
            rows.append(
                BenchRow(size, method, statistics.fmean(fits),
                         statistics.median(times), seed)
            )
    return rows


def run_baseline_benchmark(
    profiles: Sequence[WorkerProfile],
    *,
    group_sizes: Sequence[int] = (5, 10, 15, 20, 25, 30),
    repetitions: int = 30,
    seed: int = 0,
    domain: int | None = None,
) -> list[BenchRow]:
    """Full-score greedy vs reputation-only, CPU-only and random picks."""
    import random as pyrandom

    _registry, _domain, pool, qos = _bench_pool(profiles, domain)
    n = len(pool)
    reputations = []
    cpus = []
    from .allocation import score_pool  # scores align with pool order

    task = benchmark_task(_domain, 1)
    for worker, breakdown in zip(pool, score_pool(task, pool)):
        reputations.append(breakdown.reputation)
        cpus.append(worker.compute.cpu_cores)

    rows: list[BenchRow] = []
    for size in group_sizes:
        nw = min(size, n)

        def greedy() -> list[int]:
            return mh.greedy_pick(qos, nw)

        def by_reputation() -> list[int]:
            order = sorted(range(n), key=lambda i: (-reputations[i], pool[i].worker_id))
            return order[:nw]

        def by_cpu() -> list[int]:
            order = sorted(range(n), key=lambda i: (-cpus[i], pool[i].worker_id))
            return order[:nw]

        for method, fn in (("greedy", greedy), ("reputation", by_reputation),
                           ("cpu", by_cpu)):
            idx, wall = _timed_ms(fn, repetitions)
            rows.append(
                BenchRow(size, method, sum(qos[i] for i in idx) / nw, wall, seed)
            )

        means = []
        times = []
        for rep in range(repetitions):
            t0 = time.perf_counter()
            idx = pyrandom.Random(seed + rep).sample(range(n), nw)
            times.append((time.perf_counter() - t0) * 1000.0)
            means.append(sum(qos[i] for i in idx) / nw)
        rows.append(
            BenchRow(size, "random", statistics.fmean(means),
                     statistics.median(times), seed)
        )
    return rows
