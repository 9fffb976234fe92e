"""Pure-Python selection kernels (fallback backend).

The compiled extension in ``_ckernels.pyx`` implements exactly the same
algorithms with exactly the same deterministic random stream (xorshift128+
seeded through splitmix64), so for a given seed both backends return
bit-identical subsets, fitnesses and trajectories.  Any change here must be
mirrored there, including the order of arithmetic: fitness sums run over
ascending indices, and every random draw happens at the same point in the
control flow.

All kernels take the candidate quality scores as a plain sequence of floats,
a group size ``nw``, budget/behavior knobs, and a seed; they return
``(subset, fitness, trajectory)`` where ``subset`` is an ascending index
list, ``fitness`` is the mean score of that subset and ``trajectory`` holds
the best-so-far fitness after each iteration.
"""

from __future__ import annotations

import math

_MASK64 = (1 << 64) - 1
_DOUBLE_UNIT = 1.0 / (1 << 53)


class XorShift128(object):
    """xorshift128+ with splitmix64 seeding; mirrored by the C backend."""

    __slots__ = ("s0", "s1")

    def __init__(self, seed: int) -> None:
        z = seed & _MASK64
        z, self.s0 = _splitmix64(z)
        z, self.s1 = _splitmix64(z)
        if self.s0 == 0 and self.s1 == 0:
            self.s1 = 1

    def next_u64(self) -> int:
        x = self.s0
        y = self.s1
        self.s0 = y
        x ^= (x << 23) & _MASK64
        x ^= x >> 17
        x ^= y ^ (y >> 26)
        self.s1 = x
        return (x + y) & _MASK64

    def next_double(self) -> float:
        return (self.next_u64() >> 11) * _DOUBLE_UNIT

    def next_below(self, bound: int) -> int:
        return self.next_u64() % bound


def _splitmix64(z: int) -> tuple[int, int]:
    z = (z + 0x9E3779B97F4A7C15) & _MASK64
    r = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    r = ((r ^ (r >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z, r ^ (r >> 31)


def rng_stream(seed: int, count: int) -> list[int]:
    """First ``count`` raw draws for a seed; used to cross-check backends."""
    rng = XorShift128(seed)
    return [rng.next_u64() for _ in range(count)]


def _check_common(n: int, nw: int, population: int, iterations: int) -> None:
    if not 1 <= nw <= n:
        raise ValueError(f"need 1 <= nw <= pool size, got nw={nw} n={n}")
    if population < 2:
        raise ValueError("population must be >= 2")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")


def _fitness(qos, subset) -> float:
    total = 0.0
    for i in subset:
        total += qos[i]
    return total / len(subset)


def _sample_subset(rng: XorShift128, n: int, nw: int) -> list[int]:
    chosen = bytearray(n)
    out = []
    while len(out) < nw:
        j = rng.next_below(n)
        if not chosen[j]:
            chosen[j] = 1
            out.append(j)
    out.sort()
    return out


def ga_evolve(
    qos,
    nw: int,
    population: int,
    iterations: int,
    crossover_rate: float,
    mutation_rate: float,
    tournament_k: int,
    elitism: int,
    seed: int,
):
    """Genetic search over size-``nw`` subsets.

    Chromosome: ascending index list.  Tournament selection, one-point
    crossover with repair-by-replacement for duplicate members, mutation
    swaps one member for a random outsider, configurable elitism.
    """
    qos = [float(v) for v in qos]
    n = len(qos)
    _check_common(n, nw, population, iterations)
    if not (0.0 <= crossover_rate <= 1.0 and 0.0 <= mutation_rate <= 1.0):
        raise ValueError("rates must lie in [0, 1]")
    if tournament_k < 1 or elitism < 0 or elitism >= population:
        raise ValueError("bad tournament_k or elitism")

    rng = XorShift128(seed)
    pop = [_sample_subset(rng, n, nw) for _ in range(population)]
    fits = [_fitness(qos, c) for c in pop]
    best_fit = fits[0]
    best = pop[0][:]
    for p in range(1, population):
        if fits[p] > best_fit:
            best_fit = fits[p]
            best = pop[p][:]

    trajectory = []
    for _ in range(iterations):
        new_pop = [best[:] for _ in range(elitism)]
        new_fits = [best_fit] * elitism
        while len(new_pop) < population:
            a = _tournament(rng, fits, population, tournament_k)
            if nw > 1 and rng.next_double() < crossover_rate:
                b = _tournament(rng, fits, population, tournament_k)
                child = _crossover(rng, pop[a], pop[b], n, nw)
            else:
                child = pop[a][:]
            if nw < n and rng.next_double() < mutation_rate:
                _mutate(rng, child, n, nw)
            f = _fitness(qos, child)
            new_pop.append(child)
            new_fits.append(f)
            if f > best_fit:
                best_fit = f
                best = child[:]
        pop = new_pop
        fits = new_fits
        trajectory.append(best_fit)
    return best, best_fit, trajectory


def _tournament(rng: XorShift128, fits, population: int, k: int) -> int:
    winner = rng.next_below(population)
    for _ in range(k - 1):
        c = rng.next_below(population)
        if fits[c] > fits[winner]:
            winner = c
    return winner


def _crossover(rng: XorShift128, p1, p2, n: int, nw: int) -> list[int]:
    cut = 1 + rng.next_below(nw - 1)
    seen = bytearray(n)
    child = []
    for x in p1[:cut] + p2[cut:]:
        if not seen[x]:
            seen[x] = 1
            child.append(x)
    while len(child) < nw:
        j = rng.next_below(n)
        if not seen[j]:
            seen[j] = 1
            child.append(j)
    child.sort()
    return child


def _mutate(rng: XorShift128, child, n: int, nw: int) -> None:
    slot = rng.next_below(nw)
    member = bytearray(n)
    for x in child:
        member[x] = 1
    while True:
        j = rng.next_below(n)
        if not member[j]:
            break
    child[slot] = j
    child.sort()


def pso_evolve(
    qos,
    nw: int,
    population: int,
    iterations: int,
    inertia: float,
    cognitive: float,
    social: float,
    seed: int,
):
    """Particle swarm over continuous per-candidate scores.

    A particle's position holds one real per candidate; it decodes to the
    ``nw`` candidates with the highest position values (ties to the lower
    index).  Velocities follow the standard inertia/personal/global update
    with two fresh random factors per dimension.
    """
    qos = [float(v) for v in qos]
    n = len(qos)
    _check_common(n, nw, population, iterations)
    if inertia < 0.0 or cognitive < 0.0 or social < 0.0:
        raise ValueError("PSO coefficients must be non-negative")

    rng = XorShift128(seed)
    nd = rng.next_double
    pos = [[nd() for _ in range(n)] for _ in range(population)]
    vel = [[0.0] * n for _ in range(population)]
    pbest_pos = [row[:] for row in pos]
    pbest_fit = []
    gbest_fit = -1.0
    gbest_pos: list[float] = []
    gbest_subset: list[int] = []
    for p in range(population):
        subset = _decode_top(pos[p], nw)
        f = _fitness(qos, subset)
        pbest_fit.append(f)
        if f > gbest_fit:
            gbest_fit = f
            gbest_pos = pos[p][:]
            gbest_subset = subset

    trajectory = []
    for _ in range(iterations):
        for p in range(population):
            row = pos[p]
            vrow = vel[p]
            prow = pbest_pos[p]
            for d in range(n):
                r1 = nd()
                r2 = nd()
                v = (
                    inertia * vrow[d]
                    + cognitive * r1 * (prow[d] - row[d])
                    + social * r2 * (gbest_pos[d] - row[d])
                )
                vrow[d] = v
                row[d] += v
            subset = _decode_top(row, nw)
            f = _fitness(qos, subset)
            if f > pbest_fit[p]:
                pbest_fit[p] = f
                pbest_pos[p] = row[:]
            if f > gbest_fit:
                gbest_fit = f
                gbest_pos = row[:]
                gbest_subset = subset
        trajectory.append(gbest_fit)
    return gbest_subset, gbest_fit, trajectory


def _decode_top(position, nw: int) -> list[int]:
    # Top-nw under the strict order (value desc, index asc); the selected
    # set is unique, so any correct implementation agrees with the C one.
    order = sorted(range(len(position)), key=lambda i: (-position[i], i))
    head = order[:nw]
    head.sort()
    return head


def aco_evolve(
    qos,
    nw: int,
    population: int,
    iterations: int,
    evaporation: float,
    deposit: float,
    alpha: float,
    beta: float,
    seed: int,
):
    """Ant colony with pheromone on candidate nodes.

    Each ant samples ``nw`` distinct candidates with probability
    proportional to pheromone^alpha * qos^beta; after an iteration the
    pheromone evaporates and the iteration-best and global-best subsets
    deposit proportionally to their fitness.
    """
    qos = [float(v) for v in qos]
    n = len(qos)
    _check_common(n, nw, population, iterations)
    if not 0.0 <= evaporation < 1.0:
        raise ValueError("evaporation must lie in [0, 1)")
    if deposit < 0.0 or alpha < 0.0 or beta < 0.0:
        raise ValueError("deposit, alpha and beta must be non-negative")

    rng = XorShift128(seed)
    tau = [1.0] * n
    best_fit = -1.0
    best: list[int] = []
    trajectory = []
    pw = math.pow
    for _ in range(iterations):
        weights = [pw(tau[i], alpha) * pw(qos[i], beta) for i in range(n)]
        iter_total = 0.0
        for i in range(n):
            iter_total += weights[i]
        iter_best_fit = -1.0
        iter_best: list[int] = []
        for _ant in range(population):
            subset = _ant_walk(rng, weights, iter_total, n, nw)
            f = _fitness(qos, subset)
            if f > iter_best_fit:
                iter_best_fit = f
                iter_best = subset
        if iter_best_fit > best_fit:
            best_fit = iter_best_fit
            best = iter_best
        keep = 1.0 - evaporation
        for i in range(n):
            tau[i] *= keep
        for i in iter_best:
            tau[i] += deposit * iter_best_fit
        for i in best:
            tau[i] += deposit * best_fit
        trajectory.append(best_fit)
    return best, best_fit, trajectory


def _ant_walk(rng: XorShift128, weights, total: float, n: int, nw: int) -> list[int]:
    w = list(weights)
    member = bytearray(n)
    out = []
    for pick in range(nw):
        sel = -1
        if total > 0.0:
            r = rng.next_double() * total
            acc = 0.0
            for i in range(n):
                acc += w[i]
                if r < acc:
                    sel = i
                    break
            if sel < 0:
                # rounding left r >= sum(w): take the last open candidate
                for i in range(n - 1, -1, -1):
                    if not member[i]:
                        sel = i
                        break
        else:
            # every open candidate has zero weight: uniform among them
            k = rng.next_below(n - pick)
            count = 0
            for i in range(n):
                if member[i]:
                    continue
                if count == k:
                    sel = i
                    break
                count += 1
        member[sel] = 1
        total -= w[sel]
        w[sel] = 0.0
        out.append(sel)
    out.sort()
    return out
