# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled selection kernels.

Bit-compatible twin of ``_pykernels``: same algorithms, same xorshift128+
stream, same order of floating-point operations.  The build disables FMA
contraction so the arithmetic rounds exactly like CPython's.  Keep every
change here in lockstep with the pure module.
"""

from libc.stdint cimport uint64_t
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy, memset
from libc.math cimport pow as cpow


cdef uint64_t _SM_GAMMA = 0x9E3779B97F4A7C15
cdef uint64_t _SM_MUL1 = 0xBF58476D1CE4E5B9
cdef uint64_t _SM_MUL2 = 0x94D049BB133111EB
cdef double _DOUBLE_UNIT = 1.0 / 9007199254740992.0


cdef struct RngState:
    uint64_t s0
    uint64_t s1


cdef inline uint64_t _sm_next(uint64_t* z) noexcept nogil:
    z[0] = z[0] + _SM_GAMMA
    cdef uint64_t r = z[0]
    r = (r ^ (r >> 30)) * _SM_MUL1
    r = (r ^ (r >> 27)) * _SM_MUL2
    return r ^ (r >> 31)


cdef void _seed_rng(RngState* st, uint64_t seed) noexcept nogil:
    cdef uint64_t z = seed
    st.s0 = _sm_next(&z)
    st.s1 = _sm_next(&z)
    if st.s0 == 0 and st.s1 == 0:
        st.s1 = 1


cdef inline uint64_t _next_u64(RngState* st) noexcept nogil:
    cdef uint64_t x = st.s0
    cdef uint64_t y = st.s1
    st.s0 = y
    x ^= x << 23
    x ^= x >> 17
    x ^= y ^ (y >> 26)
    st.s1 = x
    return x + y


cdef inline double _next_double(RngState* st) noexcept nogil:
    return <double>(_next_u64(st) >> 11) * _DOUBLE_UNIT


cdef inline uint64_t _next_below(RngState* st, uint64_t bound) noexcept nogil:
    return _next_u64(st) % bound


def rng_stream(seed, count):
    """First ``count`` raw draws for a seed; used to cross-check backends."""
    cdef RngState st
    _seed_rng(&st, <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))
    cdef list out = []
    cdef Py_ssize_t i
    for i in range(count):
        out.append(_next_u64(&st))
    return out


cdef inline double _fitness_c(double* qos, int* subset, int nw) noexcept nogil:
    cdef double total = 0.0
    cdef int i
    for i in range(nw):
        total += qos[subset[i]]
    return total / nw


cdef inline void _sort_ints(int* a, int count) noexcept nogil:
    cdef int i, j, v
    for i in range(1, count):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


cdef void _sample_subset_c(RngState* st, int n, int nw, char* chosen, int* out) noexcept nogil:
    memset(chosen, 0, n)
    cdef int count = 0
    cdef int j
    while count < nw:
        j = <int>_next_below(st, n)
        if not chosen[j]:
            chosen[j] = 1
            out[count] = j
            count += 1
    _sort_ints(out, nw)


cdef double* _qos_to_c(object qos, int* n_out) except NULL:
    values = [float(v) for v in qos]
    cdef int n = len(values)
    cdef double* arr = <double*> malloc(n * sizeof(double))
    if arr == NULL:
        raise MemoryError()
    cdef int i
    for i in range(n):
        arr[i] = values[i]
    n_out[0] = n
    return arr


cdef void _check_common_c(int n, int nw, int population, int iterations):
    if not 1 <= nw <= n:
        raise ValueError(f"need 1 <= nw <= pool size, got nw={nw} n={n}")
    if population < 2:
        raise ValueError("population must be >= 2")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")


cdef int _tournament_c(RngState* st, double* fits, int population, int k) noexcept nogil:
    cdef int winner = <int>_next_below(st, population)
    cdef int c, t
    for t in range(k - 1):
        c = <int>_next_below(st, population)
        if fits[c] > fits[winner]:
            winner = c
    return winner


cdef void _crossover_c(RngState* st, int* p1, int* p2, int n, int nw,
                       char* seen, int* child) noexcept nogil:
    cdef int cut = 1 + <int>_next_below(st, nw - 1)
    memset(seen, 0, n)
    cdef int count = 0
    cdef int k, x, j
    for k in range(nw):
        x = p1[k] if k < cut else p2[k]
        if not seen[x]:
            seen[x] = 1
            child[count] = x
            count += 1
    while count < nw:
        j = <int>_next_below(st, n)
        if not seen[j]:
            seen[j] = 1
            child[count] = j
            count += 1
    _sort_ints(child, nw)


cdef void _mutate_c(RngState* st, int* child, int n, int nw, char* member) noexcept nogil:
    cdef int slot = <int>_next_below(st, nw)
    memset(member, 0, n)
    cdef int k, j
    for k in range(nw):
        member[child[k]] = 1
    while True:
        j = <int>_next_below(st, n)
        if not member[j]:
            break
    child[slot] = j
    _sort_ints(child, nw)


def ga_evolve(qos, int nw, int population, int iterations,
              double crossover_rate, double mutation_rate,
              int tournament_k, int elitism, seed):
    """Genetic search over size-``nw`` subsets (see the pure twin)."""
    cdef int n = 0
    cdef double* q = _qos_to_c(qos, &n)
    _check_common_c(n, nw, population, iterations)
    if not (0.0 <= crossover_rate <= 1.0 and 0.0 <= mutation_rate <= 1.0):
        free(q)
        raise ValueError("rates must lie in [0, 1]")
    if tournament_k < 1 or elitism < 0 or elitism >= population:
        free(q)
        raise ValueError("bad tournament_k or elitism")

    cdef RngState st
    _seed_rng(&st, <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))

    cdef int* pop = <int*> malloc(population * nw * sizeof(int))
    cdef int* new_pop = <int*> malloc(population * nw * sizeof(int))
    cdef double* fits = <double*> malloc(population * sizeof(double))
    cdef double* new_fits = <double*> malloc(population * sizeof(double))
    cdef int* best = <int*> malloc(nw * sizeof(int))
    cdef int* child = <int*> malloc(nw * sizeof(int))
    cdef char* scratch = <char*> malloc(n)
    cdef list trajectory = []
    cdef double best_fit, f
    cdef int p, it, filled, a, b
    cdef int* tmp_i
    cdef double* tmp_d
    if (pop == NULL or new_pop == NULL or fits == NULL or new_fits == NULL
            or best == NULL or child == NULL or scratch == NULL):
        free(pop); free(new_pop); free(fits); free(new_fits)
        free(best); free(child); free(scratch); free(q)
        raise MemoryError()
    try:
        for p in range(population):
            _sample_subset_c(&st, n, nw, scratch, pop + p * nw)
            fits[p] = _fitness_c(q, pop + p * nw, nw)
        best_fit = fits[0]
        memcpy(best, pop, nw * sizeof(int))
        for p in range(1, population):
            if fits[p] > best_fit:
                best_fit = fits[p]
                memcpy(best, pop + p * nw, nw * sizeof(int))

        for it in range(iterations):
            for p in range(elitism):
                memcpy(new_pop + p * nw, best, nw * sizeof(int))
                new_fits[p] = best_fit
            filled = elitism
            while filled < population:
                a = _tournament_c(&st, fits, population, tournament_k)
                if nw > 1 and _next_double(&st) < crossover_rate:
                    b = _tournament_c(&st, fits, population, tournament_k)
                    _crossover_c(&st, pop + a * nw, pop + b * nw, n, nw,
                                 scratch, child)
                else:
                    memcpy(child, pop + a * nw, nw * sizeof(int))
                if nw < n and _next_double(&st) < mutation_rate:
                    _mutate_c(&st, child, n, nw, scratch)
                f = _fitness_c(q, child, nw)
                memcpy(new_pop + filled * nw, child, nw * sizeof(int))
                new_fits[filled] = f
                filled += 1
                if f > best_fit:
                    best_fit = f
                    memcpy(best, child, nw * sizeof(int))
            tmp_i = pop; pop = new_pop; new_pop = tmp_i
            tmp_d = fits; fits = new_fits; new_fits = tmp_d
            trajectory.append(best_fit)
        return [best[p] for p in range(nw)], best_fit, trajectory
    finally:
        free(pop); free(new_pop); free(fits); free(new_fits)
        free(best); free(child); free(scratch); free(q)


cdef void _decode_top_c(double* row, int n, int nw, double* buf_val,
                        int* buf_idx, int* out) noexcept nogil:
    # top-nw under (value desc, index asc); candidates arrive with rising
    # index so a tie with the current worst keeps the incumbent
    cdef int count = 0
    cdef int i, k, ti
    cdef double v, tv
    for i in range(n):
        v = row[i]
        if count < nw:
            k = count
            buf_val[k] = v
            buf_idx[k] = i
            count += 1
        elif v > buf_val[nw - 1]:
            k = nw - 1
            buf_val[k] = v
            buf_idx[k] = i
        else:
            continue
        while k > 0 and (buf_val[k] > buf_val[k - 1] or
                         (buf_val[k] == buf_val[k - 1] and
                          buf_idx[k] < buf_idx[k - 1])):
            tv = buf_val[k]; buf_val[k] = buf_val[k - 1]; buf_val[k - 1] = tv
            ti = buf_idx[k]; buf_idx[k] = buf_idx[k - 1]; buf_idx[k - 1] = ti
            k -= 1
    for i in range(nw):
        out[i] = buf_idx[i]
    _sort_ints(out, nw)


def pso_evolve(qos, int nw, int population, int iterations,
               double inertia, double cognitive, double social, seed):
    """Particle swarm over continuous scores (see the pure twin)."""
    cdef int n = 0
    cdef double* q = _qos_to_c(qos, &n)
    _check_common_c(n, nw, population, iterations)
    if inertia < 0.0 or cognitive < 0.0 or social < 0.0:
        free(q)
        raise ValueError("PSO coefficients must be non-negative")

    cdef RngState st
    _seed_rng(&st, <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))

    cdef double* pos = <double*> malloc(population * n * sizeof(double))
    cdef double* vel = <double*> malloc(population * n * sizeof(double))
    cdef double* pbest_pos = <double*> malloc(population * n * sizeof(double))
    cdef double* pbest_fit = <double*> malloc(population * sizeof(double))
    cdef double* gbest_pos = <double*> malloc(n * sizeof(double))
    cdef double* buf_val = <double*> malloc(nw * sizeof(double))
    cdef int* buf_idx = <int*> malloc(nw * sizeof(int))
    cdef int* subset = <int*> malloc(nw * sizeof(int))
    cdef int* gbest_subset = <int*> malloc(nw * sizeof(int))
    cdef list trajectory = []
    cdef double gbest_fit = -1.0
    cdef double f, r1, r2, v
    cdef double* row
    cdef double* vrow
    cdef double* prow
    cdef int p, d, it
    if (pos == NULL or vel == NULL or pbest_pos == NULL or pbest_fit == NULL
            or gbest_pos == NULL or buf_val == NULL or buf_idx == NULL
            or subset == NULL or gbest_subset == NULL):
        free(pos); free(vel); free(pbest_pos); free(pbest_fit)
        free(gbest_pos); free(buf_val); free(buf_idx); free(subset)
        free(gbest_subset); free(q)
        raise MemoryError()
    try:
        for p in range(population):
            row = pos + p * n
            for d in range(n):
                row[d] = _next_double(&st)
                vel[p * n + d] = 0.0
        memcpy(pbest_pos, pos, population * n * sizeof(double))
        for p in range(population):
            _decode_top_c(pos + p * n, n, nw, buf_val, buf_idx, subset)
            f = _fitness_c(q, subset, nw)
            pbest_fit[p] = f
            if f > gbest_fit:
                gbest_fit = f
                memcpy(gbest_pos, pos + p * n, n * sizeof(double))
                memcpy(gbest_subset, subset, nw * sizeof(int))

        for it in range(iterations):
            for p in range(population):
                row = pos + p * n
                vrow = vel + p * n
                prow = pbest_pos + p * n
                for d in range(n):
                    r1 = _next_double(&st)
                    r2 = _next_double(&st)
                    v = (inertia * vrow[d]
                         + cognitive * r1 * (prow[d] - row[d])
                         + social * r2 * (gbest_pos[d] - row[d]))
                    vrow[d] = v
                    row[d] += v
                _decode_top_c(row, n, nw, buf_val, buf_idx, subset)
                f = _fitness_c(q, subset, nw)
                if f > pbest_fit[p]:
                    pbest_fit[p] = f
                    memcpy(prow, row, n * sizeof(double))
                if f > gbest_fit:
                    gbest_fit = f
                    memcpy(gbest_pos, row, n * sizeof(double))
                    memcpy(gbest_subset, subset, nw * sizeof(int))
            trajectory.append(gbest_fit)
        return [gbest_subset[d] for d in range(nw)], gbest_fit, trajectory
    finally:
        free(pos); free(vel); free(pbest_pos); free(pbest_fit)
        free(gbest_pos); free(buf_val); free(buf_idx); free(subset)
        free(gbest_subset); free(q)


cdef void _ant_walk_c(RngState* st, double* weights, double total, int n,
                      int nw, double* w, char* member, int* out) noexcept nogil:
    memcpy(w, weights, n * sizeof(double))
    memset(member, 0, n)
    cdef int pick, i, sel, count, k
    cdef double r, acc
    for pick in range(nw):
        sel = -1
        if total > 0.0:
            r = _next_double(st) * total
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
            k = <int>_next_below(st, n - pick)
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
        out[pick] = sel
    _sort_ints(out, nw)


def aco_evolve(qos, int nw, int population, int iterations,
               double evaporation, double deposit, double alpha, double beta,
               seed):
    """Ant colony with pheromone on candidate nodes (see the pure twin)."""
    cdef int n = 0
    cdef double* q = _qos_to_c(qos, &n)
    _check_common_c(n, nw, population, iterations)
    if not 0.0 <= evaporation < 1.0:
        free(q)
        raise ValueError("evaporation must lie in [0, 1)")
    if deposit < 0.0 or alpha < 0.0 or beta < 0.0:
        free(q)
        raise ValueError("deposit, alpha and beta must be non-negative")

    cdef RngState st
    _seed_rng(&st, <uint64_t>(seed & 0xFFFFFFFFFFFFFFFF))

    cdef double* tau = <double*> malloc(n * sizeof(double))
    cdef double* weights = <double*> malloc(n * sizeof(double))
    cdef double* w = <double*> malloc(n * sizeof(double))
    cdef char* member = <char*> malloc(n)
    cdef int* subset = <int*> malloc(nw * sizeof(int))
    cdef int* iter_best = <int*> malloc(nw * sizeof(int))
    cdef int* best = <int*> malloc(nw * sizeof(int))
    cdef list trajectory = []
    cdef double best_fit = -1.0
    cdef double iter_best_fit, iter_total, f, keep
    cdef int it, i, ant
    if (tau == NULL or weights == NULL or w == NULL or member == NULL
            or subset == NULL or iter_best == NULL or best == NULL):
        free(tau); free(weights); free(w); free(member)
        free(subset); free(iter_best); free(best); free(q)
        raise MemoryError()
    try:
        for i in range(n):
            tau[i] = 1.0
        for it in range(iterations):
            iter_total = 0.0
            for i in range(n):
                weights[i] = cpow(tau[i], alpha) * cpow(q[i], beta)
            for i in range(n):
                iter_total += weights[i]
            iter_best_fit = -1.0
            for ant in range(population):
                _ant_walk_c(&st, weights, iter_total, n, nw, w, member, subset)
                f = _fitness_c(q, subset, nw)
                if f > iter_best_fit:
                    iter_best_fit = f
                    memcpy(iter_best, subset, nw * sizeof(int))
            if iter_best_fit > best_fit:
                best_fit = iter_best_fit
                memcpy(best, iter_best, nw * sizeof(int))
            keep = 1.0 - evaporation
            for i in range(n):
                tau[i] *= keep
            for i in range(nw):
                tau[iter_best[i]] += deposit * iter_best_fit
            for i in range(nw):
                tau[best[i]] += deposit * best_fit
            trajectory.append(best_fit)
        return [best[i] for i in range(nw)], best_fit, trajectory
    finally:
        free(tau); free(weights); free(w); free(member)
        free(subset); free(iter_best); free(best); free(q)
