"""Search kernels: seeded determinism and backend bit-identity."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crowdmarket._kernels import _pykernels

try:
    from crowdmarket._kernels import _ckernels
except ImportError:
    _ckernels = None

needs_compiled = pytest.mark.skipif(
    _ckernels is None, reason="compiled kernels not built"
)

M64 = (1 << 64) - 1


def _reference_stream(seed, count):
    """Independent generator reference, written against the algorithm
    description rather than the implementation."""
    def mix(state):
        state = (state + 0x9E3779B97F4A7C15) & M64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
        return state, z ^ (z >> 31)

    state, s0 = mix(seed & M64)
    _, s1 = mix(state)
    if s0 == 0 and s1 == 0:
        s1 = 1
    out = []
    for _ in range(count):
        x, y = s0, s1
        s0 = y
        x = (x ^ (x << 23)) & M64
        s1 = x ^ y ^ (x >> 17) ^ (y >> 26)
        out.append((s1 + y) & M64)
    return out


def test_rng_stream_matches_reference():
    for seed in (0, 1, 424242, -3):
        assert _pykernels.rng_stream(seed, 5) == _reference_stream(seed, 5)


def test_rng_first_words_frozen():
    # frozen from the reference generator
    assert _pykernels.rng_stream(0, 3) == [
        18401257598216456881, 6679806265443826002, 8572058604621795811,
    ]


def test_rng_words_fit_in_64_bits():
    for v in _pykernels.rng_stream(7, 1000):
        assert 0 <= v <= M64


@needs_compiled
def test_rng_stream_identical_across_backends():
    for seed in (0, 5, 12345, 2**63):
        assert _pykernels.rng_stream(seed, 64) == _ckernels.rng_stream(seed, 64)


def _qos(n, seed=0):
    return [u / 2.0**64 for u in _pykernels.rng_stream(seed, n)]


KERNEL_ARGS = {
    "ga": lambda qos, nw, seed: (qos, nw, 20, 30, 0.9, 0.5, 3, 1, seed),
    "pso": lambda qos, nw, seed: (qos, nw, 20, 30, 0.7, 1.5, 1.5, seed),
    "aco": lambda qos, nw, seed: (qos, nw, 20, 30, 0.1, 1.0, 1.0, 2.0, seed),
}


@pytest.mark.parametrize("kernel", ["ga", "pso", "aco"])
def test_kernel_is_deterministic(kernel):
    qos = _qos(40)
    fn = getattr(_pykernels, f"{kernel}_evolve")
    args = KERNEL_ARGS[kernel](qos, 5, 11)
    first = fn(*args)
    second = fn(*args)
    assert list(first[0]) == list(second[0])
    assert first[1] == second[1]
    assert list(first[2]) == list(second[2])


@pytest.mark.parametrize("kernel", ["ga", "pso", "aco"])
def test_kernel_output_shape(kernel):
    qos = _qos(30)
    fn = getattr(_pykernels, f"{kernel}_evolve")
    best, fit, trajectory = fn(*KERNEL_ARGS[kernel](qos, 4, 3))
    assert len(best) == 4
    assert len(set(best)) == 4
    assert all(0 <= i < 30 for i in best)
    assert sorted(best) == list(best)
    assert math.isclose(fit, sum(qos[i] for i in best) / 4, rel_tol=1e-12)
    assert len(trajectory) == 30
    # best-so-far traces never regress
    assert all(b >= a - 1e-15 for a, b in zip(trajectory, trajectory[1:]))
    assert trajectory[-1] == fit


@needs_compiled
@pytest.mark.parametrize("kernel", ["ga", "pso", "aco"])
@pytest.mark.parametrize("seed", [0, 1, 99, 31337])
def test_backends_bit_identical(kernel, seed):
    qos = _qos(80, seed=seed + 1000)
    py_fn = getattr(_pykernels, f"{kernel}_evolve")
    c_fn = getattr(_ckernels, f"{kernel}_evolve")
    args = KERNEL_ARGS[kernel](qos, 8, seed)
    py_best, py_fit, py_traj = py_fn(*args)
    c_best, c_fit, c_traj = c_fn(*args)
    assert list(py_best) == list(c_best)
    assert py_fit == c_fit  # exact float equality, not approx
    assert list(py_traj) == list(c_traj)


@pytest.mark.parametrize("kernel", ["ga", "pso", "aco"])
def test_kernel_finds_optimum_on_separated_instance(kernel):
    # one clearly dominant subset; any sensible search should find it
    qos = [0.01] * 20
    for i in (3, 7, 11):
        qos[i] = 0.9
    fn = getattr(_pykernels, f"{kernel}_evolve")
    best, fit, _ = fn(*KERNEL_ARGS[kernel](qos, 3, 5))
    assert sorted(best) == [3, 7, 11]
    assert math.isclose(fit, 0.9, rel_tol=1e-12)


def test_group_size_equal_to_pool_returns_everyone():
    qos = _qos(6)
    for kernel in ("ga", "pso", "aco"):
        fn = getattr(_pykernels, f"{kernel}_evolve")
        best, fit, _ = fn(*KERNEL_ARGS[kernel](qos, 6, 0))
        assert list(best) == list(range(6))
        assert math.isclose(fit, sum(qos) / 6, rel_tol=1e-12)


def test_bad_arguments_rejected():
    qos = _qos(10)
    with pytest.raises(ValueError):
        _pykernels.ga_evolve(qos, 0, 20, 30, 0.9, 0.5, 3, 1, 0)
    with pytest.raises(ValueError):
        _pykernels.ga_evolve([], 1, 20, 30, 0.9, 0.5, 3, 1, 0)
    with pytest.raises(ValueError):
        _pykernels.pso_evolve(qos, 3, 1, 30, 0.7, 1.5, 1.5, 0)


@settings(max_examples=25, deadline=None)
@given(
    n=st.integers(min_value=2, max_value=25),
    nw=st.integers(min_value=1, max_value=25),
    seed=st.integers(min_value=0, max_value=2**32),
)
def test_ga_never_beats_true_optimum(n, nw, seed):
    from itertools import combinations

    nw = min(nw, n)
    qos = _qos(n, seed=seed % 97)
    best, fit, _ = _pykernels.ga_evolve(qos, nw, 16, 20, 0.9, 0.5, 3, 1, seed)
    true_best = max(
        sum(qos[i] for i in combo) / nw for combo in combinations(range(n), nw)
    )
    assert fit <= true_best + 1e-12
