"""Score metrics against frozen reference values and range properties."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from crowdmarket import scoring as sc
from crowdmarket.core import (
    ComputeProfile,
    PerfCounters,
    TaskSpec,
    TaskType,
    WorkerProfile,
)
from crowdmarket.scoring import BoundViolation, DimensionMismatch

TOL = 1e-9

unit = st.floats(min_value=0.0, max_value=1.0)


def test_expertise_values():
    assert sc.expertise(5, 10) == 0.5
    assert sc.expertise(10, 10) == 1.0
    assert sc.expertise(0, 10) == 0.0
    # an all-novice pool counts as fully expert rather than dividing by zero
    assert sc.expertise(0, 0) == 1.0


def test_rate_zero_over_zero_is_one():
    assert sc.commitment_rate(0, 0) == 1.0
    assert sc.completion_rate(0, 0) == 1.0
    assert sc.commitment_rate(3, 4) == 0.75
    assert sc.completion_rate(1, 4) == 0.25


def test_reputation_is_geometric_mean():
    # frozen from an independent computation
    assert abs(sc.reputation(0.9, 0.4) - 0.6000000000000001) < 1e-15
    assert sc.reputation(1.0, 1.0) == 1.0
    assert sc.reputation(0.0, 1.0) == 0.0


def test_rating_prior_applies_only_to_empty_history():
    assert sc.rating(0, 0) == 0.5
    assert sc.rating(0, 0, prior=0.3) == 0.3
    assert sc.rating(240, 3) == 0.8
    assert sc.rating(0, 2) == 0.0


def test_compute_capability_reference_points():
    # frozen from an independent arctan computation, w1 = 0.1
    assert abs(sc.compute_capability(1) - 0.06345103486110715) < 1e-5
    assert abs(sc.compute_capability(10) - 0.5) < 1e-5
    assert abs(sc.compute_capability(16) - 0.6443846310212945) < 1e-5
    assert abs(sc.compute_capability(32) - 0.8071775040415409) < 1e-5


def test_compute_capability_monotone_and_bounded():
    prev = 0.0
    for cores in range(1, 200):
        cc = sc.compute_capability(cores)
        assert prev < cc < 1.0
        prev = cc


def test_training_qos_product():
    assert sc.training_qos(0.5, 0.8, 0.9, 0.5) == pytest.approx(0.18, abs=TOL)
    assert sc.training_qos(1.0, 1.0, 1.0, 1.0) == 1.0


def test_training_qos_rejects_out_of_range():
    with pytest.raises(BoundViolation):
        sc.training_qos(1.2, 0.5, 0.5, 0.5)
    with pytest.raises(BoundViolation):
        sc.training_qos(0.5, -0.1, 0.5, 0.5)


def test_similarity_weights_must_sum_to_one():
    sc.SimilarityWeights((0.5, 0.3, 0.2))
    with pytest.raises(BoundViolation):
        sc.SimilarityWeights((0.5, 0.3, 0.3))
    with pytest.raises(BoundViolation):
        sc.SimilarityWeights((1.2, -0.2))
    uniform = sc.SimilarityWeights.uniform(4)
    assert all(w == 0.25 for w in uniform.weights)


def test_model_similarity_reference_value():
    w = sc.SimilarityWeights((0.5, 0.3, 0.2))
    got = sc.model_similarity((1.0, 2.0, 0.5), (0.5, 1.0, 0.9), w)
    # frozen from an independent computation
    assert abs(got - 0.6300000000000001) < 1e-15


def test_model_similarity_dimension_check():
    w = sc.SimilarityWeights((0.5, 0.5))
    with pytest.raises(DimensionMismatch):
        sc.model_similarity((1.0,), (1.0, 2.0), w)


def test_sharing_qos_reference_value():
    got = sc.sharing_qos(0.8, 0.9, 0.75, 1.2)
    assert abs(got - 0.24545454545454545) < 1e-15
    # zero distance means no damping at all
    assert sc.sharing_qos(0.8, 0.9, 0.75, 0.0) == 0.8 * 0.9 * 0.75


@given(unit, unit)
def test_reputation_range_and_symmetry(cm, cp):
    rep = sc.reputation(cm, cp)
    assert 0.0 <= rep <= 1.0
    assert rep == sc.reputation(cp, cm)


@given(st.integers(min_value=0, max_value=10**6), st.integers(min_value=0, max_value=10**6))
def test_commitment_rate_range(accepted, assigned):
    if accepted > assigned:
        accepted, assigned = assigned, accepted
    assert 0.0 <= sc.commitment_rate(accepted, assigned) <= 1.0


@given(st.lists(unit, min_size=1, max_size=6), st.lists(unit, min_size=1, max_size=6))
def test_similarity_symmetry_and_zero_iff_equal(a, b):
    n = min(len(a), len(b))
    a, b = a[:n], b[:n]
    w = sc.SimilarityWeights.uniform(n)
    d_ab = sc.model_similarity(a, b, w)
    d_ba = sc.model_similarity(b, a, w)
    assert d_ab == d_ba
    assert d_ab >= 0.0
    assert sc.model_similarity(a, a, w) == 0.0
    if d_ab == 0.0:
        assert all(x == y for x, y in zip(a, b))


@given(unit, unit, unit, unit)
def test_training_qos_bounded_by_factors(e, rep, rat, cc):
    q = sc.training_qos(e, rep, rat, cc)
    assert 0.0 <= q <= min(e, rep, rat, cc) + 1e-12


def _worker(completed=8, assigned=10, accepted=9, rating_sum=640,
            rating_count=8, cpu=16):
    w = WorkerProfile(
        worker_id="ab" * 20,
        domains=frozenset((0,)),
        compute=ComputeProfile(cpu_cores=cpu, ram_gb=32, gpu_series=None),
    )
    w.stats[(0, TaskType.TRAINING)] = PerfCounters(
        assigned=assigned, accepted=accepted, completed=completed,
        rating_sum=rating_sum, rating_count=rating_count,
    )
    return w


def _task(**kw):
    base = dict(
        task_id="11" * 20, requester_id="22" * 20, kind=TaskType.TRAINING,
        domain=0, description="", num_workers=1, min_reputation=0.0,
        min_rating=0.0, compute_req=ComputeProfile(1, 1, None),
    )
    base.update(kw)
    return TaskSpec(**base)


def test_training_breakdown_recombines():
    b = sc.training_breakdown(_worker(), _task(), pool_max_completed=10)
    assert abs(b.qos - b.expertise * b.reputation * b.rating * b.compute_capability) < 1e-12
    assert b.similarity is None
    again = sc.ScoreBreakdown.from_dict(b.to_dict())
    assert again.qos == b.qos
    assert abs(b.recombine() - b.qos) < 1e-15


def test_breakdown_matches_hand_rolled_metrics():
    b = sc.training_breakdown(_worker(), _task(), pool_max_completed=16)
    counters = _worker().peek_counters(0, TaskType.TRAINING)
    cm = counters.accepted / counters.assigned
    cp = counters.completed / counters.accepted
    assert abs(b.expertise - 8 / 16) < 1e-15
    assert abs(b.reputation - math.sqrt(cm * cp)) < 1e-15
    assert abs(b.rating - 640 / 800) < 1e-15


def test_training_constraints_labels():
    task = _task(
        min_reputation=0.99, min_rating=0.99,
        compute_req=ComputeProfile(32, 128, "a100"),
    )
    ok, labels = sc.training_constraints_ok(
        _worker(), task, accepted_gpus=frozenset(("a100",))
    )
    assert not ok
    assert labels == ["reputation", "rating", "cpu", "ram", "gpu"]
    ok, labels = sc.training_constraints_ok(_worker(), _task(), frozenset())
    assert ok and labels == []


def test_uncovered_domain_scores_on_a_zero_cell():
    # metrics come from the task domain's own history: an uncovered
    # domain has a zeroed cell, so rates default to 1.0 and the rating
    # falls back to the prior, while the domain label still fires
    task = _task(domain=7, min_rating=0.6)
    ok, labels = sc.training_constraints_ok(_worker(), task, frozenset())
    assert not ok
    assert labels == ["rating", "domain"]


def test_gpu_constraint_empty_list_means_no_requirement():
    ok, labels = sc.training_constraints_ok(
        _worker(), _task(), accepted_gpus=frozenset()
    )
    assert ok
    ok, labels = sc.training_constraints_ok(
        _worker(), _task(), accepted_gpus=frozenset(("a100",))
    )
    assert not ok and labels == ["gpu"]


def test_constraint_floors_are_inclusive():
    w = _worker()
    b = sc.training_breakdown(w, _task(), pool_max_completed=10)
    task = _task(min_reputation=b.reputation, min_rating=b.rating)
    ok, labels = sc.training_constraints_ok(w, task, frozenset())
    assert ok, labels


def test_sharing_constraints_ignore_compute():
    task = _task(
        kind=TaskType.MODEL_SHARING, compute_req=None,
        env_features=(0.1, 0.2), min_reputation=0.2,
    )
    ok, labels = sc.sharing_constraints_ok(_worker(), task)
    assert ok and labels == []
