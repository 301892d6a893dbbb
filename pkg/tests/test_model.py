import random

import pytest

from crlsim.model import (
    Task,
    SourceNode,
    WeightsConfig,
    compute_matching_priority,
    compute_settlement_amount,
)


def make_task(task_id=0, owner=0, deadline=10.0, cycles=1.0, value=1.0, **kw):
    return Task(task_id=task_id, owner_id=owner, deadline_s=deadline,
                cycles_required=cycles, value=value, **kw)


HALVES = WeightsConfig(gamma_t=0.5, gamma_p=0.5, gamma_n=0.5, gamma_m=0.5, conversion_rate_r=1.0)


class TestTaskInvariants:
    def test_rejects_zero_cycles(self):
        with pytest.raises(ValueError):
            make_task(cycles=0.0)

    def test_rejects_negative_value(self):
        with pytest.raises(ValueError):
            make_task(value=-1.0)

    def test_rejects_negative_deferral(self):
        with pytest.raises(ValueError):
            make_task(rounds_deferred=-1)


class TestSourceInvariants:
    def test_rejects_zero_rate(self):
        with pytest.raises(ValueError):
            SourceNode(source_id=0, owner_id=0, idle_seconds=1.0, cycles_per_second=0.0)

    def test_rejects_negative_idle(self):
        with pytest.raises(ValueError):
            SourceNode(source_id=0, owner_id=0, idle_seconds=-1.0, cycles_per_second=1.0)

    def test_capacity(self):
        s = SourceNode(source_id=0, owner_id=0, idle_seconds=5.0, cycles_per_second=10.0)
        assert s.capacity == 50.0


class TestWeightsInvariants:
    @pytest.mark.parametrize("field,value", [
        ("gamma_t", -0.1), ("gamma_p", 1.5), ("gamma_n", 2.0), ("gamma_m", -1.0),
        ("conversion_rate_r", 0.0), ("max_rounds_w", 0),
    ])
    def test_rejects_bad_field(self, field, value):
        with pytest.raises(ValueError):
            WeightsConfig(**{field: value})


class TestMatchingPriority:
    def test_example_even_split(self):
        t = make_task(value=2.0, cycles=1.0)
        assert compute_matching_priority(t, 2.0, HALVES) == pytest.approx(2.0, abs=1e-12)

    def test_zero_case(self):
        t = make_task(value=0.0, cycles=5.0)
        assert compute_matching_priority(t, 0.0, HALVES) == 0.0

    def test_hand_evaluated(self):
        # 0.5 * 10/4 + 0.5 * 3 = 2.75
        t = make_task(value=10.0, cycles=4.0)
        assert compute_matching_priority(t, 3.0, HALVES) == pytest.approx(2.75, abs=1e-12)

    def test_monotone_in_value_and_balance(self):
        rng = random.Random(7)
        for _ in range(200):
            w = WeightsConfig(gamma_t=rng.random(), gamma_p=rng.random())
            cycles = rng.uniform(0.1, 100)
            value = rng.uniform(0, 50)
            bal = rng.uniform(-10, 10)
            base = compute_matching_priority(make_task(value=value, cycles=cycles), bal, w)
            more_value = compute_matching_priority(make_task(value=value + 1, cycles=cycles), bal, w)
            more_bal = compute_matching_priority(make_task(value=value, cycles=cycles), bal + 1, w)
            assert more_value >= base
            assert more_bal >= base

    def test_scale_free_in_value_cycles(self):
        rng = random.Random(11)
        for _ in range(100):
            value = rng.uniform(0.1, 10)
            cycles = rng.uniform(0.1, 10)
            k = rng.uniform(0.5, 4)
            bal = rng.uniform(-5, 5)
            a = compute_matching_priority(make_task(value=value, cycles=cycles), bal, HALVES)
            b = compute_matching_priority(make_task(value=k * value, cycles=k * cycles), bal, HALVES)
            assert b == pytest.approx(a, rel=1e-12)

    def test_pure_bitwise_identical(self):
        t = make_task(value=3.7, cycles=1.3)
        assert compute_matching_priority(t, 0.9, HALVES) == compute_matching_priority(t, 0.9, HALVES)


class TestSettlementAmount:
    def test_example_even_split(self):
        t = make_task(value=10.0)
        assert compute_settlement_amount(t, 4.0, HALVES) == pytest.approx(7.0, abs=1e-12)

    def test_zero_case(self):
        t = make_task(value=0.0)
        assert compute_settlement_amount(t, 0.0, HALVES) == 0.0

    def test_hand_evaluated(self):
        # (1 * 6 + 0 * 2) * 0.5 = 3.0
        w = WeightsConfig(gamma_n=1.0, gamma_m=0.0, conversion_rate_r=0.5)
        t = make_task(value=6.0)
        assert compute_settlement_amount(t, 2.0, w) == pytest.approx(3.0, abs=1e-12)

    def test_linear_and_homogeneous_in_rate(self):
        rng = random.Random(3)
        for _ in range(100):
            v1, v2 = rng.uniform(0, 10), rng.uniform(0, 10)
            b1, b2 = rng.uniform(-5, 5), rng.uniform(-5, 5)
            r = rng.uniform(0.1, 5)
            w = WeightsConfig(gamma_n=0.3, gamma_m=0.7, conversion_rate_r=r)
            both = compute_settlement_amount(make_task(value=v1 + v2), b1 + b2, w)
            parts = compute_settlement_amount(make_task(value=v1), b1, w) + compute_settlement_amount(
                make_task(value=v2), b2, w
            )
            assert both == pytest.approx(parts, rel=1e-9, abs=1e-12)
            w2 = WeightsConfig(gamma_n=0.3, gamma_m=0.7, conversion_rate_r=2 * r)
            assert compute_settlement_amount(make_task(value=v1), b1, w2) == pytest.approx(
                2 * compute_settlement_amount(make_task(value=v1), b1, w), rel=1e-12
            )
