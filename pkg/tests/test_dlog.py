import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from privsum.dlog import DlogRange, RangeTooLarge, dlog_oracle, pollard_lambda
from privsum.groups import OpCounter


class TestDlogRange:
    def test_validation(self):
        with pytest.raises(ValueError):
            DlogRange(-1, 5)
        with pytest.raises(ValueError):
            DlogRange(10, 3)
        assert DlogRange(2, 7).width == 5


class TestOracle:
    def test_identity_maps_to_zero(self, tiny_group):
        assert dlog_oracle(tiny_group, tiny_group.identity, DlogRange(0, 100)) == 0

    def test_linear_scan(self, tiny_group):
        g = tiny_group.generator
        assert dlog_oracle(tiny_group, tiny_group.exp(g, 77), DlogRange(0, 100)) == 77
        assert dlog_oracle(tiny_group, tiny_group.exp(g, 77), DlogRange(0, 50)) is None

    def test_bsgs_path(self, big_group):
        g = big_group.generator
        rng = DlogRange(0, 1 << 20)  # above the linear-scan threshold
        for m in (0, 1, 123_456, (1 << 20) - 1, 1 << 20):
            assert dlog_oracle(big_group, big_group.exp(g, m), rng) == m
        out = big_group.exp(g, (1 << 20) + 5)
        assert dlog_oracle(big_group, out, rng) is None

    def test_nonzero_lo(self, big_group):
        g = big_group.generator
        assert dlog_oracle(big_group, big_group.exp(g, 500_000),
                           DlogRange(400_000, 1_500_000)) == 500_000

    def test_range_guard(self, big_group):
        with pytest.raises(RangeTooLarge):
            dlog_oracle(big_group, big_group.generator, DlogRange(0, 1 << 27))


class TestPollardLambda:
    def test_identity_maps_to_zero(self, tiny_group):
        assert pollard_lambda(tiny_group, tiny_group.identity, DlogRange(0, 100)) == 0

    def test_documented_example(self, tiny_group):
        target = tiny_group.exp(tiny_group.generator, 42)
        assert pollard_lambda(tiny_group, target, DlogRange(0, 100)) == 42

    def test_agreement_with_oracle_1000_pairs(self, tiny_group, big_group):
        rng = random.Random(13)
        for _ in range(1000):
            group = tiny_group if rng.random() < 0.5 else big_group
            hi = rng.randrange(1, min(group.order - 1, 1 << 14))
            lo = rng.randrange(0, hi)
            m = rng.randint(lo, hi)
            target = group.exp(group.generator, m)
            drange = DlogRange(lo, hi)
            got = pollard_lambda(group, target, drange, seed=rng.randrange(1 << 30))
            assert got == dlog_oracle(group, target, drange) == m

    def test_out_of_range_returns_none(self, big_group):
        target = big_group.exp(big_group.generator, 5000)
        assert pollard_lambda(big_group, target, DlogRange(0, 1000)) is None

    def test_rejects_range_wider_than_order(self, tiny_group):
        with pytest.raises(ValueError):
            pollard_lambda(tiny_group, tiny_group.generator, DlogRange(0, 101))

    def test_width_equal_group_order_minus_one(self, tiny_group):
        # exercise the wraparound reduction: width 100 in an order-101 group
        g = tiny_group.generator
        for m in range(101):
            got = pollard_lambda(tiny_group, tiny_group.exp(g, m), DlogRange(0, 100))
            assert got == m

    def test_counts_group_operations(self, big_group):
        counter = OpCounter()
        target = big_group.exp(big_group.generator, 9999)
        assert pollard_lambda(big_group, target, DlogRange(0, 1 << 14),
                              counter=counter) == 9999
        assert counter.multiplications > 0
        assert counter.exponentiations > 0

    @settings(max_examples=30, deadline=None)
    @given(m=st.integers(0, 1 << 16), seed=st.integers(0, 1 << 16))
    def test_recovery_property(self, big_group, m, seed):
        target = big_group.exp(big_group.generator, m)
        assert pollard_lambda(big_group, target, DlogRange(0, 1 << 16),
                              seed=seed) == m

    def test_production_curve_20_bit(self):
        from privsum.groups import instantiate_backend

        curve = instantiate_backend("production-curve")
        rng = random.Random(20)
        m = rng.randrange(1 << 20)
        target = curve.exp(curve.generator, m)
        assert pollard_lambda(curve, target, DlogRange(0, 1 << 20)) == m
