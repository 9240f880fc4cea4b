import random

import pytest

from privsum.groups import OpCounter
from privsum.matrixgen import TopologyPlan
from privsum.protocol import (
    AggregationError,
    Contribution,
    ProtocolError,
    ProtocolParams,
    RoundBoundError,
    aggregate,
    compute_contribution,
    finalize_setup,
    setup_party,
)


def make_parties(params, rng, secrets=None):
    states, pubs = [], []
    for i in range(1, params.n + 1):
        secret = None if secrets is None else secrets[i - 1]
        state, pub = setup_party(params, i, rng, secret=secret)
        states.append(state)
        pubs.append(pub)
    for state in states:
        finalize_setup(state, pubs)
    return states, pubs


def run_round(params, states, round_k, messages):
    return [compute_contribution(s, round_k, m) for s, m in zip(states, messages)]


def product_of(params, contributions):
    group = params.aggregation_group
    z = group.identity
    for c in contributions:
        z = group.mul(z, c.value)
    return z


class TestParamsValidation:
    def test_round_bound_enforced_for_pcl(self, big_group):
        ProtocolParams("pcl", big_group, n=10, beta=10, max_rounds=4, tolerance=2)
        with pytest.raises(RoundBoundError):
            ProtocolParams("pcl", big_group, n=10, beta=10, max_rounds=5, tolerance=2)

    def test_kdk1_is_single_round(self, big_group):
        with pytest.raises(RoundBoundError):
            ProtocolParams("kdk1", big_group, n=4, beta=10, max_rounds=2)

    def test_kdkm_rounds_unbounded(self, mock_pairing):
        ProtocolParams("kdkm", mock_pairing, n=4, beta=10, max_rounds=500)

    def test_backend_kind_checked(self, big_group, mock_pairing):
        with pytest.raises(ProtocolError):
            ProtocolParams("kdkm", big_group, n=4, beta=10)
        with pytest.raises(ProtocolError):
            ProtocolParams("pcl", mock_pairing, n=4, beta=10)

    def test_message_space_capped(self, big_group):
        with pytest.raises(ProtocolError):
            ProtocolParams("kdk1", big_group, n=2, beta=1 << 48)

    def test_default_topology_per_variant(self, big_group, mock_pairing):
        assert ProtocolParams("kdk1", big_group, n=4, beta=1).topology.strategy == "kdk-sign"
        assert ProtocolParams("pcl", big_group, n=4, beta=1).topology.strategy == "full"
        assert ProtocolParams("kdkm", mock_pairing, n=4, beta=1).topology.strategy == "kdk-sign"

    def test_kdk_keeps_signs_on_sparse_topology(self, mock_pairing):
        plan = TopologyPlan(n=6, strategy="nearest-neighbor", degree=2)
        params = ProtocolParams("kdkm", mock_pairing, n=6, beta=1, topology=plan)
        assert params.topology.uses_sign_coefficients


class TestSetup:
    def test_deterministic_under_fixed_seed(self, big_group):
        params = ProtocolParams("kdk1", big_group, n=3, beta=10)
        _, pub_a = setup_party(params, 1, random.Random(99))
        _, pub_b = setup_party(params, 1, random.Random(99))
        assert big_group.eq(pub_a, pub_b)

    def test_forced_unit_secret_gives_generator(self, big_group):
        params = ProtocolParams("kdk1", big_group, n=3, beta=10)
        _, pub = setup_party(params, 1, random.Random(0), secret=1)
        assert big_group.eq(pub, big_group.generator)

    def test_mock_keys_are_scalar_multiples(self, mock_pairing):
        params = ProtocolParams("kdkm", mock_pairing, n=3, beta=10)
        for i, x in enumerate((2, 3, 5), start=1):
            _, pub = setup_party(params, i, random.Random(0), secret=x)
            assert pub == x  # additive mock: x * P with P = 1

    def test_negation_cache_extent(self, mock_pairing):
        params = ProtocolParams("kdkm", mock_pairing, n=4, beta=10)
        states, _ = make_parties(params, random.Random(1))
        assert all(k is None for k in states[0].negated_keys)
        cached = [j for j, k in enumerate(states[3].negated_keys) if k is not None]
        assert cached == [1, 2, 3]

    def test_key_list_validation(self, big_group):
        params = ProtocolParams("kdk1", big_group, n=3, beta=10)
        state, pub = setup_party(params, 1, random.Random(5))
        with pytest.raises(ProtocolError):
            finalize_setup(state, [pub, pub])  # wrong count
        wrong = [big_group.generator] * 3  # own key missing
        with pytest.raises(ProtocolError):
            finalize_setup(state, wrong)


class TestRounds:
    @pytest.mark.parametrize("variant,fixture", [
        ("kdk1", "big_group"), ("pcl", "big_group"), ("kdkm", "mock_pairing")])
    def test_broadcast_product_is_generator_to_sum(self, variant, fixture, request):
        backend = request.getfixturevalue(fixture)
        rng = random.Random(11)
        for n in (2, 3, 5):
            if variant == "kdk1":
                rounds = 1
            elif variant == "kdkm":
                rounds = 2
            else:
                rounds = min(2, n // 2)  # pcl round bound with t = 0
            params = ProtocolParams(variant, backend, n=n, beta=50,
                                    max_rounds=rounds)
            for _ in range(20):
                states, _ = make_parties(params, rng)
                for k in range(1, rounds + 1):
                    msgs = [rng.randint(0, 50) for _ in range(n)]
                    contribs = run_round(params, states, k, msgs)
                    group = params.aggregation_group
                    expected = group.exp(group.generator, sum(msgs))
                    assert group.eq(product_of(params, contribs), expected)

    def test_mock_hand_example(self, mock_pairing):
        # n=3, messages (1,2,3): the product is g^6 and aggregation finds 6
        params = ProtocolParams("kdkm", mock_pairing, n=3, beta=10)
        states, _ = make_parties(params, random.Random(2))
        contribs = run_round(params, states, 1, [1, 2, 3])
        gt = params.aggregation_group
        assert gt.eq(product_of(params, contribs), gt.exp(gt.generator, 6))
        assert aggregate(params, contribs).sigma == 6

    def test_single_party_degenerate(self, big_group):
        params = ProtocolParams("pcl", big_group, n=1, beta=10)
        states, _ = make_parties(params, random.Random(1))
        contribs = run_round(params, states, 1, [7])
        assert big_group.eq(contribs[0].value, big_group.exp(big_group.generator, 7))

    def test_zero_and_max_sums(self, big_group):
        params = ProtocolParams("kdk1", big_group, n=5, beta=20)
        states, _ = make_parties(params, random.Random(8))
        assert aggregate(params, run_round(params, states, 1, [0] * 5)).sigma == 0
        states, _ = make_parties(params, random.Random(9))
        assert aggregate(params, run_round(params, states, 1, [20] * 5)).sigma == 100

    def test_round_replay_rejected(self, big_group):
        params = ProtocolParams("pcl", big_group, n=3, beta=10, max_rounds=1)
        states, _ = make_parties(params, random.Random(4))
        compute_contribution(states[0], 1, 5)
        with pytest.raises(ProtocolError):
            compute_contribution(states[0], 1, 5)

    def test_out_of_order_round_rejected(self, big_group):
        params = ProtocolParams("pcl", big_group, n=4, beta=10, max_rounds=2)
        states, _ = make_parties(params, random.Random(4))
        with pytest.raises(ProtocolError):
            compute_contribution(states[0], 2, 5)

    def test_round_past_bound_refused(self, big_group):
        params = ProtocolParams("pcl", big_group, n=4, beta=10, max_rounds=2)
        states, _ = make_parties(params, random.Random(4))
        for k in (1, 2):
            run_round(params, states, k, [1] * 4)
        with pytest.raises(RoundBoundError):
            compute_contribution(states[0], 3, 1)

    def test_message_bound_enforced(self, big_group):
        params = ProtocolParams("kdk1", big_group, n=3, beta=10)
        states, _ = make_parties(params, random.Random(4))
        with pytest.raises(ProtocolError):
            compute_contribution(states[0], 1, 11)
        with pytest.raises(ProtocolError):
            compute_contribution(states[0], 1, -1)

    def test_contribution_hides_message_change(self, big_group):
        secrets = [5, 7, 11]
        params = ProtocolParams("kdk1", big_group, n=3, beta=10)
        a, _ = make_parties(params, random.Random(6), secrets=secrets)
        b, _ = make_parties(params, random.Random(6), secrets=secrets)
        v0 = compute_contribution(a[0], 1, 0).value
        v1 = compute_contribution(b[0], 1, 1).value
        assert not big_group.eq(v0, v1)


class TestOpAccounting:
    def test_pcl_full_uses_n_exponentiations(self, big_group):
        params = ProtocolParams("pcl", big_group, n=10, beta=10, max_rounds=2)
        states, _ = make_parties(params, random.Random(3))
        states[4].counter = OpCounter()
        compute_contribution(states[4], 1, 3)
        assert states[4].counter.exponentiations == 10

    def test_pcl_sparse_uses_nonholes_plus_one(self, big_group):
        plan = TopologyPlan(n=10, strategy="nearest-neighbor", degree=8)
        params = ProtocolParams("pcl", big_group, n=10, beta=10, max_rounds=3,
                                tolerance=2, topology=plan)
        states, _ = make_parties(params, random.Random(3))
        states[0].counter = OpCounter()
        compute_contribution(states[0], 1, 3)
        assert states[0].counter.exponentiations == 9

    def test_kdkm_pairing_and_mul_counts(self, mock_pairing):
        # n-1 pairings, n-1 multiplications, 2 exponentiations, 0 inversions
        params = ProtocolParams("kdkm", mock_pairing, n=8, beta=10, max_rounds=3)
        states, _ = make_parties(params, random.Random(3))
        for state in states:
            state.counter = OpCounter()
        for k in (1, 2, 3):
            run_round(params, states, k, [1] * 8)
        for state in states:
            assert state.counter.pairings == 3 * 7
            assert state.counter.multiplications == 3 * 7
            assert state.counter.exponentiations == 3 * 2
            assert state.counter.inversions == 0


class TestAggregate:
    def test_validates_completeness(self, big_group):
        params = ProtocolParams("kdk1", big_group, n=3, beta=10)
        states, _ = make_parties(params, random.Random(12))
        contribs = run_round(params, states, 1, [1, 2, 3])
        with pytest.raises(ProtocolError):
            aggregate(params, contribs[:2])
        with pytest.raises(ProtocolError):
            aggregate(params, contribs[:2] + [contribs[1]])

    def test_rejects_mixed_rounds(self, big_group):
        params = ProtocolParams("pcl", big_group, n=2, beta=10, max_rounds=1)
        a, _ = make_parties(params, random.Random(1))
        b, _ = make_parties(params, random.Random(1))
        c1 = compute_contribution(a[0], 1, 1)
        mixed = Contribution(variant="pcl", round=2, party=2,
                             value=compute_contribution(b[1], 1, 1).value)
        with pytest.raises(ProtocolError):
            aggregate(params, [c1, mixed])

    def test_corrupted_contribution_detected(self, big_group):
        params = ProtocolParams("kdk1", big_group, n=3, beta=10)
        states, _ = make_parties(params, random.Random(13))
        contribs = run_round(params, states, 1, [1, 2, 3])
        bad = Contribution(variant="kdk1", round=1, party=3,
                           value=big_group.mul(contribs[2].value,
                                               big_group.exp(big_group.generator, 50000)))
        with pytest.raises(AggregationError):
            aggregate(params, contribs[:2] + [bad])
