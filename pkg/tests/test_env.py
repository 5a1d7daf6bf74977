import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seqelim import (
    NoUniqueBestArmError,
    RngStream,
    gaps,
    make_env,
    sample,
)
from seqelim.env import ArmSampleAccumulator, RewardStreams


class TestMakeEnv:
    def test_two_arms(self):
        env = make_env([0.7, 0.6])
        assert env.K == 2
        assert env.best_arm == 0

    def test_setup1_shape(self):
        env = make_env([0.7] + [0.6] * 39)
        assert env.K == 40
        assert env.best_arm == 0

    def test_rejects_singleton(self):
        with pytest.raises(ValueError):
            make_env([0.7])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            make_env([0.7, 1.2])
        with pytest.raises(ValueError):
            make_env([-0.1, 0.5])

    def test_rejects_tied_maximum(self):
        with pytest.raises(NoUniqueBestArmError):
            make_env([0.7, 0.7])

    def test_rejects_unknown_dist(self):
        with pytest.raises(ValueError):
            make_env([0.7, 0.6], dist_kind="gaussian")

    def test_does_not_sort(self):
        env = make_env([0.2, 0.7, 0.5])
        assert env.means == (0.2, 0.7, 0.5)
        assert env.best_arm == 1


class TestGaps:
    def test_simple(self):
        gv = gaps(make_env([0.7, 0.6, 0.5]))
        assert gv.gaps == pytest.approx((0.0, 0.1, 0.2))
        assert gv.sorted_index_map == (0, 1, 2)

    def test_relabeled(self):
        gv = gaps(make_env([0.2, 0.7]))
        assert gv.gaps == pytest.approx((0.5, 0.0))
        assert gv.sorted_index_map == (1, 0)

    def test_setup4_formula(self):
        K = 40
        means = [0.7] + [0.7 - 0.6 * (i - 1) / (K - 1) for i in range(2, K + 1)]
        gv = gaps(make_env(means))
        for rank in range(2, K + 1):
            assert gv.sorted_gaps[rank - 1] == pytest.approx(0.6 * (rank - 1) / 39)

    def test_sorted_gaps_nondecreasing(self):
        gv = gaps(make_env([0.3, 0.9, 0.1, 0.3]))
        sg = gv.sorted_gaps
        assert sg[0] == 0.0
        assert all(sg[i] <= sg[i + 1] for i in range(len(sg) - 1))

    @given(
        means=st.lists(
            st.floats(min_value=0.0, max_value=0.99), min_size=2, max_size=8
        )
    )
    @settings(max_examples=100)
    def test_permutation_invariance(self, means):
        means = means + [1.0]  # force a unique best arm
        env = make_env(means)
        gv = gaps(env)
        perm = list(reversed(range(len(means))))
        penv = make_env([means[j] for j in perm])
        pgv = gaps(penv)
        # Gap of an arm does not depend on its label.
        for new_idx, old_idx in enumerate(perm):
            assert pgv.gaps[new_idx] == pytest.approx(gv.gaps[old_idx])
        assert sorted(pgv.sorted_gaps) == pytest.approx(sorted(gv.sorted_gaps))


class TestSampling:
    def test_degenerate_one(self):
        env = make_env([1.0, 0.0])
        rng = RngStream(1)
        assert all(sample(env, 0, rng) == 1.0 for _ in range(20))

    def test_degenerate_zero(self):
        env = make_env([1.0, 0.0])
        rng = RngStream(1)
        assert all(sample(env, 1, rng) == 0.0 for _ in range(20))

    def test_arm_out_of_range(self):
        env = make_env([0.7, 0.6])
        with pytest.raises(IndexError):
            sample(env, 2, RngStream(0))

    def test_law_of_large_numbers(self):
        # 3 sigma at 1e6 Bernoulli(0.7) draws is ~0.0014.
        env = make_env([0.7, 0.6])
        draws = RewardStreams(env, seed=12345).draw(0, 10**6)
        assert abs(draws.mean() - 0.7) < 0.002

    def test_replay_bit_for_bit(self):
        a = RngStream(987, 5).uniforms(1000)
        b = RngStream(987, 5).uniforms(1000)
        assert np.array_equal(a, b)

    def test_distinct_streams_differ(self):
        a = RngStream(987, 5).uniforms(100)
        b = RngStream(987, 6).uniforms(100)
        c = RngStream(988, 5).uniforms(100)
        assert not np.array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_three_sigma_coverage(self):
        # |mean - mu| <= 3 sqrt(mu(1-mu)/n) should hold in >= 99% of trials.
        mu, n, trials = 0.35, 400, 500
        env = make_env([mu, 0.1])
        tol = 3 * math.sqrt(mu * (1 - mu) / n)
        misses = 0
        for t in range(trials):
            draws = RewardStreams(env, seed=5, run=t).draw(0, n)
            if abs(draws.mean() - mu) > tol:
                misses += 1
        assert misses <= trials * 0.01

    def test_stream_split_matches_bulk(self):
        env = make_env([0.5, 0.5 - 1e-9])
        s1 = RewardStreams(env, seed=3, run=9)
        parts = np.concatenate([s1.draw(0, 7), s1.draw(0, 13), s1.draw(0, 5)])
        s2 = RewardStreams(env, seed=3, run=9)
        assert np.array_equal(parts, s2.draw(0, 25))


class TestAccumulator:
    def test_mean_requires_samples(self):
        acc = ArmSampleAccumulator(3)
        with pytest.raises(ValueError):
            acc.mean(0)

    def test_accumulates(self):
        acc = ArmSampleAccumulator(2)
        acc.add(0, np.array([1.0, 0.0, 1.0]))
        acc.add(0, np.array([1.0]))
        assert acc.counts[0] == 4
        assert acc.mean(0) == pytest.approx(0.75)

    def test_reset_only_in_reset_mode(self):
        acc = ArmSampleAccumulator(2)
        with pytest.raises(ValueError):
            acc.reset()
        acc2 = ArmSampleAccumulator(2, mode=ArmSampleAccumulator.PER_ROUND_RESET)
        acc2.add(1, np.array([1.0]))
        acc2.reset()
        assert acc2.counts[1] == 0
