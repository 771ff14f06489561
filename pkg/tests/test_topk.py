import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sstrank import (
    Stream,
    TopKInstance,
    domination_from_topk,
    gen_diag_eps,
    sample_domination,
    sample_topk,
    solve_topk,
    sst_from_scores,
    tournament_select,
    wilson_interval,
)
from sstrank.bounds import topk_min_columns
from sstrank.errors import InsufficientSamplesError, PreconditionError
from sstrank.samplers import DominationSamples
from sstrank.topk import TAG_PAIR, TAG_RELABEL, reduction_lowerbound
from reference import perfect_oracle


def true_top(ranking, k):
    return frozenset(int(i) for i in np.argsort(ranking)[:k])


def test_two_items_single_query():
    stats = tournament_select(perfect_oracle([1, 0]), 2, 1, Stream(0))
    assert stats.result == {1} and stats.edge_queries == 1


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 40), st.data())
def test_perfect_oracle_is_exact(n, data):
    k = data.draw(st.integers(1, n - 1))
    seed = data.draw(st.integers(0, 2**32))
    ranking = np.random.default_rng(seed).permutation(n)
    stats = tournament_select(perfect_oracle(ranking), n, k, Stream(seed))
    assert stats.result == true_top(ranking, k)
    assert stats.edge_queries <= n * (n - 1) // 2


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 30), st.integers(0, 2**32))
def test_each_pair_queried_once_even_when_inconsistent(n, seed):
    rng = np.random.default_rng(seed)
    calls: dict = {}

    def noisy(i, j):
        assert i < j
        calls[(i, j)] = calls.get((i, j), 0) + 1
        return bool(rng.integers(2))

    k = int(rng.integers(1, n))
    stats = tournament_select(noisy, n, k, Stream(seed))
    assert max(calls.values()) == 1 and stats.edge_queries == len(calls)
    assert len(stats.result) == k


def test_query_tail_is_light():
    n, k = 1000, 137
    counts = []
    for seed in range(1000):
        ranking = np.random.default_rng(seed).permutation(n)
        counts.append(tournament_select(perfect_oracle(ranking), n, k, Stream(seed)).edge_queries)
    counts = np.array(counts)
    assert np.quantile(counts, 0.999) < 6 * counts.mean()


def test_bad_arguments():
    with pytest.raises(PreconditionError):
        tournament_select(perfect_oracle([0, 1]), 2, 2, Stream(0))


def test_two_items_reduce_to_one_coupling_call():
    inst = gen_diag_eps(2, 1, 0.2)
    r = topk_min_columns(2, 0.25)
    for seed in range(10):
        samples, truth = sample_topk(inst, r, Stream(seed))
        labels, stats = solve_topk(samples, 1, 0.25, Stream(seed, 1))
        assert stats.edge_queries == 1
        call_alpha = 0.25 / 8
        keys = Stream(seed, 1).subkeys(TAG_PAIR, 4)
        rows = DominationSamples(samples.z[0], samples.z[1])
        from sstrank.solvers import run_kernel

        guess, _ = run_kernel("coup", rows.batched(), keys[1:2], alpha=call_alpha)
        assert labels == {0 if guess[0] == 0 else 1}


def test_large_gaps_always_solved():
    a = np.full((6, 6), 0.5)
    a[np.triu_indices(6, 1)] = 0.99
    a[np.tril_indices(6, -1)] = 0.01
    inst = TopKInstance(a, 3)
    for seed in range(20):
        samples, truth = sample_topk(inst, 600, Stream(seed))
        labels, _ = solve_topk(samples, 3, 0.25, Stream(seed, 1))
        assert labels == truth.top_set(3)


def test_too_few_columns():
    samples, _ = sample_topk(gen_diag_eps(4, 2, 0.2), 10, Stream(0))
    with pytest.raises(InsufficientSamplesError):
        solve_topk(samples, 2, 0.25, Stream(0))


def _correct_algorithm(instance, stream, hidden):
    """A Top-K answer built from knowledge the reduction hides from real algorithms."""
    n, k = instance.n, instance.k
    a, b = k - 1, k
    others = np.array([j for j in range(n) if j not in (a, b)])
    rank = np.arange(n)
    rank[others] = stream.child(TAG_RELABEL).generator().permutation(others)
    relabel = stream.child(TAG_RELABEL + 100).generator().permutation(n)
    top = {int(relabel[j]) for j in others if rank[j] < k - 1}
    top.add(int(relabel[a if hidden == 0 else b]))
    return lambda samples, kk, st: frozenset(top)


def test_reduction_with_correct_answers_recovers_bit():
    inst = gen_diag_eps(7, 3, 0.1)
    dom = domination_from_topk(inst)
    for t in range(40):
        samples, truth = sample_domination(dom, 20, Stream(1, t))
        algo = _correct_algorithm(inst, Stream(2, t), truth.hidden_bit)
        assert reduction_lowerbound(algo, inst, samples, Stream(2, t)) == truth.hidden_bit


def test_reduction_with_random_answers_is_fair():
    inst = gen_diag_eps(7, 3, 0.1)
    dom = domination_from_topk(inst)

    def guess(samples, k, stream):
        return frozenset(stream.generator().choice(samples.n, k, replace=False).tolist())

    wins = 0
    trials = 2000
    for t in range(trials):
        samples, truth = sample_domination(dom, 8, Stream(3, t))
        wins += reduction_lowerbound(guess, inst, samples, Stream(4, t)) == truth.hidden_bit
    lo, hi = wilson_interval(wins, trials, 0.999)
    assert lo <= 0.5 <= hi


def _reduction_rate(inst, r, trials, seed):
    dom = domination_from_topk(inst)
    algo = lambda s, k, st: solve_topk(s, k, 0.25, st)[0]
    wins = 0
    for t in range(trials):
        samples, truth = sample_domination(dom, 2 * r, Stream(seed, t))
        wins += reduction_lowerbound(algo, inst, samples, Stream(seed + 1, t)) == truth.hidden_bit
    return wins


def test_reduction_with_real_solver():
    # Rows that differ in every column: the solver separates items k and k+1 either way.
    inst = TopKInstance(sst_from_scores([2.0, 1.2, 0.6, 0.0, -0.5, -1.5]), 3)
    wins = _reduction_rate(inst, 4000, 200, 7)
    assert wins / 200 >= 0.75


def test_reduction_on_diagonal_rows_matches_prediction():
    # Under B = 1 the only cell separating the two items is a fair coin, so
    # a reliable solver lands at 1/2 + 1/2 * 1/2.
    inst = gen_diag_eps(6, 3, 0.25)
    trials = 300
    wins = _reduction_rate(inst, 4000, trials, 9)
    lo, hi = wilson_interval(wins, trials, 0.999)
    assert lo <= 0.75 <= hi


def test_reduction_needs_two_halves():
    inst = gen_diag_eps(5, 2, 0.1)
    samples, _ = sample_domination(domination_from_topk(inst), 5, Stream(0))
    with pytest.raises(PreconditionError):
        reduction_lowerbound(lambda s, k, st: frozenset(), inst, samples, Stream(0), r=3)
