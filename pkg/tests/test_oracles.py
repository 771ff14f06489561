import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sstrank import (
    DominationInstance,
    Stream,
    bayes_decide,
    estimate_success,
    exact_mutual_information,
    exact_success_bayes,
    exact_success_count,
    exact_success_max,
    info_vec,
    pmf_coordinate_sum,
)
from sstrank.errors import ResourceError
from sstrank.samplers import DominationSamples
from reference import brute_bayes, brute_count_success, brute_max_success, loglik_ratio, trinomial_pmf


def small_instances(max_n=2):
    pair = st.tuples(st.floats(0.01, 0.99), st.floats(0.01, 0.99)).map(lambda t: (max(t), min(t)))
    return st.lists(pair, min_size=1, max_size=max_n).map(
        lambda v: DominationInstance([a for a, _ in v], [b for _, b in v])
    )


def within_4_sigma(est, value):
    sigma = math.sqrt(value * (1 - value) / est.trials)
    return abs(est.p_hat - value) <= 4 * sigma + 1e-12


def test_pmf_trivial():
    f = pmf_coordinate_sum(1.0, 0.0, 3)
    assert dict(zip(f.support.tolist(), f.mass.tolist()))[3] == 1.0 and f.total() == 1.0
    f = pmf_coordinate_sum(0.5, 0.5, 1)
    assert np.allclose(f.mass, [0.25, 0.5, 0.25], atol=1e-15)
    g = pmf_coordinate_sum(0.7, 0.2, 4, case_b=1)
    assert g.mean() == pytest.approx(4 * (0.2 - 0.7))


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.integers(1, 50))
def test_pmf_mean(a, b, r):
    f = pmf_coordinate_sum(a, b, r)
    assert f.mean() == pytest.approx(r * (a - b), abs=1e-10)
    assert f.total() == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.integers(1, 12))
def test_pmf_matches_trinomial_convolution(a, b, r):
    f = pmf_coordinate_sum(a, b, r)
    ref = trinomial_pmf(a, b, r)
    for v, m in zip(f.support.tolist(), f.mass.tolist()):
        assert m == pytest.approx(ref.get(v, 0.0), abs=1e-13)


def test_pmf_exact_mode():
    f = pmf_coordinate_sum(0.5, 0.25, 2, exact=True)
    assert f.total() == 1 and isinstance(f.mass[0], Fraction)
    assert f.mean() == Fraction(1, 2)


def test_count_oracle_examples():
    assert exact_success_count(DominationInstance([1.0], [0.0]), 1) == 1.0
    equal = DominationInstance([0.3, 0.8], [0.3, 0.8])
    assert exact_success_count(equal, 5, exact=True) == Fraction(1, 2)
    assert exact_success_count(equal, 5) == pytest.approx(0.5, abs=1e-14)


def test_count_oracle_against_simulation_and_brute_force():
    inst = DominationInstance([0.7, 0.7], [0.5, 0.5])
    v = exact_success_count(inst, 5)
    assert v == pytest.approx(brute_count_success(inst.p, inst.q, 5), abs=1e-12)
    assert within_4_sigma(estimate_success("count", inst, 5, 10**6, seed=11), v)


def test_max_oracle_examples():
    one = DominationInstance([0.7], [0.4])
    f = pmf_coordinate_sum(0.7, 0.4, 7)
    direct = math.fsum(f.mass[8:].tolist()) + 0.5 * f.mass[7]
    assert exact_success_max(one, 7) == pytest.approx(direct, abs=1e-14)
    equal = DominationInstance([0.2, 0.6, 0.5], [0.2, 0.6, 0.5])
    assert exact_success_max(equal, 4, exact=True) == Fraction(1, 2)


def test_max_oracle_against_simulation_and_brute_force():
    inst = DominationInstance([0.8, 0.6], [0.5, 0.5])
    v = exact_success_max(inst, 6)
    assert within_4_sigma(estimate_success("max", inst, 6, 10**6, seed=12), v)
    assert exact_success_max(inst, 4) == pytest.approx(brute_max_success(inst.p, inst.q, 4), abs=1e-12)


def test_exact_mode_matches_float():
    inst = DominationInstance([0.7, 0.55, 0.6], [0.5, 0.45, 0.2])
    for fn in (exact_success_count, exact_success_max):
        assert float(fn(inst, 6, exact=True)) == pytest.approx(fn(inst, 6), abs=1e-13)


def test_bayes_decide():
    inst = DominationInstance([1.0], [0.0])
    assert bayes_decide(inst, DominationSamples.from_dense([[1]], [[0]]), Stream(0)) == 0
    equal = DominationInstance([0.4], [0.4])
    s = DominationSamples.from_dense([[1, 1]], [[0, 0]])
    guesses = [bayes_decide(equal, s, Stream(t)) for t in range(2000)]
    assert abs(np.mean(guesses) - 0.5) < 0.05


def test_bayes_log_odds_formula():
    inst = DominationInstance([0.7, 0.6], [0.3, 0.45])
    r = 3
    for idx in range(2 ** (2 * 2 * r)):
        bits = [(idx >> b) & 1 for b in range(12)]
        X = np.array(bits[:6]).reshape(2, 3)
        Y = np.array(bits[6:]).reshape(2, 3)
        lo = loglik_ratio(inst.p, inst.q, X.sum(1), Y.sum(1), r)
        if abs(lo) > 1e-12:
            s = DominationSamples.from_dense(X, Y)
            assert bayes_decide(inst, s, Stream(idx)) == (0 if lo > 0 else 1)


def test_bayes_oracle_examples():
    assert exact_success_bayes(DominationInstance([1.0], [0.0]), 1) == 1.0
    assert exact_success_bayes(DominationInstance([0.3], [0.3]), 4) == pytest.approx(0.5)
    inst = DominationInstance([0.9], [0.1])
    assert exact_success_bayes(inst, 3) == pytest.approx(brute_bayes([0.9], [0.1], 3), abs=1e-14)


def test_mutual_information_examples():
    assert exact_mutual_information(DominationInstance([0.3], [0.3]), 3) == 0.0
    assert exact_mutual_information(DominationInstance([1.0], [0.0]), 1) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(small_instances(), st.integers(1, 6))
def test_information_inequalities(inst, r):
    mi = exact_mutual_information(inst, r)
    assert mi <= r * info_vec(inst).total + 1e-9
    assert exact_mutual_information(inst, r + 1) >= mi - 1e-12
    bayes = exact_success_bayes(inst, r)
    if mi < 0.05:
        assert bayes < 0.75
    assert bayes >= exact_success_count(inst, r) - 1e-12
    assert bayes >= exact_success_max(inst, r) - 1e-12


def test_resource_caps():
    big = DominationInstance(np.full(20, 0.6), np.full(20, 0.5))
    with pytest.raises(ResourceError):
        exact_success_bayes(big, 5)
    with pytest.raises(ResourceError):
        exact_success_max(big, 5)
    with pytest.raises(ResourceError):
        exact_success_count(big, 10_000)
    with pytest.raises(ResourceError):
        exact_success_count(big, 4, exact=True)
    with pytest.raises(ResourceError):
        pmf_coordinate_sum(0.5, 0.5, 20_000)


def test_mutual_information_survives_subnormal_cells():
    inst = DominationInstance([0.61755567], [0.61370353])
    mi = exact_mutual_information(inst, 1000)
    assert math.isfinite(mi) and mi <= 1000 * info_vec(inst).total + 1e-9
