import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sstrank import (
    DominationInstance,
    Permutation,
    ProbMatrix,
    TopKInstance,
    domination_from_topk,
    embed_domination,
    gen_diag_eps,
    sst_from_scores,
    validate_sst,
)
from sstrank.errors import EmbeddingError, InputShapeError, InvariantError, PreconditionError
from reference import LOGISTIC_1

scores = st.lists(st.floats(-5, 5, allow_nan=False), min_size=1, max_size=12).map(
    lambda v: sorted(v, reverse=True)
)


def test_minimal_sst_ok():
    assert validate_sst([[0.5, 0.7], [0.3, 0.5]]).ok


def test_skew_violation_reported_one_based():
    v = validate_sst([[0.5, 0.7], [0.4, 0.5]])
    assert not v.ok
    assert v.violations[0].rule == "skew-symmetry"
    assert v.violations[0].indices == (2, 1)


def test_diagonal_and_monotonicity_violations():
    v = validate_sst([[0.4, 0.7], [0.3, 0.5]])
    assert any(x.rule == "diagonal" and x.indices == (1, 1) for x in v.violations)
    v = validate_sst([[0.5, 0.3], [0.7, 0.5]])
    assert any(x.rule == "row-monotonicity" for x in v.violations)


def test_bad_shapes_rejected():
    with pytest.raises(InputShapeError):
        validate_sst([[0.5, 0.5, 0.5]])
    with pytest.raises(InputShapeError):
        validate_sst([[0.5, 1.2], [-0.2, 0.5]])


def test_logistic_scores():
    m = sst_from_scores([2, 1, 0])
    assert validate_sst(m.entries).ok
    assert np.all(sst_from_scores([0, 0]).entries == 0.5)
    assert sst_from_scores([1, 0]).entries[0, 1] == pytest.approx(LOGISTIC_1, abs=1e-9)


def test_gaussian_scores_and_bad_input():
    assert validate_sst(sst_from_scores([3, 2, 1], "gaussian").entries).ok
    with pytest.raises(PreconditionError):
        sst_from_scores([0, 1])


@settings(max_examples=60, deadline=None)
@given(scores, st.sampled_from(["logistic", "gaussian"]))
def test_scores_always_give_sst(w, link):
    m = sst_from_scores(w, link)
    assert validate_sst(m.entries).ok
    sums = m.entries.sum(axis=1)
    assert np.all(np.diff(sums) <= 1e-9)


def test_prob_matrix_is_read_only_and_checked():
    m = ProbMatrix([[0.5, 0.7], [0.3, 0.5]])
    with pytest.raises(ValueError):
        m.entries[0, 0] = 0.1
    with pytest.raises(InvariantError):
        ProbMatrix([[0.5, 0.7], [0.4, 0.5]])


def test_topk_instance_k_range():
    m = ProbMatrix([[0.5, 0.7], [0.3, 0.5]])
    assert TopKInstance(m, 1).k == 1
    with pytest.raises(PreconditionError):
        TopKInstance(m, 2)


def test_domination_instance_order():
    with pytest.raises(InvariantError):
        DominationInstance([0.4], [0.5])
    with pytest.raises(InputShapeError):
        DominationInstance([0.4, 0.5], [0.3])


def test_rows_extracted():
    m = sst_from_scores([2, 1, 0])
    d = domination_from_topk(TopKInstance(m, 1))
    assert np.array_equal(d.p, m.entries[0]) and np.array_equal(d.q, m.entries[1])
    equal = TopKInstance(ProbMatrix(np.full((3, 3), 0.5)), 1)
    d = domination_from_topk(equal)
    assert np.array_equal(d.p, d.q)


def test_diag_eps_rows():
    # Rows 2 and 3 of the 4x4 block pattern with eps = 0.1.
    d = domination_from_topk(gen_diag_eps(4, 2, 0.1))
    assert np.allclose(d.p, [0.4, 0.5, 0.6, 0.6])
    assert np.allclose(d.q, [0.4, 0.4, 0.5, 0.6])


def test_embedding_example():
    t = embed_domination(DominationInstance([0.30, 0.35], [0.28, 0.33]))
    a = t.matrix.entries
    assert t.n == 4 and t.k == 3
    assert a[2, 0] == 0.30 and a[3, 0] == 0.28 and a[0, 2] == pytest.approx(0.70)
    assert a[0, 1] == a[1, 0] == 0.5 and a[2, 3] == a[3, 2] == 0.5
    assert validate_sst(a).ok


def test_embedding_equal_rows_and_errors():
    t = embed_domination(DominationInstance([0.3, 0.4], [0.3, 0.4]))
    assert np.array_equal(t.matrix.entries[2], t.matrix.entries[3])
    with pytest.raises(EmbeddingError):
        embed_domination(DominationInstance([0.6, 0.7], [0.5, 0.5]))
    with pytest.raises(EmbeddingError):
        embed_domination(DominationInstance([0.3, 0.3], [0.2, 0.2]))


@settings(max_examples=60, deadline=None)
@given(
    st.integers(1, 10),
    st.floats(1e-6, 0.02),
    st.lists(st.booleans(), min_size=20, max_size=20),
    st.lists(st.booleans(), min_size=20, max_size=20),
)
def test_embedding_round_trip(n, eps, in_p, in_q):
    base = 0.25 + np.arange(1, n + 1) / (8.0 * n)
    assume(np.all(base[:-1] * (1 + eps) <= base[1:] * (1 - eps)))  # ramp spacing
    p = np.where(in_p[:n], base * (1 + eps), base)
    q = np.where(in_q[:n], base * (1 - eps), base)
    t = embed_domination(DominationInstance(p, q))
    assert validate_sst(t.matrix.entries).ok
    back = domination_from_topk(t)
    assert np.array_equal(back.p[:n], p) and np.array_equal(back.q[:n], q)
    assert np.all(back.p[n:] == 0.5) and np.all(back.q[n:] == 0.5)


def test_permutation():
    perm = Permutation.from_one_based([2, 3, 1])
    assert perm.forward.tolist() == [1, 2, 0]
    assert perm.inverse[perm.forward].tolist() == [0, 1, 2]
    assert perm.one_based() == [2, 3, 1]
    with pytest.raises(InvariantError):
        Permutation([0, 0, 1])
