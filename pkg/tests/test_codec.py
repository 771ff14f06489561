import json

import numpy as np
import pytest

from sstrank import DominationInstance, gen_diag_eps, read_instance, sst_from_scores, write_instance
from sstrank.codec import dumps_instance, loads_instance, read_meta
from sstrank.errors import LoadError
from sstrank.model import TopKInstance


def test_topk_round_trip(tmp_path):
    inst = TopKInstance(sst_from_scores([1.3, 0.2, -0.7]), 2)
    path = tmp_path / "t.json"
    write_instance(inst, path)
    assert read_instance(path) == inst
    assert read_instance(path, "topk") == inst


def test_domination_round_trip_is_bit_exact(tmp_path):
    rng = np.random.default_rng(5)
    q = rng.random(7) * 0.5
    inst = DominationInstance(q + rng.random(7) * 0.5, q)
    path = tmp_path / "d.json"
    write_instance(inst, path, meta={"s_p": [1, 3]})
    back = read_instance(path)
    assert back == inst
    assert read_meta(path) == {"s_p": [1, 3]}


def test_order_violation_message():
    text = json.dumps({"kind": "domination", "n": 1, "p": [0.2], "q": [0.3]})
    with pytest.raises(LoadError, match="domination order violated"):
        loads_instance(text)


def test_non_skew_message():
    text = json.dumps({"kind": "topk", "n": 2, "k": 1, "P": [[0.5, 0.7], [0.4, 0.5]]})
    with pytest.raises(LoadError, match="skew-symmetry"):
        loads_instance(text)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        json.dumps({"kind": "domination", "n": 2, "p": [0.5], "q": [0.5]}),
        json.dumps({"kind": "other", "n": 1}),
        json.dumps({"kind": "topk", "n": 2, "k": 5, "P": [[0.5, 0.5], [0.5, 0.5]]}),
    ],
)
def test_malformed_files(text):
    with pytest.raises(LoadError):
        loads_instance(text)


def test_kind_mismatch_and_missing_file(tmp_path):
    text = dumps_instance(gen_diag_eps(3, 1, 0.1))
    with pytest.raises(LoadError):
        loads_instance(text, "domination")
    with pytest.raises(LoadError):
        read_instance(tmp_path / "missing.json")
