import json

import numpy as np
import pytest

import mrc_toolkit as mt


def softmax(x):
    e = np.exp(x - x.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def test_metrics():
    assert mt.normalize_answer("The Eiffel Tower!") == "eiffel tower"
    assert mt.exact_match("the cat", "Cat") == 1
    assert mt.token_f1("red green blue", "red green yellow white") == pytest.approx(4 / 7)


def test_joint_loss_and_sampling():
    assert mt.joint_loss(0.6, 1.0, 0.5, 1.0) == 1.3
    assert mt.joint_loss(None, 2.0) == 2.0
    with pytest.raises(ValueError):
        mt.joint_loss(None, None)
    assert mt.sampling_probs([15000, 100000]) == pytest.approx([15000 / 115000, 100000 / 115000])


def test_mem_att_matches_numpy():
    rng = np.random.default_rng(0)
    q, k, v = rng.normal(size=(5, 4)), rng.normal(size=(5, 4)), rng.normal(size=(5, 3))
    s = q @ k.T / np.sqrt(4)
    expect = (softmax(s) + softmax(s.T)) @ v
    np.testing.assert_allclose(mt.mem_att(q, k, v), expect, atol=1e-12)
    np.testing.assert_allclose(mt.mem_att(q, k, v, mode="standard"), softmax(s) @ v, atol=1e-12)
    with pytest.raises(ValueError):
        mt.mem_att(q, k, v, mode="other")


def test_gen_data(tmp_path):
    mt.gen_data(str(tmp_path), seed=3)
    doc = json.loads((tmp_path / "mrc_train.en.json").read_text())
    qa = doc["data"][0]["paragraphs"][0]
    ans = qa["qas"][0]["answers"][0]
    assert qa["context"][ans["answer_start"]:].startswith(ans["text"])


def test_train_and_evaluate(tmp_path, smoke_config):
    data = tmp_path / "data"
    mt.gen_data(str(data))
    run = tmp_path / "run"
    info = mt.train(str(run), config=smoke_config, data=str(data))
    assert info["steps"] > 0 and np.isfinite(info["final_loss"])
    report = mt.evaluate([str(run)], data=str(data))
    assert set(report["subsets"]) == {"adversarial", "in_domain", "paraphrase"}
    assert 0 <= report["em"] <= 100
    with pytest.raises(OSError):
        mt.evaluate([str(tmp_path / "missing")])


def test_gradcheck(smoke_config):
    passed, worst = mt.gradcheck(smoke_config, coords=2)
    assert passed and worst < 1e-4
