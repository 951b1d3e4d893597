import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from reactsent.annotate import LabeledPost, SentimentLabel
from reactsent.baselines import (BaselineError, StarModel, TokenReactionTable, fit_core, fit_star, majority_label,
                                 predict_core, predict_star, sen_to_star)

POS, NEG = SentimentLabel.POSITIVE, SentimentLabel.NEGATIVE

TRAIN = [
    LabeledPost("p1", ["a", "b"], 1.0, POS, (1.0, 0.0, 0.0, 0.0)),
    LabeledPost("p2", ["a", "a", "c"], -1.0, NEG, (0.0, 0.0, 1.0, 0.0)),
]


def test_core_table_counts_each_token_once_per_post():
    table = fit_core(TRAIN)
    assert table.vectors["a"].tolist() == [0.5, 0.0, 0.5, 0.0]
    assert table.support == {"a": 2, "b": 1, "c": 1}
    assert table.global_mean.tolist() == [0.5, 0.0, 0.5, 0.0]


@pytest.mark.parametrize("tokens,label", [(["a"], POS), (["c", "b"], POS), (["c"], NEG),
                                          (["unseen"], POS), ([], POS), (["b", "b", "c"], POS)])
def test_core_predictions(tokens, label):
    assert predict_core(tokens, fit_core(TRAIN))[1] is label


def test_core_skips_unscored_posts():
    extra = TRAIN + [LabeledPost("p3", ["b"], 0.0, POS, None)]
    assert fit_core(extra).support["b"] == 1
    with pytest.raises(BaselineError):
        fit_core([LabeledPost("p3", ["b"], 0.0, POS, None)])


def test_star_model():
    model = fit_star(TRAIN)
    assert model.stars == {"a": 3.0, "b": 5.0, "c": 1.0}
    assert model.prior == 3.0
    assert predict_star(["a"], model) == (3.0, POS)
    assert predict_star(["c"], model) == (1.0, NEG)
    assert predict_star(["b", "c", "c"], model)[1] is NEG
    with pytest.raises(BaselineError):
        fit_star([])


@given(st.integers(0, 4 * 10**6), st.integers(0, 4 * 10**6))
def test_star_scale(positive, negative):
    # annotation only yields sen = (P - N) / t, so |sen| is 0 or at least 1/t; far smaller
    # magnitudes would round 3 + 2 sen to exactly 3
    if positive + negative == 0:
        return
    sen = (positive - negative) / (positive + negative)
    star = sen_to_star(sen)
    assert 1.0 <= star <= 5.0
    assert (star >= 3.0) == (sen >= 0.0)


@given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5), st.integers(0, 5), st.integers(0, 5))
                .filter(lambda c: sum(c) > 0), min_size=1, max_size=8))
def test_core_prediction_is_a_distribution(counts):
    posts = []
    for i, c in enumerate(counts):
        t = sum(c)
        dist = tuple(x / t for x in c)
        posts.append(LabeledPost(f"p{i}", [f"w{i % 3}", "shared"], 0.0, POS, dist))
    table = fit_core(posts)
    pred, _ = predict_core(["w0", "w1", "shared"], table)
    assert pred.sum() == pytest.approx(1.0)
    assert np.all(pred >= 0)


def test_majority_label():
    assert majority_label(TRAIN) is POS  # a tie goes to Positive
    assert majority_label(TRAIN[1:]) is NEG


def test_save_load_roundtrip(tmp_path):
    table = fit_core(TRAIN)
    table.save(tmp_path / "core.jsonl")
    loaded = TokenReactionTable.load(tmp_path / "core.jsonl")
    assert loaded.support == table.support
    assert all(np.array_equal(loaded.vectors[k], v) for k, v in table.vectors.items())
    assert np.array_equal(loaded.global_mean, table.global_mean)

    star = fit_star(TRAIN)
    star.save(tmp_path / "star.jsonl")
    assert StarModel.load(tmp_path / "star.jsonl") == star
