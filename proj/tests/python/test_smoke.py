import math
import os
import sys
import tempfile

import pytest

if os.environ.get("TROLLSCOPE_PYTHON_PATH"):
    sys.path.insert(0, os.environ["TROLLSCOPE_PYTHON_PATH"])

import trollscope as ts

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")

TABLE1 = [
    [72, 6, 7, 0, 17],
    [2, 742, 85, 39, 95],
    [36, 1250, 4562, 523, 1641],
    [12, 505, 1497, 13092, 2243],
    [79, 2681, 5609, 2881, 15532],
]
CLASSES = ["Fearmonger", "HashtagGamer", "LeftTroll", "NewsFeed", "RightTroll"]


def test_text_pipeline():
    assert ts.tokenize("Hello World!") == ["hello", "world"]
    assert ts.stem("communities") == "communiti"
    assert ts.stem("happiness") == "happi"
    assert ts.analyze("the cats are running", stopwords=True, stemming=True) == ["cat", "run"]
    assert ts.analyze("the cats", stopwords=False, stemming=False) == ["the", "cats"]


def test_impurity():
    assert ts.gini([5, 5]) == pytest.approx(0.5)
    assert ts.gini([10, 0]) == 0.0
    assert ts.entropy([5, 5]) == pytest.approx(1.0)


def test_table_accuracies():
    acc = ts.per_class_accuracy(CLASSES, TABLE1)
    assert [round(a, 1) for a in acc] == [70.6, 77.1, 56.9, 75.5, 58.0]
    assert sum(map(sum, TABLE1)) == 53208
    assert ts.largest_remainder_quotas([5, 3, 2], 4) == [2, 1, 1]


def test_account_verdicts():
    preds = [("a", "LeftTroll"), ("a", "LeftTroll"), ("a", "RightTroll"),
             ("b", "LeftTroll"), ("b", "LeftTroll"), ("b", "RightTroll"), ("b", "RightTroll")]
    report = ts.classify_accounts(preds)
    assert report["verdicts"] == {"a": "LeftTroll", "b": "Tie"}
    assert report["histogram"]["Tie"] == 1
    assert report["histogram"]["LeftTroll"] == 1
    assert list(report["histogram"])[:-1] == ts.categories()


def test_fit_lda():
    texts = ["apple banana apple banana"] * 5 + ["carrot daikon carrot daikon"] * 5
    fit = ts.fit_lda(texts, 2, alpha=0.5, iterations=200, burn_in=100, seed=3, stopwords=False, stemming=False)
    assert fit["terms"] == ["apple", "banana", "carrot", "daikon"]
    assert len(fit["phi"]) == 2 and len(fit["theta"]) == 10
    for row in fit["phi"] + fit["theta"]:
        assert math.isclose(sum(row), 1.0, abs_tol=1e-9)
    assert len(fit["top_words"][0]) == 4
    again = ts.fit_lda(texts, 2, alpha=0.5, iterations=200, burn_in=100, seed=3, stopwords=False, stemming=False)
    assert again["phi"] == fit["phi"]


def test_errors_carry_codes():
    with pytest.raises(ts.Error) as info:
        ts.fit_lda(["apple banana"], 0)
    assert info.value.code == "InvalidArgument"
    with pytest.raises(ts.Error) as info:
        ts.classify_accounts([("a", "Nonsense")])
    assert info.value.code == "UnknownCategory"
    with pytest.raises(ValueError):
        ts.fit_lda([], 2)


def test_cli_round_trip():
    with tempfile.TemporaryDirectory() as out:
        code, _, err = ts.run_cli(["ingest-tweets", "--input", os.path.join(FIXTURES, "tweets.csv"), "--out", out])
        assert code == 0, err
        assert os.path.exists(os.path.join(out, "corpus.csv"))
        code, _, err = ts.run_cli(["ingest-tweets", "--input", os.path.join(FIXTURES, "tweets_no_category.csv"),
                                   "--out", out])
        assert code == 2
        assert "MissingColumn" in err
