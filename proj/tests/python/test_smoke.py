"""Smoke tests for the Python module. Runs under pytest or plain python."""

import json
import tempfile
from pathlib import Path

import stylereward as sr

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def read_levels(name, k):
    return [(FIXTURES / name / f"{l}.txt").read_text().splitlines() for l in range(1, k + 1)]


def test_text_and_readability():
    assert sr.tokenize("Don't stop. Go!") == ["don't", "stop", "go"]
    assert sr.count_syllables("scientist") == 3
    assert abs(sr.fre_score("The scientist did careful tests to get correct results.") - 66.10) <= 0.5
    assert abs(sr.fre_delta(66.10, 2) - 3.9) < 1e-9


def test_metrics():
    x = "The scientist did careful tests to get correct results."
    y = "The scientist did careful experiments to obtain precise results."
    assert abs(sr.rouge_l(x, y) - 66.67) <= 0.01
    assert sr.lcs_length(list("abcb"), list("bdcab")) == 3


def test_models_round_trip():
    levels = [["good food", "good service good food", "great food"],
              ["bad food", "bad bad service", "slow food"]]
    # The two-level toy fixture needs a two-level scale file.
    with tempfile.TemporaryDirectory() as d:
        scale = Path(d) / "toy.json"
        scale.write_text(json.dumps({
            "version": 1, "name": "toy", "metric": "STAR",
            "levels": [{"index": 1, "label": "positive", "prompt_name": "Positive"},
                       {"index": 2, "label": "negative", "prompt_name": "Negative"}]}))
        pivots = sr.PivotModel.fit(levels, str(scale))
        assert pivots.levels == 2
        assert pivots.vocabulary == ["bad", "food", "good", "great", "service", "slow"]
        r1 = pivots.lexicon_reward("good food", 1)
        r2 = pivots.lexicon_reward("good food", 2)
        assert abs(r1 + r2 - 1.0) <= 1e-9 and r1 > r2
        path = Path(d) / "p.json"
        pivots.save(path)
        assert sr.PivotModel.load(path).vocabulary == pivots.vocabulary

    nb = sr.NaiveBayes.train([["good food"], ["bad food"]])
    assert abs(nb.posterior("good")[0] - 2 / 3) <= 1e-9
    assert nb.predict("bad") == 2

    table = sr.EmbeddingTable.parse("good 1 0\nbad 0 1\n")
    assert table.dim == 2 and len(table) == 2
    assert sr.consistency_reward("good bad", "good bad", table) == 1.0


def test_errors_carry_kind():
    try:
        sr.NaiveBayes.train([["only one level"]])
    except sr.StyleRewardError as e:
        assert e.kind == "SingleLevel"
    else:
        raise AssertionError("expected StyleRewardError")


def test_engine():
    with tempfile.TemporaryDirectory() as d:
        d = Path(d)
        sent = read_levels("sentiment", 5)
        sr.PivotModel.fit(sent, "sentiment").save(d / "sent.pivots")
        sr.NaiveBayes.train(sent).save(d / "sent.nb")
        (d / "engine.json").write_text(json.dumps({
            "embeddings": {"path": str(FIXTURES / "embeddings.txt")},
            "styles": {"sentiment": {"pivots": "sent.pivots",
                                     "judge": {"kind": "naive_bayes", "path": "sent.nb"}}}}))
        engine = sr.Engine(d / "engine.json", "sentiment")
        assert engine.levels == 5
        same = engine.reward("Good food.", "Good food.", 4)
        assert abs(same["r_cons"] - 1.0) <= 1e-12
        for key in ("r_sent", "r_lex", "r_cons", "total", "h_re"):
            assert 0.0 <= same[key] <= 1.0
        assert engine.judge("Absolutely amazing food.")["predicted_level"] == 5
        out = engine.transfer("The food was bad and the service was slow.", 5)
        assert out["trace"]["final"]["total"] > out["trace"]["initial"]["total"]
        ranked = engine.rerank(["Terrible food.", "Amazing food."], "Good food.", 5)
        assert ranked[0]["text"] == "Amazing food."
        try:
            engine.reward("a", "b", 9)
        except sr.StyleRewardError as e:
            assert e.kind == "UnknownLevel"
        else:
            raise AssertionError("expected UnknownLevel")


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print("ok", name)
