import json
import math

import pytest

from head_automata import cli
from head_automata.cli import EXIT_INPUT, EXIT_INTERNAL, EXIT_OK, main
from head_automata.model_io import dump_model, load_model
from head_automata.toy_models import ambiguous_parser_model


def _records(path):
    with open(path, encoding="utf-8") as f:
        return [json.loads(line) for line in f]


def _bytes(path):
    with open(path, "rb") as f:
        return f.read()


def test_validate(tmp_path, fixture_path):
    out = str(tmp_path / "report.json")
    assert main(["validate", "--model", fixture_path("ambiguous.json"), "--out", out]) == EXIT_OK
    assert _records(out) == [{"ok": True, "violations": []}]


def test_validate_rejects_an_unnormalized_model(tmp_path):
    model = ambiguous_parser_model()
    doc_path = dump_model(model, str(tmp_path / "model.json"))
    with open(doc_path, encoding="utf-8") as f:
        doc = json.load(f)
    doc["top_params"]["c"]["leaf"]["0"] = 0.5
    with open(doc_path, "w", encoding="utf-8") as f:
        json.dump(doc, f)
    out = str(tmp_path / "report.json")
    assert main(["validate", "--model", doc_path, "--out", out]) == EXIT_INPUT
    assert _records(out)[0]["violations"][0]["rule"] == "normalization"
    assert main(["validate", "--model", doc_path, "--renormalize", "--out", out]) == EXIT_OK


def test_sample_score_parse_pipeline(tmp_path, fixture_path):
    model = fixture_path("ambiguous.json")
    trees = str(tmp_path / "trees.jsonl")
    scores = str(tmp_path / "scores.jsonl")
    parses = str(tmp_path / "parses.jsonl")
    assert main(["sample", "--model", model, "--seed", "5", "--count", "20", "--max-depth", "3",
                 "--out", trees]) == EXIT_OK
    assert main(["score", "--model", model, "--in", trees, "--out", scores]) == EXIT_OK
    assert main(["parse", "--model", model, "--in", trees, "--out", parses, "--workers", "2"]) == EXIT_OK
    score_records, parse_records = _records(scores), _records(parses)
    assert len(score_records) == len(parse_records) == 20
    for scored, parsed in zip(score_records, parse_records):
        assert math.isfinite(scored["cost"])
        assert parsed["cost"] <= scored["cost"] + 1e-9


def test_reruns_are_byte_identical(tmp_path, fixture_path):
    outputs = []
    for run in range(2):
        out = str(tmp_path / f"sentences{run}.txt")
        assert main(["sample", "--model", fixture_path("ambiguous.json"), "--seed", "9", "--count", "30",
                     "--format", "sentences", "--out", out]) == EXIT_OK
        outputs.append(_bytes(out))
    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) == 30


def test_parse_nbest(tmp_path, fixture_path):
    out = str(tmp_path / "parses.jsonl")
    assert main(["parse", "--model", fixture_path("ambiguous.json"), "--in", fixture_path("ambiguous_sentences.txt"),
                 "--nbest", "2", "--out", out]) == EXIT_OK
    records = _records(out)
    assert [len(r["parses"]) for r in records] == [2, 1, 0, 0]


def test_parse_failures_are_records(tmp_path, fixture_path):
    out = str(tmp_path / "parses.jsonl")
    assert main(["parse", "--model", fixture_path("ambiguous.json"), "--in", fixture_path("ambiguous_sentences.txt"),
                 "--out", out]) == EXIT_OK
    records = _records(out)
    assert records[0]["cost"] == pytest.approx(-math.log(0.06))
    assert records[2] == {"tree": None, "cost": None, "reason": "unknown-word", "token": "d"}
    assert records[3]["reason"] == "no-derivation"


def test_score_reports_impossible_trees(tmp_path, fixture_path):
    out = str(tmp_path / "scores.jsonl")
    assert main(["score", "--model", fixture_path("ambiguous.json"), "--in", fixture_path("treebank.jsonl"),
                 "--out", out]) == EXIT_OK
    assert [r["reason"] for r in _records(out)] == ["impossible-derivation"] * 3


def test_translate(tmp_path, fixture_path):
    out = str(tmp_path / "translations.jsonl")
    assert main(["translate", "--model", fixture_path("identity.json"), "--in",
                 fixture_path("identity_sentences.txt"), "--out", out]) == EXIT_OK
    assert [r["target"] for r in _records(out)] == [["a", "b"], ["c", "a", "b"], ["b"]]

    assert main(["translate", "--model", fixture_path("reordering.json"), "--in",
                 fixture_path("reordering_sentences.txt"), "--out", out]) == EXIT_OK
    records = _records(out)
    assert records[0]["target"] == ["jean", "marie", "aime"]
    assert [r.get("reason") for r in records[3:]] == ["no-derivation", "no-lexicon-pair"]


def test_accepts(tmp_path, fixture_path):
    out = str(tmp_path / "accepts.jsonl")
    assert main(["accepts", "--model", fixture_path("anbn.json"), "--in", fixture_path("anbn_strings.txt"),
                 "--out", out]) == EXIT_OK
    records = _records(out)
    assert [r["accepted"] for r in records] == [True, True, False, False]
    assert records[1]["cost"] == pytest.approx(math.log(2))


def test_train_acceptor(tmp_path, fixture_path):
    out = str(tmp_path / "model.json")
    assert main(["train-acceptor", "--model", fixture_path("skeletons.json"), "--in", fixture_path("treebank.jsonl"),
                 "--out", out]) == EXIT_OK
    model = load_model(out)
    assert model.top_params[("sleeps", "verb", 0)] == pytest.approx(1 / 3)


def test_train_transducer_then_translate(tmp_path, fixture_path):
    model_path = str(tmp_path / "trained.json")
    log_path = str(tmp_path / "log.jsonl")
    assert main(["train-transducer", "--in", fixture_path("toy_corpus.jsonl"),
                 "--dictionary", fixture_path("toy_dictionary.tsv"), "--iterations", "3",
                 "--out", model_path, "--log", log_path]) == EXIT_OK
    log = _records(log_path)
    assert [entry["iter"] for entry in log] == [1, 2, 3]
    for before, after in zip(log, log[1:]):
        assert after["loglik"] >= before["loglik"] - 1e-9

    sentences = tmp_path / "sentences.txt"
    sentences.write_text("john sleeps\n", encoding="utf-8")
    out = str(tmp_path / "translations.jsonl")
    assert main(["translate", "--model", model_path, "--in", str(sentences), "--out", out]) == EXIT_OK
    assert sorted(_records(out)[0]["target"]) == ["dort", "jean"]


@pytest.mark.parametrize("argv", [
    ["parse", "--in", "sentences.txt"],
    ["sample", "--model", "model.json"],
    ["parse", "--model", "{anbn}", "--in", "{sentences}"],
    ["score", "--model", "{ambiguous}", "--in", "{bad_trees}"],
    ["validate", "--model", "{bad_model}"],
    ["parse", "--model", "{ambiguous}", "--in", "{sentences}", "--nbest", "0"],
])
def test_bad_input_exits_with_two(fixture_path, argv):
    names = {"anbn": "anbn.json", "ambiguous": "ambiguous.json", "sentences": "ambiguous_sentences.txt",
             "bad_trees": "bad_trees.jsonl", "bad_model": "bad_model.json"}
    argv = [arg.format(**{k: fixture_path(v) for k, v in names.items()}) for arg in argv]
    assert main(argv + ["--out", "-"]) == EXIT_INPUT


def test_internal_errors_exit_with_one(monkeypatch, fixture_path):
    def broken(config):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.COMMANDS, "validate", broken)
    assert main(["validate", "--model", fixture_path("anbn.json")]) == EXIT_INTERNAL


def test_worker_pool_reads_a_bounded_window():
    consumed = []

    def lines():
        for i in range(100):
            consumed.append(i)
            yield i

    results = cli._ordered_map(lambda x: x * 2, lines(), workers=2)
    assert next(results) == 0
    assert len(consumed) == 2 * cli.READ_AHEAD
    assert list(results) == [2 * i for i in range(1, 100)]
