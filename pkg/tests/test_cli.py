import json

import pytest

from beliefdialog.cli import main


class TestExitCodes:
    def test_usage_error_is_one(self, capsys):
        with pytest.raises(SystemExit) as err:
            main(["no-such-command"])
        assert err.value.code == 1

    def test_missing_required_flag_is_one(self):
        with pytest.raises(SystemExit) as err:
            main(["eval"])
        assert err.value.code == 1

    def test_configuration_error_is_two(self, tmp_path):
        bad = tmp_path / "config.json"
        bad.write_text("not json", encoding="utf-8")
        assert main(["infer", "--text", "hi", "--config", str(bad)]) == 2

    def test_runtime_error_is_three(self, tmp_path):
        assert main(["reason", "--rules", str(tmp_path / "missing.dl"),
                     "--facts", str(tmp_path / "missing.pl")]) == 3


class TestSubcommands:
    def test_infer_prints_distribution(self, capsys):
        assert main(["infer", "--text", "I am so confused about everything"]) == 0
        out = capsys.readouterr().out
        assert "confused" in out and "<-" in out

    def test_extract_prints_triples_and_facts(self, capsys):
        assert main(["extract", "--text", "I prefer morning classes"]) == 0
        out = capsys.readouterr().out
        assert "(i, prefer, morning classes)" in out
        assert "preference(timing, morning)" in out

    def test_reason_prints_closure(self, tmp_path, capsys):
        rules = tmp_path / "rules.dl"
        rules.write_text("p(X) => q(X).\n", encoding="utf-8")
        facts = tmp_path / "facts.pl"
        facts.write_text("p(a).\n", encoding="utf-8")
        assert main(["reason", "--rules", str(rules), "--facts", str(facts)]) == 0
        out = capsys.readouterr().out
        assert "q(a)" in out

    def test_train_and_eval_round_trip(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.tsv"
        rows = []
        for i in range(6):
            rows.append(f"curious\ti am excited to explore subject {i}")
            rows.append(f"confused\ti am lost and unsure about subject {i}")
            rows.append(f"neutral\ti need to register for subject {i}")
        corpus.write_text("\n".join(rows) + "\n", encoding="utf-8")
        model = tmp_path / "model.bin"
        assert main(["train", "--corpus", str(corpus), "--out", str(model),
                     "--epochs", "2", "--seed", "7"]) == 0
        assert model.exists()
        assert main(["eval", "--model", str(model), "--corpus", str(corpus)]) == 0
        out = capsys.readouterr().out
        assert "accuracy" in out

    def test_infer_with_trained_model(self, tmp_path, capsys):
        corpus = tmp_path / "corpus.tsv"
        corpus.write_text("curious\texploring things is fun\n"
                          "confused\ttotally lost right now\n"
                          "neutral\tjust need a schedule\n", encoding="utf-8")
        model = tmp_path / "model.bin"
        main(["train", "--corpus", str(corpus), "--out", str(model), "--epochs", "1"])
        capsys.readouterr()
        assert main(["infer", "--text", "hello", "--model", str(model)]) == 0
        out = capsys.readouterr().out
        assert "curious" in out

    def test_config_file_paths_honored(self, tmp_path):
        config = tmp_path / "app.json"
        config.write_text(json.dumps({"ontology": "does-not-exist.txt"}), encoding="utf-8")
        # missing referenced file fails fast as a configuration error
        assert main(["chat", "--config", str(config)]) == 2
