import json

from chainflow.cli import main
from chainflow.examples import order_to_cash_xml


def test_cli_validate_ok(tmp_path, capsys):
    model = tmp_path / "m.bpmn"
    model.write_bytes(order_to_cash_xml())
    assert main(["validate", str(model)]) == 0
    assert "ok: Order To Cash" in capsys.readouterr().out


def test_cli_compile(tmp_path):
    model = tmp_path / "m.bpmn"
    model.write_bytes(order_to_cash_xml())
    out = tmp_path / "out"
    assert main(["compile", str(model), "--mode", "full", "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["contract-000.ir", "contract-001.ir", "contract-002.ir",
                     "contracts.txt", "dictionary.json"]
    dictionary = json.loads((out / "dictionary.json").read_text())
    assert len(dictionary["contracts"]) == 3
    assert "ValidatePO_Start" in (out / "contracts.txt").read_text()


def test_cli_datasets_and_replay(tmp_path, capsys):
    out = tmp_path / "data"
    assert main(["datasets", "--out", str(out), "--traces", "4",
                 "--noise", "0.5", "--seed", "3"]) == 0
    assert (out / "supply-chain.bpmn").exists()
    assert (out / "supply-chain.log").exists()
    assert (out / "supply-chain-noisy.log").exists()
    capsys.readouterr()

    report = tmp_path / "report.txt"
    assert main(["replay", "--model", str(out / "supply-chain.bpmn"),
                 "--log", str(out / "supply-chain.log"),
                 "--mode", "all", "--report", str(report)]) == 0
    text = capsys.readouterr().out
    assert "conforming=4 non-conforming=0" in text
    assert report.exists()
    rows = json.loads(report.with_suffix(".txt.json").read_text())
    assert {r["mode"] for r in rows["costs"]} == {"full", "basic", "default", "optimized"}
    assert rows["conformance"]["full"]["nonConforming"] == 0


def test_cli_replay_detects_noise(tmp_path, capsys):
    out = tmp_path / "data"
    main(["datasets", "--out", str(out), "--traces", "4", "--noise", "1.0",
          "--seed", "3"])
    capsys.readouterr()
    assert main(["replay", "--model", str(out / "incident-management.bpmn"),
                 "--log", str(out / "incident-management-noisy.log"),
                 "--mode", "full"]) == 0
    text = capsys.readouterr().out
    assert "non-conforming=4" in text
