import json

import pytest

from mbpurify.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_graph_table(capsys):
    code, out = run(capsys, "graph")
    assert code == 0
    assert "22.5" in out.out and "10.6" in out.out and "29.7" in out.out


def test_graph_bad_qmin(capsys):
    code, out = run(capsys, "graph", "--qmin", "1.5")
    assert code == 2
    assert "q_min" in out.err


def test_fidelities_json_and_csv_agree(capsys):
    args = ["fidelities", "--protocol", "deutsch", "--depth", "0", "--workers", "1"]
    _, js = run(capsys, *args, "--format", "json")
    _, cs = run(capsys, *args, "--format", "csv")
    rows = json.loads(js.out)
    assert [r["fixed_point_fidelity"] for r in rows][2:] == [None, None]
    lines = cs.out.strip().splitlines()[1:]
    assert float(lines[0].split(",")[3]) == rows[0]["fixed_point_fidelity"]
    assert lines[2].split(",")[3] == ""


def test_fidelities_table_na(capsys):
    code, out = run(capsys, "fidelities", "--protocol", "deutsch", "--depth", "0", "--workers", "1")
    assert code == 0
    assert "96.2" in out.out and "n/a" in out.out


def test_unknown_protocol(capsys):
    code, out = run(capsys, "thresholds", "--protocol", "hashing")
    assert code == 2


def test_bad_convention_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["thresholds", "--convention", "sideways"])
    assert exc.value.code == 2


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nprotocol = deutsch\ndepth = 0\nformat = json\nworkers = 1\nnoise-grid = 0.01\n")
    code, out = run(capsys, "fidelities", "--config", str(cfg))
    assert code == 0
    assert len(json.loads(out.out)) == 1
    code, out = run(capsys, "fidelities", "--config", str(cfg), "--format", "csv")
    assert out.out.startswith("protocol,")


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("colour = blue\n")
    code, out = run(capsys, "graph", "--config", str(cfg))
    assert code == 2


def test_out_file(tmp_path, capsys):
    target = tmp_path / "g.csv"
    assert main(["graph", "--format", "csv", "--out", str(target)]) == 0
    assert target.read_text().startswith("graph,q_min")


def test_mbqc_check_corrupted_construction(capsys):
    code, out = run(capsys, "mbqc-check", "--inputs", "1", "--construction", "cluster")
    assert code == 1
    report = json.loads(out.out)
    assert "error" in report["checks"][0]
