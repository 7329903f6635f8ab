import json

import pytest

from proofnets.cli import main, sidecar_path
from proofnets.net_core import Net, NodeKind, net_from_dict, net_to_dict
from proofnets.formula import neg, pos
from proofnets.rewrite import ax_expand, is_normal


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("BPN_STATE_CAP", "BPN_CPT_TOL", "BPN_VERIFY_TOL", "BPN_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out


def write_net(path, net):
    path.write_text(json.dumps(net_to_dict(net)))
    return path


@pytest.fixture
def empty_net_file(tmp_path, rain5_path, capsys):
    out = tmp_path / "rain5.net.json"
    assert run(capsys, "compile", rain5_path, "--mode", "empty", "-o", out)[0] == 0
    return out


def test_compile_writes_net_and_sidecar(tmp_path, rain5_path, capsys):
    out = tmp_path / "positive.json"
    code, _ = run(capsys, "compile", rain5_path, "-o", out)
    assert code == 0
    assert len(net_from_dict(json.loads(out.read_text())).boxes()) == 5
    assert sidecar_path(str(out)).exists()

    code, text = run(capsys, "compile", rain5_path)
    assert code == 0
    assert set(json.loads(text)) == {"net", "valuation"}


def test_compile_rejects_bad_rows(tmp_path, rain5_path, capsys):
    data = json.loads(rain5_path.read_text())
    data["cpts"][0]["table"] = [[0.2, 0.7]]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert run(capsys, "compile", bad)[0] == 1
    assert run(capsys, "--cpt-tol", "0.2", "compile", bad)[0] == 0


def test_check_exit_codes(tmp_path, empty_net_file, capsys):
    code, text = run(capsys, "check", empty_net_file)
    assert code == 0
    assert json.loads(text)["bpn"]["violations"] == []

    axiom = Net()
    ax = axiom.add_node(NodeKind.AX)
    axiom.add_edge(ax, None, pos("X"))
    axiom.add_edge(ax, None, neg("X"))
    assert run(capsys, "check", write_net(tmp_path / "axiom.json", axiom))[0] == 1

    mismatch = Net()
    ax = mismatch.add_node(NodeKind.AX)
    cut = mismatch.add_node(NodeKind.CUT)
    mismatch.add_edge(ax, cut, pos("X"))
    mismatch.add_edge(ax, None, neg("X"))
    other = mismatch.add_node(NodeKind.AX)
    mismatch.add_edge(other, None, pos("Y"))
    mismatch.add_edge(other, cut, neg("Y"))
    code, text = run(capsys, "check", write_net(tmp_path / "mismatch.json", mismatch))
    assert code == 2
    assert json.loads(text)["structure"] == "invalid"

    loop = Net()
    ax1, ax2 = loop.add_node(NodeKind.AX), loop.add_node(NodeKind.AX)
    cut1, cut2 = loop.add_node(NodeKind.CUT), loop.add_node(NodeKind.CUT)
    loop.add_edge(ax1, cut1, pos("X"))
    loop.add_edge(ax1, cut2, neg("X"))
    loop.add_edge(ax2, cut2, pos("X"))
    loop.add_edge(ax2, cut1, neg("X"))
    code, text = run(capsys, "check", write_net(tmp_path / "loop.json", loop))
    assert code == 2
    assert json.loads(text)["correctness"]["switching_acyclic"] is False


def test_unreadable_input(tmp_path, empty_net_file, capsys):
    truncated = tmp_path / "truncated.json"
    truncated.write_text(empty_net_file.read_text()[:40])
    assert run(capsys, "check", truncated)[0] == 3
    assert run(capsys, "check", tmp_path / "missing.json")[0] == 3


def test_normalize_trace(tmp_path, rain5_positive, capsys):
    net, _ = rain5_positive
    expanded = ax_expand(net, net.positive_output(net.box_of("A")))
    source = write_net(tmp_path / "expanded.json", expanded)
    out = tmp_path / "normal.json"
    code, text = run(capsys, "normalize", source, "--trace", "-o", out)
    assert code == 0
    assert text.splitlines()[0].startswith("ax-cut ")
    assert is_normal(net_from_dict(json.loads(out.read_text())))


def test_factorize_by_order(tmp_path, empty_net_file, capsys):
    out = tmp_path / "fact.json"
    code, text = run(capsys, "factorize", empty_net_file, "--order", "A,B,C,E,D", "-o", out)
    assert code == 0
    report = json.loads(text)
    assert report["width"] == 2
    assert sorted("".join(w["atoms"]) for w in report["wirings"]) == ["ABC", "BCD", "CE"]
    assert report["predicted_cost"] > 0
    assert "assumed_binary" not in report
    assert sidecar_path(str(out)).exists()

    code, text = run(capsys, "marginal", out, "--var", "D", "--verify")
    assert code == 0
    assert json.loads(text)["verified_against"] == "brute"


def test_factorize_heuristic_and_errors(empty_net_file, rain5_path, tmp_path, capsys):
    code, text = run(capsys, "factorize", empty_net_file, "--heuristic", "min-fill")
    assert code == 0
    assert json.loads(text)["report"]["width"] == 2

    assert run(capsys, "factorize", empty_net_file, "--order", "A,B,C,D")[0] == 1

    positive = tmp_path / "positive.json"
    run(capsys, "compile", rain5_path, "-o", positive)
    assert run(capsys, "factorize", positive)[0] == 1
    assert run(capsys, "factorize", positive, "--hide-all")[0] == 0


def test_marginal_methods_agree(rain5_path, capsys):
    tables = {}
    for method in ("turbo", "naive", "ve", "mp", "brute"):
        code, text = run(capsys, "marginal", rain5_path, "--var", "B", "--method", method)
        assert code == 0
        tables[method] = json.loads(text)["marginals"]["B"]
    for method, table in tables.items():
        assert table["t"] == pytest.approx(0.31, abs=1e-12), method


def test_marginal_all(rain5_path, capsys):
    code, text = run(capsys, "marginal", rain5_path, "--all", "--verify")
    assert code == 0
    marginals = json.loads(text)["marginals"]
    assert sorted(marginals) == ["A", "B", "C", "D", "E"]
    assert marginals["A"]["t"] == pytest.approx(0.2)
    assert marginals["C"]["t"] == pytest.approx(0.24)


def test_marginal_with_evidence(rain5_path, capsys):
    results = []
    for method in ("turbo", "ve"):
        code, text = run(capsys, "marginal", rain5_path, "--var", "A", "--method", method, "--evidence", "E=t")
        assert code == 0
        output = json.loads(text)
        assert output["evidence"] == {"E": "t"}
        results.append(output["marginals"]["A"])
    assert sum(results[0].values()) == pytest.approx(1.0)
    assert results[0]["t"] == pytest.approx(results[1]["t"], abs=1e-12)


def test_marginal_errors(rain5_path, capsys):
    impossible = ("--evidence", "B=f", "--evidence", "C=f", "--evidence", "D=t")
    assert run(capsys, "marginal", rain5_path, "--var", "A", *impossible)[0] == 1
    assert run(capsys, "marginal", rain5_path, "--var", "A", "--evidence", "Z=t")[0] == 1
    assert run(capsys, "marginal", rain5_path, "--var", "Z")[0] == 1
    with pytest.raises(SystemExit):
        main(["marginal", str(rain5_path)])


def test_joint_query(rain5_path, capsys):
    tables = {}
    for method in ("turbo", "naive", "ve", "mp", "brute"):
        code, text = run(capsys, "marginal", rain5_path, "--var", "B", "--var", "D", "--method", method, "--verify")
        assert code == 0, method
        tables[method] = json.loads(text)["marginals"]["B,D"]
    for method, table in tables.items():
        assert table["vars"] == ["B", "D"], method
        assert sum(table["table"]) == pytest.approx(1.0)
        assert table["table"] == pytest.approx(tables["brute"]["table"], abs=1e-12), method


def test_joint_query_across_wirings(rain5_path, capsys):
    code, text = run(capsys, "marginal", rain5_path, "--var", "A", "--var", "E", "--order", "A,B,C,E,D", "--verify")
    assert code == 0
    table = json.loads(text)["marginals"]["A,E"]
    assert table["vars"] == ["A", "E"]


def test_export_dot(rain5_path, capsys):
    code, text = run(capsys, "export-dot", rain5_path, "--what", "cliques", "--order", "A,B,C,E,D")
    assert code == 0
    assert text.count('[label="{') == 3

    code, text = run(capsys, "export-dot", rain5_path, "--what", "bnet")
    assert code == 0
    assert text.count("->") == 5


def test_sample(rain5_path, capsys):
    code, text = run(capsys, "sample", rain5_path, "--seed", "5", "--count", "500")
    assert code == 0
    frequencies = json.loads(text)["frequencies"]
    assert sorted(frequencies) == ["A", "B", "C", "D", "E"]
    for table in frequencies.values():
        assert sum(table.values()) == pytest.approx(1.0)
    assert run(capsys, "sample", rain5_path, "--seed", "5", "--count", "500")[1] == text


def test_bad_environment(rain5_path, monkeypatch, capsys):
    monkeypatch.setenv("BPN_STATE_CAP", "-1")
    assert run(capsys, "marginal", rain5_path, "--var", "A")[0] == 1
