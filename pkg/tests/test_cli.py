import json

from nagaotree import cli
from nagaotree import datum as D
from nagaotree import serialize as S
from nagaotree import tree as T
from nagaotree import words as W


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_validate_builtin(capsys):
    code, out = run(capsys, "validate", "--datum", "D0")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] and payload["k"] == 3


def test_validate_rejects_small_index(tmp_path, capsys):
    # k = 2 datum: Gamma0 = C2, trivial H0
    obj = {
        "gamma0": {"order": 2, "table": [[0, 1], [1, 0]]},
        "h0": [0],
        "roots": {"prefix": [], "period": [
            {"group": {"order": 2, "table": [[0, 1], [1, 0]]}}
        ]},
    }
    p = tmp_path / "small.json"
    p.write_text(json.dumps(obj))
    code, out = run(capsys, "validate", "--datum", str(p))
    assert code == 2
    assert "IndexTooSmall" in out


def test_validate_malformed_json(tmp_path, capsys):
    p = tmp_path / "broken.json"
    p.write_text("{not json")
    code, out = run(capsys, "validate", "--datum", str(p))
    assert code == 2


def test_validate_custom_datum_file(tmp_path, capsys):
    obj = D.datum_to_json(D.builtin("D3"))
    p = tmp_path / "d3.json"
    p.write_text(json.dumps(obj))
    code, out = run(capsys, "validate", "--datum", str(p))
    assert code == 0
    assert json.loads(out)["biregular"] is False


def test_tree_json_and_dot(tmp_path, capsys):
    code, out = run(capsys, "tree", "--datum", "D0", "--radius", "2")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["tree"]["vertices"]) == 10
    assert len(payload["tree"]["edges"]) == 9
    dot = tmp_path / "ball.dot"
    code, _ = run(capsys, "tree", "--datum", "D0", "--radius", "2",
                  "--format", "dot", "--out", str(dot))
    assert code == 0
    text = dot.read_text()
    assert text.startswith("graph ball {") and "rank=same" in text


def test_suite_passes_on_d0(capsys):
    code, out = run(capsys, "suite", "--datum", "D0", "--radius", "4",
                    "--suites", "degrees,horoball,codist")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] and len(payload["reports"]) == 3


def test_suite_failure_exit_code(monkeypatch, capsys):
    import sys
    import os
    sys.path.insert(0, os.path.dirname(__file__))
    from test_transport import _twisted_datum
    bad = _twisted_datum(corrupt=True)
    monkeypatch.setattr(cli, "load_datum", lambda name: bad)
    code, out = run(capsys, "suite", "--datum", "ignored", "--radius", "4",
                    "--suites", "transport", "--samples", "60")
    assert code == 1
    payload = json.loads(out)
    assert not payload["ok"]
    assert payload["reports"][0]["failures"]


def test_reports_byte_identical(capsys):
    _, out1 = run(capsys, "suite", "--datum", "D3", "--radius", "4",
                  "--suites", "degrees,transitivity,codist", "--seed", "5")
    _, out2 = run(capsys, "suite", "--datum", "D3", "--radius", "4",
                  "--suites", "degrees,transitivity,codist", "--seed", "5")
    assert out1 == out2


def _phi_file(tmp_path, d, pairs, name="phi.json"):
    obj = {"pairs": [[S.vertex_to_json(a), S.vertex_to_json(b)]
                     for a, b in pairs.items()]}
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def test_extend_identity(tmp_path, capsys):
    d = D.builtin("D0")
    x0 = T.base_vertex()
    pairs = {v: v for v in [x0] + T.neighbors(d, x0)}
    path = _phi_file(tmp_path, d, pairs)
    out_file = tmp_path / "ext.json"
    code, _ = run(capsys, "extend", "--datum", "D0", "--radius", "6",
                  "--phi", path, "--seed", "1", "--out", str(out_file))
    assert code == 0
    payload = json.loads(out_file.read_text())
    assert payload["ok"]
    assert payload["report"]["certificate"]["valid"]
    assert payload["report"]["selected_i"] == 2


def test_extend_swap_nontrivial(tmp_path, capsys):
    d = D.builtin("D0")
    x0, x1 = T.base_vertex(), T.ray_vertex(1)
    u_x0 = T.act_word(d, W.generator(1, 1, 1), x0)
    pairs = {x1: x1, x0: u_x0, u_x0: x0}
    path = _phi_file(tmp_path, d, pairs)
    code, out = run(capsys, "extend", "--datum", "D0", "--radius", "6",
                    "--phi", path, "--seed", "2")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"]
    ext_pairs = payload["extension"]["pairs"]
    assert len(ext_pairs) >= 190
    assert payload["report"]["note"].startswith("commensuration is sample-verified")


def test_extend_escaping_ball_exit_3(tmp_path, capsys):
    d = D.builtin("D0")
    far = (W.EMPTY, 1, 9)
    path = _phi_file(tmp_path, d, {far: far})
    code, out = run(capsys, "extend", "--datum", "D0", "--radius", "6",
                    "--phi", path)
    assert code == 3
    assert "CannotExtendInTruncation" in out


def test_extend_bad_phi_exit_2(tmp_path, capsys):
    p = tmp_path / "phi.json"
    p.write_text(json.dumps({"pairs": [[{"word": [], "ray": 9, "level": 1},
                                        {"word": [], "ray": 1, "level": 1}]]}))
    code, _ = run(capsys, "extend", "--datum", "D0", "--radius", "6",
                  "--phi", str(p))
    assert code == 2


def test_codist_command(capsys):
    code, out = run(capsys, "codist", "--datum", "D2", "--radius", "3")
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"]
    assert payload["verification"]["checked"] > 0


def test_vertex_json_roundtrip():
    d = D.builtin("D3")
    v = (W.delta_mul(d, W.generator(1, 2, 2), W.generator(3, 1, 1)), 3, 1)
    v = (W.canon_coset(d, v[0], 1, 3), 3, 1)
    T.validate_address(d, v)
    assert S.vertex_from_json(d, S.vertex_to_json(v)) == v


def test_component_graph_dot(d0):
    from nagaotree import horo as H
    t = T.ball(d0, T.base_vertex(), 4)
    g = H.component_graph(t, 1)
    dot = S.component_graph_to_dot(g)
    assert dot.startswith("graph components_1 {")
    assert "--" in dot


def test_readme_datum_example_parses(tmp_path, capsys):
    # the custom-datum snippet shown in the README is a valid k=3 datum
    obj = {
        "gamma0": {"order": 3, "table": [[0, 1, 2], [1, 2, 0], [2, 0, 1]]},
        "h0": [0],
        "roots": {"prefix": [], "period": [
            {"group": {"order": 2, "table": [[0, 1], [1, 0]]}}
        ]},
    }
    p = tmp_path / "readme.json"
    p.write_text(json.dumps(obj))
    code, out = run(capsys, "validate", "--datum", str(p))
    assert code == 0
    assert json.loads(out)["k"] == 3


def test_console_script_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "nagaotree.cli",
                          "validate", "--datum", "D1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["ok"]
