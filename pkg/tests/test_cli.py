import json

from click.testing import CliRunner

from chromalg.cli import main


def test_derive_json_stdout():
    runner = CliRunner()
    result = runner.invoke(main, ["derive", "--p", "3", "--i", "1", "--n", "2", "--m", "1"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["relations"][0]["equation"] == "v_1 t_1^3 + w_2 = v_1^3 t_1"


def test_derive_tex_contains_relation():
    runner = CliRunner()
    result = runner.invoke(main, ["derive", "--p", "3", "--i", "1", "--n", "2",
                                  "--m", "1", "--emit", "tex"])
    assert result.exit_code == 0
    assert "v_1 t_1^{3} + w_2 &= v_1^{3} t_1" in result.stdout


def test_usage_error_exit_code_2():
    runner = CliRunner()
    result = runner.invoke(main, ["derive", "--p", "4", "--i", "1", "--n", "2", "--m", "1"])
    assert result.exit_code == 2


def test_check_conjecture_ok():
    runner = CliRunner()
    result = runner.invoke(main, ["check", "conjecture", "--p", "3", "--n", "1"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["consistent"] is True


def test_check_e2_splitting_tex():
    runner = CliRunner()
    result = runner.invoke(main, ["check", "e2-splitting", "--p", "3", "--emit", "tex"])
    assert result.exit_code == 0
    assert "$L_1E$" in result.stdout


def test_check_collapse_failure_exit_1(tmp_path):
    page = {"schema": "chromalg/e2page/1", "label": "",
            "generators": [{"name": "z", "s": 3, "t": 10}], "base": None}
    path = tmp_path / "page.json"
    path.write_text(json.dumps(page))
    runner = CliRunner()
    result = runner.invoke(main, ["check", "collapse", "--page", str(path)])
    assert result.exit_code == 1


def test_hh_cli_from_file(tmp_path):
    from chromalg.hochschild import split_etale_algebra
    path = tmp_path / "alg.json"
    path.write_text(split_etale_algebra(3).presentation.to_json())
    runner = CliRunner()
    result = runner.invoke(main, ["hh", "--algebra", str(path), "--method", "bar"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["ranks"] == {"0,0": 3}


def test_hh_cli_koszul_window(tmp_path):
    from chromalg.poly import Generator, PolyRing, QQ
    from chromalg.presentation import Presentation
    pres = Presentation(PolyRing(QQ, [Generator("v_1", 4)]), [])
    path = tmp_path / "free.json"
    path.write_text(pres.to_json())
    runner = CliRunner()
    result = runner.invoke(main, ["hh", "--algebra", str(path), "--method", "koszul",
                                  "--window", "0..8", "--smax", "1"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["ranks"] == {
        "0,0": 1, "0,4": 1, "0,8": 1, "1,4": 1, "1,8": 1,
    }


def test_hh_cli_hkr_defaults_to_certified_tower(tmp_path):
    # relation-bounded generators get Jacobian certificates automatically
    from chromalg.hochschild import split_etale_algebra
    path = tmp_path / "etale.json"
    path.write_text(split_etale_algebra(3).presentation.to_json())
    runner = CliRunner()
    result = runner.invoke(main, ["hh", "--algebra", str(path), "--method", "hkr",
                                  "--window", "0..0"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["ranks"] == {"0,0": 3}


def test_reproduce_writes_out_dir(tmp_path):
    runner = CliRunner()
    out = tmp_path / "run"
    result = runner.invoke(main, ["reproduce", "--p", "3", "--out", str(out)])
    assert result.exit_code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["verdicts"]["passed"] is True
    matrix = (out / "reproduce.txt").read_text()
    assert "PASS  relation-stage1" in matrix


def test_reproduce_byte_identical_manifests(tmp_path):
    runner = CliRunner()
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert runner.invoke(main, ["reproduce", "--p", "3", "--out", str(out1)]).exit_code == 0
    assert runner.invoke(main, ["reproduce", "--p", "3", "--out", str(out2)]).exit_code == 0
    assert (out1 / "manifest.json").read_bytes() == (out2 / "manifest.json").read_bytes()
