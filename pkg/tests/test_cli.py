import json

from zmcface.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_fixtures_list(capsys):
    code, out, _ = run(capsys, "fixtures", "list")
    assert code == 0
    names = out.split()
    assert "catenoid" in names and "torus_basic" in names
    assert len(names) >= 12


def test_check_ok_and_json_roundtrip(capsys):
    code, out, _ = run(capsys, "check", "catenoid", "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["validation"]["ok"] is True
    assert doc["source"] == "catenoid"


def test_classify_catenoid(capsys):
    code, out, _ = run(capsys, "classify", "catenoid", "--json")
    assert code == 0
    doc = json.loads(out)
    types = {e["point"]: e["type"] for e in doc["ends"]}
    assert types["inf"] == "ExpandingCatenoidal"
    assert types["0"] == "ShrinkingCatenoidal"


def test_osserman_equalities_bicatenoid(capsys):
    code, out, _ = run(capsys, "osserman", "bicatenoid", "--json")
    assert code == 0
    doc = json.loads(out)
    flags = tuple(doc["osserman"][f"ineq{k}"]["equal"] for k in (1, 2, 3))
    assert flags == (True, True, True)


def test_osserman_flags_mix_layered(capsys):
    code, out, _ = run(capsys, "osserman", "mix_layered", "--json")
    assert code == 0
    doc = json.loads(out)
    flags = tuple(doc["osserman"][f"ineq{k}"]["equal"] for k in (1, 2, 3))
    assert flags == (False, False, True)


def test_invalid_data_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.toml"
    bad.write_text(
        'name = "bad"\ndomain = "sphere"\npunctures = ["0", "inf"]\n'
        'g = "1/z"\nomega = "1/z"\n'
    )
    code, out, _ = run(capsys, "check", str(bad))
    assert code == 2


def test_unknown_fixture_exit_code(capsys):
    code, _, err = run(capsys, "check", "no_such_surface")
    assert code == 2
    assert "error" in err


def test_mesh_writes_obj(tmp_path, capsys):
    out_path = tmp_path / "cat.obj"
    code, _, err = run(capsys, "mesh", "catenoid", "--out", str(out_path),
                       "--rmin", "0.1", "--rmax", "5", "--angles", "12")
    assert code == 0
    text = out_path.read_text()
    assert text.startswith("# zmcface mesh: catenoid")
    assert "\nv " in text and "\nf " in text


def test_run_all_exits_zero(capsys):
    code, out, _ = run(capsys, "fixtures", "run-all", "--json")
    assert code == 0
    doc = json.loads(out)
    assert all(entry["ok"] for entry in doc["results"])
    assert len(doc["results"]) >= 12


def test_fixture_file_source(tmp_path, capsys):
    # a fixture given as an external TOML path works like a named one
    path = tmp_path / "cat2.toml"
    path.write_text(
        'name = "cat2"\ndomain = "sphere"\npunctures = ["0", "inf"]\n'
        'g = "1/z"\nomega = "1"\nbasepoint = "1"\n'
    )
    code, out, _ = run(capsys, "osserman", str(path), "--json")
    assert code == 0
    doc = json.loads(out)
    assert doc["osserman"]["deg_g"] == 1
