import json
from pathlib import Path

import pytest

from adelweil.cli import main, resolve_input

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def check_golden(capsys, argv, name):
    code, out, err = run(capsys, argv)
    assert code == 0, err
    expect = (GOLDEN / name).read_text()
    assert out == expect


def test_residue_report_text(capsys):
    check_golden(capsys, ["residue", "fraction-cusp.json"],
                 "residue-cusp.txt")


def test_residue_report_json(capsys):
    check_golden(capsys, ["residue", "fraction-weighted-model.json",
                          "--json"], "residue-weighted.json")
    payload = json.loads((GOLDEN / "residue-weighted.json").read_text())
    assert payload["status"] == "PASS"
    assert payload["items"][0]["value"] == "-1"


def test_bott_report(capsys):
    check_golden(capsys, ["bott", "p2-tangent.json"], "bott-p2-tangent.txt")


def test_bott_with_explicit_polynomial(capsys):
    code, out, _ = run(capsys, ["bott", "p1-o2.json", "--poly", "c1"])
    assert code == 0
    assert "total: value=2 expected=2 [ok]" in out


def test_bott_with_uncalibrated_polynomial(capsys):
    # a different invariant computes fine but is not checked against
    # the shipped expectation
    code, out, _ = run(capsys, ["bott", "p2-tangent.json", "--poly",
                                "c1^2"])
    assert code == 0
    assert "expected" not in out


def test_chern_components_on_a_chain(capsys):
    check_golden(capsys, ["chern", "p1-o1.json", "--chain", "x0,p0"],
                 "chern-p1-o1.txt")
    out = (GOLDEN / "chern-p1-o1.txt").read_text()
    assert "component 1: value=1/f d f" in out


def test_chern_on_a_flat_chain(capsys):
    code, out, _ = run(capsys, ["chern", "p1-o1.json", "--chain", "q1,p0"])
    assert code == 0
    assert "component 1: value=0" in out


def test_chern_whitney_series(capsys):
    check_golden(capsys, ["chern", "p1-whitney.json"], "chern-whitney.txt")


def test_derham_report(capsys):
    check_golden(capsys, ["derham", "boundary-delta2.json"],
                 "derham-boundary.txt")


def test_verify_all_battery(capsys):
    check_golden(capsys, ["verify-all"], "verify-all.txt")


def test_missing_input_exits_3(capsys):
    code, _, err = run(capsys, ["residue", "no-such-file.json"])
    assert code == 3 and "no such input" in err


def test_malformed_json_exits_3(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, ["residue", str(bad)])
    assert code == 3


def test_bad_polynomial_text_exits_3(capsys):
    code, _, _ = run(capsys, ["bott", "p1-o1.json", "--poly", "c1$"])
    assert code == 3


def test_degree_mismatch_exits_2(capsys):
    code, _, err = run(capsys, ["bott", "p1-o2.json", "--poly", "c1^2"])
    assert code == 2 and "degree" in err


def test_unknown_chain_label_exits_2(capsys):
    code, _, err = run(capsys, ["chern", "p1-o1.json", "--chain", "x0,zz"])
    assert code == 2 and "zz" in err


def test_positive_dimensional_ideal_exits_5(capsys, tmp_path):
    data = {"vars": ["f1", "f2"], "numerator": "1",
            "denominators": ["f1*f2", "f2"]}
    path = tmp_path / "thick.json"
    path.write_text(json.dumps(data))
    code, _, _ = run(capsys, ["residue", str(path)])
    assert code == 5


def test_failed_expectation_exits_2(capsys, tmp_path):
    data = {"vars": ["f"], "numerator": "-f", "denominators": ["f^2"],
            "expected": "7"}
    path = tmp_path / "wrong.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, ["residue", str(path)])
    assert code == 2
    assert "[FAIL]" in out and "status: FAIL" in out


def test_packaged_data_resolves_by_bare_name():
    path = resolve_input("p1-o1.json")
    assert Path(path).is_file()


def test_stability_flag_is_accepted(capsys):
    code, out, _ = run(capsys, ["residue", "fraction-cusp.json",
                                "--stability"])
    assert code == 0 and "value=4" in out
