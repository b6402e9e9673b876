"""Command-line behaviour: exit codes, output schemas, reproducibility."""

import json

import jsonschema
import pytest

from chdef.cli import (
    AUDIT_REPORT_SCHEMA,
    EXIT_CENTRALIZER,
    EXIT_FAILED,
    EXIT_MALFORMED,
    EXIT_OK,
    EXIT_RELATION,
    FIGURE8_VERIFY_SCHEMA,
    main,
)

VERIFY_KEYS = (
    "relation_exact",
    "form_invariant_exact",
    "det_formula_exact",
    "trace_formula_exact",
    "unipotent_exact",
)


def test_verify_report(tmp_path, capsys):
    out = tmp_path / "verify.json"
    assert main(["figure8", "verify", "--json", str(out)]) == EXIT_OK
    report = json.loads(out.read_text())
    jsonschema.validate(report, FIGURE8_VERIFY_SCHEMA)
    assert report["passed"]
    for key in VERIFY_KEYS:
        assert report[key] is True
    assert report["form_invariance_by_generator"] == {"m": True, "n": True}
    stdout = capsys.readouterr().out
    assert "relation_exact: ok" in stdout
    assert "unipotent_exact: ok" in stdout


def test_verify_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["figure8", "verify", "--json", str(a)]) == EXIT_OK
    assert main(["figure8", "verify", "--json", str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_sweep_csv_structure(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(
        ["figure8", "sweep", "--start", "0.0", "--end", "3.0", "--steps", "7",
         "--out", str(out)]
    )
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "# seed=0"
    header = lines[1].split(",")
    assert header[:7] == ["alpha", "re_trace", "im_trace", "sig_p", "sig_q", "sig_z", "det_J"]
    assert header[-1] == "geo_mult_u"
    assert len(header) == 16
    rows = [line.split(",") for line in lines[2:]]
    assert len(rows) == 7
    assert all(len(row) == 16 for row in rows)
    # signature transition across 2*pi/3
    first, last = rows[0], rows[-1]
    assert (first[3], first[4], first[5]) == ("3", "1", "0")
    assert (last[3], last[4], last[5]) == ("2", "2", "0")
    assert abs(float(first[1]) - 7.0) < 1e-12  # trace 6 + u at alpha = 0
    assert abs(float(first[6]) - (-432.0)) < 1e-9


def test_sweep_seed_and_reproducibility(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["--seed", "7", "figure8", "sweep", "--start", "0.1", "--end", "1.9",
            "--steps", "4", "--out"]
    assert main(args + [str(a)]) == EXIT_OK
    assert main(args + [str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == "# seed=7"


def test_sweep_audit_margin_column(tmp_path):
    out = tmp_path / "sweep.csv"
    code = main(
        ["figure8", "sweep", "--start", "0.0", "--end", "3.0", "--steps", "5",
         "--out", str(out), "--audit", "--level", "-1.0", "--ball-length", "3"]
    )
    assert code == EXIT_OK
    lines = out.read_text().splitlines()
    header = lines[1].split(",")
    assert header[-1] == "consistency_margin"
    assert len(header) == 17
    rows = [line.split(",") for line in lines[2:]]
    # alphas 0, 0.75, 1.5 carry margins; 2.25 and 3.0 are past the
    # signature transition and leave the cell empty
    for row in rows[:3]:
        float(row[-1])
    assert rows[3][-1] == "" and rows[4][-1] == ""


def test_sweep_rejects_bad_steps(tmp_path):
    code = main(
        ["figure8", "sweep", "--start", "0", "--end", "1", "--steps", "0",
         "--out", str(tmp_path / "x.csv")]
    )
    assert code == EXIT_MALFORMED


def test_bend_amalgam_cli(data_dir, tmp_path, capsys):
    out = tmp_path / "bent.json"
    code = main(["bend", "--datum", str(data_dir / "toy_amalgam.json"), "--out", str(out)])
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["generators"] == ["a", "e", "d", "b"]
    assert payload["relations_exact"] == [True, True, True]
    rotations = payload["peripheral_rotation"]
    assert rotations["b a b^-1 a^-1"]["epsilon"] == 0
    assert rotations["b a b^-1 a^-1"]["predicted_class"] == "parabolic-unipotent"
    assert rotations["b^2"]["epsilon"] == 2
    assert rotations["b^2"]["predicted_class"] == "ellipto-parabolic"
    assert "form" in payload and "images" in payload
    stdout = capsys.readouterr().out
    assert "epsilon=2 -> ellipto-parabolic" in stdout


def test_bend_reproducible(data_dir, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["bend", "--datum", str(data_dir / "toy_hnn.json"), "--out", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_bend_output_feeds_classify(data_dir, tmp_path):
    bent = tmp_path / "bent.json"
    assert main(["bend", "--datum", str(data_dir / "toy_amalgam.json"), "--out", str(bent)]) == EXIT_OK
    result = tmp_path / "cls.json"
    code = main(["classify", "--rep", str(bent), "--word", "b", "--alpha", "0.3",
                 "--json", str(result)])
    assert code == EXIT_OK
    assert json.loads(result.read_text())["tag"] == "loxodromic"


def test_bend_centralizer_exit(data_dir, tmp_path):
    data = json.loads((data_dir / "toy_amalgam.json").read_text())
    data["delta"] = ["b"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    code = main(["bend", "--datum", str(bad), "--out", str(tmp_path / "out.json")])
    assert code == EXIT_CENTRALIZER


def test_bend_relation_exit(data_dir, tmp_path):
    source = json.loads((data_dir / "toy_amalgam.json").read_text())
    boost = source["images"]["b"]
    datum = {
        "kind": "amalgam",
        "gens": [{"name": "g", "side": 1}, {"name": "h", "side": 2}],
        "relators": ["g h^-1"],
        "delta": [],
        "crossings": {},
        "images": {"g": boost, "h": boost},
    }
    path = tmp_path / "datum.json"
    path.write_text(json.dumps(datum))
    code = main(["bend", "--datum", str(path), "--out", str(tmp_path / "out.json")])
    assert code == EXIT_RELATION


def test_bend_malformed_exit(data_dir, tmp_path):
    data = json.loads((data_dir / "toy_amalgam.json").read_text())
    data["gens"][0]["side"] = 3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(data))
    assert main(["bend", "--datum", str(bad), "--out", str(tmp_path / "o.json")]) == EXIT_MALFORMED
    del data["gens"][0]["side"]
    data["gens"][0]["side"] = 1
    del data["images"]
    noimg = tmp_path / "noimg.json"
    noimg.write_text(json.dumps(data))
    assert main(["bend", "--datum", str(noimg), "--out", str(tmp_path / "o.json")]) == EXIT_MALFORMED


def test_audit_cli_calibrated(tmp_path, capsys):
    out = tmp_path / "audit.json"
    code = main(
        ["audit", "--rep", "figure8", "--alpha", "0.0", "--cusp", "m,l",
         "--ball-length", "3", "--calibrate", "--out", str(out)]
    )
    assert code == EXIT_OK
    report = json.loads(out.read_text())
    jsonschema.validate(report, AUDIT_REPORT_SCHEMA)
    assert report["passed"] and report["parabolic_passed"]
    assert report["alpha"] == 0.0 and report["ball_length"] == 3
    assert report["words_tested"] == 46  # 52 ball words minus 6 meridian powers
    assert abs(report["condition2"]["min_margin"] - 1.0) < 1e-9
    assert report["disclaimer"] == "certified on 46 words, not a discreteness proof"
    assert report["finite_statement"].startswith("no tested nontrivial word")
    stdout = capsys.readouterr().out
    assert "condition1: ok" in stdout
    assert "not a discreteness proof" in stdout


def test_audit_cli_failure_exit(tmp_path):
    out = tmp_path / "audit.json"
    code = main(
        ["audit", "--rep", "figure8", "--alpha", "0.0", "--cusp", "m,l",
         "--ball-length", "3", "--level", "10.0", "--out", str(out)]
    )
    assert code == EXIT_FAILED
    report = json.loads(out.read_text())
    assert report["condition2"]["violations"]
    assert report["finite_statement"] == "audit failed; no faithfulness statement follows"


def test_audit_cli_bad_cusp(tmp_path):
    code = main(
        ["audit", "--rep", "figure8", "--alpha", "0.1", "--cusp", "x",
         "--ball-length", "3", "--level", "0.0", "--out", str(tmp_path / "a.json")]
    )
    assert code == EXIT_MALFORMED
    code = main(
        ["audit", "--rep", "figure8", "--alpha", "0.1", "--cusp", "m,n",
         "--ball-length", "3", "--level", "0.0", "--out", str(tmp_path / "b.json")]
    )
    assert code == EXIT_MALFORMED


def test_audit_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["audit", "--rep", "figure8", "--alpha", "0.05", "--cusp", "m,l",
            "--ball-length", "3", "--calibrate", "--out"]
    assert main(args + [str(a)]) == EXIT_OK
    assert main(args + [str(b)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_classify_cli(tmp_path, capsys):
    out = tmp_path / "cls.json"
    code = main(["classify", "--rep", "figure8", "--word", "l", "--alpha", "0.5",
                 "--json", str(out)])
    assert code == EXIT_OK
    payload = json.loads(out.read_text())
    assert payload["tag"] == "ellipto-parabolic"
    assert len(payload["eigenvalues"]) == 4
    assert payload["rotation_angles"]
    assert "'l' at alpha=0.5: ellipto-parabolic" in capsys.readouterr().out
    # macros from the builtin family resolve in word arguments
    code = main(["classify", "--rep", "figure8", "--word", "m w m^-1 w^-1",
                 "--alpha", "0.2", "--json", str(out)])
    assert code == EXIT_OK


def test_classify_identity_word(tmp_path):
    out = tmp_path / "cls.json"
    code = main(["classify", "--rep", "figure8", "--word", "m m^-1", "--alpha", "0.4",
                 "--json", str(out)])
    assert code == EXIT_OK
    assert json.loads(out.read_text())["tag"] == "identity"


def test_classify_reproducible(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["classify", "--rep", "figure8", "--word", "m n", "--alpha", "1.1",
                     "--json", str(path)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()


def test_classify_rejects_unknown_word_and_rep(tmp_path):
    assert main(["classify", "--rep", "figure8", "--word", "z", "--alpha", "0.1"]) == EXIT_MALFORMED
    assert main(["classify", "--rep", str(tmp_path / "missing.json"), "--word", "m",
                 "--alpha", "0.1"]) == EXIT_MALFORMED
