import json
import math
from pathlib import Path

import pytest

from nevanlinna import cli
from nevanlinna import scenario as sc
from nevanlinna.characteristics import ValueWithError
from nevanlinna.errors import ParseError, ValidationError
from nevanlinna.verify import InequalityReport

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"

BASE = """\
seed: 3
functions:
  inv_z: {type: delta, minus: {atoms: [[0, 0, 1]]}}
sets:
  unit_disc: {type: disc_union, discs: [[0, 0, 1]]}
radii:
  std: {r0: 0.1, r: 1, k: 2}
checks:
  - {verifier: theorem2_T, function: inv_z, set: unit_disc, radii: std}
"""


def write(tmp_path, text, name="s.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


# loading -------------------------------------------------------------------

def test_minimal_scenario_loads():
    s = sc.load_scenario(SCENARIOS / "minimal.yaml")
    assert len(s.checks) == 1
    assert set(s.functions) == {"inv_z"} and set(s.sets) == {"unit_disc"}


def test_k_equal_one_rejected(tmp_path):
    with pytest.raises(ValidationError, match="k must exceed 1"):
        sc.load_scenario(write(tmp_path, BASE.replace("k: 2", "k: 1")))


def test_set_beyond_r_rejected(tmp_path):
    text = BASE.replace("discs: [[0, 0, 1]]", "discs: [[0, 0, 1.5]]")
    with pytest.raises(ValidationError, match="beyond r"):
        sc.load_scenario(write(tmp_path, text))


def test_undefined_reference_rejected(tmp_path):
    with pytest.raises(ValidationError, match="undefined set"):
        sc.load_scenario(write(tmp_path, BASE.replace("set: unit_disc", "set: nowhere")))


def test_syntax_error_reports_line(tmp_path):
    with pytest.raises(ParseError) as info:
        sc.load_scenario(write(tmp_path, "seed: 1\nfunctions:\n  f: {type: delta\nchecks: [\n"))
    assert info.value.line is not None


def test_missing_field_reports_line_and_field(tmp_path):
    with pytest.raises(ParseError) as info:
        sc.load_scenario(write(tmp_path, "seed: 1\nradii:\n  a: {r0: 0.1, r: 1}\n"))
    assert info.value.line == 3
    assert info.value.field == "radii.a"


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ParseError, match="unknown section"):
        sc.load_scenario(write(tmp_path, BASE + "plots: {}\n"))


def test_duplicate_atoms_merge_on_load(tmp_path):
    text = BASE.replace("atoms: [[0, 0, 1]]", "atoms: [[0, 0, 1], [0, 0, 1]]")
    s = sc.load_scenario(write(tmp_path, text))
    assert len(s.functions["inv_z"].minus.riesz) == 1
    assert s.functions["inv_z"].minus.riesz.total_variation == 2


def test_bitmap_set_from_file(tmp_path):
    (tmp_path / "mask.txt").write_text("2 2 -0.5 -0.5 0.5\n11\n01\n")
    text = BASE.replace("{type: disc_union, discs: [[0, 0, 1]]}",
                        "{type: grid_mask, bitmap: mask.txt, bounding_radius: 1}")
    s = sc.load_scenario(write(tmp_path, text))
    assert s.sets["unit_disc"].kind == "grid_mask"


# running ---------------------------------------------------------------------

def test_trivial_checks_exit_zero():
    s = sc.load_scenario(SCENARIOS / "minimal.yaml")
    results = sc.run_suite(s, workers=1)
    assert [r.verdict for r in results] == ["PASS"]
    assert sc.exit_status(results) == 0


def test_broken_constant_fails_with_exit_two(tmp_path):
    text = BASE.replace("radii: std}", "radii: std, overrides: {rhs_constant: 0}}")
    results = sc.run_suite(sc.load_scenario(write(tmp_path, text)), workers=1)
    assert results[0].verdict == "FAIL"
    assert sc.exit_status(results) == 2


def test_module_error_becomes_record(tmp_path):
    text = BASE.replace("checks:\n", "checks:\n  - {verifier: theorem2_M, function: mero, set: "
                                     "unit_disc, radii: std}\n")
    text = text.replace("functions:\n", "functions:\n  mero: {type: meromorphic, poles: [[0.5, 0, 1]]}\n")
    results = sc.run_suite(sc.load_scenario(write(tmp_path, text)), workers=1)
    assert results[0].verdict == "ERROR" and results[0].error == "EntireRequired"
    assert results[1].verdict == "PASS"
    assert sc.exit_status(results) == 1


def test_parallel_run_keeps_order_and_values():
    s = sc.load_scenario(SCENARIOS / "examples.yaml")
    serial = sc.format_report(sc.run_suite(s, workers=1), "json-lines")
    parallel = sc.format_report(sc.run_suite(s, workers=2), "json-lines")
    assert serial == parallel


# reports -------------------------------------------------------------------

def make_report(verdict="PASS"):
    return InequalityReport("demo", ValueWithError(1.0, 1e-9), ValueWithError(2.5, 3e-9), verdict,
                            seed=42, wall_ms=1.5)


def test_empty_report_is_header_only():
    assert sc.format_report([], "csv") == ",".join(sc.CSV_COLUMNS) + "\n"


def test_one_pass_row():
    text = sc.format_report([make_report()], "csv")
    lines = text.splitlines()
    assert lines[0] == "name,lhs,lhs_err,rhs,rhs_err,slack,verdict,seed,wall_ms"
    assert len(lines) == 2 and lines[1].split(",")[6] == "PASS"


@pytest.mark.parametrize("fmt", ["csv", "json-lines"])
def test_round_trip(tmp_path, fmt):
    reps = [make_report(), make_report("FAIL")]
    path = tmp_path / "out.txt"
    sc.emit_report(reps, fmt, path)
    rows = sc.read_report(path.read_text(), fmt)
    for rep, row in zip(reps, rows):
        assert row["name"] == rep.name and row["verdict"] == rep.verdict
        assert row["lhs"] == rep.lhs.value and row["rhs_err"] == rep.rhs.error
        assert row["slack"] == rep.slack and row["seed"] == rep.seed


def test_json_lines_omit_wall_time():
    rec = json.loads(sc.format_report([make_report()], "json-lines"))
    assert "wall_ms" not in rec and rec["verdict"] == "PASS"


# command line -----------------------------------------------------------------

def test_cli_list(capsys):
    assert cli.main(["list"]) == 0
    out = capsys.readouterr().out
    assert "theorem2_T" in out and "nevanlinna_remark" in out


def test_cli_run_writes_csv(tmp_path):
    out = tmp_path / "r.csv"
    code = cli.main(["run", str(SCENARIOS / "minimal.yaml"), "--out", str(out), "--workers", "1"])
    assert code == 0
    assert out.read_text().startswith("name,lhs,lhs_err")


def test_cli_forced_failure_exit_code(tmp_path):
    text = BASE.replace("radii: std}", "radii: std, overrides: {rhs_constant: 0}}")
    assert cli.main(["run", str(write(tmp_path, text)), "--out", str(tmp_path / "o"),
                     "--workers", "1"]) == 2


def test_cli_invalid_scenario_exit_one(tmp_path, capsys):
    assert cli.main(["run", str(write(tmp_path, BASE.replace("k: 2", "k: 1")))]) == 1
    assert "k must exceed 1" in capsys.readouterr().err


def test_cli_seed_and_tolerance_flags(tmp_path):
    out = tmp_path / "r.jsonl"
    cli.main(["run", str(SCENARIOS / "minimal.yaml"), "--seed", "99", "--tol", "1e-8",
              "--depth", "9", "--format", "json-lines", "--out", str(out), "--workers", "1"])
    rec = json.loads(out.read_text())
    assert rec["verdict"] == "PASS"
    assert rec["seed"] == sc._derive_seed(99, 0)


def test_cli_oracle(tmp_path, capsys):
    out = tmp_path / "o.csv"
    code = cli.main(["oracle", str(SCENARIOS / "minimal.yaml"), "--samples", "200000",
                     "--out", str(out), "--workers", "1"])
    assert code == 0
    rows = out.read_text().splitlines()
    assert rows[0].startswith("report,term,quadrature")
    assert all(r.endswith("true") for r in rows[1:])
