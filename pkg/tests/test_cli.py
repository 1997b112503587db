"""Command-line front end: exit codes, determinism, report content."""

import json

import pytest

from mpeccert.cli import main
from mpeccert.report import Report

from cases import biactive_descent_document


@pytest.fixture()
def worked_instance(tmp_path):
    path = tmp_path / "instance.json"
    path.write_text(json.dumps(biactive_descent_document()))
    return str(path)


def run_cli(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_all_json(worked_instance, capsys):
    code, out, _ = run_cli(capsys, ["check", "--input", worked_instance, "--concept", "all"])
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "mpcc"
    assert doc["concepts"]["m"]["verdict"] is True
    assert doc["concepts"]["s"]["verdict"] is False
    assert doc["concepts"]["qm"]["verdict"] is False
    assert doc["concepts"]["b_oracle"]["verdict"] is False
    assert doc["concepts"]["q"]["any"] is False
    assert doc["concepts"]["m"]["multiplier"]["lam_g"] == ["1", "3"]
    assert doc["concepts"]["m"]["multiplier"]["lam_H"] == ["-2"]


def test_check_text_table(worked_instance, capsys):
    code, out, _ = run_cli(
        capsys, ["check", "--input", worked_instance, "--concept", "all", "--format", "text"]
    )
    assert code == 0
    assert "limiting" in out
    assert "no-descent" in out
    assert "elapsed" in out


def test_single_concept(worked_instance, capsys):
    code, out, _ = run_cli(capsys, ["check", "--input", worked_instance, "--concept", "m"])
    assert code == 0
    doc = json.loads(out)
    assert doc["concepts"]["m"]["verdict"] is True
    assert "s" not in doc["concepts"]


def test_partition_flag(worked_instance, capsys):
    code, out, _ = run_cli(
        capsys,
        ["check", "--input", worked_instance, "--concept", "q", "--partition", "0"],
    )
    assert code == 0
    doc = json.loads(out)
    assert list(doc["concepts"]["q"]["per_partition"]) == ["beta1=0;beta2="]


def test_exit_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli(capsys, ["check", "--input", str(bad)])
    assert code == 2
    assert "error" in err


def test_exit_infeasible(tmp_path, capsys):
    doc = biactive_descent_document()
    doc["G"][0]["value"] = "1"
    doc["H"][0]["value"] = "1"
    path = tmp_path / "infeasible.json"
    path.write_text(json.dumps(doc))
    code, _, err = run_cli(capsys, ["check", "--input", str(path)])
    assert code == 3
    assert "G[0]" in err


def test_exit_cap(worked_instance, capsys):
    code, _, err = run_cli(
        capsys, ["check", "--input", worked_instance, "--concept", "m", "--cap", "1"]
    )
    assert code == 4
    assert "cap" in err


def test_machine_reports_are_byte_identical(worked_instance, capsys):
    _, out1, _ = run_cli(capsys, ["check", "--input", worked_instance])
    _, out2, _ = run_cli(capsys, ["check", "--input", worked_instance])
    assert out1 == out2
    assert Report.parse(out1) == Report.parse(out2)


def test_generate_round_trips(tmp_path, capsys):
    code, out, _ = run_cli(capsys, ["generate", "--kind", "mpcc", "--seed", "3"])
    assert code == 0
    path = tmp_path / "gen.json"
    path.write_text(out)
    code2, out2, _ = run_cli(capsys, ["check", "--input", str(path), "--concept", "s"])
    assert code2 == 0
    # determinism of the generator itself
    code3, out3, _ = run_cli(capsys, ["generate", "--kind", "mpcc", "--seed", "3"])
    assert out3 == out


def test_oracle_subcommand(worked_instance, capsys):
    code, out, _ = run_cli(capsys, ["oracle", "--input", worked_instance])
    assert code == 0
    doc = json.loads(out)
    assert doc["b_oracle"]["verdict"] is False
    assert doc["implication_violations"] == []


def test_qual_subcommands(worked_instance, capsys):
    code, out, _ = run_cli(capsys, ["qual", "--input", worked_instance, "--qual", "licq"])
    assert code == 0
    assert json.loads(out)["result"] is False
    code, out, _ = run_cli(capsys, ["qual", "--input", worked_instance, "--qual", "thm5"])
    assert code == 0
    doc = json.loads(out)
    assert set(doc["result"]) == {"beta1=;beta2=0", "beta1=0;beta2="}


def test_qual_ge_constant(tmp_path, capsys):
    from mpeccert.instances import serialize
    from mpeccert.oracle import random_ge

    inst = random_ge(1)
    path = tmp_path / "ge.json"
    path.write_text(json.dumps(serialize(inst)))
    code, out, _ = run_cli(capsys, ["qual", "--input", str(path), "--qual", "thm9"])
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["constancy"] == "zero-curvature"


def test_check_qm_ge_with_branch_file(tmp_path, capsys):
    from mpeccert import ge
    from mpeccert.instances import serialize
    from mpeccert.oracle import random_ge
    from mpeccert.rationals import rat_str

    inst = random_ge(4, coordinate_tc=True)
    ipath = tmp_path / "ge.json"
    ipath.write_text(json.dumps(serialize(inst)))

    # without the limiting-cone family the verdict is unavailable
    code, out, _ = run_cli(capsys, ["check", "--input", str(ipath), "--concept", "qm"])
    assert code == 0
    assert json.loads(out)["concepts"]["qm"]["verdict"] is None

    branches = ge.complementarity_nd_branches(inst)
    bdoc = {
        "branches": [
            {
                "eq": [[rat_str(a) for a in row] for row in b.eq],
                "ineq": [[rat_str(a) for a in row] for row in b.ineq],
            }
            for b in branches
        ]
    }
    bpath = tmp_path / "branches.json"
    bpath.write_text(json.dumps(bdoc))
    code, out, _ = run_cli(
        capsys,
        ["check", "--input", str(ipath), "--concept", "qm", "--nd-branches", str(bpath)],
    )
    assert code == 0
    assert json.loads(out)["concepts"]["qm"]["verdict"] in (True, False)
