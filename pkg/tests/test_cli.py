import json
import subprocess
import sys

import pytest

from radolab import cli
from radolab.engine import ProcessRng, grow
from radolab.sequence import AllOnesAfterZero


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_grow_text_dump_matches_engine(capsys):
    code, out, _ = run_cli(capsys, "grow", "--seq", "ones", "--n", "1000", "--seed", "7", "--format", "text")
    assert code == 0
    assert out == grow(AllOnesAfterZero(), 1000, ProcessRng(7)).dump()


def test_grow_json_and_csv(capsys):
    code, out, _ = run_cli(capsys, "grow", "--seq", "ones", "--n", "5", "--seed", "1", "--format", "json")
    d = json.loads(out)
    assert code == 0 and d["n"] == 5 and d["birth_sets"][0] == [] and len(d["birth_sets"][4]) == 1
    _, out, _ = run_cli(capsys, "grow", "--seq", "ones", "--n", "5", "--seed", "1", "--format", "csv")
    assert out.splitlines()[0] == "u,v" and len(out.splitlines()) == 5


def test_analyze_const_frac(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--seq", "const-frac:1/2", "--t-max", "4", "--horizon", "10000")
    d = json.loads(out)
    assert code == 0 and d["verdict"] == "known:inf" and len(d["per_t"]) == 4


def test_census_command(capsys):
    code, out, _ = run_cli(capsys, "census", "--seq", "ones", "--n", "20", "--seed", "3")
    d = json.loads(out)
    assert code == 0 and d["census"] == {"20": 1} and d["zero_count"] == 1


def test_series_check_command(capsys):
    code, out, _ = run_cli(capsys, "series-check", "--seq", "ones", "--l", "1", "--M", "3", "--check", "rearrangement")
    assert code == 0
    assert json.loads(out)["rearrangement"] == {"lhs": "3/1", "rhs": "3/1", "equal": True}


def test_experiment_triangle(capsys, tmp_path):
    target = tmp_path / "tri.json"
    code, _, _ = run_cli(capsys, "experiment", "--preset", "triangle", "--rounds", "2", "--replicas", "10000",
                         "--seed", "1", "-o", str(target))
    assert code == 0
    d = json.loads(target.read_text())
    stat = d["stats"][0]
    assert stat["target"] == "56/75"
    assert abs(stat["mean"] - 56 / 75) <= 3 * stat["se"]
    assert d["wall_ms"] is None


def test_identical_argv_gives_identical_bytes(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p, w in zip(paths, ("1", "2")):
        cli.main(["experiment", "--preset", "witness", "--replicas", "2000", "--seed", "5", "--workers", w, "-o", str(p)])
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_report_command(tmp_path, capsys):
    src = tmp_path / "r.json"
    cli.main(["experiment", "--preset", "witness", "--replicas", "500", "-o", str(src)])
    code, out, _ = run_cli(capsys, "report", str(src))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "name,target,bound,mean,se,z,pass" and len(lines) == 4
    code, out, _ = run_cli(capsys, "report", str(src), "--format", "plot")
    assert out.splitlines()[0] == "x,y,band"
    code, _, err = run_cli(capsys, "report", str(tmp_path / "missing.json"))
    assert code == 2 and "cannot read" in err


def test_seed_comes_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("RADOLAB_SEED", "7")
    _, env_out, _ = run_cli(capsys, "grow", "--seq", "ones", "--n", "50")
    _, flag_out, _ = run_cli(capsys, "grow", "--seq", "ones", "--n", "50", "--seed", "7")
    assert env_out == flag_out
    monkeypatch.setenv("RADOLAB_SEED", "minus-one")
    code, _, err = run_cli(capsys, "grow", "--seq", "ones", "--n", "50")
    assert code == 2 and "RADOLAB_SEED" in err


@pytest.mark.parametrize(
    "argv, needle",
    [
        (["grow", "--seq", "nonsense", "--n", "5"], "nonsense"),
        (["grow", "--seq", "ones", "--n", str(10**7 + 1)], "--unsafe-limits"),
        (["experiment", "--preset", "triangle", "--replicas", str(10**6 + 1)], "--unsafe-limits"),
        (["experiment", "--preset", "triangle", "--param", "rounds"], "KEY=VALUE"),
        (["experiment", "--preset", "triangle", "--workers", "0"], "workers"),
        (["series-check", "--seq", "ones", "--l", "6", "--M", "100"], "budget"),
    ],
)
def test_usage_errors_exit_two(capsys, argv, needle):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2 and out == ""
    assert needle in err and len(err.strip().splitlines()) == 1


def test_unknown_preset_is_rejected_by_parser(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["experiment", "--preset", "nope"])
    assert exc.value.code == 2


def test_failed_check_exits_one(capsys, monkeypatch):
    from radolab import experiments, harness

    def broken(plan, workers=1):
        return harness.ExperimentReport("triangle", "x", 1, 2, 0,
                                        [harness.stat_equal("m", harness.Tally.of([0, 0]), 1)])

    monkeypatch.setattr(experiments, "run", broken)
    code, out, err = run_cli(capsys, "experiment", "--preset", "triangle")
    assert code == 1 and "failed check" in err
    assert json.loads(out)["stats"][0]["pass"] is False


def test_budget_exhaustion_marks_report_invalid(capsys):
    code, out, err = run_cli(capsys, "experiment", "--preset", "census", "--horizon", "300",
                             "--replicas", "2000", "--time-budget", "0")
    assert code == 1 and "invalid" in err
    assert json.loads(out)["valid"] is False


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "radolab", "analyze", "--seq", "ones", "--horizon", "20",
                          "--format", "text"], capture_output=True, text=True)
    assert res.returncode == 0 and "known:1" in res.stdout
