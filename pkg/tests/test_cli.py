import json
import os

import pytest

from conic_bernstein import cli
from conic_bernstein.operators import DiffOp


# ---------------------------------------------------------------------------
# small parsing helpers


def test_parse_degrees_forms():
    assert cli.parse_degrees("8:48") == (8, 12, 16, 24, 32, 48)
    assert cli.parse_degrees("8:24") == (8, 12, 16, 24)
    assert cli.parse_degrees("8,16,32") == (8, 16, 32)
    assert cli.parse_degrees("12") == (12,)
    assert cli.parse_degrees([4, 6]) == (4, 6)
    # a range that misses every ladder rung falls back to its endpoints
    assert cli.parse_degrees("3:5") == (3, 5)
    with pytest.raises(cli.ConfigError):
        cli.parse_degrees("8:x")


def test_parse_op_forms():
    assert cli.parse_op("dt", 1) == DiffOp("dt", 1, "none")
    assert cli.parse_op("phi-dt", 1) == DiffOp("dt", 1, "phi")
    assert cli.parse_op("tinvsqrt-dij", 2) == DiffOp("dij", 2, "tinvsqrt")
    assert cli.parse_op("Dxj", 1) == DiffOp("Dxj", 1, "none")
    # triangle cores default to their own corner compensator
    assert cli.parse_op("tri2", 1) == DiffOp("tri2", 1, "tri2")
    assert cli.parse_op("none-tri2", 1) == DiffOp("tri2", 1, "none")
    with pytest.raises(cli.ConfigError):
        cli.parse_op("grad", 1)
    with pytest.raises(cli.ConfigError):
        cli.parse_op("bogus-dt", 1)


def test_version_string_mentions_package_version():
    v = cli.version_string()
    assert v.startswith("0.1.0")


# ---------------------------------------------------------------------------
# config resolution


def resolve(argv):
    args = cli.build_parser().parse_args(argv)
    return cli.resolve_config(args)


def test_defaults_fill_in():
    rc = resolve(["verify", "eigen"])
    assert rc.command == "verify"
    assert rc.suite == "eigen"
    assert rc.options["nmax"] == 8
    assert rc.options["tol"] == 1e-8


def test_cli_flag_overrides_default():
    rc = resolve(["verify", "eigen", "--nmax", "4"])
    assert rc.options["nmax"] == 4


def test_config_file_merging(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"nmax": 5, "verify.eigen.tol": 1e-6, "constants.tol": 0.3}))
    rc = resolve(["verify", "eigen", "--config", str(cfg)])
    assert rc.options["nmax"] == 5
    assert rc.options["tol"] == 1e-6  # dotted key for this command applies
    rc2 = resolve(["verify", "eigen", "--config", str(cfg), "--nmax", "7"])
    assert rc2.options["nmax"] == 7  # explicit flag beats the file


def test_config_file_unknown_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"not_a_flag": 1}))
    with pytest.raises(cli.ConfigError):
        resolve(["verify", "eigen", "--config", str(cfg)])


def test_config_file_must_be_flat(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"verify": {"eigen": {"nmax": 4}}}))
    with pytest.raises(cli.ConfigError):
        resolve(["verify", "eigen", "--config", str(cfg)])


def test_run_config_json_shape():
    rc = resolve(["pointset", "--domain", "ball", "--eps", "0.4"])
    blob = rc.to_json()
    assert blob["command"] == "pointset"
    assert blob["eps"] == 0.4
    json.dumps(blob)  # fully serializable


# ---------------------------------------------------------------------------
# thread capping


def test_thread_cap_sets_env(monkeypatch):
    monkeypatch.setenv("CONIC_BERNSTEIN_THREADS", "2")
    for var in cli._THREAD_VARS:
        monkeypatch.delenv(var, raising=False)
    cli._cap_threads()
    for var in cli._THREAD_VARS:
        assert os.environ[var] == "2"


def test_thread_cap_rejects_garbage(monkeypatch):
    monkeypatch.setenv("CONIC_BERNSTEIN_THREADS", "many")
    with pytest.raises(cli.ConfigError):
        cli._cap_threads()


# ---------------------------------------------------------------------------
# end-to-end exit codes


def test_missing_required_flag_is_config_error(capsys):
    # constants needs --op
    assert cli.main(["constants", "--domain", "interval"]) == 2


def test_unknown_op_is_config_error(capsys):
    assert cli.main(["constants", "--op", "grad"]) == 2


def test_bad_epsilon_is_config_error(capsys):
    assert cli.main(["pointset", "--domain", "ball", "--eps", "-1"]) == 2
    assert cli.main(["pointset", "--domain", "ball", "--eps", "1e-9"]) == 2


def test_verify_eigen_small_run(capsys):
    rc = cli.main(["verify", "eigen", "--domain", "surface", "--d", "2", "--nmax", "4"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "PASS" in out
    blob = json.loads(out[out.index("{") :])
    assert "version" in blob and "config" in blob
    assert blob["config"]["nmax"] == 4


def test_constants_interval_report(tmp_path, capsys):
    rc = cli.main(
        [
            "constants",
            "--domain",
            "interval",
            "--op",
            "phi-dt",
            "--n",
            "4,6,8,12",
            "--out",
            str(tmp_path / "r"),
        ]
    )
    assert rc == 0
    report = json.loads((tmp_path / "r.json").read_text())
    assert report["config"]["op"] == "phi-dt"
    assert report["report"]["verdict"] in ("PASS", "FAIL")
    csv_text = (tmp_path / "r.csv").read_text()
    assert csv_text.splitlines()[0].startswith("operator,")


def test_constants_divergent_exits_zero(capsys):
    rc = cli.main(
        ["constants", "--domain", "surface", "--op", "tinv-dij", "--l", "2", "--n", "4,6"]
    )
    out = capsys.readouterr().out
    assert rc == 0
    assert "DIVERGENT" in out


def test_constants_wrong_claim_exits_tolerance(capsys):
    # a tolerance far tighter than the finite-degree fit can meet
    argv = [
        "constants",
        "--domain",
        "interval",
        "--op",
        "phi-dt",
        "--n",
        "8,12,16,24",
        "--tol",
        "0.001",
    ]
    assert cli.main(argv) == 4


def test_pointset_csv_deterministic(tmp_path):
    args = ["pointset", "--domain", "ball", "--eps", "0.3", "--out"]
    assert cli.main(args + [str(tmp_path / "a")]) == 0
    assert cli.main(args + [str(tmp_path / "b")]) == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    cert = json.loads((tmp_path / "a.json").read_text())
    assert cert["certificate"]["count"] > 0


def test_decay_bound_controls_exit(tmp_path, capsys):
    base = ["decay", "--n", "6", "--probes", "8"]
    assert cli.main(base) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "n,dist,value,envelope,ratio"
    assert cli.main(base + ["--bound", "1e-12"]) == 4


def test_decay_csv_written(tmp_path):
    rc = cli.main(["decay", "--n", "6", "--probes", "8", "--out", str(tmp_path / "d")])
    assert rc == 0
    text = (tmp_path / "d.csv").read_text()
    assert text.splitlines()[0] == "n,dist,value,envelope,ratio"
    assert "np.float64" not in text
