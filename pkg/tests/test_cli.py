import json
import os

import pytest

from vortexrings import cli, io
from vortexrings.diagnostics import BASE_COLUMNS


def write_config(tmp_path, doc, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def small_run(**numerics):
    num = {"horizon": 0.05, "dt": 0.005}
    num.update(numerics)
    return {"schema_version": 1, "epsilon": 0.05, "rings": [{"center": [0.0, 1.0], "resolution": 6}],
            "numerics": num, "diagnostics": {"cadence": 5}}


def test_simulate_ok(tmp_path, capsys):
    out = tmp_path / "out"
    code = cli.main(["simulate", "--config", write_config(tmp_path, small_run()), "--out", str(out)])
    assert code == cli.EXIT_OK
    header, rows = io.read_csv(out / "timeseries.csv")
    assert tuple(header[:len(BASE_COLUMNS)]) == tuple(BASE_COLUMNS)
    assert len(rows) == 3
    assert (out / "snapshot_final.csv").exists() and (out / "config.normalized.json").exists()
    assert "traj_err[0]" in capsys.readouterr().out


def test_simulate_env_out(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "envout"))
    assert cli.main(["simulate", "--config", write_config(tmp_path, small_run())]) == 0
    assert (tmp_path / "envout" / "timeseries.csv").exists()


def test_out_flag_beats_env(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "envout"))
    cli.main(["simulate", "--config", write_config(tmp_path, small_run()), "--out", str(tmp_path / "flag")])
    assert (tmp_path / "flag" / "timeseries.csv").exists()
    assert not (tmp_path / "envout").exists()


@pytest.mark.parametrize("mutate", [
    lambda d: d["rings"].append({"center": [0.01, 1.0]}),
    lambda d: d["numerics"].update(delta_ratio=1.5),
    lambda d: d.update(epsilon=-1),
    lambda d: d.update(colour="red"),
])
def test_simulate_config_errors(tmp_path, capsys, mutate):
    doc = small_run()
    mutate(doc)
    assert cli.main(["simulate", "--config", write_config(tmp_path, doc)]) == cli.EXIT_CONFIG
    assert "configuration error" in capsys.readouterr().err


def test_overlap_message_names_rings(tmp_path, capsys):
    doc = small_run()
    doc["rings"].append({"center": [0.01, 1.0]})
    cli.main(["simulate", "--config", write_config(tmp_path, doc)])
    assert "rings 0 and 1" in capsys.readouterr().err


def test_missing_config(tmp_path):
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.json")]) == cli.EXIT_CONFIG


def test_bad_threads(tmp_path):
    assert cli.main(["--threads", "0", "simulate", "--config", write_config(tmp_path, small_run())]) == 1


def test_near_axis_abort(tmp_path, capsys):
    doc = {"schema_version": 1, "epsilon": 0.05,
           "rings": [{"center": [0.0, 0.06], "intensity": 20.0, "density_bound": 1000.0, "resolution": 6}],
           "numerics": {"horizon": 1.0, "dt": 0.1, "guard": "off"}}
    assert cli.main(["simulate", "--config", write_config(tmp_path, doc), "--out", str(tmp_path)]) == 2
    assert "half-plane" in capsys.readouterr().err


def test_kernel_selftest(tmp_path):
    assert cli.main(["kernel-selftest", "--out", str(tmp_path)]) == cli.EXIT_OK
    header, rows = io.read_csv(tmp_path / "kernel_selftest.csv")
    assert header[0] == "check"
    assert [r[0] for r in rows] == ["cross_agreement", "split_identity", "stream_relation", "i1_bound"]
    assert all(r[4] == "true" for r in rows)


def test_kernel_selftest_fault(tmp_path):
    assert cli.main(["kernel-selftest", "--inject-fault", "--out", str(tmp_path)]) == cli.EXIT_FAILED
    _, rows = io.read_csv(tmp_path / "kernel_selftest.csv")
    assert {r[0]: r[4] for r in rows}["cross_agreement"] == "false"


def ladder(epsilons, negative=False):
    return {"schema_version": 1, "rings": [{"center": [0.0, 1.0], "resolution": 6}],
            "numerics": {"horizon": 0.1}, "diagnostics": {"cadence": 5},
            "ladder": {"epsilons": epsilons, "negative_control": negative}}


def test_convergence_single_eps(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["convergence", "--config", write_config(tmp_path, ladder([0.05])), "--out", str(out)]) == 0
    data = json.loads((out / "convergence.json").read_text())
    assert len(data["rows"]) == 1


def test_convergence_negative_control(tmp_path):
    cfg = write_config(tmp_path, ladder([0.05, 0.02], negative=True))
    assert cli.main(["convergence", "--config", cfg, "--out", str(tmp_path / "o")]) == cli.EXIT_FAILED


def _csv_bytes(out):
    return {f: (out / f).read_bytes() for f in ("timeseries.csv", "snapshot_final.csv")}


def test_deterministic_bitwise_across_threads(tmp_path):
    cfg = write_config(tmp_path, small_run())
    runs = []
    for k, threads in enumerate(("1", "1", "2")):
        out = tmp_path / f"r{k}"
        assert cli.main(["--threads", threads, "simulate", "--config", cfg, "--deterministic", "--out", str(out)]) == 0
        runs.append(_csv_bytes(out))
    assert runs[0] == runs[1] == runs[2]


def test_atomic_write_leaves_no_temp(tmp_path):
    io.atomic_write_text(tmp_path / "a.txt", "hello")
    io.atomic_write_text(tmp_path / "a.txt", "bye")
    assert os.listdir(tmp_path) == ["a.txt"]
    assert (tmp_path / "a.txt").read_text() == "bye"


def test_atomic_write_failure_keeps_old(tmp_path, monkeypatch):
    target = tmp_path / "a.txt"
    target.write_text("old")

    def boom(*a):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        io.atomic_write_text(target, "new")
    assert target.read_text() == "old"
    assert os.listdir(tmp_path) == ["a.txt"]


def test_csv_number_format():
    assert io.fmt(0.1) == "0.10000000000000001"
    assert float(io.fmt(1 / 3)) == 1 / 3
    assert io.fmt(7) == "7"


def test_json_accepts_numpy_scalars(tmp_path):
    import numpy as np

    io.write_json(tmp_path / "x.json", {"ok": np.bool_(True), "v": np.float64(0.5)})
    assert json.loads((tmp_path / "x.json").read_text()) == {"ok": True, "v": 0.5}
