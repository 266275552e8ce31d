import json

import pytest

from octolat.cli import run

BOX3 = {"h": 1, "shape": "box", "corner": [0] * 8, "side": 3}


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("OCTOLAT_KERNEL_CACHE", raising=False)
    (tmp_path / "box3.json").write_text(json.dumps(BOX3))
    assert run(["kernel", "build", "--range", "5", "--tol", "1e-10", "--out", "k.bin"]) == 0
    return tmp_path


def _stderr_error(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"]


def test_algebra(capsys):
    assert run(["verify", "algebra", "--seed", "7", "--samples", "500", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    names = {c["name"] for c in report["checks"]}
    assert {"moufang_left", "alternativity_left", "flexibility", "composition"} <= names
    assert report["passed"] and "timings" not in report


def test_kernel_check_and_export(workdir, capsys):
    assert run(["kernel", "check", "k.bin", "--json", "--figure", "scan.png"]) == 0
    report = json.loads(capsys.readouterr().out)
    names = [c["name"] for c in report["checks"]]
    assert "laplace_origin" in names and "dirac_off_origin" in names
    assert len(report["provenance"]["kernel_sha256"]) == 64
    assert (workdir / "scan.png").stat().st_size > 0
    assert run(["kernel", "export-csv", "k.bin", "--out", "k.csv"]) == 0
    assert (workdir / "k.csv").read_text().startswith("x0,")


def test_pompeiu_from_env(workdir, capsys, monkeypatch):
    monkeypatch.setenv("OCTOLAT_KERNEL_CACHE", str(workdir / "k.bin"))
    code = run(["verify", "pompeiu", "--domain", "box3.json", "--samples", "25", "--seed", "1", "--out", "p.json"])
    assert code == 0
    report = json.loads((workdir / "p.json").read_text())
    assert max(c["residual"] for c in report["checks"]) <= 1e-6


def test_timings_opt_in(workdir):
    run(["verify", "exterior", "--domain", "box3.json", "--kernel", "k.bin", "--timings", "--out", "e.json"])
    assert "exterior" in json.loads((workdir / "e.json").read_text())["timings"]


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "pompeiu", "--domain", "missing.json", "--kernel", "k.bin"],
        ["verify", "pompeiu", "--domain", "box3.json"],
        ["verify", "nonsense"],
        ["converge", "--pole", "1"],
        ["converge", "--hs", "1,-1"],
        ["converge", "--shape", "box"],
    ],
)
def test_config_errors(workdir, capsys, argv):
    assert run(argv) == 2
    assert _stderr_error(capsys)["type"] == "config"


def test_coverage_error(workdir, capsys):
    big = {"h": 1, "shape": "box", "corner": [0] * 8, "side": 5}
    (workdir / "big.json").write_text(json.dumps(big))
    assert run(["verify", "pompeiu", "--domain", "big.json", "--kernel", "k.bin"]) == 2


def test_check_failure_exit_code(workdir, capsys):
    code = run(["converge", "--pole", "4", "--samples", "20", "--surface-samples", "64", "--out", "r.csv"])
    assert code == 1
    err = _stderr_error(capsys)
    assert err["type"] == "check_failure" and err["failed"]


def test_converge_outputs(workdir, capsys):
    argv = ["converge", "--fn", "nonregular", "--surface-samples", "64", "--out", "r.csv", "--report", "r.json",
            "--figure", "r.png"]
    assert run(argv) == 0
    lines = (workdir / "r.csv").read_text().splitlines()
    assert lines[0] == "h,metric1,metric2,metric3,metric4,vol_excess,sup_error,dhf_max"
    assert len(lines) == 3
    report = json.loads((workdir / "r.json").read_text())
    assert report["config"]["fn"] == "nonregular"
    assert (workdir / "r.png").stat().st_size > 0


def test_info(capsys):
    assert run(["info"]) == 0
    assert "tolerances" in json.loads(capsys.readouterr().out)
