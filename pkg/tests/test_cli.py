import io
import os
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from hyperheat import cli, validation
from hyperheat.validation import Check
from oracle_values import H3, MCKEAN

NS = "{http://www.w3.org/2000/svg}"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_eval_exact3():
    code, out, _ = run("eval", "--n", "3", "--T", "1", "--r", "1", "--method", "exact3")
    assert code == 0
    fields = out.strip().split(",")
    assert fields[:4] == ["exact3", "3", "1", "1"] and fields[5] == ""
    assert float(fields[4]) == pytest.approx(H3[(1.0, 1.0)], rel=1e-11)
    code, out, _ = run("eval", "--n", "3", "--T", "1", "--r", "0", "--method", "exact3")
    assert float(out.split(",")[4]) == pytest.approx(H3[(1.0, 0.0)], rel=1e-11)


def test_eval_gruet_and_mckean():
    _, out, _ = run("eval", "--n", "3", "--T", "1", "--r", "1", "--method", "gruet")
    assert float(out.split(",")[4]) == pytest.approx(H3[(1.0, 1.0)], rel=1e-8)
    _, out, _ = run("eval", "--n", "2", "--T", "1", "--r", "1", "--method", "mckean")
    assert float(out.split(",")[4]) == pytest.approx(MCKEAN[(1.0, 1.0)], rel=1e-11)


def test_eval_mc_has_stderr():
    code, out, _ = run("eval", "--n", "2", "--T", "1", "--r", "1", "--method", "mc_bridge",
                       "--paths", "4000", "--steps", "50", "--seed", "3")
    assert code == 0
    value, stderr = (float(v) for v in out.strip().split(",")[4:])
    assert stderr > 0 and abs(value - MCKEAN[(1.0, 1.0)]) < 4 * stderr


def test_eval_other_methods():
    for extra in (["--method", "series", "--K", "2", "--path", "straight_line"],
                  ["--method", "small_time"],
                  ["--method", "mc_bridge", "--profile", "scaled:1"]):
        code, out, err = run("eval", "--n", "4", "--T", "0.5", "--r", "1", "--paths", "2000",
                             "--steps", "40", *extra)
        assert code == 0, err
        assert out.startswith(extra[1] + ",4,0.5,1,")


def test_fmt():
    assert cli.fmt(0.1 + 0.2) == "0.3"
    assert cli.fmt(1 / 3) == "0.333333333333"
    assert cli.fmt(1.5e-20) == "1.5e-20"
    assert cli.fmt(None) == ""


@pytest.mark.parametrize("argv", [
    ["eval", "--n", "3", "--T", "1", "--r", "1"],
    ["eval", "--n", "3", "--T", "1", "--r", "1", "--method", "bogus"],
    ["eval", "--n", "2", "--T", "1", "--r", "1", "--method", "exact3"],
    ["eval", "--n", "3", "--T", "1", "--r", "1", "--method", "mckean"],
    ["eval", "--n", "3", "--T", "-1", "--r", "1", "--method", "exact3"],
    ["eval", "--n", "1", "--T", "1", "--r", "1", "--method", "gruet"],
    ["eval", "--n", "3", "--T", "1", "--r", "-1", "--method", "exact3"],
    ["eval", "--n", "2", "--T", "1", "--r", "1", "--method", "mc_bridge", "--paths", "0"],
    ["eval", "--n", "2", "--T", "1", "--r", "1", "--method", "mc_bridge", "--paths", "3",
     "--antithetic"],
    ["eval", "--n", "2", "--T", "1", "--r", "1", "--method", "mc_bridge", "--profile", "flat"],
    ["eval", "--n", "2", "--T", "1", "--r", "0", "--method", "small_time"],
    ["sweep", "--n", "2", "--T", "1", "--r-min", "2", "--r-max", "1"],
    ["sweep", "--n", "2", "--T", "1", "--methods", "gruet,nope"],
    ["sweep", "--n", "2", "--T", "1", "--points", "1"],
    ["compare", "--n", "2,x"],
    ["compare", "--n", "2", "--r-min", "0"],
    ["validate", "--suite", "nope"],
    ["frobnicate"],
    [],
])
def test_usage_errors_exit_2(argv):
    code, out, err = run(*argv)
    assert code == 2 and out == "" and "error" in err


def test_numerical_failure_exit_3(monkeypatch):
    from hyperheat import kernels_closed as kc
    from hyperheat.errors import QuadratureError

    def boom(*a, **k):
        raise QuadratureError("tolerance not met")

    monkeypatch.setattr(kc, "gruet", boom)
    code, _, err = run("eval", "--n", "4", "--T", "1", "--r", "1", "--method", "gruet")
    assert code == 3 and "numerical" in err


def test_io_failure_exit_4(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    code, _, err = run("sweep", "--n", "3", "--T", "1", "--points", "3", "--methods", "exact3",
                       "--out", str(target))
    assert code == 4 and "I/O" in err
    code, _, _ = run("compare", "--n", "3", "--points", "3", "--svg", str(tmp_path / "no" / "f.svg"),
                     "--out", str(tmp_path / "ok.csv"))
    assert code == 4


def test_validate_exit_codes(monkeypatch):
    monkeypatch.setitem(validation.SUITES, "probe_ok", lambda: [Check("a", 0.0, "<= 1", True)])
    monkeypatch.setitem(validation.SUITES, "probe_bad", lambda: [Check("b", 2.0, "<= 1", False)])
    code, out, _ = run("validate", "--suite", "probe_ok")
    assert code == 0 and out.splitlines()[0].startswith("PASS  a")
    code, out, _ = run("validate", "--suite", "probe_bad")
    assert code == 1 and "FAILED" in out


def test_validate_normalization_cli():
    code, out, _ = run("validate", "--suite", "normalization")
    assert code == 0
    assert sum(line.startswith("PASS") for line in out.splitlines()) == 6


def test_sweep_rows_and_schema(tmp_path):
    target = tmp_path / "s.csv"
    code, _, _ = run("sweep", "--n", "3", "--T", "1", "--r-min", "0.1", "--r-max", "5",
                     "--points", "101", "--methods", "exact3,mc_bridge", "--paths", "10",
                     "--out", str(target))
    assert code == 0
    lines = target.read_text().splitlines()
    assert lines[0] == "r,method,value,stderr"
    assert len(lines) == 1 + 101 * 2
    rows = [l.split(",") for l in lines[1:]]
    for ex3, mcr in zip(rows[0::2], rows[1::2]):
        assert ex3[1] == "exact3" and ex3[3] == ""
        assert mcr[1] == "mc_bridge" and float(mcr[3]) == 0.0
        assert float(mcr[2]) == pytest.approx(float(ex3[2]), rel=1e-11)


def test_sweep_mckean_vs_gruet():
    code, out, _ = run("sweep", "--n", "2", "--T", "1", "--points", "15", "--methods", "mckean,gruet")
    assert code == 0
    rows = [l.split(",") for l in out.splitlines()[1:]]
    for a, b in zip(rows[0::2], rows[1::2]):
        assert float(a[2]) == pytest.approx(float(b[2]), rel=1e-6)


def test_sweep_byte_identical(tmp_path):
    args = ["sweep", "--n", "2", "--T", "1", "--points", "4", "--methods", "mc_bridge,gruet",
            "--paths", "2000", "--steps", "30", "--seed", "8"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(*args, "--out", str(a))[0] == 0
    assert run(*args, "--out", str(b), "--workers", "3")[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_seed_resolution(tmp_path, monkeypatch):
    base = ["eval", "--n", "2", "--T", "1", "--r", "1", "--method", "mc_bridge",
            "--paths", "500", "--steps", "20"]
    monkeypatch.delenv("HYPERHEAT_SEED", raising=False)
    default = run(*base)[1]
    assert run(*base, "--seed", "0")[1] == default
    monkeypatch.setenv("HYPERHEAT_SEED", "5")
    env = run(*base)[1]
    assert env == run(*base, "--seed", "5")[1] and env != default
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# experiment record\nseed = 6\npaths=500  # overridden below\nsteps=20\n")
    from_cfg = run("--config", str(cfg), *base)[1]
    assert from_cfg == run(*base, "--seed", "6")[1]
    assert run(*base, "--seed", "7", "--config", str(cfg))[1] == run(*base, "--seed", "7")[1]
    monkeypatch.setenv("HYPERHEAT_SEED", "x")
    assert run(*base)[0] == 2


def test_config_paths_and_errors(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("paths = 300\nsteps = 10\nantithetic = true\n")
    code, out, _ = run("eval", "--config", str(cfg), "--n", "2", "--T", "1", "--r", "1",
                       "--method", "mc_bridge")
    assert code == 0
    explicit = run("eval", "--n", "2", "--T", "1", "--r", "1", "--method", "mc_bridge",
                   "--paths", "300", "--steps", "10", "--antithetic")[1]
    assert out == explicit
    for text in ("paths\n", "colour = red\n", "paths = many\n", "antithetic = maybe\n"):
        cfg.write_text(text)
        assert run("--config", str(cfg), "validate", "--suite", "bessel")[0] == 2
    assert run("--config", str(tmp_path / "absent.cfg"), "validate", "--suite", "bessel")[0] == 2


def test_compare_csv_and_svg(tmp_path):
    out_csv, out_svg = tmp_path / "c.csv", tmp_path / "c.svg"
    code, _, _ = run("compare", "--n", "2,5", "--T", "1", "--points", "6", "--r-max", "4",
                     "--out", str(out_csv), "--svg", str(out_svg))
    assert code == 0
    lines = out_csv.read_text().splitlines()
    assert lines[0] == "n,r,gruet,small_time_straight,small_time_unbiased"
    assert len(lines) == 1 + 12 and {l.split(",")[0] for l in lines[1:]} == {"2", "5"}
    root = ET.fromstring(out_svg.read_text())
    panels = root.findall(NS + "g")
    assert len(panels) == 2
    for p in panels:
        assert len(p.findall(NS + "polyline")) == 3


def test_compare_single_dimension_n3():
    code, out, _ = run("compare", "--n", "3", "--points", "5")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "r,gruet,small_time_straight,small_time_unbiased"
    for row in lines[1:]:
        r, g, s, u = (float(v) for v in row.split(","))
        assert s == pytest.approx(g, rel=1e-8) and u == pytest.approx(g, rel=1e-8)


def test_compare_defaults():
    c = cli.build_parser().parse_args(["compare"])
    assert c.n is None and c.T == 1.0 and (c.r_min, c.r_max, c.points) == (0.1, 5.0, 100)
    assert cli.COMPARE_DIMS == (2, 4, 5, 6)


def test_module_and_script_entry_points():
    env = dict(os.environ)
    env.pop("HYPERHEAT_SEED", None)
    a = subprocess.run([sys.executable, "-m", "hyperheat", "eval", "--n", "3", "--T", "1",
                        "--r", "1", "--method", "exact3"], capture_output=True, text=True, env=env)
    assert a.returncode == 0 and a.stdout.startswith("exact3,3,1,1,0.0198757484")
    b = subprocess.run([sys.executable, "-m", "hyperheat", "eval", "--n", "3"],
                       capture_output=True, text=True, env=env)
    assert b.returncode == 2
