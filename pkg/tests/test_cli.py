import json
import math
import shutil
import subprocess
import sys
import time

import pytest

from wpcone.cli import _parse_angle, main

CONE_TORUS_LATEX = "-\\frac{\\theta_1^2}{48}+\\frac{\\pi^2}{12}"


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# -- angle parsing ------------------------------------------------------------------


def test_parse_angle_forms():
    assert _parse_angle("pi") == math.pi
    assert _parse_angle("pi/2") == math.pi / 2
    assert _parse_angle("3pi/4") == 3 * math.pi / 4
    assert _parse_angle("2pi/3") == 2 * math.pi / 3
    assert _parse_angle("1.5") == 1.5
    assert abs(_parse_angle("90", degrees=True) - math.pi / 2) < 1e-15
    assert _parse_angle("pi", degrees=True) == math.pi  # literals stay radian
    for bad in ("pie", "pi+1", "2+pi", "one"):
        with pytest.raises(ValueError, match="cannot parse angle"):
            _parse_angle(bad)


# -- volume command -----------------------------------------------------------------


def test_volume_latex_golden(capsys):
    code, out, err = run(capsys, "volume", "--g", "1", "--cones", "1")
    assert code == 0 and err == ""
    assert out == CONE_TORUS_LATEX + "\n"


def test_volume_pants(capsys):
    code, out, _ = run(capsys, "volume", "--g", "0", "--boundaries", "3")
    assert code == 0
    assert out == "1\n"


def test_volume_text_and_json(capsys):
    code, out, _ = run(
        capsys, "volume", "--g", "1", "--cones", "1", "--format", "text"
    )
    assert code == 0
    assert out == "-1/48*theta_1^2 + 1/12*pi^2\n"
    code, out, _ = run(
        capsys, "volume", "--g", "1", "--cones", "1", "--format", "json"
    )
    assert code == 0
    assert out == (
        '{"vars":1,"terms":[{"xexp":[1],"piexp":0,"coeff":"-1/48"},'
        '{"xexp":[0],"piexp":2,"coeff":"1/12"}]}\n'
    )


def test_volume_numeric_value(capsys):
    code, out, _ = run(
        capsys, "volume", "--g", "1", "--cones", "1", "--angles", "pi"
    )
    assert code == 0
    assert float(out) == pytest.approx(math.pi ** 2 / 16, abs=1e-15)
    code, out, _ = run(
        capsys,
        "volume", "--g", "1", "--cones", "1",
        "--angles", "90", "--degrees", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["value"] == pytest.approx(5 * math.pi ** 2 / 64, abs=1e-15)


def test_volume_numeric_needs_all_slots(capsys):
    code, out, err = run(
        capsys,
        "volume", "--g", "1", "--boundaries", "1", "--cones", "1",
        "--angles", "1.0",
    )
    assert code == 2 and out == ""
    assert "--lengths" in err


def test_volume_rejects_wide_angle(capsys):
    code, out, err = run(
        capsys, "volume", "--g", "1", "--cones", "1", "--angles", "4.0"
    )
    assert code == 2 and out == ""
    assert "(0, pi]" in err
    assert "Traceback" not in err


def test_volume_unstable_signature(capsys):
    code, _, err = run(capsys, "volume", "--g", "0", "--boundaries", "2")
    assert code == 2
    assert "unstable" in err


# -- table command ------------------------------------------------------------------


def test_table_single_slot(capsys):
    code, out, _ = run(capsys, "table", "--g-max", "1", "--slot-max", "1")
    assert code == 0
    assert out.splitlines() == [
        "V(g=1,m=1,n=0) = 1/48*l_1^2 + 1/12*pi^2",
        "V(g=1,m=0,n=1) = -1/48*theta_1^2 + 1/12*pi^2",
    ]


def test_table_deterministic_across_threads(capsys):
    args = ["table", "--g-max", "1", "--slot-max", "3", "--format", "latex"]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args, "--threads", "3")
    assert code1 == code2 == 0
    assert out1 == out2


def test_table_csv_and_json(capsys):
    code, out, _ = run(
        capsys, "table", "--g-max", "0", "--slot-max", "3", "--format", "csv"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "g,m,n,polynomial"
    assert lines[1] == "0,3,0,1"
    assert len(lines) == 5  # header + the four genus-zero pants flavors
    code, out, _ = run(
        capsys, "table", "--g-max", "1", "--slot-max", "2", "--format", "json"
    )
    assert code == 0
    doc = json.loads(out)
    sigs = [(v["genus"], v["boundaries"], v["cones"]) for v in doc["volumes"]]
    assert sigs == [(1, 1, 0), (1, 0, 1), (1, 2, 0), (1, 1, 1), (1, 0, 2)]
    for entry in doc["volumes"]:
        assert set(entry["polynomial"]) == {"vars", "terms"}


def test_table_cap_guard(capsys):
    code, _, err = run(capsys, "table", "--g-max", "9")
    assert code == 2
    assert "max_genus" in err


# -- cusp-limit command -------------------------------------------------------------


def test_cusp_limit_golden(capsys):
    code, out, _ = run(capsys, "cusp-limit", "--g", "1", "--cones", "1")
    assert code == 0
    assert out == "\\frac{\\pi^2}{12}\n"


def test_cusp_limit_slot_out_of_range(capsys):
    code, _, err = run(
        capsys, "cusp-limit", "--g", "1", "--cones", "1", "--slot", "2"
    )
    assert code == 2
    assert "cone slot" in err


# -- verify subcommands -------------------------------------------------------------


def test_verify_mcshane_json(capsys):
    code, out, _ = run(
        capsys,
        "verify", "mcshane", "--cusp", "--cutoff", "20", "--format", "json",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["target"] == 0.5
    assert doc["partial_sums"][-1]["residual"] < 1e-6


def test_verify_mcshane_text_pass_line(capsys):
    code, out, _ = run(
        capsys, "verify", "mcshane", "--theta", "pi", "--cutoff", "20"
    )
    assert code == 0
    assert "result: pass" in out


def test_verify_mcshane_failing_tolerance(capsys):
    code, out, _ = run(
        capsys,
        "verify", "mcshane", "--cusp", "--cutoff", "12", "--tol", "1e-9",
    )
    assert code == 1
    assert "FAIL" in out


def test_verify_mcshane_selection_required(capsys):
    code, _, err = run(capsys, "verify", "mcshane")
    assert code == 2
    assert "--theta" in err
    code, _, err = run(
        capsys, "verify", "mcshane", "--theta", "pi", "--cusp"
    )
    assert code == 2


def test_verify_identity(capsys):
    code, out, _ = run(capsys, "verify", "identity", "--grid", "4")
    assert code == 0
    assert "pass" in out


def test_verify_kernel(capsys):
    code, out, _ = run(
        capsys, "verify", "kernel", "--max-k", "2", "--samples", "3"
    )
    assert code == 0
    assert out.strip().endswith("pass")


def test_verify_recursion(capsys):
    code, out, _ = run(
        capsys,
        "verify", "recursion",
        "--g-max", "1", "--slot-max", "2", "--samples", "1",
    )
    assert code == 0
    assert "pass" in out


# -- configuration sources ----------------------------------------------------------


def test_config_file_and_flag_precedence(tmp_path, capsys):
    config = tmp_path / "wpcone.cfg"
    config.write_text("# caps\nmax_genus = 1\n")
    code, _, err = run(
        capsys,
        "volume", "--g", "2", "--boundaries", "1", "--config", str(config),
    )
    assert code == 2 and "max_genus=1" in err
    code, out, _ = run(
        capsys,
        "volume", "--g", "2", "--boundaries", "1",
        "--config", str(config), "--max-genus", "2", "--format", "text",
    )
    assert code == 0
    assert out.startswith("1/442368*l_1^8")


def test_config_rejects_unknown_key(tmp_path, capsys):
    config = tmp_path / "bad.cfg"
    config.write_text("max_genus=2\nmax_wings=7\n")
    code, _, err = run(
        capsys, "volume", "--g", "1", "--cones", "1", "--config", str(config)
    )
    assert code == 2
    assert "max_wings" in err


def test_env_cap(monkeypatch, capsys):
    monkeypatch.setenv("WPCONE_MAX_GENUS", "1")
    code, _, err = run(capsys, "volume", "--g", "2", "--boundaries", "1")
    assert code == 2 and "max_genus=1" in err
    # an explicit flag outranks the environment
    code, _, _ = run(
        capsys,
        "volume", "--g", "2", "--boundaries", "1", "--max-genus", "2",
    )
    assert code == 0
    monkeypatch.setenv("WPCONE_MAX_GENUS", "three")
    code, _, err = run(capsys, "volume", "--g", "1", "--cones", "1")
    assert code == 2
    assert "WPCONE_MAX_GENUS" in err


# -- process-level behavior ----------------------------------------------------------


def test_subprocess_latex_and_startup_time():
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "wpcone.cli", "volume", "--g", "1",
         "--cones", "1"],
        capture_output=True,
        text=True,
        timeout=30,
    )
    elapsed = time.perf_counter() - start
    assert proc.returncode == 0
    assert proc.stdout == CONE_TORUS_LATEX + "\n"
    assert elapsed < 1.0


def test_console_script_installed():
    exe = shutil.which("wpcone")
    assert exe is not None
    proc = subprocess.run(
        [exe, "volume", "--g", "0", "--boundaries", "3"],
        capture_output=True,
        text=True,
        timeout=30,
    )
    assert proc.returncode == 0
    assert proc.stdout == "1\n"


def test_usage_error_exits_two():
    proc = subprocess.run(
        [sys.executable, "-m", "wpcone.cli", "orbit"],
        capture_output=True,
        text=True,
        timeout=30,
    )
    assert proc.returncode == 2
    assert "invalid choice" in proc.stderr


if __name__ == "__main__":
    sys.exit(pytest.main(sys.argv))
