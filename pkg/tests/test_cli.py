"""CLI contract: report schemas, exit codes, file outputs."""

import json

import pytest

from multicorn.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


class TestClassify:
    def test_json_report(self, capsys):
        code, out = run_cli(capsys, "classify", "--degree", "2",
                            "--angle", "3/7", "--json")
        assert code == 0
        report = json.loads(out)
        assert report["command"] == "classify"
        res = report["results"]
        assert res["class"] == "WigglesRoot"
        assert res["component_period"] == 3
        assert res["characteristic_arc"] == ["3/7", "4/7"]
        assert "version" in report and "timing_seconds" in report

    def test_decimal_angle_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["classify", "--degree", "2", "--angle", "0.5"])
        assert exc.value.code == 2

    def test_unknown_command_exits_2(self):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2


class TestOrbitAndPortrait:
    def test_orbit(self, capsys):
        code, out = run_cli(capsys, "orbit", "--degree", "2", "--angle", "1/7")
        assert code == 0
        res = json.loads(out)["results"]
        assert res["period"] == 6 and res["preperiod"] == 0
        assert res["cycle"][0] == "1/7"

    def test_portrait(self, capsys):
        code, out = run_cli(capsys, "portrait", "--degree", "2", "--angle", "1/7")
        assert code == 0
        res = json.loads(out)["results"]
        assert res["failure_reason"] == "CharacteristicArcMismatch"
        assert res["class"] == "LandsEvenParabolic"


class TestTrace:
    def test_parameter_trace_to_file(self, tmp_path, capsys):
        out_path = tmp_path / "trace.json"
        code, _ = run_cli(capsys, "trace", "--kind", "param", "--degree", "2",
                          "--angle", "1/2", "--rmin", "1.00001",
                          "--out", str(out_path))
        assert code == 0
        data = json.loads(out_path.read_text())
        res = data["results"]
        assert res["kind"] == "parameter" and res["status"] == "completed"
        r, re, im = res["samples"][-1]
        assert abs(complex(re, im) - (-2.0)) < 1e-2

    def test_dynamical_needs_param(self, capsys):
        code, out = run_cli(capsys, "trace", "--kind", "dyn", "--degree", "2",
                            "--angle", "1/7", "--rmin", "1.1")
        assert code == 1
        assert "param" in json.loads(out)["results"]["message"]


class TestNumericReports:
    def test_fatou_arc_point(self, capsys):
        code, out = run_cli(capsys, "fatou", "--degree", "2", "--phi", "0")
        assert code == 0
        res = json.loads(out)["results"]
        assert res["c"] == [0.25, 0.0]
        assert abs(res["critical_height"]) < 1e-6
        assert abs(res["re_kappa"] - 0.5) < 1e-7
        assert len(res["cusp_angles"]) == 3

    def test_gate(self, capsys):
        code, out = run_cli(capsys, "gate", "--degree", "2", "--s", "1e-4")
        assert code == 0
        res = json.loads(out)["results"]
        assert res["N"] > 100
        assert 1.3 < res["N_sqrt_s"] < 1.9

    def test_index_scan_csv(self, capsys):
        code, out = run_cli(capsys, "index-scan", "--degree", "2",
                            "--phi-range", "0:0.4:2")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "phi,re_iota,im_iota"
        assert len(lines) == 3
        first = [float(x) for x in lines[1].split(",")]
        assert abs(first[1] - 0.5) < 1e-6

    def test_cylinder_fixed_ray(self, capsys):
        code, out = run_cli(capsys, "cylinder", "--degree", "2", "--angle", "0")
        assert code == 0
        res = json.loads(out)["results"]
        assert res["period"] == 1
        assert abs(res["heights"]["l"]) < 1e-4
        assert abs(res["heights"]["u"]) < 1e-4


class TestRender:
    def test_render_writes_ppm_and_report(self, tmp_path, capsys):
        out_path = tmp_path / "img.ppm"
        code, out = run_cli(
            capsys, "render", "multicorn", "--degree", "2",
            "--center=-0.3,0", "--width", "4.4", "--px", "48x32",
            "--iter", "60", "--out", str(out_path),
        )
        assert code == 0
        assert json.loads(out)["results"]["pixels"] == [48, 32]
        data = out_path.read_bytes()
        assert data.startswith(b"P6\n48 32\n")

    def test_overlay_file(self, tmp_path, capsys):
        trace_path = tmp_path / "trace.json"
        run_cli(capsys, "trace", "--kind", "param", "--degree", "2",
                "--angle", "0", "--rmin", "1.001", "--out", str(trace_path))
        payload = json.loads(trace_path.read_text())["results"]
        trace_path.write_text(json.dumps(payload))
        out_path = tmp_path / "img.ppm"
        code, _ = run_cli(
            capsys, "render", "multicorn", "--degree", "2",
            "--center=-0.3,0", "--width", "4.4", "--px", "48x48",
            "--iter", "60", "--overlay", str(trace_path),
            "--out", str(out_path),
        )
        assert code == 0 and out_path.exists()


class TestSelftest:
    def test_selftest_passes(self, capsys):
        code, out = run_cli(capsys, "selftest")
        assert code == 0
        res = json.loads(out)["results"]
        assert res["failures"] == 0
        assert res["elapsed_seconds"] < 60
