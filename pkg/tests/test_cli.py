import csv
import json
from pathlib import Path

import pytest

from riemscatter.cli import dumps, emit_plot_data, main
from riemscatter.scattering import ScatteringReport

GOLDEN = Path(__file__).parent / "golden"


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_grunsky_identity_cap(tmp_path, capsys):
    cfg = write(tmp_path / "c.json", {"caps": [{"center": 0, "coeffs": [1.0]}]})
    assert main(["--config", cfg, "--command", "grunsky", "--out", str(tmp_path), "--grunsky-dump"]) == 0
    summary = json.loads((tmp_path / "grunsky.summary.json").read_text())
    assert summary["grunsky"]["spectral_norm"] == 0
    assert summary["grunsky"]["max_entry"] == 0
    assert (tmp_path / "grunsky.csv").exists()
    assert "PASS grunsky_inequality" in capsys.readouterr().out


def test_malformed_json_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text('{\n  "caps": [1,\n')
    assert main(["--config", str(p)]) == 2
    err = capsys.readouterr().err
    assert "line 3" in err and "column" in err


def test_unknown_flag_exit_2():
    with pytest.raises(SystemExit) as info:
        main(["--config", "x.json", "--command", "nope"])
    assert info.value.code == 2


def test_validation_failure_exit_3(tmp_path):
    cfg = write(tmp_path / "c.json", {"caps": [{"center": 0, "coeffs": [1.0, 0.8]}]})
    assert main(["--config", cfg, "--out", str(tmp_path)]) == 3


def test_bad_truncations_exit_2(tmp_path):
    cfg = write(tmp_path / "c.json", {"caps": [[0, [1.0]]]})
    assert main(["--config", cfg, "--truncations", "16,8"]) == 2


def test_gate_failure_names_check(tmp_path, capsys):
    write(tmp_path / "caps.json", {"caps": [{"center": 0, "coeffs": [1.0, 0.45]}]})
    cfg = write(tmp_path / "run.json", {
        "cap_spec": "caps.json", "command": "scatter", "truncations": [8, 16],
        "tolerances": {"unitarity": 1e-12},
    })
    assert main(["--config", cfg, "--out", str(tmp_path)]) == 1
    assert "unitarity_final" in capsys.readouterr().err


def test_report_matches_golden(tmp_path):
    args = ["--config", str(GOLDEN / "quadratic_0.3.json"), "--command", "report",
            "--out", str(tmp_path), "--golden", str(GOLDEN / "report_quadratic_0.3.json")]
    assert main(args) == 0
    report = json.loads((tmp_path / "report.json").read_text())
    hist = report["scattering"]["refinement_history"]
    assert [h["N"] for h in hist] == [8, 16, 24]
    assert all(b["defect"] < a["defect"] for a, b in zip(hist, hist[1:]))
    assert len(rows(tmp_path / "defect_ladder.csv")) == 4
    sv = [float(r[1]) for r in rows(tmp_path / "grunsky_singular_values.csv")[1:]]
    assert sv == sorted(sv, reverse=True)


def test_deterministic_output(tmp_path):
    cfg = write(tmp_path / "c.json", {"caps": [[0, [0.5]], [1.2, [0.4, 0.05]]]})
    outs = []
    for k in range(2):
        d = tmp_path / f"run{k}"
        assert main(["--config", cfg, "--command", "overfare", "--truncations", "6",
                     "--seed", "7", "--out", str(d)]) == 0
        outs.append((d / "overfare.summary.json").read_bytes())
    assert outs[0] == outs[1]


def test_hm_and_hbvp_commands(tmp_path):
    cfg = write(tmp_path / "c.json", {"caps": [[0, [0.25]], [0, [1.0], True]]})
    assert main(["--config", cfg, "--command", "hm", "--out", str(tmp_path)]) == 0
    assert rows(tmp_path / "period_matrix.csv")[0] == ["j", "k", "value"]
    delta = write(tmp_path / "delta.json", {"holo": [[1, 0]], "antiholo": []})
    assert main(["--config", cfg, "--command", "hbvp", "--truncations", "4",
                 "--delta", delta, "--out", str(tmp_path)]) == 1
    assert "gamma_ls" in json.loads((tmp_path / "hbvp_solution.json").read_text())


def test_empty_report_headers_only(tmp_path):
    emit_plot_data(None, tmp_path)
    assert rows(tmp_path / "defect_ladder.csv") == [["N", "unitarity_defect"]]
    assert rows(tmp_path / "boundary_spectrum.csv") == [["mode", "abs_c"]]
    assert rows(tmp_path / "grunsky_singular_values.csv") == [["index", "sigma"]]
    emit_plot_data(ScatteringReport(8, 0.0, []), tmp_path)
    assert len(rows(tmp_path / "defect_ladder.csv")) == 1


def test_float_format():
    assert dumps({"b": 0.1, "a": [1, True]}) == '{\n  "a": [1, true],\n  "b": 0.10000000000000001\n}\n'
