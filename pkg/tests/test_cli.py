import json
import os

import pytest

from alphacf import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_basic(capsys):
    code, out, _ = run(["expand", "--x", "2/5", "--alpha", "1/2"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["digits"] == [[3, -1], [2, 1]]
    assert obj["terminated"] is True
    assert obj["x"] == "2/5"


def test_expand_normalizes_and_flags_reflection(capsys):
    code, out, _ = run(["expand", "--x", "7/10", "--alpha", "3/5"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["x"] == "3/10"
    assert obj["reflected"] is True
    assert obj["input"] == "7/10"


def test_expand_malformed_input_exit2(capsys):
    code, _, err = run(["expand", "--x", "(0+1*sqrt(5))/2-x", "--alpha", "1"],
                       capsys)
    assert code == 2
    assert "--x" in err


def test_eval_wilton_finite(capsys):
    code, out, _ = run(["eval", "--fn", "wilton-finite", "--x", "2/5"], capsys)
    assert code == 0
    value = float(out.splitlines()[0].split()[1])
    assert value == pytest.approx(0.639031859650177, abs=1e-12)


def test_eval_rational_series_exit3(capsys):
    code, _, err = run(["eval", "--fn", "brjuno", "--x", "2/5", "--alpha", "1"],
                       capsys)
    assert code == 3
    assert "finite" in err  # message points at the -finite variants


def test_eval_golden_brjuno(capsys):
    code, out, _ = run(["eval", "--fn", "brjuno", "--x", "(-1+1*sqrt(5))/2",
                        "--k", "1", "--alpha", "1"], capsys)
    assert code == 0
    value = float(out.splitlines()[0].split()[1])
    assert value == pytest.approx(1.2598289137944102, abs=1e-12)
    assert "rigorous true" in out


def test_eval_grid_csv(capsys):
    code, out, _ = run(["eval", "--fn", "wilton", "--alpha", "1",
                        "--grid", "0:1:8"], capsys)
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].split(",")[:5] == ["x", "value", "n_terms",
                                       "tail_estimate", "rigorous_tail"]
    assert "precision_bits" in lines[0]
    assert len(lines) == 9


def test_verify_single_suite(capsys):
    code, out, _ = run(["verify", "--suite", "ladders"], capsys)
    assert code == 0
    assert "[AC7] ladders: PASS" in out


def test_verify_unknown_suite_exit2(capsys):
    code, _, err = run(["verify", "--suite", "nope"], capsys)
    assert code == 2
    assert "nope" in err


def test_verify_report_deterministic(tmp_path, capsys):
    args = ["verify", "--suite", "modular", "--suite", "ladders",
            "--seed", "7"]
    r1 = tmp_path / "r1.json"
    r2 = tmp_path / "r2.json"
    assert cli.main(args + ["--report", str(r1)]) == 0
    assert cli.main(args + ["--report", str(r2)]) == 0
    capsys.readouterr()
    assert r1.read_bytes() == r2.read_bytes()


def test_scan_blowup_csv(tmp_path, capsys):
    out_file = tmp_path / "blowup.csv"
    code, _, _ = run(["scan", "--fn", "wilton", "--alpha", "1",
                      "--blowup", "16,64", "--points", "3000",
                      "--out", str(out_file)], capsys)
    assert code == 0
    lines = out_file.read_text().splitlines()
    assert lines[0].startswith("n,mean_plus,mean_minus,oscillation")
    assert len(lines) == 3
    assert lines[1].split(",")[0] == "16"


def test_scan_interval_json_no_verdict(capsys):
    code, out, _ = run(["scan", "--fn", "wilton", "--alpha", "9/10",
                        "--interval", "0:1", "--depth", "5",
                        "--leaf-samples", "8"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert "sup_estimate" in obj and "argmax" in obj
    assert "verdict" not in obj
    assert "evidence" in obj["note"]


def test_scan_jobs_deterministic(tmp_path, capsys):
    base = ["scan", "--fn", "wilton", "--alpha", "1", "--blowup", "8,16,32",
            "--points", "2000"]
    f1 = tmp_path / "a.csv"
    f2 = tmp_path / "b.csv"
    assert cli.main(base + ["--out", str(f1)]) == 0
    assert cli.main(base + ["--jobs", "3", "--out", str(f2)]) == 0
    capsys.readouterr()
    assert f1.read_bytes() == f2.read_bytes()


def test_compare_summary_zero_violations(capsys):
    code, out, _ = run(["compare", "--alpha", "3/5", "--samples", "15",
                        "--depth", "25", "--seed", "5"], capsys)
    assert code == 0
    obj = json.loads(out)
    assert obj["n_violations"] == 0
    assert obj["max_log_q_gap"] <= obj["log2_bound"]


def test_compare_alpha_above_g_exit3(capsys):
    code, _, err = run(["compare", "--alpha", "7/10", "--samples", "3",
                        "--depth", "10"], capsys)
    assert code == 3
    assert "OutOfRange" in err


def test_compare_dump_traces(tmp_path, capsys):
    dump = tmp_path / "trace.jsonl"
    code, _, _ = run(["compare", "--alpha", "3/5", "--samples", "3",
                      "--depth", "10", "--dump", str(dump)], capsys)
    assert code == 0
    lines = dump.read_text().splitlines()
    assert lines
    rec = json.loads(lines[0])
    assert {"j", "event", "q_half", "q_alpha"} <= set(rec)


def test_precision_env_and_flag_precedence(tmp_path, capsys, monkeypatch):
    conf = tmp_path / "alphacf.conf"
    conf.write_text("precision_bits = 128\nseed = 11\n")
    # config file applies
    args = ["verify", "--suite", "ladders", "--config", str(conf)]
    parser = cli.build_parser()
    cfg = cli.build_config(parser.parse_args(args))
    assert cfg.precision_bits == 128 and cfg.seed == 11
    # env overrides file
    monkeypatch.setenv(cli.PRECISION_ENV, "192")
    cfg = cli.build_config(parser.parse_args(args))
    assert cfg.precision_bits == 192
    # flag overrides env
    cfg = cli.build_config(parser.parse_args(args + ["--precision", "320"]))
    assert cfg.precision_bits == 320


def test_usage_error_on_bad_grid(capsys):
    code, _, err = run(["eval", "--fn", "wilton", "--grid", "zero-one"],
                       capsys)
    assert code == 2
    assert "--grid" in err
