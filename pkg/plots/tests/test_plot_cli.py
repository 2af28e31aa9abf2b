"""Exit-code and flag contract of the rcm-plot command."""

from rcmplot.cli import main

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    text = capsys.readouterr().out
    for flag in ("--summary", "--raw", "--kind", "--out", "--log-x"):
        assert flag in text


def test_unknown_flag_is_usage_error(capsys):
    assert main(["--summary", "s.json", "--out", "x.png", "--sepia"]) == 2


def test_missing_required_flag_is_usage_error():
    assert main(["--out", "x.png"]) == 2


def test_success_writes_png(make_files, tmp_path, capsys):
    summary, raw = make_files()
    out = tmp_path / "fig.png"
    assert main(["--summary", summary, "--raw", raw, "--kind", "threshold_sweep",
                 "--out", str(out), "--log-x"]) == 0
    assert out.read_bytes().startswith(PNG_MAGIC)


def test_histogram_without_raw_names_the_flag(make_files, tmp_path, capsys):
    summary, _ = make_files()
    code = main(["--summary", summary, "--kind", "histogram",
                 "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "--raw" in capsys.readouterr().err


def test_unwritable_out_names_the_flag(make_files, tmp_path, capsys):
    summary, raw = make_files()
    code = main(["--summary", summary, "--raw", raw,
                 "--out", str(tmp_path / "missing" / "x.png")])
    assert code == 2
    assert "--out" in capsys.readouterr().err


def test_schema_mismatch_exits_two(make_files, tmp_path, capsys):
    summary, raw = make_files()
    text = open(raw).read().replace("statistic,n,replication,value",
                                    "statistic,n,rep,value")
    bad = tmp_path / "bad.csv"
    bad.write_text(text)
    code = main(["--summary", summary, "--raw", str(bad), "--kind", "histogram",
                 "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert "'rep'" in capsys.readouterr().err


def test_malformed_row_exits_two_with_line(make_files, tmp_path, capsys):
    summary, raw = make_files(ns=(100.0,), reps=3)
    lines = open(raw).read().splitlines()
    lines[2] = "isolated_mean,100.0,1"
    bad = tmp_path / "rows.csv"
    bad.write_text("\n".join(lines) + "\n")
    code = main(["--summary", summary, "--raw", str(bad), "--kind", "histogram",
                 "--out", str(tmp_path / "x.png")])
    assert code == 2
    assert f"{bad}:3" in capsys.readouterr().err


def test_missing_input_file_exits_two(tmp_path, capsys):
    code = main(["--summary", str(tmp_path / "ghost.json"),
                 "--out", str(tmp_path / "x.png")])
    assert code == 2
