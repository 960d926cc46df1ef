import subprocess
import sys

import pytest

from protosas.cli import run_command
from protosas.protograph import ar4ja, designed, format_base


@pytest.fixture
def bases(tmp_path):
    d = tmp_path / "designed.txt"
    d.write_text(format_base(*designed()))
    a = tmp_path / "ar4ja.txt"
    a.write_text(format_base(*ar4ja()))
    r = tmp_path / "r36.txt"
    r.write_text("1 2\n3 3\n")
    c = tmp_path / "cycle.txt"
    c.write_text("1 2\n2 2\n")
    return {"designed": d, "ar4ja": a, "r36": r, "cycle": c}


def run(argv, capsys):
    code = run_command(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def body(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def test_pdf_example_row(capsys):
    code, out, _ = run(["pdf", "--alpha", "1.0", "--gamma", "1.0", "--min", "0", "--max", "0"], capsys)
    assert code == 0
    assert body(out) == ["x,pdf", "0,0.31831"]
    assert out.startswith("# protosas ")
    assert "# seed: 0" in out


def test_rate_command(bases, capsys):
    code, out, _ = run(["rate", "--base", str(bases["designed"])], capsys)
    assert code == 0
    assert body(out)[1] == "4,7,6,1/2,0.5"


def test_llr_command(capsys):
    code, out, _ = run(["llr", "--alpha", "1.0", "--gamma", "1.0", "--min", "1", "--max", "1"], capsys)
    assert code == 0 and body(out) == ["y,llr", "1,1.60944"]


def test_usage_errors_exit_two(bases, capsys):
    assert run(["pdf"], capsys)[0] == 2
    assert run(["pdf", "--alpha", "2.5"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2
    assert run(["lift", "--base", str(bases["designed"])], capsys)[0] == 2
    assert run(["threshold", "--base", str(bases["r36"]), "--window", "3,1"], capsys)[0] == 2


def test_computation_errors_exit_one(bases, tmp_path, capsys):
    code, _, err = run(["lift", "--base", str(bases["designed"]), "--factor", "250"], capsys)
    assert code == 1 and "nearest valid" in err
    code, _, err = run(["rate", "--base", str(tmp_path / "missing.txt")], capsys)
    assert code == 1
    bad = tmp_path / "bad.txt"
    bad.write_text("2 2\n1 1\n1 q\n")
    code, _, err = run(["rate", "--base", str(bad)], capsys)
    assert code == 1 and "line 3" in err
    code, _, err = run(["threshold-awgn", "--base", str(bases["r36"]), "--window=-1,0.5"], capsys)
    assert code == 1 and "no convergence" in err


def test_search_plain_and_count(tmp_path, capsys):
    code, out, _ = run(["search", "--shape", "2x3", "--plain", "--count", "--limit", "2"], capsys)
    assert code == 0
    lines = body(out)
    assert lines == ["index,entries,rate", "0,0 0 0;2 2 2,1/2", "1,0 0 1;2 2 1,1/2"]
    # six admissible columns over {0,1,2} with sums in [2,7]
    assert "# total=216" in out


def test_lift_writes_alist(bases, tmp_path, capsys):
    out_file = tmp_path / "code.alist"
    code, out, _ = run(["lift", "--base", str(bases["ar4ja"]), "--factor", "8", "--out", str(out_file)], capsys)
    assert code == 0 and out == ""
    text = out_file.read_text()
    assert "# lift_factor 8" in text and "# punctured 8 9 10 11 12 13 14 15" in text


def test_awd_cycle_code_reports_none(bases, capsys):
    code, out, _ = run(["awd", "--base", str(bases["cycle"]), "--grid", "0.01"], capsys)
    assert code == 0 and out.rstrip().endswith("delta2c,none")


@pytest.mark.parametrize(
    "argv",
    [
        ["exit-curve", "--alpha", "1.5", "--ebn0", "1.0", "--samples", "2000", "--grid", "0.25"],
        ["threshold", "--alpha", "1.6", "--samples", "2000", "--window", "1.5,3.5", "--res", "0.1"],
        ["ber", "--alpha", "1.5", "--ebn0", "2.0,3.0", "--factor", "24", "--max-errors", "5"],
    ],
)
def test_byte_identical_across_threads(bases, tmp_path, argv):
    if argv[0] in ("threshold", "ber"):
        argv = argv + ["--base", str(bases["ar4ja"] if argv[0] == "ber" else bases["r36"])]
    outs = []
    for k, threads in enumerate(["1", "3", "1"]):
        f = tmp_path / f"out{k}.csv"
        assert run_command(argv + ["--seed", "7", "--threads", threads, "--out", str(f)]) == 0
        outs.append(f.read_bytes())
    assert outs[0] == outs[1] == outs[2]


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "protosas", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("protosas ")
