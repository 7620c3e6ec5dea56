import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from qlupas.cli import TABLE_HEADER, VORONOVSKAJA_HEADER, main
from qlupas.operators import v_transform
from qlupas.qcalc import q_integer
from qlupas.verify import CSV_HEADER, x_grid


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_eval_examples(capsys):
    code, out, _ = run(capsys, "eval", "--op", "lupas", "--q", "0.5", "--n", "2", "--fn", "quad", "--x", "0.5")
    assert code == 0 and out == "0.38888888888888884\n"
    code, out, _ = run(capsys, "eval", "--op", "limit", "--q", "0.5", "--fn", "quad", "--x", "0.5")
    assert code == 0 and float(out) == pytest.approx(1 / 3, abs=1e-13)
    code, out, _ = run(capsys, "eval", "--op", "lupas", "--q", "0.5", "--n", "7", "--fn", "linear", "--x", "0.25")
    assert code == 0 and out == "0.25\n"


def test_eval_other_operators(capsys):
    code, out, _ = run(capsys, "eval", "--op", "phillips", "--q", "0.5", "--n", "3", "--fn", "quad", "--x", "0.5")
    assert float(out) == pytest.approx(0.25 + 0.25 / 1.75, abs=1e-15)
    code, out, _ = run(capsys, "eval", "--op", "bernstein", "--q", "1", "--n", "2", "--fn", "quad", "--x", "0.5")
    assert float(out) == pytest.approx(0.375, abs=1e-16)


@pytest.mark.parametrize("argv, expected", [
    (["eval", "--op", "limit", "--q", "2", "--fn", "quad", "--x", "0.5"], 3),
    (["eval", "--op", "phillips", "--q", "2", "--n", "3", "--fn", "quad", "--x", "0.5"], 3),
    (["eval", "--op", "lupas", "--q", "-1", "--n", "2", "--fn", "quad", "--x", "0.5"], 2),
    (["eval", "--op", "lupas", "--q", "0.5", "--n", "0", "--fn", "quad", "--x", "0.5"], 2),
    (["eval", "--op", "lupas", "--q", "0.5", "--fn", "quad", "--x", "0.5"], 2),
    (["eval", "--op", "lupas", "--q", "0.5", "--n", "2", "--fn", "nope", "--x", "0.5"], 2),
    (["eval", "--op", "lupas", "--q", "0.5", "--n", "2", "--fn", "quad", "--x", "1.5"], 2),
    (["table", "--q", "1", "--fn", "quad"], 3),
    (["verify", "--suite", "nope"], 2),
    (["verify", "--suite", "moments", "--q", "1"], 3),
    (["voronovskaja", "--fn", "abs", "--q", "0.5"], 3),
    (["voronovskaja", "--fn", "quad"], 2),
    (["voronovskaja", "--fn", "quad", "--q", "1"], 3),
    (["frobnicate"], 2),
])
def test_exit_codes(capsys, argv, expected):
    assert main(argv) == expected


def test_unwritable_output(capsys, tmp_path):
    bad = str(tmp_path / "missing" / "t.csv")
    assert main(["table", "--q", "0.5", "--n", "1..3", "--fn", "quad", "--out", bad]) == 4
    assert main(["verify", "--suite", "phillips", "--out", bad]) == 4


def test_table_quad_matches_closed_form(capsys):
    code, out, _ = run(capsys, "table", "--q", "0.5", "--n", "1..10", "--fn", "quad")
    table = rows(out)
    assert code == 0 and table[0] == TABLE_HEADER and len(table) == 11
    x = x_grid(0.5)
    for row in table[1:]:
        n = int(row[0])
        ref = np.max(0.5 ** n / q_integer(0.5, n) * x * (1 - v_transform(0.5, x)))
        assert float(row[2]) == pytest.approx(ref, rel=1e-12)
        assert float(row[2]) <= float(row[3])
        assert 0.01 <= float(row[5]) <= 100


def test_table_linear_is_zero(capsys):
    _, out, _ = run(capsys, "table", "--q", "0.3", "--n", "1,2,5", "--fn", "linear")
    assert [float(r[2]) for r in rows(out)[1:]] == [0.0, 0.0, 0.0]


def test_table_mirrored(capsys):
    _, out, _ = run(capsys, "table", "--q", "2", "--n", "1:12", "--fn", "quad")
    errs = np.array([float(r[2]) for r in rows(out)[1:]])
    steps = errs[1:] / errs[:-1]
    assert np.all(steps < 1) and abs(steps[-1] - 0.5) < 0.01


def test_table_threads_identical(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["table", "--q", "0.9", "--n", "1..16", "--fn", "sin", "--threads", "1", "--out", str(a)]) == 0
    assert main(["table", "--q", "0.9", "--n", "1..16", "--fn", "sin", "--threads", "4", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_verify_moments_only(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "moments")
    lines = out.splitlines()
    assert code == 0
    assert [line.split()[0] for line in lines] == ["moment_routes", "moment_spot_values", "r3_recurrence"]
    assert all(" PASS worst_slack=" in line and " params=" in line for line in lines)


def test_verify_voronovskaja_reports_k(capsys, tmp_path):
    out_csv = tmp_path / "v.csv"
    code, out, _ = run(capsys, "verify", "--suite", "voronovskaja", "--q", "0.9", "--out", str(out_csv))
    assert code == 0 and "K:" in out
    table = rows(out_csv.read_text())
    assert table[0] == CSV_HEADER and {r[1] for r in table[1:]} == {"PASS"}


def test_voronovskaja_quad_exact(capsys):
    code, out, _ = run(capsys, "voronovskaja", "--fn", "quad", "--q", "0.5")
    table = rows(out)
    assert code == 0 and table[0] == VORONOVSKAJA_HEADER
    assert max(float(r[4]) for r in table[1:]) <= 1e-12


def test_voronovskaja_schedule_target(capsys):
    _, out, _ = run(capsys, "voronovskaja", "--fn", "cubic", "--schedule", "1-1/n", "--x", "0.5",
                    "--n", "8,64,512")
    assert [float(r[3]) for r in rows(out)[1:]] == [0.375, 0.375, 0.375]


def test_voronovskaja_linear(capsys):
    _, out, _ = run(capsys, "voronovskaja", "--fn", "linear", "--q", "2")
    assert max(abs(float(r[2])) for r in rows(out)[1:]) < 1e-13


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qlupas", "eval", "--q", "0.5", "--n", "2",
                           "--fn", "quad", "--x", "0.5"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "0.38888888888888884\n"
