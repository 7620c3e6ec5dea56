"""
Acceptance suite: one test per criterion, each logging a single verdict
line (collected in the terminal summary).  Tolerances are the contract
values; nothing here is loosened to make a line pass.
"""

import csv
import io
import struct

import numpy as np
import pytest

import qlupas.moments as moments_module
from qlupas.cli import TABLE_HEADER, VORONOVSKAJA_HEADER, main
from qlupas.moments import l_operator, moment_closed, moment_recurrence
from qlupas.verify import (
    CSV_HEADER,
    build_suite,
    check_basis_difference_bound,
    check_convex_monotonicity,
    check_moment_routes,
    check_partition_of_unity,
    check_second_moment_sandwich,
    check_symmetry_reduction,
    check_t2_identity,
    check_uniform_q_bound,
    check_voronovskaja,
    classical_limit_errors,
    run_checks,
    voronovskaja_residual,
)
from qlupas.functions import REGISTRY


def _summary(reports):
    bad = [r.line() for r in reports if not r.passed]
    worst = min(r.worst_slack for r in reports if r.kind == "inequality") if any(
        r.kind == "inequality" for r in reports) else None
    detail = f"{len(reports)} checks"
    if worst is not None:
        detail += f", worst inequality slack {worst:.3g}"
    return not bad, detail + ("" if not bad else "; failing: " + " | ".join(bad))


@pytest.mark.criterion(1, "partition of unity, positivity")
def test_criterion_01(accept):
    r = check_partition_of_unity()
    ok = accept(r.passed, f"max|sum-1|={r.worst_slack:.2e}, min weight={r.empirical_constants['min_weight']:.2e}")
    assert ok, r.line()


@pytest.mark.criterion(2, "moment oracle agreement")
def test_criterion_02(accept):
    r = check_moment_routes()
    spots = {
        "R2(t^2)": (moment_closed("lupas", 0.5, 2, 2, 0.5).value, 7 / 18),
        "R2(t^3)": (moment_closed("lupas", 0.5, 2, 3, 0.5).value, 17 / 54),
        "R2(t^3) rec": (moment_recurrence("lupas", 0.5, 2, 3, 0.5).value, 17 / 54),
        "Rinf(t^2)": (moment_closed("limit", 0.5, None, 2, 0.5).value, 1 / 3),
        "Rinf(t^3)": (moment_closed("limit", 0.5, None, 3, 0.5).value, 7 / 30),
        "L2(t^2)": (l_operator(2, 0.5, 2, 0.5), 1 / 18),
        "L2(t^3)": (l_operator(3, 0.5, 2, 0.5), 11 / 135),
    }
    spot_err = max(abs(a - b) for a, b in spots.values())
    ok = accept(r.passed and spot_err <= 1e-12,
                f"route discrepancy {r.worst_slack:.2e} (tol 1e-11), spot error {spot_err:.2e}")
    assert ok


@pytest.mark.criterion(3, "exact t^2 identity, both regimes")
def test_criterion_03(accept):
    r = check_t2_identity()
    ok = accept(r.passed, f"max discrepancy {r.worst_slack:.2e} (tol 1e-12)")
    assert ok, r.line()


@pytest.mark.criterion(4, "rate bound, mirror and intervals")
def test_criterion_04(accept):
    reports = run_checks(build_suite("rate"))
    ok, detail = _summary(reports)
    assert accept(ok, detail), detail


@pytest.mark.criterion(5, "second-moment sandwich")
def test_criterion_05(accept):
    a = check_second_moment_sandwich()
    b = check_uniform_q_bound()
    ok = accept(a.passed and b.passed,
                f"sandwich slack {a.worst_slack:.2e}, uniform-q slack {b.worst_slack:.2e}")
    assert ok


@pytest.mark.criterion(6, "symmetry reduction")
def test_criterion_06(accept):
    r = check_symmetry_reduction()
    ok = accept(r.passed, f"max discrepancy {r.worst_slack:.2e} (tol 1e-12)")
    assert ok, r.line()


@pytest.mark.criterion(7, "convex monotonicity chain")
def test_criterion_07(accept):
    reports = run_checks(build_suite("convex"))
    ok, detail = _summary(reports)
    assert accept(ok, detail), detail


@pytest.mark.criterion(8, "basis-difference bound")
def test_criterion_08(accept):
    r = check_basis_difference_bound(qs=(0.5, 0.9), ns=range(1, 33), x_max=0.95)
    ok = accept(r.passed, f"worst slack {r.worst_slack:.2e}")
    assert ok, r.line()


@pytest.mark.criterion(9, "quantitative Voronovskaja")
def test_criterion_09(accept):
    sub = check_voronovskaja()
    sup = check_voronovskaja(qs=(10 / 3, 2.0, 10 / 9))
    res, _ = voronovskaja_residual(0.5, "cubic", 2, 0.5)
    spot = abs(res - 1 / 90)
    c = sub.empirical_constants
    ok = accept(sub.passed and sup.passed and spot <= 1e-12 and np.isfinite(c["K"]),
                f"K={c['K']:.4f} refined={c['K_refined']:.4f} drift={c['drift']:.1%}, "
                f"residual(t^3) error {spot:.1e}")
    assert ok


@pytest.mark.criterion(10, "classical limit, q_n = 1 - 1/n")
def test_criterion_10(accept):
    parts, ok = [], True
    for name in ("quad", "cubic", "exp"):
        e128, e512 = classical_limit_errors(name, "1-1/n", ns=(128, 512))
        ok = ok and e512 <= 0.5 * e128
        parts.append(f"{name}: E128={e128:.4f} E512={e512:.4f}")
    assert accept(ok, "; ".join(parts)), "; ".join(parts)


@pytest.mark.criterion(11, "sharpness, omega_2 boundedness")
def test_criterion_11(accept):
    reports = run_checks(build_suite("omega2"))
    sharp = next(r for r in reports if r.check_id == "sharpness")
    ok, detail = _summary(reports)
    c = sharp.empirical_constants
    detail = f"t^2 ratio in [{c['ratio_min']:.3g}, {c['ratio_max']:.3g}]; " + detail
    assert accept(ok, detail), detail


@pytest.mark.criterion(12, "Phillips contrast")
def test_criterion_12(accept):
    reports = run_checks(build_suite("phillips"))
    half = next(r for r in reports if r.check_id == "phillips_contrast[q=0.5]")
    ok, detail = _summary(reports)
    detail = f"Lupas deviation {half.empirical_constants['lupas_deviation']:.3g} at q=0.5, n=4; " + detail
    assert accept(ok, detail), detail


def _flip_bit(value, bit):
    (raw,) = struct.unpack("<Q", struct.pack("<d", value))
    return struct.unpack("<d", struct.pack("<Q", raw ^ (1 << bit)))[0]


@pytest.fixture
def perturbed_second_moment(monkeypatch):
    """Flip one mantissa bit of the closed-form second moment."""
    original = moments_module._lupas_closed

    def flipped(q, n, m, x):
        value = original(q, n, m, x)
        return _flip_bit(value, 44) if m == 2 and value != 0.0 else value

    monkeypatch.setattr(moments_module, "_lupas_closed", flipped)


def _csv(capsys, argv):
    code = main(argv)
    return code, list(csv.reader(io.StringIO(capsys.readouterr().out)))


@pytest.mark.criterion(13, "CLI contract")
def test_criterion_13(accept, capsys, tmp_path, request):
    problems = []
    code, out = _csv(capsys, ["eval", "--q", "0.5", "--n", "2", "--fn", "quad", "--x", "0.5"])
    if code != 0 or out != [["0.38888888888888884"]]:
        problems.append("eval")
    code, out = _csv(capsys, ["table", "--q", "0.5", "--n", "1..10", "--fn", "quad"])
    if code != 0 or out[0] != TABLE_HEADER or len(out) != 11:
        problems.append("table schema")
    code, out = _csv(capsys, ["voronovskaja", "--fn", "cubic", "--q", "0.5"])
    if code != 0 or out[0] != VORONOVSKAJA_HEADER:
        problems.append("voronovskaja schema")
    report = tmp_path / "verify.csv"
    code = main(["verify", "--suite", "all", "--out", str(report)])
    capsys.readouterr()
    lines = list(csv.reader(report.open()))
    if code != 0 or lines[0] != CSV_HEADER:
        problems.append(f"verify all exit {code}")
    request.getfixturevalue("perturbed_second_moment")
    code = main(["verify", "--suite", "all"])
    text = capsys.readouterr().out
    if code != 1 or "moment_routes FAIL" not in text:
        problems.append(f"bit flip not detected (exit {code})")
    detail = "schemas ok, verify all exit 0, bit flip exit 1" if not problems else ", ".join(problems)
    assert accept(not problems, detail), detail
