import numpy as np
import pytest

from qlupas.moments import (
    Route,
    central_moment_l,
    k1_ratio,
    l_operator,
    l_recurrence,
    moment_bruteforce,
    moment_closed,
    moment_recurrence,
)
from qlupas.operators import OperatorKind

X = np.linspace(0.0, 63 / 64, 17)


def test_closed_examples():
    r = moment_closed("lupas", 0.5, 2, 2, 0.5)
    assert r.value == pytest.approx(7 / 18, abs=1e-16)
    assert r.route is Route.CLOSED_FORM and r.operator is OperatorKind.LUPAS
    assert moment_closed("limit", 0.5, None, 3, 0.5).value == pytest.approx(7 / 30, abs=1e-16)
    for kind in ("lupas", "limit"):
        assert moment_closed(kind, 0.3, 5, 1, 0.37).value == 0.37
        assert moment_closed(kind, 0.3, 5, 0, 0.37).value == 1.0


def test_closed_domain():
    with pytest.raises(ValueError):
        moment_closed("lupas", 0.5, 4, 4, 0.5)
    with pytest.raises(ValueError):
        moment_closed("limit", 1.5, None, 2, 0.5)
    with pytest.raises(ValueError):
        moment_closed("lupas", 0.5, 4, -1, 0.5)


def test_closed_phillips_and_bernstein():
    assert moment_closed("phillips", 0.5, 3, 2, 0.5).value == pytest.approx(0.25 + 0.25 / 1.75)
    assert moment_closed("bernstein", 0.5, 4, 2, 0.5).value == pytest.approx(0.25 + 0.25 / 4)


def test_recurrence_examples():
    r = moment_recurrence("lupas", 0.5, 2, 3, 0.5)
    assert r.value == pytest.approx(17 / 54, abs=1e-13)
    assert r.route is Route.RECURRENCE
    assert moment_recurrence("lupas", 0.7, 6, 1, 0.3).value == pytest.approx(0.3, abs=1e-16)
    assert moment_recurrence("limit", 0.5, None, 2, 0.5).value == pytest.approx(1 / 3, abs=1e-15)
    with pytest.raises(ValueError):
        moment_recurrence("phillips", 0.5, 3, 2, 0.5)


def test_recurrence_beyond_degree():
    # m > n: the chain stops by itself at degree 1
    for m in range(1, 7):
        a = moment_recurrence("lupas", 0.5, 2, m, 0.3).value
        b = moment_bruteforce("lupas", 0.5, 2, m, 0.3).value
        assert a == pytest.approx(b, abs=1e-14)


def test_bruteforce_examples():
    assert moment_bruteforce("lupas", 0.5, 2, 2, 0.5).value == pytest.approx(7 / 18, abs=1e-16)
    assert moment_bruteforce("lupas", 2.0, 7, 0, 0.4).value == pytest.approx(1.0, abs=1e-15)
    r = moment_bruteforce("limit", 0.5, None, 2, 0.5, tol=1e-13)
    assert r.value == pytest.approx(1 / 3, abs=1e-13)
    assert r.n == float("inf")


@pytest.mark.parametrize("q", [0.3, 0.5, 0.9, 2.0])
def test_routes_agree(q):
    for n in (1, 2, 3, 7, 16):
        for m in range(5):
            for x in X:
                brute = moment_bruteforce("lupas", q, n, m, x).value
                assert moment_recurrence("lupas", q, n, m, x).value == pytest.approx(brute, abs=1e-11)
                if m <= 3:
                    assert moment_closed("lupas", q, n, m, x).value == pytest.approx(brute, abs=1e-11)


def test_l_operator_examples():
    assert l_operator(2, 0.5, 2, 0.5) == pytest.approx(1 / 18, abs=1e-16)
    assert l_operator(3, 0.5, 2, 0.5) == pytest.approx(11 / 135, abs=1e-16)
    assert l_operator(2, 0.3, 5, 0.0) == 0.0
    assert l_operator(1, 0.3, 5, 0.4) == 0.0
    with pytest.raises(ValueError):
        l_operator(2, 1.0, 5, 0.4)


def test_l_operator_against_brute_force():
    for m in (2, 3, 4):
        for x in (0.1, 0.5, 0.9):
            direct = (moment_bruteforce("lupas", 0.5, 5, m, x).value
                      - moment_bruteforce("limit", 0.5, None, m, x).value)
            assert l_operator(m, 0.5, 5, x) == pytest.approx(direct, abs=1e-13)


def test_l_operator_arrays():
    np.testing.assert_allclose(l_operator(3, 0.5, 6, X), [l_operator(3, 0.5, 6, float(x)) for x in X])


@pytest.mark.parametrize("m", [2, 3, 4])
def test_r3_recurrence(m):
    for q in (0.3, 0.5, 0.9):
        for n in (1, 2, 8, 20):
            for x in X:
                direct = l_operator(m, q, n, x)
                assert l_recurrence(m, q, n, x) == pytest.approx(direct, abs=1e-11)


def test_central_examples():
    assert central_moment_l(2, 0.5, 2, 0.5) == pytest.approx(1 / 18, abs=1e-16)
    # 11/135 - 3 * 0.5 * 1/18 = 44/540 - 45/540
    assert central_moment_l(3, 0.5, 2, 0.5) == pytest.approx(-1 / 540, abs=1e-16)
    assert central_moment_l(2, 0.5, 6, 1.0) == 0.0
    with pytest.raises(ValueError):
        central_moment_l(5, 0.5, 2, 0.5)


def test_fourth_central_moment_against_expansion():
    from qlupas.functions import REGISTRY
    from qlupas.operators import eval_difference, eval_limit, eval_lupas
    for x in (0.2, 0.5, 0.8):
        def g(t, x=x):
            return (np.asarray(t) - x) ** 4
        direct = eval_lupas(0.5, 6, g, x) - eval_limit(0.5, g, x)
        assert central_moment_l(4, 0.5, 6, x) == pytest.approx(direct, abs=1e-13)


def test_k1_ratio_bounded():
    for q in (0.3, 0.9):
        r = [k1_ratio(q, n, X[1:]) for n in (1, 4, 16, 32)]
        assert np.all(np.isfinite(r)) and np.max(r) < 10
