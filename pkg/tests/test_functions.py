import numpy as np
import pytest
from hypothesis import given, strategies as st

from qlupas.functions import REGISTRY, get, linear, monomial, reflect
from qlupas.moduli import omega1

GRID = np.linspace(0.0, 1.0, 1001)


def test_registry_contents():
    assert {"linear", "quad", "cubic", "quartic", "exp", "sin", "abs", "abs3"} <= set(REGISTRY)
    assert REGISTRY["abs"].smoothness == "C0"
    assert REGISTRY["abs3"].smoothness == "C1"
    for key in ("quad", "cubic", "quartic", "exp", "sin"):
        assert REGISTRY[key].d2 is not None
        assert REGISTRY[key].smoothness == "C2"


def test_get_unknown():
    with pytest.raises(KeyError):
        get("nope")


def test_d2_requires_c2():
    from qlupas.functions import TestFunction
    with pytest.raises(ValueError):
        TestFunction("bad", np.sin, d2=np.sin, smoothness="C1")


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_finite_on_unit_interval(name):
    assert np.all(np.isfinite(REGISTRY[name](GRID)))


@pytest.mark.parametrize("name", ["quad", "cubic", "quartic", "exp", "sin", "abs3"])
def test_derivatives_by_finite_differences(name):
    f = REGISTRY[name]
    x = np.linspace(0.05, 0.95, 37)
    h = 1e-5
    np.testing.assert_allclose(f.d1(x), (f(x + h) - f(x - h)) / (2 * h), atol=1e-8)
    if f.d2 is not None:
        np.testing.assert_allclose(f.d2(x), (f.d1(x + h) - f.d1(x - h)) / (2 * h), atol=1e-7)


@pytest.mark.parametrize("name", sorted(REGISTRY))
@given(b=st.floats(0.0, 1.0), h=st.floats(-1.0, 1.0))
def test_increment_matches_difference(name, b, h):
    f = REGISTRY[name]
    if not 0.0 <= b + h <= 1.0:
        return
    ref = float(f(np.array(b + h)) - f(np.array(b)))
    assert float(f.diff(b, h)) == pytest.approx(ref, abs=1e-14)


def test_increment_keeps_small_steps():
    f = REGISTRY["cubic"]
    assert float(f.diff(1.0, -1e-12)) == pytest.approx(-3e-12, rel=1e-9)


def test_reflect_examples():
    g = reflect(linear())
    np.testing.assert_array_equal(g(GRID), 1.0 - GRID)
    assert float(reflect(REGISTRY["quad"])(np.array(0.25))) == 0.5625


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_reflect_involution(name):
    f = REGISTRY[name]
    assert reflect(reflect(f)) is f
    np.testing.assert_array_equal(reflect(reflect(f))(GRID), f(GRID))


def test_reflect_chain_rule():
    f = REGISTRY["exp"]
    g = reflect(f)
    x = np.linspace(0.0, 1.0, 11)
    np.testing.assert_array_equal(g.d1(x), -f.d1(1.0 - x))
    np.testing.assert_array_equal(g.d2(x), f.d2(1.0 - x))
    assert g.smoothness == f.smoothness


def _brute_omega2(f, t, points=4001, hs=400):
    best = 0.0
    for h in np.linspace(0.0, t, hs)[1:]:
        x = np.linspace(0.0, 1.0 - 2 * h, points)
        best = max(best, float(np.max(np.abs(f(x + 2 * h) - 2 * f(x + h) + f(x)))))
    return best


@pytest.mark.parametrize("name", ["quad", "cubic", "quartic", "exp", "sin", "abs", "abs3"])
@pytest.mark.parametrize("t", [0.01, 0.1, 0.25, 0.3, 0.5])
def test_analytic_omega2_against_brute_force(name, t):
    f = REGISTRY[name]
    assert float(f.omega2(t)) == pytest.approx(_brute_omega2(f, t), abs=1e-12)


@pytest.mark.parametrize("name", [k for k, f in REGISTRY.items() if f.omega is not None])
@pytest.mark.parametrize("t", [0.003, 0.1, 0.4, 0.9])
def test_analytic_omega_dominates_grid(name, t):
    f = REGISTRY[name]
    est = omega1(f, t, 4001).value
    assert est <= float(f.omega(t)) + 1e-14
    assert est >= float(f.omega(t)) - 2e-3


def test_monomial_guards():
    with pytest.raises(ValueError):
        monomial(0)
    assert monomial(1).id == "t"
