"""
Registry of test functions on [0, 1].

Besides values, each entry can carry analytic derivatives, analytic moduli
of continuity and an *increment* ``f(b + h) - f(b)`` evaluated without
cancellation.  The increment is what lets the operator difference
``R_n f - R_inf f`` be computed to full relative accuracy when it is far
below machine epsilon.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

__all__ = ["TestFunction", "linear", "monomial", "reflect", "REGISTRY", "get"]


@dataclass(frozen=True)
class TestFunction:
    """A named real function on [0, 1] with optional analytic extras.

    Attributes
    ----------
    id : str
        Registry name.
    f : callable
        Vectorised function values.
    d1, d2 : callable, optional
        Analytic first and second derivatives.
    smoothness : str
        One of ``"C0"``, ``"C1"``, ``"C2"``.
    convex : bool
        Whether ``f`` is convex on [0, 1].
    increment : callable, optional
        ``increment(b, h) == f(b + h) - f(b)`` computed without
        subtracting two nearly equal numbers.
    omega, omega2, omega_d2 : callable, optional
        Exact first modulus, second modulus, and first modulus of ``f''``.
    """

    id: str
    f: Callable
    d1: Optional[Callable] = None
    d2: Optional[Callable] = None
    smoothness: str = "C0"
    convex: bool = False
    increment: Optional[Callable] = field(default=None, repr=False)
    omega: Optional[Callable] = field(default=None, repr=False)
    omega2: Optional[Callable] = field(default=None, repr=False)
    omega_d2: Optional[Callable] = field(default=None, repr=False)
    mirror_of: Optional["TestFunction"] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.smoothness not in ("C0", "C1", "C2"):
            raise ValueError(f"unknown smoothness class {self.smoothness!r}")
        if self.d2 is not None and self.smoothness != "C2":
            raise ValueError("a second derivative requires smoothness class C2")

    def __call__(self, t):
        return self.f(t)

    def diff(self, b, h):
        """``f(b + h) - f(b)``."""
        if self.increment is not None:
            return self.increment(b, h)
        b = np.asarray(b, dtype=float)
        return self.f(b + h) - self.f(b)

    def sup_norm(self, grid_points=2001):
        t = np.linspace(0.0, 1.0, grid_points)
        return float(np.max(np.abs(self.f(t))))


def _const_like(t, c):
    return np.full_like(np.asarray(t, dtype=float), c, dtype=float)


def linear(a=1.0, b=0.0, id=None) -> TestFunction:
    """``t -> a*t + b``."""
    a = float(a)
    b = float(b)
    return TestFunction(
        id=id or ("linear" if (a, b) == (1.0, 0.0) else f"linear({a:g},{b:g})"),
        f=lambda t: a * np.asarray(t, dtype=float) + b,
        d1=lambda t: _const_like(t, a),
        d2=lambda t: _const_like(t, 0.0),
        smoothness="C2",
        convex=True,
        increment=lambda x, h: a * np.asarray(h, dtype=float) + 0.0 * np.asarray(x),
        omega=lambda s: abs(a) * np.minimum(s, 1.0),
        omega2=lambda s: 0.0 * np.asarray(s, dtype=float),
        omega_d2=lambda s: 0.0 * np.asarray(s, dtype=float),
    )


def _power_increment(m):
    coeffs = [math.comb(m, j) for j in range(m + 1)]

    def inc(b, h):
        b = np.asarray(b, dtype=float)
        h = np.asarray(h, dtype=float)
        out = 0.0
        for j in range(m, 0, -1):
            out = out + coeffs[j] * b ** (m - j) * h ** j
        return out

    return inc


def _one_minus_power(s, m):
    """``1 - (1 - s)**m`` without cancellation at small ``s``."""
    s = np.minimum(np.asarray(s, dtype=float), 1.0)
    with np.errstate(divide="ignore"):
        return -np.expm1(m * np.log1p(-s))


def _second_difference_power(s, m):
    """``1 - 2(1-s)**m + (1-2s)**m``, expanded so small ``s`` keeps its digits."""
    s = np.asarray(s, dtype=float)
    out = 0.0 * s
    for j in range(m, 1, -1):
        out = out + math.comb(m, j) * (-1.0) ** j * (2.0 ** j - 2.0) * s ** j
    return out


def monomial(m) -> TestFunction:
    """``t -> t**m`` for ``m >= 1``."""
    if m < 1:
        raise ValueError("use linear(0, 1) for constants")
    names = {1: "t", 2: "quad", 3: "cubic", 4: "quartic"}
    if m == 1:
        return linear(1.0, 0.0, id="t")
    if m == 2:
        omega_d2 = lambda s: 0.0 * np.asarray(s, dtype=float)
    else:
        # f'' = m(m-1) t**(m-2) is increasing, so its modulus is its drop at 1
        c = m * (m - 1)
        omega_d2 = lambda s: c * _one_minus_power(s, m - 2)
    # the second difference of t**m grows in both x and h, so the sup sits
    # at h = t, x = 1 - 2h
    omega2 = lambda s: _second_difference_power(np.minimum(s, 0.5), m)
    return TestFunction(
        id=names.get(m, f"t^{m}"),
        f=lambda t: np.asarray(t, dtype=float) ** m,
        d1=lambda t: m * np.asarray(t, dtype=float) ** (m - 1),
        d2=lambda t: m * (m - 1) * np.asarray(t, dtype=float) ** (m - 2),
        smoothness="C2",
        convex=True,
        increment=_power_increment(m),
        omega=lambda s: _one_minus_power(s, m),
        omega2=omega2,
        omega_d2=omega_d2,
    )


def _exp():
    e = math.e
    return TestFunction(
        id="exp",
        f=np.exp,
        d1=np.exp,
        d2=np.exp,
        smoothness="C2",
        convex=True,
        increment=lambda b, h: np.exp(b) * np.expm1(h),
        omega=lambda s: -e * np.expm1(-np.minimum(s, 1.0)),
        # e^x (e^h - 1)^2 peaks at x = 1 - 2h
        omega2=lambda s: e * np.expm1(-np.minimum(s, 0.5)) ** 2,
        omega_d2=lambda s: -e * np.expm1(-np.minimum(s, 1.0)),
    )


def _omega_sin(s):
    s = np.asarray(s, dtype=float)
    return np.where(s <= 0.5, np.sin(np.pi * np.minimum(s, 0.5)), 1.0)


def _sin():
    pi = math.pi
    return TestFunction(
        id="sin",
        f=lambda t: np.sin(pi * np.asarray(t, dtype=float)),
        d1=lambda t: pi * np.cos(pi * np.asarray(t, dtype=float)),
        d2=lambda t: -pi * pi * np.sin(pi * np.asarray(t, dtype=float)),
        smoothness="C2",
        increment=lambda b, h: 2.0 * np.cos(pi * (np.asarray(b) + 0.5 * np.asarray(h)))
        * np.sin(0.5 * pi * np.asarray(h)),
        omega=_omega_sin,
        # the second difference is -4 sin(pi (x + h)) sin(pi h / 2)**2
        omega2=lambda s: 4.0 * np.sin(0.5 * pi * np.minimum(s, 0.5)) ** 2,
        omega_d2=lambda s: pi * pi * _omega_sin(s),
    )


def _abs_increment(power):
    def inc(b, h):
        s = np.asarray(b, dtype=float) - 0.5
        h = np.asarray(h, dtype=float)
        s2 = s + h
        same = (s * s2) >= 0.0
        sign = np.where((s + s2) >= 0.0, 1.0, -1.0)
        if power == 1:
            near = sign * h
        else:
            near = sign * (3.0 * s * s * h + 3.0 * s * h * h + h ** 3)
        far = np.abs(s2) ** power - np.abs(s) ** power
        return np.where(same, near, far)

    return inc


def _abs():
    return TestFunction(
        id="abs",
        f=lambda t: np.abs(np.asarray(t, dtype=float) - 0.5),
        d1=lambda t: np.sign(np.asarray(t, dtype=float) - 0.5),
        smoothness="C0",
        convex=True,
        increment=_abs_increment(1),
        omega=lambda s: np.minimum(s, 0.5),
        omega2=lambda s: 2.0 * np.minimum(s, 0.5),
    )


def _abs3():
    return TestFunction(
        id="abs3",
        f=lambda t: np.abs(np.asarray(t, dtype=float) - 0.5) ** 3,
        d1=lambda t: 3.0 * (np.asarray(t, dtype=float) - 0.5)
        * np.abs(np.asarray(t, dtype=float) - 0.5),
        smoothness="C1",
        convex=True,
        increment=_abs_increment(3),
        omega=lambda s: 0.125 - (0.5 - np.minimum(s, 0.5)) ** 3,
        omega2=_omega2_abs3,
    )


def _omega2_abs3(s):
    # f'' = 6|t - 1/2| is convex, so the second difference is convex in x
    # and peaks at x = 0; it is nondecreasing in h
    h = np.minimum(np.asarray(s, dtype=float), 0.5)
    return np.where(h <= 0.25, 3.0 * h * h - 6.0 * h ** 3,
                    -0.25 + 3.0 * h - 9.0 * h * h + 10.0 * h ** 3)


def reflect(f: TestFunction) -> TestFunction:
    """
    The function ``g(x) = f(1 - x)``.

    Derivatives follow the chain rule, moduli are unchanged, and the
    increment is routed through ``f`` so it keeps full accuracy.  Reflecting
    twice hands back the original object.
    """
    if f.mirror_of is not None:
        return f.mirror_of
    d1 = None if f.d1 is None else (lambda t: -f.d1(1.0 - np.asarray(t, dtype=float)))
    d2 = None if f.d2 is None else (lambda t: f.d2(1.0 - np.asarray(t, dtype=float)))
    return replace(
        f,
        id=f"reflect({f.id})",
        mirror_of=f,
        f=lambda t: f.f(1.0 - np.asarray(t, dtype=float)),
        d1=d1,
        d2=d2,
        increment=lambda b, h: f.diff(1.0 - np.asarray(b, dtype=float), -np.asarray(h)),
    )


REGISTRY = {
    "linear": linear(),
    "const": linear(0.0, 1.0, id="const"),
    "quad": monomial(2),
    "cubic": monomial(3),
    "quartic": monomial(4),
    "exp": _exp(),
    "sin": _sin(),
    "abs": _abs(),
    "abs3": _abs3(),
}


def get(name: str) -> TestFunction:
    try:
        return REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown test function {name!r}; choose from {sorted(REGISTRY)}"
        ) from None
