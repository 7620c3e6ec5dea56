"""
Moments ``R(t^m, x)`` of the Lupaş operators and of their difference
``L_{n,q} = R_{n,q} - R_{inf,q}``.

Three independent routes are provided so that they can be played against
each other: closed forms (``m <= 3``), the recurrences in ``m`` that shift
the evaluation point through ``v(q, x)``, and brute-force summation over
the basis.
"""

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .functions import linear, monomial
from .operators import (
    DEFAULT_TOL,
    OperatorKind,
    eval_difference,
    eval_operator,
    v_transform,
)
from .qcalc import as_q, q_integer

__all__ = [
    "Route",
    "MomentResult",
    "moment_closed",
    "moment_recurrence",
    "moment_bruteforce",
    "l_operator",
    "l_recurrence",
    "central_moment_l",
    "l_scale",
    "k1_ratio",
]


class Route(enum.Enum):
    CLOSED_FORM = "closed"
    RECURRENCE = "recurrence"
    BRUTE_FORCE = "bruteforce"


@dataclass(frozen=True)
class MomentResult:
    operator: OperatorKind
    m: int
    q: float
    n: float
    x: float
    value: float
    route: Route

    def __float__(self):
        return self.value


def _power(m):
    if m == 0:
        return linear(0.0, 1.0, id="const")
    return monomial(m)


def _check_m(m):
    if isinstance(m, bool) or int(m) != m or m < 0:
        raise ValueError(f"moment order must be a non-negative integer, got {m!r}")
    return int(m)


def _sub_critical(q, what):
    q = as_q(q)
    if q >= 1.0:
        raise ValueError(f"{what} needs 0 < q < 1, got q={q}")
    return q


def _lupas_closed(q, n, m, x):
    if m == 0:
        return 1.0
    if m == 1:
        return x
    v = v_transform(q, x)
    N = q_integer(q, n)
    if m == 2:
        return x * v + x * (1.0 - v) / N
    v2 = v_transform(q * q, x)
    N1 = q_integer(q, n - 1)
    N2 = q_integer(q, n - 2) if n >= 2 else 0.0
    return x * v + x * (1.0 - v) / N ** 2 - N1 * N2 * q * q / N ** 2 * x * (1.0 - v) * v2


def _limit_closed(q, m, x):
    if m == 0:
        return 1.0
    if m == 1:
        return x
    v = v_transform(q, x)
    if m == 2:
        return x - q * x * (1.0 - v)
    v2 = v_transform(q * q, x)
    return x * v + (1.0 - q) ** 2 * x * (1.0 - v) - q * q * x * (1.0 - v) * v2


def moment_closed(operator, q, n, m, x) -> MomentResult:
    """
    Closed-form moment of order ``m <= 3``.

    The Lupaş forms hold for every ``q > 0``; the limit operator needs
    ``q < 1``.  The Phillips operator (``q <= 1``) is covered up to ``m = 2``
    where ``B(t^2, x) = x^2 + x(1-x)/[n]``.
    """
    kind = OperatorKind(operator)
    m = _check_m(m)
    q = as_q(q)
    x = float(x)
    if m > 3:
        raise ValueError("closed forms exist only for m <= 3; use moment_recurrence")
    if kind is OperatorKind.LIMIT:
        _sub_critical(q, "the limit operator")
        value = _limit_closed(q, m, x)
        n = math.inf
    elif kind is OperatorKind.PHILLIPS:
        if q > 1.0:
            raise ValueError("the Phillips operator is only evaluated for 0 < q <= 1")
        if m > 2:
            raise ValueError("Phillips moments are provided only up to m = 2")
        value = [1.0, x, x * x + x * (1.0 - x) / q_integer(q, n)][m]
    else:
        if kind is OperatorKind.BERNSTEIN:
            q = 1.0
        value = _lupas_closed(q, n, m, x)
    return MomentResult(kind, m, q, n, x, float(value), Route.CLOSED_FORM)


def moment_recurrence(operator, q, n, m, x) -> MomentResult:
    """
    Moment of any order through the recurrences

        R_n(t^{m+1}, x)   = R_n(t^m, x)   - (1-x) ([n-1]/[n])^m R_{n-1}(t^m, v)
        R_inf(t^{m+1}, x) = R_inf(t^m, x) - (1-x) R_inf(t^m, v)

    with ``v = v(q, x)``.  After ``d`` shifts the point is ``v(q^d, x)`` and
    the degree ``n - d``; results are cached on ``(d, m)`` for this call only.
    The chain grounds itself at degree 1, where ``[0]^m = 0`` removes the
    shifted term.
    """
    kind = OperatorKind(operator)
    m = _check_m(m)
    q = as_q(q)
    x = float(x)
    value = _recurrence(kind, q, n, m, x)
    return MomentResult(kind, m, q, math.inf if kind is OperatorKind.LIMIT else int(n), x, float(value),
                        Route.RECURRENCE)


def _recurrence(kind, q, n, m, x):
    # x may be an array: every step is elementwise
    if kind not in (OperatorKind.LUPAS, OperatorKind.LIMIT):
        raise ValueError("recurrences are available for the Lupaş and limit operators")
    if kind is OperatorKind.LIMIT:
        _sub_critical(q, "the limit operator")
    else:
        n = int(n)
        if n < 1:
            raise ValueError("n must be a positive integer")
        ints = [q_integer(q, j) for j in range(n + 1)]

    points = [x]

    def point(d):
        while len(points) <= d:
            points.append(v_transform(q ** len(points), x))
        return points[d]

    @lru_cache(maxsize=None)
    def rec(d, order):
        if order == 0:
            return 1.0
        j = order - 1
        xd = point(d)
        if kind is OperatorKind.LIMIT:
            return rec(d, j) - (1.0 - xd) * rec(d + 1, j)
        deg = n - d
        ratio = (ints[deg - 1] / ints[deg]) ** j
        if ratio == 0.0:
            return rec(d, j)
        return rec(d, j) - (1.0 - xd) * ratio * rec(d + 1, j)

    return rec(0, m) + 0.0 * np.asarray(x)


def moment_bruteforce(operator, q, n, m, x, tol=DEFAULT_TOL) -> MomentResult:
    """Direct summation of ``node**m * weight`` over the operator basis."""
    kind = OperatorKind(operator)
    m = _check_m(m)
    value = eval_operator(kind, q, n, _power(m), float(x), tol)
    if kind is OperatorKind.LIMIT:
        n = math.inf
    return MomentResult(kind, m, as_q(q), n, float(x), float(value), Route.BRUTE_FORCE)


# -- the difference operator L_{n,q} -----------------------------------------

def _points(x):
    x = np.asarray(x, dtype=float)
    return x if x.ndim else float(x)


def l_scale(q, n, x, power=1):
    """``q**n / [n]**power * x * (1 - v(q, x))``, the common factor of the L-moments."""
    q = as_q(q)
    x = _points(x)
    return q ** n / q_integer(q, n) ** power * x * (1.0 - v_transform(q, x))


def l_operator(m, q, n, x):
    """
    ``L_{n,q}(t^m, x)`` for ``0 < q < 1``.

    ``m = 2, 3`` use the closed forms; ``m = 4`` has no closed form and is
    the numerical difference of the two operators, evaluated without
    cancellation by :func:`eval_difference`.  ``m = 0, 1`` give 0.
    ``x`` may be an array.
    """
    q = _sub_critical(q, "L_{n,q}")
    m = _check_m(m)
    n = int(n)
    x = _points(x)
    if m <= 1:
        return 0.0 * x
    if m == 2:
        return l_scale(q, n, x)
    if m == 3:
        v2 = v_transform(q * q, x)
        N = q_integer(q, n)
        bracket = 2.0 - q ** n + q_integer(q, n - 1) * (1.0 + q) * v2 + N * q * v2
        return l_scale(q, n, x, power=2) * bracket
    if m == 4:
        return eval_difference(q, n, monomial(4), x)
    raise ValueError("l_operator covers m <= 4")


def l_recurrence(m, q, n, x):
    """
    ``L_{n,q}(t^m, x)`` built only from the recurrence

        L_n(t^{m+1}, x) = L_n(t^m, x) + (1-x) [ (1 - a^m) R_inf(t^m, v)
                                               - a^m L_{n-1}(t^m, v) ],

    ``a = [n-1]/[n]``, with ``1 - a^m`` formed from ``1 - a = q^(n-1)/[n]``.
    """
    q = _sub_critical(q, "L_{n,q}")
    m = _check_m(m)
    n = int(n)
    x = float(x)
    ints = [q_integer(q, j) for j in range(n + 1)]
    points = [x]

    def point(d):
        while len(points) <= d:
            points.append(v_transform(q ** len(points), x))
        return points[d]

    @lru_cache(maxsize=None)
    def r_inf(d, order):
        if order == 0:
            return 1.0
        return r_inf(d, order - 1) - (1.0 - point(d)) * r_inf(d + 1, order - 1)

    @lru_cache(maxsize=None)
    def lrec(d, order):
        if order <= 1:
            return 0.0
        j = order - 1
        deg = n - d
        a = ints[deg - 1] / ints[deg]
        one_minus_a = q ** (deg - 1) / ints[deg]
        one_minus_aj = one_minus_a * sum(a ** i for i in range(j))
        shifted = a ** j * lrec(d + 1, j) if deg > 1 else 0.0
        return lrec(d, j) + (1.0 - point(d)) * (one_minus_aj * r_inf(d + 1, j) - shifted)

    return float(lrec(0, m))


def central_moment_l(r, q, n, x):
    """
    ``L_{n,q}((t - x)^r, x)`` for ``r = 2, 3, 4``.

    Since ``L`` kills constants and linear functions,
    ``L((t-x)^3) = L(t^3) - 3x L(t^2)`` and
    ``L((t-x)^4) = L(t^4) - 4x L((t-x)^3) - 6x^2 L((t-x)^2)``.
    """
    q = _sub_critical(q, "L_{n,q}")
    x = _points(x)
    if r == 2:
        return l_scale(q, n, x)
    if r == 3:
        v2 = v_transform(q * q, x)
        N = q_integer(q, n)
        bracket = (2.0 - q ** n + q_integer(q, n - 1) * (1.0 + q) * v2
                   + N * q * v2 - 3.0 * N * x)
        return l_scale(q, n, x, power=2) * bracket
    if r == 4:
        return (l_operator(4, q, n, x) - 4.0 * x * central_moment_l(3, q, n, x)
                - 6.0 * x * x * central_moment_l(2, q, n, x))
    raise ValueError("central moments are provided for r = 2, 3, 4")


def k1_ratio(q, n, x):
    """``L((t-x)^4, x) / (q^n/[n]^2 x (1 - v))``; undefined at x = 0, 1."""
    return central_moment_l(4, q, n, x) / l_scale(q, n, x, power=2)
