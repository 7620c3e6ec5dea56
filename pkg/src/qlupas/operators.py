"""
Lupaş q-Bernstein operators, their limit operator, and the Phillips and
classical Bernstein operators used for comparison.

Basis weights for ``0 < q < 1`` come from the product representation

    b_nk(q; x) = [n k] * prod_{j<k} v(q^j, x) * prod_{k<=i<n} (1 - v(q^i, x))

where every factor lies in [0, 1].  For ``q > 1`` the q-binomial grows like
``q**(k(n-k))`` while the products shrink at the same rate, so the same
representation is evaluated in the log domain.  ``q == 1`` is the classical
binomial distribution.

The limit operator lives on nodes ``1 - q**k`` with weights
``b_inf_k``, generated from ``b_inf_0`` by the exact ratio
``b_inf_{k+1} / b_inf_k = q**k * y / (1 - q**(k+1))``, ``y = x / (1 - x)``.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .functions import TestFunction, reflect
from .qcalc import as_q, q_binomial_row, q_integers

__all__ = [
    "OperatorKind",
    "BasisRow",
    "v_transform",
    "lupas_nodes",
    "lupas_weights",
    "lupas_weights_rational",
    "basis_lupas",
    "limit_weights",
    "basis_limit",
    "phillips_weights",
    "eval_lupas",
    "eval_limit",
    "eval_phillips",
    "eval_bernstein",
    "eval_supercritical",
    "eval_operator",
    "eval_difference",
    "basis_gap",
    "reflect",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-13
# relative size below which a factor 1 + q**j * y is treated as exactly 1
_PRODUCT_CUTOFF = 1e-17
# above this degree the sub-critical basis is assembled in logarithms
_LOG_DEGREE = 300


class OperatorKind(enum.Enum):
    LUPAS = "lupas"
    LIMIT = "limit"
    PHILLIPS = "phillips"
    BERNSTEIN = "bernstein"


@dataclass(frozen=True)
class BasisRow:
    """Weights and nodes of one operator at one point.

    ``n`` is ``math.inf`` for the limit operator, whose series is cut
    after the last kept weight; ``truncation_error_bound`` bounds the
    dropped probability mass.
    """

    n: float
    q: float
    x: float
    weights: np.ndarray
    nodes: np.ndarray
    truncation_error_bound: float = 0.0

    def __post_init__(self):
        for name in ("weights", "nodes"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def total(self) -> float:
        return float(np.sum(self.weights))

    def apply(self, f) -> float:
        return float(np.dot(f(self.nodes), self.weights))


def _check_x(x, upper_open=False):
    x = float(x)
    if not (0.0 <= x <= 1.0) or (upper_open and x == 1.0):
        bound = "[0, 1)" if upper_open else "[0, 1]"
        raise ValueError(f"x must lie in {bound}, got {x!r}")
    return x


def _check_n(n):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return int(n)


def v_transform(q_power, x):
    """``q_power * x / (1 - x + q_power * x)``, monotone from [0, 1] onto [0, 1]."""
    q_power = np.asarray(q_power, dtype=float)
    x = np.asarray(x, dtype=float)
    den = 1.0 - x + q_power * x
    if np.any(den <= 0.0):
        raise ValueError("v_transform needs q_power > 0 and 0 <= x <= 1")
    out = q_power * x / den
    return out if out.ndim else float(out)


def lupas_nodes(q, n) -> np.ndarray:
    """Nodes ``[k]/[n]``, ``k = 0..n``; exact 0 and 1 at the ends."""
    q = as_q(q)
    n = _check_n(n)
    if q <= 1.0:
        ints = q_integers(q, n)
        return ints / ints[n]
    # [k]_q / [n]_q = p**(n-k) [k]_p / [n]_p with p = 1/q, free of overflow
    p = 1.0 / q
    ints = q_integers(p, n)
    k = np.arange(n + 1)
    return p ** (n - k) * ints / ints[n]


# -- finite-degree Lupaş weights -------------------------------------------

def _weights_sub(q, n, x):
    """Product form for 0 < q < 1, vectorised over a 1-d array ``x``."""
    qj = q ** np.arange(n)
    xc = x[:, None]
    den = 1.0 - xc + qj * xc
    v = qj * xc / den
    w = (1.0 - xc) / den
    if n > _LOG_DEGREE:
        # the middle q-binomials leave the double range; work in logs
        with np.errstate(divide="ignore"):
            log_v, log_w = np.log(v), np.log(w)
        zeros = np.zeros((x.size, 1))
        head = np.concatenate([zeros, np.cumsum(log_v, axis=1)], axis=1)
        tail = np.concatenate([np.cumsum(log_w[:, ::-1], axis=1)[:, ::-1], zeros], axis=1)
        return np.exp(q_binomial_row(q, n, log=True)[None, :] + head + tail)
    ones = np.ones((x.size, 1))
    head = np.concatenate([ones, np.cumprod(v, axis=1)], axis=1)
    tail = np.concatenate([np.cumprod(w[:, ::-1], axis=1)[:, ::-1], ones], axis=1)
    return q_binomial_row(q, n)[None, :] * head * tail


def _weights_super(q, n, x):
    """Log-domain product form for q > 1 at interior points."""
    lq = math.log(q)
    j = np.arange(n)
    xc = x[:, None]
    # t_j = (1 - x) / (q**j x) so that v = 1/(1 + t) and 1 - v = t/(1 + t)
    log_t = np.log1p(-xc) - np.log(xc) - j * lq
    log1p_t = np.logaddexp(0.0, log_t)
    log_v = -log1p_t
    log_w = log_t - log1p_t
    zeros = np.zeros((x.size, 1))
    head = np.concatenate([zeros, np.cumsum(log_v, axis=1)], axis=1)
    tail = np.concatenate([np.cumsum(log_w[:, ::-1], axis=1)[:, ::-1], zeros], axis=1)
    return np.exp(q_binomial_row(q, n, log=True)[None, :] + head + tail)


def lupas_weights(q, n, x) -> np.ndarray:
    """
    Lupaş basis ``b_n0(q; x), ..., b_nn(q; x)``.

    For array ``x`` the result has shape ``x.shape + (n + 1,)``.  At
    ``x = 0`` and ``x = 1`` the row is an exact unit vector.
    """
    q = as_q(q)
    n = _check_n(n)
    xa = np.asarray(x, dtype=float)
    flat = xa.reshape(-1)
    if np.any((flat < 0.0) | (flat > 1.0)):
        raise ValueError("x must lie in [0, 1]")
    if q == 1.0:
        out = binom.pmf(np.arange(n + 1)[None, :], n, flat[:, None])
    else:
        out = np.zeros((flat.size, n + 1))
        inner = (flat > 0.0) & (flat < 1.0)
        out[flat == 0.0, 0] = 1.0
        out[flat == 1.0, n] = 1.0
        if np.any(inner):
            weights = _weights_sub if q < 1.0 else _weights_super
            out[inner] = weights(q, n, flat[inner])
    return out.reshape(xa.shape + (n + 1,))


def lupas_weights_rational(q, n, x) -> np.ndarray:
    """
    Reference evaluation of the basis from its rational form

        [n k] q**(k(k-1)/2) x**k (1-x)**(n-k) / prod_{j=1}^{n-1} (1 - x + q**j x),

    carried out in logarithms.  Slower and less accurate than
    :func:`lupas_weights`; kept as an independent cross-check.
    """
    q = as_q(q)
    n = _check_n(n)
    x = _check_x(x)
    out = np.zeros(n + 1)
    if x == 0.0:
        out[0] = 1.0
        return out
    if x == 1.0:
        out[n] = 1.0
        return out
    k = np.arange(n + 1)
    j = np.arange(1, n)
    log_den = math.fsum(np.log1p(x * np.expm1(j * math.log(q))))
    logs = (
        q_binomial_row(q, n, log=True)
        + 0.5 * k * (k - 1) * math.log(q)
        + k * math.log(x)
        + (n - k) * math.log1p(-x)
        - log_den
    )
    return np.exp(logs)


def basis_lupas(q, n, x) -> BasisRow:
    q = as_q(q)
    n = _check_n(n)
    x = _check_x(x)
    return BasisRow(n=n, q=q, x=x, weights=lupas_weights(q, n, x), nodes=lupas_nodes(q, n))


# -- limit operator ----------------------------------------------------------

def _log_b_inf0(q, y):
    """``log prod_{j>=0} 1/(1 + q**j y)``, cut once ``q**j y < 1e-17``."""
    if y == 0.0:
        return 0.0
    lq = math.log(q)
    jmax = max(0, math.ceil((math.log(_PRODUCT_CUTOFF) - math.log(y)) / lq))
    u = y * q ** np.arange(jmax + 1)
    return -math.fsum(np.log1p(u))


def _limit_log_weights(q, x, k0=0, log_start=None):
    """
    ``log b_inf_k`` for ``k = k0, k0+1, ...`` until the weights underflow.

    ``log_start`` is ``log b_inf_{k0}``; it defaults to the k0 = 0 product.
    """
    y = x / (1.0 - x)
    lq = math.log(q)
    ly = math.log(y)
    if log_start is None:
        if k0 != 0:
            raise ValueError("log_start is required when k0 > 0")
        log_start = _log_b_inf0(q, y)
    chunks = [np.array([log_start])]
    last = log_start
    k = k0
    while True:
        ks = np.arange(k, k + 256)
        steps = ks * lq + ly - np.log1p(-q ** (ks + 1))
        logs = last + np.cumsum(steps)
        chunks.append(logs)
        last = logs[-1]
        k += 256
        # weights decrease for good once the step is negative
        if steps[-1] < 0.0 and last < -750.0:
            break
    logs = np.concatenate(chunks)
    kept = np.nonzero(logs >= -750.0)[0]
    return logs[:kept[-1] + 1] if kept.size else logs[:1]


def limit_weights(q, x) -> np.ndarray:
    """
    The limit weights ``b_inf_k(q; x)`` up to the point where they
    underflow (no tolerance-based cut).  Requires ``0 < q < 1``,
    ``0 <= x < 1``.
    """
    q = as_q(q)
    if q >= 1.0:
        raise ValueError(f"the limit operator needs 0 < q < 1, got q={q}")
    x = _check_x(x, upper_open=True)
    if x == 0.0:
        return np.array([1.0])
    return np.exp(_limit_log_weights(q, x))


def basis_limit(q, x, tol=DEFAULT_TOL) -> BasisRow:
    """
    Limit weights ``b_inf_0..b_inf_K``, with ``K`` the first index at which
    the kept mass reaches ``1 - tol``.

    The weights are a probability distribution, so the dropped tail is at
    most ``1 - sum(kept)``, reported as ``truncation_error_bound``.
    """
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    w = limit_weights(q, x)
    q = as_q(q)
    x = float(x)
    cum = np.cumsum(w)
    hit = np.nonzero(cum >= 1.0 - tol)[0]
    K = int(hit[0]) if hit.size else w.size - 1
    w = w[:K + 1]
    nodes = -np.expm1(np.arange(K + 1) * math.log(q))
    bound = max(0.0, 1.0 - float(cum[K]))
    return BasisRow(n=math.inf, q=q, x=x, weights=w, nodes=nodes, truncation_error_bound=bound)


# -- Phillips and classical Bernstein -----------------------------------------

def phillips_weights(q, n, x) -> np.ndarray:
    """``[n k] x**k prod_{s=0}^{n-k-1} (1 - q**s x)`` for ``0 < q <= 1``."""
    q = as_q(q)
    n = _check_n(n)
    if q > 1.0:
        raise ValueError("Phillips weights are only used for 0 < q <= 1")
    x = _check_x(x)
    k = np.arange(n + 1)
    factors = 1.0 - q ** np.arange(n) * x
    prefix = np.concatenate(([1.0], np.cumprod(factors)))
    return q_binomial_row(q, n) * x ** k * prefix[n - k]


def eval_lupas(q, n, f, x):
    """
    ``R_{n,q}(f, x) = sum_k f([k]/[n]) b_nk(q; x)`` for any ``q > 0``.

    ``x`` may be a scalar or an array.  End points are reproduced exactly.
    """
    q = as_q(q)
    n = _check_n(n)
    w = lupas_weights(q, n, x)
    out = w @ np.asarray(f(lupas_nodes(q, n)), dtype=float)
    return float(out) if np.ndim(out) == 0 else out


def _eval_limit_scalar(q, f, x, tol):
    f1 = float(f(np.array(1.0)))
    if x == 1.0:
        return f1
    if x == 0.0:
        return float(f(np.array(0.0)))
    row = basis_limit(q, x, tol)
    # centred on f(1): the dropped tail and the rounding of sum(w) then only
    # multiply the small increments f(1 - q^k) - f(1)
    k = np.arange(row.weights.size)
    if isinstance(f, TestFunction):
        incs = f.diff(np.ones(k.size), -(q ** k))
    else:
        incs = np.asarray(f(row.nodes), dtype=float) - f1
    return f1 + float(incs @ row.weights)


def eval_limit(q, f, x, tol=DEFAULT_TOL):
    """
    ``R_{inf,q}(f, x)`` for ``0 < q < 1``: the series over nodes
    ``1 - q**k`` for ``x < 1`` and ``f(1)`` at ``x = 1``.  The truncation
    error is at most ``max|f| * tol``.
    """
    q = as_q(q)
    if q >= 1.0:
        raise ValueError(f"the limit operator needs 0 < q < 1, got q={q}")
    xa = np.asarray(x, dtype=float)
    if xa.ndim == 0:
        return _eval_limit_scalar(q, f, _check_x(xa), tol)
    return np.array([_eval_limit_scalar(q, f, _check_x(xi), tol) for xi in xa.ravel()]).reshape(xa.shape)


def eval_phillips(q, n, f, x):
    q = as_q(q)
    n = _check_n(n)
    if q > 1.0:
        raise ValueError("the Phillips operator is only evaluated for 0 < q <= 1")
    if q == 1.0:
        return eval_bernstein(n, f, x)
    values = np.asarray(f(lupas_nodes(q, n)), dtype=float)
    xa = np.asarray(x, dtype=float)
    if xa.ndim == 0:
        return float(phillips_weights(q, n, xa) @ values)
    return np.array([phillips_weights(q, n, xi) @ values for xi in xa.ravel()]).reshape(xa.shape)


def eval_bernstein(n, f, x):
    """Classical Bernstein polynomial of degree ``n``."""
    return eval_lupas(1.0, n, f, x)


def eval_supercritical(q, n, f, x, tol=DEFAULT_TOL):
    """
    ``R_{n,q}(f, x)`` for ``q > 1`` through ``R_{n,1/q}(g, 1 - x)`` with
    ``g(t) = f(1 - t)``.  ``n = math.inf`` gives the limit operator.
    """
    q = as_q(q)
    if q <= 1.0:
        raise ValueError(f"eval_supercritical needs q > 1, got q={q}")
    g = reflect(f) if isinstance(f, TestFunction) else (lambda t: f(1.0 - np.asarray(t)))
    y = 1.0 - np.asarray(x, dtype=float)
    if n == math.inf:
        return eval_limit(1.0 / q, g, y, tol)
    return eval_lupas(1.0 / q, n, g, y)


def eval_operator(kind, q, n, f, x, tol=DEFAULT_TOL):
    """Dispatch on :class:`OperatorKind`; the limit operator for ``q > 1``
    goes through the reflection identity."""
    kind = OperatorKind(kind)
    if kind is OperatorKind.LUPAS:
        return eval_lupas(q, n, f, x)
    if kind is OperatorKind.LIMIT:
        if as_q(q) > 1.0:
            return eval_supercritical(q, math.inf, f, x, tol)
        return eval_limit(q, f, x, tol)
    if kind is OperatorKind.PHILLIPS:
        return eval_phillips(q, n, f, x)
    return eval_bernstein(n, f, x)


# -- cancellation-free difference R_n - R_inf ----------------------------------

def _gap_terms(q, n, x):
    """
    Pieces of ``b_nk - b_inf_k`` for ``0 < q < 1`` and interior points
    ``x`` (1-d array), one row per point.

    With ``C_k = 1/prod_{j=1..k}(1 - q**j)``, ``P_k = prod_{j<k} v_j`` and
    ``S_k = prod_{k<=i<n} (1 - v_i)`` one has

        b_nk   = C_k P_k S_k (1 - A_k),   A_k = 1 - prod_{j=n-k+1..n} (1 - q**j)
        b_inf_k = C_k P_k S_k (1 - B),     B  = 1 - prod_{i>=n} (1 - v_i)

    so ``b_nk / b_inf_k = exp(log(1 - A_k) - log(1 - B))`` and the gap is
    ``b_inf_k`` times an ``expm1`` of a difference of log-sums, accurate
    relative to its own size.

    Returns ``(b_n, b_inf, gap, log_b_inf_n)``; the first three have shape
    ``(len(x), n + 1)``.
    """
    lq = math.log(q)
    y = x / (1.0 - x)
    # log(1 - v_i) = -log1p(y q**i); keep terms down to y q**i ~ e**-40
    extra = max(1, math.ceil((math.log(float(y.max())) + 40.0) / -lq) + 1)
    u = y[:, None] * q ** np.arange(n + extra)
    v = u[:, :n] / (1.0 + u[:, :n])
    w = 1.0 / (1.0 + u[:, :n])

    qj = q ** np.arange(1, n + 1)  # j = 1..n
    c = np.concatenate(([1.0], np.cumprod(1.0 / (1.0 - qj))))
    ones = np.ones((x.size, 1))
    p = np.concatenate([ones, np.cumprod(v, axis=1)], axis=1)
    s = np.concatenate([np.cumprod(w[:, ::-1], axis=1)[:, ::-1], ones], axis=1)
    # sum_{j=n-k+1}^{n} log(1 - q**j), k = 0..n
    a_sum = np.concatenate(([0.0], np.cumsum(np.log1p(-qj)[::-1])))
    b_sum = -np.array([math.fsum(row) for row in np.log1p(u[:, n:])])

    base = c[None, :] * p * s
    b_inf = base * np.exp(b_sum)[:, None]
    b_n = base * np.exp(a_sum)[None, :]
    # b_nk / b_inf_k = exp(a_sum - b_sum); past a ratio of e plain subtraction is safe
    log_ratio = a_sum[None, :] - b_sum[:, None]
    with np.errstate(over="ignore", invalid="ignore"):
        gap = np.where(log_ratio < 1.0, b_inf * np.expm1(np.minimum(log_ratio, 1.0)), b_n - b_inf)
    with np.errstate(divide="ignore"):
        log_b_inf_n = np.log(base[:, n]) + b_sum
    return b_n, b_inf, gap, log_b_inf_n


def basis_gap(q, n, x):
    """
    ``(b_nk, b_inf_k, b_nk - b_inf_k)`` for ``k = 0..n`` with the difference
    accurate relative to its own size.  ``0 < q < 1``, ``0 <= x < 1``.
    """
    q = as_q(q)
    n = _check_n(n)
    if q >= 1.0:
        raise ValueError("basis_gap needs 0 < q < 1")
    x = _check_x(x, upper_open=True)
    if x == 0.0:
        unit = np.zeros(n + 1)
        unit[0] = 1.0
        return unit, unit.copy(), np.zeros(n + 1)
    b_n, b_inf, gap, _ = _gap_terms(q, n, np.array([x]))
    return b_n[0], b_inf[0], gap[0]


def _tail_logs(q, n, x, log_start):
    """``log b_inf_k`` for ``k = n+1 .. n+T``, one row per point, with ``T``
    grown until every row has fallen below ``exp(-750)`` for good."""
    lq = math.log(q)
    ly = np.log(x / (1.0 - x))
    T = 64
    while True:
        k = np.arange(n, n + T)
        steps = k * lq + ly[:, None] - np.log1p(-q ** (k + 1))
        logs = log_start[:, None] + np.cumsum(steps, axis=1)
        if np.all((steps[:, -1] < 0.0) & (logs[:, -1] < -750.0)):
            return k + 1, logs
        T *= 2


def _difference_interior(q, n, f, x):
    k = np.arange(n + 1)
    one_minus_qk = -np.expm1(k * math.log(q))
    ints = q_integers(q, n)
    shift = q ** n * ints / ints[n]  # [k]/[n] - (1 - q**k)
    head_inc = f.diff(one_minus_qk, shift)
    node_inc = f.diff(np.ones(n + 1), -(q ** k))
    b_n, _, gap, log_b_inf_n = _gap_terms(q, n, x)
    kt, tail_logs = _tail_logs(q, n, x, log_b_inf_n)
    tail_inc = f.diff(np.ones(kt.size), -(q ** kt))
    with np.errstate(under="ignore"):
        tail = np.exp(tail_logs) @ tail_inc
    return b_n @ head_inc + gap @ node_inc - tail


def eval_difference(q, n, f: TestFunction, x):
    """
    ``R_{n,q}(f, x) - R_{inf,q}(f, x)`` arranged so that no two nearly equal
    quantities are subtracted:

        sum_{k<=n} [f([k]/[n]) - f(1-q^k)] b_nk
      + sum_{k<=n} [f(1-q^k) - f(1)] (b_nk - b_inf_k)
      - sum_{k>n}  [f(1-q^k) - f(1)] b_inf_k

    Each bracket goes through ``f.diff`` and the weight gaps through
    :func:`basis_gap`, so the result keeps its relative accuracy even when
    it is far below machine epsilon.  ``q > 1`` is reduced by reflection.
    """
    q = as_q(q)
    n = _check_n(n)
    if q == 1.0:
        raise ValueError("the limit operator is undefined at q = 1")
    if not isinstance(f, TestFunction):
        raise TypeError("eval_difference needs a TestFunction (for its increment)")
    xa = np.asarray(x, dtype=float)
    if q > 1.0:
        q, f, xa = 1.0 / q, reflect(f), 1.0 - xa
    flat = xa.reshape(-1)
    if np.any((flat < 0.0) | (flat > 1.0)):
        raise ValueError("x must lie in [0, 1]")
    out = np.zeros(flat.size)
    inner = (flat > 0.0) & (flat < 1.0)
    # both operators reproduce affine functions, which have omega_2 = 0
    affine = f.omega2 is not None and float(f.omega2(0.5)) == 0.0
    if np.any(inner) and not affine:
        out[inner] = _difference_interior(q, n, f, flat[inner])
    return float(out[0]) if xa.ndim == 0 else out.reshape(xa.shape)
