"""
q-integers, q-factorials and q-binomial coefficients.

All routines accept either a :class:`QParam` or a bare positive float for
``q``.  Evaluation is in double precision and stays finite for every
``q > 0`` as long as the result itself is representable; the ``log_*``
variants cover the cases where it is not.
"""

import enum
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Regime",
    "QParam",
    "as_q",
    "q_integer",
    "q_integers",
    "log_q_integers",
    "q_factorial",
    "log_q_factorial",
    "q_binomial",
    "log_q_binomial",
    "q_binomial_row",
]

# below this distance from 1 the closed form (1 - q**n)/(1 - q) is avoided
_NEAR_ONE = 1e-8


class Regime(enum.Enum):
    SUB_CRITICAL = "q<1"
    CLASSICAL = "q=1"
    SUPER_CRITICAL = "q>1"


@dataclass(frozen=True)
class QParam:
    """Validated deformation parameter ``q > 0``."""

    q: float

    def __post_init__(self):
        q = self.q
        if isinstance(q, QParam):
            q = q.q
        try:
            q = float(q)
        except (TypeError, ValueError):
            raise ValueError(f"q must be a real number, got {self.q!r}") from None
        if not math.isfinite(q) or q <= 0.0:
            raise ValueError(f"q must be finite and positive, got {q!r}")
        object.__setattr__(self, "q", q)

    def regime(self) -> Regime:
        if self.q < 1.0:
            return Regime.SUB_CRITICAL
        if self.q > 1.0:
            return Regime.SUPER_CRITICAL
        return Regime.CLASSICAL

    def inverse(self) -> "QParam":
        return QParam(1.0 / self.q)

    def __float__(self):
        return self.q


def as_q(q) -> float:
    """Return ``q`` as a validated float."""
    if isinstance(q, QParam):
        return q.q
    return QParam(q).q


def _check_index(n, name="n"):
    if isinstance(n, bool) or int(n) != n or n < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {n!r}")
    return int(n)


def q_integer(q, n) -> float:
    """
    The q-integer ``[n] = 1 + q + ... + q**(n-1)``, with ``[0] = 0``.

    For ``q == 1`` the result is exactly ``n``.  Near the classical value
    the geometric sum is added up term by term; elsewhere the closed form
    is evaluated through ``expm1`` so that ``1 - q**n`` keeps its relative
    accuracy.
    """
    q = as_q(q)
    n = _check_index(n)
    if n == 0:
        return 0.0
    if q == 1.0:
        return float(n)
    if abs(1.0 - q) < _NEAR_ONE:
        s = 0.0
        for _ in range(n):
            s = 1.0 + q * s
        return s
    lq = n * math.log(q)
    if abs(lq) > 1.0:
        # q**n is far from 1: pow is accurate to an ulp and nothing cancels,
        # while expm1 would inherit the rounding of n * log(q)
        return (q ** n - 1.0) / (q - 1.0)
    return math.expm1(lq) / (q - 1.0)


def q_integers(q, nmax) -> np.ndarray:
    """Array ``[[0], [1], ..., [nmax]]``."""
    q = as_q(q)
    nmax = _check_index(nmax, "nmax")
    k = np.arange(nmax + 1, dtype=float)
    if q == 1.0:
        return k
    if abs(1.0 - q) < _NEAR_ONE:
        return np.array([q_integer(q, j) for j in range(nmax + 1)])
    lq = k * math.log(q)
    with np.errstate(over="ignore"):
        far = (q ** k - 1.0) / (q - 1.0)
    return np.where(np.abs(lq) > 1.0, far, np.expm1(lq) / (q - 1.0))


def log_q_integers(q, nmax) -> np.ndarray:
    """``log([k])`` for ``k = 0..nmax`` without overflow (``-inf`` at 0)."""
    q = as_q(q)
    nmax = _check_index(nmax, "nmax")
    k = np.arange(nmax + 1, dtype=float)
    with np.errstate(divide="ignore"):
        if q <= 1.0 or abs(1.0 - q) < _NEAR_ONE:
            return np.log(q_integers(q, nmax))
        # [k] = q**(k-1) [k]_{1/q} keeps everything below 1 in the log
        lq = math.log(q)
        out = k * lq + np.log(-np.expm1(-k * lq)) - math.log(q - 1.0)
    out[0] = -np.inf
    return out


def q_factorial(q, n) -> float:
    """
    ``[n]! = [1][2]...[n]``, ``[0]! = 1``.

    Raises
    ------
    OverflowError
        If the product leaves the double range; use
        :func:`log_q_factorial` instead.
    """
    n = _check_index(n)
    ints = q_integers(q, n)
    out = 1.0
    for j in range(1, n + 1):
        out *= float(ints[j])
    if not math.isfinite(out):
        raise OverflowError(f"[{n}]! overflows double precision for q={as_q(q)}")
    return float(out)


def log_q_factorial(q, n) -> float:
    n = _check_index(n)
    return float(math.fsum(log_q_integers(q, n)[1:]))


def q_binomial(q, n, k) -> float:
    """
    Gaussian binomial coefficient ``[n]! / ([k]! [n-k]!)``.

    Built as the ratio product ``prod_{j=1..k} [n-k+j]/[j]`` over the
    shorter side, so the two symmetric columns give identical results.
    For ``n > 300`` the product is accumulated in the log domain.
    """
    q = as_q(q)
    n = _check_index(n)
    if isinstance(k, bool) or int(k) != k or k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k!r}")
    k = int(k)
    k = min(k, n - k)
    if k == 0:
        return 1.0
    if q == 1.0:
        return float(math.comb(n, k))
    if n > 300:
        return math.exp(log_q_binomial(q, n, k))
    ints = q_integers(q, n)
    out = 1.0
    for j in range(1, k + 1):
        out *= ints[n - k + j] / ints[j]
    if not math.isfinite(out):
        raise OverflowError(f"q-binomial ({n} {k}) overflows for q={q}")
    return float(out)


def log_q_binomial(q, n, k) -> float:
    n = _check_index(n)
    if isinstance(k, bool) or int(k) != k or k < 0 or k > n:
        raise ValueError(f"need 0 <= k <= n, got n={n}, k={k!r}")
    k = min(int(k), n - int(k))
    logs = log_q_integers(q, n)
    return float(math.fsum(logs[n - k + 1:n + 1]) - math.fsum(logs[1:k + 1]))


def q_binomial_row(q, n, log=False) -> np.ndarray:
    """
    All coefficients ``(n 0), ..., (n n)`` at once.

    With ``log=True`` the natural logarithms are returned, which is the
    only safe option for ``q > 1`` and moderate ``n`` since the middle
    coefficients grow like ``q**(n*n/4)``.
    """
    q = as_q(q)
    n = _check_index(n)
    if log:
        logs = log_q_integers(q, n)
        steps = logs[n:0:-1] - logs[1:]  # log([n-k+1]/[k]), k = 1..n
        half = np.concatenate(([0.0], np.cumsum(steps[:n // 2])))
        # mirror the first half so the row is exactly symmetric
        return np.concatenate((half, half[:n + 1 - half.size][::-1]))
    if q == 1.0:
        return np.array([float(math.comb(n, k)) for k in range(n + 1)])
    ints = q_integers(q, n)
    ratios = ints[n:0:-1] / ints[1:]
    row = np.concatenate(([1.0], np.cumprod(ratios)))
    # symmetrise so that column k and n-k come from the same product
    half = (n + 1) // 2
    row[n - half + 1:] = row[:half][::-1]
    return row
