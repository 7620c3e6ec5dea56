"""
Grid estimators for the modulus of continuity

    omega(f, t) = sup_{|x - y| <= t} |f(x) - f(y)|

and the second modulus of smoothness

    omega_2(f, t) = sup_{0 <= h <= t} sup_{0 <= x <= 1 - 2h} |f(x + 2h) - 2 f(x + h) + f(x)|.

A sup over finitely many points can only under-estimate, so every estimate
is flagged as a lower bound.  On a fixed uniform grid the admissible sets
are nested in ``t`` and the estimates are nondecreasing.

When a modulus enters the right-hand side of an inequality, use
:func:`modulus` / :func:`modulus2`: they return the analytic value when the
registry knows it and an inflated grid value otherwise.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ModulusEstimate",
    "omega1",
    "omega2",
    "omega2_at_scale",
    "analytic_omega1",
    "analytic_omega2",
    "modulus",
    "modulus2",
    "GRID_INFLATION",
]

DEFAULT_GRID = 2001
# safety factor applied to grid (lower-bound) estimates used in upper bounds
GRID_INFLATION = 1.01


@dataclass(frozen=True)
class ModulusEstimate:
    kind: str
    t: float
    value: float
    grid_points: int
    is_lower_bound: bool = True

    def __float__(self):
        return self.value


def _grid(grid_points, minimum):
    grid_points = int(grid_points)
    if grid_points < minimum:
        raise ValueError(f"need at least {minimum} grid points, got {grid_points}")
    return np.linspace(0.0, 1.0, grid_points), grid_points


def _steps(t, grid_points):
    # number of grid spacings that fit in t; the small slack keeps t = j/(N-1) exact
    return int(np.floor(t * (grid_points - 1) * (1.0 + 1e-12)))


def omega1(f, t, grid_points=DEFAULT_GRID) -> ModulusEstimate:
    """
    Sup of ``|f(x) - f(y)|`` over grid pairs with ``|x - y| <= t``.

    Parameters
    ----------
    f : callable
        Vectorised function on [0, 1].
    t : float
        Step, ``0 < t <= 1``.
    grid_points : int
        Size of the uniform grid (>= 2).
    """
    t = float(t)
    if not 0.0 < t <= 1.0:
        raise ValueError(f"omega1 needs 0 < t <= 1, got {t}")
    x, grid_points = _grid(grid_points, 2)
    vals = np.asarray(f(x), dtype=float)
    best = 0.0
    for s in range(1, _steps(t, grid_points) + 1):
        best = max(best, float(np.max(np.abs(vals[s:] - vals[:-s]))))
    return ModulusEstimate("omega1", t, best, grid_points)


def omega2(f, t, grid_points=DEFAULT_GRID) -> ModulusEstimate:
    """
    Sup of the second difference over grid steps ``h = j/(N-1) <= t`` and
    grid points ``x <= 1 - 2h``.  ``0 < t <= 1/2``.
    """
    t = float(t)
    if not 0.0 < t <= 0.5:
        raise ValueError(f"omega2 needs 0 < t <= 1/2, got {t}")
    x, grid_points = _grid(grid_points, 3)
    diff = getattr(f, "diff", None)
    vals = np.asarray(f(x), dtype=float)
    best = 0.0
    for j in range(1, _steps(t, grid_points) + 1):
        if diff is not None:
            h = j / (grid_points - 1)
            base = x[:-2 * j]
            d2 = diff(base + h, h) - diff(base, h)
        else:
            d2 = vals[2 * j:] - 2.0 * vals[j:-j] + vals[:-2 * j]
        best = max(best, float(np.max(np.abs(d2))))
    return ModulusEstimate("omega2", t, best, grid_points)


def omega2_at_scale(f, t, grid_points=513, h_points=33) -> ModulusEstimate:
    """
    Second modulus for steps far below the grid spacing.

    ``h`` runs over ``h_points`` values in ``(0, t]`` and, for each, ``x`` over
    ``grid_points`` values in ``[0, 1 - 2h]``.  With a :class:`TestFunction`
    the difference is formed from two exact increments,
    ``diff(x + h, h) - diff(x, h)``, which keeps its digits for tiny ``h``.
    Still a lower bound, but not nested in ``t``.
    """
    t = float(t)
    if not 0.0 < t <= 0.5:
        raise ValueError(f"omega2 needs 0 < t <= 1/2, got {t}")
    diff = getattr(f, "diff", None)
    best = 0.0
    for h in np.linspace(0.0, t, int(h_points))[1:]:
        x = np.linspace(0.0, 1.0 - 2.0 * h, int(grid_points))
        if diff is not None:
            d2 = diff(x + h, h) - diff(x, h)
        else:
            d2 = f(x + 2.0 * h) - 2.0 * f(x + h) + f(x)
        best = max(best, float(np.max(np.abs(d2))))
    return ModulusEstimate("omega2", t, best, int(grid_points))


def analytic_omega1(f, t):
    """Exact ``omega(f, t)`` from the registry, or ``None``."""
    fn = getattr(f, "omega", None)
    return None if fn is None else float(fn(float(t)))


def analytic_omega2(f, t):
    fn = getattr(f, "omega2", None)
    return None if fn is None else float(fn(float(t)))


def modulus(f, t, grid_points=DEFAULT_GRID):
    """Value of ``omega(f, t)`` safe to use on the large side of an inequality."""
    exact = analytic_omega1(f, t)
    if exact is not None:
        return exact
    t = min(float(t), 1.0)
    est = omega1(f, t, grid_points).value
    if t * (grid_points - 1) < 1.0:
        # below the grid spacing: one exact-step pass instead
        x = np.linspace(0.0, 1.0 - t, grid_points)
        est = float(np.max(np.abs(np.asarray(f(x + t)) - np.asarray(f(x)))))
    return GRID_INFLATION * est


def modulus2(f, t, grid_points=DEFAULT_GRID):
    """Value of ``omega_2(f, t)`` safe to use on the large side of an inequality."""
    t = min(float(t), 0.5)
    exact = analytic_omega2(f, t)
    if exact is not None:
        return exact
    if t * (grid_points - 1) < 64:
        return GRID_INFLATION * omega2_at_scale(f, t).value
    return GRID_INFLATION * omega2(f, t, grid_points).value
