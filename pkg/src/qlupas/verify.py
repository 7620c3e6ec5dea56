"""
Executable checks of the identities, inequalities and asymptotic statements
about the Lupaş operators.

Every check returns a :class:`VerificationReport`.  For inequalities
``worst_slack`` is the minimum over the grid of ``rhs - lhs`` and the check
passes when it is ``>= -SLACK_TOL``; for identities it is the largest
absolute discrepancy and the check passes when that is within the stated
tolerance.  "Uniform" statements are checked as sups over finite grids.

Default grids: ``x`` on 65 points of ``[0, 63/64]`` for ``q < 1`` (the
mirror ``[1/64, 1]`` for ``q > 1``), ``n`` in ``{1, 2, 4, 8, 16, 32}``,
``q`` in ``{0.3, 0.5, 0.9}`` with mirrors ``{10/3, 2, 10/9}``.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import partial

import numpy as np

from . import moments as _moments
from .functions import REGISTRY, TestFunction, linear, monomial, reflect
from .moduli import modulus, modulus2
from .moments import (
    central_moment_l,
    l_operator,
    l_recurrence,
    l_scale,
    moment_bruteforce,
    moment_closed,
    moment_recurrence,
)
from .operators import (
    OperatorKind,
    basis_gap,
    eval_difference,
    eval_limit,
    eval_lupas,
    eval_phillips,
    eval_supercritical,
    lupas_weights,
    lupas_weights_rational,
    v_transform,
)
from .qcalc import as_q, q_integer

__all__ = [
    "VerificationReport",
    "SLACK_TOL",
    "Q_SUB",
    "Q_SUPER",
    "N_DEFAULT",
    "x_grid",
    "check_partition_of_unity",
    "check_basis_forms",
    "check_linear_reproduction",
    "check_symmetry_reduction",
    "check_moment_routes",
    "check_moment_spot_values",
    "check_telescoping",
    "check_r3_recurrence",
    "check_k1_bound",
    "check_second_moment_sandwich",
    "check_uniform_q_bound",
    "check_basis_difference_bound",
    "check_rate_theorem",
    "check_rate_supercritical",
    "check_uniform_interval_bounds",
    "check_omega2_ratio",
    "check_omega2_uniform",
    "check_sharpness",
    "check_convex_monotonicity",
    "check_t2_identity",
    "voronovskaja_residual",
    "voronovskaja_supercritical",
    "check_voronovskaja",
    "classical_limit_errors",
    "classical_limit_check",
    "phillips_contrast_check",
    "SUITES",
    "build_suite",
    "run_checks",
]

SLACK_TOL = 1e-13
Q_SUB = (0.3, 0.5, 0.9)
Q_SUPER = (10.0 / 3.0, 2.0, 10.0 / 9.0)
N_DEFAULT = (1, 2, 4, 8, 16, 32)
SMOOTH_IDS = ("cubic", "quartic", "exp", "sin")


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one check.

    ``worst_slack`` is ``min(rhs - lhs)`` for inequalities and
    ``max |difference|`` for identities (see ``kind``).
    """

    check_id: str
    passed: bool
    worst_slack: float
    grid: str
    params: dict = field(default_factory=dict)
    empirical_constants: dict = field(default_factory=dict)
    kind: str = "inequality"
    tol: float = SLACK_TOL

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        out = f"{self.check_id} {verdict} worst_slack={self.worst_slack:.17g} params={_fmt(self.params)}"
        if self.empirical_constants:
            out += f" constants={_fmt(self.empirical_constants)}"
        return out

    def row(self) -> list:
        return [self.check_id, "PASS" if self.passed else "FAIL", f"{self.worst_slack:.17g}",
                self.kind, self.grid, _fmt(self.params), _fmt(self.empirical_constants)]


CSV_HEADER = ["check_id", "status", "worst_slack", "kind", "grid", "params", "constants"]


def _fmt(d):
    parts = []
    for key, val in d.items():
        if isinstance(val, float):
            val = f"{val:.6g}"
        elif isinstance(val, (tuple, list)):
            val = "|".join(f"{v:.6g}" if isinstance(v, float) else str(v) for v in val)
        parts.append(f"{key}:{val}")
    return ";".join(parts)


def _inequality(check_id, slack, grid, params, constants=None):
    worst = float(np.min(slack)) if np.size(slack) else 0.0
    passed = bool(np.isfinite(worst) and worst >= -SLACK_TOL)
    return VerificationReport(check_id, passed, worst, grid, params, constants or {})


def _identity(check_id, discrepancy, tol, grid, params, constants=None, extra_ok=True):
    worst = float(np.max(discrepancy)) if np.size(discrepancy) else 0.0
    passed = bool(np.isfinite(worst) and worst <= tol and extra_ok)
    return VerificationReport(check_id, passed, worst, grid, params, constants or {},
                              kind="identity", tol=tol)


def x_grid(q, points=65):
    """Default evaluation grid: ``[0, 63/64]`` for ``q < 1``, its mirror for ``q > 1``."""
    x = np.linspace(0.0, 1.0 - 1.0 / 64.0, points)
    return 1.0 - x[::-1] if as_q(q) > 1.0 else x


def _grid_label(x):
    return f"{len(x)} pts on [{x[0]:.6g},{x[-1]:.6g}]"


def _get(f):
    return REGISTRY[f] if isinstance(f, str) else f


def _diff(q, n, f, x):
    """``R_{n,q} f - R_{inf,q} f`` on a grid, cancellation free."""
    return np.asarray(eval_difference(q, n, f, x), dtype=float)


# -- basis ---------------------------------------------------------------------

def check_partition_of_unity(qs=(0.3, 0.5, 0.9, 1.0, 1.5, 3.0), ns=range(1, 65), points=257):
    """All ``b_nk >= 0`` and ``|sum_k b_nk - 1| <= 1e-12``."""
    x = np.linspace(0.0, 1.0, points)
    worst_sum, min_weight = 0.0, math.inf
    for q in qs:
        for n in ns:
            w = lupas_weights(q, n, x)
            worst_sum = max(worst_sum, float(np.max(np.abs(w.sum(axis=1) - 1.0))))
            min_weight = min(min_weight, float(w.min()))
    return _identity("partition_of_unity", [worst_sum], 1e-12, _grid_label(x),
                     {"q": tuple(qs), "n_max": max(ns)}, {"min_weight": min_weight},
                     extra_ok=min_weight >= 0.0)


def check_basis_forms(qs=(0.3, 0.5, 0.9, 1.5, 3.0), ns=(1, 2, 5, 16, 40, 64), points=65):
    """Product form against the rational form of the basis."""
    x = np.linspace(0.0, 1.0, points)
    worst = 0.0
    for q in qs:
        for n in ns:
            prod = lupas_weights(q, n, x)
            for i, xi in enumerate(x):
                worst = max(worst, float(np.max(np.abs(prod[i] - lupas_weights_rational(q, n, xi)))))
    return _identity("basis_forms", [worst], 1e-12, _grid_label(x), {"q": tuple(qs), "n": tuple(ns)})


def check_linear_reproduction(qs=Q_SUB + Q_SUPER, ns=N_DEFAULT, points=65):
    """``R_{n,q}(a t + b) = a x + b`` and the same for the limit operator;
    end-point interpolation for every registry function."""
    f = linear(-1.5, 0.75)
    x = np.linspace(0.0, 1.0, points)
    target = -1.5 * x + 0.75
    worst = 0.0
    for q in qs:
        for n in ns:
            worst = max(worst, float(np.max(np.abs(eval_lupas(q, n, f, x) - target))))
            for g in REGISTRY.values():
                ends = eval_lupas(q, n, g, np.array([0.0, 1.0]))
                worst = max(worst, float(np.max(np.abs(ends - g(np.array([0.0, 1.0]))))))
        lim = eval_limit(q, f, x) if q < 1.0 else eval_supercritical(q, math.inf, f, x)
        worst = max(worst, float(np.max(np.abs(lim - target))))
    return _identity("linear_reproduction", [worst], 1e-13, _grid_label(x),
                     {"q": tuple(qs), "n": tuple(ns)})


def check_symmetry_reduction(qs=(1.1, 2.0, 10.0 / 3.0), ns=range(1, 33), fns=None, points=65):
    """Direct super-critical weights against ``R_{n,1/q}(g, 1 - x)``."""
    fns = [_get(f) for f in (fns or REGISTRY)]
    x = np.linspace(0.0, 1.0, points)
    worst = 0.0
    for q in qs:
        for n in ns:
            for f in fns:
                direct = eval_lupas(q, n, f, x)
                reduced = eval_supercritical(q, n, f, x)
                worst = max(worst, float(np.max(np.abs(direct - reduced))))
    return _identity("symmetry_reduction", [worst], 1e-12, _grid_label(x),
                     {"q": tuple(qs), "n_max": max(ns), "f": tuple(f.id for f in fns)})


# -- moments -------------------------------------------------------------------

def check_moment_routes(qs=Q_SUB, ns=range(1, 33), m_max=4, points=65):
    """Closed forms (m <= 3) and recurrences (m <= m_max) against brute-force sums."""
    x = np.linspace(0.0, 1.0, points)
    xl = x[x < 1.0]
    worst = 0.0
    for q in qs:
        for m in range(m_max + 1):
            lim = np.array([moment_bruteforce("limit", q, 0, m, xi).value for xi in xl])
            rec = _moments._recurrence(OperatorKind.LIMIT, q, 0, m, xl)
            worst = max(worst, float(np.max(np.abs(rec - lim))))
            if m <= 3:
                closed = np.array([moment_closed("limit", q, 0, m, xi).value for xi in xl])
                worst = max(worst, float(np.max(np.abs(closed - lim))))
            for n in ns:
                brute = eval_lupas(q, n, _moments._power(m), x)
                rec = _moments._recurrence(OperatorKind.LUPAS, q, n, m, x)
                worst = max(worst, float(np.max(np.abs(rec - brute))))
                if m <= 3:
                    closed = np.array([moment_closed("lupas", q, n, m, xi).value for xi in x])
                    worst = max(worst, float(np.max(np.abs(closed - brute))))
    return _identity("moment_routes", [worst], 1e-11, _grid_label(x),
                     {"q": tuple(qs), "n_max": max(ns), "m_max": m_max})


def check_moment_spot_values():
    """Hand-derived values at ``q = 1/2``, ``n = 2``, ``x = 1/2``."""
    got = [
        moment_closed("lupas", 0.5, 2, 2, 0.5).value - 7.0 / 18.0,
        moment_recurrence("lupas", 0.5, 2, 3, 0.5).value - 17.0 / 54.0,
        moment_closed("limit", 0.5, 0, 2, 0.5).value - 1.0 / 3.0,
        moment_closed("limit", 0.5, 0, 3, 0.5).value - 7.0 / 30.0,
        l_operator(2, 0.5, 2, 0.5) - 1.0 / 18.0,
        l_operator(3, 0.5, 2, 0.5) - 11.0 / 135.0,
        central_moment_l(3, 0.5, 2, 0.5) - (11.0 / 135.0 - 1.0 / 12.0),
    ]
    return _identity("moment_spot_values", np.abs(got), 1e-12, "q=0.5 n=2 x=0.5", {})


def check_telescoping(qs=Q_SUB, ns=N_DEFAULT, points=65):
    """``L(1) = L(t) = 0``."""
    worst = 0.0
    for q in qs:
        x = x_grid(q, points)
        for n in ns:
            for f in (REGISTRY["const"], REGISTRY["linear"]):
                worst = max(worst, float(np.max(np.abs(_diff(q, n, f, x)))))
    return _identity("telescoping", [worst], 1e-13, _grid_label(x_grid(0.5, points)),
                     {"q": tuple(qs), "n": tuple(ns)})


def check_r3_recurrence(qs=Q_SUB, ns=N_DEFAULT, m_max=3, points=65):
    """``L(t^{m+1})`` from the recurrence in ``m`` against the direct difference."""
    worst = 0.0
    for q in qs:
        x = x_grid(q, points)
        for n in ns:
            for m in range(1, m_max + 1):
                direct = _diff(q, n, monomial(m + 1), x)
                rec = np.array([l_recurrence(m + 1, q, n, xi) for xi in x])
                worst = max(worst, float(np.max(np.abs(rec - direct))))
    return _identity("r3_recurrence", [worst], 1e-11, _grid_label(x_grid(0.5, points)),
                     {"q": tuple(qs), "n": tuple(ns), "m_max": m_max})


def _k1(qs, ns, points):
    best = 0.0
    quartic_ratio = 0.0
    for q in qs:
        x = x_grid(q, points)[1:]
        for n in ns:
            scale = l_scale(q, n, x, power=2)
            best = max(best, float(np.max(central_moment_l(4, q, n, x) / scale)))
            quartic_ratio = max(quartic_ratio, float(np.max(np.abs(l_operator(4, q, n, x) / scale))))
    return best, quartic_ratio


def check_k1_bound(qs=Q_SUB, ns=N_DEFAULT, points=65):
    """
    Empirical ``K1 = sup L((t-x)^4, x) / (q^n/[n]^2 x(1 - v))`` and its drift
    under a 2x grid refinement (allowed 5 %).  Also confirms the factored
    form of ``L(t^4)`` by a finite sup of ``L(t^4) / (q^n/[n]^2 x(1-v))``.
    """
    k1, quartic = _k1(qs, ns, points)
    k1_fine, quartic_fine = _k1(qs, ns, 2 * points - 1)
    drift = abs(k1_fine - k1) / k1
    slack = [0.05 - drift, k1_fine - k1]
    finite = math.isfinite(quartic_fine)
    report = _inequality("k1_bound", slack if finite else [-math.inf],
                         _grid_label(x_grid(0.5, points)) + " and 2x refined",
                         {"q": tuple(qs), "n": tuple(ns)},
                         {"K1": k1, "K1_refined": k1_fine, "drift": drift, "M_sup": quartic_fine})
    return report


def check_second_moment_sandwich(qs=Q_SUB, ns=N_DEFAULT, points=65):
    """``0 <= L(t^2) <= q^n x(1-x)/(1-x+qx) <= q^n``."""
    slack = []
    for q in qs:
        x = x_grid(q, points)
        for n in ns:
            lt2 = _diff(q, n, REGISTRY["quad"], x)
            mid = q ** n * x * (1.0 - x) / (1.0 - x + q * x)
            slack.extend([lt2, mid - lt2, q ** n - mid])
    return _inequality("second_moment_sandwich", np.concatenate(slack),
                       _grid_label(x_grid(0.5, points)), {"q": tuple(qs), "n": tuple(ns)})


def check_uniform_q_bound(ns=N_DEFAULT, q_points=99, points=65):
    """``sup_{0<q<=1} L(t^2, x) <= x(1-x)/n <= 1/n`` over a scan of ``q``."""
    qs = np.linspace(1.0 / q_points, 1.0, q_points)
    x = np.linspace(0.0, 1.0, points)
    slack = []
    for n in ns:
        sup = np.zeros_like(x)
        for q in qs:
            # at q = 1 the limit operator is the identity
            val = eval_lupas(1.0, n, REGISTRY["quad"], x) - x * x if q == 1.0 else _diff(q, n, REGISTRY["quad"], x)
            sup = np.maximum(sup, val)
        bound = x * (1.0 - x) / n
        slack.extend([bound - sup, 1.0 / n - bound])
    return _inequality("uniform_q_bound", np.concatenate(slack), _grid_label(x),
                       {"q_scan": f"{q_points} pts on (0,1]", "n": tuple(ns)})


# -- first-modulus rate bounds ----------------------------------------------------

def check_basis_difference_bound(qs=(0.5, 0.9), ns=range(1, 33), points=65, x_max=0.95):
    """``|b_nk - b_inf_k| <= b_nk x/(1-x) q^n/(1-q) + b_inf_k q^(n-k+1)/(1-q)``."""
    x = np.linspace(0.0, x_max, points)
    slack = []
    for q in qs:
        for n in ns:
            k = np.arange(n + 1)
            for xi in x:
                b_n, b_inf, gap = basis_gap(q, n, xi)
                rhs = (b_n * xi / (1.0 - xi) * q ** n + b_inf * q ** (n - k + 1)) / (1.0 - q)
                slack.append(rhs - np.abs(gap))
    return _inequality("basis_difference_bound", np.concatenate(slack), _grid_label(x),
                       {"q": tuple(qs), "n_max": max(ns)})


def check_rate_theorem(q=0.5, f="quad", ns=N_DEFAULT, x=None):
    """``|R_n f - R_inf f| <= 2/((1-q)(1-x)) omega(f, q^n)`` pointwise, ``q < 1``."""
    q = as_q(q)
    f = _get(f)
    x = x_grid(q) if x is None else np.asarray(x, dtype=float)
    slack = []
    for n in ns:
        rhs = 2.0 / ((1.0 - q) * (1.0 - x)) * modulus(f, q ** n)
        slack.append(rhs - np.abs(_diff(q, n, f, x)))
    return _inequality(f"rate_theorem[{f.id},q={q:.6g}]", np.concatenate(slack), _grid_label(x),
                       {"q": q, "f": f.id, "n": tuple(ns)})


def check_rate_supercritical(q=2.0, f="quad", ns=N_DEFAULT, x=None):
    """``|R_n f - R_inf f| <= 2q/(q-1) / x * omega(g, q^-n)``, ``g = f(1 - .)``, ``q > 1``."""
    q = as_q(q)
    f = _get(f)
    g = reflect(f)
    x = x_grid(q) if x is None else np.asarray(x, dtype=float)
    slack = []
    for n in ns:
        rhs = 2.0 * q / ((q - 1.0) * x) * modulus(g, q ** (-n))
        slack.append(rhs - np.abs(_diff(q, n, f, x)))
    return _inequality(f"rate_supercritical[{f.id},q={q:.6g}]", np.concatenate(slack),
                       _grid_label(x), {"q": q, "f": f.id, "n": tuple(ns)})


def check_uniform_interval_bounds(q=0.5, f="cubic", a=0.8, ns=range(1, 31), points=65):
    """
    Sup-norm bounds on ``[0, a]`` (``q < 1``) and on ``[a, 1]`` (``q > 1``):
    ``2/((1-q)(1-a)) omega(f, q^n)`` and ``2q/((q-1) a) omega(g, q^-n)``.
    """
    q = as_q(q)
    f = _get(f)
    slack = []
    if q < 1.0:
        x = np.linspace(0.0, a, points)
        for n in ns:
            rhs = 2.0 / ((1.0 - q) * (1.0 - a)) * modulus(f, q ** n)
            slack.append(rhs - np.max(np.abs(_diff(q, n, f, x))))
    else:
        x = np.linspace(a, 1.0, points)
        g = reflect(f)
        for n in ns:
            rhs = 2.0 * q / ((q - 1.0) * a) * modulus(g, q ** (-n))
            slack.append(rhs - np.max(np.abs(_diff(q, n, f, x))))
    return _inequality(f"interval_bound[{f.id},q={q:.6g},a={a:g}]", np.array(slack),
                       _grid_label(x), {"q": q, "f": f.id, "a": a, "n_max": max(ns)})


# -- second-modulus bounds ----------------------------------------------------------

def _sup_norm_diff(q, n, f, x):
    return float(np.max(np.abs(_diff(q, n, f, x))))


def _ratios(q, f, ns, points):
    q = as_q(q)
    x = x_grid(q, points)
    h = reflect(f) if q > 1.0 else f
    step = q ** (-1) if q > 1.0 else q
    return np.array([_sup_norm_diff(q, n, f, x) / modulus2(h, math.sqrt(step ** n)) for n in ns])


def _bounded(ratios):
    half = len(ratios) // 2
    return 1.5 * float(np.max(ratios[:half])) - float(np.max(ratios[half:]))


def check_omega2_ratio(f="cubic", qs=Q_SUB + Q_SUPER, ns=N_DEFAULT, points=65):
    """
    ``||R_n f - R_inf f|| / omega_2(f, sqrt(q^n))`` (``g`` and ``q^-n`` for
    ``q > 1``) stays bounded: the max over the second half of the ``n``
    range is at most 1.5 times the max over the first half.  The empirical
    constant ``c`` is the overall sup; its drift under a 2x grid refinement
    must stay below 10 %.
    """
    f = _get(f)
    if modulus2(f, 0.5) == 0.0:
        raise ValueError(f"{f.id} is linear; the ratio is 0/0")
    slack = []
    c = c_fine = 0.0
    for q in qs:
        r = _ratios(q, f, ns, points)
        r_fine = _ratios(q, f, ns, 2 * points - 1)
        slack.append(_bounded(r))
        c = max(c, float(np.max(r)))
        c_fine = max(c_fine, float(np.max(r_fine)))
    drift = abs(c_fine - c) / c if c > 0 else 0.0
    slack.append(0.10 - drift)
    return _inequality(f"omega2_ratio[{f.id}]", np.array(slack), _grid_label(x_grid(0.5, points)),
                       {"f": f.id, "q": tuple(qs), "n": tuple(ns)},
                       {"c": c, "c_refined": c_fine, "drift": drift})


def check_omega2_uniform(f="quad", ns=N_DEFAULT, q_points=33, points=33, supercritical=False):
    """
    Uniform-in-``q`` versions: ``sup_{0<q<=1} ||R_n f - R_inf f|| / omega_2(f, n^-1/2)``
    and, with ``supercritical=True``, ``sup_{q>=1}`` against ``omega_2(g, n^-1/2)``.
    ``q = 1`` enters as ``B_n f - f``.
    """
    f = _get(f)
    scan = np.linspace(1.0 / q_points, 1.0, q_points)
    qs = 1.0 / scan if supercritical else scan
    h = reflect(f) if supercritical else f
    x = np.linspace(0.0, 1.0, points)
    ratios = []
    for n in ns:
        sup = 0.0
        for q in qs:
            if q == 1.0:
                val = eval_lupas(1.0, n, f, x) - f(x)
            else:
                val = _diff(q, n, f, x)
            sup = max(sup, float(np.max(np.abs(val))))
        ratios.append(sup / modulus2(h, 1.0 / math.sqrt(n)))
    ratios = np.array(ratios)
    name = "omega2_uniform_super" if supercritical else "omega2_uniform"
    return _inequality(f"{name}[{f.id}]", [_bounded(ratios)], _grid_label(x),
                       {"f": f.id, "q_scan": f"{q_points} pts", "n": tuple(ns)},
                       {"c": float(np.max(ratios))})


def check_sharpness(qs=Q_SUB, ns=range(1, 61), points=65):
    """For ``t^2``: ``||R_n - R_inf|| / omega_2(t^2, sqrt(q^n))`` lies in ``[0.01, 100]``."""
    f = REGISTRY["quad"]
    lo, hi = math.inf, 0.0
    for q in qs:
        r = _ratios(q, f, list(ns), points)
        lo = min(lo, float(r.min()))
        hi = max(hi, float(r.max()))
    return _inequality("sharpness", [lo - 0.01, 100.0 - hi], _grid_label(x_grid(0.5, points)),
                       {"q": tuple(qs), "n_max": max(ns)}, {"ratio_min": lo, "ratio_max": hi})


def check_convex_monotonicity(q=0.5, f="quad", ns=range(1, 21), points=33):
    """``R_n f >= R_{n+1} f >= R_inf f`` for convex ``f``."""
    f = _get(f)
    if not f.convex:
        raise ValueError(f"{f.id} is not tagged convex")
    q = as_q(q)
    x = np.linspace(0.0, 1.0, points)
    ns = list(ns)
    d = {n: _diff(q, n, f, x) for n in ns + [ns[-1] + 1]}
    slack = [d[n] - d[n + 1] for n in ns] + [d[n] for n in d]
    return _inequality(f"convex_monotonicity[{f.id},q={q:.6g}]", np.concatenate(slack),
                       _grid_label(x), {"q": q, "f": f.id, "n": f"{ns[0]}..{ns[-1]}"})


# -- Voronovskaja-type statements ------------------------------------------------

def check_t2_identity(qs=Q_SUB + Q_SUPER, ns=range(1, 33), points=65):
    """
    ``[n]/q^n L(t^2, x) = x(1 - v(q, x))`` for ``q < 1`` and
    ``q^n [n]_{1/q} L(t^2, x) = v(q, x)(1 - x)`` for ``q > 1``, both exact.
    """
    f = REGISTRY["quad"]
    x = np.linspace(0.0, 1.0, points)
    worst = 0.0
    for q in qs:
        v = v_transform(q, x)
        for n in ns:
            lt2 = _diff(q, n, f, x)
            if q < 1.0:
                scaled, target = q_integer(q, n) / q ** n * lt2, x * (1.0 - v)
            else:
                scaled, target = q ** n * q_integer(1.0 / q, n) * lt2, v * (1.0 - x)
            worst = max(worst, float(np.max(np.abs(scaled - target))))
    return _identity("t2_identity", [worst], 1e-12, _grid_label(x),
                     {"q": tuple(qs), "n_max": max(ns)})


def _need_d2(f):
    if not isinstance(f, TestFunction) or f.d2 is None:
        name = getattr(f, "id", f)
        raise ValueError(f"{name} has no analytic second derivative")


def voronovskaja_residual(q, f, n, x):
    """
    ``(residual, bound)`` with

        residual = | [n]/q^n (R_n f - R_inf f)(x) - f''(x)/2 x (1 - v(q, x)) |
        bound    = x (1 - v(q, x)) omega(f'', [n]^-1/2)

    for ``0 < q < 1``.  ``x`` may be an array.
    """
    f = _get(f)
    _need_d2(f)
    q = as_q(q)
    if q >= 1.0:
        raise ValueError("voronovskaja_residual needs 0 < q < 1; use voronovskaja_supercritical")
    N = q_integer(q, n)
    weight = x * (1.0 - v_transform(q, x))
    return _residual(f, q ** (-n) * N, eval_difference(q, n, f, x), weight, x, _omega_d2(f, N ** -0.5))


def voronovskaja_supercritical(q, f, n, x):
    """
    ``(residual, bound)`` for ``q > 1``:

        residual = | q^n [n]_{1/q} (R_n f - R_inf f)(x) - f''(x)/2 v(q, x)(1 - x) |
        bound    = v(q, x)(1 - x) omega(g'', [n]_{1/q}^-1/2)

    This is the ``q < 1`` statement for ``g = f(1 - .)`` at ``1 - x``; since
    ``g''(1 - x) = f''(x)`` the second-derivative factor is taken at ``x``.
    """
    f = _get(f)
    _need_d2(f)
    q = as_q(q)
    if q <= 1.0:
        raise ValueError("voronovskaja_supercritical needs q > 1")
    N = q_integer(1.0 / q, n)
    weight = v_transform(q, x) * (1.0 - x)
    return _residual(f, q ** n * N, eval_difference(q, n, f, x), weight, x,
                     _omega_d2(reflect(f), N ** -0.5))


def _residual(f, scale, diff, weight, x, omega):
    residual = np.abs(scale * np.asarray(diff) - 0.5 * f.d2(np.asarray(x, dtype=float)) * weight)
    bound = weight * omega
    if np.ndim(residual) == 0:
        return float(residual), float(bound)
    return residual, bound


def _omega_d2(f, t):
    if f.omega_d2 is not None:
        return float(f.omega_d2(t))
    return modulus(f.d2, t)


def _k_emp(fns, qs, ns, points):
    best = 0.0
    for q in qs:
        x = x_grid(q, points)
        for f in fns:
            for n in ns:
                if q < 1.0:
                    res, bound = voronovskaja_residual(q, f, n, x)
                else:
                    res, bound = voronovskaja_supercritical(q, f, n, x)
                keep = bound > 0.0
                if np.any(keep):
                    best = max(best, float(np.max(res[keep] / bound[keep])))
    return best


def check_voronovskaja(fns=SMOOTH_IDS, qs=Q_SUB, ns=N_DEFAULT, points=65, check_id=None):
    """
    Empirical ``K = sup residual / bound`` over the grid; passes when ``K``
    is finite and moves by less than 10 % under a 2x grid refinement.
    """
    fns = [_get(f) for f in fns]
    k = _k_emp(fns, qs, ns, points)
    k_fine = _k_emp(fns, qs, ns, 2 * points - 1)
    drift = abs(k_fine - k) / k if k > 0 else 0.0
    slack = [0.10 - drift] if math.isfinite(k_fine) else [-math.inf]
    sup = any(q > 1.0 for q in qs)
    return _inequality(check_id or ("voronovskaja_super" if sup else "voronovskaja"), slack,
                       _grid_label(x_grid(qs[0], points)) + " and 2x refined",
                       {"f": tuple(f.id for f in fns), "q": tuple(qs), "n": tuple(ns)},
                       {"K": k, "K_refined": k_fine, "drift": drift})


SCHEDULES = {
    "1-1/n": lambda n: 1.0 - 1.0 / n,
    "1+1/n": lambda n: 1.0 + 1.0 / n,
    "1-1/n^2": lambda n: 1.0 - 1.0 / n ** 2,
    "1+1/n^2": lambda n: 1.0 + 1.0 / n ** 2,
}


def classical_scaled(f, n, schedule, x):
    """
    ``([n]_{q_n} (R_{n,q_n} f - f)(x), target)`` with target ``f''(x)/2 x(1-x)``.

    For ``q_n > 1`` the scale is ``[n]_{1/q_n}``.  The target is ``f''(x)``
    in both directions, since through the reflection the ``q_n > 1`` limit
    is ``g''(1 - x) = f''(x)``.
    """
    f = _get(f)
    _need_d2(f)
    q = SCHEDULES[schedule](n) if isinstance(schedule, str) else float(schedule(n))
    x = np.asarray(x, dtype=float)
    N = q_integer(q if q <= 1.0 else 1.0 / q, n)
    scaled = N * (eval_lupas(q, n, f, x) - f(x))
    target = 0.5 * f.d2(x) * x * (1.0 - x)
    return scaled, target


def classical_limit_errors(f, schedule, ns=(128, 512), points=65):
    """Grid sup of ``|scaled - target|`` for each ``n``."""
    x = np.linspace(0.0, 1.0, points)
    out = []
    for n in ns:
        scaled, target = classical_scaled(f, n, schedule, x)
        out.append(float(np.max(np.abs(scaled - target))))
    return out


def classical_limit_check(f="cubic", schedule="1-1/n^2", ns=(128, 512), points=65):
    """
    First-order decay of the classical-limit error: ``E(512) <= E(128)/2``
    and ``E(512) <= 0.05 (1 + ||f''||)``.
    """
    f = _get(f)
    e_lo, e_hi = classical_limit_errors(f, schedule, ns, points)
    d2_norm = float(np.max(np.abs(f.d2(np.linspace(0.0, 1.0, 2001)))))
    slack = [0.5 * e_lo - e_hi, 0.05 * (1.0 + d2_norm) - e_hi]
    return _inequality(f"classical_limit[{f.id},{schedule}]", slack, f"{points} pts on [0,1]",
                       {"f": f.id, "schedule": schedule, "n": tuple(ns)},
                       {"E_first": e_lo, "E_last": e_hi, "decay": e_hi / e_lo if e_lo > 0 else 0.0})


def phillips_contrast_check(q=0.5, ns=N_DEFAULT, points=65, witness_n=4):
    """
    ``[n](B_{n,q}(t^2) - x^2) = x(1-x)`` for Phillips, and for ``q < 1`` a grid
    point where the Lupaş analogue misses ``x(1-x)`` by more than ``1e-6``.
    """
    q = as_q(q)
    if q > 1.0:
        raise ValueError("the Phillips operator is only evaluated for 0 < q <= 1")
    f = REGISTRY["quad"]
    x = np.linspace(0.0, 1.0, points)
    worst = 0.0
    for n in ns:
        scaled = q_integer(q, n) * (eval_phillips(q, n, f, x) - x * x)
        worst = max(worst, float(np.max(np.abs(scaled - x * (1.0 - x)))))
    lupas_dev = q_integer(q, witness_n) * (eval_lupas(q, witness_n, f, x) - x * x) - x * (1.0 - x)
    deviation = float(np.max(np.abs(lupas_dev)))
    witness = float(x[int(np.argmax(np.abs(lupas_dev)))])
    ok = deviation > 1e-6 if q < 1.0 else deviation <= 1e-12
    return _identity(f"phillips_contrast[q={q:.6g}]", [worst], 1e-12, _grid_label(x),
                     {"q": q, "n": tuple(ns), "witness_n": witness_n},
                     {"lupas_deviation": deviation, "witness_x": witness}, extra_ok=ok)


# -- suites -------------------------------------------------------------------

def _mirror(qs):
    return tuple(1.0 / q for q in qs)


def build_suite(name="all", q=None):
    """
    List of ``(check_id, thunk)`` for a suite name or a single check id.

    ``q`` narrows the parameter sets: a value below 1 is used for the
    ``q < 1`` checks and its reciprocal for the ``q > 1`` ones (and the
    other way round for a value above 1).
    """
    if q is None:
        q_sub, q_sup = Q_SUB, Q_SUPER
    else:
        q = as_q(q)
        if q == 1.0:
            raise ValueError("verification suites need q != 1")
        q_sub = (q,) if q < 1.0 else (1.0 / q,)
        q_sup = _mirror(q_sub)
    nonlinear = ("quad", "cubic", "exp", "sin", "abs", "abs3")
    convex = [k for k, f in REGISTRY.items() if f.convex]
    groups = {
        "basis": [
            ("partition_of_unity", check_partition_of_unity),
            ("basis_forms", check_basis_forms),
            ("linear_reproduction", partial(check_linear_reproduction, qs=q_sub + q_sup)),
        ],
        "moments": [
            ("moment_routes", partial(check_moment_routes, qs=q_sub)),
            ("moment_spot_values", check_moment_spot_values),
            ("r3_recurrence", partial(check_r3_recurrence, qs=q_sub)),
        ],
        "difference": [
            ("telescoping", partial(check_telescoping, qs=q_sub)),
            ("k1_bound", partial(check_k1_bound, qs=q_sub)),
            ("second_moment_sandwich", partial(check_second_moment_sandwich, qs=q_sub)),
            ("uniform_q_bound", check_uniform_q_bound),
        ],
        "symmetry": [
            ("symmetry_reduction", partial(check_symmetry_reduction,
                                           qs=(1.1, 2.0, 10.0 / 3.0) if q is None else q_sup)),
        ],
        "lemma": [
            ("basis_difference_bound", partial(check_basis_difference_bound,
                                               qs=(0.5, 0.9) if q is None else q_sub)),
        ],
        "rate": (
            [(f"rate_theorem[{f},q={qq:.6g}]", partial(check_rate_theorem, q=qq, f=f))
             for qq in q_sub for f in REGISTRY]
            + [(f"rate_supercritical[{f},q={qq:.6g}]", partial(check_rate_supercritical, q=qq, f=f))
               for qq in q_sup for f in REGISTRY]
            + [(f"interval_bound[{f},q={qq:.6g},a={a:g}]",
                partial(check_uniform_interval_bounds, q=qq, f=f, a=a))
               for qq in q_sub + q_sup for f in ("cubic", "quad", "abs") for a in (0.2, 0.5, 0.8)]
        ),
        "omega2": (
            [(f"omega2_ratio[{f}]", partial(check_omega2_ratio, f=f, qs=q_sub + q_sup))
             for f in nonlinear]
            + [(f"omega2_uniform[{f}]", partial(check_omega2_uniform, f=f)) for f in ("quad", "abs", "sin")]
            + [(f"omega2_uniform_super[{f}]", partial(check_omega2_uniform, f=f, supercritical=True))
               for f in ("quad", "abs", "sin")]
            + [("sharpness", partial(check_sharpness, qs=q_sub))]
        ),
        "convex": [
            (f"convex_monotonicity[{f},q={qq:.6g}]", partial(check_convex_monotonicity, q=qq, f=f))
            for qq in q_sub + q_sup for f in convex
        ],
        "voronovskaja": [
            ("t2_identity", partial(check_t2_identity, qs=q_sub + q_sup)),
            ("voronovskaja", partial(check_voronovskaja, qs=q_sub)),
            ("voronovskaja_super", partial(check_voronovskaja, qs=q_sup)),
        ],
        # q_n = 1 -+ 1/n^2 keeps q_n^n -> 1; see classical_limit_errors for 1 -+ 1/n
        "classical": [
            (f"classical_limit[{f},{s}]", partial(classical_limit_check, f=f, schedule=s))
            for f in ("quad", "cubic", "exp") for s in ("1-1/n^2", "1+1/n^2")
        ],
        "phillips": [
            (f"phillips_contrast[q={qq:.6g}]", partial(phillips_contrast_check, q=qq))
            for qq in q_sub + (1.0,)
        ],
    }
    if name == "all":
        return [item for group in groups.values() for item in group]
    if name in groups:
        return groups[name]
    for group in groups.values():
        for item in group:
            if item[0] == name:
                return [item]
    raise KeyError(f"unknown suite or check id {name!r}; suites: all, {', '.join(groups)}")


SUITES = ("all", "basis", "moments", "difference", "symmetry", "lemma", "rate", "omega2",
          "convex", "voronovskaja", "classical", "phillips")


def run_checks(items, threads=None):
    """Run ``(check_id, thunk)`` pairs, optionally on a thread pool; order is kept."""
    thunks = [thunk for _, thunk in items]
    if threads == 1 or len(thunks) <= 1:
        return [t() for t in thunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda t: t(), thunks))
