"""Lupaş q-analogues of the Bernstein operators: evaluation, moments, moduli
and numerical verification of their approximation properties."""

from .qcalc import (
    QParam,
    Regime,
    log_q_binomial,
    log_q_factorial,
    q_binomial,
    q_binomial_row,
    q_factorial,
    q_integer,
    q_integers,
)
from .functions import REGISTRY, TestFunction, get, linear, monomial, reflect
from .operators import (
    BasisRow,
    OperatorKind,
    basis_gap,
    basis_limit,
    basis_lupas,
    eval_bernstein,
    eval_difference,
    eval_limit,
    eval_lupas,
    eval_operator,
    eval_phillips,
    eval_supercritical,
    v_transform,
)
from .moments import (
    MomentResult,
    Route,
    central_moment_l,
    l_operator,
    l_recurrence,
    moment_bruteforce,
    moment_closed,
    moment_recurrence,
)
from .moduli import ModulusEstimate, omega1, omega2
from .verify import VerificationReport

__version__ = "0.1.0"
