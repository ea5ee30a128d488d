"""
Right-hand sides of the convergence bounds and their parameter prescriptions.

Each *_terms function returns the bound split into named terms so callers can
inspect how a term scales; the *_rhs functions sum them.
"""

import math
from typing import Dict, Tuple

from src.theory.constants import TheoremConstants
from src.utils.exceptions import PreconditionError


def _require_beta_below_one(c: TheoremConstants) -> None:
    if c.beta >= 1:
        raise PreconditionError("Bound needs beta < 1", field="beta", value=c.beta, constraint="< 1")


def _momentum_factor(c: TheoremConstants) -> float:
    return (c.tau * c.R / c.eta - 1.0) ** 2 + 2.0 * c.beta**2 / (1.0 - c.beta**2)


def theorem1_terms(c: TheoremConstants) -> Dict[str, float]:
    """Randomized sign with a generic base optimizer; the base-optimizer effect is excluded."""
    _require_beta_below_one(c)
    n, tau, T = c.n, c.tau, c.T
    return {
        "initial_gap": 2.0 * c.f0_minus_fstar / math.sqrt(n * tau * T),
        "noise": c.zeta**2 * c.L * math.sqrt(n / (tau * T)),
        "momentum": 4.0 * n * c.L**2 * c.zeta**2 / T * _momentum_factor(c),
        "sign": c.d * c.L * c.R**2 * math.sqrt(n * tau / T),
    }


def theorem1_rhs(c: TheoremConstants) -> float:
    return math.fsum(theorem1_terms(c).values())


def theorem1_min_T(c: TheoremConstants) -> int:
    """
    Smallest T with T >= 4nL^2 [4(tau-1)(tau R/eta - 1)^2 + 8 tau beta^2/(1-beta)^2 + 1].

    The trailing constant is 1 rather than the 1/tau of the longer derivation;
    1 is the larger requirement for every tau >= 1.
    """
    _require_beta_below_one(c)
    inner = (
        4.0 * (c.tau - 1) * (c.tau * c.R / c.eta - 1.0) ** 2
        + 8.0 * c.tau * c.beta**2 / (1.0 - c.beta) ** 2
        + 1.0
    )
    return max(1, math.ceil(4.0 * c.n * c.L**2 * inner))


def theorem2_terms(c: TheoremConstants) -> Dict[str, float]:
    """SGD base: theorem1 with zeta := sigma plus the local drift term."""
    terms = theorem1_terms(c.model_copy(update={"zeta": c.sigma}))
    terms["drift"] = (
        3.0 * c.n * c.tau**2 * c.L**2 * c.R**2 * (c.sigma**2 + 3.0 * c.tau * c.delta**2) / (c.eta**2 * c.T)
    )
    return terms


def theorem2_rhs(c: TheoremConstants) -> float:
    return math.fsum(theorem2_terms(c).values())


def theorem2_min_T(c: TheoremConstants) -> int:
    """theorem1_min_T, raised so that gamma L tau <= 1/6 under the theorem1 prescription."""
    drift_horizon = math.ceil(36.0 * c.n * c.L**2 * c.R**2 * c.tau**3 / c.eta**2)
    return max(theorem1_min_T(c), drift_horizon)


def theorem3_terms(c: TheoremConstants, grad0_l2: float) -> Dict[str, float]:
    """Hard sign with SGD base; bounds the time average of ||grad f(x_{t,0})||_1."""
    if c.gamma <= 0:
        raise PreconditionError("Bound needs gamma > 0", field="gamma", value=c.gamma, constraint="> 0")
    if grad0_l2 < 0:
        raise PreconditionError("grad0_l2 must be nonnegative", field="grad0_l2", value=grad0_l2)
    T, d = c.T, c.d
    quarter = T**0.25
    return {
        "initial_gap": c.L * c.f0_minus_fstar / (c.gamma * quarter),
        "initial_grad": 2.0 * math.sqrt(d) * grad0_l2 / math.sqrt(T),
        "sign": 2.0 * d * c.gamma / quarter,
        "noise": 2.0 * c.sigma / quarter * math.sqrt(d / (c.tau * c.n)),
        "tail": (math.sqrt(d) * c.tau * c.R + c.gamma * d / 2.0) / T**0.75,
    }


def theorem3_rhs(c: TheoremConstants, grad0_l2: float) -> float:
    return math.fsum(theorem3_terms(c, grad0_l2).values())


def local_drift_bound(gamma: float, L: float, sigma: float, delta: float, tau: int) -> float:
    """Bound on (1/n) sum_i ||x_{t,k} - x^{(i)}_{t,k}||^2 for SGD local steps; needs 12 gamma^2 L^2 tau^2 < 1."""
    contraction = 1.0 - 12.0 * gamma**2 * L**2 * tau**2
    if contraction <= 0:
        raise PreconditionError(
            "Drift bound needs gamma L tau < 1/sqrt(12)",
            field="gamma",
            value=gamma,
            constraint=f"< {1.0 / (math.sqrt(12.0) * L * tau) if L > 0 else math.inf:.6g}",
        )
    return 2.0 * gamma**2 * (sigma**2 * tau + 3.0 * delta**2 * tau**2) / contraction


def theorem1_prescription(R: float, eta: float, n: int, tau: int, T: int) -> float:
    """Local learning rate gamma = (R / eta) sqrt(n tau / T)."""
    return R / eta * math.sqrt(n * tau / T)


def theorem3_prescription(L: float, T: int) -> Tuple[float, float]:
    """(eta, beta) = (1 / (L T^{3/4}), 1 - 1/sqrt(T))."""
    return 1.0 / (L * T**0.75), 1.0 - 1.0 / math.sqrt(T)
