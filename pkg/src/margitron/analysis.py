"""Closed-form convergence bounds, margin-fraction estimates and parameter
selection for both threshold variants, plus the numeric machinery they rest
on: a bracketed root solver, inequality oracles, and a brute-force
maximum-directional-margin search for small instances.

Notation used throughout the docstrings: R is the dataset radius, gamma_d
the maximum directional margin, gamma_prime_d the directional margin a run
achieved, t_c the observed update count, eps the threshold decay exponent
and b the margin parameter.  [eps] denotes the integer part of eps.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dataset import TrainingSet

__all__ = [
    "BoundInputs",
    "EstimateChoice",
    "BSelection",
    "RootResult",
    "StrongFraction",
    "InequalityCheck",
    "MajorantCheck",
    "OracleLimitError",
    "bracketed_power_root",
    "update_bound_t",
    "update_bound_l",
    "fraction_lower_t",
    "fraction_est_t",
    "fraction_lower_t_strong",
    "fraction_asymptote",
    "gamma_upper_t",
    "select_b_t",
    "fraction_lower_l",
    "fraction_est_l",
    "choose_estimate_n",
    "select_b_l",
    "select_b_small_eps",
    "b_from_gamma_up",
    "check_power_difference_bound",
    "check_log_power_bound",
    "check_log_majorant_positive",
    "dense_augmented_vectors",
    "best_direction",
    "max_directional_margin",
]

_GAMMA_REL_SLACK = 1e-9


def _int_part(epsilon: float) -> int:
    # floor on (0, 2); equals 1 at epsilon == 1 exactly
    return int(math.floor(epsilon))


@dataclass(frozen=True)
class BoundInputs:
    """Free quantities the bound and estimate formulas draw on.

    ``gamma_d``, ``t_c`` and ``gamma_prime_d`` are optional; each formula
    raises when a quantity it needs is missing.
    """

    epsilon: float
    b: float
    radius: float
    gamma_d: float | None = None
    t_c: int | None = None
    gamma_prime_d: float | None = None

    def __post_init__(self):
        if not (0.0 < self.epsilon < 2.0):
            raise ValueError(f"epsilon must lie in (0, 2), got {self.epsilon}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise ValueError(f"b must be positive, got {self.b}")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError(f"radius must be positive, got {self.radius}")
        if self.gamma_d is not None:
            if not (0.0 < self.gamma_d <= self.radius * (1.0 + _GAMMA_REL_SLACK)):
                raise ValueError(
                    f"gamma_d must lie in (0, radius], got {self.gamma_d} with radius {self.radius}"
                )
        if self.t_c is not None and self.t_c < 1:
            raise ValueError(f"t_c must be a positive integer, got {self.t_c}")
        if self.gamma_prime_d is not None and not self.gamma_prime_d > 0:
            raise ValueError(f"gamma_prime_d must be positive, got {self.gamma_prime_d}")

    def _need(self, name: str):
        if getattr(self, name) is None:
            raise ValueError(f"missing symbol: {name}")


@dataclass(frozen=True)
class EstimateChoice:
    """Window size used by the length-variant after-running estimate.

    ``n_low`` is the always-acceptable fallback (1), ``n_opt`` the near
    optimal candidate, ``chosen`` the one actually used and
    ``constraint_satisfied`` records which admissibility constraint the
    chosen value passed ("first", "second" or "both").
    """

    n_low: int
    n_opt: int
    chosen: int
    constraint_satisfied: str


@dataclass(frozen=True)
class BSelection:
    """A selected margin parameter together with its accuracy guarantee.

    ``guaranteed_fraction`` is the before-running lower bound on the
    achieved fraction of the maximum directional margin implied by the
    selection.  ``delta_constraint_ok`` reports (without enforcing) the
    small-exponent admissibility condition on delta where one applies.
    """

    delta: float
    b: float
    guaranteed_fraction: float
    omega: float | None = None
    delta_constraint_ok: bool | None = None


class RootResult(NamedTuple):
    root: float
    lo: float
    hi: float


class StrongFraction(NamedTuple):
    value: float
    root: float
    t_star: float | None


class InequalityCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool


class MajorantCheck(NamedTuple):
    lhs: float
    rhs: float
    holds: bool
    t0: float
    g_t0: float


# --------------------------------------------------------------------------
# root solver
# --------------------------------------------------------------------------

def bracketed_power_root(
    epsilon: float, alpha: float, beta: float, *, tol: float = 1e-12, max_iter: int = 200
) -> RootResult:
    """Unique root on [1, inf) of g(t) = t**eps - alpha*t**(eps-1) - beta.

    For eps > 0, alpha >= 1 and beta > 0 the root exists, is unique, and is
    bracketed by alpha + beta**(1/eps) and alpha/eps + beta**(1/eps) (the
    endpoints trade places at eps = 1, where the root is alpha + beta
    exactly).  Bisection runs until |g(root)| <= tol * max(1, root**eps).
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if alpha < 1:
        raise ValueError(f"alpha must be >= 1, got {alpha}")
    if beta <= 0:
        raise ValueError(f"beta must be positive, got {beta}")
    tail = beta ** (1.0 / epsilon)
    a, bnd = alpha + tail, alpha / epsilon + tail
    lo, hi = (a, bnd) if epsilon <= 1.0 else (bnd, a)
    if lo == hi:
        return RootResult(lo, lo, hi)

    def g(t: float) -> float:
        return t ** epsilon - alpha * t ** (epsilon - 1.0) - beta

    x_lo, x_hi = lo, hi
    mid = 0.5 * (x_lo + x_hi)
    for _ in range(max_iter):
        mid = 0.5 * (x_lo + x_hi)
        gm = g(mid)
        if abs(gm) <= tol * max(1.0, mid ** epsilon):
            break
        if gm < 0.0:
            x_lo = mid
        else:
            x_hi = mid
        if x_hi - x_lo <= 4.0 * math.ulp(mid):
            mid = 0.5 * (x_lo + x_hi)
            break
    return RootResult(mid, lo, hi)


# --------------------------------------------------------------------------
# count-scaled threshold variant
# --------------------------------------------------------------------------

def update_bound_t(inputs: BoundInputs) -> float:
    """Worst-case update count for the count-scaled threshold variant.

    (1/eps) R^2/gamma_d^2 + ((2/(2-eps)) b/gamma_d^2)^(1/eps) for
    eps <= 1; the leading coefficient drops to 1 for 1 < eps < 2.
    """
    inputs._need("gamma_d")
    e, g = inputs.epsilon, inputs.gamma_d
    lead = inputs.radius ** 2 / g ** 2
    tail = ((2.0 / (2.0 - e)) * inputs.b / g ** 2) ** (1.0 / e)
    return (lead / e if e <= 1.0 else lead) + tail


def fraction_lower_t(inputs: BoundInputs) -> float:
    """Before-running lower bound on the achieved margin fraction,
    (R^2/b + 2/(2-eps))^-1, valid for 0 < eps <= 1."""
    e = inputs.epsilon
    if e > 1.0:
        raise ValueError("the before-running fraction bound needs epsilon <= 1")
    return 1.0 / (inputs.radius ** 2 / inputs.b + 2.0 / (2.0 - e))


def fraction_est_t(inputs: BoundInputs) -> float:
    """After-running estimate ((R^2/b) t_c^(eps-1) + 2/(2-eps))^-1 for eps <= 1."""
    inputs._need("t_c")
    e = inputs.epsilon
    if e > 1.0:
        raise ValueError("the after-running estimate needs epsilon <= 1")
    return 1.0 / (
        (inputs.radius ** 2 / inputs.b) * float(inputs.t_c) ** (e - 1.0) + 2.0 / (2.0 - e)
    )


def fraction_lower_t_strong(inputs: BoundInputs) -> StrongFraction:
    """Sharper before-running fraction bound evaluated at the bound root.

    Solves t**eps = (R^2/gamma_d^2) t**(eps-1) + (2/(2-eps)) b/gamma_d^2
    and returns ((R^2/b) root^(eps-1) + 2/(2-eps))^-1 together with the
    root and the applicability pivot t_star (the bound is legitimate once
    t_c >= t_star; t_star <= 0 for eps >= 1/2, so the condition is then
    automatic).  At eps = 1 the pivot formula degenerates and t_star is
    None; the bound then coincides with the plain lower bound.
    """
    inputs._need("gamma_d")
    e, g, R, b = inputs.epsilon, inputs.gamma_d, inputs.radius, inputs.b
    if e > 1.0:
        raise ValueError("the strong fraction bound needs epsilon <= 1")
    alpha = R ** 2 / g ** 2
    beta = (2.0 / (2.0 - e)) * b / g ** 2
    if e == 1.0:
        root = alpha + beta
        t_star = None
    else:
        root = bracketed_power_root(e, max(alpha, 1.0), beta).root
        mag = abs(1.0 - 2.0 * e) * (2.0 - e) / (2.0 * e) * R ** 2 / b
        t_star = math.copysign(mag ** (1.0 / (1.0 - e)), 1.0 - 2.0 * e) if mag > 0 else 0.0
    value = 1.0 / ((R ** 2 / b) * root ** (e - 1.0) + 2.0 / (2.0 - e))
    return StrongFraction(value, root, t_star)


def gamma_upper_t(inputs: BoundInputs) -> float:
    """Upper bound on the maximum directional margin implied by an observed
    update count: R sqrt(1/t_c + (2/(2-eps)) (b/R^2) t_c^-eps)."""
    inputs._need("t_c")
    e, R, tc = inputs.epsilon, inputs.radius, float(inputs.t_c)
    return R * math.sqrt(1.0 / tc + (2.0 / (2.0 - e)) * (inputs.b / R ** 2) * tc ** (-e))


def select_b_t(epsilon: float, delta: float, gamma_d: float, radius: float) -> BSelection:
    """Margin parameter guaranteeing a fraction (delta + 2/(2-eps))^-1 for
    the count-scaled variant:

        b = R^2 (1 - eps/2)^(1-eps) delta^-eps (gamma_d^2/R^2)^(1-eps)

    For eps < 1/2 the admissibility ceiling on delta is evaluated and
    reported in ``delta_constraint_ok`` but deliberately not enforced.
    """
    _check_selection_args(epsilon, delta, gamma_d, radius)
    if epsilon > 1.0:
        raise ValueError("b selection for the count-scaled variant needs epsilon <= 1")
    e, R, g = epsilon, radius, gamma_d
    b = R ** 2 * (1.0 - e / 2.0) ** (1.0 - e) * delta ** -e * (g ** 2 / R ** 2) ** (1.0 - e)
    constraint_ok = None
    if e < 0.5:
        ceiling = (
            (1.0 - e / 2.0) ** ((1.0 - e) / e)
            * (g / R) ** (1.0 / e - 2.0)
            * (1.0 + (2.0 / (2.0 - e)) * g / R) ** (-1.0 / e)
        )
        constraint_ok = delta <= ceiling
    fraction = 1.0 / (delta + 2.0 / (2.0 - e))
    return BSelection(delta=delta, b=b, guaranteed_fraction=fraction, delta_constraint_ok=constraint_ok)


def fraction_asymptote(variant_is_t: bool, epsilon: float) -> float:
    """Large-b limit of the guaranteed fraction: 1 - eps/2 for the
    count-scaled variant (and for either variant when eps > 1), and
    1/(1 + eps) for the length-scaled variant with eps <= 1."""
    if variant_is_t or epsilon > 1.0:
        return 1.0 - epsilon / 2.0
    return 1.0 / (1.0 + epsilon)


# --------------------------------------------------------------------------
# length-scaled threshold variant
# --------------------------------------------------------------------------

def update_bound_l(inputs: BoundInputs) -> float:
    """Worst-case update count for the length-scaled threshold variant.

    For eps <= 1: (A/eps + B^(1/eps)) (ln(A/eps + B^(1/eps)))^(1-eps) with
    A = (2 + eps - 2[eps]) R^2/gamma_d^2 and B = (1+eps) b/gamma_d^(1+eps).
    For 1 < eps < 2: R^2/gamma_d^2 + ((2/(2-eps)) b/gamma_d^(1+eps))^(1/eps).
    """
    inputs._need("gamma_d")
    e, g, R, b = inputs.epsilon, inputs.gamma_d, inputs.radius, inputs.b
    if e > 1.0:
        return R ** 2 / g ** 2 + ((2.0 / (2.0 - e)) * b / g ** (1.0 + e)) ** (1.0 / e)
    a_coef = (2.0 + e - 2.0 * _int_part(e)) * R ** 2 / g ** 2
    b_coef = (1.0 + e) * b / g ** (1.0 + e)
    z = a_coef / e + b_coef ** (1.0 / e)
    if z <= 1.0:
        raise AssertionError("bound argument fell below 1; gamma_d exceeds the radius?")
    return z * math.log(z) ** (1.0 - e)


def fraction_lower_l(inputs: BoundInputs) -> float:
    """Before-running fraction bound for the length-scaled variant,
    ((1+eps)^(2 eps - [eps]) / (2 eps)^eps * R^(1+eps)/b + 1 + eps)^-1."""
    e = inputs.epsilon
    if e > 1.0:
        raise ValueError("the before-running fraction bound needs epsilon <= 1")
    coef = (1.0 + e) ** (2.0 * e - _int_part(e)) / (2.0 * e) ** e
    return 1.0 / (coef * inputs.radius ** (1.0 + e) / inputs.b + 1.0 + e)


def _eq_constraint_status(e: float, tc: float, ratio: float, n: int) -> str | None:
    """Which admissibility constraint an estimate window n passes, if any.

    ``ratio`` is R / gamma_prime_d.  The first constraint requires
    t_c >= n >= (1+eps)/2 * ratio^(1-eps); the second requires
    t_c >= n ((1 - eps/n)/(1 - eps))^(1/eps).
    """
    first = tc >= n and n >= 0.5 * (1.0 + e) * ratio ** (1.0 - e)
    second = tc >= n * ((1.0 - e / n) / (1.0 - e)) ** (1.0 / e)
    if first and second:
        return "both"
    if first:
        return "first"
    if second:
        return "second"
    return None


def _fraction_est_l_at(inputs: BoundInputs, n: int) -> float:
    e, R, b = inputs.epsilon, inputs.radius, inputs.b
    tc = float(inputs.t_c)
    gp = inputs.gamma_prime_d
    nn = float(n)
    inner = nn ** (1.0 + e) + (1.0 + e) / (2.0 * e) * (R / gp) ** (1.0 - e) * (
        tc ** e - (nn - e) / nn ** (1.0 - e)
    )
    return 1.0 / (R ** (1.0 + e) / b * inner / tc + 1.0 + e)


def choose_estimate_n(inputs: BoundInputs) -> EstimateChoice:
    """Pick the estimate window: the larger of the estimates at the
    fallback n = 1 and at the near optimal n = [ratio^(1-eps)/2] + 1,
    keeping only admissible candidates (n = 1 always is, since its second
    constraint reduces to t_c >= 1)."""
    inputs._need("t_c")
    inputs._need("gamma_prime_d")
    e = inputs.epsilon
    if not e < 1.0:
        raise ValueError("the estimate window applies only for epsilon < 1")
    tc = float(inputs.t_c)
    ratio = inputs.radius / inputs.gamma_prime_d
    n_opt = int(math.floor(0.5 * ratio ** (1.0 - e))) + 1
    status_low = _eq_constraint_status(e, tc, ratio, 1)
    if status_low is None:
        raise ValueError("no admissible estimate window: t_c < 1")
    chosen, status = 1, status_low
    if n_opt != 1:
        status_opt = _eq_constraint_status(e, tc, ratio, n_opt)
        if status_opt is not None and _fraction_est_l_at(inputs, n_opt) > _fraction_est_l_at(inputs, 1):
            chosen, status = n_opt, status_opt
    return EstimateChoice(n_low=1, n_opt=n_opt, chosen=chosen, constraint_satisfied=status)


def fraction_est_l(inputs: BoundInputs, choice: EstimateChoice | int | None = None) -> float:
    """After-running fraction estimate for the length-scaled variant with
    eps < 1.  Uses the observed update count and achieved margin:

        ( R^(1+eps)/b ( n^(1+eps) + (1+eps)/(2 eps) (R/gamma'_d)^(1-eps)
          (t_c^eps - (n-eps)/n^(1-eps)) ) / t_c + 1 + eps )^-1

    ``choice`` may pin the window; by default the better of n = 1 and the
    near optimal window is used.
    """
    inputs._need("t_c")
    inputs._need("gamma_prime_d")
    if not inputs.epsilon < 1.0:
        raise ValueError("the after-running estimate applies only for epsilon < 1")
    if choice is None:
        choice = choose_estimate_n(inputs)
    n = choice if isinstance(choice, int) else choice.chosen
    if n < 1:
        raise ValueError(f"estimate window must be >= 1, got {n}")
    return _fraction_est_l_at(inputs, n)


def _check_selection_args(epsilon: float, delta: float, gamma_d: float, radius: float) -> None:
    if not (0.0 < epsilon < 2.0):
        raise ValueError(f"epsilon must lie in (0, 2), got {epsilon}")
    if not (math.isfinite(delta) and delta > 0):
        raise ValueError(f"delta must be positive, got {delta}")
    if not (math.isfinite(radius) and radius > 0):
        raise ValueError(f"radius must be positive, got {radius}")
    if not (0.0 < gamma_d <= radius * (1.0 + _GAMMA_REL_SLACK)):
        raise ValueError(f"gamma_d must lie in (0, radius], got {gamma_d}")


def select_b_l(epsilon: float, delta: float, gamma_d: float, radius: float) -> BSelection:
    """Margin parameter guaranteeing a fraction (delta + 1 + eps)^-1 for
    the length-scaled variant:

        b = R^(1+eps) (1+eps)^(3 eps - 1 - [eps]) / (2 eps delta)^eps
            * (gamma_d/R)^(1-eps)

    Any larger b keeps the guarantee (it corresponds to a smaller delta).
    """
    _check_selection_args(epsilon, delta, gamma_d, radius)
    if epsilon > 1.0:
        raise ValueError("b selection for the length-scaled variant needs epsilon <= 1")
    e, R = epsilon, radius
    b = (
        R ** (1.0 + e)
        * (1.0 + e) ** (3.0 * e - 1.0 - _int_part(e))
        / (2.0 * e * delta) ** e
        * (gamma_d / R) ** (1.0 - e)
    )
    return BSelection(delta=delta, b=b, guaranteed_fraction=1.0 / (delta + 1.0 + e))


def select_b_small_eps(epsilon: float, delta: float, gamma_d: float, radius: float) -> BSelection:
    """Sharper margin parameter for the length-scaled variant deep in the
    small-exponent regime (accepted for eps <= 0.2):

        b = R^(1+eps) omega^eps (gamma_d/R)^(1-eps)

    with omega a logarithmically corrected coefficient in 1/delta.  The
    guarantee is again a fraction above (delta + 1 + eps)^-1, and delta
    must not exceed e^-1 (1 + e^-1) (2 + eps) R^2/gamma_d^2.  Setting
    delta = eps yields a fraction of at least (1 + 2 eps)^-1 >= 1 - 2 eps.
    """
    _check_selection_args(epsilon, delta, gamma_d, radius)
    if epsilon > 0.2:
        raise ValueError("the small-exponent selection is accepted only for epsilon <= 0.2")
    e, R, g = epsilon, radius, gamma_d
    r2g2 = R ** 2 / g ** 2
    ceiling = math.exp(-1.0) * (1.0 + math.exp(-1.0)) * (2.0 + e) * r2g2
    if delta > ceiling:
        raise ValueError(f"delta {delta} exceeds its admissibility ceiling {ceiling:.6g}")
    core = (
        (1.0 / delta)
        * (1.0 - e)
        * (1.0 + math.exp(-1.0))
        * (2.0 + e)
        * (1.0 + e) ** ((e - 1.0) / e)
    )
    log_arg = core * math.exp(1.0 / (1.0 - e)) * r2g2
    if log_arg <= 1.0:
        raise ValueError("selection coefficient is not positive for these arguments")
    omega = core * math.log(log_arg)
    b = R ** (1.0 + e) * omega ** e * (g / R) ** (1.0 - e)
    return BSelection(
        delta=delta, b=b, guaranteed_fraction=1.0 / (delta + 1.0 + e), omega=omega
    )


def b_from_gamma_up(epsilon: float, gamma_up: float, radius: float) -> float:
    """Margin parameter for the length-scaled variant driven by an upper
    bound on the maximum directional margin instead of the margin itself:

        b = R^(1+eps) (1+eps)^(3 eps - 1 - [eps]) / (2 eps)^eps
            * (gamma_up/R)^(1-eps)

    Algebraically this is the guaranteed selection with the accuracy
    parameter chosen as (gamma_d/gamma_up)^((1-eps)/eps) <= 1, which
    cancels every occurrence of the unknown gamma_d.
    """
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not (math.isfinite(radius) and radius > 0):
        raise ValueError(f"radius must be positive, got {radius}")
    if not (0.0 < gamma_up <= radius * (1.0 + _GAMMA_REL_SLACK)):
        raise ValueError(f"gamma_up must lie in (0, radius], got {gamma_up}")
    e, R = epsilon, radius
    return (
        R ** (1.0 + e)
        * (1.0 + e) ** (3.0 * e - 1.0 - _int_part(e))
        / (2.0 * e) ** e
        * (gamma_up / R) ** (1.0 - e)
    )


# --------------------------------------------------------------------------
# inequality oracles
# --------------------------------------------------------------------------

_CHECK_SLACK = 1e-12


def check_power_difference_bound(x: float, y: float, epsilon: float) -> InequalityCheck:
    """Check (x^(1+eps) - y^(1+eps))/(1+eps) <= (x^2 - y^2)/(2 y^(1-eps))
    for x, y > 0 and -1 < eps <= 1 (equality at x = y).

    ``holds`` allows a 1e-12 relative roundoff slack.
    """
    if not (x > 0 and y > 0):
        raise ValueError("x and y must be positive")
    if not (-1.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in (-1, 1], got {epsilon}")
    lhs = (x ** (1.0 + epsilon) - y ** (1.0 + epsilon)) / (1.0 + epsilon)
    rhs = (x * x - y * y) / (2.0 * y ** (1.0 - epsilon))
    slack = _CHECK_SLACK * max(1.0, abs(lhs), abs(rhs))
    return InequalityCheck(lhs, rhs, lhs <= rhs + slack)


def check_log_power_bound(t: float, epsilon: float) -> InequalityCheck:
    """Check (t^eps - 1)/eps <= t^eps (ln t)^(1-eps) - [eps] for t >= 1 and
    0 < eps <= 1 (equality at t = 1 and at eps = 1)."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if not (0.0 < epsilon <= 1.0):
        raise ValueError(f"epsilon must lie in (0, 1], got {epsilon}")
    lhs = (t ** epsilon - 1.0) / epsilon
    rhs = t ** epsilon * math.log(t) ** (1.0 - epsilon) - _int_part(epsilon)
    slack = _CHECK_SLACK * max(1.0, abs(lhs), abs(rhs))
    return InequalityCheck(lhs, rhs, lhs <= rhs + slack)


def check_log_majorant_positive(
    epsilon: float, alpha1: float, alpha2: float, beta: float
) -> MajorantCheck:
    """Check that t0 = (a/eps + beta^(1/eps)) (ln(a/eps + beta^(1/eps)))^(1-eps)
    with a = alpha1 + alpha2 majorizes the root of

        g(t) = t^eps - alpha1 (ln t / t)^(1-eps) - alpha2/t - beta

    i.e. that g(t0) > 0, for 0 < eps < 1, positive coefficients and
    a >= 2 + eps."""
    if not (0.0 < epsilon < 1.0):
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not (alpha1 > 0 and alpha2 > 0 and beta > 0):
        raise ValueError("alpha1, alpha2 and beta must be positive")
    alpha = alpha1 + alpha2
    if alpha < 2.0 + epsilon:
        raise ValueError(f"alpha1 + alpha2 must be >= 2 + epsilon, got {alpha}")
    z = alpha / epsilon + beta ** (1.0 / epsilon)
    t0 = z * math.log(z) ** (1.0 - epsilon)
    g_t0 = (
        t0 ** epsilon
        - alpha1 * (math.log(t0) / t0) ** (1.0 - epsilon)
        - alpha2 / t0
        - beta
    )
    return MajorantCheck(lhs=g_t0, rhs=0.0, holds=g_t0 > 0.0, t0=t0, g_t0=g_t0)


# --------------------------------------------------------------------------
# brute-force maximum-directional-margin oracle
# --------------------------------------------------------------------------

class OracleLimitError(ValueError):
    """The instance is too large for the brute-force margin oracle."""


_GRID_CACHE: dict[tuple[int, int], np.ndarray] = {}


def dense_augmented_vectors(tset: TrainingSet) -> np.ndarray:
    """Materialize the reflected, augmented and extended patterns as dense rows."""
    n = tset.n
    dim = tset.base_dim + 1 + (n if tset.delta > 0 else 0)
    out = np.zeros((n, dim))
    for k, p in enumerate(tset.patterns):
        s = float(p.label)
        out[k, p.indices] = s * p.values
        out[k, tset.base_dim] = s * tset.rho
        if tset.delta > 0:
            out[k, tset.base_dim + 1 + k] = s * tset.delta
    return out


def _unit_grid(dim: int, points: int) -> np.ndarray:
    """Deterministic near-uniform grid of unit directions (dim 2 or 3)."""
    key = (dim, points)
    cached = _GRID_CACHE.get(key)
    if cached is not None:
        return cached
    if dim == 2:
        ang = np.arange(points) * (2.0 * math.pi / points)
        grid = np.column_stack([np.cos(ang), np.sin(ang)])
    else:
        # Fibonacci sphere
        i = np.arange(points)
        z = 1.0 - (2.0 * i + 1.0) / points
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        phi = i * (math.pi * (3.0 - math.sqrt(5.0)))
        grid = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    _GRID_CACHE[key] = grid
    return grid


def _min_margins(vectors: np.ndarray, dirs: np.ndarray, chunk: int = 131072) -> np.ndarray:
    """min_k u . y_k for each direction u, evaluated in chunks."""
    out = np.empty(len(dirs))
    for start in range(0, len(dirs), chunk):
        block = dirs[start : start + chunk]
        out[start : start + chunk] = (block @ vectors.T).min(axis=1)
    return out


def _grid_best(vectors: np.ndarray, points: int) -> tuple[float, np.ndarray]:
    dirs = _unit_grid(vectors.shape[1], points)
    mins = _min_margins(vectors, dirs)
    best = int(np.argmax(mins))
    return float(mins[best]), dirs[best].copy()


def _refine_local(
    vectors: np.ndarray, u0: np.ndarray, value0: float, half_width: float, rounds: int = 8
) -> tuple[float, np.ndarray]:
    """Shrinking local grid search in the tangent space around u0."""
    dim = len(u0)
    seed = np.eye(dim)
    seed[:, 0] = u0
    q, _ = np.linalg.qr(seed)
    tang = [q[:, j] for j in range(1, dim)]
    best_u, best_v = u0.copy(), value0
    h = half_width
    steps = np.linspace(-1.0, 1.0, 17)
    for _ in range(rounds):
        if dim == 2:
            cands = best_u[None, :] + (h * steps)[:, None] * tang[0][None, :]
        else:
            aa, bb = np.meshgrid(h * steps, h * steps)
            cands = (
                best_u[None, :]
                + aa.ravel()[:, None] * tang[0][None, :]
                + bb.ravel()[:, None] * tang[1][None, :]
            )
        cands /= np.linalg.norm(cands, axis=1, keepdims=True)
        mins = _min_margins(vectors, cands)
        idx = int(np.argmax(mins))
        if mins[idx] > best_v:
            best_v = float(mins[idx])
            best_u = cands[idx].copy()
        h /= 4.0
    return best_v, best_u


def _equal_margin_direction(rows: np.ndarray) -> np.ndarray | None:
    """Direction giving every row the same margin: the normalized minimum
    norm point of the rows' affine hull.  None when the hull grazes 0."""
    gram = rows @ rows.T
    try:
        coef = np.linalg.solve(gram, np.ones(len(rows)))
    except np.linalg.LinAlgError:
        coef, *_ = np.linalg.lstsq(gram, np.ones(len(rows)), rcond=None)
    v = rows.T @ coef
    norm = float(np.linalg.norm(v))
    if not math.isfinite(norm) or norm < 1e-300:
        return None
    return v / norm


def _subset_polish(
    vectors: np.ndarray, best_v: float, best_u: np.ndarray, active_tol: float
) -> tuple[float, np.ndarray]:
    """Exact equal-margin solve over the near-active patterns.

    The support of the optimal direction sits among the patterns whose
    margins are close to the minimum once the search direction is nearly
    optimal; solving the equal-margin system for those subsets recovers
    the optimum to linear-solve precision.
    """
    margins_now = vectors @ best_u
    order = np.argsort(margins_now)
    active = [int(i) for i in order if margins_now[i] <= best_v + active_tol][:12]
    dim = vectors.shape[1]
    for size in range(1, dim + 1):
        for sub in itertools.combinations(active, size):
            u = _equal_margin_direction(vectors[list(sub)])
            if u is None:
                continue
            val = float((vectors @ u).min())
            if val > best_v:
                best_v, best_u = val, u
    return best_v, best_u


def best_direction(vectors: np.ndarray, *, grid_points: int = 1_000_000) -> tuple[float, np.ndarray]:
    """Maximize min_k u . y_k over unit directions u for dense rows y_k.

    Dimension 2 or 3 uses a uniform angular grid of at least ``grid_points``
    directions followed by local refinement and an exact equal-margin
    polish; the documented absolute tolerance is 1e-3 times the data scale,
    though the refined result is normally far tighter.  Up to dimension 6
    with at most 12 rows, candidate support subsets are enumerated and
    solved exactly instead.
    """
    n, dim = vectors.shape
    if dim == 1:
        col = vectors[:, 0]
        v_pos, v_neg = float(col.min()), float(-col.max())
        return (v_pos, np.array([1.0])) if v_pos >= v_neg else (v_neg, np.array([-1.0]))
    scale = float(np.max(np.linalg.norm(vectors, axis=1)))
    if dim in (2, 3):
        value, u = _grid_best(vectors, grid_points)
        mesh = (2.0 * math.pi / grid_points) if dim == 2 else 2.5 * math.sqrt(4.0 * math.pi / grid_points)
        value, u = _refine_local(vectors, u, value, half_width=4.0 * mesh)
        value, u = _subset_polish(vectors, value, u, active_tol=1e-3 * max(scale, 1.0))
        return value, u
    if n <= 12 and dim <= 6:
        best_v, best_u = -math.inf, None
        for size in range(1, dim + 1):
            for sub in itertools.combinations(range(n), size):
                u = _equal_margin_direction(vectors[list(sub)])
                if u is None:
                    continue
                val = float((vectors @ u).min())
                if val > best_v:
                    best_v, best_u = val, u
        if best_u is None:
            # every subset hull grazed the origin; fall back to a raw row
            best_u = vectors[0] / np.linalg.norm(vectors[0])
            best_v = float((vectors @ best_u).min())
        return best_v, best_u
    raise OracleLimitError(
        f"instance exceeds oracle limits (dimension {dim}, {n} patterns): "
        "grid mode needs dimension <= 3, enumeration mode needs <= 12 patterns "
        "and dimension <= 6"
    )


def max_directional_margin(tset: TrainingSet, *, grid_points: int = 1_000_000) -> float | None:
    """Brute-force maximum directional margin of a small training set.

    Returns None when the reflected data are not linearly separable
    (best achievable minimum margin <= 0).
    """
    value, _ = best_direction(dense_augmented_vectors(tset), grid_points=grid_points)
    return value if value > 0.0 else None
