"""Training procedure: full epochs over all patterns alternating with
mini-epochs over a reduced active set, plus the two-stage protocol that
turns a constant-threshold run into a margin upper bound and feeds it to a
small-exponent run.

Presentation order is file order within full epochs and discovery order
within active sets; an optional seeded shuffle permutes each full epoch
for experimentation.  Termination requires one clean full epoch, so the
active-set scheduling only reorders presentations and never weakens the
convergence contract.
"""

from __future__ import annotations

import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import engine
from .analysis import BoundInputs, b_from_gamma_up, fraction_est_l, fraction_est_t, gamma_upper_t
from .dataset import TrainingSet
from .engine import HyperParams, MarginSummary, ModelState, Variant

__all__ = [
    "EpochStats",
    "TrainReport",
    "StageReport",
    "ProtocolReport",
    "ProtocolError",
    "train",
    "successive_runnings",
]

STAGE1_B_OVER_R2 = 5.0


class ProtocolError(RuntimeError):
    """A protocol stage failed to converge within the epoch cap."""


@dataclass(frozen=True)
class EpochStats:
    """Summary of one full epoch: updates it produced and the state after it."""

    epoch: int
    updates: int
    total_updates: int
    norm: float
    threshold: float


@dataclass
class TrainReport:
    t_c: int
    full_epochs: int
    mini_epochs: int
    margins: MarginSummary
    f_est: float | None
    gamma_up: float | None
    wall_time: float
    converged: bool
    trace: list[EpochStats] = field(default_factory=list)
    update_sequence: list[int] | None = None


@dataclass(frozen=True)
class StageReport:
    epsilon: float
    b: float
    train: TrainReport


@dataclass(frozen=True)
class ProtocolReport:
    """Two-stage run: ``gamma_up`` is the margin upper bound fed to stage 2
    (the raw estimate clamped to the radius, which is always a valid upper
    bound) and ``b2`` the stage-2 margin parameter derived from it."""

    stage1: StageReport
    stage2: StageReport
    gamma_up_raw: float
    gamma_up: float
    b2: float
    margins: MarginSummary


def train(
    tset: TrainingSet,
    params: HyperParams,
    *,
    shuffle_seed: int | None = None,
    record_updates: bool = False,
) -> tuple[ModelState, TrainReport]:
    """Run the epoch / active-set loop until a clean full epoch or the cap.

    Each full epoch presents every pattern in order and collects the ones
    that triggered an update into a fresh active set, which is then cycled
    for up to ``params.n_ep`` mini-epochs (stopping early once a mini-epoch
    is clean) before the next full epoch.  On a clean full epoch the run
    has converged; hitting ``params.max_full_epochs`` returns the partial
    state with ``converged=False`` and no after-running estimates.
    """
    started = time.perf_counter()
    n = tset.n
    state = ModelState.initial(tset.base_dim, n)

    # per-pattern constants, with the sign folded in once
    idx_of = [p.indices for p in tset.patterns]
    sval_of = [float(p.label) * p.values for p in tset.patterns]
    srho_of = [float(p.label) * tset.rho for p in tset.patterns]
    ynorm_of = [tset.pattern_norm_sq(k) for k in range(n)]
    d2 = tset.delta * tset.delta

    w = state.w
    counts = state.counts
    a_aug = 0.0
    t = 0
    norm_sq = 0.0

    is_t_variant = params.variant is Variant.T
    b = params.b
    exp_t = 1.0 - params.epsilon
    exp_l = 0.5 * (1.0 - params.epsilon)

    def current_threshold() -> float:
        if t == 0:
            return 0.0
        if is_t_variant:
            return b * float(t) ** exp_t
        if norm_sq == 0.0 and exp_l < 0.0:
            return math.inf
        return b * norm_sq ** exp_l

    rng = np.random.default_rng(shuffle_seed) if shuffle_seed is not None else None
    seq: list[int] | None = [] if record_updates else None
    trace: list[EpochStats] = []
    full_epochs = 0
    mini_epochs = 0
    converged = False

    while full_epochs < params.max_full_epochs:
        full_epochs += 1
        order = rng.permutation(n) if rng is not None else range(n)
        active: list[int] = []
        thr = current_threshold()
        for k in order:
            dot = w[idx_of[k]] @ sval_of[k] + srho_of[k] * a_aug + d2 * counts[k]
            if dot <= thr:
                w[idx_of[k]] += sval_of[k]
                a_aug += srho_of[k]
                counts[k] += 1
                t += 1
                norm_sq += ynorm_of[k] + 2.0 * dot
                if norm_sq < 0.0:
                    norm_sq = 0.0
                thr = current_threshold()
                active.append(int(k))
                if seq is not None:
                    seq.append(int(k))
        trace.append(EpochStats(full_epochs, len(active), t, math.sqrt(norm_sq), thr))
        if not active:
            converged = True
            break
        for _ in range(params.n_ep):
            mini_epochs += 1
            updated = False
            for k in active:
                dot = w[idx_of[k]] @ sval_of[k] + srho_of[k] * a_aug + d2 * counts[k]
                if dot <= thr:
                    w[idx_of[k]] += sval_of[k]
                    a_aug += srho_of[k]
                    counts[k] += 1
                    t += 1
                    norm_sq += ynorm_of[k] + 2.0 * dot
                    if norm_sq < 0.0:
                        norm_sq = 0.0
                    thr = current_threshold()
                    updated = True
                    if seq is not None:
                        seq.append(int(k))
            if not updated:
                break

    state.a_aug = float(a_aug)
    state.t = t
    state.norm_sq = float(norm_sq)

    if state.norm_sq > 0.0:
        marg = engine.margins(state, tset)
    else:
        # aborted run whose updates cancelled the accumulator (inseparable
        # data); every functional margin is exactly zero and no direction
        # exists, reported as zero margins
        marg = MarginSummary(0.0, 0.0, 0.0)
    f_est, gamma_up = _after_running_estimates(tset, params, marg, t, converged)
    report = TrainReport(
        t_c=t,
        full_epochs=full_epochs,
        mini_epochs=mini_epochs,
        margins=marg,
        f_est=f_est,
        gamma_up=gamma_up,
        wall_time=time.perf_counter() - started,
        converged=converged,
        trace=trace,
        update_sequence=seq,
    )
    return state, report


def _after_running_estimates(
    tset: TrainingSet,
    params: HyperParams,
    marg: MarginSummary,
    t_c: int,
    converged: bool,
) -> tuple[float | None, float | None]:
    """Estimates that are only meaningful for a converged run.

    The fraction estimate uses the count-scaled formula for that variant
    (for epsilon <= 1) and the length-scaled formula otherwise; at
    epsilon = 1 the two coincide, which also lets the margin upper bound
    carry over to the length-scaled variant there.
    """
    if not converged or t_c < 1:
        return None, None
    e = params.epsilon
    inputs = BoundInputs(
        epsilon=e,
        b=params.b,
        radius=tset.radius,
        t_c=t_c,
        gamma_prime_d=marg.directional_margin if marg.directional_margin > 0 else None,
    )
    f_est: float | None = None
    gamma_up: float | None = None
    if params.variant is Variant.T:
        if e <= 1.0:
            f_est = fraction_est_t(inputs)
        gamma_up = gamma_upper_t(inputs)
    else:
        if e < 1.0 and inputs.gamma_prime_d is not None:
            f_est = fraction_est_l(inputs)
        elif e == 1.0:
            f_est = fraction_est_t(inputs)
            gamma_up = gamma_upper_t(inputs)
    return f_est, gamma_up


def successive_runnings(
    tset: TrainingSet,
    epsilon2: float,
    n_ep: int,
    *,
    variant: Variant = Variant.L,
    max_full_epochs: int = 100_000,
    shuffle_seed: int | None = None,
    record_updates: bool = False,
) -> tuple[ModelState, ProtocolReport]:
    """Two-stage protocol: a constant-threshold run fixes the scale, a
    small-exponent run collects the margin.

    Stage 1 trains with epsilon = 1 and b = 5 R^2; its update count yields
    an upper bound on the maximum directional margin, from which the
    stage-2 margin parameter follows with no reference to the unknown
    margin itself.  Stage 2 trains with ``epsilon2`` (in (0, 1)) and
    reports its after-running fraction estimate.
    """
    if not (0.0 < epsilon2 < 1.0):
        raise ValueError(f"epsilon2 must lie in (0, 1), got {epsilon2}")
    if variant is Variant.T and epsilon2 < 0.5:
        warnings.warn(
            "the count-scaled variant lacks strong before-running guarantees "
            "for epsilon < 1/2; the second stage may behave poorly",
            RuntimeWarning,
            stacklevel=2,
        )
    radius = tset.radius
    b1 = STAGE1_B_OVER_R2 * radius * radius
    params1 = HyperParams(variant, 1.0, b1, n_ep, max_full_epochs)
    _, rep1 = train(tset, params1, shuffle_seed=shuffle_seed, record_updates=record_updates)
    if not rep1.converged:
        raise ProtocolError("stage 1 did not converge within the epoch cap")

    gamma_up_raw = gamma_upper_t(
        BoundInputs(epsilon=1.0, b=b1, radius=radius, t_c=rep1.t_c)
    )
    gamma_up = min(gamma_up_raw, radius)  # the margin never exceeds the radius
    b2 = b_from_gamma_up(epsilon2, gamma_up, radius)
    params2 = HyperParams(variant, epsilon2, b2, n_ep, max_full_epochs)
    state2, rep2 = train(tset, params2, shuffle_seed=shuffle_seed, record_updates=record_updates)

    report = ProtocolReport(
        stage1=StageReport(epsilon=1.0, b=b1, train=rep1),
        stage2=StageReport(epsilon=epsilon2, b=b2, train=rep2),
        gamma_up_raw=gamma_up_raw,
        gamma_up=gamma_up,
        b2=b2,
        margins=rep2.margins,
    )
    return state2, report
