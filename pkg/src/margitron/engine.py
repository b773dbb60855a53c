"""Weight-vector state, misclassification tests and the additive update.

The accumulated weight vector lives in the augmented (and, with a
soft-margin extension, extended) space but is stored decomposed: a dense
base-space vector ``w``, a single augmented component ``a_aug`` and the
per-pattern update counts.  Because the extension coordinate of pattern k
carries the pattern's sign, the extension part of any inner product with
pattern k collapses to ``delta**2 * counts[k]``, so the extension is never
materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .dataset import TrainingSet

__all__ = [
    "Variant",
    "HyperParams",
    "ModelState",
    "MarginSummary",
    "inner_product",
    "threshold",
    "is_misclassified",
    "apply_update",
    "margins",
    "decision_value",
    "predict",
]


class Variant(str, Enum):
    """Misclassification-threshold schedule: update-count or vector-length scaled."""

    T = "t"
    L = "l"


@dataclass(frozen=True)
class HyperParams:
    """Training hyperparameters.

    ``epsilon`` controls how fast the margin threshold decays; the interval
    (0, 2) is covered by the convergence analysis and epsilon = 1 is the
    classical perceptron with (constant) margin ``b``.  ``n_ep`` caps the
    mini-epochs run on each reduced active set and ``max_full_epochs`` is a
    safety valve against inseparable data.
    """

    variant: Variant
    epsilon: float
    b: float
    n_ep: int = 50
    max_full_epochs: int = 100_000

    def __post_init__(self):
        if not isinstance(self.variant, Variant):
            object.__setattr__(self, "variant", Variant(self.variant))
        if not (0.0 < self.epsilon < 2.0):
            raise ValueError(f"epsilon must lie in (0, 2), got {self.epsilon}")
        if not (math.isfinite(self.b) and self.b > 0):
            raise ValueError(f"b must be positive, got {self.b}")
        if self.n_ep < 1:
            raise ValueError("n_ep must be a positive integer")
        if self.max_full_epochs < 1:
            raise ValueError("max_full_epochs must be a positive integer")


@dataclass
class ModelState:
    """Mutable accumulator state: a_t decomposed plus its cached squared norm."""

    w: np.ndarray
    a_aug: float
    counts: np.ndarray
    t: int
    norm_sq: float

    @classmethod
    def initial(cls, base_dim: int, n: int) -> "ModelState":
        return cls(
            w=np.zeros(base_dim, dtype=np.float64),
            a_aug=0.0,
            counts=np.zeros(n, dtype=np.int64),
            t=0,
            norm_sq=0.0,
        )

    def copy(self) -> "ModelState":
        return ModelState(self.w.copy(), self.a_aug, self.counts.copy(), self.t, self.norm_sq)

    def recomputed_norm_sq(self, tset: TrainingSet) -> float:
        """Recompute ||a||^2 from the decomposition, bypassing the running total."""
        ext = float(self.counts @ self.counts) * tset.delta * tset.delta
        return float(self.w @ self.w) + self.a_aug * self.a_aug + ext


@dataclass(frozen=True)
class MarginSummary:
    """Smallest functional margin plus its directional and geometric forms.

    The directional margin divides by ||a||; the geometric margin divides
    by the norm of a with its augmented component removed, measuring the
    margin against the hyperplane whose bias the augmentation supplies.
    """

    min_functional: float
    directional_margin: float
    geometric_margin: float


def inner_product(state: ModelState, k: int, tset: TrainingSet) -> float:
    """Inner product of a_t with the reflected/augmented/extended pattern k."""
    if not 0 <= k < tset.n:
        raise IndexError(f"pattern index {k} out of range [0, {tset.n})")
    p = tset.patterns[k]
    s = float(p.label)
    dot = s * float(state.w[p.indices] @ p.values)
    dot += s * tset.rho * state.a_aug
    if tset.delta:
        dot += tset.delta * tset.delta * float(state.counts[k])
    return dot


def threshold(params: HyperParams, state: ModelState) -> float:
    """Current misclassification threshold; zero before the first update."""
    if state.t == 0:
        return 0.0
    e = params.epsilon
    if params.variant is Variant.T:
        return params.b * float(state.t) ** (1.0 - e)
    norm = math.sqrt(max(state.norm_sq, 0.0))
    if norm == 0.0 and e > 1.0:
        return math.inf
    return params.b * norm ** (1.0 - e)


def is_misclassified(params: HyperParams, state: ModelState, k: int, tset: TrainingSet) -> bool:
    """True when pattern k fails to beat the threshold (equality counts as failure)."""
    return inner_product(state, k, tset) <= threshold(params, state)


def apply_update(state: ModelState, k: int, tset: TrainingSet, dot: float) -> None:
    """Add the reflected pattern k to the state in place.

    ``dot`` must be the inner product already evaluated for the
    misclassification test; the squared norm is advanced through
    ||a + y||^2 = ||a||^2 + ||y||^2 + 2 a.y without a recomputation.
    """
    p = tset.patterns[k]
    s = float(p.label)
    state.w[p.indices] += s * p.values
    state.a_aug += s * tset.rho
    state.counts[k] += 1
    state.t += 1
    state.norm_sq += tset.pattern_norm_sq(k) + 2.0 * dot
    if state.norm_sq < 0.0:
        state.norm_sq = 0.0


def margins(state: ModelState, tset: TrainingSet) -> MarginSummary:
    """Margins achieved by the current state over the whole training set.

    Requires at least one update and a nonzero accumulator (updates on
    inseparable data can cancel the vector back to zero, leaving no
    direction to measure).
    """
    if state.t < 1:
        raise ValueError("margins are undefined before the first update")
    if state.norm_sq <= 0.0:
        raise ValueError("margins are undefined for a zero weight vector")
    worst = math.inf
    for k in range(tset.n):
        d = inner_product(state, k, tset)
        if d < worst:
            worst = d
    norm = math.sqrt(state.norm_sq)
    w_sq = state.norm_sq - state.a_aug * state.a_aug
    if w_sq > 0.0:
        geometric = worst / math.sqrt(w_sq)
    else:
        geometric = math.inf if worst >= 0 else -math.inf
    return MarginSummary(
        min_functional=worst,
        directional_margin=worst / norm,
        geometric_margin=geometric,
    )


def decision_value(
    w: np.ndarray, a_aug: float, rho: float, indices: np.ndarray, values: np.ndarray
) -> float:
    """Raw score of an unseen pattern: w.x plus the augmentation bias."""
    indices = np.asarray(indices, dtype=np.int64)
    values = np.asarray(values, dtype=np.float64)
    if indices.shape != values.shape or indices.ndim != 1:
        raise ValueError("indices and values must be parallel 1-d arrays")
    if len(indices):
        if int(indices[0]) < 0 or np.any(np.diff(indices) <= 0):
            raise ValueError("feature indices must be non-negative and strictly increasing")
        if int(indices[-1]) >= len(w):
            raise IndexError(f"feature index {int(indices[-1])} outside model dimension {len(w)}")
    return float(w[indices] @ values) + rho * a_aug


def predict(
    w: np.ndarray, a_aug: float, rho: float, indices: np.ndarray, values: np.ndarray
) -> int:
    """Predicted sign for an unseen pattern; an exact tie returns +1."""
    return 1 if decision_value(w, a_aug, rho, indices, values) >= 0.0 else -1
