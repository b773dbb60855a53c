"""Shared test utilities: independent brute-force oracles and dataset
generators.  The materializer here is deliberately written with explicit
loops, separate from the library's vectorized code paths, so that
dot-product comparisons check two independent routes."""

from __future__ import annotations

import numpy as np

from margitron import ModelState, SparsePattern, TrainingSet, build_training_set


def make_pattern(pid: int, label: int, pairs) -> SparsePattern:
    idx = [i for i, _ in pairs]
    val = [v for _, v in pairs]
    return SparsePattern.create(pid, label, idx, val)


def dense_reflected(tset: TrainingSet) -> np.ndarray:
    """Materialize every pattern's reflected/augmented/extended vector,
    element by element."""
    extended = tset.delta > 0
    dim = tset.base_dim + 1 + (tset.n if extended else 0)
    rows = np.zeros((tset.n, dim))
    for k in range(tset.n):
        p = tset.patterns[k]
        s = p.label
        for i, v in zip(p.indices, p.values):
            rows[k][int(i)] = s * float(v)
        rows[k][tset.base_dim] = s * tset.rho
        if extended:
            rows[k][tset.base_dim + 1 + k] = s * tset.delta
    return rows


def dense_state_vector(state: ModelState, tset: TrainingSet) -> np.ndarray:
    """Rebuild the accumulated weight vector densely from an update history.

    Valid because the accumulator is exactly the sum of the reflected
    vectors it was updated with: counts[k] copies of row k.
    """
    rows = dense_reflected(tset)
    a = np.zeros(rows.shape[1])
    for k in range(tset.n):
        a += float(state.counts[k]) * rows[k]
    return a


def random_separable_set(
    rng: np.random.Generator,
    n: int,
    dim: int,
    *,
    rho: float = 1.0,
    delta: float = 0.0,
    gap: float = 0.2,
    sparsify: bool = False,
) -> TrainingSet:
    """Random linearly separable data: labels come from a hidden affine
    separator and points inside the margin band are resampled, so the
    augmented data are separable with a known cushion."""
    normal = rng.standard_normal(dim)
    normal /= np.linalg.norm(normal)
    offset = rng.uniform(-0.3, 0.3)
    patterns = []
    while len(patterns) < n:
        x = rng.uniform(-1.0, 1.0, size=dim)
        score = float(normal @ x + offset)
        if abs(score) < gap:
            continue
        label = 1 if score > 0 else -1
        if sparsify and dim > 2:
            keep = rng.random(dim) < 0.7
            keep[rng.integers(dim)] = True
            x = np.where(keep, x, 0.0)
            # resampling keeps the separator honest for the surviving coords
            if abs(float(normal @ x + offset)) < gap or (1 if normal @ x + offset > 0 else -1) != label:
                continue
        nz = np.flatnonzero(x)
        if len(nz) == 0:
            continue
        patterns.append(SparsePattern.create(len(patterns), label, nz.tolist(), x[nz].tolist()))
    labels = {p.label for p in patterns}
    if len(labels) < 2:
        # force one flipped point well clear of the band
        x = normal * (-2.0 * gap - 1.0) - offset * normal
        score = float(normal @ x + offset)
        label = 1 if score > 0 else -1
        nz = np.flatnonzero(x)
        patterns[-1] = SparsePattern.create(len(patterns) - 1, label, nz.tolist(), x[nz].tolist())
    return build_training_set(patterns, rho, delta)


def run_random_updates(rng, tset, steps: int):
    """Apply a random update sequence regardless of the threshold test."""
    from margitron import ModelState, apply_update, inner_product

    state = ModelState.initial(tset.base_dim, tset.n)
    for _ in range(steps):
        k = int(rng.integers(tset.n))
        dot = inner_product(state, k, tset)
        apply_update(state, k, tset, dot)
    return state
