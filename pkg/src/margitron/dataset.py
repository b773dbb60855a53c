"""Sparse dataset handling.

Parses svmlight-style text, builds the augmented view of the data (every
pattern gets one extra coordinate fixed at ``rho`` so the separating
hyperplane is homogeneous) and, optionally, the 2-norm soft-margin
extension (one virtual coordinate per pattern at distance ``delta``).
Neither the sign reflection of negative patterns nor the extension
coordinates are ever materialized; downstream code applies them through
the pattern label and an update-count identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "DatasetError",
    "SparsePattern",
    "TrainingSet",
    "parse_svmlight",
    "parse_prediction_data",
    "load_svmlight",
    "format_svmlight",
    "build_training_set",
]

_NORM_REL_TOL = 1e-12


class DatasetError(ValueError):
    """Malformed input data or invalid construction parameters."""


@dataclass(frozen=True, eq=False)
class SparsePattern:
    """One training instance: sorted sparse features plus a cached squared norm.

    ``indices`` are zero-based, strictly increasing and free of duplicates;
    ``base_norm_sq`` caches the squared 2-norm of the raw feature vector.
    """

    id: int
    label: int
    indices: np.ndarray
    values: np.ndarray
    base_norm_sq: float

    def __post_init__(self):
        if self.label not in (1, -1):
            raise DatasetError(f"pattern {self.id}: label must be +1 or -1, got {self.label}")
        idx, val = self.indices, self.values
        if idx.shape != val.shape or idx.ndim != 1:
            raise DatasetError(f"pattern {self.id}: index/value shape mismatch")
        if len(idx) and (int(idx[0]) < 0 or np.any(np.diff(idx) <= 0)):
            raise DatasetError(
                f"pattern {self.id}: feature indices must be non-negative, "
                "strictly increasing and free of duplicates"
            )
        if not np.all(np.isfinite(val)):
            raise DatasetError(f"pattern {self.id}: non-finite feature value")
        expect = float(val @ val)
        if abs(self.base_norm_sq - expect) > _NORM_REL_TOL * max(1.0, expect):
            raise DatasetError(f"pattern {self.id}: cached squared norm disagrees with features")

    @classmethod
    def create(cls, pid: int, label: int, indices: Sequence[int], values: Sequence[float]) -> "SparsePattern":
        """Build a pattern from parallel index/value sequences, computing the norm."""
        idx = np.asarray(indices, dtype=np.int64)
        val = np.asarray(values, dtype=np.float64)
        idx.setflags(write=False)
        val.setflags(write=False)
        return cls(pid, label, idx, val, float(val @ val))

    @property
    def features(self) -> list[tuple[int, float]]:
        return list(zip((int(i) for i in self.indices), (float(v) for v in self.values)))


@dataclass(frozen=True)
class TrainingSet:
    """Immutable augmented (and optionally extended) view of all patterns.

    ``radius`` is the largest pattern norm in the working space,
    sqrt(max_k base_norm_sq_k + rho**2 + delta**2).  ``delta == 0``
    disables the soft-margin extension.
    """

    patterns: tuple[SparsePattern, ...]
    rho: float
    delta: float
    base_dim: int
    radius: float
    n: int

    def pattern_norm_sq(self, k: int) -> float:
        """Squared norm of pattern k in the augmented + extended space."""
        p = self.patterns[k]
        return p.base_norm_sq + self.rho * self.rho + self.delta * self.delta


def _parse_feature_tokens(tokens: Iterable[str], zero_based: bool, lineno: int):
    idxs: list[int] = []
    vals: list[float] = []
    prev = -1
    for tok in tokens:
        if ":" not in tok:
            raise DatasetError(f"line {lineno}: malformed feature token {tok!r}")
        si, sv = tok.split(":", 1)
        try:
            i = int(si)
            v = float(sv)
        except ValueError:
            raise DatasetError(f"line {lineno}: malformed feature token {tok!r}") from None
        if not math.isfinite(v):
            raise DatasetError(f"line {lineno}: non-finite feature value in {tok!r}")
        if not zero_based:
            if i < 1:
                raise DatasetError(f"line {lineno}: one-based index must be >= 1, got {i}")
            i -= 1
        elif i < 0:
            raise DatasetError(f"line {lineno}: negative feature index {i}")
        if i <= prev:
            raise DatasetError(f"line {lineno}: feature indices must be strictly increasing")
        prev = i
        idxs.append(i)
        vals.append(v)
    return idxs, vals


def _parse_label(tok: str, lineno: int) -> int:
    try:
        lab = float(tok)
    except ValueError:
        raise DatasetError(f"line {lineno}: cannot parse label {tok!r}") from None
    if not math.isfinite(lab):
        raise DatasetError(f"line {lineno}: non-finite label {tok!r}")
    if lab == 0:
        raise DatasetError(f"line {lineno}: label 0 carries no sign")
    return 1 if lab > 0 else -1


def parse_svmlight(text: str | bytes, *, zero_based: bool = False) -> list[SparsePattern]:
    """Parse svmlight-format text into a list of patterns.

    Each non-empty, non-comment line reads ``<label> <idx>:<val> ...`` and
    ``#`` starts a comment running to the end of the line.  Labels > 0 map
    to +1 and labels < 0 map to -1; a label of exactly 0 is rejected.
    Feature indices are one-based by default (the svmlight convention) and
    converted to zero-based; pass ``zero_based=True`` when the input
    already counts from zero.  LF and CRLF line endings are both accepted.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    patterns: list[SparsePattern] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) < 2:
            raise DatasetError(f"line {lineno}: expected '<label> <idx>:<val> ...'")
        label = _parse_label(tokens[0], lineno)
        idxs, vals = _parse_feature_tokens(tokens[1:], zero_based, lineno)
        patterns.append(SparsePattern.create(len(patterns), label, idxs, vals))
    if not patterns:
        raise DatasetError("empty input: no patterns found")
    return patterns


def parse_prediction_data(
    text: str | bytes, *, zero_based: bool = False
) -> list[tuple[int | None, np.ndarray, np.ndarray]]:
    """Parse prediction-time data, where the label may be a lone ``?``.

    Returns one ``(label_or_None, indices, values)`` triple per data line.
    Unlike :func:`parse_svmlight`, an empty file is valid and yields an
    empty list, and a line may consist of a bare label token.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    rows: list[tuple[int | None, np.ndarray, np.ndarray]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        label = None if tokens[0] == "?" else _parse_label(tokens[0], lineno)
        idxs, vals = _parse_feature_tokens(tokens[1:], zero_based, lineno)
        rows.append((label, np.asarray(idxs, dtype=np.int64), np.asarray(vals, dtype=np.float64)))
    return rows


def load_svmlight(path, *, zero_based: bool = False) -> list[SparsePattern]:
    """Read and parse an svmlight file."""
    with open(path, "rb") as fh:
        return parse_svmlight(fh.read(), zero_based=zero_based)


def format_svmlight(patterns: Iterable[SparsePattern], *, zero_based: bool = False) -> str:
    """Serialize patterns back to svmlight text (inverse of parse_svmlight).

    Float values are written with shortest round-trip precision, so
    parse(format(parse(text))) reproduces the patterns exactly.
    """
    off = 0 if zero_based else 1
    lines = []
    for p in patterns:
        feats = " ".join(f"{int(i) + off}:{float(v)!r}" for i, v in zip(p.indices, p.values))
        lines.append(f"{'+1' if p.label > 0 else '-1'} {feats}".rstrip())
    return "\n".join(lines) + "\n"


def build_training_set(
    patterns: Sequence[SparsePattern], rho: float, delta: float = 0.0
) -> TrainingSet:
    """Assemble the immutable training set and compute its radius.

    Requires ``rho > 0`` and ``delta >= 0``.  Pattern ids must equal their
    positions so that per-pattern bookkeeping downstream stays unambiguous.
    """
    if not patterns:
        raise DatasetError("at least one pattern is required")
    if not (math.isfinite(rho) and rho > 0):
        raise DatasetError(f"rho must be positive, got {rho}")
    if not (math.isfinite(delta) and delta >= 0):
        raise DatasetError(f"delta must be non-negative, got {delta}")
    for pos, p in enumerate(patterns):
        if p.id != pos:
            raise DatasetError(f"pattern at position {pos} has id {p.id}; ids must be sequential")
    base_dim = 0
    max_norm = 0.0
    for p in patterns:
        if len(p.indices):
            base_dim = max(base_dim, int(p.indices[-1]) + 1)
        max_norm = max(max_norm, p.base_norm_sq)
    radius = math.sqrt(max_norm + rho * rho + delta * delta)
    return TrainingSet(
        patterns=tuple(patterns),
        rho=float(rho),
        delta=float(delta),
        base_dim=base_dim,
        radius=radius,
        n=len(patterns),
    )
