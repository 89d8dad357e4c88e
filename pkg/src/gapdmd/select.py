"""Model-order recommendation from dimples in the gap spectrogram."""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import BoundsError, ValidationError
from .innovation import GapSpectrogram
from .matstore import SnapshotMatrix
from .subspace import sensitivity_check

__all__ = [
    "OrderRecommendation",
    "ConditioningReport",
    "recommend_order",
    "conditioning_report",
    "sensitivity_table",
]

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class OrderRecommendation:
    """Recommended window size and the evidence behind it.

    ``per_row_argmin`` holds one entry per spectrogram row (0 where a row
    has no admissible entries). ``depth`` is the median over rows of
    ``median(row[k_min:n_star]) / row[n_star]``: the typical gap before the
    dimple relative to the dimple itself.
    """

    n_star: int
    per_row_argmin: np.ndarray
    period_estimate: int | None
    depth: float
    confidence: str
    agreement: float

    def to_json(self) -> str:
        return json.dumps(
            {
                "n_star": int(self.n_star),
                "confidence": self.confidence,
                "period_estimate": self.period_estimate,
                "depth": float(self.depth),
            },
            separators=(",", ":"),
        )


@dataclass(frozen=True)
class ConditioningReport:
    ks: np.ndarray
    condition: np.ndarray
    colinear: np.ndarray
    colinear_tol: float

    @property
    def flagged(self) -> np.ndarray:
        """Window sizes whose prefix matrix is numerically co-linear."""
        return self.ks[self.colinear]


def _row_argmin(row: np.ndarray, k_min: int, tie_tol: float) -> int:
    candidates = row[k_min - 1 :]
    ok = ~np.isnan(candidates)
    if not ok.any():
        return 0
    best = np.nanmin(candidates)
    # smallest k whose value is within tie_tol of the minimum
    return int(np.flatnonzero(ok & (candidates <= best + tie_tol))[0]) + k_min


def _dimple_starts(row: np.ndarray, threshold: float, k_min: int) -> list[int]:
    below = np.zeros(row.shape, dtype=bool)
    below[k_min - 1 :] = np.nan_to_num(row[k_min - 1 :], nan=np.inf) <= threshold
    starts = []
    for i in np.flatnonzero(below):
        if i == 0 or not below[i - 1]:
            starts.append(int(i) + 1)
    return starts


def recommend_order(
    sg: GapSpectrogram,
    k_min: int = 2,
    strong_fraction: float = 2.0 / 3.0,
    strong_depth: float = 10.0,
    weak_depth: float = 3.0,
    tie_tol: float = 1e-10,
) -> OrderRecommendation:
    """Recommend the DMD window size from the dimple structure of `sg`.

    Each row's minimum over ``k >= k_min`` is located (values within
    `tie_tol` of the minimum count as ties and go to the smaller ``k``), and
    the most frequent row minimizer becomes ``n_star``. Confidence is
    ``"strong"`` when at least `strong_fraction` of rows agree and the depth
    is at least `strong_depth`; ``"weak"`` when only the depth reaches
    `weak_depth`; ``"none"`` otherwise.

    The period estimate is the median spacing between the starts of runs of
    row 1 that dip below ``2 * r(n_star) + tie_tol``; it is None when fewer
    than two such runs exist.
    """
    values = np.asarray(sg.values, dtype=float)
    if values.ndim != 2 or values.shape[0] == 0 or values.shape[1] == 0:
        raise ValidationError("spectrogram is empty")
    if k_min < 2:
        raise ValidationError(f"k_min must be >= 2, got {k_min}")
    if k_min > values.shape[1]:
        raise BoundsError(f"k_min={k_min} exceeds the spectrogram width {values.shape[1]}")

    argmins = np.array([_row_argmin(row, k_min, tie_tol) for row in values])
    valid = argmins > 0
    if not valid.any():
        raise ValidationError(f"no spectrogram entries with k >= {k_min}")
    counts = np.bincount(argmins[valid])
    n_star = int(np.argmax(counts))
    agreement = float(counts[n_star] / valid.sum())

    depths = []
    for row in values[valid]:
        at = row[n_star - 1]
        if np.isnan(at):
            continue
        # past a genuine dimple the windows are degenerate and the gaps collapse,
        # so the background is taken from window sizes below n_star
        background = row[k_min - 1 : n_star - 1] if n_star > k_min else row[k_min - 1 :]
        depths.append(np.nanmedian(background) / max(at, EPS))
    depth = float(np.median(depths)) if depths else 1.0

    if agreement >= strong_fraction and depth >= strong_depth:
        confidence = "strong"
    elif depth >= weak_depth:
        confidence = "weak"
    else:
        confidence = "none"

    period = None
    first = values[0]
    if not np.isnan(first[n_star - 1]):
        starts = _dimple_starts(first, 2.0 * first[n_star - 1] + tie_tol, k_min)
        if len(starts) >= 2:
            period = int(round(float(np.median(np.diff(starts)))))

    return OrderRecommendation(n_star, argmins, period, depth, confidence, agreement)


def conditioning_report(m: SnapshotMatrix, k_max: int | None = None, colinear_tol: float = 1e-8) -> ConditioningReport:
    """Condition numbers of the growing prefixes ``X_{1:k}``, ``k = 1 .. k_max``.

    Prefixes with ``sigma_min / sigma_max < colinear_tol`` are flagged: gap
    values computed from them are at the mercy of rounding errors.
    """
    if k_max is None:
        k_max = m.L
    if not 1 <= k_max <= m.L:
        raise BoundsError(f"k_max must lie in 1..{m.L}, got {k_max}")
    x = np.asarray(m)
    cond = np.empty(k_max)
    flags = np.zeros(k_max, dtype=bool)
    for k in range(1, k_max + 1):
        s = np.linalg.svd(x[:, :k], compute_uv=False)
        if s.size < k or s[0] == 0.0:
            ratio = 0.0
        else:
            ratio = s[-1] / s[0]
        cond[k - 1] = 1.0 / ratio if ratio > 0 else np.inf
        flags[k - 1] = ratio < colinear_tol
    return ConditioningReport(np.arange(1, k_max + 1), cond, flags, colinear_tol)


def sensitivity_table(trials: int = 100, dim: int = 20, seed: int = 0) -> np.ndarray:
    """Rows ``(lhs, rhs, |lhs - rhs|)`` of :func:`sensitivity_check` on random Gaussian triples."""
    if trials < 1 or dim < 2:
        raise ValidationError(f"need trials >= 1 and dim >= 2, got trials={trials}, dim={dim}")
    rng = np.random.Generator(np.random.PCG64(seed))
    out = np.empty((trials, 3))
    for i in range(trials):
        xi, d1, d2 = rng.standard_normal((3, dim))
        lhs, rhs = sensitivity_check(xi, d1, d2)
        out[i] = lhs, rhs, abs(lhs - rhs)
    return out
