"""Companion-form dynamic mode decomposition.

Given snapshots ``x_1 .. x_n`` the last one is regressed on the others,

    x_n ~ X c,   X = [x_1, ..., x_{n-1}],

and the fitted coefficients fill the last column of the ``(n-1) x (n-1)``
companion matrix ``S`` (ones on the subdiagonal), so that ``X S`` reproduces
``[x_2, ..., x_n]`` up to the regression residual. The eigenvalues of ``S``
are the DMD eigenvalues, i.e. the roots of

    lambda^{n-1} - c_{n-1} lambda^{n-2} - ... - c_2 lambda - c_1.

Sign convention: with the monic polynomial written as
``lambda^{n-1} + s_1 lambda^{n-2} + ... + s_{n-1}`` one has
``s_i = -c_{n-i}``; see :attr:`CompanionModel.monic_coeffs`.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BoundsError, ConditioningWarning, DegenerateRankWarning, ValidationError
from .matstore import SnapshotMatrix, format_float, read_array, write_array, write_text
from .subspace import DEFAULT_RANK_TOL

__all__ = [
    "CompanionModel",
    "ModeSet",
    "companion_matrix",
    "fit",
    "fit_window",
    "modes",
    "stack_lagged",
    "write_eigenvalues_csv",
    "write_coeffs_csv",
    "write_modes",
    "read_modes",
]


def companion_matrix(coeffs) -> np.ndarray:
    """Companion matrix with ones on the subdiagonal and `coeffs` as last column."""
    c = np.asarray(coeffs, dtype=np.float64).ravel()
    d = c.size
    s = np.zeros((d, d))
    if d > 1:
        s[np.arange(1, d), np.arange(d - 1)] = 1.0
    s[:, -1] = c
    return s


def _order(eigenvalues: np.ndarray) -> np.ndarray:
    return np.lexsort((np.abs(eigenvalues), np.angle(eigenvalues)))


@dataclass(frozen=True)
class CompanionModel:
    """Result of a companion-form fit.

    Attributes
    ----------
    n : int
        Window size; the regression uses ``n - 1`` predictor snapshots.
    start : int
        1-based index of the first snapshot in the window.
    coeffs : ndarray, shape (n-1,)
        Minimum-norm least-squares ``c`` with ``x_n ~ X c``.
    eigenvalues : ndarray of complex, shape (n-1,)
        Sorted by phase, then modulus.
    residual, residual_rel : float
        ``||x_n - X c||`` and the same divided by ``||x_n||``.
    condition : float
        ``sigma_max / sigma_min`` of ``X``; ``inf`` when ``X`` is numerically
        rank deficient.
    rank : int
        Numerical rank of ``X`` at the solver's tolerance.
    """

    n: int
    start: int
    coeffs: np.ndarray
    eigenvalues: np.ndarray
    residual: float
    residual_rel: float
    condition: float
    rank: int

    @property
    def companion(self) -> np.ndarray:
        return companion_matrix(self.coeffs)

    @property
    def monic_coeffs(self) -> np.ndarray:
        """``(s_1, ..., s_{n-1})`` of the monic characteristic polynomial."""
        return -self.coeffs[::-1]

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)


@dataclass(frozen=True)
class ModeSet:
    """Spatial modes ``X w_i`` (unit norm) with their eigenvalues and amplitudes."""

    n: int
    modes: np.ndarray
    eigenvalues: np.ndarray
    amplitudes: np.ndarray
    eigvec_condition: float

    def reconstruct(self, t: int) -> np.ndarray:
        """Model prediction of snapshot ``x_{start+t-1}``, ``t >= 1``."""
        return self.modes @ (self.amplitudes * self.eigenvalues ** (t - 1))


def _check_window(m: SnapshotMatrix, start: int, n: int) -> None:
    if n < 2:
        raise ValidationError(f"n must be >= 2, got {n}")
    if start < 1:
        raise BoundsError(f"start must be >= 1, got {start}")
    if start + n - 1 > m.L:
        raise BoundsError(f"window of {n} snapshots from {start} exceeds L={m.L}")


def fit_window(m: SnapshotMatrix, start: int, n: int, rel_tol: float = DEFAULT_RANK_TOL) -> CompanionModel:
    """Fit the companion model on snapshots ``start .. start+n-1``.

    The coefficients come from the SVD pseudoinverse of the predictor block
    with singular values at or below ``rel_tol * sigma_max`` discarded, which
    yields the minimum-norm solution when the block is rank deficient. In
    that case a :class:`DegenerateRankWarning` is issued and ``condition`` is
    ``inf``.
    """
    _check_window(m, start, n)
    data = np.asarray(m)
    x = data[:, start - 1 : start + n - 2]
    target = data[:, start + n - 2]
    if x.shape[0] < n - 1:
        warnings.warn(
            f"state dimension N={x.shape[0]} is smaller than n-1={n - 1}; the fit is underdetermined",
            DegenerateRankWarning,
            stacklevel=2,
        )

    u, s, vt = np.linalg.svd(x, full_matrices=False)
    keep = s > rel_tol * s[0] if s[0] > 0 else np.zeros(s.shape, dtype=bool)
    rank = int(np.count_nonzero(keep))
    coeffs = vt[keep].T @ ((u[:, keep].T @ target) / s[keep])
    if rank < n - 1:
        condition = np.inf
        warnings.warn(
            f"predictor window is rank deficient (rank {rank} < {n - 1}); using the minimum-norm solution",
            DegenerateRankWarning,
            stacklevel=2,
        )
    else:
        condition = float(s[0] / s[-1])

    residual = float(np.linalg.norm(target - x @ coeffs))
    target_norm = float(np.linalg.norm(target))
    eigenvalues = np.linalg.eigvals(companion_matrix(coeffs))
    eigenvalues = eigenvalues[_order(eigenvalues)]
    return CompanionModel(
        n=n,
        start=start,
        coeffs=coeffs,
        eigenvalues=eigenvalues,
        residual=residual,
        residual_rel=residual / target_norm if target_norm > 0 else 0.0,
        condition=condition,
        rank=rank,
    )


def fit(m: SnapshotMatrix, n: int, rel_tol: float = DEFAULT_RANK_TOL) -> CompanionModel:
    """Fit the companion model on the first `n` snapshots."""
    return fit_window(m, 1, n, rel_tol)


def modes(m: SnapshotMatrix, model: CompanionModel, cond_warn: float = 1e8) -> ModeSet:
    """DMD modes for a fitted `model`.

    Mode ``i`` is ``X w_i`` scaled to unit norm, where ``w_i`` is the
    companion eigenvector for ``lambda_i``. Amplitudes are the least-squares
    coefficients of the first window snapshot in the mode basis.
    """
    _check_window(m, model.start, model.n)
    x = np.asarray(m)[:, model.start - 1 : model.start + model.n - 2]
    eigenvalues, w = np.linalg.eig(model.companion)
    order = _order(eigenvalues)
    eigenvalues, w = eigenvalues[order], w[:, order]

    phi = x @ w
    norms = np.linalg.norm(phi, axis=0)
    norms[norms == 0] = 1.0
    phi = phi / norms
    amplitudes = np.linalg.lstsq(phi, x[:, 0].astype(complex), rcond=None)[0]

    cond = float(np.linalg.cond(w))
    if not np.isfinite(cond) or cond > cond_warn:
        warnings.warn(
            f"companion eigenvectors are ill conditioned (cond={cond:.3g}); eigenvalues may be clustered or defective",
            ConditioningWarning,
            stacklevel=2,
        )
    return ModeSet(model.n, phi, eigenvalues, amplitudes, cond)


def stack_lagged(m: SnapshotMatrix, lags: int) -> SnapshotMatrix:
    """Stack lagged snapshots into a higher-order state.

    Column ``t`` of the result is ``[x_{t+lags}; ...; x_{t+1}; x_t]`` for
    ``t = 1 .. L - lags``.
    """
    if lags < 1:
        raise ValidationError(f"lags must be >= 1, got {lags}; use the matrix directly for lags=0")
    if lags > m.L - 2:
        raise ValidationError(f"lags={lags} leaves fewer than two stacked snapshots (L={m.L})")
    data = np.asarray(m)
    width = m.L - lags
    return SnapshotMatrix(np.vstack([data[:, lags - j : lags - j + width] for j in range(lags + 1)]))


def write_eigenvalues_csv(eigenvalues, dest) -> None:
    lines = ["re,im,modulus,phase"]
    for lam in np.asarray(eigenvalues, dtype=complex):
        lines.append(
            ",".join(format_float(v) for v in (lam.real, lam.imag, abs(lam), np.angle(lam)))
        )
    write_text("\n".join(lines) + "\n", dest)


def write_coeffs_csv(model: CompanionModel, dest) -> None:
    lines = ["j,c_j"] + [f"{j},{format_float(c)}" for j, c in enumerate(model.coeffs, start=1)]
    write_text("\n".join(lines) + "\n", dest)


def write_modes(ms: ModeSet, path) -> Path:
    """Write modes as a gdmd matrix with interleaved real/imaginary columns.

    A JSON sidecar ``<path>.json`` carries ``n`` and the eigenvalues as
    ``[re, im]`` pairs. Returns the sidecar path.
    """
    path = Path(path)
    inter = np.empty((ms.modes.shape[0], 2 * ms.modes.shape[1]))
    inter[:, 0::2] = ms.modes.real
    inter[:, 1::2] = ms.modes.imag
    write_array(inter, path, "gdmd")
    sidecar = path.with_name(path.name + ".json")
    meta = {"n": ms.n, "eigenvalues": [[float(v.real), float(v.imag)] for v in ms.eigenvalues]}
    sidecar.write_text(json.dumps(meta, separators=(",", ":")) + "\n", encoding="utf-8")
    return sidecar


def read_modes(path) -> ModeSet:
    """Inverse of :func:`write_modes` (amplitudes are not stored and come back as NaN)."""
    path = Path(path)
    inter = read_array(path, "gdmd")
    meta = json.loads(path.with_name(path.name + ".json").read_text(encoding="utf-8"))
    modes_ = inter[:, 0::2] + 1j * inter[:, 1::2]
    eig = np.array([complex(re, im) for re, im in meta["eigenvalues"]])
    return ModeSet(int(meta["n"]), modes_, eig, np.full(eig.shape, np.nan + 0j), float("nan"))
