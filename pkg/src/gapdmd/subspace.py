"""Gap metric between finite-dimensional subspaces.

Subspaces are carried as :class:`OrthonormalBasis` objects built from the
economy SVD of a set of generating vectors. The gap between two subspaces is
the operator norm of the difference of their orthogonal projectors; it equals
the sine of the largest principal angle when the dimensions agree and is 1
otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, ShapeError, SizeError, ValidationError

__all__ = [
    "DEFAULT_RANK_TOL",
    "OrthonormalBasis",
    "GapValue",
    "orthonormalize",
    "gap",
    "gap_oracle",
    "angle_operator_norm",
    "sensitivity_check",
]

DEFAULT_RANK_TOL = 1e-10
ORACLE_MAX_N = 2000


@dataclass(frozen=True)
class OrthonormalBasis:
    """``N x r`` matrix with orthonormal columns.

    Attributes
    ----------
    q : ndarray
        Basis vectors as columns; ``r`` may be 0 for the trivial subspace.
    rank_tolerance : float
        Relative singular-value cutoff used when the basis was built.
    singular_values : ndarray
        All singular values of the generating set, including discarded ones.
    """

    q: np.ndarray
    rank_tolerance: float = DEFAULT_RANK_TOL
    singular_values: np.ndarray | None = None

    @property
    def ambient_dim(self) -> int:
        return self.q.shape[0]

    @property
    def rank(self) -> int:
        return self.q.shape[1]

    def projector(self) -> np.ndarray:
        return self.q @ self.q.T


@dataclass(frozen=True)
class GapValue:
    """Gap, angular distance and the dimensions of the compared subspaces.

    ``dims_match`` is False when the gap is 1 only because the ranks differ,
    which lets callers tell "genuinely far" apart from "rank dropped".
    """

    gap: float
    angle: float
    dims: tuple[int, int]

    @property
    def dims_match(self) -> bool:
        return self.dims[0] == self.dims[1]

    @classmethod
    def from_gap(cls, value: float, dims) -> "GapValue":
        value = float(min(max(value, 0.0), 1.0))
        return cls(value, float(np.arcsin(value)), (int(dims[0]), int(dims[1])))


def orthonormalize(m, rel_tol: float = DEFAULT_RANK_TOL) -> OrthonormalBasis:
    """Orthonormal basis for the numerically significant column space of `m`.

    Singular values at or below ``rel_tol * sigma_max`` do not count towards
    the rank. A zero matrix yields the empty basis (``r = 0``).
    """
    if not 0.0 < rel_tol < 1.0:
        raise ValidationError(f"rel_tol must lie in (0, 1), got {rel_tol}")
    a = np.asarray(m, dtype=np.float64)
    if a.ndim == 1:
        a = a[:, None]
    if a.ndim != 2:
        raise ShapeError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("cannot orthonormalize a matrix with non-finite entries")
    if a.shape[1] == 0:
        return OrthonormalBasis(np.zeros((a.shape[0], 0)), rel_tol, np.zeros(0))
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return OrthonormalBasis(np.zeros((a.shape[0], 0)), rel_tol, s)
    r = int(np.count_nonzero(s > rel_tol * s[0]))
    return OrthonormalBasis(np.ascontiguousarray(u[:, :r]), rel_tol, s)


def _as_basis(b) -> OrthonormalBasis:
    if isinstance(b, OrthonormalBasis):
        return b
    return OrthonormalBasis(np.asarray(b, dtype=np.float64))


def angle_operator_norm(b1, b2) -> float:
    """Norm of the projector onto `b1` restricted to the complement of `b2`.

    Computed as ``||(I - P2) q1||_2``, i.e. the largest sine among the
    principal angles measured from `b1`.
    """
    q1, q2 = _as_basis(b1).q, _as_basis(b2).q
    if q1.shape[1] == 0:
        return 0.0
    residual = q1 - q2 @ (q2.T @ q1)
    return float(np.linalg.norm(residual, 2))


def gap(b1, b2, method: str = "sine") -> GapValue:
    """Gap metric ``||P1 - P2||`` between two subspaces.

    Parameters
    ----------
    b1, b2 : OrthonormalBasis
        Bases in the same ambient space.
    method : {"sine", "cosine"}
        ``"cosine"`` evaluates ``sqrt(1 - sigma_min(q1' q2)^2)``. ``"sine"``
        (default) evaluates the norm of ``(I - P2) q1`` directly, which stays
        accurate for nearly coincident subspaces where the cosine form loses
        half the digits.

    Returns
    -------
    GapValue
        With gap 1 and angle pi/2 whenever the dimensions differ.
    """
    b1, b2 = _as_basis(b1), _as_basis(b2)
    if b1.ambient_dim != b2.ambient_dim:
        raise ShapeError(f"ambient dimensions differ: {b1.ambient_dim} vs {b2.ambient_dim}")
    dims = (b1.rank, b2.rank)
    if dims[0] != dims[1]:
        return GapValue(1.0, float(np.pi / 2), dims)
    if dims[0] == 0:
        return GapValue(0.0, 0.0, dims)
    if method == "sine":
        # the max over both orderings is symmetric in the arguments bit for bit
        value = max(angle_operator_norm(b1, b2), angle_operator_norm(b2, b1))
    elif method == "cosine":
        m12 = b1.q.T @ b2.q
        smin = min(
            np.linalg.svd(m12, compute_uv=False)[-1],
            np.linalg.svd(m12.T, compute_uv=False)[-1],
        )
        value = np.sqrt(min(max(1.0 - smin * smin, 0.0), 1.0))
    else:
        raise ValidationError(f"unknown gap method {method!r}")
    return GapValue.from_gap(value, dims)


def gap_oracle(b1, b2) -> GapValue:
    """Reference gap from dense projectors: largest singular value of ``P1 - P2``.

    Only meant for verification; refuses ambient dimensions above 2000.
    """
    b1, b2 = _as_basis(b1), _as_basis(b2)
    if b1.ambient_dim != b2.ambient_dim:
        raise ShapeError(f"ambient dimensions differ: {b1.ambient_dim} vs {b2.ambient_dim}")
    if b1.ambient_dim > ORACLE_MAX_N:
        raise SizeError(
            f"gap_oracle forms dense {b1.ambient_dim}x{b1.ambient_dim} projectors "
            f"(limit {ORACLE_MAX_N}); use gap() instead"
        )
    diff = b1.projector() - b2.projector()
    value = float(np.linalg.svd(diff, compute_uv=False)[0]) if diff.size else 0.0
    return GapValue.from_gap(value, (b1.rank, b2.rank))


def _deflate(v: np.ndarray, direction: np.ndarray) -> np.ndarray:
    unit = direction / np.linalg.norm(direction)
    v = v - unit * (unit @ v)
    return v - unit * (unit @ v)


def sensitivity_check(xi, d1, d2, rel_tol: float = DEFAULT_RANK_TOL) -> tuple[float, float]:
    """Compare ``gap(span(xi+d1, xi), span(xi+d2, xi))`` with ``gap(span(d1), span(d2))``.

    The perturbations are first projected onto the orthogonal complement of
    `xi`, so any inputs satisfy the orthogonality hypothesis. For such inputs
    both values coincide; a tiny perturbation of nearly co-linear vectors can
    therefore move the gap anywhere in [0, 1].

    Returns
    -------
    (lhs, rhs) : tuple of float

    Raises
    ------
    DegenerateInputError
        If `xi` is zero or a projected perturbation vanishes.
    """
    xi = np.asarray(xi, dtype=np.float64).ravel()
    d1 = np.asarray(d1, dtype=np.float64).ravel()
    d2 = np.asarray(d2, dtype=np.float64).ravel()
    if not (xi.shape == d1.shape == d2.shape):
        raise ShapeError(f"vector shapes differ: {xi.shape}, {d1.shape}, {d2.shape}")
    xi_norm = np.linalg.norm(xi)
    if xi_norm == 0.0:
        raise DegenerateInputError("xi is the zero vector")
    p1, p2 = _deflate(d1, xi), _deflate(d2, xi)
    for name, raw, proj in (("d1", d1, p1), ("d2", d2, p2)):
        if np.linalg.norm(proj) <= 1e-14 * max(np.linalg.norm(raw), xi_norm):
            raise DegenerateInputError(f"{name} has no component orthogonal to xi")
    lhs = gap(
        orthonormalize(np.column_stack([xi + p1, xi]), rel_tol),
        orthonormalize(np.column_stack([xi + p2, xi]), rel_tol),
    ).gap
    rhs = gap(orthonormalize(p1, rel_tol), orthonormalize(p2, rel_tol)).gap
    return lhs, rhs
