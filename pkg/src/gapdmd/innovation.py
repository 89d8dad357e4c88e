"""Innovation parameters: gaps between spans of adjacent sliding windows.

For a starting snapshot ``l`` and a window size ``k`` the innovation
parameter is

    r[l, k] = gap(span(x_l, ..., x_{l+k-1}), span(x_{l+1}, ..., x_{l+k}))

Small values mean the newest snapshot brings almost no new direction, which
is what an (almost) invariant window span looks like. Two independent
routes are provided: one orthonormalizes each window from scratch through
the economy SVD, the other updates a Gram-Schmidt basis of the shared middle
of the window one snapshot at a time.
"""
from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundsError, ParseError, ValidationError
from .matstore import SnapshotMatrix, format_float, write_text
from .subspace import DEFAULT_RANK_TOL, gap, orthonormalize

__all__ = [
    "InnovationProfile",
    "GapSpectrogram",
    "GramKernel",
    "ip_profile",
    "ip_profile_svd",
    "ip_profile_recursive",
    "spectrogram",
    "gram_kernel",
    "write_profile_csv",
    "write_spectrogram_csv",
    "read_spectrogram_csv",
]

# deflated norm below this fraction of the original norm = "already in the span"
DEFLATION_TOL = 1e-12
METHODS = ("svd", "recursive")


@dataclass(frozen=True)
class InnovationProfile:
    """Innovation parameters ``r[start, k]`` for ``k = 1 .. k_max``.

    ``values[k - 1]`` holds ``r_k``; ``flags[k - 1]`` marks entries where a
    window was numerically rank deficient.
    """

    start: int
    values: np.ndarray
    method: str
    flags: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.flags is None:
            object.__setattr__(self, "flags", np.zeros(self.values.shape, dtype=bool))

    @property
    def k_max(self) -> int:
        return self.values.size

    @property
    def ks(self) -> np.ndarray:
        return np.arange(1, self.values.size + 1)

    @property
    def angles(self) -> np.ndarray:
        return np.arcsin(np.clip(self.values, 0.0, 1.0))

    def r(self, k: int) -> float:
        """Innovation parameter for window size `k` (1-based)."""
        if not 1 <= k <= self.values.size:
            raise BoundsError(f"k={k} outside 1..{self.values.size}")
        return float(self.values[k - 1])


@dataclass(frozen=True)
class GapSpectrogram:
    """``r[l, k]`` over starting index ``l`` and window size ``k``.

    Entries whose windows would overrun the record are NaN in `values`;
    ``present`` is the boolean mask of computed entries.
    """

    values: np.ndarray
    method: str = "svd"

    @property
    def l_max(self) -> int:
        return self.values.shape[0]

    @property
    def k_max(self) -> int:
        return self.values.shape[1]

    @property
    def starts(self) -> np.ndarray:
        return np.arange(1, self.l_max + 1)

    @property
    def ks(self) -> np.ndarray:
        return np.arange(1, self.k_max + 1)

    @property
    def present(self) -> np.ndarray:
        return ~np.isnan(self.values)

    def row(self, start: int) -> np.ndarray:
        return self.values[start - 1]

    def value(self, start: int, k: int) -> float:
        return float(self.values[start - 1, k - 1])


@dataclass(frozen=True)
class GramKernel:
    """Pairwise inner products ``K[i, j] = <x_i, x_j>``."""

    k: np.ndarray
    toeplitz_deviation: float

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.k)[0])

    def is_psd(self) -> bool:
        n = self.k.shape[0]
        return self.min_eigenvalue() >= -1e-8 * float(np.trace(self.k)) / n


def _check_profile_args(m: SnapshotMatrix, start: int, k_max: int | None) -> int:
    if start < 1:
        raise BoundsError(f"start must be >= 1, got {start}")
    limit = m.L - 1 - start
    if k_max is None:
        k_max = limit
    if k_max < 1:
        raise BoundsError(f"k_max must be >= 1 (start={start}, L={m.L} leaves {limit})")
    if k_max > limit:
        raise BoundsError(f"start + k_max = {start + k_max} exceeds L - 1 = {m.L - 1}")
    return k_max


def _svd_entry(x: np.ndarray, l0: int, k: int, rel_tol: float) -> tuple[float, bool]:
    b_old = orthonormalize(x[:, l0 : l0 + k], rel_tol)
    b_new = orthonormalize(x[:, l0 + 1 : l0 + k + 1], rel_tol)
    g = gap(b_old, b_new)
    degenerate = b_old.rank < k or b_new.rank < k
    return g.gap, degenerate


def ip_profile_svd(
    m: SnapshotMatrix, start: int = 1, k_max: int | None = None, rel_tol: float = DEFAULT_RANK_TOL
) -> InnovationProfile:
    """Innovation parameters by orthonormalizing both windows from scratch.

    Parameters
    ----------
    m : SnapshotMatrix
    start : int
        1-based starting snapshot ``l``.
    k_max : int, optional
        Largest window size; ``start + k_max <= L - 1`` is required.
        Defaults to the largest admissible value.
    rel_tol : float
        Rank cutoff passed to :func:`~gapdmd.subspace.orthonormalize`.
    """
    k_max = _check_profile_args(m, start, k_max)
    x = np.asarray(m)
    values = np.empty(k_max)
    flags = np.zeros(k_max, dtype=bool)
    for k in range(1, k_max + 1):
        values[k - 1], flags[k - 1] = _svd_entry(x, start - 1, k, rel_tol)
    return InnovationProfile(start, values, "svd", flags)


def _deflate(v: np.ndarray, basis: np.ndarray, passes: int) -> np.ndarray:
    if basis.shape[1] == 0:
        return v
    for _ in range(passes):
        v = v - basis @ (basis.T @ v)
    return v


def ip_profile_recursive(
    m: SnapshotMatrix,
    start: int = 1,
    k_max: int | None = None,
    reorthogonalize: bool = True,
    rel_tol: float = DEFAULT_RANK_TOL,
) -> InnovationProfile:
    """Innovation parameters by incremental Gram-Schmidt deflation.

    An orthonormal basis ``U`` of the shared middle snapshots
    ``x_{l+1} .. x_{l+k-1}`` is grown one column per step. ``u_first`` is the
    normalized component of ``x_l`` orthogonal to ``U`` and ``u_last`` the
    normalized component of ``x_{l+k}``; ``r_k`` is the sine of the angle
    between them.

    When the newest snapshot (or ``x_l``) already lies in the span of the
    middle snapshots, the entry is computed by the SVD route instead and
    flagged: the windows may then still coincide, so a blanket gap of 1 would
    be wrong.

    Parameters
    ----------
    reorthogonalize : bool
        Deflate twice against ``U`` at every step. Single-pass Gram-Schmidt
        loses orthogonality for nearly co-linear snapshots.
    """
    k_max = _check_profile_args(m, start, k_max)
    x = np.asarray(m)
    n_dim = x.shape[0]
    l0 = start - 1
    passes = 2 if reorthogonalize else 1

    values = np.empty(k_max)
    flags = np.zeros(k_max, dtype=bool)
    basis = np.empty((n_dim, k_max))
    n_basis = 0

    x_first = x[:, l0]
    first_norm = np.linalg.norm(x_first)
    first_lost = first_norm == 0.0
    u_first = x_first / first_norm if not first_lost else x_first
    # |component of x_l orthogonal to U| / |x_l|
    first_scale = 1.0

    for k in range(1, k_max + 1):
        u = basis[:, :n_basis]
        x_new = x[:, l0 + k]
        new_norm = np.linalg.norm(x_new)
        u_last = _deflate(x_new, u, passes)
        last_norm = np.linalg.norm(u_last)
        last_lost = new_norm == 0.0 or last_norm <= DEFLATION_TOL * new_norm
        if not last_lost:
            u_last = u_last / last_norm

        if first_lost or last_lost:
            values[k - 1], _ = _svd_entry(x, l0, k, rel_tol)
            flags[k - 1] = True
        else:
            c = float(np.clip(u_first @ u_last, -1.0, 1.0))
            residual = u_first - c * u_last
            # |residual| equals sin(arccos(c)) but keeps full accuracy near c = +-1
            r = min(float(np.linalg.norm(residual)), 1.0)
            values[k - 1] = r
            first_scale *= r
            if first_scale <= DEFLATION_TOL or r == 0.0:
                first_lost = True
            else:
                u_first = residual / np.linalg.norm(residual)

        if not last_lost:
            basis[:, n_basis] = u_last
            n_basis += 1
            if not first_lost and reorthogonalize:
                u_first = _deflate(u_first, basis[:, :n_basis], 1)
                u_first = u_first / np.linalg.norm(u_first)

    return InnovationProfile(start, values, "recursive", flags)


def ip_profile(m: SnapshotMatrix, start: int = 1, k_max: int | None = None, method: str = "svd", **kwargs):
    """Dispatch to :func:`ip_profile_svd` or :func:`ip_profile_recursive`."""
    if method == "svd":
        return ip_profile_svd(m, start, k_max, **kwargs)
    if method == "recursive":
        return ip_profile_recursive(m, start, k_max, **kwargs)
    raise ValidationError(f"unknown method {method!r}; expected one of {METHODS}")


def spectrogram(
    m: SnapshotMatrix,
    l_max: int,
    k_max: int,
    method: str = "svd",
    workers: int = 1,
    rel_tol: float = DEFAULT_RANK_TOL,
) -> GapSpectrogram:
    """Innovation parameters for every start ``1..l_max`` and size ``1..k_max``.

    Entries with ``l + k > L - 1`` are left absent (NaN). Rows are independent
    and may be evaluated on a thread pool; the result does not depend on
    `workers`.
    """
    if l_max < 1 or k_max < 1:
        raise ValidationError(f"l_max and k_max must be >= 1, got l_max={l_max}, k_max={k_max}")
    if l_max > m.L - 2:
        raise BoundsError(f"l_max={l_max} leaves no complete window (L={m.L})")
    if k_max > m.L - 2:
        raise BoundsError(f"k_max={k_max} exceeds L - 2 = {m.L - 2}")

    def row(start: int) -> np.ndarray:
        k_row = min(k_max, m.L - 1 - start)
        out = np.full(k_max, np.nan)
        out[:k_row] = ip_profile(m, start, k_row, method=method, rel_tol=rel_tol).values
        return out

    starts = range(1, l_max + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(row, starts))
    else:
        rows = [row(s) for s in starts]
    return GapSpectrogram(np.vstack(rows), method)


def gram_kernel(m: SnapshotMatrix) -> GramKernel:
    """Gram matrix of the snapshots and its departure from Toeplitz structure.

    The deviation is the largest, over all diagonals, of
    ``(max - min) / (|mean| + eps)`` with ``eps = 1e-9 * max|K|``.
    """
    x = np.asarray(m)
    k = x.T @ x
    k = 0.5 * (k + k.T)
    eps = 1e-9 * float(np.max(np.abs(k))) if k.size else 0.0
    eps = eps or np.finfo(float).tiny
    dev = 0.0
    for d in range(k.shape[0]):
        diag = np.diagonal(k, d)
        dev = max(dev, float((diag.max() - diag.min()) / (abs(diag.mean()) + eps)))
    return GramKernel(k, dev)


def write_profile_csv(profile: InnovationProfile, dest) -> None:
    """Write ``k,r,theta,method,flag`` rows to a path or text stream."""
    lines = ["k,r,theta,method,flag"]
    for k, r, th, fl in zip(profile.ks, profile.values, profile.angles, profile.flags):
        lines.append(f"{k},{format_float(r)},{format_float(th)},{profile.method},{int(fl)}")
    write_text("\n".join(lines) + "\n", dest)


def write_spectrogram_csv(sg: GapSpectrogram, dest) -> None:
    """Header ``l,1,2,...,k_max`` then one line per start; absent cells empty."""
    lines = ["l," + ",".join(str(k) for k in sg.ks)]
    for start, row in zip(sg.starts, sg.values):
        cells = ["" if np.isnan(v) else format_float(v) for v in row]
        lines.append(f"{start}," + ",".join(cells))
    write_text("\n".join(lines) + "\n", dest)


def read_spectrogram_csv(path) -> GapSpectrogram:
    """Inverse of :func:`write_spectrogram_csv`."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise ParseError("spectrogram needs a header and at least one row", path)
    header = rows[0]
    try:
        ks = [int(v) for v in header[1:]]
    except ValueError:
        raise ParseError("header must list integer window sizes", path, row=1) from None
    if ks != list(range(1, len(ks) + 1)):
        raise ParseError("window sizes must run 1, 2, ..., k_max", path, row=1)
    values = np.full((len(rows) - 1, len(ks)), np.nan)
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, found {len(row)}", path, row=i)
        for j, cell in enumerate(row[1:], start=2):
            if cell.strip():
                try:
                    values[i - 2, j - 2] = float(cell)
                except ValueError:
                    raise ParseError(f"cannot parse {cell!r}", path, row=i, column=j) from None
    return GapSpectrogram(values, "csv")

