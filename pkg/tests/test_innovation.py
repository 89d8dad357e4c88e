import io
import time

import numpy as np
import pytest

from conftest import periodic_columns
from gapdmd.errors import BoundsError, ValidationError
from gapdmd.innovation import (
    gram_kernel,
    ip_profile,
    ip_profile_recursive,
    ip_profile_svd,
    read_spectrogram_csv,
    spectrogram,
    write_profile_csv,
    write_spectrogram_csv,
)
from gapdmd.matstore import SnapshotMatrix
from gapdmd.subspace import OrthonormalBasis, gap_oracle

BOTH = [ip_profile_svd, ip_profile_recursive]


def brute_force_r(x, start, k):
    """Gap between window spans via QR bases and dense projectors."""
    old = np.linalg.qr(x[:, start - 1 : start - 1 + k])[0]
    new = np.linalg.qr(x[:, start : start + k])[0]
    return gap_oracle(OrthonormalBasis(old), OrthonormalBasis(new)).gap


@pytest.mark.parametrize("profile", BOTH)
def test_canonical_columns(profile):
    p = profile(SnapshotMatrix(np.eye(6)), 1, 4)
    np.testing.assert_allclose(p.values, 1.0, atol=1e-15)


@pytest.mark.parametrize("profile,tol", [(ip_profile_svd, 1e-10), (ip_profile_recursive, 1e-6)])
def test_four_periodic_dimple(profile, tol):
    m = periodic_columns(10, 4, 12, seed=3)
    p = profile(m, 1, 6)
    assert p.r(4) <= tol
    assert min(p.values[:3]) > 1e-3


@pytest.mark.parametrize("profile", BOTH)
def test_first_value_is_pairwise_sine(profile):
    x = np.column_stack([[1.0, 0, 0], [1 / np.sqrt(2), 1 / np.sqrt(2), 0], [0, 0, 1.0]])
    p = profile(SnapshotMatrix(x), 1, 1)
    assert p.r(1) == pytest.approx(0.7071067811865476, abs=1e-15)
    assert p.angles[0] == pytest.approx(np.pi / 4, abs=1e-12)


def test_svd_path_matches_brute_force(rng):
    x = rng.standard_normal((30, 15))
    for start in (1, 4):
        p = ip_profile_svd(SnapshotMatrix(x), start)
        expected = [brute_force_r(x, start, k) for k in p.ks]
        np.testing.assert_allclose(p.values, expected, atol=1e-10)


def test_recursive_matches_svd_on_random(rng):
    for _ in range(5):
        m = SnapshotMatrix(rng.standard_normal((200, 60)))
        a, b = ip_profile_svd(m), ip_profile_recursive(m)
        assert np.max(np.abs(a.values - b.values)) <= 1e-6
        assert not a.flags.any() and not b.flags.any()


def test_recursive_flags_degenerate_entries():
    m = periodic_columns(10, 4, 12, seed=3)
    p = ip_profile_recursive(m, 1, 8)
    assert not p.flags[:4].any()
    assert p.flags[4:].all()
    np.testing.assert_allclose(p.values, ip_profile_svd(m, 1, 8).values, atol=1e-6)


def test_recursive_without_reorthogonalization_still_runs(rng):
    m = SnapshotMatrix(rng.standard_normal((50, 20)))
    p = ip_profile_recursive(m, reorthogonalize=False)
    np.testing.assert_allclose(p.values, ip_profile_svd(m).values, atol=1e-6)


def test_rank_drop_gives_gap_one_and_flag():
    # x_2 = 0 makes the newer window one dimension short
    x = np.column_stack([[1.0, 0, 0], [0, 0, 0], [0, 1.0, 0], [0, 0, 1.0]])
    p = ip_profile_svd(SnapshotMatrix(x), 1, 2)
    assert p.r(1) == 1.0 and p.flags[0]


@pytest.mark.parametrize("start,k_max", [(1, 5), (2, 4), (0, 1), (1, 0)])
def test_profile_bounds(start, k_max):
    with pytest.raises(BoundsError):
        ip_profile_svd(SnapshotMatrix(np.eye(6)), start, k_max)


def test_unknown_method():
    with pytest.raises(ValidationError):
        ip_profile(SnapshotMatrix(np.eye(4)), method="qr")


def test_values_in_unit_interval(rng):
    m = SnapshotMatrix(rng.standard_normal((8, 30)))
    for method in ("svd", "recursive"):
        v = ip_profile(m, method=method).values
        assert np.all((v >= 0) & (v <= 1))


def test_spectrogram_row_one_is_profile(periodic30):
    sg = spectrogram(periodic30, 3, 40)
    np.testing.assert_allclose(sg.row(1), ip_profile_svd(periodic30, 1, 40).values, atol=1e-9)


def test_spectrogram_periodic_column():
    m = periodic_columns(20, 6, 30, seed=1)
    sg = spectrogram(m, 10, 12)
    assert np.all(sg.values[:, 5] <= 1e-6)


def test_spectrogram_random_entries_near_one(rng):
    x = rng.standard_normal((120, 12))
    sg = spectrogram(SnapshotMatrix(x), 4, 5)
    for start in range(1, 5):
        for k in range(1, 6):
            assert sg.value(start, k) == pytest.approx(brute_force_r(x, start, k), abs=1e-10)
    assert np.nanmin(sg.values) > 0.5


def test_spectrogram_absent_entries():
    sg = spectrogram(SnapshotMatrix(np.eye(8)), 4, 6)
    # present iff start + k <= L - 1 = 7
    for start in range(1, 5):
        for k in range(1, 7):
            assert sg.present[start - 1, k - 1] == (start + k <= 7)


def test_spectrogram_parallel_equals_sequential(rng):
    m = SnapshotMatrix(rng.standard_normal((40, 25)))
    a = spectrogram(m, 10, 15, workers=1)
    b = spectrogram(m, 10, 15, workers=4)
    assert a.values.tobytes() == b.values.tobytes()


@pytest.mark.parametrize("l_max,k_max,exc", [(0, 3, ValidationError), (3, 0, ValidationError),
                                             (7, 2, BoundsError), (1, 7, BoundsError)])
def test_spectrogram_validation(l_max, k_max, exc):
    with pytest.raises(exc):
        spectrogram(SnapshotMatrix(np.eye(8)), l_max, k_max)


def test_gram_orthonormal_columns():
    g = gram_kernel(SnapshotMatrix(np.eye(5)[:, :4]))
    np.testing.assert_array_equal(g.k, np.eye(4))
    assert g.toeplitz_deviation == 0.0


def test_gram_constant_series():
    c = 1.7
    g = gram_kernel(SnapshotMatrix(np.tile(c * np.eye(3)[:, :1], (1, 5))))
    np.testing.assert_allclose(g.k, c * c, rtol=1e-15)
    assert g.toeplitz_deviation == 0.0


def test_gram_brute_force(rng):
    x = rng.standard_normal((7, 9))
    g = gram_kernel(SnapshotMatrix(x))
    for i in range(9):
        for j in range(9):
            assert g.k[i, j] == pytest.approx(sum(x[a, i] * x[a, j] for a in range(7)), rel=1e-12, abs=1e-12)
    assert np.array_equal(g.k, g.k.T)
    assert g.is_psd()


def test_gram_transient_is_not_toeplitz():
    x = np.outer([1.0, 2.0, 0.5], 0.5 ** np.arange(10))
    assert gram_kernel(SnapshotMatrix(x)).toeplitz_deviation > 1.0


def test_profile_csv_format():
    buf = io.StringIO()
    write_profile_csv(ip_profile_svd(SnapshotMatrix(np.eye(4)), 1, 2), buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "k,r,theta,method,flag"
    assert lines[1].startswith("1,1,1.5707963267948966,svd,0")
    assert len(lines) == 3


def test_spectrogram_csv_round_trip(tmp_path, rng):
    sg = spectrogram(SnapshotMatrix(rng.standard_normal((10, 9))), 4, 6)
    path = tmp_path / "sg.csv"
    write_spectrogram_csv(sg, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "l,1,2,3,4,5,6"
    # row 4 keeps k <= 4, so two trailing cells are empty
    assert lines[-1].endswith(",,") and not lines[-1].endswith(",,,")
    back = read_spectrogram_csv(path)
    np.testing.assert_array_equal(back.present, sg.present)
    np.testing.assert_array_equal(back.values[sg.present], sg.values[sg.present])


def test_recursive_cost_scales_linearly_in_state_dimension(rng):
    def timed(n):
        m = SnapshotMatrix(rng.standard_normal((n, 42)))
        best = np.inf
        for _ in range(3):
            t0 = time.perf_counter()
            ip_profile_recursive(m, 1, 40)
            best = min(best, time.perf_counter() - t0)
        return best

    ratio = timed(16000) / timed(4000)
    assert ratio < 12.0
